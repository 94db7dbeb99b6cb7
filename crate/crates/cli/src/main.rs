use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fractal_bv_harness::cache::load_or_compute;
use fractal_bv_harness::output::write_file;
use fractal_bv_harness::{report, run, ExperimentConfig, HarnessError, Overrides, EXPERIMENTS};

#[derive(Parser)]
#[command(name = "fractal-bv", version, about = "BV functions and heat kernels on fractal graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML or JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Spectral cache directory (overrides FRACTAL_BV_CACHE and the config).
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig, HarnessError> {
        let mut cfg = ExperimentConfig::load(&self.config)?;
        Overrides { cache_dir: self.cache_dir.clone(), out: self.out.clone(), jobs: self.jobs, seed: self.seed }
            .apply(&mut cfg);
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build the graph and write it as JSON.
    Build(Common),
    /// Compute or load the eigendecomposition and write the eigenvalues.
    Spectrum(Common),
    /// Run the configured experiments.
    Run(Common),
    /// Print the experiment registry.
    List,
    /// Summarize a finished run.
    Report {
        /// Run directory containing manifest.json.
        dir: PathBuf,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cmd: Command) -> Result<(), HarnessError> {
    match cmd {
        Command::List => {
            for e in EXPERIMENTS {
                println!("{:<20} {}  [{}]", e.id, e.description, e.chain);
            }
        }
        Command::Build(c) => {
            let cfg = c.load()?;
            let (_, g) = run::build(&cfg)?;
            let path = write_file(&cfg.output_dir, "graph.json", &g.to_json())?;
            println!("{} level {}: {} vertices, {} edges -> {}", g.spec().name(), g.level(), g.len(), g.edges().len(), path.display());
        }
        Command::Spectrum(c) => {
            let cfg = c.load()?;
            let (_, g) = run::build(&cfg)?;
            let (sd, outcome) = load_or_compute(cfg.cache_dir.as_deref(), &g, cfg.caps.eigen)?;
            let mut text = String::from("index,eigenvalue\n");
            for (k, l) in sd.eigenvalues().iter().enumerate() {
                text.push_str(&format!("{k},{l:?}\n"));
            }
            let path = write_file(&cfg.output_dir, "spectrum.csv", &text)?;
            println!("{} eigenvalues ({outcome:?}) -> {}", sd.len(), path.display());
        }
        Command::Run(c) => {
            let cfg = c.load()?;
            let rec = run::run(&cfg)?;
            let (mut pass, mut fail) = (0, 0);
            for e in &rec.experiments {
                pass += e.verdicts.values().filter(|v| **v).count();
                fail += e.verdicts.values().filter(|v| !**v).count();
            }
            println!(
                "{} experiments, {pass} verdicts passed, {fail} failed, cache {}, {:.1}s -> {}",
                rec.experiments.len(),
                rec.cache,
                rec.wall_time_secs,
                cfg.output_dir.display()
            );
        }
        Command::Report { dir } => print!("{}", report::render(&dir)?),
    }
    Ok(())
}
