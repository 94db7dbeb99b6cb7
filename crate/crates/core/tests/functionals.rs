use fractal_bv::families::{cell_indicator, piecewise_harmonic};
use fractal_bv::functionals::*;
use fractal_bv::geometry::{build_graph, ApproxGraph, FractalSpec};
use fractal_bv::grid::{ball_radius, default_r_grid, default_t_grid, spanning_grid, GridFunction};
use fractal_bv::spectral::{assemble_form, eigendecompose, SpectralData, DEFAULT_EIGEN_CAP};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;

fn graph(spec: FractalSpec, level: usize) -> ApproxGraph {
    build_graph(&spec, level, 20_000).unwrap()
}

fn gasket4() -> &'static (ApproxGraph, SpectralData) {
    static CELL: OnceLock<(ApproxGraph, SpectralData)> = OnceLock::new();
    CELL.get_or_init(|| {
        let g = graph(FractalSpec::gasket(), 4);
        let sd = eigendecompose(&assemble_form(&g).unwrap(), DEFAULT_EIGEN_CAP).unwrap();
        (g, sd)
    })
}

fn random_fn(n: usize, seed: u64) -> GridFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    GridFunction::new((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

/// Vertices `y` with `d(x, y) < r`, by scanning every pair.
fn ball(g: &ApproxGraph, x: usize, r: f64) -> Vec<usize> {
    let rad = ball_radius(r, g.mesh());
    (0..g.len()).filter(|&y| g.dist(x, y) < rad).collect()
}

fn brute_besov(g: &ApproxGraph, f: &[f64], p: f64, alpha: f64, r: f64) -> f64 {
    let mu = g.measure();
    let mut s = 0.0;
    for x in 0..g.len() {
        for y in ball(g, x, r) {
            s += (f[x] - f[y]).abs().powf(p) * mu[x] * mu[y];
        }
    }
    r.powf(-alpha - g.spec().d_h / p) * s.powf(1.0 / p)
}

fn brute_ks(g: &ApproxGraph, f: &[f64], lambda: f64, r: f64) -> f64 {
    let mu = g.measure();
    let mut s = 0.0;
    for x in 0..g.len() {
        let b = ball(g, x, r);
        let vol: f64 = b.iter().map(|&y| mu[y]).sum();
        let inner: f64 = b.iter().map(|&y| (f[x] - f[y]).abs() * mu[y]).sum();
        s += mu[x] * inner / vol;
    }
    r.powf(-lambda) * s
}

fn brute_heat_integral(sd: &SpectralData, f: &[f64], p: f64, t: f64) -> f64 {
    let mu = sd.measure();
    let mut s = 0.0;
    for x in 0..sd.len() {
        for y in 0..sd.len() {
            s += sd.heat_kernel(t, x, y).unwrap() * (f[x] - f[y]).abs().powf(p) * mu[x] * mu[y];
        }
    }
    s
}

#[test]
fn besov_and_ks_match_pair_scans() {
    let (g, _) = gasket4();
    let f = random_fn(g.len(), 1);
    let d_h = g.spec().d_h;
    for r in default_r_grid(g).unwrap() {
        for p in [1.0, 2.0, 3.5] {
            let got = besov_n(g, &f, p, 0.7, r).unwrap();
            assert!(rel(got, brute_besov(g, f.values(), p, 0.7, r)) < 1e-12, "besov p={p} r={r}");
        }
        let got = ks_seminorm(g, &f, d_h, r).unwrap();
        assert!(rel(got, brute_ks(g, f.values(), d_h, r)) < 1e-12, "ks r={r}");
    }
}

#[test]
fn ks_and_besov_differ_by_the_ball_volume_squeeze() {
    let g = graph(FractalSpec::vicsek(), 3);
    let f = random_fn(g.len(), 2);
    let d_h = g.spec().d_h;
    let mu = g.measure();
    for r in default_r_grid(&g).unwrap() {
        let vols: Vec<f64> =
            (0..g.len()).map(|x| r.powf(d_h) / ball(&g, x, r).iter().map(|&y| mu[y]).sum::<f64>()).collect();
        let lo = vols.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vols.iter().copied().fold(0.0, f64::max);
        let ratio = ks_seminorm(&g, &f, d_h, r).unwrap() / besov_n(&g, &f, 1.0, d_h, r).unwrap();
        assert!(ratio >= lo * (1.0 - 1e-12) && ratio <= hi * (1.0 + 1e-12), "r={r}: {ratio} not in [{lo}, {hi}]");
    }
}

#[test]
fn heat_integrals_match_the_kernel_double_sum() {
    let (g, sd) = gasket4();
    let f = random_fn(g.len(), 3);
    let ts = default_t_grid(g).unwrap();
    for p in [1.0, 2.0] {
        let got = heat_pair_integrals(sd, &[f.values()], p, &ts).unwrap().remove(0);
        for (v, &t) in got.iter().zip(&ts) {
            assert!(rel(*v, brute_heat_integral(sd, f.values(), p, t)) < 1e-9, "p={p} t={t}");
        }
    }
    // a step function exercises the layer-cake path
    let step = GridFunction::new(f.iter().map(|v| (v * 3.0).round()).collect());
    let got = heat_pair_integrals(sd, &[step.values()], 1.0, &ts).unwrap().remove(0);
    for (v, &t) in got.iter().zip(&ts) {
        assert!(rel(*v, brute_heat_integral(sd, step.values(), 1.0, t)) < 1e-9, "step t={t}");
    }
}

#[test]
fn heat_besov_at_half_approaches_twice_the_energy() {
    let (g, sd) = gasket4();
    let form = assemble_form(g).unwrap();
    let lmax = *sd.eigenvalues().last().unwrap();
    let ts = spanning_grid(1e-6 / lmax, 1.0 / lmax, 10.0).unwrap();
    for seed in 0..5 {
        let f = random_fn(g.len(), 10 + seed);
        let target = (2.0 * form.energy_of(&f).unwrap()).sqrt();
        let rep = heat_besov_norm(sd, &f, 2.0, 0.5, &ts).unwrap();
        assert!(rep.series.values.iter().all(|v| *v <= target * (1.0 + 1e-9)));
        assert!(rep.summary >= 0.9 * target && rep.summary <= target * (1.0 + 1e-9), "{} vs {target}", rep.summary);
        let first = rep.series.values.windows(2).all(|w| w[0] <= w[1] * (1.0 + 1e-9));
        assert!(first, "values should grow as t decreases: {:?}", rep.series.values);
    }
}

#[test]
fn local_means_vanish_away_from_the_interface() {
    let (g, _) = gasket4();
    let e = cell_indicator(g, &[0]).unwrap().f;
    let kappa = g.spec().kappa_critical();
    for r in default_r_grid(g).unwrap() {
        let m = local_mean_m(g, &e, kappa, r).unwrap();
        for y in 0..g.len() {
            let pure = ball(g, y, r).iter().all(|&x| e.values()[x] == e.values()[y]);
            if pure {
                assert_eq!(m.values()[y], 0.0);
            } else {
                assert!(m.values()[y] > 0.0);
            }
        }
    }
}

#[test]
fn local_mean_totals() {
    let (g, sd) = gasket4();
    let spec = g.spec();
    let kappa = spec.kappa_critical();
    let f = random_fn(g.len(), 4);
    let mu = g.measure();
    let total = |q: &GridFunction| q.iter().zip(mu).map(|(a, b)| a * b).sum::<f64>();
    // M_r: total is the besov double sum with the M_r normalisation
    for r in default_r_grid(g).unwrap() {
        let m = local_mean_m(g, &f, kappa, r).unwrap();
        let want = brute_besov(g, f.values(), 1.0, 0.0, r) * r.powf(spec.d_h - (spec.d_h + spec.d_w - kappa));
        assert!(rel(total(&m), want) < 1e-12, "r={r}");
    }
    // Q_t: total is the heat functional at (1, 1 - kappa/d_W)
    let ts = default_t_grid(g).unwrap();
    let alpha = 1.0 - kappa / spec.d_w;
    let series = heat_besov_norm(sd, &f, 1.0, alpha, &ts).unwrap();
    for (&t, &v) in ts.iter().zip(&series.series.values) {
        let q = local_mean_q(g, sd, &f, kappa, t).unwrap();
        assert!(rel(total(&q), v) < 1e-10, "t={t}");
        assert!(q.iter().all(|v| *v >= 0.0));
    }
    let vs = var_star(g, sd, &f, kappa, &ts).unwrap();
    let min = series.series.values.iter().copied().fold(f64::INFINITY, f64::min);
    assert!(rel(vs.summary, min) < 1e-12);
}

#[test]
fn q_dominates_m_at_matching_scale() {
    let (g, sd) = gasket4();
    let spec = g.spec();
    let kappa = spec.kappa_critical();
    let f = random_fn(g.len(), 5);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut ratios = Vec::new();
    for t in default_t_grid(g).unwrap() {
        let r = t.powf(1.0 / spec.d_w).min(g.diameter() / 4.0);
        let q = local_mean_q(g, sd, &f, kappa, t).unwrap();
        let m = local_mean_m(g, &f, kappa, r).unwrap();
        for _ in 0..20 {
            let w: Vec<f64> = (0..g.len()).map(|_| rng.gen_range(0.0..1.0)).collect();
            let lhs: f64 = (0..g.len()).map(|y| w[y] * q.values()[y] * g.measure()[y]).sum();
            let rhs: f64 = (0..g.len()).map(|y| w[y] * m.values()[y] * g.measure()[y]).sum();
            ratios.push(lhs / rhs);
        }
    }
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(0.0, f64::max);
    assert!(lo > 0.0 && hi / lo < 20.0, "domination constants [{lo}, {hi}]");
}

#[test]
fn cell_indicator_besov_is_bounded_at_alpha_d_h() {
    let (g, _) = gasket4();
    let e = cell_indicator(g, &[1]).unwrap().f;
    let (lo, hi) = (g.diameter() / 40.0, g.diameter() / 4.0);
    let grid = spanning_grid(lo.max(g.mesh()), hi, 2f64.sqrt()).unwrap();
    let rep = besov_n_series(g, &[&e], 1.0, g.spec().d_h, &grid, PairBudget::default()).unwrap().remove(0);
    let max = rep.series.values.iter().copied().fold(0.0, f64::max);
    let min = rep.series.values.iter().copied().fold(f64::INFINITY, f64::min);
    assert!(min > 0.0 && max / min < 10.0, "spread {}", max / min);
}

#[test]
fn vicsek_harmonic_ks_is_bounded() {
    let g = graph(FractalSpec::vicsek(), 5);
    let f = piecewise_harmonic(&g, 1, 7).unwrap().f;
    let grid = spanning_grid(g.diameter() / 40.0, g.diameter() / 4.0, 2f64.sqrt()).unwrap();
    let rep = ks_series(&g, &[&f], g.spec().d_h, &grid, fractal_bv::Reduction::Sup, PairBudget::default())
        .unwrap()
        .remove(0);
    let min = rep.series.values.iter().copied().fold(f64::INFINITY, f64::min);
    assert!(min > 0.0 && rep.summary / min < 10.0, "spread {}", rep.summary / min);
}

#[test]
fn vicsek_cell_variation_is_stable_across_levels() {
    let var = |level| {
        let g = graph(FractalSpec::vicsek(), level);
        let e = cell_indicator(&g, &[4]).unwrap().f;
        let grid = spanning_grid(g.diameter() / 40.0, g.diameter() / 4.0, 2f64.sqrt()).unwrap();
        variation(&g, &e, g.spec().d_h, &grid).unwrap().summary
    };
    let (a, b) = (var(4), var(5));
    assert!(a > 0.0 && b > 0.0 && a.is_finite());
    assert!(a.max(b) / a.min(b) < 2.0, "{a} vs {b}");
}

#[test]
fn variation_is_subadditive_per_scale() {
    let (g, _) = gasket4();
    let grid = default_r_grid(g).unwrap();
    let lambda = g.spec().d_h;
    for seed in 0..5 {
        let f = random_fn(g.len(), 100 + seed);
        let h = random_fn(g.len(), 200 + seed);
        let sum = f.add(&h).unwrap();
        let reps = ks_series(g, &[&f, &h, &sum], lambda, &grid, fractal_bv::Reduction::Sup, PairBudget::default())
            .unwrap();
        for i in 0..grid.len() {
            let (a, b, c) = (reps[0].series.values[i], reps[1].series.values[i], reps[2].series.values[i]);
            assert!(c <= (a + b) * (1.0 + 1e-12));
        }
        let vars = variations(g, &[&f, &h, &sum], lambda, &grid, PairBudget::default()).unwrap();
        let ratio = vars[2].summary / (vars[0].summary + vars[1].summary);
        let spread = reps.iter().map(|r| r.summary / r.series.values.iter().copied().fold(f64::INFINITY, f64::min));
        let c = spread.fold(0.0, f64::max);
        assert!(ratio <= c, "Var(f+g) / (Var f + Var g) = {ratio} exceeds {c}");
    }
}

#[test]
fn osc_examples() {
    assert_eq!(osc(&GridFunction::constant(5, 2.0)), 0.0);
    assert_eq!(osc(&GridFunction::new(vec![0.0, 1.0, 1.0])), 1.0);
    let f = GridFunction::new(vec![-0.5, 2.0, 1.0]);
    assert_eq!(osc(&f.scaled(-3.0)), 3.0 * osc(&f));
}

#[test]
fn out_of_range_scales_are_rejected() {
    let (g, sd) = gasket4();
    let f = random_fn(g.len(), 8);
    assert!(besov_n(g, &f, 1.0, 1.0, g.mesh() / 2.0).is_err());
    assert!(ks_seminorm(g, &f, 1.0, 2.0 * g.diameter()).is_err());
    assert!(local_mean_q(g, sd, &f, 0.5, 1e-12).is_err());
    assert!(besov_n(g, &f, 0.5, 1.0, g.diameter() / 4.0).is_err());
    assert!(heat_besov_norm(sd, &f, 1.0, 1.0, &[]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn seminorms_are_translation_invariant_and_homogeneous(seed in 0u64..1000, c in -5.0f64..5.0, shift in -10.0f64..10.0) {
        let (g, sd) = gasket4();
        let f = random_fn(g.len(), seed);
        let r = g.diameter() / 5.0;
        let t = default_t_grid(g).unwrap()[2];
        let lambda = g.spec().d_h;
        for p in [1.0, 2.0] {
            let a = besov_n(g, &f, p, 0.4, r).unwrap();
            prop_assert!(rel(besov_n(g, &f.shifted(shift), p, 0.4, r).unwrap(), a) < 1e-12);
            prop_assert!(rel(besov_n(g, &f.scaled(c), p, 0.4, r).unwrap(), c.abs() * a) < 1e-12);
            let h = heat_besov_norm(sd, &f, p, 0.3, &[t]).unwrap().summary;
            prop_assert!(rel(heat_besov_norm(sd, &f.scaled(c), p, 0.3, &[t]).unwrap().summary, c.abs() * h) < 1e-10);
            prop_assert!(rel(heat_besov_norm(sd, &f.shifted(shift), p, 0.3, &[t]).unwrap().summary, h) < 1e-10);
        }
        let k = ks_seminorm(g, &f, lambda, r).unwrap();
        prop_assert!(k > 0.0);
        prop_assert!(rel(ks_seminorm(g, &f.scaled(c), lambda, r).unwrap(), c.abs() * k) < 1e-12);
        prop_assert!(rel(ks_seminorm(g, &f.shifted(shift), lambda, r).unwrap(), k) < 1e-12);
        prop_assert!(rel(osc(&f.scaled(c)), c.abs() * osc(&f)) < 1e-12);
    }

    #[test]
    fn constants_give_zero(c in -10.0f64..10.0) {
        let (g, sd) = gasket4();
        let f = GridFunction::constant(g.len(), c);
        let r = g.diameter() / 5.0;
        let ts = default_t_grid(g).unwrap();
        prop_assert_eq!(besov_n(g, &f, 1.0, 1.0, r).unwrap(), 0.0);
        prop_assert_eq!(ks_seminorm(g, &f, 1.0, r).unwrap(), 0.0);
        prop_assert!(local_mean_m(g, &f, 0.5, r).unwrap().iter().all(|v| *v == 0.0));
        prop_assert!(local_mean_q(g, sd, &f, 0.5, ts[0]).unwrap().iter().all(|v| v.abs() < 1e-14));
        prop_assert!(heat_besov_norm(sd, &f, 1.0, 0.5, &ts).unwrap().summary < 1e-12);
        prop_assert_eq!(variation(g, &f, 1.0, &[r]).unwrap().summary, 0.0);
        prop_assert_eq!(osc(&f), 0.0);
    }

    #[test]
    fn alpha_relation_is_exact(seed in 0u64..1000, a1 in 0.0f64..3.0, a2 in 0.0f64..3.0, k in 1usize..8) {
        let (g, _) = gasket4();
        let f = random_fn(g.len(), seed);
        let grid = default_r_grid(g).unwrap();
        let r = grid[k.min(grid.len() - 1)];
        let n1 = besov_n(g, &f, 1.0, a1, r).unwrap();
        let n2 = besov_n(g, &f, 1.0, a2, r).unwrap();
        prop_assert!(rel(n2, r.powf(a1 - a2) * n1) < 1e-12);
    }
}
