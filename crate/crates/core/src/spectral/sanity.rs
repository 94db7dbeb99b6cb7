use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::form::DirichletForm;
use super::HeatSemigroup;
use crate::error::{Error, Result};
use crate::functionals::heat_pair_integrals;
use crate::grid::{inner, GridFunction};

/// Worst deviations from the semigroup identities over the probed times and
/// random functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SanityReport {
    pub ts: Vec<f64>,
    /// `max_x |P_t 1 (x) - 1|`.
    pub conservation: f64,
    /// `|<P_t f, g> - <f, P_t g>|`, relative to `|f| |g|`.
    pub symmetry: f64,
    /// `|P_t P_t f - P_2t f|_inf`, relative to `|f|_inf`.
    pub semigroup: f64,
    /// Relative error of `t^-1 double-integral p_t |df|^2 = 2 E(f, f)` at `energy_t`.
    pub energy: f64,
    pub energy_t: f64,
}

impl SanityReport {
    pub fn passes(&self, tol: f64, energy_tol: f64) -> bool {
        self.conservation < tol && self.symmetry < tol && self.semigroup < tol && self.energy < energy_tol
    }
}

/// Probes conservation, symmetry and the semigroup law at every `t` in `ts`
/// and the energy identity at `1e-6 / lambda_max`, using `count` seeded random functions.
pub fn spectral_sanity(
    heat: &dyn HeatSemigroup,
    form: &DirichletForm<'_>,
    ts: &[f64],
    count: usize,
    seed: u64,
) -> Result<SanityReport> {
    let n = heat.len();
    Error::check_len(form.graph().len(), n)?;
    if ts.is_empty() {
        return Err(Error::Empty("t grid"));
    }
    if count == 0 {
        return Err(Error::Empty("random family"));
    }
    let mu = heat.measure();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fs: Vec<Vec<f64>> = (0..count).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    let refs: Vec<&[f64]> = fs.iter().map(|f| f.as_slice()).collect();
    let one = vec![1.0; n];

    let (mut conservation, mut symmetry, mut semigroup) = (0.0f64, 0.0f64, 0.0f64);
    for &t in ts {
        let p1 = heat.apply(t, &one);
        conservation = p1.iter().fold(conservation, |m, v| m.max((v - 1.0).abs()));
        let pf = heat.apply_block(&[t, 2.0 * t], &refs);
        for i in 0..count {
            let j = (i + 1) % count;
            let a = inner(&pf[i][0], &fs[j], mu);
            let b = inner(&fs[i], &pf[j][0], mu);
            let scale = (inner(&fs[i], &fs[i], mu) * inner(&fs[j], &fs[j], mu)).sqrt();
            symmetry = symmetry.max((a - b).abs() / scale);
            let twice = heat.apply(t, &pf[i][0]);
            let sup = fs[i].iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let dev = twice.iter().zip(&pf[i][1]).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            semigroup = semigroup.max(dev / sup);
        }
    }

    let energy_t = 1e-6 / heat.lambda_max();
    let ints = heat_pair_integrals(heat, &refs, 2.0, &[energy_t])?;
    let mut energy = 0.0f64;
    for (f, i) in fs.iter().zip(&ints) {
        let e = form.energy_of(&GridFunction::new(f.clone()))?;
        energy = energy.max((i[0] / energy_t - 2.0 * e).abs() / (2.0 * e));
    }
    Ok(SanityReport { ts: ts.to_vec(), conservation, symmetry, semigroup, energy, energy_t })
}
