use rayon::prelude::*;

use super::form::DirichletForm;
use super::HeatSemigroup;

/// `e^-a I_k(a)` for `k = 0..`, by Miller's backward recurrence normalised with
/// `I_0 + 2 sum I_k = e^a`. Trailing values below `1e-18` are dropped.
pub fn scaled_bessel_i(a: f64) -> Vec<f64> {
    if a == 0.0 {
        return vec![1.0];
    }
    let start = 30 + (12.0 * a.sqrt()).ceil() as usize;
    let mut b = vec![0.0; start + 2];
    b[start] = 1.0;
    for k in (1..=start).rev() {
        b[k - 1] = b[k + 1] + (2.0 * k as f64 / a) * b[k];
        if b[k - 1] > 1e250 {
            for v in &mut b[k - 1..] {
                *v *= 1e-250;
            }
        }
    }
    let norm = b[0] + 2.0 * b[1..].iter().sum::<f64>();
    let mut out: Vec<f64> = b.iter().map(|v| v / norm).collect();
    while out.len() > 1 && *out.last().unwrap() < 1e-18 {
        out.pop();
    }
    out
}

/// Heat semigroup by Chebyshev expansion of `exp(-t S)`, `S = M^-1/2 A M^-1/2`,
/// for graphs too large for a dense eigendecomposition.
#[derive(Debug, Clone)]
pub struct ChebyshevHeat {
    measure: Vec<f64>,
    sqrt_mu: Vec<f64>,
    diag: Vec<f64>,
    offsets: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    bound: f64,
}

impl ChebyshevHeat {
    pub fn new(form: &DirichletForm<'_>) -> Self {
        let g = form.graph();
        let lap = form.laplacian();
        let n = g.len();
        let measure = g.measure().to_vec();
        let sqrt_mu: Vec<f64> = measure.iter().map(|m| m.sqrt()).collect();
        let mut offsets = vec![0usize];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut diag = vec![0.0; n];
        let mut bound: f64 = 0.0;
        for x in 0..n {
            diag[x] = lap.degree()[x] / measure[x];
            let mut off = 0.0;
            for (y, c) in lap.row(x) {
                let v = c / (sqrt_mu[x] * sqrt_mu[y]);
                cols.push(y);
                vals.push(v);
                off += v;
            }
            offsets.push(cols.len());
            bound = bound.max(diag[x] + off);
        }
        ChebyshevHeat { measure, sqrt_mu, diag, offsets, cols, vals, bound }
    }

    /// Gershgorin bound on the spectrum of the generator.
    pub fn spectral_bound(&self) -> f64 {
        self.bound
    }

    /// Number of expansion terms used at time `t`.
    pub fn terms(&self, t: f64) -> usize {
        scaled_bessel_i(t * self.bound / 2.0).len()
    }

    /// `out = (2/b) S v - v` on an interleaved block of `m` vectors.
    fn apply_y(&self, v: &[f64], m: usize, out: &mut [f64]) {
        let s = 2.0 / self.bound;
        out.par_chunks_mut(m).enumerate().for_each(|(x, o)| {
            let d = s * self.diag[x] - 1.0;
            let vx = &v[x * m..(x + 1) * m];
            for j in 0..m {
                o[j] = d * vx[j];
            }
            for p in self.offsets[x]..self.offsets[x + 1] {
                let w = s * self.vals[p];
                let vy = &v[self.cols[p] * m..(self.cols[p] + 1) * m];
                for j in 0..m {
                    o[j] -= w * vy[j];
                }
            }
        });
    }
}

impl HeatSemigroup for ChebyshevHeat {
    fn len(&self) -> usize {
        self.measure.len()
    }

    fn measure(&self) -> &[f64] {
        &self.measure
    }

    fn lambda_max(&self) -> f64 {
        self.bound
    }

    fn apply_block(&self, ts: &[f64], fs: &[&[f64]]) -> Vec<Vec<Vec<f64>>> {
        let n = self.len();
        let m = fs.len();
        if m == 0 {
            return Vec::new();
        }
        // c_0 = e^-a I_0(a), c_k = 2 (-1)^k e^-a I_k(a)
        let coeffs: Vec<Vec<f64>> = ts
            .iter()
            .map(|&t| {
                scaled_bessel_i(t * self.bound / 2.0)
                    .into_iter()
                    .enumerate()
                    .map(|(k, v)| if k == 0 { v } else if k % 2 == 0 { 2.0 * v } else { -2.0 * v })
                    .collect()
            })
            .collect();
        let kmax = coeffs.iter().map(Vec::len).max().unwrap_or(1);
        let mut prev = vec![0.0; n * m];
        for x in 0..n {
            for j in 0..m {
                prev[x * m + j] = self.sqrt_mu[x] * fs[j][x];
            }
        }
        let mut acc: Vec<Vec<f64>> = coeffs.iter().map(|c| prev.iter().map(|v| c[0] * v).collect()).collect();
        let mut cur = vec![0.0; n * m];
        if kmax > 1 {
            self.apply_y(&prev, m, &mut cur);
        }
        let mut next = vec![0.0; n * m];
        for k in 1..kmax {
            for (a, c) in acc.iter_mut().zip(&coeffs) {
                if let Some(&ck) = c.get(k) {
                    a.par_iter_mut().zip(cur.par_iter()).for_each(|(a, v)| *a += ck * v);
                }
            }
            if k + 1 < kmax {
                self.apply_y(&cur, m, &mut next);
                next.par_iter_mut().zip(prev.par_iter()).for_each(|(nx, p)| *nx = 2.0 * *nx - p);
                std::mem::swap(&mut prev, &mut cur);
                std::mem::swap(&mut cur, &mut next);
            }
        }
        (0..m)
            .map(|j| {
                acc.iter()
                    .zip(ts)
                    .map(|(a, &t)| {
                        if t == 0.0 {
                            return fs[j].to_vec();
                        }
                        (0..n).map(|x| a[x * m + j] / self.sqrt_mu[x]).collect()
                    })
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_normalisation_and_small_argument() {
        for a in [1e-3, 0.5, 3.0, 40.0, 2500.0] {
            let v = scaled_bessel_i(a);
            let s = v[0] + 2.0 * v[1..].iter().sum::<f64>();
            assert!((s - 1.0).abs() < 1e-14, "a = {a}");
        }
        // I_0(1) = 1.2660658777520082, I_1(1) = 0.5651591039924851
        let v = scaled_bessel_i(1.0);
        let e = (-1f64).exp();
        assert!((v[0] - 1.2660658777520082 * e).abs() < 1e-15);
        assert!((v[1] - 0.5651591039924851 * e).abs() < 1e-15);
    }

    #[test]
    fn bessel_large_argument_asymptotics() {
        // e^-a I_0(a) ~ (2 pi a)^-1/2 (1 + 1/(8a))
        let a = 1e6;
        let v = scaled_bessel_i(a);
        let want = (1.0 + 1.0 / (8.0 * a)) / (2.0 * std::f64::consts::PI * a).sqrt();
        assert!((v[0] / want - 1.0).abs() < 1e-9);
        assert!(v.len() < 10 * 1000);
    }
}
