use faer::Mat;
use rayon::prelude::*;
use std::sync::Arc;

use super::dense::SpectralData;
use super::HeatSemigroup;

/// Heat semigroup of a product space from the factor spectra:
/// `P_t g = T1 G T2^T` with `G` the function as an `n1 x n2` matrix.
#[derive(Debug, Clone)]
pub struct ProductHeat {
    a: Arc<SpectralData>,
    b: Arc<SpectralData>,
    measure: Vec<f64>,
}

impl ProductHeat {
    pub fn new(a: Arc<SpectralData>, b: Arc<SpectralData>) -> Self {
        let measure = a.measure().iter().flat_map(|&x| b.measure().iter().map(move |&y| x * y)).collect();
        ProductHeat { a, b, measure }
    }

    pub fn factors(&self) -> (&SpectralData, &SpectralData) {
        (&self.a, &self.b)
    }

    /// Factor transition matrix `T(x, y) = p_t(x, y) mu(y)`.
    fn transition(sd: &SpectralData, t: f64) -> Mat<f64> {
        let mut k = sd.kernel_matrix(t).expect("dense factor");
        let mu = sd.measure();
        for j in 0..k.ncols() {
            for i in 0..k.nrows() {
                k[(i, j)] *= mu[j];
            }
        }
        k
    }

    /// Coefficients `C_jk = <g, phi_j (x) psi_k>` of a product function.
    fn coefficients(&self, g: &[f64]) -> Mat<f64> {
        let (n1, n2) = (self.a.len(), self.b.len());
        let (m1, m2) = (self.a.measure(), self.b.measure());
        let gm = Mat::<f64>::from_fn(n1, n2, |i, j| g[i * n2 + j] * m1[i] * m2[j]);
        let left = self.a.vectors().transpose() * &gm;
        left * self.b.vectors()
    }
}

impl HeatSemigroup for ProductHeat {
    fn len(&self) -> usize {
        self.measure.len()
    }

    fn measure(&self) -> &[f64] {
        &self.measure
    }

    fn lambda_max(&self) -> f64 {
        self.a.lambda_max() + self.b.lambda_max()
    }

    fn apply_block(&self, ts: &[f64], fs: &[&[f64]]) -> Vec<Vec<Vec<f64>>> {
        let (n1, n2) = (self.a.len(), self.b.len());
        let per_t: Vec<Vec<Vec<f64>>> = ts
            .iter()
            .map(|&t| {
                if t == 0.0 {
                    return fs.iter().map(|f| f.to_vec()).collect();
                }
                let t1 = Self::transition(&self.a, t);
                let t2 = Self::transition(&self.b, t);
                fs.par_iter()
                    .map(|f| {
                        let g = Mat::<f64>::from_fn(n1, n2, |i, j| f[i * n2 + j]);
                        let r = &t1 * &g * t2.transpose();
                        let mut out = Vec::with_capacity(n1 * n2);
                        for i in 0..n1 {
                            for j in 0..n2 {
                                out.push(r[(i, j)]);
                            }
                        }
                        out
                    })
                    .collect()
            })
            .collect();
        (0..fs.len()).map(|j| per_t.iter().map(|v| v[j].clone()).collect()).collect()
    }

    fn dissipation(&self, ts: &[f64], f: &[f64]) -> Vec<f64> {
        let c = self.coefficients(f);
        let (la, lb) = (self.a.eigenvalues(), self.b.eigenvalues());
        ts.iter()
            .map(|&t| {
                let mut s = 0.0;
                for j in 0..la.len() {
                    for k in 0..lb.len() {
                        s += -(-(la[j] + lb[k]) * t).exp_m1() * c[(j, k)].powi(2);
                    }
                }
                s
            })
            .collect()
    }

    fn dissipation_block(&self, ts: &[f64], fs: &[&[f64]]) -> Vec<Vec<f64>> {
        fs.par_iter().map(|f| self.dissipation(ts, f)).collect()
    }

    fn kernel(&self, t: f64, x: usize, y: usize) -> f64 {
        let n2 = self.b.len();
        self.a.kernel(t, x / n2, y / n2) * self.b.kernel(t, x % n2, y % n2)
    }
}
