use faer::{Mat, Side};
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use super::form::DirichletForm;
use super::HeatSemigroup;
use crate::error::{Error, Result};
use crate::geometry::FractalSpec;
use crate::grid::{inner, GridFunction};

/// Default cap on the vertex count for dense eigendecomposition.
pub const DEFAULT_EIGEN_CAP: usize = 8_000;

const MAGIC: &[u8; 8] = b"FBVSPEC\0";
const FORMAT_VERSION: u32 = 1;

/// Eigenpairs of `A phi = lambda M phi` with `M = diag(mu)`; eigenvectors are
/// mu-orthonormal and stored as the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct SpectralData {
    spec: FractalSpec,
    level: usize,
    measure: Vec<f64>,
    eigenvalues: Vec<f64>,
    vectors: Mat<f64>,
}

pub fn eigendecompose(form: &DirichletForm<'_>, cap: usize) -> Result<SpectralData> {
    let g = form.graph();
    let n = g.len();
    if n > cap {
        return Err(Error::SizeCap { what: "eigendecomposition", requested: n, cap });
    }
    let mu = g.measure();
    let isq: Vec<f64> = mu.iter().map(|m| 1.0 / m.sqrt()).collect();
    let lap = form.laplacian();
    let mut s = Mat::<f64>::zeros(n, n);
    for x in 0..n {
        s[(x, x)] = lap.degree()[x] * isq[x] * isq[x];
        for (y, c) in lap.row(x) {
            s[(y, x)] -= c * isq[x] * isq[y];
        }
    }
    let evd = s.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Solver(format!("{e:?}")))?;
    drop(s);
    let mut eigenvalues: Vec<f64> = evd.S().column_vector().iter().copied().collect();
    let u = evd.U();
    let mut vectors = Mat::<f64>::from_fn(n, n, |i, k| u[(i, k)] * isq[i]);
    drop(evd);
    // The kernel of a connected graph is known exactly.
    eigenvalues[0] = 0.0;
    for x in 0..n {
        vectors[(x, 0)] = 1.0;
    }
    for l in eigenvalues.iter_mut().skip(1) {
        *l = l.max(0.0);
    }
    let sd = SpectralData { spec: g.spec().clone(), level: g.level(), measure: mu.to_vec(), eigenvalues, vectors };
    let worst = sd.max_residual(form);
    if !(worst < 1e-8 * sd.lambda_max().max(1.0)) {
        return Err(Error::Solver(format!("eigen residual {worst:e} too large")));
    }
    Ok(sd)
}

impl SpectralData {
    pub fn spec(&self) -> &FractalSpec {
        &self.spec
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `phi_k` as a slice over vertices.
    pub fn eigenvector(&self, k: usize) -> &[f64] {
        self.vectors.col_as_slice(k)
    }

    pub fn vectors(&self) -> &Mat<f64> {
        &self.vectors
    }

    /// `max_k |M^-1/2 (A phi_k - lambda_k M phi_k)|_2`.
    pub fn max_residual(&self, form: &DirichletForm<'_>) -> f64 {
        let n = self.len();
        let lap = form.laplacian();
        (0..n)
            .into_par_iter()
            .map_init(
                || vec![0.0; n],
                |buf, k| {
                    let phi = self.eigenvector(k);
                    lap.apply(phi, buf);
                    let lam = self.eigenvalues[k];
                    buf.iter()
                        .zip(phi)
                        .zip(&self.measure)
                        .map(|((a, p), m)| (a - lam * m * p).powi(2) / m)
                        .sum::<f64>()
                        .sqrt()
                },
            )
            .reduce(|| 0.0, f64::max)
    }

    /// `c_k = <f, phi_k>_mu`.
    pub fn coefficients(&self, f: &[f64]) -> Vec<f64> {
        let mf: Vec<f64> = f.iter().zip(&self.measure).map(|(a, m)| a * m).collect();
        (0..self.len())
            .map(|k| self.eigenvector(k).iter().zip(&mf).map(|(p, v)| p * v).sum())
            .collect()
    }

    /// `sum_k w_k c_k phi_k`.
    pub fn synthesize(&self, weighted: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        for (k, &w) in weighted.iter().enumerate() {
            if w != 0.0 {
                for (o, p) in out.iter_mut().zip(self.eigenvector(k)) {
                    *o += w * p;
                }
            }
        }
        out
    }

    fn spectral_apply(&self, f: &GridFunction, weight: impl Fn(usize, f64) -> f64) -> Result<GridFunction> {
        crate::error::Error::check_len(self.len(), f.len())?;
        let c = self.coefficients(f);
        let w: Vec<f64> = c.iter().enumerate().map(|(k, ck)| weight(k, self.eigenvalues[k]) * ck).collect();
        Ok(GridFunction::new(self.synthesize(&w)))
    }

    /// `p_t(x, y) = sum_k e^(-lambda_k t) phi_k(x) phi_k(y)`.
    pub fn heat_kernel(&self, t: f64, x: usize, y: usize) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::OutOfRange { what: "t", value: t, lo: 0.0, hi: f64::INFINITY });
        }
        Ok(self.kernel_entry(t, x, y))
    }

    fn kernel_entry(&self, t: f64, x: usize, y: usize) -> f64 {
        (0..self.len())
            .map(|k| (-self.eigenvalues[k] * t).exp() * self.vectors[(x, k)] * self.vectors[(y, k)])
            .sum()
    }

    pub fn semigroup_apply(&self, t: f64, f: &GridFunction) -> Result<GridFunction> {
        if !(t >= 0.0) {
            return Err(Error::OutOfRange { what: "t", value: t, lo: 0.0, hi: f64::INFINITY });
        }
        crate::error::Error::check_len(self.len(), f.len())?;
        if t == 0.0 {
            return Ok(f.clone());
        }
        self.spectral_apply(f, |_, l| (-l * t).exp())
    }

    /// `U_lam f = sum_k (lam + lambda_k)^-1 c_k phi_k`.
    pub fn resolvent_apply(&self, lam: f64, f: &GridFunction) -> Result<GridFunction> {
        if !(lam > 0.0) {
            return Err(Error::OutOfRange { what: "lambda", value: lam, lo: 0.0, hi: f64::INFINITY });
        }
        self.spectral_apply(f, |_, l| 1.0 / (lam + l))
    }

    /// `(-L)^a f` with the constant mode sent to zero.
    pub fn fractional_power_apply(&self, a: f64, f: &GridFunction) -> Result<GridFunction> {
        if !(a > 0.0 && a <= 1.0) {
            return Err(Error::OutOfRange { what: "a", value: a, lo: 0.0, hi: 1.0 });
        }
        self.spectral_apply(f, |k, l| if k == 0 { 0.0 } else { l.powf(a) })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let n = self.len();
        let spec = serde_json::to_vec(&self.spec).expect("spec serialises");
        let mut out = Vec::with_capacity(64 + spec.len() + 8 * (n * n + 2 * n));
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.extend_from_slice(&(spec.len() as u64).to_le_bytes());
        out.extend_from_slice(&spec);
        out.extend_from_slice(&(self.level as u64).to_le_bytes());
        out.extend_from_slice(&(n as u64).to_le_bytes());
        let mut put = |v: &[f64]| {
            for x in v {
                out.extend_from_slice(&x.to_le_bytes());
            }
        };
        put(&self.measure);
        put(&self.eigenvalues);
        for k in 0..n {
            put(self.eigenvector(k));
        }
        let digest = Sha256::digest(&out);
        out.extend_from_slice(&digest);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 32 + MAGIC.len() {
            return Err(Error::Corrupt("truncated".into()));
        }
        let (body, digest) = bytes.split_at(bytes.len() - 32);
        if Sha256::digest(body).as_slice() != digest {
            return Err(Error::Corrupt("checksum mismatch".into()));
        }
        let mut r = Reader { buf: body, pos: 0 };
        if r.take(8)? != MAGIC {
            return Err(Error::Corrupt("bad magic".into()));
        }
        let version = u32::from_le_bytes(r.take(4)?.try_into().unwrap());
        if version != FORMAT_VERSION {
            return Err(Error::Corrupt(format!("format version {version}")));
        }
        let spec_len = r.u64()? as usize;
        let spec: FractalSpec =
            serde_json::from_slice(r.take(spec_len)?).map_err(|e| Error::Corrupt(format!("spec: {e}")))?;
        let level = r.u64()? as usize;
        let n = r.u64()? as usize;
        if body.len() != r.pos + 8 * (n * n + 2 * n) {
            return Err(Error::Corrupt("length mismatch".into()));
        }
        let measure = r.f64s(n)?;
        let eigenvalues = r.f64s(n)?;
        let flat = r.f64s(n * n)?;
        let vectors = Mat::from_fn(n, n, |i, k| flat[k * n + i]);
        Ok(SpectralData { spec, level, measure, eigenvalues, vectors })
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, k: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(k).filter(|&e| e <= self.buf.len()).ok_or_else(|| Error::Corrupt("truncated".into()))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64s(&mut self, k: usize) -> Result<Vec<f64>> {
        Ok(self.take(8 * k)?.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
    }
}

impl HeatSemigroup for SpectralData {
    fn len(&self) -> usize {
        self.measure.len()
    }

    fn measure(&self) -> &[f64] {
        &self.measure
    }

    fn lambda_max(&self) -> f64 {
        *self.eigenvalues.last().unwrap_or(&0.0)
    }

    fn apply_block(&self, ts: &[f64], fs: &[&[f64]]) -> Vec<Vec<Vec<f64>>> {
        fs.par_iter()
            .map(|f| {
                let c = self.coefficients(f);
                ts.iter()
                    .map(|&t| {
                        if t == 0.0 {
                            return f.to_vec();
                        }
                        let w: Vec<f64> = c.iter().zip(&self.eigenvalues).map(|(ck, l)| (-l * t).exp() * ck).collect();
                        self.synthesize(&w)
                    })
                    .collect()
            })
            .collect()
    }

    fn dissipation(&self, ts: &[f64], f: &[f64]) -> Vec<f64> {
        let c = self.coefficients(f);
        ts.iter()
            .map(|&t| c.iter().zip(&self.eigenvalues).map(|(ck, l)| -(-l * t).exp_m1() * ck * ck).sum())
            .collect()
    }

    fn dissipation_block(&self, ts: &[f64], fs: &[&[f64]]) -> Vec<Vec<f64>> {
        fs.par_iter().map(|f| self.dissipation(ts, f)).collect()
    }

    fn kernel(&self, t: f64, x: usize, y: usize) -> f64 {
        self.kernel_entry(t, x, y)
    }

    fn has_kernel_matrix(&self) -> bool {
        true
    }

    fn kernel_matrix(&self, t: f64) -> Option<Mat<f64>> {
        let n = self.len();
        let s: Vec<f64> = self.eigenvalues.iter().map(|l| (-0.5 * l * t).exp()).collect();
        let w = Mat::<f64>::from_fn(n, n, |i, k| self.vectors[(i, k)] * s[k]);
        Some(&w * w.transpose())
    }
}

impl SpectralData {
    pub fn len(&self) -> usize {
        self.measure.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measure.is_empty()
    }

    pub fn measure(&self) -> &[f64] {
        &self.measure
    }

    /// `<f, g>_mu`.
    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        inner(f, g, &self.measure)
    }
}
