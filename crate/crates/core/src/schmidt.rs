//! Schmidt decomposition and spectral purity of joint amplitudes.

use faer::{c64, Mat};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jsa::JointAmplitude;

/// Schmidt mode functions sampled on the grid. `signal[j]` and `idler[j]`
/// pair with `coefficients[j]`, so f = Σ c_j·signal_j ⊗ idler_j.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtModes {
    pub signal: Vec<Vec<Complex64>>,
    pub idler: Vec<Vec<Complex64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchmidtResult {
    /// Descending, Σc² = 1.
    pub coefficients: Vec<f64>,
    /// Σc⁴.
    pub purity: f64,
    /// 1/purity.
    pub schmidt_number: f64,
    #[serde(skip)]
    pub modes: Option<SchmidtModes>,
}

fn to_faer(values: &[Complex64], rows: usize, cols: usize) -> Mat<c64> {
    Mat::from_fn(rows, cols, |i, j| {
        let v = values[i * cols + j];
        c64::new(v.re, v.im)
    })
}

fn from_singular_values(mut s: Vec<f64>, modes: Option<SchmidtModes>) -> Result<SchmidtResult> {
    let total: f64 = s.iter().map(|x| x * x).sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::NonFinite("singular values".into()));
    }
    let scale = 1.0 / total.sqrt();
    s.iter_mut().for_each(|x| *x *= scale);
    let purity: f64 = s.iter().map(|c| c.powi(4)).sum();
    Ok(SchmidtResult {
        coefficients: s,
        purity,
        schmidt_number: 1.0 / purity,
        modes,
    })
}

/// Decomposes a row-major `rows × cols` matrix.
pub fn decompose_matrix(values: &[Complex64], rows: usize, cols: usize, want_modes: bool) -> Result<SchmidtResult> {
    if values.len() != rows * cols || rows == 0 || cols == 0 {
        return Err(Error::InvalidInput(format!(
            "matrix of {} values is not {rows}x{cols}",
            values.len()
        )));
    }
    if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::NonFinite("joint amplitude".into()));
    }
    let m = to_faer(values, rows, cols);
    if !want_modes {
        let s = m
            .singular_values()
            .map_err(|e| Error::LinearAlgebra(format!("{e:?}")))?;
        return from_singular_values(s, None);
    }
    let svd = m.thin_svd().map_err(|e| Error::LinearAlgebra(format!("{e:?}")))?;
    let k = rows.min(cols);
    let s: Vec<f64> = (0..k).map(|j| svd.S()[j].re).collect();
    let u = svd.U();
    let v = svd.V();
    let signal = (0..k)
        .map(|j| (0..rows).map(|i| Complex64::new(u[(i, j)].re, u[(i, j)].im)).collect())
        .collect();
    let idler = (0..k)
        .map(|j| (0..cols).map(|i| Complex64::new(v[(i, j)].re, -v[(i, j)].im)).collect())
        .collect();
    from_singular_values(s, Some(SchmidtModes { signal, idler }))
}

pub fn schmidt_decompose(jsa: &JointAmplitude, want_modes: bool) -> Result<SchmidtResult> {
    decompose_matrix(jsa.values(), jsa.n(), jsa.n(), want_modes)
}

/// Purity from the singular values of `jsa`.
pub fn purity(jsa: &JointAmplitude) -> Result<f64> {
    Ok(schmidt_decompose(jsa, false)?.purity)
}

/// Tr(ρ²)/(Tr ρ)² with ρ = F·F†, evaluated with plain loops. Independent
/// check of the SVD route; O(rows²·cols) work.
pub fn purity_oracle_matrix(values: &[Complex64], rows: usize, cols: usize) -> f64 {
    let mut rho = vec![Complex64::new(0.0, 0.0); rows * rows];
    for a in 0..rows {
        for b in 0..rows {
            let mut acc = Complex64::new(0.0, 0.0);
            for h in 0..cols {
                acc += values[a * cols + h] * values[b * cols + h].conj();
            }
            rho[a * rows + b] = acc;
        }
    }
    let mut tr = 0.0;
    let mut tr2 = Complex64::new(0.0, 0.0);
    for a in 0..rows {
        tr += rho[a * rows + a].re;
        for b in 0..rows {
            tr2 += rho[a * rows + b] * rho[b * rows + a];
        }
    }
    tr2.re / (tr * tr)
}

pub fn purity_oracle(jsa: &JointAmplitude) -> f64 {
    purity_oracle_matrix(jsa.values(), jsa.n(), jsa.n())
}
