//! Hong-Ou-Mandel interference of heralded photons from two sources, and of
//! signal against idler from one source.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jsa::JointAmplitude;
use crate::units::{ps_to_s, s_to_ps};

pub const DEFAULT_DELAY_POINTS: usize = 201;
/// Default delay grid half-width in units of the expected dip width.
const DELAY_SPAN_WIDTHS: f64 = 5.0;
const BASELINE_TOLERANCE: f64 = 1e-3;
const MAX_WIDENINGS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Keep {
    Signal,
    Idler,
}

/// Which photon of each pair is detected as the herald. The other one
/// interferes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Herald {
    Idler,
    Signal,
}

impl Herald {
    pub fn interfering(self) -> Keep {
        match self {
            Herald::Idler => Keep::Signal,
            Herald::Signal => Keep::Idler,
        }
    }
}

impl fmt::Display for Herald {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Herald::Idler => "idler",
            Herald::Signal => "signal",
        })
    }
}

impl FromStr for Herald {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "idler" => Ok(Herald::Idler),
            "signal" => Ok(Herald::Signal),
            _ => Err(Error::InvalidInput(format!(
                "herald must be signal or idler, got {s:?}"
            ))),
        }
    }
}

/// Reduced spectral density matrix of one photon, with its frequency axis.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedState {
    pub omegas: Vec<f64>,
    /// Row-major N×N.
    pub values: Vec<Complex64>,
}

impl ReducedState {
    pub fn n(&self) -> usize {
        self.omegas.len()
    }

    pub fn get(&self, a: usize, b: usize) -> Complex64 {
        self.values[a * self.n() + b]
    }

    pub fn trace(&self) -> f64 {
        (0..self.n()).map(|a| self.get(a, a).re).sum()
    }

    /// Tr(ρ²).
    pub fn purity(&self) -> f64 {
        let n = self.n();
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 0..n {
            for b in 0..n {
                acc += self.get(a, b) * self.get(b, a);
            }
        }
        acc.re
    }
}

/// ρ(ω, ω′) = Σ_h f(ω, h)·f*(ω′, h) for the kept photon.
pub fn reduced_state(jsa: &JointAmplitude, keep: Keep) -> ReducedState {
    let n = jsa.n();
    let (omegas, rows) = match keep {
        Keep::Signal => (jsa.grid().signal().to_vec(), jsa.values().to_vec()),
        Keep::Idler => (jsa.grid().idler().to_vec(), jsa.transposed().values().to_vec()),
    };
    let mut upper = vec![Complex64::new(0.0, 0.0); n * n];
    upper.par_chunks_mut(n).enumerate().for_each(|(a, out)| {
        let ra = &rows[a * n..(a + 1) * n];
        for b in a..n {
            let rb = &rows[b * n..(b + 1) * n];
            out[b] = ra.iter().zip(rb).map(|(x, y)| x * y.conj()).sum();
        }
    });
    let mut values = upper;
    for a in 0..n {
        for b in 0..a {
            values[a * n + b] = values[b * n + a].conj();
        }
    }
    ReducedState { omegas, values }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HomTrace {
    pub tau_ps: Vec<f64>,
    pub probability: Vec<f64>,
    /// Mean of the two end samples.
    pub baseline: f64,
    pub p_min: f64,
    /// (baseline − p_min)/baseline.
    pub visibility: f64,
    /// FWHM of the dip, `None` when it cannot be resolved on the trace.
    pub width_ps: Option<f64>,
}

impl HomTrace {
    fn from_samples(tau_ps: Vec<f64>, probability: Vec<f64>) -> Self {
        let baseline = 0.5 * (probability[0] + probability[probability.len() - 1]);
        let p_min = probability.iter().copied().fold(f64::INFINITY, f64::min);
        let mut trace = HomTrace {
            tau_ps,
            probability,
            baseline,
            p_min,
            visibility: (baseline - p_min) / baseline,
            width_ps: None,
        };
        trace.width_ps = dip_width(&trace).ok();
        trace
    }
}

/// Linearly interpolated FWHM of the dip below the baseline, ps.
pub fn dip_width(trace: &HomTrace) -> Result<f64> {
    let p = &trace.probability;
    let t = &trace.tau_ps;
    let depth = trace.baseline - trace.p_min;
    if !(depth > 1e-9) {
        return Err(Error::UndefinedWidth("trace has no dip".into()));
    }
    let half = 0.5 * (trace.baseline + trace.p_min);
    let k = (0..p.len())
        .min_by(|&a, &b| p[a].total_cmp(&p[b]))
        .expect("non-empty trace");
    let cross = |a: usize, b: usize| t[a] + (half - p[a]) * (t[b] - t[a]) / (p[b] - p[a]);
    let left = (0..k)
        .rev()
        .find(|&j| p[j] > half)
        .map(|j| cross(j, j + 1))
        .ok_or_else(|| Error::UndefinedWidth("dip does not recover on the negative-delay side".into()))?;
    let right = (k + 1..p.len())
        .find(|&j| p[j] > half)
        .map(|j| cross(j - 1, j))
        .ok_or_else(|| Error::UndefinedWidth("dip does not recover on the positive-delay side".into()))?;
    Ok(right - left)
}

/// Sums M(a, b) over each diagonal a − b = m, index m + N − 1.
fn diagonal_sums(n: usize, m: impl Fn(usize, usize) -> Complex64) -> Vec<Complex64> {
    let mut d = vec![Complex64::new(0.0, 0.0); 2 * n - 1];
    for a in 0..n {
        for b in 0..n {
            d[a + n - 1 - b] += m(a, b);
        }
    }
    d
}

fn uniform_step(omegas: &[f64]) -> f64 {
    (omegas[omegas.len() - 1] - omegas[0]) / (omegas.len() - 1) as f64
}

/// P(τ) = ½(1 − Re Σ_m D_m·e^{i·m·Δω·τ}) with D from [`diagonal_sums`].
fn evaluate(d: &[Complex64], step: f64, tau_ps: &[f64]) -> Vec<f64> {
    let n = d.len().div_ceil(2);
    tau_ps
        .par_iter()
        .map(|&tau| {
            let x = step * ps_to_s(tau);
            let mut acc = 0.0;
            for (k, dm) in d.iter().enumerate() {
                let m = k as f64 - (n - 1) as f64;
                let (s, c) = (m * x).sin_cos();
                acc += dm.re * c - dm.im * s;
            }
            0.5 * (1.0 - acc)
        })
        .collect()
}

/// RMS angular bandwidth of a marginal spectrum.
fn rms_bandwidth(omegas: &[f64], weights: &[f64]) -> f64 {
    let total: f64 = weights.iter().sum();
    let mean = omegas.iter().zip(weights).map(|(w, p)| w * p).sum::<f64>() / total;
    let var = omegas
        .iter()
        .zip(weights)
        .map(|(w, p)| (w - mean).powi(2) * p)
        .sum::<f64>()
        / total;
    var.sqrt().max(uniform_step(omegas))
}

/// Symmetric delay grid of `points` samples out to ±`half_ps`.
pub fn delay_grid(half_ps: f64, points: usize) -> Vec<f64> {
    let points = points.max(3) | 1;
    (0..points)
        .map(|k| -half_ps + 2.0 * half_ps * k as f64 / (points - 1) as f64)
        .collect()
}

/// Widens the delay window until both ends return to 0.5. The sampled
/// spectrum makes the trace periodic in 2π/Δω, so the window stops at half
/// that period.
fn auto_trace(d: &[Complex64], step: f64, bandwidth: f64, points: usize) -> Result<HomTrace> {
    let limit = 0.5 * s_to_ps(2.0 * std::f64::consts::PI / step);
    let mut half = (DELAY_SPAN_WIDTHS * s_to_ps(2.0 / bandwidth)).min(limit);
    for _ in 0..=MAX_WIDENINGS {
        let taus = delay_grid(half, points);
        let p = evaluate(d, step, &taus);
        let trace = HomTrace::from_samples(taus, p);
        let edges_settled = (trace.probability[0] - 0.5).abs() < BASELINE_TOLERANCE
            && (trace.probability[trace.probability.len() - 1] - 0.5).abs() < BASELINE_TOLERANCE;
        if edges_settled {
            return Ok(trace);
        }
        if half >= limit {
            break;
        }
        half = (2.0 * half).min(limit);
    }
    Err(Error::Unresolved(format!(
        "coincidences do not return to 0.5 within ±{half:.4} ps; the frequency grid is too coarse for this photon"
    )))
}

fn heralded_sums(
    jsa_1: &JointAmplitude,
    jsa_2: &JointAmplitude,
    herald: Herald,
) -> Result<(Vec<Complex64>, ReducedState)> {
    let keep = herald.interfering();
    let r1 = reduced_state(jsa_1, keep);
    let r2 = reduced_state(jsa_2, keep);
    if r1.omegas != r2.omegas {
        return Err(Error::GridMismatch(
            "the interfering photons of the two sources use different frequency axes".into(),
        ));
    }
    let d = diagonal_sums(r1.n(), |a, b| r1.get(a, b) * r2.get(b, a));
    Ok((d, r1))
}

/// Two heralded photons, one from each source, meeting at a 50:50 splitter.
pub fn hom_heralded(
    jsa_1: &JointAmplitude,
    jsa_2: &JointAmplitude,
    herald: Herald,
    tau_ps: &[f64],
) -> Result<HomTrace> {
    if tau_ps.len() < 3 {
        return Err(Error::InvalidInput("need at least 3 delays".into()));
    }
    let (d, r1) = heralded_sums(jsa_1, jsa_2, herald)?;
    Ok(HomTrace::from_samples(
        tau_ps.to_vec(),
        evaluate(&d, uniform_step(&r1.omegas), tau_ps),
    ))
}

/// [`hom_heralded`] on a default delay grid sized from the marginal
/// bandwidth and widened until the trace returns to its baseline.
pub fn hom_heralded_auto(
    jsa_1: &JointAmplitude,
    jsa_2: &JointAmplitude,
    herald: Herald,
    points: usize,
) -> Result<HomTrace> {
    let (d, r1) = heralded_sums(jsa_1, jsa_2, herald)?;
    let marginal: Vec<f64> = (0..r1.n()).map(|a| r1.get(a, a).re).collect();
    let bw = rms_bandwidth(&r1.omegas, &marginal);
    auto_trace(&d, uniform_step(&r1.omegas), bw, points)
}

fn signal_idler_sums(jsa: &JointAmplitude) -> Result<Vec<Complex64>> {
    if !jsa.grid().is_square() {
        return Err(Error::GridMismatch(
            "signal and idler axes differ; signal-idler interference needs a degenerate grid".into(),
        ));
    }
    Ok(diagonal_sums(jsa.n(), |a, b| jsa.get(a, b) * jsa.get(b, a).conj()))
}

/// Signal and idler of one pair meeting at a 50:50 splitter.
pub fn hom_signal_idler(jsa: &JointAmplitude, tau_ps: &[f64]) -> Result<HomTrace> {
    if tau_ps.len() < 3 {
        return Err(Error::InvalidInput("need at least 3 delays".into()));
    }
    let d = signal_idler_sums(jsa)?;
    Ok(HomTrace::from_samples(
        tau_ps.to_vec(),
        evaluate(&d, jsa.grid().signal_step(), tau_ps),
    ))
}

pub fn hom_signal_idler_auto(jsa: &JointAmplitude, points: usize) -> Result<HomTrace> {
    let d = signal_idler_sums(jsa)?;
    let n = jsa.n();
    let intensity = jsa.intensity();
    let ms: Vec<f64> = (0..n).map(|i| intensity[i * n..(i + 1) * n].iter().sum()).collect();
    let mi: Vec<f64> = (0..n).map(|j| (0..n).map(|i| intensity[i * n + j]).sum()).collect();
    let g = jsa.grid();
    let bw = rms_bandwidth(g.signal(), &ms).max(rms_bandwidth(g.idler(), &mi));
    auto_trace(&d, g.signal_step(), bw, points)
}
