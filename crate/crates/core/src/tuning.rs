//! Pump-bandwidth optimization and wavelength purity scans.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gvm::{degenerate_poling_period, ProcessConvention};
use crate::jsa::{build_jsa_auto, PhaseMatchSpec, PumpSpec};
use crate::numeric::golden_max;
use crate::registry::CrystalRecord;
use crate::schmidt::purity;

/// Default bandwidth search range, nm FWHM.
pub const DEFAULT_BANDWIDTH_RANGE_NM: (f64, f64) = (0.05, 20.0);
const COARSE_POINTS: usize = 13;
const COARSE_MIN_POINTS: usize = 64;
/// Golden-section stop: bracket width relative to its position (3
/// significant figures).
const REFINE_REL_TOL: f64 = 5e-4;

/// Purity of the degenerate pair at `lambda_nm` pumped at λ/2 with
/// `fwhm_nm`, on an auto-sized grid of `n` points per axis.
pub fn purity_at(pm: &PhaseMatchSpec, lambda_nm: f64, fwhm_nm: f64, n: usize) -> Result<f64> {
    let pump = PumpSpec::new(lambda_nm / 2.0, fwhm_nm)?;
    purity(&build_jsa_auto(&pump, pm, lambda_nm, n)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandwidthOptimum {
    pub fwhm_nm: f64,
    pub purity: f64,
    /// Coarse scan (bandwidth nm, purity) on the reduced grid.
    pub coarse_scan: Vec<(f64, f64)>,
    /// False when the coarse scan had several peaks; the result is then the
    /// best coarse point re-evaluated on the full grid.
    pub refined: bool,
}

/// Coarse log-spaced scan on a grid of N/4 points, then golden-section
/// refinement (in log bandwidth) on the full grid.
pub fn optimize_pump_bandwidth(
    pm: &PhaseMatchSpec,
    lambda_nm: f64,
    range_nm: (f64, f64),
    n: usize,
) -> Result<BandwidthOptimum> {
    let (lo, hi) = range_nm;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidInput(format!("bad bandwidth range [{lo}, {hi}] nm")));
    }
    let coarse_n = (n / 4).max(COARSE_MIN_POINTS).min(n);
    let (llo, lhi) = (lo.ln(), hi.ln());
    let xs: Vec<f64> = (0..COARSE_POINTS)
        .map(|k| llo + (lhi - llo) * k as f64 / (COARSE_POINTS - 1) as f64)
        .collect();
    let ps = xs
        .par_iter()
        .map(|&x| purity_at(pm, lambda_nm, x.exp(), coarse_n))
        .collect::<Result<Vec<f64>>>()?;
    let coarse_scan: Vec<(f64, f64)> = xs.iter().map(|x| x.exp()).zip(ps.iter().copied()).collect();

    let best = (0..ps.len()).max_by(|&a, &b| ps[a].total_cmp(&ps[b])).unwrap();
    if best == 0 || best == ps.len() - 1 {
        return Err(Error::NotBracketed {
            best_nm: coarse_scan[best].0,
            lo_nm: lo,
            hi_nm: hi,
        });
    }
    let peaks = (1..ps.len() - 1)
        .filter(|&k| ps[k] >= ps[k - 1] && ps[k] >= ps[k + 1])
        .count();
    if peaks > 1 {
        let bw = coarse_scan[best].0;
        return Ok(BandwidthOptimum {
            fwhm_nm: bw,
            purity: purity_at(pm, lambda_nm, bw, n)?,
            coarse_scan,
            refined: false,
        });
    }

    let mut failure = None;
    let (x, p) = golden_max(
        |x| match purity_at(pm, lambda_nm, x.exp(), n) {
            Ok(p) => p,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NEG_INFINITY
            }
        },
        xs[best - 1],
        xs[best + 1],
        REFINE_REL_TOL,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(BandwidthOptimum {
        fwhm_nm: x.exp(),
        purity: p,
        coarse_scan,
        refined: true,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PumpPolicy {
    Fixed { fwhm_nm: f64 },
    Optimized { lo_nm: f64, hi_nm: f64 },
}

impl PumpPolicy {
    pub fn optimized() -> Self {
        PumpPolicy::Optimized {
            lo_nm: DEFAULT_BANDWIDTH_RANGE_NM.0,
            hi_nm: DEFAULT_BANDWIDTH_RANGE_NM.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PurityScanRow {
    pub lambda_nm: f64,
    pub period_um: Option<f64>,
    pub pump_fwhm_nm: Option<f64>,
    pub purity: Option<f64>,
    pub error: Option<String>,
}

/// Scan wavelengths `from_nm, from_nm + step_nm, …` up to `to_nm`.
pub fn scan_wavelengths(from_nm: f64, to_nm: f64, step_nm: f64) -> Result<Vec<f64>> {
    if !(step_nm > 0.0) {
        return Err(Error::InvalidInput(format!(
            "scan step must be positive, got {step_nm} nm"
        )));
    }
    if !(from_nm <= to_nm) {
        return Err(Error::InvalidInput(format!(
            "scan start {from_nm} nm is above its end {to_nm} nm"
        )));
    }
    let count = ((to_nm - from_nm) / step_nm + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|k| from_nm + step_nm * k as f64).collect())
}

fn scan_row(
    crystal: &CrystalRecord,
    conv: &ProcessConvention,
    lambda_nm: f64,
    length_mm: f64,
    policy: PumpPolicy,
    n: usize,
) -> PurityScanRow {
    let mut row = PurityScanRow {
        lambda_nm,
        period_um: None,
        pump_fwhm_nm: None,
        purity: None,
        error: None,
    };
    let result = (|| -> Result<()> {
        row.period_um = Some(degenerate_poling_period(crystal, conv, lambda_nm)?.period_um);
        let pm = PhaseMatchSpec::degenerate(crystal.clone(), *conv, lambda_nm, length_mm)?;
        let (bw, p) = match policy {
            PumpPolicy::Fixed { fwhm_nm } => (fwhm_nm, purity_at(&pm, lambda_nm, fwhm_nm, n)?),
            PumpPolicy::Optimized { lo_nm, hi_nm } => {
                let opt = optimize_pump_bandwidth(&pm, lambda_nm, (lo_nm, hi_nm), n)?;
                (opt.fwhm_nm, opt.purity)
            }
        };
        row.pump_fwhm_nm = Some(bw);
        row.purity = Some(p);
        Ok(())
    })();
    if let Err(e) = result {
        row.error = Some(e.to_string());
    }
    row
}

/// Degenerate purity across wavelengths, period recomputed per row. Row
/// failures are recorded in the row and the scan continues.
#[allow(clippy::too_many_arguments)]
pub fn purity_scan(
    crystal: &CrystalRecord,
    conv: &ProcessConvention,
    from_nm: f64,
    to_nm: f64,
    step_nm: f64,
    length_mm: f64,
    policy: PumpPolicy,
    n: usize,
) -> Result<Vec<PurityScanRow>> {
    let lambdas = scan_wavelengths(from_nm, to_nm, step_nm)?;
    Ok(lambdas
        .par_iter()
        .map(|&l| scan_row(crystal, conv, l, length_mm, policy, n))
        .collect())
}
