//! Group-velocity-matching solvers and first-order quasi-phase-matching
//! poling periods for collinear type-II down-conversion.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::dispersion::{inverse_group_velocity, wavenumber};
use crate::error::{Error, Result};
use crate::numeric::brent;
use crate::registry::{Axis, CrystalRecord};
use crate::units::{nm_to_um, um_to_nm};

/// Default root tolerance, nm.
pub const DEFAULT_XTOL_NM: f64 = 1e-6;

/// Polarization and propagation axes of the down-conversion process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ProcessConvention {
    pub propagation: Axis,
    pub pump_axis: Axis,
    pub signal_axis: Axis,
    pub idler_axis: Axis,
    pub collinear: bool,
    pub degenerate_signal_idler: bool,
}

impl ProcessConvention {
    /// Type-II y → y + z, propagating along x, wavelength degenerate.
    pub const fn type_ii() -> Self {
        ProcessConvention {
            propagation: Axis::X,
            pump_axis: Axis::Y,
            signal_axis: Axis::Y,
            idler_axis: Axis::Z,
            collinear: true,
            degenerate_signal_idler: true,
        }
    }
}

impl Default for ProcessConvention {
    fn default() -> Self {
        Self::type_ii()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GvmCondition {
    /// 2/V_p(λ/2) = 1/V_s(λ) + 1/V_i(λ)
    Symmetric,
    /// 1/V_p(λ/2) = 1/V_i(λ)
    PumpMatchesIdler,
    /// 1/V_p(λ/2) = 1/V_s(λ)
    PumpMatchesSignal,
}

impl fmt::Display for GvmCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GvmCondition::Symmetric => "symmetric",
            GvmCondition::PumpMatchesIdler => "pump_matches_idler",
            GvmCondition::PumpMatchesSignal => "pump_matches_signal",
        })
    }
}

impl FromStr for GvmCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "symmetric" => Ok(GvmCondition::Symmetric),
            "pump_matches_idler" | "idler" => Ok(GvmCondition::PumpMatchesIdler),
            "pump_matches_signal" | "signal" => Ok(GvmCondition::PumpMatchesSignal),
            _ => Err(Error::InvalidInput(format!("unknown GVM condition {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GvmSolution {
    pub lambda_nm: f64,
    pub condition: GvmCondition,
    /// Value of the matching function at the root, s/m.
    pub residual_s_per_m: f64,
    /// 1 nm scan bracket the root was refined in.
    pub bracket_nm: (f64, f64),
}

/// Matching function at degenerate wavelength `lambda_um` (pump at λ/2), s/m.
pub fn gvm_function(
    record: &CrystalRecord,
    conv: &ProcessConvention,
    condition: GvmCondition,
    lambda_um: f64,
) -> Result<f64> {
    let p = inverse_group_velocity(record, conv.pump_axis, lambda_um / 2.0)?;
    Ok(match condition {
        GvmCondition::Symmetric => {
            2.0 * p
                - inverse_group_velocity(record, conv.signal_axis, lambda_um)?
                - inverse_group_velocity(record, conv.idler_axis, lambda_um)?
        }
        GvmCondition::PumpMatchesIdler => p - inverse_group_velocity(record, conv.idler_axis, lambda_um)?,
        GvmCondition::PumpMatchesSignal => p - inverse_group_velocity(record, conv.signal_axis, lambda_um)?,
    })
}

/// Degenerate wavelengths (nm) for which both λ and λ/2 are in range.
pub fn search_window_nm(record: &CrystalRecord) -> Option<(f64, f64)> {
    let lo = um_to_nm(2.0 * record.validity_um.0);
    let hi = um_to_nm(record.validity_um.1);
    (lo < hi).then_some((lo, hi))
}

/// Roots, search window (nm) and the GVM function at the window ends.
type RootScan = (Vec<GvmSolution>, (f64, f64), (f64, f64));

fn all_roots(
    record: &CrystalRecord,
    conv: &ProcessConvention,
    condition: GvmCondition,
    xtol_nm: f64,
) -> Result<RootScan> {
    let (lo, hi) = search_window_nm(record).ok_or_else(|| {
        Error::InvalidInput(format!(
            "validity range of {} is too narrow for any GVM search",
            record.name
        ))
    })?;
    let g = |nm: f64| gvm_function(record, conv, condition, nm_to_um(nm));
    let steps = (hi - lo).floor() as usize;
    let mut xs: Vec<f64> = (0..=steps).map(|k| lo + k as f64).collect();
    if *xs.last().unwrap() < hi {
        xs.push(hi);
    }
    let gs = xs.iter().map(|&x| g(x)).collect::<Result<Vec<_>>>()?;

    let mut roots = Vec::new();
    for k in 0..xs.len() - 1 {
        let (a, b) = (gs[k], gs[k + 1]);
        let bracket = (xs[k], xs[k + 1]);
        let lambda_nm = if a * b < 0.0 {
            brent(|x| g(x).unwrap_or(f64::NAN), xs[k], xs[k + 1], xtol_nm)
        } else if a == 0.0 && k > 0 && gs[k - 1] * b < 0.0 {
            xs[k]
        } else {
            continue;
        };
        roots.push(GvmSolution {
            lambda_nm,
            condition,
            residual_s_per_m: g(lambda_nm)?,
            bracket_nm: bracket,
        });
    }
    Ok((roots, (lo, hi), (gs[0], *gs.last().unwrap())))
}

/// Symmetric GVM wavelength. When the window holds several roots the
/// shortest wavelength is returned.
pub fn solve_gvm_symmetric(record: &CrystalRecord, conv: &ProcessConvention) -> Result<GvmSolution> {
    solve_gvm_symmetric_tol(record, conv, DEFAULT_XTOL_NM)
}

pub fn solve_gvm_symmetric_tol(record: &CrystalRecord, conv: &ProcessConvention, xtol_nm: f64) -> Result<GvmSolution> {
    let (roots, (lo, hi), (g_lo, g_hi)) = all_roots(record, conv, GvmCondition::Symmetric, xtol_nm)?;
    roots.into_iter().next().ok_or(Error::NoGvmPoint {
        record: record.name.clone(),
        lo_nm: lo,
        hi_nm: hi,
        g_lo,
        g_hi,
    })
}

/// All roots of one asymmetric branch, ascending. Empty when none exist.
pub fn solve_gvm_asymmetric(
    record: &CrystalRecord,
    conv: &ProcessConvention,
    branch: GvmCondition,
) -> Result<Vec<GvmSolution>> {
    if branch == GvmCondition::Symmetric {
        return Err(Error::InvalidInput(
            "asymmetric solve needs an asymmetric branch".into(),
        ));
    }
    Ok(all_roots(record, conv, branch, DEFAULT_XTOL_NM)?.0)
}

/// Roots of both asymmetric branches, ascending in wavelength.
pub fn solve_gvm_asymmetric_all(record: &CrystalRecord, conv: &ProcessConvention) -> Result<Vec<GvmSolution>> {
    let mut out = solve_gvm_asymmetric(record, conv, GvmCondition::PumpMatchesIdler)?;
    out.extend(solve_gvm_asymmetric(record, conv, GvmCondition::PumpMatchesSignal)?);
    out.sort_by(|a, b| a.lambda_nm.total_cmp(&b.lambda_nm));
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolingPeriod {
    pub period_um: f64,
    /// k_p − k_s − k_i without the grating, rad/μm.
    pub bare_mismatch: f64,
    /// Sign of `bare_mismatch`; the grating vector is applied with this sign.
    pub sign: f64,
}

/// First-order period Λ = 2π/|k_p − k_s − k_i|.
pub fn poling_period(
    record: &CrystalRecord,
    conv: &ProcessConvention,
    lambda_p_nm: f64,
    lambda_s_nm: f64,
    lambda_i_nm: f64,
) -> Result<PolingPeriod> {
    let rel = (1.0 / lambda_p_nm - 1.0 / lambda_s_nm - 1.0 / lambda_i_nm) * lambda_p_nm;
    if !(rel.abs() <= 1e-9) {
        return Err(Error::EnergyConservation { relative_error: rel });
    }
    let dk = wavenumber(record, conv.pump_axis, nm_to_um(lambda_p_nm))?
        - wavenumber(record, conv.signal_axis, nm_to_um(lambda_s_nm))?
        - wavenumber(record, conv.idler_axis, nm_to_um(lambda_i_nm))?;
    Ok(PolingPeriod {
        period_um: 2.0 * PI / dk.abs(),
        bare_mismatch: dk,
        sign: if dk < 0.0 { -1.0 } else { 1.0 },
    })
}

/// Period for degenerate signal and idler at `lambda_nm`, pump at λ/2.
pub fn degenerate_poling_period(
    record: &CrystalRecord,
    conv: &ProcessConvention,
    lambda_nm: f64,
) -> Result<PolingPeriod> {
    poling_period(record, conv, lambda_nm / 2.0, lambda_nm, lambda_nm)
}
