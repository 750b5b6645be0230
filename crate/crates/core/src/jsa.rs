//! Joint spectral amplitudes f(ωs, ωi) = α(ωs + ωi)·φ(ωs, ωi) on uniform
//! frequency grids.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gvm::{degenerate_poling_period, ProcessConvention};
use crate::registry::{Axis, CrystalRecord};
use crate::units::{delta_omega_from_nm, mm_to_um, nm_to_um, omega_from_nm, um_from_omega, um_to_nm, C_UM_PER_S};

/// Phase-matching support kept by [`auto_grid`]: |Δk·L/2| up to this many
/// sinc zeros.
pub const SUPPORT_SINC_ZEROS: f64 = 12.0;
/// Pump support kept by [`auto_grid`], in pump standard deviations.
pub const SUPPORT_PUMP_SIGMAS: f64 = 3.0;
/// Largest allowed boundary |f|² relative to the peak.
pub const BOUNDARY_RATIO: f64 = 1e-3;
pub const MIN_GRID_POINTS: usize = 16;
pub const DEFAULT_GRID_POINTS: usize = 512;

const MAX_EXPANSIONS: usize = 12;
const EXPANSION_FACTOR: f64 = 1.5;

/// Gaussian pump; `fwhm_nm` is the FWHM of the intensity spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PumpSpec {
    pub center_nm: f64,
    pub fwhm_nm: f64,
}

impl PumpSpec {
    pub fn new(center_nm: f64, fwhm_nm: f64) -> Result<Self> {
        if !(fwhm_nm > 0.0 && fwhm_nm.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "pump bandwidth must be positive, got {fwhm_nm} nm"
            )));
        }
        if !(center_nm > 0.0 && center_nm.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "pump wavelength must be positive, got {center_nm} nm"
            )));
        }
        Ok(PumpSpec { center_nm, fwhm_nm })
    }

    pub fn center_omega(&self) -> f64 {
        omega_from_nm(self.center_nm)
    }

    /// Intensity FWHM in angular frequency, rad/s.
    pub fn fwhm_omega(&self) -> f64 {
        delta_omega_from_nm(self.center_nm, self.fwhm_nm)
    }

    /// Standard deviation σ of the amplitude exp(−(ω−ω₀)²/(2σ²)), rad/s.
    pub fn sigma_omega(&self) -> f64 {
        self.fwhm_omega() / (2.0 * 2f64.ln().sqrt())
    }
}

/// α(ω), real and peaking at 1.
pub fn pump_envelope(pump: &PumpSpec, omega: f64) -> Complex64 {
    let s = pump.sigma_omega();
    let d = omega - pump.center_omega();
    Complex64::new((-d * d / (2.0 * s * s)).exp(), 0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseMatchSpec {
    pub crystal: CrystalRecord,
    pub convention: ProcessConvention,
    pub length_mm: f64,
    pub period_um: f64,
    /// Sign applied to the grating vector: Δk = k_p − k_s − k_i − sign·2π/Λ.
    /// Matches the sign of the bare mismatch at the design point.
    pub grating_sign: f64,
    pub include_pm_phase: bool,
}

impl PhaseMatchSpec {
    pub fn new(
        crystal: CrystalRecord,
        convention: ProcessConvention,
        length_mm: f64,
        period_um: f64,
        grating_sign: f64,
    ) -> Result<Self> {
        if !(length_mm > 0.0 && length_mm.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "crystal length must be positive, got {length_mm} mm"
            )));
        }
        if !(period_um > 0.0) {
            return Err(Error::InvalidInput(format!(
                "poling period must be positive, got {period_um} um"
            )));
        }
        Ok(PhaseMatchSpec {
            crystal,
            convention,
            length_mm,
            period_um,
            grating_sign: if grating_sign < 0.0 { -1.0 } else { 1.0 },
            include_pm_phase: true,
        })
    }

    /// Period chosen to phase-match degenerate down-conversion at `lambda_nm`.
    pub fn degenerate(
        crystal: CrystalRecord,
        convention: ProcessConvention,
        lambda_nm: f64,
        length_mm: f64,
    ) -> Result<Self> {
        let p = degenerate_poling_period(&crystal, &convention, lambda_nm)?;
        Self::new(crystal, convention, length_mm, p.period_um, p.sign)
    }

    /// Explicit period, grating sign taken from the bare mismatch at the
    /// degenerate design wavelength `lambda_nm`.
    pub fn with_period(
        crystal: CrystalRecord,
        convention: ProcessConvention,
        lambda_nm: f64,
        length_mm: f64,
        period_um: f64,
    ) -> Result<Self> {
        let p = degenerate_poling_period(&crystal, &convention, lambda_nm)?;
        Self::new(crystal, convention, length_mm, period_um, p.sign)
    }

    pub fn pm_phase(mut self, on: bool) -> Self {
        self.include_pm_phase = on;
        self
    }

    /// Grating wavevector with sign, rad/μm. Zero for an unpoled crystal.
    pub fn grating_k(&self) -> f64 {
        if self.period_um.is_infinite() {
            0.0
        } else {
            self.grating_sign * 2.0 * PI / self.period_um
        }
    }

    pub fn length_um(&self) -> f64 {
        mm_to_um(self.length_mm)
    }

    fn k(&self, axis: Axis, omega: f64) -> f64 {
        let l = um_from_omega(omega);
        2.0 * PI * self.crystal.axis(axis).n(l) / l
    }

    fn check(&self, axis: Axis, omega: f64) -> Result<()> {
        if !(omega > 0.0) {
            return Err(Error::GridOutOfRange(format!("non-positive frequency {omega} rad/s")));
        }
        self.crystal.check_range(um_from_omega(omega)).map_err(|_| {
            Error::GridOutOfRange(format!(
                "{:.1} nm on the {axis} axis is outside the validity range [{}, {}] um of {}",
                um_to_nm(um_from_omega(omega)),
                self.crystal.validity_um.0,
                self.crystal.validity_um.1,
                self.crystal.name
            ))
        })
    }

    fn mismatch_unchecked(&self, ws: f64, wi: f64) -> f64 {
        let c = &self.convention;
        self.k(c.pump_axis, ws + wi) - self.k(c.signal_axis, ws) - self.k(c.idler_axis, wi) - self.grating_k()
    }
}

/// Δk(ωs, ωi) in rad/μm.
pub fn phase_mismatch(pm: &PhaseMatchSpec, ws: f64, wi: f64) -> Result<f64> {
    for w in [ws, wi, ws + wi] {
        if !(w > 0.0) {
            return Err(Error::InvalidInput(format!("non-positive frequency {w} rad/s")));
        }
        pm.crystal.check_range(um_from_omega(w))?;
    }
    Ok(pm.mismatch_unchecked(ws, wi))
}

/// sin(x)/x with the removable singularity filled in.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-6 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

fn pm_value(include_phase: bool, x: f64) -> Complex64 {
    let s = sinc(x);
    if include_phase {
        Complex64::from_polar(s, x)
    } else {
        Complex64::new(s, 0.0)
    }
}

/// φ(ωs, ωi) = sinc(ΔkL/2)·exp(iΔkL/2), the phase factor only when enabled.
pub fn phase_matching_function(pm: &PhaseMatchSpec, ws: f64, wi: f64) -> Result<Complex64> {
    let dk = phase_mismatch(pm, ws, wi)?;
    Ok(pm_value(pm.include_pm_phase, dk * pm.length_um() / 2.0))
}

/// Uniform signal and idler angular-frequency axes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyGrid {
    signal: Vec<f64>,
    idler: Vec<f64>,
}

fn linspace(center: f64, half_span: f64, n: usize) -> Vec<f64> {
    let lo = center - half_span;
    let step = 2.0 * half_span / (n - 1) as f64;
    (0..n).map(|k| lo + step * k as f64).collect()
}

impl FrequencyGrid {
    pub fn uniform(
        signal_center: f64,
        signal_half_span: f64,
        idler_center: f64,
        idler_half_span: f64,
        n: usize,
    ) -> Result<Self> {
        if n < MIN_GRID_POINTS {
            return Err(Error::InvalidInput(format!(
                "grid needs at least {MIN_GRID_POINTS} points per axis, got {n}"
            )));
        }
        if !(signal_half_span > 0.0 && idler_half_span > 0.0) {
            return Err(Error::InvalidInput("grid spans must be positive".into()));
        }
        Ok(FrequencyGrid {
            signal: linspace(signal_center, signal_half_span, n),
            idler: linspace(idler_center, idler_half_span, n),
        })
    }

    /// Same axis for signal and idler.
    pub fn square(center: f64, half_span: f64, n: usize) -> Result<Self> {
        Self::uniform(center, half_span, center, half_span, n)
    }

    pub fn n(&self) -> usize {
        self.signal.len()
    }

    /// Signal angular frequencies, rad/s, ascending.
    pub fn signal(&self) -> &[f64] {
        &self.signal
    }

    pub fn idler(&self) -> &[f64] {
        &self.idler
    }

    pub fn signal_center(&self) -> f64 {
        0.5 * (self.signal[0] + self.signal[self.n() - 1])
    }

    pub fn idler_center(&self) -> f64 {
        0.5 * (self.idler[0] + self.idler[self.n() - 1])
    }

    /// Full width of the signal axis, rad/s.
    pub fn signal_span(&self) -> f64 {
        self.signal[self.n() - 1] - self.signal[0]
    }

    pub fn idler_span(&self) -> f64 {
        self.idler[self.n() - 1] - self.idler[0]
    }

    pub fn signal_step(&self) -> f64 {
        self.signal_span() / (self.n() - 1) as f64
    }

    pub fn idler_step(&self) -> f64 {
        self.idler_span() / (self.n() - 1) as f64
    }

    pub fn signal_wavelengths_nm(&self) -> Vec<f64> {
        self.signal.iter().map(|&w| um_to_nm(um_from_omega(w))).collect()
    }

    pub fn idler_wavelengths_nm(&self) -> Vec<f64> {
        self.idler.iter().map(|&w| um_to_nm(um_from_omega(w))).collect()
    }

    /// True when signal and idler axes are identical.
    pub fn is_square(&self) -> bool {
        self.signal == self.idler
    }

    pub fn transposed(&self) -> Self {
        FrequencyGrid {
            signal: self.idler.clone(),
            idler: self.signal.clone(),
        }
    }
}

/// Normalized N×N amplitude, row index = signal, column index = idler.
#[derive(Debug, Clone, PartialEq)]
pub struct JointAmplitude {
    grid: FrequencyGrid,
    values: Vec<Complex64>,
}

impl JointAmplitude {
    /// Wraps row-major `values` and normalizes them to unit Frobenius norm.
    pub fn from_values(grid: FrequencyGrid, mut values: Vec<Complex64>) -> Result<Self> {
        let n = grid.n();
        if values.len() != n * n {
            return Err(Error::InvalidInput(format!(
                "expected {} values, got {}",
                n * n,
                values.len()
            )));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite("joint amplitude".into()));
        }
        let norm = values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::NonFinite("joint amplitude norm (all entries zero)".into()));
        }
        let inv = 1.0 / norm;
        values.iter_mut().for_each(|v| *v *= inv);
        Ok(JointAmplitude { grid, values })
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    /// Row-major values.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.n() + j]
    }

    /// |f|², row-major.
    pub fn intensity(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    /// Signal and idler swapped.
    pub fn transposed(&self) -> Self {
        let n = self.n();
        let mut values = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                values.push(self.get(i, j));
            }
        }
        JointAmplitude {
            grid: self.grid.transposed(),
            values,
        }
    }

    /// Largest |f|² on the grid boundary relative to the sampled peak |f|².
    pub fn boundary_ratio(&self) -> f64 {
        let peak = self.values.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max);
        edge_max(&self.values, self.n()) / peak
    }
}

fn edge_max(values: &[Complex64], n: usize) -> f64 {
    let mut edge = 0.0f64;
    for k in 0..n {
        for (i, j) in [(0, k), (n - 1, k), (k, 0), (k, n - 1)] {
            edge = edge.max(values[i * n + j].norm_sqr());
        }
    }
    edge
}

fn check_grid(pm: &PhaseMatchSpec, grid: &FrequencyGrid) -> Result<()> {
    let c = &pm.convention;
    let (s, i) = (grid.signal(), grid.idler());
    let n = grid.n();
    pm.check(c.signal_axis, s[0])?;
    pm.check(c.signal_axis, s[n - 1])?;
    pm.check(c.idler_axis, i[0])?;
    pm.check(c.idler_axis, i[n - 1])?;
    pm.check(c.pump_axis, s[0] + i[0])?;
    pm.check(c.pump_axis, s[n - 1] + i[n - 1])
}

fn fill(pump: &PumpSpec, pm: &PhaseMatchSpec, grid: &FrequencyGrid) -> Result<Vec<Complex64>> {
    check_grid(pm, grid)?;
    let n = grid.n();
    let c = &pm.convention;
    let ks: Vec<f64> = grid.signal().iter().map(|&w| pm.k(c.signal_axis, w)).collect();
    let ki: Vec<f64> = grid.idler().iter().map(|&w| pm.k(c.idler_axis, w)).collect();
    let kg = pm.grating_k();
    let half_l = pm.length_um() / 2.0;
    let w0 = pump.center_omega();
    let inv2s2 = 1.0 / (2.0 * pump.sigma_omega().powi(2));
    let mut values = vec![Complex64::new(0.0, 0.0); n * n];
    values.par_chunks_mut(n).enumerate().for_each(|(r, row)| {
        let ws = grid.signal()[r];
        for (col, out) in row.iter_mut().enumerate() {
            let wp = ws + grid.idler()[col];
            let dk = pm.k(c.pump_axis, wp) - ks[r] - ki[col] - kg;
            let d = wp - w0;
            let alpha = (-d * d * inv2s2).exp();
            *out = pm_value(pm.include_pm_phase, dk * half_l) * alpha;
        }
    });
    Ok(values)
}

/// Evaluates and normalizes f on `grid`. Rows are filled in parallel; every
/// entry depends only on its own inputs and the normalization sums in
/// row-major order, so the result does not depend on the thread count.
pub fn compute_jsa(pump: &PumpSpec, pm: &PhaseMatchSpec, grid: &FrequencyGrid) -> Result<JointAmplitude> {
    JointAmplitude::from_values(grid.clone(), fill(pump, pm, grid)?)
}

/// Square grid centered on the degenerate frequency, sized from the joint
/// support of the pump and phase-matching functions.
///
/// Linearizing Δk ≈ a·δs + b·δi with a = k_p′ − k_s′ and b = k_p′ − k_i′,
/// the region |Δk·L/2| ≤ Zπ, |δs + δi| ≤ 3σ extends to
/// |δs| ≤ (U + |b|V)/|a − b| and |δi| ≤ (U + |a|V)/|a − b|, U = 2πZ/L, V = 3σ.
fn initial_half_span(pump: &PumpSpec, pm: &PhaseMatchSpec, lambda_nm: f64) -> Result<f64> {
    let c = &pm.convention;
    let l = nm_to_um(lambda_nm);
    let r = &pm.crystal;
    r.check_range(l)?;
    r.check_range(l / 2.0)?;
    let kp = r.axis(c.pump_axis).group_index(l / 2.0) / C_UM_PER_S;
    let ks = r.axis(c.signal_axis).group_index(l) / C_UM_PER_S;
    let ki = r.axis(c.idler_axis).group_index(l) / C_UM_PER_S;
    let (a, b) = (kp - ks, kp - ki);
    let u = SUPPORT_SINC_ZEROS * 2.0 * PI / pm.length_um();
    let v = SUPPORT_PUMP_SIGMAS * pump.sigma_omega();
    let ab = (a - b).abs();
    if ab < 1e-6 * (a.abs() + b.abs()).max(1e-300) {
        return Err(Error::InvalidInput(
            "signal and idler group velocities coincide; grid support is unbounded".into(),
        ));
    }
    Ok(((u + b.abs() * v) / ab).max((u + a.abs() * v) / ab))
}

/// Grid and amplitude from [`auto_grid`]'s search, so callers do not evaluate
/// the amplitude twice.
pub fn build_jsa_auto(pump: &PumpSpec, pm: &PhaseMatchSpec, lambda_nm: f64, n: usize) -> Result<JointAmplitude> {
    let w0 = omega_from_nm(lambda_nm);
    let mut half = initial_half_span(pump, pm, lambda_nm)?;
    for _ in 0..=MAX_EXPANSIONS {
        let grid = FrequencyGrid::square(w0, half, n)?;
        let values = fill(pump, pm, &grid)?;
        // Coarse grids can miss the true peak, so the on-design value at the
        // grid center also serves as the reference.
        let center = pump_envelope(pump, 2.0 * w0).re * sinc(pm.mismatch_unchecked(w0, w0) * pm.length_um() / 2.0);
        let peak = values.iter().map(|v| v.norm_sqr()).fold(center * center, f64::max);
        if edge_max(&values, n) < BOUNDARY_RATIO * peak {
            return JointAmplitude::from_values(grid, values);
        }
        half *= EXPANSION_FACTOR;
    }
    Err(Error::GridOutOfRange(format!(
        "boundary |f|^2 stays above {BOUNDARY_RATIO} of the peak after {MAX_EXPANSIONS} expansions"
    )))
}

/// Square grid of `n` points per axis, centered at degeneracy, whose boundary
/// |f|² is below [`BOUNDARY_RATIO`] of the peak. The span is expanded and
/// retried until that holds or the grid leaves the validity range.
pub fn auto_grid(pump: &PumpSpec, pm: &PhaseMatchSpec, lambda_nm: f64, n: usize) -> Result<FrequencyGrid> {
    Ok(build_jsa_auto(pump, pm, lambda_nm, n)?.grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::Registry;
    use crate::units::C;

    fn rtp_pm() -> PhaseMatchSpec {
        let reg = Registry::shipped();
        PhaseMatchSpec::degenerate(
            reg.get("PPRTP").unwrap().clone(),
            ProcessConvention::type_ii(),
            1643.2,
            30.0,
        )
        .unwrap()
    }

    #[test]
    fn envelope_peak_and_half_maximum() {
        let p = PumpSpec::new(800.0, 1.0).unwrap();
        assert_eq!(pump_envelope(&p, p.center_omega()).re, 1.0);
        for sgn in [-1.0, 1.0] {
            let a = pump_envelope(&p, p.center_omega() + sgn * p.fwhm_omega() / 2.0);
            assert!((a.norm_sqr() - 0.5).abs() < 1e-12);
            assert_eq!(a.im, 0.0);
        }
    }

    #[test]
    fn sigma_conversion_by_hand() {
        let p = PumpSpec::new(821.6, 0.42).unwrap();
        let dw = 2.0 * PI * C * 0.42e-9 / (821.6e-9f64).powi(2);
        let sigma = dw / (2.0 * (2f64).ln().sqrt());
        assert!((p.sigma_omega() - sigma).abs() / sigma < 1e-14);
        assert!(
            (p.sigma_omega() - 7.038_599_824_079_22e11).abs() < 1.0,
            "{}",
            p.sigma_omega()
        );
    }

    #[test]
    fn invalid_pump_is_rejected() {
        assert!(PumpSpec::new(800.0, 0.0).is_err());
        assert!(PumpSpec::new(800.0, -1.0).is_err());
    }

    #[test]
    fn mismatch_vanishes_at_design_point() {
        let pm = rtp_pm();
        let w = omega_from_nm(1643.2);
        assert!(phase_mismatch(&pm, w, w).unwrap().abs() < 1e-9);
        assert!((phase_matching_function(&pm, w, w).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn unpoled_mismatch_is_bare() {
        let reg = Registry::shipped();
        let r = reg.get("PPKTP").unwrap().clone();
        let conv = ProcessConvention::type_ii();
        let pm = PhaseMatchSpec::new(r.clone(), conv, 30.0, f64::INFINITY, 1.0).unwrap();
        let w = omega_from_nm(1584.0);
        let bare = crate::gvm::degenerate_poling_period(&r, &conv, 1584.0)
            .unwrap()
            .bare_mismatch;
        assert!((phase_mismatch(&pm, w, w).unwrap() - bare).abs() < 1e-12);
    }

    #[test]
    fn ktp_detuned_mismatch_golden() {
        let reg = Registry::shipped();
        let pm = PhaseMatchSpec::degenerate(
            reg.get("PPKTP").unwrap().clone(),
            ProcessConvention::type_ii(),
            1584.0,
            30.0,
        )
        .unwrap();
        let dk = phase_mismatch(&pm, omega_from_nm(1585.0), omega_from_nm(1584.0)).unwrap();
        assert!((dk - GOLDEN_DK_KTP_DETUNED).abs() < 1e-9, "{dk:.15}");
    }

    // 30-digit evaluation of the transcribed coefficients.
    const GOLDEN_DK_KTP_DETUNED: f64 = -1.102_090_956_348_873e-4;

    #[test]
    fn mismatch_outside_range_is_error() {
        let pm = rtp_pm();
        assert!(phase_mismatch(&pm, omega_from_nm(5000.0), omega_from_nm(1600.0)).is_err());
    }

    #[test]
    fn sinc_values() {
        assert_eq!(pm_value(true, 0.0), Complex64::new(1.0, 0.0));
        assert!(pm_value(true, PI).norm() < 1e-15);
        for x in [0.3, 2.0, -7.5] {
            assert!((pm_value(true, x).norm() - pm_value(false, x).norm()).abs() < 1e-15);
        }
        assert!((sinc(1e-7) - 1.0).abs() < 1e-14);
        assert!((sinc(1e-5) - (1e-5f64).sin() / 1e-5).abs() < 1e-15);
    }

    #[test]
    fn jsa_is_normalized_and_finite() {
        let pm = rtp_pm();
        let pump = PumpSpec::new(821.6, 0.42).unwrap();
        let jsa = build_jsa_auto(&pump, &pm, 1643.2, 128).unwrap();
        let s: f64 = jsa.values().iter().map(|v| v.norm_sqr()).sum();
        assert!((s - 1.0).abs() < 1e-12);
        assert!(jsa.boundary_ratio() < BOUNDARY_RATIO);
        assert!(jsa.grid().is_square());
    }

    #[test]
    fn ktp_default_grid_meets_boundary_criterion() {
        let reg = Registry::shipped();
        let r = reg.get("PPKTP").unwrap().clone();
        let lam = crate::gvm::solve_gvm_symmetric(&r, &ProcessConvention::type_ii())
            .unwrap()
            .lambda_nm;
        let pm = PhaseMatchSpec::degenerate(r, ProcessConvention::type_ii(), lam, 30.0).unwrap();
        let pump = PumpSpec::new(lam / 2.0, 0.36).unwrap();
        let jsa = build_jsa_auto(&pump, &pm, lam, DEFAULT_GRID_POINTS).unwrap();
        assert!(jsa.boundary_ratio() < BOUNDARY_RATIO);
    }

    #[test]
    fn tiny_grid_is_valid() {
        let pm = rtp_pm();
        let pump = PumpSpec::new(821.6, 0.42).unwrap();
        let g = auto_grid(&pump, &pm, 1643.2, 16).unwrap();
        assert_eq!(g.n(), 16);
        assert!(auto_grid(&pump, &pm, 1643.2, 15).is_err());
    }

    #[test]
    fn absurd_pump_bandwidth_leaves_validity_range() {
        let pm = rtp_pm();
        let pump = PumpSpec::new(821.6, 400.0).unwrap();
        assert!(matches!(
            auto_grid(&pump, &pm, 1643.2, 32),
            Err(Error::GridOutOfRange(_))
        ));
    }

    #[test]
    fn narrow_pump_concentrates_on_antidiagonal() {
        let pm = rtp_pm();
        let pump = PumpSpec::new(821.6, 0.01).unwrap();
        let jsa = build_jsa_auto(&pump, &pm, 1643.2, 128).unwrap();
        let g = jsa.grid();
        let wp = pump.center_omega();
        let band = 3.0 * pump.sigma_omega() + g.signal_step() + g.idler_step();
        let n = jsa.n();
        let mut inside = 0.0;
        for i in 0..n {
            for j in 0..n {
                if (g.signal()[i] + g.idler()[j] - wp).abs() <= band {
                    inside += jsa.get(i, j).norm_sqr();
                }
            }
        }
        assert!(inside > 0.99, "{inside}");
    }

    #[test]
    fn parallel_fill_is_deterministic() {
        let pm = rtp_pm();
        let pump = PumpSpec::new(821.6, 0.42).unwrap();
        let grid = auto_grid(&pump, &pm, 1643.2, 64).unwrap();
        let a = compute_jsa(&pump, &pm, &grid).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| compute_jsa(&pump, &pm, &grid).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn grid_out_of_range_is_error() {
        let pm = rtp_pm();
        let pump = PumpSpec::new(821.6, 0.42).unwrap();
        let w0 = omega_from_nm(1643.2);
        let grid = FrequencyGrid::square(w0, 0.9 * w0, 32).unwrap();
        assert!(matches!(compute_jsa(&pump, &pm, &grid), Err(Error::GridOutOfRange(_))));
    }

    #[test]
    fn grid_metadata_roundtrips_wavelength() {
        let w0 = omega_from_nm(1500.0);
        let g = FrequencyGrid::uniform(w0, 1e12, w0 * 1.01, 2e12, 17).unwrap();
        assert!((g.signal_wavelengths_nm()[8] - 1500.0).abs() < 1e-9);
        assert!((g.signal_span() - 2e12).abs() < 1e-3);
        assert!((g.idler_center() - w0 * 1.01).abs() < 1e-3);
        assert!(!g.is_square());
    }
}
