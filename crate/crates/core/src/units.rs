//! Physical constants and unit conversions.

use std::f64::consts::PI;

/// Speed of light in vacuum, m/s.
pub const C: f64 = 299_792_458.0;

/// Speed of light in μm/s.
pub const C_UM_PER_S: f64 = C * 1e6;

pub fn nm_to_um(nm: f64) -> f64 {
    nm * 1e-3
}

pub fn um_to_nm(um: f64) -> f64 {
    um * 1e3
}

pub fn mm_to_um(mm: f64) -> f64 {
    mm * 1e3
}

/// Angular frequency (rad/s) of light with vacuum wavelength `lambda_um`.
pub fn omega_from_um(lambda_um: f64) -> f64 {
    2.0 * PI * C_UM_PER_S / lambda_um
}

/// Vacuum wavelength (μm) of light with angular frequency `omega`.
pub fn um_from_omega(omega: f64) -> f64 {
    2.0 * PI * C_UM_PER_S / omega
}

pub fn omega_from_nm(lambda_nm: f64) -> f64 {
    omega_from_um(nm_to_um(lambda_nm))
}

pub fn nm_from_omega(omega: f64) -> f64 {
    um_to_nm(um_from_omega(omega))
}

/// Angular-frequency width matching a wavelength width `dlambda_nm` around
/// `lambda_nm` to first order.
pub fn delta_omega_from_nm(lambda_nm: f64, dlambda_nm: f64) -> f64 {
    2.0 * PI * C * (dlambda_nm * 1e-9) / (lambda_nm * 1e-9).powi(2)
}

pub fn s_to_ps(s: f64) -> f64 {
    s * 1e12
}

pub fn ps_to_s(ps: f64) -> f64 {
    ps * 1e-12
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_roundtrip() {
        let w = omega_from_nm(1550.0);
        assert!((nm_from_omega(w) - 1550.0).abs() < 1e-9);
    }

    #[test]
    fn omega_at_one_micron() {
        assert!((omega_from_um(1.0) - 2.0 * PI * C * 1e6).abs() / omega_from_um(1.0) < 1e-15);
    }

    #[test]
    fn bandwidth_conversion_matches_derivative() {
        let lam = 800.0;
        let d = 0.001;
        let exact = omega_from_nm(lam - d / 2.0) - omega_from_nm(lam + d / 2.0);
        assert!((delta_omega_from_nm(lam, d) - exact).abs() / exact < 1e-9);
    }
}
