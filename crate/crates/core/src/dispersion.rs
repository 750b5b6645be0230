//! Range-checked refractive index, wavenumber and group-velocity functions.
//! Wavelengths in μm.

use std::f64::consts::PI;

use crate::error::Result;
use crate::registry::{Axis, CrystalRecord};
use crate::units::C;

pub fn refractive_index(record: &CrystalRecord, axis: Axis, lambda_um: f64) -> Result<f64> {
    record.check_range(lambda_um)?;
    Ok(record.axis(axis).n(lambda_um))
}

/// k = 2πn/λ in rad/μm.
pub fn wavenumber(record: &CrystalRecord, axis: Axis, lambda_um: f64) -> Result<f64> {
    Ok(2.0 * PI * refractive_index(record, axis, lambda_um)? / lambda_um)
}

/// Analytic dn/dλ in 1/μm.
pub fn dn_dlambda(record: &CrystalRecord, axis: Axis, lambda_um: f64) -> Result<f64> {
    record.check_range(lambda_um)?;
    Ok(record.axis(axis).dn_dlambda(lambda_um))
}

pub fn group_index(record: &CrystalRecord, axis: Axis, lambda_um: f64) -> Result<f64> {
    record.check_range(lambda_um)?;
    Ok(record.axis(axis).group_index(lambda_um))
}

/// 1/V_g = n_g/c in s/m.
pub fn inverse_group_velocity(record: &CrystalRecord, axis: Axis, lambda_um: f64) -> Result<f64> {
    Ok(group_index(record, axis, lambda_um)? / C)
}

/// Central-difference dn/dλ with Richardson extrapolation. Test oracle for
/// the analytic derivative.
pub fn dn_dlambda_numeric(record: &CrystalRecord, axis: Axis, lambda_um: f64) -> Result<f64> {
    record.check_range(lambda_um)?;
    let form = record.axis(axis);
    let (lo, hi) = record.validity_um;
    let mut h = 1e-3 * lambda_um;
    h = h
        .min(0.5 * (lambda_um - lo).max(0.0))
        .min(0.5 * (hi - lambda_um).max(0.0));
    let d = |h: f64| {
        if h > 0.0 {
            (form.n(lambda_um + h) - form.n(lambda_um - h)) / (2.0 * h)
        } else {
            let h = 1e-6 * lambda_um;
            if lambda_um + h <= hi {
                (form.n(lambda_um + h) - form.n(lambda_um)) / h
            } else {
                (form.n(lambda_um) - form.n(lambda_um - h)) / h
            }
        }
    };
    if h <= 1e-7 {
        return Ok(d(0.0));
    }
    let d1 = d(h);
    let d2 = d(h / 2.0);
    Ok((4.0 * d2 - d1) / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::{Registry, ResonanceTerm, SellmeierForm, TermStyle};
    use proptest::prelude::*;

    fn toy() -> CrystalRecord {
        CrystalRecord::dispersionless("toy", 2.0, (0.4, 3.0)).unwrap()
    }

    #[test]
    fn constant_record() {
        let r = toy();
        assert_eq!(refractive_index(&r, Axis::Y, 1.3).unwrap(), 2.0);
        assert!((wavenumber(&r, Axis::Y, 1.0).unwrap() - 4.0 * PI).abs() < 1e-14);
        assert_eq!(dn_dlambda(&r, Axis::Z, 1.3).unwrap(), 0.0);
        assert_eq!(inverse_group_velocity(&r, Axis::X, 1.3).unwrap(), 2.0 / C);
    }

    #[test]
    fn out_of_range_is_an_error() {
        let reg = Registry::shipped();
        let ktp = reg.get("PPKTP").unwrap();
        assert!(refractive_index(ktp, Axis::Y, 10.0).is_err());
        assert!(wavenumber(ktp, Axis::Y, 0.1).is_err());
        assert!(dn_dlambda(ktp, Axis::Y, 3.5).is_err());
    }

    // Golden values from a 30-digit evaluation of the transcribed coefficients.
    #[test]
    fn ktp_y_index_golden() {
        let reg = Registry::shipped();
        let ktp = reg.get("PPKTP").unwrap();
        let l2: f64 = 1.584 * 1.584;
        let n2 = 2.09930 + 0.922683 * l2 / (l2 - 0.0467695) - 0.0138408 * l2;
        let n = refractive_index(ktp, Axis::Y, 1.584).unwrap();
        assert!((n - n2.sqrt()).abs() < 1e-15);
        assert!((n - 1.733_430_532_130_412).abs() < 1e-13, "n = {n}");
    }

    #[test]
    fn ktp_y_wavenumber_golden() {
        let reg = Registry::shipped();
        let ktp = reg.get("PPKTP").unwrap();
        let k = wavenumber(ktp, Axis::Y, 0.792).unwrap();
        assert!((k - GOLDEN_K_KTP_Y_792).abs() < 1e-9, "k = {k}");
    }

    const GOLDEN_K_KTP_Y_792: f64 = 13.940_168_801_836_323;

    #[test]
    fn single_pole_derivative_by_hand() {
        // n^2 = 1 + 2 l^2/(l^2 - 0.04): d(n^2)/dl = -2*2*0.04*l/(l^2-0.04)^2
        let form = SellmeierForm {
            constant_term: 1.0,
            resonance_terms: vec![ResonanceTerm {
                style: TermStyle::Sellmeier,
                num: 2.0,
                pole: 0.04,
            }],
            infrared_term: 0.0,
            source: None,
        };
        let l: f64 = 1.0;
        let dn2 = -0.16 / (0.96f64 * 0.96);
        let n = (1.0 + 2.0 / 0.96f64).sqrt();
        assert!((form.dn_dlambda(l) - dn2 / (2.0 * n)).abs() < 1e-15);
    }

    #[test]
    fn ktp_z_derivative_matches_finite_difference() {
        let reg = Registry::shipped();
        let ktp = reg.get("PPKTP").unwrap();
        let a = dn_dlambda(ktp, Axis::Z, 1.584).unwrap();
        let f = dn_dlambda_numeric(ktp, Axis::Z, 1.584).unwrap();
        assert!(((a - f) / a).abs() < 1e-6);
    }

    #[test]
    fn group_index_exceeds_phase_index_for_shipped_crystals() {
        let reg = Registry::shipped();
        for r in reg.records() {
            let (lo, hi) = r.validity_um;
            for axis in Axis::ALL {
                for s in 0..=100 {
                    let l = lo + (hi - lo) * s as f64 / 100.0;
                    let n = refractive_index(r, axis, l).unwrap();
                    let ng = group_index(r, axis, l).unwrap();
                    assert!(n > 1.0 && n.is_finite());
                    assert!(ng >= 1.0, "{} {axis} {l}: n_g = {ng}", r.name);
                    if dn_dlambda(r, axis, l).unwrap() < 0.0 {
                        assert!(ng >= n);
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn analytic_derivative_matches_finite_difference(
            which in 0usize..5, axis in 0usize..3, t in 0.001f64..0.999
        ) {
            let reg = Registry::shipped();
            let r = reg.records().nth(which).unwrap();
            let (lo, hi) = r.validity_um;
            let l = lo + (hi - lo) * t;
            let axis = Axis::ALL[axis];
            let a = dn_dlambda(r, axis, l).unwrap();
            let f = dn_dlambda_numeric(r, axis, l).unwrap();
            prop_assert!(((a - f) / a).abs() <= 1e-6, "{} {axis} {l}: {a} vs {f}", r.name);
        }
    }
}
