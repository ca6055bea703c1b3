//! Canonical parameters, Froude thresholds, and the flux/source matrices of
//! the Saint-Venant system in flux coordinates (h, q = hu, p = hv).
//!
//! Hydraulic shocks are normalized to H_L = 1, H_R = 1/nu^2; roll waves to
//! sonic height H_s = 1.

use crate::error::{Error, Result};
use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

/// Tolerance for comparisons against threshold curves.
pub const THRESHOLD_TOL: f64 = 1e-12;

/// Froude thresholds attached to a shock-strength parameter nu.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub f_char: f64,
    pub f_exist: f64,
    pub f_1d: f64,
    pub f_2d: f64,
}

/// F_char, F_exist, F_1d, F_2d as functions of nu > 1.
pub fn thresholds(nu: f64) -> Result<Thresholds> {
    if !(nu > 1.0) {
        return Err(Error::Domain(format!("nu must exceed 1, got {nu}")));
    }
    let f_char = (nu + 1.0) / (nu * nu);
    let f_exist = nu * (nu + 1.0);
    let f_1d = (2.0 * nu * (nu + 1.0)).sqrt();
    let f_2d = nu * (nu + 1.0) / (nu * nu + nu - 1.0).sqrt();
    Ok(Thresholds {
        f_char,
        f_exist,
        f_1d,
        f_2d,
    })
}

/// Hydraulic shock parameters: Froude number and nu = sqrt(H_L/H_R) with the
/// H_L = 1 normalization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShockParams {
    pub froude: f64,
    pub nu: f64,
}

impl ShockParams {
    pub fn new(froude: f64, nu: f64) -> Result<Self> {
        if !(nu > 1.0) {
            return Err(Error::Domain(format!("nu must exceed 1, got {nu}")));
        }
        if !(froude > 0.0) {
            return Err(Error::Domain(format!("F must be positive, got {froude}")));
        }
        let t = thresholds(nu)?;
        if froude >= t.f_exist {
            return Err(Error::Existence(format!(
                "no hydraulic shock for F = {froude} >= F_exist = {}",
                t.f_exist
            )));
        }
        Ok(ShockParams { froude, nu })
    }

    /// Accepts (F, H_R) with the H_L = 1 convention.
    pub fn from_right_height(froude: f64, h_right: f64) -> Result<Self> {
        if !(h_right > 0.0 && h_right < 1.0) {
            return Err(Error::Domain(format!(
                "H_R must lie in (0, 1), got {h_right}"
            )));
        }
        Self::new(froude, (1.0 / h_right).sqrt())
    }

    /// Physical (F, H_L, H_R) triples normalize to the same parameters.
    pub fn from_physical(froude: f64, h_left: f64, h_right: f64) -> Result<Self> {
        if !(h_left > 0.0 && h_right > 0.0 && h_right < h_left) {
            return Err(Error::Domain(
                "need 0 < H_R < H_L for a decreasing equilibrium shock".into(),
            ));
        }
        Self::new(froude, (h_left / h_right).sqrt())
    }

    pub fn h_right(&self) -> f64 {
        1.0 / (self.nu * self.nu)
    }

    pub fn thresholds(&self) -> Thresholds {
        thresholds(self.nu).expect("nu validated at construction")
    }

    /// Equilibrium Rankine-Hugoniot speed s = [h^{3/2}]/[h].
    pub fn speed(&self) -> f64 {
        let nu = self.nu;
        (nu * nu + nu + 1.0) / (nu * (nu + 1.0))
    }

    /// Relative mass flux q = H (u - s), constant along the profile.
    pub fn mass_flux(&self) -> f64 {
        -1.0 / self.thresholds().f_exist
    }

    /// Sonic height H_s = (F/F_exist)^{2/3} of the profile ODE.
    pub fn sonic_height(&self) -> f64 {
        (self.froude / self.thresholds().f_exist).powf(2.0 / 3.0)
    }
}

/// Roll-wave parameters with the sonic normalization H_s = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RollParams {
    pub froude: f64,
    pub h_minus: f64,
}

impl RollParams {
    pub fn new(froude: f64, h_minus: f64) -> Result<Self> {
        if !(froude > 2.0) {
            return Err(Error::Domain(format!(
                "roll waves require F > 2, got {froude}"
            )));
        }
        let h_hom = hom_height(froude)?;
        if !(h_minus > h_hom && h_minus < 1.0) {
            return Err(Error::Existence(format!(
                "H_- = {h_minus} outside existence window ({h_hom}, 1)"
            )));
        }
        Ok(RollParams { froude, h_minus })
    }

    /// Wave speed c = 1 + 1/F in the H_s = 1 scaling.
    pub fn speed(&self) -> f64 {
        1.0 + 1.0 / self.froude
    }

    /// Relative mass flux q = H (u - c) = -1/F.
    pub fn mass_flux(&self) -> f64 {
        -1.0 / self.froude
    }
}

/// Minimum height of the homoclinic (infinite-period) roll wave, H_s = 1
/// scaling: H_hom = 2/(2F + 1 - sqrt(4F + 1)).
pub fn hom_height(froude: f64) -> Result<f64> {
    if !(froude > 2.0) {
        return Err(Error::Domain(format!(
            "homoclinic height defined for F > 2, got {froude}"
        )));
    }
    Ok(2.0 / (2.0 * froude + 1.0 - (4.0 * froude + 1.0).sqrt()))
}

/// The three coefficient matrices of the linearized system in flux
/// coordinates, evaluated at (H, Q) with frame speed s; A0 is the identity.
#[derive(Debug, Clone, Copy)]
pub struct FluxMatrices {
    pub a1: Matrix3<f64>,
    pub a2: Matrix3<f64>,
    pub source: Matrix3<f64>,
}

pub fn flux_matrices(h: f64, q: f64, s: f64, froude: f64) -> Result<FluxMatrices> {
    if !(h > 0.0) {
        return Err(Error::Domain(format!("height must be positive, got {h}")));
    }
    let f2 = froude * froude;
    let a1 = Matrix3::new(
        -s, 1.0, 0.0,
        h / f2 - q * q / (h * h), 2.0 * q / h - s, 0.0,
        0.0, 0.0, q / h - s,
    );
    let a2 = Matrix3::new(
        0.0, 0.0, 1.0,
        0.0, 0.0, q / h,
        h / f2, 0.0, 0.0,
    );
    let source = Matrix3::new(
        0.0, 0.0, 0.0,
        2.0 * q * q / (h * h * h) + 1.0, -2.0 * q / (h * h), 0.0,
        0.0, 0.0, -q / (h * h),
    );
    Ok(FluxMatrices { a1, a2, source })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Vector2;

    #[test]
    fn threshold_closed_forms_nu2() {
        let t = thresholds(2.0).unwrap();
        assert!((t.f_char - 0.75).abs() < 1e-15);
        assert!((t.f_exist - 6.0).abs() < 1e-15);
        assert!((t.f_1d - 12.0f64.sqrt()).abs() < 1e-15);
        assert!((t.f_2d - 6.0 / 5.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn threshold_paper_value() {
        // F_2d(sqrt(10/7)) = 2.0590...
        let t = thresholds((10.0f64 / 7.0).sqrt()).unwrap();
        assert!((t.f_2d - 2.0590).abs() < 1e-3);
    }

    #[test]
    fn thresholds_ordered_on_grid() {
        for i in 1..=400 {
            let nu = 1.0 + 9.0 * i as f64 / 400.0;
            let t = thresholds(nu).unwrap();
            assert!(t.f_char < 2.0, "nu = {nu}");
            assert!(2.0 < t.f_2d, "nu = {nu}");
            assert!(t.f_2d < t.f_1d, "nu = {nu}");
            assert!(t.f_1d < t.f_exist, "nu = {nu}");
        }
    }

    #[test]
    fn thresholds_degenerate_limit() {
        let t = thresholds(1.0 + 1e-9).unwrap();
        for v in [t.f_char, t.f_exist, t.f_1d, t.f_2d] {
            assert!((v - 2.0).abs() < 1e-8);
        }
    }

    #[test]
    fn thresholds_reject_bad_nu() {
        assert!(thresholds(1.0).is_err());
        assert!(thresholds(0.5).is_err());
    }

    #[test]
    fn flux_matrices_rest_state() {
        let m = flux_matrices(1.0, 0.0, 0.0, 1.0).unwrap();
        let a1 = Matrix3::new(0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        assert!((m.a1 - a1).norm() < 1e-15);
        let e = Matrix3::new(0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        assert!((m.source - e).norm() < 1e-15);
    }

    #[test]
    fn flux_a2_third_row() {
        let m = flux_matrices(1.7, 0.4, 0.3, 2.2).unwrap();
        assert!((m.a2[(2, 0)] - 1.7 / (2.2 * 2.2)).abs() < 1e-15);
        assert!(m.a2[(2, 1)] == 0.0 && m.a2[(2, 2)] == 0.0);
    }

    #[test]
    fn flux_rejects_dry_state() {
        assert!(flux_matrices(0.0, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn hom_height_values() {
        assert!((hom_height(6.0).unwrap() - 0.25).abs() < 1e-15);
        assert!((hom_height(2.0 + 1e-12).unwrap() - 1.0).abs() < 1e-5);
        assert!(hom_height(2.0).is_err());
    }

    #[test]
    fn equilibrium_characteristic_speed() {
        // The slow root of det(lambda I + i k A1 - E) restricted to the 2x2
        // (h, q) block at an equilibrium (H, H^{3/2}), s = 0, satisfies
        // lambda(k) ~ -i k (3/2) sqrt(H) for small k.
        use num_complex::Complex64 as C64;
        for &h in &[0.49f64, 1.0, 2.25] {
            let q = h.powf(1.5);
            let m = flux_matrices(h, q, 0.0, 1.3).unwrap();
            let k = 1e-5;
            // 2x2 block quadratic: det(lambda I + ik A1 - E) = 0
            let a = Vector2::new(m.a1[(0, 0)], m.a1[(0, 1)]);
            let b = Vector2::new(m.a1[(1, 0)], m.a1[(1, 1)]);
            let e10 = m.source[(1, 0)];
            let e11 = m.source[(1, 1)];
            // lambda^2 + lambda(ik(a11+a22) - e11) + (ik)^2 det(A1_2x2)
            //   - ik(a11 e11 - a21 e10 ... ) expand directly:
            let ik = C64::new(0.0, k);
            let p2 = C64::new(1.0, 0.0);
            let p1 = ik * (a[0] + b[1]) - e11;
            let p0 =
                ik * ik * (a[0] * b[1] - a[1] * b[0]) - ik * a[0] * e11 + ik * a[1] * e10;
            // solve quadratic, take root nearest 0
            let disc = (p1 * p1 - 4.0 * p2 * p0).sqrt();
            let r1 = (-p1 + disc) / 2.0;
            let r2 = (-p1 - disc) / 2.0;
            let slow = if r1.norm() < r2.norm() { r1 } else { r2 };
            let speed = -(slow / ik).re;
            assert!(
                (speed - 1.5 * h.sqrt()).abs() < 1e-3,
                "H = {h}: speed {speed} vs {}",
                1.5 * h.sqrt()
            );
        }
    }

    #[test]
    fn scale_invariant_normalization() {
        let a = ShockParams::from_physical(1.7, 2.0, 0.5).unwrap();
        let b = ShockParams::from_physical(1.7, 4.0, 1.0).unwrap();
        assert_eq!(a, b);
    }
}
