//! Turning-point geometry in the high-frequency limit and the associated
//! stability index for hydraulic shocks; turning-point curve evaluation for
//! roll waves.

use crate::error::{Error, Result};
use crate::numerics::quad::{adaptive_simpson, gauss_legendre};
use crate::numerics::roots::bisect_newton;
use crate::profiles::{RollWaveProfile, ShockKind, ShockProfile};
use nalgebra::Vector3;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TurningFamily {
    /// acoustic-acoustic collision, lambda ~ i tau1 r (shocks)
    Tau1,
    /// entropic-acoustic collision, lambda ~ tau2 r real (shocks)
    Tau2,
    /// roll-wave analogues
    Tau3,
    Tau4,
    Tau5,
}

/// tau_1(H) = sqrt(H^3 - H_s^3)/(H F), monotone increasing.
pub fn tau1(h: f64, hs: f64, froude: f64) -> f64 {
    (h * h * h - hs * hs * hs).max(0.0).sqrt() / (h * froude)
}

/// tau_2(H) = 1/(F_exist H), monotone decreasing.
pub fn tau2(h: f64, f_exist: f64) -> f64 {
    1.0 / (f_exist * h)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TurningRange {
    pub family: TurningFamily,
    pub lo: f64,
    pub hi: f64,
}

/// Admissible turning-point frequency intervals of a shock profile.
pub fn shock_turning_ranges(profile: &ShockProfile) -> Vec<TurningRange> {
    let hs = profile.hs_singular;
    let froude = profile.params.froude;
    let fe = profile.params.thresholds().f_exist;
    match profile.kind {
        ShockKind::Smooth => {
            let hr = profile.params.h_right();
            vec![
                TurningRange {
                    family: TurningFamily::Tau1,
                    lo: tau1(hr, hs, froude),
                    hi: tau1(1.0, hs, froude),
                },
                TurningRange {
                    family: TurningFamily::Tau2,
                    lo: tau2(1.0, fe),
                    hi: tau2(hr, fe),
                },
            ]
        }
        _ => {
            let h_star = profile.h_star.unwrap_or(1.0);
            let (a, b) = (h_star.min(1.0), h_star.max(1.0));
            vec![
                TurningRange {
                    family: TurningFamily::Tau1,
                    lo: tau1(a, hs, froude),
                    hi: tau1(b, hs, froude),
                },
                TurningRange {
                    family: TurningFamily::Tau2,
                    lo: tau2(b, fe),
                    hi: tau2(a, fe),
                },
            ]
        }
    }
}

/// Admissible turning-point intervals of a roll wave (H_s = 1 scaling):
/// tau_3 on (x_s, X), tau_4 and tau_5 split by the sonic point.
pub fn roll_turning_ranges(wave: &RollWaveProfile) -> Vec<TurningRange> {
    let froude = wave.params.froude;
    let h_minus = wave.params.h_minus;
    let h_plus = wave.h_plus;
    let t3 = |h: f64| (h * h * h - 1.0).max(0.0).sqrt() / (h * froude);
    let t4 = |h: f64| (1.0 - h * h * h).max(0.0).sqrt() / (h * froude);
    let t5 = |h: f64| 1.0 / (h * froude);
    vec![
        TurningRange {
            family: TurningFamily::Tau3,
            lo: 0.0,
            hi: t3(h_plus),
        },
        TurningRange {
            family: TurningFamily::Tau4,
            lo: 0.0,
            hi: t4(h_minus),
        },
        TurningRange {
            family: TurningFamily::Tau5,
            lo: t5(h_plus),
            hi: 1.0 / froude,
        },
        TurningRange {
            family: TurningFamily::Tau5,
            lo: 1.0 / froude,
            hi: t5(h_minus),
        },
    ]
}

/// Whether a roll wave carries two distinct turning points for shared
/// tau in (1/F, tau_4(H_-)): holds iff 1 > H_-^3 + H_-^2.
pub fn roll_double_turning(wave: &RollWaveProfile) -> bool {
    let h = wave.params.h_minus;
    1.0 > h * h * h + h * h
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TurningPoint {
    pub h: f64,
    pub x: f64,
}

/// Height (and profile location) of the unique turning point of the given
/// family at slope tau, by monotone bisection of tau_family(H) = tau on the
/// smooth piece.
pub fn locate_turning(
    profile: &ShockProfile,
    family: TurningFamily,
    tau: f64,
) -> Result<TurningPoint> {
    let hs = profile.hs_singular;
    let froude = profile.params.froude;
    let fe = profile.params.thresholds().f_exist;
    let (h_lo, h_hi) = match profile.kind {
        ShockKind::Smooth => (profile.params.h_right(), 1.0),
        _ => {
            let h_star = profile.h_star.unwrap();
            (h_star.min(1.0), h_star.max(1.0))
        }
    };
    let f: Box<dyn Fn(f64) -> f64> = match family {
        TurningFamily::Tau1 => Box::new(move |h: f64| tau1(h, hs, froude) - tau),
        TurningFamily::Tau2 => Box::new(move |h: f64| tau2(h, fe) - tau),
        _ => {
            return Err(Error::Domain(
                "tau3/tau4/tau5 belong to roll waves".into(),
            ))
        }
    };
    let h = bisect_newton(&f, h_lo + 1e-13, h_hi - 1e-13, 1e-13)
        .ok_or_else(|| Error::RootFinding(format!("tau = {tau} outside admissible range")))?;
    // x by quadrature from the x = 0 anchor height
    let h_zero = profile.h_at_zero_minus();
    let x = adaptive_simpson(&|hh| 1.0 / profile.dh_dx(hh), h_zero, h, 1e-11);
    Ok(TurningPoint { h, x })
}

/// Columns of the diagonalizing matrix T at height H and slope tau1; the
/// square root sqrt(tau1^2 - tau1(H)^2) is complex beyond the turning point.
pub fn t_columns(profile: &ShockProfile, h: f64, tau: f64) -> [Vector3<C64>; 3] {
    let froude = profile.params.froude;
    let fe = profile.params.thresholds().f_exist;
    let hs = profile.hs_singular;
    let st = C64::new(tau * tau - tau1(h, hs, froude).powi(2), 0.0).sqrt();
    let t1 = Vector3::new(
        C64::new(fe * h, 0.0),
        C64::new(h + fe * h - 2.0, 0.0),
        C64::new(fe * h * tau, 0.0),
    );
    let col = |sign: f64| {
        let s = st * sign;
        Vector3::new(
            s * (froude * fe * h),
            s * (froude * (h + fe * h - 1.0)) + fe * h.powf(1.5) * tau,
            C64::new(h.sqrt(), 0.0),
        )
    };
    [t1, col(1.0), col(-1.0)]
}

/// Diagonal correction #2 of the two colliding acoustic modes; negative on
/// (x_1, 0) for decreasing discontinuous profiles.
pub fn pond2(profile: &ShockProfile, h: f64, tau: f64) -> f64 {
    let froude = profile.params.froude;
    let f2 = froude * froude;
    let fe = profile.params.thresholds().f_exist;
    let fe2 = fe * fe;
    let hs3 = profile.hs_singular.powi(3);
    let h3 = h * h * h;
    let st = (tau * tau - tau1(h, profile.hs_singular, froude).powi(2)).sqrt();
    let pre = -tau * (h + fe * h - 1.0)
        / (2.0 * froude * fe2 * fe * h.powi(2) * h.sqrt() * (h3 - hs3) * (fe2 * h * h * tau * tau + 1.0));
    let term_a = st * f2 * fe2 * h * h * (2.0 * fe2 * h3 - f2 * (fe + 1.0) * h + f2);
    let term_b = fe2 * h3 * (fe2 * h3 - f2 * (fe + 1.0) * h + 2.0 * f2) / st;
    pre * (term_a + term_b)
}

/// Jump vector [tau F0 + F2] across the subshock.
fn hf_jump(profile: &ShockProfile, tau: f64) -> Vector3<f64> {
    let h_r = profile.params.h_right();
    let h_star = profile.h_star.expect("discontinuous profile");
    let q_r = profile.momentum(h_r);
    let q_star = profile.momentum(h_star);
    let f2 = profile.params.froude * profile.params.froude;
    Vector3::new(
        tau * (h_r - h_star),
        tau * (q_r - q_star),
        (h_r * h_r - h_star * h_star) / (2.0 * f2),
    )
}

fn det3c(a: &Vector3<C64>, b: &Vector3<C64>, c: &Vector3<C64>) -> C64 {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
}

/// The two boundary determinants det([tau F0 + F2], T1, T2/T3) at 0-.
pub fn boundary_dets(profile: &ShockProfile, tau: f64) -> (C64, C64) {
    let h = profile.h_at_zero_minus();
    let t = t_columns(profile, h, tau);
    let j = hf_jump(profile, tau).map(|v| C64::new(v, 0.0));
    (det3c(&j, &t[0], &t[1]), det3c(&j, &t[0], &t[2]))
}

/// exp(int_{x_1}^0 2 #2 dy): the square-root singularity at the turning point
/// is removed by the substitution u^2 = H(x_1) - H(y).
pub fn pond2_integral(profile: &ShockProfile, tau: f64) -> Result<f64> {
    let tp = locate_turning(profile, TurningFamily::Tau1, tau)?;
    let h1 = tp.h;
    let h_star = profile.h_star.ok_or_else(|| {
        Error::Domain("index integral defined for discontinuous profiles".into())
    })?;
    // I = int_{H1}^{H*} #2(H)/H'(H) dH, u-substitution H = H1 - u^2
    let u_max = (h1 - h_star).sqrt();
    let integrand = |u: f64| {
        let h = h1 - u * u;
        let g = pond2(profile, h, tau) / profile.dh_dx(h);
        g * (-2.0 * u)
    };
    Ok(gauss_legendre(&integrand, 0.0, u_max, 64))
}

/// High-frequency index of a decreasing discontinuous profile at tau1.
pub fn hf_index(profile: &ShockProfile, tau: f64) -> Result<f64> {
    if profile.kind != ShockKind::DecreasingDiscontinuous {
        return Err(Error::Domain(
            "the tau1 index applies to decreasing discontinuous profiles".into(),
        ));
    }
    let (d12, d13) = boundary_dets(profile, tau);
    if d13.norm() == 0.0 {
        return Err(Error::Domain("reference determinant vanished".into()));
    }
    let integral = pond2_integral(profile, tau)?;
    Ok((2.0 * integral).exp() * (d12.norm() / d13.norm()))
}

/// Estimated location of the would-be unstable sequence when ind > 1 (the
/// machinery generalizes even though ind < 1 always holds for this system):
/// limiting real part ln(ind)/I and mode spacing 2 pi / J with
/// I = int 2 F H^{5/2} tau / ((H^3-H_s^3) sqrt(tau^2 - tau1(H)^2)) dy and
/// J = the same integral with the sqrt factor multiplied instead.
pub fn unstable_sequence_estimate(
    profile: &ShockProfile,
    tau: f64,
) -> Result<Option<(f64, f64)>> {
    let ind = hf_index(profile, tau)?;
    let tp = locate_turning(profile, TurningFamily::Tau1, tau)?;
    let h1 = tp.h;
    let h_star = profile.h_star.unwrap();
    let froude = profile.params.froude;
    let hs3 = profile.hs_singular.powi(3);
    let u_max = (h1 - h_star).sqrt();
    let weight = |h: f64| 2.0 * froude * h.powf(2.5) / (h * h * h - hs3);
    let i_int = gauss_legendre(
        &|u: f64| {
            let h = h1 - u * u;
            let st = (tau * tau - tau1(h, profile.hs_singular, froude).powi(2)).sqrt();
            weight(h) * tau / st / profile.dh_dx(h) * (-2.0 * u)
        },
        0.0,
        u_max,
        64,
    );
    let j_int = gauss_legendre(
        &|u: f64| {
            let h = h1 - u * u;
            let st = (tau * tau - tau1(h, profile.hs_singular, froude).powi(2)).sqrt();
            weight(h) * st / profile.dh_dx(h) * (-2.0 * u)
        },
        0.0,
        u_max,
        64,
    );
    if ind <= 1.0 {
        return Ok(None);
    }
    Ok(Some((ind.ln() / i_int, 2.0 * std::f64::consts::PI / j_int)))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HfVerdict {
    pub stable: bool,
    pub marginal: bool,
    pub max_index: Option<f64>,
    /// smallest |leading determinant| over the scan for the nonmonotone and
    /// smooth nonvanishing checks
    pub min_leading_det: Option<f64>,
    pub detail: String,
}

/// Aggregate high-frequency verdict over a tau1 grid (default 200 points,
/// refined toward the endpoints).
pub fn hf_verdict(profile: &ShockProfile, grid_points: usize) -> Result<HfVerdict> {
    let ranges = shock_turning_ranges(profile);
    let r1 = ranges
        .iter()
        .find(|r| r.family == TurningFamily::Tau1)
        .unwrap();
    let n = grid_points.max(8);
    // cosine-clustered grid resolves the delicate endpoint regimes
    let taus: Vec<f64> = (1..n)
        .map(|i| {
            let t = i as f64 / n as f64;
            let w = 0.5 - 0.5 * (std::f64::consts::PI * t).cos();
            r1.lo + (r1.hi - r1.lo) * w
        })
        .collect();
    match profile.kind {
        ShockKind::DecreasingDiscontinuous => {
            let mut max_index = f64::NEG_INFINITY;
            for &tau in &taus {
                let ind = hf_index(profile, tau)?;
                max_index = max_index.max(ind);
            }
            let marginal = (max_index - 1.0).abs() < 1e-6;
            Ok(HfVerdict {
                stable: max_index < 1.0,
                marginal,
                max_index: Some(max_index),
                min_leading_det: None,
                detail: format!("max ind(tau1) = {max_index:.6} over {} points", taus.len()),
            })
        }
        ShockKind::Nonmonotone => {
            let f2d = profile.params.thresholds().f_2d;
            if profile.params.froude >= f2d {
                return Err(Error::Domain(format!(
                    "nonmonotone high-frequency theorem requires F < F_2d = {f2d}"
                )));
            }
            let mut min_det = f64::INFINITY;
            for &tau in &taus {
                let (d12, _) = boundary_dets(profile, tau);
                min_det = min_det.min(d12.im.abs());
            }
            Ok(HfVerdict {
                stable: min_det > 0.0,
                marginal: min_det < 1e-10,
                max_index: None,
                min_leading_det: Some(min_det),
                detail: format!("min |Im det([tau F0+F2], T1, T2)| = {min_det:.3e}"),
            })
        }
        ShockKind::Smooth => {
            let mut min_det = f64::INFINITY;
            let h_mid = profile.h_at_zero_minus();
            for &tau in &taus {
                let t = t_columns(profile, h_mid, tau);
                let d = det3c(&t[1], &t[0], &t[2]).norm();
                min_det = min_det.min(d);
            }
            Ok(HfVerdict {
                stable: min_det > 0.0,
                marginal: min_det < 1e-10,
                max_index: None,
                min_leading_det: Some(min_det),
                detail: format!("min |det(T2, T1, T3)| = {min_det:.3e}"),
            })
        }
        ShockKind::Riemann => Ok(HfVerdict {
            stable: true,
            marginal: false,
            max_index: None,
            min_leading_det: None,
            detail: "pure subshock: nonvanishing Majda-Lopatinsky limit".into(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::essential::symbol_g_at;
    use crate::profiles::shock_profile;
    use nalgebra::Matrix3;

    #[test]
    fn tau_monotonicity_and_endpoint() {
        let p = shock_profile(2.05, (1.0f64 / 0.7).sqrt(), 64).unwrap();
        let hs = p.hs_singular;
        assert!(tau1(hs, hs, p.params.froude).abs() < 1e-12);
        let fe = p.params.thresholds().f_exist;
        let mut prev1 = 0.0;
        let mut prev2 = f64::INFINITY;
        for i in 1..50 {
            let h = hs + (1.0 - hs) * i as f64 / 50.0;
            let t1v = tau1(h, hs, p.params.froude);
            let t2v = tau2(h, fe);
            assert!(t1v > prev1, "tau1 must increase");
            assert!(t2v < prev2, "tau2 must decrease");
            prev1 = t1v;
            prev2 = t2v;
        }
    }

    #[test]
    fn turning_ranges_ordering() {
        let p = shock_profile(1.0, 2.0, 64).unwrap();
        let ranges = shock_turning_ranges(&p);
        let r1 = &ranges[0];
        assert!(r1.lo < r1.hi);
        // H_s < H_* < 1 for decreasing discontinuous
        let h_star = p.h_star.unwrap();
        assert!(p.hs_singular < h_star && h_star < 1.0);
    }

    #[test]
    fn t_columns_are_symbol_eigenvectors() {
        // T_j diagonalize the leading matrix -(tau1 A1^{-1} + A2 A1^{-1});
        // check M T_j parallel to T_j for the high-frequency symbol
        let p = shock_profile(1.0, 2.0, 64).unwrap();
        let ranges = shock_turning_ranges(&p);
        let tau = 0.5 * (ranges[0].lo + ranges[0].hi);
        let tp = locate_turning(&p, TurningFamily::Tau1, tau).unwrap();
        for &h in &[p.h_star.unwrap() + 1e-3, 0.5 * (tp.h + p.h_star.unwrap()), 0.98] {
            let m = crate::model::flux_matrices(h, p.momentum(h), p.s, p.params.froude).unwrap();
            let a1inv = m.a1.try_inverse().unwrap();
            // leading matrix of G at lambda = i tau r, eta = r, order r:
            // -(i tau A0 + i A2) A1^{-1}
            let lead = -(a1inv * tau + m.a2 * a1inv)
                .map(|v| C64::new(0.0, v));
            let cols = t_columns(&p, h, tau);
            for (j, t) in cols.iter().enumerate() {
                let mt = lead.map(|v| v) * t;
                // residual of parallelism: mt x t = 0
                let cx = mt[1] * t[2] - mt[2] * t[1];
                let cy = mt[2] * t[0] - mt[0] * t[2];
                let cz = mt[0] * t[1] - mt[1] * t[0];
                let cross = (cx.norm() + cy.norm() + cz.norm()) / (mt.norm() * t.norm());
                assert!(
                    cross < 1e-9,
                    "column {j} at H = {h} not an eigendirection (cross {cross:.2e})"
                );
            }
            let _ = symbol_g_at(h, p.momentum(h), p.s, p.params.froude, C64::new(0.0, 0.0), 0.0);
            let _: Matrix3<f64> = m.a2;
        }
    }

    #[test]
    fn printed_det_t1_t3_formula() {
        // (ELT1T3): positive closed form for decreasing discontinuous
        let p = shock_profile(1.0, 2.0, 64).unwrap();
        let ranges = shock_turning_ranges(&p);
        let tau = 0.5 * (ranges[0].lo + ranges[0].hi);
        let (_, d13) = boundary_dets(&p, tau);
        let froude = p.params.froude;
        let fe = p.params.thresholds().f_exist;
        let h_star = p.h_star.unwrap();
        let h_r = p.params.h_right();
        let st = (tau * tau - tau1(h_star, p.hs_singular, froude).powi(2)).sqrt();
        let expect = 0.5 / (froude * froude)
            * h_star.sqrt()
            * (h_star - h_r)
            * (froude * fe * h_star.sqrt() * (2.0 * froude * froude * tau * tau + h_r + h_star)
                * st
                + 2.0 * froude * froude * fe * fe * h_star * h_star * tau
                    * (tau * tau
                        + h_r * (2.0 * h_r - h_star)
                            / (h_star * h_star * (h_r.sqrt() + 1.0).powi(2))));
        assert!(
            (d13.re - expect).abs() < 1e-9 * expect.abs(),
            "det = {} vs printed {}",
            d13.re,
            expect
        );
        assert!(expect > 0.0);
    }

    #[test]
    fn index_below_one_and_det_ratio() {
        let p = shock_profile(1.0, 2.0, 64).unwrap();
        let ranges = shock_turning_ranges(&p);
        for i in 1..20 {
            let tau = ranges[0].lo + (ranges[0].hi - ranges[0].lo) * i as f64 / 20.0;
            let (d12, d13) = boundary_dets(&p, tau);
            assert!(d12.norm() / d13.norm() < 1.0, "det ratio >= 1 at tau = {tau}");
            let integral = pond2_integral(&p, tau).unwrap();
            assert!(integral < 0.0, "pond2 integral should be negative");
            let ind = hf_index(&p, tau).unwrap();
            assert!(ind < 1.0, "ind = {ind} at tau = {tau}");
            assert!(
                unstable_sequence_estimate(&p, tau).unwrap().is_none(),
                "no unstable sequence expected"
            );
        }
    }

    #[test]
    fn pond2_negative_between_turning_point_and_subshock() {
        // decreasing discontinuous wave: F inside (F_char, Riemann threshold)
        let p = shock_profile(1.8, (1.0f64 / 0.7).sqrt(), 64).unwrap();
        assert_eq!(p.kind, ShockKind::DecreasingDiscontinuous);
        let ranges = shock_turning_ranges(&p);
        let tau = 0.6 * ranges[0].lo + 0.4 * ranges[0].hi;
        let tp = locate_turning(&p, TurningFamily::Tau1, tau).unwrap();
        let h_star = p.h_star.unwrap();
        for i in 1..20 {
            let h = h_star + (tp.h - h_star) * (i as f64 / 20.0) * 0.98;
            assert!(pond2(&p, h, tau) < 0.0, "pond2 >= 0 at H = {h}");
        }
        // double eigenvalue at the turning point: gamma2 = gamma3 there
        assert!((tau1(tp.h, p.hs_singular, p.params.froude) - tau).abs() < 1e-10);
    }

    #[test]
    fn verdicts_three_kinds() {
        let dec = shock_profile(1.0, 2.0, 64).unwrap();
        let v = hf_verdict(&dec, 40).unwrap();
        assert!(v.stable && !v.marginal);
        let nonmon = shock_profile(2.04, (1.0f64 / 0.7f64).sqrt(), 64).unwrap();
        assert_eq!(nonmon.kind, ShockKind::Nonmonotone);
        let v = hf_verdict(&nonmon, 40).unwrap();
        assert!(v.stable);
        assert!(v.min_leading_det.unwrap() > 0.0);
        let smooth = shock_profile(0.5, 2.0, 64).unwrap();
        let v = hf_verdict(&smooth, 40).unwrap();
        assert!(v.stable);
    }

    #[test]
    fn roll_turning_ranges_structure() {
        let w = crate::profiles::roll_wave(6.0, 0.28, 64).unwrap();
        let ranges = roll_turning_ranges(&w);
        assert_eq!(ranges.len(), 4);
        for r in &ranges {
            assert!(r.lo < r.hi, "{:?}", r);
        }
        // 1 > H_-^3 + H_-^2 for H_- = 0.28: double turning points exist
        assert!(roll_double_turning(&w));
        let w2 = crate::profiles::roll_wave(3.0, 0.9, 64).unwrap();
        assert!(!roll_double_turning(&w2));
    }
}
