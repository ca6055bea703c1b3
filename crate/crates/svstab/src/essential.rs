//! Endstate Fourier-symbol analysis: dispersion relations of the limiting
//! constant states, exponential-weight stabilizability windows, optimal
//! weights, and the eigenvalue-collision (absolute instability) curve.

use crate::error::{Error, Result};
use crate::model::{flux_matrices, thresholds, ShockParams};
use crate::numerics::eig::{char_poly, eigenvalues};
use crate::numerics::roots::{bisect_newton, newton_complex, poly_roots};
use nalgebra::Matrix3;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    MinusInfinity,
    PlusInfinity,
}

/// Endstate (H, Q) in the H_L = 1 normalization.
pub fn endstate(params: &ShockParams, side: Side) -> (f64, f64) {
    let h = match side {
        Side::MinusInfinity => 1.0,
        Side::PlusInfinity => params.h_right(),
    };
    (h, params.speed() * h + params.mass_flux())
}

/// Symbol matrix G(+-infinity; lambda, eta) = (E - lambda I - i eta A2) A1^{-1}.
pub fn symbol_g(params: &ShockParams, side: Side, lambda: C64, eta: f64) -> Matrix3<C64> {
    let (h, q) = endstate(params, side);
    symbol_g_at(h, q, params.speed(), params.froude, lambda, eta)
}

/// G at an arbitrary profile point (used along profiles as well).
pub fn symbol_g_at(h: f64, q: f64, s: f64, froude: f64, lambda: C64, eta: f64) -> Matrix3<C64> {
    let m = flux_matrices(h, q, s, froude).expect("h > 0 along profiles");
    let a1c = m.a1.map(|v| C64::new(v, 0.0));
    let a1inv = a1c.try_inverse().expect("profiles are non-characteristic");
    let mut num = m.source.map(|v| C64::new(v, 0.0));
    for i in 0..3 {
        num[(i, i)] -= lambda;
    }
    let ieta = C64::new(0.0, eta);
    for i in 0..3 {
        for j in 0..3 {
            num[(i, j)] -= ieta * m.a2[(i, j)];
        }
    }
    num * a1inv
}

/// The three roots in lambda of det(G(side; ., eta) - (ik + mu) I) = 0,
/// equivalently the eigenvalues of E - i eta A2 - (ik + mu) A1, sorted by
/// descending real part.
pub fn dispersion_roots(
    params: &ShockParams,
    side: Side,
    k: f64,
    eta: f64,
    mu: f64,
) -> [C64; 3] {
    let (h, q) = endstate(params, side);
    let m = flux_matrices(h, q, params.speed(), params.froude).expect("valid endstate");
    let shift = C64::new(mu, k);
    let mat = Matrix3::from_fn(|i, j| {
        C64::new(m.source[(i, j)], -eta * m.a2[(i, j)]) - shift * m.a1[(i, j)]
    });
    eigenvalues(&mat)
}

/// inf / sup over real k of Re sqrt(-a k^2 + i k + c) for a, c > 0.
pub fn sup_re_sqrt_parabola(a: f64, c: f64) -> Result<(f64, f64)> {
    if !(a > 0.0 && c > 0.0) {
        return Err(Error::Domain("parabola lemma needs a, c > 0".into()));
    }
    let at_zero = c.sqrt();
    let at_inf = 1.0 / (2.0 * a.sqrt());
    let b = 4.0 * a * c;
    let inf = if b <= 1.0 { at_zero } else { at_inf };
    let sup = if b < 1.0 { at_inf } else { at_zero };
    Ok((inf, sup))
}

/// Range of mu_L weights stabilizing the minus-side dispersion relations in
/// the high-frequency limit; None when F <= 2 (no weighting needed), Empty
/// when F >= F_2d (no weight works).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum WeightWindow {
    NotNeeded,
    Window { lo: f64, hi: f64 },
    Empty,
}

pub fn weight_window(froude: f64, nu: f64) -> Result<WeightWindow> {
    let t = thresholds(nu)?;
    if !(froude < t.f_exist) {
        return Err(Error::Existence(format!(
            "F = {froude} >= F_exist = {}",
            t.f_exist
        )));
    }
    if froude <= 2.0 {
        return Ok(WeightWindow::NotNeeded);
    }
    if froude >= t.f_2d {
        return Ok(WeightWindow::Empty);
    }
    let mid = froude * froude / 2.0 - froude * froude / t.f_exist;
    let half = froude / t.f_2d * (t.f_2d * t.f_2d - froude * froude).sqrt();
    Ok(WeightWindow::Window {
        lo: mid - half,
        hi: mid + half,
    })
}

/// Optimal weight (window midpoint) with the certified leading-order margins
/// of the three weighted dispersion branches in the high-frequency limit.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct OptimalWeight {
    pub mu: f64,
    /// certified bound for the two acoustic branches, (F^2 - F_2d^2)/(2 F_2d^2)
    pub acoustic_margin: f64,
    /// certified bound for the entropic branch
    pub entropic_margin: f64,
}

pub fn optimal_weight(froude: f64, nu: f64) -> Result<OptimalWeight> {
    let t = thresholds(nu)?;
    if !(froude > 2.0 && froude < t.f_2d) {
        return Err(Error::Domain(format!(
            "optimal weight defined for 2 < F < F_2d, got F = {froude}"
        )));
    }
    let mu = froude * froude / 2.0 - froude * froude / t.f_exist;
    let acoustic = (froude * froude - t.f_2d * t.f_2d) / (2.0 * t.f_2d * t.f_2d);
    let entropic = froude * froude * (t.f_exist - 2.0) / (2.0 * t.f_exist * t.f_exist) - 1.0;
    Ok(OptimalWeight {
        mu,
        acoustic_margin: acoustic,
        entropic_margin: entropic,
    })
}

/// Leading real parts of the three mu_L-weighted minus-side dispersion
/// branches in the k^2 + eta^2 -> infinity limit, as functions of the
/// direction angle theta.
pub fn asymptotic_real_parts(froude: f64, nu: f64, mu: f64, theta: f64) -> [f64; 3] {
    let fe = thresholds(nu).expect("validated").f_exist;
    let ct = theta.cos();
    let st = theta.sin();
    let r1 = (ct * fe + froude) / (froude * fe) * mu - 0.5 * ct * ct - 0.5 * froude * ct - 0.5;
    let r2 = -(ct * fe + froude) / (froude * fe) * mu - 0.5 * ct * ct + 0.5 * froude * ct - 0.5;
    let r3 = mu / fe - st * st - 1.0;
    [r1, r2, r3]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundedCheck {
    pub stable: bool,
    pub max_re: f64,
    pub argmax: (f64, f64),
    /// max of the asymptotic leading real parts over the direction circle
    pub asymptotic_max: f64,
}

/// Scan the mu_L-weighted minus-side dispersion relations over a bounded
/// (k, eta) grid plus the asymptotic regime. `kmax` and `step` default to the
/// 50 / 0.1 protocol when passed as 0.
pub fn bounded_freq_weight_check(
    froude: f64,
    nu: f64,
    mu: f64,
    kmax: f64,
    step: f64,
) -> Result<BoundedCheck> {
    let params = ShockParams::new(froude, nu)?;
    let kmax = if kmax > 0.0 { kmax } else { 50.0 };
    let step = if step > 0.0 { step } else { 0.1 };
    let n = (kmax / step).round() as i64;
    // conjugate symmetry (k, eta) -> (-k, -eta): scan k >= 0 only
    let rows: Vec<(f64, f64, f64)> = (0..=n)
        .into_par_iter()
        .map(|ik| {
            let k = ik as f64 * step;
            let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
            let mut ie = -n;
            while ie <= n {
                let eta = ie as f64 * step;
                // the zero frequency is a genuine neutral mode at mu = 0;
                // classify stability away from the exact origin
                if !(k == 0.0 && eta == 0.0 && mu == 0.0) {
                    let roots = dispersion_roots(&params, Side::MinusInfinity, k, eta, mu);
                    if roots[0].re > best.0 {
                        best = (roots[0].re, k, eta);
                    }
                }
                ie += 1;
            }
            best
        })
        .collect();
    let mut max_re = f64::NEG_INFINITY;
    let mut argmax = (0.0, 0.0);
    for (v, k, e) in rows {
        if v > max_re {
            max_re = v;
            argmax = (k, e);
        }
    }
    let mut asym: f64 = f64::NEG_INFINITY;
    for i in 0..2000 {
        let th = 2.0 * std::f64::consts::PI * i as f64 / 2000.0;
        for v in asymptotic_real_parts(froude, nu, mu, th) {
            asym = asym.max(v);
        }
    }
    Ok(BoundedCheck {
        stable: max_re <= 1e-10 && asym <= 1e-10,
        max_re,
        argmax,
        asymptotic_max: asym,
    })
}

/// Cubic p(gamma; lambda, eta) = det(E - lambda I - i eta A2 - gamma A1) at
/// the minus endstate, coefficients [c0, c1, c2, c3] in powers of gamma.
pub fn collision_cubic(froude: f64, nu: f64, lambda: C64, eta: f64) -> [C64; 4] {
    let fe = thresholds(nu).expect("validated").f_exist;
    let f2 = froude * froude;
    let eta2 = eta * eta;
    let c3 = C64::new(-(fe * fe - f2) / (f2 * fe * fe * fe), 0.0);
    let c2 = ((lambda + 1.0) * (fe * fe - 3.0 * f2) + f2 * fe) / (f2 * fe * fe);
    let c1 = (-f2 * (-3.0 * lambda * lambda + (fe - 6.0) * lambda + fe - 2.0) + eta2)
        / (f2 * fe);
    let c0 = -(lambda + 2.0) * (f2 * lambda * lambda + f2 * lambda + eta2) / f2;
    [c0, c1, c2, c3]
}

/// The candidate double root gamma_*(lambda; eta) from the linear remainder of
/// the resultant of p and p_gamma. Returns None at degenerate (triple-root)
/// denominators.
pub fn collision_gamma_star(froude: f64, nu: f64, lambda: C64, eta: f64) -> Option<C64> {
    let fe = thresholds(nu).ok()?.f_exist;
    let f1d2 = 2.0 * nu * (nu + 1.0);
    let f2 = froude * froude;
    let f4 = f2 * f2;
    let eta2 = eta * eta;
    let top = fe
        * (6.0 * f2 * fe * fe * lambda.powu(3)
            + f2 * fe * (-6.0 * f2 + fe * fe + 18.0 * fe) * lambda.powu(2)
            + ((-6.0 * f2 + 8.0 * fe * fe) * eta2
                + f4 * (fe * fe - 12.0 * fe + 6.0)
                + 2.0 * f2 * fe * fe * (fe + 5.0))
                * lambda
            + eta2 * (-f2 * (fe + 15.0) + 17.0 * fe * fe)
            + f2 * (fe - 2.0) * (f2 * (fe - 3.0) + fe * fe));
    let bot = 2.0 * fe * fe * (3.0 * f2 + fe * fe) * lambda.powu(2)
        + 6.0 * fe * (f1d2 - f2) * (f2 + fe * fe / 3.0) * lambda
        + 6.0 * eta2 * (fe * fe - f2)
        + f4 * (2.0 * fe * fe - 6.0 * fe + 6.0)
        - 2.0 * f2 * fe * fe * fe
        + 2.0 * fe * fe * fe * fe;
    if bot.norm() < 1e-12 * top.norm().max(1.0) {
        return None;
    }
    Some(top / bot)
}

/// Defect whose zero in lambda marks a double eigenvalue:
/// p_gamma(gamma_*(lambda; eta); lambda, eta).
pub fn collision_defect(froude: f64, nu: f64, lambda: C64, eta: f64) -> C64 {
    let c = collision_cubic(froude, nu, lambda, eta);
    match collision_gamma_star(froude, nu, lambda, eta) {
        Some(g) => c[1] + 2.0 * c[2] * g + 3.0 * c[3] * g * g,
        None => C64::new(f64::NAN, f64::NAN),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CollisionSample {
    pub eta: f64,
    pub lambda_re: f64,
    pub lambda_im: f64,
    /// true when the double eigenvalue has smaller real part than the third
    pub double_below_third: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CollisionCurve {
    pub samples: Vec<CollisionSample>,
    /// (tau_*, eta) where the curve crosses the imaginary axis, if found
    pub imaginary_intercept: Option<(f64, f64)>,
}

/// Asymptotic location of the collision near F_2d^+:
/// eta ~ a_{-1}/eps, tau ~ b_{-1}/eps with eps = sqrt(F - F_2d).
pub fn collision_seed(froude: f64, nu: f64) -> Option<(f64, f64)> {
    let t = thresholds(nu).ok()?;
    if froude <= t.f_2d {
        return None;
    }
    let fe = t.f_exist;
    let b2d = fe.powi(7) * (fe - 2.0).powi(2) / (4.0 * (fe - 1.0).powi(6));
    let eps = (froude - t.f_2d).sqrt();
    let a_m1 = (b2d / (2.0 * t.f_2d)).sqrt();
    let b_m1 = (fe - 2.0).sqrt() / fe * a_m1;
    Some((a_m1 / eps, b_m1 / eps))
}

/// Limiting diagonal of the collision analysis at F = F_2d:
/// (Lambda_11 = Lambda_22, Lambda_33).
pub fn collision_limit_diagonal(nu: f64) -> Result<(f64, f64)> {
    let t = thresholds(nu)?;
    let fe = t.f_exist;
    let f1d2 = t.f_1d * t.f_1d;
    Ok((
        (fe * fe - f1d2) / (2.0 * (fe - 1.0)),
        fe * fe / (fe - 1.0),
    ))
}

/// Trace the eta -> lambda(eta) curve of gamma_1 = gamma_2 collisions of the
/// minus-side symbol, over eta in [eta_min, eta_max] with n samples.
pub fn collision_curve(
    froude: f64,
    h_right: f64,
    eta_min: f64,
    eta_max: f64,
    n: usize,
) -> Result<CollisionCurve> {
    let nu = (1.0 / h_right).sqrt();
    let t = thresholds(nu)?;
    let (eta_seed, tau_seed) = collision_seed(froude, nu).ok_or_else(|| {
        Error::Domain(format!(
            "collision curve requires F > F_2d = {}, got {froude}",
            t.f_2d
        ))
    })?;
    let f = |lambda: C64, eta: f64| collision_defect(froude, nu, lambda, eta);
    let seed_eta = eta_seed.clamp(eta_min.max(1e-3), eta_max);
    let (mut lam, _) = newton_complex(
        &|z| f(z, seed_eta),
        C64::new(0.0, tau_seed),
        1e-11,
        100,
    )
    .ok_or_else(|| Error::RootFinding("collision seed Newton failed".into()))?;
    // continuation over the eta grid, outward from the seed in both directions
    let grid: Vec<f64> = (0..n)
        .map(|i| eta_min + (eta_max - eta_min) * i as f64 / (n - 1).max(1) as f64)
        .collect();
    let seed_idx = grid
        .iter()
        .enumerate()
        .min_by(|a, b| {
            (a.1 - seed_eta)
                .abs()
                .partial_cmp(&(b.1 - seed_eta).abs())
                .unwrap()
        })
        .map(|(i, _)| i)
        .unwrap();
    let mut samples = vec![None; grid.len()];
    let march = |samples: &mut Vec<Option<CollisionSample>>, range: Vec<usize>, mut lam0: C64| {
        for idx in range {
            let eta = grid[idx];
            match newton_complex(&|z| f(z, eta), lam0, 1e-10, 80) {
                Some((root, _)) => {
                    lam0 = root;
                    let cubic = collision_cubic(froude, nu, root, eta);
                    let roots = poly_roots(&cubic);
                    let below = double_below_third(&roots);
                    samples[idx] = Some(CollisionSample {
                        eta,
                        lambda_re: root.re,
                        lambda_im: root.im,
                        double_below_third: below,
                    });
                }
                None => break,
            }
        }
    };
    march(&mut samples, (seed_idx..grid.len()).collect(), lam);
    // loosely re-seed for the downward sweep
    if let Some(s) = samples[seed_idx].as_ref() {
        lam = C64::new(s.lambda_re, s.lambda_im);
    }
    march(&mut samples, (0..seed_idx).rev().collect(), lam);
    let samples: Vec<CollisionSample> = samples.into_iter().flatten().collect();
    if samples.is_empty() {
        return Err(Error::ContinuationStalled(
            "no collision curve points converged".into(),
        ));
    }
    // imaginary-axis intercept: sign change of Re lambda along the curve
    let mut intercept = None;
    for w in samples.windows(2) {
        if w[0].lambda_re.signum() != w[1].lambda_re.signum() {
            let (ea, eb) = (w[0].eta, w[1].eta);
            let mut lam0 = C64::new(w[0].lambda_re, w[0].lambda_im);
            let re_at = |eta: f64, lam_start: C64| -> Option<(f64, C64)> {
                newton_complex(&|z| f(z, eta), lam_start, 1e-10, 60)
                    .map(|(r, _)| (r.re, r))
            };
            if let Some(eta_c) = bisect_newton(
                &|eta| re_at(eta, lam0).map(|v| v.0).unwrap_or(f64::NAN),
                ea,
                eb,
                1e-10,
            ) {
                if let Some((_, root)) = re_at(eta_c, lam0) {
                    lam0 = root;
                    intercept = Some((lam0.im.abs(), eta_c));
                }
            }
            break;
        }
    }
    Ok(CollisionCurve {
        samples,
        imaginary_intercept: intercept,
    })
}

fn double_below_third(roots: &[C64]) -> bool {
    if roots.len() != 3 {
        return false;
    }
    // identify the pair with smallest separation as the (near-)double root
    let d01 = (roots[0] - roots[1]).norm();
    let d02 = (roots[0] - roots[2]).norm();
    let d12 = (roots[1] - roots[2]).norm();
    let (pair, third) = if d01 <= d02 && d01 <= d12 {
        ((roots[0], roots[1]), roots[2])
    } else if d02 <= d12 {
        ((roots[0], roots[2]), roots[1])
    } else {
        ((roots[1], roots[2]), roots[0])
    };
    0.5 * (pair.0.re + pair.1.re) < third.re
}

/// Reference check that the printed collision cubic agrees with the direct
/// determinant det(E - lambda I - i eta A2 - gamma A1).
pub fn collision_cubic_residual(froude: f64, nu: f64, lambda: C64, eta: f64, gamma: C64) -> f64 {
    let params = ShockParams::new(froude, nu).expect("valid");
    let (h, q) = endstate(&params, Side::MinusInfinity);
    let m = flux_matrices(h, q, params.speed(), froude).expect("valid");
    let mat = Matrix3::from_fn(|i, j| {
        C64::new(m.source[(i, j)], -eta * m.a2[(i, j)])
            - gamma * m.a1[(i, j)]
            - if i == j { lambda } else { C64::new(0.0, 0.0) }
    });
    let det = char_poly(&mat)[0]; // det(M - 0 I)
    let c = collision_cubic(froude, nu, lambda, eta);
    let p = c[0] + c[1] * gamma + c[2] * gamma * gamma + c[3] * gamma * gamma * gamma;
    (det - p).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plus_side_cubic_f1_nu2() {
        // det(G(+inf; lambda, +-1)) = (54/7)(lambda^3 + 6 lambda^2 + 33/4 lambda + 1)
        let params = ShockParams::new(1.0, 2.0).unwrap();
        for eta in [1.0, -1.0] {
            let roots = dispersion_roots(&params, Side::PlusInfinity, 0.0, eta, 0.0);
            let target = poly_roots(&[
                C64::new(1.0, 0.0),
                C64::new(33.0 / 4.0, 0.0),
                C64::new(6.0, 0.0),
                C64::new(1.0, 0.0),
            ]);
            for r in roots.iter() {
                let best = target.iter().map(|t| (r - t).norm()).fold(f64::MAX, f64::min);
                assert!(best < 1e-9, "root {r} missing from target cubic");
                assert!(r.re < 0.0);
            }
        }
    }

    #[test]
    fn plus_side_entropic_branch() {
        // lambda_3,+(k; 0) = -nu + i k nu/(nu + 1)
        let params = ShockParams::new(1.3, 2.0).unwrap();
        for &k in &[0.0, 0.7, -2.2] {
            let roots = dispersion_roots(&params, Side::PlusInfinity, k, 0.0, 0.0);
            let target = C64::new(-2.0, k * 2.0 / 3.0);
            let best = roots.iter().map(|r| (r - target).norm()).fold(f64::MAX, f64::min);
            assert!(best < 1e-9, "k = {k}: entropic branch off by {best}");
        }
    }

    #[test]
    fn minus_side_sup_is_f_over_2_minus_1() {
        // sup_k Re lambda_1,-(k; 0) = F/2 - 1 for F > 2
        let params = ShockParams::new(2.5, 2.0).unwrap();
        let mut sup = f64::NEG_INFINITY;
        for i in 0..4000 {
            let k = i as f64 * 0.25;
            let r = dispersion_roots(&params, Side::MinusInfinity, k, 0.0, 0.0);
            sup = sup.max(r[0].re);
        }
        assert!((sup - 0.25).abs() < 1e-4, "sup = {sup}");
    }

    #[test]
    fn conjugate_symmetry() {
        let params = ShockParams::new(1.7, 1.8).unwrap();
        let a = dispersion_roots(&params, Side::MinusInfinity, 0.9, 1.3, 0.2);
        let b = dispersion_roots(&params, Side::MinusInfinity, -0.9, -1.3, 0.2);
        for (x, y) in a.iter().zip(b.iter()) {
            assert!((x - y.conj()).norm() < 1e-9);
        }
    }

    #[test]
    fn parabola_lemma_cases() {
        let (inf, sup) = sup_re_sqrt_parabola(0.25, 1.0).unwrap(); // 4ac = 1
        assert!((inf - 1.0).abs() < 1e-15 && (sup - 1.0).abs() < 1e-15);
        let (inf, sup) = sup_re_sqrt_parabola(1.0, 1.0).unwrap(); // 4ac > 1
        assert!((sup - 1.0).abs() < 1e-15 && (inf - 0.5).abs() < 1e-15);
        let (inf, sup) = sup_re_sqrt_parabola(1.0 / 16.0, 1.0).unwrap(); // 4ac < 1
        assert!((sup - 2.0).abs() < 1e-15 && (inf - 1.0).abs() < 1e-15);
        // numeric oracle for the last case
        let mut scan_sup = f64::NEG_INFINITY;
        let mut scan_inf = f64::INFINITY;
        for i in -30000..=30000 {
            let k = i as f64 * 0.01;
            let z = C64::new(-k * k / 16.0 + 1.0, k);
            scan_sup = scan_sup.max(z.sqrt().re);
            scan_inf = scan_inf.min(z.sqrt().re);
        }
        assert!((scan_sup - 2.0).abs() < 1e-3);
        assert!((scan_inf - 1.0).abs() < 1e-6);
        assert!(sup_re_sqrt_parabola(-1.0, 1.0).is_err());
    }

    #[test]
    fn weight_window_values() {
        // F = 2.5, nu = 2: midpoint 6.25/3, half width (2.5/F_2d) sqrt(F_2d^2 - 6.25)
        let w = weight_window(2.5, 2.0).unwrap();
        let f2d = 6.0 / 5.0f64.sqrt();
        let mid = 6.25 / 2.0 - 6.25 / 6.0;
        let half = 2.5 / f2d * (f2d * f2d - 6.25).sqrt();
        match w {
            WeightWindow::Window { lo, hi } => {
                assert!((lo - (mid - half)).abs() < 1e-10);
                assert!((hi - (mid + half)).abs() < 1e-10);
                assert!(lo > 0.0 && hi < 6.0);
            }
            _ => panic!("expected window"),
        }
        assert_eq!(weight_window(3.0, 2.0).unwrap(), WeightWindow::Empty);
        assert_eq!(weight_window(1.5, 2.0).unwrap(), WeightWindow::NotNeeded);
    }

    #[test]
    fn optimal_weight_is_midpoint_with_negative_margins() {
        let w = optimal_weight(2.2, 2.0).unwrap();
        match weight_window(2.2, 2.0).unwrap() {
            WeightWindow::Window { lo, hi } => {
                assert!((w.mu - 0.5 * (lo + hi)).abs() < 1e-12);
            }
            _ => panic!("expected window"),
        }
        assert!(w.acoustic_margin < 0.0 && w.entropic_margin < 0.0);
        // margins certify the theta-scan
        for i in 0..10000 {
            let th = 2.0 * std::f64::consts::PI * i as f64 / 10000.0;
            let r = asymptotic_real_parts(2.2, 2.0, w.mu, th);
            assert!(r[0] <= w.acoustic_margin + 1e-12);
            assert!(r[1] <= w.acoustic_margin + 1e-12);
            assert!(r[2] <= w.entropic_margin + 1e-12);
        }
        // margin closes as F -> F_2d
        let t = thresholds(2.0).unwrap();
        let w2 = optimal_weight(t.f_2d - 1e-6, 2.0).unwrap();
        assert!(w2.acoustic_margin.abs() < 1e-5);
    }

    #[test]
    fn collision_cubic_matches_determinant() {
        for &(f, nu) in &[(2.5f64, 2.0f64), (2.06, (10.0f64 / 7.0).sqrt()), (3.0, 2.0)] {
            for &(lr, li, eta, gr, gi) in
                &[(0.3, 1.2, 0.8, 0.1, -0.5), (-0.2, 2.0, 3.0, 1.0, 0.7)]
            {
                let r = collision_cubic_residual(
                    f,
                    nu,
                    C64::new(lr, li),
                    eta,
                    C64::new(gr, gi),
                );
                assert!(r < 1e-10, "residual {r} for F = {f}, nu = {nu}");
            }
        }
    }

    #[test]
    fn collision_limit_diagonal_nu2() {
        let (l11, l33) = collision_limit_diagonal(2.0).unwrap();
        assert!((l11 - 2.4).abs() < 1e-14);
        assert!((l33 - 7.2).abs() < 1e-14);
        // difference always negative
        for i in 1..60 {
            let nu = 1.0 + 0.15 * i as f64;
            let (a, b) = collision_limit_diagonal(nu).unwrap();
            assert!(a - b < 0.0);
        }
    }

    #[test]
    fn collision_curve_near_f2d_has_large_intercept() {
        // H_R = 0.7, F = 2.06 slightly above F_2d = 2.0590...
        let curve = collision_curve(2.06, 0.7, 1.0, 80.0, 240).unwrap();
        assert!(!curve.samples.is_empty());
        let (tau, eta) = curve.imaginary_intercept.expect("intercept expected");
        assert!(eta > 15.0, "intercept eta = {eta} should be large near F_2d");
        assert!(tau > 5.0, "intercept tau = {tau} should be large near F_2d");
        // along the curve the double eigenvalue lies below the third
        let below = curve.samples.iter().filter(|s| s.double_below_third).count();
        assert!(below * 10 >= curve.samples.len() * 9);
    }

    #[test]
    fn eta_reflection_symmetry_of_defect() {
        let f = 2.25;
        let nu = (1.0f64 / 0.7).sqrt();
        let lam = C64::new(0.1, 0.9);
        let a = collision_defect(f, nu, lam, 2.0);
        let b = collision_defect(f, nu, lam, -2.0);
        assert!((a - b).norm() < 1e-12 * a.norm().max(1.0));
    }
}
