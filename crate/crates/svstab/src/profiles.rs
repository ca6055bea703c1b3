//! Profile construction: hydraulic shocks (smooth, decreasing discontinuous,
//! nonmonotone, Riemann) and Dressler roll waves. Profiles are stored
//! H-parametrized; x is recovered by quadrature of 1/H'(H).

use crate::error::{Error, Result};
use crate::model::{RollParams, ShockParams};
use crate::numerics::quad::adaptive_simpson;
use crate::numerics::roots::bisect_newton;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShockKind {
    Smooth,
    DecreasingDiscontinuous,
    Nonmonotone,
    Riemann,
}

/// Threshold curve above which discontinuous profiles become nonmonotone.
pub fn nonmonotone_threshold(nu: f64) -> f64 {
    (nu + 1.0) * (2.0 * (nu * nu + 1.0)).sqrt() / (2.0 * nu)
}

/// Classify the hydraulic shock type of (F, nu).
pub fn classify_shock(froude: f64, nu: f64) -> Result<ShockKind> {
    let params = ShockParams::new(froude, nu)?;
    let t = params.thresholds();
    let riemann = nonmonotone_threshold(nu);
    if (froude - riemann).abs() <= 1e-12 * riemann {
        return Ok(ShockKind::Riemann);
    }
    if froude < t.f_char {
        Ok(ShockKind::Smooth)
    } else if froude > riemann {
        Ok(ShockKind::Nonmonotone)
    } else {
        Ok(ShockKind::DecreasingDiscontinuous)
    }
}

/// A sampled hydraulic shock profile normalized to H_L = 1.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShockProfile {
    pub params: ShockParams,
    pub kind: ShockKind,
    /// wave speed
    pub s: f64,
    /// relative mass flux q = H(u - s)
    pub q: f64,
    /// subshock left state (None for smooth profiles)
    pub h_star: Option<f64>,
    /// sonic value of the profile ODE
    pub hs_singular: f64,
    /// (x, H) samples of the smooth piece, ordered by increasing x
    pub samples: Vec<(f64, f64)>,
}

impl ShockProfile {
    /// dH/dx along the smooth piece.
    pub fn dh_dx(&self, h: f64) -> f64 {
        shock_rhs(h, self.s, self.q, self.params.froude, self.hs_singular)
    }

    /// Momentum Q = sH + q along the profile.
    pub fn momentum(&self, h: f64) -> f64 {
        self.s * h + self.q
    }

    /// Height at the left of the subshock (H_L = 1 for smooth profiles).
    pub fn h_at_zero_minus(&self) -> f64 {
        self.h_star.unwrap_or((1.0 + self.params.h_right()) / 2.0)
    }
}

fn shock_rhs(h: f64, s: f64, q: f64, froude: f64, hs: f64) -> f64 {
    let num = h * h * h - (s * h + q).powi(2);
    let den = h * h * h - hs * hs * hs;
    froude * froude * num / den
}

/// Left state H_* of the subshock: positive root of
/// (sqrt(H_R)+1)^2 H^2 + H_R (sqrt(H_R)+1)^2 H - 2 F^2 H_R = 0.
pub fn subshock_height(froude: f64, h_right: f64) -> f64 {
    let a = (h_right.sqrt() + 1.0).powi(2);
    let b = h_right * a;
    let c = -2.0 * froude * froude * h_right;
    (-b + (b * b - 4.0 * a * c).sqrt()) / (2.0 * a)
}

/// Construct a hydraulic shock profile with `resolution` samples of the
/// smooth piece.
pub fn shock_profile(froude: f64, nu: f64, resolution: usize) -> Result<ShockProfile> {
    let params = ShockParams::new(froude, nu)?;
    let kind = classify_shock(froude, nu)?;
    let t = params.thresholds();
    let h_right = params.h_right();
    let hs = params.sonic_height();
    if (froude - t.f_char).abs() < 1e-8 * t.f_char {
        return Err(Error::Domain(format!(
            "characteristic degeneracy: F = {froude} at F_char = {}, sonic point meets the endstate",
            t.f_char
        )));
    }
    let s = params.speed();
    let q = params.mass_flux();
    let n = resolution.max(16);
    // endstates are reached only as x -> -/+ infinity; clip the H-range
    let eps = 2e-3;
    let profile = |h_from: f64, h_to: f64| -> Vec<(f64, f64)> {
        // H-grid from the x = 0 side back toward the -infinity endstate,
        // x measured by quadrature of dx = dH / H'(H)
        let mut pts = Vec::with_capacity(n);
        let mut x = 0.0;
        let mut h_prev = h_to;
        pts.push((0.0, h_to));
        for i in 1..n {
            let ht = h_to + (h_from - h_to) * i as f64 / (n - 1) as f64;
            let seg = adaptive_simpson(
                &|h| 1.0 / shock_rhs(h, s, q, froude, hs),
                h_prev,
                ht,
                1e-12,
            );
            x += seg;
            pts.push((x, ht));
            h_prev = ht;
        }
        pts.reverse();
        pts
    };
    match kind {
        ShockKind::Smooth => {
            let h_lo = h_right * (1.0 + eps);
            let h_hi = 1.0 - eps * (1.0 - h_right);
            let mid = (1.0 + h_right) / 2.0;
            // anchor x = 0 at the profile midpoint height
            let mut left = profile(h_hi, mid);
            let mut right = profile_forward(mid, h_lo, n, s, q, froude, hs);
            left.pop();
            left.append(&mut right);
            Ok(ShockProfile {
                params,
                kind,
                s,
                q,
                h_star: None,
                hs_singular: hs,
                samples: left,
            })
        }
        ShockKind::Riemann => Ok(ShockProfile {
            params,
            kind,
            s,
            q,
            h_star: Some(1.0),
            hs_singular: hs,
            samples: vec![(0.0, 1.0)],
        }),
        ShockKind::DecreasingDiscontinuous | ShockKind::Nonmonotone => {
            let h_star = subshock_height(froude, h_right);
            let h_from = if kind == ShockKind::DecreasingDiscontinuous {
                1.0 - eps * (1.0 - h_star)
            } else {
                1.0 + eps * (h_star - 1.0)
            };
            let samples = profile(h_from, h_star);
            Ok(ShockProfile {
                params,
                kind,
                s,
                q,
                h_star: Some(h_star),
                hs_singular: hs,
                samples,
            })
        }
    }
}

fn profile_forward(
    h_from: f64,
    h_to: f64,
    n: usize,
    s: f64,
    q: f64,
    froude: f64,
    hs: f64,
) -> Vec<(f64, f64)> {
    let mut pts = Vec::with_capacity(n);
    let mut x = 0.0;
    let mut h_prev = h_from;
    pts.push((0.0, h_from));
    for i in 1..n {
        let ht = h_from + (h_to - h_from) * i as f64 / (n - 1) as f64;
        x += adaptive_simpson(
            &|h| 1.0 / shock_rhs(h, s, q, froude, hs),
            h_prev,
            ht,
            1e-12,
        );
        pts.push((x, ht));
        h_prev = ht;
    }
    pts
}

/// A sampled Dressler roll wave, sonic normalization H_s = 1, one cell
/// [0, X) with the shock at x = 0 and H(0+) = H_-.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RollWaveProfile {
    pub params: RollParams,
    pub h_plus: f64,
    /// cell period
    pub period: f64,
    /// wave speed c = 1 + 1/F
    pub c: f64,
    /// location of the sonic point H = 1 inside the cell
    pub sonic_x: f64,
    /// (x, H) samples over one cell, increasing in x
    pub samples: Vec<(f64, f64)>,
}

impl RollWaveProfile {
    /// dH/dx inside the cell.
    pub fn dh_dx(&self, h: f64) -> f64 {
        roll_rhs(h, self.params.froude)
    }

    pub fn momentum(&self, h: f64) -> f64 {
        self.c * h - 1.0 / self.params.froude
    }
}

pub(crate) fn roll_rhs(h: f64, froude: f64) -> f64 {
    let f2 = froude * froude;
    (f2 * h * h - 2.0 * froude * h - h + 1.0) / (h * h + h + 1.0)
}

/// Maximum height H_+ > 1 pairing with H_- via the profile first integral
/// 1/H + H^2/2 matching across the cell.
pub fn roll_h_plus(h_minus: f64) -> Result<f64> {
    if !(h_minus > 0.0 && h_minus < 1.0) {
        return Err(Error::Domain(format!("H_- must be in (0,1), got {h_minus}")));
    }
    let phi = |h: f64| 1.0 / h + 0.5 * h * h;
    let target = phi(h_minus);
    let mut hi = 2.0;
    while phi(hi) < target {
        hi *= 2.0;
        if hi > 1e8 {
            return Err(Error::RootFinding("H_+ bracket blew up".into()));
        }
    }
    bisect_newton(&|h| phi(h) - target, 1.0 + 1e-14, hi, 1e-12)
        .ok_or_else(|| Error::RootFinding("H_+ bisection failed".into()))
}

/// Construct a roll wave profile with `resolution` samples per cell.
pub fn roll_wave(froude: f64, h_minus: f64, resolution: usize) -> Result<RollWaveProfile> {
    let params = RollParams::new(froude, h_minus)?;
    let h_plus = roll_h_plus(h_minus)?;
    let n = resolution.max(32);
    let mut samples = Vec::with_capacity(n);
    let mut x = 0.0;
    let mut h_prev = h_minus;
    samples.push((0.0, h_minus));
    for i in 1..n {
        let ht = h_minus + (h_plus - h_minus) * i as f64 / (n - 1) as f64;
        x += adaptive_simpson(&|h| 1.0 / roll_rhs(h, froude), h_prev, ht, 1e-13);
        samples.push((x, ht));
        h_prev = ht;
    }
    let period = samples.last().unwrap().0;
    let sonic_x = adaptive_simpson(&|h| 1.0 / roll_rhs(h, froude), h_minus, 1.0, 1e-13);
    Ok(RollWaveProfile {
        params,
        h_plus,
        period,
        c: params.speed(),
        sonic_x,
        samples,
    })
}

/// Cell averages needed by the essential curve of the periodic determinant:
/// (int_0^X F H dx, int_0^X (1/H - 1 - F) dx).
pub fn roll_cell_integrals(wave: &RollWaveProfile) -> (f64, f64) {
    let froude = wave.params.froude;
    let fh = adaptive_simpson(
        &|h| froude * h / roll_rhs(h, froude),
        wave.params.h_minus,
        wave.h_plus,
        1e-12,
    );
    let res = adaptive_simpson(
        &|h| (1.0 / h - 1.0 - froude) / roll_rhs(h, froude),
        wave.params.h_minus,
        wave.h_plus,
        1e-12,
    );
    (fh, res)
}
