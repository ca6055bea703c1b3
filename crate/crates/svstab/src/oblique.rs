//! Oblique roll waves by the hybrid method: a Taylor seed at the sonic point
//! of the rotated profile ODEs, outward integration in both directions, and
//! a search for shock endpoints satisfying both Rankine-Hugoniot conditions.

use crate::error::{Error, Result};
use crate::numerics::ode::{integrate, OdeOptions};
use serde::{Deserialize, Serialize};

/// Parameters and derived constants of the rotated profile system, sonic
/// normalization u_s = 1.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ObliqueParams {
    pub froude: f64,
    /// propagation angle, normalized to (-pi/2, 0)
    pub theta: f64,
    /// transverse velocity at the sonic point
    pub vs: f64,
    pub s: f64,
    pub q0: f64,
}

impl ObliqueParams {
    /// Dressler ("+") branch of the sonic relations.
    pub fn new(froude: f64, theta: f64, vs: f64) -> Result<Self> {
        if !(theta > -std::f64::consts::FRAC_PI_2 && theta <= 0.0) {
            return Err(Error::Domain(format!(
                "theta must lie in (-pi/2, 0], got {theta}"
            )));
        }
        if theta == 0.0 && vs != 0.0 {
            return Err(Error::Domain(
                "theta = 0 with nonzero transverse velocity reduces to 1d".into(),
            ));
        }
        let onep = 1.0 + vs * vs;
        let s = 1.0 + onep.powf(0.25) / (froude * theta.cos().sqrt());
        let q0 = onep.powf(0.75) / (froude * theta.cos().powf(1.5));
        Ok(ObliqueParams {
            froude,
            theta,
            vs,
            s,
            q0,
        })
    }

    fn m(&self, u: f64) -> f64 {
        let f2 = self.froude * self.froude;
        -self.q0 * (1.0 + self.q0 / (f2 * (u - self.s).powi(3)))
    }

    fn m_du(&self, u: f64) -> f64 {
        let f2 = self.froude * self.froude;
        3.0 * self.q0 * self.q0 / (f2 * (u - self.s).powi(4))
    }

    fn m_duu(&self, u: f64) -> f64 {
        let f2 = self.froude * self.froude;
        -12.0 * self.q0 * self.q0 / (f2 * (u - self.s).powi(5))
    }

    fn g(&self, u: f64, v: f64) -> f64 {
        -self.theta.cos() * self.q0 / (u - self.s) - (u * u + v * v).sqrt() * u
    }

    fn k(&self, u: f64, v: f64) -> f64 {
        self.theta.sin() * self.q0 / (u - self.s) - (u * u + v * v).sqrt() * v
    }

    /// (u', v') of the reduced system away from the sonic point.
    pub fn rhs(&self, u: f64, v: f64) -> (f64, f64) {
        (self.g(u, v) / self.m(u), self.k(u, v) / (-self.q0))
    }

    /// Height along the orbit, h = -q0/(u - s), positive for u < s.
    pub fn height(&self, u: f64) -> f64 {
        -self.q0 / (u - self.s)
    }

    /// Rankine-Hugoniot invariant J(u) = 2 F^2 u - q0/(u-s)^2; equal values
    /// at the two shock endpoints close the cell.
    pub fn rh_invariant(&self, u: f64) -> f64 {
        2.0 * self.froude * self.froude * u - self.q0 / (u - self.s).powi(2)
    }

    /// u'(0) as the admissible root of the sonic quadratic; complex roots
    /// are a parameter infeasibility.
    pub fn sonic_slope(&self) -> Result<f64> {
        let f2 = self.froude * self.froude;
        let sm1 = self.s - 1.0;
        let ct = self.theta.cos();
        let a = 3.0 * f2 * sm1.powi(5);
        let b = sm1 / (f2 * ct) - f2 * ct * sm1.powi(4) + f2 * ct * sm1.powi(5);
        let c = self.vs * (self.theta.tan() + self.vs) / f2;
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            return Err(Error::Domain(format!(
                "sonic slope quadratic has complex roots (disc = {disc:.3e})"
            )));
        }
        let r1 = (-b + disc.sqrt()) / (2.0 * a);
        let r2 = (-b - disc.sqrt()) / (2.0 * a);
        // continuity with the 1d limit u'(0) = (F-2)/3: take the closer root
        let target = (self.froude - 2.0) / 3.0;
        Ok(if (r1 - target).abs() <= (r2 - target).abs() {
            r1
        } else {
            r2
        })
    }

    /// Second-order Taylor coefficients (u1, u2, v1, v2) at the sonic point.
    pub fn sonic_taylor(&self) -> Result<(f64, f64, f64, f64)> {
        let (u, v) = (1.0, self.vs);
        let u1 = self.sonic_slope()?;
        let v1 = self.k(u, v) / (-self.q0);
        let r = (u * u + v * v).sqrt();
        let ct = self.theta.cos();
        let st = self.theta.sin();
        let us = u - self.s;
        let g_u = ct * self.q0 / (us * us) - (r + u * u / r);
        let g_v = -u * v / r;
        let g_uu = -2.0 * ct * self.q0 / us.powi(3) - (3.0 * u / r - u.powi(3) / r.powi(3));
        let g_uv = -v / r + u * u * v / r.powi(3);
        let g_vv = -u / r + u * v * v / r.powi(3);
        let k_u = -st * self.q0 / (us * us) - u * v / r;
        let k_v = -(r + v * v / r);
        let v2 = (k_u * u1 + k_v * v1) / (-2.0 * self.q0);
        let denom = 6.0 * self.m_du(u) * u1 - 2.0 * g_u;
        if denom.abs() < 1e-12 {
            return Err(Error::Domain("degenerate sonic Taylor closure".into()));
        }
        let u2 = (g_uu * u1 * u1 + 2.0 * g_uv * u1 * v1 + g_vv * v1 * v1 + 2.0 * g_v * v2
            - self.m_duu(u) * u1.powi(3))
            / denom;
        Ok((u1, u2, v1, v2))
    }
}

/// One traced oblique orbit with matched shock endpoints.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObliqueWave {
    pub params: ObliqueParams,
    pub x_minus: f64,
    pub x_plus: f64,
    pub period: f64,
    /// (x, u, v) samples over (x_minus, x_plus)
    pub orbit: Vec<(f64, f64, f64)>,
    /// residual of the u-Rankine-Hugoniot condition at the matched endpoints
    pub rh_residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum ShootOutcome {
    Wave(Box<ObliqueWave>),
    /// no endpoint pair satisfied both jump conditions
    NoWave { best_residual: f64 },
}

struct Trajectory {
    x: Vec<f64>,
    u: Vec<f64>,
    v: Vec<f64>,
    du: Vec<f64>,
    dv: Vec<f64>,
}

fn trace(params: &ObliqueParams, x_to: f64, seed_x: f64, u0: f64, v0: f64) -> Trajectory {
    let rhs = |_x: f64, y: &Vec<f64>| {
        let (du, dv) = params.rhs(y[0], y[1]);
        vec![du, dv]
    };
    let mut tr = Trajectory {
        x: vec![],
        u: vec![],
        v: vec![],
        du: vec![],
        dv: vec![],
    };
    let opts = OdeOptions {
        rtol: 1e-12,
        atol: 1e-14,
        max_step: 5e-4,
        ..Default::default()
    };
    let mut obs = |x: f64, y: &Vec<f64>| {
        tr.x.push(x);
        tr.u.push(y[0]);
        tr.v.push(y[1]);
        let (du, dv) = params.rhs(y[0], y[1]);
        tr.du.push(du);
        tr.dv.push(dv);
    };
    // stop early if u approaches the frame speed (height blow-up): integrate
    // in moderate chunks
    let mut x_cur = seed_x;
    let mut y = vec![u0, v0];
    let n_chunks = 200;
    for i in 1..=n_chunks {
        let target = seed_x + (x_to - seed_x) * i as f64 / n_chunks as f64;
        match integrate(&rhs, x_cur, target, y.clone(), &opts, Some(&mut obs)) {
            Ok(res) => {
                y = res;
                x_cur = target;
                if (y[0] - params.s).abs() < 2e-2 || y[0] <= 1e-3 {
                    break;
                }
            }
            Err(_) => break,
        }
    }
    tr
}

fn interp(tr: &Trajectory, x: f64) -> Option<(f64, f64)> {
    if tr.x.len() < 2 {
        return None;
    }
    let ascending = tr.x[1] > tr.x[0];
    let pos = if ascending {
        tr.x.partition_point(|&t| t < x)
    } else {
        tr.x.partition_point(|&t| t > x)
    };
    if pos == 0 || pos >= tr.x.len() {
        return None;
    }
    // cubic Hermite on the bracketing step
    let (x0, x1) = (tr.x[pos - 1], tr.x[pos]);
    let hstep = x1 - x0;
    let w = (x - x0) / hstep;
    let h00 = (1.0 + 2.0 * w) * (1.0 - w) * (1.0 - w);
    let h10 = w * (1.0 - w) * (1.0 - w);
    let h01 = w * w * (3.0 - 2.0 * w);
    let h11 = w * w * (w - 1.0);
    let hermite = |f0: f64, f1: f64, d0: f64, d1: f64| {
        h00 * f0 + h10 * hstep * d0 + h01 * f1 + h11 * hstep * d1
    };
    Some((
        hermite(tr.u[pos - 1], tr.u[pos], tr.du[pos - 1], tr.du[pos]),
        hermite(tr.v[pos - 1], tr.v[pos], tr.dv[pos - 1], tr.dv[pos]),
    ))
}

/// All x with v(x) = v_target on a stored trajectory, refined by bisection
/// on the Hermite interpolant; returns (x, u(x)) pairs.
fn v_crossings(tr: &Trajectory, v_target: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for k in 1..tr.x.len() {
        let (vp, vr) = (tr.v[k - 1], tr.v[k]);
        if (vp - v_target) * (vr - v_target) <= 0.0 && vp != vr {
            let (mut a, mut b) = (tr.x[k - 1], tr.x[k]);
            let mut fa = vp - v_target;
            for _ in 0..50 {
                let m = 0.5 * (a + b);
                let Some((_, vmid)) = interp(tr, m) else { break };
                let fm = vmid - v_target;
                if fm == 0.0 {
                    a = m;
                    b = m;
                    break;
                }
                if fm.signum() == fa.signum() {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            let x = 0.5 * (a + b);
            if let Some((u, _)) = interp(tr, x) {
                out.push((x, u));
            }
        }
    }
    out
}

/// Shoot for an oblique roll wave at (F, theta, vs); integrates the reduced
/// system from the sonic point and searches for endpoints satisfying both
/// jump conditions within `rh_tol` (relative).
pub fn oblique_shoot(froude: f64, theta: f64, vs: f64, rh_tol: f64) -> Result<ShootOutcome> {
    let params = ObliqueParams::new(froude, theta, vs)?;
    let (u1, u2, v1, v2) = params.sonic_taylor()?;
    let delta = 1e-4;
    let seed = |x: f64| (1.0 + u1 * x + u2 * x * x, vs + v1 * x + v2 * x * x);
    let x_span = 40.0 / froude;
    let (ur, vr) = seed(delta);
    let right = trace(&params, x_span, delta, ur, vr);
    let (ul, vl) = seed(-delta);
    let left = trace(&params, -x_span, -delta, ul, vl);
    if right.x.len() < 8 || left.x.len() < 8 {
        return Err(Error::Integration("oblique orbit escaped immediately".into()));
    }
    // scan x_minus over the left trajectory; for each, find x_plus with
    // matching v, then measure the u-jump residual
    let scale = params.rh_invariant(1.0).abs().max(1.0);
    let mut best: Option<(f64, f64, f64)> = None; // (|resid|, x_minus, x_plus)
    let n_scan = 400;
    let x_left_end = *left.x.last().unwrap();
    for i in 1..n_scan {
        let xm = x_left_end * i as f64 / n_scan as f64;
        let Some((um, vm)) = interp(&left, xm) else {
            continue;
        };
        // locate v crossings on the right branch
        for (x_plus, up) in v_crossings(&right, vm) {
            // Lax ordering: pre-shock height above post-shock
            if up > um {
                let resid =
                    (params.rh_invariant(up) - params.rh_invariant(um)).abs() / scale;
                if best.map(|b| resid < b.0).unwrap_or(true) {
                    best = Some((resid, xm, x_plus));
                }
            }
        }
    }
    let Some((resid, mut xm, mut xp)) = best else {
        return Ok(ShootOutcome::NoWave {
            best_residual: f64::INFINITY,
        });
    };
    // polish x_minus by local bisection of the residual-signed function
    let eval = |xm: f64| -> Option<(f64, f64)> {
        let (um, vm) = interp(&left, xm)?;
        let mut best: Option<(f64, f64)> = None;
        for (x_plus, up) in v_crossings(&right, vm) {
            if up > um {
                let r = params.rh_invariant(up) - params.rh_invariant(um);
                if best.map(|b| r.abs() < b.0.abs()).unwrap_or(true) {
                    best = Some((r, x_plus));
                }
            }
        }
        best.map(|(r, xpl)| (r / scale, xpl))
    };
    let dx = x_left_end / n_scan as f64;
    if let (Some((ra, _)), Some((rb, _))) = (eval(xm - dx), eval(xm + dx)) {
        if ra.signum() != rb.signum() {
            let mut a = xm - dx;
            let mut b = xm + dx;
            let mut fa = ra;
            for _ in 0..60 {
                let m = 0.5 * (a + b);
                let Some((fm, _)) = eval(m) else { break };
                if !fm.is_finite() {
                    break;
                }
                if fm.signum() == fa.signum() {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            xm = 0.5 * (a + b);
        }
    }
    let final_resid = match eval(xm) {
        Some((r, xpl)) => {
            xp = xpl;
            r.abs()
        }
        None => resid,
    };
    if final_resid > rh_tol {
        return Ok(ShootOutcome::NoWave {
            best_residual: final_resid,
        });
    }
    // store the orbit between the endpoints
    let mut orbit = Vec::new();
    for (k, &x) in left.x.iter().enumerate().rev() {
        if x >= xm {
            orbit.push((x, left.u[k], left.v[k]));
        }
    }
    for (k, &x) in right.x.iter().enumerate() {
        if x <= xp {
            orbit.push((x, right.u[k], right.v[k]));
        }
    }
    orbit.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    // v > 0 along the whole orbit when sin(theta) < 0 (nontrivial waves)
    if theta < 0.0 && orbit.iter().any(|&(_, _, v)| v <= 0.0) {
        return Ok(ShootOutcome::NoWave {
            best_residual: final_resid,
        });
    }
    Ok(ShootOutcome::Wave(Box::new(ObliqueWave {
        params,
        x_minus: xm,
        x_plus: xp,
        period: xp - xm,
        orbit,
        rh_residual: final_resid,
    })))
}

/// Largest vs admitting an oblique wave at (F, theta), by bisection of the
/// shooting outcome above -tan(theta).
pub fn vs_max(froude: f64, theta: f64, rh_tol: f64, vs_tol: f64) -> Result<f64> {
    let base = -theta.tan();
    let exists = |vs: f64| -> bool {
        matches!(
            oblique_shoot(froude, theta, vs, rh_tol),
            Ok(ShootOutcome::Wave(_))
        )
    };
    let mut lo = base + 1e-5;
    if !exists(lo) {
        lo = base + 1e-4;
        if !exists(lo) {
            return Err(Error::Existence(format!(
                "no oblique wave just above vs = -tan(theta) at (F, theta) = ({froude}, {theta})"
            )));
        }
    }
    let mut hi = base + 2e-3;
    let mut guard = 0;
    while exists(hi) && guard < 12 {
        hi = base + (hi - base) * 2.0;
        guard += 1;
    }
    for _ in 0..40 {
        if hi - lo < vs_tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if exists(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sonic_relations_1d_limit() {
        let p = ObliqueParams::new(2.5, 0.0, 0.0).unwrap();
        assert!((p.s - (1.0 + 1.0 / 2.5)).abs() < 1e-14);
        assert!((p.q0 - 1.0 / 2.5).abs() < 1e-14);
        let u1 = p.sonic_slope().unwrap();
        assert!((u1 - (2.5 - 2.0) / 3.0).abs() < 1e-12, "u'(0) = {u1}");
    }

    #[test]
    fn constant_wave_is_equilibrium() {
        // vs = -tan(theta): the constant state solves the reduced odes exactly
        let theta = -0.1f64;
        let p = ObliqueParams::new(2.5, theta, -theta.tan()).unwrap();
        let (gu, kv) = (p.g(1.0, p.vs), p.k(1.0, p.vs));
        assert!(gu.abs() < 1e-13, "g = {gu}");
        assert!(kv.abs() < 1e-13, "k = {kv}");
        // height of the constant level
        let h = p.height(1.0);
        assert!((h - (1.0 + p.vs * p.vs).sqrt() / theta.cos()).abs() < 1e-10);
    }

    #[test]
    fn taylor_consistency_relation() {
        // first-order identity m' u1^2 = g_u u1 + g_v v1 encoded by the
        // sonic quadratic
        let theta = -0.1f64;
        let p = ObliqueParams::new(2.5, theta, theta.tan().abs() + 4e-4).unwrap();
        let (u1, _, v1, _) = p.sonic_taylor().unwrap();
        let r = (1.0 + p.vs * p.vs).sqrt();
        let us = 1.0 - p.s;
        let g_u = theta.cos() * p.q0 / (us * us) - (r + 1.0 / r);
        let g_v = -p.vs / r;
        let lhs = p.m_du(1.0) * u1 * u1;
        let rhs = g_u * u1 + g_v * v1;
        assert!(
            (lhs - rhs).abs() < 1e-10 * lhs.abs().max(1.0),
            "{lhs} vs {rhs}"
        );
    }

    #[test]
    fn existence_and_nonexistence_paper_points() {
        let base = 0.1f64.tan();
        match oblique_shoot(2.5, -0.1, base + 4e-4, 1e-6).unwrap() {
            ShootOutcome::Wave(w) => {
                assert!(w.rh_residual < 1e-6);
                assert!(w.orbit.iter().all(|&(_, _, v)| v > 0.0));
                assert!(w.period > 0.0);
            }
            ShootOutcome::NoWave { best_residual } => {
                panic!("expected wave, best residual {best_residual:.3e}")
            }
        }
        match oblique_shoot(2.5, -0.1, base - 4e-4, 1e-6).unwrap() {
            ShootOutcome::NoWave { .. } => {}
            ShootOutcome::Wave(w) => panic!(
                "unexpected wave with residual {:.3e} at vs below -tan(theta)",
                w.rh_residual
            ),
        }
    }

    #[test]
    fn vs_max_paper_value() {
        let v = vs_max(2.5, -0.1, 1e-6, 2e-6).unwrap();
        let expect = 0.1f64.tan() + 0.000526;
        assert!(
            (v - expect).abs() < 1e-5,
            "vs_max = {v}, expected about {expect}"
        );
    }

    #[test]
    fn period_regression_near_fold() {
        // converged value of this implementation at the reference parameters;
        // the acceptance suite compares against the published figure
        let vs = 0.1f64.tan() + 0.0005255;
        match oblique_shoot(2.5, -0.1, vs, 1e-6).unwrap() {
            ShootOutcome::Wave(w) => {
                assert!(
                    (w.period - 4.004).abs() < 0.02,
                    "period = {} drifted from the converged value",
                    w.period
                );
            }
            ShootOutcome::NoWave { best_residual } => {
                panic!("expected wave, residual {best_residual:.3e}")
            }
        }
    }
}
