//! Pseudo-arclength continuation of scalar level sets G(p) = 0 over a
//! two-dimensional parameter plane, used to trace stability boundaries such
//! as ind_k = 0 or L_*(F, H_-) = c.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ContinuationOptions {
    pub step: f64,
    pub max_steps: usize,
    pub ftol: f64,
    /// bounding box (p0_min, p0_max, p1_min, p1_max); tracing stops outside
    pub bounds: [f64; 4],
    /// relative scales of the two parameters used in the arclength metric
    pub scales: [f64; 2],
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        ContinuationOptions {
            step: 0.05,
            max_steps: 200,
            ftol: 1e-9,
            bounds: [f64::MIN, f64::MAX, f64::MIN, f64::MAX],
            scales: [1.0, 1.0],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Branch {
    pub points: Vec<[f64; 2]>,
    /// set when the trace stopped before the step budget (fold without
    /// convergence, bounds, or repeated correction failure)
    pub stopped: Option<String>,
}

fn grad(g: &dyn Fn([f64; 2]) -> Option<f64>, p: [f64; 2], h: [f64; 2]) -> Option<[f64; 2]> {
    let gx = (g([p[0] + h[0], p[1]])? - g([p[0] - h[0], p[1]])?) / (2.0 * h[0]);
    let gy = (g([p[0], p[1] + h[1]])? - g([p[0], p[1] - h[1]])?) / (2.0 * h[1]);
    Some([gx, gy])
}

/// Correct a predicted point back onto the level set along the gradient
/// direction (one-dimensional Newton in the normal direction).
fn correct(
    g: &dyn Fn([f64; 2]) -> Option<f64>,
    mut p: [f64; 2],
    scales: [f64; 2],
    ftol: f64,
) -> Option<[f64; 2]> {
    for _ in 0..30 {
        let v = g(p)?;
        if v.abs() <= ftol {
            return Some(p);
        }
        let h = [1e-6 * scales[0], 1e-6 * scales[1]];
        let gr = grad(g, p, h)?;
        let n2 = gr[0] * gr[0] * scales[0] * scales[0] + gr[1] * gr[1] * scales[1] * scales[1];
        if n2 == 0.0 {
            return None;
        }
        // scaled Newton step along the gradient
        p = [
            p[0] - v * gr[0] * scales[0] * scales[0] / n2,
            p[1] - v * gr[1] * scales[1] * scales[1] / n2,
        ];
    }
    None
}

/// Trace the level set G = 0 from a seed near the curve. The curve is
/// followed in both directions until the step budget, the bounding box, or a
/// stall. `g` may return None where the functional is not evaluable; the
/// trace records the last good point and stops there.
pub fn trace_level_set(
    g: &dyn Fn([f64; 2]) -> Option<f64>,
    seed: [f64; 2],
    opts: &ContinuationOptions,
) -> Result<Branch> {
    let on_curve = correct(g, seed, opts.scales, opts.ftol)
        .ok_or_else(|| Error::ContinuationStalled("seed correction failed".into()))?;
    let mut points = vec![on_curve];
    let mut stopped = None;
    let inside = |p: [f64; 2]| {
        p[0] >= opts.bounds[0]
            && p[0] <= opts.bounds[1]
            && p[1] >= opts.bounds[2]
            && p[1] <= opts.bounds[3]
    };
    for dir in [1.0f64, -1.0] {
        let mut prev = on_curve;
        // initial tangent: orthogonal to the gradient in the scaled metric
        let h = [1e-6 * opts.scales[0], 1e-6 * opts.scales[1]];
        let Some(gr) = grad(g, prev, h) else {
            stopped = Some("gradient unavailable at seed".into());
            break;
        };
        let mut tangent = [
            -gr[1] * opts.scales[1] * opts.scales[1],
            gr[0] * opts.scales[0] * opts.scales[0],
        ];
        let tn = (tangent[0] * tangent[0] / (opts.scales[0] * opts.scales[0])
            + tangent[1] * tangent[1] / (opts.scales[1] * opts.scales[1]))
            .sqrt();
        if tn == 0.0 {
            return Err(Error::ContinuationStalled("degenerate tangent".into()));
        }
        tangent = [dir * tangent[0] / tn, dir * tangent[1] / tn];
        let mut step = opts.step;
        let mut halvings = 0;
        for _ in 0..opts.max_steps {
            let pred = [prev[0] + step * tangent[0], prev[1] + step * tangent[1]];
            match correct(g, pred, opts.scales, opts.ftol) {
                Some(next) if inside(next) => {
                    // update tangent from the secant
                    let mut t = [next[0] - prev[0], next[1] - prev[1]];
                    let n = (t[0] * t[0] / (opts.scales[0] * opts.scales[0])
                        + t[1] * t[1] / (opts.scales[1] * opts.scales[1]))
                        .sqrt();
                    if n > 0.0 {
                        t = [t[0] / n, t[1] / n];
                        tangent = t;
                    }
                    if dir > 0.0 {
                        points.push(next);
                    } else {
                        points.insert(0, next);
                    }
                    prev = next;
                    halvings = 0;
                    if step < opts.step {
                        step *= 1.5;
                    }
                }
                Some(_) => {
                    stopped = Some("left the bounding box".into());
                    break;
                }
                None => {
                    step *= 0.5;
                    halvings += 1;
                    if halvings > 8 {
                        stopped = Some(format!(
                            "fold without convergence near ({:.6}, {:.6})",
                            prev[0], prev[1]
                        ));
                        break;
                    }
                }
            }
        }
    }
    Ok(Branch { points, stopped })
}
