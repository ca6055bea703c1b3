//! Closed frequency contours in the lambda plane and winding-number root
//! counting by the argument principle.

use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Closed polyline in the lambda plane (last point connects back to first).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Contour {
    pub points: Vec<C64>,
}

impl Contour {
    /// Boundary of the half annulus {Re lambda > 0, r < |lambda| < R},
    /// traversed counterclockwise. Discretization counts follow the
    /// 200/1000/300-per-segment protocol when defaults are requested.
    pub fn half_annulus(r: f64, big_r: f64, n_inner: usize, n_outer: usize, n_seg: usize) -> Self {
        let mut pts = Vec::new();
        // outer half circle from -iR to +iR through +R
        for i in 0..=n_outer {
            let th = -0.5 * std::f64::consts::PI
                + std::f64::consts::PI * i as f64 / n_outer as f64;
            pts.push(C64::from_polar(big_r, th));
        }
        // segment +iR -> +ir on the imaginary axis
        for i in 1..=n_seg {
            let t = big_r + (r - big_r) * i as f64 / n_seg as f64;
            pts.push(C64::new(0.0, t));
        }
        // inner half circle from +ir to -ir through +r (clockwise around 0)
        for i in 1..=n_inner {
            let th = 0.5 * std::f64::consts::PI
                - std::f64::consts::PI * i as f64 / n_inner as f64;
            pts.push(C64::from_polar(r, th));
        }
        // segment -ir -> -iR
        for i in 1..n_seg {
            let t = -r + (-big_r + r) * i as f64 / n_seg as f64;
            pts.push(C64::new(0.0, t));
        }
        Contour { points: pts }
    }

    /// Boundary of the half disc {Re lambda > 0, |lambda| < R} with a finer
    /// discretization of the centered segment [-r_fine, r_fine] i.
    pub fn half_disc(
        big_r: f64,
        r_fine: f64,
        n_outer: usize,
        n_seg: usize,
        n_center: usize,
    ) -> Self {
        let mut pts = Vec::new();
        for i in 0..=n_outer {
            let th = -0.5 * std::f64::consts::PI
                + std::f64::consts::PI * i as f64 / n_outer as f64;
            pts.push(C64::from_polar(big_r, th));
        }
        // down the imaginary axis +iR -> +i r_fine
        for i in 1..=n_seg {
            let t = big_r + (r_fine - big_r) * i as f64 / n_seg as f64;
            pts.push(C64::new(0.0, t));
        }
        // fine center +i r_fine -> -i r_fine
        for i in 1..=n_center {
            let t = r_fine - 2.0 * r_fine * i as f64 / n_center as f64;
            pts.push(C64::new(0.0, t));
        }
        // -i r_fine -> -iR
        for i in 1..n_seg {
            let t = -r_fine + (-big_r + r_fine) * i as f64 / n_seg as f64;
            pts.push(C64::new(0.0, t));
        }
        Contour { points: pts }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContourScan {
    pub eta: f64,
    pub lambda: Vec<C64>,
    pub values: Vec<C64>,
    pub winding: i64,
}

/// Winding number of f along the closed contour: total argument change over
/// 2 pi. Segments with argument jumps >= 0.9 pi are refined by chord
/// bisection (up to `max_refine` extra levels); samples at or below the
/// zero floor raise a contour-hit error.
pub fn winding_number(
    f: &(dyn Fn(C64) -> C64 + Sync),
    contour: &Contour,
    max_refine: usize,
) -> Result<(i64, Vec<C64>, Vec<C64>)> {
    let mut lambdas = contour.points.clone();
    let mut values: Vec<C64> = lambdas.par_iter().map(|&z| f(z)).collect();
    let scale = median_abs(&values);
    if scale == 0.0 {
        return Err(Error::ContourHit { value: 0.0 });
    }
    for _ in 0..=max_refine {
        if let Some(v) = values.iter().find(|v| v.norm() < 1e-11 * scale) {
            return Err(Error::ContourHit { value: v.norm() });
        }
        // locate segments needing refinement
        let n = lambdas.len();
        let mut inserts: Vec<usize> = Vec::new();
        for i in 0..n {
            let a = values[i];
            let b = values[(i + 1) % n];
            let dphi = (b / a).arg().abs();
            if dphi >= 0.9 * std::f64::consts::PI {
                inserts.push(i);
            }
        }
        if inserts.is_empty() {
            break;
        }
        let mids: Vec<C64> = inserts
            .iter()
            .map(|&i| (lambdas[i] + lambdas[(i + 1) % lambdas.len()]) * 0.5)
            .collect();
        let mid_vals: Vec<C64> = mids.par_iter().map(|&z| f(z)).collect();
        // insert back-to-front so earlier indices stay valid
        for (&i, (&z, &v)) in inserts
            .iter()
            .zip(mids.iter().zip(mid_vals.iter()))
            .rev()
        {
            lambdas.insert(i + 1, z);
            values.insert(i + 1, v);
        }
    }
    let n = lambdas.len();
    let mut total = 0.0;
    for i in 0..n {
        let a = values[i];
        let b = values[(i + 1) % n];
        let d = (b / a).arg();
        if d.abs() >= 0.98 * std::f64::consts::PI {
            return Err(Error::WindingNonInteger(f64::NAN));
        }
        total += d;
    }
    let w = total / (2.0 * std::f64::consts::PI);
    let rounded = w.round();
    if (w - rounded).abs() > 0.2 {
        return Err(Error::WindingNonInteger(w));
    }
    Ok((rounded as i64, lambdas, values))
}

fn median_abs(values: &[C64]) -> f64 {
    let mut mags: Vec<f64> = values.iter().map(|v| v.norm()).collect();
    mags.sort_by(|a, b| a.partial_cmp(b).unwrap());
    mags[mags.len() / 2]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_function_winds_zero() {
        let c = Contour::half_annulus(0.1, 5.0, 50, 100, 40);
        let (w, _, _) = winding_number(&|_z| C64::new(1.0, 2.0), &c, 3).unwrap();
        assert_eq!(w, 0);
    }

    #[test]
    fn simple_zero_inside_winds_one() {
        let c = Contour::half_annulus(0.1, 5.0, 100, 200, 80);
        let z0 = C64::new(1.0, 0.5);
        let (w, _, _) = winding_number(&|z| z - z0, &c, 4).unwrap();
        assert_eq!(w, 1);
        // zero outside the annulus: winding 0
        let z1 = C64::new(-1.0, 0.5);
        let (w, _, _) = winding_number(&|z| z - z1, &c, 4).unwrap();
        assert_eq!(w, 0);
        // double zero inside half disc
        let c2 = Contour::half_disc(5.0, 0.1, 200, 60, 40);
        let (w, _, _) = winding_number(&|z| (z - z0) * (z - z0), &c2, 4).unwrap();
        assert_eq!(w, 2);
    }

    #[test]
    fn refinement_handles_coarse_contours() {
        // deliberately coarse sampling forces refinement
        let c = Contour::half_disc(3.0, 0.1, 12, 4, 4);
        let z0 = C64::new(0.4, -0.2);
        let (w, _, _) = winding_number(&|z| (z - z0).powu(2), &c, 14).unwrap();
        assert_eq!(w, 2);
    }

    #[test]
    fn zero_on_contour_detected() {
        let c = Contour::half_annulus(0.1, 2.0, 40, 80, 30);
        let hit = winding_number(&|z| z - C64::new(2.0, 0.0), &c, 2);
        assert!(matches!(hit, Err(Error::ContourHit { .. })));
    }
}
