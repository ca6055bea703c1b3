//! Spectral-surface following for roll waves: the two critical roots of the
//! periodic determinant are continued over an (eta, xi X) grid, local maxima
//! of Re lambda are refined, and the critical transverse frequency eta_* /
//! channel width L_* = pi/eta_* are extracted. Channel verdicts restrict the
//! surface to the wall or periodic frequency lattice.

use crate::error::{Error, Result};
use crate::evans::roll::RollEvans;
use crate::lowfreq::{taylor_coeffs, weierstrass_coeffs, TaylorOptions, WeierstrassCoeffs};
use crate::numerics::optim::{golden_min, nelder_mead_2d};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SurfaceGrid {
    pub eta_max: f64,
    pub n_eta: usize,
    /// xi X spans [-pi, pi)
    pub n_xi: usize,
}

impl Default for SurfaceGrid {
    fn default() -> Self {
        SurfaceGrid {
            eta_max: 25.0,
            n_eta: 120,
            n_xi: 96,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub tau: f64,
    pub eta: f64,
    pub xi_x: f64,
    pub l_star: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LocalMax {
    pub re: f64,
    pub im: f64,
    pub eta: f64,
    pub xi_x: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralSurface {
    pub eta: Vec<f64>,
    pub xi_x: Vec<f64>,
    /// max over the two root families of Re lambda; NaN marks failed cells
    pub re_max: Vec<Vec<f64>>,
    /// Im lambda of the maximizing family
    pub im_at_max: Vec<Vec<f64>>,
    /// eta-intervals carrying unstable roots
    pub unstable_eta: Vec<(f64, f64)>,
    /// largest unstable transverse frequency and the critical width
    pub critical: Option<CriticalPoint>,
    /// refined largest local maximum of Re lambda over the grid
    pub local_max: Option<LocalMax>,
}

/// Newton-correct a root of E(., eta, xi) from `seed`.
pub fn refine_root(ev: &RollEvans, seed: C64, eta: f64, xi: f64, ftol: f64) -> Option<C64> {
    let mut z = seed;
    let mut fz = ev.el(z, eta, xi).ok()?;
    let scale = |z: C64| 1e-7 * (1.0 + z.norm());
    for _ in 0..30 {
        let h = scale(z);
        let fp = ev.el(z + C64::new(h, 0.0), eta, xi).ok()?;
        let fm = ev.el(z - C64::new(h, 0.0), eta, xi).ok()?;
        let df = (fp - fm) / (2.0 * h);
        if df.norm() == 0.0 {
            return None;
        }
        let mut step = fz / df;
        let mut ok = false;
        for _ in 0..20 {
            let cand = z - step;
            if let Ok(fc) = ev.el(cand, eta, xi) {
                if fc.norm() < fz.norm() {
                    z = cand;
                    fz = fc;
                    ok = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !ok {
            break;
        }
        if step.norm() < 1e-13 * (1.0 + z.norm()) {
            break;
        }
    }
    // residual scale: compare against a nearby off-root value
    let ref_val = ev.el(z + C64::new(0.1, 0.1), eta, xi).ok()?;
    if fz.norm() <= ftol * ref_val.norm().max(1e-300) {
        Some(z)
    } else {
        None
    }
}

/// Continue the two Weierstrass root families over the grid. Extra seeds
/// (e.g. 1d neutral roots (lambda_*, xi_*)) refine the first row.
pub fn follow_surface(
    ev: &RollEvans,
    grid: &SurfaceGrid,
    extra_seeds: &[(C64, f64)],
) -> Result<SpectralSurface> {
    let x = ev.wave.period;
    let w = cheap_weierstrass(ev)?;
    let etas: Vec<f64> = (0..grid.n_eta)
        .map(|i| grid.eta_max * i as f64 / (grid.n_eta - 1) as f64)
        .collect();
    let xis: Vec<f64> = (0..grid.n_xi)
        .map(|i| -std::f64::consts::PI + 2.0 * std::f64::consts::PI * i as f64 / grid.n_xi as f64)
        .collect();
    let n_xi = xis.len();
    // family storage indexed [eta][xi]
    let mut fam: [Vec<Vec<Option<C64>>>; 2] =
        [vec![vec![None; n_xi]; etas.len()], vec![vec![None; n_xi]; etas.len()]];

    // first nonzero eta row: march outward in xi from xi = 0
    let i0 = 1.min(etas.len() - 1);
    let eta0 = etas[i0].max(1e-3);
    let mid = n_xi / 2; // xi X = 0 is near the middle of the grid
    let quad_roots = |eta: f64, xik: f64| -> (C64, C64) {
        let b = C64::new(w.b20 * eta * eta + w.b02 * xik * xik, w.b01_im * xik);
        let c = C64::new(w.c20 * eta * eta, w.c21_im * xik * eta * eta);
        let disc = (b * b - 4.0 * c).sqrt();
        ((-b - disc) / 2.0, (-b + disc) / 2.0)
    };
    for f in 0..2 {
        // outward march from the center of the xi row
        for dir in [1i64, -1i64] {
            let mut prev: Option<C64> = None;
            let mut k = mid as i64;
            while k >= 0 && (k as usize) < n_xi {
                let xi = xis[k as usize] / x;
                let (r1, r2) = quad_roots(eta0, xis[k as usize]);
                let guess = prev.unwrap_or(if f == 0 { r1 } else { r2 });
                let root = refine_root(ev, guess, eta0, xi, 1e-8);
                fam[f][i0][k as usize] = root;
                prev = root.or(prev);
                k += dir;
            }
        }
    }
    // fold extra seeds into the first row (closest xi cell wins by residual)
    for &(lam, xi_star) in extra_seeds {
        let xk = xi_star * x;
        let k = xis
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - xk).abs().partial_cmp(&(b.1 - xk).abs()).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        if let Some(root) = refine_root(ev, lam, eta0, xis[k] / x, 1e-8) {
            // replace whichever family is missing or further from the seed
            let d0 = fam[0][i0][k].map(|v| (v - root).norm()).unwrap_or(f64::MAX);
            let d1 = fam[1][i0][k].map(|v| (v - root).norm()).unwrap_or(f64::MAX);
            if d0 < d1 {
                fam[0][i0][k] = Some(root);
            } else {
                fam[1][i0][k] = Some(root);
            }
        }
    }
    // eta = 0 row: family 1 is pinned at the origin, family 0 is the 1d root
    if i0 == 1 {
        for k in 0..n_xi {
            fam[1][0][k] = Some(C64::new(0.0, 0.0));
            fam[0][0][k] = fam[0][1][k]
                .and_then(|seed| refine_root(ev, seed, 0.0, xis[k] / x, 1e-8));
        }
    }
    // march upward in eta, each xi column independently (parallel per row)
    for i in (i0 + 1)..etas.len() {
        let eta = etas[i];
        for f in 0..2 {
            let prev_row = fam[f][i - 1].clone();
            let prev2_row = if i >= 2 { fam[f][i - 2].clone() } else { prev_row.clone() };
            let new_row: Vec<Option<C64>> = (0..n_xi)
                .into_par_iter()
                .map(|k| {
                    let p1 = prev_row[k]?;
                    let p2 = prev2_row[k].unwrap_or(p1);
                    let guess = p1 + (p1 - p2);
                    refine_root(ev, guess, eta, xis[k] / x, 1e-8)
                        .or_else(|| refine_root(ev, p1, eta, xis[k] / x, 1e-8))
                })
                .collect();
            fam[f][i] = new_row;
        }
    }
    // assemble the max surface
    let mut re_max = vec![vec![f64::NAN; n_xi]; etas.len()];
    let mut im_at = vec![vec![f64::NAN; n_xi]; etas.len()];
    for i in 0..etas.len() {
        for k in 0..n_xi {
            let mut best: Option<C64> = None;
            for f in 0..2 {
                if let Some(v) = fam[f][i][k] {
                    if best.map(|b| v.re > b.re).unwrap_or(true) {
                        best = Some(v);
                    }
                }
            }
            if let Some(v) = best {
                re_max[i][k] = v.re;
                im_at[i][k] = v.im;
            }
        }
    }
    // row maxima and unstable intervals in eta
    let row_max = |i: usize, fam: &[Vec<Vec<Option<C64>>>; 2]| -> Option<(f64, usize, C64)> {
        let mut best: Option<(f64, usize, C64)> = None;
        for k in 0..n_xi {
            for famrow in fam.iter() {
                if let Some(v) = famrow[i][k] {
                    if best.map(|b| v.re > b.0).unwrap_or(true) {
                        best = Some((v.re, k, v));
                    }
                }
            }
        }
        best
    };
    let g: Vec<Option<(f64, usize, C64)>> = (0..etas.len()).map(|i| row_max(i, &fam)).collect();
    let mut unstable = Vec::new();
    let mut current: Option<f64> = None;
    let thresh = 1e-9;
    for i in 1..etas.len() {
        let gi = g[i].map(|v| v.0).unwrap_or(f64::NAN);
        let unstable_here = gi > thresh;
        match (current, unstable_here) {
            (None, true) => current = Some(etas[i]),
            (Some(start), false) => {
                unstable.push((start, etas[i]));
                current = None;
            }
            _ => {}
        }
    }
    if let Some(start) = current {
        unstable.push((start, grid.eta_max));
    }
    // critical frequency: refine the top edge of the highest unstable interval
    let critical = if let Some(&(_, hi)) = unstable.last() {
        if hi >= grid.eta_max - 1e-12 {
            None // unstable set may extend past the grid: report nothing
        } else {
            let i_hi = etas.iter().position(|&e| e >= hi).unwrap_or(etas.len() - 1);
            let i_lo = i_hi.saturating_sub(1);
            refine_eta_star(ev, &fam, &etas, &xis, x, i_lo, i_hi).ok()
        }
    } else {
        None
    };
    // largest local max over the grid, polished by Nelder-Mead
    let local_max = {
        let mut best: Option<(f64, usize, usize, C64)> = None;
        for i in 1..etas.len() {
            for k in 0..n_xi {
                let v = re_max[i][k];
                if v.is_nan() {
                    continue;
                }
                if best.map(|b| v > b.0).unwrap_or(true) {
                    best = Some((v, i, k, C64::new(v, im_at[i][k])));
                }
            }
        }
        best.map(|(_, i, k, lam0)| {
            let seed_cell = std::cell::Cell::new(lam0);
            let f = |p: [f64; 2]| -> f64 {
                let (eta, xik) = (p[0].abs(), p[1]);
                match refine_root(ev, seed_cell.get(), eta, xik / x, 1e-7) {
                    Some(root) => {
                        seed_cell.set(root);
                        -root.re
                    }
                    None => 1e9,
                }
            };
            let deta = etas[1] - etas[0];
            let dxi = xis[1] - xis[0];
            let (p, v) = nelder_mead_2d(&f, [etas[i], xis[k]], [deta, dxi], 1e-12, 200);
            let lam = seed_cell.get();
            LocalMax {
                re: -v,
                im: lam.im,
                eta: p[0].abs(),
                xi_x: p[1],
            }
        })
    };
    Ok(SpectralSurface {
        eta: etas,
        xi_x: xis,
        re_max,
        im_at_max: im_at,
        unstable_eta: unstable,
        critical,
        local_max,
    })
}

fn cheap_weierstrass(ev: &RollEvans) -> Result<WeierstrassCoeffs> {
    let opts = TaylorOptions {
        nodes: 48,
        convergence_check: false,
        ..Default::default()
    };
    let bundle = taylor_coeffs(ev, &opts)?;
    weierstrass_coeffs(&bundle)
}

/// Sharpen the neutral edge between grid rows i_lo (unstable) and i_hi
/// (stable): bisection in eta of the xi-maximized real part.
fn refine_eta_star(
    ev: &RollEvans,
    fam: &[Vec<Vec<Option<C64>>>; 2],
    etas: &[f64],
    xis: &[f64],
    x: f64,
    i_lo: usize,
    i_hi: usize,
) -> Result<CriticalPoint> {
    // starting column: the xi-argmax of the unstable row
    let n_xi = xis.len();
    let mut k0 = 0;
    let mut best = f64::NEG_INFINITY;
    let mut lam0 = C64::new(0.0, 0.0);
    for k in 0..n_xi {
        for famrow in fam.iter() {
            if let Some(v) = famrow[i_lo][k] {
                if v.re > best {
                    best = v.re;
                    k0 = k;
                    lam0 = v;
                }
            }
        }
    }
    let dxi = xis[1] - xis[0];
    // max over xi near column k0 at fixed eta, by golden section on the
    // Newton-continued root
    let max_at_eta = |eta: f64, lam_seed: C64, xik_seed: f64| -> Option<(f64, f64, C64)> {
        let seed_cell = std::cell::Cell::new(lam_seed);
        let f = |xik: f64| -> f64 {
            match refine_root(ev, seed_cell.get(), eta, xik / x, 1e-7) {
                Some(root) => {
                    seed_cell.set(root);
                    -root.re
                }
                None => 1e9,
            }
        };
        let (xbest, fneg) = golden_min(&f, xik_seed - 2.5 * dxi, xik_seed + 2.5 * dxi, 1e-7);
        if fneg >= 1e8 {
            return None;
        }
        Some((-fneg, xbest, seed_cell.get()))
    };
    let (mut a, mut b) = (etas[i_lo], etas[i_hi]);
    let mut xk = xis[k0];
    let mut lam = lam0;
    let mut crit = (lam0.im.abs(), etas[i_lo], xis[k0]);
    for _ in 0..40 {
        if (b - a) < 1e-4 * b.max(1.0) {
            break;
        }
        let mid = 0.5 * (a + b);
        match max_at_eta(mid, lam, xk) {
            Some((re, xbest, lroot)) => {
                xk = xbest;
                lam = lroot;
                if re > 0.0 {
                    a = mid;
                    crit = (lroot.im.abs(), mid, xbest);
                } else {
                    b = mid;
                    crit = (lroot.im.abs(), mid, xbest);
                }
            }
            None => {
                b = mid;
            }
        }
    }
    let eta_star = 0.5 * (a + b);
    Ok(CriticalPoint {
        tau: crit.0,
        eta: eta_star,
        xi_x: crit.2,
        l_star: std::f64::consts::PI / eta_star,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChannelBc {
    Wall,
    Periodic,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelVerdict {
    pub width: f64,
    pub bc: ChannelBc,
    pub stable: bool,
    pub first_unstable_mode: Option<usize>,
    /// lattice frequencies checked
    pub lattice: Vec<f64>,
}

/// Stability of a channel of width L by restriction of the whole-space
/// surface to the lattice eta_n = n pi / L (wall) or 2 n pi / L (periodic).
pub fn channel_verdict(surface: &SpectralSurface, width: f64, bc: ChannelBc) -> ChannelVerdict {
    let step = match bc {
        ChannelBc::Wall => std::f64::consts::PI / width,
        ChannelBc::Periodic => 2.0 * std::f64::consts::PI / width,
    };
    let eta_top = surface
        .unstable_eta
        .iter()
        .map(|iv| iv.1)
        .fold(0.0f64, f64::max);
    let mut lattice = Vec::new();
    let mut first_unstable = None;
    let mut n = 1;
    while n as f64 * step <= eta_top + step {
        let eta_n = n as f64 * step;
        lattice.push(eta_n);
        let inside = surface
            .unstable_eta
            .iter()
            .any(|&(lo, hi)| eta_n >= lo && eta_n <= hi);
        if inside && first_unstable.is_none() {
            first_unstable = Some(n);
        }
        n += 1;
        if n > 10_000 {
            break;
        }
    }
    ChannelVerdict {
        width,
        bc,
        stable: first_unstable.is_none(),
        first_unstable_mode: first_unstable,
        lattice,
    }
}

/// max over xi of Re lambda at eta = 0 (the 1d medium-frequency scan along
/// the continued root), plus the maximizing (lambda, xi).
pub fn onedim_max(ev: &RollEvans, n_xi: usize) -> Result<(f64, C64, f64)> {
    let x = ev.wave.period;
    let w = cheap_weierstrass(ev)?;
    let mut best: Option<(f64, C64, f64)> = None;
    for dir in [1.0f64, -1.0] {
        let mut lam = C64::new(0.0, 0.0);
        for i in 1..=n_xi {
            let xik = dir * std::f64::consts::PI * i as f64 / n_xi as f64;
            let guess = if i == 1 {
                let b = C64::new(w.b02 * xik * xik, w.b01_im * xik);
                -b
            } else {
                lam
            };
            match refine_root(ev, guess, 0.0, xik / x, 1e-8) {
                Some(root) => {
                    lam = root;
                    if best.map(|b| root.re > b.0).unwrap_or(true) {
                        best = Some((root.re, root, xik));
                    }
                }
                None => break,
            }
        }
    }
    best.ok_or_else(|| Error::ContinuationStalled("1d root continuation failed".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn channel_verdict_lattice_logic() {
        let surface = SpectralSurface {
            eta: vec![],
            xi_x: vec![],
            re_max: vec![],
            im_at_max: vec![],
            unstable_eta: vec![(16.2, 19.37)],
            critical: Some(CriticalPoint {
                tau: 3.2,
                eta: 19.37,
                xi_x: 0.337,
                l_star: std::f64::consts::PI / 19.37,
            }),
            local_max: None,
        };
        // wall, L = 0.15: first mode 20.9 > 19.37 -> stable
        let v = channel_verdict(&surface, 0.15, ChannelBc::Wall);
        assert!(v.stable);
        // wall, L = 0.18: first mode 17.45 inside -> unstable at mode 1
        let v = channel_verdict(&surface, 0.18, ChannelBc::Wall);
        assert!(!v.stable);
        assert_eq!(v.first_unstable_mode, Some(1));
        // periodic doubles the spacing
        let v = channel_verdict(&surface, 0.18, ChannelBc::Periodic);
        assert!(v.stable);
        let v = channel_verdict(&surface, 0.36, ChannelBc::Periodic);
        assert!(!v.stable);
        // narrow limit always stable
        let v = channel_verdict(&surface, 0.01, ChannelBc::Wall);
        assert!(v.stable);
    }
}
