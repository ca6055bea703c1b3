//! Periodic Evans-Lopatinsky determinant E(lambda, eta, xi) for Dressler
//! roll waves: a two-dimensional regular-solution basis is seeded at the
//! sonic point by a polynomial recurrence in a transformed frame, evolved to
//! both cell ends, and contracted with the shock jump under the Floquet
//! brace {f}_xi = f(X-) - e^{i xi X} f(0+).

use crate::contour::{winding_number, Contour, ContourScan};
use crate::error::{Error, Result};
use crate::model::flux_matrices;
use crate::numerics::ode::{integrate, OdeOptions};
use crate::numerics::poly::{MatPoly, Poly};
use crate::profiles::{roll_cell_integrals, roll_wave, RollWaveProfile};
use nalgebra::{Matrix3, Matrix3x2, Vector3};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// Constant-matrix stacks of the transformed interior system around the sonic
/// point H = 1:
/// sum_i L_i (H-1)^i W_H = (sum_i P1_i + lambda P2_i + i eta P3_i (H-1)^i) W.
#[derive(Debug, Clone)]
pub struct RollCoeffs {
    pub l: Vec<Matrix3<f64>>,
    pub p1: Vec<Matrix3<f64>>,
    pub p2: Vec<Matrix3<f64>>,
    pub p3: Vec<Matrix3<f64>>,
    /// back transform w = T_r W
    pub t_r: Matrix3<f64>,
}

fn t_matrices(froude: f64) -> (Matrix3<f64>, Matrix3<f64>) {
    let f = froude;
    let t_l = Matrix3::new(
        1.0 / (-f * f + f + 2.0), 0.0, 0.0,
        0.0, 0.0, -1.0 / (f - 2.0),
        -(f - 1.0) / (f * f * (f - 2.0)), 1.0 / (f * (f - 2.0)), 0.0,
    );
    let t_r = Matrix3::new(
        1.0, 0.0, f / (f + 1.0),
        0.0, 0.0, 1.0,
        0.0, 1.0, 0.0,
    );
    (t_l, t_r)
}

/// Build the sonic-point series data for Froude number F (H_s = 1 scaling).
pub fn build_roll_coeffs(froude: f64) -> RollCoeffs {
    let f = froude;
    let f2 = f * f;
    let c = 1.0 + 1.0 / f;
    let (t_l, t_r) = t_matrices(f);
    let tl = MatPoly::constant(t_l);
    let tr = MatPoly::constant(t_r);
    let qp = Poly(vec![-1.0 / f, c]); // Q(H) = cH - 1/F
    let h = Poly::monomial(1.0, 1);
    let h2 = Poly::monomial(1.0, 2);
    let h3 = Poly::monomial(1.0, 3);
    // H' numerator and the quadratic common factor
    let hp_num = Poly(vec![1.0, -2.0 * f - 1.0, f2]); // F^2H^2 - 2FH - H + 1
    let cell = Poly(vec![1.0, 1.0, 1.0]); // H^2 + H + 1

    // A1_hat = H^2 A1
    let a1_hat = MatPoly::from_fn(|i, j| match (i, j) {
        (0, 0) => Poly::monomial(-c, 2),
        (0, 1) => h2.clone(),
        (1, 0) => h3.scale(1.0 / f2).add(&qp.mul(&qp).scale(-1.0)),
        (1, 1) => qp.mul(&h).scale(2.0).add(&Poly::monomial(-c, 2)),
        (2, 2) => Poly::monomial(-1.0 / f, 1), // H(Q/H - c) = -H/F
        _ => Poly::zero(),
    });
    // E_hat = H^3 E
    let e_hat = MatPoly::from_fn(|i, j| match (i, j) {
        (1, 0) => qp.mul(&qp).scale(2.0).add(&h3),
        (1, 1) => qp.mul(&h).scale(-2.0),
        (2, 2) => qp.mul(&h).scale(-1.0),
        _ => Poly::zero(),
    });
    // A2_hat = H A2
    let a2_hat = MatPoly::from_fn(|i, j| match (i, j) {
        (0, 2) => h.clone(),
        (1, 2) => qp.clone(),
        (2, 0) => h2.scale(1.0 / f2),
        _ => Poly::zero(),
    });
    // A1H_hat = H^3 dA1/dH
    let a1h_hat = MatPoly::from_fn(|i, j| match (i, j) {
        (1, 0) => h3.scale(1.0 / f2).add(&qp.scale(-2.0 / f)),
        (1, 1) => Poly::monomial(2.0 / f, 1),
        (2, 2) => Poly::monomial(1.0 / f, 1),
        _ => Poly::zero(),
    });

    // L = (F^2H^2 - 2FH - H + 1) T_l A1_hat T_r
    let l = tl.matmul(&a1_hat).matmul(&tr).scale_poly(&hp_num);
    // R1 = T_l [ (H^2+H+1) E_hat - (F^2H^2-2FH-H+1) A1H_hat ] T_r / H
    let inner = e_hat
        .scale_poly(&cell)
        .add(&a1h_hat.scale_poly(&hp_num).scale(-1.0));
    let p1 = tl.matmul(&inner).matmul(&tr).div_monomial(1);
    // R2 = -(H^2+H+1) H^2 T_l T_r
    let p2 = tl.matmul(&tr).scale_poly(&cell.mul(&h2)).scale(-1.0);
    // R3 (real part; assembled with i eta) = -(H^2+H+1) H T_l A2_hat T_r
    let p3 = tl
        .matmul(&a2_hat)
        .matmul(&tr)
        .scale_poly(&cell.mul(&h))
        .scale(-1.0);
    RollCoeffs {
        l: l.recenter(1.0).coefficient_stack(),
        p1: p1.recenter(1.0).coefficient_stack(),
        p2: p2.recenter(1.0).coefficient_stack(),
        p3: p3.recenter(1.0).coefficient_stack(),
        t_r,
    }
}

fn assemble(stacks: &RollCoeffs, lambda: C64, eta: C64) -> Vec<Matrix3<C64>> {
    let n = stacks.p1.len().max(stacks.p2.len()).max(stacks.p3.len());
    let ieta = C64::new(0.0, 1.0) * eta;
    (0..n)
        .map(|k| {
            let mut m = Matrix3::from_element(C64::new(0.0, 0.0));
            if let Some(a) = stacks.p1.get(k) {
                m += a.map(|v| C64::new(v, 0.0));
            }
            if let Some(a) = stacks.p2.get(k) {
                for i in 0..3 {
                    for j in 0..3 {
                        m[(i, j)] += lambda * a[(i, j)];
                    }
                }
            }
            if let Some(a) = stacks.p3.get(k) {
                for i in 0..3 {
                    for j in 0..3 {
                        m[(i, j)] += ieta * a[(i, j)];
                    }
                }
            }
            m
        })
        .collect()
}

/// The two regular-solution coefficient sequences at the sonic point,
/// following the printed null-space seeds; analytic in (lambda, eta).
pub struct RegularBasis {
    pub w1: Vec<Vector3<C64>>,
    pub w2: Vec<Vector3<C64>>,
}

/// Grow a regular series from seed W^(0) using the closure of the singular
/// third row; `l` and `p` are the (H-1)^n stacks.
fn regular_series(
    l: &[Matrix3<f64>],
    p: &[Matrix3<C64>],
    lambda: C64,
    w0: Vector3<C64>,
    order: usize,
) -> Result<Vec<Vector3<C64>>> {
    let mut w: Vec<Vector3<C64>> = vec![w0];
    let l1 = &l[1];
    let p0 = &p[0];
    for n in 0..order {
        // rows 0,1 of the order-n relation give the first two components
        let mut rhs = Vector3::from_element(C64::new(0.0, 0.0));
        for (i, li) in l.iter().enumerate().skip(1) {
            if n + 1 >= i && n + 1 - i < w.len() {
                let k = n + 1 - i;
                let liw = li.map(|v| C64::new(v, 0.0)) * w[k];
                rhs -= liw * C64::new(k as f64, 0.0);
            }
        }
        for (i, pi) in p.iter().enumerate() {
            if i > n {
                break;
            }
            rhs += pi * w[n - i];
        }
        let inv = C64::new(1.0 / (n as f64 + 1.0), 0.0);
        let c0 = rhs[0] * inv;
        let c1 = rhs[1] * inv;
        // third component from the third row of the order-(n+1) relation
        let denom = C64::new((n as f64 + 1.0) * l1[(2, 2)], 0.0) - p0[(2, 2)];
        if denom.norm() < 1e-12 * (1.0 + lambda.norm()) {
            return Err(Error::Domain(format!(
                "lambda = {lambda} hits the closure pole 2 lambda + {}(F-2) = 0",
                n + 1
            )));
        }
        let mut acc = C64::new(0.0, 0.0);
        // -(n+1) (L1[2,0] c0 + L1[2,1] c1) + P0[2,0] c0 + P0[2,1] c1
        acc -= C64::new((n as f64 + 1.0) * l1[(2, 0)], 0.0) * c0;
        acc -= C64::new((n as f64 + 1.0) * l1[(2, 1)], 0.0) * c1;
        acc += p0[(2, 0)] * c0 + p0[(2, 1)] * c1;
        // - sum_{i>=2} (n+2-i) L_i[2,:] W^{n+2-i}
        for (i, li) in l.iter().enumerate().skip(2) {
            if n + 2 >= i && n + 2 - i < w.len() {
                let k = n + 2 - i;
                let dot = w[k][0] * li[(2, 0)] + w[k][1] * li[(2, 1)] + w[k][2] * li[(2, 2)];
                acc -= dot * C64::new(k as f64, 0.0);
            }
        }
        // + sum_{i>=1} P_i[2,:] W^{n+1-i}
        for (i, pi) in p.iter().enumerate().skip(1) {
            if n + 1 >= i && n + 1 - i < w.len() {
                let k = n + 1 - i;
                acc += pi[(2, 0)] * w[k][0] + pi[(2, 1)] * w[k][1] + pi[(2, 2)] * w[k][2];
            }
        }
        let c2 = acc / denom;
        w.push(Vector3::new(c0, c1, c2));
    }
    Ok(w)
}

#[derive(Debug, Clone)]
pub struct RollOptions {
    pub series_order: usize,
    pub match_offset: f64,
    pub tail_tol: f64,
    pub rtol: f64,
    pub atol: f64,
}

impl Default for RollOptions {
    fn default() -> Self {
        RollOptions {
            series_order: 30,
            match_offset: 0.05,
            tail_tol: 1e-12,
            rtol: 1e-10,
            atol: 1e-12,
        }
    }
}

/// Periodic Evans-Lopatinsky evaluator for one roll wave.
pub struct RollEvans {
    pub wave: RollWaveProfile,
    coeffs: RollCoeffs,
    pub opts: RollOptions,
    /// cell integral of F H, denominator of the essential curve
    pub int_fh: f64,
    /// lambda_r(F): real part of the interior essential curve
    pub lambda_r: f64,
}

/// Cell-boundary data at fixed (lambda, eta) from which E(., ., xi) is a
/// quadratic polynomial in e^{i xi X}: E = c0 - e c1 + e^2 c2.
#[derive(Debug, Clone, Copy)]
pub struct PeriodicElData {
    pub c0: C64,
    pub c1: C64,
    pub c2: C64,
    pub period: f64,
}

impl PeriodicElData {
    pub fn eval(&self, xi: f64) -> C64 {
        let e = C64::from_polar(1.0, xi * self.period);
        self.c0 - e * self.c1 + e * e * self.c2
    }

    /// Exact k-th xi-derivative (k >= 0) at Floquet number xi.
    pub fn dxi(&self, xi: f64, k: u32) -> C64 {
        let e = C64::from_polar(1.0, xi * self.period);
        let ix = C64::new(0.0, self.period);
        if k == 0 {
            return self.eval(xi);
        }
        -(ix.powu(k)) * e * self.c1 + (2.0 * ix).powu(k) * e * e * self.c2
    }
}

impl RollEvans {
    pub fn new(wave: RollWaveProfile) -> Self {
        let coeffs = build_roll_coeffs(wave.params.froude);
        let (fh, res) = roll_cell_integrals(&wave);
        RollEvans {
            coeffs,
            opts: RollOptions::default(),
            int_fh: fh,
            lambda_r: res / fh,
            wave,
        }
    }

    pub fn from_params(froude: f64, h_minus: f64) -> Result<Self> {
        Ok(Self::new(roll_wave(froude, h_minus, 64)?))
    }

    fn check_domain(&self, lambda: C64) -> Result<()> {
        let f = self.wave.params.froude;
        if lambda.re <= -(f - 2.0) / 2.0 {
            return Err(Error::Domain(format!(
                "lambda = {lambda} outside the analyticity half-plane Re > {}",
                -(f - 2.0) / 2.0
            )));
        }
        Ok(())
    }

    /// Seed coefficients of the two regular solutions.
    pub fn regular_basis(&self, lambda: C64, eta: C64) -> Result<RegularBasis> {
        self.check_domain(lambda)?;
        let p = assemble(&self.coeffs, lambda, eta);
        let p0 = &p[0];
        // null-space seeds of the singular third row
        let w0_a = Vector3::new(-p0[(2, 2)], C64::new(0.0, 0.0), p0[(2, 0)]);
        let w0_b = Vector3::new(-p0[(2, 1)], p0[(2, 0)], C64::new(0.0, 0.0));
        let w1 = regular_series(&self.coeffs.l, &p, lambda, w0_a, self.opts.series_order)?;
        let w2 = regular_series(&self.coeffs.l, &p, lambda, w0_b, self.opts.series_order)?;
        Ok(RegularBasis { w1, w2 })
    }

    /// Evolve the basis from the sonic matching heights to the two cell ends
    /// and assemble the Floquet-independent boundary data.
    pub fn boundary_data(&self, lambda: C64, eta: C64) -> Result<PeriodicElData> {
        let basis = self.regular_basis(lambda, eta)?;
        let froude = self.wave.params.froude;
        let h_minus = self.wave.params.h_minus;
        let h_plus = self.wave.h_plus;
        // matching offsets with converged tails
        let mut off = self
            .opts
            .match_offset
            .min(0.25 * (1.0 - h_minus))
            .min(0.25 * (h_plus - 1.0));
        let tail = |w: &Vec<Vector3<C64>>, h: f64| -> f64 {
            let n = w.len();
            w[n - 3..]
                .iter()
                .enumerate()
                .map(|(k, v)| v.norm() * h.abs().powi((n - 3 + k) as i32))
                .sum()
        };
        let scale0 = basis.w1[0].norm().max(basis.w2[0].norm()).max(1.0);
        let mut guard = 0;
        while (tail(&basis.w1, off).max(tail(&basis.w2, off))) > self.opts.tail_tol * scale0
            && guard < 60
        {
            off *= 0.7;
            guard += 1;
        }
        if guard == 60 {
            return Err(Error::SeriesDiverged(format!(
                "sonic series tail not converged at lambda = {lambda}, eta = {eta}"
            )));
        }
        let eval = |w: &Vec<Vector3<C64>>, dh: f64| -> Vector3<C64> {
            let mut acc = Vector3::from_element(C64::new(0.0, 0.0));
            for v in w.iter().rev() {
                acc = acc * C64::new(dh, 0.0) + v;
            }
            acc
        };
        // joint evolution of both solutions: columns of a 3x2 state
        let p_stack = assemble(&self.coeffs, lambda, eta);
        let rhs = |h: f64, y: &Matrix3x2<C64>| -> Matrix3x2<C64> {
            let lmat = eval_stack_f64(&self.coeffs.l, h - 1.0);
            let pmat = eval_stack_c(&p_stack, h - 1.0);
            let lc = lmat.map(|v| C64::new(v, 0.0));
            let m = lc.lu().solve(&pmat).expect("L invertible away from sonic");
            m * y
        };
        let pack = |a: Vector3<C64>, b: Vector3<C64>| {
            Matrix3x2::from_columns(&[a, b])
        };
        let opts = OdeOptions {
            rtol: self.opts.rtol,
            atol: self.opts.atol,
            ..Default::default()
        };
        let start_minus = pack(eval(&basis.w1, -off), eval(&basis.w2, -off));
        let at_minus = integrate(&rhs, 1.0 - off, h_minus, start_minus, &opts, None)?;
        let start_plus = pack(eval(&basis.w1, off), eval(&basis.w2, off));
        let at_plus = integrate(&rhs, 1.0 + off, h_plus, start_plus, &opts, None)?;
        // back-transform w = T_r W and form A1 w at the ends
        let trc = self.coeffs.t_r.map(|v| C64::new(v, 0.0));
        let a1_at = |h: f64| -> Matrix3<C64> {
            let q = self.wave.momentum(h);
            flux_matrices(h, q, self.wave.c, froude)
                .expect("valid cell heights")
                .a1
                .map(|v| C64::new(v, 0.0))
        };
        let a1w_minus = a1_at(h_minus) * (trc * at_minus);
        let a1w_plus = a1_at(h_plus) * (trc * at_plus);
        // jump column [lambda F0 + i eta F2 - R] = (X-) minus (0+)
        let q_minus = self.wave.momentum(h_minus);
        let q_plus = self.wave.momentum(h_plus);
        let f2 = froude * froude;
        let r2 = |h: f64, q: f64| h - q * q / (h * h);
        let j = Vector3::new(
            lambda * (h_plus - h_minus),
            lambda * (q_plus - q_minus) - (r2(h_plus, q_plus) - r2(h_minus, q_minus)),
            C64::new(0.0, 1.0) * eta * ((h_plus * h_plus - h_minus * h_minus) / (2.0 * f2)),
        );
        let det3 = |a: &Vector3<C64>, b: &Vector3<C64>, c: &Vector3<C64>| -> C64 {
            a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
                + a[2] * (b[0] * c[1] - b[1] * c[0])
        };
        let ap1 = a1w_plus.column(0).into_owned();
        let ap2 = a1w_plus.column(1).into_owned();
        let am1 = a1w_minus.column(0).into_owned();
        let am2 = a1w_minus.column(1).into_owned();
        let c0 = det3(&j, &ap1, &ap2);
        let c1 = det3(&j, &ap1, &am2) + det3(&j, &am1, &ap2);
        let c2 = det3(&j, &am1, &am2);
        Ok(PeriodicElData {
            c0,
            c1,
            c2,
            period: self.wave.period,
        })
    }

    /// E(lambda, eta, xi) at real transverse frequency.
    pub fn el(&self, lambda: C64, eta: f64, xi: f64) -> Result<C64> {
        Ok(self
            .boundary_data(lambda, C64::new(eta, 0.0))?
            .eval(xi))
    }

    /// E at complex eta, as needed by the Cauchy contour integrals.
    pub fn el_complex(&self, lambda: C64, eta: C64, xi: f64) -> Result<C64> {
        Ok(self.boundary_data(lambda, eta)?.eval(xi))
    }

    /// Essential-curve point lambda_r + i xi X / int(F H).
    pub fn essential_lambda(&self, xi: f64) -> C64 {
        C64::new(self.lambda_r, xi * self.wave.period / self.int_fh)
    }
}

fn eval_stack_f64(stack: &[Matrix3<f64>], dh: f64) -> Matrix3<f64> {
    let mut acc = Matrix3::zeros();
    for m in stack.iter().rev() {
        acc = acc * dh + m;
    }
    acc
}

fn eval_stack_c(stack: &[Matrix3<C64>], dh: f64) -> Matrix3<C64> {
    let mut acc = Matrix3::from_element(C64::new(0.0, 0.0));
    for m in stack.iter().rev() {
        acc = acc.map(|v| v * dh) + m;
    }
    acc
}

/// lambda_r(F) for a roll wave (strictly negative).
pub fn lambda_r(wave: &RollWaveProfile) -> f64 {
    let (fh, res) = roll_cell_integrals(wave);
    res / fh
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RollScanReport {
    pub froude: f64,
    pub h_minus: f64,
    /// (eta, xi, winding)
    pub table: Vec<(f64, f64, i64)>,
    pub all_zero: bool,
    pub scans: Vec<ContourScan>,
}

/// Contour spec for roll-wave scans (half disc of radius R with fine center).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RollContourSpec {
    pub radius: f64,
    pub n_outer: usize,
    pub n_seg: usize,
    pub n_center: usize,
    pub max_refine: usize,
    pub keep_samples: bool,
}

impl Default for RollContourSpec {
    fn default() -> Self {
        RollContourSpec {
            radius: 5.0,
            n_outer: 400,
            n_seg: 120,
            n_center: 80,
            max_refine: 8,
            keep_samples: false,
        }
    }
}

/// Winding table over (eta, xi) pairs; xi values are folded into the first
/// Brillouin zone [-pi/X, pi/X).
pub fn scan_roll(
    wave: &RollWaveProfile,
    eta_list: &[f64],
    xi_list: &[f64],
    spec: &RollContourSpec,
) -> Result<RollScanReport> {
    let ev = RollEvans::new(wave.clone());
    let x = wave.period;
    let fold = |xi: f64| {
        let width = 2.0 * std::f64::consts::PI / x;
        let mut v = (xi + width / 2.0).rem_euclid(width) - width / 2.0;
        if v >= width / 2.0 {
            v -= width;
        }
        v
    };
    let mut table = Vec::new();
    let mut scans = Vec::new();
    for &eta in eta_list {
        for &xi in xi_list {
            let xi_f = fold(xi);
            let mut radius = spec.radius;
            let mut last_err = None;
            let mut done = false;
            for _try in 0..3 {
                let contour =
                    Contour::half_disc(radius, 0.05, spec.n_outer, spec.n_seg, spec.n_center);
                let f = |z: C64| {
                    ev.el(z, eta, xi_f)
                        .unwrap_or(C64::new(f64::NAN, f64::NAN))
                };
                match winding_number(&f, &contour, spec.max_refine) {
                    Ok((w, lam, vals)) => {
                        table.push((eta, xi_f, w));
                        if spec.keep_samples {
                            scans.push(ContourScan {
                                eta,
                                lambda: lam,
                                values: vals,
                                winding: w,
                            });
                        }
                        done = true;
                        break;
                    }
                    Err(e @ Error::ContourHit { .. }) => {
                        last_err = Some(e);
                        radius *= 1.013;
                    }
                    Err(e) => return Err(e),
                }
            }
            if !done {
                return Err(last_err.unwrap_or(Error::RootFinding(
                    "winding retries exhausted".into(),
                )));
            }
        }
    }
    let all_zero = table.iter().all(|t| t.2 == 0);
    Ok(RollScanReport {
        froude: wave.params.froude,
        h_minus: wave.params.h_minus,
        table,
        all_zero,
        scans,
    })
}
