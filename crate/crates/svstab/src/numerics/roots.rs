//! Root finding: complex polynomial roots (Aberth-Ehrlich with Newton
//! polish), scalar bisection/Newton, and a damped Newton for complex-valued
//! functions of one complex variable with numeric derivatives.

use num_complex::Complex64 as C64;

/// All roots of a complex polynomial c[0] + c[1] z + ... + c[n] z^n.
pub fn poly_roots(coeffs: &[C64]) -> Vec<C64> {
    let mut c: Vec<C64> = coeffs.to_vec();
    while let Some(last) = c.last() {
        if last.norm() < 1e-300 && c.len() > 1 {
            c.pop();
        } else {
            break;
        }
    }
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return vec![];
    }
    // initial guesses on a circle scaled by the Cauchy bound
    let lead = c[n].norm();
    let bound = 1.0
        + c[..n]
            .iter()
            .map(|a| a.norm() / lead)
            .fold(0.0f64, f64::max);
    let mut z: Vec<C64> = (0..n)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * (k as f64 + 0.35) / n as f64;
            C64::from_polar(0.5 * bound, th) + C64::new(0.1, 0.1)
        })
        .collect();
    let eval = |x: C64| -> (C64, C64) {
        let mut p = C64::new(0.0, 0.0);
        let mut dp = C64::new(0.0, 0.0);
        for &a in c.iter().rev() {
            dp = dp * x + p;
            p = p * x + a;
        }
        (p, dp)
    };
    for _ in 0..200 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let newton = if dp.norm() > 0.0 { p / dp } else { C64::new(1e-8, 0.0) };
            let mut sum = C64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let d = z[i] - z[j];
                    if d.norm() > 1e-14 {
                        sum += 1.0 / d;
                    }
                }
            }
            let denom = C64::new(1.0, 0.0) - newton * sum;
            let step = if denom.norm() > 1e-14 { newton / denom } else { newton };
            z[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-15 * bound.max(1.0) {
            break;
        }
    }
    // Newton polish
    for zi in z.iter_mut() {
        for _ in 0..6 {
            let (p, dp) = eval(*zi);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            *zi -= step;
            if step.norm() < 1e-16 * (zi.norm() + 1.0) {
                break;
            }
        }
    }
    z
}

/// Bisection to `xtol`, then Newton polish with numeric derivative. The
/// bracket must have opposite signs.
pub fn bisect_newton(
    f: &dyn Fn(f64) -> f64,
    mut a: f64,
    mut b: f64,
    xtol: f64,
) -> Option<f64> {
    let (mut fa, fb) = (f(a), f(b));
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 || (b - a).abs() < xtol {
            return Some(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    let mut x = 0.5 * (a + b);
    for _ in 0..4 {
        let h = 1e-7 * (1.0 + x.abs());
        let d = (f(x + h) - f(x - h)) / (2.0 * h);
        if d == 0.0 {
            break;
        }
        let step = f(x) / d;
        if !step.is_finite() {
            break;
        }
        x -= step;
    }
    Some(x)
}

/// Damped Newton for a complex scalar equation f(z) = 0 with central-difference
/// derivative. Returns the root and |f| there.
pub fn newton_complex(
    f: &dyn Fn(C64) -> C64,
    z0: C64,
    ftol: f64,
    max_iter: usize,
) -> Option<(C64, f64)> {
    let mut z = z0;
    let mut fz = f(z);
    let scale = |z: C64| 1e-6 * (1.0 + z.norm());
    for _ in 0..max_iter {
        if fz.norm() <= ftol {
            return Some((z, fz.norm()));
        }
        let h = scale(z);
        let df = (f(z + C64::new(h, 0.0)) - f(z - C64::new(h, 0.0))) / (2.0 * h);
        if df.norm() == 0.0 || !df.re.is_finite() || !df.im.is_finite() {
            return None;
        }
        let mut step = fz / df;
        // damping: halve until residual decreases
        let mut accepted = false;
        for _ in 0..25 {
            let cand = z - step;
            let fc = f(cand);
            if fc.norm() < fz.norm() {
                z = cand;
                fz = fc;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if fz.norm() <= ftol {
        Some((z, fz.norm()))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_roots_recovered() {
        // (z - 1)(z - 2i)(z + 3) = z^3 + (2 - 2i) z^2 + (-3 - 4i) z + 6i
        let coeffs = vec![
            C64::new(0.0, 6.0),
            C64::new(-3.0, -4.0),
            C64::new(2.0, -2.0),
            C64::new(1.0, 0.0),
        ];
        let mut roots = poly_roots(&coeffs);
        roots.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((roots[0] - C64::new(-3.0, 0.0)).norm() < 1e-10);
        assert!((roots[1] - C64::new(0.0, 2.0)).norm() < 1e-10);
        assert!((roots[2] - C64::new(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect_newton(&|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn newton_complex_converges() {
        let f = |z: C64| z * z + 1.0;
        let (root, res) = newton_complex(&f, C64::new(0.3, 0.8), 1e-12, 50).unwrap();
        assert!(res < 1e-12);
        assert!((root - C64::new(0.0, 1.0)).norm() < 1e-8);
    }
}
