//! Adaptive Dormand-Prince 5(4) integration, generic over the state type.

use crate::error::{Error, Result};

/// Minimal vector-space interface the integrator needs.
pub trait OdeState: Clone {
    fn zero_like(&self) -> Self;
    /// self += a * x
    fn axpy(&mut self, a: f64, x: &Self);
    fn norm(&self) -> f64;
}

impl OdeState for Vec<f64> {
    fn zero_like(&self) -> Self {
        vec![0.0; self.len()]
    }
    fn axpy(&mut self, a: f64, x: &Self) {
        for (s, v) in self.iter_mut().zip(x.iter()) {
            *s += a * v;
        }
    }
    fn norm(&self) -> f64 {
        self.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

impl<T, R, C, S> OdeState for nalgebra::Matrix<T, R, C, S>
where
    T: nalgebra::ComplexField<RealField = f64> + Copy,
    R: nalgebra::Dim,
    C: nalgebra::Dim,
    S: nalgebra::RawStorageMut<T, R, C> + nalgebra::Storage<T, R, C> + Clone,
{
    fn zero_like(&self) -> Self {
        let mut z = self.clone();
        z.fill(T::zero());
        z
    }
    fn axpy(&mut self, a: f64, x: &Self) {
        let af = T::from_real(a);
        for (s, v) in self.iter_mut().zip(x.iter()) {
            *s += af * *v;
        }
    }
    fn norm(&self) -> f64 {
        self.iter().map(|v| v.modulus() * v.modulus()).sum::<f64>().sqrt()
    }
}

pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    pub max_step: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-10,
            atol: 1e-12,
            max_steps: 2_000_000,
            max_step: f64::INFINITY,
        }
    }
}

const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrate dy/dx = f(x, y) from x0 to x1 (either direction). The optional
/// observer sees every accepted (x, y).
pub fn integrate<S: OdeState>(
    f: &dyn Fn(f64, &S) -> S,
    x0: f64,
    x1: f64,
    y0: S,
    opts: &OdeOptions,
    mut observer: Option<&mut dyn FnMut(f64, &S)>,
) -> Result<S> {
    let dir = if x1 >= x0 { 1.0 } else { -1.0 };
    let span = (x1 - x0).abs();
    if span == 0.0 {
        return Ok(y0);
    }
    let mut x = x0;
    let mut y = y0;
    let mut h = (span / 100.0).min(opts.max_step) * dir;
    if let Some(obs) = observer.as_deref_mut() {
        obs(x, &y);
    }
    let mut k: Vec<S> = Vec::with_capacity(7);
    for _step in 0..opts.max_steps {
        if (x1 - x) * dir <= span * 1e-14 {
            return Ok(y);
        }
        if (x + h - x1) * dir > 0.0 {
            h = x1 - x;
        }
        k.clear();
        k.push(f(x, &y));
        for i in 0..6 {
            let mut yi = y.clone();
            for (j, kj) in k.iter().enumerate() {
                let a = A[i][j];
                if a != 0.0 {
                    yi.axpy(h * a, kj);
                }
            }
            k.push(f(x + h * row_c(i), &yi));
        }
        let mut y5 = y.clone();
        let mut err = y.zero_like();
        for (j, kj) in k.iter().enumerate() {
            if B5[j] != 0.0 {
                y5.axpy(h * B5[j], kj);
            }
            let d = B5[j] - B4[j];
            if d != 0.0 {
                err.axpy(h * d, kj);
            }
        }
        let scale = opts.atol + opts.rtol * y.norm().max(y5.norm());
        let errn = err.norm() / scale;
        if errn <= 1.0 {
            x += h;
            y = y5;
            if let Some(obs) = observer.as_deref_mut() {
                obs(x, &y);
            }
        }
        let fac = if errn > 0.0 {
            0.9 * errn.powf(-0.2)
        } else {
            5.0
        };
        let fac = fac.clamp(0.2, 5.0);
        h *= fac;
        if h.abs() > opts.max_step {
            h = opts.max_step * dir;
        }
        if h.abs() < 1e-14 * span && (x1 - x) * dir > span * 1e-13 {
            return Err(Error::Integration(format!(
                "step size underflow at x = {x:.6e} (|h| = {:.3e})",
                h.abs()
            )));
        }
    }
    Err(Error::Integration(format!(
        "max step count exceeded integrating [{x0}, {x1}]"
    )))
}

fn row_c(i: usize) -> f64 {
    const C: [f64; 6] = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
    C[i]
}
