//! Dense real-coefficient polynomials and 3x3 matrix polynomials in one
//! variable, with the rational bookkeeping needed to assemble the hybrid-ODE
//! coefficient matrices (products of flux matrices carry powers of 1/H that
//! must cancel before the series recurrences apply).

use nalgebra::Matrix3;
use num_complex::Complex64;

pub type C64 = Complex64;

/// Polynomial with real coefficients, `coeffs[k]` multiplying `x^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn zero() -> Self {
        Poly(vec![])
    }

    pub fn constant(c: f64) -> Self {
        Poly(vec![c])
    }

    /// x^k with coefficient c.
    pub fn monomial(c: f64, k: usize) -> Self {
        let mut v = vec![0.0; k + 1];
        v[k] = c;
        Poly(v)
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_c(&self, x: C64) -> C64 {
        self.0
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, &c| acc * x + c)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let mut v = vec![0.0; n];
        for (i, c) in self.0.iter().enumerate() {
            v[i] += c;
        }
        for (i, c) in other.0.iter().enumerate() {
            v[i] += c;
        }
        Poly(v)
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly(self.0.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.0.is_empty() || other.0.is_empty() {
            return Poly::zero();
        }
        let mut v = vec![0.0; self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Poly(v)
    }

    pub fn deriv(&self) -> Poly {
        if self.0.len() <= 1 {
            return Poly::zero();
        }
        Poly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| k as f64 * c)
                .collect(),
        )
    }

    /// Divide by x^k; the low-order coefficients must vanish (relative to the
    /// largest coefficient) or this panics, catching assembly mistakes early.
    pub fn div_monomial(&self, k: usize) -> Poly {
        let scale = self.0.iter().fold(0.0f64, |m, c| m.max(c.abs())).max(1.0);
        for i in 0..k.min(self.0.len()) {
            assert!(
                self.0[i].abs() <= 1e-9 * scale,
                "non-vanishing coefficient {} of x^{} while dividing by x^{}",
                self.0[i],
                i,
                k
            );
        }
        if self.0.len() <= k {
            return Poly::zero();
        }
        Poly(self.0[k..].to_vec())
    }

    /// Coefficients of the same polynomial written in powers of (x - c)
    /// (Taylor shift by repeated synthetic division).
    pub fn recenter(&self, c: f64) -> Poly {
        let n = self.0.len();
        let mut work = self.0.clone();
        let mut out = vec![0.0; n];
        for slot in out.iter_mut().take(n) {
            if work.is_empty() {
                break;
            }
            let d = work.len() - 1;
            let mut q = vec![0.0; d];
            let mut carry = 0.0;
            for j in (1..=d).rev() {
                let b = work[j] + c * carry;
                q[j - 1] = b;
                carry = b;
            }
            *slot = work[0] + c * carry;
            work = q;
        }
        Poly(out)
    }
}

/// 3x3 matrix with polynomial entries.
#[derive(Debug, Clone)]
pub struct MatPoly(pub [[Poly; 3]; 3]);

impl MatPoly {
    pub fn zero() -> Self {
        MatPoly(std::array::from_fn(|_| std::array::from_fn(|_| Poly::zero())))
    }

    pub fn from_fn(f: impl Fn(usize, usize) -> Poly) -> Self {
        MatPoly(std::array::from_fn(|i| std::array::from_fn(|j| f(i, j))))
    }

    pub fn constant(m: Matrix3<f64>) -> Self {
        Self::from_fn(|i, j| Poly::constant(m[(i, j)]))
    }

    pub fn scale_poly(&self, p: &Poly) -> MatPoly {
        Self::from_fn(|i, j| self.0[i][j].mul(p))
    }

    pub fn add(&self, other: &MatPoly) -> MatPoly {
        Self::from_fn(|i, j| self.0[i][j].add(&other.0[i][j]))
    }

    pub fn scale(&self, s: f64) -> MatPoly {
        Self::from_fn(|i, j| self.0[i][j].scale(s))
    }

    pub fn matmul(&self, other: &MatPoly) -> MatPoly {
        Self::from_fn(|i, j| {
            let mut acc = Poly::zero();
            for k in 0..3 {
                acc = acc.add(&self.0[i][k].mul(&other.0[k][j]));
            }
            acc
        })
    }

    pub fn transpose(&self) -> MatPoly {
        Self::from_fn(|i, j| self.0[j][i].clone())
    }

    pub fn div_monomial(&self, k: usize) -> MatPoly {
        Self::from_fn(|i, j| self.0[i][j].div_monomial(k))
    }

    pub fn recenter(&self, c: f64) -> MatPoly {
        Self::from_fn(|i, j| self.0[i][j].recenter(c))
    }

    pub fn eval(&self, x: f64) -> Matrix3<f64> {
        Matrix3::from_fn(|i, j| self.0[i][j].eval(x))
    }

    pub fn eval_c(&self, x: C64) -> Matrix3<C64> {
        Matrix3::from_fn(|i, j| self.0[i][j].eval_c(x))
    }

    /// Adjugate (transposed cofactor matrix), so that
    /// self * adjugate = det * Id.
    pub fn adjugate(&self) -> MatPoly {
        let m = &self.0;
        let cof = |i: usize, j: usize| -> Poly {
            let r = [(i + 1) % 3, (i + 2) % 3];
            let c = [(j + 1) % 3, (j + 2) % 3];
            let a = m[r[0]][c[0]].mul(&m[r[1]][c[1]]);
            let b = m[r[0]][c[1]].mul(&m[r[1]][c[0]]);
            a.add(&b.scale(-1.0))
        };
        // cyclic index trick already encodes the sign pattern; adj = cof^T
        MatPoly::from_fn(|i, j| cof(j, i))
    }

    pub fn max_degree(&self) -> usize {
        let mut d = 0;
        for i in 0..3 {
            for j in 0..3 {
                d = d.max(self.0[i][j].degree());
            }
        }
        d
    }

    /// Stack of constant matrices M_k with M(x) = sum_k M_k (x - c)^k when the
    /// polynomial is already written in the (x - c) basis (k ranges to degree).
    pub fn coefficient_stack(&self) -> Vec<Matrix3<f64>> {
        let d = self.max_degree();
        (0..=d)
            .map(|k| {
                Matrix3::from_fn(|i, j| *self.0[i][j].0.get(k).unwrap_or(&0.0))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recenter_matches_direct_eval() {
        let p = Poly(vec![1.0, -2.0, 0.5, 3.0]); // 1 - 2x + 0.5x^2 + 3x^3
        let q = p.recenter(0.7);
        for &x in &[0.0, 0.3, 1.9, -2.0] {
            let direct = p.eval(x);
            let shifted = q.eval(x - 0.7);
            assert!((direct - shifted).abs() < 1e-12 * (1.0 + direct.abs()));
        }
    }

    #[test]
    fn div_monomial_strips_zeros() {
        let p = Poly(vec![0.0, 0.0, 2.0, -1.0]);
        let q = p.div_monomial(2);
        assert_eq!(q.0, vec![2.0, -1.0]);
    }

    #[test]
    fn adjugate_identity() {
        let a = MatPoly::from_fn(|i, j| Poly(vec![1.0 + (i * 3 + j) as f64, 0.5 * j as f64]));
        let adj = a.adjugate();
        let prod = a.matmul(&adj);
        let x = 1.3;
        let pa = a.eval(x);
        let det = pa.determinant();
        let pm = prod.eval(x);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { det } else { 0.0 };
                assert!((pm[(i, j)] - expect).abs() < 1e-9 * (1.0 + det.abs()));
            }
        }
    }

    #[test]
    fn matpoly_product_evaluates() {
        let a = MatPoly::from_fn(|i, j| Poly(vec![(i + j) as f64, 1.0]));
        let b = MatPoly::from_fn(|i, j| Poly(vec![1.0, (i * j) as f64]));
        let prod = a.matmul(&b);
        let x = 0.37;
        let direct = a.eval(x) * b.eval(x);
        let via = prod.eval(x);
        assert!((direct - via).norm() < 1e-12);
    }
}
