//! Eigenvalues and eigenvectors of 3x3 complex matrices via the
//! characteristic cubic, sized for the symbol computations where LAPACK would
//! be overkill.

use super::roots::poly_roots;
use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64 as C64;

/// Characteristic polynomial coefficients of a 3x3 matrix:
/// det(M - z I) = -z^3 + tr z^2 - m2 z + det, returned as
/// [det, -m2, tr, -1] (coefficients of z^0..z^3).
pub fn char_poly(m: &Matrix3<C64>) -> [C64; 4] {
    let tr = m[(0, 0)] + m[(1, 1)] + m[(2, 2)];
    let m2 = m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)]
        + m[(0, 0)] * m[(2, 2)] - m[(0, 2)] * m[(2, 0)]
        + m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let det = m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
        - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
        + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)]);
    [det, -m2, tr, -C64::new(1.0, 0.0)]
}

/// Eigenvalues sorted by descending real part (ties: descending imaginary).
pub fn eigenvalues(m: &Matrix3<C64>) -> [C64; 3] {
    let coeffs = char_poly(m);
    let roots = poly_roots(&coeffs);
    let mut r = [roots[0], roots[1], roots[2]];
    r.sort_by(|a, b| {
        b.re.partial_cmp(&a.re)
            .unwrap()
            .then(b.im.partial_cmp(&a.im).unwrap())
    });
    r
}

/// Unit eigenvector for a given eigenvalue: the kernel direction of (M - mu I)
/// obtained from the largest cross product of two rows.
pub fn eigenvector(m: &Matrix3<C64>, mu: C64) -> Vector3<C64> {
    let a = m - Matrix3::identity() * mu;
    let rows: [Vector3<C64>; 3] = [
        Vector3::new(a[(0, 0)], a[(0, 1)], a[(0, 2)]),
        Vector3::new(a[(1, 0)], a[(1, 1)], a[(1, 2)]),
        Vector3::new(a[(2, 0)], a[(2, 1)], a[(2, 2)]),
    ];
    let cross = |u: &Vector3<C64>, v: &Vector3<C64>| {
        Vector3::new(
            u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0],
        )
    };
    let candidates = [
        cross(&rows[0], &rows[1]),
        cross(&rows[0], &rows[2]),
        cross(&rows[1], &rows[2]),
    ];
    let mut best = candidates[0];
    let mut best_norm = best.norm();
    for c in &candidates[1..] {
        let n = c.norm();
        if n > best_norm {
            best = *c;
            best_norm = n;
        }
    }
    if best_norm < 1e-13 {
        // (M - mu I) has rank <= 1: any vector orthogonal to the largest row
        let mut krow = rows[0];
        for r in &rows[1..] {
            if r.norm() > krow.norm() {
                krow = *r;
            }
        }
        let e = if krow[0].norm() < 0.5 * krow.norm() {
            Vector3::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0))
        } else {
            Vector3::new(C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0))
        };
        let proj = krow.dotc(&e) / krow.dotc(&krow);
        let v = e - krow * proj;
        return v / C64::new(v.norm(), 0.0);
    }
    best / C64::new(best_norm, 0.0)
}

/// Adjugate of a 3x3 complex matrix.
pub fn adjugate3(a: &Matrix3<C64>) -> Matrix3<C64> {
    let cof = |i: usize, j: usize| -> C64 {
        let r = [(i + 1) % 3, (i + 2) % 3];
        let c = [(j + 1) % 3, (j + 2) % 3];
        a[(r[0], c[0])] * a[(r[1], c[1])] - a[(r[0], c[1])] * a[(r[1], c[0])]
    };
    Matrix3::from_fn(|i, j| cof(j, i))
}

/// Eigenvector for a simple eigenvalue mu with a phase that varies
/// continuously with the matrix entries: adj(M - mu I) has rank one with
/// columns parallel to the eigenvector, so adj * u for a fixed generic
/// reference u moves analytically; only the final normalization is by a
/// positive real. Winding-number scans rely on this continuity.
pub fn eigenvector_continuous(m: &Matrix3<C64>, mu: C64) -> Vector3<C64> {
    let a = m - Matrix3::identity() * mu;
    let adj = adjugate3(&a);
    let scale = adj.norm();
    // real references keep the conjugation symmetry v(conj) = conj(v)
    let refs = [
        Vector3::new(C64::new(1.0, 0.0), C64::new(0.73, 0.0), C64::new(0.41, 0.0)),
        Vector3::new(C64::new(-0.35, 0.0), C64::new(0.12, 0.0), C64::new(0.87, 0.0)),
    ];
    for u in refs {
        let v = adj * u;
        let n = v.norm();
        if n > 1e-10 * scale {
            return v / C64::new(n, 0.0);
        }
    }
    // adjugate nearly zero: fall back to the kernel routine
    eigenvector(m, mu)
}
