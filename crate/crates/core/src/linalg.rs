//! Small dense complex linear-algebra helpers shared by the gate and
//! application modules.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type Matrix = DMatrix<Complex64>;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `e^{i angle}`.
#[inline]
pub fn cis(angle: f64) -> Complex64 {
    Complex64::from_polar(1.0, angle)
}

/// Largest entry-wise deviation of `m† m` from the identity.
pub fn unitarity_deviation(m: &Matrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let prod = m.adjoint() * m;
    let mut worst = 0.0_f64;
    for r in 0..prod.nrows() {
        for c in 0..prod.ncols() {
            let expected = if r == c { ONE } else { ZERO };
            worst = worst.max((prod[(r, c)] - expected).norm());
        }
    }
    worst
}

/// Largest entry-wise deviation of `m` from `m†`.
pub fn hermiticity_deviation(m: &Matrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let mut worst = 0.0_f64;
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            worst = worst.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    worst
}

/// Spectral norm (largest singular value).
pub fn operator_norm(m: &Matrix) -> f64 {
    m.clone()
        .singular_values()
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// Eigendecomposition of a normal 2x2 matrix: returns `(basis, d0, d1)` with
/// `m = basis · diag(d0, d1) · basis†` and `basis` unitary.
pub(crate) fn eig_normal_2x2(m: &Matrix) -> (Matrix, Complex64, Complex64) {
    let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    let scale = a.norm().max(b.norm()).max(c.norm()).max(d.norm()).max(1.0);
    if b.norm() <= 1e-15 * scale && c.norm() <= 1e-15 * scale {
        return (Matrix::identity(2, 2), a, d);
    }
    let tr = a + d;
    let disc = ((a - d) * (a - d) + 4.0 * b * c).sqrt();
    let lambda = (tr + disc) * 0.5;
    // Two candidate eigenvectors for `lambda`; keep the better conditioned one.
    let v1 = [b, lambda - a];
    let v2 = [lambda - d, c];
    let n1 = (v1[0].norm_sqr() + v1[1].norm_sqr()).sqrt();
    let n2 = (v2[0].norm_sqr() + v2[1].norm_sqr()).sqrt();
    let (v, n) = if n1 >= n2 { (v1, n1) } else { (v2, n2) };
    let e0 = [v[0] / n, v[1] / n];
    let e1 = [-e0[1].conj(), e0[0].conj()];
    let basis = Matrix::from_row_slice(2, 2, &[e0[0], e1[0], e0[1], e1[1]]);
    let rotated = basis.adjoint() * m * &basis;
    (basis, rotated[(0, 0)], rotated[(1, 1)])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_diff(a: &Matrix, b: &Matrix) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn eig_reconstructs_hadamard_and_rotations() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = Matrix::from_row_slice(
            2,
            2,
            &[s.into(), s.into(), s.into(), (-s).into()],
        );
        let ry = {
            let (c, sn) = (0.3_f64.cos(), 0.3_f64.sin());
            Matrix::from_row_slice(2, 2, &[c.into(), (-sn).into(), sn.into(), c.into()])
        };
        let near_id = Matrix::from_row_slice(
            2,
            2,
            &[cis(1e-9), Complex64::new(1e-12, 0.0), Complex64::new(-1e-12, 0.0), cis(-1e-9)],
        );
        for m in [h, ry, near_id] {
            let (basis, d0, d1) = eig_normal_2x2(&m);
            let diag = Matrix::from_diagonal(&nalgebra::DVector::from_vec(vec![d0, d1]));
            let rebuilt = &basis * diag * basis.adjoint();
            assert!(max_diff(&rebuilt, &m) < 1e-12, "{m}");
            assert!(unitarity_deviation(&basis) < 1e-12);
        }
    }

    #[test]
    fn deviations() {
        let id = Matrix::identity(4, 4);
        assert_eq!(unitarity_deviation(&id), 0.0);
        assert_eq!(hermiticity_deviation(&id), 0.0);
        let mut m = id.clone();
        m[(0, 1)] = Complex64::new(0.0, 1.0);
        assert!(hermiticity_deviation(&m) > 0.5);
        assert!(unitarity_deviation(&m) > 0.5);
        assert!((operator_norm(&(id * Complex64::new(2.0, 0.0))) - 2.0).abs() < 1e-12);
    }
}
