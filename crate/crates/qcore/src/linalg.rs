//! Thin helpers over `nalgebra` dense complex matrices.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
pub use num_complex::Complex64 as C64;

use crate::{QError, QResult};

pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn from_real_rows(rows: &[&[f64]]) -> CMatrix {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    CMatrix::from_fn(n, m, |i, j| c(rows[i][j], 0.0))
}

pub fn dagger(m: &CMatrix) -> CMatrix {
    m.adjoint()
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn kron_all(ms: &[CMatrix]) -> CMatrix {
    ms.iter()
        .fold(identity(1), |acc, m| acc.kronecker(m))
}

pub fn outer(a: &CVector, b: &CVector) -> CMatrix {
    a * b.adjoint()
}

pub fn projector(v: &CVector) -> CMatrix {
    outer(v, v)
}

pub fn trace(m: &CMatrix) -> C64 {
    m.trace()
}

/// Largest absolute entry of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && max_abs_diff(m, &m.adjoint()) <= tol
}

pub fn is_unitary(u: &CMatrix, tol: f64) -> bool {
    u.is_square() && max_abs_diff(&(u.adjoint() * u), &identity(u.nrows())) <= tol
}

pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * c(0.5, 0.0)
}

pub fn ensure_square(m: &CMatrix) -> QResult<usize> {
    if m.is_square() {
        Ok(m.nrows())
    } else {
        Err(QError::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        })
    }
}

/// Eigen-decomposition of a Hermitian matrix. The input is symmetrized first.
pub fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let e = SymmetricEigen::new(hermitize(m));
    (e.eigenvalues.iter().copied().collect(), e.eigenvectors)
}

pub fn eigvalsh(m: &CMatrix) -> Vec<f64> {
    eigh(m).0
}

/// Applies a real function to the spectrum of a Hermitian matrix.
pub fn hermitian_map(m: &CMatrix, f: impl Fn(f64) -> C64) -> CMatrix {
    let (vals, vecs) = eigh(m);
    let d = CMatrix::from_diagonal(&CVector::from_iterator(
        vals.len(),
        vals.iter().map(|&x| f(x)),
    ));
    &vecs * d * vecs.adjoint()
}

/// `exp(i t H)` for Hermitian `H`.
pub fn expm_i_hermitian(h: &CMatrix, t: f64) -> CMatrix {
    hermitian_map(h, |x| C64::from_polar(1.0, t * x))
}

/// Square root of a positive semidefinite matrix (negative eigenvalues clipped).
pub fn sqrtm_psd(m: &CMatrix) -> CMatrix {
    hermitian_map(m, |x| c(x.max(0.0).sqrt(), 0.0))
}

/// Frobenius norm.
pub fn fro_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Trace distance ½‖A − B‖₁ between Hermitian matrices.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    0.5 * eigvalsh(&(a - b)).iter().map(|x| x.abs()).sum::<f64>()
}

pub fn pauli_x() -> CMatrix {
    from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn pauli_z() -> CMatrix {
    from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expm_of_pauli_x_is_rotation() {
        let t = 0.3;
        let u = expm_i_hermitian(&pauli_x(), t);
        let want = identity(2) * c(t.cos(), 0.0) + pauli_x() * c(0.0, t.sin());
        assert!(max_abs_diff(&u, &want) < 1e-12);
        assert!(is_unitary(&u, 1e-12));
    }

    #[test]
    fn sqrt_squares_back() {
        let m = from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let s = sqrtm_psd(&m);
        assert!(max_abs_diff(&(&s * &s), &m) < 1e-12);
    }

    #[test]
    fn kron_all_of_nothing_is_scalar_one() {
        assert_eq!(kron_all(&[]), identity(1));
    }
}
