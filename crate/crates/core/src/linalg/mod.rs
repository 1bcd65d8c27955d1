//! Dense complex linear algebra for the small matrices that appear here
//! (at most 64×64): LU, a Schur-based general eigensolver, Hermitian
//! eigendecomposition and the matrix exponential.

mod eig;
mod expm;
mod lu;

pub use eig::{eig, hermitian_eig, schur, EigenDecomposition, HermitianEigen, Schur};
pub use expm::expm;
pub use lu::{determinant, inverse, Lu};

use ndarray::Array2;
use num_traits::{One, Zero};

use crate::scalar::{Cx, Real};

/// Dense complex matrix.
pub type CMat<R> = Array2<Cx<R>>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("matrix is singular to working precision")]
    Singular,
    #[error("QR iteration did not converge after {0} iterations")]
    NoConvergence(usize),
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
}

pub fn identity<R: Real>(n: usize) -> CMat<R> {
    Array2::from_shape_fn((n, n), |(i, j)| if i == j { Cx::one() } else { Cx::zero() })
}

pub fn zeros<R: Real>(n: usize, m: usize) -> CMat<R> {
    Array2::from_elem((n, m), Cx::zero())
}

pub fn adjoint<R: Real>(a: &CMat<R>) -> CMat<R> {
    a.t().mapv(|z| z.conj())
}

pub fn conj<R: Real>(a: &CMat<R>) -> CMat<R> {
    a.mapv(|z| z.conj())
}

pub fn scale<R: Real>(a: &CMat<R>, s: Cx<R>) -> CMat<R> {
    a.mapv(|z| z * s)
}

/// Kronecker product with row-major composite indices: `(a ⊗ b)[(i,k),(j,l)] = a[i,j]·b[k,l]`.
pub fn kron<R: Real>(a: &CMat<R>, b: &CMat<R>) -> CMat<R> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    Array2::from_shape_fn((ar * br, ac * bc), |(r, c)| {
        a[[r / br, c / bc]] * b[[r % br, c % bc]]
    })
}

/// Maximum absolute row sum.
pub fn norm_inf<R: Real>(a: &CMat<R>) -> R {
    a.rows()
        .into_iter()
        .map(|row| row.iter().map(|z| z.norm()).sum::<R>())
        .fold(R::zero(), R::max)
}

/// Maximum absolute column sum.
pub fn norm_1<R: Real>(a: &CMat<R>) -> R {
    a.columns()
        .into_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<R>())
        .fold(R::zero(), R::max)
}

pub fn norm_fro<R: Real>(a: &CMat<R>) -> R {
    a.iter().map(|z| z.norm_sqr()).sum::<R>().sqrt()
}

/// Largest entry modulus.
pub fn max_abs<R: Real>(a: &CMat<R>) -> R {
    a.iter().map(|z| z.norm()).fold(R::zero(), R::max)
}

pub fn trace<R: Real>(a: &CMat<R>) -> Cx<R> {
    a.diag().iter().copied().fold(Cx::zero(), |acc, z| acc + z)
}

/// `(A + A†)/2`.
pub fn hermitian_part<R: Real>(a: &CMat<R>) -> CMat<R> {
    let half = R::lit(0.5);
    let n = a.nrows();
    Array2::from_shape_fn((n, n), |(i, j)| (a[[i, j]] + a[[j, i]].conj()) * half)
}

/// `‖A − A†‖∞`.
pub fn anti_hermitian_residual<R: Real>(a: &CMat<R>) -> R {
    norm_inf(&(a - &adjoint(a)))
}

pub fn is_square<R: Real>(a: &CMat<R>) -> Result<usize, LinalgError> {
    let (rows, cols) = a.dim();
    if rows == cols {
        Ok(rows)
    } else {
        Err(LinalgError::NotSquare { rows, cols })
    }
}

/// Square root of a dimension that must be a perfect square.
pub fn exact_sqrt(n: usize) -> Option<usize> {
    let mut r = (n as f64).sqrt().round() as usize;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    (r * r == n).then_some(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    #[test]
    fn kron_index_convention() {
        let a: CMat<f64> = Array2::from_shape_fn((2, 2), |(i, j)| cx((2 * i + j) as f64, 0.0));
        let b: CMat<f64> = Array2::from_shape_fn((2, 2), |(i, j)| cx(0.0, (2 * i + j + 1) as f64));
        let k = kron(&a, &b);
        for i in 0..2 {
            for j in 0..2 {
                for p in 0..2 {
                    for q in 0..2 {
                        assert_eq!(k[[i * 2 + p, j * 2 + q]], a[[i, j]] * b[[p, q]]);
                    }
                }
            }
        }
    }

    #[test]
    fn exact_sqrt_detects_squares() {
        assert_eq!(exact_sqrt(16), Some(4));
        assert_eq!(exact_sqrt(64), Some(8));
        assert_eq!(exact_sqrt(1), Some(1));
        assert_eq!(exact_sqrt(15), None);
        assert_eq!(exact_sqrt(0), Some(0));
    }
}
