//! Index conventions for superoperators on `d×d` matrices.
//!
//! A matrix `ρ` is vectorized row-major: `⟨i,j|ρ̂⟩ = ⟨i|ρ|j⟩`, composite index
//! `i·d + j`. In this basis of matrix units a map `T` has the transfer matrix
//! `T̂[(i,j),(k,l)] = ⟨i|T(|k⟩⟨l|)|j⟩`, so `ρ ↦ AρB†` becomes `A ⊗ conj(B)`.
//!
//! The involution `Γ` reshuffles indices as
//! `Γ(M)[(i,j),(k,l)] = M[(i,k),(j,l)]`. For `d = 2` and the identity map,
//! `T̂ = 𝟙₄` has ones at `(00,00), (01,01), (10,10), (11,11)`; these land at
//! `Γ` positions `(00,00), (00,11), (11,00), (11,11)`, i.e. `|Ω⟩⟨Ω|` with
//! `|Ω⟩ = |00⟩ + |11⟩`. The Choi matrix is `T̂^Γ = d·(T⊗id)(ω)` with
//! `ω = |Ω⟩⟨Ω|/d`; literature that drops the factor `d` differs by a scale.
//!
//! The flip `𝔽|a,b⟩ = |b,a⟩` acts as `(𝔽M𝔽)[(i,j),(k,l)] = M[(j,i),(l,k)]`.
//! A map is Hermiticity preserving iff `𝔽T̂𝔽 = conj(T̂)`.

use ndarray::{Array1, Array2};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{adjoint, exact_sqrt, kron, CMat};
use crate::scalar::{re, Cx, Real};

/// Dimension `d` of a `d²×d²` superoperator.
pub fn superop_dim<R: Real>(m: &CMat<R>) -> Result<usize> {
    let (rows, cols) = m.dim();
    if rows != cols {
        return Err(Error::Parse(format!("expected square matrix, got {rows}x{cols}")));
    }
    exact_sqrt(rows).filter(|&d| d > 0).ok_or(Error::NotASquareOfSquare(rows))
}

/// `Γ(M)[(i,j),(k,l)] = M[(i,k),(j,l)]`, a pure index permutation.
pub fn involution_gamma<R: Real>(m: &CMat<R>) -> Result<CMat<R>> {
    let d = superop_dim(m)?;
    Ok(Array2::from_shape_fn((d * d, d * d), |(r, c)| {
        let (i, j) = (r / d, r % d);
        let (k, l) = (c / d, c % d);
        m[[i * d + k, j * d + l]]
    }))
}

/// `𝔽·M·𝔽`.
pub fn flip_conjugate<R: Real>(m: &CMat<R>, d: usize) -> CMat<R> {
    Array2::from_shape_fn((d * d, d * d), |(r, c)| {
        let (i, j) = (r / d, r % d);
        let (k, l) = (c / d, c % d);
        m[[j * d + i, l * d + k]]
    })
}

/// The permutation matrix `𝔽` itself.
pub fn flip_matrix<R: Real>(d: usize) -> CMat<R> {
    Array2::from_shape_fn((d * d, d * d), |(r, c)| {
        let (i, j) = (r / d, r % d);
        if c == j * d + i {
            Cx::one()
        } else {
            Cx::zero()
        }
    })
}

/// `‖𝔽M𝔽 − conj(M)‖∞`.
pub fn hermiticity_violation<R: Real>(m: &CMat<R>, d: usize) -> R {
    crate::linalg::norm_inf(&(flip_conjugate(m, d) - m.mapv(|z| z.conj())))
}

/// Unnormalized `|Ω⟩ = Σᵢ |i,i⟩`.
pub fn omega_unnormalized<R: Real>(d: usize) -> Array1<Cx<R>> {
    Array1::from_shape_fn(d * d, |r| if r / d == r % d { Cx::one() } else { Cx::zero() })
}

/// Orthonormal basis of `span{|Ω⟩}⊥` as the columns of a `d²×(d²−1)` matrix.
///
/// Columns are the off-diagonal units `|i,j⟩` (`i ≠ j`, row-major order)
/// followed by the diagonal vectors `(Σ_{k<l}|k,k⟩ − l|l,l⟩)/√(l(l+1))`.
pub fn omega_perp_basis<R: Real>(d: usize) -> CMat<R> {
    let n = d * d;
    let mut b = Array2::from_elem((n, n - 1), Cx::zero());
    let mut col = 0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                b[[i * d + j, col]] = Cx::one();
                col += 1;
            }
        }
    }
    for l in 1..d {
        let norm = R::from_usize_lossy(l * (l + 1)).sqrt();
        for k in 0..l {
            b[[k * d + k, col]] = re(R::one() / norm);
        }
        b[[l * d + l, col]] = re(-R::from_usize_lossy(l) / norm);
        col += 1;
    }
    b
}

/// `B†·M·B` with `B` from [`omega_perp_basis`].
pub fn compress_omega_perp<R: Real>(m: &CMat<R>, d: usize) -> CMat<R> {
    let b = omega_perp_basis::<R>(d);
    adjoint(&b).dot(m).dot(&b)
}

/// Transfer matrix of the projector `ω⊥ = 𝟙 − |Ω⟩⟨Ω|/d`.
pub fn omega_perp_projector<R: Real>(d: usize) -> CMat<R> {
    let omega = omega_unnormalized::<R>(d);
    let inv_d = re(R::one() / R::from_usize_lossy(d));
    Array2::from_shape_fn((d * d, d * d), |(r, c)| {
        let id: Cx<R> = if r == c { Cx::one() } else { Cx::zero() };
        id - omega[r] * omega[c].conj() * inv_d
    })
}

/// Row-major vectorization.
pub fn vectorize<R: Real>(rho: &CMat<R>) -> Array1<Cx<R>> {
    Array1::from_iter(rho.iter().copied())
}

pub fn unvectorize<R: Real>(v: &Array1<Cx<R>>, d: usize) -> CMat<R> {
    Array2::from_shape_fn((d, d), |(i, j)| v[i * d + j])
}

/// Superoperator of `ρ ↦ A·ρ·B†`.
pub fn sandwich<R: Real>(a: &CMat<R>, b: &CMat<R>) -> CMat<R> {
    kron(a, &b.mapv(|z| z.conj()))
}

/// Superoperator of `ρ ↦ A·ρ`.
pub fn left_multiplication<R: Real>(a: &CMat<R>) -> CMat<R> {
    kron(a, &crate::linalg::identity(a.nrows()))
}

/// Superoperator of `ρ ↦ ρ·B`.
pub fn right_multiplication<R: Real>(b: &CMat<R>) -> CMat<R> {
    kron(&crate::linalg::identity(b.nrows()), &b.t().to_owned())
}
