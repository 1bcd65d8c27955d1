//! Time-dependent Markovianity (infinitesimal divisibility) of qubit channels.
//!
//! For a real Pauli-basis `T̂` and the Minkowski metric `g = diag(1,−1,−1,−1)`,
//! `T̂ = L₁·diag(s)·L₂` with Lorentz transformations `L₁, L₂` for generic
//! channels. Then `T̂·g·T̂ᵀ·g = L₁·diag(s²)·L₁⁻¹`, so the `s_i` are the square
//! roots of its eigenvalues. A channel with `det T̂ > 0` is time-dependent
//! Markovian iff `s₁²s₄² ≥ ∏ s_i` for the sorted values, which compares the
//! extreme pair with the middle pair and is therefore sort-direction neutral.

use ndarray::Array2;
use serde::Serialize;

use crate::channel::{change_basis, ChannelMatrix, OperatorBasis};
use crate::error::{Error, Result};
use crate::linalg::{self, eig, CMat};
use crate::scalar::{re, Real};

/// Imaginary parts and negative parts of the `T̂gT̂ᵀg` spectrum below this are rounding.
const SPECTRUM_SLACK: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LorentzSingularValues<R: Real = f64> {
    /// Descending.
    pub s: [R; 4],
    pub det_t: R,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TdReport<R: Real = f64> {
    pub td_markovian: bool,
    pub s: LorentzSingularValues<R>,
}

/// Lorentz singular values of a qubit map.
///
/// When `det T̂ ≤ 0` the values are best effort (moduli of the spectrum) since
/// the criterion does not need them.
pub fn lorentz_singular_values<R: Real>(t: &ChannelMatrix<R>, tol: R) -> Result<LorentzSingularValues<R>> {
    if t.dim() != 2 {
        return Err(Error::NotQubit(t.dim()));
    }
    let p = change_basis(t, OperatorBasis::pauli())?;
    let scale = linalg::norm_inf(p.entries()).max(R::one());
    let imag = p.entries().iter().map(|z| z.im.abs()).fold(R::zero(), R::max);
    if imag > tol * scale {
        return Err(Error::NotHermiticityPreserving { violation: imag.as_f64() });
    }
    let real: CMat<R> = p.entries().mapv(|z| re(z.re));
    let det_t = linalg::determinant(&real)?.re;

    let g = Array2::from_diag(&ndarray::arr1(&[re(R::one()), re(-R::one()), re(-R::one()), re(-R::one())]));
    let m = real.dot(&g).dot(&real.t()).dot(&g);
    let values = eig(&m, R::zero())?.values;
    let slack = R::lit(SPECTRUM_SLACK) * linalg::norm_inf(&m).max(R::one());
    let positive = det_t > R::zero();
    let mut sq = [R::zero(); 4];
    for (k, z) in values.iter().enumerate() {
        if positive && z.im.abs() > slack {
            return Err(Error::ComplexLorentzSpectrum(z.im.abs().as_f64()));
        }
        if positive && z.re < -slack {
            return Err(Error::ComplexLorentzSpectrum(z.re.as_f64()));
        }
        sq[k] = if positive { z.re.max(R::zero()) } else { z.norm() };
    }
    let mut s = sq.map(|v| v.sqrt());
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    Ok(LorentzSingularValues { s, det_t })
}

/// `det T̂ > 0` and `s₁²s₄² ≥ ∏ s_i − tol`.
pub fn td_markovian_check<R: Real>(t: &ChannelMatrix<R>, tol: R) -> Result<TdReport<R>> {
    let s = lorentz_singular_values(t, tol)?;
    let [s1, s2, s3, s4] = s.s;
    let td_markovian = s.det_t > R::zero() && s1 * s1 * s4 * s4 >= s1 * s2 * s3 * s4 - tol;
    Ok(TdReport { td_markovian, s })
}
