//! Representations of linear maps on `d×d` matrices: transfer matrices in a
//! chosen operator basis, Choi matrices and Kraus sets.

use ndarray::Array2;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, adjoint, hermitian_eig, identity, norm_inf, CMat};
use crate::scalar::{cx, re, Cx, Real};
use crate::superop::{self, hermiticity_violation, involution_gamma, omega_unnormalized, superop_dim};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisTag {
    /// `|i⟩⟨j|`, ordered row-major (`i` major, `j` minor).
    MatrixUnits,
    /// `{𝟙, σx, σy, σz}/√2`; qubits only.
    #[serde(rename = "pauli")]
    PauliNormalized,
}

/// Orthonormal operator basis (w.r.t. `⟨A,B⟩ = tr[A†B]`) of `M_d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OperatorBasis {
    pub tag: BasisTag,
    pub dim: usize,
}

impl OperatorBasis {
    pub fn new(tag: BasisTag, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::UnsupportedBasis("dimension must be positive".into()));
        }
        if tag == BasisTag::PauliNormalized && dim != 2 {
            return Err(Error::UnsupportedBasis(format!("Pauli basis requires d = 2, got d = {dim}")));
        }
        Ok(Self { tag, dim })
    }

    pub fn matrix_units(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        Self { tag: BasisTag::MatrixUnits, dim }
    }

    pub fn pauli() -> Self {
        Self { tag: BasisTag::PauliNormalized, dim: 2 }
    }
}

/// `{𝟙, σx, σy, σz}`, unnormalized.
pub fn pauli_matrices<R: Real>() -> [CMat<R>; 4] {
    let o = Cx::zero();
    let l = Cx::one();
    let i = cx(R::zero(), R::one());
    [
        ndarray::array![[l, o], [o, l]],
        ndarray::array![[o, l], [l, o]],
        ndarray::array![[o, -i], [i, o]],
        ndarray::array![[l, o], [o, -l]],
    ]
}

/// Unitary `V` whose column `α` is the row-major vectorization of `F_α = σ_α/√2`.
///
/// A transfer matrix converts as `T̂_pauli = V†·T̂_units·V`, which realizes
/// `T̂_{αβ} = tr[F_α† T(F_β)]`.
pub fn pauli_change_matrix<R: Real>() -> CMat<R> {
    let s = re(R::one() / R::lit(2.0).sqrt());
    let paulis = pauli_matrices::<R>();
    Array2::from_shape_fn((4, 4), |(r, alpha)| paulis[alpha][[r / 2, r % 2]] * s)
}

/// Transfer matrix `T̂` of a linear map together with its operator basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix<R: Real = f64> {
    entries: CMat<R>,
    basis: OperatorBasis,
}

impl<R: Real> ChannelMatrix<R> {
    pub fn new(entries: CMat<R>, basis: OperatorBasis) -> Result<Self> {
        let d = superop_dim(&entries)?;
        if d != basis.dim {
            return Err(Error::DimensionMismatch { expected: basis.dim, found: d });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Parse("non-finite matrix entry".into()));
        }
        Ok(Self { entries, basis })
    }

    pub fn from_matrix_units(entries: CMat<R>) -> Result<Self> {
        let d = superop_dim(&entries)?;
        Self::new(entries, OperatorBasis::matrix_units(d))
    }

    /// Wraps a real Pauli-basis `4×4` matrix.
    pub fn from_pauli_real(m: [[R; 4]; 4]) -> Self {
        let entries = Array2::from_shape_fn((4, 4), |(i, j)| re(m[i][j]));
        Self { entries, basis: OperatorBasis::pauli() }
    }

    pub fn identity(d: usize) -> Self {
        Self { entries: identity(d * d), basis: OperatorBasis::matrix_units(d) }
    }

    pub fn entries(&self) -> &CMat<R> {
        &self.entries
    }

    pub fn into_entries(self) -> CMat<R> {
        self.entries
    }

    pub fn basis(&self) -> OperatorBasis {
        self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim
    }

    /// Same map expressed in matrix units.
    pub fn to_matrix_units(&self) -> Self {
        match self.basis.tag {
            BasisTag::MatrixUnits => self.clone(),
            BasisTag::PauliNormalized => {
                let v = pauli_change_matrix::<R>();
                Self { entries: v.dot(&self.entries).dot(&adjoint(&v)), basis: OperatorBasis::matrix_units(2) }
            }
        }
    }

    /// Acts on a `d×d` matrix.
    pub fn apply(&self, rho: &CMat<R>) -> Result<CMat<R>> {
        let d = self.dim();
        if rho.dim() != (d, d) {
            return Err(Error::DimensionMismatch { expected: d, found: rho.nrows() });
        }
        let mu = self.to_matrix_units();
        Ok(superop::unvectorize(&mu.entries.dot(&superop::vectorize(rho)), d))
    }
}

/// `T̂^Γ = d·(T⊗id)(ω)`; positive semidefinite iff the map is completely positive.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix<R: Real = f64> {
    entries: CMat<R>,
    dim: usize,
}

impl<R: Real> ChoiMatrix<R> {
    pub fn new(entries: CMat<R>) -> Result<Self> {
        let dim = superop_dim(&entries)?;
        Ok(Self { entries, dim })
    }

    pub fn entries(&self) -> &CMat<R> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn to_channel(&self) -> ChannelMatrix<R> {
        let t = involution_gamma(&self.entries).expect("Choi size validated on construction");
        ChannelMatrix { entries: t, basis: OperatorBasis::matrix_units(self.dim) }
    }

    /// Partial trace over the first tensor factor; equals `𝟙` iff the map is trace preserving.
    pub fn partial_trace_first(&self) -> CMat<R> {
        let d = self.dim;
        Array2::from_shape_fn((d, d), |(j, l)| {
            (0..d).fold(Cx::zero(), |acc, i| acc + self.entries[[i * d + j, i * d + l]])
        })
    }

    /// Kraus operators from the eigendecomposition `C = Σ λ_k |v_k⟩⟨v_k|`,
    /// `K_k[a,i] = √λ_k · v_k[a·d + i]`.
    ///
    /// Eigenvalues in `[−tol·max(1,‖C‖∞), 0)` are clamped to zero; anything
    /// more negative means the map is not completely positive.
    pub fn kraus(&self, tol: R) -> Result<KrausSet<R>> {
        let d = self.dim;
        let scale = norm_inf(&self.entries).max(R::one());
        let he = hermitian_eig(&self.entries)?;
        if he.min() < -tol * scale {
            return Err(Error::NotAChannel(format!("Choi matrix has eigenvalue {}", he.min())));
        }
        let mut ops = Vec::new();
        for (k, &lam) in he.values.iter().enumerate().rev() {
            if lam <= R::zero() {
                continue;
            }
            let s = lam.sqrt();
            ops.push(Array2::from_shape_fn((d, d), |(a, i)| he.vectors[[a * d + i, k]] * s));
        }
        if ops.is_empty() {
            ops.push(linalg::zeros(d, d));
        }
        KrausSet::new(ops)
    }
}

/// Kraus operators `{K_a}` of a completely positive map `ρ ↦ Σ K_a ρ K_a†`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet<R: Real = f64> {
    ops: Vec<CMat<R>>,
    dim: usize,
}

impl<R: Real> KrausSet<R> {
    pub fn new(ops: Vec<CMat<R>>) -> Result<Self> {
        let first = ops.first().ok_or_else(|| Error::Parse("empty Kraus set".into()))?;
        let dim = first.nrows();
        if dim == 0 {
            return Err(Error::Parse("empty Kraus operator".into()));
        }
        for k in &ops {
            if k.nrows() != k.ncols() {
                return Err(Error::Parse(format!("Kraus operator is {}x{}", k.nrows(), k.ncols())));
            }
            if k.nrows() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: k.nrows() });
            }
        }
        Ok(Self { ops, dim })
    }

    pub fn ops(&self) -> &[CMat<R>] {
        &self.ops
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `‖Σ K_a†K_a − 𝟙‖∞`.
    pub fn completeness_residual(&self) -> R {
        let sum = self.ops.iter().fold(linalg::zeros(self.dim, self.dim), |acc, k| acc + adjoint(k).dot(k));
        norm_inf(&(sum - identity::<R>(self.dim)))
    }
}

/// A density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<R: Real = f64>(CMat<R>);

impl<R: Real> DensityMatrix<R> {
    pub fn new(rho: CMat<R>, tol: R) -> Result<Self> {
        let d = linalg::is_square(&rho)?;
        if d == 0 {
            return Err(Error::Parse("empty density matrix".into()));
        }
        let scale = norm_inf(&rho).max(R::one());
        if linalg::anti_hermitian_residual(&rho) > tol * scale {
            return Err(Error::Parse("density matrix is not Hermitian".into()));
        }
        if (linalg::trace(&rho) - Cx::one()).norm() > tol * scale {
            return Err(Error::Parse("density matrix trace differs from 1".into()));
        }
        if hermitian_eig(&rho)?.min() < -tol * scale {
            return Err(Error::Parse("density matrix is not positive semidefinite".into()));
        }
        Ok(Self(rho))
    }

    pub fn matrix(&self) -> &CMat<R> {
        &self.0
    }

    /// Pure state `|ψ⟩⟨ψ|` for a normalized `ψ`.
    pub fn pure(psi: &[Cx<R>]) -> Self {
        let n = psi.len();
        Self(Array2::from_shape_fn((n, n), |(i, j)| psi[i] * psi[j].conj()))
    }
}

/// `T̂ = Σ_a K_a ⊗ conj(K_a)` in matrix units.
pub fn transfer_from_kraus<R: Real>(kraus: &KrausSet<R>) -> ChannelMatrix<R> {
    let d = kraus.dim();
    let entries = kraus
        .ops()
        .iter()
        .fold(linalg::zeros(d * d, d * d), |acc, k| acc + superop::sandwich(k, k));
    ChannelMatrix { entries, basis: OperatorBasis::matrix_units(d) }
}

/// Channel `ρ ↦ UρU†`.
pub fn unitary_channel<R: Real>(u: &CMat<R>) -> Result<ChannelMatrix<R>> {
    Ok(transfer_from_kraus(&KrausSet::new(vec![u.clone()])?))
}

pub fn choi_of<R: Real>(t: &ChannelMatrix<R>) -> ChoiMatrix<R> {
    let mu = t.to_matrix_units();
    let entries = involution_gamma(&mu.entries).expect("transfer matrix has d²×d² shape");
    ChoiMatrix { entries, dim: mu.dim() }
}

/// Diagnostic summary of [`verify_channel`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelReport<R: Real = f64> {
    pub hermiticity_preserving: bool,
    pub trace_preserving: bool,
    pub completely_positive: bool,
    pub min_choi_eigenvalue: R,
    pub hermiticity_violation: R,
    pub trace_violation: R,
}

impl<R: Real> ChannelReport<R> {
    pub fn is_channel(&self) -> bool {
        self.hermiticity_preserving && self.trace_preserving && self.completely_positive
    }
}

/// Checks Hermiticity preservation, trace preservation and complete positivity.
pub fn verify_channel<R: Real>(t: &ChannelMatrix<R>, tol: R) -> ChannelReport<R> {
    let d = t.dim();
    let herm_violation = match t.basis.tag {
        BasisTag::PauliNormalized => t.entries.iter().map(|z| z.im.abs()).fold(R::zero(), R::max),
        BasisTag::MatrixUnits => hermiticity_violation(&t.entries, d),
    };
    let mu = t.to_matrix_units();
    let scale = norm_inf(&mu.entries).max(R::one());
    let omega = omega_unnormalized::<R>(d);
    let fixed = adjoint(&mu.entries).dot(&omega);
    let trace_violation = fixed.iter().zip(omega.iter()).map(|(a, b)| (*a - *b).norm()).fold(R::zero(), R::max);
    let hermiticity_preserving = herm_violation <= tol * scale;

    let choi = choi_of(&mu);
    let choi_scale = norm_inf(&choi.entries).max(R::one());
    let min_choi_eigenvalue = hermitian_eig(&choi.entries).map(|e| e.min()).unwrap_or_else(|_| R::nan());
    ChannelReport {
        hermiticity_preserving,
        trace_preserving: trace_violation <= tol * scale,
        completely_positive: hermiticity_preserving && min_choi_eigenvalue >= -tol * choi_scale,
        min_choi_eigenvalue,
        hermiticity_violation: herm_violation,
        trace_violation,
    }
}

/// `T₂∘T₁`, i.e. `T̂₂·T̂₁`, expressed in the basis of `t2`.
pub fn compose<R: Real>(t2: &ChannelMatrix<R>, t1: &ChannelMatrix<R>) -> Result<ChannelMatrix<R>> {
    if t2.dim() != t1.dim() {
        return Err(Error::DimensionMismatch { expected: t2.dim(), found: t1.dim() });
    }
    let t1 = change_basis(t1, t2.basis)?;
    Ok(ChannelMatrix { entries: t2.entries.dot(&t1.entries), basis: t2.basis })
}

/// `p·T₁ + (1−p)·T₂`, expressed in the basis of `t1`.
pub fn mix<R: Real>(t1: &ChannelMatrix<R>, t2: &ChannelMatrix<R>, p: R) -> Result<ChannelMatrix<R>> {
    if !(p >= R::zero() && p <= R::one()) {
        return Err(Error::RangeError { name: "p", value: p.as_f64(), expected: "0 <= p <= 1" });
    }
    if t2.dim() != t1.dim() {
        return Err(Error::DimensionMismatch { expected: t1.dim(), found: t2.dim() });
    }
    let t2 = change_basis(t2, t1.basis)?;
    let entries = t1.entries.mapv(|z| z * p) + t2.entries.mapv(|z| z * (R::one() - p));
    Ok(ChannelMatrix { entries, basis: t1.basis })
}

pub fn change_basis<R: Real>(t: &ChannelMatrix<R>, target: OperatorBasis) -> Result<ChannelMatrix<R>> {
    let target = OperatorBasis::new(target.tag, target.dim)?;
    if target.dim != t.dim() {
        return Err(Error::DimensionMismatch { expected: target.dim, found: t.dim() });
    }
    if target.tag == t.basis.tag {
        return Ok(t.clone());
    }
    let mu = t.to_matrix_units();
    match target.tag {
        BasisTag::MatrixUnits => Ok(mu),
        BasisTag::PauliNormalized => {
            let v = pauli_change_matrix::<R>();
            Ok(ChannelMatrix { entries: adjoint(&v).dot(&mu.entries).dot(&v), basis: target })
        }
    }
}

/// `det(T̂)`, which is real for Hermiticity-preserving maps.
///
/// An imaginary residue up to `tol·max(1, |det|)` is discarded.
pub fn determinant<R: Real>(t: &ChannelMatrix<R>, tol: R) -> Result<R> {
    let det = linalg::determinant(&t.entries)?;
    if det.im.abs() > tol * det.norm().max(R::one()) {
        return Err(Error::NonRealDeterminant { imag: det.im.as_f64() });
    }
    Ok(det.re)
}
