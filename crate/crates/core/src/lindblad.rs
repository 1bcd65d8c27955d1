//! Lindblad generators: validity test, decomposition into standard form,
//! construction from standard form, and evolution.
//!
//! Standard form used throughout:
//!
//! `L(ρ) = i[ρ, H] + Σ_ab G_ab (F_a ρ F_b† − ½{F_b†F_a, ρ})`
//!
//! where `F_1 … F_{d²−1}` are the generalized Gell-Mann matrices
//! (`tr F_a†F_b = 2δ_ab`, Pauli matrices for `d = 2`). Writing the CP part as
//! `φ(ρ) = Σ G_ab F_a ρ F_b†`, the same map reads `L(ρ) = φ(ρ) − κρ − ρκ†`
//! with `κ = iH + ½φ*(𝟙)`.

use ndarray::Array2;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::channel::{BasisTag, ChannelMatrix, OperatorBasis};
use crate::error::{Error, Result};
use crate::linalg::{self, adjoint, expm, hermitian_eig, identity, norm_inf, CMat};
use crate::scalar::{cx, re, Cx, Real};
use crate::superop::{
    compress_omega_perp, hermiticity_violation, involution_gamma, left_multiplication, omega_unnormalized,
    right_multiplication, sandwich, superop_dim, vectorize,
};

/// Matrix `L̂` of a candidate Liouvillian, in a given operator basis.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMatrix<R: Real = f64> {
    entries: CMat<R>,
    basis: OperatorBasis,
}

impl<R: Real> GeneratorMatrix<R> {
    pub fn new(entries: CMat<R>, basis: OperatorBasis) -> Result<Self> {
        // same shape rules as a transfer matrix
        let c = ChannelMatrix::new(entries, basis)?;
        Ok(Self { basis: c.basis(), entries: c.into_entries() })
    }

    /// Wraps a `d²×d²` matrix in matrix units.
    ///
    /// # Panics
    /// If the size is not a perfect square.
    pub fn from_matrix_units(entries: CMat<R>) -> Self {
        let d = superop_dim(&entries).expect("generator must be d²×d²");
        Self { entries, basis: OperatorBasis::matrix_units(d) }
    }

    pub fn zero(d: usize) -> Self {
        Self::from_matrix_units(linalg::zeros(d * d, d * d))
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

    pub fn to_matrix_units(&self) -> Self {
        match self.basis.tag {
            BasisTag::MatrixUnits => self.clone(),
            BasisTag::PauliNormalized => {
                let c = ChannelMatrix::new(self.entries.clone(), self.basis).expect("validated on construction");
                Self::from_matrix_units(c.to_matrix_units().into_entries())
            }
        }
    }

    pub fn scaled(&self, s: R) -> Self {
        Self { entries: self.entries.mapv(|z| z * s), basis: self.basis }
    }
}

/// Generalized Gell-Mann matrices of `M_d`, normalized to `tr F_a†F_b = 2δ_ab`.
///
/// Order: for each pair `j < k` the symmetric then the antisymmetric matrix,
/// then the diagonal ones. For `d = 2` this is `σx, σy, σz`.
pub fn gell_mann_basis<R: Real>(d: usize) -> Vec<CMat<R>> {
    let mut out = Vec::with_capacity(d * d - 1);
    let i = cx(R::zero(), R::one());
    for j in 0..d {
        for k in j + 1..d {
            let mut s = linalg::zeros::<R>(d, d);
            s[[j, k]] = Cx::one();
            s[[k, j]] = Cx::one();
            out.push(s);
            let mut a = linalg::zeros::<R>(d, d);
            a[[j, k]] = -i;
            a[[k, j]] = i;
            out.push(a);
        }
    }
    for l in 1..d {
        let norm = (R::lit(2.0) / R::from_usize_lossy(l * (l + 1))).sqrt();
        let mut m = linalg::zeros::<R>(d, d);
        for k in 0..l {
            m[[k, k]] = re(norm);
        }
        m[[l, l]] = re(-R::from_usize_lossy(l) * norm);
        out.push(m);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CcpReport<R: Real = f64> {
    pub is_ccp: bool,
    pub min_eigenvalue: R,
}

/// Conditional complete positivity: `ω⊥·L̂^Γ·ω⊥ ⪰ 0`.
///
/// The compression is formed in an explicit orthonormal basis of the
/// complement of `|ω⟩`, so the returned eigenvalue carries no spurious zero
/// mode. Accepts `min ≥ −tol·max(1, ‖L̂‖∞)`.
pub fn ccp_test<R: Real>(l: &GeneratorMatrix<R>, tol: R) -> Result<CcpReport<R>> {
    let mu = l.to_matrix_units();
    let d = mu.dim();
    let scale = norm_inf(&mu.entries).max(R::one());
    let violation = hermiticity_violation(&mu.entries, d);
    if violation > tol * scale {
        return Err(Error::NotHermiticityPreserving { violation: violation.as_f64() });
    }
    let a = compress_omega_perp(&involution_gamma(&mu.entries)?, d);
    let min_eigenvalue = hermitian_eig(&a)?.min();
    Ok(CcpReport { is_ccp: min_eigenvalue >= -tol * scale, min_eigenvalue })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeneratorReport<R: Real = f64> {
    pub hermitian: bool,
    pub unital_adjoint: bool,
    pub ccp: bool,
    pub valid: bool,
    pub hermiticity_violation: R,
    pub unitality_violation: R,
    /// Smallest eigenvalue of the compressed `L̂^Γ`; NaN when not Hermiticity preserving.
    pub min_eigenvalue: R,
}

/// Checks Hermiticity preservation, `L*(𝟙) = 0` and conditional complete positivity.
pub fn is_lindblad_generator<R: Real>(l: &GeneratorMatrix<R>, tol: R) -> GeneratorReport<R> {
    let mu = l.to_matrix_units();
    let d = mu.dim();
    let scale = norm_inf(&mu.entries).max(R::one());
    let herm = hermiticity_violation(&mu.entries, d);
    let omega = omega_unnormalized::<R>(d);
    let unital = adjoint(&mu.entries).dot(&omega).iter().map(|z| z.norm()).fold(R::zero(), R::max);
    let hermitian = herm <= tol * scale;
    let unital_adjoint = unital <= tol * scale;
    let (ccp, min_eigenvalue) = if hermitian {
        match ccp_test(&mu, tol) {
            Ok(r) => (r.is_ccp, r.min_eigenvalue),
            Err(_) => (false, R::nan()),
        }
    } else {
        (false, R::nan())
    };
    GeneratorReport {
        hermitian,
        unital_adjoint,
        ccp,
        valid: hermitian && unital_adjoint && ccp,
        hermiticity_violation: herm,
        unitality_violation: unital,
        min_eigenvalue,
    }
}

/// `H`, `G` and the derived `κ` of a generator in standard form.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladForm<R: Real = f64> {
    h: CMat<R>,
    g: CMat<R>,
    kappa: CMat<R>,
}

impl<R: Real> LindbladForm<R> {
    /// Validates `H = H†` and `G ⪰ −tol` (both relative to `max(1, ‖·‖∞)`).
    pub fn new(h: CMat<R>, g: CMat<R>, tol: R) -> Result<Self> {
        let form = Self::unchecked(h, g)?;
        let hs = norm_inf(&form.h).max(R::one());
        if linalg::anti_hermitian_residual(&form.h) > tol * hs {
            return Err(Error::InvalidForm("H is not Hermitian".into()));
        }
        let gs = norm_inf(&form.g).max(R::one());
        if linalg::anti_hermitian_residual(&form.g) > tol * gs {
            return Err(Error::InvalidForm("G is not Hermitian".into()));
        }
        let gmin = hermitian_eig(&form.g)?.min();
        if gmin < -tol * gs {
            return Err(Error::InvalidForm(format!("G has negative eigenvalue {gmin}")));
        }
        Ok(form)
    }

    /// Shape checks only; `G` may be indefinite.
    pub fn unchecked(h: CMat<R>, g: CMat<R>) -> Result<Self> {
        let d = linalg::is_square(&h)?;
        if d == 0 {
            return Err(Error::InvalidForm("empty Hamiltonian".into()));
        }
        let n = d * d - 1;
        if g.dim() != (n, n) {
            return Err(Error::DimensionMismatch { expected: n, found: g.nrows() });
        }
        let basis = gell_mann_basis::<R>(d);
        let mut phi_star = linalg::zeros::<R>(d, d);
        for a in 0..n {
            for b in 0..n {
                if g[[a, b]] != Cx::zero() {
                    phi_star = phi_star + linalg::scale(&adjoint(&basis[b]).dot(&basis[a]), g[[a, b]]);
                }
            }
        }
        let i = cx(R::zero(), R::one());
        let kappa = linalg::scale(&h, i) + phi_star.mapv(|z| z * R::lit(0.5));
        Ok(Self { h, g, kappa })
    }

    pub fn h(&self) -> &CMat<R> {
        &self.h
    }

    pub fn g(&self) -> &CMat<R> {
        &self.g
    }

    pub fn kappa(&self) -> &CMat<R> {
        &self.kappa
    }

    pub fn dim(&self) -> usize {
        self.h.nrows()
    }

    /// Diagonal form `φ(ρ) = Σ_k γ_k J_k ρ J_k†` with rates `γ_k` (descending)
    /// and jump operators `J_k = Σ_a u_k[a] F_a`; zero rates are dropped.
    pub fn jump_operators(&self, tol: R) -> Result<Vec<(R, CMat<R>)>> {
        let d = self.dim();
        let basis = gell_mann_basis::<R>(d);
        let he = hermitian_eig(&self.g)?;
        let cut = tol * norm_inf(&self.g).max(R::one());
        let mut out = Vec::new();
        for k in (0..he.values.len()).rev() {
            let rate = he.values[k];
            if rate.abs() <= cut {
                continue;
            }
            let j = basis
                .iter()
                .enumerate()
                .fold(linalg::zeros(d, d), |acc, (a, f)| acc + linalg::scale(f, he.vectors[[a, k]]));
            out.push((rate, j));
        }
        Ok(out)
    }
}

fn assemble<R: Real>(form: &LindbladForm<R>) -> GeneratorMatrix<R> {
    let d = form.dim();
    let n = d * d;
    let basis = gell_mann_basis::<R>(d);
    let i = cx(R::zero(), R::one());
    let half = R::lit(0.5);
    let mut l = linalg::scale(&(right_multiplication(&form.h) - left_multiplication(&form.h)), i);
    let mut anti = linalg::zeros::<R>(d, d);
    for a in 0..n - 1 {
        for b in 0..n - 1 {
            let gab = form.g[[a, b]];
            if gab == Cx::zero() {
                continue;
            }
            l = l + linalg::scale(&sandwich(&basis[a], &basis[b]), gab);
            anti = anti + linalg::scale(&adjoint(&basis[b]).dot(&basis[a]), gab);
        }
    }
    l = l - (left_multiplication(&anti) + right_multiplication(&anti)).mapv(|z| z * half);
    GeneratorMatrix::from_matrix_units(l)
}

/// Builds `L̂` from a validated standard form.
pub fn generator_from_form<R: Real>(form: &LindbladForm<R>, tol: R) -> Result<GeneratorMatrix<R>> {
    let checked = LindbladForm::new(form.h.clone(), form.g.clone(), tol)?;
    Ok(assemble(&checked))
}

/// Builds `L̂` from `H` and a Hermitian, possibly indefinite, `G`.
///
/// The result is Hermiticity preserving with `L*(𝟙) = 0` but is a valid
/// generator only when `G ⪰ 0`.
pub fn generator_from_parts<R: Real>(h: &CMat<R>, g: &CMat<R>) -> Result<GeneratorMatrix<R>> {
    let form = LindbladForm::unchecked(linalg::hermitian_part(h), linalg::hermitian_part(g))?;
    Ok(assemble(&form))
}

/// Recovers `(H, G, κ)` from a valid generator.
///
/// With `X = L̂^Γ` and `Π = 𝟙 − |ω⟩⟨ω|`, `ω = |Ω⟩/√d`:
/// `P = ΠXΠ`, `ψ = −ΠX|ω⟩ − ½⟨ω|X|ω⟩|ω⟩`, `κ[a,i] = ψ[a·d+i]/√d`,
/// `H = (κ − κ†)/(2i)` (traceless), `G_ab = ⟨F_a|P|F_b⟩/4`.
pub fn lindblad_decompose<R: Real>(l: &GeneratorMatrix<R>, tol: R) -> Result<LindbladForm<R>> {
    let report = is_lindblad_generator(l, tol);
    if !report.valid {
        return Err(Error::NotAGenerator(format!(
            "hermitian={}, unital_adjoint={}, ccp={} (min eigenvalue {})",
            report.hermitian, report.unital_adjoint, report.ccp, report.min_eigenvalue
        )));
    }
    let mu = l.to_matrix_units();
    let d = mu.dim();
    let n = d * d;
    let x = linalg::hermitian_part(&involution_gamma(&mu.entries)?);
    let sqrt_d = R::from_usize_lossy(d).sqrt();
    let w = omega_unnormalized::<R>(d).mapv(|z| z / sqrt_d);
    let xw = x.dot(&w);
    let wxw = w.iter().zip(xw.iter()).fold(Cx::<R>::zero(), |acc, (a, b)| acc + a.conj() * *b);
    let proj_xw = &xw - &w.mapv(|z| z * wxw);
    let psi = -(&proj_xw + &w.mapv(|z| z * wxw * R::lit(0.5)));
    let kappa = Array2::from_shape_fn((d, d), |(a, i)| psi[a * d + i] / sqrt_d);
    let two_i = cx(R::zero(), R::lit(2.0));
    let h = linalg::hermitian_part(&(&kappa - &adjoint(&kappa)).mapv(|z| z / two_i));

    let pi = identity::<R>(n) - Array2::from_shape_fn((n, n), |(r, c)| w[r] * w[c].conj());
    let p = pi.dot(&x).dot(&pi);
    let vecs: Vec<_> = gell_mann_basis::<R>(d).iter().map(vectorize).collect();
    let quarter = R::lit(0.25);
    let g = Array2::from_shape_fn((n - 1, n - 1), |(a, b)| {
        let pb = p.dot(&vecs[b]);
        vecs[a].iter().zip(pb.iter()).fold(Cx::zero(), |acc, (u, v)| acc + u.conj() * *v) * quarter
    });
    let g = linalg::hermitian_part(&g);
    let form = LindbladForm::unchecked(h, g)?;
    Ok(LindbladForm { kappa, ..form })
}

/// `exp(t·L̂)`, in the basis of `l`.
pub fn evolve<R: Real>(l: &GeneratorMatrix<R>, t: R) -> Result<ChannelMatrix<R>> {
    if !(t >= R::zero()) || !t.is_finite() {
        return Err(Error::RangeError { name: "t", value: t.as_f64(), expected: "finite t >= 0" });
    }
    let e = expm(&l.entries.mapv(|z| z * t))?;
    ChannelMatrix::new(e, l.basis)
}

/// Time-ordered exponential `𝒯 exp(∫₀^t L_s ds)` of a generator family.
///
/// Steps are midpoint exponentials `exp(h·L(t + h/2))`. Each step is
/// compared against two half steps; the step is accepted (using the two
/// half steps) once they agree to `1e-8` in `‖·‖∞`, otherwise halved. Fails
/// with [`Error::StepFailure`] when the step would drop below
/// `dt_max·1e-9`.
pub fn evolve_time_dependent<R, F>(mut family: F, t_final: R, dt_max: R) -> Result<ChannelMatrix<R>>
where
    R: Real,
    F: FnMut(R) -> Result<GeneratorMatrix<R>>,
{
    if !(t_final >= R::zero()) || !t_final.is_finite() {
        return Err(Error::RangeError { name: "t_final", value: t_final.as_f64(), expected: "finite t >= 0" });
    }
    if !(dt_max > R::zero()) {
        return Err(Error::RangeError { name: "dt_max", value: dt_max.as_f64(), expected: "dt_max > 0" });
    }
    let step_tol = R::lit(1e-8).max(R::lit(100.0) * R::epsilon());
    let dt_min = dt_max * R::lit(1e-9);
    let first = family(R::zero())?.to_matrix_units();
    let d = first.dim();
    let mut total = identity::<R>(d * d);
    let mut t = R::zero();
    let mut dt = dt_max;
    let mut gen = |s: R| -> Result<CMat<R>> {
        let g = family(s)?.to_matrix_units();
        if g.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: g.dim() });
        }
        Ok(g.entries)
    };
    let half = R::lit(0.5);
    let quarter = R::lit(0.25);
    while t < t_final {
        let h = dt.min(t_final - t);
        let full = expm(&gen(t + h * half)?.mapv(|z| z * h))?;
        let a = expm(&gen(t + h * quarter)?.mapv(|z| z * h * half))?;
        let b = expm(&gen(t + h * R::lit(0.75))?.mapv(|z| z * h * half))?;
        let fine = b.dot(&a);
        let err = norm_inf(&(&fine - &full));
        if err <= step_tol || h <= dt_min {
            if err > step_tol {
                return Err(Error::StepFailure { t: t.as_f64(), dt_min: dt_min.as_f64() });
            }
            total = fine.dot(&total);
            t = t + h;
            if err < step_tol * R::lit(0.01) {
                dt = (dt * R::lit(2.0)).min(dt_max);
            }
        } else {
            dt = h * half;
        }
    }
    let out = ChannelMatrix::from_matrix_units(total)?;
    crate::channel::change_basis(&out, first.basis)
}
