//! Markovianity decision for a channel snapshot.
//!
//! A branch `L̂_m` is a valid generator iff
//! `A(m) = A₀ + Σ_c m_c A_c ⪰ 0`, where `A₀ = ω⊥·L̂₀^Γ·ω⊥` and
//! `A_c = 2πi·ω⊥·(P_c − 𝔽·conj(P_c)·𝔽)^Γ·ω⊥` are compressed onto the
//! complement of the maximally entangled vector. Adding isotropic noise
//! `−μ·ω⊥` to a branch shifts `A(m)` by `μ/d`, so the least noise that makes
//! some branch valid is `μ_min = d·max(0, −max_m λ_min(A(m)))`, and
//! `M(T) = exp(−μ_min·(d²−1))`.
//!
//! The integer search covers the box `‖m‖∞ ≤ m_max` in shells of increasing
//! `‖m‖∞`, lexicographic within a shell. A `NOT_MARKOVIAN` verdict means no
//! valid branch inside that box, and `μ_min` is an upper bound on the
//! infimum over all branches.

use serde::Serialize;

use crate::channel::ChannelMatrix;
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::lindblad::GeneratorMatrix;
use crate::linalg::{self, hermitian_eig, norm_inf, CMat};
use crate::scalar::{cx, Real};
use crate::spectral::{branch_log, eigendecompose, principal_log, BranchIndex, SpectralData};
use crate::superop::{compress_omega_perp, involution_gamma, omega_perp_projector};

/// Compressed matrices `A₀` and `A_c` (Hermitian).
#[derive(Debug, Clone)]
pub struct AMatrices<R: Real = f64> {
    a0: CMat<R>,
    ac: Vec<CMat<R>>,
    hermitian_residual: R,
}

impl<R: Real> AMatrices<R> {
    /// Wraps explicit matrices; all must be square, of one size, and Hermitian
    /// to `tol` relative to their norm. Stored symmetrized.
    pub fn new(a0: CMat<R>, ac: Vec<CMat<R>>, tol: R) -> Result<Self> {
        let n = linalg::is_square(&a0)?;
        let mut residual = R::zero();
        for a in std::iter::once(&a0).chain(ac.iter()) {
            if a.dim() != (n, n) {
                return Err(Error::DimensionMismatch { expected: n, found: a.nrows() });
            }
            let r = linalg::anti_hermitian_residual(a);
            if r > tol * norm_inf(a).max(R::one()) {
                return Err(Error::NotHermiticityPreserving { violation: r.as_f64() });
            }
            residual = residual.max(r);
        }
        Ok(Self {
            a0: linalg::hermitian_part(&a0),
            ac: ac.iter().map(linalg::hermitian_part).collect(),
            hermitian_residual: residual,
        })
    }

    pub fn a0(&self) -> &CMat<R> {
        &self.a0
    }

    pub fn ac(&self) -> &[CMat<R>] {
        &self.ac
    }

    pub fn num_pairs(&self) -> usize {
        self.ac.len()
    }

    /// Largest anti-Hermitian residual seen before symmetrization.
    pub fn hermitian_residual(&self) -> R {
        self.hermitian_residual
    }

    /// `A₀ + Σ_c m_c A_c`.
    pub fn combine(&self, m: &[i64]) -> Result<CMat<R>> {
        if m.len() != self.ac.len() {
            return Err(Error::BranchLengthMismatch { expected: self.ac.len(), found: m.len() });
        }
        let mut a = self.a0.clone();
        for (mc, ac) in m.iter().zip(&self.ac) {
            if *mc != 0 {
                let s = R::lit(*mc as f64);
                a = a + ac.mapv(|z| z * s);
            }
        }
        Ok(a)
    }

    /// `λ_min(A₀ + Σ_c m_c A_c)` for integer `m`.
    pub fn lambda_min(&self, m: &[i64]) -> Result<R> {
        Ok(hermitian_eig(&self.combine(m)?)?.min())
    }

    /// `λ_min(A₀ + m·A₁)` for real `m` (single pair).
    pub fn lambda_min_real(&self, m: R) -> Result<R> {
        if self.ac.len() != 1 {
            return Err(Error::BranchLengthMismatch { expected: 1, found: self.ac.len() });
        }
        let a = &self.a0 + &self.ac[0].mapv(|z| z * m);
        Ok(hermitian_eig(&a)?.min())
    }
}

/// Builds `A₀` and the `A_c` from a spectral decomposition.
pub fn build_a_matrices<R: Real>(s: &SpectralData<R>, tol: &Tolerances) -> Result<AMatrices<R>> {
    let d = s.dim();
    let l0 = principal_log(s)?;
    let a0 = compress_omega_perp(&involution_gamma(l0.entries())?, d);
    let two_pi_i = cx(R::zero(), R::lit(2.0) * R::PI());
    let mut ac = Vec::with_capacity(s.num_pairs());
    for c in 0..s.num_pairs() {
        let diff = linalg::scale(&s.pair_difference(c), two_pi_i);
        ac.push(compress_omega_perp(&involution_gamma(&diff)?, d));
    }
    AMatrices::new(a0, ac, R::lit(tol.hermitian_residual))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Markovian,
    NotMarkovian,
    NoHermitianLog,
    Singular,
    UnsupportedSpectrum,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Markovian => "MARKOVIAN",
            Verdict::NotMarkovian => "NOT_MARKOVIAN",
            Verdict::NoHermitianLog => "NO_HERMITIAN_LOG",
            Verdict::Singular => "SINGULAR",
            Verdict::UnsupportedSpectrum => "UNSUPPORTED_SPECTRUM",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarkovOptions {
    /// Search box `‖m‖∞ ≤ m_max`.
    pub m_max: u32,
    /// Upper limit on the number of branches evaluated.
    pub max_branches: usize,
    pub tol: Tolerances,
}

impl Default for MarkovOptions {
    fn default() -> Self {
        Self { m_max: 2, max_branches: 100_000, tol: Tolerances::default() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MarkovReport<R: Real = f64> {
    pub verdict: Verdict,
    /// First valid branch in search order.
    pub witness_branch: Option<BranchIndex>,
    /// Branch attaining `max_min_eigenvalue`.
    pub best_branch: Option<BranchIndex>,
    /// `max_m λ_min(A(m))` over the searched branches; `-inf` when no logarithm exists.
    pub max_min_eigenvalue: R,
    /// Infinite when no Hermitian logarithm exists.
    pub mu_min: R,
    pub measure: R,
    pub num_pairs: usize,
    pub branches_searched: usize,
    pub m_max: u32,
    pub dimension: usize,
    pub diagnostics: String,
}

impl<R: Real> MarkovReport<R> {
    fn without_log(verdict: Verdict, dimension: usize, m_max: u32, diagnostics: String) -> Self {
        Self {
            verdict,
            witness_branch: None,
            best_branch: None,
            max_min_eigenvalue: R::neg_infinity(),
            mu_min: R::infinity(),
            measure: R::zero(),
            num_pairs: 0,
            branches_searched: 0,
            m_max,
            dimension,
            diagnostics,
        }
    }

    pub fn is_markovian(&self) -> bool {
        self.verdict == Verdict::Markovian
    }
}

/// Integer vectors of length `len` with `‖m‖∞ = r`, in lexicographic order.
fn shell(len: usize, r: i64) -> impl Iterator<Item = Vec<i64>> {
    let side = (2 * r + 1) as u64;
    let total = side.checked_pow(len as u32).unwrap_or(u64::MAX);
    (0..total)
        .map(move |mut k| {
            let mut m = vec![0i64; len];
            for slot in m.iter_mut().rev() {
                *slot = (k % side) as i64 - r;
                k /= side;
            }
            m
        })
        .filter(move |m| m.iter().map(|x| x.abs()).max().unwrap_or(0) == r)
}

/// Branch indices of the search box in order: shells of increasing `‖m‖∞`,
/// lexicographic within a shell.
pub fn branch_search_order(len: usize, m_max: u32) -> impl Iterator<Item = BranchIndex> {
    let top = if len == 0 { 0 } else { m_max as i64 };
    (0..=top).flat_map(move |r| shell(len, r)).map(BranchIndex)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QubitSearch<R: Real = f64> {
    pub m_star: R,
    pub value: R,
}

/// Maximizes the concave `f(m) = λ_min(A₀ + m·A₁)` over real `m` in
/// `[−m_max−1, m_max+1]` by golden-section search.
pub fn qubit_branch_search<R: Real>(a: &AMatrices<R>, m_max: u32) -> Result<QubitSearch<R>> {
    if a.num_pairs() != 1 {
        return Err(Error::BranchLengthMismatch { expected: 1, found: a.num_pairs() });
    }
    if norm_inf(&a.ac[0]) <= R::epsilon() * norm_inf(&a.a0).max(R::one()) {
        return Ok(QubitSearch { m_star: R::zero(), value: a.lambda_min_real(R::zero())? });
    }
    let f = |m: R| a.lambda_min_real(m);
    let bound = R::lit(m_max as f64 + 1.0);
    let (mut lo, mut hi) = (-bound, bound);
    let inv_phi = (R::lit(5.0).sqrt() - R::one()) / R::lit(2.0);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    let stop = R::lit(1e-12).max(R::epsilon().sqrt() * R::lit(1e-4));
    while hi - lo > stop {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1)?;
        }
    }
    let m_star = (lo + hi) / R::lit(2.0);
    Ok(QubitSearch { m_star, value: f(m_star)? })
}

/// Markovianity of `T` within the branch box.
///
/// `T` should pass [`verify_channel`](crate::channel::verify_channel); the
/// decision itself only needs Hermiticity preservation.
pub fn markovian_check<R: Real>(t: &ChannelMatrix<R>, opts: &MarkovOptions) -> Result<MarkovReport<R>> {
    let spec = eigendecompose(t, &opts.tol)?;
    markovian_check_spectral(&spec, opts)
}

/// As [`markovian_check`], on a precomputed decomposition.
pub fn markovian_check_spectral<R: Real>(spec: &SpectralData<R>, opts: &MarkovOptions) -> Result<MarkovReport<R>> {
    let d = spec.dim();
    if spec.has_zero() {
        return Ok(MarkovReport::without_log(
            Verdict::Singular,
            d,
            opts.m_max,
            "zero eigenvalue: no logarithm exists".into(),
        ));
    }
    if let Some(c) = spec.negative_clusters().find(|c| c.multiplicity % 2 == 1) {
        return Ok(MarkovReport::without_log(
            Verdict::NoHermitianLog,
            d,
            opts.m_max,
            format!("negative eigenvalue {} with odd multiplicity {}", c.value.re, c.multiplicity),
        ));
    }
    if let Some(c) = spec.negative_clusters().next() {
        return Ok(MarkovReport::without_log(
            Verdict::UnsupportedSpectrum,
            d,
            opts.m_max,
            format!(
                "negative eigenvalue {} with even multiplicity {}: real logarithms may exist outside the searched branch family; measure 0 is a lower bound",
                c.value.re, c.multiplicity
            ),
        ));
    }

    let a = build_a_matrices(spec, &opts.tol)?;
    let accept = -R::lit(opts.tol.markov) * (R::one() + norm_inf(a.a0()));
    let c = a.num_pairs();
    let mut diagnostics = Vec::new();

    let mut best: Option<(R, BranchIndex)> = None;
    let mut witness = None;
    let mut searched = 0usize;
    let consider = |m: BranchIndex, lam: R, best: &mut Option<(R, BranchIndex)>| {
        if best.as_ref().is_none_or(|(b, _)| lam > *b) {
            *best = Some((lam, m));
        }
    };

    if c == 1 {
        let q = qubit_branch_search(&a, opts.m_max)?;
        let box_max = opts.m_max as i64;
        let lo = (q.m_star.floor().to_i64().unwrap_or(0)).clamp(-box_max, box_max);
        let hi = (q.m_star.ceil().to_i64().unwrap_or(0)).clamp(-box_max, box_max);
        for m in [lo, hi] {
            let lam = a.lambda_min(&[m])?;
            consider(BranchIndex(vec![m]), lam, &mut best);
        }
        diagnostics.push(format!("concave search: m* = {}, f(m*) = {}", q.m_star, q.value));
    }

    for m in branch_search_order(c, opts.m_max) {
        if searched >= opts.max_branches {
            diagnostics.push(format!("branch budget {} exhausted", opts.max_branches));
            break;
        }
        searched += 1;
        let lam = a.lambda_min(&m.0)?;
        consider(m.clone(), lam, &mut best);
        if lam >= accept {
            witness = Some(m);
            break;
        }
    }

    let (max_min, best_branch) = best.expect("at least the principal branch is searched");
    let dr = R::from_usize_lossy(d);
    let n_perp = R::from_usize_lossy(d * d - 1);
    let (verdict, mu_min, measure) = if witness.is_some() {
        (Verdict::Markovian, R::zero(), R::one())
    } else {
        let mu = dr * (-max_min).max(R::zero());
        let v = if spec.has_degenerate_pair() {
            diagnostics.push(
                "degenerate complex eigenvalue: logarithms outside the searched branch family are not examined".into(),
            );
            Verdict::UnsupportedSpectrum
        } else {
            Verdict::NotMarkovian
        };
        (v, mu, (-mu * n_perp).exp())
    };
    Ok(MarkovReport {
        verdict,
        witness_branch: witness,
        best_branch: Some(best_branch),
        max_min_eigenvalue: max_min,
        mu_min,
        measure,
        num_pairs: c,
        branches_searched: searched,
        m_max: opts.m_max,
        dimension: d,
        diagnostics: diagnostics.join("; "),
    })
}

/// Least isotropic noise rate making some searched branch a valid generator.
pub fn mu_min<R: Real>(t: &ChannelMatrix<R>, opts: &MarkovOptions) -> Result<R> {
    Ok(markovian_check(t, opts)?.mu_min)
}

/// `M(T) = exp[μ_min·(1 − d²)]`, and 0 when no Hermitian logarithm exists.
///
/// Numerical failures of the spectral analysis (defective or unpaired
/// spectra) are reported as errors rather than mapped to a value.
pub fn markovianity_measure<R: Real>(t: &ChannelMatrix<R>, opts: &MarkovOptions) -> Result<R> {
    Ok(markovian_check(t, opts)?.measure)
}

/// `−μ·ω⊥`, the isotropic noise generator.
pub fn isotropic_noise_generator<R: Real>(d: usize, mu: R) -> GeneratorMatrix<R> {
    GeneratorMatrix::from_matrix_units(omega_perp_projector::<R>(d).mapv(|z| z * -mu))
}

/// The generator `L̂_m + (−μ_min·ω⊥)` for the best branch of a report.
pub fn noisy_generator<R: Real>(spec: &SpectralData<R>, report: &MarkovReport<R>) -> Result<GeneratorMatrix<R>> {
    let m = report
        .best_branch
        .as_ref()
        .ok_or_else(|| Error::NotAGenerator(format!("verdict {} has no logarithm", report.verdict)))?;
    let l = branch_log(spec, m)?;
    let noise = isotropic_noise_generator(spec.dim(), report.mu_min);
    Ok(GeneratorMatrix::from_matrix_units(l.entries() + noise.entries()))
}
