//! Eigenstructure of transfer matrices and the logarithm branches compatible
//! with Hermiticity preservation.
//!
//! For a diagonalizable `T̂ = Σ_k λ_k P_k` of a Hermiticity-preserving map the
//! spectrum is closed under conjugation and `P_{c̄} = 𝔽·conj(P_c)·𝔽`. Every
//! logarithm that is again Hermiticity preserving (on the generic branch
//! family) reads
//!
//! `L̂_m = L̂₀ + 2πi Σ_c m_c (P_c − 𝔽·conj(P_c)·𝔽)`
//!
//! with `L̂₀` the principal logarithm and `c` running over the conjugate pairs
//! (one representative per pair, the one with positive imaginary part).

use ndarray::Array2;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::channel::{change_basis, ChannelMatrix};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::lindblad::GeneratorMatrix;
use crate::linalg::{self, eig, expm, norm_inf, CMat, Lu};
use crate::scalar::{cx, re, Cx, Real};
use crate::superop::{flip_conjugate, hermiticity_violation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ClusterKind {
    RealPositive,
    RealNegative,
    Zero,
    ComplexPairMember,
}

/// A group of numerically coincident eigenvalues and its spectral projector.
#[derive(Debug, Clone)]
pub struct Cluster<R: Real> {
    pub value: Cx<R>,
    pub multiplicity: usize,
    pub kind: ClusterKind,
    pub projector: CMat<R>,
    /// Index of the conjugate cluster for complex members.
    pub partner: Option<usize>,
}

/// A conjugate pair of clusters; `upper` has positive imaginary part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConjugatePair {
    pub upper: usize,
    pub lower: usize,
}

#[derive(Debug, Clone)]
pub struct SpectralData<R: Real = f64> {
    dim: usize,
    clusters: Vec<Cluster<R>>,
    pairs: Vec<ConjugatePair>,
    condition: R,
    reconstruction_error: R,
}

/// Integers `m_c`, one per conjugate pair, selecting a logarithm branch.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BranchIndex(pub Vec<i64>);

impl BranchIndex {
    pub fn zeros(len: usize) -> Self {
        Self(vec![0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn norm_inf(&self) -> i64 {
        self.0.iter().map(|m| m.abs()).max().unwrap_or(0)
    }
}

impl std::fmt::Display for BranchIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, m) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, ")")
    }
}

impl<R: Real> SpectralData<R> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn clusters(&self) -> &[Cluster<R>] {
        &self.clusters
    }

    pub fn pairs(&self) -> &[ConjugatePair] {
        &self.pairs
    }

    /// Number of conjugate pairs `C`.
    pub fn num_pairs(&self) -> usize {
        self.pairs.len()
    }

    /// `‖V‖∞·‖V⁻¹‖∞` of the eigenvector matrix.
    pub fn condition(&self) -> R {
        self.condition
    }

    pub fn reconstruction_error(&self) -> R {
        self.reconstruction_error
    }

    pub fn has_zero(&self) -> bool {
        self.clusters.iter().any(|c| c.kind == ClusterKind::Zero)
    }

    pub fn negative_clusters(&self) -> impl Iterator<Item = &Cluster<R>> {
        self.clusters.iter().filter(|c| c.kind == ClusterKind::RealNegative)
    }

    /// Whether some complex pair is degenerate (multiplicity above one).
    pub fn has_degenerate_pair(&self) -> bool {
        self.pairs.iter().any(|p| self.clusters[p.upper].multiplicity > 1)
    }

    /// Eigenvalues with multiplicity, in cluster order.
    pub fn eigenvalues(&self) -> Vec<Cx<R>> {
        self.clusters.iter().flat_map(|c| std::iter::repeat_n(c.value, c.multiplicity)).collect()
    }

    /// `Σ_k λ_k P_k`.
    pub fn reconstruct(&self) -> CMat<R> {
        let n = self.dim * self.dim;
        self.clusters
            .iter()
            .fold(linalg::zeros(n, n), |acc, c| acc + linalg::scale(&c.projector, c.value))
    }

    /// `P_c − 𝔽·conj(P_c)·𝔽` for pair `c`.
    pub fn pair_difference(&self, c: usize) -> CMat<R> {
        let p = self.pairs[c];
        &self.clusters[p.upper].projector - &self.clusters[p.lower].projector
    }

    /// Diagnostic JSON: eigenvalue clusters with kinds and pairing.
    pub fn to_json(&self) -> serde_json::Value {
        let clusters: Vec<_> = self
            .clusters
            .iter()
            .map(|c| {
                serde_json::json!({
                    "value": [c.value.re.as_f64(), c.value.im.as_f64()],
                    "multiplicity": c.multiplicity,
                    "kind": c.kind,
                    "partner": c.partner,
                })
            })
            .collect();
        serde_json::json!({
            "dimension": self.dim,
            "clusters": clusters,
            "pairs": self.pairs,
            "num_pairs": self.pairs.len(),
            "condition": self.condition.as_f64(),
            "reconstruction_error": self.reconstruction_error.as_f64(),
        })
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Clusters the spectrum of `T̂` and builds the spectral projectors.
///
/// Two eigenvalues share a cluster when they are within
/// `tol.cluster·‖T̂‖∞` of each other (transitively). Projectors are
/// `V_k·W_k` with `W = V⁻¹`. Pair projectors are replaced by their exact
/// flip-conjugate images after the consistency check, so downstream
/// logarithms are Hermiticity preserving to rounding.
pub fn eigendecompose<R: Real>(t: &ChannelMatrix<R>, tol: &Tolerances) -> Result<SpectralData<R>> {
    let mu = t.to_matrix_units();
    let d = mu.dim();
    let m = mu.entries();
    let scale = norm_inf(m).max(R::one());
    let violation = hermiticity_violation(m, d);
    if violation > R::lit(tol.check) * scale {
        return Err(Error::NotHermiticityPreserving { violation: violation.as_f64() });
    }
    let ctol = R::lit(tol.cluster) * scale;
    let ztol = R::lit(tol.zero) * scale;
    let ed = eig(m, ctol)?;
    let n = d * d;

    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            if (ed.values[i] - ed.values[j]).norm() <= ctol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_to_group = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if root_to_group[r] == usize::MAX {
            root_to_group[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[root_to_group[r]].push(i);
    }

    let v = ed.vectors;
    let w = Lu::new(&v)
        .and_then(|lu| lu.solve(&linalg::identity(n)))
        .map_err(|_| Error::DefectiveMatrix("eigenvector matrix is singular".into()))?;
    let condition = norm_inf(&v) * norm_inf(&w);
    if !(condition <= R::lit(tol.max_condition)) {
        return Err(Error::DefectiveMatrix(format!("eigenbasis condition number {condition:e}")));
    }

    let mut clusters: Vec<Cluster<R>> = groups
        .iter()
        .map(|idx| {
            let k = idx.len();
            let sum = idx.iter().fold(Cx::<R>::zero(), |acc, &i| acc + ed.values[i]);
            let mut value = sum / R::from_usize_lossy(k);
            let kind = if value.norm() <= ztol {
                ClusterKind::Zero
            } else if value.im.abs() <= ctol {
                value = re(value.re);
                if value.re > R::zero() {
                    ClusterKind::RealPositive
                } else {
                    ClusterKind::RealNegative
                }
            } else {
                ClusterKind::ComplexPairMember
            };
            let projector = Array2::from_shape_fn((n, n), |(r, c)| {
                idx.iter().fold(Cx::zero(), |acc, &i| acc + v[[r, i]] * w[[i, c]])
            });
            Cluster { value, multiplicity: k, kind, projector, partner: None }
        })
        .collect();

    let check_tol = R::lit(tol.cluster).sqrt().min(R::lit(1e-6)) * scale;
    for c in &clusters {
        let idem = norm_inf(&(c.projector.dot(&c.projector) - &c.projector));
        if idem > check_tol * norm_inf(&c.projector).max(R::one()) {
            return Err(Error::DefectiveMatrix(format!("projector idempotency residual {idem:e}")));
        }
    }

    let mut pairs = Vec::new();
    let mut taken = vec![false; clusters.len()];
    let mut order: Vec<usize> = (0..clusters.len())
        .filter(|&i| clusters[i].kind == ClusterKind::ComplexPairMember && clusters[i].value.im > R::zero())
        .collect();
    order.sort_by(|&a, &b| {
        let (x, y) = (clusters[a].value, clusters[b].value);
        y.im.partial_cmp(&x.im).unwrap_or(std::cmp::Ordering::Equal).then(x.re.partial_cmp(&y.re).unwrap_or(std::cmp::Ordering::Equal))
    });
    for &u in &order {
        let target = clusters[u].value.conj();
        let best = (0..clusters.len())
            .filter(|&j| !taken[j] && clusters[j].kind == ClusterKind::ComplexPairMember && clusters[j].value.im < R::zero())
            .min_by(|&a, &b| {
                let da = (clusters[a].value - target).norm();
                let db = (clusters[b].value - target).norm();
                da.partial_cmp(&db).unwrap_or(std::cmp::Ordering::Equal)
            });
        let Some(l) = best else {
            return Err(Error::UnpairedComplexEigenvalue(format!("{}", clusters[u].value)));
        };
        let gap = (clusters[l].value - target).norm();
        if gap > R::lit(10.0) * ctol || clusters[l].multiplicity != clusters[u].multiplicity {
            return Err(Error::UnpairedComplexEigenvalue(format!("{}", clusters[u].value)));
        }
        let mirrored = flip_conjugate(&linalg::conj(&clusters[u].projector), d);
        let mismatch = norm_inf(&(&mirrored - &clusters[l].projector));
        let pscale = norm_inf(&clusters[u].projector).max(R::one());
        if mismatch > R::lit(tol.pair).max(check_tol) * pscale {
            return Err(Error::UnpairedComplexEigenvalue(format!(
                "{} (projector mismatch {mismatch:e})",
                clusters[u].value
            )));
        }
        taken[u] = true;
        taken[l] = true;
        clusters[l].projector = mirrored;
        clusters[l].value = clusters[u].value.conj();
        clusters[u].partner = Some(l);
        clusters[l].partner = Some(u);
        pairs.push(ConjugatePair { upper: u, lower: l });
    }
    if let Some(c) = clusters.iter().enumerate().find(|(i, c)| c.kind == ClusterKind::ComplexPairMember && !taken[*i]) {
        return Err(Error::UnpairedComplexEigenvalue(format!("{}", c.1.value)));
    }
    let half = R::lit(0.5);
    for c in clusters.iter_mut().filter(|c| c.kind != ClusterKind::ComplexPairMember) {
        let mirrored = flip_conjugate(&linalg::conj(&c.projector), d);
        c.projector = (&c.projector + &mirrored).mapv(|z| z * half);
    }

    let mut data = SpectralData { dim: d, clusters, pairs, condition, reconstruction_error: R::zero() };
    let err = norm_inf(&(data.reconstruct() - m));
    if err > check_tol {
        return Err(Error::DefectiveMatrix(format!("spectral reconstruction residual {err:e}")));
    }
    data.reconstruction_error = err;
    Ok(data)
}

fn require_log<R: Real>(s: &SpectralData<R>) -> Result<()> {
    if s.has_zero() {
        return Err(Error::SingularChannel);
    }
    if let Some(c) = s.negative_clusters().next() {
        return Err(Error::NegativeRealEigenvalue(c.value.re.as_f64()));
    }
    Ok(())
}

/// `L̂₀ = Σ_k log(λ_k)·P_k`, principal scalar branch.
pub fn principal_log<R: Real>(s: &SpectralData<R>) -> Result<GeneratorMatrix<R>> {
    require_log(s)?;
    let n = s.dim * s.dim;
    let mut l = linalg::zeros(n, n);
    for c in &s.clusters {
        let log = match c.kind {
            ClusterKind::RealPositive => re(c.value.re.ln()),
            _ => c.value.ln(),
        };
        l = l + linalg::scale(&c.projector, log);
    }
    Ok(GeneratorMatrix::from_matrix_units(l))
}

/// The branch `L̂_m = L̂₀ + 2πi Σ_c m_c (P_c − 𝔽·conj(P_c)·𝔽)`.
pub fn branch_log<R: Real>(s: &SpectralData<R>, m: &BranchIndex) -> Result<GeneratorMatrix<R>> {
    if m.len() != s.num_pairs() {
        return Err(Error::BranchLengthMismatch { expected: s.num_pairs(), found: m.len() });
    }
    let l0 = principal_log(s)?;
    let mut l = l0.into_entries();
    let two_pi_i = cx(R::zero(), R::lit(2.0) * R::PI());
    for (c, &mc) in m.0.iter().enumerate() {
        if mc != 0 {
            l = l + linalg::scale(&s.pair_difference(c), two_pi_i * R::lit(mc as f64));
        }
    }
    Ok(GeneratorMatrix::from_matrix_units(l))
}

/// `exp(s·L̂_m)`, the flow generated by one logarithm branch of `T`,
/// returned in the basis of `t`. Negative `s` is allowed and yields the
/// inverse flow, which is in general not a channel.
pub fn fractional_power<R: Real>(t: &ChannelMatrix<R>, s: R, m: &BranchIndex, tol: &Tolerances) -> Result<ChannelMatrix<R>> {
    let spec = eigendecompose(t, tol)?;
    let l = branch_log(&spec, m)?;
    let e = expm(&l.entries().mapv(|z| z * s))?;
    change_basis(&ChannelMatrix::from_matrix_units(e)?, t.basis())
}
