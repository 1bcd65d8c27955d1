use serde::{Deserialize, Serialize};

/// Environment variable that overrides [`Tolerances::check`].
pub const TOL_ENV: &str = "MARKOVSCOPE_TOL";

/// Every numerical threshold used by the library, in one place.
///
/// Relative tolerances are scaled by `max(1, ‖M‖∞)` of the matrix under test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Hermiticity preservation, trace preservation and positivity checks.
    pub check: f64,
    /// Eigenvalues closer than `cluster·‖T̂‖∞` are merged into one cluster.
    pub cluster: f64,
    /// A cluster with `|λ| ≤ zero·‖T̂‖∞` is treated as a zero eigenvalue.
    pub zero: f64,
    /// Conjugate-pair consistency `P_c̄ ≈ 𝔽·conj(P_c)·𝔽`, relative to `‖P_c‖∞`.
    pub pair: f64,
    /// Eigenbasis condition number above which the spectrum is rejected as defective.
    pub max_condition: f64,
    /// Markovian acceptance `λ_min ≥ −markov·(1 + ‖A₀‖∞)`.
    pub markov: f64,
    /// Largest anti-Hermitian residual tolerated in the compressed matrices.
    pub hermitian_residual: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            check: 1e-9,
            cluster: 1e-8,
            zero: 1e-12,
            pair: 1e-8,
            max_condition: 1e8,
            markov: 1e-7,
            hermitian_residual: 1e-8,
        }
    }
}

impl Tolerances {
    /// Thresholds suitable for `f32` instantiations.
    pub fn single_precision() -> Self {
        Self {
            check: 1e-4,
            cluster: 1e-4,
            zero: 1e-6,
            pair: 1e-3,
            max_condition: 1e4,
            markov: 1e-3,
            hermitian_residual: 1e-3,
        }
    }

    /// Defaults with `check` taken from `MARKOVSCOPE_TOL` when set and parseable.
    pub fn from_env() -> Self {
        let mut tol = Self::default();
        if let Some(v) = std::env::var(TOL_ENV).ok().and_then(|s| s.trim().parse::<f64>().ok()) {
            if v.is_finite() && v > 0.0 {
                tol.check = v;
            }
        }
        tol
    }
}
