//! Parameterized channels and generators: the qubit examples, a damped
//! Jaynes-Cummings family, and seeded random channels and generators.

use std::collections::BTreeMap;

use ndarray::Array2;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::channel::{compose, mix, pauli_matrices, ChannelMatrix, ChoiMatrix, OperatorBasis};
use crate::error::{Error, Result};
use crate::lindblad::{evolve, generator_from_form, GeneratorMatrix, LindbladForm};
use crate::linalg::{self, adjoint, hermitian_eig, identity, kron, norm_inf, CMat};
use crate::scalar::{cx, re, Cx, Real};
use crate::superop::sandwich;

fn pauli_real<R: Real>(rows: [[R; 4]; 4]) -> ChannelMatrix<R> {
    ChannelMatrix::from_pauli_real(rows)
}

fn pauli_diag<R: Real>(a: [R; 4]) -> ChannelMatrix<R> {
    let z = R::zero();
    pauli_real([[a[0], z, z, z], [z, a[1], z, z], [z, z, a[2], z], [z, z, z, a[3]]])
}

fn check_nonneg<R: Real>(name: &'static str, v: R) -> Result<()> {
    if v >= R::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(Error::RangeError { name, value: v.as_f64(), expected: "finite value >= 0" })
    }
}

/// `exp(t·L)` for `L(ρ) = σzρσz − ρ`: Pauli-basis `diag(1, e^{−2t}, e^{−2t}, 1)`.
pub fn dephasing_channel<R: Real>(t: R) -> Result<ChannelMatrix<R>> {
    check_nonneg("t", t)?;
    let e = (R::lit(-2.0) * t).exp();
    Ok(pauli_diag([R::one(), e, e, R::one()]))
}

/// `L(ρ) = σzρσz − ρ`.
pub fn dephasing_generator<R: Real>() -> GeneratorMatrix<R> {
    let z = &pauli_matrices::<R>()[3];
    GeneratorMatrix::from_matrix_units(sandwich(z, z) - identity::<R>(4))
}

/// Conjugation by `exp(−iθσx)`: a rotation by `2θ` in the `(σy, σz)` plane.
pub fn rabi_unitary<R: Real>(theta: R) -> ChannelMatrix<R> {
    let (s, c) = (R::lit(2.0) * theta).sin_cos();
    let (o, l) = (R::zero(), R::one());
    pauli_real([[l, o, o, o], [o, l, o, o], [o, o, c, -s], [o, o, s, c]])
}

/// `p·rabi_unitary(π/4) + (1−p)·dephasing_channel(1)`.
pub fn figure2a_mixture<R: Real>(p: R) -> Result<ChannelMatrix<R>> {
    mix(&rabi_unitary(R::FRAC_PI_4()), &dephasing_channel(R::one())?, p)
}

/// `ρ ↦ (tr[ρ]𝟙 + ρᵀ)/3`: Pauli-basis `diag(1, 1/3, −1/3, 1/3)`.
pub fn transpose_approximation<R: Real>() -> ChannelMatrix<R> {
    let third = R::one() / R::lit(3.0);
    pauli_diag([R::one(), third, -third, third])
}

/// Parameters of the damped Jaynes-Cummings family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JCParams<R: Real = f64> {
    /// Vacuum Rabi coupling.
    pub omega: R,
    /// Cavity energy decay rate; the field amplitude decays at `γ/2`.
    pub gamma: R,
    /// Pauli weights `α_x, α_y, α_z`.
    pub alpha: [R; 3],
}

impl<R: Real> JCParams<R> {
    pub fn new(omega: R, gamma: R, alpha: [R; 3]) -> Result<Self> {
        if !(omega > R::zero() && omega.is_finite()) {
            return Err(Error::RangeError { name: "omega", value: omega.as_f64(), expected: "finite omega > 0" });
        }
        if !(gamma > R::zero() && gamma.is_finite()) {
            return Err(Error::RangeError { name: "gamma", value: gamma.as_f64(), expected: "finite gamma > 0" });
        }
        for a in alpha {
            check_nonneg("alpha", a)?;
        }
        Ok(Self { omega, gamma, alpha })
    }

    /// `ω = 0.2`, `γ = 0.35`, `α = (1/2, 1, 1/2)`.
    pub fn figure() -> Self {
        Self { omega: R::lit(0.2), gamma: R::lit(0.35), alpha: [R::lit(0.5), R::one(), R::lit(0.5)] }
    }
}

/// `(e^{−λt/2}, cosh(δt/2), sinh(δt/2)/δ)` with `λ = γ/2`, `δ² = λ² − 4ω²`,
/// continued to imaginary `δ` and expanded near `δ = 0`.
fn jc_parts<R: Real>(t: R, p: &JCParams<R>) -> (R, R, R) {
    let lambda = p.gamma / R::lit(2.0);
    let disc = lambda * lambda - R::lit(4.0) * p.omega * p.omega;
    let half_t = t / R::lit(2.0);
    let x2 = disc * half_t * half_t;
    let damp = (-lambda * half_t).exp();
    if x2.abs() < R::lit(1e-8) {
        let c = R::one() + x2 / R::lit(2.0) + x2 * x2 / R::lit(24.0);
        let s = half_t * (R::one() + x2 / R::lit(6.0) + x2 * x2 / R::lit(120.0));
        (damp, c, s)
    } else if disc > R::zero() {
        let delta = disc.sqrt();
        (damp, (delta * half_t).cosh(), (delta * half_t).sinh() / delta)
    } else {
        let big = (-disc).sqrt();
        (damp, (big * half_t).cos(), (big * half_t).sin() / big)
    }
}

/// Excited-state amplitude `G(t) = e^{−λt/2}[cosh(δt/2) + (λ/δ)sinh(δt/2)]`,
/// `λ = γ/2`, `δ = √(λ² − 4ω²)`. Real for all parameters.
pub fn jc_decay_function<R: Real>(t: R, p: &JCParams<R>) -> Cx<R> {
    let (damp, c, s) = jc_parts(t, p);
    re(damp * (c + p.gamma / R::lit(2.0) * s))
}

/// `G′(t) = −2ω²·e^{−λt/2}·sinh(δt/2)/δ`.
pub fn jc_decay_derivative<R: Real>(t: R, p: &JCParams<R>) -> Cx<R> {
    let (damp, _, s) = jc_parts(t, p);
    re(R::lit(-2.0) * p.omega * p.omega * damp * s)
}

/// Time-local rate `γ_loc(t) = −2·Re(G′/G)`; negative while `|G|` grows.
pub fn jc_local_rate<R: Real>(t: R, p: &JCParams<R>) -> R {
    let g = jc_decay_function(t, p);
    let dg = jc_decay_derivative(t, p);
    R::lit(-2.0) * (dg / g).re
}

/// `D[σ₋] + Σ_k α_k (σ_k ρ σ_k − ρ)` with `σ₋ = |0⟩⟨1|`.
pub fn jc_fixed_generator<R: Real>(p: &JCParams<R>) -> GeneratorMatrix<R> {
    let mut g = linalg::zeros::<R>(3, 3);
    // σ₋ = (σx + iσy)/2 in the Gell-Mann/Pauli basis
    let quarter = R::lit(0.25);
    g[[0, 0]] = re(quarter);
    g[[1, 1]] = re(quarter);
    g[[0, 1]] = cx(R::zero(), -quarter);
    g[[1, 0]] = cx(R::zero(), quarter);
    for k in 0..3 {
        g[[k, k]] = g[[k, k]] + re(p.alpha[k]);
    }
    let form = LindbladForm::new(linalg::zeros(2, 2), g, R::lit(1e-12)).expect("non-negative weights");
    generator_from_form(&form, R::lit(1e-12)).expect("valid form")
}

/// `γ_loc(t)·(D[σ₋] + Σ_k α_k(σ_kρσ_k − ρ))`.
pub fn jc_generator<R: Real>(t: R, p: &JCParams<R>) -> GeneratorMatrix<R> {
    jc_fixed_generator(p).scaled(jc_local_rate(t, p))
}

/// Qubit channel of the damped JC family at time `t`, in the Pauli basis.
///
/// With `Γ(t) = −2 ln|G(t)|` the channel is `Z^s ∘ exp(Γ(t)·L)`, `L` from
/// [`jc_fixed_generator`] and `Z^s` the `σz` conjugation applied when
/// `G(t) < 0` (the coherences pick up the sign of `G`). Without Pauli
/// weights this is amplitude damping: `x, y ↦ G·x, G·y`,
/// `z ↦ G²z + 1 − G²`. For `t` before the first zero of `G` it coincides
/// with the time-ordered solution of [`jc_generator`].
pub fn jc_channel<R: Real>(t: R, p: &JCParams<R>) -> Result<ChannelMatrix<R>> {
    check_nonneg("t", t)?;
    let g = jc_decay_function(t, p).re;
    let tiny = R::min_positive_value().sqrt();
    let big_gamma = R::lit(-2.0) * g.abs().max(tiny).ln();
    let base = crate::channel::change_basis(&evolve(&jc_fixed_generator(p), big_gamma)?, OperatorBasis::pauli())?;
    if g < R::zero() {
        let z = pauli_diag([R::one(), -R::one(), -R::one(), R::one()]);
        compose(&z, &base)
    } else {
        Ok(base)
    }
}

/// splitmix64 step, used to derive independent per-sample seeds.
pub fn sample_seed(base: u64, index: u64) -> u64 {
    let mut z = base ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn gaussian_matrix<R: Real>(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMat<R> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Array2::from_shape_fn((rows, cols), |_| {
        let a: f64 = rng.sample(StandardNormal);
        let b: f64 = rng.sample(StandardNormal);
        cx(R::lit(a * s), R::lit(b * s))
    })
}

fn check_dim(d: usize) -> Result<()> {
    if (2..=8).contains(&d) {
        Ok(())
    } else {
        Err(Error::RangeError { name: "d", value: d as f64, expected: "2 <= d <= 8" })
    }
}

const MAX_ATTEMPTS: usize = 16;

/// Seeded random channel: Wishart `W = XX†`, marginal-normalized to
/// `C = (𝟙⊗B^{−1/2})·W·(𝟙⊗B^{−1/2})` with `B = tr₁W`, then `T̂ = C^Γ`.
pub fn random_channel<R: Real>(d: usize, seed: u64) -> Result<ChannelMatrix<R>> {
    check_dim(d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = d * d;
    for _ in 0..MAX_ATTEMPTS {
        let x = gaussian_matrix::<R>(&mut rng, n, n);
        let w = x.dot(&adjoint(&x));
        let b = Array2::from_shape_fn((d, d), |(j, l)| (0..d).fold(Cx::zero(), |acc, i| acc + w[[i * d + j, i * d + l]]));
        let he = hermitian_eig(&b)?;
        let top = he.values.last().copied().unwrap_or_else(R::zero);
        if !(he.min() > R::lit(1e-10) * top) {
            continue;
        }
        let inv_sqrt = Array2::from_shape_fn((d, d), |(r, c)| {
            (0..d).fold(Cx::zero(), |acc, k| {
                acc + he.vectors[[r, k]] * he.vectors[[c, k]].conj() / he.values[k].sqrt()
            })
        });
        let k = kron(&identity::<R>(d), &inv_sqrt);
        let c = k.dot(&w).dot(&k);
        return Ok(ChoiMatrix::new(linalg::hermitian_part(&c))?.to_channel());
    }
    Err(Error::DegenerateSample(MAX_ATTEMPTS))
}

/// Haar-random unitary from the QR decomposition of a Gaussian matrix.
pub fn random_unitary<R: Real>(d: usize, seed: u64) -> CMat<R> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z = gaussian_matrix::<R>(&mut rng, d, d);
    let mut q = linalg::zeros::<R>(d, d);
    for j in 0..d {
        let mut v = z.column(j).to_owned();
        for k in 0..j {
            let proj = (0..d).fold(Cx::<R>::zero(), |acc, i| acc + q[[i, k]].conj() * v[i]);
            for i in 0..d {
                v[i] = v[i] - q[[i, k]] * proj;
            }
        }
        let nrm = v.iter().map(|x| x.norm_sqr()).sum::<R>().sqrt();
        for i in 0..d {
            q[[i, j]] = v[i] / nrm;
        }
    }
    q
}

/// Gaussian Hermitian `d×d` matrix.
pub(crate) fn random_hermitian<R: Real>(rng: &mut ChaCha8Rng, d: usize) -> CMat<R> {
    linalg::hermitian_part(&gaussian_matrix::<R>(rng, d, d))
}

/// Seeded random valid generator with `‖L̂‖∞ = scale`: Gaussian Hermitian
/// `H` and Wishart `G`.
pub fn random_lindblad<R: Real>(d: usize, seed: u64, scale: R) -> Result<GeneratorMatrix<R>> {
    check_dim(d)?;
    if !(scale > R::zero() && scale.is_finite()) {
        return Err(Error::RangeError { name: "scale", value: scale.as_f64(), expected: "finite scale > 0" });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = random_hermitian::<R>(&mut rng, d);
    let y = gaussian_matrix::<R>(&mut rng, d * d - 1, d * d - 1);
    let g = linalg::hermitian_part(&y.dot(&adjoint(&y)));
    let l = generator_from_form(&LindbladForm::new(h, g, R::lit(1e-9))?, R::lit(1e-9))?;
    let norm = norm_inf(l.entries());
    Ok(l.scaled(scale / norm))
}

/// A zoo entry addressable by name with `key=value` parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Identity { d: usize },
    Dephasing { t: f64 },
    Rabi { theta: f64 },
    Figure2a { p: f64 },
    TransposeApproximation,
    Jc { t: f64, params: JCParams<f64> },
    Random { d: usize, seed: u64 },
}

impl Model {
    pub const NAMES: [&'static str; 7] = ["identity", "dephasing", "rabi", "figure2a", "transpose", "jc", "random"];

    /// Builds a model from its name and parameters; missing parameters take defaults.
    pub fn from_name(name: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let known: &[&str] = match name {
            "identity" => &["d"],
            "dephasing" => &["t"],
            "rabi" => &["theta"],
            "figure2a" => &["p"],
            "transpose" => &[],
            "jc" => &["t", "omega", "gamma", "alpha_x", "alpha_y", "alpha_z"],
            "random" => &["d", "seed"],
            _ => {
                return Err(Error::Parse(format!(
                    "unknown model `{name}` (expected one of {})",
                    Self::NAMES.join(", ")
                )))
            }
        };
        if let Some(k) = params.keys().find(|k| !known.contains(&k.as_str())) {
            return Err(Error::Parse(format!("model `{name}` has no parameter `{k}`")));
        }
        let get = |k: &str, default: f64| params.get(k).copied().unwrap_or(default);
        let as_usize = |name: &'static str, v: f64| -> Result<usize> {
            if v.fract() == 0.0 && (0.0..=1e15).contains(&v) {
                Ok(v as usize)
            } else {
                Err(Error::RangeError { name, value: v, expected: "non-negative integer" })
            }
        };
        Ok(match name {
            "identity" => Model::Identity { d: as_usize("d", get("d", 2.0))? },
            "dephasing" => Model::Dephasing { t: get("t", 1.0) },
            "rabi" => Model::Rabi { theta: get("theta", std::f64::consts::FRAC_PI_4) },
            "figure2a" => Model::Figure2a { p: get("p", 0.5) },
            "transpose" => Model::TransposeApproximation,
            "jc" => {
                let f = JCParams::<f64>::figure();
                let params = JCParams::new(
                    get("omega", f.omega),
                    get("gamma", f.gamma),
                    [get("alpha_x", f.alpha[0]), get("alpha_y", f.alpha[1]), get("alpha_z", f.alpha[2])],
                )?;
                Model::Jc { t: get("t", 1.0), params }
            }
            "random" => Model::Random { d: as_usize("d", get("d", 2.0))?, seed: as_usize("seed", get("seed", 0.0))? as u64 },
            _ => unreachable!(),
        })
    }

    pub fn build(&self) -> Result<ChannelMatrix<f64>> {
        match self {
            Model::Identity { d } => {
                if *d == 0 {
                    return Err(Error::RangeError { name: "d", value: 0.0, expected: "d >= 1" });
                }
                Ok(ChannelMatrix::identity(*d))
            }
            Model::Dephasing { t } => dephasing_channel(*t),
            Model::Rabi { theta } => {
                if !theta.is_finite() {
                    return Err(Error::RangeError { name: "theta", value: *theta, expected: "finite" });
                }
                Ok(rabi_unitary(*theta))
            }
            Model::Figure2a { p } => figure2a_mixture(*p),
            Model::TransposeApproximation => Ok(transpose_approximation()),
            Model::Jc { t, params } => jc_channel(*t, params),
            Model::Random { d, seed } => random_channel(*d, *seed),
        }
    }
}
