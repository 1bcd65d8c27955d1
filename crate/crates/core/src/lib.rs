//! Markovianity tests for finite-dimensional quantum channels.
//!
//! A channel is Markovian when it is an element of a completely positive
//! dynamical semigroup, i.e. `T = exp(L)` for some Lindblad generator `L`.
//! [`markov::markovian_check`] decides this by searching the Hermitian
//! branches of `log T`; [`markov::markovianity_measure`] quantifies how much
//! isotropic noise is needed to make some branch valid. For qubits,
//! [`divisibility::td_markovian_check`] tests the weaker time-dependent
//! (infinitesimal divisibility) property.
//!
//! Conventions: operators are vectorized row-major, `⟨i,j|ρ̂⟩ = ρ_ij`, and a
//! map is stored as its transfer matrix `T̂` acting on `ρ̂`. Every numerical
//! type is generic over [`scalar::Real`] (`f32` or `f64`); the aliases
//! below fix `f64`.
//!
//! ```
//! use markovscope::{zoo, markov::{markovian_check, MarkovOptions, Verdict}};
//!
//! let t = zoo::dephasing_channel(1.0).unwrap();
//! let report = markovian_check(&t, &MarkovOptions::default()).unwrap();
//! assert_eq!(report.verdict, Verdict::Markovian);
//! ```

// `!(x > y)` is used on purpose so that NaN fails range checks
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod cli;
pub mod config;
pub mod divisibility;
pub mod error;
pub mod io;
pub mod lindblad;
pub mod linalg;
pub mod markov;
pub mod scalar;
pub mod spectral;
pub mod superop;
pub mod zoo;

pub use channel::{BasisTag, ChannelReport, OperatorBasis};
pub use config::Tolerances;
pub use error::{Error, Result};
pub use markov::{MarkovOptions, Verdict};
pub use scalar::Real;
pub use spectral::BranchIndex;

pub type Complex64 = num_complex::Complex<f64>;
pub type Complex32 = num_complex::Complex<f32>;

pub type ChannelMatrix = channel::ChannelMatrix<f64>;
pub type ChoiMatrix = channel::ChoiMatrix<f64>;
pub type KrausSet = channel::KrausSet<f64>;
pub type DensityMatrix = channel::DensityMatrix<f64>;
pub type GeneratorMatrix = lindblad::GeneratorMatrix<f64>;
pub type LindbladForm = lindblad::LindbladForm<f64>;
pub type SpectralData = spectral::SpectralData<f64>;
pub type MarkovReport = markov::MarkovReport<f64>;
pub type LorentzSingularValues = divisibility::LorentzSingularValues<f64>;
pub type JCParams = zoo::JCParams<f64>;

pub type ChannelMatrix32 = channel::ChannelMatrix<f32>;
pub type GeneratorMatrix32 = lindblad::GeneratorMatrix<f32>;
pub type SpectralData32 = spectral::SpectralData<f32>;
pub type MarkovReport32 = markov::MarkovReport<f32>;
