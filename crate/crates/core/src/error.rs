use crate::linalg::LinalgError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix size {0} is not the square of an integer dimension")]
    NotASquareOfSquare(usize),
    #[error("unsupported basis: {0}")]
    UnsupportedBasis(String),
    #[error("parameter `{name}` = {value} out of range ({expected})")]
    RangeError { name: &'static str, value: f64, expected: &'static str },
    #[error("determinant has imaginary part {imag:e}; input is not Hermiticity preserving")]
    NonRealDeterminant { imag: f64 },
    #[error("matrix is defective or its eigenbasis is ill-conditioned ({0})")]
    DefectiveMatrix(String),
    #[error("complex eigenvalue {0} has no conjugate partner")]
    UnpairedComplexEigenvalue(String),
    #[error("channel has a zero eigenvalue; no logarithm exists")]
    SingularChannel,
    #[error("channel has a negative real eigenvalue {0}; no Hermitian logarithm exists")]
    NegativeRealEigenvalue(f64),
    #[error("branch index has length {found}, expected {expected}")]
    BranchLengthMismatch { expected: usize, found: usize },
    #[error("map is not Hermiticity preserving (violation {violation:e})")]
    NotHermiticityPreserving { violation: f64 },
    #[error("not a Lindblad generator: {0}")]
    NotAGenerator(String),
    #[error("invalid Lindblad form: {0}")]
    InvalidForm(String),
    #[error("time-ordered integration failed near t = {t}: step below {dt_min:e} without reaching tolerance")]
    StepFailure { t: f64, dt_min: f64 },
    #[error("qubit map required, got dimension {0}")]
    NotQubit(usize),
    #[error("Lorentz spectrum is genuinely complex (max imaginary part {0:e}); divisibility criterion undefined")]
    ComplexLorentzSpectrum(f64),
    #[error("random sample degenerate after {0} attempts")]
    DegenerateSample(usize),
    #[error("not a quantum channel: {0}")]
    NotAChannel(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Whether the failure is numerical (as opposed to malformed input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::DefectiveMatrix(_)
                | Error::UnpairedComplexEigenvalue(_)
                | Error::SingularChannel
                | Error::NegativeRealEigenvalue(_)
                | Error::NonRealDeterminant { .. }
                | Error::StepFailure { .. }
                | Error::ComplexLorentzSpectrum(_)
                | Error::DegenerateSample(_)
                | Error::Linalg(_)
        )
    }
}
