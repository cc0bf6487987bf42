use thiserror::Error;

use crate::algebra::Mode;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("fiber rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("coefficient ring mismatch: {0} vs {1}")]
    RingMismatch(String, String),
    #[error("element is not even")]
    OddElement,
    #[error("body is not invertible in {0} mode")]
    NonInvertibleBody(Mode),
    #[error("body is not the constant 1")]
    BodyNotOne,
    #[error("operation needs torus mode")]
    ChartModeUnsupported,
    #[error("coordinate x{0} is not a periodic function on the torus")]
    NonPeriodic(usize),
    #[error("division by a non-unit coefficient in {0} mode")]
    NonUnitCoefficient(Mode),
    #[error("symplectic volume coefficient is not a unit in {0} mode")]
    NonUnitVolumeCoefficient(Mode),
    #[error("metric determinant is not constant")]
    NonConstantMetricDeterminant,
    #[error("metric determinant {0} has no rational square root; supply an explicit volume scale")]
    IrrationalSqrt(String),
    #[error("body of the Gram matrix is degenerate ({0})")]
    DegenerateBody(String),
    #[error("derivation is not homogeneous")]
    Inhomogeneous,
    #[error("index {index} out of range 0..{bound}")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid symplectic data: {0}")]
    InvalidData(String),
    #[error("nilpotent series did not terminate after {0} terms")]
    SeriesDidNotTerminate(usize),
    #[error("back-substitution left a nonzero residual")]
    BackSubstitution,
    #[error("modular field is not locally hamiltonian: d(alpha) != 0")]
    NotLocallyHamiltonian,
    #[error("quotient W/W_hat is not exact in the coefficient ring")]
    InexactQuotient,
    #[error("continuity residual is nonzero")]
    NonzeroResidual,
}

pub type Result<T> = std::result::Result<T, Error>;
