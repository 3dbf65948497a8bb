use num_rational::Rational64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("division by zero in Q(sqrt 5)")]
    DivisionByZero,

    #[error("not representable: {0}")]
    NotRepresentable(String),

    #[error("series is not invertible: its constant term is zero")]
    NotInvertible,

    #[error("q -> -q needs integer exponents, but q^{0} has a nonzero coefficient")]
    FractionalExponent(Rational64),

    #[error("comparison requested below q^{requested}, but the series are exact only below q^{available}")]
    OrderTooSmall {
        requested: Rational64,
        available: Rational64,
    },

    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),

    #[error("identity {id} is checked by the {actual} backend, not the {requested} one")]
    BackendMismatch {
        id: String,
        requested: &'static str,
        actual: &'static str,
    },

    #[error("sample |q| = {0} lies outside the allowed disc |q| <= 0.5")]
    SampleOutOfRange(f64),

    #[error("theta sum not converged: last included term {last:e} exceeds {bound:e}")]
    NonConvergent { last: f64, bound: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
