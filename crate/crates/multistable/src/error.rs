//! Error taxonomy shared by the library and the command-line tool.
//!
//! Variants are grouped by how a caller should react: invalid inputs and
//! violated model hypotheses are usage errors, resource-cap hits are
//! retryable with smaller requests, and the numeric variants mean a
//! computation could not reach its tolerance.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A model hypothesis required by a kernel or check does not hold; the
    /// message states the violated inequality and the offending values.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    /// A declared singularity makes |f|^alpha non-integrable for some
    /// exponent the index function can take.
    #[error(
        "non-integrable singularity at x = {location}: integrand behaves like \
         |x - {location}|^{exponent} with exponent <= -1 for alpha in [{alpha_lo}, {alpha_hi}]"
    )]
    NonIntegrableSingularity {
        location: f64,
        exponent: f64,
        alpha_lo: f64,
        alpha_hi: f64,
    },

    /// An unbounded tail decays too slowly to integrate.
    #[error("non-integrable tail: integrand decays like |x|^{exponent}, need exponent < -1")]
    NonIntegrableTail { exponent: f64 },

    #[error("quadrature did not converge: last two estimates {previous:e} and {last:e}")]
    QuadratureNonConvergence { last: f64, previous: f64 },

    #[error("non-finite integrand value near x = {x}")]
    NonFiniteIntegrand { x: f64 },

    #[error(
        "Luxemburg norm bracketing failed after scaling lambda through 2^±64: \
         rho({lambda}) = {rho}"
    )]
    BracketFailure { lambda: f64, rho: f64 },

    #[error("resource cap exceeded: {needed} cells requested, cap is {cap}")]
    ResourceCap { needed: u64, cap: u64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code the CLI maps this error to:
    /// 2 = validation, 3 = resource, 4 = numeric.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_)
            | Error::Hypothesis(_)
            | Error::NonIntegrableSingularity { .. }
            | Error::NonIntegrableTail { .. } => 2,
            Error::ResourceCap { .. } => 3,
            Error::QuadratureNonConvergence { .. }
            | Error::NonFiniteIntegrand { .. }
            | Error::BracketFailure { .. } => 4,
            Error::Io(_) => 2,
        }
    }
}
