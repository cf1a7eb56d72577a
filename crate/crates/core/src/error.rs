use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("matrix is not Hermitian (defect {defect:.3e}, allowed {allowed:.3e})")]
    NotHermitian { defect: f64, allowed: f64 },

    #[error("matrix is not unitary (defect {0:.3e})")]
    NotUnitary(f64),

    #[error("matrix is singular (smallest singular value {0:.3e})")]
    Singular(f64),

    #[error(
        "eigensolver did not converge after {sweeps} sweeps (off-diagonal residual {residual:.3e})"
    )]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("chart singularity: {0}")]
    ChartSingularity(String),

    #[error("ambiguous band grouping: eigenvalue spacing {spacing:.3e} lies between tol {tol:.3e} and 2*tol")]
    AmbiguousBanding { spacing: f64, tol: f64 },

    #[error("band {index} not found (frame has {available} bands)")]
    NoSuchBand { index: usize, available: usize },

    #[error("band multiplicity {actual} differs from expected {expected}")]
    MultiplicityMismatch { expected: usize, actual: usize },

    #[error(
        "band is {multiplicity}-fold degenerate; use the Wilczek-Zee routines for degenerate bands"
    )]
    DegenerateBand { multiplicity: usize },

    #[error("gauge is singular at this point (reference overlap {0:.3e})")]
    GaugeSingular(f64),

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("loop resolution insufficient after {refinements} refinements: {reason}")]
    Resolution { refinements: usize, reason: String },

    #[error("quadrature did not reach tolerance {tol:.3e} (estimated error {estimate:.3e})")]
    QuadratureTolerance { tol: f64, estimate: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
