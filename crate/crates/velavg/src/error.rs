use thiserror::Error;

/// Errors raised by grid construction, validation and the numerical checks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("grids do not match")]
    GridMismatch,
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("velocity boundary shell carries {ratio:.3e} of the mass (limit {limit:.1e})")]
    BoundaryMass { ratio: f64, limit: f64 },
    #[error("streamed support leaves the box: half-width must be at least {min_half_width:.6}")]
    BoxOverflow { min_half_width: f64 },
    #[error("invalid exponent: {0}")]
    Exponent(String),
    #[error("constraint violated: {0}")]
    Constraint(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("singular system: {0}")]
    Singular(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error("malformed data: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
