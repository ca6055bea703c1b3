use thiserror::Error;

/// Errors shared across the toolkit.
#[derive(Error, Debug, Clone)]
pub enum Error {
    #[error("parameter out of domain: {0}")]
    Domain(String),
    #[error("no wave exists for the given parameters: {0}")]
    Existence(String),
    #[error("root finding failed: {0}")]
    RootFinding(String),
    #[error("ODE integration failed: {0}")]
    Integration(String),
    #[error("determinant sample hit zero on the contour (|value| = {value:.3e})")]
    ContourHit { value: f64 },
    #[error("winding number did not converge to an integer (got {0})")]
    WindingNonInteger(f64),
    #[error("degenerate eigenvalue seed: {0}")]
    DegenerateSeed(String),
    #[error("series truncation failed to converge: {0}")]
    SeriesDiverged(String),
    #[error("Weierstrass degeneracy: {0}")]
    WeierstrassDegenerate(String),
    #[error("continuation stalled: {0}")]
    ContinuationStalled(String),
    #[error("simulation failure: {0}")]
    Simulation(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
