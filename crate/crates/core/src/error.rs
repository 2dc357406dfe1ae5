use thiserror::Error;

/// Errors raised anywhere in the solver pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("no radial confinement: oscillator strength A must be positive (got {0}); no bound spectrum exists")]
    NoConfinement(f64),

    #[error("complex index: {0}")]
    ComplexIndex(String),

    #[error("no NU reduction: {0}")]
    NoReduction(String),

    #[error("no admissible NU branch: {0}")]
    NoAdmissibleBranch(String),

    #[error("bracket error: {0}")]
    Bracket(String),

    #[error("unsupported polynomial class: {0}")]
    UnsupportedClass(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular point: {0}")]
    SingularPoint(String),

    #[error("inadmissible: {0}")]
    Inadmissible(String),

    #[error("grid error: {0}")]
    Grid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
