use num_complex::Complex64;

/// Errors raised by the numerical pipeline.
///
/// Every variant carries enough context (usually the offending spectral
/// parameter) to be reported verbatim by the command line driver.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid group element: determinant {det} is not 1")]
    InvalidElement { det: Complex64 },

    #[error("unsupported rank tag {0}")]
    UnsupportedRank(u32),

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("not a Schottky configuration: {0}")]
    NotSchottky(String),

    #[error("action is not properly discontinuous: {0}")]
    NotProperlyDiscontinuous(String),

    #[error("divergence detected at {param} (shell ratio {ratio:.6})")]
    DivergenceDetected { param: Complex64, ratio: f64 },

    #[error("no bracket for the critical exponent in [{lo}, {hi}]")]
    BracketFailure { lo: f64, hi: f64 },

    #[error("bad spectral parameter {lambda}: intertwiner kernel has a pole")]
    BadPoint { lambda: Complex64 },

    #[error("normalization vanishes at {lambda}")]
    NormalizationZero { lambda: Complex64 },

    #[error("singular parameter {lambda}: smallest singular value {min_sv:.3e}")]
    SingularParameter { lambda: Complex64, min_sv: f64 },

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("undefined residual: |E| = {magnitude:.3e} at stencil center")]
    UndefinedResidual { magnitude: f64 },
}

impl Error {
    /// Stable kebab-case name used in diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidElement { .. } => "invalid-element",
            Error::UnsupportedRank(_) => "unsupported-rank",
            Error::InvalidConfiguration(_) => "invalid-configuration",
            Error::NotSchottky(_) => "not-schottky",
            Error::NotProperlyDiscontinuous(_) => "not-properly-discontinuous",
            Error::DivergenceDetected { .. } => "divergence-detected",
            Error::BracketFailure { .. } => "bracket-failure",
            Error::BadPoint { .. } => "bad-point",
            Error::NormalizationZero { .. } => "normalization-zero",
            Error::SingularParameter { .. } => "singular-parameter",
            Error::DomainMismatch(_) => "domain-mismatch",
            Error::UndefinedResidual { .. } => "undefined-residual",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
