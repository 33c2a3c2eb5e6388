use thiserror::Error;

/// Failure modes shared by every solver stage.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DsgeError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("no such branch: {0}")]
    NoSuchBranch(String),

    #[error("extremum quartic has no real root")]
    NoRealRoot,

    #[error("kind {kind} is not admissible at eta = {eta}")]
    InadmissibleKind { kind: String, eta: f64 },

    #[error("negative radicand {value:e} at theta = {theta}")]
    NegativeRadicand { theta: f64, value: f64 },

    #[error("turning points violate Vieta relations (residual {residual:e})")]
    InconsistentVieta { residual: f64 },

    #[error("Möbius coefficients cannot be made real (max imaginary part {imag:e})")]
    NonRealizable { imag: f64 },

    #[error("r^2 = {r_squared} < 0: asymptote is not a potential minimum")]
    NegativeRSquared { r_squared: f64 },

    #[error("elimination degenerated: {0}")]
    DegenerateElimination(String),

    #[error("leading coefficient {0:e} vanishes; polynomial degree collapses")]
    DegreeCollapse(f64),

    #[error("degenerate configuration: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, DsgeError>;
