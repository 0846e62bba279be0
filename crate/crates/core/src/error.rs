use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gamma function pole at argument {0}")]
    GammaPole(f64),
    #[error("non-finite input to {0}")]
    NonFinite(&'static str),
    #[error("series for {what} did not converge within {cap} terms at |x| = {abs_x}")]
    NonConvergence {
        what: &'static str,
        cap: usize,
        abs_x: f64,
    },
    #[error("{0} is singular at zero argument")]
    ZeroArgument(&'static str),
    #[error("argument |z| = {abs_z} is below the validity cutoff {cutoff}")]
    Domain { abs_z: f64, cutoff: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("potential supports a bound state: zero-energy solution has {nodes} node(s)")]
    BoundState { nodes: usize },
    #[error("threshold: E = 0 must be handled by the threshold expansion")]
    Threshold,
    #[error("energy {re} + {im}i lies on the branch cut")]
    BranchCut { re: f64, im: f64 },
    #[error("zero-energy boundary combination vanishes (|beta*phi0/r_d + phi0'| = {0:e})")]
    DegenerateBoundary(f64),
    #[error("tolerance not met at t = {t}: estimated error {achieved:e} > {tolerance:e}")]
    ToleranceNotMet {
        t: f64,
        achieved: f64,
        tolerance: f64,
    },
    #[error("continuation of the density failed at x = {0}")]
    ContinuationFailure(f64),
    #[error("asymptotic series needs {requested} coefficients but only {available} are available")]
    InsufficientCoefficients { requested: usize, available: usize },
    #[error("fit window [{t_lo}, {t_hi}] contains {found} points, need at least {needed}")]
    WindowCoverage {
        t_lo: f64,
        t_hi: f64,
        found: usize,
        needed: usize,
    },
    #[error("non-positive survival probability {p:e} at t = {t}")]
    NonPositive { t: f64, p: f64 },
    #[error("step size {step} exceeds the allowed maximum {max}")]
    StepSize { step: f64, max: f64 },
    #[error("singular matching system (determinant {0:e})")]
    SingularSystem(f64),
    #[error("brute-force quadrature would need {0} nodes, above the resource limit")]
    ResourceLimit(usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable class name, used for CLI exit reporting.
    pub fn class(&self) -> &'static str {
        match self {
            Error::GammaPole(_) => "gamma-pole",
            Error::NonFinite(_) => "non-finite",
            Error::NonConvergence { .. } => "non-convergence",
            Error::ZeroArgument(_) => "zero-argument",
            Error::Domain { .. } => "domain",
            Error::InvalidParameter(_) => "invalid-parameter",
            Error::BoundState { .. } => "bound-state",
            Error::Threshold => "threshold",
            Error::BranchCut { .. } => "branch-cut",
            Error::DegenerateBoundary(_) => "degenerate-boundary",
            Error::ToleranceNotMet { .. } => "tolerance-not-met",
            Error::ContinuationFailure(_) => "continuation-failure",
            Error::InsufficientCoefficients { .. } => "insufficient-coefficients",
            Error::WindowCoverage { .. } => "window-coverage",
            Error::NonPositive { .. } => "non-positive",
            Error::StepSize { .. } => "step-size",
            Error::SingularSystem(_) => "singular-system",
            Error::ResourceLimit(_) => "resource-limit",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        match e.kind() {
            csv::ErrorKind::Io(_) => Error::Io(e.to_string()),
            _ => Error::Parse(e.to_string()),
        }
    }
}
