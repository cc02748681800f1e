use thiserror::Error;

/// Errors produced by model construction, propagation and analysis.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("index {index} out of range for {n} atoms")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("dipole shift kernel is singular for atoms {i} and {j} (zero separation)")]
    SingularKernel { i: usize, j: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("integration step {step:e} s exceeds stability bound {bound:e} s")]
    StepTooLarge { step: f64, bound: f64 },

    #[error("numerical invariant violated: {0}")]
    InvariantViolation(String),

    #[error("conditional quantity undefined: excitation survival probability is zero")]
    UndefinedConditional,

    #[error("state is not asymptotic: {0}")]
    NonAsymptotic(String),

    #[error("eigen-decomposition did not converge")]
    NoConvergence,

    #[error("configuration error:\n{}", format_issues(.0))]
    Config(Vec<ConfigIssue>),

    #[error("scenario {name}: {source}")]
    Scenario {
        name: String,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// The innermost error, looking through scenario context.
    pub fn root(&self) -> &Error {
        match self {
            Error::Scenario { source, .. } => source.root(),
            other => other,
        }
    }

    pub(crate) fn in_scenario(self, name: &str) -> Error {
        Error::Scenario {
            name: name.to_string(),
            source: Box::new(self),
        }
    }
}

/// One problem found while validating a scenario configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigIssue {
    /// Dotted path of the offending field, or `line:col` for syntax errors.
    pub field: String,
    pub message: String,
}

impl std::fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

fn format_issues(issues: &[ConfigIssue]) -> String {
    issues
        .iter()
        .map(|i| format!("  {i}"))
        .collect::<Vec<_>>()
        .join("\n")
}

pub type Result<T> = std::result::Result<T, Error>;
