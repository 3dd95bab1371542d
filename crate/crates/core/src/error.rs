use thiserror::Error;

/// Every failure mode of the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error(
        "Fock truncation unconverged: thermal tail mass {tail:.3e} beyond dim {dim} exceeds \
         cutoff {cutoff:.3e} (try dim >= {suggested})"
    )]
    TruncationUnconverged {
        dim: usize,
        tail: f64,
        cutoff: f64,
        suggested: usize,
    },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("Laplace transform evaluated on the pole of harmonic n = {n}")]
    LaplacePole { n: i64 },

    #[error("integration step too coarse: {0}")]
    StepTooCoarse(String),

    #[error("pole search failed: {0}")]
    PoleSearch(String),

    #[error("series needs {needed} terms for convergence, only {given} allowed")]
    SlowConvergence { needed: usize, given: usize },

    #[error("frequency bracket [{lo:e}, {hi:e}] does not contain the residual minimum")]
    Bracket { lo: f64, hi: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error(
        "effective frequency is not strictly monotone on [{t_lo:e}, {t_hi:e}] (plateau); \
         raise the lower temperature bound"
    )]
    Plateau { t_lo: f64, t_hi: f64 },

    #[error("measured frequency {omega:e} outside the attainable range [{lo:e}, {hi:e}]")]
    OutOfRange { omega: f64, lo: f64, hi: f64 },

    #[error("non-uniform time grid at sample {index}")]
    NonUniformGrid { index: usize },

    #[error("at T = {temperature:e} K: {source}")]
    AtTemperature {
        temperature: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parameter { .. } | Error::Config(_) => 2,
            Error::Io(_) => 4,
            Error::AtTemperature { source, .. } => source.exit_code(),
            _ => 3,
        }
    }
}
