use thiserror::Error;

pub type Result<T> = std::result::Result<T, QkmError>;

#[derive(Debug, Error)]
pub enum QkmError {
    #[error("unknown species `{0}` (expected he3 or he4)")]
    UnknownSpecies(String),

    #[error("{op}: domain error: {msg}")]
    Domain { op: &'static str, msg: String },

    #[error("{op}: range error: {msg}")]
    Range { op: &'static str, msg: String },

    #[error("degenerate regime: 2A = {x} <= 1, fermions cannot be supported")]
    Degenerate { x: f64 },

    #[error("value {value} does not fit in {k} bits")]
    Overflow { value: u64, k: u32 },

    #[error("unknown estimator `{0}`")]
    UnknownEstimator(String),

    #[error("payload of {len} bits is not divisible into groups of {group} bits")]
    Divisibility { len: usize, group: usize },

    #[error("step outside the differential regime: {0}")]
    StepSize(String),

    #[error("trace never reaches the plateau")]
    NoPlateau,

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl QkmError {
    pub(crate) fn domain(op: &'static str, msg: impl Into<String>) -> Self {
        QkmError::Domain { op, msg: msg.into() }
    }

    pub(crate) fn range(op: &'static str, msg: impl Into<String>) -> Self {
        QkmError::Range { op, msg: msg.into() }
    }

    /// True for errors caused by invalid physical or numerical input,
    /// as opposed to I/O or file-format problems.
    pub fn is_validation(&self) -> bool {
        !matches!(self, QkmError::Io(_) | QkmError::Json(_) | QkmError::Format(_))
    }
}
