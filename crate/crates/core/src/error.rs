use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate tuple: {0}")]
    DegenerateTuple(String),
    #[error("singular matrix (|det| = {0:e})")]
    SingularMatrix(f64),
    #[error("points come from different boundary models")]
    MixedModels,
    #[error("restricted form is not Lorentzian: {0}")]
    SignatureError(String),
    #[error("flags are not opposite")]
    NotOpposite,
    #[error("flag triple is not generic: {0}")]
    NotGeneric(String),
    #[error("alternation over {0} slots exceeds the factorial guard of {1}")]
    ArityTooLarge(usize, usize),
    #[error("expected {expected} arguments, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("sampler exhausted after {draws} draws for {requested} generic tuples")]
    SamplerExhausted { draws: usize, requested: usize },
    #[error("degenerate arguments: {0}")]
    DegenerateArguments(String),
    #[error("defect {defect:e} exceeds the blowup threshold {threshold:e}; no certificate issued")]
    UnboundedDefect { defect: f64, threshold: f64 },
    #[error("evaluation failed: {0}")]
    EvaluationError(String),
    #[error("symmetry extension needs a function declared alternating")]
    MissingAlternation,
    #[error("doubling iteration exceeded the cap of {0} steps")]
    IterationOverflow(usize),
    #[error("unknown invariant `{0}`")]
    UnknownInvariant(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
