use thiserror::Error;

/// Errors raised by the workbench. Mathematical verdicts (mismatch,
/// inconclusive, relation failures) are results, not errors.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid Cartan type {series}{rank}: {reason}")]
    InvalidCartanType {
        series: String,
        rank: usize,
        reason: String,
    },
    #[error("invalid Cartan datum: {0}")]
    InvalidCartanDatum(String),
    #[error("Weyl group enumeration exceeded the cap of {cap} elements")]
    WeylOverflow { cap: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("pole at q = {point}")]
    Pole { point: String },
    #[error("coefficient size {bits} bits exceeds the ceiling of {ceiling} bits")]
    CoefficientOverflow { bits: u64, ceiling: u64 },
    #[error("cannot parse scalar {input:?}: {reason}")]
    ScalarParse { input: String, reason: String },
    #[error("Serre relation requires distinct indices, got i = j = {0}")]
    SerreIndex(usize),
    #[error("index {index} out of range for rank {rank}")]
    IndexOutOfRange { index: usize, rank: usize },
    #[error("weight {weight:?} is outside the stored table window")]
    TableLookup { weight: Vec<i64> },
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("relation is not homogeneous: {0}")]
    Inhomogeneous(String),
    #[error("requested degree {requested} lies outside the certified region (certified through {certified})")]
    Uncertified { requested: usize, certified: usize },
    #[error("trivial module impossible at {weight:?}: f_{j}(n0) = {value} is nonzero")]
    NotTrivial {
        weight: Vec<i64>,
        j: usize,
        value: String,
    },
    #[error("simple module construction did not close within depth cap {depth_cap}")]
    NonTermination { depth_cap: usize },
    #[error("singular parameter: {0}")]
    SingularParameter(String),
    #[error("constructed module violates relation {relation} at weight {weight:?}")]
    InconsistentParameters { relation: String, weight: Vec<i64> },
    #[error("module does not fit the window: {0}")]
    ModuleOutsideWindow(String),
    #[error("margin violation: {0}")]
    MarginViolation(String),
    #[error("resolution invariant broken: {0}")]
    ResolutionInvariant(String),
    #[error("unstable Ext data: {0}")]
    Unstable(String),
    #[error("tail not provably zero: {0}")]
    TailNotZero(String),
    #[error("invalid configuration field `{field}`: {reason}")]
    Config { field: String, reason: String },
    #[error("cache error at {path}: {reason}")]
    Cache { path: String, reason: String },
    #[error("io error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
