use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("node {node} out of range for n = {n}")]
    NodeOutOfRange { node: usize, n: usize },

    #[error("reflexive arc ({0}, {0}) is not allowed")]
    ReflexiveArc(usize),

    #[error("process count {n} unsupported (must be between 1 and {max})")]
    ProcessCount { n: usize, max: usize },

    #[error("process count mismatch: expected {expected}, found {found}")]
    ProcessCountMismatch { expected: usize, found: usize },

    #[error("empty value set")]
    EmptyValues,

    #[error("simplex is not properly colored: name {0} repeats")]
    RepeatedName(usize),

    #[error("simplex {0} is not a face of the complex")]
    NotInComplex(String),

    #[error("complex is empty")]
    EmptyComplex,

    #[error("complex is not pure")]
    NotPure,

    #[error("input complex is not a full pseudosphere on the process names")]
    NotPseudosphere,

    #[error("order is not a permutation of the facets of the complex")]
    NotAPermutation,

    #[error("prefix of length {0} is not a valid shelling prefix")]
    InvalidShellingPrefix(usize),

    #[error("prefix index {t} out of range 1..={max}")]
    PrefixOutOfRange { t: usize, max: usize },

    #[error("task unsatisfiable: input facet {0} has no legal output")]
    Unsatisfiable(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("decision map undefined on protocol vertex {0}")]
    PartialDecisionMap(String),

    #[error("domination number {gamma} exceeds k = {k}")]
    DominationTooLarge { gamma: usize, k: usize },

    #[error("view average {value} of process {process} is not on the 1/{m} grid")]
    OffGrid { process: usize, value: String, m: u64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
