use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("unknown tail `{0}`")]
    UnknownTail(String),
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("name `{0}` is already in use")]
    DuplicateName(String),
    #[error("edges do not compose: source of `{left}` is `{at}`, range of `{right}` differs")]
    JunctionMismatch {
        left: String,
        at: String,
        right: String,
    },
    #[error("paths have different ranges: `{0}` vs `{1}`")]
    RangeMismatch(String, String),
    #[error("empty edge list where a nonempty path was expected")]
    EmptyPath,
    #[error("invalid infinite path description: {0}")]
    BadSpec(String),
    #[error("graph failed validation: {0}")]
    InvalidGraph(String),
    #[error("graph already contains tails; expected a tail-free presentation")]
    HasTails,
    #[error("invalid schedule policy: {0}")]
    BadPolicy(String),
    #[error("tail `{tail}` is not collapsible: {condition} fails ({witness})")]
    NotCollapsible {
        tail: String,
        condition: String,
        witness: String,
    },
    #[error("elements live over different graphs")]
    GraphMismatch,
    #[error("path ends strictly inside a collapsed tail")]
    EndsMidTail,
    #[error("range vertex `{0}` does not survive the collapse")]
    RangeNotSurviving(String),
    #[error("boundary path has no preimage under the collapse correspondence: {0}")]
    NoPreimage(String),
    #[error("point does not lie in the given cylinder")]
    NotInCylinder,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("witness self-check failed: {0}")]
    WitnessCheckFailed(String),
    #[error("not a boundary path: {0}")]
    NotBoundary(String),
    #[error("inconsistent prefix family: {0}")]
    BadPrefixFamily(String),
    #[error("cluster input has incomparable stems `{0}` and `{1}` hit by the whole window")]
    IncomparableStems(String, String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("internal invariant breached: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
