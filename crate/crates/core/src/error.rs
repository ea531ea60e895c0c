use thiserror::Error;

/// Errors raised by net construction, analysis and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown transition `{0}`")]
    UnknownTransition(String),

    #[error("unknown place `{0}`")]
    UnknownPlace(String),

    #[error("duplicate identifier `{0}`")]
    DuplicateId(String),

    #[error("marking has {found} entries, net has {expected} places")]
    MarkingLength { expected: usize, found: usize },

    #[error("transition `{transition}` not enabled{}: place `{place}` holds {tokens}, needs {needed}", index.map(|i| format!(" at step {i}")).unwrap_or_default())]
    NotEnabled {
        transition: String,
        place: String,
        tokens: u32,
        needed: u32,
        index: Option<usize>,
    },

    #[error("transition `{0}` is not explicit (low-level)")]
    NotExplicit(String),

    #[error("transition `{0}` lies outside the index set")]
    OutsideIndexSet(String),

    #[error("label `{0}` is assigned to both levels (explicit and implicit labels must be disjoint)")]
    LabelLevelConflict(String),

    #[error("net is unbounded: firing {path:?} from the initial marking reaches {dominating}, which strictly dominates {dominated} (reached after step {from_step})")]
    Unbounded {
        path: Vec<String>,
        from_step: usize,
        dominated: String,
        dominating: String,
    },

    #[error("boundedness unknown: exploration cap of {cap} markings exhausted")]
    CapExhausted { cap: usize },

    #[error("implicit subnet contains a cycle: {}", cycle.join(" -> "))]
    CyclicImplicitSubnet { cycle: Vec<String> },

    #[error("{what} exceeded its budget of {limit} nodes")]
    BudgetExceeded { what: &'static str, limit: usize },

    #[error("invalid net document at {field}: {message}")]
    Document { field: String, message: String },

    #[error("malformed net document (line {line}, column {column}): {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Syntax {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }
}
