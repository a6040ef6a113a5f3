use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("name `{0}` is used by more than one of leaves, symbols and the hole token")]
    NameClash(String),
    #[error("output set is empty")]
    EmptyOutputSet,
    #[error("invalid identifier `{0}`")]
    InvalidIdentifier(String),
    #[error("powerset branching bound must be positive")]
    ZeroBranching,
    #[error("one-layer enumeration would produce {count} layers, above the cap of {cap}")]
    CarrierTooLarge { count: u128, cap: usize },
    #[error("missing transition for {0}")]
    MissingTransition(String),
    #[error("invalid automaton: {0}")]
    InvalidAutomaton(String),
    #[error("malformed term: {0}")]
    MalformedTerm(String),
    #[error("syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error("table is not closed and consistent")]
    NotClosedOrConsistent,
    #[error("hypothesis is not well defined: {0}")]
    WellDefinednessBreach(String),
    #[error("learning invariant violated: {0}")]
    InvariantBreach(String),
    #[error("iteration budget of {0} exceeded")]
    IterationBudgetExceeded(usize),
    #[error("teacher error: {0}")]
    Teacher(String),
}
