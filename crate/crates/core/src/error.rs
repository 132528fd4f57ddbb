use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} variables, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("clause width {k} exceeds variable count {n}")]
    WidthExceedsVariables { k: usize, n: usize },

    #[error("invalid clause: {0}")]
    InvalidClause(String),

    #[error("invalid assignment: {0}")]
    InvalidAssignment(String),

    #[error("planted assignment does not satisfy the formula")]
    PlantedNotSatisfying,

    #[error("assignment does not satisfy the formula")]
    NotSatisfying,

    #[error("formula is unsatisfiable")]
    Unsatisfiable,

    #[error("{requested} distinct clauses requested but the universe holds only {available}")]
    UniverseTooSmall { requested: usize, available: String },

    #[error("no satisfiable formula after {0} tries")]
    Exhausted(u64),

    #[error("{n} variables exceed the enumeration bound of {bound}")]
    EnumerationBound { n: usize, bound: usize },

    #[error("{count} solutions exceed the pair-profile cap of {cap}")]
    SolutionCap { count: usize, cap: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("regime violation: {0}")]
    Regime(String),

    #[error("bracket failure: {0}")]
    Bracket(String),

    #[error("arithmetic overflow: {0}")]
    Overflow(String),
}
