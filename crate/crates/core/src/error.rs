use thiserror::Error;

use crate::config::{Label, Vertex};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("chip count must be nonnegative, got {0}")]
    NegativeCount(i64),
    #[error("label {0} is not a positive integer")]
    BadLabel(i64),
    #[error("label {0} is missing from the configuration")]
    MissingLabel(Label),
    #[error("expected labels exactly 1..={expected}, found {found} labels")]
    LabelSetMismatch { expected: usize, found: usize },
    #[error("configurations have unequal totals ({left} vs {right})")]
    UnequalTotals { left: u64, right: u64 },
    #[error("arithmetic overflow while computing {0}")]
    Overflow(&'static str),

    #[error("graph spec: {0}")]
    GraphSyntax(String),
    #[error("vertex {0} is outside the graph's vertex set")]
    VertexOutOfDomain(Vertex),

    #[error("illegal move at vertex {vertex}: {reason}")]
    IllegalMove { vertex: Vertex, reason: String },
    #[error("vertex {vertex} holds {held} chips, needs {needed} to fire")]
    InsufficientChips {
        vertex: Vertex,
        held: u64,
        needed: u64,
    },
    #[error("step budget of {0} firings exhausted before stabilization")]
    BudgetExhausted(u64),
    #[error("scripted strategy ran out of moves before the configuration was stable")]
    ScriptExhausted,
    #[error("configuration is not stable on the graph")]
    NotStable,
    #[error("no closed form is available for graph `{0}`")]
    UnsupportedGraph(String),
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("root {root} is not orthogonal to the current vector")]
    RootNotOrthogonal { root: String },

    #[error("stable configurations cannot be read as permutations: {0}")]
    NotPermutation(String),
    #[error("parameters are infeasible: {0}")]
    Infeasible(String),
}
