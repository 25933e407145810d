use thiserror::Error;

/// Errors raised while reading or validating a knowledge base.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KbError {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("rule {rule}: head variable {var} does not occur in the body (existential rules are not supported)")]
    Existential { rule: String, var: String },
    #[error("line {line}: predicate {predicate} used with arity {found}, previously {expected}")]
    Arity {
        line: usize,
        predicate: String,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: duplicate rule id {id}")]
    DuplicateId { line: usize, id: String },
    #[error("line {line}: {msg}")]
    Invalid { line: usize, msg: String },
}

/// Errors raised by argument construction and everything built on it.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PsafError {
    #[error(transparent)]
    Kb(#[from] KbError),
    #[error("dependency graph is cyclic: {}", .cycle.join(" -> "))]
    Cyclic { cycle: Vec<String> },
    #[error("argument enumeration exceeded the cap of {cap} arguments")]
    TooManyArguments { cap: usize },
    #[error("{0}")]
    Precondition(String),
}

/// Errors raised while building a dialogue tree from a sequence of utterances.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DialogueError {
    #[error("utterance {id}: target {target} does not refer to an earlier utterance")]
    DanglingTarget { id: u32, target: u32 },
    #[error("utterance {id}: identifiers must strictly increase (previous {prev})")]
    NonIncreasingId { id: u32, prev: u32 },
    #[error("utterance {id}: the first utterance must be a claim with target 0")]
    BadOpening { id: u32 },
    #[error("utterance {id}: illegal move: {reason}")]
    Illegal { id: u32, reason: String },
    #[error("utterance {id}: no node to attach to: {reason}")]
    MissingTarget { id: u32, reason: String },
    #[error("malformed dialogue: {0}")]
    Malformed(String),
}
