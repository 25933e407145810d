//! Knowledge bases, the consequence operator and repair enumeration.

pub mod engine;
pub mod eval;
pub mod kb;
pub mod parse;
pub mod syntax;

pub use kb::{
    check_acyclic_dependency, closure, cn_step, contrapositives, entails, enumerate_mcs, ground_rules, is_consistent,
    mcs_query, minimal_conflicts, parse_kb, DependencyCheck, KnowledgeBase, McsMode, Mode,
};
pub use syntax::{render_set, Atom, Formula, FormulaSet, Head, Literal, Rule, Strength, Term};
