//! Proof-oriented structured argumentation with collective attacks over
//! possibly inconsistent rule-based knowledge bases, with dialogue-based
//! explanations of credulous, grounded and sceptical acceptance.

pub mod error;
pub mod logic;

pub use error::{DialogueError, KbError, PsafError};
pub mod argumentation;
pub mod semantics;
pub mod gen;
pub mod dialogue;
pub mod render;
