//! Terms, atoms, literals, rules and the formulas that populate a knowledge base.

use std::cmp::Ordering;
use std::fmt;

/// A term is either a constant (lowercase-initial) or a variable (uppercase-initial).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Const(String),
    Var(String),
}

impl Term {
    pub fn name(&self) -> &str {
        match self {
            Term::Const(n) | Term::Var(n) => n,
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Atom {
            predicate: predicate.into(),
            args,
        }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(|t| !t.is_var())
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, t) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{t}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// An atom or its strong negation. Double negation is normalised away at
/// construction time, so a literal carries a single polarity bit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Literal {
    pub atom: Atom,
    pub negated: bool,
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Literal {
            atom,
            negated: false,
        }
    }

    pub fn neg(atom: Atom) -> Self {
        Literal {
            atom,
            negated: true,
        }
    }

    pub fn complement(&self) -> Literal {
        Literal {
            atom: self.atom.clone(),
            negated: !self.negated,
        }
    }

    pub fn is_ground(&self) -> bool {
        self.atom.is_ground()
    }

    /// Parse a single ground or non-ground literal such as `~p(a,b)`.
    pub fn parse(text: &str) -> Result<Literal, crate::error::KbError> {
        crate::logic::parse::parse_literal(text)
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("~")?;
        }
        write!(f, "{}", self.atom)
    }
}

impl Ord for Literal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.to_string()
            .cmp(&other.to_string())
            .then_with(|| self.negated.cmp(&other.negated))
    }
}

impl PartialOrd for Literal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strength {
    Strict,
    Defeasible,
}

/// Rule head: a literal, or the absurdity marker `!` for constraints.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Head {
    Lit(Literal),
    Bottom,
}

impl fmt::Display for Head {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Head::Lit(l) => write!(f, "{l}"),
            Head::Bottom => f.write_str("!"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    pub id: String,
    pub body: Vec<Literal>,
    pub head: Head,
    pub strength: Strength,
}

impl Rule {
    pub fn is_constraint(&self) -> bool {
        matches!(self.head, Head::Bottom)
    }

    pub fn head_literal(&self) -> Option<&Literal> {
        match &self.head {
            Head::Lit(l) => Some(l),
            Head::Bottom => None,
        }
    }

    pub fn is_ground(&self) -> bool {
        self.body.iter().all(Literal::is_ground)
            && self.head_literal().is_none_or(Literal::is_ground)
    }

    pub fn arrow(&self) -> &'static str {
        match self.strength {
            Strength::Strict => "->",
            Strength::Defeasible => "=>",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.id)?;
        for (i, l) in self.body.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, " {} {}", self.arrow(), self.head)
    }
}

/// Anything that can be a member of a knowledge base or appear in a
/// derivation: a ground literal, or (in defeasible modes) a rule named by id.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Lit(Literal),
    Rule(String),
    /// The absurdity marker produced when a constraint fires.
    Bottom,
}

impl Formula {
    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Formula::Lit(l) => Some(l),
            Formula::Rule(_) | Formula::Bottom => None,
        }
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, Formula::Bottom)
    }

    /// Parse the rendered form: `[id]` for a rule, otherwise a literal.
    pub fn parse(text: &str) -> Result<Formula, crate::error::KbError> {
        let t = text.trim();
        if t == "!" {
            return Ok(Formula::Bottom);
        }
        if let Some(inner) = t.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            return Ok(Formula::Rule(inner.trim().to_string()));
        }
        Literal::parse(t).map(Formula::Lit)
    }
}

impl From<Literal> for Formula {
    fn from(l: Literal) -> Self {
        Formula::Lit(l)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Lit(l) => write!(f, "{l}"),
            Formula::Rule(id) => write!(f, "[{id}]"),
            Formula::Bottom => f.write_str("!"),
        }
    }
}

/// Formulas serialise as their rendered text.
impl serde::Serialize for Formula {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Formula {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Formula, D::Error> {
        let text = <String as serde::Deserialize>::deserialize(d)?;
        Formula::parse(&text).map_err(serde::de::Error::custom)
    }
}

impl Ord for Formula {
    fn cmp(&self, other: &Self) -> Ordering {
        self.to_string().cmp(&other.to_string())
    }
}

impl PartialOrd for Formula {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonically ordered set of formulas.
pub type FormulaSet = std::collections::BTreeSet<Formula>;

/// Render a formula set as `{a, b, c}`.
pub fn render_set<'a>(items: impl IntoIterator<Item = &'a Formula>) -> String {
    let parts: Vec<String> = items.into_iter().map(|f| f.to_string()).collect();
    format!("{{{}}}", parts.join(", "))
}
