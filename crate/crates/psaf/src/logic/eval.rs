//! Direct (matching-based) evaluation of rules over arbitrary ground sets.
//!
//! This is the reference semantics behind the public `cn_step`/`closure`
//! operations. The bitset engine is built on top of it for the datalog
//! grounding and is cross-checked against it in tests.

use std::collections::{BTreeSet, HashMap};

use super::kb::{KnowledgeBase, Mode};
use super::syntax::{Atom, Head, Literal, Rule, Term};

type Subst = HashMap<String, String>;

pub struct Evaluator<'a> {
    kb: &'a KnowledgeBase,
    contras: Vec<(String, Rule)>,
}

fn match_literal(pattern: &Literal, ground: &Literal, subst: &mut Subst) -> Option<Vec<String>> {
    if pattern.negated != ground.negated
        || pattern.atom.predicate != ground.atom.predicate
        || pattern.atom.args.len() != ground.atom.args.len()
    {
        return None;
    }
    let mut bound = Vec::new();
    for (p, g) in pattern.atom.args.iter().zip(&ground.atom.args) {
        let g = g.name();
        match p {
            Term::Const(c) => {
                if c != g {
                    for b in bound {
                        subst.remove(&b);
                    }
                    return None;
                }
            }
            Term::Var(v) => match subst.get(v) {
                Some(val) if val != g => {
                    for b in bound {
                        subst.remove(&b);
                    }
                    return None;
                }
                Some(_) => {}
                None => {
                    subst.insert(v.clone(), g.to_string());
                    bound.push(v.clone());
                }
            },
        }
    }
    Some(bound)
}

/// Apply a substitution to a literal; every variable must be bound.
pub fn substitute(lit: &Literal, subst: &HashMap<String, String>) -> Literal {
    let args = lit
        .atom
        .args
        .iter()
        .map(|t| match t {
            Term::Var(v) => Term::Const(subst.get(v).cloned().unwrap_or_else(|| v.clone())),
            c => c.clone(),
        })
        .collect();
    Literal {
        atom: Atom::new(lit.atom.predicate.clone(), args),
        negated: lit.negated,
    }
}

impl<'a> Evaluator<'a> {
    pub fn new(kb: &'a KnowledgeBase) -> Self {
        let contras = if kb.mode == Mode::DefeasibleContrapositive {
            kb.rules
                .iter()
                .flat_map(|r| super::kb::contrapositives(std::slice::from_ref(r)).into_iter().map(move |c| (r.id.clone(), c)))
                .collect()
        } else {
            Vec::new()
        };
        Evaluator { kb, contras }
    }

    /// Rules that may fire given the selected rule ids. In datalog mode every
    /// rule is always active; in defeasible modes only selected rules (and,
    /// in contrapositive mode, their contrapositives). Constraints are always active.
    fn active(&self, selected: &[String]) -> Vec<&Rule> {
        let mut out: Vec<&Rule> = Vec::new();
        match self.kb.mode {
            Mode::Datalog => out.extend(self.kb.rules.iter()),
            Mode::Defeasible | Mode::DefeasibleContrapositive => {
                out.extend(self.kb.rules.iter().filter(|r| selected.contains(&r.id)));
                out.extend(self.contras.iter().filter(|(src, _)| selected.contains(src)).map(|(_, r)| r));
            }
        }
        out.extend(self.kb.constraints.iter());
        out
    }

    /// All ground instances (rule, body, head) of active rules whose body lies in `set`.
    pub fn instances(&self, set: &BTreeSet<Literal>, selected: &[String]) -> Vec<(&Rule, Vec<Literal>, Head)> {
        let mut by_pred: HashMap<(&str, bool), Vec<&Literal>> = HashMap::new();
        for l in set {
            by_pred.entry((l.atom.predicate.as_str(), l.negated)).or_default().push(l);
        }
        let mut out = Vec::new();
        for rule in self.active(selected) {
            let mut subst = Subst::new();
            let mut found: Vec<Subst> = Vec::new();
            Self::search(&rule.body, 0, &by_pred, &mut subst, &mut found);
            let mut seen = BTreeSet::new();
            for s in found {
                let body: Vec<Literal> = rule.body.iter().map(|l| substitute(l, &s)).collect();
                let head = match &rule.head {
                    Head::Lit(l) => Head::Lit(substitute(l, &s)),
                    Head::Bottom => Head::Bottom,
                };
                if seen.insert((body.clone(), head.to_string())) {
                    out.push((rule, body, head));
                }
            }
        }
        out
    }

    fn search(
        body: &[Literal],
        i: usize,
        by_pred: &HashMap<(&str, bool), Vec<&Literal>>,
        subst: &mut Subst,
        found: &mut Vec<Subst>,
    ) {
        if i == body.len() {
            found.push(subst.clone());
            return;
        }
        let pat = &body[i];
        let Some(cands) = by_pred.get(&(pat.atom.predicate.as_str(), pat.negated)) else {
            return;
        };
        for g in cands {
            if let Some(bound) = match_literal(pat, g, subst) {
                Self::search(body, i + 1, by_pred, subst, found);
                for b in bound {
                    subst.remove(&b);
                }
            }
        }
    }

    /// One inference step: the heads derivable from `set` (absurdity reported separately).
    pub fn step(&self, set: &BTreeSet<Literal>, selected: &[String]) -> (BTreeSet<Literal>, bool) {
        let mut heads = BTreeSet::new();
        let mut bottom = false;
        for (_, _, head) in self.instances(set, selected) {
            match head {
                Head::Lit(l) => {
                    heads.insert(l);
                }
                Head::Bottom => bottom = true,
            }
        }
        (heads, bottom)
    }

    /// Least fixpoint of `step` over literals, starting from `start`.
    pub fn closure_literals(&self, start: &[Literal], selected: &[String]) -> BTreeSet<Literal> {
        self.closure_with_bottom(start, selected).0
    }

    pub fn closure_with_bottom(&self, start: &[Literal], selected: &[String]) -> (BTreeSet<Literal>, bool) {
        let mut set: BTreeSet<Literal> = start.iter().cloned().collect();
        let mut bottom = false;
        loop {
            let (heads, b) = self.step(&set, selected);
            bottom |= b;
            let before = set.len();
            set.extend(heads);
            if set.len() == before {
                return (set, bottom);
            }
        }
    }
}
