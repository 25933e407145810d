//! Knowledge bases and the logic-level operations over them: grounding, the
//! one-step consequence operator, closure, consistency, conflicts and repairs.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use super::engine::Engine;
use super::eval::{substitute, Evaluator};
use super::syntax::{Formula, FormulaSet, Head, Literal, Rule, Strength, Term};
use crate::error::KbError;

/// The logic a KB is written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Datalog,
    Defeasible,
    DefeasibleContrapositive,
}

impl Mode {
    pub fn from_name(name: &str) -> Option<Mode> {
        match name {
            "datalog" => Some(Mode::Datalog),
            "defeasible" => Some(Mode::Defeasible),
            "defeasible-contrapositive" => Some(Mode::DefeasibleContrapositive),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::Datalog => "datalog",
            Mode::Defeasible => "defeasible",
            Mode::DefeasibleContrapositive => "defeasible-contrapositive",
        }
    }

    /// Whether rules are members of the KB (and hence of repairs).
    pub fn rules_are_members(self) -> bool {
        self != Mode::Datalog
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A parsed and validated knowledge base.
///
/// Facts are kept sorted; rules and constraints keep declaration order.
#[derive(Clone)]
pub struct KnowledgeBase {
    pub mode: Mode,
    pub facts: Vec<Literal>,
    pub rules: Vec<Rule>,
    pub constraints: Vec<Rule>,
    engine: OnceLock<Arc<Engine>>,
}

impl fmt::Debug for KnowledgeBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KnowledgeBase")
            .field("mode", &self.mode)
            .field("facts", &self.facts)
            .field("rules", &self.rules)
            .field("constraints", &self.constraints)
            .finish()
    }
}

impl PartialEq for KnowledgeBase {
    fn eq(&self, other: &Self) -> bool {
        self.mode == other.mode
            && self.facts == other.facts
            && self.rules == other.rules
            && self.constraints == other.constraints
    }
}

impl KnowledgeBase {
    pub fn new(mode: Mode, mut facts: Vec<Literal>, rules: Vec<Rule>, constraints: Vec<Rule>) -> Self {
        facts.sort();
        facts.dedup();
        KnowledgeBase {
            mode,
            facts,
            rules,
            constraints,
            engine: OnceLock::new(),
        }
    }

    pub fn parse(text: &str) -> Result<KnowledgeBase, KbError> {
        parse_kb(text)
    }

    /// The formulas repairs range over, in canonical order: facts, plus rules
    /// in defeasible modes.
    pub fn defeasible_part(&self) -> Vec<Formula> {
        let mut out: Vec<Formula> = self.facts.iter().cloned().map(Formula::Lit).collect();
        if self.mode.rules_are_members() {
            out.extend(self.rules.iter().map(|r| Formula::Rule(r.id.clone())));
        }
        out.sort();
        out
    }

    pub fn defeasible_set(&self) -> FormulaSet {
        self.defeasible_part().into_iter().collect()
    }

    pub fn is_member(&self, f: &Formula) -> bool {
        match f {
            Formula::Lit(l) => self.facts.binary_search(l).is_ok(),
            Formula::Rule(id) => self.mode.rules_are_members() && self.rule(id).is_some(),
            Formula::Bottom => false,
        }
    }

    pub fn is_fact(&self, l: &Literal) -> bool {
        self.facts.binary_search(l).is_ok()
    }

    pub fn rule(&self, id: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.id == id)
    }

    /// Constants occurring in the facts, sorted.
    pub fn constants(&self) -> Vec<String> {
        let set: BTreeSet<String> = self
            .facts
            .iter()
            .flat_map(|l| l.atom.args.iter().map(|t| t.name().to_string()))
            .collect();
        set.into_iter().collect()
    }

    /// Shared inference engine over the pruned ground program (built lazily).
    pub fn engine(&self) -> &Engine {
        self.engine.get_or_init(|| Arc::new(Engine::new(self)))
    }

    /// Render the KB back into the text format.
    pub fn to_source(&self) -> String {
        let mut out = format!("@mode {}\n", self.mode);
        for f in &self.facts {
            out.push_str(&format!("fact {f}.\n"));
        }
        for r in &self.rules {
            out.push_str(&format!("rule {r}.\n"));
        }
        for c in &self.constraints {
            out.push_str(&format!("constraint {c}.\n"));
        }
        out
    }
}

pub use super::parse::parse_kb;

fn split(x: &FormulaSet) -> (Vec<Literal>, Vec<String>) {
    let mut lits = Vec::new();
    let mut rules = Vec::new();
    for f in x {
        match f {
            Formula::Lit(l) => lits.push(l.clone()),
            Formula::Rule(id) => rules.push(id.clone()),
            Formula::Bottom => {}
        }
    }
    (lits, rules)
}

/// Ground every rule and constraint over the constants of the facts. In
/// defeasible modes rules are already ground and are returned unchanged.
pub fn ground_rules(kb: &KnowledgeBase) -> Vec<Rule> {
    if kb.mode != Mode::Datalog {
        return kb.rules.iter().chain(&kb.constraints).cloned().collect();
    }
    let consts = kb.constants();
    let mut out = Vec::new();
    for rule in kb.rules.iter().chain(&kb.constraints) {
        let vars: Vec<String> = rule
            .body
            .iter()
            .flat_map(|l| l.atom.args.iter())
            .filter_map(|t| match t {
                Term::Var(v) => Some(v.clone()),
                Term::Const(_) => None,
            })
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let total = consts.len().pow(vars.len() as u32);
        for n in 0..total {
            // Decode n as base-|consts| digits, most significant variable first.
            let mut rest = n;
            let mut vals = vec![String::new(); vars.len()];
            for k in (0..vars.len()).rev() {
                vals[k] = consts[rest % consts.len()].clone();
                rest /= consts.len();
            }
            let subst: HashMap<String, String> = vars.iter().cloned().zip(vals).collect();
            out.push(Rule {
                id: rule.id.clone(),
                body: rule.body.iter().map(|l| substitute(l, &subst)).collect(),
                head: match &rule.head {
                    Head::Lit(l) => Head::Lit(substitute(l, &subst)),
                    Head::Bottom => Head::Bottom,
                },
                strength: rule.strength,
            });
        }
    }
    out
}

/// Contrapositives of each rule: for `φ1,…,φn → α`, the n rules obtained by
/// swapping `φi` with `¬α` and concluding `¬φi`. Constraints have none.
pub fn contrapositives(rules: &[Rule]) -> Vec<Rule> {
    let mut out = Vec::new();
    for r in rules {
        let Some(head) = r.head_literal() else { continue };
        for i in 0..r.body.len() {
            let body = r
                .body
                .iter()
                .enumerate()
                .map(|(j, l)| if i == j { head.complement() } else { l.clone() })
                .collect();
            out.push(Rule {
                id: format!("{}_c{}", r.id, i + 1),
                body,
                head: Head::Lit(r.body[i].complement()),
                strength: r.strength,
            });
        }
    }
    out
}

/// One application of the consequence operator: `X` plus the heads of every
/// applicable ground rule whose body lies in `X` (and `!` when a constraint fires).
pub fn cn_step(kb: &KnowledgeBase, x: &FormulaSet) -> FormulaSet {
    let (lits, selected) = split(x);
    let set: BTreeSet<Literal> = lits.into_iter().collect();
    let (heads, bottom) = Evaluator::new(kb).step(&set, &selected);
    let mut out = x.clone();
    out.extend(heads.into_iter().map(Formula::Lit));
    if bottom {
        out.insert(Formula::Bottom);
    }
    out
}

/// Least fixpoint of `cn_step` containing `X`.
pub fn closure(kb: &KnowledgeBase, x: &FormulaSet) -> FormulaSet {
    let (lits, selected) = split(x);
    let (set, bottom) = Evaluator::new(kb).closure_with_bottom(&lits, &selected);
    let mut out = x.clone();
    out.extend(set.into_iter().map(Formula::Lit));
    if bottom {
        out.insert(Formula::Bottom);
    }
    out
}

/// Consistency of a ground set: its closure contains no absurdity, and in
/// defeasible modes no complementary pair and no selected defeasible rule whose
/// head is contradicted.
pub fn is_consistent(kb: &KnowledgeBase, x: &FormulaSet) -> bool {
    let c = closure(kb, x);
    if c.contains(&Formula::Bottom) {
        return false;
    }
    if kb.mode == Mode::Datalog {
        return true;
    }
    for f in &c {
        if let Formula::Lit(l) = f {
            if !l.negated && c.contains(&Formula::Lit(l.complement())) {
                return false;
            }
        }
    }
    for f in x {
        if let Formula::Rule(id) = f {
            if let Some(r) = kb.rule(id) {
                if r.strength == Strength::Defeasible {
                    if let Some(h) = r.head_literal() {
                        if c.contains(&Formula::Lit(h.complement())) {
                            return false;
                        }
                    }
                }
            }
        }
    }
    true
}

pub fn entails(kb: &KnowledgeBase, x: &FormulaSet, phi: &Literal) -> bool {
    closure(kb, x).contains(&Formula::Lit(phi.clone()))
}

fn member_set(kb: &KnowledgeBase, bits: &fixedbitset::FixedBitSet) -> FormulaSet {
    let eng = kb.engine();
    bits.ones().map(|m| eng.formulas[eng.members[m]].clone()).collect()
}

/// All ⊆-minimal inconsistent subsets of the defeasible part, canonically sorted.
pub fn minimal_conflicts(kb: &KnowledgeBase) -> Vec<FormulaSet> {
    let mut out: Vec<FormulaSet> = kb.engine().minimal_conflicts().iter().map(|b| member_set(kb, b)).collect();
    sort_family(&mut out);
    out
}

/// All ⊆-maximal consistent subsets (repairs) of the defeasible part, canonically sorted.
pub fn enumerate_mcs(kb: &KnowledgeBase) -> Vec<FormulaSet> {
    let mut out: Vec<FormulaSet> = kb.engine().maximal_consistent().iter().map(|b| member_set(kb, b)).collect();
    sort_family(&mut out);
    out
}

/// Canonical order on families of sets: by size, then by rendered members.
pub fn sort_family(family: &mut [FormulaSet]) {
    family.sort_by(|a, b| {
        a.len()
            .cmp(&b.len())
            .then_with(|| a.iter().map(|f| f.to_string()).cmp(b.iter().map(|f| f.to_string())))
    });
}

/// Inconsistency-tolerant entailment modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum McsMode {
    /// Entailed by some repair (possible answer).
    Some,
    /// Entailed by every repair (plausible answer).
    All,
    /// Entailed by the intersection of repairs (surest answer).
    Intersection,
}

pub fn mcs_query(kb: &KnowledgeBase, phi: &Literal, mode: McsMode) -> bool {
    let repairs = enumerate_mcs(kb);
    match mode {
        McsMode::Some => repairs.iter().any(|m| entails(kb, m, phi)),
        McsMode::All => repairs.iter().all(|m| entails(kb, m, phi)),
        McsMode::Intersection => {
            let mut it = repairs.iter();
            let first = it.next().cloned().unwrap_or_default();
            let inter = it.fold(first, |acc, m| acc.intersection(m).cloned().collect());
            entails(kb, &inter, phi)
        }
    }
}

/// Result of the dependency-graph check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DependencyCheck {
    pub acyclic: bool,
    /// A cycle `p -> q -> p` when the graph is cyclic.
    pub cycle: Option<Vec<String>>,
}

/// Node of the dependency graph: the predicate (datalog) or signed predicate
/// (defeasible modes, where strong negation makes `p` and `~p` distinct).
fn dep_node(kb: &KnowledgeBase, l: &Literal) -> String {
    if kb.mode != Mode::Datalog && l.negated {
        format!("~{}", l.atom.predicate)
    } else {
        l.atom.predicate.clone()
    }
}

pub fn dependency_graph(kb: &KnowledgeBase) -> BTreeMap<String, BTreeSet<String>> {
    let mut rules: Vec<Rule> = kb.rules.clone();
    if kb.mode == Mode::DefeasibleContrapositive {
        rules.extend(contrapositives(&kb.rules));
    }
    let mut g: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for r in &rules {
        let Some(h) = r.head_literal() else { continue };
        let hn = dep_node(kb, h);
        g.entry(hn.clone()).or_default();
        for b in &r.body {
            g.entry(dep_node(kb, b)).or_default().insert(hn.clone());
        }
    }
    g
}

pub fn check_acyclic_dependency(kb: &KnowledgeBase) -> DependencyCheck {
    let g = dependency_graph(kb);
    #[derive(Clone, Copy, PartialEq)]
    enum Color {
        White,
        Grey,
        Black,
    }
    let mut color: BTreeMap<&str, Color> = g.keys().map(|k| (k.as_str(), Color::White)).collect();

    fn dfs<'g>(
        n: &'g str,
        g: &'g BTreeMap<String, BTreeSet<String>>,
        color: &mut BTreeMap<&'g str, Color>,
        path: &mut Vec<&'g str>,
    ) -> Option<Vec<String>> {
        color.insert(n, Color::Grey);
        path.push(n);
        for m in &g[n] {
            match color[m.as_str()] {
                Color::Grey => {
                    let start = path.iter().position(|p| *p == m).expect("grey node is on the path");
                    let mut cycle: Vec<String> = path[start..].iter().map(|s| s.to_string()).collect();
                    cycle.push(m.clone());
                    return Some(cycle);
                }
                Color::White => {
                    if let Some(c) = dfs(m, g, color, path) {
                        return Some(c);
                    }
                }
                Color::Black => {}
            }
        }
        path.pop();
        color.insert(n, Color::Black);
        None
    }

    for k in g.keys() {
        if color[k.as_str()] == Color::White {
            let mut path = Vec::new();
            if let Some(cycle) = dfs(k, &g, &mut color, &mut path) {
                return DependencyCheck {
                    acyclic: false,
                    cycle: Some(cycle),
                };
            }
        }
    }
    DependencyCheck {
        acyclic: true,
        cycle: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(s: &str) -> Formula {
        Formula::parse(s).unwrap()
    }

    #[test]
    fn closure_and_consistency_on_a_small_kb() {
        let kb = parse_kb("@mode datalog\nfact p(a).\nfact q(a).\nrule r1: p(X) -> s(X).\nconstraint c1: s(X), q(X) -> !.\n").unwrap();
        let x: FormulaSet = [f("p(a)")].into();
        assert!(closure(&kb, &x).contains(&f("s(a)")));
        assert!(is_consistent(&kb, &x));
        let both: FormulaSet = [f("p(a)"), f("q(a)")].into();
        assert!(!is_consistent(&kb, &both));
        assert_eq!(minimal_conflicts(&kb), vec![both]);
        assert_eq!(enumerate_mcs(&kb).len(), 2);
    }

    #[test]
    fn complementary_literals_clash_in_defeasible_mode() {
        let kb = parse_kb("@mode defeasible\nfact p.\nfact ~p.\n").unwrap();
        let x: FormulaSet = [f("p"), f("~p")].into();
        assert!(!is_consistent(&kb, &x));
    }

    #[test]
    fn acyclicity_check_finds_cycles() {
        let kb = parse_kb("@mode datalog\nfact p(a).\nrule r1: p(X) -> q(X).\nrule r2: q(X) -> p(X).\n").unwrap();
        let dep = check_acyclic_dependency(&kb);
        assert!(!dep.acyclic);
        assert!(dep.cycle.is_some());
    }
}
