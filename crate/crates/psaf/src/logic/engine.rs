//! Bitset-backed inference engine over a KB's pruned ground program.
//!
//! Every formula that can occur in a derivation is interned to a dense id.
//! Inconsistency is folded into the program as derivations of the absurdity
//! marker: constraints derive it directly, and in defeasible modes synthetic
//! rules derive it from complementary literals and from a selected defeasible
//! rule whose head is contradicted. A set is then inconsistent iff `!` is in its
//! closure, and the minimal inconsistent subsets of any base are just the
//! minimal supports of `!`.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;

use super::eval::Evaluator;
use super::kb::{KnowledgeBase, Mode};
use super::syntax::{Formula, Head, Literal, Strength};

/// One instance of a rule in the ground program.
#[derive(Debug, Clone)]
pub struct GroundRule {
    /// Literal premises, in rule-body order.
    pub body: Vec<usize>,
    /// The rule formula that must be selected for this instance to fire
    /// (defeasible modes only).
    pub selector: Option<usize>,
    pub head: usize,
    /// Id of the source rule (or constraint).
    pub rule_id: String,
    /// For contrapositive instances, the 1-based body position that was swapped.
    pub contrapositive: Option<usize>,
    /// Synthetic inconsistency rules are not rule applications of the KB.
    pub synthetic: bool,
}

impl GroundRule {
    pub fn prereqs(&self) -> impl Iterator<Item = usize> + '_ {
        self.body.iter().copied().chain(self.selector)
    }

    /// Name used as the justification of a derivation step.
    pub fn justification(&self) -> String {
        match self.contrapositive {
            Some(i) => format!("{}_c{}", self.rule_id, i),
            None => self.rule_id.clone(),
        }
    }
}

#[derive(Debug)]
pub struct Engine {
    pub mode: Mode,
    pub formulas: Vec<Formula>,
    index: HashMap<Formula, usize>,
    pub rules: Vec<GroundRule>,
    /// Ground rules indexed by each of their prerequisites.
    by_prereq: Vec<Vec<usize>>,
    /// Formula ids of the KB's defeasible part, in canonical order.
    pub members: Vec<usize>,
    pub bottom: usize,
}

/// Insert `s` into an antichain of sets, keeping only ⊆-minimal members.
/// Returns false when `s` was subsumed by an existing member.
pub fn insert_minimal(family: &mut Vec<FixedBitSet>, s: FixedBitSet) -> bool {
    if family.iter().any(|t| t.is_subset(&s)) {
        return false;
    }
    family.retain(|t| !s.is_subset(t));
    family.push(s);
    true
}

/// Reduce a family to its ⊆-minimal members (duplicates removed).
pub fn minimize(family: Vec<FixedBitSet>) -> Vec<FixedBitSet> {
    let mut sorted = family;
    sorted.sort_by_key(|s| s.count_ones(..));
    let mut out: Vec<FixedBitSet> = Vec::new();
    for s in sorted {
        if !out.iter().any(|t| t.is_subset(&s)) {
            out.push(s);
        }
    }
    out
}

/// All ⊆-minimal hitting sets of a family of sets over `n` elements
/// (Berge's incremental transversal algorithm).
pub fn minimal_hitting_sets(n: usize, family: &[FixedBitSet]) -> Vec<FixedBitSet> {
    let mut hs = vec![FixedBitSet::with_capacity(n)];
    for c in family {
        let mut next = Vec::new();
        for h in &hs {
            if !h.is_disjoint(c) {
                next.push(h.clone());
            } else {
                for e in c.ones() {
                    let mut h2 = h.clone();
                    h2.insert(e);
                    next.push(h2);
                }
            }
        }
        hs = minimize(next);
    }
    hs
}

impl Engine {
    pub fn new(kb: &KnowledgeBase) -> Engine {
        let mut eng = Engine {
            mode: kb.mode,
            formulas: Vec::new(),
            index: HashMap::new(),
            rules: Vec::new(),
            by_prereq: Vec::new(),
            members: Vec::new(),
            bottom: 0,
        };
        eng.bottom = eng.intern(Formula::Bottom);
        for m in kb.defeasible_part() {
            let id = eng.intern(m);
            eng.members.push(id);
        }

        match kb.mode {
            Mode::Datalog => {
                let eval = Evaluator::new(kb);
                let facts: Vec<Literal> = kb.facts.clone();
                let derived = eval.closure_literals(&facts, &[]);
                for (rule, body, head) in eval.instances(&derived, &[]) {
                    let body_ids = body.into_iter().map(|l| eng.intern(Formula::Lit(l))).collect();
                    let head_id = match head {
                        Head::Lit(l) => eng.intern(Formula::Lit(l)),
                        Head::Bottom => eng.bottom,
                    };
                    eng.rules.push(GroundRule {
                        body: body_ids,
                        selector: None,
                        head: head_id,
                        rule_id: rule.id.clone(),
                        contrapositive: None,
                        synthetic: false,
                    });
                }
            }
            Mode::Defeasible | Mode::DefeasibleContrapositive => {
                for rule in &kb.rules {
                    let sel = eng.intern(Formula::Rule(rule.id.clone()));
                    let body = rule.body.iter().map(|l| eng.intern(Formula::Lit(l.clone()))).collect();
                    let head_lit = rule.head_literal().expect("rules have literal heads").clone();
                    let head = eng.intern(Formula::Lit(head_lit.clone()));
                    eng.rules.push(GroundRule {
                        body,
                        selector: Some(sel),
                        head,
                        rule_id: rule.id.clone(),
                        contrapositive: None,
                        synthetic: false,
                    });
                    if kb.mode == Mode::DefeasibleContrapositive {
                        for i in 0..rule.body.len() {
                            let mut body = Vec::new();
                            for (j, l) in rule.body.iter().enumerate() {
                                let lit = if i == j { head_lit.complement() } else { l.clone() };
                                body.push(eng.intern(Formula::Lit(lit)));
                            }
                            let head = eng.intern(Formula::Lit(rule.body[i].complement()));
                            eng.rules.push(GroundRule {
                                body,
                                selector: Some(sel),
                                head,
                                rule_id: rule.id.clone(),
                                contrapositive: Some(i + 1),
                                synthetic: false,
                            });
                        }
                    }
                    if rule.strength == Strength::Defeasible {
                        let neg = eng.intern(Formula::Lit(head_lit.complement()));
                        eng.rules.push(GroundRule {
                            body: vec![neg],
                            selector: Some(sel),
                            head: eng.bottom,
                            rule_id: rule.id.clone(),
                            contrapositive: None,
                            synthetic: true,
                        });
                    }
                }
                for c in &kb.constraints {
                    let body = c.body.iter().map(|l| eng.intern(Formula::Lit(l.clone()))).collect();
                    eng.rules.push(GroundRule {
                        body,
                        selector: None,
                        head: eng.bottom,
                        rule_id: c.id.clone(),
                        contrapositive: None,
                        synthetic: false,
                    });
                }
                // Complementary pairs: intern complements of every literal first.
                let lits: Vec<Literal> = eng.formulas.iter().filter_map(|f| f.as_literal().cloned()).collect();
                for l in &lits {
                    eng.intern(Formula::Lit(l.complement()));
                }
                let positives: Vec<Literal> = eng
                    .formulas
                    .iter()
                    .filter_map(|f| f.as_literal())
                    .filter(|l| !l.negated)
                    .cloned()
                    .collect();
                for l in positives {
                    let a = eng.id(&Formula::Lit(l.clone())).expect("interned");
                    let b = eng.id(&Formula::Lit(l.complement())).expect("interned");
                    eng.rules.push(GroundRule {
                        body: vec![a, b],
                        selector: None,
                        head: eng.bottom,
                        rule_id: format!("~{}", l),
                        contrapositive: None,
                        synthetic: true,
                    });
                }
            }
        }

        eng.by_prereq = vec![Vec::new(); eng.formulas.len()];
        for (ri, r) in eng.rules.iter().enumerate() {
            let mut seen: Vec<usize> = r.prereqs().collect();
            seen.sort_unstable();
            seen.dedup();
            for p in seen {
                eng.by_prereq[p].push(ri);
            }
        }
        eng
    }

    fn intern(&mut self, f: Formula) -> usize {
        if let Some(&i) = self.index.get(&f) {
            return i;
        }
        let i = self.formulas.len();
        self.formulas.push(f.clone());
        self.index.insert(f, i);
        i
    }

    pub fn id(&self, f: &Formula) -> Option<usize> {
        self.index.get(f).copied()
    }

    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }

    /// Least fixpoint of the ground program containing `start` (formula ids).
    pub fn closure(&self, start: &FixedBitSet) -> FixedBitSet {
        let n = self.formulas.len();
        let mut have = FixedBitSet::with_capacity(n);
        let mut missing: Vec<usize> = self
            .rules
            .iter()
            .map(|r| {
                let mut p: Vec<usize> = r.prereqs().collect();
                p.sort_unstable();
                p.dedup();
                p.len()
            })
            .collect();
        let mut queue: Vec<usize> = start.ones().filter(|&i| i < n).collect();
        for &i in &queue {
            have.insert(i);
        }
        while let Some(f) = queue.pop() {
            for &ri in &self.by_prereq[f] {
                missing[ri] -= 1;
                if missing[ri] == 0 {
                    let h = self.rules[ri].head;
                    if !have.contains(h) {
                        have.insert(h);
                        queue.push(h);
                    }
                }
            }
        }
        have
    }

    /// Formula-id bitset of a set of member indices.
    pub fn members_to_ids(&self, members: &FixedBitSet) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.formulas.len());
        for m in members.ones() {
            out.insert(self.members[m]);
        }
        out
    }

    pub fn ids_consistent(&self, ids: &FixedBitSet) -> bool {
        !self.closure(ids).contains(self.bottom)
    }

    pub fn members_consistent(&self, members: &FixedBitSet) -> bool {
        self.ids_consistent(&self.members_to_ids(members))
    }

    /// Minimal supports of every formula relative to a base: entry `f` lists
    /// the ⊆-minimal sets of base positions whose closure contains `f`.
    pub fn minimal_supports(&self, base: &[usize]) -> Vec<Vec<FixedBitSet>> {
        let n = base.len();
        let mut sup: Vec<Vec<FixedBitSet>> = vec![Vec::new(); self.formulas.len()];
        for (pos, &f) in base.iter().enumerate() {
            let mut s = FixedBitSet::with_capacity(n);
            s.insert(pos);
            insert_minimal(&mut sup[f], s);
        }
        loop {
            let mut changed = false;
            for r in &self.rules {
                let mut acc = vec![FixedBitSet::with_capacity(n)];
                let mut dead = false;
                for p in r.prereqs() {
                    if sup[p].is_empty() {
                        dead = true;
                        break;
                    }
                    let mut next = Vec::with_capacity(acc.len() * sup[p].len());
                    for a in &acc {
                        for b in &sup[p] {
                            let mut u = a.clone();
                            u.union_with(b);
                            next.push(u);
                        }
                    }
                    acc = minimize(next);
                }
                if dead {
                    continue;
                }
                for s in acc {
                    if insert_minimal(&mut sup[r.head], s) {
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        sup
    }

    /// Minimal inconsistent subsets of a base, as sets of base positions.
    pub fn minimal_inconsistent(&self, base: &[usize]) -> Vec<FixedBitSet> {
        let mut sup = self.minimal_supports(base);
        let mut out = std::mem::take(&mut sup[self.bottom]);
        out.sort_by(|a, b| (a.count_ones(..), a.ones().collect::<Vec<_>>()).cmp(&(b.count_ones(..), b.ones().collect())));
        out
    }

    /// Minimal conflicts of the KB, as sets of member indices.
    pub fn minimal_conflicts(&self) -> Vec<FixedBitSet> {
        self.minimal_inconsistent(&self.members)
    }

    /// Maximal consistent subsets of the KB, as sets of member indices.
    pub fn maximal_consistent(&self) -> Vec<FixedBitSet> {
        let n = self.members.len();
        let conflicts = self.minimal_conflicts();
        let mut out: Vec<FixedBitSet> = minimal_hitting_sets(n, &conflicts)
            .into_iter()
            .map(|h| {
                let mut c = FixedBitSet::with_capacity(n);
                c.insert_range(..);
                c.difference_with(&h);
                c
            })
            .collect();
        out.sort_by_key(|s| s.ones().collect::<Vec<_>>());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(n: usize, items: &[usize]) -> FixedBitSet {
        let mut b = FixedBitSet::with_capacity(n);
        for &i in items {
            b.insert(i);
        }
        b
    }

    #[test]
    fn minimize_keeps_only_minimal_sets() {
        let fam = vec![bits(4, &[0, 1]), bits(4, &[0]), bits(4, &[2, 3]), bits(4, &[0])];
        let got = minimize(fam);
        assert_eq!(got, vec![bits(4, &[0]), bits(4, &[2, 3])]);
    }

    #[test]
    fn insert_minimal_reports_subsumption() {
        let mut fam = vec![bits(3, &[0, 1])];
        assert!(!insert_minimal(&mut fam, bits(3, &[0, 1, 2])));
        assert!(insert_minimal(&mut fam, bits(3, &[1])));
        assert_eq!(fam, vec![bits(3, &[1])]);
    }

    #[test]
    fn hitting_sets_of_two_pairs() {
        let fam = [bits(3, &[0, 1]), bits(3, &[1, 2])];
        let mut got: Vec<Vec<usize>> = minimal_hitting_sets(3, &fam).iter().map(|h| h.ones().collect()).collect();
        got.sort();
        assert_eq!(got, vec![vec![0, 2], vec![1]]);
        assert_eq!(minimal_hitting_sets(3, &[]), vec![bits(3, &[])]);
    }
}
