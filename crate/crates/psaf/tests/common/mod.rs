//! Shared helpers for integration tests: fixture loading and brute-force oracles.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};
use std::path::PathBuf;

use psaf::argumentation::Psaf;
use psaf::logic::{ground_rules, is_consistent, Mode, parse_kb, Formula, FormulaSet, KnowledgeBase, Literal};
use psaf::semantics::{Extension, SemanticsKind};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn load(name: &str) -> KnowledgeBase {
    let text = std::fs::read_to_string(fixture_path(name)).expect("fixture exists");
    parse_kb(&text).expect("fixture parses")
}

pub fn lit(s: &str) -> Literal {
    Literal::parse(s).expect("literal parses")
}

pub fn set(items: &[&str]) -> FormulaSet {
    items.iter().map(|s| Formula::parse(s).expect("formula parses")).collect()
}

/// All subsets of the defeasible part, as formula sets (brute force).
pub fn all_subsets(kb: &KnowledgeBase) -> Vec<FormulaSet> {
    let members = kb.defeasible_part();
    assert!(members.len() <= 16, "oracle only for small KBs");
    (0u32..(1 << members.len()))
        .map(|mask| {
            members
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, f)| f.clone())
                .collect()
        })
        .collect()
}

/// Maximal consistent subsets by exhaustive search, using only the
/// matching-based consistency test.
pub fn oracle_mcs(kb: &KnowledgeBase) -> Vec<FormulaSet> {
    let consistent: Vec<FormulaSet> = all_subsets(kb).into_iter().filter(|s| is_consistent(kb, s)).collect();
    let mut out: Vec<FormulaSet> = consistent
        .iter()
        .filter(|s| !consistent.iter().any(|t| t.len() > s.len() && s.is_subset(t)))
        .cloned()
        .collect();
    out.sort();
    out
}

/// Minimal inconsistent subsets by exhaustive search.
pub fn oracle_conflicts(kb: &KnowledgeBase) -> Vec<FormulaSet> {
    let bad: Vec<FormulaSet> = all_subsets(kb).into_iter().filter(|s| !is_consistent(kb, s)).collect();
    let mut out: Vec<FormulaSet> = bad
        .iter()
        .filter(|s| !bad.iter().any(|t| t.len() < s.len() && t.is_subset(s)))
        .cloned()
        .collect();
    out.sort();
    out
}

pub fn sorted(mut v: Vec<FormulaSet>) -> Vec<FormulaSet> {
    v.sort();
    v
}

/// `(support, conclusion)` pairs realisable by a derivation tree whose leaf
/// set is exactly the support, by fixpoint over ground rules (datalog KBs
/// only, where rules are not members). Supports need not be minimal.
pub fn oracle_arguments(kb: &KnowledgeBase) -> BTreeSet<(FormulaSet, Formula)> {
    assert_eq!(kb.mode, Mode::Datalog, "oracle handles datalog KBs only");
    let mut pairs: BTreeSet<(FormulaSet, Formula)> = kb
        .defeasible_part()
        .into_iter()
        .map(|f| (FormulaSet::from([f.clone()]), f.clone()))
        .collect();
    let rules: Vec<_> = ground_rules(kb).into_iter().filter(|r| !r.is_constraint()).collect();
    loop {
        let mut next = pairs.clone();
        for r in &rules {
            let head = Formula::Lit(r.head_literal().expect("not a constraint").clone());
            // Every combination of one realisation per body literal.
            let mut partial: Vec<FormulaSet> = vec![FormulaSet::new()];
            for b in &r.body {
                let b = Formula::Lit(b.clone());
                let options: Vec<&FormulaSet> = pairs.iter().filter(|(_, c)| *c == b).map(|(s, _)| s).collect();
                partial = partial
                    .iter()
                    .flat_map(|acc| {
                        options.iter().map(move |s| acc.union(s).cloned().collect::<FormulaSet>())
                    })
                    .collect();
            }
            for s in partial {
                next.insert((s, head.clone()));
            }
        }
        if next.len() == pairs.len() {
            return pairs;
        }
        pairs = next;
    }
}

/// An attack given by indices: attackers and target.
pub type RawAttack = (BTreeSet<usize>, usize);

/// Every attacking set (not only minimal ones) by exhaustive search over the
/// non-empty sets of arguments with jointly consistent supports, straight
/// from the definition. Returns `(rebuttals, undercuts)`: the attackers'
/// conclusions are inconsistent with the target's conclusion, respectively
/// with its support.
pub fn oracle_all_attacks(kb: &KnowledgeBase, af: &Psaf) -> (Vec<RawAttack>, Vec<RawAttack>) {
    let cons: Vec<usize> = (0..af.len()).filter(|&i| af.arguments[i].consistent).collect();
    assert!(cons.len() <= 14, "oracle only for small frameworks");
    let mut memo: HashMap<FormulaSet, bool> = HashMap::new();
    let mut inconsistent = |s: FormulaSet| *memo.entry(s.clone()).or_insert_with(|| !is_consistent(kb, &s));
    let (mut rebuttals, mut undercuts) = (Vec::new(), Vec::new());
    for mask in 1u32..(1 << cons.len()) {
        let x: BTreeSet<usize> = (0..cons.len()).filter(|i| mask & (1 << i) != 0).map(|i| cons[i]).collect();
        let base: FormulaSet = x.iter().flat_map(|&i| af.arguments[i].support.iter().cloned()).collect();
        if inconsistent(base) {
            continue;
        }
        let concl: FormulaSet = x.iter().map(|&i| af.arguments[i].conclusion.clone()).collect();
        for (t, a) in af.arguments.iter().enumerate() {
            if x.contains(&t) {
                continue;
            }
            let mut rebut = concl.clone();
            rebut.insert(a.conclusion.clone());
            if inconsistent(rebut) {
                rebuttals.push((x.clone(), t));
            }
            let mut undercut = concl.clone();
            undercut.extend(a.support.iter().cloned());
            if inconsistent(undercut) {
                undercuts.push((x.clone(), t));
            }
        }
    }
    (rebuttals, undercuts)
}

/// The ⊆-minimal attacking sets per target of a list of attacks.
pub fn minimal_attacks(all: &[RawAttack]) -> BTreeSet<RawAttack> {
    all.iter()
        .filter(|(x, t)| !all.iter().any(|(y, u)| u == t && y.len() < x.len() && y.is_subset(x)))
        .cloned()
        .collect()
}

/// Extensions by exhaustive search over all subsets, straight from the
/// definitions. Arguments with inconsistent support are attacked by the
/// empty set.
pub fn oracle_extensions(n: usize, consistent: &[bool], attacks: &[RawAttack], sem: SemanticsKind) -> Vec<Extension> {
    assert!(n <= 16, "oracle only for small frameworks");
    let mut table: Vec<Vec<BTreeSet<usize>>> = vec![Vec::new(); n];
    for (x, t) in attacks {
        table[*t].push(x.clone());
    }
    for (t, ok) in consistent.iter().enumerate() {
        if !ok {
            table[t].push(BTreeSet::new());
        }
    }
    let attacked_by = |s: &Extension, t: usize| table[t].iter().any(|x| x.is_subset(s));
    let conflict_free = |s: &Extension| s.iter().all(|&a| !attacked_by(s, a));
    let defends = |s: &Extension, a: usize| table[a].iter().all(|x| x.iter().any(|&b| attacked_by(s, b)));
    let admissible = |s: &Extension| conflict_free(s) && s.iter().all(|&a| defends(s, a));
    let complete = |s: &Extension| admissible(s) && (0..n).all(|a| s.contains(&a) || !defends(s, a));
    let all: Vec<Extension> = (0u32..(1 << n))
        .map(|m| (0..n).filter(|i| m & (1 << i) != 0).collect())
        .collect();
    let mut out: Vec<Extension> = match sem {
        SemanticsKind::Admissible => all.into_iter().filter(|s| admissible(s)).collect(),
        SemanticsKind::Complete => all.into_iter().filter(|s| complete(s)).collect(),
        SemanticsKind::Preferred => {
            let adm: Vec<Extension> = all.into_iter().filter(|s| admissible(s)).collect();
            adm.iter()
                .filter(|s| !adm.iter().any(|t| t.len() > s.len() && s.is_subset(t)))
                .cloned()
                .collect()
        }
        SemanticsKind::Stable => all
            .into_iter()
            .filter(|s| conflict_free(s) && (0..n).all(|a| s.contains(&a) || attacked_by(s, a)))
            .collect(),
        SemanticsKind::Grounded => {
            let comp: Vec<Extension> = all.into_iter().filter(|s| complete(s)).collect();
            comp.iter()
                .filter(|s| comp.iter().all(|t| s.is_subset(t)))
                .cloned()
                .collect()
        }
    };
    out.sort();
    out
}

/// Extensions of `af` under its own (minimal) attacks, by exhaustive search.
pub fn oracle_extensions_of(af: &Psaf, sem: SemanticsKind) -> Vec<Extension> {
    let attacks: Vec<RawAttack> = af.attacks.iter().map(|a| (a.attackers.clone(), a.target)).collect();
    let consistent: Vec<bool> = af.arguments.iter().map(|a| a.consistent).collect();
    oracle_extensions(af.len(), &consistent, &attacks, sem)
}

pub fn sorted_exts(mut v: Vec<Extension>) -> Vec<Extension> {
    v.sort();
    v
}
