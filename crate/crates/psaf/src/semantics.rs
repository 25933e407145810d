//! Extension semantics for frameworks with collective attacks, acceptance,
//! rationality postulates, and the correspondence with repairs.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::argumentation::{build_psaf, Psaf};
use crate::error::PsafError;
use crate::logic::{closure, entails, enumerate_mcs, is_consistent, Formula, FormulaSet, KnowledgeBase, Literal};

/// A set of argument indices.
pub type Extension = BTreeSet<usize>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SemanticsKind {
    Admissible,
    Complete,
    Preferred,
    Stable,
    Grounded,
}

impl SemanticsKind {
    pub const ALL: [SemanticsKind; 5] = [
        SemanticsKind::Admissible,
        SemanticsKind::Complete,
        SemanticsKind::Preferred,
        SemanticsKind::Stable,
        SemanticsKind::Grounded,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SemanticsKind::Admissible => "admissible",
            SemanticsKind::Complete => "complete",
            SemanticsKind::Preferred => "preferred",
            SemanticsKind::Stable => "stable",
            SemanticsKind::Grounded => "grounded",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

impl fmt::Display for SemanticsKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How a formula is accepted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "mode", content = "semantics")]
pub enum AcceptanceMode {
    Credulous(SemanticsKind),
    Grounded,
    Sceptical(SemanticsKind),
}

impl fmt::Display for AcceptanceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AcceptanceMode::Credulous(s) => write!(f, "credulous-{s}"),
            AcceptanceMode::Grounded => f.write_str("grounded"),
            AcceptanceMode::Sceptical(s) => write!(f, "sceptical-{s}"),
        }
    }
}

/// Attacking sets per target. An argument whose support is inconsistent is
/// self-defeating: it is given an attack by the empty set, so it is out in
/// every labelling and never defended. Such an argument cannot take part in
/// any attacking set, so this leaves the accepted arguments unchanged whenever
/// a consistent attacker exists.
pub(crate) fn attack_table(af: &Psaf) -> Vec<Vec<Vec<usize>>> {
    let mut table: Vec<Vec<Vec<usize>>> = af
        .attackers_of()
        .into_iter()
        .map(|sets| sets.into_iter().map(|s| s.into_iter().collect()).collect())
        .collect();
    for (i, a) in af.arguments.iter().enumerate() {
        if !a.consistent {
            table[i].push(Vec::new());
        }
    }
    table
}

pub fn is_conflict_free(af: &Psaf, s: &Extension) -> bool {
    if s.iter().any(|&i| !af.arguments[i].consistent) {
        return false;
    }
    !af.attacks
        .iter()
        .any(|at| s.contains(&at.target) && at.attackers.is_subset(s))
}

/// Whether `S` counter-attacks every attacking set of argument `a`.
pub fn defends(af: &Psaf, s: &Extension, a: usize) -> bool {
    let table = attack_table(af);
    defends_with(&table, s, a)
}

fn defends_with(table: &[Vec<Vec<usize>>], s: &Extension, a: usize) -> bool {
    table[a].iter().all(|x| {
        x.iter()
            .any(|&b| table[b].iter().any(|y| y.iter().all(|c| s.contains(c))))
    })
}

/// Least fixpoint of the characteristic function.
pub fn grounded_extension(af: &Psaf) -> Extension {
    let table = attack_table(af);
    let mut s = Extension::new();
    loop {
        let next: Extension = (0..af.len()).filter(|&a| defends_with(&table, &s, a)).collect();
        if next == s {
            return s;
        }
        s = next;
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Lab {
    Unknown,
    In,
    Out,
    Undec,
}

/// Backtracking search over labellings with unit propagation.
///
/// In both modes `Out` holds exactly for arguments attacked by a set of `In`
/// arguments, and every attack on an `In` argument has an `Out` member. In
/// complete mode an argument all of whose attacks have an `Out` member must
/// be `In`; in admissible mode it may stay `Undec`.
struct LabellingSearch<'a> {
    table: &'a [Vec<Vec<usize>>],
    complete: bool,
    results: Vec<Extension>,
}

impl LabellingSearch<'_> {
    fn propagate(&self, labs: &mut [Lab]) -> bool {
        loop {
            let mut changed = false;
            for a in 0..labs.len() {
                let attacks = &self.table[a];
                let mut some_all_in = false;
                let mut all_have_out = true;
                let mut some_can_be_all_in = false;
                let mut every_can_have_out = true;
                for x in attacks {
                    let all_in = x.iter().all(|&b| labs[b] == Lab::In);
                    let has_out = x.iter().any(|&b| labs[b] == Lab::Out);
                    let can_all_in = x.iter().all(|&b| matches!(labs[b], Lab::In | Lab::Unknown));
                    let can_out = x.iter().any(|&b| matches!(labs[b], Lab::Out | Lab::Unknown));
                    some_all_in |= all_in;
                    all_have_out &= has_out;
                    some_can_be_all_in |= can_all_in;
                    every_can_have_out &= can_out;
                }
                if some_all_in {
                    match labs[a] {
                        Lab::In | Lab::Undec => return false,
                        Lab::Unknown => {
                            labs[a] = Lab::Out;
                            changed = true;
                        }
                        Lab::Out => {}
                    }
                }
                if self.complete && all_have_out {
                    match labs[a] {
                        Lab::Out | Lab::Undec => return false,
                        Lab::Unknown => {
                            labs[a] = Lab::In;
                            changed = true;
                        }
                        Lab::In => {}
                    }
                }
                match labs[a] {
                    Lab::In => {
                        if !every_can_have_out {
                            return false;
                        }
                        for x in attacks {
                            if x.iter().any(|&b| labs[b] == Lab::Out) {
                                continue;
                            }
                            let unknown: Vec<usize> = x.iter().copied().filter(|&b| labs[b] == Lab::Unknown).collect();
                            if unknown.len() == 1 {
                                labs[unknown[0]] = Lab::Out;
                                changed = true;
                            }
                        }
                    }
                    Lab::Out => {
                        if !some_can_be_all_in {
                            return false;
                        }
                        let candidates: Vec<&Vec<usize>> = attacks
                            .iter()
                            .filter(|x| x.iter().all(|&b| matches!(labs[b], Lab::In | Lab::Unknown)))
                            .collect();
                        if candidates.len() == 1 {
                            for &b in candidates[0] {
                                if labs[b] == Lab::Unknown {
                                    labs[b] = Lab::In;
                                    changed = true;
                                }
                            }
                        }
                    }
                    Lab::Undec | Lab::Unknown => {}
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn search(&mut self, mut labs: Vec<Lab>) {
        if !self.propagate(&mut labs) {
            return;
        }
        match labs.iter().position(|&l| l == Lab::Unknown) {
            None => {
                self.results
                    .push((0..labs.len()).filter(|&i| labs[i] == Lab::In).collect());
            }
            Some(a) => {
                for choice in [Lab::In, Lab::Out, Lab::Undec] {
                    let mut next = labs.clone();
                    next[a] = choice;
                    self.search(next);
                }
            }
        }
    }
}

fn labellings(af: &Psaf, complete: bool) -> Vec<Extension> {
    let table = attack_table(af);
    let mut s = LabellingSearch {
        table: &table,
        complete,
        results: Vec::new(),
    };
    s.search(vec![Lab::Unknown; af.len()]);
    let mut out = s.results;
    out.sort();
    out.dedup();
    out
}

/// Canonical order on extensions: by size, then by sorted member list.
pub fn sort_extensions(exts: &mut [Extension]) {
    exts.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.iter().cmp(b.iter())));
}

pub fn enumerate_extensions(af: &Psaf, sem: SemanticsKind) -> Vec<Extension> {
    let mut out = match sem {
        SemanticsKind::Admissible => labellings(af, false),
        SemanticsKind::Complete => labellings(af, true),
        SemanticsKind::Preferred => {
            let complete = labellings(af, true);
            complete
                .iter()
                .filter(|e| !complete.iter().any(|f| f.len() > e.len() && e.is_subset(f)))
                .cloned()
                .collect()
        }
        SemanticsKind::Stable => {
            let table = attack_table(af);
            labellings(af, true)
                .into_iter()
                .filter(|e| {
                    (0..af.len())
                        .all(|a| e.contains(&a) || table[a].iter().any(|x| x.iter().all(|b| e.contains(b))))
                })
                .collect()
        }
        SemanticsKind::Grounded => vec![grounded_extension(af)],
    };
    sort_extensions(&mut out);
    out
}

pub fn extension_conclusions(af: &Psaf, e: &Extension) -> FormulaSet {
    e.iter().map(|&i| af.arguments[i].conclusion.clone()).collect()
}

/// Union of the supports of an extension's arguments.
pub fn extension_base(af: &Psaf, e: &Extension) -> FormulaSet {
    e.iter().flat_map(|&i| af.arguments[i].support.iter().cloned()).collect()
}

/// Arguments whose support lies within `base`.
pub fn args_of(af: &Psaf, base: &FormulaSet) -> Extension {
    (0..af.len()).filter(|&i| af.arguments[i].support.is_subset(base)).collect()
}

/// An acceptance decision with its witnesses: for credulous acceptance one
/// extension containing the formula; otherwise the extensions inspected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Acceptance {
    pub accepted: bool,
    pub witnesses: Vec<Extension>,
}

pub fn accepted(af: &Psaf, phi: &Formula, mode: AcceptanceMode) -> Acceptance {
    let contains = |e: &Extension| e.iter().any(|&i| &af.arguments[i].conclusion == phi);
    match mode {
        AcceptanceMode::Credulous(sem) => {
            // Every admissible set lies inside a preferred one, so credulous
            // admissible acceptance is decided on preferred extensions.
            let sem = match sem {
                SemanticsKind::Admissible | SemanticsKind::Complete => SemanticsKind::Preferred,
                s => s,
            };
            let exts = enumerate_extensions(af, sem);
            match exts.iter().find(|e| contains(e)) {
                Some(e) => Acceptance {
                    accepted: true,
                    witnesses: vec![e.clone()],
                },
                None => Acceptance {
                    accepted: false,
                    witnesses: exts,
                },
            }
        }
        AcceptanceMode::Sceptical(sem) => {
            let exts = enumerate_extensions(af, sem);
            Acceptance {
                accepted: exts.iter().all(contains),
                witnesses: exts,
            }
        }
        AcceptanceMode::Grounded => {
            let g = grounded_extension(af);
            Acceptance {
                accepted: contains(&g),
                witnesses: vec![g],
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: CheckStatus,
    pub detail: String,
}

/// A list of named pass/fail checks.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn push(&mut self, name: impl Into<String>, ok: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
            detail: detail.into(),
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == CheckStatus::Pass)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail).collect()
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }
}

fn render_ext(af: &Psaf, e: &Extension) -> String {
    let ids: Vec<&str> = e.iter().map(|&i| af.arguments[i].id.as_str()).collect();
    format!("{{{}}}", ids.join(", "))
}

/// Consistency and closure postulates for every extension of `sem`.
///
/// Closure is checked for complete-based semantics only: an admissible set
/// need not contain arguments for everything its conclusions entail.
pub fn verify_postulates(af: &Psaf, kb: &KnowledgeBase, sem: SemanticsKind) -> Report {
    let mut report = Report::default();
    let exts = enumerate_extensions(af, sem);
    let mut bad_consistency = Vec::new();
    let mut bad_closure = Vec::new();
    for e in &exts {
        let cons = extension_conclusions(af, e);
        if !is_consistent(kb, &cons) {
            bad_consistency.push(render_ext(af, e));
        }
        if sem != SemanticsKind::Admissible {
            let missing: Vec<String> = closure(kb, &cons)
                .difference(&cons)
                .filter(|f| !f.is_bottom())
                .map(|f| f.to_string())
                .collect();
            if !missing.is_empty() {
                bad_closure.push(format!("{} misses {}", render_ext(af, e), missing.join(", ")));
            }
        }
    }
    report.push(
        format!("consistency/{sem}"),
        bad_consistency.is_empty(),
        if bad_consistency.is_empty() {
            format!("{} extensions have consistent conclusions", exts.len())
        } else {
            format!("inconsistent: {}", bad_consistency.join("; "))
        },
    );
    if sem != SemanticsKind::Admissible {
        report.push(
            format!("closure/{sem}"),
            bad_closure.is_empty(),
            if bad_closure.is_empty() {
                format!("{} extensions are closed", exts.len())
            } else {
                bad_closure.join("; ")
            },
        );
    }
    report
}

fn render_family(family: &[FormulaSet]) -> String {
    let parts: Vec<String> = family.iter().map(crate::logic::render_set).collect();
    parts.join(" ")
}

/// Cross-checks between extensions and repairs: bases of stable and
/// preferred extensions equal the repairs, and credulous / sceptical /
/// grounded acceptance coincide with entailment in some / all / the
/// intersection of repairs, for every literal entailed by the whole KB.
pub fn theorem1_report(kb: &KnowledgeBase) -> Result<Report, PsafError> {
    let af = build_psaf(kb)?;
    Ok(theorem1_report_for(kb, &af))
}

pub fn theorem1_report_for(kb: &KnowledgeBase, af: &Psaf) -> Report {
    let mut report = Report::default();
    let mut mcs = enumerate_mcs(kb);
    mcs.sort();
    let stable = enumerate_extensions(af, SemanticsKind::Stable);
    let preferred = enumerate_extensions(af, SemanticsKind::Preferred);
    let grounded = grounded_extension(af);
    for (name, exts) in [("stable", &stable), ("preferred", &preferred)] {
        let mut bases: Vec<FormulaSet> = exts.iter().map(|e| extension_base(af, e)).collect();
        bases.sort();
        let ok = bases == mcs;
        report.push(
            format!("bases/{name}"),
            ok,
            if ok {
                format!("{} extensions, bases equal the {} repairs", exts.len(), mcs.len())
            } else {
                format!("bases [{}] vs repairs [{}]", render_family(&bases), render_family(&mcs))
            },
        );
    }

    let inter: FormulaSet = match mcs.split_first() {
        Some((first, rest)) => rest
            .iter()
            .fold(first.clone(), |acc, m| acc.intersection(m).cloned().collect()),
        None => FormulaSet::new(),
    };
    let literals: Vec<Literal> = closure(kb, &kb.defeasible_set())
        .into_iter()
        .filter_map(|f| f.as_literal().cloned())
        .collect();
    let concl = |e: &Extension| extension_conclusions(af, e);
    let pref_cons: Vec<FormulaSet> = preferred.iter().map(concl).collect();
    let stab_cons: Vec<FormulaSet> = stable.iter().map(concl).collect();
    let grounded_cons = concl(&grounded);
    let mut mismatches = Vec::new();
    for l in &literals {
        let f = Formula::Lit(l.clone());
        let some = mcs.iter().any(|m| entails(kb, m, l));
        let all = mcs.iter().all(|m| entails(kb, m, l));
        let int = entails(kb, &inter, l);
        let cred_p = pref_cons.iter().any(|c| c.contains(&f));
        let cred_s = stab_cons.iter().any(|c| c.contains(&f));
        let scep_p = pref_cons.iter().all(|c| c.contains(&f));
        let scep_s = stab_cons.iter().all(|c| c.contains(&f));
        let grd = grounded_cons.contains(&f);
        for (what, a, b) in [
            ("some/credulous-preferred", some, cred_p),
            ("some/credulous-stable", some, cred_s),
            ("all/sceptical-preferred", all, scep_p),
            ("all/sceptical-stable", all, scep_s),
            ("intersection/grounded", int, grd),
        ] {
            if a != b {
                mismatches.push(format!("{l}: {what} repairs={a} extensions={b}"));
            }
        }
    }
    report.push(
        "acceptance-vs-repairs",
        mismatches.is_empty(),
        if mismatches.is_empty() {
            format!("{} literals agree in all modes", literals.len())
        } else {
            mismatches.join("; ")
        },
    );

    let inter_closure = closure(kb, &inter);
    let outside: Vec<String> = grounded_cons
        .iter()
        .filter(|f| !inter_closure.contains(f))
        .map(|f| f.to_string())
        .collect();
    report.push(
        "grounded-within-intersection",
        outside.is_empty(),
        if outside.is_empty() {
            "Cons(grounded) is contained in the closure of the repairs' intersection".to_string()
        } else {
            format!("outside: {}", outside.join(", "))
        },
    );
    let coincide = extension_base(af, &grounded) == inter;
    report.push(
        "grounded-base-vs-intersection",
        true,
        if coincide {
            "grounded base coincides with the intersection of repairs".to_string()
        } else {
            format!(
                "grounded base {} differs from intersection {} (reported only)",
                crate::logic::render_set(&extension_base(af, &grounded)),
                crate::logic::render_set(&inter)
            )
        },
    );
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_kb;

    #[test]
    fn mutual_conflict_has_two_preferred_and_empty_grounded() {
        let kb = parse_kb("@mode datalog\nfact a(x).\nfact b(x).\nconstraint c1: a(X), b(X) -> !.\n").unwrap();
        let af = build_psaf(&kb).unwrap();
        assert!(grounded_extension(&af).is_empty());
        assert_eq!(enumerate_extensions(&af, SemanticsKind::Preferred).len(), 2);
        assert_eq!(enumerate_extensions(&af, SemanticsKind::Complete).len(), 3);
        assert_eq!(enumerate_extensions(&af, SemanticsKind::Admissible).len(), 3);
    }

    #[test]
    fn semantics_names_round_trip() {
        for s in SemanticsKind::ALL {
            assert_eq!(SemanticsKind::from_name(s.name()), Some(s));
        }
        assert_eq!(AcceptanceMode::Credulous(SemanticsKind::Stable).to_string(), "credulous-stable");
    }
}
