//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! (run with `--nocapture` to see them) and fails if any criterion other
//! than the known-red repair-family criterion fails.

mod common;

use std::collections::BTreeSet;
use std::time::Instant;

use common::{load, minimal_attacks, oracle_all_attacks, oracle_arguments, oracle_extensions, oracle_extensions_of, oracle_mcs, set, sorted, sorted_exts};
use psaf::argumentation::{build_psaf, enumerate_arguments, AttackKind};
use psaf::dialogue::{
    attempt_dialogue, check_properties, culprits, defence_set, focused_subtrees, from_abstract, generate_dialogue,
    is_focused, to_abstract, Agent, Content, DialogueBuilder, DialogueTree,
};
use psaf::gen::{random_kb, GenParams};
use psaf::logic::{closure, enumerate_mcs, mcs_query, Formula, FormulaSet, KnowledgeBase, McsMode};
use psaf::render::{parse_json, render_json};
use psaf::semantics::{
    accepted, args_of, enumerate_extensions, extension_base, grounded_extension, verify_postulates, AcceptanceMode,
    SemanticsKind,
};
use psaf::PsafError;

const CREDULOUS: AcceptanceMode = AcceptanceMode::Credulous(SemanticsKind::Preferred);
const SCEPTICAL: AcceptanceMode = AcceptanceMode::Sceptical(SemanticsKind::Preferred);
const FIXTURES: [&str; 8] = [
    "university.kb",
    "k2.kb",
    "k3co.kb",
    "k4.kb",
    "k5.kb",
    "focus.kb",
    "sceptical.kb",
    "consistent.kb",
];
const SWEEP: u64 = 200;

fn f(s: &str) -> Formula {
    Formula::parse(s).unwrap()
}

fn render_family(family: &[FormulaSet]) -> String {
    family.iter().map(psaf::logic::render_set).collect::<Vec<_>>().join(" ")
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn table_reproduction() -> Outcome {
    let kb = load("university.kb");
    let start = Instant::now();
    let args = enumerate_arguments(&kb).unwrap();
    let elapsed = start.elapsed();
    let got: BTreeSet<(FormulaSet, Formula)> = args.iter().map(|a| (a.support.clone(), a.conclusion.clone())).collect();
    let table: BTreeSet<(FormulaSet, Formula)> = [
        (&["te(v,kr)"][..], "te(v,kr)"),
        (&["gc(kr)"], "gc(kr)"),
        (&["gc(kr)", "te(v,kr)"], "fp(v)"),
        (&["gc(kr)", "te(v,kr)"], "rese(v)"),
        (&["te(v,kd)"], "te(v,kd)"),
        (&["taOf(v,kd)"], "taOf(v,kd)"),
        (&["uc(kd)"], "uc(kd)"),
        (&["taOf(v,kd)", "uc(kd)"], "ta(v)"),
        (&["te(v,kd)"], "lect(v)"),
        (&["te(v,kr)"], "lect(v)"),
        (&["te(v,kr)"], "emp(v)"),
        (&["te(v,kd)"], "emp(v)"),
        (&["gc(kr)", "te(v,kr)"], "emp(v)"),
    ]
    .into_iter()
    .map(|(s, c)| (set(s), f(c)))
    .collect();
    let oracle = got == oracle_arguments(&kb);
    outcome(
        args.len() == 13 && got == table && oracle && elapsed.as_secs_f64() < 1.0,
        format!(
            "{} arguments, table match {}, oracle match {oracle}, {:.1} ms",
            args.len(),
            got == table,
            elapsed.as_secs_f64() * 1e3
        ),
    )
}

fn repairs_and_extensions() -> Outcome {
    let kb = load("university.kb");
    let af = build_psaf(&kb).unwrap();
    let listed = sorted(vec![
        set(&["taOf(v,kd)", "uc(kd)"]),
        set(&["te(v,kr)", "gc(kr)", "te(v,kd)"]),
        set(&["taOf(v,kd)", "te(v,kr)", "te(v,kd)", "gc(kr)"]),
        set(&["taOf(v,kd)", "te(v,kr)", "te(v,kd)", "uc(kd)"]),
        set(&["gc(kr)", "te(v,kr)", "te(v,kd)", "uc(kd)"]),
        set(&["uc(kd)", "taOf(v,kd)", "gc(kr)"]),
    ]);
    let mcs = sorted(enumerate_mcs(&kb));
    let oracle = oracle_mcs(&kb);
    let stable = enumerate_extensions(&af, SemanticsKind::Stable);
    let preferred = enumerate_extensions(&af, SemanticsKind::Preferred);
    let bases = |exts: &[BTreeSet<usize>]| sorted(exts.iter().map(|e| extension_base(&af, e)).collect());
    let e1 = args_of(&af, &set(&["taOf(v,kd)", "uc(kd)"]));
    let e1_is_extension = preferred.contains(&e1);
    let antichain = listed
        .iter()
        .all(|a| !listed.iter().any(|b| a != b && a.is_subset(b)));
    let pass = mcs == listed && stable.len() == 6 && preferred.len() == 6 && e1_is_extension;
    outcome(
        pass,
        format!(
            "repairs computed [{}] (exhaustive oracle agrees: {}); listed family has 6 sets but is not an antichain \
             ({}) and contains the inconsistent set {{taOf(v,kd), te(v,kd), te(v,kr), uc(kd)}} (consistent: {}); \
             stable/preferred extensions {}/{}; bases equal repairs: {}; Args({{taOf(v,kd), uc(kd)}}) has {} arguments \
             and is an extension: {} (gc(kr) is in no conflict, so every preferred extension contains its argument)",
            render_family(&mcs),
            mcs == oracle,
            if antichain { "antichain" } else { "one listed set is contained in another" },
            psaf::logic::is_consistent(&kb, &set(&["taOf(v,kd)", "te(v,kd)", "te(v,kr)", "uc(kd)"])),
            stable.len(),
            preferred.len(),
            bases(&stable) == mcs && bases(&preferred) == mcs,
            e1.len(),
            e1_is_extension,
        ),
    )
}

fn collective_attacks() -> Outcome {
    let kb = load("k4.kb");
    let af = build_psaf(&kb).unwrap();
    let idx = |s: &str| af.find(&set(&[s]), &f(s)).unwrap();
    let (b1, b2, b3) = (idx("A(a)"), idx("B(a)"), idx("C(a)"));
    let got: BTreeSet<BTreeSet<usize>> = enumerate_extensions(&af, SemanticsKind::Preferred).into_iter().collect();
    let expected: BTreeSet<BTreeSet<usize>> = [
        BTreeSet::from([b1, b2]),
        BTreeSet::from([b1, b3]),
        BTreeSet::from([b2, b3]),
    ]
    .into_iter()
    .collect();
    outcome(got == expected, format!("preferred extensions {got:?}, expected {expected:?}"))
}

fn university_queries() -> Outcome {
    let kb = load("university.kb");
    let af = build_psaf(&kb).unwrap();
    let rese = f("rese(v)");
    let l = rese.as_literal().unwrap();
    let mut parts = Vec::new();
    let mut pass = true;
    for (name, mode, mm, want) in [
        ("possible", CREDULOUS, McsMode::Some, true),
        ("plausible", SCEPTICAL, McsMode::All, false),
        ("surest", AcceptanceMode::Grounded, McsMode::Intersection, false),
    ] {
        let ext = accepted(&af, &rese, mode).accepted;
        let mcs = mcs_query(&kb, l, mm);
        let dlg = attempt_dialogue(&kb, &rese, mode).unwrap().classification.successful_for(mode);
        pass &= ext == want && mcs == want && dlg == want;
        parts.push(format!("{name}: extensions={ext} repairs={mcs} dialogue={dlg}"));
    }
    outcome(pass, parts.join("; "))
}

fn k5_boundary() -> Outcome {
    let kb = load("k5.kb");
    let af = build_psaf(&kb).unwrap();
    let a = f("A(a)");
    let grounded_empty = grounded_extension(&af).is_empty();
    let no_grounded = generate_dialogue(&kb, &a, AcceptanceMode::Grounded).unwrap().is_none();
    let adm = AcceptanceMode::Credulous(SemanticsKind::Admissible);
    let (cred, defensive, non_redundant) = match generate_dialogue(&kb, &a, adm).unwrap() {
        Some(g) => {
            let r = check_properties(&kb, &g.tree).unwrap();
            (g.classification.successful_for(adm), r.defensive, r.non_redundant)
        }
        None => (false, false, false),
    };
    outcome(
        grounded_empty && no_grounded && cred && defensive && non_redundant,
        format!(
            "grounded extension empty: {grounded_empty}; no grounded dialogue: {no_grounded}; \
             credulous dialogue successful: {cred}, defensive: {defensive}, non-redundant: {non_redundant}"
        ),
    )
}

fn cyclicity() -> Outcome {
    let kb = load("cyclic.kb");
    match build_psaf(&kb) {
        Err(e @ PsafError::Cyclic { .. }) => outcome(true, format!("rejected: {e}")),
        Err(e) => outcome(false, format!("wrong error: {e}")),
        Ok(_) => outcome(false, "accepted a cyclic KB"),
    }
}

fn defeasible_fixtures() -> Outcome {
    let lits = |kb: &KnowledgeBase| -> BTreeSet<String> {
        closure(kb, &kb.defeasible_set())
            .iter()
            .filter_map(Formula::as_literal)
            .map(|l| l.to_string())
            .collect()
    };
    let k2 = load("k2.kb");
    let k3 = load("k3co.kb");
    let cn2 = lits(&k2);
    let cn3 = lits(&k3);
    let want2: BTreeSet<String> = ["x", "y"].map(String::from).into();
    let want3: BTreeSet<String> = ["q", "~r", "~p", "u"].map(String::from).into();
    let mcs2 = sorted(enumerate_mcs(&k2));
    let mcs3 = sorted(enumerate_mcs(&k3));
    let want_mcs2 = vec![set(&["x", "[s1]", "[d1]"])];
    let want_mcs3 = sorted(vec![set(&["q", "~r", "[s1]"]), set(&["q", "[d1]", "[s1]"])]);
    outcome(
        cn2 == want2 && cn3 == want3 && mcs2 == want_mcs2 && mcs3 == want_mcs3,
        format!(
            "closure k2.kb {cn2:?}, k3co.kb {cn3:?}; repairs k2.kb [{}], k3co.kb [{}]",
            render_family(&mcs2),
            render_family(&mcs3)
        ),
    )
}

fn dialogue_fixtures() -> Outcome {
    let kb = load("university.kb");
    let g = generate_dialogue(&kb, &f("rese(v)"), CREDULOUS).unwrap().unwrap();
    let de = defence_set(&kb, &g.tree);
    let cu = culprits(&kb, &g.tree);
    let first = de == set(&["te(v,kr)", "gc(kr)", "te(v,kd)"]) && cu == set(&["taOf(v,kd)", "uc(kd)"]);

    let k4 = load("k4.kb");
    let mut b = DialogueBuilder::new(&k4, "k4");
    b.say(Agent::A1, 0, Content::Claim { phi: f("A(a)") }).unwrap();
    b.say(Agent::A1, 1, Content::Fact { phi: f("A(a)") }).unwrap();
    b.say(
        Agent::A2,
        2,
        Content::Contrary {
            delta: set(&["B(a)", "C(a)"]),
            phi: Some(f("A(a)")),
            against: None,
        },
    )
    .unwrap();
    b.say(
        Agent::A1,
        3,
        Content::Contrary {
            delta: set(&["A(a)", "C(a)"]),
            phi: None,
            against: Some(set(&["B(a)", "C(a)"])),
        },
    )
    .unwrap();
    let (_, t) = b.finish().unwrap();
    let report = check_properties(&k4, &t).unwrap();
    let inter: FormulaSet = report.defence_set.intersection(&report.culprits).cloned().collect();
    let second = report.defence_set == set(&["A(a)", "C(a)"])
        && report.culprits == set(&["B(a)", "C(a)"])
        && inter == set(&["C(a)"])
        && report.defensive;
    outcome(
        first && second,
        format!(
            "university.kb: DE {} CU {}; k4.kb: DE {} CU {} ∩ {} defensive {}",
            psaf::logic::render_set(&de),
            psaf::logic::render_set(&cu),
            psaf::logic::render_set(&report.defence_set),
            psaf::logic::render_set(&report.culprits),
            psaf::logic::render_set(&inter),
            report.defensive
        ),
    )
}

fn soundness_sweep() -> Outcome {
    let start = Instant::now();
    let mut checks = 0;
    let mut violations = Vec::new();
    for seed in 0..SWEEP {
        let kb = random_kb(seed, &GenParams::default());
        let af = build_psaf(&kb).unwrap();
        let literals: BTreeSet<Formula> = closure(&kb, &kb.defeasible_set())
            .into_iter()
            .filter(|f| f.as_literal().is_some())
            .collect();
        for phi in &literals {
            for (mode, mm) in [
                (CREDULOUS, McsMode::Some),
                (SCEPTICAL, McsMode::All),
                (AcceptanceMode::Grounded, McsMode::Intersection),
            ] {
                checks += 1;
                let ext = accepted(&af, phi, mode).accepted;
                let mcs = mcs_query(&kb, phi.as_literal().unwrap(), mm);
                let dlg = match attempt_dialogue(&kb, phi, mode) {
                    Ok(g) => g.classification.successful_for(mode),
                    Err(e) => {
                        violations.push(format!("seed {seed} {phi} {mode}: {e}"));
                        continue;
                    }
                };
                if !(ext == mcs && mcs == dlg) {
                    violations.push(format!("seed {seed} {phi} {mode}: ext={ext} mcs={mcs} dlg={dlg}"));
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        violations.is_empty() && secs < 60.0,
        format!(
            "{SWEEP} KBs, {checks} checks, {} violations, {secs:.1} s{}",
            violations.len(),
            violations.first().map(|v| format!(" (first: {v})")).unwrap_or_default()
        ),
    )
}

fn postulates() -> Outcome {
    let mut failures = Vec::new();
    let mut kbs: Vec<(String, KnowledgeBase)> = FIXTURES.iter().map(|n| (n.to_string(), load(n))).collect();
    kbs.extend((0..SWEEP).map(|s| (format!("seed {s}"), random_kb(s, &GenParams::default()))));
    let mut reports = 0;
    for (name, kb) in &kbs {
        let af = build_psaf(kb).unwrap();
        for sem in SemanticsKind::ALL {
            let r = verify_postulates(&af, kb, sem);
            reports += 1;
            failures.extend(r.failures().into_iter().map(|c| format!("{name}: {} {}", c.name, c.detail)));
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{} KBs x 5 semantics = {reports} reports, {} violations",
            kbs.len(),
            failures.len()
        ),
    )
}

fn minimal_attack_oracle() -> Outcome {
    let mut tested = 0;
    let mut mismatches = Vec::new();
    for seed in 0..SWEEP {
        let kb = random_kb(seed, &GenParams::default());
        let af = build_psaf(&kb).unwrap();
        if af.len() > 12 || af.arguments.iter().filter(|a| a.consistent).count() > 10 {
            continue;
        }
        tested += 1;
        let (rebuttals, undercuts) = oracle_all_attacks(&kb, &af);
        let of_kind = |k: AttackKind| -> BTreeSet<(BTreeSet<usize>, usize)> {
            af.attacks
                .iter()
                .filter(|a| a.kind == k)
                .map(|a| (a.attackers.clone(), a.target))
                .collect()
        };
        if of_kind(AttackKind::Rebuttal) != minimal_attacks(&rebuttals)
            || of_kind(AttackKind::Undercut) != minimal_attacks(&undercuts)
        {
            mismatches.push(format!("seed {seed}: minimal attacks differ"));
        }
        let mut all = rebuttals;
        all.extend(undercuts);
        let consistent: Vec<bool> = af.arguments.iter().map(|a| a.consistent).collect();
        for sem in SemanticsKind::ALL {
            let with_all = oracle_extensions(af.len(), &consistent, &all, sem);
            let with_minimal = oracle_extensions_of(&af, sem);
            let library = sorted_exts(enumerate_extensions(&af, sem));
            if with_all != with_minimal || with_minimal != library {
                mismatches.push(format!("seed {seed} {sem}"));
            }
        }
    }
    outcome(
        mismatches.is_empty() && tested >= 100,
        format!("{tested} frameworks x 5 semantics, {} mismatches", mismatches.len()),
    )
}

fn round_trip() -> Outcome {
    let mut trees = 0;
    let mut skipped = Vec::new();
    let mut failures = Vec::new();
    for name in FIXTURES {
        let kb = load(name);
        let af = build_psaf(&kb).unwrap();
        let claims: BTreeSet<Formula> = af
            .arguments
            .iter()
            .filter(|a| a.consistent)
            .map(|a| a.conclusion.clone())
            .filter(|c| c.as_literal().is_some())
            .collect();
        for phi in &claims {
            for mode in [CREDULOUS, SCEPTICAL, AcceptanceMode::Grounded] {
                let Some(g) = generate_dialogue(&kb, phi, mode).unwrap() else { continue };
                let json = render_json(&g.tree);
                if parse_json(&json).map(|t| render_json(&t)).as_deref() != Ok(json.as_str()) {
                    failures.push(format!("{name} {phi} {mode}: json"));
                }
                // A sceptical forest is unfocused; its focused subtrees are
                // what the translation applies to.
                let candidates: Vec<DialogueTree> = if is_focused(&kb, &g.tree) {
                    vec![g.tree.clone()]
                } else {
                    focused_subtrees(&kb, &g.dialogue, &g.tree).into_iter().map(|s| s.tree).collect()
                };
                for t in candidates {
                    let at = match to_abstract(&kb, &t) {
                        Ok(at) => at,
                        Err(e) => {
                            skipped.push(format!("{name} {phi} {mode}: {e}"));
                            continue;
                        }
                    };
                    trees += 1;
                    match from_abstract(&kb, &at) {
                        Ok((_, t2)) => {
                            if defence_set(&kb, &t2) != defence_set(&kb, &t) || culprits(&kb, &t2) != culprits(&kb, &t) {
                                failures.push(format!("{name} {phi} {mode}: DE/CU changed"));
                            }
                        }
                        Err(e) => failures.push(format!("{name} {phi} {mode}: {e}")),
                    }
                }
            }
        }
    }
    outcome(
        failures.is_empty() && trees > 0,
        format!(
            "{trees} fixture trees round-tripped, {} outside the translation's domain, {} failures{}",
            skipped.len(),
            failures.len(),
            failures
                .first()
                .or(skipped.first())
                .map(|v| format!(" (first: {v})"))
                .unwrap_or_default()
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 12] = [
        ("table reproduction", table_reproduction),
        ("repairs and extensions", repairs_and_extensions),
        ("collective attacks", collective_attacks),
        ("query semantics", university_queries),
        ("grounded boundary", k5_boundary),
        ("cyclicity", cyclicity),
        ("defeasible fixtures", defeasible_fixtures),
        ("dialogue fixtures", dialogue_fixtures),
        ("soundness and completeness sweep", soundness_sweep),
        ("postulates", postulates),
        ("minimal attacks", minimal_attack_oracle),
        ("round trip", round_trip),
    ];
    let mut unexpected = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let n = i + 1;
        let o = check();
        println!("criterion {n:>2} {}: {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        // The listed repair family is self-contradictory; this criterion is
        // expected to stay red and is reported, not enforced.
        if !o.pass && n != 2 {
            unexpected.push(n);
        }
    }
    assert!(unexpected.is_empty(), "failing criteria: {unexpected:?}");
}
