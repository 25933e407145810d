mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::load;
use proptest::prelude::*;
use psaf::dialogue::{attempt_dialogue, generate_dialogue, Agent, Content, DialogueBuilder, Generated};
use psaf::gen::{random_kb, GenParams};
use psaf::logic::Formula;
use psaf::render::{parse_json, render, render_dot, render_json, render_text, Format, RenderOptions, Speaker};
use psaf::semantics::{AcceptanceMode, SemanticsKind};

const CREDULOUS: AcceptanceMode = AcceptanceMode::Credulous(SemanticsKind::Preferred);

fn rese() -> Generated {
    let kb = load("university.kb");
    generate_dialogue(&kb, &Formula::parse("rese(v)").unwrap(), CREDULOUS)
        .unwrap()
        .unwrap()
}

/// Edges of a DOT graph as `(from, to, attributes)`.
fn edges(dot: &str) -> Vec<(String, String, String)> {
    dot.lines()
        .filter_map(|l| {
            let (lhs, attrs) = l.trim().split_once(" [")?;
            let (from, to) = lhs.split_once(" -> ")?;
            Some((from.to_string(), to.to_string(), attrs.to_string()))
        })
        .collect()
}

fn components(nodes: &BTreeSet<String>, links: &[(String, String)]) -> usize {
    let mut parent: BTreeMap<String, String> = nodes.iter().map(|n| (n.clone(), n.clone())).collect();
    fn find(p: &mut BTreeMap<String, String>, x: &str) -> String {
        let up = p[x].clone();
        if up == x {
            return up;
        }
        let r = find(p, &up);
        p.insert(x.to_string(), r.clone());
        r
    }
    for (a, b) in links {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent.insert(ra, rb);
    }
    let roots: BTreeSet<String> = nodes.iter().map(|n| find(&mut parent, n)).collect();
    roots.len()
}

#[test]
fn dot_shows_three_arguments_and_two_attacks() {
    let g = rese();
    let dot = render_dot(&g.tree, &RenderOptions::default());
    assert!(dot.starts_with("digraph dialogue {\n  rankdir=BT;\n"));
    assert!(dot.ends_with("}\n"));
    let nodes: BTreeSet<String> = dot
        .lines()
        .filter(|l| l.contains("shape="))
        .map(|l| l.trim().split(' ').next().unwrap().to_string())
        .collect();
    assert_eq!(nodes.len(), g.tree.size());
    let all = edges(&dot);
    let dashed: Vec<(String, String)> = all
        .iter()
        .filter(|e| e.2.contains("dashed"))
        .map(|e| (e.0.clone(), e.1.clone()))
        .collect();
    let solid: Vec<_> = all.iter().filter(|e| e.2.contains("solid")).collect();
    assert_eq!(components(&nodes, &dashed), 3);
    assert_eq!(solid.len(), 2);
    assert!(solid.iter().all(|e| e.2.contains("label=\"u")));
    assert_eq!(dot.matches("shape=box").count(), 6);
    assert_eq!(dot.matches("shape=ellipse").count(), 3);
}

#[test]
fn dot_options_add_tags_and_ids() {
    let g = rese();
    let opts = RenderOptions {
        format: Format::Dot,
        show_ids: true,
        show_tags: true,
    };
    let dot = render_dot(&g.tree, &opts);
    assert!(dot.contains("label=\"gc(kr) [f] #3\""), "{dot}");
    assert!(dot.contains("label=\"rese(v) [nf] #1\""), "{dot}");
}

#[test]
fn university_transcript() {
    let g = rese();
    let text = render_text(&g.dialogue, &g.tree, CREDULOUS).to_string();
    assert_eq!(
        text,
        "Proponent: I believe that rese(v) is possibly the case because fp(v) given the fact that gc(kr) and te(v,kr).\n\
         Opponent: rese(v) is not possible because ta(v) given the fact that taOf(v,kd) and uc(kd).\n\
         Proponent: ta(v) is not possible because lect(v) given the fact that te(v,kd).\n\
         Opponent: I concede that rese(v) because I have no further argument against it.\n"
    );
}

#[test]
fn k5_transcript_has_three_turns_and_a_concession() {
    let kb = load("k5.kb");
    let g = generate_dialogue(&kb, &Formula::parse("A(a)").unwrap(), CREDULOUS)
        .unwrap()
        .unwrap();
    let t = render_text(&g.dialogue, &g.tree, CREDULOUS);
    let speakers: Vec<Speaker> = t.lines.iter().map(|l| l.speaker).collect();
    assert_eq!(
        speakers,
        [Speaker::Proponent, Speaker::Opponent, Speaker::Proponent, Speaker::Opponent]
    );
    assert!(t.lines[3].sentence.starts_with("I concede that A(a)"));
}

#[test]
fn claim_only_dialogue_is_one_line() {
    let kb = load("university.kb");
    let mut b = DialogueBuilder::new(&kb, "university");
    b.say(Agent::A1, 0, Content::Claim { phi: Formula::parse("ta(v)").unwrap() }).unwrap();
    let (d, t) = b.finish().unwrap();
    let text = render_text(&d, &t, AcceptanceMode::Grounded).to_string();
    assert_eq!(text, "Proponent: I believe that ta(v) is certainly the case.\n");
}

#[test]
fn json_round_trips_byte_for_byte() {
    let g = rese();
    let text = render_json(&g.tree);
    let back = parse_json(&text).unwrap();
    assert_eq!(back, g.tree);
    assert_eq!(render_json(&back), text);
    // Leaves carry an explicit empty child list.
    assert!(text.contains("\"children\": []"));
}

#[test]
fn render_dispatches_on_format() {
    let g = rese();
    for (format, prefix) in [(Format::Dot, "digraph"), (Format::Json, "{"), (Format::Text, "Proponent:")] {
        let opts = RenderOptions {
            format,
            ..RenderOptions::default()
        };
        assert!(render(&g.dialogue, &g.tree, &opts, CREDULOUS).starts_with(prefix));
    }
    assert_eq!("dot".parse::<Format>(), Ok(Format::Dot));
    assert!("svg".parse::<Format>().is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn rendering_is_total_and_json_is_stable(seed in any::<u64>()) {
        let kb = random_kb(seed, &GenParams::default());
        let af = psaf::argumentation::build_psaf(&kb).unwrap();
        if let Some(a) = af.arguments.iter().find(|a| a.conclusion.as_literal().is_some()) {
            let g = attempt_dialogue(&kb, &a.conclusion, CREDULOUS).unwrap();
            let t = render_text(&g.dialogue, &g.tree, CREDULOUS);
            prop_assert!(!t.lines.is_empty());
            prop_assert_eq!(t.lines[0].speaker, Speaker::Proponent);
            let dot = render_dot(&g.tree, &RenderOptions::default());
            prop_assert_eq!(dot.matches("shape=").count(), g.tree.size());
            let json = render_json(&g.tree);
            prop_assert_eq!(render_json(&parse_json(&json).unwrap()), json);
        }
    }
}
