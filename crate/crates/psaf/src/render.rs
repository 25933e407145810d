//! Rendering of dialogues and dialogue trees: Graphviz DOT, JSON, and
//! templated natural-language transcripts.

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dialogue::{Agent, Content, Dialogue, DialogueTree, EdgeKind, Label, Tag, TreeNode};
use crate::error::DialogueError;
use crate::logic::FormulaSet;
use crate::semantics::AcceptanceMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Dot,
    Json,
    #[default]
    Text,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dot" => Ok(Format::Dot),
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            other => Err(format!("unknown format `{other}` (expected dot, json or text)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RenderOptions {
    pub format: Format,
    /// Show utterance ids on DOT nodes.
    pub show_ids: bool,
    /// Show node tags on DOT nodes.
    pub show_tags: bool,
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// The tree as a Graphviz digraph. Proponent nodes are boxes, opponent
/// nodes ellipses; inference edges are dashed and attack edges solid,
/// labelled with the attacking utterance. Edges point from child to parent.
pub fn render_dot(t: &DialogueTree, opts: &RenderOptions) -> String {
    fn walk(n: &TreeNode, opts: &RenderOptions, counts: &mut HashMap<u32, usize>, out: &mut String) -> String {
        let k = counts.entry(n.utterance_id).or_insert(0);
        let id = format!("n{}_{}", n.utterance_id, k);
        *k += 1;
        let mut label = n.formula.to_string();
        if opts.show_tags {
            let _ = write!(label, " [{}]", tag_name(n.tag));
        }
        if opts.show_ids {
            let _ = write!(label, " #{}", n.utterance_id);
        }
        let shape = match n.label {
            Label::P => "box",
            Label::O => "ellipse",
        };
        let _ = writeln!(out, "  {id} [label=\"{}\", shape={shape}];", escape(&label));
        for c in &n.children {
            let child = walk(&c.node, opts, counts, out);
            match c.edge {
                EdgeKind::Inference => {
                    let _ = writeln!(out, "  {child} -> {id} [style=dashed];");
                }
                EdgeKind::Attack => {
                    let _ = writeln!(out, "  {child} -> {id} [style=solid, label=\"u{}\"];", c.node.utterance_id);
                }
            }
        }
        id
    }
    let mut out = String::from("digraph dialogue {\n  rankdir=BT;\n");
    walk(&t.root, opts, &mut HashMap::new(), &mut out);
    out.push_str("}\n");
    out
}

fn tag_name(t: Tag) -> &'static str {
    match t {
        Tag::Unmarked => "um",
        Tag::NonFact => "nf",
        Tag::Fact => "f",
    }
}

/// The tree as pretty-printed JSON.
pub fn render_json(t: &DialogueTree) -> String {
    t.to_json()
}

/// Inverse of [`render_json`].
pub fn parse_json(text: &str) -> Result<DialogueTree, DialogueError> {
    DialogueTree::from_json(text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Speaker {
    Proponent,
    Opponent,
}

impl fmt::Display for Speaker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Speaker::Proponent => "Proponent",
            Speaker::Opponent => "Opponent",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptLine {
    pub speaker: Speaker,
    pub sentence: String,
}

/// A dialogue narrated turn by turn.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Transcript {
    pub lines: Vec<TranscriptLine>,
}

impl fmt::Display for Transcript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.lines {
            writeln!(f, "{}: {}", l.speaker, l.sentence)?;
        }
        Ok(())
    }
}

fn join(items: &FormulaSet) -> String {
    items.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(" and ")
}

/// Everything said in support of one claim or attack.
#[derive(Default)]
struct Turn {
    agent: Option<Agent>,
    head: Option<Content>,
    offered: FormulaSet,
    mentioned: FormulaSet,
}

/// The dialogue as sentences: one line per claim or attack, with the offers
/// and facts supporting it folded in, plus one line per concession or pass.
/// `mode` picks the adverb of the claim: "possibly" for credulous
/// acceptance, "certainly" otherwise.
pub fn render_text(d: &Dialogue, _t: &DialogueTree, mode: AcceptanceMode) -> Transcript {
    let adverb = match mode {
        AcceptanceMode::Credulous(_) => "possibly",
        AcceptanceMode::Grounded | AcceptanceMode::Sceptical(_) => "certainly",
    };
    // Utterance id -> turn index.
    let mut turn_of: BTreeMap<u32, usize> = BTreeMap::new();
    let mut turns: Vec<Turn> = Vec::new();
    for u in &d.utterances {
        match &u.content {
            Content::Claim { .. } | Content::Contrary { .. } | Content::Concede { .. } | Content::Pass => {
                let mut t = Turn {
                    agent: Some(u.agent),
                    head: Some(u.content.clone()),
                    ..Turn::default()
                };
                if let Content::Contrary { delta, .. } = &u.content {
                    t.mentioned.extend(delta.iter().cloned());
                }
                turns.push(t);
                turn_of.insert(u.id, turns.len() - 1);
            }
            Content::Offer { delta, phi } => {
                let ix = turn_of.get(&u.target).copied().unwrap_or(0);
                turn_of.insert(u.id, ix);
                if let Some(t) = turns.get_mut(ix) {
                    t.offered.insert(phi.clone());
                    t.mentioned.insert(phi.clone());
                    t.mentioned.extend(delta.iter().cloned());
                }
            }
            Content::Fact { phi } => {
                let ix = turn_of.get(&u.target).copied().unwrap_or(0);
                turn_of.insert(u.id, ix);
                if let Some(t) = turns.get_mut(ix) {
                    t.mentioned.insert(phi.clone());
                }
            }
        }
    }
    let lines = turns
        .into_iter()
        .filter_map(|t| {
            let speaker = match t.agent? {
                Agent::A1 => Speaker::Proponent,
                Agent::A2 => Speaker::Opponent,
            };
            let facts: FormulaSet = t.mentioned.difference(&t.offered).cloned().collect();
            let sentence = match t.head? {
                Content::Claim { phi } => {
                    let mut derived = t.offered.clone();
                    derived.remove(&phi);
                    format!("I believe that {phi} is {adverb} the case{}.", support(&derived, &facts))
                }
                Content::Contrary { phi, against, .. } => {
                    let target = match (against, phi) {
                        (Some(a), _) => join(&a),
                        (None, Some(p)) => p.to_string(),
                        (None, None) => "this".to_string(),
                    };
                    format!("{target} is not possible{}.", support(&t.offered, &facts))
                }
                Content::Concede { phi } => {
                    format!("I concede that {phi} because I have no further argument against it.")
                }
                Content::Pass => "I have nothing further to add.".to_string(),
                Content::Offer { .. } | Content::Fact { .. } => return None,
            };
            Some(TranscriptLine { speaker, sentence })
        })
        .collect();
    Transcript { lines }
}

fn support(derived: &FormulaSet, facts: &FormulaSet) -> String {
    let mut s = String::new();
    if !derived.is_empty() {
        let _ = write!(s, " because {}", join(derived));
    }
    if !facts.is_empty() {
        let _ = write!(s, " given the fact that {}", join(facts));
    }
    s
}

/// Render in the format chosen by `opts`. Text output needs the dialogue.
pub fn render(d: &Dialogue, t: &DialogueTree, opts: &RenderOptions, mode: AcceptanceMode) -> String {
    match opts.format {
        Format::Dot => render_dot(t, opts),
        Format::Json => render_json(t),
        Format::Text => render_text(d, t, mode).to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn escaping_and_joining() {
        assert_eq!(escape(r#"a"b\c"#), r#"a\"b\\c"#);
        let items: FormulaSet = ["q", "p"].iter().map(|s| crate::logic::Formula::parse(s).unwrap()).collect();
        assert_eq!(join(&items), "p and q");
        assert_eq!(support(&FormulaSet::new(), &items), " given the fact that p and q");
        assert_eq!(support(&FormulaSet::new(), &FormulaSet::new()), "");
    }

    #[test]
    fn formats_parse() {
        assert_eq!("json".parse::<Format>(), Ok(Format::Json));
        assert_eq!(Format::default(), Format::Text);
    }
}
