//! Explanatory dialogues: utterances, legal moves and the dialogue trees
//! they build, together with the analysis of those trees (potential
//! arguments, defence sets, success predicates), the correspondence with
//! argument-level dispute trees, and a generator of winning dialogues.

mod abstract_tree;
mod analysis;
mod generate;

pub use abstract_tree::{from_abstract, from_abstract_forest, to_abstract, AbstractDialogueTree, AbstractNode};
pub use analysis::{
    check_properties, check_properties_with, culprits, defence_set, extract_potential_arguments, focused_subtrees,
    is_focused, psaf_from_tree, FocusedSubtree, NodePath, PotentialArgument, PropertyReport,
};
pub use generate::{attempt_dialogue, classify_success, generate_dialogue, Certificate, Classification, Generated};

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::DialogueError;
use crate::logic::engine::Engine;
use crate::logic::{is_consistent, render_set, Formula, FormulaSet, KnowledgeBase};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Agent {
    A1,
    A2,
}

impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Agent::A1 => "a1",
            Agent::A2 => "a2",
        })
    }
}

/// What an utterance says.
///
/// `Contrary` covers the three attacking locutions. With `phi` alone it
/// attacks the node holding `phi` that the target utterance introduced. With
/// `against`, it attacks a set of formulas: without `phi`, formulas held by the
/// nodes of the target utterance or below them; with `phi`, formulas inside the
/// argument rooted at the node holding `phi`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Content {
    Claim {
        phi: Formula,
    },
    Offer {
        delta: FormulaSet,
        phi: Formula,
    },
    Contrary {
        delta: FormulaSet,
        phi: Option<Formula>,
        against: Option<FormulaSet>,
    },
    Concede {
        phi: Formula,
    },
    Fact {
        phi: Formula,
    },
    Pass,
}

impl Content {
    pub fn kind(&self) -> &'static str {
        match self {
            Content::Claim { .. } => "claim",
            Content::Offer { .. } => "offer",
            Content::Contrary { .. } => "contrary",
            Content::Concede { .. } => "concede",
            Content::Fact { .. } => "fact",
            Content::Pass => "pass",
        }
    }

    /// Whether this content changes the dialogue tree.
    pub fn extends_tree(&self) -> bool {
        !matches!(self, Content::Concede { .. } | Content::Pass)
    }

    /// The formulas that the utterance puts on the table.
    fn uttered(&self) -> FormulaSet {
        match self {
            Content::Claim { phi } | Content::Fact { phi } | Content::Concede { phi } => FormulaSet::from([phi.clone()]),
            Content::Offer { delta, phi } => {
                let mut s = delta.clone();
                s.insert(phi.clone());
                s
            }
            Content::Contrary { delta, .. } => delta.clone(),
            Content::Pass => FormulaSet::new(),
        }
    }
}

impl fmt::Display for Content {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Content::Claim { phi } => write!(f, "claim({phi})"),
            Content::Offer { delta, phi } => write!(f, "offer({}, {phi})", render_set(delta)),
            Content::Contrary { delta, phi, against } => {
                write!(f, "contrary({}", render_set(delta))?;
                if let Some(p) = phi {
                    write!(f, ", {p}")?;
                }
                if let Some(a) = against {
                    write!(f, ", against {}", render_set(a))?;
                }
                f.write_str(")")
            }
            Content::Concede { phi } => write!(f, "concede({phi})"),
            Content::Fact { phi } => write!(f, "fact({phi})"),
            Content::Pass => f.write_str("pass"),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ContentJson {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    phi: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    delta: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    against: Option<Vec<String>>,
}

fn strings(set: &FormulaSet) -> Vec<String> {
    set.iter().map(|f| f.to_string()).collect()
}

fn parse_set(items: Vec<String>) -> Result<FormulaSet, String> {
    items
        .iter()
        .map(|s| Formula::parse(s).map_err(|e| e.to_string()))
        .collect()
}

impl Serialize for Content {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut j = ContentJson {
            kind: self.kind().to_string(),
            phi: None,
            delta: None,
            against: None,
        };
        match self {
            Content::Claim { phi } | Content::Concede { phi } | Content::Fact { phi } => j.phi = Some(phi.to_string()),
            Content::Offer { delta, phi } => {
                j.phi = Some(phi.to_string());
                j.delta = Some(strings(delta));
            }
            Content::Contrary { delta, phi, against } => {
                j.phi = phi.as_ref().map(|p| p.to_string());
                j.delta = Some(strings(delta));
                j.against = against.as_ref().map(strings);
            }
            Content::Pass => {}
        }
        j.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Content {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let j = ContentJson::deserialize(d)?;
        let phi = j
            .phi
            .map(|p| Formula::parse(&p).map_err(D::Error::custom))
            .transpose()?;
        let delta = j.delta.map(parse_set).transpose().map_err(D::Error::custom)?;
        let against = j.against.map(parse_set).transpose().map_err(D::Error::custom)?;
        let need_phi = |phi: Option<Formula>| phi.ok_or_else(|| D::Error::custom(format!("{} needs phi", j.kind)));
        let need_delta = |delta: Option<FormulaSet>| match delta {
            Some(d) if !d.is_empty() => Ok(d),
            _ => Err(D::Error::custom(format!("{} needs a nonempty delta", j.kind))),
        };
        Ok(match j.kind.as_str() {
            "claim" => Content::Claim { phi: need_phi(phi)? },
            "concede" => Content::Concede { phi: need_phi(phi)? },
            "fact" => Content::Fact { phi: need_phi(phi)? },
            "pass" => Content::Pass,
            "offer" => Content::Offer {
                delta: need_delta(delta)?,
                phi: need_phi(phi)?,
            },
            "contrary" => {
                if phi.is_none() && against.is_none() {
                    return Err(D::Error::custom("contrary needs phi or against"));
                }
                if against.as_ref().is_some_and(|a| a.is_empty()) {
                    return Err(D::Error::custom("contrary: against must be nonempty"));
                }
                Content::Contrary {
                    delta: need_delta(delta)?,
                    phi,
                    against,
                }
            }
            other => return Err(D::Error::custom(format!("unknown utterance kind {other}"))),
        })
    }
}

/// One move `(agent, target, content, id)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Utterance {
    pub agent: Agent,
    pub target: u32,
    pub id: u32,
    pub content: Content,
}

impl fmt::Display for Utterance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.agent, self.target, self.content, self.id)
    }
}

/// A dialogue: the KB it is about (a path or an inline label) and its moves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dialogue {
    pub kb: String,
    pub utterances: Vec<Utterance>,
}

impl Dialogue {
    pub fn new(kb: impl Into<String>) -> Self {
        Dialogue {
            kb: kb.into(),
            utterances: Vec::new(),
        }
    }

    /// The formula of the opening claim.
    pub fn topic(&self) -> Option<&Formula> {
        match self.utterances.first().map(|u| &u.content) {
            Some(Content::Claim { phi }) => Some(phi),
            _ => None,
        }
    }

    pub fn utterance(&self, id: u32) -> Option<&Utterance> {
        self.utterances.iter().find(|u| u.id == id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("dialogue serialises")
    }

    pub fn from_json(text: &str) -> Result<Dialogue, DialogueError> {
        serde_json::from_str(text).map_err(|e| DialogueError::Malformed(e.to_string()))
    }
}

/// Node status: unmarked, marked non-fact, marked fact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Tag {
    #[serde(rename = "um")]
    Unmarked,
    #[serde(rename = "nf")]
    NonFact,
    #[serde(rename = "f")]
    Fact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    P,
    O,
}

impl Label {
    pub fn flip(self) -> Label {
        match self {
            Label::P => Label::O,
            Label::O => Label::P,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::P => "P",
            Label::O => "O",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Inference,
    Attack,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeEdge {
    pub edge: EdgeKind,
    pub node: TreeNode,
}

/// A dialogue-tree node `(formula, [tag, label, id])` with its children.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeNode {
    #[serde(with = "crate::argumentation::formula_str")]
    pub formula: Formula,
    pub tag: Tag,
    pub label: Label,
    #[serde(rename = "utteranceId")]
    pub utterance_id: u32,
    #[serde(default)]
    pub children: Vec<TreeEdge>,
}

impl TreeNode {
    fn new(formula: Formula, tag: Tag, label: Label, utterance_id: u32) -> Self {
        TreeNode {
            formula,
            tag,
            label,
            utterance_id,
            children: Vec::new(),
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(|c| c.node.size()).sum::<usize>()
    }
}

/// The tree drawn from a dialogue.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DialogueTree {
    pub root: TreeNode,
}

impl DialogueTree {
    pub fn node(&self, path: &[usize]) -> &TreeNode {
        let mut n = &self.root;
        for &i in path {
            n = &n.children[i].node;
        }
        n
    }

    fn node_mut(&mut self, path: &[usize]) -> &mut TreeNode {
        let mut n = &mut self.root;
        for &i in path {
            n = &mut n.children[i].node;
        }
        n
    }

    /// Paths of all nodes, in depth-first pre-order.
    pub fn paths(&self) -> Vec<NodePath> {
        let mut out = Vec::new();
        fn walk(n: &TreeNode, path: &mut NodePath, out: &mut Vec<NodePath>) {
            out.push(path.clone());
            for (i, c) in n.children.iter().enumerate() {
                path.push(i);
                walk(&c.node, path, out);
                path.pop();
            }
        }
        walk(&self.root, &mut Vec::new(), &mut out);
        out
    }

    /// Paths of nodes satisfying `pred`, in depth-first pre-order.
    pub fn find(&self, pred: impl Fn(&TreeNode) -> bool) -> Vec<NodePath> {
        self.paths().into_iter().filter(|p| pred(self.node(p))).collect()
    }

    /// The node and every inference descendant of it (its argument region).
    pub fn inference_region(&self, path: &[usize]) -> Vec<NodePath> {
        let mut out = vec![path.to_vec()];
        let mut i = 0;
        while i < out.len() {
            let p = out[i].clone();
            for (k, c) in self.node(&p).children.iter().enumerate() {
                if c.edge == EdgeKind::Inference {
                    let mut q = p.clone();
                    q.push(k);
                    out.push(q);
                }
            }
            i += 1;
        }
        out
    }

    pub fn size(&self) -> usize {
        self.root.size()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tree serialises")
    }

    pub fn from_json(text: &str) -> Result<DialogueTree, DialogueError> {
        serde_json::from_str(text).map_err(|e| DialogueError::Malformed(e.to_string()))
    }
}

/// Whether some non-synthetic ground rule derives `phi` from exactly `delta`
/// in one step.
pub(crate) fn one_step(eng: &Engine, delta: &FormulaSet, phi: &Formula) -> bool {
    find_rule(eng, delta, phi).is_some()
}

/// The ground rule deriving `phi` from exactly the premises `delta`.
pub(crate) fn find_rule<'e>(
    eng: &'e Engine,
    delta: &FormulaSet,
    phi: &Formula,
) -> Option<&'e crate::logic::engine::GroundRule> {
    let head = eng.id(phi)?;
    let mut want = Vec::with_capacity(delta.len());
    for f in delta {
        want.push(eng.id(f)?);
    }
    want.sort_unstable();
    eng.rules.iter().find(|r| {
        if r.synthetic || r.head != head {
            return false;
        }
        let mut got: Vec<usize> = r.prereqs().collect();
        got.sort_unstable();
        got.dedup();
        got == want
    })
}

/// Incrementally checks and applies utterances, maintaining the tree.
pub struct DialogueBuilder<'k> {
    kb: &'k KnowledgeBase,
    dialogue: Dialogue,
    contents: BTreeMap<u32, Content>,
    tree: Option<DialogueTree>,
}

impl<'k> DialogueBuilder<'k> {
    pub fn new(kb: &'k KnowledgeBase, label: impl Into<String>) -> Self {
        DialogueBuilder {
            kb,
            dialogue: Dialogue::new(label),
            contents: BTreeMap::new(),
            tree: None,
        }
    }

    pub fn dialogue(&self) -> &Dialogue {
        &self.dialogue
    }

    pub fn tree(&self) -> Option<&DialogueTree> {
        self.tree.as_ref()
    }

    pub fn next_id(&self) -> u32 {
        self.dialogue.utterances.last().map_or(1, |u| u.id + 1)
    }

    pub fn finish(self) -> Result<(Dialogue, DialogueTree), DialogueError> {
        match self.tree {
            Some(t) => Ok((self.dialogue, t)),
            None => Err(DialogueError::Malformed("empty dialogue".into())),
        }
    }

    /// Append an utterance with the next id; returns that id.
    pub fn say(&mut self, agent: Agent, target: u32, content: Content) -> Result<u32, DialogueError> {
        let id = self.next_id();
        self.push(Utterance {
            agent,
            target,
            id,
            content,
        })?;
        Ok(id)
    }

    /// Check `u` against the dialogue so far and apply it.
    pub fn push(&mut self, u: Utterance) -> Result<(), DialogueError> {
        let mut tree = self.check(&u)?;
        if let Some(t) = tree.take() {
            self.tree = Some(t);
        }
        self.contents.insert(u.id, u.content.clone());
        self.dialogue.utterances.push(u);
        Ok(())
    }

    /// Validate `u`; on success return the tree after applying it (or `None`
    /// when the tree is unchanged).
    fn check(&self, u: &Utterance) -> Result<Option<DialogueTree>, DialogueError> {
        let illegal = |reason: String| DialogueError::Illegal { id: u.id, reason };
        let Some(tree) = &self.tree else {
            return match (&u.content, u.target, u.id) {
                (Content::Claim { phi }, 0, 1) => Ok(Some(DialogueTree {
                    root: TreeNode::new(phi.clone(), Tag::Unmarked, Label::P, 1),
                })),
                _ => Err(DialogueError::BadOpening { id: u.id }),
            };
        };
        let prev = self.dialogue.utterances.last().map_or(0, |p| p.id);
        if u.id <= prev {
            return Err(DialogueError::NonIncreasingId { id: u.id, prev });
        }
        if u.target >= u.id {
            return Err(DialogueError::DanglingTarget {
                id: u.id,
                target: u.target,
            });
        }
        let Some(target) = self.contents.get(&u.target) else {
            return Err(DialogueError::DanglingTarget {
                id: u.id,
                target: u.target,
            });
        };
        let uttered = target.uttered();
        let kb = self.kb;
        match &u.content {
            Content::Claim { .. } => Err(illegal("a claim may only open the dialogue".into())),
            Content::Concede { .. } | Content::Pass => Ok(None),
            Content::Offer { delta, phi } => {
                let ok_target = match target {
                    Content::Claim { phi: p } => p == phi,
                    Content::Offer { delta: d, .. } => d.contains(phi),
                    Content::Contrary { delta: d, .. } => d.contains(phi),
                    _ => false,
                };
                if !ok_target {
                    return Err(illegal(format!("offer for {phi} does not answer {target}")));
                }
                if delta.contains(phi) || !one_step(kb.engine(), delta, phi) {
                    return Err(illegal(format!("{phi} is not one inference step from {}", render_set(delta))));
                }
                let mut t = tree.clone();
                let anchors = t.find(|n| &n.formula == phi && n.utterance_id == u.target);
                if anchors.is_empty() {
                    return Err(DialogueError::MissingTarget {
                        id: u.id,
                        reason: format!("no node ({phi}, {})", u.target),
                    });
                }
                for p in anchors {
                    let n = t.node_mut(&p);
                    n.tag = Tag::NonFact;
                    let label = n.label;
                    for b in delta {
                        let tag = if kb.is_member(b) { Tag::Fact } else { Tag::NonFact };
                        n.children.push(TreeEdge {
                            edge: EdgeKind::Inference,
                            node: TreeNode::new(b.clone(), tag, label, u.id),
                        });
                    }
                }
                Ok(Some(t))
            }
            Content::Fact { phi } => {
                if !matches!(target, Content::Claim { .. } | Content::Offer { .. } | Content::Contrary { .. }) {
                    return Err(illegal(format!("fact does not answer {target}")));
                }
                let ok_target = match target {
                    Content::Offer { delta, .. } | Content::Contrary { delta, .. } => delta.contains(phi),
                    _ => uttered.contains(phi),
                };
                if !ok_target {
                    return Err(illegal(format!("{phi} was not uttered by {target}")));
                }
                if !kb.is_member(phi) {
                    return Err(illegal(format!("{phi} is not in the knowledge base")));
                }
                let mut t = tree.clone();
                let anchors = t.find(|n| &n.formula == phi && n.utterance_id == u.target);
                if anchors.is_empty() {
                    return Err(DialogueError::MissingTarget {
                        id: u.id,
                        reason: format!("no node ({phi}, {})", u.target),
                    });
                }
                for p in anchors {
                    let n = t.node_mut(&p);
                    n.tag = Tag::Fact;
                    n.utterance_id = u.id;
                }
                Ok(Some(t))
            }
            Content::Contrary { delta, phi, against } => {
                if matches!(target, Content::Concede { .. } | Content::Pass) {
                    return Err(illegal(format!("contrary does not answer {target}")));
                }
                let attacked: FormulaSet = match (phi, against) {
                    (_, Some(a)) => a.clone(),
                    (Some(p), None) => FormulaSet::from([p.clone()]),
                    (None, None) => return Err(illegal("contrary names nothing to attack".into())),
                };
                let mut joint = delta.clone();
                joint.extend(attacked.iter().cloned());
                if is_consistent(kb, &joint) {
                    return Err(illegal(format!(
                        "{} is consistent with {}",
                        render_set(delta),
                        render_set(&attacked)
                    )));
                }
                if let Some(p) = phi {
                    if !uttered.contains(p) {
                        return Err(illegal(format!("{p} was not uttered by {target}")));
                    }
                }
                let mut t = tree.clone();
                let marked = |n: &TreeNode| n.tag != Tag::Unmarked;
                // Seeds: the nodes the target utterance placed (or the node
                // it extended, for the conclusion of an offer).
                let seeds: Vec<NodePath> = match phi {
                    Some(p) => {
                        let mut s = t.find(|n| &n.formula == p && n.utterance_id == u.target);
                        if let Content::Offer { phi: concl, .. } = target {
                            if concl == p {
                                for q in t.find(|n| n.utterance_id == u.target) {
                                    if let Some((_, parent)) = q.split_last() {
                                        if &t.node(parent).formula == p && !s.contains(&parent.to_vec()) {
                                            s.push(parent.to_vec());
                                        }
                                    }
                                }
                            }
                        }
                        s
                    }
                    None => t.find(|n| n.utterance_id == u.target),
                };
                let anchors: Vec<NodePath> = match against {
                    None => seeds.into_iter().filter(|p| marked(t.node(p))).collect(),
                    Some(a) => {
                        let mut out: Vec<NodePath> = Vec::new();
                        for s in &seeds {
                            for q in t.inference_region(s) {
                                let n = t.node(&q);
                                if a.contains(&n.formula) && marked(n) && !out.contains(&q) {
                                    out.push(q);
                                }
                            }
                        }
                        let found: FormulaSet = out.iter().map(|q| t.node(q).formula.clone()).collect();
                        if &found != a {
                            return Err(DialogueError::MissingTarget {
                                id: u.id,
                                reason: format!("not every formula of {} is on the tree there", render_set(a)),
                            });
                        }
                        out
                    }
                };
                if anchors.is_empty() {
                    return Err(DialogueError::MissingTarget {
                        id: u.id,
                        reason: format!("no marked node for {} from utterance {}", render_set(&attacked), u.target),
                    });
                }
                for p in anchors {
                    let n = t.node_mut(&p);
                    let label = n.label.flip();
                    for b in delta {
                        let tag = if kb.is_member(b) { Tag::Fact } else { Tag::NonFact };
                        n.children.push(TreeEdge {
                            edge: EdgeKind::Attack,
                            node: TreeNode::new(b.clone(), tag, label, u.id),
                        });
                    }
                }
                Ok(Some(t))
            }
        }
    }
}

/// Whether `u` is a legal next move after `prefix`; the error names the reason.
pub fn is_legal_move(kb: &KnowledgeBase, prefix: &[Utterance], u: &Utterance) -> Result<(), DialogueError> {
    let mut b = DialogueBuilder::new(kb, "");
    for p in prefix {
        b.push(p.clone())?;
    }
    b.check(u).map(|_| ())
}

/// The dialogue tree drawn from a dialogue, checking every move.
pub fn build_tree(kb: &KnowledgeBase, d: &Dialogue) -> Result<DialogueTree, DialogueError> {
    let mut b = DialogueBuilder::new(kb, d.kb.clone());
    for u in &d.utterances {
        b.push(u.clone())?;
    }
    b.finish().map(|(_, t)| t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_kb;

    #[test]
    fn labels_flip() {
        assert_eq!(Label::P.flip(), Label::O);
        assert_eq!(Label::O.flip().flip(), Label::O);
    }

    #[test]
    fn content_kinds_and_tree_effect() {
        assert_eq!(Content::Pass.kind(), "pass");
        assert!(!Content::Pass.extends_tree());
        let phi = Formula::parse("p(a)").unwrap();
        assert!(Content::Fact { phi: phi.clone() }.extends_tree());
        assert_eq!(Content::Claim { phi }.to_string(), "claim(p(a))");
    }

    #[test]
    fn builder_assigns_increasing_ids() {
        let kb = parse_kb("@mode datalog\nfact p(a).\nrule r1: p(X) -> q(X).\n").unwrap();
        let mut b = DialogueBuilder::new(&kb, "inline");
        let q = Formula::parse("q(a)").unwrap();
        let p = Formula::parse("p(a)").unwrap();
        assert_eq!(b.say(Agent::A1, 0, Content::Claim { phi: q.clone() }).unwrap(), 1);
        let offer = Content::Offer {
            delta: [p.clone()].into(),
            phi: q,
        };
        assert_eq!(b.say(Agent::A1, 1, offer).unwrap(), 2);
        assert_eq!(b.next_id(), 3);
        let (d, t) = b.finish().unwrap();
        assert_eq!(d.utterances.len(), 2);
        assert_eq!(t.size(), 2);
        assert_eq!(build_tree(&kb, &d).unwrap(), t);
    }
}
