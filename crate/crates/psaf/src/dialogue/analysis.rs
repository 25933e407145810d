//! Potential arguments, defence sets, focused subtrees and the success
//! predicates of dialogue trees.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use super::{find_rule, Content, Dialogue, DialogueTree, EdgeKind, Label, Tag, TreeEdge, TreeNode};
use crate::argumentation::{argument_from_tree, build_psaf, psaf_over, DerivationNode, Psaf};
use crate::error::PsafError;
use crate::logic::{is_consistent, Formula, FormulaSet, KnowledgeBase};
use crate::semantics::{enumerate_extensions, SemanticsKind};

/// Address of a node: child indices from the root.
pub type NodePath = Vec<usize>;

/// A same-label subtree of a dialogue tree that amounts to an argument:
/// rooted at the tree root or at an attack child, following exactly one
/// offer group below every non-fact node, with fact-tagged leaves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PotentialArgument {
    pub root: NodePath,
    pub nodes: Vec<NodePath>,
    pub label: Label,
    pub conclusion: Formula,
    /// Formulas of the fact-tagged leaves.
    pub support: FormulaSet,
    /// The corresponding derivation tree (tags and ids dropped).
    pub derivation: DerivationNode,
}

impl PotentialArgument {
    pub fn signature(&self) -> (FormulaSet, Formula) {
        (self.support.clone(), self.conclusion.clone())
    }
}

struct Expansion {
    nodes: Vec<NodePath>,
    support: FormulaSet,
    derivation: DerivationNode,
}

/// Inference children of a node grouped by utterance id, in order of appearance.
fn inference_groups(n: &TreeNode) -> Vec<(u32, Vec<usize>)> {
    let mut groups: Vec<(u32, Vec<usize>)> = Vec::new();
    for (i, c) in n.children.iter().enumerate() {
        if c.edge != EdgeKind::Inference {
            continue;
        }
        match groups.iter_mut().find(|(id, _)| *id == c.node.utterance_id) {
            Some((_, v)) => v.push(i),
            None => groups.push((c.node.utterance_id, vec![i])),
        }
    }
    groups
}

fn expand(kb: &KnowledgeBase, t: &DialogueTree, path: &NodePath) -> Vec<Expansion> {
    let n = t.node(path);
    let mut out = Vec::new();
    if n.tag == Tag::Fact {
        out.push(Expansion {
            nodes: vec![path.clone()],
            support: FormulaSet::from([n.formula.clone()]),
            derivation: DerivationNode::leaf(n.formula.clone()),
        });
    }
    if n.tag == Tag::Unmarked {
        return out;
    }
    let eng = kb.engine();
    for (_, kids) in inference_groups(n) {
        let delta: FormulaSet = kids.iter().map(|&i| n.children[i].node.formula.clone()).collect();
        let Some(rule) = find_rule(eng, &delta, &n.formula) else {
            continue;
        };
        // Cartesian product over the children's expansions.
        let mut partial: Vec<(Vec<NodePath>, FormulaSet, BTreeMap<Formula, DerivationNode>)> =
            vec![(vec![path.clone()], FormulaSet::new(), BTreeMap::new())];
        for &i in &kids {
            let mut cp = path.clone();
            cp.push(i);
            let sub = expand(kb, t, &cp);
            let mut next = Vec::new();
            for (nodes, sup, ders) in &partial {
                for e in &sub {
                    let mut nn = nodes.clone();
                    nn.extend(e.nodes.iter().cloned());
                    let mut ss = sup.clone();
                    ss.extend(e.support.iter().cloned());
                    let mut dd = ders.clone();
                    dd.insert(n.children[i].node.formula.clone(), e.derivation.clone());
                    next.push((nn, ss, dd));
                }
            }
            partial = next;
        }
        for (nodes, support, ders) in partial {
            let children: Vec<DerivationNode> = rule
                .prereqs()
                .map(|p| ders[&eng.formulas[p]].clone())
                .collect();
            out.push(Expansion {
                nodes,
                support,
                derivation: DerivationNode {
                    formula: n.formula.clone(),
                    justification: rule.justification(),
                    children,
                },
            });
        }
    }
    out
}

/// All potential arguments of a tree, by root in depth-first order.
pub fn extract_potential_arguments(kb: &KnowledgeBase, t: &DialogueTree) -> Vec<PotentialArgument> {
    let mut roots = vec![Vec::new()];
    for p in t.paths() {
        if let Some((&last, parent)) = p.split_last() {
            if t.node(parent).children[last].edge == EdgeKind::Attack {
                roots.push(p.clone());
            }
        }
    }
    let mut out = Vec::new();
    for r in roots {
        let n = t.node(&r);
        for e in expand(kb, t, &r) {
            out.push(PotentialArgument {
                root: r.clone(),
                nodes: e.nodes,
                label: n.label,
                conclusion: n.formula.clone(),
                support: e.support,
                derivation: e.derivation,
            });
        }
    }
    out
}

/// Shared per-tree analysis: potential arguments and who attacks whom.
pub(crate) struct Analysis {
    pub args: Vec<PotentialArgument>,
    /// Potential arguments rooted at each node.
    pub rooted: HashMap<NodePath, Vec<usize>>,
    /// For each potential argument, its attack groups: utterance id ->
    /// (child paths), collected over all of its nodes.
    pub groups: Vec<BTreeMap<u32, Vec<NodePath>>>,
    /// Whether the argument is attacked by a potential argument of the other side.
    pub countered: Vec<bool>,
}

impl Analysis {
    pub fn new(kb: &KnowledgeBase, t: &DialogueTree) -> Self {
        let args = extract_potential_arguments(kb, t);
        let mut rooted: HashMap<NodePath, Vec<usize>> = HashMap::new();
        for (i, a) in args.iter().enumerate() {
            rooted.entry(a.root.clone()).or_default().push(i);
        }
        let mut groups = Vec::with_capacity(args.len());
        let mut countered = Vec::with_capacity(args.len());
        for a in &args {
            let mut g: BTreeMap<u32, Vec<NodePath>> = BTreeMap::new();
            for p in &a.nodes {
                for (k, c) in t.node(p).children.iter().enumerate() {
                    if c.edge == EdgeKind::Attack {
                        let mut q = p.clone();
                        q.push(k);
                        g.entry(c.node.utterance_id).or_default().push(q);
                    }
                }
            }
            countered.push(g.values().flatten().any(|q| rooted.contains_key(q)));
            groups.push(g);
        }
        Analysis {
            args,
            rooted,
            groups,
            countered,
        }
    }

    pub fn of_label(&self, l: Label) -> impl Iterator<Item = usize> + '_ {
        (0..self.args.len()).filter(move |&i| self.args[i].label == l)
    }

    /// Potential arguments rooted at the nodes of one attack group.
    pub fn group_members(&self, paths: &[NodePath]) -> Vec<usize> {
        paths
            .iter()
            .flat_map(|p| self.rooted.get(p).cloned().unwrap_or_default())
            .collect()
    }

    pub fn defence_set(&self, t: &DialogueTree) -> FormulaSet {
        self.fact_formulas(t, self.of_label(Label::P))
    }

    pub fn culprits(&self, t: &DialogueTree) -> FormulaSet {
        self.fact_formulas(t, self.of_label(Label::O).filter(|&i| self.countered[i]))
    }

    fn fact_formulas(&self, t: &DialogueTree, which: impl Iterator<Item = usize>) -> FormulaSet {
        let mut out = FormulaSet::new();
        for i in which {
            for p in &self.args[i].nodes {
                let n = t.node(p);
                if n.tag == Tag::Fact {
                    out.insert(n.formula.clone());
                }
            }
        }
        out
    }

    pub fn is_focused(&self, t: &DialogueTree) -> bool {
        if inference_groups(&t.root).len() > 1 {
            return false;
        }
        self.of_label(Label::O).all(|i| {
            let ids: BTreeSet<u32> = self.groups[i].keys().copied().collect();
            ids.len() <= 1
        })
    }
}

/// Fact-tagged proponent nodes inside potential arguments.
pub fn defence_set(kb: &KnowledgeBase, t: &DialogueTree) -> FormulaSet {
    Analysis::new(kb, t).defence_set(t)
}

/// Fact-tagged opponent nodes inside potential arguments that the proponent attacks.
pub fn culprits(kb: &KnowledgeBase, t: &DialogueTree) -> FormulaSet {
    Analysis::new(kb, t).culprits(t)
}

/// Whether the root has a single offer group and every opponent argument is
/// answered by a single utterance.
pub fn is_focused(kb: &KnowledgeBase, t: &DialogueTree) -> bool {
    Analysis::new(kb, t).is_focused(t)
}

/// The success-relevant properties of a dialogue tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    pub focused: bool,
    pub patient: bool,
    pub last_word: bool,
    pub defensive: bool,
    /// No argument is both a proponent argument and an opponent argument the
    /// proponent attacks.
    pub non_redundant: bool,
    /// Same-label reading: no argument occurs twice with the same label.
    pub non_redundant_literal: bool,
    /// Both-labels reading: no argument occurs under both labels.
    pub non_redundant_strict: bool,
    /// Concrete trees are always finite; kept for symmetry with the success conditions.
    pub finite: bool,
    /// Defensive, non-redundant, and no opponent argument belongs to an
    /// admissible set of the knowledge base's framework.
    pub ideal: bool,
    /// As `ideal`, judged in the framework drawn from the tree itself.
    pub ideal_local: bool,
    pub defence_set: FormulaSet,
    pub culprits: FormulaSet,
}

/// Property check against the knowledge base's full framework.
pub fn check_properties(kb: &KnowledgeBase, t: &DialogueTree) -> Result<PropertyReport, PsafError> {
    let af = build_psaf(kb)?;
    Ok(check_properties_with(kb, &af, t))
}

/// Property check with a precomputed framework of `kb`.
pub fn check_properties_with(kb: &KnowledgeBase, af: &Psaf, t: &DialogueTree) -> PropertyReport {
    let an = Analysis::new(kb, t);
    property_report(kb, af, t, &an)
}

pub(crate) fn property_report(kb: &KnowledgeBase, af: &Psaf, t: &DialogueTree, an: &Analysis) -> PropertyReport {
    let focused = an.is_focused(t);
    let in_args: BTreeSet<&NodePath> = an.args.iter().flat_map(|a| a.nodes.iter()).collect();
    let paths = t.paths();
    let patient = paths
        .iter()
        .all(|p| t.node(p).tag != Tag::Fact || in_args.contains(p));
    let leaves_ok = paths
        .iter()
        .all(|p| !t.node(p).is_leaf() || t.node(p).tag == Tag::Fact);
    let o_nodes_ok = paths
        .iter()
        .all(|p| t.node(p).label != Label::O || in_args.contains(p));
    // Every opponent attack group has a member the proponent attacks.
    let groups_ok = an.of_label(Label::P).all(|i| {
        an.groups[i]
            .values()
            .all(|g| an.group_members(g).iter().any(|&m| an.countered[m]))
    });
    let last_word = focused && leaves_ok && o_nodes_ok && groups_ok;
    let de = an.defence_set(t);
    let cu = an.culprits(t);
    let defensive = last_word && is_consistent(kb, &de);

    let p_sigs: BTreeSet<_> = an.of_label(Label::P).map(|i| an.args[i].signature()).collect();
    let o_sigs: BTreeSet<_> = an.of_label(Label::O).map(|i| an.args[i].signature()).collect();
    let culprit_sigs: BTreeSet<_> = an
        .of_label(Label::O)
        .filter(|&i| an.countered[i])
        .map(|i| an.args[i].signature())
        .collect();
    let non_redundant = p_sigs.is_disjoint(&culprit_sigs);
    let non_redundant_strict = p_sigs.is_disjoint(&o_sigs);
    let non_redundant_literal = [Label::P, Label::O].iter().all(|&l| {
        let mut seen: BTreeMap<String, &NodePath> = BTreeMap::new();
        an.of_label(l).all(|i| {
            let a = &an.args[i];
            match seen.insert(a.derivation.render(), &a.root) {
                Some(prev) => prev == &a.root,
                None => true,
            }
        })
    });

    let o_in_preferred = |frame: &Psaf| -> bool {
        let exts = enumerate_extensions(frame, SemanticsKind::Preferred);
        o_sigs.iter().any(|(sup, con)| {
            frame
                .find(sup, con)
                .is_some_and(|ix| exts.iter().any(|e| e.contains(&ix)))
        })
    };
    let base = defensive && non_redundant;
    let ideal = base && !o_in_preferred(af);
    let ideal_local = base && !o_in_preferred(&psaf_from_tree(kb, t));
    PropertyReport {
        focused,
        patient,
        last_word,
        defensive,
        non_redundant,
        non_redundant_literal,
        non_redundant_strict,
        finite: true,
        ideal,
        ideal_local,
        defence_set: de,
        culprits: cu,
    }
}

/// The framework drawn from a tree: its potential arguments with the minimal
/// collective attacks among them.
pub fn psaf_from_tree(kb: &KnowledgeBase, t: &DialogueTree) -> Psaf {
    let args = extract_potential_arguments(kb, t)
        .into_iter()
        .filter_map(|a| argument_from_tree(kb, a.derivation).ok())
        .collect();
    psaf_over(kb, args)
}

/// A focused subtree with the sub-dialogue that builds it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FocusedSubtree {
    pub tree: DialogueTree,
    pub dialogue: Dialogue,
}

fn product(parts: Vec<Vec<TreeEdge>>) -> Vec<Vec<TreeEdge>> {
    let mut out: Vec<Vec<TreeEdge>> = vec![Vec::new()];
    for alts in parts {
        let mut next = Vec::with_capacity(out.len() * alts.len());
        for prefix in &out {
            for a in &alts {
                let mut v = prefix.clone();
                v.push(a.clone());
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// Utterance ids of proponent counter-attacks anywhere in the opponent
/// region (the node and its inference descendants).
fn counter_ids(n: &TreeNode, out: &mut BTreeSet<u32>) {
    for c in &n.children {
        match c.edge {
            EdgeKind::Attack => {
                out.insert(c.node.utterance_id);
            }
            EdgeKind::Inference => counter_ids(&c.node, out),
        }
    }
}

/// Alternatives for a node. `root_group` picks the root's offer group;
/// `counter` fixes the proponent's answer inside an opponent region.
fn variants(n: &TreeNode, root_group: Option<Option<u32>>, counter: Option<u32>) -> Vec<TreeNode> {
    let mut parts: Vec<Vec<TreeEdge>> = Vec::new();
    for c in &n.children {
        let keep = match (c.edge, n.label) {
            (EdgeKind::Inference, _) => match root_group {
                Some(Some(g)) => c.node.utterance_id == g,
                Some(None) => false,
                None => true,
            },
            (EdgeKind::Attack, Label::O) => counter.is_none_or(|k| c.node.utterance_id == k),
            (EdgeKind::Attack, Label::P) => true,
        };
        if !keep {
            continue;
        }
        let alts: Vec<TreeNode> = match (c.edge, c.node.label) {
            (EdgeKind::Inference, Label::O) => variants(&c.node, None, counter),
            (EdgeKind::Inference, Label::P) => variants(&c.node, None, None),
            (EdgeKind::Attack, Label::O) => {
                let mut ids = BTreeSet::new();
                counter_ids(&c.node, &mut ids);
                if ids.is_empty() {
                    variants(&c.node, None, None)
                } else {
                    ids.into_iter()
                        .flat_map(|k| variants(&c.node, None, Some(k)))
                        .collect()
                }
            }
            (EdgeKind::Attack, Label::P) => variants(&c.node, None, None),
        };
        parts.push(
            alts.into_iter()
                .map(|node| TreeEdge { edge: c.edge, node })
                .collect(),
        );
    }
    product(parts)
        .into_iter()
        .map(|children| TreeNode {
            formula: n.formula.clone(),
            tag: n.tag,
            label: n.label,
            utterance_id: n.utterance_id,
            children,
        })
        .collect()
}

fn collect_ids(n: &TreeNode, out: &mut BTreeSet<u32>) {
    out.insert(n.utterance_id);
    for c in &n.children {
        collect_ids(&c.node, out);
    }
}

/// The utterances that build `t`: those whose ids occur on it, the targets
/// they answer (transitively), and closing moves aimed at any of them.
fn sub_dialogue(d: &Dialogue, t: &DialogueTree) -> Dialogue {
    let mut ids = BTreeSet::new();
    collect_ids(&t.root, &mut ids);
    loop {
        let more: BTreeSet<u32> = ids
            .iter()
            .filter_map(|&i| d.utterance(i))
            .map(|u| u.target)
            .filter(|&tg| tg != 0 && !ids.contains(&tg))
            .collect();
        if more.is_empty() {
            break;
        }
        ids.extend(more);
    }
    let utterances = d
        .utterances
        .iter()
        .filter(|u| {
            ids.contains(&u.id)
                || (matches!(u.content, Content::Concede { .. } | Content::Pass) && ids.contains(&u.target))
        })
        .cloned()
        .collect();
    Dialogue {
        kb: d.kb.clone(),
        utterances,
    }
}

/// The maximal focused subtrees of `t` (which `d` draws), each with its
/// focused sub-dialogue.
pub fn focused_subtrees(kb: &KnowledgeBase, d: &Dialogue, t: &DialogueTree) -> Vec<FocusedSubtree> {
    let groups = inference_groups(&t.root);
    let choices: Vec<Option<Option<u32>>> = if groups.len() <= 1 {
        vec![None]
    } else {
        groups.iter().map(|(g, _)| Some(Some(*g))).collect()
    };
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for ch in choices {
        for root in variants(&t.root, ch, None) {
            let tree = DialogueTree { root };
            let key = tree.to_json();
            if !seen.insert(key) || !is_focused(kb, &tree) {
                continue;
            }
            let dialogue = sub_dialogue(d, &tree);
            out.push(FocusedSubtree { tree, dialogue });
        }
    }
    out
}
