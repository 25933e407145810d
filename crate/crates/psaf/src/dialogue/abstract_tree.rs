//! Argument-level dispute trees and their translation to and from concrete
//! dialogue trees.

use super::analysis::{property_report, Analysis};
use super::{Agent, Content, Dialogue, DialogueBuilder, DialogueTree, Label};
use crate::argumentation::{argument_from_tree, build_psaf, Argument, DerivationNode};
use crate::error::PsafError;
use crate::logic::{is_consistent, Formula, FormulaSet, KnowledgeBase};

/// A node of an abstract dialogue tree: an argument in a role. Children
/// sharing a `group` number form one collective attack on their parent.
#[derive(Debug, Clone, PartialEq)]
pub struct AbstractNode {
    pub argument: Argument,
    pub role: Label,
    pub group: usize,
    pub children: Vec<usize>,
}

/// An argument-level dispute tree; `nodes[0]` is the root.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AbstractDialogueTree {
    pub nodes: Vec<AbstractNode>,
}

impl AbstractDialogueTree {
    pub fn new(root: Argument) -> Self {
        AbstractDialogueTree {
            nodes: vec![AbstractNode {
                argument: root,
                role: Label::P,
                group: 0,
                children: Vec::new(),
            }],
        }
    }

    /// Add a child to `parent` in the opposite role; returns its index.
    pub fn add_child(&mut self, parent: usize, argument: Argument, group: usize) -> usize {
        let role = self.nodes[parent].role.flip();
        self.nodes.push(AbstractNode {
            argument,
            role,
            group,
            children: Vec::new(),
        });
        let ix = self.nodes.len() - 1;
        self.nodes[parent].children.push(ix);
        ix
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Children of `n` grouped by attack, in order of first appearance.
    pub fn attack_groups(&self, n: usize) -> Vec<Vec<usize>> {
        let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
        for &c in &self.nodes[n].children {
            let g = self.nodes[c].group;
            match groups.iter_mut().find(|(k, _)| *k == g) {
                Some((_, v)) => v.push(c),
                None => groups.push((g, vec![c])),
            }
        }
        groups.into_iter().map(|(_, v)| v).collect()
    }

    /// Union of the proponent arguments' supports.
    pub fn defence_set(&self) -> FormulaSet {
        self.nodes
            .iter()
            .filter(|n| n.role == Label::P)
            .flat_map(|n| n.argument.support.iter().cloned())
            .collect()
    }

    /// Union of the supports of opponent arguments that have proponent children.
    pub fn culprits(&self) -> FormulaSet {
        self.nodes
            .iter()
            .filter(|n| n.role == Label::O && !n.children.is_empty())
            .flat_map(|n| n.argument.support.iter().cloned())
            .collect()
    }
}

/// The abstract tree of a defensive, non-redundant focused dialogue tree:
/// one node per potential argument, roles preserved.
pub fn to_abstract(kb: &KnowledgeBase, t: &DialogueTree) -> Result<AbstractDialogueTree, PsafError> {
    let af = build_psaf(kb)?;
    let an = Analysis::new(kb, t);
    let report = property_report(kb, &af, t, &an);
    if !(report.defensive && report.non_redundant) {
        return Err(PsafError::Precondition(
            "to_abstract needs a defensive, non-redundant focused tree".into(),
        ));
    }
    let Some(&root) = an.rooted.get(&Vec::new()).and_then(|v| v.first()) else {
        return Err(PsafError::Precondition("the root is not an argument".into()));
    };
    let mut at = AbstractDialogueTree::new(argument_from_tree(kb, an.args[root].derivation.clone())?);
    let mut stack = vec![(root, 0usize)];
    while let Some((pa, node)) = stack.pop() {
        for (gid, paths) in &an.groups[pa] {
            let mut seen = Vec::new();
            for m in an.group_members(paths) {
                let sig = an.args[m].signature();
                if seen.contains(&sig) {
                    continue;
                }
                seen.push(sig);
                let arg = argument_from_tree(kb, an.args[m].derivation.clone())?;
                let child = at.add_child(node, arg, *gid as usize);
                stack.push((m, child));
            }
        }
    }
    Ok(at)
}

/// Where an argument sits in the dialogue tree being built.
struct Placement {
    /// Id carried by the argument's root node.
    root_id: u32,
    /// For a tree root with an offer group: that offer's id.
    offer_id: Option<u32>,
}

struct Emitter<'k> {
    kb: &'k KnowledgeBase,
    b: DialogueBuilder<'k>,
    forest: bool,
}

fn agent_for(role: Label) -> Agent {
    match role {
        Label::P => Agent::A1,
        Label::O => Agent::A2,
    }
}

fn derivation_formulas(d: &DerivationNode, out: &mut FormulaSet) {
    out.insert(d.formula.clone());
    for c in &d.children {
        derivation_formulas(c, out);
    }
}

/// Smallest (then canonically first) subset `T` of `pool` with `delta ∪ T` inconsistent.
fn minimal_against(kb: &KnowledgeBase, delta: &FormulaSet, pool: &FormulaSet) -> Option<FormulaSet> {
    let items: Vec<&Formula> = pool.iter().collect();
    let n = items.len();
    if n > 16 {
        let mut all = delta.clone();
        all.extend(pool.iter().cloned());
        return (!is_consistent(kb, &all)).then(|| pool.clone());
    }
    let mut masks: Vec<u32> = (1..(1u32 << n)).collect();
    masks.sort_by_key(|m| (m.count_ones(), m.reverse_bits()));
    masks.into_iter().find_map(|m| {
        let t: FormulaSet = (0..n).filter(|i| m & (1 << i) != 0).map(|i| items[i].clone()).collect();
        let mut all = delta.clone();
        all.extend(t.iter().cloned());
        (!is_consistent(kb, &all)).then_some(t)
    })
}

fn err(e: crate::error::DialogueError) -> PsafError {
    PsafError::Precondition(e.to_string())
}

impl Emitter<'_> {
    /// Utter the support of a derivation whose conclusion sits on a node
    /// carrying `anchor_id`. Returns the id the root node carries afterwards.
    fn support(&mut self, d: &DerivationNode, anchor_id: u32, role: Label, unmarked: bool) -> Result<Placement, PsafError> {
        let agent = agent_for(role);
        if d.is_leaf() {
            if unmarked {
                let id = self
                    .b
                    .say(agent, anchor_id, Content::Fact { phi: d.formula.clone() })
                    .map_err(err)?;
                return Ok(Placement {
                    root_id: id,
                    offer_id: None,
                });
            }
            return Ok(Placement {
                root_id: anchor_id,
                offer_id: None,
            });
        }
        let delta: FormulaSet = d.children.iter().map(|c| c.formula.clone()).collect();
        let m = self
            .b
            .say(
                agent,
                anchor_id,
                Content::Offer {
                    delta,
                    phi: d.formula.clone(),
                },
            )
            .map_err(err)?;
        for c in &d.children {
            if !c.is_leaf() {
                self.support(c, m, role, false)?;
            }
        }
        Ok(Placement {
            root_id: anchor_id,
            offer_id: Some(m),
        })
    }

    fn attacks(&mut self, at: &AbstractDialogueTree, n: usize, place: &Placement, tree_root: bool) -> Result<(), PsafError> {
        let node = &at.nodes[n];
        let concl = node.argument.conclusion.clone();
        let mut region = FormulaSet::new();
        derivation_formulas(&node.argument.tree, &mut region);
        let role = node.role.flip();
        let agent = agent_for(role);
        for group in at.attack_groups(n) {
            let delta: FormulaSet = group.iter().map(|&c| at.nodes[c].argument.conclusion.clone()).collect();
            let content = match place.offer_id {
                Some(offer) if tree_root && self.forest => {
                    let mut pool = region.clone();
                    pool.remove(&concl);
                    let t = minimal_against(self.kb, &delta, &pool)
                        .ok_or_else(|| PsafError::Precondition(format!("no attack point for {}", node.argument)))?;
                    (offer, Content::Contrary { delta: delta.clone(), phi: None, against: Some(t) })
                }
                _ => {
                    let mut rebut = delta.clone();
                    rebut.insert(concl.clone());
                    if !is_consistent(self.kb, &rebut) {
                        (place.root_id, Content::Contrary { delta: delta.clone(), phi: Some(concl.clone()), against: None })
                    } else {
                        let t = minimal_against(self.kb, &delta, &region)
                            .ok_or_else(|| PsafError::Precondition(format!("no attack point for {}", node.argument)))?;
                        (place.root_id, Content::Contrary { delta: delta.clone(), phi: Some(concl.clone()), against: Some(t) })
                    }
                }
            };
            let k = self.b.say(agent, content.0, content.1).map_err(err)?;
            for &c in &group {
                let sub = self.support(&at.nodes[c].argument.tree.clone(), k, role, false)?;
                self.attacks(at, c, &sub, false)?;
            }
        }
        Ok(())
    }
}

/// A dialogue realising an abstract tree: the claim, depth-first offer
/// groups for each support, one contrary utterance per collective attack,
/// and a closing concession by the opponent.
pub fn from_abstract(kb: &KnowledgeBase, at: &AbstractDialogueTree) -> Result<(Dialogue, DialogueTree), PsafError> {
    from_abstract_forest(kb, "", std::slice::from_ref(at))
}

/// As [`from_abstract`], for several trees sharing the root claim. Each tree
/// becomes its own offer group below the root, and attacks on the root
/// arguments are placed inside their own group so the trees stay apart.
pub fn from_abstract_forest(
    kb: &KnowledgeBase,
    label: &str,
    trees: &[AbstractDialogueTree],
) -> Result<(Dialogue, DialogueTree), PsafError> {
    emit(kb, label, trees, true)
}

/// Emit the dialogue for `trees`. When `strict`, every opponent attack must be
/// answered and the opponent concedes at the end; otherwise the dialogue is
/// left open.
pub(crate) fn emit(
    kb: &KnowledgeBase,
    label: &str,
    trees: &[AbstractDialogueTree],
    strict: bool,
) -> Result<(Dialogue, DialogueTree), PsafError> {
    let Some(first) = trees.first().and_then(|t| t.nodes.first()) else {
        return Err(PsafError::Precondition("no abstract tree given".into()));
    };
    let phi = first.argument.conclusion.clone();
    for at in trees {
        if at.nodes.first().map(|n| &n.argument.conclusion) != Some(&phi) {
            return Err(PsafError::Precondition("abstract trees argue for different claims".into()));
        }
        let unanswered = (0..at.len())
            .filter(|&n| at.nodes[n].role == Label::P)
            .flat_map(|n| at.attack_groups(n))
            .any(|g| g.iter().all(|&m| at.nodes[m].children.is_empty()));
        if strict && unanswered {
            return Err(PsafError::Precondition("an opponent attack is left unanswered".into()));
        }
        if !is_consistent(kb, &at.defence_set()) {
            return Err(PsafError::Precondition("the proponent's arguments are jointly inconsistent".into()));
        }
    }
    let forest = trees.len() > 1;
    if forest && trees.iter().any(|t| t.nodes[0].argument.tree.is_leaf()) {
        return Err(PsafError::Precondition(
            "a fact argument cannot share the claim with other arguments".into(),
        ));
    }
    let mut em = Emitter {
        kb,
        b: DialogueBuilder::new(kb, label),
        forest,
    };
    em.b
        .say(Agent::A1, 0, Content::Claim { phi: phi.clone() })
        .map_err(err)?;
    for at in trees {
        let place = em.support(&at.nodes[0].argument.tree, 1, Label::P, true)?;
        em.attacks(at, 0, &place, true)?;
    }
    if strict {
        em.b.say(Agent::A2, 1, Content::Concede { phi }).map_err(err)?;
    }
    em.b.finish().map_err(err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_kb;

    fn set(items: &[&str]) -> FormulaSet {
        items.iter().map(|s| Formula::parse(s).unwrap()).collect()
    }

    #[test]
    fn minimal_against_picks_the_smallest_subset() {
        let kb = parse_kb("@mode datalog\nfact a(x).\nfact b(x).\nfact c(x).\nconstraint c1: a(X), b(X) -> !.\n").unwrap();
        let got = minimal_against(&kb, &set(&["a(x)"]), &set(&["b(x)", "c(x)"]));
        assert_eq!(got, Some(set(&["b(x)"])));
        assert_eq!(minimal_against(&kb, &set(&["a(x)"]), &set(&["c(x)"])), None);
    }

    #[test]
    fn attack_groups_follow_first_appearance() {
        let kb = parse_kb("@mode datalog\nfact a(x).\nfact b(x).\nfact c(x).\n").unwrap();
        let args = crate::argumentation::enumerate_arguments(&kb).unwrap();
        let mut at = AbstractDialogueTree::new(args[0].clone());
        let x = at.add_child(0, args[1].clone(), 7);
        at.add_child(0, args[2].clone(), 3);
        at.add_child(0, args[1].clone(), 7);
        assert_eq!(at.nodes[x].role, Label::O);
        assert_eq!(at.attack_groups(0), vec![vec![1, 3], vec![2]]);
        assert_eq!(at.defence_set(), set(&["a(x)"]));
        assert!(at.culprits().is_empty());
    }

    #[test]
    fn unanswered_attack_is_rejected() {
        let kb = parse_kb("@mode datalog\nfact a(x).\nfact b(x).\nconstraint c1: a(X), b(X) -> !.\n").unwrap();
        let args = crate::argumentation::enumerate_arguments(&kb).unwrap();
        let mut at = AbstractDialogueTree::new(args[0].clone());
        at.add_child(0, args[1].clone(), 1);
        assert!(from_abstract(&kb, &at).is_err());
        assert!(emit(&kb, "", std::slice::from_ref(&at), false).is_ok());
    }
}
