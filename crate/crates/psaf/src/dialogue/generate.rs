//! Building winning dialogues from extensions, and deciding which kind of
//! success a dialogue achieves.

use std::collections::BTreeSet;

use serde::Serialize;

use super::abstract_tree::emit;
use super::analysis::{focused_subtrees, property_report, Analysis};
use super::{Agent, Content, Dialogue, DialogueBuilder, DialogueTree, Label};
use crate::argumentation::{build_psaf, Psaf};
use crate::error::PsafError;
use crate::logic::{Formula, FormulaSet, KnowledgeBase};
use crate::semantics::{accepted, attack_table, enumerate_extensions, AcceptanceMode, Extension, SemanticsKind};

use super::{AbstractDialogueTree, NodePath};

/// An objection paired with the counter chosen for it: `(attackers, counter, its attackers)`.
type Pick = (BTreeSet<usize>, usize, BTreeSet<usize>);

/// Upper bound on the nodes of a generated argument-level tree.
const MAX_NODES: usize = 20_000;

/// One successful focused subtree and what it establishes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    /// `credulous`, `grounded` or `sceptical`.
    pub kind: String,
    pub defence_set: FormulaSet,
    pub culprits: FormulaSet,
    pub tree: DialogueTree,
}

/// Which kinds of success a dialogue achieves.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub credulous: bool,
    pub grounded: bool,
    pub sceptical: bool,
    pub certificates: Vec<Certificate>,
}

impl Classification {
    pub fn successful_for(&self, mode: AcceptanceMode) -> bool {
        match mode {
            AcceptanceMode::Credulous(_) => self.credulous,
            AcceptanceMode::Grounded => self.grounded,
            AcceptanceMode::Sceptical(SemanticsKind::Admissible) => false,
            AcceptanceMode::Sceptical(SemanticsKind::Complete | SemanticsKind::Grounded) => self.grounded,
            AcceptanceMode::Sceptical(SemanticsKind::Preferred | SemanticsKind::Stable) => self.sceptical,
        }
    }

    /// The strongest kind of success achieved.
    pub fn strongest(&self) -> Option<&'static str> {
        if self.grounded {
            Some("grounded")
        } else if self.sceptical {
            Some("sceptical")
        } else if self.credulous {
            Some("credulous")
        } else {
            None
        }
    }
}

/// A generated dialogue with its tree and classification.
#[derive(Debug, Clone)]
pub struct Generated {
    pub dialogue: Dialogue,
    pub tree: DialogueTree,
    pub classification: Classification,
}

/// Attacking sets per argument, restricted to sets of consistent arguments:
/// the only ones that can be uttered and answered in a dialogue.
fn live_attacks(af: &Psaf) -> Vec<Vec<BTreeSet<usize>>> {
    af.attackers_of()
        .into_iter()
        .map(|sets| {
            sets.into_iter()
                .filter(|x| x.iter().all(|&b| af.arguments[b].consistent))
                .collect()
        })
        .collect()
}

/// The premises an attacking set rests on. Attacks with the same premises
/// raise the same objection, so only one of them needs answering.
fn premises(af: &Psaf, x: &BTreeSet<usize>) -> FormulaSet {
    x.iter()
        .flat_map(|&i| af.arguments[i].support.iter().cloned())
        .collect()
}

/// One attacking set per objection: the first class member in order of
/// size, then canonical order, for which `usable` holds.
fn objections<'x>(
    af: &Psaf,
    sets: &'x [BTreeSet<usize>],
    mut usable: impl FnMut(&BTreeSet<usize>) -> bool,
) -> Vec<(FormulaSet, Option<&'x BTreeSet<usize>>)> {
    let mut classes: Vec<(FormulaSet, Vec<&BTreeSet<usize>>)> = Vec::new();
    for x in sets {
        let k = premises(af, x);
        match classes.iter_mut().find(|(c, _)| *c == k) {
            Some((_, v)) => v.push(x),
            None => classes.push((k, vec![x])),
        }
    }
    classes
        .into_iter()
        .map(|(k, mut v)| {
            v.sort_by_key(|x| x.len());
            let pick = v.into_iter().find(|x| usable(x));
            (k, pick)
        })
        .collect()
}

/// The round at which each argument enters the grounded extension.
fn grounded_ranks(af: &Psaf) -> Vec<Option<usize>> {
    let table = attack_table(af);
    let mut rank = vec![None; af.len()];
    let mut s = Extension::new();
    for round in 1.. {
        let next: Extension = (0..af.len())
            .filter(|&a| {
                table[a].iter().all(|x| {
                    x.iter()
                        .any(|&b| table[b].iter().any(|y| y.iter().all(|c| s.contains(c))))
                })
            })
            .collect();
        if next == s {
            break;
        }
        for &a in &next {
            rank[a].get_or_insert(round);
        }
        s = next;
    }
    rank
}

/// Proponent argument with its attack groups.
#[derive(Debug, Clone, PartialEq)]
struct PNode {
    arg: usize,
    groups: Vec<OGroup>,
}

#[derive(Debug, Clone, PartialEq)]
struct OGroup {
    set: BTreeSet<usize>,
    members: Vec<ONode>,
}

/// Opponent argument with alternative proponent answers.
#[derive(Debug, Clone, PartialEq)]
struct ONode {
    arg: usize,
    counters: Vec<Vec<PNode>>,
}

enum Strategy<'a> {
    /// Counters drawn from an admissible set; an objection already raised
    /// somewhere in the tree is not raised again.
    Admissible(&'a Extension),
    /// Counters of strictly lower grounded rank.
    Grounded(&'a [Option<usize>]),
}

struct Grower<'a> {
    af: &'a Psaf,
    attacks: Vec<Vec<BTreeSet<usize>>>,
    strategy: Strategy<'a>,
    nodes: usize,
    /// Objections raised so far.
    raised: Vec<FormulaSet>,
}

impl Grower<'_> {
    fn counter(&self, x: &BTreeSet<usize>, target: usize) -> Option<(usize, BTreeSet<usize>)> {
        self.af.attacks.iter().find_map(|at| {
            if !x.contains(&at.target) || !self.attacks[at.target].contains(&at.attackers) {
                return None;
            }
            let ok = match &self.strategy {
                Strategy::Admissible(e) => at.attackers.is_subset(e),
                Strategy::Grounded(rank) => {
                    let r = rank[target];
                    at.attackers
                        .iter()
                        .all(|&c| matches!((rank[c], r), (Some(rc), Some(r)) if rc < r))
                }
            };
            ok.then(|| (at.target, at.attackers.clone()))
        })
    }

    fn grow(&mut self, arg: usize) -> Result<PNode, PsafError> {
        let cut = matches!(self.strategy, Strategy::Admissible(_));
        let mut node = PNode {
            arg,
            groups: Vec::new(),
        };
        let sets = self.attacks[arg].clone();
        let picks: Vec<(FormulaSet, Option<Pick>)> =
            objections(self.af, &sets, |x| self.counter(x, arg).is_some())
                .into_iter()
                .map(|(k, x)| (k, x.map(|x| {
                    let (b, y) = self.counter(x, arg).expect("usable");
                    (x.clone(), b, y)
                })))
                .collect();
        for (key, pick) in picks {
            if cut && self.raised.contains(&key) {
                continue;
            }
            let (x, b, y) = pick.ok_or_else(|| {
                PsafError::Precondition(format!("no counter-attack for an attack on {}", self.af.arguments[arg]))
            })?;
            self.nodes += x.len() + y.len();
            if self.nodes > MAX_NODES {
                return Err(PsafError::Precondition(format!(
                    "dialogue would exceed {MAX_NODES} arguments"
                )));
            }
            self.raised.push(key);
            let mut members = Vec::new();
            for &m in &x {
                let mut counters = Vec::new();
                if m == b {
                    let mut answer = Vec::new();
                    for &c in &y {
                        answer.push(self.grow(c)?);
                    }
                    counters.push(answer);
                }
                members.push(ONode { arg: m, counters });
            }
            node.groups.push(OGroup { set: x, members });
        }
        Ok(node)
    }
}

fn merge(into: &mut PNode, other: PNode) {
    for g in other.groups {
        match into.groups.iter_mut().find(|h| h.set == g.set) {
            None => into.groups.push(g),
            Some(h) => {
                for (dst, src) in h.members.iter_mut().zip(g.members) {
                    for alt in src.counters {
                        if !dst.counters.contains(&alt) {
                            dst.counters.push(alt);
                        }
                    }
                }
            }
        }
    }
}

fn flatten(af: &Psaf, root: &PNode) -> AbstractDialogueTree {
    fn p(af: &Psaf, at: &mut AbstractDialogueTree, ix: usize, n: &PNode, next: &mut usize) {
        for g in &n.groups {
            *next += 1;
            let gid = *next;
            for m in &g.members {
                let o = at.add_child(ix, af.arguments[m.arg].clone(), gid);
                for alt in &m.counters {
                    *next += 1;
                    let cid = *next;
                    for c in alt {
                        let k = at.add_child(o, af.arguments[c.arg].clone(), cid);
                        p(af, at, k, c, next);
                    }
                }
            }
        }
    }
    let mut at = AbstractDialogueTree::new(af.arguments[root.arg].clone());
    let mut next = 0;
    p(af, &mut at, 0, root, &mut next);
    at
}

/// Arguments for `phi` inside `e`, fact arguments first.
fn arguments_for(af: &Psaf, phi: &Formula, e: &Extension) -> Vec<usize> {
    let mut v: Vec<usize> = e
        .iter()
        .copied()
        .filter(|&i| &af.arguments[i].conclusion == phi)
        .collect();
    v.sort_by_key(|&i| (!af.arguments[i].tree.is_leaf(), i));
    v
}

fn credulous_tree(af: &Psaf, e: &Extension, root: usize) -> Result<PNode, PsafError> {
    let mut g = Grower {
        af,
        attacks: live_attacks(af),
        strategy: Strategy::Admissible(e),
        nodes: 0,
        raised: Vec::new(),
    };
    g.grow(root)
}

fn grounded_tree(af: &Psaf, rank: &[Option<usize>], root: usize) -> Result<PNode, PsafError> {
    let mut g = Grower {
        af,
        attacks: live_attacks(af),
        strategy: Strategy::Grounded(rank),
        nodes: 0,
        raised: Vec::new(),
    };
    g.grow(root)
}

/// Trees per root argument, merged where roots coincide.
fn forest(af: &Psaf, trees: Vec<PNode>) -> Vec<AbstractDialogueTree> {
    let mut merged: Vec<PNode> = Vec::new();
    for t in trees {
        match merged.iter_mut().find(|m| m.arg == t.arg) {
            Some(m) => merge(m, t),
            None => merged.push(t),
        }
    }
    merged.iter().map(|t| flatten(af, t)).collect()
}

fn abstract_trees(af: &Psaf, phi: &Formula, mode: AcceptanceMode) -> Result<Option<Vec<AbstractDialogueTree>>, PsafError> {
    let acc = accepted(af, phi, mode);
    if !acc.accepted {
        return Ok(None);
    }
    let grounded = |af: &Psaf| -> Result<Option<Vec<AbstractDialogueTree>>, PsafError> {
        let rank = grounded_ranks(af);
        let g: Extension = (0..af.len()).filter(|&i| rank[i].is_some()).collect();
        let Some(&root) = arguments_for(af, phi, &g).first() else {
            return Ok(None);
        };
        Ok(Some(vec![flatten(af, &grounded_tree(af, &rank, root)?)]))
    };
    match mode {
        AcceptanceMode::Credulous(_) => {
            let e = &acc.witnesses[0];
            let root = arguments_for(af, phi, e)[0];
            Ok(Some(vec![flatten(af, &credulous_tree(af, e, root)?)]))
        }
        AcceptanceMode::Grounded
        | AcceptanceMode::Sceptical(SemanticsKind::Complete | SemanticsKind::Grounded) => grounded(af),
        AcceptanceMode::Sceptical(SemanticsKind::Admissible) => Ok(None),
        AcceptanceMode::Sceptical(_) => {
            if let Some(t) = grounded(af)? {
                return Ok(Some(t));
            }
            let exts = &acc.witnesses;
            if exts.is_empty() {
                return Ok(None);
            }
            let candidates: Vec<Vec<usize>> = exts.iter().map(|e| arguments_for(af, phi, e)).collect();
            let common = candidates[0]
                .iter()
                .copied()
                .find(|a| candidates.iter().all(|c| c.contains(a)));
            let mut trees = Vec::new();
            for (e, cands) in exts.iter().zip(&candidates) {
                let root = match common {
                    Some(a) => a,
                    // Keep fact and derived arguments apart at the root.
                    None => cands
                        .iter()
                        .copied()
                        .find(|&a| !af.arguments[a].tree.is_leaf())
                        .unwrap_or(cands[0]),
                };
                trees.push(credulous_tree(af, e, root)?);
            }
            Ok(Some(forest(af, trees)))
        }
    }
}

/// A dialogue whose tree is successful for `mode`, or `None` when `phi` is
/// not accepted that way.
pub fn generate_dialogue(kb: &KnowledgeBase, phi: &Formula, mode: AcceptanceMode) -> Result<Option<Generated>, PsafError> {
    let af = build_psaf(kb)?;
    generate_with(kb, &af, phi, mode)
}

pub(crate) fn generate_with(
    kb: &KnowledgeBase,
    af: &Psaf,
    phi: &Formula,
    mode: AcceptanceMode,
) -> Result<Option<Generated>, PsafError> {
    let Some(trees) = abstract_trees(af, phi, mode)? else {
        return Ok(None);
    };
    let (dialogue, tree) = emit(kb, "", &trees, true)?;
    let classification = classify_with(kb, af, &dialogue, &tree);
    Ok(Some(Generated {
        dialogue,
        tree,
        classification,
    }))
}

/// The best dialogue the proponent can put up: a successful one when `phi`
/// is accepted under `mode`; otherwise a credulous defence if one exists;
/// otherwise an argument left facing its first attack; otherwise the bare
/// claim.
pub fn attempt_dialogue(kb: &KnowledgeBase, phi: &Formula, mode: AcceptanceMode) -> Result<Generated, PsafError> {
    let af = build_psaf(kb)?;
    if let Some(g) = generate_with(kb, &af, phi, mode)? {
        return Ok(g);
    }
    let cred = AcceptanceMode::Credulous(SemanticsKind::Preferred);
    if !matches!(mode, AcceptanceMode::Credulous(_)) {
        if let Some(g) = generate_with(kb, &af, phi, cred)? {
            return Ok(g);
        }
    }
    let (dialogue, tree) = match (0..af.len()).find(|&i| &af.arguments[i].conclusion == phi && af.arguments[i].consistent) {
        Some(a) => {
            let mut at = AbstractDialogueTree::new(af.arguments[a].clone());
            if let Some(x) = live_attacks(&af)[a].first() {
                for &b in x {
                    at.add_child(0, af.arguments[b].clone(), 1);
                }
            }
            emit(kb, "", &[at], false)?
        }
        None => {
            let mut b = DialogueBuilder::new(kb, "");
            b.say(Agent::A1, 0, Content::Claim { phi: phi.clone() })
                .map_err(|e| PsafError::Precondition(e.to_string()))?;
            b.finish().map_err(|e| PsafError::Precondition(e.to_string()))?
        }
    };
    let classification = classify_with(kb, &af, &dialogue, &tree);
    Ok(Generated {
        dialogue,
        tree,
        classification,
    })
}

/// Decide which kinds of success the tree `t` drawn by `d` achieves.
pub fn classify_success(kb: &KnowledgeBase, d: &Dialogue, t: &DialogueTree) -> Result<Classification, PsafError> {
    let af = build_psaf(kb)?;
    Ok(classify_with(kb, &af, d, t))
}

struct SubtreeVerdict {
    credulous: bool,
    grounded: bool,
    /// Attacking sets the opponent raised.
    raised: Vec<BTreeSet<usize>>,
}

fn judge(kb: &KnowledgeBase, af: &Psaf, attacks: &[Vec<BTreeSet<usize>>], t: &DialogueTree) -> (SubtreeVerdict, FormulaSet, FormulaSet) {
    let an = Analysis::new(kb, t);
    let report = property_report(kb, af, t, &an);
    let idx: Vec<Option<usize>> = an
        .args
        .iter()
        .map(|a| af.find(&a.support, &a.conclusion))
        .collect();
    let argset = |paths: &[NodePath]| -> BTreeSet<usize> {
        an.group_members(paths).into_iter().filter_map(|m| idx[m]).collect()
    };
    // Objections raised per proponent argument and across the tree. A group
    // only counts when its arguments form an attacking set of the target.
    let mut raised_anywhere: BTreeSet<FormulaSet> = BTreeSet::new();
    let mut raised_by: Vec<Vec<FormulaSet>> = vec![Vec::new(); an.args.len()];
    for i in an.of_label(Label::P) {
        let Some(a) = idx[i] else { continue };
        for paths in an.groups[i].values() {
            let set = argset(paths);
            if !attacks[a].contains(&set) {
                continue;
            }
            let key = premises(af, &set);
            raised_anywhere.insert(key.clone());
            raised_by[i].push(key);
        }
    }
    let answered = |paths: &[NodePath]| {
        an.group_members(paths).into_iter().any(|m| {
            idx[m].is_some_and(|b| an.groups[m].values().any(|g| attacks[b].contains(&argset(g))))
        })
    };
    let exhaustive = |cut: bool| {
        an.of_label(Label::P).all(|i| {
            let Some(a) = idx[i] else { return false };
            attacks[a].iter().all(|x| {
                let k = premises(af, x);
                raised_by[i].contains(&k) || (cut && raised_anywhere.contains(&k))
            }) && an.groups[i].values().all(|g| answered(g))
        })
    };
    let rooted = an
        .rooted
        .get(&Vec::new())
        .is_some_and(|v| v.iter().any(|&i| an.args[i].label == Label::P));
    let credulous = rooted && report.defensive && report.non_redundant && exhaustive(true);
    let grounded = rooted && report.defensive && exhaustive(false);
    let raised = an
        .of_label(Label::P)
        .flat_map(|i| an.groups[i].values().map(|g| argset(g)).collect::<Vec<_>>())
        .collect();
    (
        SubtreeVerdict {
            credulous,
            grounded,
            raised,
        },
        report.defence_set,
        report.culprits,
    )
}

pub(crate) fn classify_with(kb: &KnowledgeBase, af: &Psaf, d: &Dialogue, t: &DialogueTree) -> Classification {
    let attacks = live_attacks(af);
    let mut out = Classification::default();
    let mut cred_raised = Vec::new();
    for sub in focused_subtrees(kb, d, t) {
        let (v, de, cu) = judge(kb, af, &attacks, &sub.tree);
        for (ok, kind) in [(v.credulous, "credulous"), (v.grounded, "grounded")] {
            if ok {
                out.certificates.push(Certificate {
                    kind: kind.into(),
                    defence_set: de.clone(),
                    culprits: cu.clone(),
                    tree: sub.tree.clone(),
                });
            }
        }
        out.credulous |= v.credulous;
        out.grounded |= v.grounded;
        if v.credulous {
            cred_raised.push(v.raised);
        }
    }
    if !cred_raised.is_empty() {
        let exts = enumerate_extensions(af, SemanticsKind::Preferred);
        out.sceptical = exts
            .iter()
            .all(|e| cred_raised.iter().any(|rs| rs.iter().all(|r| !r.is_subset(e))));
        if out.sceptical {
            out.certificates.push(Certificate {
                kind: "sceptical".into(),
                defence_set: FormulaSet::new(),
                culprits: FormulaSet::new(),
                tree: t.clone(),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_kb;

    #[test]
    fn classification_maps_modes() {
        let c = Classification {
            credulous: true,
            grounded: false,
            sceptical: true,
            certificates: Vec::new(),
        };
        assert!(c.successful_for(AcceptanceMode::Credulous(SemanticsKind::Admissible)));
        assert!(c.successful_for(AcceptanceMode::Sceptical(SemanticsKind::Stable)));
        assert!(!c.successful_for(AcceptanceMode::Sceptical(SemanticsKind::Admissible)));
        assert!(!c.successful_for(AcceptanceMode::Grounded));
        assert_eq!(c.strongest(), Some("sceptical"));
        assert_eq!(Classification::default().strongest(), None);
    }

    #[test]
    fn unsupported_claim_falls_back_to_a_bare_claim() {
        let kb = parse_kb("@mode datalog\nfact p(a).\n").unwrap();
        let phi = Formula::parse("q(a)").unwrap();
        let mode = AcceptanceMode::Credulous(SemanticsKind::Preferred);
        assert!(generate_dialogue(&kb, &phi, mode).unwrap().is_none());
        let g = attempt_dialogue(&kb, &phi, mode).unwrap();
        assert_eq!(g.dialogue.utterances.len(), 1);
        assert_eq!(g.classification.strongest(), None);
    }
}
