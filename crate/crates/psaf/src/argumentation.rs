//! Arguments as derivation trees, minimal collective attacks, and the
//! argumentation framework they induce.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::PsafError;
use crate::logic::engine::{minimize, Engine};
use crate::logic::{check_acyclic_dependency, render_set, Formula, FormulaSet, KnowledgeBase};

/// Default cap on the number of enumerated arguments.
pub const DEFAULT_MAX_ARGS: usize = 10_000;

/// The argument cap: `PSAF_MAX_ARGS` if set to a number, else the default.
pub fn max_args() -> usize {
    std::env::var("PSAF_MAX_ARGS")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_ARGS)
}

/// A node of a derivation tree. Leaves are KB members (justification `fact`
/// for literals, `premise` for rules); inner nodes name the rule applied.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DerivationNode {
    #[serde(with = "formula_str")]
    pub formula: Formula,
    pub justification: String,
    #[serde(default)]
    pub children: Vec<DerivationNode>,
}

impl DerivationNode {
    pub fn leaf(formula: Formula) -> Self {
        let justification = match formula {
            Formula::Rule(_) => "premise",
            _ => "fact",
        };
        DerivationNode {
            formula,
            justification: justification.to_string(),
            children: Vec::new(),
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.children.iter().map(|c| c.depth() + 1).max().unwrap_or(0)
    }

    pub fn leaves(&self) -> FormulaSet {
        let mut out = FormulaSet::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut FormulaSet) {
        if self.children.is_empty() {
            out.insert(self.formula.clone());
        }
        for c in &self.children {
            c.collect_leaves(out);
        }
    }

    /// Compact one-line rendering, e.g. `rese(v)<r3>[fp(v)<r6>[gc(kr), te(v,kr)]]`.
    pub fn render(&self) -> String {
        if self.children.is_empty() {
            return self.formula.to_string();
        }
        let kids: Vec<String> = self.children.iter().map(|c| c.render()).collect();
        format!("{}<{}>[{}]", self.formula, self.justification, kids.join(", "))
    }
}

impl fmt::Display for DerivationNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

pub(crate) mod formula_str {
    use crate::logic::Formula;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(f: &Formula, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&f.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Formula, D::Error> {
        let s = String::deserialize(d)?;
        Formula::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// An argument: a support set, a conclusion, and a canonical derivation tree
/// whose leaves are exactly the support.
#[derive(Debug, Clone)]
pub struct Argument {
    pub id: String,
    pub support: FormulaSet,
    pub conclusion: Formula,
    pub tree: DerivationNode,
    /// Whether the support is consistent. Arguments with inconsistent support
    /// can never belong to a conflict-free set.
    pub consistent: bool,
    pub(crate) support_bits: FixedBitSet,
    pub(crate) conclusion_id: usize,
}

impl PartialEq for Argument {
    fn eq(&self, other: &Self) -> bool {
        self.support == other.support && self.conclusion == other.conclusion
    }
}

impl Eq for Argument {}

impl Argument {
    /// `{support} => conclusion`
    pub fn signature(&self) -> String {
        format!("{} => {}", render_set(&self.support), self.conclusion)
    }
}

impl fmt::Display for Argument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.id, self.signature())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttackKind {
    Undercut,
    Rebuttal,
}

/// A collective attack: the attacking arguments (by index) jointly
/// contradict the target's conclusion (rebuttal) or support (undercut).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetAttack {
    pub attackers: BTreeSet<usize>,
    pub target: usize,
    pub kind: AttackKind,
}

/// Arguments and minimal collective attacks.
#[derive(Debug, Clone, Default)]
pub struct Psaf {
    pub arguments: Vec<Argument>,
    pub attacks: Vec<SetAttack>,
}

impl Psaf {
    pub fn len(&self) -> usize {
        self.arguments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arguments.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.arguments.iter().position(|a| a.id == id)
    }

    /// Index of the argument with this support and conclusion.
    pub fn find(&self, support: &FormulaSet, conclusion: &Formula) -> Option<usize> {
        self.arguments
            .iter()
            .position(|a| &a.support == support && &a.conclusion == conclusion)
    }

    /// Distinct attacking sets per target, ignoring the attack kind.
    pub fn attackers_of(&self) -> Vec<Vec<BTreeSet<usize>>> {
        let mut out: Vec<BTreeSet<BTreeSet<usize>>> = vec![BTreeSet::new(); self.arguments.len()];
        for at in &self.attacks {
            out[at.target].insert(at.attackers.clone());
        }
        out.into_iter().map(|s| s.into_iter().collect()).collect()
    }

    pub fn to_json(&self) -> PsafJson {
        PsafJson {
            arguments: self
                .arguments
                .iter()
                .map(|a| ArgumentJson {
                    id: a.id.clone(),
                    support: a.support.iter().map(|f| f.to_string()).collect(),
                    conclusion: a.conclusion.to_string(),
                    tree: a.tree.clone(),
                })
                .collect(),
            attacks: self
                .attacks
                .iter()
                .map(|at| AttackJson {
                    attackers: at.attackers.iter().map(|&i| self.arguments[i].id.clone()).collect(),
                    target: self.arguments[at.target].id.clone(),
                    kind: at.kind,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArgumentJson {
    pub id: String,
    pub support: Vec<String>,
    pub conclusion: String,
    pub tree: DerivationNode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackJson {
    pub attackers: Vec<String>,
    pub target: String,
    pub kind: AttackKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsafJson {
    pub arguments: Vec<ArgumentJson>,
    pub attacks: Vec<AttackJson>,
}

/// Candidate (support, tree) pairs for one formula, best tree per support.
type Supports = BTreeMap<Vec<usize>, (FixedBitSet, DerivationNode)>;

struct Enumerator<'a> {
    eng: &'a Engine,
    member_of: HashMap<usize, usize>,
    memo: HashMap<usize, Supports>,
    on_stack: Vec<bool>,
    heads: Vec<Vec<usize>>,
    count: usize,
    cap: usize,
}

fn better(a: &DerivationNode, b: &DerivationNode) -> bool {
    (a.depth(), a.render()) < (b.depth(), b.render())
}

impl<'a> Enumerator<'a> {
    fn supports(&mut self, f: usize) -> Result<Supports, PsafError> {
        if let Some(s) = self.memo.get(&f) {
            return Ok(s.clone());
        }
        self.on_stack[f] = true;
        let n = self.eng.members.len();
        let mut out: Supports = BTreeMap::new();
        if let Some(&m) = self.member_of.get(&f) {
            let mut bits = FixedBitSet::with_capacity(n);
            bits.insert(m);
            out.insert(vec![m], (bits, DerivationNode::leaf(self.eng.formulas[f].clone())));
        }
        for &ri in &self.heads[f].clone() {
            let rule = &self.eng.rules[ri];
            if rule.prereqs().any(|p| self.on_stack[p]) {
                continue;
            }
            // Partial combinations: (support bits, child trees).
            let mut partial: Vec<(FixedBitSet, Vec<DerivationNode>)> = vec![(FixedBitSet::with_capacity(n), Vec::new())];
            for &b in &rule.body {
                let sb = self.supports(b)?;
                let mut next = Vec::new();
                for (bits, kids) in &partial {
                    for (sbits, tree) in sb.values() {
                        let mut u = bits.clone();
                        u.union_with(sbits);
                        let mut k = kids.clone();
                        k.push(tree.clone());
                        next.push((u, k));
                    }
                }
                partial = next;
                if partial.is_empty() {
                    break;
                }
            }
            if let Some(sel) = rule.selector {
                let Some(&m) = self.member_of.get(&sel) else { continue };
                for (bits, kids) in partial.iter_mut() {
                    bits.insert(m);
                    kids.push(DerivationNode::leaf(self.eng.formulas[sel].clone()));
                }
            }
            for (bits, kids) in partial {
                let node = DerivationNode {
                    formula: self.eng.formulas[f].clone(),
                    justification: rule.justification(),
                    children: kids,
                };
                let key: Vec<usize> = bits.ones().collect();
                match out.get(&key) {
                    Some((_, old)) if !better(&node, old) => {}
                    _ => {
                        out.insert(key, (bits, node));
                    }
                }
            }
        }
        self.on_stack[f] = false;
        self.count += out.len();
        if self.count > self.cap {
            return Err(PsafError::TooManyArguments { cap: self.cap });
        }
        self.memo.insert(f, out.clone());
        Ok(out)
    }
}

/// Every (support, conclusion) pair realisable by a derivation tree whose
/// leaf set is exactly the support, with ids `a0, a1, …` in canonical order
/// (support size, rendered support, conclusion).
pub fn enumerate_arguments(kb: &KnowledgeBase) -> Result<Vec<Argument>, PsafError> {
    enumerate_arguments_capped(kb, max_args())
}

pub fn enumerate_arguments_capped(kb: &KnowledgeBase, cap: usize) -> Result<Vec<Argument>, PsafError> {
    let dep = check_acyclic_dependency(kb);
    if let Some(cycle) = dep.cycle {
        return Err(PsafError::Cyclic { cycle });
    }
    let eng = kb.engine();
    let mut heads = vec![Vec::new(); eng.len()];
    for (ri, r) in eng.rules.iter().enumerate() {
        if !r.synthetic {
            heads[r.head].push(ri);
        }
    }
    let mut en = Enumerator {
        eng,
        member_of: eng.members.iter().enumerate().map(|(i, &f)| (f, i)).collect(),
        memo: HashMap::new(),
        on_stack: vec![false; eng.len()],
        heads,
        count: 0,
        cap,
    };
    let mut raw = Vec::new();
    for f in 0..eng.len() {
        if f == eng.bottom {
            continue;
        }
        for (_, (bits, tree)) in en.supports(f)? {
            raw.push((bits, f, tree));
        }
    }
    let mut args: Vec<Argument> = raw
        .into_iter()
        .map(|(bits, f, tree)| {
            let support: FormulaSet = bits.ones().map(|m| eng.formulas[eng.members[m]].clone()).collect();
            Argument {
                id: String::new(),
                consistent: eng.members_consistent(&bits),
                support,
                conclusion: eng.formulas[f].clone(),
                tree,
                support_bits: bits,
                conclusion_id: f,
            }
        })
        .collect();
    sort_arguments(&mut args);
    Ok(args)
}

/// Sort into canonical order and assign ids `a0, a1, …`.
pub fn sort_arguments(args: &mut [Argument]) {
    args.sort_by_cached_key(|a| (a.support.len(), render_set(&a.support), a.conclusion.to_string()));
    for (i, a) in args.iter_mut().enumerate() {
        a.id = format!("a{i}");
    }
}

/// Build an argument from a derivation tree, validating it against the KB:
/// leaves must be KB members and every inner node a single rule application.
pub fn argument_from_tree(kb: &KnowledgeBase, tree: DerivationNode) -> Result<Argument, PsafError> {
    validate_tree(kb, &tree)?;
    let eng = kb.engine();
    let support = tree.leaves();
    let n = eng.members.len();
    let mut bits = FixedBitSet::with_capacity(n);
    for f in &support {
        let id = eng.id(f).ok_or_else(|| PsafError::Precondition(format!("{f} is not a KB member")))?;
        let m = eng
            .members
            .iter()
            .position(|&x| x == id)
            .ok_or_else(|| PsafError::Precondition(format!("{f} is not a KB member")))?;
        bits.insert(m);
    }
    let conclusion_id = eng
        .id(&tree.formula)
        .ok_or_else(|| PsafError::Precondition(format!("{} is not derivable", tree.formula)))?;
    Ok(Argument {
        id: String::new(),
        consistent: eng.members_consistent(&bits),
        support,
        conclusion: tree.formula.clone(),
        tree,
        support_bits: bits,
        conclusion_id,
    })
}

/// Independent check of a derivation tree: leaves are KB members, and each
/// inner node is the head of a ground rule instance whose premises are
/// exactly its children.
pub fn validate_tree(kb: &KnowledgeBase, tree: &DerivationNode) -> Result<(), PsafError> {
    if tree.children.is_empty() {
        if kb.is_member(&tree.formula) {
            return Ok(());
        }
        return Err(PsafError::Precondition(format!("leaf {} is not a KB member", tree.formula)));
    }
    let eng = kb.engine();
    let kids: Vec<Option<usize>> = tree.children.iter().map(|c| eng.id(&c.formula)).collect();
    let head = eng.id(&tree.formula);
    let ok = eng.rules.iter().any(|r| {
        if r.synthetic || Some(r.head) != head || r.justification() != tree.justification {
            return false;
        }
        let want: Vec<Option<usize>> = r.prereqs().map(Some).collect();
        want == kids
    });
    if !ok {
        return Err(PsafError::Precondition(format!(
            "node {} is not justified by rule {}",
            tree.formula, tree.justification
        )));
    }
    for c in &tree.children {
        validate_tree(kb, c)?;
    }
    Ok(())
}

/// Arguments whose support is contained in `a`'s support.
pub fn subarguments<'a>(a: &Argument, all: &'a [Argument]) -> Vec<&'a Argument> {
    all.iter().filter(|b| b.support.is_subset(&a.support)).collect()
}

/// Minimal collective attacks among `args` (indices refer to `args`).
pub fn enumerate_attacks(kb: &KnowledgeBase, args: &[Argument]) -> Vec<SetAttack> {
    let eng = kb.engine();
    // Base: every conclusion and every support member, as formula ids.
    let mut base_ids: BTreeSet<usize> = args.iter().map(|a| a.conclusion_id).collect();
    for a in args {
        base_ids.extend(a.support_bits.ones().map(|m| eng.members[m]));
    }
    let base: Vec<usize> = base_ids.into_iter().collect();
    let pos: HashMap<usize, usize> = base.iter().enumerate().map(|(i, &f)| (f, i)).collect();
    let nb = base.len();
    let mus = eng.minimal_inconsistent(&base);

    let mut by_conclusion: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, a) in args.iter().enumerate() {
        by_conclusion.entry(pos[&a.conclusion_id]).or_default().push(i);
    }

    let mut out: BTreeSet<SetAttack> = BTreeSet::new();
    for (ti, target) in args.iter().enumerate() {
        for kind in [AttackKind::Undercut, AttackKind::Rebuttal] {
            let mut t = FixedBitSet::with_capacity(nb);
            match kind {
                AttackKind::Rebuttal => t.insert(pos[&target.conclusion_id]),
                AttackKind::Undercut => {
                    for m in target.support_bits.ones() {
                        t.insert(pos[&eng.members[m]]);
                    }
                }
            }
            let residues: Vec<FixedBitSet> = mus
                .iter()
                .map(|m| {
                    let mut r = m.clone();
                    r.difference_with(&t);
                    r
                })
                .collect();
            let residues = minimize(residues);
            if residues.iter().any(|r| r.count_ones(..) == 0) {
                // The target set is inconsistent by itself: any consistent
                // argument attacks on its own.
                for (bi, b) in args.iter().enumerate() {
                    if bi != ti && b.consistent {
                        out.insert(SetAttack {
                            attackers: BTreeSet::from([bi]),
                            target: ti,
                            kind,
                        });
                    }
                }
                continue;
            }
            for c in residues {
                let mut combos: Vec<(BTreeSet<usize>, FixedBitSet)> =
                    vec![(BTreeSet::new(), FixedBitSet::with_capacity(eng.members.len()))];
                for p in c.ones() {
                    let Some(cands) = by_conclusion.get(&p) else {
                        combos.clear();
                        break;
                    };
                    let mut next = Vec::new();
                    for (set, bits) in &combos {
                        for &bi in cands {
                            if bi == ti {
                                continue;
                            }
                            let mut s = set.clone();
                            s.insert(bi);
                            let mut u = bits.clone();
                            u.union_with(&args[bi].support_bits);
                            next.push((s, u));
                        }
                    }
                    combos = next;
                }
                for (set, bits) in combos {
                    if eng.members_consistent(&bits) {
                        out.insert(SetAttack {
                            attackers: set,
                            target: ti,
                            kind,
                        });
                    }
                }
            }
        }
    }
    let mut v: Vec<SetAttack> = out.into_iter().collect();
    v.sort_by(|a, b| {
        (a.target, a.kind, a.attackers.len(), a.attackers.iter().collect::<Vec<_>>()).cmp(&(
            b.target,
            b.kind,
            b.attackers.len(),
            b.attackers.iter().collect::<Vec<_>>(),
        ))
    });
    v
}

/// The argumentation framework of a KB.
pub fn build_psaf(kb: &KnowledgeBase) -> Result<Psaf, PsafError> {
    let arguments = enumerate_arguments(kb)?;
    let attacks = enumerate_attacks(kb, &arguments);
    Ok(Psaf { arguments, attacks })
}

/// Framework over a given list of arguments (canonically re-sorted).
pub fn psaf_over(kb: &KnowledgeBase, mut arguments: Vec<Argument>) -> Psaf {
    sort_arguments(&mut arguments);
    arguments.dedup_by(|a, b| a == b);
    for (i, a) in arguments.iter_mut().enumerate() {
        a.id = format!("a{i}");
    }
    let attacks = enumerate_attacks(kb, &arguments);
    Psaf { arguments, attacks }
}
