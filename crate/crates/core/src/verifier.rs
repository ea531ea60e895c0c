//! SNNI verifiers built on the unfolded basis reachability graph.
//!
//! Two constructions are provided:
//!
//! * [`build_sv`] pairs every UBRG node with a single low-subnet marking and
//!   closes a `β` leaf only when its (marking; low marking) pair already
//!   occurred on the root path. Its `Ψ` sets are the classic ones, but the
//!   tag-set comparison built on them is not exact on every net (see
//!   [`decide_snni_pairwise`]).
//! * [`build_closed_sv`] pairs every UBRG node with the *set* of low markings
//!   consistent with the observation so far, follows repeated-marking leaves
//!   back into the unfolding, and closes a branch when its (marking; set)
//!   pair repeats. [`decide_snni`] compares `Φ` with the `Ψ` sets of this
//!   construction, which is exact.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use serde::Serialize;

use crate::assumptions::VerifiedNet;
use crate::basis::{build_ubrg, build_ubrg_with, phi, Limits, Tag, UbrgResult};
use crate::error::{Error, Result};
use crate::net::{Label, LabeledPetriNet, Marking, TransitionId};
use crate::nfa::{Nfa, StateId};

/// Parallel composition of two labeled automata.
///
/// Edges with equal labels synchronize; silent edges of either side move
/// alone. Only pairs reachable from the initial pairs are built.
pub fn parallel_composition<S1, E1: Clone, S2, E2: Clone>(
    g1: &Nfa<S1, E1>,
    g2: &Nfa<S2, E2>,
) -> Nfa<(StateId, StateId), (Option<E1>, Option<E2>)> {
    let mut out = Nfa::new();
    let mut index: HashMap<(StateId, StateId), StateId> = HashMap::new();
    let mut queue = VecDeque::new();
    let mut intern = |out: &mut Nfa<_, _>, queue: &mut VecDeque<_>, pair: (StateId, StateId)| {
        *index.entry(pair).or_insert_with(|| {
            let id = out.add_state(pair);
            queue.push_back(id);
            id
        })
    };
    for &a in g1.initial() {
        for &b in g2.initial() {
            let id = intern(&mut out, &mut queue, (a, b));
            out.add_initial(id);
        }
    }
    while let Some(s) = queue.pop_front() {
        let (x1, x2) = *out.state(s);
        for e1 in g1.outgoing(x1) {
            match &e1.label {
                None => {
                    let t = intern(&mut out, &mut queue, (e1.to, x2));
                    out.add_edge(s, (Some(e1.event.clone()), None), None, t);
                }
                Some(a) => {
                    for e2 in g2.outgoing(x2).filter(|e2| e2.label.as_ref() == Some(a)) {
                        let t = intern(&mut out, &mut queue, (e1.to, e2.to));
                        out.add_edge(s, (Some(e1.event.clone()), Some(e2.event.clone())), Some(a.clone()), t);
                    }
                }
            }
        }
        for e2 in g2.outgoing(x2).filter(|e| e.label.is_none()) {
            let t = intern(&mut out, &mut queue, (x1, e2.to));
            out.add_edge(s, (None, Some(e2.event.clone())), None, t);
        }
    }
    out
}

/// Node of the pairwise verifier: a UBRG node and one low-subnet marking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SvNode {
    pub ubrg_node: StateId,
    pub low_marking: Marking,
    pub parent: Option<StateId>,
}

/// Synchronized move: the explicit transition of the UBRG arc and the
/// equally labeled low-subnet transition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SvEvent {
    pub explicit: TransitionId,
    pub low: TransitionId,
}

#[derive(Debug, Clone)]
pub struct SvResult {
    pub tree: Nfa<SvNode, SvEvent>,
    pub psi_alpha: BTreeSet<Tag>,
    pub psi_beta: BTreeSet<Tag>,
    /// Nodes closed because their `β` pair repeated on the root path.
    pub m_dup_prime: BTreeSet<StateId>,
    /// Nodes pairing an untagged repeated-marking leaf with a low marking
    /// that repeats on the root path. Diagnostic only.
    pub plain_duplicates: BTreeSet<StateId>,
}

impl SvResult {
    pub fn node_count(&self) -> usize {
        self.tree.state_count()
    }
}

fn on_root_path<N>(
    tree: &Nfa<N, impl Sized>,
    from: StateId,
    parent: impl Fn(&N) -> Option<StateId>,
    hit: impl Fn(&N) -> bool,
) -> bool {
    let mut cur = parent(tree.state(from));
    while let Some(a) = cur {
        if hit(tree.state(a)) {
            return true;
        }
        cur = parent(tree.state(a));
    }
    false
}

/// Pairwise verifier: UBRG synchronized on labels with the low subnet, one
/// low marking per node.
pub fn build_sv(net: &VerifiedNet, ubrg: &UbrgResult) -> Result<SvResult> {
    build_sv_with(net, ubrg, Limits::default())
}

pub fn build_sv_with(net: &VerifiedNet, ubrg: &UbrgResult, limits: Limits) -> Result<SvResult> {
    let lpn: &LabeledPetriNet = net;
    let low_net = lpn.net();
    let mut tree: Nfa<SvNode, SvEvent> = Nfa::new();
    let mut m_dup_prime = BTreeSet::new();
    let mut plain_duplicates = BTreeSet::new();
    let root = tree.add_state(SvNode {
        ubrg_node: UbrgResult::ROOT,
        low_marking: low_net.initial_marking().clone(),
        parent: None,
    });
    tree.add_initial(root);

    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        let SvNode {
            ubrg_node: x1,
            low_marking: x2,
            ..
        } = tree.state(v).clone();
        let u = ubrg.node(x1);
        if u.duplicated {
            let m = &u.marking;
            let repeats = on_root_path(
                &tree,
                v,
                |n| n.parent,
                |n| &ubrg.node(n.ubrg_node).marking == m && n.low_marking == x2,
            );
            if repeats {
                if matches!(u.tag, Some(Tag::Beta(_))) {
                    m_dup_prime.insert(v);
                    continue;
                }
                plain_duplicates.insert(v);
            }
        }
        for (event, child) in ubrg.children(x1) {
            let label = lpn.label(event.transition);
            for &e2 in lpn.low() {
                if lpn.label(e2) != label {
                    continue;
                }
                let Some(next_low) = low_net.try_fire(&x2, e2) else {
                    continue;
                };
                if tree.state_count() >= limits.max_nodes {
                    return Err(Error::BudgetExceeded {
                        what: "SNNI verifier",
                        limit: limits.max_nodes,
                    });
                }
                let w = tree.add_state(SvNode {
                    ubrg_node: *child,
                    low_marking: next_low,
                    parent: Some(v),
                });
                tree.add_edge(
                    v,
                    SvEvent {
                        explicit: event.transition,
                        low: e2,
                    },
                    Some(label.clone()),
                    w,
                );
                queue.push_back(w);
            }
        }
    }

    let mut psi_alpha = BTreeSet::new();
    let mut psi_beta = BTreeSet::new();
    let leaves: Vec<StateId> = tree.leaves().collect();
    for v in leaves {
        match ubrg.node(tree.state(v).ubrg_node).tag {
            Some(tag @ Tag::Alpha(_)) => {
                psi_alpha.insert(tag);
            }
            Some(tag @ Tag::Beta(_)) if m_dup_prime.contains(&v) => {
                psi_beta.insert(tag);
            }
            _ => {}
        }
    }

    Ok(SvResult {
        tree,
        psi_alpha,
        psi_beta,
        m_dup_prime,
        plain_duplicates,
    })
}

/// Node of the closed verifier: a UBRG node and every low-subnet marking
/// consistent with the observation leading here (sorted, never empty).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedSvNode {
    pub ubrg_node: StateId,
    pub low_markings: Vec<Marking>,
    pub parent: Option<StateId>,
    /// Most recent tagged leaf this branch was continued from.
    pub carried: Option<Tag>,
}

/// An observation the low subnet cannot reproduce.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Leak {
    /// Closed-verifier node whose outgoing arc has no low counterpart.
    pub node: StateId,
    /// The explicit transition of that arc.
    pub transition: String,
    /// Full observation, ending with the unmatched label.
    pub word: Vec<Label>,
    /// Tags whose paths this leak invalidates.
    pub blamed: Vec<Tag>,
}

#[derive(Debug, Clone)]
pub struct ClosedSvResult {
    pub tree: Nfa<ClosedSvNode, TransitionId>,
    pub psi_alpha: BTreeSet<Tag>,
    pub psi_beta: BTreeSet<Tag>,
    /// Nodes closed because their (marking; low set) pair repeated.
    pub m_dup_prime: BTreeSet<StateId>,
    /// Nodes not expanded because an earlier node continues from the same
    /// UBRG node with the same low set and carried tag.
    pub merged: BTreeSet<StateId>,
    /// In breadth-first order, so the first leak per tag is a shortest one.
    pub leaks: Vec<Leak>,
}

impl ClosedSvResult {
    pub fn node_count(&self) -> usize {
        self.tree.state_count()
    }

    /// Observation along the root path to `v`.
    pub fn word_to(&self, v: StateId) -> Vec<Label> {
        word_to(&self.tree, v)
    }
}

fn low_step(lpn: &LabeledPetriNet, set: &[Marking], label: &Label) -> Vec<Marking> {
    let net = lpn.net();
    let next: BTreeSet<Marking> = set
        .iter()
        .flat_map(|m| {
            lpn.low()
                .iter()
                .filter(|&&t| lpn.label(t) == label)
                .filter_map(move |&t| net.try_fire(m, t))
        })
        .collect();
    next.into_iter().collect()
}

pub fn build_closed_sv(net: &VerifiedNet, ubrg: &UbrgResult) -> Result<ClosedSvResult> {
    build_closed_sv_with(net, ubrg, Limits::default())
}

/// Subset-tracking verifier.
///
/// Each node carries the set of low markings reachable by low-subnet runs
/// with the same observation. At a repeated-marking leaf the branch goes on
/// with the children of the ancestor that carries the same marking, so
/// every basis path is eventually covered; a branch closes when its
/// (marking; set) pair already occurs on the root path, or when an earlier
/// node already continued from the same place with the same set and tag.
/// An arc whose label empties the set is a leak and removes from `Ψ` the
/// tags whose paths it invalidates.
pub fn build_closed_sv_with(net: &VerifiedNet, ubrg: &UbrgResult, limits: Limits) -> Result<ClosedSvResult> {
    let lpn: &LabeledPetriNet = net;
    let mut tree: Nfa<ClosedSvNode, TransitionId> = Nfa::new();
    let mut m_dup_prime = BTreeSet::new();
    let mut leaks = Vec::new();
    let mut reached = BTreeSet::new();
    let mut merged = BTreeSet::new();
    let mut expanded: HashSet<(StateId, Option<Tag>, Vec<Marking>)> = HashSet::new();
    let root = tree.add_state(ClosedSvNode {
        ubrg_node: UbrgResult::ROOT,
        low_markings: vec![lpn.net().initial_marking().clone()],
        parent: None,
        carried: None,
    });
    tree.add_initial(root);

    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        let node = tree.state(v).clone();
        let u = ubrg.node(node.ubrg_node);
        if let Some(tag) = u.tag {
            reached.insert(tag);
        }
        let repeats = on_root_path(
            &tree,
            v,
            |n| n.parent,
            |n| ubrg.node(n.ubrg_node).marking == u.marking && n.low_markings == node.low_markings,
        );
        if repeats {
            m_dup_prime.insert(v);
            continue;
        }
        let (source, carried) = match u.duplicate_of {
            Some(anc) => (anc, u.tag.or(node.carried)),
            None => (node.ubrg_node, node.carried),
        };
        if !expanded.insert((source, carried, node.low_markings.clone())) {
            merged.insert(v);
            continue;
        }
        for (event, child) in ubrg.children(source) {
            let label = lpn.label(event.transition);
            let next = low_step(lpn, &node.low_markings, label);
            if next.is_empty() {
                let blamed = if ubrg.node(*child).uses_implicit {
                    ubrg.tagged_below(*child).to_vec()
                } else {
                    vec![carried.expect("an all-zero basis path is a low-subnet run")]
                };
                let mut word = word_to(&tree, v);
                word.push(label.clone());
                leaks.push(Leak {
                    node: v,
                    transition: lpn.name(event.transition).to_owned(),
                    word,
                    blamed,
                });
                continue;
            }
            if tree.state_count() >= limits.max_nodes {
                return Err(Error::BudgetExceeded {
                    what: "closed SNNI verifier",
                    limit: limits.max_nodes,
                });
            }
            let w = tree.add_state(ClosedSvNode {
                ubrg_node: *child,
                low_markings: next,
                parent: Some(v),
                carried,
            });
            tree.add_edge(v, event.transition, Some(label.clone()), w);
            queue.push_back(w);
        }
    }

    let blamed: BTreeSet<Tag> = leaks.iter().flat_map(|l| l.blamed.iter().copied()).collect();
    let psi = |want_alpha: bool| {
        reached
            .iter()
            .filter(|t| matches!(t, Tag::Alpha(_)) == want_alpha && !blamed.contains(t))
            .copied()
            .collect()
    };
    Ok(ClosedSvResult {
        psi_alpha: psi(true),
        psi_beta: psi(false),
        tree,
        m_dup_prime,
        merged,
        leaks,
    })
}

fn word_to(tree: &Nfa<ClosedSvNode, TransitionId>, v: StateId) -> Vec<Label> {
    let mut word = Vec::new();
    let mut cur = v;
    while let Some(p) = tree.state(cur).parent {
        let e = tree.outgoing(p).find(|e| e.to == cur).expect("tree edge");
        word.push(e.label.clone().expect("verifier edges are labeled"));
        cur = p;
    }
    word.reverse();
    word
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub snni: bool,
    pub missing_alpha: BTreeSet<Tag>,
    pub missing_beta: BTreeSet<Tag>,
    /// Label word of the UBRG root path of every missing tag.
    pub witness_words: BTreeMap<Tag, Vec<Label>>,
    /// Shortest unmatched observation per missing tag, when known.
    pub leak_words: BTreeMap<Tag, Vec<Label>>,
}

impl Verdict {
    fn from_sets(
        lpn: &LabeledPetriNet,
        ubrg: &UbrgResult,
        psi_alpha: &BTreeSet<Tag>,
        psi_beta: &BTreeSet<Tag>,
        leaks: &[Leak],
    ) -> Verdict {
        let missing_alpha: BTreeSet<Tag> = ubrg.phi_alpha.difference(psi_alpha).copied().collect();
        let missing_beta: BTreeSet<Tag> = ubrg.phi_beta.difference(psi_beta).copied().collect();
        let mut witness_words = BTreeMap::new();
        let mut leak_words = BTreeMap::new();
        for &tag in missing_alpha.iter().chain(&missing_beta) {
            let leaf = ubrg.tagged_leaf(tag).expect("tag names a leaf");
            witness_words.insert(tag, lpn.label_word(&phi(&ubrg.path_events(leaf))));
            if let Some(leak) = leaks.iter().find(|l| l.blamed.contains(&tag)) {
                leak_words.insert(tag, leak.word.clone());
            }
        }
        Verdict {
            snni: missing_alpha.is_empty() && missing_beta.is_empty(),
            missing_alpha,
            missing_beta,
            witness_words,
            leak_words,
        }
    }
}

/// Everything the verifier pipeline produces for one net.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub ubrg: UbrgResult,
    /// `None` when the pairwise verifier exceeded its node budget.
    pub sv: Option<SvResult>,
    pub closed: ClosedSvResult,
    pub verdict: Verdict,
    pub pairwise_verdict: Option<Verdict>,
}

pub fn analyze(net: &VerifiedNet, limits: Limits) -> Result<Analysis> {
    let ubrg = build_ubrg_with(net, limits)?;
    let closed = build_closed_sv_with(net, &ubrg, limits)?;
    let verdict = Verdict::from_sets(net, &ubrg, &closed.psi_alpha, &closed.psi_beta, &closed.leaks);
    let sv = match build_sv_with(net, &ubrg, limits) {
        Ok(sv) => Some(sv),
        Err(Error::BudgetExceeded { .. }) => None,
        Err(e) => return Err(e),
    };
    let pairwise_verdict = sv
        .as_ref()
        .map(|sv| Verdict::from_sets(net, &ubrg, &sv.psi_alpha, &sv.psi_beta, &[]));
    Ok(Analysis {
        ubrg,
        sv,
        closed,
        verdict,
        pairwise_verdict,
    })
}

/// Decides SNNI as `Φ_α = Ψ_α ∧ Φ_β = Ψ_β`, with `Ψ` from the closed
/// verifier.
pub fn decide_snni(net: &VerifiedNet) -> Result<Verdict> {
    let ubrg = build_ubrg(net)?;
    let closed = build_closed_sv(net, &ubrg)?;
    Ok(Verdict::from_sets(
        net,
        &ubrg,
        &closed.psi_alpha,
        &closed.psi_beta,
        &closed.leaks,
    ))
}

/// The same tag-set comparison with `Ψ` taken from the pairwise verifier.
/// Agrees with [`decide_snni`] on many nets, but can both miss leaks and
/// report spurious ones.
pub fn decide_snni_pairwise(net: &VerifiedNet) -> Result<Verdict> {
    let ubrg = build_ubrg_with(net, Limits::default())?;
    let sv = build_sv(net, &ubrg)?;
    Ok(Verdict::from_sets(net, &ubrg, &sv.psi_alpha, &sv.psi_beta, &[]))
}
