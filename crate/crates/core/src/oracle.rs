//! Brute-force reference procedures.
//!
//! Everything here works on the explicit reachability graph and never
//! touches basis markings, so its answers are independent of the
//! basis-graph pipeline they are used to check.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::explain::minimality_filter;
use crate::net::{Label, LabeledPetriNet, Marking, ParikhVector, PetriNet, TransitionId, TransitionSequence};
use crate::nfa::{Nfa, StateId};

/// Default exploration cap (number of distinct markings).
pub const DEFAULT_CAP: usize = 100_000;

/// Reachability graph: states are markings, events are transitions.
#[derive(Debug, Clone)]
pub struct ReachGraph {
    pub nfa: Nfa<Marking, TransitionId>,
}

impl ReachGraph {
    pub fn state_count(&self) -> usize {
        self.nfa.state_count()
    }

    pub fn markings(&self) -> &[Marking] {
        self.nfa.states()
    }
}

/// Breadth-first reachability with unboundedness detection.
///
/// A newly discovered marking that strictly dominates a marking on its own
/// discovery path proves unboundedness (the same firing sequence can be
/// repeated forever). More than `cap` distinct markings yields
/// [`Error::CapExhausted`].
pub fn explore(net: &PetriNet, cap: usize) -> Result<Nfa<Marking, TransitionId>> {
    let mut nfa = Nfa::new();
    let mut index: HashMap<Marking, StateId> = HashMap::new();
    let mut parent: Vec<Option<(StateId, TransitionId)>> = Vec::new();
    let m0 = net.initial_marking().clone();
    let root = nfa.add_state(m0.clone());
    nfa.add_initial(root);
    index.insert(m0, root);
    parent.push(None);

    let mut queue = VecDeque::from([root]);
    while let Some(s) = queue.pop_front() {
        let m = nfa.state(s).clone();
        for t in net.transitions() {
            let Some(next) = net.try_fire(&m, t) else { continue };
            let target = match index.get(&next) {
                Some(&id) => id,
                None => {
                    if let Some(err) = domination_witness(net, &nfa, &parent, s, t, &next) {
                        return Err(err);
                    }
                    if nfa.state_count() >= cap {
                        return Err(Error::CapExhausted { cap });
                    }
                    let id = nfa.add_state(next.clone());
                    index.insert(next, id);
                    parent.push(Some((s, t)));
                    queue.push_back(id);
                    id
                }
            };
            nfa.add_edge(s, t, None, target);
        }
    }
    Ok(nfa)
}

fn domination_witness(
    net: &PetriNet,
    nfa: &Nfa<Marking, TransitionId>,
    parent: &[Option<(StateId, TransitionId)>],
    from: StateId,
    via: TransitionId,
    next: &Marking,
) -> Option<Error> {
    let mut chain = vec![from];
    while let Some((p, _)) = parent[*chain.last().unwrap()] {
        chain.push(p);
    }
    // chain runs from `from` back to the root
    let depth = chain.len() - 1;
    let hit = chain.iter().position(|&a| next.strictly_dominates(nfa.state(a)))?;
    let mut path = Vec::new();
    let mut cur = from;
    while let Some((p, t)) = parent[cur] {
        path.push(net.transition_name(t).to_owned());
        cur = p;
    }
    path.reverse();
    path.push(net.transition_name(via).to_owned());
    Some(Error::Unbounded {
        path,
        from_step: depth - hit,
        dominated: nfa.state(chain[hit]).to_string(),
        dominating: next.to_string(),
    })
}

/// Reachability graph of the labeled net; every edge carries its label.
pub fn reachability_graph(lpn: &LabeledPetriNet, cap: usize) -> Result<ReachGraph> {
    let mut nfa = explore(lpn.net(), cap)?;
    relabel(&mut nfa, |t| Some(lpn.label(t).clone()));
    Ok(ReachGraph { nfa })
}

fn relabel(nfa: &mut Nfa<Marking, TransitionId>, f: impl Fn(TransitionId) -> Option<Label>) {
    let mut out = Nfa::new();
    for m in nfa.states() {
        out.add_state(m.clone());
    }
    for &s in nfa.initial() {
        out.add_initial(s);
    }
    for e in nfa.edges() {
        out.add_edge(e.from, e.event, f(e.event), e.to);
    }
    *nfa = out;
}

/// Automaton for `l(P_L(L(N, m_0)))`: low transitions emit their label,
/// high transitions are silent.
pub fn projected_label_language(lpn: &LabeledPetriNet, cap: usize) -> Result<Nfa<Marking, TransitionId>> {
    let mut nfa = explore(lpn.net(), cap)?;
    relabel(&mut nfa, |t| lpn.is_low(t).then(|| lpn.label(t).clone()));
    Ok(nfa)
}

/// Automaton for `l_L(L(N_L, m_0))`, over the low subnet's own transition
/// indices.
pub fn low_label_language(lpn: &LabeledPetriNet, cap: usize) -> Result<Nfa<Marking, TransitionId>> {
    let low = lpn.low_subnet();
    Ok(reachability_graph(&low, cap)?.nfa)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    First,
    Second,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LanguageCheckResult {
    pub equal: bool,
    /// Shortest word in exactly one language (ties broken by label order).
    pub counterexample: Option<Vec<Label>>,
    /// The automaton that accepts the counterexample.
    pub accepted_by: Option<Side>,
}

/// Equality of two prefix-closed label languages, with a shortest
/// difference word.
pub fn language_equal<S1, E1, S2, E2>(a: &Nfa<S1, E1>, b: &Nfa<S2, E2>) -> LanguageCheckResult {
    let differ = |word: Vec<Label>, a_nonempty: bool| LanguageCheckResult {
        equal: false,
        counterexample: Some(word),
        accepted_by: Some(if a_nonempty { Side::First } else { Side::Second }),
    };
    let start = (a.initial_closure(), b.initial_closure());
    if start.0.is_empty() != start.1.is_empty() {
        return differ(Vec::new(), !start.0.is_empty());
    }
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([(start, Vec::new())]);
    while let Some(((sa, sb), word)) = queue.pop_front() {
        let mut labels = a.labels_from(&sa);
        labels.extend(b.labels_from(&sb));
        for label in labels {
            let na = a.step(&sa, &label);
            let nb = b.step(&sb, &label);
            let mut next_word = word.clone();
            next_word.push(label);
            if na.is_empty() != nb.is_empty() {
                return differ(next_word, !na.is_empty());
            }
            if na.is_empty() {
                continue;
            }
            let pair = (na, nb);
            if seen.insert(pair.clone()) {
                queue.push_back((pair, next_word));
            }
        }
    }
    LanguageCheckResult {
        equal: true,
        counterexample: None,
        accepted_by: None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleVerdict {
    pub snni: bool,
    /// Shortest low observation of the full net that the low subnet cannot
    /// produce.
    pub counterexample: Option<Vec<Label>>,
    pub reachable_markings: usize,
    pub low_reachable_markings: usize,
}

/// Decides SNNI by comparing `l(P_L(L(N,m_0)))` with `l_L(L(N_L,m_0))`
/// directly.
pub fn snni_oracle(lpn: &LabeledPetriNet, cap: usize) -> Result<OracleVerdict> {
    let full = projected_label_language(lpn, cap)?;
    let low = low_label_language(lpn, cap)?;
    let check = language_equal(&full, &low);
    // the low subnet's words are always words of the full net
    debug_assert!(check.equal || check.accepted_by == Some(Side::First));
    Ok(OracleVerdict {
        snni: check.equal,
        counterexample: check.counterexample,
        reachable_markings: full.state_count(),
        low_reachable_markings: low.state_count(),
    })
}

/// `(s_E, y)` pairs for an observed low word, with their basis markings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JustificationSet {
    pub word: Vec<Label>,
    /// `s_E` mapped to its minimal j-vectors.
    pub pairs: BTreeMap<TransitionSequence, BTreeSet<ParikhVector>>,
    pub basis_markings: BTreeSet<Marking>,
    /// Set when the length cap cut off a branch that could still progress.
    pub incomplete: bool,
}

/// Enumerates every interleaving consistent with `word` (up to `cap`
/// transitions) and keeps, per explicit sequence, the minimal implicit
/// Parikh vectors.
pub fn justifications(lpn: &LabeledPetriNet, word: &[Label], cap: usize) -> JustificationSet {
    struct Search<'a> {
        lpn: &'a LabeledPetriNet,
        word: &'a [Label],
        cap: usize,
        raw: BTreeMap<TransitionSequence, BTreeSet<ParikhVector>>,
        incomplete: bool,
    }

    impl Search<'_> {
        fn walk(&mut self, m: &Marking, explicit: &mut Vec<TransitionId>, y: &ParikhVector, len: usize) {
            if explicit.len() == self.word.len() {
                self.raw.entry(explicit.clone()).or_default().insert(y.clone());
                return;
            }
            let net = self.lpn.net();
            for t in net.transitions() {
                let Some(next) = net.try_fire(m, t) else { continue };
                let fits = match self.lpn.high_index(t) {
                    Some(_) => true,
                    None => self.lpn.label(t) == &self.word[explicit.len()],
                };
                if !fits {
                    continue;
                }
                if len == self.cap {
                    self.incomplete = true;
                    continue;
                }
                match self.lpn.high_index(t) {
                    Some(i) => self.walk(&next, explicit, &y.incremented(i), len + 1),
                    None => {
                        explicit.push(t);
                        self.walk(&next, explicit, y, len + 1);
                        explicit.pop();
                    }
                }
            }
        }
    }

    let mut search = Search {
        lpn,
        word,
        cap,
        raw: BTreeMap::new(),
        incomplete: false,
    };
    let m0 = lpn.net().initial_marking().clone();
    search.walk(&m0, &mut Vec::new(), &ParikhVector::zeros(lpn.high().len()), 0);

    let pairs: BTreeMap<_, _> = search
        .raw
        .into_iter()
        .map(|(s, ys)| (s, minimality_filter(&ys)))
        .collect();
    let basis_markings = pairs
        .iter()
        .flat_map(|(s, ys)| ys.iter().map(move |y| basis_marking(lpn, s, y)))
        .collect();
    JustificationSet {
        word: word.to_vec(),
        pairs,
        basis_markings,
        incomplete: search.incomplete,
    }
}

/// `m_0 + [N]_I * y + [N]_E * pi(s_E)`.
pub fn basis_marking(lpn: &LabeledPetriNet, explicit: &[TransitionId], y: &ParikhVector) -> Marking {
    let net = lpn.net();
    let tokens = net
        .places()
        .map(|p| {
            let mut v = i64::from(net.initial_marking().get(p));
            for (i, &h) in lpn.high().iter().enumerate() {
                v += net.incidence(p, h) * i64::from(y.counts()[i]);
            }
            for &t in explicit {
                v += net.incidence(p, t);
            }
            u32::try_from(v).expect("justified sequences reach non-negative markings")
        })
        .collect();
    Marking::new(tokens)
}

/// `P_E(L(N, m_0))` restricted to explicit sequences of length at most
/// `depth`.
pub fn explicit_projections(lpn: &LabeledPetriNet, depth: usize) -> BTreeSet<TransitionSequence> {
    let net = lpn.net();
    let closure = |set: BTreeSet<Marking>| -> BTreeSet<Marking> {
        let mut out = set.clone();
        let mut queue: VecDeque<Marking> = set.into_iter().collect();
        while let Some(m) = queue.pop_front() {
            for &h in lpn.high() {
                if let Some(next) = net.try_fire(&m, h) {
                    if out.insert(next.clone()) {
                        queue.push_back(next);
                    }
                }
            }
        }
        out
    };

    let mut out = BTreeSet::new();
    let start = closure(BTreeSet::from([net.initial_marking().clone()]));
    let mut stack = vec![(Vec::new(), start)];
    while let Some((seq, set)) = stack.pop() {
        if seq.len() < depth {
            for &t in lpn.low() {
                let next: BTreeSet<Marking> = set.iter().filter_map(|m| net.try_fire(m, t)).collect();
                if !next.is_empty() {
                    let mut s = seq.clone();
                    s.push(t);
                    stack.push((s, closure(next)));
                }
            }
        }
        out.insert(seq);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::net::{word_string, Level};

    fn w(s: &str) -> Vec<Label> {
        s.chars().map(|c| Label::new(c.to_string())).collect()
    }

    #[test]
    fn fig1_reachability_counts() {
        let lpn = fixtures::fig1();
        assert_eq!(reachability_graph(&lpn, 1000).unwrap().state_count(), 9);
        let low = reachability_graph(&lpn.low_subnet(), 1000).unwrap();
        assert_eq!(low.state_count(), 5);
        let marked: BTreeSet<usize> = low
            .markings()
            .iter()
            .map(|m| m.tokens().iter().position(|&k| k == 1).unwrap())
            .collect();
        // p_1, p_6, p_7, p_8, p_9
        assert_eq!(marked, BTreeSet::from([0, 5, 6, 7, 8]));
    }

    #[test]
    fn net_without_transitions_has_one_state() {
        let lpn = LabeledPetriNet::builder().place("p", 2).build().unwrap();
        assert_eq!(reachability_graph(&lpn, 10).unwrap().state_count(), 1);
    }

    #[test]
    fn unbounded_and_capped_exploration() {
        let err = reachability_graph(&fixtures::unbounded(), 100).unwrap_err();
        assert!(matches!(err, Error::Unbounded { ref path, .. } if path == &["t"]));
        let err = reachability_graph(&fixtures::fig1(), 3).unwrap_err();
        assert!(matches!(err, Error::CapExhausted { cap: 3 }));
    }

    #[test]
    fn projected_language_words() {
        let lpn = fixtures::fig1();
        let full = projected_label_language(&lpn, 1000).unwrap();
        assert!(full.accepts(&[]));
        assert!(full.accepts(&w("ab")));
        assert!(full.accepts(&w("abab")));
        assert!(!full.accepts(&w("b")));

        let fig6 = projected_label_language(&fixtures::fig6(), 1000).unwrap();
        assert!(fig6.accepts(&w("ac")));
    }

    #[test]
    fn fixtures_language_equality() {
        let lpn = fixtures::fig1();
        let full = projected_label_language(&lpn, 1000).unwrap();
        let low = low_label_language(&lpn, 1000).unwrap();
        assert!(language_equal(&full, &low).equal);
        assert!(language_equal(&full, &full).equal);

        let lpn = fixtures::fig6();
        let full = projected_label_language(&lpn, 1000).unwrap();
        let low = low_label_language(&lpn, 1000).unwrap();
        let res = language_equal(&full, &low);
        assert!(!res.equal);
        assert_eq!(word_string(res.counterexample.as_ref().unwrap()), "ac");
        assert_eq!(res.accepted_by, Some(Side::First));
        // symmetric verdict, same witness, other side
        let rev = language_equal(&low, &full);
        assert_eq!(rev.counterexample, res.counterexample);
        assert_eq!(rev.accepted_by, Some(Side::Second));
    }

    #[test]
    fn oracle_verdicts() {
        assert!(snni_oracle(&fixtures::fig1(), 1000).unwrap().snni);
        let v = snni_oracle(&fixtures::fig6(), 1000).unwrap();
        assert!(!v.snni);
        assert_eq!(word_string(&v.counterexample.unwrap()), "ac");
        assert_eq!(v.reachable_markings, 9);
        assert_eq!(v.low_reachable_markings, 5);
    }

    #[test]
    fn oracle_without_high_transitions() {
        let lpn = LabeledPetriNet::builder()
            .place("p", 1)
            .place("q", 0)
            .transition("t", "a", Level::Low)
            .transition("u", "a", Level::Low)
            .arc("p", "t", 1)
            .arc("t", "q", 1)
            .arc("q", "u", 1)
            .arc("u", "p", 1)
            .build()
            .unwrap();
        assert!(snni_oracle(&lpn, 100).unwrap().snni);
    }

    #[test]
    fn justifications_of_ab() {
        let lpn = fixtures::fig1();
        let id = |n: &str| lpn.net().transition_id(n).unwrap();
        let j = justifications(&lpn, &w("ab"), 12);
        assert!(!j.incomplete);
        let expected = BTreeMap::from([
            (
                vec![id("l_1"), id("l_2")],
                BTreeSet::from([ParikhVector::new(vec![1, 0])]),
            ),
            (
                vec![id("l_8"), id("l_9")],
                BTreeSet::from([ParikhVector::new(vec![0, 0])]),
            ),
        ]);
        assert_eq!(j.pairs, expected);
        let m = |p: usize| {
            let mut v = vec![0; 9];
            v[p] = 1;
            Marking::new(v)
        };
        assert_eq!(j.basis_markings, BTreeSet::from([m(0), m(1)]));
    }

    #[test]
    fn justification_of_empty_word() {
        let lpn = fixtures::fig1();
        let j = justifications(&lpn, &[], 4);
        assert_eq!(
            j.pairs,
            BTreeMap::from([(vec![], BTreeSet::from([ParikhVector::zeros(2)]))])
        );
        assert_eq!(j.basis_markings, BTreeSet::from([lpn.net().initial_marking().clone()]));
    }

    #[test]
    fn justification_cap_is_flagged() {
        let j = justifications(&fixtures::fig1(), &w("ab"), 1);
        assert!(j.incomplete);
    }

    #[test]
    fn explicit_projections_of_fig1() {
        let lpn = fixtures::fig1();
        let id = |n: &str| lpn.net().transition_id(n).unwrap();
        let seqs = explicit_projections(&lpn, 2);
        assert!(seqs.contains(&vec![]));
        assert!(seqs.contains(&vec![id("l_1"), id("l_2")]));
        assert!(seqs.contains(&vec![id("l_3"), id("l_4")]));
        assert!(!seqs.contains(&vec![id("l_2")]));
    }
}
