//! Explanations of explicit transitions over the implicit subnet and their
//! minimal e-vectors.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::assumptions::VerifiedNet;
use crate::error::{Error, Result};
use crate::net::{parikh, LabeledPetriNet, Marking, ParikhVector, TransitionId, TransitionSequence};

/// An implicit sequence whose firing enables some explicit transition.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Explanation {
    pub sequence: TransitionSequence,
    pub evector: ParikhVector,
}

/// `Y_min(m, t)` with one witness sequence per e-vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalExplanationSet {
    pub marking: Marking,
    pub transition: TransitionId,
    pub witnesses: BTreeMap<ParikhVector, TransitionSequence>,
}

impl MinimalExplanationSet {
    pub fn evectors(&self) -> impl Iterator<Item = &ParikhVector> {
        self.witnesses.keys()
    }

    pub fn evector_set(&self) -> BTreeSet<ParikhVector> {
        self.witnesses.keys().cloned().collect()
    }

    pub fn is_empty(&self) -> bool {
        self.witnesses.is_empty()
    }
}

fn require_explicit(lpn: &LabeledPetriNet, t: TransitionId) -> Result<()> {
    if t.0 >= lpn.net().transition_count() {
        return Err(Error::UnknownTransition(format!("#{}", t.0)));
    }
    if !lpn.is_low(t) {
        return Err(Error::NotExplicit(lpn.name(t).to_owned()));
    }
    Ok(())
}

/// Keeps the elements of `cands` that no other element strictly undercuts.
pub fn minimality_filter<'a>(cands: impl IntoIterator<Item = &'a ParikhVector>) -> BTreeSet<ParikhVector> {
    let all: BTreeSet<&ParikhVector> = cands.into_iter().collect();
    all.iter()
        .filter(|y| !all.iter().any(|z| z.strictly_le(y)))
        .map(|y| (*y).clone())
        .collect()
}

/// Default length cap for [`explanations_bounded`]:
/// `|T_I| * (1 + tokens in m)`.
pub fn default_len_cap(lpn: &LabeledPetriNet, m: &Marking) -> usize {
    let tokens: usize = m.tokens().iter().map(|&k| k as usize).sum();
    lpn.high().len() * (1 + tokens)
}

/// Every implicit sequence of length at most `len_cap` whose firing at `m`
/// enables `t`. Plain depth-first enumeration; meant as a reference.
pub fn explanations_bounded(
    lpn: &LabeledPetriNet,
    m: &Marking,
    t: TransitionId,
    len_cap: usize,
) -> Result<Vec<Explanation>> {
    require_explicit(lpn, t)?;
    let net = lpn.net();
    net.enabled(m, t)?;

    let mut out = Vec::new();
    let mut stack: Vec<(Marking, TransitionSequence)> = vec![(m.clone(), Vec::new())];
    while let Some((cur, seq)) = stack.pop() {
        if net.is_enabled(&cur, t) {
            out.push(Explanation {
                evector: parikh(&seq, lpn.high())?,
                sequence: seq.clone(),
            });
        }
        if seq.len() == len_cap {
            continue;
        }
        for &h in lpn.high().iter().rev() {
            if let Some(next) = net.try_fire(&cur, h) {
                let mut s = seq.clone();
                s.push(h);
                stack.push((next, s));
            }
        }
    }
    out.sort();
    Ok(out)
}

/// `Y_min(m, t)`.
///
/// Breadth-first search over the implicit subnet from `m`, carrying the
/// Parikh vector of the path. A state stops expanding once it enables `t`
/// or once its vector covers an explanation already found or a vector that
/// reached the same marking. Boundedness and acyclicity of the implicit
/// subnet make the search finite.
pub fn minimal_e_vectors(net: &VerifiedNet, m: &Marking, t: TransitionId) -> Result<MinimalExplanationSet> {
    require_explicit(net, t)?;
    net.net().enabled(m, t)?;
    Ok(minimal_e_vectors_unchecked(net, m, t))
}

pub(crate) fn minimal_e_vectors_unchecked(
    lpn: &LabeledPetriNet,
    m: &Marking,
    t: TransitionId,
) -> MinimalExplanationSet {
    let net = lpn.net();
    let high = lpn.high();
    let zero = ParikhVector::zeros(high.len());

    let mut found: Vec<(ParikhVector, TransitionSequence)> = Vec::new();
    let mut visited: HashMap<Marking, Vec<ParikhVector>> = HashMap::new();
    visited.insert(m.clone(), vec![zero.clone()]);
    let mut queue = VecDeque::from([(m.clone(), zero, Vec::new())]);

    while let Some((cur, y, seq)) = queue.pop_front() {
        if net.is_enabled(&cur, t) {
            if !found.iter().any(|(f, _)| f.le(&y)) {
                found.push((y, seq));
            }
            continue;
        }
        if found.iter().any(|(f, _)| f.le(&y)) {
            continue;
        }
        for (i, &h) in high.iter().enumerate() {
            let Some(next) = net.try_fire(&cur, h) else { continue };
            let ny = y.incremented(i);
            if found.iter().any(|(f, _)| f.le(&ny)) {
                continue;
            }
            let seen = visited.entry(next.clone()).or_default();
            if seen.iter().any(|v| v.le(&ny)) {
                continue;
            }
            seen.push(ny.clone());
            let mut s = seq.clone();
            s.push(h);
            queue.push_back((next, ny, s));
        }
    }

    let minimal = minimality_filter(found.iter().map(|(y, _)| y));
    let witnesses = found.into_iter().filter(|(y, _)| minimal.contains(y)).collect();
    MinimalExplanationSet {
        marking: m.clone(),
        transition: t,
        witnesses,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn pv(v: &[u32]) -> ParikhVector {
        ParikhVector::new(v.to_vec())
    }

    fn fig1() -> VerifiedNet {
        VerifiedNet::new(fixtures::fig1(), 1000).unwrap()
    }

    #[test]
    fn filter_examples() {
        assert_eq!(
            minimality_filter(&[pv(&[1, 0]), pv(&[1, 1])]),
            BTreeSet::from([pv(&[1, 0])])
        );
        assert_eq!(
            minimality_filter(&[pv(&[1, 0]), pv(&[0, 1])]),
            BTreeSet::from([pv(&[1, 0]), pv(&[0, 1])])
        );
        assert!(minimality_filter(&[]).is_empty());
        assert_eq!(minimality_filter(&[pv(&[2]), pv(&[2])]), BTreeSet::from([pv(&[2])]));
    }

    #[test]
    fn bounded_explanations_at_m0() {
        let lpn = fixtures::fig1();
        let id = |n: &str| lpn.net().transition_id(n).unwrap();
        let m0 = lpn.net().initial_marking();
        let l1 = explanations_bounded(&lpn, m0, id("l_1"), 4).unwrap();
        assert_eq!(
            l1.iter().map(|e| e.sequence.clone()).collect::<Vec<_>>(),
            vec![vec![id("h_1")]]
        );
        let l5 = explanations_bounded(&lpn, m0, id("l_5"), 4).unwrap();
        assert_eq!(
            l5.iter().map(|e| e.sequence.clone()).collect::<Vec<_>>(),
            vec![Vec::<TransitionId>::new()]
        );
        assert!(explanations_bounded(&lpn, m0, id("l_2"), 4).unwrap().is_empty());
        assert!(matches!(
            explanations_bounded(&lpn, m0, id("h_1"), 4),
            Err(Error::NotExplicit(_))
        ));
    }

    #[test]
    fn minimal_evectors_at_m0() {
        let net = fig1();
        let id = |n: &str| net.net().transition_id(n).unwrap();
        let m0 = net.net().initial_marking().clone();
        let y = minimal_e_vectors(&net, &m0, id("l_1")).unwrap();
        assert_eq!(y.evector_set(), BTreeSet::from([pv(&[1, 0])]));
        assert_eq!(y.witnesses[&pv(&[1, 0])], vec![id("h_1")]);
        let y = minimal_e_vectors(&net, &m0, id("l_5")).unwrap();
        assert_eq!(y.evector_set(), BTreeSet::from([pv(&[0, 0])]));
        assert!(minimal_e_vectors(&net, &m0, id("l_2")).unwrap().is_empty());
    }

    #[test]
    fn refuses_implicit_targets() {
        let net = fig1();
        let h1 = net.net().transition_id("h_1").unwrap();
        let m0 = net.net().initial_marking().clone();
        assert!(matches!(minimal_e_vectors(&net, &m0, h1), Err(Error::NotExplicit(_))));
    }

    #[test]
    fn default_cap_scales_with_tokens() {
        let lpn = fixtures::fig1();
        assert_eq!(default_len_cap(&lpn, lpn.net().initial_marking()), 4);
    }
}
