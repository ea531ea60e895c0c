//! Place/transition nets, labelings and the low/high transition partition.
//!
//! Places and transitions are addressed by their declaration index. Every
//! vector in the crate (markings, Parikh vectors, incidence columns) follows
//! declaration order, so printouts are stable across runs.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PlaceId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TransitionId(pub usize);

/// A finite firing sequence, by transition index.
pub type TransitionSequence = Vec<TransitionId>;

/// Token counts per place.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Marking(Vec<u32>);

impl Marking {
    pub fn new(tokens: Vec<u32>) -> Self {
        Marking(tokens)
    }

    pub fn zeros(places: usize) -> Self {
        Marking(vec![0; places])
    }

    pub fn tokens(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, p: PlaceId) -> u32 {
        self.0[p.0]
    }

    /// Componentwise `self >= other`.
    pub fn covers(&self, other: &Marking) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }

    /// Componentwise `self >= other` with at least one strict entry.
    pub fn strictly_dominates(&self, other: &Marking) -> bool {
        self.covers(other) && self != other
    }
}

impl fmt::Display for Marking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_vector(f, &self.0)
    }
}

/// Occurrence counts of a sequence over some ordered transition subset.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ParikhVector(Vec<u32>);

impl ParikhVector {
    pub fn new(counts: Vec<u32>) -> Self {
        ParikhVector(counts)
    }

    pub fn zeros(len: usize) -> Self {
        ParikhVector(vec![0; len])
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &ParikhVector) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `self <= other` and `self != other`.
    pub fn strictly_le(&self, other: &ParikhVector) -> bool {
        self.le(other) && self != other
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn incremented(&self, index: usize) -> ParikhVector {
        let mut counts = self.0.clone();
        counts[index] += 1;
        ParikhVector(counts)
    }

    pub fn add_assign(&mut self, other: &ParikhVector) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += b;
        }
    }
}

impl fmt::Display for ParikhVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_vector(f, &self.0)
    }
}

fn write_vector(f: &mut fmt::Formatter<'_>, v: &[u32]) -> fmt::Result {
    f.write_str("[")?;
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            f.write_str(" ")?;
        }
        write!(f, "{x}")?;
    }
    f.write_str("]")
}

/// Plain place/transition net with an initial marking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PetriNet {
    places: Vec<String>,
    transitions: Vec<String>,
    // pre[t][p] = W(p, t), post[t][p] = W(t, p)
    pre: Vec<Vec<u32>>,
    post: Vec<Vec<u32>>,
    initial: Marking,
}

impl PetriNet {
    pub fn place_count(&self) -> usize {
        self.places.len()
    }

    pub fn transition_count(&self) -> usize {
        self.transitions.len()
    }

    pub fn place_name(&self, p: PlaceId) -> &str {
        &self.places[p.0]
    }

    pub fn transition_name(&self, t: TransitionId) -> &str {
        &self.transitions[t.0]
    }

    pub fn place_names(&self) -> &[String] {
        &self.places
    }

    pub fn transition_names(&self) -> &[String] {
        &self.transitions
    }

    pub fn transitions(&self) -> impl Iterator<Item = TransitionId> {
        (0..self.transitions.len()).map(TransitionId)
    }

    pub fn places(&self) -> impl Iterator<Item = PlaceId> {
        (0..self.places.len()).map(PlaceId)
    }

    pub fn place_id(&self, name: &str) -> Result<PlaceId> {
        self.places
            .iter()
            .position(|p| p == name)
            .map(PlaceId)
            .ok_or_else(|| Error::UnknownPlace(name.to_owned()))
    }

    pub fn transition_id(&self, name: &str) -> Result<TransitionId> {
        self.transitions
            .iter()
            .position(|t| t == name)
            .map(TransitionId)
            .ok_or_else(|| Error::UnknownTransition(name.to_owned()))
    }

    pub fn initial_marking(&self) -> &Marking {
        &self.initial
    }

    /// Arc weight `W(p, t)`; zero when there is no arc.
    pub fn input_weight(&self, p: PlaceId, t: TransitionId) -> u32 {
        self.pre[t.0][p.0]
    }

    /// Arc weight `W(t, p)`; zero when there is no arc.
    pub fn output_weight(&self, t: TransitionId, p: PlaceId) -> u32 {
        self.post[t.0][p.0]
    }

    /// `W(t, p) - W(p, t)`.
    pub fn incidence(&self, p: PlaceId, t: TransitionId) -> i64 {
        i64::from(self.post[t.0][p.0]) - i64::from(self.pre[t.0][p.0])
    }

    /// Preset of `t` with weights.
    pub fn preset(&self, t: TransitionId) -> impl Iterator<Item = (PlaceId, u32)> + '_ {
        self.pre[t.0]
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0)
            .map(|(p, &w)| (PlaceId(p), w))
    }

    /// Postset of `t` with weights.
    pub fn postset(&self, t: TransitionId) -> impl Iterator<Item = (PlaceId, u32)> + '_ {
        self.post[t.0]
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0)
            .map(|(p, &w)| (PlaceId(p), w))
    }

    fn check_transition(&self, t: TransitionId) -> Result<()> {
        if t.0 < self.transitions.len() {
            Ok(())
        } else {
            Err(Error::UnknownTransition(format!("#{}", t.0)))
        }
    }

    fn check_marking(&self, m: &Marking) -> Result<()> {
        if m.len() == self.places.len() {
            Ok(())
        } else {
            Err(Error::MarkingLength {
                expected: self.places.len(),
                found: m.len(),
            })
        }
    }

    pub fn enabled(&self, m: &Marking, t: TransitionId) -> Result<bool> {
        self.check_transition(t)?;
        self.check_marking(m)?;
        Ok(self.is_enabled(m, t))
    }

    /// Unchecked variant of [`PetriNet::enabled`]; panics on foreign ids.
    pub fn is_enabled(&self, m: &Marking, t: TransitionId) -> bool {
        self.pre[t.0].iter().zip(&m.0).all(|(w, k)| k >= w)
    }

    /// Fires `t` if enabled, without validating ids.
    pub fn try_fire(&self, m: &Marking, t: TransitionId) -> Option<Marking> {
        if !self.is_enabled(m, t) {
            return None;
        }
        let tokens =
            m.0.iter()
                .zip(&self.pre[t.0])
                .zip(&self.post[t.0])
                .map(|((k, w_in), w_out)| k - w_in + w_out)
                .collect();
        Some(Marking(tokens))
    }

    pub fn fire(&self, m: &Marking, t: TransitionId) -> Result<Marking> {
        self.fire_at(m, t, None)
    }

    fn fire_at(&self, m: &Marking, t: TransitionId, index: Option<usize>) -> Result<Marking> {
        self.check_transition(t)?;
        self.check_marking(m)?;
        self.try_fire(m, t).ok_or_else(|| {
            let (p, needed) = self
                .preset(t)
                .find(|&(p, w)| m.get(p) < w)
                .expect("disabled transition has a deficient input place");
            Error::NotEnabled {
                transition: self.transition_name(t).to_owned(),
                place: self.place_name(p).to_owned(),
                tokens: m.get(p),
                needed,
                index,
            }
        })
    }

    /// Fires `s` step by step; the error names the first disabled step.
    pub fn fire_sequence(&self, m: &Marking, s: &[TransitionId]) -> Result<Marking> {
        self.check_marking(m)?;
        s.iter()
            .enumerate()
            .try_fold(m.clone(), |cur, (i, &t)| self.fire_at(&cur, t, Some(i)))
    }

    /// The subnet on the same places containing only `keep`, in declaration
    /// order.
    pub fn induced_subnet(&self, keep: &[TransitionId]) -> Result<PetriNet> {
        for &t in keep {
            self.check_transition(t)?;
        }
        let kept: Vec<usize> = (0..self.transitions.len())
            .filter(|i| keep.contains(&TransitionId(*i)))
            .collect();
        Ok(PetriNet {
            places: self.places.clone(),
            transitions: kept.iter().map(|&i| self.transitions[i].clone()).collect(),
            pre: kept.iter().map(|&i| self.pre[i].clone()).collect(),
            post: kept.iter().map(|&i| self.post[i].clone()).collect(),
            initial: self.initial.clone(),
        })
    }

    /// Replaces the initial marking.
    pub fn with_initial(&self, m: Marking) -> Result<PetriNet> {
        self.check_marking(&m)?;
        Ok(PetriNet {
            initial: m,
            ..self.clone()
        })
    }
}

/// Parikh vector of `s` over the ordered `index_set`.
pub fn parikh(s: &[TransitionId], index_set: &[TransitionId]) -> Result<ParikhVector> {
    let mut counts = vec![0; index_set.len()];
    for t in s {
        let i = index_set
            .iter()
            .position(|x| x == t)
            .ok_or_else(|| Error::OutsideIndexSet(format!("#{}", t.0)))?;
        counts[i] += 1;
    }
    Ok(ParikhVector(counts))
}

/// Order-preserving erasure of every transition outside `keep`.
pub fn project(s: &[TransitionId], keep: &[TransitionId]) -> TransitionSequence {
    s.iter().copied().filter(|t| keep.contains(t)).collect()
}

/// Atomic label symbol. Multi-character symbols compare as a whole.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Label(String);

impl Label {
    pub fn new(s: impl Into<String>) -> Self {
        Label(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label(s.to_owned())
    }
}

/// Concatenates a label word into a string (labels are atoms, so single
/// character labels render as e.g. `ac`).
pub fn word_string(word: &[Label]) -> String {
    word.iter().map(Label::as_str).collect()
}

/// Observation level of a label: low (explicit) or high (implicit).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Low,
    High,
}

/// A net system with a total labeling and a low/high label partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledPetriNet {
    net: PetriNet,
    labels: Vec<Label>,
    levels: BTreeMap<Label, Level>,
    low: Vec<TransitionId>,
    high: Vec<TransitionId>,
}

impl LabeledPetriNet {
    pub fn builder() -> NetBuilder {
        NetBuilder::default()
    }

    pub fn net(&self) -> &PetriNet {
        &self.net
    }

    pub fn label(&self, t: TransitionId) -> &Label {
        &self.labels[t.0]
    }

    pub fn level(&self, t: TransitionId) -> Level {
        self.levels[&self.labels[t.0]]
    }

    pub fn label_levels(&self) -> &BTreeMap<Label, Level> {
        &self.levels
    }

    /// Explicit (low-level) transitions `T_L`, in declaration order.
    pub fn low(&self) -> &[TransitionId] {
        &self.low
    }

    /// Implicit (high-level) transitions `T_H`, in declaration order.
    pub fn high(&self) -> &[TransitionId] {
        &self.high
    }

    pub fn is_low(&self, t: TransitionId) -> bool {
        self.level(t) == Level::Low
    }

    /// Index of `t` inside [`LabeledPetriNet::high`].
    pub fn high_index(&self, t: TransitionId) -> Option<usize> {
        self.high.iter().position(|&h| h == t)
    }

    pub fn name(&self, t: TransitionId) -> &str {
        self.net.transition_name(t)
    }

    pub fn names(&self, s: &[TransitionId]) -> Vec<String> {
        s.iter().map(|&t| self.name(t).to_owned()).collect()
    }

    pub fn label_word(&self, s: &[TransitionId]) -> Vec<Label> {
        s.iter().map(|&t| self.labels[t.0].clone()).collect()
    }

    /// The labeled `T'`-induced subnet system (labeling restricted).
    pub fn induced(&self, keep: &[TransitionId]) -> Result<LabeledPetriNet> {
        let net = self.net.induced_subnet(keep)?;
        let labels: Vec<Label> = self
            .net
            .transitions()
            .filter(|t| keep.contains(t))
            .map(|t| self.labels[t.0].clone())
            .collect();
        Ok(LabeledPetriNet::assemble(net, labels, self.levels.clone()))
    }

    /// Low-level subnet system `(N_L, m_0, l_L, A_L)`.
    pub fn low_subnet(&self) -> LabeledPetriNet {
        self.induced(&self.low).expect("low transitions are declared")
    }

    /// Same structure and labeling, different initial marking.
    pub fn with_initial(&self, m: Marking) -> Result<LabeledPetriNet> {
        Ok(LabeledPetriNet {
            net: self.net.with_initial(m)?,
            ..self.clone()
        })
    }

    fn assemble(net: PetriNet, labels: Vec<Label>, levels: BTreeMap<Label, Level>) -> Self {
        let (low, high) = net.transitions().partition(|t| levels[&labels[t.0]] == Level::Low);
        LabeledPetriNet {
            net,
            labels,
            levels,
            low,
            high,
        }
    }
}

/// Incremental constructor enforcing the net invariants at `build`.
#[derive(Debug, Default, Clone)]
pub struct NetBuilder {
    places: Vec<(String, u32)>,
    transitions: Vec<(String, Label, Level)>,
    arcs: Vec<(String, String, u32)>,
}

impl NetBuilder {
    pub fn place(mut self, id: impl Into<String>, tokens: u32) -> Self {
        self.places.push((id.into(), tokens));
        self
    }

    pub fn transition(mut self, id: impl Into<String>, label: impl Into<String>, level: Level) -> Self {
        self.transitions.push((id.into(), Label::new(label.into()), level));
        self
    }

    /// Arc between a place and a transition, in either direction.
    pub fn arc(mut self, from: impl Into<String>, to: impl Into<String>, weight: u32) -> Self {
        self.arcs.push((from.into(), to.into(), weight));
        self
    }

    pub fn build(self) -> Result<LabeledPetriNet> {
        let mut seen = std::collections::HashSet::new();
        for id in self
            .places
            .iter()
            .map(|p| &p.0)
            .chain(self.transitions.iter().map(|t| &t.0))
        {
            if !seen.insert(id.as_str()) {
                return Err(Error::DuplicateId(id.clone()));
            }
        }

        let mut levels = BTreeMap::new();
        for (_, label, level) in &self.transitions {
            match levels.insert(label.clone(), *level) {
                Some(prev) if prev != *level => return Err(Error::LabelLevelConflict(label.to_string())),
                _ => {}
            }
        }

        let places: Vec<String> = self.places.iter().map(|p| p.0.clone()).collect();
        let transitions: Vec<String> = self.transitions.iter().map(|t| t.0.clone()).collect();
        let mut pre = vec![vec![0u32; places.len()]; transitions.len()];
        let mut post = vec![vec![0u32; places.len()]; transitions.len()];
        let place_index = |id: &str| places.iter().position(|p| p == id);
        let transition_index = |id: &str| transitions.iter().position(|t| t == id);

        for (from, to, weight) in &self.arcs {
            if *weight == 0 {
                return Err(Error::Document {
                    field: format!("arc {from} -> {to}"),
                    message: "weight must be at least 1".into(),
                });
            }
            match (
                place_index(from),
                transition_index(from),
                place_index(to),
                transition_index(to),
            ) {
                (Some(p), _, _, Some(t)) => pre[t][p] += weight,
                (_, Some(t), Some(p), _) => post[t][p] += weight,
                (None, None, ..) => return Err(Error::UnknownPlace(from.clone())),
                (_, _, None, None) => return Err(Error::UnknownPlace(to.clone())),
                _ => {
                    return Err(Error::Document {
                        field: format!("arc {from} -> {to}"),
                        message: "arcs must connect a place and a transition".into(),
                    })
                }
            }
        }

        let net = PetriNet {
            places,
            transitions,
            pre,
            post,
            initial: Marking(self.places.iter().map(|p| p.1).collect()),
        };
        let labels = self.transitions.into_iter().map(|t| t.1).collect();
        Ok(LabeledPetriNet::assemble(net, labels, levels))
    }
}
