//! Seeded generator of small labeled nets for cross-validation.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::assumptions::{check_assumptions, VerifiedNet};
use crate::net::{LabeledPetriNet, Level};

const LOW_LABELS: [&str; 3] = ["a", "b", "c"];
const HIGH_LABELS: [&str; 2] = ["f", "g"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomNetParams {
    pub max_places: usize,
    pub max_transitions: usize,
    /// Probability that a transition is high-level.
    pub high_ratio: f64,
    /// Probability of an arc weight of 2 instead of 1.
    pub heavy_arc: f64,
    /// Exploration cap used when rejecting unbounded nets.
    pub cap: usize,
}

impl Default for RandomNetParams {
    fn default() -> Self {
        RandomNetParams {
            max_places: 6,
            max_transitions: 8,
            high_ratio: 0.3,
            heavy_arc: 0.05,
            cap: 2000,
        }
    }
}

/// One draw; the result may violate boundedness or acyclicity.
pub fn random_net(rng: &mut impl Rng, params: &RandomNetParams) -> LabeledPetriNet {
    let places = rng.gen_range(2..=params.max_places.max(2));
    let transitions = rng.gen_range(2..=params.max_transitions.max(2));
    let marked = rng.gen_range(0..places);
    let mut b = LabeledPetriNet::builder();
    for p in 0..places {
        let tokens = if p == marked { 1 } else { u32::from(rng.gen_bool(0.15)) };
        b = b.place(format!("p{p}"), tokens);
    }
    let weight = |rng: &mut dyn rand::RngCore| if rng.gen_bool(params.heavy_arc) { 2 } else { 1 };
    for t in 0..transitions {
        let high = rng.gen_bool(params.high_ratio);
        let (name, label, level) = if high {
            (
                format!("h{t}"),
                HIGH_LABELS[rng.gen_range(0..HIGH_LABELS.len())],
                Level::High,
            )
        } else {
            (
                format!("l{t}"),
                LOW_LABELS[rng.gen_range(0..LOW_LABELS.len())],
                Level::Low,
            )
        };
        b = b.transition(&name, label, level);
        let inputs = rng.gen_range(1..=2.min(places));
        for p in sample(rng, places, inputs) {
            let w = weight(rng);
            b = b.arc(format!("p{p}"), &name, w);
        }
        let outputs = rng.gen_range(0..=2.min(places));
        for p in sample(rng, places, outputs) {
            let w = weight(rng);
            b = b.arc(&name, format!("p{p}"), w);
        }
    }
    b.build().expect("generated nets are well formed")
}

/// A net satisfying both assumptions, drawn by rejection sampling from the
/// stream seeded with `seed`. Also returns the number of draws.
pub fn random_verified_net(seed: u64, params: &RandomNetParams) -> (VerifiedNet, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1.. {
        let lpn = random_net(&mut rng, params);
        if check_assumptions(&lpn, params.cap).holds() {
            let net = VerifiedNet::new(lpn, params.cap).expect("assumptions just checked");
            return (net, attempt);
        }
    }
    unreachable!()
}
