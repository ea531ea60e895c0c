//! Bundled example nets.
//!
//! `fig1` is a nine-place, eleven-transition system with low labels
//! `a..e` and high labels `f, g`:
//!
//! ```text
//! h_1(f): p_1 -> p_2    l_1(a): p_2 -> p_3    l_2(b): p_3 -> p_2
//! h_2(g): p_1 -> p_4    l_3(c): p_4 -> p_5    l_4(d): p_5 -> p_9
//! l_5(c): p_1 -> p_6    l_6(d): p_6 -> p_7    l_7(e): p_7 -> p_9
//! l_8(a): p_1 -> p_8    l_9(b): p_8 -> p_1
//! ```
//!
//! with one token in `p_1`. `fig6` is identical except that `l_2` emits `c`.

use crate::document::parse_net;
use crate::net::LabeledPetriNet;

pub const FIG1_JSON: &str = include_str!("../fixtures/fig1.json");
pub const FIG6_JSON: &str = include_str!("../fixtures/fig6.json");
pub const UNBOUNDED_JSON: &str = include_str!("../fixtures/unbounded.json");

pub fn fig1() -> LabeledPetriNet {
    parse_net(FIG1_JSON.as_bytes()).expect("bundled fixture parses")
}

pub fn fig6() -> LabeledPetriNet {
    parse_net(FIG6_JSON.as_bytes()).expect("bundled fixture parses")
}

/// A source transition feeding a place: unbounded after one firing.
pub fn unbounded() -> LabeledPetriNet {
    parse_net(UNBOUNDED_JSON.as_bytes()).expect("bundled fixture parses")
}

/// Looks up a bundled fixture by name.
pub fn by_name(name: &str) -> Option<LabeledPetriNet> {
    match name {
        "fig1" => Some(fig1()),
        "fig6" => Some(fig6()),
        "unbounded" => Some(unbounded()),
        _ => None,
    }
}
