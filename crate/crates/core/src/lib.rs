//! Strong non-deterministic non-interference (SNNI) analysis for bounded
//! labeled Petri nets.
//!
//! The pipeline checks the two standing assumptions (boundedness, acyclic
//! high-level subnet), builds the basis reachability graph and its tree
//! unfolding, and synchronizes the unfolding with the low-level subnet to
//! decide whether low-level observers can ever infer high-level activity.
//! An independent language-equality oracle is provided for cross-checking.

pub mod assumptions;
pub mod basis;
pub mod document;
pub mod dot;
pub mod error;
pub mod explain;
pub mod fixtures;
pub mod net;
pub mod nfa;
pub mod oracle;
pub mod random;
pub mod report;
pub mod verifier;

pub use assumptions::{check_assumptions, AssumptionReport, Boundedness, VerifiedNet};
pub use basis::{build_brg, build_ubrg, phi, phi_prime, Brg, BrgEvent, Limits, Tag, UbrgNode, UbrgResult};
pub use document::{parse_net, serialize_net, NetDocument};
pub use error::{Error, Result};
pub use explain::{explanations_bounded, minimal_e_vectors, minimality_filter, Explanation, MinimalExplanationSet};
pub use net::{
    parikh, project, Label, LabeledPetriNet, Level, Marking, ParikhVector, PetriNet, PlaceId, TransitionId,
    TransitionSequence,
};
pub use nfa::Nfa;
pub use oracle::{snni_oracle, OracleVerdict, ReachGraph};
pub use report::AnalysisReport;
pub use verifier::{build_closed_sv, build_sv, decide_snni, decide_snni_pairwise, parallel_composition, Verdict};
