//! Serializable summary of one verifier run.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write};
use std::time::Instant;

use serde::Serialize;

use crate::assumptions::VerifiedNet;
use crate::basis::{build_brg, Limits, Tag};
use crate::error::Result;
use crate::net::{word_string, Label, LabeledPetriNet};
use crate::oracle::low_label_language;
use crate::verifier::{analyze, Analysis, Verdict};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Sizes {
    pub reachable_markings: usize,
    pub low_reachable_markings: usize,
    pub basis_markings: usize,
    pub brg_arcs: usize,
    pub ubrg_nodes: usize,
    /// `None` when the pairwise verifier exceeded its node budget.
    pub sv_nodes: Option<usize>,
    pub closed_sv_nodes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timings {
    pub assumptions_ms: f64,
    pub brg_ms: f64,
    pub verifier_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub snni: bool,
    pub phi_alpha: BTreeSet<Tag>,
    pub phi_beta: BTreeSet<Tag>,
    pub psi_alpha: BTreeSet<Tag>,
    pub psi_beta: BTreeSet<Tag>,
    pub m_dup: Vec<String>,
    pub verdict: Verdict,
    /// Verdict of the pairwise (one low marking per node) verifier.
    pub pairwise: Option<Verdict>,
    pub sizes: Sizes,
    pub timings: Timings,
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1000.0
}

impl AnalysisReport {
    /// Runs the whole pipeline on `lpn`.
    pub fn run(lpn: LabeledPetriNet, cap: usize, limits: Limits) -> Result<AnalysisReport> {
        let start = Instant::now();
        let net = VerifiedNet::new(lpn, cap)?;
        let assumptions_ms = ms(start);
        let start = Instant::now();
        let brg = build_brg(&net);
        let brg_ms = ms(start);
        let start = Instant::now();
        let analysis = analyze(&net, limits)?;
        let verifier_ms = ms(start);
        let low_reachable_markings = low_label_language(&net, cap)?.state_count();
        let sizes = Sizes {
            reachable_markings: net.reachable_markings(),
            low_reachable_markings,
            basis_markings: brg.basis_markings().len(),
            brg_arcs: brg.nfa.edges().len(),
            ubrg_nodes: analysis.ubrg.node_count(),
            sv_nodes: analysis.sv.as_ref().map(|sv| sv.node_count()),
            closed_sv_nodes: analysis.closed.node_count(),
        };
        Ok(Self::from_analysis(
            analysis,
            sizes,
            Timings {
                assumptions_ms,
                brg_ms,
                verifier_ms,
            },
        ))
    }

    pub fn from_analysis(analysis: Analysis, sizes: Sizes, timings: Timings) -> AnalysisReport {
        let Analysis {
            ubrg,
            closed,
            verdict,
            pairwise_verdict,
            ..
        } = analysis;
        AnalysisReport {
            snni: verdict.snni,
            phi_alpha: ubrg.phi_alpha,
            phi_beta: ubrg.phi_beta,
            psi_alpha: closed.psi_alpha,
            psi_beta: closed.psi_beta,
            m_dup: ubrg.m_dup.iter().map(|m| m.to_string()).collect(),
            verdict,
            pairwise: pairwise_verdict,
            sizes,
            timings,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn tag_set(tags: &BTreeSet<Tag>) -> String {
    let v: Vec<String> = tags.iter().map(|t| t.to_string()).collect();
    format!("{{{}}}", v.join(", "))
}

fn words(map: &BTreeMap<Tag, Vec<Label>>) -> String {
    let mut out = String::new();
    for (tag, w) in map {
        let _ = write!(out, " {tag}:\"{}\"", word_string(w));
    }
    out
}

impl fmt::Display for AnalysisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "verdict: {}", if self.snni { "SNNI" } else { "NotSNNI" })?;
        writeln!(
            f,
            "Phi_alpha = {}  Psi_alpha = {}",
            tag_set(&self.phi_alpha),
            tag_set(&self.psi_alpha)
        )?;
        writeln!(
            f,
            "Phi_beta  = {}  Psi_beta  = {}",
            tag_set(&self.phi_beta),
            tag_set(&self.psi_beta)
        )?;
        writeln!(f, "M_dup = {{{}}}", self.m_dup.join(", "))?;
        if !self.snni {
            writeln!(
                f,
                "missing: {} {}",
                tag_set(&self.verdict.missing_alpha),
                tag_set(&self.verdict.missing_beta)
            )?;
            writeln!(f, "witness words:{}", words(&self.verdict.witness_words))?;
            writeln!(f, "leak words:{}", words(&self.verdict.leak_words))?;
        }
        let pairwise = match &self.pairwise {
            Some(v) if v.snni => "SNNI",
            Some(_) => "NotSNNI",
            None => "budget exceeded",
        };
        writeln!(f, "pairwise verifier: {pairwise}")?;
        let s = &self.sizes;
        writeln!(
            f,
            "sizes: reachable={} low_reachable={} basis={} brg_arcs={} ubrg={} sv={} closed_sv={}",
            s.reachable_markings,
            s.low_reachable_markings,
            s.basis_markings,
            s.brg_arcs,
            s.ubrg_nodes,
            s.sv_nodes.map_or("-".to_owned(), |n| n.to_string()),
            s.closed_sv_nodes
        )?;
        let t = &self.timings;
        writeln!(
            f,
            "timings (ms): assumptions={:.3} brg={:.3} verifier={:.3}",
            t.assumptions_ms, t.brg_ms, t.verifier_ms
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::oracle::DEFAULT_CAP;

    #[test]
    fn fig1_report() {
        let r = AnalysisReport::run(fixtures::fig1(), DEFAULT_CAP, Limits::default()).unwrap();
        assert!(r.snni);
        assert_eq!(r.sizes.reachable_markings, 9);
        assert_eq!(r.sizes.low_reachable_markings, 5);
        assert_eq!(r.sizes.basis_markings, 8);
        assert!(r.sizes.sv_nodes.unwrap() <= 2 * 9 * 9);
        let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(json["phi_beta"][0], "beta_1");
        assert!(r.to_string().starts_with("verdict: SNNI"));
    }

    #[test]
    fn fig6_report() {
        let r = AnalysisReport::run(fixtures::fig6(), DEFAULT_CAP, Limits::default()).unwrap();
        assert!(!r.snni);
        assert!(r.psi_beta.is_empty());
        let text = r.to_string();
        assert!(text.contains("β_1:\"aca\""), "{text}");
        assert!(text.contains("leak words: β_1:\"ac\""), "{text}");
    }
}
