//! Acceptance checks. Each criterion prints one PASS/FAIL line; the run
//! exits non-zero if any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use snni_core::basis::Limits;
use snni_core::explain::explanations_bounded;
use snni_core::fixtures;
use snni_core::oracle::{explicit_projections, justifications, reachability_graph, DEFAULT_CAP};
use snni_core::random::{random_verified_net, RandomNetParams};
use snni_core::{
    build_brg, build_sv, build_ubrg, decide_snni, decide_snni_pairwise, minimal_e_vectors, minimality_filter,
    serialize_net, snni_oracle, AnalysisReport, Label, Marking, ParikhVector, Tag, TransitionSequence, VerifiedNet,
};

fn m(tokens: &[u32]) -> Marking {
    Marking::new(tokens.to_vec())
}

/// Marking of fig1 with a single token in place `p_i`.
fn unit(i: usize) -> Marking {
    let mut v = vec![0; 9];
    v[i - 1] = 1;
    m(&v)
}

fn word(s: &str) -> Vec<Label> {
    s.chars().map(|c| Label::new(c.to_string())).collect()
}

fn fig1() -> VerifiedNet {
    VerifiedNet::new(fixtures::fig1(), DEFAULT_CAP).unwrap()
}

fn fig6() -> VerifiedNet {
    VerifiedNet::new(fixtures::fig6(), DEFAULT_CAP).unwrap()
}

fn criterion_1() {
    let net = fig1();
    let brg = build_brg(&net);
    let got: BTreeSet<Marking> = brg.basis_markings().iter().cloned().collect();
    let expected: BTreeSet<Marking> = [1, 3, 2, 5, 8, 6, 7, 9].into_iter().map(unit).collect();
    assert_eq!(brg.basis_markings().len(), 8);
    assert_eq!(got, expected);
}

fn criterion_2() {
    let net = fig1();
    let t = |name: &str| net.net().transition_id(name).unwrap();
    let m0 = net.net().initial_marking().clone();
    let y1 = minimal_e_vectors(&net, &m0, t("l_1")).unwrap().evector_set();
    assert_eq!(y1, BTreeSet::from([ParikhVector::new(vec![1, 0])]));
    let y5 = minimal_e_vectors(&net, &m0, t("l_5")).unwrap().evector_set();
    assert_eq!(y5, BTreeSet::from([ParikhVector::new(vec![0, 0])]));

    let j = justifications(&net, &word("ab"), 16);
    assert!(!j.incomplete);
    let expected: BTreeMap<TransitionSequence, BTreeSet<ParikhVector>> = BTreeMap::from([
        (
            vec![t("l_1"), t("l_2")],
            BTreeSet::from([ParikhVector::new(vec![1, 0])]),
        ),
        (
            vec![t("l_8"), t("l_9")],
            BTreeSet::from([ParikhVector::new(vec![0, 0])]),
        ),
    ]);
    assert_eq!(j.pairs, expected);
}

fn criterion_3() {
    let ubrg = build_ubrg(&fig1()).unwrap();
    assert_eq!(ubrg.m_dup, BTreeSet::from([unit(1), unit(3)]));
    assert_eq!(ubrg.phi_alpha, BTreeSet::from([Tag::Alpha(1)]));
    assert_eq!(ubrg.phi_beta, BTreeSet::from([Tag::Beta(1)]));
}

fn criterion_4() {
    let net = fig1();
    let ubrg = build_ubrg(&net).unwrap();
    let sv = build_sv(&net, &ubrg).unwrap();
    assert_eq!(sv.psi_alpha, BTreeSet::from([Tag::Alpha(1)]));
    assert_eq!(sv.psi_beta, BTreeSet::from([Tag::Beta(1)]));
    let r = AnalysisReport::run(fixtures::fig1(), DEFAULT_CAP, Limits::default()).unwrap();
    assert_eq!(r.psi_alpha, BTreeSet::from([Tag::Alpha(1)]));
    assert_eq!(r.psi_beta, BTreeSet::from([Tag::Beta(1)]));
    assert!(decide_snni(&net).unwrap().snni);
}

fn criterion_5() {
    let net = fig6();
    let ubrg = build_ubrg(&net).unwrap();
    let sv = build_sv(&net, &ubrg).unwrap();
    assert_eq!(sv.psi_alpha, BTreeSet::from([Tag::Alpha(1)]));
    assert!(sv.psi_beta.is_empty());
    let r = AnalysisReport::run(fixtures::fig6(), DEFAULT_CAP, Limits::default()).unwrap();
    assert_eq!(r.psi_alpha, BTreeSet::from([Tag::Alpha(1)]));
    assert!(r.psi_beta.is_empty());

    let v = decide_snni(&net).unwrap();
    assert!(!v.snni);
    assert!(v.missing_alpha.is_empty());
    assert_eq!(v.missing_beta, BTreeSet::from([Tag::Beta(1)]));

    let oracle = snni_oracle(&net, DEFAULT_CAP).unwrap();
    assert!(!oracle.snni);
    let cex = oracle.counterexample.unwrap();
    assert!(cex.starts_with(&word("ac")), "counterexample {cex:?}");
    let low = snni_core::oracle::low_label_language(&net, DEFAULT_CAP).unwrap();
    assert!(!low.accepts(&word("ac")));
}

const BATTERY: u64 = 200;

fn criterion_6() {
    let params = RandomNetParams::default();
    let start = Instant::now();
    let mut disagreements = 0;
    let mut pairwise_disagreements = 0;
    let mut not_snni = 0;
    for seed in 0..BATTERY {
        let (net, _) = random_verified_net(seed, &params);
        let verdict = decide_snni(&net).unwrap();
        let oracle = snni_oracle(&net, params.cap).unwrap();
        if !oracle.snni {
            not_snni += 1;
        }
        if verdict.snni != oracle.snni {
            disagreements += 1;
            eprintln!("seed {seed}: verifier {} oracle {}", verdict.snni, oracle.snni);
            eprintln!("{}", serialize_net(&net));
        }
        if decide_snni_pairwise(&net).unwrap().snni != oracle.snni {
            pairwise_disagreements += 1;
        }
    }
    println!(
        "  battery: {BATTERY} nets, {not_snni} NotSNNI, pairwise-rule disagreements {pairwise_disagreements}, {:.2?}",
        start.elapsed()
    );
    assert_eq!(disagreements, 0);
}

fn brg_projections(net: &VerifiedNet, depth: usize) -> BTreeSet<TransitionSequence> {
    let brg = build_brg(net);
    let mut out = BTreeSet::new();
    let mut stack: Vec<(usize, TransitionSequence)> = brg.nfa.initial().iter().map(|&s| (s, Vec::new())).collect();
    while let Some((s, seq)) = stack.pop() {
        if seq.len() < depth {
            for e in brg.nfa.outgoing(s) {
                let mut next = seq.clone();
                next.push(e.event.transition);
                stack.push((e.to, next));
            }
        }
        out.insert(seq);
    }
    out
}

fn criterion_7() {
    let params = RandomNetParams::default();
    for seed in 1000..1050 {
        let (net, _) = random_verified_net(seed, &params);
        let brg = brg_projections(&net, 8);
        let lang = explicit_projections(&net, 8);
        if brg != lang {
            eprintln!("seed {seed}:\n{}", serialize_net(&net));
        }
        assert_eq!(brg, lang, "seed {seed}");
    }
}

fn criterion_8() {
    let params = RandomNetParams::default();
    let mut queries = 0;
    for seed in 2000..2040 {
        let (net, _) = random_verified_net(seed, &params);
        let reach = reachability_graph(&net, params.cap).unwrap();
        let exhaustive = reach.state_count();
        for marking in reach.markings() {
            for &t in net.low() {
                let fast = minimal_e_vectors(&net, marking, t).unwrap().evector_set();
                let all = explanations_bounded(&net, marking, t, exhaustive).unwrap();
                let slow = minimality_filter(all.iter().map(|e| &e.evector));
                assert_eq!(fast, slow, "seed {seed}, marking {marking}, {}", net.name(t));
                queries += 1;
            }
        }
    }
    println!("  {queries} (m, t) queries");
    assert!(queries >= 100);
}

fn criterion_9() {
    for (name, net) in [("fig1", fixtures::fig1()), ("fig6", fixtures::fig6())] {
        let r = AnalysisReport::run(net, DEFAULT_CAP, Limits::default()).unwrap();
        let s = &r.sizes;
        let x = s.reachable_markings;
        println!(
            "  {name}: x={x} ubrg={} sv={} closed_sv={} 2x^2={}",
            s.ubrg_nodes,
            s.sv_nodes.unwrap(),
            s.closed_sv_nodes,
            2 * x * x
        );
        let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        for key in [
            "reachable_markings",
            "ubrg_nodes",
            "sv_nodes",
            "closed_sv_nodes",
            "basis_markings",
        ] {
            assert!(json["sizes"][key].is_u64(), "{key} missing");
        }
        if name == "fig1" {
            assert_eq!(x, 9);
            assert!(s.sv_nodes.unwrap() <= 162);
        }
    }
}

fn main() {
    let criteria: [(&str, fn()); 9] = [
        ("1 fig1 basis markings", criterion_1),
        ("2 fig1 minimal explanations and justifications", criterion_2),
        ("3 fig1 unfolding tags and duplicates", criterion_3),
        ("4 fig1 verifier sets and SNNI verdict", criterion_4),
        ("5 fig6 verifier sets, NotSNNI, oracle counterexample", criterion_5),
        ("6 random battery against the oracle", criterion_6),
        ("7 BRG projections equal explicit projections", criterion_7),
        ("8 minimal e-vectors against enumeration", criterion_8),
        ("9 size metrics reported", criterion_9),
    ];
    let mut failed = Vec::new();
    for (name, f) in criteria {
        let start = Instant::now();
        let ok = catch_unwind(AssertUnwindSafe(f)).is_ok();
        println!(
            "{} criterion {name} ({:.2?})",
            if ok { "PASS" } else { "FAIL" },
            start.elapsed()
        );
        if !ok {
            failed.push(name);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
