//! Graphviz export. Output depends only on the graph, so repeated exports of
//! the same input are byte-identical.

use std::fmt::Write;

use crate::basis::{Brg, UbrgResult};
use crate::net::{word_string, LabeledPetriNet};
use crate::oracle::ReachGraph;
use crate::verifier::{ClosedSvResult, SvResult};

pub enum GraphRef<'a> {
    Brg(&'a Brg),
    Ubrg(&'a UbrgResult),
    Sv(&'a SvResult, &'a UbrgResult),
    ClosedSv(&'a ClosedSvResult, &'a UbrgResult),
    Reach(&'a ReachGraph),
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

struct Dot {
    out: String,
}

impl Dot {
    fn new(name: &str) -> Self {
        Dot {
            out: format!("digraph {name} {{\n"),
        }
    }

    fn node(&mut self, id: usize, label: &str, attrs: &[&str]) {
        let _ = write!(self.out, "  n{id} [label=\"{}\"", escape(label));
        for a in attrs {
            let _ = write!(self.out, ", {a}");
        }
        self.out.push_str("];\n");
    }

    fn edge(&mut self, from: usize, to: usize, label: &str) {
        let _ = writeln!(self.out, "  n{from} -> n{to} [label=\"{}\"];", escape(label));
    }

    fn finish(mut self) -> String {
        self.out.push_str("}\n");
        self.out
    }
}

pub fn export_dot(lpn: &LabeledPetriNet, graph: GraphRef<'_>) -> String {
    match graph {
        GraphRef::Brg(brg) => {
            let mut dot = Dot::new("brg");
            for (i, m) in brg.nfa.states().iter().enumerate() {
                let attrs: &[&str] = if brg.nfa.initial().contains(&i) {
                    &["shape=doublecircle"]
                } else {
                    &[]
                };
                dot.node(i, &format!("m{i}\n{m}"), attrs);
            }
            for e in brg.nfa.edges() {
                dot.edge(e.from, e.to, &e.event.describe(lpn));
            }
            dot.finish()
        }
        GraphRef::Ubrg(ubrg) => {
            let mut dot = Dot::new("ubrg");
            for i in 0..ubrg.node_count() {
                let n = ubrg.node(i);
                let mut label = n.marking.to_string();
                let mut attrs = Vec::new();
                if let Some(tag) = n.tag {
                    let _ = write!(label, "\n{tag}");
                    attrs.push("peripheries=2");
                }
                if n.duplicated {
                    attrs.push("style=dashed");
                }
                dot.node(i, &label, &attrs);
            }
            for e in ubrg.tree.edges() {
                dot.edge(e.from, e.to, &e.event.describe(lpn));
            }
            dot.finish()
        }
        GraphRef::Sv(sv, ubrg) => {
            let mut dot = Dot::new("sv");
            for (i, n) in sv.tree.states().iter().enumerate() {
                let u = ubrg.node(n.ubrg_node);
                let mut label = format!("{} ; {}", u.marking, n.low_marking);
                let mut attrs = Vec::new();
                if let Some(tag) = u.tag {
                    let _ = write!(label, "\n{tag}");
                    attrs.push("peripheries=2");
                }
                if sv.m_dup_prime.contains(&i) || sv.plain_duplicates.contains(&i) {
                    attrs.push("style=dashed");
                }
                dot.node(i, &label, &attrs);
            }
            for e in sv.tree.edges() {
                dot.edge(
                    e.from,
                    e.to,
                    &format!("({},{})", lpn.name(e.event.explicit), lpn.name(e.event.low)),
                );
            }
            dot.finish()
        }
        GraphRef::ClosedSv(sv, ubrg) => {
            let mut dot = Dot::new("closed_sv");
            for (i, n) in sv.tree.states().iter().enumerate() {
                let u = ubrg.node(n.ubrg_node);
                let set: Vec<String> = n.low_markings.iter().map(|m| m.to_string()).collect();
                let mut label = format!("{} ; {{{}}}", u.marking, set.join(","));
                let mut attrs = Vec::new();
                if let Some(tag) = u.tag {
                    let _ = write!(label, "\n{tag}");
                    attrs.push("peripheries=2");
                }
                if sv.m_dup_prime.contains(&i) || sv.merged.contains(&i) {
                    attrs.push("style=dashed");
                }
                dot.node(i, &label, &attrs);
            }
            for e in sv.tree.edges() {
                dot.edge(e.from, e.to, lpn.name(e.event));
            }
            let base = sv.tree.state_count();
            for (k, leak) in sv.leaks.iter().enumerate() {
                let blamed: Vec<String> = leak.blamed.iter().map(|t| t.to_string()).collect();
                dot.node(
                    base + k,
                    &format!("leak {}\n{}", word_string(&leak.word), blamed.join(" ")),
                    &["shape=box", "color=red"],
                );
                dot.edge(leak.node, base + k, &leak.transition);
            }
            dot.finish()
        }
        GraphRef::Reach(reach) => {
            let mut dot = Dot::new("reach");
            for (i, m) in reach.nfa.states().iter().enumerate() {
                dot.node(i, &m.to_string(), &[]);
            }
            for e in reach.nfa.edges() {
                let label = match &e.label {
                    Some(l) => format!("{}:{}", lpn.name(e.event), l),
                    None => lpn.name(e.event).to_owned(),
                };
                dot.edge(e.from, e.to, &label);
            }
            dot.finish()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assumptions::VerifiedNet;
    use crate::basis::{build_brg, build_ubrg};
    use crate::fixtures;
    use crate::nfa::Nfa;

    #[test]
    fn fig1_brg_export() {
        let net = VerifiedNet::new(fixtures::fig1(), 1000).unwrap();
        let text = export_dot(&net, GraphRef::Brg(&build_brg(&net)));
        assert_eq!(
            text.lines()
                .filter(|l| l.contains("[label=") && !l.contains("->"))
                .count(),
            8
        );
        assert!(text.contains("label=\"(l_1,[1 0])\""));
        assert_eq!(text, export_dot(&net, GraphRef::Brg(&build_brg(&net))));
    }

    #[test]
    fn empty_graph_is_header_and_footer() {
        let net = fixtures::fig1();
        let empty = ReachGraph { nfa: Nfa::new() };
        assert_eq!(export_dot(&net, GraphRef::Reach(&empty)), "digraph reach {\n}\n");
    }

    #[test]
    fn fig1_ubrg_tagged_leaves() {
        let net = VerifiedNet::new(fixtures::fig1(), 1000).unwrap();
        let text = export_dot(&net, GraphRef::Ubrg(&build_ubrg(&net).unwrap()));
        assert_eq!(text.matches("peripheries=2").count(), 2);
        assert!(text.contains("α_1"));
        assert!(text.contains("β_1"));
        assert_eq!(text.matches("style=dashed").count(), 2);
    }

    #[test]
    fn labels_are_escaped() {
        assert_eq!(escape("a\"b\\"), "a\\\"b\\\\");
    }
}
