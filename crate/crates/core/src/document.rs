//! JSON net documents.
//!
//! ```json
//! {
//!   "schema_version": "1",
//!   "places": [{ "id": "p_1", "initial_tokens": 1 }],
//!   "transitions": [{ "id": "l_1", "label": "a", "level": "low" }],
//!   "arcs": [{ "from": "p_1", "to": "l_1", "weight": 1 }]
//! }
//! ```
//!
//! `initial_tokens` and `weight` may be omitted (0 and 1 respectively).

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::net::{Label, LabeledPetriNet, Level};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetDocument {
    pub schema_version: String,
    pub places: Vec<PlaceEntry>,
    pub transitions: Vec<TransitionEntry>,
    #[serde(default)]
    pub arcs: Vec<ArcEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlaceEntry {
    pub id: String,
    #[serde(default)]
    pub initial_tokens: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionEntry {
    pub id: String,
    pub label: String,
    pub level: Level,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArcEntry {
    pub from: String,
    pub to: String,
    #[serde(default = "one")]
    pub weight: u32,
}

fn one() -> u32 {
    1
}

fn invalid(field: String, message: impl Into<String>) -> Error {
    Error::Document {
        field,
        message: message.into(),
    }
}

impl NetDocument {
    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        Ok(serde_json::from_slice(bytes)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }

    /// Checks the document-level invariants, naming the offending field.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(invalid(
                "schema_version".into(),
                format!(
                    "unsupported version `{}` (expected `{SCHEMA_VERSION}`)",
                    self.schema_version
                ),
            ));
        }
        let mut ids = HashSet::new();
        for (i, p) in self.places.iter().enumerate() {
            if p.id.is_empty() {
                return Err(invalid(format!("places[{i}].id"), "empty identifier"));
            }
            if !ids.insert(p.id.as_str()) {
                return Err(invalid(
                    format!("places[{i}].id"),
                    format!("duplicate identifier `{}`", p.id),
                ));
            }
        }
        let place_ids: HashSet<&str> = self.places.iter().map(|p| p.id.as_str()).collect();
        let mut levels: BTreeMap<&str, (Level, usize)> = BTreeMap::new();
        for (i, t) in self.transitions.iter().enumerate() {
            if t.id.is_empty() {
                return Err(invalid(format!("transitions[{i}].id"), "empty identifier"));
            }
            if !ids.insert(t.id.as_str()) {
                return Err(invalid(
                    format!("transitions[{i}].id"),
                    format!("duplicate identifier `{}`", t.id),
                ));
            }
            if t.label.is_empty() {
                return Err(invalid(format!("transitions[{i}].label"), "labels must be non-empty"));
            }
            if let Some(&(level, first)) = levels.get(t.label.as_str()) {
                if level != t.level {
                    return Err(invalid(
                        format!("transitions[{i}].level"),
                        format!(
                            "label `{}` is used at both levels (also by transitions[{first}]); low and high label sets must be disjoint",
                            t.label
                        ),
                    ));
                }
            } else {
                levels.insert(&t.label, (t.level, i));
            }
        }
        let transition_ids: HashSet<&str> = self.transitions.iter().map(|t| t.id.as_str()).collect();
        for (i, a) in self.arcs.iter().enumerate() {
            let pt = place_ids.contains(a.from.as_str()) && transition_ids.contains(a.to.as_str());
            let tp = transition_ids.contains(a.from.as_str()) && place_ids.contains(a.to.as_str());
            if !pt && !tp {
                let what = if !ids.contains(a.from.as_str()) {
                    format!("unknown endpoint `{}`", a.from)
                } else if !ids.contains(a.to.as_str()) {
                    format!("unknown endpoint `{}`", a.to)
                } else {
                    format!("`{}` -> `{}` does not connect a place and a transition", a.from, a.to)
                };
                return Err(invalid(format!("arcs[{i}]"), what));
            }
            if a.weight == 0 {
                return Err(invalid(format!("arcs[{i}].weight"), "weight must be at least 1"));
            }
        }
        Ok(())
    }

    pub fn to_net(&self) -> Result<LabeledPetriNet> {
        self.validate()?;
        let mut builder = LabeledPetriNet::builder();
        for p in &self.places {
            builder = builder.place(&p.id, p.initial_tokens);
        }
        for t in &self.transitions {
            builder = builder.transition(&t.id, &t.label, t.level);
        }
        for a in &self.arcs {
            builder = builder.arc(&a.from, &a.to, a.weight);
        }
        builder.build()
    }

    /// Canonical document for a net: declaration order, arcs grouped per
    /// transition (inputs first), explicit weights.
    pub fn from_net(lpn: &LabeledPetriNet) -> Self {
        let net = lpn.net();
        let places = net
            .places()
            .map(|p| PlaceEntry {
                id: net.place_name(p).to_owned(),
                initial_tokens: net.initial_marking().get(p),
            })
            .collect();
        let transitions = net
            .transitions()
            .map(|t| TransitionEntry {
                id: net.transition_name(t).to_owned(),
                label: lpn.label(t).to_string(),
                level: lpn.level(t),
            })
            .collect();
        let mut arcs = Vec::new();
        for t in net.transitions() {
            for (p, w) in net.preset(t) {
                arcs.push(ArcEntry {
                    from: net.place_name(p).to_owned(),
                    to: net.transition_name(t).to_owned(),
                    weight: w,
                });
            }
            for (p, w) in net.postset(t) {
                arcs.push(ArcEntry {
                    from: net.transition_name(t).to_owned(),
                    to: net.place_name(p).to_owned(),
                    weight: w,
                });
            }
        }
        NetDocument {
            schema_version: SCHEMA_VERSION.to_owned(),
            places,
            transitions,
            arcs,
        }
    }
}

/// Parses and validates a net document.
pub fn parse_net(bytes: &[u8]) -> Result<LabeledPetriNet> {
    NetDocument::from_json(bytes)?.to_net()
}

pub fn serialize_net(lpn: &LabeledPetriNet) -> String {
    NetDocument::from_net(lpn).to_json()
}

/// Label set `A` of a document's net, handy for diagnostics.
pub fn labels(lpn: &LabeledPetriNet) -> Vec<Label> {
    lpn.label_levels().keys().cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG1: &str = include_str!("../fixtures/fig1.json");

    #[test]
    fn fig1_document_shape() {
        let lpn = parse_net(FIG1.as_bytes()).unwrap();
        assert_eq!(lpn.net().place_count(), 9);
        assert_eq!(lpn.net().transition_count(), 11);
        assert_eq!(lpn.names(lpn.high()), vec!["h_1", "h_2"]);
        assert_eq!(lpn.low().len(), 9);
        assert_eq!(labels(&lpn).len(), 7);
    }

    #[test]
    fn label_on_both_levels_is_rejected() {
        let doc = r#"{"schema_version":"1",
            "places":[{"id":"p","initial_tokens":1}],
            "transitions":[{"id":"t1","label":"a","level":"low"},{"id":"t2","label":"a","level":"high"}],
            "arcs":[]}"#;
        let err = parse_net(doc.as_bytes()).unwrap_err();
        match err {
            Error::Document { field, message } => {
                assert_eq!(field, "transitions[1].level");
                assert!(message.contains("both levels"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn place_to_place_arc_is_rejected() {
        let doc = r#"{"schema_version":"1",
            "places":[{"id":"p"},{"id":"q"}],
            "transitions":[],
            "arcs":[{"from":"p","to":"q"}]}"#;
        match parse_net(doc.as_bytes()).unwrap_err() {
            Error::Document { field, .. } => assert_eq!(field, "arcs[0]"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let doc = "{\n  \"schema_version\": \"1\",\n  \"places\": [ oops ]\n}";
        match parse_net(doc.as_bytes()).unwrap_err() {
            Error::Syntax { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_fields_and_versions_rejected() {
        let doc = r#"{"schema_version":"2","places":[],"transitions":[]}"#;
        assert!(matches!(parse_net(doc.as_bytes()), Err(Error::Document { field, .. }) if field == "schema_version"));
        let doc = r#"{"schema_version":"1","places":[{"id":"p","tokens":3}],"transitions":[]}"#;
        assert!(matches!(parse_net(doc.as_bytes()), Err(Error::Syntax { .. })));
    }

    #[test]
    fn weights_default_to_one() {
        let doc = r#"{"schema_version":"1",
            "places":[{"id":"p","initial_tokens":2}],
            "transitions":[{"id":"t","label":"a","level":"low"}],
            "arcs":[{"from":"p","to":"t"}]}"#;
        let lpn = parse_net(doc.as_bytes()).unwrap();
        let net = lpn.net();
        assert_eq!(net.input_weight(crate::net::PlaceId(0), crate::net::TransitionId(0)), 1);
    }

    #[test]
    fn canonical_round_trip() {
        let lpn = parse_net(FIG1.as_bytes()).unwrap();
        let text = serialize_net(&lpn);
        let again = parse_net(text.as_bytes()).unwrap();
        assert_eq!(lpn, again);
        assert_eq!(text, serialize_net(&again));
    }
}
