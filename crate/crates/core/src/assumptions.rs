//! Boundedness and implicit-subnet acyclicity, the two preconditions of every
//! basis-marking construction.

use std::ops::Deref;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::net::LabeledPetriNet;
use crate::oracle;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Boundedness {
    Bounded {
        reachable_markings: usize,
    },
    Unbounded {
        /// Firing sequence from the initial marking to the dominating marking.
        path: Vec<String>,
        /// Number of steps after which the dominated marking is reached.
        from_step: usize,
        dominated: String,
        dominating: String,
    },
    Unknown {
        cap: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AssumptionReport {
    pub bounded: Boundedness,
    /// A cycle of the implicit subnet (alternating places and transitions),
    /// if any.
    pub implicit_cycle: Option<Vec<String>>,
}

impl AssumptionReport {
    pub fn implicit_subnet_acyclic(&self) -> bool {
        self.implicit_cycle.is_none()
    }

    pub fn holds(&self) -> bool {
        matches!(self.bounded, Boundedness::Bounded { .. }) && self.implicit_subnet_acyclic()
    }

    /// The first failed assumption as an error.
    pub fn into_result(self) -> Result<usize> {
        let reachable = match self.bounded {
            Boundedness::Bounded { reachable_markings } => reachable_markings,
            Boundedness::Unbounded {
                path,
                from_step,
                dominated,
                dominating,
            } => {
                return Err(Error::Unbounded {
                    path,
                    from_step,
                    dominated,
                    dominating,
                })
            }
            Boundedness::Unknown { cap } => return Err(Error::CapExhausted { cap }),
        };
        match self.implicit_cycle {
            Some(cycle) => Err(Error::CyclicImplicitSubnet { cycle }),
            None => Ok(reachable),
        }
    }
}

pub fn check_assumptions(lpn: &LabeledPetriNet, cap: usize) -> AssumptionReport {
    let bounded = match oracle::explore(lpn.net(), cap) {
        Ok(g) => Boundedness::Bounded {
            reachable_markings: g.state_count(),
        },
        Err(Error::Unbounded {
            path,
            from_step,
            dominated,
            dominating,
        }) => Boundedness::Unbounded {
            path,
            from_step,
            dominated,
            dominating,
        },
        Err(Error::CapExhausted { cap }) => Boundedness::Unknown { cap },
        Err(other) => unreachable!("exploration only fails on boundedness: {other}"),
    };
    AssumptionReport {
        bounded,
        implicit_cycle: implicit_cycle(lpn),
    }
}

/// Depth-first cycle search on the bipartite graph of the implicit subnet.
fn implicit_cycle(lpn: &LabeledPetriNet) -> Option<Vec<String>> {
    let net = lpn.net();
    let places = net.place_count();
    // nodes: places 0..P, then implicit transitions P..P+|T_I|
    let high = lpn.high();
    let node_count = places + high.len();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); node_count];
    for (i, &h) in high.iter().enumerate() {
        for (p, _) in net.preset(h) {
            succ[p.0].push(places + i);
        }
        for (p, _) in net.postset(h) {
            succ[places + i].push(p.0);
        }
    }
    let name = |n: usize| {
        if n < places {
            net.place_name(crate::net::PlaceId(n)).to_owned()
        } else {
            net.transition_name(high[n - places]).to_owned()
        }
    };

    #[derive(Clone, Copy, PartialEq)]
    enum Color {
        White,
        Grey,
        Black,
    }
    let mut color = vec![Color::White; node_count];
    for root in 0..node_count {
        if color[root] != Color::White {
            continue;
        }
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        color[root] = Color::Grey;
        while let Some(top) = stack.last_mut() {
            let node = top.0;
            if let Some(&child) = succ[node].get(top.1) {
                top.1 += 1;
                match color[child] {
                    Color::White => {
                        color[child] = Color::Grey;
                        stack.push((child, 0));
                    }
                    Color::Grey => {
                        let start = stack.iter().position(|&(n, _)| n == child).unwrap();
                        let mut cycle: Vec<String> = stack[start..].iter().map(|&(n, _)| name(n)).collect();
                        cycle.push(name(child));
                        return Some(cycle);
                    }
                    Color::Black => {}
                }
            } else {
                color[node] = Color::Black;
                stack.pop();
            }
        }
    }
    None
}

/// A labeled net whose boundedness and implicit acyclicity have been
/// established. Basis-marking constructions only accept this type.
#[derive(Debug, Clone)]
pub struct VerifiedNet {
    lpn: LabeledPetriNet,
    reachable_markings: usize,
}

impl VerifiedNet {
    pub fn new(lpn: LabeledPetriNet, cap: usize) -> Result<Self> {
        let reachable_markings = check_assumptions(&lpn, cap).into_result()?;
        Ok(VerifiedNet {
            lpn,
            reachable_markings,
        })
    }

    /// Number of reachable markings found while checking boundedness.
    pub fn reachable_markings(&self) -> usize {
        self.reachable_markings
    }

    pub fn into_inner(self) -> LabeledPetriNet {
        self.lpn
    }
}

impl Deref for VerifiedNet {
    type Target = LabeledPetriNet;

    fn deref(&self) -> &LabeledPetriNet {
        &self.lpn
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::net::Level;

    #[test]
    fn fig1_satisfies_both() {
        let report = check_assumptions(&fixtures::fig1(), 1000);
        assert_eq!(report.bounded, Boundedness::Bounded { reachable_markings: 9 });
        assert!(report.implicit_subnet_acyclic());
        assert!(report.holds());
    }

    #[test]
    fn source_transition_is_unbounded() {
        let report = check_assumptions(&fixtures::unbounded(), 1000);
        match report.bounded {
            Boundedness::Unbounded { path, from_step, .. } => {
                assert_eq!(path, vec!["t"]);
                assert_eq!(from_step, 0);
            }
            other => panic!("expected unbounded, got {other:?}"),
        }
        assert!(VerifiedNet::new(fixtures::unbounded(), 1000).is_err());
    }

    #[test]
    fn cap_exhaustion_is_unknown() {
        let report = check_assumptions(&fixtures::fig1(), 4);
        assert_eq!(report.bounded, Boundedness::Unknown { cap: 4 });
        assert!(matches!(
            VerifiedNet::new(fixtures::fig1(), 4),
            Err(Error::CapExhausted { cap: 4 })
        ));
    }

    #[test]
    fn implicit_two_cycle_detected() {
        let lpn = LabeledPetriNet::builder()
            .place("p", 1)
            .place("q", 0)
            .transition("h_a", "f", Level::High)
            .transition("h_b", "g", Level::High)
            .arc("p", "h_a", 1)
            .arc("h_a", "q", 1)
            .arc("q", "h_b", 1)
            .arc("h_b", "p", 1)
            .build()
            .unwrap();
        let report = check_assumptions(&lpn, 100);
        let cycle = report.implicit_cycle.clone().expect("cycle");
        assert_eq!(cycle.first(), cycle.last());
        assert_eq!(cycle.len(), 5);
        assert!(matches!(
            VerifiedNet::new(lpn, 100),
            Err(Error::CyclicImplicitSubnet { .. })
        ));
    }

    #[test]
    fn low_cycles_are_allowed() {
        let lpn = LabeledPetriNet::builder()
            .place("p", 1)
            .transition("t", "a", Level::Low)
            .arc("p", "t", 1)
            .arc("t", "p", 1)
            .build()
            .unwrap();
        assert!(check_assumptions(&lpn, 10).holds());
    }
}
