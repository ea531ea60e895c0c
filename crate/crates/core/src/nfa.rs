//! Nondeterministic finite automata with optionally labeled events.
//!
//! Every state is accepting: all languages handled here are prefix-closed.
//! An edge whose label is `None` is silent (emits the empty string).

use std::collections::{BTreeSet, VecDeque};

use crate::net::Label;

pub type StateId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge<E> {
    pub from: StateId,
    pub event: E,
    pub label: Option<Label>,
    pub to: StateId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nfa<S, E> {
    states: Vec<S>,
    edges: Vec<Edge<E>>,
    outgoing: Vec<Vec<usize>>,
    initial: Vec<StateId>,
}

impl<S, E> Default for Nfa<S, E> {
    fn default() -> Self {
        Nfa {
            states: Vec::new(),
            edges: Vec::new(),
            outgoing: Vec::new(),
            initial: Vec::new(),
        }
    }
}

impl<S, E> Nfa<S, E> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_state(&mut self, state: S) -> StateId {
        self.states.push(state);
        self.outgoing.push(Vec::new());
        self.states.len() - 1
    }

    pub fn add_edge(&mut self, from: StateId, event: E, label: Option<Label>, to: StateId) {
        assert!(
            from < self.states.len() && to < self.states.len(),
            "edge endpoints must be declared states"
        );
        self.outgoing[from].push(self.edges.len());
        self.edges.push(Edge { from, event, label, to });
    }

    pub fn add_initial(&mut self, s: StateId) {
        assert!(s < self.states.len(), "initial state must be declared");
        if !self.initial.contains(&s) {
            self.initial.push(s);
        }
    }

    pub fn state(&self, s: StateId) -> &S {
        &self.states[s]
    }

    pub fn state_mut(&mut self, s: StateId) -> &mut S {
        &mut self.states[s]
    }

    pub fn states(&self) -> &[S] {
        &self.states
    }

    pub fn edges(&self) -> &[Edge<E>] {
        &self.edges
    }

    pub fn initial(&self) -> &[StateId] {
        &self.initial
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn outgoing(&self, s: StateId) -> impl Iterator<Item = &Edge<E>> {
        self.outgoing[s].iter().map(move |&i| &self.edges[i])
    }

    /// States reachable from `set` through silent edges, `set` included.
    pub fn silent_closure(&self, set: &BTreeSet<StateId>) -> BTreeSet<StateId> {
        let mut closure = set.clone();
        let mut queue: VecDeque<StateId> = set.iter().copied().collect();
        while let Some(s) = queue.pop_front() {
            for e in self.outgoing(s) {
                if e.label.is_none() && closure.insert(e.to) {
                    queue.push_back(e.to);
                }
            }
        }
        closure
    }

    pub fn initial_closure(&self) -> BTreeSet<StateId> {
        self.silent_closure(&self.initial.iter().copied().collect())
    }

    /// Closure of the `label`-successors of `set`.
    pub fn step(&self, set: &BTreeSet<StateId>, label: &Label) -> BTreeSet<StateId> {
        let next: BTreeSet<StateId> = set
            .iter()
            .flat_map(|&s| self.outgoing(s))
            .filter(|e| e.label.as_ref() == Some(label))
            .map(|e| e.to)
            .collect();
        self.silent_closure(&next)
    }

    /// Visible labels leaving any state of `set`.
    pub fn labels_from(&self, set: &BTreeSet<StateId>) -> BTreeSet<Label> {
        set.iter()
            .flat_map(|&s| self.outgoing(s))
            .filter_map(|e| e.label.clone())
            .collect()
    }

    /// Membership of a label word (all states accept).
    pub fn accepts(&self, word: &[Label]) -> bool {
        let mut cur = self.initial_closure();
        for a in word {
            if cur.is_empty() {
                return false;
            }
            cur = self.step(&cur, a);
        }
        !cur.is_empty()
    }

    /// Ids of states with no outgoing edges.
    pub fn leaves(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.states.len()).filter(|&s| self.outgoing[s].is_empty())
    }

    /// Parent edge of every state in a tree-shaped automaton.
    pub fn parent_edges(&self) -> Vec<Option<usize>> {
        let mut parent = vec![None; self.states.len()];
        for (i, e) in self.edges.iter().enumerate() {
            parent[e.to].get_or_insert(i);
        }
        parent
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(s: &str) -> Label {
        Label::new(s)
    }

    #[test]
    fn membership_with_silent_moves() {
        let mut g: Nfa<(), ()> = Nfa::new();
        let s0 = g.add_state(());
        let s1 = g.add_state(());
        let s2 = g.add_state(());
        g.add_initial(s0);
        g.add_edge(s0, (), None, s1);
        g.add_edge(s1, (), Some(l("a")), s2);
        g.add_edge(s2, (), Some(l("b")), s0);
        assert!(g.accepts(&[]));
        assert!(g.accepts(&[l("a")]));
        assert!(g.accepts(&[l("a"), l("b"), l("a")]));
        assert!(!g.accepts(&[l("b")]));
        assert_eq!(g.labels_from(&g.initial_closure()), BTreeSet::from([l("a")]));
    }

    #[test]
    fn empty_automaton_rejects_everything() {
        let g: Nfa<(), ()> = Nfa::new();
        assert!(!g.accepts(&[]));
    }

    #[test]
    #[should_panic(expected = "declared")]
    fn edges_need_declared_states() {
        let mut g: Nfa<(), ()> = Nfa::new();
        g.add_state(());
        g.add_edge(0, (), None, 3);
    }
}
