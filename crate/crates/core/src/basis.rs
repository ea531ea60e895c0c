//! Basis reachability graph and its tree unfolding.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::rc::Rc;

use serde::{Serialize, Serializer};

use crate::assumptions::VerifiedNet;
use crate::error::{Error, Result};
use crate::explain::minimal_e_vectors_unchecked;
use crate::net::{LabeledPetriNet, Marking, ParikhVector, TransitionId, TransitionSequence};
use crate::nfa::{Nfa, StateId};

/// BRG event: an explicit transition together with a minimal e-vector that
/// enables it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BrgEvent {
    pub transition: TransitionId,
    pub evector: ParikhVector,
}

impl BrgEvent {
    pub fn describe(&self, lpn: &LabeledPetriNet) -> String {
        format!("({},{})", lpn.name(self.transition), self.evector)
    }
}

/// Size limits for tree constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_nodes: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_nodes: 2_000_000 }
    }
}

/// One outgoing basis arc: event and successor basis marking.
pub(crate) type BasisArc = (BrgEvent, Marking);

/// Memoized basis successors, shared by the BRG, the UBRG and the verifiers.
pub(crate) struct BasisExplorer<'a> {
    lpn: &'a LabeledPetriNet,
    cache: HashMap<Marking, Rc<[BasisArc]>>,
}

impl<'a> BasisExplorer<'a> {
    pub(crate) fn new(lpn: &'a LabeledPetriNet) -> Self {
        BasisExplorer {
            lpn,
            cache: HashMap::new(),
        }
    }

    /// Arcs leaving `m`, ordered by transition declaration order and then
    /// lexicographically by e-vector.
    pub(crate) fn successors(&mut self, m: &Marking) -> Rc<[BasisArc]> {
        if let Some(arcs) = self.cache.get(m) {
            return Rc::clone(arcs);
        }
        let mut arcs = Vec::new();
        for &t in self.lpn.low() {
            let ymin = minimal_e_vectors_unchecked(self.lpn, m, t);
            for y in ymin.evectors() {
                let next = basis_successor(self.lpn, m, t, y);
                arcs.push((
                    BrgEvent {
                        transition: t,
                        evector: y.clone(),
                    },
                    next,
                ));
            }
        }
        let arcs: Rc<[BasisArc]> = arcs.into();
        self.cache.insert(m.clone(), Rc::clone(&arcs));
        arcs
    }
}

/// `m + [N]_I * y + [N](., t)`.
pub fn basis_successor(lpn: &LabeledPetriNet, m: &Marking, t: TransitionId, y: &ParikhVector) -> Marking {
    let net = lpn.net();
    let tokens = net
        .places()
        .map(|p| {
            let mut v = i64::from(m.get(p)) + net.incidence(p, t);
            for (i, &h) in lpn.high().iter().enumerate() {
                v += net.incidence(p, h) * i64::from(y.counts()[i]);
            }
            u32::try_from(v).expect("minimal explanations lead to valid markings")
        })
        .collect();
    Marking::new(tokens)
}

/// Basis reachability graph: one state per basis marking, initial state 0.
#[derive(Debug, Clone)]
pub struct Brg {
    pub nfa: Nfa<Marking, BrgEvent>,
}

impl Brg {
    pub fn basis_markings(&self) -> &[Marking] {
        self.nfa.states()
    }

    pub fn state_of(&self, m: &Marking) -> Option<StateId> {
        self.nfa.states().iter().position(|x| x == m)
    }
}

pub fn build_brg(net: &VerifiedNet) -> Brg {
    let lpn: &LabeledPetriNet = net;
    let mut explorer = BasisExplorer::new(lpn);
    let mut nfa = Nfa::new();
    let mut index: HashMap<Marking, StateId> = HashMap::new();
    let m0 = lpn.net().initial_marking().clone();
    let root = nfa.add_state(m0.clone());
    nfa.add_initial(root);
    index.insert(m0, root);

    let mut queue = VecDeque::from([root]);
    while let Some(s) = queue.pop_front() {
        let m = nfa.state(s).clone();
        for (event, next) in explorer.successors(&m).iter() {
            let target = *index.entry(next.clone()).or_insert_with(|| {
                let id = nfa.add_state(next.clone());
                queue.push_back(id);
                id
            });
            let label = Some(lpn.label(event.transition).clone());
            nfa.add_edge(s, event.clone(), label, target);
        }
    }
    Brg { nfa }
}

/// Concatenation of the transitions of a BRG event sequence.
pub fn phi(sigma: &[BrgEvent]) -> TransitionSequence {
    sigma.iter().map(|e| e.transition).collect()
}

/// Sum of the e-vectors of a BRG event sequence. `width` is `|T_I|`, used
/// for the empty sequence.
pub fn phi_prime(sigma: &[BrgEvent], width: usize) -> ParikhVector {
    let mut sum = ParikhVector::zeros(width);
    for e in sigma {
        sum.add_assign(&e.evector);
    }
    sum
}

/// Leaf tag of the unfolded graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tag {
    /// Dead-end leaf reached through at least one implicit firing.
    Alpha(u32),
    /// Repeated-marking leaf reached through at least one implicit firing.
    Beta(u32),
}

impl Tag {
    /// Machine-friendly spelling, e.g. `alpha_1`.
    pub fn key(&self) -> String {
        match self {
            Tag::Alpha(i) => format!("alpha_{i}"),
            Tag::Beta(j) => format!("beta_{j}"),
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tag::Alpha(i) => write!(f, "α_{i}"),
            Tag::Beta(j) => write!(f, "β_{j}"),
        }
    }
}

impl Serialize for Tag {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.key())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UbrgNode {
    pub marking: Marking,
    pub parent: Option<StateId>,
    pub depth: usize,
    pub tag: Option<Tag>,
    /// The marking repeats an ancestor's; the node is an unexpanded leaf.
    pub duplicated: bool,
    /// Ancestor carrying the same marking, for duplicated leaves.
    pub duplicate_of: Option<StateId>,
    /// Some arc on the root path has a nonzero e-vector.
    pub uses_implicit: bool,
}

#[derive(Debug, Clone)]
pub struct UbrgResult {
    pub tree: Nfa<UbrgNode, BrgEvent>,
    pub phi_alpha: BTreeSet<Tag>,
    pub phi_beta: BTreeSet<Tag>,
    pub m_dup: BTreeSet<Marking>,
    children: Vec<Vec<(BrgEvent, StateId)>>,
    tagged_below: Vec<Vec<Tag>>,
}

impl UbrgResult {
    pub const ROOT: StateId = 0;

    pub fn node(&self, id: StateId) -> &UbrgNode {
        self.tree.state(id)
    }

    pub fn node_count(&self) -> usize {
        self.tree.state_count()
    }

    pub fn children(&self, id: StateId) -> &[(BrgEvent, StateId)] {
        &self.children[id]
    }

    /// Tags of all tagged leaves in the subtree rooted at `id`.
    pub fn tagged_below(&self, id: StateId) -> &[Tag] {
        &self.tagged_below[id]
    }

    pub fn tagged_leaf(&self, tag: Tag) -> Option<StateId> {
        (0..self.node_count()).find(|&n| self.node(n).tag == Some(tag))
    }

    /// Events on the path from the root to `id`.
    pub fn path_events(&self, id: StateId) -> Vec<BrgEvent> {
        let mut events = Vec::new();
        let mut cur = id;
        while let Some(p) = self.node(cur).parent {
            let (event, _) = self.children[p]
                .iter()
                .find(|(_, c)| *c == cur)
                .expect("tree child recorded");
            events.push(event.clone());
            cur = p;
        }
        events.reverse();
        events
    }

    pub fn all_tags(&self) -> BTreeSet<Tag> {
        self.phi_alpha.union(&self.phi_beta).copied().collect()
    }
}

pub fn build_ubrg(net: &VerifiedNet) -> Result<UbrgResult> {
    build_ubrg_with(net, Limits::default())
}

/// Breadth-first unfolding of the BRG that never fuses nodes. A node whose
/// marking equals an ancestor's becomes an unexpanded leaf; leaves whose root
/// path carries a nonzero e-vector are then tagged `α_i` (dead end) or `β_j`
/// (duplicated), numbered in node order.
pub fn build_ubrg_with(net: &VerifiedNet, limits: Limits) -> Result<UbrgResult> {
    let lpn: &LabeledPetriNet = net;
    let mut explorer = BasisExplorer::new(lpn);
    let mut tree: Nfa<UbrgNode, BrgEvent> = Nfa::new();
    let mut children: Vec<Vec<(BrgEvent, StateId)>> = Vec::new();
    let mut m_dup = BTreeSet::new();

    let root = tree.add_state(UbrgNode {
        marking: lpn.net().initial_marking().clone(),
        parent: None,
        depth: 0,
        tag: None,
        duplicated: false,
        duplicate_of: None,
        uses_implicit: false,
    });
    tree.add_initial(root);
    children.push(Vec::new());

    let mut queue = VecDeque::from([root]);
    while let Some(n) = queue.pop_front() {
        let node = tree.state(n).clone();
        let mut anc = node.parent;
        while let Some(a) = anc {
            if tree.state(a).marking == node.marking {
                let leaf = tree.state_mut(n);
                leaf.duplicated = true;
                leaf.duplicate_of = Some(a);
                m_dup.insert(node.marking.clone());
                break;
            }
            anc = tree.state(a).parent;
        }
        if tree.state(n).duplicated {
            continue;
        }
        for (event, next) in explorer.successors(&node.marking).iter() {
            if tree.state_count() >= limits.max_nodes {
                return Err(Error::BudgetExceeded {
                    what: "unfolded basis reachability graph",
                    limit: limits.max_nodes,
                });
            }
            let child = tree.add_state(UbrgNode {
                marking: next.clone(),
                parent: Some(n),
                depth: node.depth + 1,
                tag: None,
                duplicated: false,
                duplicate_of: None,
                uses_implicit: node.uses_implicit || !event.evector.is_zero(),
            });
            children.push(Vec::new());
            children[n].push((event.clone(), child));
            tree.add_edge(n, event.clone(), Some(lpn.label(event.transition).clone()), child);
            queue.push_back(child);
        }
    }

    let (mut i, mut j) = (0, 0);
    let mut phi_alpha = BTreeSet::new();
    let mut phi_beta = BTreeSet::new();
    for (n, kids) in children.iter().enumerate() {
        if !kids.is_empty() || !tree.state(n).uses_implicit {
            continue;
        }
        let node = tree.state_mut(n);
        let tag = if node.duplicated {
            j += 1;
            phi_beta.insert(Tag::Beta(j));
            Tag::Beta(j)
        } else {
            i += 1;
            phi_alpha.insert(Tag::Alpha(i));
            Tag::Alpha(i)
        };
        node.tag = Some(tag);
    }

    // children always have larger ids than their parent
    let mut tagged_below: Vec<Vec<Tag>> = (0..tree.state_count())
        .map(|n| tree.state(n).tag.into_iter().collect())
        .collect();
    for n in (1..tree.state_count()).rev() {
        let p = tree.state(n).parent.expect("non-root node has a parent");
        let below = std::mem::take(&mut tagged_below[n]);
        tagged_below[p].extend(below.iter().copied());
        tagged_below[n] = below;
    }
    for tags in &mut tagged_below {
        tags.sort();
    }

    Ok(UbrgResult {
        tree,
        phi_alpha,
        phi_beta,
        m_dup,
        children,
        tagged_below,
    })
}
