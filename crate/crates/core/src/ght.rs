//! Rabin determinisation of NGBAs via generalised history trees.
//!
//! A tree is stored as its node list in preorder, which for ordered trees is
//! the lexicographic order of node names.

use std::collections::HashMap;
use std::fmt;

use smallvec::SmallVec;

use crate::automata::{Acceptance, Alphabet, DetAutomaton, DetEdge, DeterministicStep, EdgeAcc, Ngba, Symbol};
use crate::bits::StateSet;

/// A node name `n₁…n_j`; the root `ε` is the empty sequence.
pub type NodeName = SmallVec<[u8; 8]>;

pub fn display_name(name: &NodeName) -> String {
    if name.is_empty() {
        "ε".to_string()
    } else {
        name.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(".")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GhtNode {
    pub name: NodeName,
    pub label: StateSet,
    /// Active acceptance index, zero-based.
    pub h: usize,
}

/// A generalised history tree.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ght {
    nodes: Vec<GhtNode>,
}

impl fmt::Debug for Ght {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .nodes
            .iter()
            .map(|n| format!("{},{:?},{}", display_name(&n.name), n.label, n.h + 1))
            .collect();
        write!(f, "[{}]", parts.join("; "))
    }
}

impl Ght {
    /// The single-node tree `({ε}, ε ↦ I, ε ↦ 1)`.
    pub fn initial(b: &Ngba) -> Ght {
        Ght::seeded(b.initial().clone())
    }

    /// A single-node tree with root label `r`.
    pub fn seeded(r: StateSet) -> Ght {
        assert!(!r.is_empty(), "root label must be non-empty");
        Ght { nodes: vec![GhtNode { name: NodeName::new(), label: r, h: 0 }] }
    }

    /// Builds a tree from nodes in any order; panics if the nodes do not form
    /// a valid tree.
    pub fn from_nodes(mut nodes: Vec<GhtNode>, k: usize) -> Ght {
        nodes.sort();
        let t = Ght { nodes };
        assert!(t.is_valid(k), "not a generalised history tree: {t:?}");
        t
    }

    pub fn nodes(&self) -> &[GhtNode] {
        &self.nodes
    }

    /// `rchd(d) = l(ε)`.
    pub fn reached(&self) -> &StateSet {
        &self.nodes[0].label
    }

    pub fn node(&self, name: &[u8]) -> Option<&GhtNode> {
        self.nodes.binary_search_by(|n| n.name.as_slice().cmp(name)).ok().map(|i| &self.nodes[i])
    }

    /// Checks orderedness and the three label conditions.
    pub fn is_valid(&self, k: usize) -> bool {
        if self.nodes.first().is_none_or(|r| !r.name.is_empty()) {
            return false;
        }
        for (i, v) in self.nodes.iter().enumerate() {
            if v.label.is_empty() || v.h >= k || (i > 0 && self.nodes[i - 1].name >= v.name) {
                return false;
            }
            let children: Vec<&GhtNode> = self.children(&v.name).collect();
            let mut union = StateSet::new();
            for (idx, c) in children.iter().enumerate() {
                if c.name[c.name.len() - 1] as usize != idx || !c.label.is_subset(&v.label) || c.label == v.label {
                    return false;
                }
                if !union.is_disjoint(&c.label) {
                    return false;
                }
                union.union_with(&c.label);
            }
            if union == v.label {
                return false;
            }
            if let Some((_, parent)) = v.name.split_last() {
                if self.node(parent).is_none() {
                    return false;
                }
            }
        }
        true
    }

    fn children<'a>(&'a self, name: &'a NodeName) -> impl Iterator<Item = &'a GhtNode> + 'a {
        self.nodes.iter().filter(move |c| c.name.len() == name.len() + 1 && c.name.starts_with(name))
    }
}

/// Acceptance information of one tree transition: the transition is in
/// `A_v` for `v ∈ acc` and in `R_v` for `v ∈ rej`. Both lists are sorted and
/// disjoint.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct GhtMark {
    pub acc: Vec<NodeName>,
    pub rej: Vec<NodeName>,
}

struct Work {
    name: NodeName,
    label: StateSet,
    h: usize,
    children: Vec<usize>,
    sprouted: bool,
    alive: bool,
}

fn kill(w: &mut [Work], v: usize) {
    let mut stack = vec![v];
    while let Some(x) = stack.pop() {
        w[x].alive = false;
        stack.extend(w[x].children.iter().copied());
    }
}

fn subtree(w: &[Work], v: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut stack = vec![v];
    while let Some(x) = stack.pop() {
        out.push(x);
        stack.extend(w[x].children.iter().rev().copied());
    }
    out
}

/// One determinisation step; `None` iff `T(l(ε), σ) = ∅`.
pub fn ght_successor(b: &Ngba, d: &Ght, sym: Symbol) -> Option<(Ght, GhtMark)> {
    let k = b.num_acc();
    if b.post(d.reached(), sym).is_empty() {
        return None;
    }
    let mut w: Vec<Work> = Vec::with_capacity(2 * d.nodes.len());
    let mut index: HashMap<&[u8], usize> = HashMap::new();
    for (i, v) in d.nodes.iter().enumerate() {
        index.insert(v.name.as_slice(), i);
        w.push(Work {
            name: v.name.clone(),
            label: b.post(&v.label, sym),
            h: v.h,
            children: Vec::new(),
            sprouted: false,
            alive: true,
        });
        if let Some((_, parent)) = v.name.split_last() {
            w[index[parent]].children.push(i);
        }
    }
    // Sprouting, with labels taken from the old tree.
    for (i, v) in d.nodes.iter().enumerate() {
        let mut name = v.name.clone();
        name.push(w[i].children.len() as u8);
        let label = b.post_acc(&v.label, sym, v.h);
        let id = w.len();
        w.push(Work { name, label, h: 0, children: Vec::new(), sprouted: true, alive: true });
        w[i].children.push(id);
    }
    // Stealing: older siblings keep their states.
    for v in subtree(&w, 0) {
        let mut taken = StateSet::new();
        for c in w[v].children.clone() {
            for x in subtree(&w, c) {
                w[x].label.difference_with(&taken);
            }
            taken.union_with(&w[c].label);
        }
    }
    // Accepting and removing.
    let mut acc = Vec::new();
    let mut stack = vec![0];
    while let Some(v) = stack.pop() {
        if !w[v].alive {
            continue;
        }
        let mut union = StateSet::new();
        for &c in &w[v].children {
            union.union_with(&w[c].label);
        }
        if !w[v].label.is_empty() && union == w[v].label {
            for c in w[v].children.clone() {
                kill(&mut w, c);
            }
            w[v].h = (w[v].h + 1) % k;
            acc.push(w[v].name.clone());
        } else {
            stack.extend(w[v].children.iter().rev().copied());
        }
    }
    // Removing empty nodes.
    for v in subtree(&w, 0) {
        if w[v].alive && w[v].label.is_empty() {
            kill(&mut w, v);
        }
    }
    // Renaming and rejecting.
    let mut nodes = Vec::new();
    let mut rej = Vec::new();
    let mut stack = vec![(0usize, NodeName::new())];
    while let Some((v, new_name)) = stack.pop() {
        if w[v].sprouted || new_name != w[v].name {
            rej.push(w[v].name.clone());
        }
        let alive: Vec<usize> = w[v].children.iter().copied().filter(|&c| w[c].alive).collect();
        for (i, &c) in alive.iter().enumerate().rev() {
            let mut n = new_name.clone();
            n.push(i as u8);
            stack.push((c, n));
        }
        nodes.push(GhtNode { name: new_name, label: w[v].label.clone(), h: w[v].h });
    }
    for x in w.iter().filter(|x| !x.alive) {
        rej.push(x.name.clone());
    }
    rej.sort();
    acc.sort();
    acc.retain(|v| rej.binary_search(v).is_err());
    let next = Ght { nodes };
    debug_assert!(next.is_valid(k), "invalid successor tree {next:?}");
    Some((next, GhtMark { acc, rej }))
}

/// On-the-fly Rabin determinisation.
#[derive(Debug, Clone, Copy)]
pub struct GhtConstruction<'a> {
    ngba: &'a Ngba,
}

impl<'a> GhtConstruction<'a> {
    pub fn new(ngba: &'a Ngba) -> Self {
        GhtConstruction { ngba }
    }
}

impl DeterministicStep for GhtConstruction<'_> {
    type State = Ght;
    type Mark = GhtMark;

    fn step(&self, d: &Ght, sym: Symbol) -> Option<(Ght, GhtMark)> {
        ght_successor(self.ngba, d, sym)
    }
}

/// The reachable part of `det(B)` as an explicit Rabin automaton. Pair `i`
/// belongs to node name `pair_names[i]`; names are numbered in order of
/// first appearance.
#[derive(Debug, Clone)]
pub struct RabinDeterminisation {
    pub automaton: DetAutomaton,
    pub states: Vec<Ght>,
    pub pair_names: Vec<NodeName>,
}

pub fn determinise_rabin(b: &Ngba) -> RabinDeterminisation {
    determinise_rabin_from(b, Ght::initial(b))
}

/// Determinisation from an arbitrary initial tree.
pub fn determinise_rabin_from(b: &Ngba, init: Ght) -> RabinDeterminisation {
    let alphabet: Alphabet = b.alphabet().clone();
    let mut states = vec![init.clone()];
    let mut index = HashMap::from([(init, 0usize)]);
    let mut names: HashMap<NodeName, u32> = HashMap::new();
    let mut pair_names = Vec::new();
    let mut edges = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let d = states[i].clone();
        let mut out = Vec::new();
        for sym in b.enabled_symbols(d.reached()) {
            let Some((t, mark)) = ght_successor(b, &d, sym) else { continue };
            let target = *index.entry(t.clone()).or_insert_with(|| {
                states.push(t);
                states.len() - 1
            });
            let mut id = |n: &NodeName| {
                *names.entry(n.clone()).or_insert_with(|| {
                    pair_names.push(n.clone());
                    pair_names.len() as u32 - 1
                })
            };
            let mut acc: Vec<u32> = mark.acc.iter().map(&mut id).collect();
            let mut rej: Vec<u32> = mark.rej.iter().map(&mut id).collect();
            acc.sort_unstable();
            rej.sort_unstable();
            out.push(DetEdge { symbol: sym, target, acc: EdgeAcc::Rabin { acc, rej } });
        }
        edges.push(out);
        i += 1;
    }
    let automaton = DetAutomaton::new(alphabet, 0, edges, Acceptance::Rabin { pairs: pair_names.len() })
        .expect("determinisation is deterministic");
    RabinDeterminisation { automaton, states, pair_names }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::tests::b_e;
    use crate::automata::{lasso_cycle_marks, lasso_member_ngba, lasso_run_deterministic};
    use crate::bits::AccSet;
    use crate::gen;
    use crate::automata::NgbaBuilder;
    use proptest::prelude::*;

    fn set(qs: &[usize]) -> StateSet {
        qs.iter().copied().collect()
    }

    fn node(name: &[u8], label: &[usize], h: usize) -> GhtNode {
        GhtNode { name: name.iter().copied().collect(), label: set(label), h: h - 1 }
    }

    fn names(v: &[&[u8]]) -> Vec<NodeName> {
        v.iter().map(|n| n.iter().copied().collect()).collect()
    }

    const A: Symbol = 1;
    const B: Symbol = 2;
    const C: Symbol = 4;

    #[test]
    fn initial_tree() {
        let b = b_e();
        let d = Ght::initial(&b);
        assert_eq!(d.nodes(), &[node(&[], &[0], 1)]);
        assert!(d.is_valid(2));
    }

    #[test]
    fn running_example_steps() {
        let b = b_e();
        let d0 = Ght::initial(&b);
        let (d1, m1) = ght_successor(&b, &d0, A).unwrap();
        assert_eq!(d1.nodes(), &[node(&[], &[1, 2], 1), node(&[0], &[1], 1)]);
        assert_eq!(m1, GhtMark { acc: vec![], rej: names(&[&[0]]) });

        let (d2, m2) = ght_successor(&b, &d1, C).unwrap();
        assert_eq!(d2.nodes(), &[node(&[], &[0], 2)]);
        assert_eq!(m2.acc, names(&[&[]]));

        let d3 = Ght::from_nodes(vec![node(&[], &[1, 2], 2)], 2);
        let (d4, m4) = ght_successor(&b, &d3, B).unwrap();
        assert_eq!(d4.nodes(), &[node(&[], &[0], 1)]);
        assert_eq!(m4.acc, names(&[&[]]));
        assert!(ght_successor(&b, &d0, B).is_none());
    }

    #[test]
    fn running_example_automaton() {
        let r = determinise_rabin(&b_e());
        assert_eq!(r.states.len(), 4);
        let eps = r.pair_names.iter().position(|n| n.is_empty()).unwrap() as u32;
        let zero = r.pair_names.iter().position(|n| n.as_slice() == [0]).unwrap() as u32;
        let (mut a_eps, mut r_eps, mut a_zero) = (0, 0, 0);
        for q in 0..r.automaton.num_states() {
            for e in r.automaton.edges(q) {
                let EdgeAcc::Rabin { acc, rej } = &e.acc else { unreachable!() };
                a_eps += usize::from(acc.contains(&eps));
                r_eps += usize::from(rej.contains(&eps));
                a_zero += usize::from(acc.contains(&zero));
            }
        }
        assert!(a_eps > 0);
        assert_eq!((r_eps, a_zero), (0, 0));
    }

    #[test]
    fn deterministic_buchi_input() {
        let mut rng = gen::rng(11);
        for _ in 0..10 {
            let b = gen::random_deterministic_ngba(&mut rng, 4, 1, 2);
            let det = determinise_rabin(&b).automaton;
            for _ in 0..200 {
                let w = gen::random_lasso(&mut rng, b.alphabet(), 5, 5);
                assert_eq!(lasso_run_deterministic(&det, &w), lasso_member_ngba(&b, &w).unwrap());
            }
        }
    }

    #[test]
    fn empty_accepting_sets_reject_everything() {
        let al = Alphabet::new(["p"]).unwrap();
        let mut bd = NgbaBuilder::new(al, 2, 1);
        bd.add_initial(0).add_edge(0, 0, 1, AccSet::EMPTY).add_edge(1, 1, 0, AccSet::EMPTY).add_edge(0, 1, 0, AccSet::EMPTY);
        let b = bd.build().unwrap();
        let det = determinise_rabin(&b).automaton;
        let w = crate::automata::LassoWord::new(vec![], vec![0, 1]);
        assert!(!lasso_run_deterministic(&det, &w));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn language_and_invariants(seed in any::<u64>()) {
            let mut rng = gen::rng(seed);
            let b = gen::random_ngba(&mut rng, 4, 2, 2);
            let r = determinise_rabin(&b);
            for d in &r.states {
                prop_assert!(d.is_valid(b.num_acc()));
            }
            for _ in 0..60 {
                let w = gen::random_lasso(&mut rng, b.alphabet(), 6, 6);
                prop_assert_eq!(lasso_run_deterministic(&r.automaton, &w), lasso_member_ngba(&b, &w).unwrap());
            }
        }

        #[test]
        fn reachable_tree_language_depends_on_root(seed in any::<u64>()) {
            let mut rng = gen::rng(seed);
            let b = gen::random_ngba(&mut rng, 4, 2, 2);
            let r = determinise_rabin(&b);
            let g = GhtConstruction::new(&b);
            for d in r.states.iter().take(6) {
                let restarted = b.with_initial(d.reached().clone());
                for _ in 0..20 {
                    let w = gen::random_lasso(&mut rng, b.alphabet(), 5, 5);
                    let from_d = lasso_cycle_marks(&g, d.clone(), &w).is_some_and(|marks| rabin_accepts(&marks));
                    prop_assert_eq!(from_d, lasso_member_ngba(&restarted, &w).unwrap());
                }
            }
        }
    }

    fn rabin_accepts(marks: &[GhtMark]) -> bool {
        marks.iter().flat_map(|m| m.acc.iter()).any(|v| marks.iter().all(|m| !m.rej.contains(v)))
    }
}
