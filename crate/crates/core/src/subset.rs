//! The subset automaton with over- and under-approximating acceptance marks.

use std::collections::HashMap;

use crate::automata::{
    Acceptance, DetAutomaton, DetEdge, DeterministicStep, EdgeAcc, Ngba, NgbaBuilder, Symbol,
};
use crate::bits::{AccSet, StateSet};
use crate::model::product::{explore, Product, Start};
use crate::model::Model;

/// Acceptance marks of a subset transition `(R, σ, C)`.
///
/// `over` has bit `i` iff some `(q, σ, q') ∈ F_i` with `q ∈ R`, `q' ∈ C`;
/// `under` has bit `i` iff every pair `(q, q') ∈ R × C` is a transition in `F_i`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct SubsetMark {
    pub over: AccSet,
    pub under: AccSet,
}

/// On-the-fly subset construction over a borrowed NGBA.
#[derive(Debug, Clone, Copy)]
pub struct SubsetConstruction<'a> {
    ngba: &'a Ngba,
}

impl<'a> SubsetConstruction<'a> {
    pub fn new(ngba: &'a Ngba) -> Self {
        SubsetConstruction { ngba }
    }

    pub fn ngba(&self) -> &'a Ngba {
        self.ngba
    }
}

impl DeterministicStep for SubsetConstruction<'_> {
    type State = StateSet;
    type Mark = SubsetMark;

    fn step(&self, from: &StateSet, sym: Symbol) -> Option<(StateSet, SubsetMark)> {
        let b = self.ngba;
        let to = b.post(from, sym);
        if to.is_empty() {
            return None;
        }
        let k = b.num_acc();
        let mut over = AccSet::EMPTY;
        let mut under = AccSet::all(k);
        let mut per_set = vec![StateSet::new(); k];
        for q in from.iter() {
            per_set.iter_mut().for_each(|s| *s = StateSet::new());
            for e in b.edges_on(q, sym) {
                over = over.union(e.marks);
                for j in e.marks.iter() {
                    per_set[j].insert(e.target);
                }
            }
            for (j, targets) in per_set.iter().enumerate() {
                if *targets != to {
                    under = AccSet(under.0 & !(1 << j));
                }
            }
        }
        Some((to, SubsetMark { over, under }))
    }
}

/// Reachable fragment of the subset automaton, numbered in breadth-first order
/// from `{I}` with symbols ascending.
#[derive(Debug, Clone)]
pub struct SubsetAutomaton {
    num_acc: usize,
    states: Vec<StateSet>,
    edges: Vec<Vec<(Symbol, usize, SubsetMark)>>,
    alphabet: crate::automata::Alphabet,
}

pub fn build_subset(b: &Ngba) -> SubsetAutomaton {
    let sc = SubsetConstruction::new(b);
    let mut states = vec![b.initial().clone()];
    let mut index: HashMap<StateSet, usize> = HashMap::from([(b.initial().clone(), 0)]);
    let mut edges = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let r = states[i].clone();
        let mut out = Vec::new();
        for sym in b.enabled_symbols(&r) {
            if let Some((c, mark)) = sc.step(&r, sym) {
                let j = *index.entry(c.clone()).or_insert_with(|| {
                    states.push(c);
                    states.len() - 1
                });
                out.push((sym, j, mark));
            }
        }
        edges.push(out);
        i += 1;
    }
    SubsetAutomaton { num_acc: b.num_acc(), states, edges, alphabet: b.alphabet().clone() }
}

impl SubsetAutomaton {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, i: usize) -> &StateSet {
        &self.states[i]
    }

    pub fn index_of(&self, r: &StateSet) -> Option<usize> {
        self.states.iter().position(|s| s == r)
    }

    pub fn edges(&self, i: usize) -> &[(Symbol, usize, SubsetMark)] {
        &self.edges[i]
    }

    pub fn num_acc(&self) -> usize {
        self.num_acc
    }

    /// Transitions in `F^o_j` (`under = false`) or `F^u_j` (`under = true`),
    /// as `(source, symbol, target)` indices.
    pub fn acceptance_set(&self, j: usize, under: bool) -> Vec<(usize, Symbol, usize)> {
        let mut out = Vec::new();
        for (i, list) in self.edges.iter().enumerate() {
            for &(sym, t, m) in list {
                if (if under { m.under } else { m.over }).contains(j) {
                    out.push((i, sym, t));
                }
            }
        }
        out
    }

    /// The deterministic generalised Büchi automaton `S^u` or `S^o`.
    pub fn to_det(&self, under: bool) -> DetAutomaton {
        let edges = self
            .edges
            .iter()
            .map(|l| {
                l.iter()
                    .map(|&(symbol, target, m)| DetEdge {
                        symbol,
                        target,
                        acc: EdgeAcc::Buchi(if under { m.under } else { m.over }),
                    })
                    .collect()
            })
            .collect();
        DetAutomaton::new(self.alphabet.clone(), 0, edges, Acceptance::Buchi { sets: self.num_acc })
            .expect("subset automaton is deterministic")
    }

    /// `S^u` or `S^o` as an NGBA, e.g. for HOA export.
    pub fn to_ngba(&self, under: bool) -> Ngba {
        let mut bd = NgbaBuilder::new(self.alphabet.clone(), self.num_states(), self.num_acc);
        bd.add_initial(0);
        for (i, l) in self.edges.iter().enumerate() {
            for &(sym, t, m) in l {
                bd.add_edge(i, sym, t, if under { m.under } else { m.over });
            }
        }
        bd.build().expect("subset automaton is well formed")
    }
}

/// Outcome of a sound but incomplete component test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    Accepting,
    Rejecting,
    Unknown,
}

/// Classifies a component of the subset product from the marks of its
/// internal transitions: accepting if every `F^u_i` is hit, rejecting if some
/// `F^o_i` is missed.
pub fn classify_component_subset<'a>(marks: impl IntoIterator<Item = &'a SubsetMark>, k: usize) -> Classification {
    let (over, under) = marks
        .into_iter()
        .fold((AccSet::EMPTY, AccSet::EMPTY), |(o, u), m| (o.union(m.over), u.union(m.under)));
    let all = AccSet::all(k);
    if under.is_superset(all) {
        Classification::Accepting
    } else if !over.is_superset(all) {
        Classification::Rejecting
    } else {
        Classification::Unknown
    }
}

/// The product `M × S`, carrying both mark families.
pub fn product_subset(model: &Model, b: &Ngba) -> Product<StateSet, SubsetMark> {
    explore(
        model,
        &SubsetConstruction::new(b),
        Start::Initial { state: b.initial().clone(), dist: model.initial() },
        |_, _| true,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::tests::b_e;
    use crate::automata::{lasso_member_ngba, lasso_run_deterministic};
    use crate::gen;
    use crate::graph::bsccs;
    use crate::model::{load_model, ModelKind};
    use proptest::prelude::*;

    fn set(qs: &[usize]) -> StateSet {
        qs.iter().copied().collect()
    }

    #[test]
    fn running_example_subset_automaton() {
        let s = build_subset(&b_e());
        assert_eq!(s.num_states(), 2);
        assert_eq!(s.state(0), &set(&[0]));
        assert_eq!(s.state(1), &set(&[1, 2]));
        assert_eq!(s.acceptance_set(0, false), vec![(0, 1, 1)]);
        assert_eq!(s.acceptance_set(1, false), vec![(1, 2, 0)]);
        assert!(s.acceptance_set(0, true).is_empty());
        assert!(s.acceptance_set(1, true).is_empty());
    }

    #[test]
    fn deterministic_input_gives_matching_families() {
        let mut rng = gen::rng(7);
        for _ in 0..20 {
            let b = gen::random_deterministic_ngba(&mut rng, 4, 2, 2);
            let s = build_subset(&b);
            assert!(s.num_states() <= b.num_states());
            for i in 0..s.num_states() {
                assert_eq!(s.state(i).len(), 1);
                for &(_, _, m) in s.edges(i) {
                    assert_eq!(m.over, m.under);
                }
            }
        }
    }

    #[test]
    fn running_example_product_is_one_unknown_bscc() {
        let m = load_model("0 2 2/3\n0 1 1/3\n1 0 1\n2 0 1\n", "#aps a b c\n0: a\n1: b\n2: c\n", ModelKind::MarkovChain)
            .unwrap();
        let b = b_e();
        let p = product_subset(&m, &b);
        let pairs: Vec<(usize, StateSet)> = p.base.iter().copied().zip(p.aut.iter().cloned()).collect();
        assert_eq!(pairs, vec![(0, set(&[1, 2])), (1, set(&[0])), (2, set(&[0]))]);
        let comps = bsccs(&p.graph());
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].len(), 3);
        let inside = comps[0].membership(p.num_states());
        let marks: Vec<&SubsetMark> = comps[0]
            .states
            .iter()
            .zip(&comps[0].enabled)
            .flat_map(|(&s, en)| p.internal_marks(s, en, &inside))
            .collect();
        assert_eq!(classify_component_subset(marks, 2), Classification::Unknown);
    }

    #[test]
    fn definition_instances() {
        let all = SubsetMark { over: AccSet::all(2), under: AccSet::all(2) };
        let half = SubsetMark { over: AccSet::single(1), under: AccSet::EMPTY };
        assert_eq!(classify_component_subset([&all, &half], 2), Classification::Accepting);
        assert_eq!(classify_component_subset([&half], 2), Classification::Rejecting);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn sandwich_and_size_bound(seed in any::<u64>()) {
            let mut rng = gen::rng(seed);
            let b = gen::random_ngba(&mut rng, 4, 2, 2);
            let s = build_subset(&b);
            prop_assert!(s.num_states() < (1 << b.num_states()));
            let (su, so) = (s.to_det(true), s.to_det(false));
            for i in 0..s.num_states() {
                for &(_, _, m) in s.edges(i) {
                    prop_assert!(m.over.is_superset(m.under));
                }
            }
            for _ in 0..40 {
                let w = gen::random_lasso(&mut rng, b.alphabet(), 6, 6);
                let inb = lasso_member_ngba(&b, &w).unwrap();
                prop_assert!(!lasso_run_deterministic(&su, &w) || inb);
                prop_assert!(!inb || lasso_run_deterministic(&so, &w));
            }
        }

        #[test]
        fn classification_is_monotone(over in proptest::collection::vec(0u64..4, 1..6),
                                      extra in proptest::collection::vec(0u64..4, 0..4)) {
            let marks: Vec<SubsetMark> = over.iter().map(|&o| SubsetMark { over: AccSet(o), under: AccSet(o & 1) }).collect();
            let mut more = marks.clone();
            more.extend(extra.iter().map(|&o| SubsetMark { over: AccSet(o), under: AccSet::EMPTY }));
            let before = classify_component_subset(&marks, 2);
            let after = classify_component_subset(&more, 2);
            prop_assert!(!(before == Classification::Accepting && after == Classification::Rejecting));
        }
    }
}
