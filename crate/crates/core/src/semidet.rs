//! Semi-determinisation `SD(B)` and its parity determinisation `D(SD(B))`.
//!
//! The initial part of `SD(B)` is the subset automaton without accepting
//! transitions; the final part is the full breakpoint automaton with `A_ε`
//! accepting. A transit on `σ` leads from `R` to every `(R', j, C)` with
//! `R' ⊆ T(R, σ)`; those targets are enumerated on demand.

use std::cell::RefCell;
use std::collections::{HashMap, HashSet};

use crate::automata::{Acceptance, DetAutomaton, DetEdge, DeterministicStep, EdgeAcc, Ngba, NgbaBuilder, Symbol};
use crate::bits::{AccSet, StateSet};
use crate::breakpoint::{bp_state_count, bp_successor, BreakpointState};
use crate::subset::{build_subset, SubsetAutomaton};

/// The semi-deterministic automaton of an NGBA.
#[derive(Debug, Clone)]
pub struct SemiDet<'a> {
    ngba: &'a Ngba,
    subset: SubsetAutomaton,
}

pub fn build_semidet(b: &Ngba) -> SemiDet<'_> {
    SemiDet { ngba: b, subset: build_subset(b) }
}

impl<'a> SemiDet<'a> {
    pub fn ngba(&self) -> &'a Ngba {
        self.ngba
    }

    /// The initial (subset) part.
    pub fn initial_part(&self) -> &SubsetAutomaton {
        &self.subset
    }

    /// `|Q_f| = |bp(Q, k)|`.
    pub fn final_part_size(&self) -> u64 {
        bp_state_count(self.ngba.num_states(), self.ngba.num_acc())
    }

    /// `(R, σ, (R', j, C)) ∈ T_t`.
    pub fn has_transit(&self, r: &StateSet, sym: Symbol, target: &BreakpointState) -> bool {
        target.is_valid(self.ngba.num_acc()) && target.reached.is_subset(&self.ngba.post(r, sym))
    }

    /// All transit targets of `(R, σ)` in canonical order.
    pub fn transit_targets(&self, r: &StateSet, sym: Symbol) -> Vec<BreakpointState> {
        transit_targets(self.ngba, r, sym)
    }

    /// `SD(B)` as an explicit one-set NGBA: subset states first (in subset
    /// automaton order), then every breakpoint state reachable through a
    /// transit. Exponential; meant for small automata.
    pub fn to_ngba(&self) -> Ngba {
        let b = self.ngba;
        let ns = self.subset.num_states();
        let mut bp_states: Vec<BreakpointState> = Vec::new();
        let mut bp_index: HashMap<BreakpointState, usize> = HashMap::new();
        let mut intern = |s: BreakpointState, list: &mut Vec<BreakpointState>| {
            *bp_index.entry(s.clone()).or_insert_with(|| {
                list.push(s);
                list.len() - 1
            })
        };
        let mut edges: Vec<(usize, Symbol, usize, bool)> = Vec::new();
        for i in 0..ns {
            for &(sym, t, _) in self.subset.edges(i) {
                edges.push((i, sym, t, false));
                for target in self.transit_targets(self.subset.state(i), sym) {
                    let j = intern(target, &mut bp_states);
                    edges.push((i, sym, ns + j, false));
                }
            }
        }
        let mut next = 0;
        while next < bp_states.len() {
            let s = bp_states[next].clone();
            for sym in b.alphabet().symbols() {
                if let Some((t, m)) = bp_successor(b, &s, sym) {
                    let j = intern(t, &mut bp_states);
                    edges.push((ns + next, sym, ns + j, m.accepting));
                }
            }
            next += 1;
        }
        let mut bd = NgbaBuilder::new(b.alphabet().clone(), ns + bp_states.len(), 1);
        bd.add_initial(0);
        for (src, sym, dst, acc) in edges {
            bd.add_edge(src, sym, dst, if acc { AccSet::single(0) } else { AccSet::EMPTY });
        }
        bd.build().expect("semi-deterministic automaton is well formed")
    }
}

fn transit_targets(b: &Ngba, r: &StateSet, sym: Symbol) -> Vec<BreakpointState> {
    let post = b.post(r, sym);
    let mut out = Vec::new();
    for reached in post.subsets().into_iter().filter(|s| !s.is_empty()) {
        for j in 0..b.num_acc() {
            for children in reached.subsets() {
                if children != reached {
                    out.push(BreakpointState::new(reached.clone(), j, children));
                }
            }
        }
    }
    out.sort();
    out
}

/// A state `(r, f)` of `D(SD(B))`; `r = None` is the blank subset part.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ParityState {
    pub reached: Option<StateSet>,
    pub tracked: Vec<BreakpointState>,
}

impl ParityState {
    pub fn initial(b: &Ngba) -> Self {
        ParityState { reached: Some(b.initial().clone()), tracked: Vec::new() }
    }
}

/// On-the-fly parity determinisation of `SD(B)`. Breakpoint steps are
/// memoised, so one instance should not be shared across threads.
#[derive(Debug)]
pub struct ParityConstruction<'a> {
    ngba: &'a Ngba,
    final_size: u64,
    memo: RefCell<HashMap<(BreakpointState, Symbol), Option<(BreakpointState, bool)>>>,
}

impl<'a> ParityConstruction<'a> {
    pub fn new(ngba: &'a Ngba) -> Self {
        ParityConstruction {
            ngba,
            final_size: bp_state_count(ngba.num_states(), ngba.num_acc()),
            memo: RefCell::new(HashMap::new()),
        }
    }

    /// Priorities range over `1 ..= 2(|Q_f| + 1)`; all of them are below this.
    pub fn num_priorities(&self) -> u64 {
        2 * self.final_size + 3
    }

    fn bp_step(&self, s: &BreakpointState, sym: Symbol) -> Option<(BreakpointState, bool)> {
        if let Some(hit) = self.memo.borrow().get(&(s.clone(), sym)) {
            return hit.clone();
        }
        let r = bp_successor(self.ngba, s, sym).map(|(t, m)| (t, m.accepting));
        self.memo.borrow_mut().insert((s.clone(), sym), r.clone());
        r
    }
}

impl DeterministicStep for ParityConstruction<'_> {
    type State = ParityState;
    type Mark = u64;

    fn step(&self, s: &ParityState, sym: Symbol) -> Option<(ParityState, u64)> {
        let none = self.final_size + 1;
        let reached = s.reached.as_ref().map(|r| self.ngba.post(r, sym)).filter(|r| !r.is_empty());
        let g: Vec<Option<(BreakpointState, bool)>> = s.tracked.iter().map(|f| self.bp_step(f, sym)).collect();
        let a = g.iter().position(|x| x.as_ref().is_some_and(|x| x.1)).map_or(none, |i| i as u64 + 1);
        let mut seen = HashSet::new();
        let g1: Vec<Option<BreakpointState>> =
            g.into_iter().map(|x| x.map(|x| x.0).filter(|t| seen.insert(t.clone()))).collect();
        let d = g1.iter().position(Option::is_none).map_or(none, |i| i as u64 + 1);
        let mut tracked: Vec<BreakpointState> = g1.into_iter().flatten().collect();
        if let Some(r) = &s.reached {
            for t in transit_targets(self.ngba, r, sym) {
                if !seen.contains(&t) {
                    tracked.push(t);
                }
            }
        }
        let priority = if d <= a { 2 * d - 1 } else { 2 * a };
        Some((ParityState { reached, tracked }, priority))
    }
}

/// The reachable part of `D(SD(B))` as an explicit min-even parity automaton.
pub fn determinise_parity(b: &Ngba) -> (DetAutomaton, Vec<ParityState>) {
    let pc = ParityConstruction::new(b);
    let init = ParityState::initial(b);
    let mut states = vec![init.clone()];
    let mut index = HashMap::from([(init, 0usize)]);
    let mut edges = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let s = states[i].clone();
        let mut out = Vec::new();
        for sym in b.alphabet().symbols() {
            let (t, p) = pc.step(&s, sym).expect("parity automaton is complete");
            let target = *index.entry(t.clone()).or_insert_with(|| {
                states.push(t);
                states.len() - 1
            });
            out.push(DetEdge { symbol: sym, target, acc: EdgeAcc::Parity(p) });
        }
        edges.push(out);
        i += 1;
    }
    let a = DetAutomaton::new(b.alphabet().clone(), 0, edges, Acceptance::Parity { priorities: pc.num_priorities() })
        .expect("parity automaton is deterministic");
    (a, states)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::tests::b_e;
    use crate::automata::{lasso_cycle_marks, lasso_member_ngba, lasso_run_deterministic, LassoWord};
    use crate::gen;
    use proptest::prelude::*;

    fn set(qs: &[usize]) -> StateSet {
        qs.iter().copied().collect()
    }

    fn bp(r: &[usize], j: usize, c: &[usize]) -> BreakpointState {
        BreakpointState::new(set(r), j - 1, set(c))
    }

    const A: Symbol = 1;
    const B: Symbol = 2;

    #[test]
    fn running_example_parts() {
        let b = b_e();
        let sd = build_semidet(&b);
        assert_eq!(sd.initial_part().num_states(), 2);
        assert_eq!(sd.final_part_size(), 38);
        assert!(sd.has_transit(&set(&[1, 2]), B, &bp(&[0], 1, &[])));
        assert!(sd.has_transit(&set(&[0]), A, &bp(&[1, 2], 1, &[1])));
        assert!(!sd.has_transit(&set(&[0]), A, &bp(&[0], 1, &[])));
        assert_eq!(sd.transit_targets(&set(&[0]), A).len(), 10);
        let reachable_final: usize = sd.to_ngba().num_states() - 2;
        assert_eq!(reachable_final, 12);
    }

    /// The subset state `{y,z}` paired with ten tracked breakpoint states in
    /// the order used by the worked example.
    fn worked_example_state() -> ParityState {
        ParityState {
            reached: Some(set(&[1, 2])),
            tracked: vec![
                bp(&[1, 2], 1, &[1]),
                bp(&[1, 2], 2, &[]),
                bp(&[1, 2], 2, &[1]),
                bp(&[1, 2], 1, &[]),
                bp(&[1, 2], 1, &[2]),
                bp(&[1, 2], 2, &[2]),
                bp(&[1], 1, &[]),
                bp(&[1], 2, &[]),
                bp(&[2], 1, &[]),
                bp(&[2], 2, &[]),
            ],
        }
    }

    #[test]
    fn worked_example_priorities() {
        let b = b_e();
        let pc = ParityConstruction::new(&b);
        let f1 = worked_example_state();
        let (x_f2, p) = pc.step(&f1, B).unwrap();
        assert_eq!(p, 3);
        assert_eq!(x_f2, ParityState { reached: Some(set(&[0])), tracked: vec![bp(&[0], 1, &[]), bp(&[0], 2, &[])] });
        let (back, p) = pc.step(&x_f2, A).unwrap();
        assert_eq!(p, 77);
        assert_eq!(back.reached, Some(set(&[1, 2])));
        assert_eq!(&back.tracked[..2], &[bp(&[1, 2], 1, &[1]), bp(&[1, 2], 2, &[])]);
    }

    #[test]
    fn blank_state_loops_with_the_largest_odd_priority() {
        let b = b_e();
        let pc = ParityConstruction::new(&b);
        let blank = ParityState { reached: None, tracked: vec![] };
        for sym in [1, 2, 4] {
            assert_eq!(pc.step(&blank, sym), Some((blank.clone(), 77)));
        }
    }

    #[test]
    fn running_example_language() {
        let b = b_e();
        let (d, _) = determinise_parity(&b);
        let w = |v: Vec<Symbol>| LassoWord::new(vec![], v);
        assert!(lasso_run_deterministic(&d, &w(vec![1, 2, 1, 4])));
        assert!(!lasso_run_deterministic(&d, &w(vec![1, 2])));
        assert!(!lasso_run_deterministic(&d, &w(vec![1, 1])));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn languages_agree(seed in any::<u64>()) {
            let mut rng = gen::rng(seed);
            let b = gen::random_ngba(&mut rng, 3, 2, 2);
            let sd = build_semidet(&b).to_ngba();
            let pc = ParityConstruction::new(&b);
            for _ in 0..40 {
                let w = gen::random_lasso(&mut rng, b.alphabet(), 5, 5);
                let expected = lasso_member_ngba(&b, &w).unwrap();
                prop_assert_eq!(lasso_member_ngba(&sd, &w).unwrap(), expected);
                let marks = lasso_cycle_marks(&pc, ParityState::initial(&b), &w).unwrap();
                prop_assert_eq!(marks.iter().min().unwrap() % 2 == 0, expected);
            }
        }

        #[test]
        fn final_part_language_ignores_index_and_children(seed in any::<u64>()) {
            let mut rng = gen::rng(seed);
            let b = gen::random_ngba(&mut rng, 3, 2, 2);
            let all = crate::breakpoint::all_breakpoint_states(b.num_states(), b.num_acc());
            for _ in 0..20 {
                let w = gen::random_lasso(&mut rng, b.alphabet(), 4, 4);
                for s in &all {
                    let via_bp = lasso_cycle_marks(&crate::breakpoint::BreakpointConstruction::new(&b), s.clone(), &w)
                        .is_some_and(|m| m.iter().any(|m| m.accepting));
                    let fresh = lasso_cycle_marks(
                        &crate::breakpoint::BreakpointConstruction::new(&b),
                        BreakpointState::fresh(s.reached.clone()),
                        &w,
                    )
                    .is_some_and(|m| m.iter().any(|m| m.accepting));
                    prop_assert_eq!(via_bp, fresh);
                }
            }
        }
    }
}
