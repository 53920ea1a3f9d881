//! Breakpoint automata over triples `(R, j, C)` with `C ⊊ R`.

use std::collections::HashMap;
use std::fmt;

use crate::automata::{Acceptance, Alphabet, DetAutomaton, DetEdge, DeterministicStep, EdgeAcc, Ngba, Symbol};
use crate::bits::{AccSet, StateSet};

/// A breakpoint state `(R, j, C)`. The index `j` is zero-based here and
/// printed one-based. The derived order (R, then j, then C) is the canonical
/// order used wherever breakpoint states are enumerated.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BreakpointState {
    pub reached: StateSet,
    pub index: usize,
    pub children: StateSet,
}

impl BreakpointState {
    pub fn new(reached: StateSet, index: usize, children: StateSet) -> Self {
        debug_assert!(!reached.is_empty() && children.is_subset(&reached) && children != reached);
        BreakpointState { reached, index, children }
    }

    /// `(R, 1, ∅)`.
    pub fn fresh(reached: StateSet) -> Self {
        BreakpointState::new(reached, 0, StateSet::new())
    }

    pub fn is_valid(&self, k: usize) -> bool {
        !self.reached.is_empty()
            && self.children.is_subset(&self.reached)
            && self.children != self.reached
            && self.index < k
    }
}

impl fmt::Debug for BreakpointState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?},{},{:?})", self.reached, self.index + 1, self.children)
    }
}

/// Flags of a breakpoint transition: `accepting` is membership in `A_ε`,
/// `rejecting` in `R_0`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct BpMark {
    pub accepting: bool,
    pub rejecting: bool,
}

/// One breakpoint step; `None` when `T(R, σ) = ∅`.
pub fn bp_successor(b: &Ngba, s: &BreakpointState, sym: Symbol) -> Option<(BreakpointState, BpMark)> {
    let reached = b.post(&s.reached, sym);
    if reached.is_empty() {
        return None;
    }
    let from_children = b.post(&s.children, sym);
    let children = from_children.union(&b.post_acc(&s.reached, sym, s.index));
    if children == reached {
        let next = BreakpointState::new(reached, (s.index + 1) % b.num_acc(), StateSet::new());
        Some((next, BpMark { accepting: true, rejecting: false }))
    } else {
        let rejecting = from_children.is_empty();
        Some((BreakpointState::new(reached, s.index, children), BpMark { accepting: false, rejecting }))
    }
}

/// On-the-fly breakpoint construction.
#[derive(Debug, Clone, Copy)]
pub struct BreakpointConstruction<'a> {
    ngba: &'a Ngba,
}

impl<'a> BreakpointConstruction<'a> {
    pub fn new(ngba: &'a Ngba) -> Self {
        BreakpointConstruction { ngba }
    }
}

impl DeterministicStep for BreakpointConstruction<'_> {
    type State = BreakpointState;
    type Mark = BpMark;

    fn step(&self, s: &BreakpointState, sym: Symbol) -> Option<(BreakpointState, BpMark)> {
        bp_successor(self.ngba, s, sym)
    }
}

/// Reachable fragment of the breakpoint automaton from a chosen start state.
#[derive(Debug, Clone)]
pub struct BreakpointAutomaton {
    alphabet: Alphabet,
    states: Vec<BreakpointState>,
    edges: Vec<Vec<(Symbol, usize, BpMark)>>,
}

/// Explores the breakpoint automaton of `b` from `init` (by default `(I, 1, ∅)`).
pub fn build_breakpoint(b: &Ngba, init: BreakpointState) -> BreakpointAutomaton {
    assert!(init.is_valid(b.num_acc()), "invalid breakpoint start state");
    let mut states = vec![init.clone()];
    let mut index = HashMap::from([(init, 0usize)]);
    let mut edges = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let s = states[i].clone();
        let mut out = Vec::new();
        for sym in b.enabled_symbols(&s.reached) {
            if let Some((t, mark)) = bp_successor(b, &s, sym) {
                let j = *index.entry(t.clone()).or_insert_with(|| {
                    states.push(t);
                    states.len() - 1
                });
                out.push((sym, j, mark));
            }
        }
        edges.push(out);
        i += 1;
    }
    BreakpointAutomaton { alphabet: b.alphabet().clone(), states, edges }
}

impl BreakpointAutomaton {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, i: usize) -> &BreakpointState {
        &self.states[i]
    }

    pub fn states(&self) -> &[BreakpointState] {
        &self.states
    }

    pub fn edges(&self, i: usize) -> &[(Symbol, usize, BpMark)] {
        &self.edges[i]
    }

    fn det(&self, acceptance: Acceptance, acc: impl Fn(BpMark) -> EdgeAcc) -> DetAutomaton {
        let edges = self
            .edges
            .iter()
            .map(|l| l.iter().map(|&(symbol, target, m)| DetEdge { symbol, target, acc: acc(m) }).collect())
            .collect();
        DetAutomaton::new(self.alphabet.clone(), 0, edges, acceptance).expect("breakpoint automaton is deterministic")
    }

    /// `BP` (= `BP^u`): Büchi acceptance on `A_ε`.
    pub fn to_det_under(&self) -> DetAutomaton {
        self.det(Acceptance::Buchi { sets: 1 }, |m| {
            EdgeAcc::Buchi(if m.accepting { AccSet::single(0) } else { AccSet::EMPTY })
        })
    }

    /// `BP^o`: Rabin pairs `(A_ε, ∅)` and `(T', R_0)`.
    pub fn to_det_over(&self) -> DetAutomaton {
        self.det(Acceptance::Rabin { pairs: 2 }, |m| {
            let mut acc = vec![1];
            if m.accepting {
                acc.insert(0, 0);
            }
            EdgeAcc::Rabin { acc, rej: if m.rejecting { vec![1] } else { vec![] } }
        })
    }
}

/// Number of breakpoint states `|bp(Q, k)| = k · (3ⁿ − 2ⁿ)`.
pub fn bp_state_count(n: usize, k: usize) -> u64 {
    let n = n as u32;
    (k as u64) * (3u64.pow(n) - 2u64.pow(n))
}

/// All of `bp(Q, k)` in canonical order.
pub fn all_breakpoint_states(n: usize, k: usize) -> Vec<BreakpointState> {
    assert!(n <= 12, "enumeration is exponential in the number of states");
    let mut out = Vec::new();
    for r in 1u64..(1 << n) {
        for j in 0..k {
            let mut c = 0u64;
            loop {
                if c != r {
                    out.push(BreakpointState::new(StateSet::from_mask(r), j, StateSet::from_mask(c)));
                }
                if c == r {
                    break;
                }
                c = (c.wrapping_sub(r)) & r;
            }
        }
    }
    out.sort();
    out
}
