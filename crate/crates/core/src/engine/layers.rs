//! The individual decision layers for one component of the subset product.

use std::collections::HashMap;

use super::components::Lifted;
use crate::automata::{Acceptance, DeterministicStep, EdgeAcc, Ngba};
use crate::bits::{AccSet, StateSet};
use crate::breakpoint::{BreakpointConstruction, BreakpointState};
use crate::ght::{Ght, GhtConstruction, NodeName};
use crate::graph::{bsccs, can_avoid, mecs, mecs_restricted, Component, MdpGraph};
use crate::model::product::{explore, Product, Start};
use crate::model::{Model, ModelKind};
use crate::subset::{classify_component_subset, product_subset, Classification, SubsetMark};

/// A breakpoint start `(m, s₀)` whose breakpoint product settled the verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub model_state: usize,
    pub start: BreakpointState,
}

/// One component state tried by the multi-breakpoint layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attempt {
    pub model_state: usize,
    pub reached: StateSet,
    /// The automaton state `q` whose start `({q}, 1, ∅)` succeeded.
    pub succeeded_with: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiOutcome {
    pub accepting: bool,
    pub witness: Option<Witness>,
    pub attempts: Vec<Attempt>,
    pub explored: usize,
}

/// The subset product `M × S` with its bottom SCCs (chains) or maximal end
/// components (MDPs), sorted by size and then by smallest state.
#[derive(Debug, Clone)]
pub struct Analysis<'a> {
    pub ngba: &'a Ngba,
    pub kind: ModelKind,
    pub product: Product<StateSet, SubsetMark>,
    pub graph: MdpGraph,
    pub components: Vec<Component>,
}

impl<'a> Analysis<'a> {
    /// `model` must be labelled over the alphabet of `ngba`.
    pub fn new(model: &Model, ngba: &'a Ngba) -> Self {
        assert_eq!(model.alphabet(), ngba.alphabet(), "model and automaton alphabets differ");
        let product = product_subset(model, ngba);
        let graph = product.graph();
        let mut components = match model.kind() {
            ModelKind::MarkovChain => bsccs(&graph),
            ModelKind::Mdp => mecs(&graph),
        };
        components.sort_by_key(|c| (c.len(), c.states[0]));
        Analysis { ngba, kind: model.kind(), product, graph, components }
    }

    /// `(m, R)` of a subset product state.
    pub fn pair(&self, s: usize) -> (usize, &StateSet) {
        (self.product.base[s], &self.product.aut[s])
    }

    pub fn classify_subset(&self, c: &Component) -> Classification {
        let inside = c.membership(self.product.num_states());
        let marks: Vec<&SubsetMark> = c
            .states
            .iter()
            .zip(&c.enabled)
            .flat_map(|(&s, en)| self.product.internal_marks(s, en, &inside).collect::<Vec<_>>())
            .collect();
        classify_component_subset(marks, self.ngba.num_acc())
    }

    fn explore_in<D: DeterministicStep>(
        &self,
        allowed: &[Vec<bool>],
        aut: &D,
        s: usize,
        init: D::State,
    ) -> Product<D::State, D::Mark> {
        explore(&self.product, aut, Start::At(s, init), |st, ch| allowed[st][ch])
    }

    fn allowed_of(&self, c: &Component) -> Vec<Vec<bool>> {
        let mut allowed: Vec<Vec<bool>> = self.product.choices.iter().map(|cs| vec![false; cs.len()]).collect();
        for (&s, en) in c.states.iter().zip(&c.enabled) {
            for &ch in en {
                allowed[s][ch] = true;
            }
        }
        allowed
    }

    /// The breakpoint layer started from `(m, (R, 1, ∅))` for the first state
    /// of the component. Returns the classification, the start used, and the
    /// number of explored product states.
    pub fn decide_breakpoint(&self, c: &Component) -> (Classification, Witness, usize) {
        let s = c.states[0];
        let start = BreakpointState::fresh(self.product.aut[s].clone());
        let witness = Witness { model_state: self.product.base[s], start: start.clone() };
        let p = self.explore_in(&self.allowed_of(c), &BreakpointConstruction::new(self.ngba), s, start);
        let explored = p.num_states();
        let lifted = Lifted::new(&p, |m| EdgeAcc::Buchi(if m.accepting { AccSet::single(0) } else { AccSet::EMPTY }));
        let rejecting = |m: &EdgeAcc| *m == EdgeAcc::Buchi(AccSet::single(1));
        let lifted_rej = Lifted::new(&p, |m| {
            EdgeAcc::Buchi(if m.rejecting { AccSet::single(1) } else { AccSet::EMPTY })
        });
        let verdict = if !lifted.accepting(self.kind, Acceptance::Buchi { sets: 1 }).is_empty() {
            Classification::Accepting
        } else {
            let rejected = match self.kind {
                ModelKind::MarkovChain => {
                    bsccs(&lifted_rej.graph).iter().any(|b| lifted_rej.any_internal(b, rejecting))
                }
                ModelKind::Mdp => {
                    let all = Component {
                        states: (0..p.num_states()).collect(),
                        enabled: p.choices.iter().map(|cs| (0..cs.len()).collect()).collect(),
                    };
                    lifted_rej.all_ecs_hit(&all, rejecting)
                }
            };
            if rejected {
                Classification::Rejecting
            } else {
                Classification::Unknown
            }
        };
        (verdict, witness, explored)
    }

    /// Whether the breakpoint product from some `(m, ({q}, 1, ∅))`, with
    /// `(m, R)` in the chain component and `q ∈ R`, has an accepting bottom
    /// SCC. Such an SCC is reached with positive probability, which decides
    /// the component by the 0/1 law. States are tried in canonical order.
    pub fn decide_multibreakpoint_mc(&self, c: &Component) -> MultiOutcome {
        let allowed = self.allowed_of(c);
        let mut order = c.states.clone();
        order.sort_by(|&a, &b| self.pair(a).cmp(&self.pair(b)));
        let mut attempts = Vec::new();
        let mut explored = 0;
        for s in order {
            let (m, r) = self.pair(s);
            for q in r.iter() {
                let start = BreakpointState::fresh(StateSet::singleton(q));
                let p = self.explore_in(&allowed, &BreakpointConstruction::new(self.ngba), s, start.clone());
                explored += p.num_states();
                let lifted =
                    Lifted::new(&p, |mk| EdgeAcc::Buchi(if mk.accepting { AccSet::single(0) } else { AccSet::EMPTY }));
                if !lifted.accepting(ModelKind::MarkovChain, Acceptance::Buchi { sets: 1 }).is_empty() {
                    attempts.push(Attempt { model_state: m, reached: r.clone(), succeeded_with: Some(q) });
                    let witness = Witness { model_state: m, start };
                    return MultiOutcome { accepting: true, witness: Some(witness), attempts, explored };
                }
            }
            attempts.push(Attempt { model_state: m, reached: r.clone(), succeeded_with: None });
        }
        MultiOutcome { accepting: false, witness: None, attempts, explored }
    }

    /// Tries the states `(m, R)` of the end component in canonical order,
    /// each with every start `({q}, 1, ∅)`, `q ∈ R`. After a failed state the
    /// states that cannot avoid it are dropped and the end components of the
    /// remainder recomputed.
    pub fn decide_multibreakpoint_mdp(&self, c: &Component) -> MultiOutcome {
        let mut allowed = self.allowed_of(c);
        let mut live: Vec<usize> = c.states.clone();
        let mut attempts = Vec::new();
        let mut explored = 0;
        loop {
            let Some(&s) = live.iter().min_by(|&&a, &&b| self.pair(a).cmp(&self.pair(b))) else {
                return MultiOutcome { accepting: false, witness: None, attempts, explored };
            };
            let (m, r) = self.pair(s);
            for q in r.iter() {
                let start = BreakpointState::fresh(StateSet::singleton(q));
                let p = self.explore_in(&allowed, &BreakpointConstruction::new(self.ngba), s, start.clone());
                explored += p.num_states();
                let lifted =
                    Lifted::new(&p, |mk| EdgeAcc::Buchi(if mk.accepting { AccSet::single(0) } else { AccSet::EMPTY }));
                if !lifted.accepting(ModelKind::Mdp, Acceptance::Buchi { sets: 1 }).is_empty() {
                    attempts.push(Attempt { model_state: m, reached: r.clone(), succeeded_with: Some(q) });
                    let witness = Witness { model_state: m, start };
                    return MultiOutcome { accepting: true, witness: Some(witness), attempts, explored };
                }
            }
            attempts.push(Attempt { model_state: m, reached: r.clone(), succeeded_with: None });
            let sub = MdpGraph::new(
                (0..self.graph.num_states())
                    .map(|t| {
                        (0..self.graph.choices(t).len())
                            .filter(|&ch| allowed.get(t).is_some_and(|a| a[ch]))
                            .map(|ch| self.graph.choices(t)[ch].clone())
                            .collect()
                    })
                    .collect(),
            );
            let mut avoid = vec![false; self.graph.num_states()];
            avoid[s] = true;
            let safe = can_avoid(&sub, &avoid);
            for (t, a) in allowed.iter_mut().enumerate() {
                for (ch, ok) in a.iter_mut().enumerate() {
                    *ok = *ok && safe[t] && self.graph.choices(t)[ch].iter().all(|&u| safe[u]);
                }
            }
            let mut padded = allowed.clone();
            padded.resize(self.graph.num_states(), Vec::new());
            let rest = mecs_restricted(&self.graph, &padded);
            allowed = self.product.choices.iter().map(|cs| vec![false; cs.len()]).collect();
            live.clear();
            for e in &rest {
                for (&t, en) in e.states.iter().zip(&e.enabled) {
                    live.push(t);
                    for &ch in en {
                        allowed[t][ch] = true;
                    }
                }
            }
        }
    }

    /// Rabin determinisation restricted to the component, with the history
    /// tree seeded from the subset label of its first state.
    pub fn decide_rabin_local(&self, c: &Component) -> (bool, usize) {
        let s = c.states[0];
        let p = self.explore_in(&self.allowed_of(c), &GhtConstruction::new(self.ngba), s, Ght::seeded(self.product.aut[s].clone()));
        let (lifted, pairs) = lift_rabin(&p);
        (!lifted.accepting(self.kind, Acceptance::Rabin { pairs }).is_empty(), p.num_states())
    }
}

/// Numbers the node names of a history-tree product and lifts its marks to
/// Rabin pairs.
pub(crate) fn lift_rabin<S: Clone + Eq + std::hash::Hash>(p: &Product<S, crate::ght::GhtMark>) -> (Lifted, usize) {
    let mut ids: HashMap<NodeName, u32> = HashMap::new();
    for b in p.choices.iter().flatten().flat_map(|c| c.branches.iter()) {
        for name in b.mark.acc.iter().chain(&b.mark.rej) {
            let next = ids.len() as u32;
            ids.entry(name.clone()).or_insert(next);
        }
    }
    let lifted = Lifted::new(p, |m| {
        let mut acc: Vec<u32> = m.acc.iter().map(|n| ids[n]).collect();
        let mut rej: Vec<u32> = m.rej.iter().map(|n| ids[n]).collect();
        acc.sort_unstable();
        rej.sort_unstable();
        EdgeAcc::Rabin { acc, rej }
    });
    (lifted, ids.len())
}
