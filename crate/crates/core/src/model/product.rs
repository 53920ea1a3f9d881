//! Products of a probabilistic transition structure with a deterministic
//! automaton explored on the fly.
//!
//! Probability mass of transitions on which the automaton blocks is kept per
//! choice as `blocked`; the graph view routes it to an absorbing sink.

use std::collections::HashMap;
use std::hash::Hash;

use crate::automata::{DeterministicStep, Symbol};
use crate::graph::MdpGraph;
use crate::model::Model;

/// A labelled probabilistic transition structure that a product can be built
/// over: a model, or an already explored product.
pub trait Source {
    fn num_states(&self) -> usize;
    fn label(&self, s: usize) -> Symbol;
    fn num_choices(&self, s: usize) -> usize;
    fn action(&self, s: usize, c: usize) -> usize;
    /// Successors of choice `c`; `None` stands for a blocked, rejecting branch.
    fn branches(&self, s: usize, c: usize) -> Vec<(Option<usize>, f64)>;
}

impl Source for Model {
    fn num_states(&self) -> usize {
        Model::num_states(self)
    }
    fn label(&self, s: usize) -> Symbol {
        Model::label(self, s)
    }
    fn num_choices(&self, s: usize) -> usize {
        self.choices(s).len()
    }
    fn action(&self, s: usize, c: usize) -> usize {
        self.choices(s)[c].action
    }
    fn branches(&self, s: usize, c: usize) -> Vec<(Option<usize>, f64)> {
        self.choices(s)[c].dist.iter().map(|&(t, p)| (Some(t), p)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch<M> {
    pub target: usize,
    pub prob: f64,
    pub mark: M,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductChoice<M> {
    pub action: usize,
    /// Index of the choice in the underlying source state.
    pub source_choice: usize,
    pub branches: Vec<Branch<M>>,
    /// Probability of moving to a successor on which the automaton blocks.
    pub blocked: f64,
}

/// An explored product. State `i` pairs source state `base[i]` with automaton
/// state `aut[i]`.
#[derive(Debug, Clone)]
pub struct Product<S, M> {
    pub base: Vec<usize>,
    pub aut: Vec<S>,
    pub labels: Vec<Symbol>,
    pub choices: Vec<Vec<ProductChoice<M>>>,
    /// Initial distribution; `None` is initial mass rejected immediately.
    pub initial: Vec<(Option<usize>, f64)>,
    index: HashMap<(usize, S), usize>,
}

impl<S: Clone + Eq + Hash, M> Product<S, M> {
    pub fn num_states(&self) -> usize {
        self.base.len()
    }

    pub fn state_of(&self, base: usize, aut: &S) -> Option<usize> {
        self.index.get(&(base, aut.clone())).copied()
    }

    pub fn num_transitions(&self) -> usize {
        self.choices.iter().flatten().map(|c| c.branches.len() + usize::from(c.blocked > 0.0)).sum()
    }

    /// The underlying graph. If some branch blocks, one extra absorbing sink
    /// state (index [`Self::num_states`]) receives all blocked branches.
    pub fn graph(&self) -> MdpGraph {
        let sink = self.num_states();
        let mut any_blocked = false;
        let mut choices: Vec<Vec<Vec<usize>>> = self
            .choices
            .iter()
            .map(|cs| {
                cs.iter()
                    .map(|c| {
                        let mut succ: Vec<usize> = c.branches.iter().map(|b| b.target).collect();
                        if c.blocked > 0.0 {
                            any_blocked = true;
                            succ.push(sink);
                        }
                        succ
                    })
                    .collect()
            })
            .collect();
        if any_blocked {
            choices.push(Vec::new());
        }
        MdpGraph::new(choices)
    }

    /// Marks of the branches of `s` that stay inside `inside`, over the
    /// choices listed in `enabled`.
    pub fn internal_marks<'a>(
        &'a self,
        s: usize,
        enabled: &'a [usize],
        inside: &'a [bool],
    ) -> impl Iterator<Item = &'a M> + 'a {
        enabled
            .iter()
            .flat_map(move |&c| self.choices[s][c].branches.iter())
            .filter(move |b| inside[b.target])
            .map(|b| &b.mark)
    }
}

impl<S: Clone + Eq + Hash, M> Source for Product<S, M> {
    fn num_states(&self) -> usize {
        self.base.len()
    }
    fn label(&self, s: usize) -> Symbol {
        self.labels[s]
    }
    fn num_choices(&self, s: usize) -> usize {
        self.choices[s].len()
    }
    fn action(&self, s: usize, c: usize) -> usize {
        self.choices[s][c].action
    }
    fn branches(&self, s: usize, c: usize) -> Vec<(Option<usize>, f64)> {
        let ch = &self.choices[s][c];
        let mut out: Vec<(Option<usize>, f64)> = ch.branches.iter().map(|b| (Some(b.target), b.prob)).collect();
        if ch.blocked > 0.0 {
            out.push((None, ch.blocked));
        }
        out
    }
}

/// Where exploration starts.
pub enum Start<'a, S> {
    /// Read the label of every initial source state from this automaton state:
    /// `μ'((m, d)) = μ(m)` for `d = T(q₀, L(m))`.
    Initial { state: S, dist: &'a [(usize, f64)] },
    /// A single product state, already positioned.
    At(usize, S),
}

/// Explores the reachable product of `src` and `aut`, following only the
/// source choices for which `allowed(state, choice)` holds.
pub fn explore<X, D>(
    src: &X,
    aut: &D,
    start: Start<'_, D::State>,
    mut allowed: impl FnMut(usize, usize) -> bool,
) -> Product<D::State, D::Mark>
where
    X: Source + ?Sized,
    D: DeterministicStep,
{
    let mut p = Product {
        base: Vec::new(),
        aut: Vec::new(),
        labels: Vec::new(),
        choices: Vec::new(),
        initial: Vec::new(),
        index: HashMap::new(),
    };
    let intern = |p: &mut Product<D::State, D::Mark>, s: usize, q: D::State| -> usize {
        if let Some(&i) = p.index.get(&(s, q.clone())) {
            return i;
        }
        let i = p.base.len();
        p.index.insert((s, q.clone()), i);
        p.base.push(s);
        p.aut.push(q);
        p.labels.push(src.label(s));
        p.choices.push(Vec::new());
        i
    };
    match start {
        Start::Initial { state, dist } => {
            for &(m, prob) in dist {
                let target = aut.step(&state, src.label(m)).map(|(q, _)| intern(&mut p, m, q));
                p.initial.push((target, prob));
            }
        }
        Start::At(s, q) => {
            let i = intern(&mut p, s, q);
            p.initial.push((Some(i), 1.0));
        }
    }
    let mut next = 0;
    while next < p.base.len() {
        let (s, q) = (p.base[next], p.aut[next].clone());
        let mut out = Vec::new();
        for c in 0..src.num_choices(s) {
            if !allowed(s, c) {
                continue;
            }
            let mut branches = Vec::new();
            let mut blocked = 0.0;
            for (t, prob) in src.branches(s, c) {
                match t.and_then(|t| aut.step(&q, src.label(t)).map(|r| (t, r))) {
                    Some((t, (q2, mark))) => {
                        let target = intern(&mut p, t, q2);
                        branches.push(Branch { target, prob, mark });
                    }
                    None => blocked += prob,
                }
            }
            out.push(ProductChoice { action: src.action(s, c), source_choice: c, branches, blocked });
        }
        p.choices[next] = out;
        next += 1;
    }
    p
}

/// Product of a model with an explicit deterministic automaton, from its
/// initial state.
pub fn product<D: DeterministicStep>(model: &Model, aut: &D, init: D::State) -> Product<D::State, D::Mark> {
    explore(model, aut, Start::Initial { state: init, dist: model.initial() }, |_, _| true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{Acceptance, Alphabet, DetAutomaton, DetEdge, EdgeAcc};
    use crate::model::{load_model, ModelKind};

    #[test]
    fn universal_automaton_product_is_the_model() {
        let m = load_model(
            "0 1 1/2\n0 2 1/2\n1 1 1\n2 0 1\n",
            "#aps p\n0: p\n",
            ModelKind::MarkovChain,
        )
        .unwrap();
        let al = Alphabet::new(["p"]).unwrap();
        let edges = vec![(0..2)
            .map(|s| DetEdge { symbol: s, target: 0, acc: EdgeAcc::Buchi(crate::bits::AccSet::single(0)) })
            .collect()];
        let a = DetAutomaton::new(al, 0, edges, Acceptance::Buchi { sets: 1 }).unwrap();
        let p = product(&m, &a, 0);
        assert_eq!(p.num_states(), 3);
        assert_eq!(p.base, vec![0, 1, 2]);
        assert_eq!(p.num_transitions(), m.num_transitions());
        for s in 0..3 {
            let total: f64 = p.choices[s].iter().flat_map(|c| c.branches.iter()).map(|b| b.prob).sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn blocked_mass_goes_to_sink() {
        let m = load_model("0 1 1/2\n0 0 1/2\n1 1 1\n", "#aps p\n1: p\n", ModelKind::MarkovChain).unwrap();
        let al = Alphabet::new(["p"]).unwrap();
        let edges = vec![vec![DetEdge { symbol: 0, target: 0, acc: EdgeAcc::Parity(0) }]];
        let a = DetAutomaton::new(al, 0, edges, Acceptance::Parity { priorities: 1 }).unwrap();
        let p = product(&m, &a, 0);
        assert_eq!(p.num_states(), 1);
        assert_eq!(p.choices[0][0].blocked, 0.5);
        let g = p.graph();
        assert_eq!(g.num_states(), 2);
        assert_eq!(g.choices(0), &[vec![0, 1]]);
    }
}
