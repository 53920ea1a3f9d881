//! Accepting bottom SCCs and end components of explored products.

use std::hash::Hash;

use crate::automata::{Acceptance, EdgeAcc};
use crate::graph::{bsccs, mecs, mecs_restricted, Component, MdpGraph};
use crate::model::product::Product;
use crate::model::ModelKind;

/// Branch marks of a product lifted to [`EdgeAcc`], indexed like its choices.
pub(crate) struct Lifted {
    pub graph: MdpGraph,
    marks: Vec<Vec<Vec<(usize, EdgeAcc)>>>,
}

impl Lifted {
    pub fn new<S: Clone + Eq + Hash, M>(p: &Product<S, M>, lift: impl Fn(&M) -> EdgeAcc) -> Self {
        let marks = p
            .choices
            .iter()
            .map(|cs| cs.iter().map(|c| c.branches.iter().map(|b| (b.target, lift(&b.mark))).collect()).collect())
            .collect();
        Lifted { graph: p.graph(), marks }
    }

    fn branches(&self, s: usize, c: usize) -> &[(usize, EdgeAcc)] {
        self.marks.get(s).map_or(&[], |cs| cs[c].as_slice())
    }

    fn internal<'a>(&'a self, comp: &'a Component) -> impl Iterator<Item = &'a EdgeAcc> + 'a {
        comp.states
            .iter()
            .zip(&comp.enabled)
            .flat_map(move |(&s, en)| en.iter().flat_map(move |&c| self.branches(s, c).iter()))
            .filter(move |(t, _)| comp.contains(*t))
            .map(|(_, m)| m)
    }

    pub fn any_internal(&self, comp: &Component, pred: impl Fn(&EdgeAcc) -> bool) -> bool {
        self.internal(comp).any(pred)
    }

    /// Choices of `comp` all of whose branches satisfy `keep`.
    fn restrict(&self, comp: &Component, keep: impl Fn(&EdgeAcc) -> bool) -> Vec<Vec<bool>> {
        let mut allowed: Vec<Vec<bool>> =
            (0..self.graph.num_states()).map(|s| vec![false; self.graph.choices(s).len()]).collect();
        for (&s, en) in comp.states.iter().zip(&comp.enabled) {
            for &c in en {
                allowed[s][c] = self.branches(s, c).iter().all(|(_, m)| keep(m));
            }
        }
        allowed
    }

    /// Accepting components: bottom SCCs for a chain, accepting end
    /// components (each inside one MEC) for an MDP.
    pub fn accepting(&self, kind: ModelKind, acceptance: Acceptance) -> Vec<Component> {
        match kind {
            ModelKind::MarkovChain => {
                bsccs(&self.graph).into_iter().filter(|c| acceptance.accepts(self.internal(c))).collect()
            }
            ModelKind::Mdp => mecs(&self.graph).into_iter().flat_map(|m| self.accepting_in_mec(&m, acceptance)).collect(),
        }
    }

    fn accepting_in_mec(&self, mec: &Component, acceptance: Acceptance) -> Vec<Component> {
        match acceptance {
            Acceptance::Buchi { .. } => {
                if acceptance.accepts(self.internal(mec)) {
                    vec![mec.clone()]
                } else {
                    vec![]
                }
            }
            Acceptance::Rabin { pairs } => {
                let mut out = Vec::new();
                for i in 0..pairs as u32 {
                    let hits = |m: &EdgeAcc| matches!(m, EdgeAcc::Rabin { acc, .. } if acc.contains(&i));
                    if !self.internal(mec).any(hits) {
                        continue;
                    }
                    let allowed = self.restrict(mec, |m| !matches!(m, EdgeAcc::Rabin { rej, .. } if rej.contains(&i)));
                    out.extend(mecs_restricted(&self.graph, &allowed).into_iter().filter(|c| self.internal(c).any(hits)));
                }
                out
            }
            Acceptance::Parity { priorities } => {
                let mut out = Vec::new();
                for p in (0..priorities).step_by(2) {
                    let hits = |m: &EdgeAcc| *m == EdgeAcc::Parity(p);
                    if !self.internal(mec).any(hits) {
                        continue;
                    }
                    let allowed = self.restrict(mec, |m| matches!(m, EdgeAcc::Parity(q) if *q >= p));
                    out.extend(mecs_restricted(&self.graph, &allowed).into_iter().filter(|c| self.internal(c).any(hits)));
                }
                out
            }
        }
    }

    /// Whether `comp` is free of end components after removing every choice
    /// with a branch marked by `bad`.
    pub fn all_ecs_hit(&self, comp: &Component, bad: impl Fn(&EdgeAcc) -> bool) -> bool {
        mecs_restricted(&self.graph, &self.restrict(comp, |m| !bad(m))).is_empty()
    }
}

pub(crate) fn membership(comps: &[Component], n: usize) -> Vec<bool> {
    let mut m = vec![false; n];
    for c in comps {
        for &s in &c.states {
            m[s] = true;
        }
    }
    m
}
