//! The layered decision procedure for components of the subset product, and
//! the probability computation on top of it.
//!
//! Every bottom SCC (chains) or maximal end component (MDPs) of `M × S` is
//! classified by the cheapest conclusive layer: the subset marks, then a
//! breakpoint product from the component, then the multi-breakpoint search
//! (or a local Rabin determinisation). Accepting components become the
//! reachability target in `M × S`.

mod components;
mod layers;
pub mod numeric;

use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

pub use layers::{Analysis, Attempt, MultiOutcome, Witness};
pub use numeric::{reach_probability_max_mdp, reach_probability_mc, NumericError, Solver, Weighted};

use crate::automata::{Acceptance, AutomatonError, DetAutomaton, Ngba};
use crate::bits::StateSet;
use crate::ght::{Ght, GhtConstruction};
use crate::graph::{bsccs, mecs};
use crate::ltl::{translate_with_alphabet, Formula, LtlError};
use crate::model::product::{explore, product, Product, Start};
use crate::model::{Model, ModelKind};
use crate::subset::Classification;
use components::{membership, Lifted};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error(transparent)]
    Ltl(#[from] LtlError),
    #[error("{0}")]
    Unsupported(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Lazy,
    RabinOracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fallback {
    MultiBreakpoint,
    Rabin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Layer {
    Subset,
    Breakpoint,
    MultiBreakpoint,
    Rabin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Accepting,
    Rejecting,
}

/// What the probability means: exact for chains, the supremum or infimum
/// over schedulers for MDPs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Exact,
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Config {
    pub method: Method,
    pub fallback: Fallback,
    /// Reuse accepted `(m, R)` pairs for supersets `(m, R')` (chains only).
    pub cache: bool,
    /// Worker threads for the subset and breakpoint layers; 0 picks a default.
    pub threads: usize,
    pub solver: Solver,
}

impl Default for Config {
    fn default() -> Self {
        Config { method: Method::Lazy, fallback: Fallback::MultiBreakpoint, cache: true, threads: 1, solver: Solver::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentVerdict {
    /// Position in the component list of the analysed product.
    pub component: usize,
    pub size: usize,
    pub verdict: Verdict,
    pub decided_by: Layer,
    pub witness: Option<Witness>,
    /// Decided by the superset cache instead of a fresh search.
    pub from_cache: bool,
    /// Start states tried by the MDP multi-breakpoint layer.
    pub attempts: Vec<Attempt>,
}

/// Components decided per layer.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct LayerStats {
    pub subset: usize,
    pub breakpoint: usize,
    #[serde(rename = "multibreakpoint")]
    pub multi_breakpoint: usize,
    pub rabin: usize,
}

impl LayerStats {
    fn count(&mut self, layer: Layer) {
        match layer {
            Layer::Subset => self.subset += 1,
            Layer::Breakpoint => self.breakpoint += 1,
            Layer::MultiBreakpoint => self.multi_breakpoint += 1,
            Layer::Rabin => self.rabin += 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub probability: f64,
    pub mode: Mode,
    pub method: Method,
    pub layers: LayerStats,
    pub components: Vec<ComponentVerdict>,
    /// Product states built across all layers.
    pub states_explored: usize,
}

impl Serialize for ComponentVerdict {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let mut st = ser.serialize_struct("ComponentVerdict", 5)?;
        st.serialize_field("component", &self.component)?;
        st.serialize_field("size", &self.size)?;
        st.serialize_field("verdict", &self.verdict)?;
        st.serialize_field("decided_by", &self.decided_by)?;
        st.serialize_field("witness", &self.witness.as_ref().map(|w| format!("({}, {:?})", w.model_state, w.start)))?;
        st.end()
    }
}

/// `(model state, R)` pairs known to accept almost surely.
#[derive(Debug, Default)]
struct SupersetCache {
    accepted: Vec<(usize, StateSet)>,
}

impl SupersetCache {
    fn insert(&mut self, m: usize, r: StateSet) {
        if !self.covers(m, &r) {
            self.accepted.push((m, r));
        }
    }

    fn covers(&self, m: usize, r: &StateSet) -> bool {
        self.accepted.iter().any(|(m2, r2)| *m2 == m && r2.is_subset(r))
    }
}

struct Early {
    decided: Option<(Verdict, Layer, Option<Witness>)>,
    explored: usize,
}

fn early_layers(a: &Analysis<'_>, i: usize) -> Early {
    let c = &a.components[i];
    match a.classify_subset(c) {
        Classification::Accepting => {
            return Early { decided: Some((Verdict::Accepting, Layer::Subset, None)), explored: 0 };
        }
        Classification::Rejecting => {
            return Early { decided: Some((Verdict::Rejecting, Layer::Subset, None)), explored: 0 };
        }
        Classification::Unknown => {}
    }
    let (cl, witness, explored) = a.decide_breakpoint(c);
    let decided = match cl {
        Classification::Accepting => Some((Verdict::Accepting, Layer::Breakpoint, Some(witness))),
        Classification::Rejecting => Some((Verdict::Rejecting, Layer::Breakpoint, Some(witness))),
        Classification::Unknown => None,
    };
    Early { decided, explored }
}

/// Classifies every component of `a`, returning the verdicts in component
/// order and the number of product states built by the layers.
pub fn compute_accepting_components(a: &Analysis<'_>, config: &Config) -> (Vec<ComponentVerdict>, usize) {
    let idx: Vec<usize> = (0..a.components.len()).collect();
    let early: Vec<Early> = if config.threads == 1 || idx.len() < 2 {
        idx.iter().map(|&i| early_layers(a, i)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(config.threads).build().expect("thread pool");
        pool.install(|| idx.par_iter().map(|&i| early_layers(a, i)).collect())
    };
    let mut explored: usize = early.iter().map(|e| e.explored).sum();
    let mut cache = SupersetCache::default();
    let use_cache = config.cache && a.kind == ModelKind::MarkovChain;
    let mut out: Vec<Option<ComponentVerdict>> = vec![None; idx.len()];
    for (i, e) in early.into_iter().enumerate() {
        if let Some((verdict, decided_by, witness)) = e.decided {
            if use_cache && verdict == Verdict::Accepting {
                for &s in &a.components[i].states {
                    let (m, r) = a.pair(s);
                    cache.insert(m, r.clone());
                }
            }
            out[i] = Some(ComponentVerdict {
                component: i,
                size: a.components[i].len(),
                verdict,
                decided_by,
                witness,
                from_cache: false,
                attempts: Vec::new(),
            });
        }
    }
    for i in idx {
        if out[i].is_some() {
            continue;
        }
        let c = &a.components[i];
        let mut v = ComponentVerdict {
            component: i,
            size: c.len(),
            verdict: Verdict::Rejecting,
            decided_by: Layer::MultiBreakpoint,
            witness: None,
            from_cache: false,
            attempts: Vec::new(),
        };
        if use_cache && c.states.iter().any(|&s| {
            let (m, r) = a.pair(s);
            cache.covers(m, r)
        }) {
            v.verdict = Verdict::Accepting;
            v.from_cache = true;
            v.decided_by = match config.fallback {
                Fallback::MultiBreakpoint => Layer::MultiBreakpoint,
                Fallback::Rabin => Layer::Rabin,
            };
        } else {
            match config.fallback {
                Fallback::Rabin => {
                    let (ok, n) = a.decide_rabin_local(c);
                    explored += n;
                    v.decided_by = Layer::Rabin;
                    if ok {
                        v.verdict = Verdict::Accepting;
                    }
                }
                Fallback::MultiBreakpoint => {
                    let res = match a.kind {
                        ModelKind::MarkovChain => a.decide_multibreakpoint_mc(c),
                        ModelKind::Mdp => a.decide_multibreakpoint_mdp(c),
                    };
                    explored += res.explored;
                    if res.accepting {
                        v.verdict = Verdict::Accepting;
                    }
                    if let (true, Some(w)) = (use_cache, &res.witness) {
                        cache.insert(w.model_state, w.start.reached.clone());
                    }
                    v.witness = res.witness;
                    v.attempts = res.attempts;
                }
            }
        }
        if use_cache && v.verdict == Verdict::Accepting {
            for &s in &c.states {
                let (m, r) = a.pair(s);
                cache.insert(m, r.clone());
            }
        }
        out[i] = Some(v);
    }
    (out.into_iter().map(|v| v.expect("every component decided")).collect(), explored)
}

fn solve<S: Clone + Eq + std::hash::Hash, M>(
    p: &Product<S, M>,
    target: &[bool],
    kind: ModelKind,
    solver: Solver,
) -> Result<f64, EngineError> {
    let w = Weighted::from_product(p);
    let x = match kind {
        ModelKind::MarkovChain => reach_probability_mc(&w, target, solver)?,
        ModelKind::Mdp => reach_probability_max_mdp(&w, target, solver)?,
    };
    let prob: f64 = p.initial.iter().map(|&(s, pr)| s.map_or(0.0, |s| pr * x[s])).sum();
    Ok(prob.clamp(0.0, 1.0))
}

fn default_mode(kind: ModelKind) -> Mode {
    match kind {
        ModelKind::MarkovChain => Mode::Exact,
        ModelKind::Mdp => Mode::Max,
    }
}

/// Projects the model onto the automaton's propositions.
fn aligned(model: &Model, b_alphabet: &crate::automata::Alphabet) -> Result<Model, EngineError> {
    if model.alphabet() == b_alphabet {
        Ok(model.clone())
    } else {
        Ok(model.relabelled(b_alphabet)?)
    }
}

/// Probability (chains) or maximal probability (MDPs) that a run of `model`
/// is accepted by `b`.
pub fn model_check(model: &Model, b: &Ngba, config: &Config) -> Result<CheckResult, EngineError> {
    let model = aligned(model, b.alphabet())?;
    match config.method {
        Method::Lazy => {
            let a = Analysis::new(&model, b);
            let (verdicts, explored) = compute_accepting_components(&a, config);
            let accepting: Vec<_> = verdicts
                .iter()
                .filter(|v| v.verdict == Verdict::Accepting)
                .map(|v| a.components[v.component].clone())
                .collect();
            let target = membership(&accepting, a.graph.num_states());
            let probability = solve(&a.product, &target, a.kind, config.solver)?;
            let mut layers = LayerStats::default();
            verdicts.iter().for_each(|v| layers.count(v.decided_by));
            Ok(CheckResult {
                probability,
                mode: default_mode(a.kind),
                method: Method::Lazy,
                layers,
                components: verdicts,
                states_explored: a.product.num_states() + explored,
            })
        }
        Method::RabinOracle => {
            let p = explore(
                &model,
                &GhtConstruction::new(b),
                Start::Initial { state: Ght::initial(b), dist: model.initial() },
                |_, _| true,
            );
            let (lifted, pairs) = layers::lift_rabin(&p);
            finish_direct(&p, &lifted, model.kind(), Acceptance::Rabin { pairs }, config)
        }
    }
}

/// Model checking against a deterministic automaton on the explicit product.
pub fn model_check_deterministic(model: &Model, a: &DetAutomaton, config: &Config) -> Result<CheckResult, EngineError> {
    let model = aligned(model, a.alphabet())?;
    let p = product(&model, a, a.initial());
    let lifted = Lifted::new(&p, Clone::clone);
    finish_direct(&p, &lifted, model.kind(), a.acceptance(), config)
}

fn finish_direct<S: Clone + Eq + std::hash::Hash, M>(
    p: &Product<S, M>,
    lifted: &Lifted,
    kind: ModelKind,
    acceptance: Acceptance,
    config: &Config,
) -> Result<CheckResult, EngineError> {
    let accepting = lifted.accepting(kind, acceptance);
    let target = membership(&accepting, lifted.graph.num_states());
    let probability = solve(p, &target, kind, config.solver)?;
    let comps = match kind {
        ModelKind::MarkovChain => bsccs(&lifted.graph),
        ModelKind::Mdp => mecs(&lifted.graph),
    };
    let components: Vec<ComponentVerdict> = comps
        .iter()
        .enumerate()
        .map(|(i, c)| ComponentVerdict {
            component: i,
            size: c.len(),
            verdict: if c.states.iter().any(|&s| target[s]) { Verdict::Accepting } else { Verdict::Rejecting },
            decided_by: Layer::Rabin,
            witness: None,
            from_cache: false,
            attempts: Vec::new(),
        })
        .collect();
    let layers = LayerStats { rabin: components.len(), ..LayerStats::default() };
    Ok(CheckResult {
        probability,
        mode: default_mode(kind),
        method: Method::RabinOracle,
        layers,
        components,
        states_explored: p.num_states(),
    })
}

/// The formula's automaton, over the formula's propositions. Propositions the
/// model does not declare are added to it as false everywhere.
pub fn prepare_ltl(model: &Model, phi: &Formula) -> Result<(Model, Ngba), EngineError> {
    let extra: Vec<String> = phi.aps().into_iter().filter(|p| model.alphabet().index_of(p).is_none()).collect();
    let model = if extra.is_empty() { model.clone() } else { model.extended(&extra)? };
    let al = crate::automata::Alphabet::new(phi.aps())?;
    let b = translate_with_alphabet(phi, &al)?;
    let model = model.relabelled(&al)?;
    Ok((model, b))
}

/// Checks an LTL formula. `Mode::Min` on an MDP is computed as
/// `1 − max P(¬φ)`; on a chain all modes agree.
pub fn model_check_ltl(model: &Model, phi: &Formula, mode: Mode, config: &Config) -> Result<CheckResult, EngineError> {
    if mode == Mode::Min && model.kind() == ModelKind::Mdp {
        let (m, b) = prepare_ltl(model, &phi.clone().negated())?;
        let mut r = model_check(&m, &b, config)?;
        r.probability = (1.0 - r.probability).clamp(0.0, 1.0);
        r.mode = Mode::Min;
        return Ok(r);
    }
    let (m, b) = prepare_ltl(model, phi)?;
    model_check(&m, &b, config)
}

#[cfg(test)]
mod tests;
