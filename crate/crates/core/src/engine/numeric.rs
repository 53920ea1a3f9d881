//! Reachability probabilities on weighted transition structures.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::graph::{can_reach, prob1_reach, MdpGraph};
use crate::model::product::Product;
use crate::model::Model;

/// Transient systems up to this size are solved by LU decomposition.
const DIRECT_LIMIT: usize = 2000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericError {
    #[error("iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Solver {
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for Solver {
    fn default() -> Self {
        Solver { tolerance: 1e-12, max_iterations: 1_000_000 }
    }
}

/// `choices[s][c]` is the distribution of choice `c` at state `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct Weighted {
    choices: Vec<Vec<Vec<(usize, f64)>>>,
}

impl Weighted {
    pub fn new(choices: Vec<Vec<Vec<(usize, f64)>>>) -> Self {
        Weighted { choices }
    }

    pub fn from_model(m: &Model) -> Self {
        Weighted::new((0..m.num_states()).map(|s| m.choices(s).iter().map(|c| c.dist.clone()).collect()).collect())
    }

    /// Indexed like [`Product::graph`]: blocked mass goes to a trailing sink.
    pub fn from_product<S, M>(p: &Product<S, M>) -> Self {
        let sink = p.base.len();
        let mut any_blocked = false;
        let mut choices: Vec<Vec<Vec<(usize, f64)>>> = p
            .choices
            .iter()
            .map(|cs| {
                cs.iter()
                    .map(|c| {
                        let mut d: Vec<(usize, f64)> = c.branches.iter().map(|b| (b.target, b.prob)).collect();
                        if c.blocked > 0.0 {
                            any_blocked = true;
                            d.push((sink, c.blocked));
                        }
                        d
                    })
                    .collect()
            })
            .collect();
        if any_blocked {
            choices.push(Vec::new());
        }
        Weighted::new(choices)
    }

    pub fn num_states(&self) -> usize {
        self.choices.len()
    }

    pub fn graph(&self) -> MdpGraph {
        MdpGraph::new(self.choices.iter().map(|cs| cs.iter().map(|d| d.iter().map(|&(t, _)| t).collect()).collect()).collect())
    }
}

/// Probability of eventually reaching `target` in a chain (at most one
/// choice per state).
pub fn reach_probability_mc(w: &Weighted, target: &[bool], solver: Solver) -> Result<Vec<f64>, NumericError> {
    assert!(w.choices.iter().all(|c| c.len() <= 1), "a Markov chain has at most one choice per state");
    let g = w.graph();
    let reach = can_reach(&g, target);
    let sure = prob1_reach(&g, target);
    let n = w.num_states();
    let mut x: Vec<f64> = (0..n).map(|s| if sure[s] { 1.0 } else { 0.0 }).collect();
    let transient: Vec<usize> = (0..n).filter(|&s| reach[s] && !sure[s]).collect();
    if transient.is_empty() {
        return Ok(x);
    }
    let mut pos = vec![usize::MAX; n];
    for (i, &s) in transient.iter().enumerate() {
        pos[s] = i;
    }
    let row = |s: usize| w.choices[s].first().map(Vec::as_slice).unwrap_or(&[]);
    let m = transient.len();
    if m <= DIRECT_LIMIT {
        let mut a = DMatrix::<f64>::identity(m, m);
        let mut b = DVector::<f64>::zeros(m);
        for (i, &s) in transient.iter().enumerate() {
            for &(t, p) in row(s) {
                if pos[t] != usize::MAX {
                    a[(i, pos[t])] -= p;
                } else if sure[t] {
                    b[i] += p;
                }
            }
        }
        let sol = a.lu().solve(&b).expect("transient system is regular");
        for (i, &s) in transient.iter().enumerate() {
            x[s] = sol[i].clamp(0.0, 1.0);
        }
        return Ok(x);
    }
    let mut residual = f64::INFINITY;
    for _ in 0..solver.max_iterations {
        residual = 0.0;
        for &s in &transient {
            let v: f64 = row(s).iter().map(|&(t, p)| p * x[t]).sum();
            residual = residual.max((v - x[s]).abs());
            x[s] = v;
        }
        if residual < solver.tolerance {
            return Ok(x);
        }
    }
    Err(NumericError::NonConvergence { iterations: solver.max_iterations, residual })
}

/// Maximal probability over all schedulers of eventually reaching `target`,
/// by value iteration after the qualitative precomputation.
pub fn reach_probability_max_mdp(w: &Weighted, target: &[bool], solver: Solver) -> Result<Vec<f64>, NumericError> {
    let g = w.graph();
    let reach = can_reach(&g, target);
    let sure = prob1_reach(&g, target);
    let n = w.num_states();
    let mut x: Vec<f64> = (0..n).map(|s| if sure[s] { 1.0 } else { 0.0 }).collect();
    let open: Vec<usize> = (0..n).filter(|&s| reach[s] && !sure[s]).collect();
    if open.is_empty() {
        return Ok(x);
    }
    let mut next = x.clone();
    let mut residual = f64::INFINITY;
    for _ in 0..solver.max_iterations {
        residual = 0.0;
        for &s in &open {
            let v = w.choices[s]
                .iter()
                .map(|d| d.iter().map(|&(t, p)| p * x[t]).sum::<f64>())
                .fold(0.0, f64::max);
            residual = residual.max((v - x[s]).abs());
            next[s] = v;
        }
        std::mem::swap(&mut x, &mut next);
        if residual < solver.tolerance {
            return Ok(x.into_iter().map(|v| v.clamp(0.0, 1.0)).collect());
        }
        for &s in &open {
            next[s] = x[s];
        }
    }
    Err(NumericError::NonConvergence { iterations: solver.max_iterations, residual })
}
