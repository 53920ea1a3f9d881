//! Seeded random instances for fuzzing and benchmarks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automata::{Alphabet, LassoWord, Ngba, NgbaBuilder, Symbol};
use crate::bits::AccSet;
use crate::ltl::Formula;
use crate::model::{Choice, Model};

pub type FuzzRng = ChaCha8Rng;

pub fn rng(seed: u64) -> FuzzRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The seed in `PMC_SEED`, or `default` when unset or unparsable.
pub fn seed_from_env(default: u64) -> u64 {
    std::env::var("PMC_SEED").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(default)
}

/// Alphabet `p0 … p{n-1}`.
pub fn alphabet(num_aps: usize) -> Alphabet {
    Alphabet::new((0..num_aps).map(|i| format!("p{i}"))).expect("small alphabet")
}

/// A random NGBA with at most `max_states` states, `max_acc` acceptance sets
/// and `max_aps` propositions.
pub fn random_ngba(rng: &mut impl Rng, max_states: usize, max_acc: usize, max_aps: usize) -> Ngba {
    let n = rng.gen_range(1..=max_states);
    let k = rng.gen_range(1..=max_acc);
    let al = alphabet(rng.gen_range(1..=max_aps));
    random_ngba_over(rng, al, n, k, 0.3)
}

/// A random NGBA with exactly `n` states and `k` sets over `al`; each
/// transition is present with probability `density`.
pub fn random_ngba_over(rng: &mut impl Rng, al: Alphabet, n: usize, k: usize, density: f64) -> Ngba {
    let syms = al.num_symbols() as Symbol;
    let mut bd = NgbaBuilder::new(al, n, k);
    bd.add_initial(0);
    if n > 1 && rng.gen_bool(0.2) {
        bd.add_initial(rng.gen_range(1..n));
    }
    for q in 0..n {
        for sym in 0..syms {
            for t in 0..n {
                if rng.gen_bool(density) {
                    bd.add_edge(q, sym, t, random_marks(rng, k));
                }
            }
        }
    }
    bd.build().expect("generated automaton is valid")
}

fn random_marks(rng: &mut impl Rng, k: usize) -> AccSet {
    (0..k).filter(|_| rng.gen_bool(0.4)).fold(AccSet::EMPTY, AccSet::with)
}

/// A random NGBA with a deterministic transition function and one initial state.
pub fn random_deterministic_ngba(rng: &mut impl Rng, max_states: usize, max_acc: usize, max_aps: usize) -> Ngba {
    let n = rng.gen_range(1..=max_states);
    let k = rng.gen_range(1..=max_acc);
    let al = alphabet(rng.gen_range(1..=max_aps));
    let syms = al.num_symbols() as Symbol;
    let mut bd = NgbaBuilder::new(al, n, k);
    bd.add_initial(0);
    for q in 0..n {
        for sym in 0..syms {
            if rng.gen_bool(0.85) {
                let t = rng.gen_range(0..n);
                bd.add_edge(q, sym, t, random_marks(rng, k));
            }
        }
    }
    bd.build().expect("generated automaton is valid")
}

/// A random lasso `u·v^ω` with `|u| ≤ max_prefix` and `1 ≤ |v| ≤ max_period`.
pub fn random_lasso(rng: &mut impl Rng, al: &Alphabet, max_prefix: usize, max_period: usize) -> LassoWord {
    let syms = al.num_symbols() as Symbol;
    let u = rng.gen_range(0..=max_prefix);
    let v = rng.gen_range(1..=max_period);
    let mut draw = |len| (0..len).map(|_| rng.gen_range(0..syms)).collect::<Vec<_>>();
    let prefix = draw(u);
    LassoWord::new(prefix, draw(v))
}

fn random_distribution(rng: &mut impl Rng, n: usize) -> Vec<(usize, f64)> {
    let size = rng.gen_range(1..=n.min(3));
    let mut targets: Vec<usize> = (0..n).collect();
    targets.shuffle(rng);
    let weights: Vec<u32> = (0..size).map(|_| rng.gen_range(1..=4)).collect();
    let total: u32 = weights.iter().sum();
    targets[..size].iter().zip(&weights).map(|(&t, &w)| (t, w as f64 / total as f64)).collect()
}

fn random_local_distribution(rng: &mut impl Rng, s: usize, n: usize) -> Vec<(usize, f64)> {
    let lo = s.saturating_sub(1);
    let hi = (s + 3).min(n - 1);
    let targets: Vec<usize> = (lo..=hi).collect();
    let size = rng.gen_range(1..=targets.len().min(3));
    let picked: Vec<usize> = targets.choose_multiple(rng, size).copied().collect();
    let weights: Vec<u32> = (0..size).map(|_| rng.gen_range(1..=4)).collect();
    let total: u32 = weights.iter().sum();
    picked.iter().zip(&weights).map(|(&t, &w)| (t, w as f64 / total as f64)).collect()
}

fn chain_with<R: Rng>(
    rng: &mut R,
    max_states: usize,
    al: &Alphabet,
    dist: impl Fn(&mut R, usize, usize) -> Vec<(usize, f64)>,
) -> Model {
    let n = rng.gen_range(1..=max_states);
    let labels = (0..n).map(|_| rng.gen_range(0..al.num_symbols() as Symbol)).collect();
    let rows = (0..n).map(|s| if rng.gen_bool(0.05) { Vec::new() } else { dist(rng, s, n) }).collect();
    Model::markov_chain(al.clone(), labels, vec![(0, 1.0)], rows).expect("generated chain is valid")
}

fn mdp_with<R: Rng>(
    rng: &mut R,
    max_states: usize,
    max_actions: usize,
    al: &Alphabet,
    dist: impl Fn(&mut R, usize, usize) -> Vec<(usize, f64)>,
) -> Model {
    let n = rng.gen_range(1..=max_states);
    let m = rng.gen_range(1..=max_actions);
    let labels = (0..n).map(|_| rng.gen_range(0..al.num_symbols() as Symbol)).collect();
    let actions = (0..m).map(|a| format!("a{a}")).collect();
    let choices = (0..n)
        .map(|s| {
            let mut acts: Vec<usize> = (0..m).collect();
            acts.shuffle(rng);
            let count = rng.gen_range(1..=m);
            let mut cs: Vec<Choice> =
                acts[..count].iter().map(|&action| Choice { action, dist: dist(rng, s, n) }).collect();
            cs.sort_by_key(|c| c.action);
            cs
        })
        .collect();
    Model::mdp(al.clone(), labels, vec![(0, 1.0)], actions, choices).expect("generated MDP is valid")
}

/// A random Markov chain with at most `max_states` states over `al`.
pub fn random_mc(rng: &mut impl Rng, max_states: usize, al: &Alphabet) -> Model {
    chain_with(rng, max_states, al, |r, _, n| random_distribution(r, n))
}

/// Like [`random_mc`], but state `s` only moves to `s - 1 ..= s + 3`, which
/// yields several bottom components and non-trivial probabilities.
pub fn random_local_mc(rng: &mut impl Rng, max_states: usize, al: &Alphabet) -> Model {
    chain_with(rng, max_states, al, random_local_distribution)
}

/// A random MDP with at most `max_states` states and `max_actions` actions.
pub fn random_mdp(rng: &mut impl Rng, max_states: usize, max_actions: usize, al: &Alphabet) -> Model {
    mdp_with(rng, max_states, max_actions, al, |r, _, n| random_distribution(r, n))
}

/// An MDP whose moves are local as in [`random_local_mc`].
pub fn random_local_mdp(rng: &mut impl Rng, max_states: usize, max_actions: usize, al: &Alphabet) -> Model {
    mdp_with(rng, max_states, max_actions, al, random_local_distribution)
}

/// A random LTL formula with at most `size` operators and atoms over the
/// propositions of `al`.
pub fn random_ltl(rng: &mut impl Rng, size: usize, al: &Alphabet) -> Formula {
    if size <= 1 || rng.gen_bool(0.15) {
        return match rng.gen_range(0..10) {
            0 => Formula::True,
            1 => Formula::False,
            _ => Formula::Ap(al.aps()[rng.gen_range(0..al.aps().len())].clone()),
        };
    }
    let op = if size == 2 { rng.gen_range(0..4) } else { rng.gen_range(0..8) };
    if op < 4 {
        let sub = Box::new(random_ltl(rng, size - 1, al));
        match op {
            0 => Formula::Not(sub),
            1 => Formula::Next(sub),
            2 => Formula::Finally(sub),
            _ => Formula::Globally(sub),
        }
    } else {
        let left = rng.gen_range(1..=size - 2);
        let l = Box::new(random_ltl(rng, left, al));
        let r = Box::new(random_ltl(rng, size - 1 - left, al));
        match op {
            4 => Formula::And(l, r),
            5 => Formula::Or(l, r),
            6 => Formula::Until(l, r),
            _ => Formula::Release(l, r),
        }
    }
}
