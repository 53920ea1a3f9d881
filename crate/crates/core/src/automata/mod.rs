//! Core omega-automata types and lasso-word membership oracles.

pub mod hoa;

use std::collections::HashMap;
use std::hash::Hash;

use thiserror::Error;

use crate::bits::{AccSet, StateSet};
use crate::graph::digraph_sccs;

/// A letter: a valuation of the atomic propositions, bit `i` set iff
/// proposition `i` holds.
pub type Symbol = u32;

pub const MAX_APS: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutomatonError {
    #[error("too many atomic propositions: {0} (at most {MAX_APS} are supported)")]
    TooManyAps(usize),
    #[error("duplicate atomic proposition \"{0}\"")]
    DuplicateAp(String),
    #[error("unknown atomic proposition \"{0}\"")]
    UnknownAp(String),
    #[error("symbol {symbol} is outside the alphabet of {aps} propositions")]
    SymbolOutOfRange { symbol: Symbol, aps: usize },
    #[error("state {state} is out of range ({states} states)")]
    StateOutOfRange { state: usize, states: usize },
    #[error("automaton has no initial state")]
    NoInitialState,
    #[error("acceptance index {index} is out of range ({count} sets)")]
    AccOutOfRange { index: usize, count: usize },
    #[error("automaton is not deterministic: state {state} has several successors on one symbol")]
    NotDeterministic { state: usize },
}

/// Ordered list of atomic propositions; symbols are valuations over it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Alphabet {
    aps: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(aps: impl IntoIterator<Item = S>) -> Result<Self, AutomatonError> {
        let aps: Vec<String> = aps.into_iter().map(Into::into).collect();
        if aps.len() > MAX_APS {
            return Err(AutomatonError::TooManyAps(aps.len()));
        }
        for (i, a) in aps.iter().enumerate() {
            if aps[..i].contains(a) {
                return Err(AutomatonError::DuplicateAp(a.clone()));
            }
        }
        Ok(Alphabet { aps })
    }

    pub fn aps(&self) -> &[String] {
        &self.aps
    }

    pub fn num_symbols(&self) -> usize {
        1 << self.aps.len()
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> {
        0..self.num_symbols() as Symbol
    }

    pub fn contains(&self, sym: Symbol) -> bool {
        (sym as usize) < self.num_symbols()
    }

    pub fn check(&self, sym: Symbol) -> Result<(), AutomatonError> {
        if self.contains(sym) {
            Ok(())
        } else {
            Err(AutomatonError::SymbolOutOfRange { symbol: sym, aps: self.aps.len() })
        }
    }

    pub fn index_of(&self, ap: &str) -> Option<usize> {
        self.aps.iter().position(|a| a == ap)
    }

    /// The valuation in which exactly the named propositions hold.
    pub fn symbol_of(&self, true_aps: &[&str]) -> Result<Symbol, AutomatonError> {
        let mut s = 0;
        for ap in true_aps {
            let i = self.index_of(ap).ok_or_else(|| AutomatonError::UnknownAp(ap.to_string()))?;
            s |= 1 << i;
        }
        Ok(s)
    }

    pub fn describe(&self, sym: Symbol) -> String {
        let names: Vec<&str> = (0..self.aps.len())
            .filter(|i| sym & (1 << i) != 0)
            .map(|i| self.aps[i].as_str())
            .collect();
        format!("{{{}}}", names.join(","))
    }

    /// Builds a map translating symbols of `from` into symbols of `self` by
    /// proposition name. Propositions of `from` unknown to `self` are dropped;
    /// every proposition of `self` must occur in `from`.
    pub fn translator_from(&self, from: &Alphabet) -> Result<SymbolTranslator, AutomatonError> {
        let mut sources = Vec::with_capacity(self.aps.len());
        for ap in &self.aps {
            sources.push(from.index_of(ap).ok_or_else(|| AutomatonError::UnknownAp(ap.clone()))?);
        }
        Ok(SymbolTranslator { sources })
    }
}

/// Renames valuations between two alphabets; see [`Alphabet::translator_from`].
#[derive(Debug, Clone)]
pub struct SymbolTranslator {
    sources: Vec<usize>,
}

impl SymbolTranslator {
    pub fn translate(&self, sym: Symbol) -> Symbol {
        self.sources
            .iter()
            .enumerate()
            .filter(|&(_, &src)| sym & (1 << src) != 0)
            .fold(0, |acc, (i, _)| acc | (1 << i))
    }
}

/// A transition of an NGBA: target state plus the acceptance sets it belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub symbol: Symbol,
    pub target: usize,
    pub marks: AccSet,
}

/// Nondeterministic generalised Büchi automaton with transition-based
/// acceptance sets `F_0 .. F_{k-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ngba {
    alphabet: Alphabet,
    initial: StateSet,
    edges: Vec<Vec<Edge>>,
    num_acc: usize,
}

/// Incremental constructor for [`Ngba`]. Adding the same `(q, σ, q')` twice
/// merges the acceptance marks.
#[derive(Debug, Clone)]
pub struct NgbaBuilder {
    alphabet: Alphabet,
    initial: StateSet,
    edges: Vec<HashMap<(Symbol, usize), AccSet>>,
    num_acc: usize,
}

impl NgbaBuilder {
    pub fn new(alphabet: Alphabet, num_states: usize, num_acc: usize) -> Self {
        NgbaBuilder {
            alphabet,
            initial: StateSet::new(),
            edges: vec![HashMap::new(); num_states],
            num_acc,
        }
    }

    pub fn add_state(&mut self) -> usize {
        self.edges.push(HashMap::new());
        self.edges.len() - 1
    }

    pub fn num_states(&self) -> usize {
        self.edges.len()
    }

    pub fn add_initial(&mut self, q: usize) -> &mut Self {
        self.initial.insert(q);
        self
    }

    pub fn add_edge(&mut self, src: usize, symbol: Symbol, dst: usize, marks: AccSet) -> &mut Self {
        let slot = self.edges[src].entry((symbol, dst)).or_default();
        *slot = slot.union(marks);
        self
    }

    pub fn build(self) -> Result<Ngba, AutomatonError> {
        let n = self.edges.len();
        if self.initial.is_empty() {
            return Err(AutomatonError::NoInitialState);
        }
        if let Some(q) = self.initial.iter().find(|&q| q >= n) {
            return Err(AutomatonError::StateOutOfRange { state: q, states: n });
        }
        if self.num_acc > 64 {
            return Err(AutomatonError::AccOutOfRange { index: self.num_acc, count: 64 });
        }
        let mut edges = Vec::with_capacity(n);
        for map in self.edges {
            let mut list: Vec<Edge> = map
                .into_iter()
                .map(|((symbol, target), marks)| Edge { symbol, target, marks })
                .collect();
            for e in &list {
                self.alphabet.check(e.symbol)?;
                if e.target >= n {
                    return Err(AutomatonError::StateOutOfRange { state: e.target, states: n });
                }
                if let Some(i) = e.marks.iter().find(|&i| i >= self.num_acc) {
                    return Err(AutomatonError::AccOutOfRange { index: i, count: self.num_acc });
                }
            }
            list.sort();
            edges.push(list);
        }
        Ok(Ngba { alphabet: self.alphabet, initial: self.initial, edges, num_acc: self.num_acc })
    }
}

impl Ngba {
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.edges.len()
    }

    /// Number of acceptance sets `k`.
    pub fn num_acc(&self) -> usize {
        self.num_acc
    }

    pub fn initial(&self) -> &StateSet {
        &self.initial
    }

    pub fn edges(&self, q: usize) -> &[Edge] {
        &self.edges[q]
    }

    pub fn num_transitions(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    /// Outgoing transitions of `q` reading `sym`.
    pub fn edges_on(&self, q: usize, sym: Symbol) -> &[Edge] {
        let list = &self.edges[q];
        let lo = list.partition_point(|e| e.symbol < sym);
        let hi = list.partition_point(|e| e.symbol <= sym);
        &list[lo..hi]
    }

    /// `T(R, σ)`.
    pub fn post(&self, from: &StateSet, sym: Symbol) -> StateSet {
        let mut out = StateSet::new();
        for q in from.iter() {
            for e in self.edges_on(q, sym) {
                out.insert(e.target);
            }
        }
        out
    }

    /// `F_j(R, σ)`: targets of transitions from `R` on `σ` lying in `F_j`.
    pub fn post_acc(&self, from: &StateSet, sym: Symbol, j: usize) -> StateSet {
        let mut out = StateSet::new();
        for q in from.iter() {
            for e in self.edges_on(q, sym) {
                if e.marks.contains(j) {
                    out.insert(e.target);
                }
            }
        }
        out
    }

    /// Symbols on which some state of `from` has a transition, ascending.
    pub fn enabled_symbols(&self, from: &StateSet) -> Vec<Symbol> {
        let mut syms: Vec<Symbol> =
            from.iter().flat_map(|q| self.edges[q].iter().map(|e| e.symbol)).collect();
        syms.sort_unstable();
        syms.dedup();
        syms
    }

    /// The same automaton with initial set `init` (written `B_R` in the literature).
    pub fn with_initial(&self, init: StateSet) -> Ngba {
        assert!(!init.is_empty() && init.iter().all(|q| q < self.num_states()));
        Ngba { initial: init, ..self.clone() }
    }

    pub fn is_deterministic(&self) -> bool {
        self.initial.len() == 1
            && self.edges.iter().all(|l| l.windows(2).all(|w| w[0].symbol != w[1].symbol))
    }

    /// Renumbers states: state `q` becomes `perm[q]`.
    pub fn permuted(&self, perm: &[usize]) -> Ngba {
        let n = self.num_states();
        assert_eq!(perm.len(), n);
        let mut edges = vec![Vec::new(); n];
        for (q, list) in self.edges.iter().enumerate() {
            edges[perm[q]] = list.iter().map(|e| Edge { target: perm[e.target], ..*e }).collect();
        }
        for l in &mut edges {
            l.sort();
        }
        Ngba {
            alphabet: self.alphabet.clone(),
            initial: self.initial.iter().map(|q| perm[q]).collect(),
            edges,
            num_acc: self.num_acc,
        }
    }
}

/// Acceptance condition of a deterministic automaton.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Acceptance {
    /// Generalised Büchi: every set seen infinitely often.
    Buchi { sets: usize },
    /// Some pair `i` has `A_i` seen infinitely often and `R_i` only finitely often.
    Rabin { pairs: usize },
    /// Min-even parity: the least priority seen infinitely often is even.
    /// Priorities lie in `0..priorities`.
    Parity { priorities: u64 },
}

/// Per-transition acceptance information of a deterministic automaton.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum EdgeAcc {
    Buchi(AccSet),
    Rabin { acc: Vec<u32>, rej: Vec<u32> },
    Parity(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetEdge {
    pub symbol: Symbol,
    pub target: usize,
    pub acc: EdgeAcc,
}

/// Deterministic automaton with a partial transition function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetAutomaton {
    alphabet: Alphabet,
    initial: usize,
    edges: Vec<Vec<DetEdge>>,
    acceptance: Acceptance,
}

impl DetAutomaton {
    /// Builds and validates a deterministic automaton. Edge lists are sorted
    /// by symbol; two edges of one state on one symbol are rejected.
    pub fn new(
        alphabet: Alphabet,
        initial: usize,
        mut edges: Vec<Vec<DetEdge>>,
        acceptance: Acceptance,
    ) -> Result<Self, AutomatonError> {
        let n = edges.len();
        if initial >= n {
            return Err(AutomatonError::StateOutOfRange { state: initial, states: n });
        }
        for (q, list) in edges.iter_mut().enumerate() {
            list.sort_by_key(|e| e.symbol);
            if list.windows(2).any(|w| w[0].symbol == w[1].symbol) {
                return Err(AutomatonError::NotDeterministic { state: q });
            }
            for e in list.iter_mut() {
                alphabet.check(e.symbol)?;
                if e.target >= n {
                    return Err(AutomatonError::StateOutOfRange { state: e.target, states: n });
                }
                match (&mut e.acc, acceptance) {
                    (EdgeAcc::Buchi(m), Acceptance::Buchi { sets }) => {
                        if let Some(i) = m.iter().find(|&i| i >= sets) {
                            return Err(AutomatonError::AccOutOfRange { index: i, count: sets });
                        }
                    }
                    (EdgeAcc::Rabin { acc, rej }, Acceptance::Rabin { pairs }) => {
                        acc.sort_unstable();
                        acc.dedup();
                        rej.sort_unstable();
                        rej.dedup();
                        if let Some(&i) = acc.iter().chain(rej.iter()).find(|&&i| i as usize >= pairs) {
                            return Err(AutomatonError::AccOutOfRange { index: i as usize, count: pairs });
                        }
                    }
                    (EdgeAcc::Parity(p), Acceptance::Parity { priorities }) => {
                        if *p >= priorities {
                            return Err(AutomatonError::AccOutOfRange {
                                index: *p as usize,
                                count: priorities as usize,
                            });
                        }
                    }
                    _ => panic!("edge acceptance does not match automaton acceptance kind"),
                }
            }
        }
        Ok(DetAutomaton { alphabet, initial, edges, acceptance })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.edges.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn acceptance(&self) -> Acceptance {
        self.acceptance
    }

    pub fn edges(&self, q: usize) -> &[DetEdge] {
        &self.edges[q]
    }

    pub fn num_transitions(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    pub fn successor(&self, q: usize, sym: Symbol) -> Option<&DetEdge> {
        let list = &self.edges[q];
        list.binary_search_by_key(&sym, |e| e.symbol).ok().map(|i| &list[i])
    }

    /// Whether an infinite run whose cycle carries exactly `marks` is accepting.
    pub fn accepts_cycle<'a>(&self, marks: impl IntoIterator<Item = &'a EdgeAcc>) -> bool {
        self.acceptance.accepts(marks)
    }
}

impl Acceptance {
    /// Whether a cycle whose transitions carry exactly `marks` is accepting.
    pub fn accepts<'a>(&self, marks: impl IntoIterator<Item = &'a EdgeAcc>) -> bool {
        match *self {
            Acceptance::Buchi { sets } => {
                let seen = marks.into_iter().fold(AccSet::EMPTY, |s, m| match m {
                    EdgeAcc::Buchi(a) => s.union(*a),
                    _ => s,
                });
                seen == AccSet::all(sets)
            }
            Acceptance::Rabin { pairs } => {
                let mut acc = vec![false; pairs];
                let mut rej = vec![false; pairs];
                for m in marks {
                    if let EdgeAcc::Rabin { acc: a, rej: r } = m {
                        a.iter().for_each(|&i| acc[i as usize] = true);
                        r.iter().for_each(|&i| rej[i as usize] = true);
                    }
                }
                (0..pairs).any(|i| acc[i] && !rej[i])
            }
            Acceptance::Parity { .. } => min_priority(marks).is_some_and(|p| p % 2 == 0),
        }
    }
}

fn min_priority<'a>(marks: impl IntoIterator<Item = &'a EdgeAcc>) -> Option<u64> {
    marks
        .into_iter()
        .filter_map(|m| match m {
            EdgeAcc::Parity(p) => Some(*p),
            _ => None,
        })
        .min()
}

/// A deterministic transition structure explored on the fly.
///
/// `step` returns `None` when the letter is not enabled (the run blocks).
pub trait DeterministicStep {
    type State: Clone + Eq + Hash;
    type Mark: Clone;

    fn step(&self, state: &Self::State, sym: Symbol) -> Option<(Self::State, Self::Mark)>;
}

impl DeterministicStep for DetAutomaton {
    type State = usize;
    type Mark = EdgeAcc;

    fn step(&self, state: &usize, sym: Symbol) -> Option<(usize, EdgeAcc)> {
        self.successor(*state, sym).map(|e| (e.target, e.acc.clone()))
    }
}

/// The ultimately periodic word `prefix · period^ω`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LassoWord {
    prefix: Vec<Symbol>,
    period: Vec<Symbol>,
}

impl LassoWord {
    /// Panics if `period` is empty.
    pub fn new(prefix: Vec<Symbol>, period: Vec<Symbol>) -> Self {
        assert!(!period.is_empty(), "lasso period must be non-empty");
        LassoWord { prefix, period }
    }

    pub fn prefix(&self) -> &[Symbol] {
        &self.prefix
    }

    pub fn period(&self) -> &[Symbol] {
        &self.period
    }

    /// Number of distinct positions `|u| + |v|`.
    pub fn positions(&self) -> usize {
        self.prefix.len() + self.period.len()
    }

    pub fn symbol_at(&self, pos: usize) -> Symbol {
        if pos < self.prefix.len() {
            self.prefix[pos]
        } else {
            self.period[pos - self.prefix.len()]
        }
    }

    /// Next position, looping from the last position back into the period.
    pub fn next_position(&self, pos: usize) -> usize {
        if pos + 1 < self.positions() {
            pos + 1
        } else {
            self.prefix.len()
        }
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.prefix.iter().chain(self.period.iter()).copied()
    }
}

/// Decides `u·v^ω ∈ L(B)` by searching the graph of (position, state) pairs for
/// a reachable strongly connected part whose internal transitions hit every
/// acceptance set.
pub fn lasso_member_ngba(b: &Ngba, w: &LassoWord) -> Result<bool, AutomatonError> {
    for s in w.symbols() {
        b.alphabet().check(s)?;
    }
    let n = b.num_states();
    let node = |pos: usize, q: usize| pos * n + q;
    let total = w.positions() * n;
    let mut adj: Vec<Vec<(usize, AccSet)>> = vec![Vec::new(); total];
    for pos in 0..w.positions() {
        let next = w.next_position(pos);
        for q in 0..n {
            for e in b.edges_on(q, w.symbol_at(pos)) {
                adj[node(pos, q)].push((node(next, e.target), e.marks));
            }
        }
    }
    let mut reachable = vec![false; total];
    let mut stack: Vec<usize> = b.initial().iter().map(|q| node(0, q)).collect();
    for &s in &stack {
        reachable[s] = true;
    }
    while let Some(x) = stack.pop() {
        for &(y, _) in &adj[x] {
            if !reachable[y] {
                reachable[y] = true;
                stack.push(y);
            }
        }
    }
    let plain: Vec<Vec<usize>> = (0..total)
        .map(|x| if reachable[x] { adj[x].iter().map(|&(y, _)| y).collect() } else { Vec::new() })
        .collect();
    let sccs = digraph_sccs(&plain);
    let mut comp = vec![usize::MAX; total];
    for (i, c) in sccs.iter().enumerate() {
        for &x in c {
            comp[x] = i;
        }
    }
    let want = AccSet::all(b.num_acc());
    let mut seen = vec![AccSet::EMPTY; sccs.len()];
    let mut cyclic = vec![false; sccs.len()];
    for x in (0..total).filter(|&x| reachable[x]) {
        for &(y, m) in &adj[x] {
            if comp[x] == comp[y] {
                cyclic[comp[x]] = true;
                seen[comp[x]] = seen[comp[x]].union(m);
            }
        }
    }
    Ok((0..sccs.len()).any(|i| cyclic[i] && seen[i].is_superset(want)))
}

/// Marks on the cycle of the unique run of `aut` from `start` on `w`, or
/// `None` if the run blocks.
pub fn lasso_cycle_marks<D: DeterministicStep>(
    aut: &D,
    start: D::State,
    w: &LassoWord,
) -> Option<Vec<D::Mark>> {
    let mut first_visit: HashMap<(usize, D::State), usize> = HashMap::new();
    let mut marks = Vec::new();
    let mut pos = 0;
    let mut state = start;
    loop {
        if let Some(&i) = first_visit.get(&(pos, state.clone())) {
            marks.drain(..i);
            return Some(marks);
        }
        first_visit.insert((pos, state.clone()), marks.len());
        let (next, mark) = aut.step(&state, w.symbol_at(pos))?;
        marks.push(mark);
        state = next;
        pos = w.next_position(pos);
    }
}

/// Membership of `u·v^ω` in a deterministic automaton; blocked runs reject.
pub fn lasso_run_deterministic(a: &DetAutomaton, w: &LassoWord) -> bool {
    lasso_cycle_marks(a, a.initial(), w).is_some_and(|marks| a.accepts_cycle(marks.iter()))
}

/// Least priority seen infinitely often on the run of a parity automaton.
pub fn lasso_dominant_priority(a: &DetAutomaton, w: &LassoWord) -> Option<u64> {
    lasso_cycle_marks(a, a.initial(), w).and_then(|marks| min_priority(marks.iter()))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::gen;
    use proptest::prelude::*;

    /// The running-example NGBA over {a,b,c} with one letter per proposition:
    /// x -a-> y (set 0), x -a-> z, y -c-> x, z -b-> x (set 1).
    pub fn b_e() -> Ngba {
        let al = Alphabet::new(["a", "b", "c"]).unwrap();
        let (a, b, c) = (1, 2, 4);
        let mut bd = NgbaBuilder::new(al, 3, 2);
        bd.add_initial(0)
            .add_edge(0, a, 1, AccSet::single(0))
            .add_edge(0, a, 2, AccSet::EMPTY)
            .add_edge(1, c, 0, AccSet::EMPTY)
            .add_edge(2, b, 0, AccSet::single(1));
        bd.build().unwrap()
    }

    #[test]
    fn alphabet_limits() {
        let many: Vec<String> = (0..17).map(|i| format!("p{i}")).collect();
        assert_eq!(Alphabet::new(many).unwrap_err(), AutomatonError::TooManyAps(17));
        assert!(matches!(Alphabet::new(["a", "a"]), Err(AutomatonError::DuplicateAp(_))));
    }

    #[test]
    fn translator_projects_by_name() {
        let model = Alphabet::new(["c", "a", "b"]).unwrap();
        let aut = Alphabet::new(["a", "b"]).unwrap();
        let t = aut.translator_from(&model).unwrap();
        assert_eq!(t.translate(0b010), 0b01);
        assert_eq!(t.translate(0b101), 0b10);
        assert!(Alphabet::new(["d"]).unwrap().translator_from(&model).is_err());
    }

    #[test]
    fn running_example_words() {
        let b = b_e();
        let (a, bb, c) = (1, 2, 4);
        assert!(lasso_member_ngba(&b, &LassoWord::new(vec![], vec![a, bb, a, c])).unwrap());
        assert!(!lasso_member_ngba(&b, &LassoWord::new(vec![], vec![a, bb])).unwrap());
        assert!(!lasso_member_ngba(&b, &LassoWord::new(vec![], vec![a, c])).unwrap());
        assert!(!lasso_member_ngba(&b, &LassoWord::new(vec![bb], vec![a, bb, a, c])).unwrap());
        assert!(lasso_member_ngba(&b, &LassoWord::new(vec![], vec![8])).is_err());
    }

    #[test]
    fn builder_merges_duplicate_triples() {
        let al = Alphabet::new(["p"]).unwrap();
        let mut bd = NgbaBuilder::new(al, 1, 2);
        bd.add_initial(0).add_edge(0, 1, 0, AccSet::single(0)).add_edge(0, 1, 0, AccSet::single(1));
        let b = bd.build().unwrap();
        assert_eq!(b.num_transitions(), 1);
        assert_eq!(b.edges(0)[0].marks, AccSet::all(2));
    }

    #[test]
    fn all_even_parity_accepts_enabled_lassos() {
        let al = Alphabet::new(["p"]).unwrap();
        let edges = vec![
            vec![
                DetEdge { symbol: 0, target: 1, acc: EdgeAcc::Parity(0) },
                DetEdge { symbol: 1, target: 0, acc: EdgeAcc::Parity(2) },
            ],
            vec![
                DetEdge { symbol: 0, target: 0, acc: EdgeAcc::Parity(4) },
                DetEdge { symbol: 1, target: 1, acc: EdgeAcc::Parity(2) },
            ],
        ];
        let a = DetAutomaton::new(al, 0, edges, Acceptance::Parity { priorities: 5 }).unwrap();
        assert!(lasso_run_deterministic(&a, &LassoWord::new(vec![1, 0], vec![0, 1, 1])));
        assert_eq!(lasso_dominant_priority(&a, &LassoWord::new(vec![], vec![1])), Some(2));
    }

    /// Views a deterministic NGBA as a deterministic Büchi automaton.
    fn as_det(b: &Ngba) -> DetAutomaton {
        let edges = (0..b.num_states())
            .map(|q| {
                b.edges(q)
                    .iter()
                    .map(|e| DetEdge { symbol: e.symbol, target: e.target, acc: EdgeAcc::Buchi(e.marks) })
                    .collect()
            })
            .collect();
        DetAutomaton::new(
            b.alphabet().clone(),
            b.initial().first().unwrap(),
            edges,
            Acceptance::Buchi { sets: b.num_acc() },
        )
        .unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn membership_invariant_under_renumbering(seed in any::<u64>()) {
            let mut rng = gen::rng(seed);
            let b = gen::random_ngba(&mut rng, 4, 2, 2);
            let mut perm: Vec<usize> = (0..b.num_states()).collect();
            rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), &mut rng);
            let pb = b.permuted(&perm);
            for _ in 0..30 {
                let w = gen::random_lasso(&mut rng, b.alphabet(), 5, 5);
                prop_assert_eq!(lasso_member_ngba(&b, &w).unwrap(), lasso_member_ngba(&pb, &w).unwrap());
            }
        }

        #[test]
        fn deterministic_oracles_agree(seed in any::<u64>()) {
            let mut rng = gen::rng(seed);
            let b = gen::random_deterministic_ngba(&mut rng, 4, 2, 2);
            let d = as_det(&b);
            for _ in 0..30 {
                let w = gen::random_lasso(&mut rng, b.alphabet(), 5, 5);
                prop_assert_eq!(lasso_member_ngba(&b, &w).unwrap(), lasso_run_deterministic(&d, &w));
            }
        }
    }
}
