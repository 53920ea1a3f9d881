//! Markov chains and Markov decision processes, the explicit file format, and
//! products with deterministic automata.

pub mod product;

use std::fmt;
use std::path::Path;

use thiserror::Error;

use crate::automata::{Alphabet, AutomatonError, Symbol};

const STOCHASTIC_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    MarkovChain,
    Mdp,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::MarkovChain => "mc",
            ModelKind::Mdp => "mdp",
        })
    }
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("{file}:{line}: {message}")]
    Syntax { file: &'static str, line: usize, message: String },
    #[error("distribution of state {state}{} sums to {sum}, not 1", action.as_ref().map(|a| format!(" action {a}")).unwrap_or_default())]
    NotStochastic { state: usize, action: Option<String>, sum: f64 },
    #[error("{file}:{line}: state {state} is out of range ({states} states)")]
    DanglingState { file: &'static str, line: usize, state: usize, states: usize },
    #[error("labels:{line}: undeclared atomic proposition \"{ap}\"")]
    UndeclaredAp { line: usize, ap: String },
    #[error("model has no states")]
    Empty,
    #[error(transparent)]
    Alphabet(#[from] AutomatonError),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// One probabilistic choice: an action and a distribution over successors.
#[derive(Debug, Clone, PartialEq)]
pub struct Choice {
    pub action: usize,
    pub dist: Vec<(usize, f64)>,
}

/// A labelled MC or MDP. A Markov chain has at most one choice per state
/// (action 0). States given without choices loop on themselves with
/// probability one through the action `tau`.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    kind: ModelKind,
    alphabet: Alphabet,
    labels: Vec<Symbol>,
    initial: Vec<(usize, f64)>,
    actions: Vec<String>,
    choices: Vec<Vec<Choice>>,
}

impl Model {
    /// A Markov chain from sparse rows; empty rows become self-loops.
    pub fn markov_chain(
        alphabet: Alphabet,
        labels: Vec<Symbol>,
        initial: Vec<(usize, f64)>,
        rows: Vec<Vec<(usize, f64)>>,
    ) -> Result<Model, ModelError> {
        let choices = rows
            .into_iter()
            .map(|r| if r.is_empty() { vec![] } else { vec![Choice { action: 0, dist: r }] })
            .collect();
        Model::new(ModelKind::MarkovChain, alphabet, labels, initial, vec!["tau".into()], choices)
    }

    pub fn mdp(
        alphabet: Alphabet,
        labels: Vec<Symbol>,
        initial: Vec<(usize, f64)>,
        actions: Vec<String>,
        choices: Vec<Vec<Choice>>,
    ) -> Result<Model, ModelError> {
        Model::new(ModelKind::Mdp, alphabet, labels, initial, actions, choices)
    }

    fn new(
        kind: ModelKind,
        alphabet: Alphabet,
        labels: Vec<Symbol>,
        initial: Vec<(usize, f64)>,
        actions: Vec<String>,
        mut choices: Vec<Vec<Choice>>,
    ) -> Result<Model, ModelError> {
        let n = choices.len();
        if n == 0 {
            return Err(ModelError::Empty);
        }
        assert_eq!(labels.len(), n, "one label per state");
        for &l in &labels {
            alphabet.check(l)?;
        }
        let dangling = |state| ModelError::DanglingState { file: "model", line: 0, state, states: n };
        for (s, cs) in choices.iter_mut().enumerate() {
            for c in cs.iter_mut() {
                c.dist.sort_by_key(|&(t, _)| t);
                c.dist.dedup_by(|b, a| {
                    if a.0 == b.0 {
                        a.1 += b.1;
                        true
                    } else {
                        false
                    }
                });
                c.dist.retain(|&(_, p)| p > 0.0);
                if let Some(&(t, _)) = c.dist.iter().find(|&&(t, _)| t >= n) {
                    return Err(dangling(t));
                }
                check_distribution(&c.dist, s, (kind == ModelKind::Mdp).then(|| actions[c.action].clone()))?;
            }
            cs.retain(|c| !c.dist.is_empty());
        }
        let mut actions = actions;
        if choices.iter().any(Vec::is_empty) {
            let tau = actions.iter().position(|a| a == "tau").unwrap_or_else(|| {
                actions.push("tau".into());
                actions.len() - 1
            });
            for (s, cs) in choices.iter_mut().enumerate() {
                if cs.is_empty() {
                    cs.push(Choice { action: tau, dist: vec![(s, 1.0)] });
                }
            }
        }
        if let Some(&(s, _)) = initial.iter().find(|&&(s, _)| s >= n) {
            return Err(dangling(s));
        }
        Ok(Model { kind, alphabet, labels, initial, actions, choices })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.choices.len()
    }

    pub fn label(&self, s: usize) -> Symbol {
        self.labels[s]
    }

    pub fn labels(&self) -> &[Symbol] {
        &self.labels
    }

    pub fn initial(&self) -> &[(usize, f64)] {
        &self.initial
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn choices(&self, s: usize) -> &[Choice] {
        &self.choices[s]
    }

    pub fn num_transitions(&self) -> usize {
        self.choices.iter().flatten().map(|c| c.dist.len()).sum()
    }

    /// The same model with labels projected onto `target`'s propositions.
    pub fn relabelled(&self, target: &Alphabet) -> Result<Model, AutomatonError> {
        let tr = target.translator_from(&self.alphabet)?;
        Ok(Model {
            alphabet: target.clone(),
            labels: self.labels.iter().map(|&l| tr.translate(l)).collect(),
            ..self.clone()
        })
    }

    /// The same model over its propositions followed by `extra`, which hold
    /// in no state.
    pub fn extended(&self, extra: &[String]) -> Result<Model, AutomatonError> {
        let aps = self.alphabet.aps().iter().cloned().chain(extra.iter().cloned());
        Ok(Model { alphabet: Alphabet::new(aps)?, ..self.clone() })
    }

    /// The model viewed as an MDP with a single action per state.
    pub fn as_mdp(&self) -> Model {
        Model { kind: ModelKind::Mdp, ..self.clone() }
    }
}

fn check_distribution(dist: &[(usize, f64)], state: usize, action: Option<String>) -> Result<(), ModelError> {
    let sum: f64 = dist.iter().map(|&(_, p)| p).sum();
    if dist.is_empty() || (sum - 1.0).abs() <= STOCHASTIC_TOLERANCE {
        Ok(())
    } else {
        Err(ModelError::NotStochastic { state, action, sum })
    }
}

/// Parses a probability written as a decimal or as `p/q`.
pub fn parse_probability(text: &str) -> Option<f64> {
    let value = match text.split_once('/') {
        Some((p, q)) => {
            let (p, q) = (p.trim().parse::<f64>().ok()?, q.trim().parse::<f64>().ok()?);
            if q == 0.0 {
                return None;
            }
            p / q
        }
        None => text.parse::<f64>().ok()?,
    };
    (value.is_finite() && (0.0..=1.0).contains(&value)).then_some(value)
}

fn parse_state(file: &'static str, line: usize, tok: &str) -> Result<usize, ModelError> {
    tok.parse().map_err(|_| ModelError::Syntax { file, line, message: format!("expected a state index, found \"{tok}\"") })
}

fn header_count(file: &'static str, line: usize, rest: &str) -> Result<usize, ModelError> {
    rest.trim().parse().map_err(|_| ModelError::Syntax { file, line, message: "expected a state count".into() })
}

/// Loads a model from the explicit text format.
///
/// Transitions file: optional `#states N` and `#init s` headers, then one
/// transition per line, `src dst prob` for an MC or `src action dst prob` for
/// an MDP. Labels file: a `#aps a b c` header, then lines `state: ap ...`.
/// Other lines starting with `#` are comments. The initial state defaults to 0.
pub fn load_model(transitions: &str, labels: &str, kind: ModelKind) -> Result<Model, ModelError> {
    const T: &str = "transitions";
    const L: &str = "labels";
    let mut declared: Option<usize> = None;
    let mut init: Option<(usize, usize)> = None;
    let mut edges: Vec<(usize, usize, usize, usize, f64)> = Vec::new();
    let mut actions: Vec<String> = Vec::new();
    for (i, raw) in transitions.lines().enumerate() {
        let line = i + 1;
        let text = raw.trim();
        if text.is_empty() {
            continue;
        }
        if let Some(rest) = text.strip_prefix("#states") {
            declared = Some(header_count(T, line, rest)?);
            continue;
        }
        if let Some(rest) = text.strip_prefix("#init") {
            init = Some((parse_state(T, line, rest.trim())?, line));
            continue;
        }
        if text.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = text.split_whitespace().collect();
        let (src, action, dst, prob) = match (kind, toks.len()) {
            (ModelKind::MarkovChain, 3) => (toks[0], "tau", toks[1], toks[2]),
            (ModelKind::Mdp, 4) => (toks[0], toks[1], toks[2], toks[3]),
            _ => {
                let shape = if kind == ModelKind::Mdp { "src action dst prob" } else { "src dst prob" };
                return Err(ModelError::Syntax { file: T, line, message: format!("expected `{shape}`") });
            }
        };
        let a = match actions.iter().position(|x| x == action) {
            Some(a) => a,
            None => {
                actions.push(action.to_string());
                actions.len() - 1
            }
        };
        let p = parse_probability(prob).ok_or_else(|| ModelError::Syntax {
            file: T,
            line,
            message: format!("invalid probability \"{prob}\""),
        })?;
        edges.push((line, parse_state(T, line, src)?, a, parse_state(T, line, dst)?, p));
    }

    let mut aps: Option<Alphabet> = None;
    let mut label_lines: Vec<(usize, usize, Vec<String>)> = Vec::new();
    for (i, raw) in labels.lines().enumerate() {
        let line = i + 1;
        let text = raw.trim();
        if text.is_empty() {
            continue;
        }
        if let Some(rest) = text.strip_prefix("#aps") {
            aps = Some(Alphabet::new(rest.split_whitespace())?);
            continue;
        }
        if let Some(rest) = text.strip_prefix("#states") {
            let n = header_count(L, line, rest)?;
            if declared.is_some_and(|d| d != n) {
                return Err(ModelError::Syntax { file: L, line, message: "state count disagrees with transitions file".into() });
            }
            declared = Some(n);
            continue;
        }
        if text.starts_with('#') {
            continue;
        }
        let (state, props) = text.split_once(':').ok_or_else(|| ModelError::Syntax {
            file: L,
            line,
            message: "expected `state: ap ...`".into(),
        })?;
        label_lines.push((line, parse_state(L, line, state.trim())?, props.split_whitespace().map(String::from).collect()));
    }
    let alphabet = aps.ok_or(ModelError::Syntax { file: L, line: 1, message: "missing `#aps` header".into() })?;

    let inferred = edges
        .iter()
        .flat_map(|e| [e.1, e.3])
        .chain(label_lines.iter().map(|l| l.1))
        .chain(init.map(|i| i.0))
        .max()
        .map_or(1, |m| m + 1);
    let n = declared.unwrap_or(inferred);
    let check = |file, line, state| {
        if state < n {
            Ok(state)
        } else {
            Err(ModelError::DanglingState { file, line, state, states: n })
        }
    };
    let mut labels = vec![0; n];
    for (line, s, props) in &label_lines {
        let s = check(L, *line, *s)?;
        for ap in props {
            let i = alphabet.index_of(ap).ok_or_else(|| ModelError::UndeclaredAp { line: *line, ap: ap.clone() })?;
            labels[s] |= 1 << i;
        }
    }
    let mut choices: Vec<Vec<Choice>> = vec![Vec::new(); n];
    for &(line, src, a, dst, p) in &edges {
        check(T, line, src)?;
        check(T, line, dst)?;
        match choices[src].iter_mut().find(|c| c.action == a) {
            Some(c) => c.dist.push((dst, p)),
            None => choices[src].push(Choice { action: a, dist: vec![(dst, p)] }),
        }
    }
    for cs in &mut choices {
        cs.sort_by_key(|c| c.action);
    }
    let initial = match init {
        Some((s, line)) => vec![(check(T, line, s)?, 1.0)],
        None => vec![(0, 1.0)],
    };
    match kind {
        ModelKind::MarkovChain => Model::markov_chain(
            alphabet,
            labels,
            initial,
            choices.into_iter().map(|mut c| c.pop().map(|c| c.dist).unwrap_or_default()).collect(),
        ),
        ModelKind::Mdp => Model::mdp(alphabet, labels, initial, actions, choices),
    }
}

pub fn load_model_files(transitions: &Path, labels: &Path, kind: ModelKind) -> Result<Model, ModelError> {
    let read = |p: &Path| {
        std::fs::read_to_string(p).map_err(|source| ModelError::Io { path: p.display().to_string(), source })
    };
    load_model(&read(transitions)?, &read(labels)?, kind)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub const ME_TRA: &str = "#states 3\n0 2 2/3\n0 1 1/3\n1 0 1\n2 0 1\n";
    pub const ME_LAB: &str = "#aps a b c\n0: a\n1: b\n2: c\n";

    #[test]
    fn loads_running_example_chain() {
        let m = load_model(ME_TRA, ME_LAB, ModelKind::MarkovChain).unwrap();
        assert_eq!(m.num_states(), 3);
        assert_eq!(m.labels(), &[1, 2, 4]);
        assert_eq!(m.choices(0)[0].dist, vec![(1, 1.0 / 3.0), (2, 2.0 / 3.0)]);
        assert_eq!(m.initial(), &[(0, 1.0)]);
    }

    #[test]
    fn row_summing_below_one_names_state() {
        let err = load_model("0 1 0.9\n1 1 1\n", "#aps a\n", ModelKind::MarkovChain).unwrap_err();
        match err {
            ModelError::NotStochastic { state, .. } => assert_eq!(state, 0),
            e => panic!("unexpected {e}"),
        }
        assert!(err_text("0 1 0.9\n1 1 1\n").contains("state 0"));
    }

    fn err_text(tra: &str) -> String {
        load_model(tra, "#aps a\n", ModelKind::MarkovChain).unwrap_err().to_string()
    }

    #[test]
    fn loads_two_state_mdp() {
        let tra = "#states 2\n0 go 1 1\n1 stay 1 1\n1 back 0 1\n";
        let m = load_model(tra, "#aps a b\n0: a\n1: b\n", ModelKind::Mdp).unwrap();
        assert_eq!(m.num_states(), 2);
        assert_eq!(m.actions().len(), 3);
        assert_eq!(m.choices(1).len(), 2);
    }

    #[test]
    fn states_without_rows_are_absorbing() {
        let m = load_model("#states 3\n0 1 1\n", "#aps a\n", ModelKind::MarkovChain).unwrap();
        assert_eq!(m.choices(1), &[Choice { action: 0, dist: vec![(1, 1.0)] }]);
        assert_eq!(m.choices(2)[0].dist, vec![(2, 1.0)]);
        let m = load_model("#states 2\n0 go 0 1\n", "#aps a\n", ModelKind::Mdp).unwrap();
        assert_eq!(m.actions(), &["go".to_string(), "tau".to_string()]);
        assert_eq!(m.choices(1), &[Choice { action: 1, dist: vec![(1, 1.0)] }]);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            load_model("0 1 1\n", "#aps a\n0: b\n", ModelKind::MarkovChain),
            Err(ModelError::UndeclaredAp { .. })
        ));
        assert!(matches!(
            load_model("#states 2\n0 5 1\n", "#aps a\n", ModelKind::MarkovChain),
            Err(ModelError::DanglingState { state: 5, .. })
        ));
        assert!(matches!(
            load_model("0 1 1\n", "#aps a\n", ModelKind::Mdp),
            Err(ModelError::Syntax { line: 1, .. })
        ));
        assert!(matches!(load_model("0 0 1\n", "0: a\n", ModelKind::MarkovChain), Err(ModelError::Syntax { .. })));
        assert!(err_text("0 0 3/0\n").contains("invalid probability"));
    }

    #[test]
    fn probability_syntax() {
        assert_eq!(parse_probability("1/4"), Some(0.25));
        assert_eq!(parse_probability("0.5"), Some(0.5));
        assert_eq!(parse_probability("1.5"), None);
        assert_eq!(parse_probability("-1/2"), None);
        assert_eq!(parse_probability("x"), None);
    }

    #[test]
    fn relabelling_projects_propositions() {
        let m = load_model(ME_TRA, ME_LAB, ModelKind::MarkovChain).unwrap();
        let r = m.relabelled(&Alphabet::new(["c", "a"]).unwrap()).unwrap();
        assert_eq!(r.labels(), &[2, 0, 1]);
    }
}
