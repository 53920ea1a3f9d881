use super::*;
use crate::automata::tests::b_e;
use crate::automata::{Alphabet, NgbaBuilder};
use crate::bits::AccSet;
use crate::breakpoint::BreakpointState;
use crate::gen;
use crate::ltl::parse_ltl;
use crate::model::{load_model, ModelKind};
use proptest::prelude::*;
use rand::Rng;

fn m_e() -> Model {
    load_model("0 2 2/3\n0 1 1/3\n1 0 1\n2 0 1\n", "#aps a b c\n0: a\n1: b\n2: c\n", ModelKind::MarkovChain).unwrap()
}

/// States 0 = c, 1 = b (initial), 2 = a; `a` may loop or go back to `b`.
fn choice_mdp() -> Model {
    load_model(
        "#states 3\n#init 1\n1 go 0 1\n0 go 2 1\n2 back 1 1\n2 loop 2 1\n",
        "#aps a b c\n0: c\n1: b\n2: a\n",
        ModelKind::Mdp,
    )
    .unwrap()
}

/// `x` loops on every letter and moves to `y` on `a`; `y` loops on `a`
/// through the only accepting transition.
fn choice_ngba() -> Ngba {
    let al = Alphabet::new(["a", "b", "c"]).unwrap();
    let mut bd = NgbaBuilder::new(al, 2, 1);
    bd.add_initial(0)
        .add_edge(0, 1, 0, AccSet::EMPTY)
        .add_edge(0, 2, 0, AccSet::EMPTY)
        .add_edge(0, 4, 0, AccSet::EMPTY)
        .add_edge(0, 1, 1, AccSet::EMPTY)
        .add_edge(1, 1, 1, AccSet::single(0));
    bd.build().unwrap()
}

fn oracle() -> Config {
    Config { method: Method::RabinOracle, ..Config::default() }
}

#[test]
fn running_example_is_decided_by_breakpoint() {
    let (m, b) = (m_e(), b_e());
    let r = model_check(&m, &b, &Config::default()).unwrap();
    assert_eq!(r.components.len(), 1);
    let v = &r.components[0];
    assert_eq!((v.verdict, v.decided_by), (Verdict::Accepting, Layer::Breakpoint));
    assert!((r.probability - 1.0).abs() < 1e-12);
    assert_eq!(r.mode, Mode::Exact);
    let o = model_check(&m, &b, &oracle()).unwrap();
    assert!((o.probability - 1.0).abs() < 1e-12);
}

#[test]
fn running_example_multibreakpoint_and_rabin_local_accept() {
    let (m, b) = (m_e(), b_e());
    let a = Analysis::new(&m, &b);
    let c = &a.components[0];
    let res = a.decide_multibreakpoint_mc(c);
    assert!(res.accepting);
    let w = res.witness.unwrap();
    assert_eq!((w.model_state, w.start), (0, BreakpointState::fresh(StateSet::singleton(1))));
    assert_eq!(res.attempts.iter().map(|t| t.succeeded_with).collect::<Vec<_>>(), vec![Some(1)]);
    assert!(a.decide_rabin_local(c).0);
}

#[test]
fn mdp_multibreakpoint_trace() {
    let (m, b) = (choice_mdp(), choice_ngba());
    let a = Analysis::new(&m, &b);
    assert_eq!(a.components.len(), 1);
    assert_eq!(a.components[0].len(), 3);
    let c = &a.components[0];
    assert_eq!(a.classify_subset(c), Classification::Unknown);
    assert_eq!(a.decide_breakpoint(c).0, Classification::Unknown);
    let res = a.decide_multibreakpoint_mdp(c);
    assert!(res.accepting);
    let trace: Vec<(usize, Vec<usize>, Option<usize>)> =
        res.attempts.iter().map(|t| (t.model_state, t.reached.iter().collect(), t.succeeded_with)).collect();
    assert_eq!(trace, vec![(0, vec![0], None), (2, vec![0, 1], Some(1))]);
    let w = res.witness.unwrap();
    assert_eq!(w.model_state, 2);
    assert_eq!(w.start, BreakpointState::fresh(StateSet::singleton(1)));

    let r = model_check(&m, &b, &Config::default()).unwrap();
    assert_eq!(r.components[0].decided_by, Layer::MultiBreakpoint);
    assert!((r.probability - 1.0).abs() < 1e-12);
    assert_eq!(r.mode, Mode::Max);
    assert!((model_check(&m, &b, &oracle()).unwrap().probability - 1.0).abs() < 1e-12);
}

#[test]
fn infinitely_often_on_two_state_mdp() {
    let m = load_model("0 go 1 1\n1 loop 1 1\n1 back 0 1\n", "#aps a b\n0: a\n1: b\n", ModelKind::Mdp).unwrap();
    let phi = parse_ltl("G F a").unwrap();
    let r = model_check_ltl(&m, &phi, Mode::Max, &Config::default()).unwrap();
    assert!((r.probability - 1.0).abs() < 1e-12);
    let r = model_check_ltl(&m, &phi, Mode::Min, &Config::default()).unwrap();
    assert!(r.probability.abs() < 1e-12);
    assert_eq!(r.mode, Mode::Min);
}

#[test]
fn universal_automaton_is_decided_by_subset() {
    let al = Alphabet::new(["a", "b", "c"]).unwrap();
    let mut bd = NgbaBuilder::new(al.clone(), 1, 2);
    bd.add_initial(0);
    for s in al.symbols() {
        bd.add_edge(0, s, 0, AccSet::all(2));
    }
    let b = bd.build().unwrap();
    let r = model_check(&m_e(), &b, &Config::default()).unwrap();
    assert!(r.components.iter().all(|v| v.verdict == Verdict::Accepting && v.decided_by == Layer::Subset));
    assert!((r.probability - 1.0).abs() < 1e-12);
}

#[test]
fn empty_language_has_probability_zero() {
    let phi = parse_ltl("false").unwrap();
    let r = model_check_ltl(&m_e(), &phi, Mode::Exact, &Config::default()).unwrap();
    assert_eq!(r.probability, 0.0);
    let r = model_check_ltl(&choice_mdp(), &phi, Mode::Max, &Config::default()).unwrap();
    assert_eq!(r.probability, 0.0);
}

#[test]
fn unknown_propositions_are_false() {
    let r = model_check_ltl(&m_e(), &parse_ltl("F d").unwrap(), Mode::Exact, &Config::default()).unwrap();
    assert_eq!(r.probability, 0.0);
    let r = model_check_ltl(&m_e(), &parse_ltl("G !d").unwrap(), Mode::Exact, &Config::default()).unwrap();
    assert!((r.probability - 1.0).abs() < 1e-12);
}

#[test]
fn deterministic_automata_are_checked_directly() {
    let rabin = crate::ght::determinise_rabin(&b_e()).automaton;
    let r = model_check_deterministic(&m_e(), &rabin, &Config::default()).unwrap();
    assert!((r.probability - 1.0).abs() < 1e-12);
    let (parity, _) = crate::semidet::determinise_parity(&b_e());
    let r = model_check_deterministic(&m_e(), &parity, &Config::default()).unwrap();
    assert!((r.probability - 1.0).abs() < 1e-12);
}

#[test]
fn eventually_with_fair_coin() {
    let m = load_model("0 1 1/2\n0 2 1/2\n1 1 1\n2 2 1\n", "#aps p\n1: p\n", ModelKind::MarkovChain).unwrap();
    let r = model_check_ltl(&m, &parse_ltl("F p").unwrap(), Mode::Exact, &Config::default()).unwrap();
    assert!((r.probability - 0.5).abs() < 1e-12);
}

#[test]
fn json_has_expected_fields() {
    let r = model_check(&m_e(), &b_e(), &Config::default()).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    for key in ["probability", "mode", "layers", "components", "states_explored"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["layers"]["breakpoint"], 1);
    assert_eq!(v["components"][0]["decided_by"], "breakpoint");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn lazy_matches_oracle_on_chains(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let al = gen::alphabet(2);
        let m = if seed % 2 == 0 { gen::random_mc(&mut rng, 12, &al) } else { gen::random_local_mc(&mut rng, 16, &al) };
        let (n, k, d) = (rng.gen_range(1..=3), rng.gen_range(1..=2), rng.gen_range(0.3..0.7));
        let b = gen::random_ngba_over(&mut rng, al, n, k, d);
        let lazy = model_check(&m, &b, &Config::default()).unwrap();
        let rabin = model_check(&m, &b, &Config { fallback: Fallback::Rabin, ..Config::default() }).unwrap();
        let uncached = model_check(&m, &b, &Config { cache: false, ..Config::default() }).unwrap();
        let o = model_check(&m, &b, &oracle()).unwrap();
        prop_assert!((lazy.probability - o.probability).abs() < 1e-9, "{} vs {}", lazy.probability, o.probability);
        let verdicts = |r: &CheckResult| r.components.iter().map(|v| v.verdict).collect::<Vec<_>>();
        prop_assert_eq!(verdicts(&lazy), verdicts(&rabin));
        prop_assert_eq!(verdicts(&lazy), verdicts(&uncached));
    }

    #[test]
    fn lazy_matches_oracle_on_mdps(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let al = gen::alphabet(2);
        let m = if seed % 2 == 0 { gen::random_mdp(&mut rng, 8, 2, &al) } else { gen::random_local_mdp(&mut rng, 10, 3, &al) };
        let (n, k, d) = (rng.gen_range(1..=3), rng.gen_range(1..=2), rng.gen_range(0.3..0.7));
        let b = gen::random_ngba_over(&mut rng, al, n, k, d);
        let lazy = model_check(&m, &b, &Config::default()).unwrap();
        let rabin = model_check(&m, &b, &Config { fallback: Fallback::Rabin, ..Config::default() }).unwrap();
        let o = model_check(&m, &b, &oracle()).unwrap();
        prop_assert!((lazy.probability - o.probability).abs() < 1e-6, "{} vs {}", lazy.probability, o.probability);
        let verdicts = |r: &CheckResult| r.components.iter().map(|v| v.verdict).collect::<Vec<_>>();
        prop_assert_eq!(verdicts(&lazy), verdicts(&rabin));
    }
}
