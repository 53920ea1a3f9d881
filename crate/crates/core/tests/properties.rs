//! Cross-module invariants, fuzzed over seeded random instances.

use std::collections::BTreeSet;

use pmc_core::automata::{Alphabet, DeterministicStep, Ngba, Symbol};
use pmc_core::breakpoint::{all_breakpoint_states, bp_successor, BreakpointState};
use pmc_core::engine::{reach_probability_mc, Analysis, Solver, Weighted};
use pmc_core::gen;
use pmc_core::ght::{Ght, GhtConstruction};
use pmc_core::graph::bsccs;
use pmc_core::model::product::{explore, Start};
use pmc_core::model::{Model, ModelKind};
use pmc_core::semidet::build_semidet;
use pmc_core::subset::{product_subset, Classification, SubsetConstruction};
use proptest::prelude::*;
use rand::Rng;

fn chain(rng: &mut gen::FuzzRng, max: usize, al: &Alphabet) -> Model {
    if rng.gen_bool(0.5) {
        gen::random_mc(rng, max, al)
    } else {
        gen::random_local_mc(rng, max, al)
    }
}

fn mdp(rng: &mut gen::FuzzRng, max: usize, al: &Alphabet) -> Model {
    if rng.gen_bool(0.5) {
        gen::random_mdp(rng, max, 3, al)
    } else {
        gen::random_local_mdp(rng, max, 3, al)
    }
}

fn ngba(rng: &mut gen::FuzzRng, al: Alphabet, max_states: usize) -> Ngba {
    let (n, k, d) = (rng.gen_range(1..=max_states), rng.gen_range(1..=2), rng.gen_range(0.3..0.7));
    gen::random_ngba_over(rng, al, n, k, d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn breakpoint_runs_project_to_subset_runs(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let b = gen::random_ngba(&mut rng, 4, 2, 2);
        let subset = SubsetConstruction::new(&b);
        let starts = all_breakpoint_states(b.num_states(), b.num_acc());
        let start = starts[rng.gen_range(0..starts.len())].clone();
        let mut s = start.clone();
        let mut r = start.reached.clone();
        for _ in 0..12 {
            let sym: Symbol = rng.gen_range(0..b.alphabet().num_symbols() as Symbol);
            match (bp_successor(&b, &s, sym), subset.step(&r, sym)) {
                (Some((t, _)), Some((u, _))) => {
                    prop_assert_eq!(&t.reached, &u);
                    prop_assert!(t.children.is_subset(&t.reached) && t.children != t.reached);
                    s = t;
                    r = u;
                }
                (None, None) => break,
                (x, y) => prop_assert!(false, "breakpoint {:?} vs subset {:?}", x.is_some(), y.is_some()),
            }
        }
    }

    #[test]
    fn semi_deterministic_structure(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let b = gen::random_ngba(&mut rng, 4, 2, 2);
        let sd = build_semidet(&b);
        let ns = sd.initial_part().num_states();
        let a = sd.to_ngba();
        prop_assert_eq!(a.initial().iter().collect::<Vec<_>>(), vec![0]);
        for q in 0..a.num_states() {
            for sym in a.alphabet().symbols() {
                let targets: Vec<_> = a.edges_on(q, sym).iter().collect();
                let initial_targets = targets.iter().filter(|e| e.target < ns).count();
                prop_assert!(initial_targets <= 1);
                if q >= ns {
                    prop_assert_eq!(initial_targets, 0);
                    prop_assert!(targets.len() <= 1);
                } else {
                    prop_assert!(targets.iter().all(|e| e.marks.is_empty()));
                }
            }
        }
    }

    #[test]
    fn subset_product_preserves_probability_and_projects_marks(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let al = gen::alphabet(2);
        let m = if rng.gen_bool(0.5) { chain(&mut rng, 10, &al) } else { mdp(&mut rng, 8, &al) };
        let b = ngba(&mut rng, al, 4);
        let p = product_subset(&m, &b);
        for s in 0..p.num_states() {
            prop_assert_eq!(p.choices[s].len(), m.choices(p.base[s]).len());
            for c in &p.choices[s] {
                let total: f64 = c.branches.iter().map(|x| x.prob).sum::<f64>() + c.blocked;
                prop_assert!((total - 1.0).abs() < 1e-12);
                for x in &c.branches {
                    let sym = p.labels[x.target];
                    let mut seen = pmc_core::bits::AccSet::EMPTY;
                    for q in p.aut[s].iter() {
                        for e in b.edges_on(q, sym) {
                            seen = seen.union(e.marks);
                        }
                    }
                    prop_assert_eq!(x.mark.over, seen);
                    prop_assert!(x.mark.over.is_superset(x.mark.under));
                    prop_assert_eq!(&b.post(&p.aut[s], sym), &p.aut[x.target]);
                }
            }
        }
    }

    #[test]
    fn history_tree_bsccs_project_onto_subset_bsccs(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let al = gen::alphabet(2);
        let m = chain(&mut rng, 10, &al);
        let b = ngba(&mut rng, al, 3);
        let s = product_subset(&m, &b);
        let sb: BTreeSet<Vec<usize>> = bsccs(&s.graph()).into_iter().map(|c| c.states).collect();
        let d = explore(&m, &GhtConstruction::new(&b), Start::Initial { state: Ght::initial(&b), dist: m.initial() }, |_, _| true);
        let mut images = BTreeSet::new();
        for c in bsccs(&d.graph()) {
            let mut image: Vec<usize> = c
                .states
                .iter()
                .map(|&x| s.state_of(d.base[x], d.aut[x].reached()).expect("projection is a subset product state"))
                .collect();
            image.sort_unstable();
            image.dedup();
            prop_assert!(sb.contains(&image), "image {:?} is not a bottom SCC", image);
            images.insert(image);
        }
        prop_assert_eq!(images, sb);
    }

    #[test]
    fn bottom_sccs_are_reached_almost_surely(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let m = chain(&mut rng, 20, &gen::alphabet(1));
        let w = Weighted::from_model(&m);
        let mut target = vec![false; m.num_states()];
        for c in bsccs(&w.graph()) {
            for s in c.states {
                target[s] = true;
            }
        }
        let x = reach_probability_mc(&w, &target, Solver::default()).unwrap();
        prop_assert!(x.iter().all(|p| (p - 1.0).abs() < 1e-9), "{:?}", x);
    }

    #[test]
    fn layers_escalate_soundly(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let al = gen::alphabet(2);
        let m = if seed % 2 == 0 { chain(&mut rng, 12, &al) } else { mdp(&mut rng, 8, &al) };
        let b = ngba(&mut rng, al, 3);
        let a = Analysis::new(&m, &b);
        for c in &a.components {
            let subset = a.classify_subset(c);
            let bp = a.decide_breakpoint(c).0;
            let multi = match m.kind() {
                ModelKind::MarkovChain => a.decide_multibreakpoint_mc(c).accepting,
                ModelKind::Mdp => a.decide_multibreakpoint_mdp(c).accepting,
            };
            let rabin = a.decide_rabin_local(c).0;
            prop_assert_eq!(multi, rabin);
            if subset == Classification::Accepting {
                prop_assert_eq!(bp, Classification::Accepting);
            }
            if subset != Classification::Unknown {
                prop_assert_eq!(subset == Classification::Accepting, rabin);
            }
            if bp != Classification::Unknown {
                prop_assert_eq!(bp == Classification::Accepting, rabin);
            }
        }
    }

    #[test]
    fn breakpoint_states_keep_children_strictly_inside(n in 1usize..=5, k in 1usize..=3) {
        for s in all_breakpoint_states(n, k) {
            prop_assert!(s.is_valid(k));
            prop_assert_eq!(BreakpointState::new(s.reached.clone(), s.index, s.children.clone()), s.clone());
        }
        prop_assert_eq!(all_breakpoint_states(n, k).len() as u64, pmc_core::breakpoint::bp_state_count(n, k));
    }
}

#[test]
fn reached_set_of_initial_tree_is_the_initial_set() {
    let mut rng = gen::rng(7);
    let b = gen::random_ngba(&mut rng, 4, 2, 2);
    assert_eq!(Ght::initial(&b).reached(), b.initial());
}
