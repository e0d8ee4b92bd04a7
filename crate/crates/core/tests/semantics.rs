mod common;

use std::collections::BTreeSet;

use common::{explored_states, fixture, oracle_successors, predicate_closure_oracle, random_models, run_oracle, FIXTURES};
use proptest::prelude::*;
use protoalg::gen;
use protoalg::model::{BottomPolicy, ProtoAlgorithm, StateKind, SymbolKind};
use protoalg::semantics::{
    algorithmic_step, build_state_graph, computational_step, computed_function, enumerate_runs, Entry,
    Terminal, Variant, DEFAULT_STATE_CAP,
};

fn all_states(a: &ProtoAlgorithm) -> BTreeSet<protoalg::model::State> {
    let mut s: BTreeSet<_> = explored_states(a, Variant::Algorithmic).into_iter().collect();
    s.extend(explored_states(a, Variant::Computational));
    s
}

fn check_steps(a: &ProtoAlgorithm) {
    for s in all_states(a) {
        let got: BTreeSet<_> = algorithmic_step(a, &s).into_iter().collect();
        assert_eq!(got, oracle_successors(a, &s), "algorithmic successors of {}", s.render(a));
        let got: BTreeSet<_> = computational_step(a, &s).into_iter().collect();
        assert_eq!(got, predicate_closure_oracle(a, &s), "computational successors of {}", s.render(a));
    }
}

fn check_function(a: &ProtoAlgorithm) {
    let f = computed_function(a, DEFAULT_STATE_CAP).unwrap();
    for (d, entry) in &f.entries {
        let oracle = run_oracle(a, *d, Variant::Algorithmic);
        match (entry, oracle) {
            (Entry::Defined(outs), Some((o, false))) => assert_eq!(outs, &o),
            (Entry::Undefined { partial_outputs, .. }, Some((o, true))) => assert_eq!(partial_outputs, &o),
            (Entry::Undefined { .. }, None) => {}
            (e, o) => panic!("input {}: {e:?} against oracle {o:?}", a.interpretation().name(*d)),
        }
    }
}

#[test]
fn steps_match_rule_oracle_on_fixtures() {
    for name in FIXTURES {
        check_steps(&fixture(name));
    }
    check_steps(&common::valid(&gen::with_policy(gen::handoff(2), BottomPolicy::Strict)));
}

#[test]
fn steps_match_rule_oracle_on_random_models() {
    for a in random_models(11, 100) {
        check_steps(&a);
    }
}

#[test]
fn computed_function_matches_run_enumeration() {
    for name in FIXTURES {
        check_function(&fixture(name));
    }
    for a in random_models(12, 100) {
        check_function(&a);
    }
}

#[test]
fn countdown_function_is_constant_zero() {
    let a = fixture("f1");
    let f = computed_function(&a, DEFAULT_STATE_CAP).unwrap();
    let zero = a.interpretation().value("0").unwrap();
    assert_eq!(f.entries.len(), 4);
    for (_, e) in &f.entries {
        assert_eq!(e, &Entry::Defined(BTreeSet::from([zero])));
    }
}

#[test]
fn countdown_run_lengths() {
    let a = fixture("f1");
    let two = a.interpretation().value("2").unwrap();
    let runs = enumerate_runs(&a, two, Variant::Algorithmic, 100, 100).unwrap();
    assert_eq!(runs.len(), 1);
    assert_eq!((runs[0].terminal, runs[0].len()), (Terminal::Final, 8));
    let runs = enumerate_runs(&a, two, Variant::Computational, 100, 100).unwrap();
    assert_eq!((runs[0].terminal, runs[0].len()), (Terminal::Final, 5));
}

/// Closed-form successor counts for deterministic, lifted models.
fn expected_count(a: &ProtoAlgorithm, s: &protoalg::model::State) -> usize {
    let n = a.components().len();
    match s.kind() {
        StateKind::Initial => {
            let g = &a.components()[a.main_index()];
            n * g.outdegree(g.root())
        }
        StateKind::Final => 1,
        StateKind::Internal => {
            let c = s.control.as_ref().unwrap();
            let i = c.sched.unwrap() as usize;
            let f = a.components()[i].label(c.vertices[i].unwrap());
            if f == a.alphabet().fin() || a.alphabet().kind(f) == SymbolKind::Predicate {
                1
            } else {
                n
            }
        }
    }
}

#[test]
fn handoff_successor_counts() {
    let a = fixture("f2");
    let g = build_state_graph(&a, Variant::Algorithmic, None, DEFAULT_STATE_CAP).unwrap();
    assert!(g.len() > 10);
    for k in 0..g.len() {
        assert_eq!(g.successors(k).len(), expected_count(&a, g.state(k)), "{}", g.state(k).render(&a));
    }
}

#[test]
fn classical_models_are_deterministic() {
    let a = fixture("f1");
    assert!(a.is_classical());
    let g = build_state_graph(&a, Variant::Algorithmic, None, DEFAULT_STATE_CAP).unwrap();
    for k in 0..g.len() {
        assert_eq!(g.successors(k).len(), 1);
    }
    for d in a.interpretation().input_domain() {
        assert_eq!(enumerate_runs(&a, *d, Variant::Algorithmic, 1000, 10).unwrap().len(), 1);
    }
}

#[test]
fn strict_handoff_worker_cannot_start() {
    let a = common::valid(&gen::with_policy(gen::handoff(2), BottomPolicy::Strict));
    let one = a.interpretation().value("1").unwrap();
    let g = build_state_graph(&a, Variant::Algorithmic, Some(&[one]), DEFAULT_STATE_CAP).unwrap();
    // Both post-ini states are stuck: the worker's private datum is the
    // dummy value, and so is the shared datum the main component would
    // write with `put`.
    let start = g.index_of(&protoalg::model::State::initial(one)).unwrap();
    let next = g.successors(start);
    assert_eq!(next.len(), 2);
    let stuck: Vec<_> = g.stuck_states().collect();
    assert_eq!(stuck, next.to_vec());
    let scheds: Vec<_> = next.iter().map(|k| g.state(*k).control.as_ref().unwrap().sched).collect();
    assert_eq!(scheds, vec![Some(0), Some(1)]);
    let lifted = fixture("f2");
    let g = build_state_graph(&lifted, Variant::Algorithmic, Some(&[one]), DEFAULT_STATE_CAP).unwrap();
    assert_eq!(g.stuck_states().count(), 0);
}

#[test]
fn handoff_is_undefined_everywhere() {
    let a = fixture("f2");
    let f = computed_function(&a, DEFAULT_STATE_CAP).unwrap();
    let two = a.interpretation().value("2").unwrap();
    let partial: Vec<_> = f
        .entries
        .iter()
        .map(|(_, e)| match e {
            Entry::Undefined { partial_outputs, .. } => partial_outputs.clone(),
            Entry::Defined(_) => panic!("defined entry"),
        })
        .collect();
    assert_eq!(partial, vec![BTreeSet::new(), BTreeSet::from([two])]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn random_runs_respect_terminal_kinds(seed in any::<u64>()) {
        let a = common::valid(&gen::random_model(&mut common::rng(seed), &gen::RandomSpec {
            components: 2,
            vertices: (2, 3),
            shared: true,
            ..Default::default()
        }));
        for d in a.interpretation().input_domain() {
            for variant in [Variant::Algorithmic, Variant::Computational] {
                let Ok(runs) = enumerate_runs(&a, *d, variant, 200, 2000) else { continue };
                for r in runs {
                    let last = r.states.last().unwrap();
                    match r.terminal {
                        Terminal::Final => prop_assert!(last.is_final() && r.output().is_some()),
                        Terminal::Lasso { cycle_start } => {
                            prop_assert!(r.output().is_none());
                            prop_assert_eq!(&r.states[cycle_start], last);
                        }
                        Terminal::Stuck => prop_assert!(false, "lifted models do not get stuck"),
                        Terminal::Cutoff => prop_assert_eq!(r.len(), 201),
                    }
                    prop_assert!(r.states[..r.len() - 1].iter().all(|s| !s.is_final()));
                }
            }
        }
    }
}
