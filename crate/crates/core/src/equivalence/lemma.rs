use std::collections::HashMap;

use serde::Serialize;

use super::error::EquivalenceError;
use super::simulation::{SimulationRelation, ValueMap};
use crate::model::{ProtoAlgorithm, State, Value};
use crate::semantics::{computed_function, enumerate_runs, step, Entry, Run, Terminal, Variant};

/// Builds a run of `b` that stays related to `run` position by position,
/// starting at `start`. At each position the least related successor is
/// taken. A lasso is followed around its cycle until the pair of cycle
/// position and state of `b` repeats.
pub fn lift_run(
    b: &ProtoAlgorithm,
    r: &SimulationRelation,
    run: &Run,
    start: &State,
) -> Result<Run, EquivalenceError> {
    let first = &run.states[0];
    if !r.contains(first, start) {
        return Err(EquivalenceError::NotASimulation {
            reason: "the start states are not related".into(),
        });
    }
    let advance = |cur: &State, target: &State| -> Result<State, EquivalenceError> {
        step(b, cur, r.variant)
            .into_iter()
            .find(|t| r.contains(target, t))
            .ok_or_else(|| EquivalenceError::NotASimulation {
                reason: "transfer fails while lifting a run".into(),
            })
    };
    let mut out = vec![start.clone()];
    match run.terminal {
        Terminal::Lasso { cycle_start } => {
            let len = run.states.len() - 1 - cycle_start;
            let pos = |k: usize| if k < cycle_start { k } else { cycle_start + (k - cycle_start) % len };
            let mut seen: HashMap<(usize, State), usize> = HashMap::new();
            let mut k = 0;
            loop {
                if k >= cycle_start {
                    if let Some(&at) = seen.get(&(pos(k), out[k].clone())) {
                        return Ok(Run {
                            states: out,
                            terminal: Terminal::Lasso { cycle_start: at },
                        });
                    }
                    seen.insert((pos(k), out[k].clone()), k);
                }
                let next = advance(&out[k], &run.states[pos(k + 1)])?;
                out.push(next);
                k += 1;
            }
        }
        _ => {
            for target in &run.states[1..] {
                let next = advance(out.last().unwrap(), target)?;
                out.push(next);
            }
            let last = out.last().unwrap();
            let terminal = if last.is_final() {
                Terminal::Final
            } else if step(b, last, r.variant).is_empty() {
                Terminal::Stuck
            } else {
                Terminal::Cutoff
            };
            Ok(Run { states: out, terminal })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "detail", rename_all = "snake_case")]
pub enum ClauseStatus {
    Holds,
    Violated(String),
    NotClaimed,
}

impl ClauseStatus {
    pub fn holds(&self) -> bool {
        !matches!(self, ClauseStatus::Violated(_))
    }
}

/// The consequences of a simulation of `a` by `b` for computed functions
/// and runs: definedness transfers along `gamma_i`; every output of `a` is
/// the `gamma_o` image of an output of `b`; every run of `a` on a defined
/// input has an equally long run of `b` (algorithmic simulations only).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theorem1Report {
    pub gamma_i: Vec<(Value, Value)>,
    pub gamma_o: Vec<(Value, Value)>,
    pub definedness: ClauseStatus,
    pub outputs: ClauseStatus,
    pub run_lengths: ClauseStatus,
}

impl Theorem1Report {
    pub fn holds(&self) -> bool {
        self.definedness.holds() && self.outputs.holds() && self.run_lengths.holds()
    }
}

const MAX_TRANSLATIONS: usize = 100_000;

/// Checks the three clauses for a simulation `r` of `a` by `b`. The
/// translations are chosen among the initial and final pairs of `r`: the
/// first output translation in canonical order for which every input has a
/// related partner satisfying the first two clauses, and for each input the
/// least such partner.
pub fn verify_theorem1(
    a: &ProtoAlgorithm,
    b: &ProtoAlgorithm,
    r: &SimulationRelation,
    state_cap: usize,
    max_steps: usize,
    max_runs: usize,
) -> Result<Theorem1Report, EquivalenceError> {
    let fa = computed_function(a, state_cap)?;
    let fb = computed_function(b, state_cap)?;
    let (ia, ib) = (a.interpretation(), b.interpretation());

    let inputs: Vec<(Value, Vec<Value>)> = ia
        .input_domain()
        .iter()
        .map(|&d| {
            let s = State::initial(d);
            let mut c: Vec<Value> = ib
                .input_domain()
                .iter()
                .copied()
                .filter(|&e| r.contains(&s, &State::initial(e)))
                .collect();
            c.sort();
            (d, c)
        })
        .collect();
    let outputs: Vec<(Value, Vec<Value>)> = ib
        .output_domain()
        .iter()
        .map(|&e| {
            let t = State::final_(e);
            let mut c: Vec<Value> = ia
                .output_domain()
                .iter()
                .copied()
                .filter(|&d| r.contains(&State::final_(d), &t))
                .collect();
            c.sort();
            (e, c)
        })
        .collect();
    if let Some((e, _)) = outputs.iter().find(|(_, c)| c.is_empty()) {
        let reason = format!("final state for `{}` has no related final state", ib.name(*e));
        return Err(EquivalenceError::NotASimulation { reason });
    }
    if let Some((d, _)) = inputs.iter().find(|(_, c)| c.is_empty()) {
        let reason = format!("initial state for `{}` has no related initial state", ia.name(*d));
        return Err(EquivalenceError::NotASimulation { reason });
    }

    // Clause (1) and (2) for one input under a chosen output translation.
    let check = |d: Value, e: Value, go: &HashMap<Value, Value>| -> (ClauseStatus, ClauseStatus) {
        match (fa.get(d), fb.get(e)) {
            (Some(Entry::Defined(outs)), Some(Entry::Defined(outs_b))) => {
                let images: Vec<Value> = outs_b.iter().map(|o| go[o]).collect();
                match outs.iter().find(|o| !images.contains(o)) {
                    None => (ClauseStatus::Holds, ClauseStatus::Holds),
                    Some(o) => (
                        ClauseStatus::Holds,
                        ClauseStatus::Violated(format!(
                            "output `{}` on input `{}` is not the image of an output on `{}`",
                            ia.name(*o),
                            ia.name(d),
                            ib.name(e)
                        )),
                    ),
                }
            }
            (Some(Entry::Defined(_)), _) => (
                ClauseStatus::Violated(format!(
                    "defined on `{}` but the partner is undefined on `{}`",
                    ia.name(d),
                    ib.name(e)
                )),
                ClauseStatus::Holds,
            ),
            _ => (ClauseStatus::Holds, ClauseStatus::Holds),
        }
    };

    let mut choice: Vec<usize> = vec![0; outputs.len()];
    let mut chosen: Option<(HashMap<Value, Value>, ValueMap)> = None;
    for _ in 0..MAX_TRANSLATIONS {
        let go: HashMap<Value, Value> = outputs.iter().zip(&choice).map(|((e, c), &k)| (*e, c[k])).collect();
        let gi: Option<Vec<(Value, Value)>> = inputs
            .iter()
            .map(|(d, c)| {
                c.iter()
                    .find(|&&e| {
                        let (x, y) = check(*d, e, &go);
                        x.holds() && y.holds()
                    })
                    .map(|&e| (*d, e))
            })
            .collect();
        if let Some(gi) = gi {
            chosen = Some((go, gi));
            break;
        }
        // Next output translation, odometer style.
        let mut k = 0;
        while k < choice.len() {
            choice[k] += 1;
            if choice[k] < outputs[k].1.len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
        if k == choice.len() {
            break;
        }
    }
    let (go, gi) = chosen.unwrap_or_else(|| {
        let go = outputs.iter().map(|(e, c)| (*e, c[0])).collect();
        let gi = inputs.iter().map(|(d, c)| (*d, c[0])).collect();
        (go, gi)
    });

    let mut definedness = ClauseStatus::Holds;
    let mut outputs_status = ClauseStatus::Holds;
    for &(d, e) in &gi {
        let (x, y) = check(d, e, &go);
        if definedness.holds() && !x.holds() {
            definedness = x;
        }
        if outputs_status.holds() && !y.holds() {
            outputs_status = y;
        }
    }

    let run_lengths = if r.variant == Variant::Computational {
        ClauseStatus::NotClaimed
    } else {
        let mut status = ClauseStatus::Holds;
        'outer: for &(d, e) in &gi {
            if !fa.get(d).is_some_and(Entry::is_defined) {
                continue;
            }
            for run in enumerate_runs(a, d, Variant::Algorithmic, max_steps, max_runs)? {
                let lifted = lift_run(b, r, &run, &State::initial(e))?;
                if lifted.len() != run.len() || lifted.terminal != run.terminal {
                    status = ClauseStatus::Violated(format!(
                        "a run of length {} on `{}` lifts to one of length {}",
                        run.len(),
                        ia.name(d),
                        lifted.len()
                    ));
                    break 'outer;
                }
            }
        }
        status
    };

    let mut gamma_o: Vec<(Value, Value)> = go.into_iter().collect();
    gamma_o.sort();
    Ok(Theorem1Report {
        gamma_i: gi,
        gamma_o,
        definedness,
        outputs: outputs_status,
        run_lengths,
    })
}
