use std::collections::HashMap;

use serde::Serialize;

use super::error::SemanticsError;
use super::step::{step, Variant};
use crate::model::{ProtoAlgorithm, State, Value};

/// How a run ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Terminal {
    /// Reached a final state.
    Final,
    /// Reached a non-final state without successors.
    Stuck,
    /// Truncated after the step limit.
    Cutoff,
    /// Revisited a state: the last state equals `states[cycle_start]` and
    /// the segment between them repeats forever.
    Lasso { cycle_start: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Run {
    pub states: Vec<State>,
    pub terminal: Terminal,
}

impl Run {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// The output of the run: its first non-dummy output value.
    pub fn output(&self) -> Option<Value> {
        self.states.iter().find_map(|s| s.output)
    }

    pub fn is_terminating(&self) -> bool {
        self.terminal == Terminal::Final
    }
}

/// Output value of a run (first state with a proper output).
pub fn output_value(run: &Run) -> Option<Value> {
    run.output()
}

/// Enumerates, depth first in canonical successor order, every run from the
/// initial state of `input`. A run ends at a final state (which is not
/// repeated), a stuck state, the first revisited state (lasso) or after
/// `max_steps` steps.
pub fn enumerate_runs(
    a: &ProtoAlgorithm,
    input: Value,
    variant: Variant,
    max_steps: usize,
    max_runs: usize,
) -> Result<Vec<Run>, SemanticsError> {
    if !a.interpretation().in_input(input) {
        return Err(SemanticsError::NotAnInput {
            value: a.interpretation().name(input).to_string(),
        });
    }
    let mut cache: HashMap<State, Vec<State>> = HashMap::new();
    let mut succ = |s: &State| -> Vec<State> {
        cache
            .entry(s.clone())
            .or_insert_with(|| step(a, s, variant))
            .clone()
    };

    let mut runs = Vec::new();
    let mut path: Vec<State> = vec![State::initial(input)];
    let mut on_path: HashMap<State, usize> = HashMap::from([(path[0].clone(), 0)]);
    // Per path position: the successors still to be tried.
    let mut pending: Vec<std::vec::IntoIter<State>> = Vec::new();

    let emit = |path: &[State], terminal: Terminal, runs: &mut Vec<Run>| {
        if runs.len() >= max_runs {
            return Err(SemanticsError::TooManyRuns { max_runs });
        }
        runs.push(Run {
            states: path.to_vec(),
            terminal,
        });
        Ok(())
    };

    // Classify the run ending at the top of the path, or descend.
    let mut open = true;
    loop {
        if open {
            let top = path.last().unwrap().clone();
            if top.is_final() {
                emit(&path, Terminal::Final, &mut runs)?;
            } else if path.len() > max_steps {
                emit(&path, Terminal::Cutoff, &mut runs)?;
            } else {
                let next = succ(&top);
                if next.is_empty() {
                    emit(&path, Terminal::Stuck, &mut runs)?;
                } else {
                    pending.push(next.into_iter());
                }
            }
            if pending.len() < path.len() {
                // Nothing to descend into from the top.
                let s = path.pop().unwrap();
                on_path.remove(&s);
            }
        }
        let Some(it) = pending.last_mut() else { break };
        match it.next() {
            Some(t) => {
                if let Some(&pos) = on_path.get(&t) {
                    path.push(t);
                    emit(&path, Terminal::Lasso { cycle_start: pos }, &mut runs)?;
                    path.pop();
                    open = false;
                } else {
                    on_path.insert(t.clone(), path.len());
                    path.push(t);
                    open = true;
                }
            }
            None => {
                pending.pop();
                let s = path.pop().unwrap();
                on_path.remove(&s);
                open = false;
            }
        }
    }
    Ok(runs)
}
