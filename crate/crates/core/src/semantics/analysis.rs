use std::collections::BTreeSet;

use super::error::SemanticsError;
use super::graph::{build_state_graph, StateGraph};
use super::runs::{Run, Terminal};
use super::step::Variant;
use crate::model::{ProtoAlgorithm, State, StateKind, Value};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivergenceReport {
    pub input: Value,
    /// A run reaching a cycle of internal states, if there is one.
    pub lasso: Option<Run>,
    /// Reachable internal states without successors.
    pub stuck: Vec<State>,
    /// Reachable final outputs.
    pub outputs: BTreeSet<Value>,
    pub states_explored: usize,
}

impl DivergenceReport {
    pub fn is_divergent(&self) -> bool {
        self.lasso.is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UndefinedReason {
    Divergent(Run),
    Stuck(State),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Entry {
    /// Every run terminates; the outputs they produce.
    Defined(BTreeSet<Value>),
    /// Some run does not terminate. `partial_outputs` lists outputs produced
    /// by the runs that do.
    Undefined {
        reason: UndefinedReason,
        partial_outputs: BTreeSet<Value>,
    },
}

impl Entry {
    pub fn is_defined(&self) -> bool {
        matches!(self, Entry::Defined(_))
    }
}

/// The input/output behaviour of a proto-algorithm, one entry per input in
/// input-domain order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComputedFunction {
    pub entries: Vec<(Value, Entry)>,
}

impl ComputedFunction {
    pub fn get(&self, input: Value) -> Option<&Entry> {
        self.entries.iter().find(|(v, _)| *v == input).map(|(_, e)| e)
    }

    /// Equality up to diagnostics: same defined/undefined pattern and the same
    /// output sets where defined.
    pub fn same_function(&self, other: &ComputedFunction) -> bool {
        self.entries.len() == other.entries.len()
            && self.entries.iter().zip(&other.entries).all(|((a, x), (b, y))| {
                a == b
                    && match (x, y) {
                        (Entry::Defined(p), Entry::Defined(q)) => p == q,
                        (Entry::Undefined { .. }, Entry::Undefined { .. }) => true,
                        _ => false,
                    }
            })
    }
}

pub fn divergence_analysis(
    a: &ProtoAlgorithm,
    input: Value,
    cap: usize,
) -> Result<DivergenceReport, SemanticsError> {
    if !a.interpretation().in_input(input) {
        return Err(SemanticsError::NotAnInput {
            value: a.interpretation().name(input).to_string(),
        });
    }
    let g = build_state_graph(a, Variant::Algorithmic, Some(&[input]), cap)?;
    let start = g.index_of(&State::initial(input)).expect("initial state present");
    let reach = g.reachable_from(&[start]);
    let stuck = g
        .stuck_states()
        .filter(|&i| reach[i])
        .map(|i| g.state(i).clone())
        .collect();
    let outputs = g
        .final_states()
        .filter(|&i| reach[i])
        .filter_map(|i| g.state(i).output)
        .collect();
    Ok(DivergenceReport {
        input,
        lasso: find_lasso(&g, start),
        stuck,
        outputs,
        states_explored: g.len(),
    })
}

/// Depth-first search for a cycle through internal states, returning the
/// path from `start` into the cycle.
fn find_lasso(g: &StateGraph, start: usize) -> Option<Run> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        OnPath(usize),
        Done,
    }
    let mut mark = vec![Mark::New; g.len()];
    let mut path = vec![start];
    let mut cursor = vec![0usize];
    mark[start] = Mark::OnPath(0);
    while let Some(&top) = path.last() {
        let k = cursor.last_mut().unwrap();
        let next = g.successors(top).get(*k).copied();
        *k += 1;
        match next {
            Some(t) if g.kind(t) == StateKind::Internal => match mark[t] {
                Mark::New => {
                    mark[t] = Mark::OnPath(path.len());
                    path.push(t);
                    cursor.push(0);
                }
                Mark::OnPath(pos) => {
                    let mut states: Vec<State> = path.iter().map(|&i| g.state(i).clone()).collect();
                    states.push(g.state(t).clone());
                    return Some(Run {
                        states,
                        terminal: Terminal::Lasso { cycle_start: pos },
                    });
                }
                Mark::Done => {}
            },
            Some(_) => {}
            None => {
                mark[top] = Mark::Done;
                path.pop();
                cursor.pop();
            }
        }
    }
    None
}

pub fn computed_function(a: &ProtoAlgorithm, cap: usize) -> Result<ComputedFunction, SemanticsError> {
    let mut entries = Vec::new();
    for &input in a.interpretation().input_domain() {
        let r = divergence_analysis(a, input, cap)?;
        let entry = match (r.lasso, r.stuck.into_iter().next()) {
            (Some(run), _) => Entry::Undefined {
                reason: UndefinedReason::Divergent(run),
                partial_outputs: r.outputs,
            },
            (None, Some(s)) => Entry::Undefined {
                reason: UndefinedReason::Stuck(s),
                partial_outputs: r.outputs,
            },
            (None, None) => Entry::Defined(r.outputs),
        };
        entries.push((input, entry));
    }
    Ok(ComputedFunction { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{countdown, handoff, with_policy};
    use crate::model::{validate_proto_algorithm, BottomPolicy, ValidationLevel};
    use crate::semantics::{algorithmic_step, DEFAULT_STATE_CAP};

    fn load(raw: crate::model::RawModel) -> ProtoAlgorithm {
        validate_proto_algorithm(&raw, ValidationLevel::Strict).unwrap()
    }

    fn names(a: &ProtoAlgorithm, vs: &BTreeSet<Value>) -> Vec<String> {
        vs.iter().map(|v| a.interpretation().name(*v).to_string()).collect()
    }

    #[test]
    fn countdown_computes_constant_zero() {
        let a = load(countdown(3));
        let f = computed_function(&a, DEFAULT_STATE_CAP).unwrap();
        assert_eq!(f.entries.len(), 4);
        for (_, e) in &f.entries {
            match e {
                Entry::Defined(out) => assert_eq!(names(&a, out), ["0"]),
                other => panic!("undefined entry {other:?}"),
            }
        }
    }

    #[test]
    fn lifted_handoff_diverges_with_partial_outputs() {
        let a = load(handoff(2));
        let f = computed_function(&a, DEFAULT_STATE_CAP).unwrap();
        let zero = a.interpretation().value("0").unwrap();
        let one = a.interpretation().value("1").unwrap();
        match f.get(zero).unwrap() {
            Entry::Undefined {
                reason: UndefinedReason::Divergent(run),
                partial_outputs,
            } => {
                assert!(partial_outputs.is_empty());
                let Terminal::Lasso { cycle_start } = run.terminal else { panic!() };
                assert_eq!(run.states.last(), Some(&run.states[cycle_start]));
            }
            other => panic!("{other:?}"),
        }
        match f.get(one).unwrap() {
            Entry::Undefined {
                reason: UndefinedReason::Divergent(_),
                partial_outputs,
            } => assert_eq!(names(&a, partial_outputs), ["2"]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn strict_handoff_worker_states_are_stuck() {
        let a = load(with_policy(handoff(2), BottomPolicy::Strict));
        let one = a.interpretation().value("1").unwrap();
        let g = build_state_graph(&a, Variant::Algorithmic, Some(&[one]), DEFAULT_STATE_CAP).unwrap();
        let start = g.index_of(&State::initial(one)).unwrap();
        let reach = g.reachable_from(&[start]);
        let worker: Vec<usize> = (0..g.len())
            .filter(|&i| reach[i])
            .filter(|&i| g.state(i).control.as_ref().is_some_and(|c| c.sched == Some(1)))
            .collect();
        assert!(!worker.is_empty());
        for i in worker {
            assert!(algorithmic_step(&a, g.state(i)).is_empty());
        }
        let f = computed_function(&a, DEFAULT_STATE_CAP).unwrap();
        assert!(matches!(
            f.get(one),
            Some(Entry::Undefined {
                reason: UndefinedReason::Stuck(_),
                ..
            })
        ));
    }
}
