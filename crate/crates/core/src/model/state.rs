use serde::Serialize;

use super::error::ModelError;
use super::graph::Vertex;
use super::interp::{Slot, Value};
use super::proto::ProtoAlgorithm;
use super::raw::{RawControl, RawState};

/// The control part of a non-dummy state: per-component control vertices and
/// private data, the shared datum, and the index of the component that makes
/// the next step (0-based here, 1-based in documents).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Control {
    pub vertices: Vec<Option<Vertex>>,
    pub privs: Vec<Slot>,
    pub shared: Slot,
    pub sched: Option<u32>,
}

/// A state `(d_i, c, d_o)`; `control: None` is the all-dummy control tuple.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State {
    pub input: Slot,
    pub control: Option<Control>,
    pub output: Slot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum StateKind {
    Initial,
    Internal,
    Final,
}

impl State {
    pub fn initial(input: Value) -> State {
        State {
            input: Some(input),
            control: None,
            output: None,
        }
    }

    pub fn final_(output: Value) -> State {
        State {
            input: None,
            control: None,
            output: Some(output),
        }
    }

    pub fn internal(control: Control) -> State {
        State {
            input: None,
            control: Some(control),
            output: None,
        }
    }

    pub fn kind(&self) -> StateKind {
        if self.input.is_some() {
            StateKind::Initial
        } else if self.output.is_some() {
            StateKind::Final
        } else {
            StateKind::Internal
        }
    }

    pub fn is_final(&self) -> bool {
        self.output.is_some()
    }

    /// Checks the two state clauses relating the input, control and output
    /// slots.
    pub fn well_formed(&self) -> Result<(), String> {
        match &self.control {
            None => {
                if self.input.is_none() == self.output.is_none() {
                    Err("with the dummy control tuple exactly one of input and output must be a proper value".into())
                } else {
                    Ok(())
                }
            }
            Some(_) => {
                if self.input.is_some() || self.output.is_some() {
                    Err("with a proper control tuple both input and output must be the dummy value".into())
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Renders the state with model names, e.g.
    /// `(_bot, ((v1), (2), _bot, 1), _bot)`.
    pub fn render(&self, a: &ProtoAlgorithm) -> String {
        let i = a.interpretation();
        let ctl = match &self.control {
            None => "_bot_c".to_string(),
            Some(c) => {
                let vs: Vec<&str> = c
                    .vertices
                    .iter()
                    .enumerate()
                    .map(|(k, v)| v.map_or("_bot", |v| a.components()[k].id(v)))
                    .collect();
                let ds: Vec<&str> = c.privs.iter().map(|d| i.slot_name(*d)).collect();
                let sched = c.sched.map_or("_bot".to_string(), |j| (j + 1).to_string());
                format!(
                    "(({}), ({}), {}, {})",
                    vs.join(", "),
                    ds.join(", "),
                    i.slot_name(c.shared),
                    sched
                )
            }
        };
        format!("({}, {}, {})", i.slot_name(self.input), ctl, i.slot_name(self.output))
    }

    pub fn to_raw(&self, a: &ProtoAlgorithm) -> RawState {
        let i = a.interpretation();
        let name = |s: Slot| s.map(|v| i.name(v).to_string());
        RawState {
            input: name(self.input),
            control: self.control.as_ref().map(|c| RawControl {
                vertices: c
                    .vertices
                    .iter()
                    .enumerate()
                    .map(|(k, v)| v.map(|v| a.components()[k].id(v).to_string()))
                    .collect(),
                privs: c.privs.iter().map(|d| name(*d)).collect(),
                shared: name(c.shared),
                sched: c.sched.map(|j| j as usize + 1),
            }),
            output: name(self.output),
        }
    }
}

fn ill(clause: impl Into<String>) -> ModelError {
    ModelError::IllFormedState {
        clause: clause.into(),
    }
}

/// Resolves a raw state against a model and classifies it.
pub fn classify_state(a: &ProtoAlgorithm, raw: &RawState) -> Result<(State, StateKind), ModelError> {
    let interp = a.interpretation();
    let resolve = |tok: &Option<String>, dom: &str, member: &dyn Fn(Value) -> bool| -> Result<Slot, ModelError> {
        match tok {
            None => Ok(None),
            Some(t) => match interp.value(t) {
                Some(v) if member(v) => Ok(Some(v)),
                _ => Err(ill(format!("`{t}` is not in the {dom} domain"))),
            },
        }
    };
    let input = resolve(&raw.input, "input", &|v| interp.in_input(v))?;
    let output = resolve(&raw.output, "output", &|v| interp.in_output(v))?;
    let n = a.components().len();
    let control = match &raw.control {
        None => None,
        Some(c) => {
            if c.vertices.len() != n || c.privs.len() != n {
                return Err(ill(format!("control tuple must have {n} vertices and {n} private slots")));
            }
            let mut vertices = Vec::with_capacity(n);
            for (k, v) in c.vertices.iter().enumerate() {
                vertices.push(match v {
                    None => None,
                    Some(id) => Some(
                        a.components()[k]
                            .vertex(id)
                            .ok_or_else(|| ill(format!("`{id}` is not a vertex of component {}", k + 1)))?,
                    ),
                });
            }
            let mut privs = Vec::with_capacity(n);
            for d in &c.privs {
                privs.push(resolve(d, "main", &|v| interp.in_main(v))?);
            }
            let shared = resolve(&c.shared, "main", &|v| interp.in_main(v))?;
            let sched = match c.sched {
                None => None,
                Some(j) if (1..=n).contains(&j) => Some(j as u32 - 1),
                Some(j) => return Err(ill(format!("scheduled index {j} outside 1..{n}"))),
            };
            let ctl = Control {
                vertices,
                privs,
                shared,
                sched,
            };
            let all_bot = ctl.vertices.iter().all(Option::is_none)
                && ctl.privs.iter().all(Option::is_none)
                && ctl.shared.is_none()
                && ctl.sched.is_none();
            (!all_bot).then_some(ctl)
        }
    };
    let s = State {
        input,
        control,
        output,
    };
    s.well_formed().map_err(ill)?;
    let kind = s.kind();
    Ok((s, kind))
}
