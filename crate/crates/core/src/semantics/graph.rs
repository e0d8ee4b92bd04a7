use std::collections::{HashMap, VecDeque};

use super::error::SemanticsError;
use super::step::{step, Variant};
use crate::model::{ProtoAlgorithm, State, StateKind, Value};

pub const DEFAULT_STATE_CAP: usize = 1_000_000;

/// The part of the state transition graph reachable from a set of initial
/// states, together with every final state. States are numbered in canonical
/// order.
#[derive(Clone, Debug)]
pub struct StateGraph {
    variant: Variant,
    states: Vec<State>,
    index: HashMap<State, usize>,
    succ: Vec<Vec<usize>>,
}

impl StateGraph {
    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &State {
        &self.states[i]
    }

    pub fn index_of(&self, s: &State) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn successors(&self, i: usize) -> &[usize] {
        &self.succ[i]
    }

    pub fn kind(&self, i: usize) -> StateKind {
        self.states[i].kind()
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn initial_states(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| self.kind(i) == StateKind::Initial)
    }

    pub fn final_states(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| self.kind(i) == StateKind::Final)
    }

    /// States without successors.
    pub fn stuck_states(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| self.succ[i].is_empty())
    }

    /// States reachable from `start` (inclusive), as a membership vector.
    pub fn reachable_from(&self, start: &[usize]) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut stack: Vec<usize> = start.to_vec();
        for &s in start {
            seen[s] = true;
        }
        while let Some(s) = stack.pop() {
            for &t in &self.succ[s] {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }
}

/// Explores the graph from the initial states of `inputs` (every input value
/// when `None`) and adds all final states. Fails once more than `cap` states
/// have been discovered.
pub fn build_state_graph(
    a: &ProtoAlgorithm,
    variant: Variant,
    inputs: Option<&[Value]>,
    cap: usize,
) -> Result<StateGraph, SemanticsError> {
    let interp = a.interpretation();
    let inputs = inputs.unwrap_or(interp.input_domain());
    let mut found: HashMap<State, usize> = HashMap::new();
    let mut states: Vec<State> = Vec::new();
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::new();

    let mut intern = |s: State, states: &mut Vec<State>, queue: &mut VecDeque<usize>| {
        if let Some(&i) = found.get(&s) {
            return Ok(i);
        }
        if states.len() >= cap {
            return Err(SemanticsError::ResourceBoundExceeded { cap });
        }
        let i = states.len();
        found.insert(s.clone(), i);
        states.push(s);
        queue.push_back(i);
        Ok(i)
    };

    let starts = inputs
        .iter()
        .map(|&v| State::initial(v))
        .chain(interp.output_domain().iter().map(|&v| State::final_(v)));
    for s in starts {
        intern(s, &mut states, &mut queue)?;
    }
    while let Some(i) = queue.pop_front() {
        let next = step(a, &states[i], variant);
        let mut ids = Vec::with_capacity(next.len());
        for t in next {
            ids.push(intern(t, &mut states, &mut queue)?);
        }
        if succ.len() <= i {
            succ.resize(i + 1, Vec::new());
        }
        succ[i] = ids;
    }
    succ.resize(states.len(), Vec::new());

    // Renumber in canonical order.
    let mut order: Vec<usize> = (0..states.len()).collect();
    order.sort_by(|&x, &y| states[x].cmp(&states[y]));
    let mut rank = vec![0; states.len()];
    for (r, &old) in order.iter().enumerate() {
        rank[old] = r;
    }
    let mut new_states = Vec::with_capacity(states.len());
    let mut new_succ = Vec::with_capacity(states.len());
    for &old in &order {
        new_states.push(states[old].clone());
        let mut s: Vec<usize> = succ[old].iter().map(|&t| rank[t]).collect();
        s.sort_unstable();
        new_succ.push(s);
    }
    let index = new_states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i))
        .collect();
    Ok(StateGraph {
        variant,
        states: new_states,
        index,
        succ: new_succ,
    })
}
