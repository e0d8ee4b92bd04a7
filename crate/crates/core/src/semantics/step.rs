use serde::{Deserialize, Serialize};

use crate::model::{Control, ProtoAlgorithm, State, SymbolKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Every step, including condition inspections.
    Algorithmic,
    /// Condition-inspection steps are concealed.
    Computational,
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::Algorithmic => "algorithmic",
            Variant::Computational => "computational",
        })
    }
}

/// Successors of `s` under the algorithmic step function, sorted and
/// duplicate-free. An empty result means `s` is stuck: under the strict
/// dummy-value policy a scheduled component whose operands are not all
/// proper values has no step.
pub fn algorithmic_step(a: &ProtoAlgorithm, s: &State) -> Vec<State> {
    let mut out = raw_step(a, s);
    out.sort_unstable();
    out.dedup();
    out
}

/// Successors of `s` under the computational step function: a state whose
/// scheduled component sits at a predicate vertex is replaced by the state
/// reached after its (deterministic) chain of condition inspections.
pub fn computational_step(a: &ProtoAlgorithm, s: &State) -> Vec<State> {
    let mut cur = s.clone();
    // Terminates: a chain of inspections by one component follows predicate
    // vertices only, and no cycle of the graph is all-predicate.
    while let Some(next) = inspect(a, &cur) {
        match next {
            Some(t) => cur = t,
            None => return Vec::new(),
        }
    }
    algorithmic_step(a, &cur)
}

pub fn step(a: &ProtoAlgorithm, s: &State, variant: Variant) -> Vec<State> {
    match variant {
        Variant::Algorithmic => algorithmic_step(a, s),
        Variant::Computational => computational_step(a, s),
    }
}

/// If the scheduled component of `s` is at a predicate vertex, the state
/// after the inspection (`Some(None)` when the test does not fire).
fn inspect(a: &ProtoAlgorithm, s: &State) -> Option<Option<State>> {
    let c = s.control.as_ref()?;
    let i = c.sched? as usize;
    let v = c.vertices[i]?;
    let g = &a.components()[i];
    let label = g.label(v);
    if a.alphabet().kind(label) != SymbolKind::Predicate {
        return None;
    }
    let Some(bit) = a.interpretation().test(label, c.privs[i]) else {
        return Some(None);
    };
    let target = g.successors(v).iter().find(|(_, l)| *l == Some(bit))?.0;
    let mut next = c.clone();
    next.vertices[i] = Some(target);
    Some(Some(State::internal(next)))
}

fn raw_step(a: &ProtoAlgorithm, s: &State) -> Vec<State> {
    if s.well_formed().is_err() {
        return Vec::new();
    }
    let interp = a.interpretation();
    let alphabet = a.alphabet();
    let n = a.components().len();

    if s.is_final() {
        return vec![s.clone()];
    }
    if let Some(input) = s.input {
        let m = a.main_index();
        let g = &a.components()[m];
        let d = interp.ini(input);
        let roots: Vec<_> = a.components().iter().map(|g| Some(g.root())).collect();
        let mut out = Vec::with_capacity(g.outdegree(g.root()) * n);
        for &(v, _) in g.successors(g.root()) {
            for j in 0..n {
                let mut vertices = roots.clone();
                vertices[m] = Some(v);
                let mut privs = vec![None; n];
                privs[m] = Some(d);
                out.push(State::internal(Control {
                    vertices,
                    privs,
                    shared: None,
                    sched: Some(j as u32),
                }));
            }
        }
        return out;
    }

    let Some(c) = &s.control else {
        return Vec::new();
    };
    let Some(i) = c.sched.map(|i| i as usize) else {
        return Vec::new();
    };
    let Some(v) = c.vertices[i] else {
        return Vec::new();
    };
    let g = &a.components()[i];
    let f = g.label(v);

    if f == alphabet.fin() {
        return match interp.unary(f, c.privs[i]) {
            Some(Some(o)) => vec![State::final_(o)],
            _ => Vec::new(),
        };
    }
    if f == alphabet.ini() {
        // `ini` only fires from initial states.
        return Vec::new();
    }

    let fan_out = |update: &dyn Fn(&mut Control)| -> Vec<State> {
        let mut out = Vec::with_capacity(g.outdegree(v) * n);
        for &(w, _) in g.successors(v) {
            for j in 0..n {
                let mut next = c.clone();
                next.vertices[i] = Some(w);
                next.sched = Some(j as u32);
                update(&mut next);
                out.push(State::internal(next));
            }
        }
        out
    };

    match alphabet.kind(f) {
        SymbolKind::Processing => match interp.unary(f, c.privs[i]) {
            Some(r) => fan_out(&|next| next.privs[i] = r),
            None => Vec::new(),
        },
        SymbolKind::Setting => match interp.binary(f, c.privs[i], c.shared) {
            Some(r) => fan_out(&|next| next.shared = r),
            None => Vec::new(),
        },
        SymbolKind::Getting => match interp.binary(f, c.privs[i], c.shared) {
            Some(r) => fan_out(&|next| next.privs[i] = r),
            None => Vec::new(),
        },
        SymbolKind::Predicate => match inspect(a, s) {
            Some(Some(t)) => vec![t],
            _ => Vec::new(),
        },
    }
}
