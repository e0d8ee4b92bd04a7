use std::collections::{BTreeSet, HashMap, HashSet};

use serde::Serialize;

use super::error::EquivalenceError;
use crate::model::{ProtoAlgorithm, State, StateKind, Value};
use crate::semantics::{build_state_graph, step, StateGraph, Variant};

/// Upper bound on `|S_A| * |S_A'|` for relation computations.
pub const DEFAULT_PAIR_CAP: u128 = 400_000_000;

/// Which of the two models a diagnostic refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// A set of state pairs, read as relating states of the left model to states
/// of the right one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimulationRelation {
    pub variant: Variant,
    pub pairs: BTreeSet<(State, State)>,
}

impl SimulationRelation {
    pub fn inverse(&self) -> SimulationRelation {
        SimulationRelation {
            variant: self.variant,
            pairs: self.pairs.iter().map(|(a, b)| (b.clone(), a.clone())).collect(),
        }
    }

    pub fn contains(&self, s: &State, t: &State) -> bool {
        self.pairs.contains(&(s.clone(), t.clone()))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn union(&self, other: &SimulationRelation) -> SimulationRelation {
        SimulationRelation {
            variant: self.variant,
            pairs: self.pairs.union(&other.pairs).cloned().collect(),
        }
    }
}

/// A coverage clause that the greatest relation fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoverageFailure {
    /// An initial state of `side` is related to no initial state.
    Initial { side: Side, state: State },
    /// A final state of `side` is related to no final state.
    Final { side: Side, state: State },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    Simulation,
    Equivalence,
}

/// Outcome of a simulation or equivalence check. `relation` is the greatest
/// relation satisfying transfer and kind preservation (in both directions for
/// equivalence); the verdict additionally requires every coverage clause.
#[derive(Clone, Debug)]
pub struct EquivalenceReport {
    pub check: Check,
    pub variant: Variant,
    pub verdict: bool,
    pub relation: SimulationRelation,
    pub failures: Vec<CoverageFailure>,
    /// Input translation: each left input to the least related right input.
    pub gamma_i: Vec<(Value, Value)>,
    /// Output translation: each right output to the least related left output.
    pub gamma_o: Vec<(Value, Value)>,
    pub states: (usize, usize),
}

struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Bits {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
    fn set(&mut self, i: usize, v: bool) {
        if v {
            self.0[i / 64] |= 1 << (i % 64);
        } else {
            self.0[i / 64] &= !(1 << (i % 64));
        }
    }
}

fn predecessors(g: &StateGraph) -> Vec<Vec<usize>> {
    let mut pred = vec![Vec::new(); g.len()];
    for s in 0..g.len() {
        for &t in g.successors(s) {
            pred[t].push(s);
        }
    }
    pred
}

/// Greatest relation between the states of `g` and `h` that preserves kinds
/// and satisfies transfer from `g` to `h` (and from `h` to `g` when
/// `symmetric`). Pairs failing transfer are removed, and their predecessor
/// pairs re-examined, until nothing changes.
fn greatest_relation(g: &StateGraph, h: &StateGraph, symmetric: bool, cap: u128) -> Result<Bits, EquivalenceError> {
    let (n, m) = (g.len(), h.len());
    let pairs = n as u128 * m as u128;
    if pairs > cap {
        return Err(EquivalenceError::TooManyPairs { pairs, cap });
    }
    let idx = |i: usize, j: usize| i * m + j;
    let mut rel = Bits::new(n * m);
    for i in 0..n {
        for j in 0..m {
            rel.set(idx(i, j), g.kind(i) == h.kind(j));
        }
    }
    let pred_g = predecessors(g);
    let pred_h = predecessors(h);

    let holds = |rel: &Bits, i: usize, j: usize| -> bool {
        let fwd = g
            .successors(i)
            .iter()
            .all(|&t| h.successors(j).iter().any(|&u| rel.get(idx(t, u))));
        fwd && (!symmetric
            || h
                .successors(j)
                .iter()
                .all(|&u| g.successors(i).iter().any(|&t| rel.get(idx(t, u)))))
    };

    let mut queued = Bits::new(n * m);
    let mut stack: Vec<(usize, usize)> = Vec::new();
    let remove = |rel: &mut Bits, queued: &mut Bits, stack: &mut Vec<(usize, usize)>, i: usize, j: usize| {
        rel.set(idx(i, j), false);
        for &s in &pred_g[i] {
            for &t in &pred_h[j] {
                let p = idx(s, t);
                if rel.get(p) && !queued.get(p) {
                    queued.set(p, true);
                    stack.push((s, t));
                }
            }
        }
    };
    for i in 0..n {
        for j in 0..m {
            if rel.get(idx(i, j)) && !holds(&rel, i, j) {
                remove(&mut rel, &mut queued, &mut stack, i, j);
            }
        }
    }
    while let Some((i, j)) = stack.pop() {
        queued.set(idx(i, j), false);
        if rel.get(idx(i, j)) && !holds(&rel, i, j) {
            remove(&mut rel, &mut queued, &mut stack, i, j);
        }
    }
    Ok(rel)
}

/// Greatest algorithmic or computational simulation of `a` by `b`, checked
/// against the coverage clauses. Only states reachable from initial states,
/// plus all final states, are considered: successors of reachable states are
/// reachable and the coverage clauses only name initial and final states, so
/// a simulation over all states exists iff one exists over this part.
pub fn greatest_simulation(
    a: &ProtoAlgorithm,
    b: &ProtoAlgorithm,
    variant: Variant,
    state_cap: usize,
) -> Result<EquivalenceReport, EquivalenceError> {
    relate(a, b, variant, Check::Simulation, state_cap, DEFAULT_PAIR_CAP)
}

/// Greatest relation `R` such that `R` is a simulation of `a` by `b` and its
/// inverse one of `b` by `a`, checked against all four coverage clauses.
pub fn check_equivalence(
    a: &ProtoAlgorithm,
    b: &ProtoAlgorithm,
    variant: Variant,
    state_cap: usize,
) -> Result<EquivalenceReport, EquivalenceError> {
    relate(a, b, variant, Check::Equivalence, state_cap, DEFAULT_PAIR_CAP)
}

pub fn relate(
    a: &ProtoAlgorithm,
    b: &ProtoAlgorithm,
    variant: Variant,
    check: Check,
    state_cap: usize,
    pair_cap: u128,
) -> Result<EquivalenceReport, EquivalenceError> {
    let g = build_state_graph(a, variant, None, state_cap)?;
    let h = build_state_graph(b, variant, None, state_cap)?;
    let symmetric = check == Check::Equivalence;
    let rel = greatest_relation(&g, &h, symmetric, pair_cap)?;
    let m = h.len();
    let related = |i: usize, j: usize| rel.get(i * m + j);

    let mut failures = Vec::new();
    for i in g.initial_states() {
        if !h.initial_states().any(|j| related(i, j)) {
            failures.push(CoverageFailure::Initial {
                side: Side::Left,
                state: g.state(i).clone(),
            });
        }
    }
    for j in h.final_states() {
        if !g.final_states().any(|i| related(i, j)) {
            failures.push(CoverageFailure::Final {
                side: Side::Right,
                state: h.state(j).clone(),
            });
        }
    }
    if symmetric {
        for j in h.initial_states() {
            if !g.initial_states().any(|i| related(i, j)) {
                failures.push(CoverageFailure::Initial {
                    side: Side::Right,
                    state: h.state(j).clone(),
                });
            }
        }
        for i in g.final_states() {
            if !h.final_states().any(|j| related(i, j)) {
                failures.push(CoverageFailure::Final {
                    side: Side::Left,
                    state: g.state(i).clone(),
                });
            }
        }
    }

    let mut pairs = BTreeSet::new();
    for i in 0..g.len() {
        for j in 0..m {
            if related(i, j) {
                pairs.insert((g.state(i).clone(), h.state(j).clone()));
            }
        }
    }
    let relation = SimulationRelation { variant, pairs };
    let (gamma_i, gamma_o) = translations(&relation);
    Ok(EquivalenceReport {
        check,
        variant,
        verdict: failures.is_empty(),
        relation,
        failures,
        gamma_i,
        gamma_o,
        states: (g.len(), h.len()),
    })
}

/// Least related partners among initial and final pairs, in canonical order.
/// A finite map between data values, as sorted pairs.
pub type ValueMap = Vec<(Value, Value)>;

pub fn translations(r: &SimulationRelation) -> (ValueMap, ValueMap) {
    let mut gi: Vec<(Value, Value)> = Vec::new();
    let mut go: HashMap<Value, Value> = HashMap::new();
    for (s, t) in &r.pairs {
        if let (Some(x), Some(y)) = (s.input, t.input) {
            if gi.last().map(|p| p.0) != Some(x) {
                gi.push((x, y));
            }
        }
        if let (Some(x), Some(y)) = (s.output, t.output) {
            let e = go.entry(y).or_insert(x);
            if x < *e {
                *e = x;
            }
        }
    }
    let mut go: Vec<(Value, Value)> = go.into_iter().collect();
    go.sort();
    (gi, go)
}

/// Checks the simulation clauses for `r` directly against the step functions
/// of `a` and `b`, independently of the state graphs used to compute it.
pub fn verify_simulation(
    a: &ProtoAlgorithm,
    b: &ProtoAlgorithm,
    r: &SimulationRelation,
) -> Result<(), String> {
    let set: HashSet<(&State, &State)> = r.pairs.iter().map(|(s, t)| (s, t)).collect();
    let mut partners: HashMap<&State, Vec<&State>> = HashMap::new();
    for (s, t) in &r.pairs {
        partners.entry(s).or_default().push(t);
    }
    for (s, t) in &r.pairs {
        if s.kind() != t.kind() {
            return Err(format!("pair of a {:?} and a {:?} state", s.kind(), t.kind()));
        }
        let next_t = step(b, t, r.variant);
        for s2 in step(a, s, r.variant) {
            if !next_t.iter().any(|t2| set.contains(&(&s2, t2))) {
                return Err(format!(
                    "transfer fails: {} -> {} has no matching step from {}",
                    s.render(a),
                    s2.render(a),
                    t.render(b)
                ));
            }
        }
    }
    for &d in a.interpretation().input_domain() {
        let s = State::initial(d);
        let ok = partners
            .get(&s)
            .is_some_and(|ts| ts.iter().any(|t| t.kind() == StateKind::Initial));
        if !ok {
            return Err(format!("initial state {} is not covered", s.render(a)));
        }
    }
    let finals: HashSet<&State> = r
        .pairs
        .iter()
        .filter(|(s, t)| s.is_final() && t.is_final())
        .map(|(_, t)| t)
        .collect();
    for &d in b.interpretation().output_domain() {
        let t = State::final_(d);
        if !finals.contains(&t) {
            return Err(format!("final state {} is not covered", t.render(b)));
        }
    }
    Ok(())
}

/// Checks that `r` witnesses equivalence: `r` simulates `a` by `b` and its
/// exact inverse simulates `b` by `a`.
pub fn verify_equivalence(
    a: &ProtoAlgorithm,
    b: &ProtoAlgorithm,
    r: &SimulationRelation,
) -> Result<(), String> {
    verify_simulation(a, b, r)?;
    verify_simulation(b, a, &r.inverse()).map_err(|e| format!("inverse: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{countdown, countdown_double_test, countdown_unrolled, handoff};
    use crate::model::{validate_proto_algorithm, RawModel, ValidationLevel};
    use crate::semantics::DEFAULT_STATE_CAP;

    fn load(raw: RawModel) -> ProtoAlgorithm {
        validate_proto_algorithm(&raw, ValidationLevel::Strict).unwrap()
    }

    #[test]
    fn identity_pairs_are_in_the_greatest_self_simulation() {
        let a = load(countdown(3));
        let r = greatest_simulation(&a, &a, Variant::Algorithmic, DEFAULT_STATE_CAP).unwrap();
        assert!(r.verdict);
        let g = build_state_graph(&a, Variant::Algorithmic, None, DEFAULT_STATE_CAP).unwrap();
        for s in g.states() {
            assert!(r.relation.contains(s, s));
        }
        verify_simulation(&a, &a, &r.relation).unwrap();
    }

    #[test]
    fn unrolled_countdown_is_equivalent() {
        let a = load(countdown(3));
        let b = load(countdown_unrolled(3));
        for variant in [Variant::Algorithmic, Variant::Computational] {
            let r = check_equivalence(&a, &b, variant, DEFAULT_STATE_CAP).unwrap();
            assert!(r.verdict, "{variant}");
            verify_equivalence(&a, &b, &r.relation).unwrap();
        }
    }

    #[test]
    fn redundant_test_separates_the_variants() {
        let a = load(countdown(3));
        let b = load(countdown_double_test(3));
        let alg = check_equivalence(&a, &b, Variant::Algorithmic, DEFAULT_STATE_CAP).unwrap();
        assert!(!alg.verdict);
        assert!(!greatest_simulation(&a, &b, Variant::Algorithmic, DEFAULT_STATE_CAP).unwrap().verdict);
        let comp = check_equivalence(&a, &b, Variant::Computational, DEFAULT_STATE_CAP).unwrap();
        assert!(comp.verdict);
        verify_equivalence(&a, &b, &comp.relation).unwrap();
        assert!(greatest_simulation(&a, &b, Variant::Computational, DEFAULT_STATE_CAP).unwrap().verdict);
    }

    #[test]
    fn countdown_and_handoff_are_not_equivalent() {
        let a = load(countdown(3));
        let b = load(handoff(2));
        for variant in [Variant::Algorithmic, Variant::Computational] {
            let r = check_equivalence(&a, &b, variant, DEFAULT_STATE_CAP).unwrap();
            assert!(!r.verdict);
            assert!(!r.failures.is_empty());
        }
    }

    #[test]
    fn inverse_of_inverse_is_identity() {
        let a = load(countdown(2));
        let r = check_equivalence(&a, &a, Variant::Algorithmic, DEFAULT_STATE_CAP).unwrap();
        assert_eq!(r.relation.inverse().inverse(), r.relation);
    }
}
