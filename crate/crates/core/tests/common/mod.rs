//! Shared fixtures and independent oracles for the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::path::PathBuf;

use protoalg::gen::{self, RandomSpec};
use protoalg::io::parse_model;
use protoalg::model::{
    validate_proto_algorithm, Control, ProtoAlgorithm, RawModel, State, StateKind, SymbolKind,
    ValidationLevel, Value,
};
use protoalg::semantics::{algorithmic_step, step, Variant};
use rand::rngs::StdRng;
use rand::SeedableRng;

pub const FIXTURES: [&str; 4] = ["f1", "f1_unrolled", "f1_prime", "f2"];

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(format!("{name}.json"))
}

/// The generator call each fixture file was written from.
pub fn generated(name: &str) -> RawModel {
    match name {
        "f1" => gen::countdown(3),
        "f1_unrolled" => gen::countdown_unrolled(3),
        "f1_prime" => gen::countdown_double_test(3),
        "f2" => gen::handoff(2),
        _ => panic!("no fixture {name}"),
    }
}

pub fn raw_fixture(name: &str) -> RawModel {
    let text = std::fs::read_to_string(fixture_path(name)).expect("fixture file");
    parse_model(&text).expect("fixture parses")
}

pub fn fixture(name: &str) -> ProtoAlgorithm {
    valid(&raw_fixture(name))
}

pub fn valid(raw: &RawModel) -> ProtoAlgorithm {
    validate_proto_algorithm(raw, ValidationLevel::Strict).unwrap_or_else(|e| panic!("invalid model: {e:?}"))
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// `count` random models cycling through 1-, 2- and 3-component shapes.
pub fn random_models(seed: u64, count: usize) -> Vec<ProtoAlgorithm> {
    let mut r = rng(seed);
    (0..count)
        .map(|k| {
            let spec = match k % 4 {
                0 => RandomSpec::default(),
                1 => RandomSpec {
                    components: 2,
                    vertices: (2, 3),
                    domain: 3,
                    shared: true,
                    ..RandomSpec::default()
                },
                2 => RandomSpec {
                    nondeterministic: true,
                    ..RandomSpec::default()
                },
                _ => RandomSpec {
                    components: 3,
                    vertices: (1, 3),
                    domain: 2,
                    shared: true,
                    ..RandomSpec::default()
                },
            };
            valid(&gen::random_model(&mut r, &spec))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Step oracle: the seven rules written out directly against the accessors.

pub fn oracle_successors(a: &ProtoAlgorithm, s: &State) -> BTreeSet<State> {
    let mut out = BTreeSet::new();
    let n = a.components().len();
    let interp = a.interpretation();
    let alpha = a.alphabet();
    match (&s.input, &s.control, &s.output) {
        (None, None, Some(_)) => {
            out.insert(s.clone());
        }
        (Some(d), None, None) => {
            let m = a.main_index();
            let g = &a.components()[m];
            for &(v, _) in g.successors(g.root()) {
                for j in 0..n {
                    let mut vertices: Vec<_> = a.components().iter().map(|g| Some(g.root())).collect();
                    vertices[m] = Some(v);
                    let mut privs = vec![None; n];
                    privs[m] = Some(interp.ini(*d));
                    out.insert(State::internal(Control {
                        vertices,
                        privs,
                        shared: None,
                        sched: Some(j as u32),
                    }));
                }
            }
        }
        (None, Some(c), None) => {
            let Some(i) = c.sched.map(|i| i as usize) else { return out };
            let Some(v) = c.vertices[i] else { return out };
            let g = &a.components()[i];
            let f = g.label(v);
            if f == alpha.fin() {
                if let Some(Some(o)) = interp.unary(f, c.privs[i]) {
                    out.insert(State::final_(o));
                }
                return out;
            }
            let advance = |c: &Control, to, j: usize| {
                let mut c = c.clone();
                c.vertices[i] = Some(to);
                c.sched = Some(j as u32);
                c
            };
            match alpha.kind(f) {
                SymbolKind::Predicate => {
                    if let Some(b) = interp.test(f, c.privs[i]) {
                        for &(w, l) in g.successors(v) {
                            if l == Some(b) {
                                out.insert(State::internal(advance(c, w, i)));
                            }
                        }
                    }
                }
                kind => {
                    let updated = match kind {
                        SymbolKind::Processing => interp.unary(f, c.privs[i]).map(|r| {
                            let mut c = c.clone();
                            c.privs[i] = r;
                            c
                        }),
                        SymbolKind::Setting => interp.binary(f, c.privs[i], c.shared).map(|r| {
                            let mut c = c.clone();
                            c.shared = r;
                            c
                        }),
                        SymbolKind::Getting => interp.binary(f, c.privs[i], c.shared).map(|r| {
                            let mut c = c.clone();
                            c.privs[i] = r;
                            c
                        }),
                        SymbolKind::Predicate => unreachable!(),
                    };
                    if let Some(c) = updated {
                        for &(w, _) in g.successors(v) {
                            for j in 0..n {
                                out.insert(State::internal(advance(&c, w, j)));
                            }
                        }
                    }
                }
            }
        }
        _ => {}
    }
    out
}

/// Computational successors derived from the algorithmic ones: follow the
/// predicate advances of the scheduled component, then take one step.
pub fn predicate_closure_oracle(a: &ProtoAlgorithm, s: &State) -> BTreeSet<State> {
    let mut cur = s.clone();
    loop {
        let at_predicate = cur.control.as_ref().is_some_and(|c| {
            c.sched.is_some_and(|i| {
                let i = i as usize;
                c.vertices[i].is_some_and(|v| {
                    a.alphabet().kind(a.components()[i].label(v)) == SymbolKind::Predicate
                })
            })
        });
        if !at_predicate {
            return algorithmic_step(a, &cur).into_iter().collect();
        }
        let next = algorithmic_step(a, &cur);
        match next.len() {
            0 => return BTreeSet::new(),
            1 => cur = next.into_iter().next().unwrap(),
            k => panic!("predicate advance with {k} successors"),
        }
    }
}

/// Every initial state, everything reachable from them, and every final
/// state, in breadth-first order.
pub fn explored_states(a: &ProtoAlgorithm, variant: Variant) -> Vec<State> {
    let interp = a.interpretation();
    let mut seen: BTreeSet<State> = BTreeSet::new();
    let mut order = Vec::new();
    let mut queue: VecDeque<State> = interp.input_domain().iter().map(|d| State::initial(*d)).collect();
    for s in &queue {
        seen.insert(s.clone());
    }
    while let Some(s) = queue.pop_front() {
        order.push(s.clone());
        for t in step(a, &s, variant) {
            if seen.insert(t.clone()) {
                queue.push_back(t);
            }
        }
    }
    for o in interp.output_domain() {
        let f = State::final_(*o);
        if seen.insert(f.clone()) {
            order.push(f);
        }
    }
    order
}

// ---------------------------------------------------------------------------
// Relation oracles.

pub struct Space {
    pub states: Vec<State>,
    pub succ: Vec<Vec<usize>>,
    pub kind: Vec<StateKind>,
}

impl Space {
    pub fn new(a: &ProtoAlgorithm, variant: Variant) -> Space {
        let states = explored_states(a, variant);
        let index: HashMap<&State, usize> = states.iter().enumerate().map(|(k, s)| (s, k)).collect();
        let succ = states
            .iter()
            .map(|s| step(a, s, variant).iter().map(|t| index[t]).collect())
            .collect();
        let kind = states.iter().map(State::kind).collect();
        Space { states, succ, kind }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    fn of_kind(&self, k: StateKind) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&i| self.kind[i] == k)
    }
}

/// Coverage: with `both`, every initial and final state on each side is
/// related; otherwise left initials and right finals.
pub fn covered(l: &Space, r: &Space, rel: &BTreeSet<(usize, usize)>, both: bool) -> bool {
    let left = |k| l.of_kind(k).all(|i| rel.iter().any(|&(x, _)| x == i));
    let right = |k| r.of_kind(k).all(|j| rel.iter().any(|&(_, y)| y == j));
    left(StateKind::Initial)
        && right(StateKind::Final)
        && (!both || (left(StateKind::Final) && right(StateKind::Initial)))
}

fn transfers(l: &Space, r: &Space, rel: &BTreeSet<(usize, usize)>, bisim: bool) -> bool {
    rel.iter().all(|&(x, y)| {
        l.succ[x].iter().all(|&x2| r.succ[y].iter().any(|&y2| rel.contains(&(x2, y2))))
            && (!bisim || r.succ[y].iter().all(|&y2| l.succ[x].iter().any(|&x2| rel.contains(&(x2, y2)))))
    })
}

pub struct BruteForce {
    /// Union of every kind-respecting relation with the transfer property.
    pub greatest: BTreeSet<(usize, usize)>,
    /// Whether one of them also satisfies coverage.
    pub verdict: bool,
}

/// Tries every subset of the kind-respecting pairs. `None` when there are
/// more than `max_pairs` of them.
pub fn brute_force(l: &Space, r: &Space, bisim: bool, max_pairs: usize) -> Option<BruteForce> {
    let pairs: Vec<(usize, usize)> = (0..l.len())
        .flat_map(|x| (0..r.len()).map(move |y| (x, y)))
        .filter(|&(x, y)| l.kind[x] == r.kind[y])
        .collect();
    if pairs.len() > max_pairs {
        return None;
    }
    let mut greatest = BTreeSet::new();
    let mut verdict = false;
    for mask in 0u64..(1u64 << pairs.len()) {
        let rel: BTreeSet<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, p)| *p)
            .collect();
        if transfers(l, r, &rel, bisim) {
            verdict |= covered(l, r, &rel, bisim);
            greatest.extend(rel);
        }
    }
    Some(BruteForce { greatest, verdict })
}

/// Largest bisimulation between the two spaces by naive signature
/// refinement on their disjoint union.
pub fn partition_refinement(l: &Space, r: &Space) -> BTreeSet<(usize, usize)> {
    let nodes: Vec<(usize, usize)> = (0..l.len()).map(|x| (0, x)).chain((0..r.len()).map(|y| (1, y))).collect();
    let space = |side: usize| if side == 0 { l } else { r };
    let kind_rank = |k: StateKind| k as usize;
    let mut block: Vec<usize> = nodes.iter().map(|&(s, x)| kind_rank(space(s).kind[x])).collect();
    loop {
        let sigs: Vec<(usize, BTreeSet<usize>)> = nodes
            .iter()
            .enumerate()
            .map(|(k, &(s, x))| {
                let off = if s == 0 { 0 } else { l.len() };
                (block[k], space(s).succ[x].iter().map(|&t| block[off + t]).collect())
            })
            .collect();
        let mut ids: BTreeMap<&(usize, BTreeSet<usize>), usize> = BTreeMap::new();
        for sig in &sigs {
            let next = ids.len();
            ids.entry(sig).or_insert(next);
        }
        let refined: Vec<usize> = sigs.iter().map(|s| ids[s]).collect();
        let old = block.iter().collect::<BTreeSet<_>>().len();
        let new = ids.len();
        block = refined;
        if new == old {
            break;
        }
    }
    let mut rel = BTreeSet::new();
    for x in 0..l.len() {
        for y in 0..r.len() {
            if block[x] == block[l.len() + y] {
                rel.insert((x, y));
            }
        }
    }
    rel
}

pub fn index_relation(
    l: &Space,
    r: &Space,
    pairs: &BTreeSet<(State, State)>,
) -> BTreeSet<(usize, usize)> {
    let li: HashMap<&State, usize> = l.states.iter().enumerate().map(|(k, s)| (s, k)).collect();
    let ri: HashMap<&State, usize> = r.states.iter().enumerate().map(|(k, s)| (s, k)).collect();
    pairs.iter().map(|(s, t)| (li[s], ri[t])).collect()
}

// ---------------------------------------------------------------------------
// Run-enumeration oracle for computed functions.

/// Outputs of final runs, and whether some run is a lasso; `None` when the
/// input has a reachable stuck state.
pub fn run_oracle(a: &ProtoAlgorithm, input: Value, variant: Variant) -> Option<(BTreeSet<Value>, bool)> {
    use protoalg::semantics::{enumerate_runs, Terminal};
    let bound = explored_states(a, variant).len() + 1;
    let runs = enumerate_runs(a, input, variant, bound, usize::MAX).expect("enumeration");
    let mut outs = BTreeSet::new();
    let mut lasso = false;
    for r in &runs {
        match r.terminal {
            Terminal::Final => {
                outs.insert(r.output().expect("final runs have outputs"));
            }
            Terminal::Lasso { .. } => {
                assert!(r.output().is_none());
                lasso = true;
            }
            Terminal::Stuck => return None,
            Terminal::Cutoff => panic!("simple paths are shorter than the state count"),
        }
    }
    Some((outs, lasso))
}

// ---------------------------------------------------------------------------
// Single-edit mutations of the fixtures, one per structural clause.

use protoalg::model::{validate_alphabet, validate_component_graph, GraphClause, ModelError, RawEdge, RawGraph};

pub struct Mutation {
    pub name: &'static str,
    pub base: RawModel,
    pub mutated: RawModel,
    pub component: usize,
    /// Every error raised must satisfy this.
    pub expect: fn(&ModelError) -> bool,
}

fn edge<'g>(g: &'g mut RawGraph, from: &str, to: &str) -> &'g mut RawEdge {
    g.edges.iter_mut().find(|e| e.from == from && e.to == to).expect("edge")
}

fn relabel(g: &mut RawGraph, id: &str, label: &str) {
    g.vertices.iter_mut().find(|v| v.id == id).expect("vertex").label = label.into();
}

fn nondet(mut m: RawModel) -> RawModel {
    m.components[1].nondeterministic = true;
    m
}

pub fn mutations() -> Vec<Mutation> {
    let f1 = generated("f1");
    let f1p = generated("f1_prime");
    let f2 = generated("f2");
    let f2n = nondet(f2.clone());
    let mk = |name, base: &RawModel, component, edit: &dyn Fn(&mut RawGraph), expect: fn(&ModelError) -> bool| {
        let mut mutated = base.clone();
        edit(&mut mutated.components[component]);
        Mutation {
            name,
            base: base.clone(),
            mutated,
            component,
            expect,
        }
    };
    vec![
        mk("label outside the alphabet", &f1, 0, &|g| relabel(g, "v2", "mul"), |e| {
            e.clause() == Some(GraphClause::LabelSets)
        }),
        mk("worker root gains a predecessor", &f2, 1, &|g| edge(g, "w3", "w1").to = "w0".into(), |e| {
            e.clause() == Some(GraphClause::RootIndegree)
        }),
        mk("ini below the root", &f2, 1, &|g| relabel(g, "w3", "ini"), |e| {
            e.clause() == Some(GraphClause::IniAtRoot)
        }),
        mk("fin with a successor", &f1, 0, &|g| {
            g.edges.push(RawEdge {
                from: "v3".into(),
                to: "v2".into(),
                label: None,
            })
        }, |e| e.clause() == Some(GraphClause::FinOutdegree)),
        mk("labeled function edge", &f1, 0, &|g| edge(g, "v2", "v1").label = Some(0), |e| {
            e.clause() == Some(GraphClause::FunctionVertex)
        }),
        mk("equal predicate edge labels", &f1, 0, &|g| edge(g, "v1", "v2").label = Some(1), |e| {
            e.clause() == Some(GraphClause::PredicateVertex)
        }),
        mk("fin without ini root", &f1, 0, &|g| relabel(g, "r", "dec"), |e| {
            e.clause() == Some(GraphClause::MainIffFin)
        }),
        mk("cycle of predicates", &f1p, 0, &|g| edge(g, "v3'", "v2").to = "v1".into(), |e| {
            e.clause() == Some(GraphClause::CycleCondition)
        }),
        mk("nondeterministic: function vertex without successor", &f2n, 1, &|g| {
            g.edges.retain(|e| !(e.from == "w3" && e.to == "w1"))
        }, |e| {
            matches!(e, ModelError::FunctionOutdegree { outdegree: 0, expected: "at least 1", .. })
        }),
        mk("nondeterministic: labeled branch", &f2n, 1, &|g| edge(g, "w0", "w1").label = Some(1), |e| {
            matches!(e, ModelError::FunctionEdgeLabeled { .. })
        }),
        mk("deterministic: branching function vertex", &f2, 1, &|g| {
            g.edges.push(RawEdge {
                from: "w0".into(),
                to: "w2".into(),
                label: None,
            })
        }, |e| matches!(e, ModelError::FunctionOutdegree { outdegree: 2, expected: "1", .. })),
    ]
}

/// Validates one component of `m` on its own; the error list is empty when it
/// is accepted.
pub fn component_errors(m: &RawModel, component: usize) -> Vec<ModelError> {
    let alphabet = validate_alphabet(&m.alphabet).expect("alphabet");
    let g = &m.components[component];
    validate_component_graph(g, &alphabet, g.nondeterministic, component + 1).err().unwrap_or_default()
}

/// Runs the mutation suite, returning one line per failing mutation.
pub fn mutation_failures() -> Vec<String> {
    let mut bad = Vec::new();
    for m in mutations() {
        if let Err(e) = validate_proto_algorithm(&m.base, ValidationLevel::Strict) {
            bad.push(format!("{}: base rejected: {e:?}", m.name));
        }
        let errs = component_errors(&m.mutated, m.component);
        if errs.is_empty() || !errs.iter().all(|e| (m.expect)(e)) {
            bad.push(format!("{}: got {errs:?}", m.name));
        }
        if validate_proto_algorithm(&m.mutated, ValidationLevel::Strict).is_ok() {
            bad.push(format!("{}: whole model accepted", m.name));
        }
    }
    bad
}

// ---------------------------------------------------------------------------
// Random interpretations over a trivial graph, and brute-force checks of the
// minimality and setting/getting laws.

use protoalg::model::{BottomPolicy, RawAlphabet, RawCell, RawDomains, RawInterpretation, RawTable, RawVertex};
use rand::Rng;

fn tok(k: usize) -> String {
    format!("d{k}")
}

/// A model whose tables are drawn at random over a main domain of `size`
/// values: shared tables are mostly projections so that both law outcomes
/// occur.
pub fn random_interpretation<R: Rng>(r: &mut R, size: usize) -> RawModel {
    let d: Vec<String> = (0..size).map(tok).collect();
    let mut inputs: Vec<String> = d.iter().filter(|_| r.gen_bool(0.4)).cloned().collect();
    if inputs.is_empty() {
        inputs.push(d[0].clone());
    }
    let pick = |r: &mut R| d[r.gen_range(0..size)].clone();
    let mut tables = BTreeMap::new();
    let unary = |r: &mut R, keys: &[String]| {
        RawTable::Unary(keys.iter().map(|k| (k.clone(), RawCell::Token(pick(r)))).collect())
    };
    tables.insert("ini".to_string(), unary(r, &inputs));
    tables.insert(
        "fin".to_string(),
        RawTable::Unary(d.iter().map(|k| (k.clone(), RawCell::Token("out".into()))).collect()),
    );
    // Plain functions rarely move, so that proper closed subsets exist.
    for f in ["f", "g"] {
        let t = d
            .iter()
            .map(|k| {
                let v = if r.gen_bool(0.6) { k.clone() } else { pick(r) };
                (k.clone(), RawCell::Token(v))
            })
            .collect();
        tables.insert(f.to_string(), RawTable::Unary(t));
    }
    for (f, private) in [("put", true), ("get", false)] {
        let mut rows = BTreeMap::new();
        for p in &d {
            let mut row = BTreeMap::new();
            for s in &d {
                let v = match r.gen_range(0..10) {
                    0..=3 if private => p.clone(),
                    0..=3 => s.clone(),
                    4..=6 => p.clone(),
                    7 => s.clone(),
                    _ => pick(r),
                };
                row.insert(s.clone(), RawCell::Token(v));
            }
            rows.insert(p.clone(), row);
        }
        tables.insert(f.to_string(), RawTable::Binary(rows));
    }
    tables.insert(
        "p".to_string(),
        RawTable::Unary(d.iter().map(|k| (k.clone(), RawCell::Int(r.gen_range(0..2)))).collect()),
    );
    RawModel {
        alphabet: RawAlphabet {
            processing: ["ini", "fin", "f", "g"].map(String::from).to_vec(),
            setting: vec!["put".into()],
            getting: vec!["get".into()],
            predicate: vec!["p".into()],
        },
        components: vec![RawGraph {
            vertices: vec![
                RawVertex {
                    id: "r".into(),
                    label: "ini".into(),
                },
                RawVertex {
                    id: "e".into(),
                    label: "fin".into(),
                },
            ],
            edges: vec![RawEdge {
                from: "r".into(),
                to: "e".into(),
                label: None,
            }],
            root: "r".into(),
            main: None,
            nondeterministic: false,
        }],
        interpretation: RawInterpretation {
            domains: RawDomains {
                main: d.clone(),
                input: inputs,
                output: vec!["out".into()],
            },
            bottom_policy: BottomPolicy::Strict,
            tables,
        },
        provenance: None,
    }
}

fn cell(t: &RawTable, a: &str, b: Option<&str>) -> String {
    let c = match (t, b) {
        (RawTable::Unary(m), None) => &m[a],
        (RawTable::Binary(m), Some(b)) => &m[a][b],
        _ => panic!("table shape"),
    };
    match c {
        RawCell::Token(s) => s.clone(),
        RawCell::Int(i) => i.to_string(),
    }
}

/// The least subset of the main domain containing the `ini` images and
/// closed under every non-reserved function, found by trying all subsets.
/// Returns it when it is a proper subset.
pub fn brute_force_non_minimal(m: &RawModel) -> Option<BTreeSet<String>> {
    let d = &m.interpretation.domains.main;
    let t = &m.interpretation.tables;
    let alpha = &m.alphabet;
    let unary: Vec<&String> = alpha.processing.iter().filter(|f| *f != "ini" && *f != "fin").collect();
    let binary: Vec<&String> = alpha.setting.iter().chain(&alpha.getting).collect();
    let seeds: BTreeSet<String> = m.interpretation.domains.input.iter().map(|x| cell(&t["ini"], x, None)).collect();
    let mut least: Option<BTreeSet<String>> = None;
    for mask in 0u32..(1 << d.len()) {
        let s: BTreeSet<String> = (0..d.len()).filter(|k| mask >> k & 1 == 1).map(|k| d[k].clone()).collect();
        let closed = seeds.is_subset(&s)
            && s.iter().all(|x| unary.iter().all(|f| s.contains(&cell(&t[*f], x, None))))
            && s.iter().all(|x| {
                s.iter().all(|y| binary.iter().all(|f| s.contains(&cell(&t[*f], x, Some(y)))))
            });
        if closed && least.as_ref().is_none_or(|l| s.len() < l.len()) {
            least = Some(s);
        }
    }
    least.filter(|l| l.len() < d.len())
}

/// Every (symbol, law, d, d') instance where a law fails.
pub fn brute_force_laws(m: &RawModel) -> BTreeSet<(String, String, String, String)> {
    use protoalg::model::LawKind;
    let d = &m.interpretation.domains.main;
    let t = &m.interpretation.tables;
    let ap = |f: &str, a: &str, b: &str| cell(&t[f], a, Some(b));
    let mut out = BTreeSet::new();
    let mut add = |f: &str, law: LawKind, a: &str, b: &str| {
        out.insert((f.to_string(), format!("{law:?}"), a.to_string(), b.to_string()));
    };
    for a in d {
        for b in d {
            for f in &m.alphabet.setting {
                let r = ap(f, a, b);
                if ap(f, a, &r) != r {
                    add(f, LawKind::SetterIdempotent, a, b);
                }
                if !m.alphabet.getting.iter().any(|g| ap(g, a, &r) == *a) {
                    add(f, LawKind::SetterHasGetter, a, b);
                }
            }
            for g in &m.alphabet.getting {
                let r = ap(g, a, b);
                if ap(g, &r, b) != r {
                    add(g, LawKind::GetterIdempotent, a, b);
                }
                if !m.alphabet.setting.iter().any(|f| ap(f, &r, b) == *b) {
                    add(g, LawKind::GetterHasSetter, a, b);
                }
            }
        }
    }
    out
}

/// Compares the validator's soft findings on `m` with the brute-force
/// oracles; returns a description of the first disagreement.
pub fn law_disagreement(m: &RawModel) -> Option<String> {
    let warnings = match validate_proto_algorithm(m, ValidationLevel::Lenient) {
        Ok(a) => a.warnings().to_vec(),
        Err(e) => return Some(format!("rejected at lenient level: {e:?}")),
    };
    let mut non_minimal = None;
    let mut laws = BTreeSet::new();
    for w in warnings {
        match w {
            ModelError::NonMinimalDomain { closed_subset } => {
                non_minimal = Some(closed_subset.into_iter().collect::<BTreeSet<_>>())
            }
            ModelError::SettingGettingLawViolated { symbol, law, d, d_prime } => {
                laws.insert((symbol, format!("{law:?}"), d, d_prime));
            }
            other => return Some(format!("unexpected warning {other}")),
        }
    }
    let expected = brute_force_non_minimal(m);
    if non_minimal != expected {
        return Some(format!("minimality: validator {non_minimal:?}, oracle {expected:?}"));
    }
    let expected = brute_force_laws(m);
    if laws != expected {
        return Some(format!("laws: validator {laws:?}, oracle {expected:?}"));
    }
    let strict_ok = validate_proto_algorithm(m, ValidationLevel::Strict).is_ok();
    if strict_ok != (non_minimal.is_none() && laws.is_empty()) {
        return Some("strict level disagrees with the findings".into());
    }
    None
}

// ---------------------------------------------------------------------------
// Model pairs for the equivalence chain.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairKind {
    Renamed,
    Unrolled,
    RedundantTest,
    Unrelated,
}

pub struct Pair {
    pub kind: PairKind,
    pub a: ProtoAlgorithm,
    pub b: ProtoAlgorithm,
}

/// `count` pairs built from the fixtures and random models: renamed copies
/// (every other one with swapped edge labels), unrolled copies, copies with
/// a redundant test, and pairs of unrelated models.
pub fn model_pairs(seed: u64, count: usize) -> Vec<Pair> {
    let mut r = rng(seed);
    let mut bases: Vec<RawModel> = vec![generated("f1"), generated("f2"), gen::countdown(1)];
    let shapes = [
        RandomSpec::default(),
        RandomSpec {
            components: 2,
            vertices: (2, 3),
            domain: 2,
            shared: true,
            ..RandomSpec::default()
        },
        RandomSpec {
            nondeterministic: true,
            vertices: (3, 4),
            ..RandomSpec::default()
        },
    ];
    let mut out = Vec::new();
    let mut k = 0;
    while out.len() < count {
        if k >= bases.len() {
            let spec = &shapes[k % shapes.len()];
            bases.push(gen::random_model(&mut r, spec));
        }
        let base = bases[k].clone();
        let a = valid(&base);
        out.push(Pair {
            kind: PairKind::Renamed,
            a: a.clone(),
            b: valid(&gen::rename(&base, &mut r, k % 2 == 1)),
        });
        out.push(Pair {
            kind: PairKind::Unrolled,
            a: a.clone(),
            b: valid(&gen::unroll(&base)),
        });
        if let Some(t) = gen::redundant_test(&base) {
            out.push(Pair {
                kind: PairKind::RedundantTest,
                a: a.clone(),
                b: valid(&t),
            });
        }
        if k > 0 {
            out.push(Pair {
                kind: PairKind::Unrelated,
                a: valid(&bases[k - 1]),
                b: a,
            });
        }
        k += 1;
    }
    out.truncate(count);
    out
}

/// A one-component model over the single value `0`: `ini`, `fin`, `f` and
/// `g` are the identity and the test `p` always holds.
pub fn tiny(labels: &[(&str, &str)], edges: &[(&str, &str, Option<i64>)], nondeterministic: bool) -> RawModel {
    let one = |v: RawCell| RawTable::Unary(BTreeMap::from([("0".to_string(), v)]));
    let zero = || RawCell::Token("0".into());
    let tables = BTreeMap::from([
        ("ini".to_string(), one(zero())),
        ("fin".to_string(), one(zero())),
        ("f".to_string(), one(zero())),
        ("g".to_string(), one(zero())),
        ("p".to_string(), one(RawCell::Int(1))),
    ]);
    RawModel {
        alphabet: RawAlphabet {
            processing: ["ini", "fin", "f", "g"].map(String::from).to_vec(),
            setting: vec![],
            getting: vec![],
            predicate: vec!["p".into()],
        },
        components: vec![RawGraph {
            vertices: labels
                .iter()
                .map(|(id, l)| RawVertex {
                    id: id.to_string(),
                    label: l.to_string(),
                })
                .collect(),
            edges: edges
                .iter()
                .map(|(f, t, l)| RawEdge {
                    from: f.to_string(),
                    to: t.to_string(),
                    label: *l,
                })
                .collect(),
            root: labels[0].0.to_string(),
            main: None,
            nondeterministic,
        }],
        interpretation: RawInterpretation {
            domains: RawDomains {
                main: vec!["0".into()],
                input: vec!["0".into()],
                output: vec!["0".into()],
            },
            bottom_policy: BottomPolicy::Strict,
            tables,
        },
        provenance: None,
    }
}

// ---------------------------------------------------------------------------
// Report determinism.

/// Argument lists for the report determinism check; `OUT` stands for an
/// output directory.
pub fn report_commands() -> Vec<Vec<String>> {
    let f = |n: &str| fixture_path(n).display().to_string();
    let s = |x: &str| x.to_string();
    vec![
        vec![s("validate"), f("f2")],
        vec![s("run"), f("f2"), s("--input"), s("1"), s("--max-steps"), s("12")],
        vec![s("compute"), f("f2")],
        vec![s("check-iso"), f("f1"), f("f1_unrolled")],
        vec![s("check-sim"), f("f1"), f("f1_unrolled")],
        vec![s("check-equiv"), f("f1"), f("f1_prime"), s("--variant"), s("computational")],
        vec![s("check-equiv"), f("f1"), f("f2")],
        vec![s("sequentialize"), f("f2"), s("-o"), s("OUT/seq.json"), s("--certify")],
        vec![s("export-dot"), f("f2"), s("--state-graph"), s("--input"), s("1"), s("-o"), s("OUT/sg.dot")],
        vec![s("gen"), s("handoff"), s("3")],
    ]
}

/// Runs every report command `times` times with `--json` and lists the
/// commands whose reports (or written files) differ between runs.
pub fn report_mismatches(binary: &str, dir: &std::path::Path, times: usize) -> Vec<String> {
    let out_dir = dir.join("OUT");
    std::fs::create_dir_all(&out_dir).unwrap();
    let report = dir.join("report.json");
    let mut bad = Vec::new();
    for args in report_commands() {
        let args: Vec<String> = args.iter().map(|a| a.replace("OUT", &out_dir.display().to_string())).collect();
        let mut seen: Option<Vec<Vec<u8>>> = None;
        for _ in 0..times {
            let status = std::process::Command::new(binary)
                .arg("--json")
                .arg(&report)
                .args(&args)
                .env_remove("PROTOALG_STATE_CAP")
                .output()
                .expect("binary runs")
                .status;
            if status.code().is_none_or(|c| c > 1) {
                bad.push(format!("{args:?}: exit {status}"));
            }
            let mut files = vec![std::fs::read(&report).unwrap()];
            let mut names: Vec<_> = std::fs::read_dir(&out_dir).unwrap().map(|e| e.unwrap().path()).collect();
            names.sort();
            files.extend(names.iter().map(|p| std::fs::read(p).unwrap()));
            match &seen {
                None => seen = Some(files),
                Some(prev) if *prev != files => bad.push(format!("{args:?}: output differs")),
                _ => {}
            }
        }
    }
    bad
}
