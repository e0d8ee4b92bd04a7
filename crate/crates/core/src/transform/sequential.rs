use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use super::error::TransformError;
use crate::equivalence::{check_equivalence, verify_equivalence, EquivalenceReport, SimulationRelation};
use crate::model::{
    validate_proto_algorithm, BottomPolicy, Control, ProtoAlgorithm, RawAlphabet, RawCell, RawDomains,
    RawEdge, RawGraph, RawInterpretation, RawModel, RawTable, RawVertex, Slot, State, StateKind,
    Symbol, SymbolKind, ValidationLevel, Vertex, BOT_TOKEN, FIN, INI,
};
use crate::semantics::{build_state_graph, computed_function, Entry, Variant};

/// A vertex of the product graph: one control vertex per component and the
/// index of the component that steps next.
pub type ProductVertex = (Vec<Vertex>, usize);

/// Output of the sequentialization: a single-component model over a
/// classical alphabet whose private datum is the tuple of all private data
/// and the shared datum.
#[derive(Clone, Debug)]
pub struct SequentializationResult {
    pub output: ProtoAlgorithm,
    pub raw: RawModel,
    /// Product vertex to output vertex id, in discovery order.
    pub vertex_map: Vec<(ProductVertex, String)>,
    /// (source symbol, 1-based component index, output symbol).
    pub symbol_map: Vec<(String, usize, String)>,
    pub certificate: Option<Certificate>,
}

/// Evidence that the output is algorithmically equivalent to the source.
#[derive(Clone, Debug)]
pub struct Certificate {
    /// The equivalence check between source and output.
    pub report: EquivalenceReport,
    /// The state correspondence of the construction, restricted to states
    /// reachable in the source, checked in both directions.
    pub correspondence: SimulationRelation,
    pub correspondence_checked: Result<(), String>,
}

impl Certificate {
    pub fn holds(&self) -> bool {
        self.report.verdict && self.correspondence_checked.is_ok()
    }
}

fn tuple_token(a: &ProtoAlgorithm, t: &[Slot]) -> String {
    let names: Vec<&str> = t.iter().map(|s| a.interpretation().slot_name(*s)).collect();
    format!("({})", names.join(","))
}

fn indexed(name: &str, i: usize) -> String {
    format!("{name}_{}", i + 1)
}

/// Per-component successor of a data tuple under symbol `f` acting for
/// component `i`; `None` when the step does not fire.
fn apply(a: &ProtoAlgorithm, f: Symbol, i: usize, t: &[Slot]) -> Option<Vec<Slot>> {
    let interp = a.interpretation();
    let n = t.len() - 1;
    let mut u = t.to_vec();
    match a.alphabet().kind(f) {
        SymbolKind::Processing => u[i] = interp.unary(f, t[i])?,
        SymbolKind::Setting => u[n] = interp.binary(f, t[i], t[n])?,
        SymbolKind::Getting => u[i] = interp.binary(f, t[i], t[n])?,
        SymbolKind::Predicate => return None,
    }
    Some(u)
}

/// Builds the sequential form of `a` without certifying it.
pub fn build_sequential(a: &ProtoAlgorithm, cap: usize) -> Result<SequentializationResult, TransformError> {
    let alphabet = a.alphabet();
    let interp = a.interpretation();
    let n = a.components().len();
    let m = a.main_index();

    if interp.policy() == BottomPolicy::Strict {
        let g = build_state_graph(a, Variant::Algorithmic, None, cap)?;
        let start: Vec<usize> = g.initial_states().collect();
        let reach = g.reachable_from(&start);
        let stuck = g.stuck_states().find(|&i| reach[i]);
        if let Some(i) = stuck {
            return Err(TransformError::StuckSource {
                state: g.state(i).render(a),
            });
        }
    }

    let stepping: Vec<Symbol> = alphabet
        .symbols()
        .filter(|&f| f != alphabet.ini() && f != alphabet.fin() && alphabet.kind(f) != SymbolKind::Predicate)
        .collect();
    let predicates: Vec<Symbol> = alphabet.symbols_of(SymbolKind::Predicate).collect();

    // Data tuples: closure of the ini images under every indexed function.
    let ini_tuple = |d| {
        let mut t: Vec<Slot> = vec![None; n + 1];
        t[m] = Some(interp.ini(d));
        t
    };
    let mut tuples: Vec<Vec<Slot>> = Vec::new();
    let mut seen: HashSet<Vec<Slot>> = HashSet::new();
    let mut queue: VecDeque<Vec<Slot>> = VecDeque::new();
    for &d in interp.input_domain() {
        let t = ini_tuple(d);
        if seen.insert(t.clone()) {
            queue.push_back(t);
        }
    }
    while let Some(t) = queue.pop_front() {
        if tuples.len() >= cap {
            return Err(crate::semantics::SemanticsError::ResourceBoundExceeded { cap }.into());
        }
        for &f in &stepping {
            for i in 0..n {
                if let Some(u) = apply(a, f, i, &t) {
                    if seen.insert(u.clone()) {
                        queue.push_back(u);
                    }
                }
            }
        }
        tuples.push(t);
    }
    let mut token: HashMap<Vec<Slot>, String> = HashMap::new();
    let mut names: HashSet<String> = HashSet::new();
    for t in &tuples {
        let s = tuple_token(a, t);
        if s == BOT_TOKEN || !names.insert(s.clone()) {
            return Err(TransformError::NameCollision { name: s });
        }
        token.insert(t.clone(), s);
    }
    let cell = |u: Option<Vec<Slot>>| RawCell::Token(u.map_or(BOT_TOKEN.to_string(), |u| token[&u].clone()));

    // Alphabet and tables.
    let mut symbol_map = Vec::new();
    let mut processing = vec![INI.to_string(), FIN.to_string()];
    let mut predicate = Vec::new();
    let mut tables: BTreeMap<String, RawTable> = BTreeMap::new();
    let bot_row = |table: &mut BTreeMap<String, RawCell>, c: RawCell| {
        table.insert(BOT_TOKEN.to_string(), c);
    };

    let mut t_ini = BTreeMap::new();
    for &d in interp.input_domain() {
        t_ini.insert(interp.name(d).to_string(), cell(Some(ini_tuple(d))));
    }
    tables.insert(INI.to_string(), RawTable::Unary(t_ini));

    let mut t_fin = BTreeMap::new();
    for t in &tuples {
        let r = interp.unary(alphabet.fin(), t[m]).flatten();
        t_fin.insert(token[t].clone(), RawCell::Token(interp.slot_name(r).to_string()));
    }
    bot_row(&mut t_fin, RawCell::Token(BOT_TOKEN.to_string()));
    tables.insert(FIN.to_string(), RawTable::Unary(t_fin));

    for &f in &stepping {
        for i in 0..n {
            let name = indexed(alphabet.name(f), i);
            let mut table = BTreeMap::new();
            for t in &tuples {
                table.insert(token[t].clone(), cell(apply(a, f, i, t)));
            }
            bot_row(&mut table, RawCell::Token(BOT_TOKEN.to_string()));
            tables.insert(name.clone(), RawTable::Unary(table));
            symbol_map.push((alphabet.name(f).to_string(), i + 1, name.clone()));
            processing.push(name);
        }
    }
    for &p in &predicates {
        for i in 0..n {
            let name = indexed(alphabet.name(p), i);
            let mut table = BTreeMap::new();
            for t in &tuples {
                let b = interp.test(p, t[i]).unwrap_or(0);
                table.insert(token[t].clone(), RawCell::Int(b as i64));
            }
            bot_row(&mut table, RawCell::Int(0));
            tables.insert(name.clone(), RawTable::Unary(table));
            symbol_map.push((alphabet.name(p).to_string(), i + 1, name.clone()));
            predicate.push(name);
        }
    }
    for (f, _, g) in &symbol_map {
        if g == INI || g == FIN || processing.iter().chain(&predicate).filter(|x| *x == g).count() > 1 {
            return Err(TransformError::NameCollision { name: format!("{g} (from `{f}`)") });
        }
    }

    // Product graph, restricted to the part reachable from the root.
    let comps = a.components();
    let vertex_id = |(vs, i): &ProductVertex| {
        let ids: Vec<&str> = vs.iter().enumerate().map(|(k, &v)| comps[k].id(v)).collect();
        format!("({})@{}", ids.join(","), i + 1)
    };
    let label = |(vs, i): &ProductVertex| {
        let f = comps[*i].label(vs[*i]);
        if f == alphabet.ini() || f == alphabet.fin() {
            alphabet.name(f).to_string()
        } else {
            indexed(alphabet.name(f), *i)
        }
    };
    let root: ProductVertex = (comps.iter().map(|g| g.root()).collect(), m);
    let mut order: Vec<ProductVertex> = vec![root.clone()];
    let mut index: HashMap<ProductVertex, usize> = HashMap::from([(root.clone(), 0)]);
    let mut edges: Vec<RawEdge> = Vec::new();
    let mut k = 0;
    while k < order.len() {
        if order.len() > cap {
            return Err(crate::semantics::SemanticsError::ResourceBoundExceeded { cap }.into());
        }
        let (vs, i) = order[k].clone();
        let f = comps[i].label(vs[i]);
        let is_pred = alphabet.kind(f) == SymbolKind::Predicate;
        for &(w, l) in comps[i].successors(vs[i]) {
            let mut next = vs.clone();
            next[i] = w;
            let targets: Vec<usize> = if is_pred { vec![i] } else { (0..n).collect() };
            for j in targets {
                let pv = (next.clone(), j);
                if !index.contains_key(&pv) {
                    index.insert(pv.clone(), order.len());
                    order.push(pv.clone());
                }
                edges.push(RawEdge {
                    from: vertex_id(&order[k]),
                    to: vertex_id(&pv),
                    label: if is_pred { l.map(i64::from) } else { None },
                });
            }
        }
        k += 1;
    }
    let mut vertex_map = Vec::with_capacity(order.len());
    let mut ids = HashSet::new();
    let mut vertices = Vec::with_capacity(order.len());
    for pv in &order {
        let id = vertex_id(pv);
        if !ids.insert(id.clone()) {
            return Err(TransformError::NameCollision { name: id });
        }
        vertices.push(RawVertex {
            id: id.clone(),
            label: label(pv),
        });
        vertex_map.push((pv.clone(), id));
    }

    let main_values: Vec<String> = tuples.iter().map(|t| token[t].clone()).collect();
    let names_of = |vs: &[crate::model::Value]| vs.iter().map(|v| interp.name(*v).to_string()).collect();
    let mut provenance = BTreeMap::new();
    provenance.insert("construction".to_string(), "sequentialization/1".to_string());
    provenance.insert("source_components".to_string(), n.to_string());
    let raw = RawModel {
        alphabet: RawAlphabet {
            processing,
            setting: Vec::new(),
            getting: Vec::new(),
            predicate,
        },
        components: vec![RawGraph {
            vertices,
            edges,
            root: vertex_id(&root),
            main: Some(true),
            nondeterministic: true,
        }],
        interpretation: RawInterpretation {
            domains: RawDomains {
                main: main_values,
                input: names_of(interp.input_domain()),
                output: names_of(interp.output_domain()),
            },
            bottom_policy: BottomPolicy::Lifted,
            tables,
        },
        provenance: Some(provenance),
    };
    let output = validate_proto_algorithm(&raw, ValidationLevel::Lenient)
        .map_err(|errors| TransformError::InvalidOutput { errors })?;
    Ok(SequentializationResult {
        output,
        raw,
        vertex_map,
        symbol_map,
        certificate: None,
    })
}

/// Builds the sequential form and certifies it: the equivalence check must
/// succeed and the construction's state correspondence must be a relation
/// witnessing equivalence that is functional and injective.
pub fn sequentialize(a: &ProtoAlgorithm, cap: usize) -> Result<SequentializationResult, TransformError> {
    let mut result = build_sequential(a, cap)?;
    let report = check_equivalence(a, &result.output, Variant::Algorithmic, cap)?;
    let correspondence = correspondence(a, &result, cap)?;
    let checked = verify_equivalence(a, &result.output, &correspondence).and_then(|_| {
        let mut left = HashSet::new();
        let mut right = HashSet::new();
        for (s, t) in &correspondence.pairs {
            if !left.insert(s) {
                return Err(format!("{} has two images", s.render(a)));
            }
            if !right.insert(t) {
                return Err(format!("{} has two preimages", t.render(&result.output)));
            }
        }
        Ok(())
    });
    let cert = Certificate {
        report,
        correspondence,
        correspondence_checked: checked,
    };
    if !cert.holds() {
        let reason = match &cert.correspondence_checked {
            Err(e) => e.clone(),
            Ok(()) => "no equivalence between source and output".to_string(),
        };
        return Err(TransformError::CertificationFailed { reason });
    }
    result.certificate = Some(cert);
    Ok(result)
}

/// The construction's map from reachable source states to output states.
fn correspondence(
    a: &ProtoAlgorithm,
    r: &SequentializationResult,
    cap: usize,
) -> Result<SimulationRelation, TransformError> {
    let b = &r.output;
    let (ia, ib) = (a.interpretation(), b.interpretation());
    let g = &b.components()[0];
    let vmap: HashMap<&ProductVertex, Vertex> = r
        .vertex_map
        .iter()
        .map(|(pv, id)| (pv, g.vertex(id).expect("vertex present")))
        .collect();
    let value_b = |name: &str| ib.value(name).expect("value present");
    let source = build_state_graph(a, Variant::Algorithmic, None, cap)?;
    let start: Vec<usize> = source.initial_states().collect();
    let reach = source.reachable_from(&start);
    let mut pairs = BTreeSet::new();
    for (k, s) in source.states().iter().enumerate() {
        if !reach[k] && s.kind() != StateKind::Final {
            continue;
        }
        let t = match s.kind() {
            StateKind::Initial => State::initial(value_b(ia.name(s.input.unwrap()))),
            StateKind::Final => State::final_(value_b(ia.name(s.output.unwrap()))),
            StateKind::Internal => {
                let c = s.control.as_ref().unwrap();
                let j = c.sched.unwrap() as usize;
                let vs: Vec<Vertex> = c.vertices.iter().map(|v| v.unwrap()).collect();
                let Some(&v) = vmap.get(&(vs, j)) else {
                    return Err(TransformError::CertificationFailed {
                        reason: format!("no product vertex for {}", s.render(a)),
                    });
                };
                let mut tuple = c.privs.clone();
                tuple.push(c.shared);
                let Some(d) = ib.value(&tuple_token(a, &tuple)) else {
                    return Err(TransformError::CertificationFailed {
                        reason: format!("no data tuple for {}", s.render(a)),
                    });
                };
                State::internal(Control {
                    vertices: vec![Some(v)],
                    privs: vec![Some(d)],
                    shared: None,
                    sched: Some(0),
                })
            }
        };
        pairs.insert((s.clone(), t));
    }
    Ok(SimulationRelation {
        variant: Variant::Algorithmic,
        pairs,
    })
}

/// Outcome of certifying the sequentialization of one model.
#[derive(Clone, Debug)]
pub struct Theorem3Report {
    pub result: SequentializationResult,
    /// Computed functions coincide input by input (inputs and outputs are
    /// compared by name).
    pub functions_agree: bool,
}

impl Theorem3Report {
    pub fn holds(&self) -> bool {
        self.functions_agree && self.result.certificate.as_ref().is_some_and(Certificate::holds)
    }
}

/// Computed function with values replaced by their names: `None` for an
/// undefined entry.
/// Input name with its output names, `None` where undefined.
pub type NamedEntry = (String, Option<Vec<String>>);

pub fn named_function(a: &ProtoAlgorithm, cap: usize) -> Result<Vec<NamedEntry>, TransformError> {
    let f = computed_function(a, cap)?;
    let i = a.interpretation();
    Ok(f.entries
        .iter()
        .map(|(d, e)| {
            let out = match e {
                Entry::Defined(o) => Some(o.iter().map(|v| i.name(*v).to_string()).collect()),
                Entry::Undefined { .. } => None,
            };
            (i.name(*d).to_string(), out)
        })
        .collect())
}

pub fn check_theorem3(a: &ProtoAlgorithm, cap: usize) -> Result<Theorem3Report, TransformError> {
    let result = sequentialize(a, cap)?;
    let functions_agree = named_function(a, cap)? == named_function(&result.output, cap)?;
    Ok(Theorem3Report {
        result,
        functions_agree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{countdown, handoff, with_policy};
    use crate::semantics::DEFAULT_STATE_CAP;

    fn load(raw: RawModel) -> ProtoAlgorithm {
        validate_proto_algorithm(&raw, ValidationLevel::Strict).unwrap()
    }

    #[test]
    fn sequential_countdown_mirrors_the_source_graph() {
        let a = load(countdown(3));
        let rep = check_theorem3(&a, DEFAULT_STATE_CAP).unwrap();
        assert!(rep.holds());
        let out = &rep.result.output;
        assert!(out.is_sequential() && out.is_classical());
        let g = &out.components()[0];
        assert_eq!(g.len(), a.components()[0].len());
        assert_eq!(g.edge_count(), a.components()[0].edge_count());
        let labels: BTreeSet<&str> = g.vertices().map(|v| out.alphabet().name(g.label(v))).collect();
        assert_eq!(labels, BTreeSet::from(["ini", "fin", "dec_1", "z_1"]));
    }

    #[test]
    fn sequential_handoff_fans_out_over_both_components() {
        let a = load(handoff(2));
        let rep = check_theorem3(&a, DEFAULT_STATE_CAP).unwrap();
        assert!(rep.holds());
        let out = &rep.result.output;
        let g = &out.components()[0];
        let x = out.alphabet();
        for v in g.vertices() {
            let f = g.label(v);
            if x.kind(f) != SymbolKind::Predicate && f != x.fin() {
                assert_eq!(g.outdegree(v), 2, "{}", g.id(v));
            }
        }
        let bound = a.components()[0].len() * a.components()[1].len() * 2;
        assert!(g.len() <= bound);
        let f = named_function(out, DEFAULT_STATE_CAP).unwrap();
        assert!(f.iter().all(|(_, e)| e.is_none()));
    }

    #[test]
    fn strict_sources_with_stuck_states_are_refused() {
        let a = load(with_policy(handoff(2), BottomPolicy::Strict));
        assert!(matches!(
            sequentialize(&a, DEFAULT_STATE_CAP),
            Err(TransformError::StuckSource { .. })
        ));
    }
}
