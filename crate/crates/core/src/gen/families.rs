//! Transformations of raw models that produce equivalent or isomorphic
//! variants, used to build pairs for the equivalence checks.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::model::{
    BottomPolicy, RawCell, RawEdge, RawGraph, RawModel, RawTable, RawVertex, BOT_TOKEN, FIN, INI,
};

/// An isomorphic copy: fresh vertex ids, symbol names and value names,
/// shuffled component order and, if `swap_bits` is set, complemented
/// predicate tables with swapped edge labels.
pub fn rename<R: Rng>(m: &RawModel, rng: &mut R, swap_bits: bool) -> RawModel {
    let mut sym: HashMap<String, String> = HashMap::new();
    sym.insert(INI.into(), INI.into());
    sym.insert(FIN.into(), FIN.into());
    let mut rename_class = |names: &[String], prefix: &str| -> Vec<String> {
        let mut fresh: Vec<String> = (0..names.len()).map(|k| format!("{prefix}{k}")).collect();
        fresh.shuffle(rng);
        let mut out = Vec::new();
        let mut k = 0;
        for n in names {
            if n == INI || n == FIN {
                out.push(n.clone());
                continue;
            }
            sym.insert(n.clone(), fresh[k].clone());
            out.push(fresh[k].clone());
            k += 1;
        }
        out.shuffle(rng);
        out
    };
    let mut alphabet = m.alphabet.clone();
    alphabet.processing = rename_class(&m.alphabet.processing, "op");
    alphabet.setting = rename_class(&m.alphabet.setting, "set");
    alphabet.getting = rename_class(&m.alphabet.getting, "get");
    alphabet.predicate = rename_class(&m.alphabet.predicate, "test");
    let predicates: HashSet<&String> = m.alphabet.predicate.iter().collect();

    let d = &m.interpretation.domains;
    let mut all_values: Vec<&String> = Vec::new();
    for v in d.main.iter().chain(&d.input).chain(&d.output) {
        if !all_values.contains(&v) {
            all_values.push(v);
        }
    }
    let mut fresh: Vec<String> = (0..all_values.len()).map(|k| format!("a{k}")).collect();
    fresh.shuffle(rng);
    let mut val: HashMap<String, String> = all_values
        .iter()
        .zip(fresh)
        .map(|(v, f)| (v.to_string(), f))
        .collect();
    val.insert(BOT_TOKEN.into(), BOT_TOKEN.into());
    let rv = |xs: &[String]| -> Vec<String> { xs.iter().map(|x| val[x].clone()).collect() };

    let mut interpretation = m.interpretation.clone();
    interpretation.domains.main = rv(&d.main);
    interpretation.domains.input = rv(&d.input);
    interpretation.domains.output = rv(&d.output);
    let cell = |c: &RawCell, is_pred: bool| -> RawCell {
        match c {
            RawCell::Int(b) if is_pred && swap_bits => RawCell::Int(1 - b),
            RawCell::Int(b) => RawCell::Int(*b),
            RawCell::Token(t) => RawCell::Token(val.get(t).cloned().unwrap_or_else(|| t.clone())),
        }
    };
    interpretation.tables = m
        .interpretation
        .tables
        .iter()
        .map(|(name, t)| {
            let p = predicates.contains(name);
            let t = match t {
                RawTable::Unary(rows) => {
                    RawTable::Unary(rows.iter().map(|(k, c)| (val[k].clone(), cell(c, p))).collect())
                }
                RawTable::Binary(rows) => RawTable::Binary(
                    rows.iter()
                        .map(|(k, row)| {
                            (
                                val[k].clone(),
                                row.iter().map(|(k2, c)| (val[k2].clone(), cell(c, p))).collect(),
                            )
                        })
                        .collect(),
                ),
            };
            (sym[name].clone(), t)
        })
        .collect();

    let mut components: Vec<RawGraph> = m
        .components
        .iter()
        .enumerate()
        .map(|(c, g)| {
            let mut ids: Vec<String> = (0..g.vertices.len()).map(|k| format!("c{c}n{k}")).collect();
            ids.shuffle(rng);
            let vid: HashMap<&String, String> = g.vertices.iter().map(|v| &v.id).zip(ids).collect();
            let mut vertices: Vec<RawVertex> = g
                .vertices
                .iter()
                .map(|v| RawVertex {
                    id: vid[&v.id].clone(),
                    label: sym[&v.label].clone(),
                })
                .collect();
            vertices.shuffle(rng);
            let mut edges: Vec<RawEdge> = g
                .edges
                .iter()
                .map(|e| RawEdge {
                    from: vid[&e.from].clone(),
                    to: vid[&e.to].clone(),
                    label: e.label.map(|b| if swap_bits { 1 - b } else { b }),
                })
                .collect();
            edges.shuffle(rng);
            RawGraph {
                vertices,
                edges,
                root: vid[&g.root].clone(),
                main: g.main,
                nondeterministic: g.nondeterministic,
            }
        })
        .collect();
    components.shuffle(rng);

    RawModel {
        alphabet,
        components,
        interpretation,
        provenance: m.provenance.clone(),
    }
}

/// Unrolls every component into a two-sheeted cover: a copy counter flips on
/// each step of a function vertex. Only the part reachable from the root is
/// kept. The result is algorithmically equivalent to the input.
pub fn unroll(m: &RawModel) -> RawModel {
    let predicates: HashSet<&String> = m.alphabet.predicate.iter().collect();
    let components = m
        .components
        .iter()
        .map(|g| {
            let label: HashMap<&String, &String> = g.vertices.iter().map(|v| (&v.id, &v.label)).collect();
            let name = |v: &String, b: u8| format!("{v}.{b}");
            let mut seen: HashSet<(String, u8)> = HashSet::new();
            let mut queue = VecDeque::from([(g.root.clone(), 0u8)]);
            seen.insert((g.root.clone(), 0));
            let mut vertices = Vec::new();
            let mut edges = Vec::new();
            while let Some((v, b)) = queue.pop_front() {
                vertices.push(RawVertex {
                    id: name(&v, b),
                    label: label[&v].clone(),
                });
                let flip = if predicates.contains(label[&v]) { 0 } else { 1 };
                for e in g.edges.iter().filter(|e| e.from == v) {
                    let key = (e.to.clone(), b ^ flip);
                    edges.push(RawEdge {
                        from: name(&v, b),
                        to: name(&key.0, key.1),
                        label: e.label,
                    });
                    if seen.insert(key.clone()) {
                        queue.push_back(key);
                    }
                }
            }
            RawGraph {
                vertices,
                edges,
                root: name(&g.root, 0),
                main: g.main,
                nondeterministic: g.nondeterministic,
            }
        })
        .collect();
    RawModel {
        components,
        ..m.clone()
    }
}

/// Inserts an always-true test in front of the first `fin` vertex of the
/// main component. The variant is computationally but, in general, not
/// algorithmically equivalent to the input. `None` when the main component
/// has no vertex that can serve as the (never taken) alternative branch.
pub fn redundant_test(m: &RawModel) -> Option<RawModel> {
    let mut out = m.clone();
    let mut name = "chk".to_string();
    let taken = |n: &String| {
        let a = &m.alphabet;
        a.processing.contains(n) || a.setting.contains(n) || a.getting.contains(n) || a.predicate.contains(n)
    };
    while taken(&name) {
        name.push('_');
    }
    let main = out
        .components
        .iter_mut()
        .find(|g| g.vertices.iter().any(|v| v.id == g.root && v.label == INI))?;
    let w = main.vertices.iter().find(|v| v.label == FIN)?.id.clone();
    let predicates: HashSet<&String> = m.alphabet.predicate.iter().collect();
    let x = main
        .vertices
        .iter()
        .find(|v| v.id != main.root && v.id != w && v.label != FIN && !predicates.contains(&v.label))?
        .id
        .clone();
    let k = main.edges.iter().position(|e| e.to == w)?;
    let mut q = format!("{w}?");
    while main.vertices.iter().any(|v| v.id == q) {
        q.push('?');
    }
    main.edges[k].to = q.clone();
    main.vertices.push(RawVertex {
        id: q.clone(),
        label: name.clone(),
    });
    main.edges.push(RawEdge {
        from: q.clone(),
        to: w,
        label: Some(1),
    });
    main.edges.push(RawEdge {
        from: q,
        to: x,
        label: Some(0),
    });

    out.alphabet.predicate.push(name.clone());
    let mut rows: BTreeMap<String, RawCell> = m
        .interpretation
        .domains
        .main
        .iter()
        .map(|v| (v.clone(), RawCell::Int(1)))
        .collect();
    if m.interpretation.bottom_policy == BottomPolicy::Lifted {
        rows.insert(BOT_TOKEN.into(), RawCell::Int(1));
    }
    out.interpretation.tables.insert(name, RawTable::Unary(rows));
    Some(out)
}
