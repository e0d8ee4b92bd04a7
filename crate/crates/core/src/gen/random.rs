//! Random small proto-algorithms that pass validation.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;

use super::build::{alphabet, binary, graph, model, numbers, predicate, unary};
use crate::model::{validate_proto_algorithm, RawGraph, RawModel, ValidationLevel, FIN, INI};

#[derive(Clone, Debug)]
pub struct RandomSpec {
    pub components: usize,
    /// Vertices per component, inclusive range.
    pub vertices: (usize, usize),
    /// Size of the generated main domain before restriction to the closure.
    pub domain: u32,
    pub nondeterministic: bool,
    /// Include a setter/getter pair.
    pub shared: bool,
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec {
            components: 1,
            vertices: (3, 5),
            domain: 3,
            nondeterministic: false,
            shared: false,
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Role {
    Ini,
    Fin,
    Func,
    Pred,
}

fn random_graph<R: Rng>(rng: &mut R, spec: &RandomSpec, main: bool, funcs: &[&str]) -> Option<RawGraph> {
    let m = rng.gen_range(spec.vertices.0..=spec.vertices.1).max(if main { 3 } else { 1 });
    let mut roles = Vec::with_capacity(m);
    let mut labels = Vec::with_capacity(m);
    for k in 0..m {
        let (role, label) = if k == 0 && main {
            (Role::Ini, INI.to_string())
        } else if main && k == m - 1 {
            (Role::Fin, FIN.to_string())
        } else if rng.gen_bool(0.3) {
            (Role::Pred, "p".to_string())
        } else {
            (Role::Func, funcs.choose(rng).unwrap().to_string())
        };
        roles.push(role);
        labels.push(label);
    }
    let outdeg: Vec<usize> = roles
        .iter()
        .map(|r| match r {
            Role::Fin => 0,
            Role::Pred => 2,
            Role::Func if spec.nondeterministic && rng.gen_bool(0.3) => 2,
            _ => 1,
        })
        .collect();
    let mut targets: Vec<Vec<usize>> = vec![Vec::new(); m];
    // Spanning edges: each non-root vertex gets one in-edge from an earlier
    // vertex with a free slot.
    for k in 1..m {
        let open: Vec<usize> = (0..k).filter(|&u| targets[u].len() < outdeg[u]).collect();
        let &u = open.choose(rng)?;
        targets[u].push(k);
    }
    for u in 0..m {
        while targets[u].len() < outdeg[u] {
            let choices: Vec<usize> = (1..m).filter(|t| !targets[u].contains(t)).collect();
            targets[u].push(*choices.choose(rng)?);
        }
    }
    let ids: Vec<String> = (0..m).map(|k| format!("v{k}")).collect();
    let vertices: Vec<(&str, &str)> = ids.iter().zip(&labels).map(|(i, l)| (i.as_str(), l.as_str())).collect();
    let mut edges = Vec::new();
    for u in 0..m {
        for (k, &t) in targets[u].iter().enumerate() {
            let label = (roles[u] == Role::Pred).then_some(k as i64);
            edges.push((ids[u].as_str(), ids[t].as_str(), label));
        }
    }
    let mut g = graph(&ids[0], &vertices, &edges);
    g.nondeterministic = spec.nondeterministic;
    Some(g)
}

/// Draws models until one validates under the strict level. The main domain
/// is cut down to the closure of the `ini` images so that it is minimal.
pub fn random_model<R: Rng>(rng: &mut R, spec: &RandomSpec) -> RawModel {
    loop {
        if let Some(m) = attempt(rng, spec) {
            if validate_proto_algorithm(&m, ValidationLevel::Strict).is_ok() {
                return m;
            }
        }
    }
}

fn attempt<R: Rng>(rng: &mut R, spec: &RandomSpec) -> Option<RawModel> {
    let k = spec.domain.max(1);
    let inputs = numbers(0..=rng.gen_range(0..k.min(2)));
    let ini: Vec<u32> = (0..inputs.len()).map(|_| rng.gen_range(0..k)).collect();
    let f: Vec<u32> = (0..k).map(|_| rng.gen_range(0..k)).collect();
    let g: Vec<u32> = (0..k).map(|_| rng.gen_range(0..k)).collect();
    let p: Vec<bool> = (0..k).map(|_| rng.gen_bool(0.5)).collect();
    let fin: Vec<u32> = (0..k).map(|_| rng.gen_range(0..k)).collect();
    let mut sigma: Vec<u32> = (0..k).collect();
    sigma.shuffle(rng);
    let mut inverse = vec![0; k as usize];
    for (x, &y) in sigma.iter().enumerate() {
        inverse[y as usize] = x as u32;
    }

    let mut closure: BTreeSet<u32> = ini.iter().copied().collect();
    loop {
        let mut next = closure.clone();
        for &x in &closure {
            next.insert(f[x as usize]);
            next.insert(g[x as usize]);
            if spec.shared {
                next.insert(sigma[x as usize]);
                next.insert(inverse[x as usize]);
            }
        }
        if next == closure {
            break;
        }
        closure = next;
    }
    let d: Vec<String> = closure.iter().map(|x| x.to_string()).collect();

    let mut funcs = vec!["f", "g"];
    let mut tables = BTreeMap::new();
    tables.insert(INI.to_string(), unary(&inputs, false, |x| x.map(|x| ini[x as usize])));
    tables.insert(FIN.to_string(), unary(&d, true, |x| x.map(|x| fin[x as usize])));
    tables.insert("f".to_string(), unary(&d, true, |x| x.map(|x| f[x as usize])));
    tables.insert("g".to_string(), unary(&d, true, |x| x.map(|x| g[x as usize])));
    tables.insert("p".to_string(), predicate(&d, true, |x| x.is_some_and(|x| p[x as usize])));
    let (setting, getting): (&[&str], &[&str]) = if spec.shared {
        funcs.extend(["put", "get"]);
        tables.insert(
            "put".to_string(),
            binary(&d, true, |a, b| match (a, b) {
                (Some(a), _) => Some(sigma[a as usize]),
                (None, b) => b,
            }),
        );
        tables.insert(
            "get".to_string(),
            binary(&d, true, |a, b| match (a, b) {
                (_, Some(b)) => Some(inverse[b as usize]),
                (a, None) => a,
            }),
        );
        (&["put"], &["get"])
    } else {
        (&[], &[])
    };

    let mut components = vec![random_graph(rng, spec, true, &funcs)?];
    for _ in 1..spec.components {
        components.push(random_graph(rng, spec, false, &funcs)?);
    }
    Some(model(
        alphabet(&[INI, FIN, "f", "g"], setting, getting, &["p"]),
        components,
        d,
        inputs,
        numbers(0..=k - 1),
        tables,
    ))
}
