use std::collections::{HashMap, HashSet};

use super::alphabet::{Alphabet, Symbol, SymbolKind};
use super::error::ModelError;
use super::raw::{RawEdge, RawGraph, RawVertex};

/// Index of a vertex inside one component graph.
pub type Vertex = u32;

/// A validated rooted labeled digraph for one thread of control.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentGraph {
    ids: Vec<String>,
    labels: Vec<Symbol>,
    /// Out-edges per vertex, sorted by target.
    succ: Vec<Vec<(Vertex, Option<u8>)>>,
    indegree: Vec<usize>,
    root: Vertex,
    nondet_allowed: bool,
    main: bool,
}

impl ComponentGraph {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        0..self.ids.len() as Vertex
    }

    pub fn id(&self, v: Vertex) -> &str {
        &self.ids[v as usize]
    }

    pub fn vertex(&self, id: &str) -> Option<Vertex> {
        self.ids.iter().position(|x| x == id).map(|i| i as Vertex)
    }

    pub fn label(&self, v: Vertex) -> Symbol {
        self.labels[v as usize]
    }

    pub fn successors(&self, v: Vertex) -> &[(Vertex, Option<u8>)] {
        &self.succ[v as usize]
    }

    pub fn outdegree(&self, v: Vertex) -> usize {
        self.succ[v as usize].len()
    }

    pub fn indegree(&self, v: Vertex) -> usize {
        self.indegree[v as usize]
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn root(&self) -> Vertex {
        self.root
    }

    pub fn is_main(&self) -> bool {
        self.main
    }

    pub fn nondet_allowed(&self) -> bool {
        self.nondet_allowed
    }

    /// True when every function vertex other than `fin` has exactly one
    /// successor, i.e. the graph also satisfies the deterministic rule.
    pub fn is_deterministic(&self, alphabet: &Alphabet) -> bool {
        self.vertices()
            .filter(|&v| alphabet.is_stepping_function(self.label(v)))
            .all(|v| self.outdegree(v) == 1)
    }

    pub fn to_raw(&self, alphabet: &Alphabet) -> RawGraph {
        RawGraph {
            vertices: self
                .vertices()
                .map(|v| RawVertex {
                    id: self.id(v).to_string(),
                    label: alphabet.name(self.label(v)).to_string(),
                })
                .collect(),
            edges: self
                .vertices()
                .flat_map(|v| {
                    self.successors(v).iter().map(move |&(w, l)| RawEdge {
                        from: self.id(v).to_string(),
                        to: self.id(w).to_string(),
                        label: l.map(i64::from),
                    })
                })
                .collect(),
            root: self.id(self.root).to_string(),
            main: Some(self.main),
            nondeterministic: self.nondet_allowed,
        }
    }
}

/// Checks every structural clause for component graphs; `nondet_allowed`
/// relaxes the function-vertex outdegree rule to "at least one".
///
/// `component` is only used to tag errors.
pub fn validate_component_graph(
    raw: &RawGraph,
    alphabet: &Alphabet,
    nondet_allowed: bool,
    component: usize,
) -> Result<ComponentGraph, Vec<ModelError>> {
    let mut errors = Vec::new();
    let mut index: HashMap<&str, Vertex> = HashMap::new();
    let mut ids = Vec::new();
    let mut labels: Vec<Option<Symbol>> = Vec::new();

    for v in &raw.vertices {
        if index.contains_key(v.id.as_str()) {
            errors.push(ModelError::DuplicateVertex {
                component,
                vertex: v.id.clone(),
            });
            continue;
        }
        index.insert(&v.id, ids.len() as Vertex);
        ids.push(v.id.clone());
        let label = alphabet.lookup(&v.label);
        if label.is_none() {
            errors.push(ModelError::UnknownLabel {
                component,
                vertex: v.id.clone(),
                label: v.label.clone(),
            });
        }
        labels.push(label);
    }

    let root = index.get(raw.root.as_str()).copied();
    if root.is_none() {
        errors.push(ModelError::UnknownRoot {
            component,
            root: raw.root.clone(),
        });
    }

    let n = ids.len();
    let mut succ: Vec<Vec<(Vertex, Option<u8>)>> = vec![Vec::new(); n];
    let mut seen = HashSet::new();
    for e in &raw.edges {
        let (Some(&a), Some(&b)) = (index.get(e.from.as_str()), index.get(e.to.as_str())) else {
            for end in [&e.from, &e.to] {
                if !index.contains_key(end.as_str()) {
                    errors.push(ModelError::UnknownVertex {
                        component,
                        vertex: end.clone(),
                    });
                }
            }
            continue;
        };
        if !seen.insert((a, b)) {
            errors.push(ModelError::DuplicateEdge {
                component,
                from: e.from.clone(),
                to: e.to.clone(),
            });
            continue;
        }
        let label = match e.label {
            None => None,
            Some(l @ (0 | 1)) => Some(l as u8),
            Some(l) => {
                errors.push(ModelError::InvalidEdgeLabel {
                    component,
                    from: e.from.clone(),
                    to: e.to.clone(),
                    label: l,
                });
                None
            }
        };
        succ[a as usize].push((b, label));
    }
    for s in &mut succ {
        s.sort_unstable();
    }
    let mut indegree = vec![0usize; n];
    for s in &succ {
        for &(w, _) in s {
            indegree[w as usize] += 1;
        }
    }

    let Some(root) = root else {
        return Err(errors);
    };

    for v in 0..n {
        let vid = &ids[v];
        if v as Vertex == root {
            if indegree[v] != 0 {
                errors.push(ModelError::RootHasPredecessor {
                    component,
                    root: vid.clone(),
                    indegree: indegree[v],
                });
            }
        } else if indegree[v] == 0 {
            errors.push(ModelError::NonRootWithoutPredecessor {
                component,
                vertex: vid.clone(),
            });
        }

        let Some(label) = labels[v] else { continue };
        let out = &succ[v];
        if label == alphabet.ini() && v as Vertex != root {
            errors.push(ModelError::IniNotAtRoot {
                component,
                vertex: vid.clone(),
            });
        }
        if label == alphabet.fin() && !out.is_empty() {
            errors.push(ModelError::FinHasSuccessors {
                component,
                vertex: vid.clone(),
                outdegree: out.len(),
            });
        }
        if alphabet.is_stepping_function(label) {
            let ok = if nondet_allowed {
                !out.is_empty()
            } else {
                out.len() == 1
            };
            if !ok {
                errors.push(ModelError::FunctionOutdegree {
                    component,
                    vertex: vid.clone(),
                    outdegree: out.len(),
                    expected: if nondet_allowed { "at least 1" } else { "1" },
                });
            }
            for &(w, l) in out {
                if l.is_some() {
                    errors.push(ModelError::FunctionEdgeLabeled {
                        component,
                        from: vid.clone(),
                        to: ids[w as usize].clone(),
                    });
                }
            }
        }
        if alphabet.kind(label) == SymbolKind::Predicate {
            if out.len() != 2 {
                errors.push(ModelError::PredicateOutdegree {
                    component,
                    vertex: vid.clone(),
                    outdegree: out.len(),
                });
            } else {
                let mut unlabeled = false;
                for &(w, l) in out {
                    if l.is_none() {
                        unlabeled = true;
                        errors.push(ModelError::PredicateEdgeUnlabeled {
                            component,
                            from: vid.clone(),
                            to: ids[w as usize].clone(),
                        });
                    }
                }
                if !unlabeled && out[0].1 == out[1].1 {
                    errors.push(ModelError::PredicateLabelsNotDistinct {
                        component,
                        vertex: vid.clone(),
                    });
                }
            }
        }
    }

    let root_is_ini = labels[root as usize] == Some(alphabet.ini());
    let has_fin = labels.iter().any(|l| *l == Some(alphabet.fin()));
    if root_is_ini != has_fin {
        errors.push(ModelError::MainIffFin {
            component,
            root_is_ini,
            has_fin,
        });
    }
    if let Some(declared) = raw.main {
        if declared != root_is_ini {
            errors.push(ModelError::MainFlagMismatch {
                component,
                declared,
            });
        }
    }

    // A cycle avoids every cycle-breaking vertex iff it lives in the
    // subgraph induced by the remaining (known-label) vertices.
    let inert: Vec<bool> = labels
        .iter()
        .map(|l| matches!(l, Some(s) if !alphabet.is_cycle_breaking(*s)))
        .collect();
    if let Some(cycle) = find_cycle(&succ, &inert) {
        errors.push(ModelError::CycleWithoutFunctionVertex {
            component,
            cycle: cycle.into_iter().map(|v| ids[v as usize].clone()).collect(),
        });
    }

    if !errors.is_empty() {
        return Err(errors);
    }
    Ok(ComponentGraph {
        ids,
        labels: labels.into_iter().map(Option::unwrap).collect(),
        succ,
        indegree,
        root,
        nondet_allowed,
        main: root_is_ini,
    })
}

/// Finds a cycle within the vertices flagged in `allowed`, returned as
/// `v_1 .. v_n` (the closing `v_1` is implied).
fn find_cycle(succ: &[Vec<(Vertex, Option<u8>)>], allowed: &[bool]) -> Option<Vec<Vertex>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        OnPath,
        Done,
    }
    let n = succ.len();
    let mut mark = vec![Mark::New; n];
    for start in 0..n {
        if !allowed[start] || mark[start] != Mark::New {
            continue;
        }
        let mut path: Vec<(usize, usize)> = vec![(start, 0)];
        mark[start] = Mark::OnPath;
        while let Some(&mut (v, ref mut next)) = path.last_mut() {
            if *next < succ[v].len() {
                let w = succ[v][*next].0 as usize;
                *next += 1;
                if !allowed[w] {
                    continue;
                }
                match mark[w] {
                    Mark::New => {
                        mark[w] = Mark::OnPath;
                        path.push((w, 0));
                    }
                    Mark::OnPath => {
                        let at = path.iter().position(|&(x, _)| x == w).unwrap();
                        return Some(path[at..].iter().map(|&(x, _)| x as Vertex).collect());
                    }
                    Mark::Done => {}
                }
            } else {
                mark[v] = Mark::Done;
                path.pop();
            }
        }
    }
    None
}
