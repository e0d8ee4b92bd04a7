//! Graphviz export of component graphs and state graphs.

use std::fmt::Write;

use crate::model::{ProtoAlgorithm, StateKind, SymbolKind};
use crate::semantics::StateGraph;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// One cluster per component; vertices labeled `id:symbol`, the root drawn
/// as a double circle and predicate vertices as diamonds.
pub fn model_to_dot(a: &ProtoAlgorithm) -> String {
    let x = a.alphabet();
    let mut out = String::from("digraph model {\n");
    for (k, g) in a.components().iter().enumerate() {
        let c = k + 1;
        writeln!(out, "  subgraph cluster_{c} {{").unwrap();
        let main = if g.is_main() { " (main)" } else { "" };
        writeln!(out, "    label={};", quote(&format!("component {c}{main}"))).unwrap();
        for v in g.vertices() {
            let f = g.label(v);
            let shape = if v == g.root() {
                "doublecircle"
            } else if x.kind(f) == SymbolKind::Predicate {
                "diamond"
            } else {
                "ellipse"
            };
            writeln!(
                out,
                "    {} [label={}, shape={shape}];",
                quote(&format!("{c}:{}", g.id(v))),
                quote(&format!("{}:{}", g.id(v), x.name(f)))
            )
            .unwrap();
        }
        for v in g.vertices() {
            for &(w, l) in g.successors(v) {
                let from = quote(&format!("{c}:{}", g.id(v)));
                let to = quote(&format!("{c}:{}", g.id(w)));
                match l {
                    Some(b) => writeln!(out, "    {from} -> {to} [label=\"{b}\"];").unwrap(),
                    None => writeln!(out, "    {from} -> {to};").unwrap(),
                }
            }
        }
        out.push_str("  }\n");
    }
    out.push_str("}\n");
    out
}

/// States in canonical order; initial states as boxes, internal as
/// ellipses, final as double circles, stuck states filled red.
pub fn state_graph_to_dot(a: &ProtoAlgorithm, g: &StateGraph, keep: &[bool]) -> String {
    let mut out = format!("digraph states_{} {{\n", g.variant());
    for i in (0..g.len()).filter(|&i| keep[i]) {
        let shape = match g.kind(i) {
            StateKind::Initial => "box",
            StateKind::Internal => "ellipse",
            StateKind::Final => "doublecircle",
        };
        let stuck = if g.successors(i).is_empty() {
            ", style=filled, fillcolor=red"
        } else {
            ""
        };
        writeln!(out, "  s{i} [label={}, shape={shape}{stuck}];", quote(&g.state(i).render(a))).unwrap();
    }
    for i in (0..g.len()).filter(|&i| keep[i]) {
        for &j in g.successors(i) {
            writeln!(out, "  s{i} -> s{j};").unwrap();
        }
    }
    out.push_str("}\n");
    out
}
