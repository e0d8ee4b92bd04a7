//! Small helpers for assembling raw models in code.

use std::collections::BTreeMap;

use crate::model::{
    BottomPolicy, RawAlphabet, RawCell, RawDomains, RawEdge, RawGraph, RawInterpretation,
    RawModel, RawTable, RawVertex, BOT_TOKEN,
};

pub(crate) fn strings(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

pub(crate) fn numbers(range: std::ops::RangeInclusive<u32>) -> Vec<String> {
    range.map(|k| k.to_string()).collect()
}

pub(crate) fn alphabet(processing: &[&str], setting: &[&str], getting: &[&str], predicate: &[&str]) -> RawAlphabet {
    RawAlphabet {
        processing: strings(processing),
        setting: strings(setting),
        getting: strings(getting),
        predicate: strings(predicate),
    }
}

pub(crate) fn graph(root: &str, vertices: &[(&str, &str)], edges: &[(&str, &str, Option<i64>)]) -> RawGraph {
    RawGraph {
        vertices: vertices
            .iter()
            .map(|(id, label)| RawVertex {
                id: id.to_string(),
                label: label.to_string(),
            })
            .collect(),
        edges: edges
            .iter()
            .map(|(from, to, label)| RawEdge {
                from: from.to_string(),
                to: to.to_string(),
                label: *label,
            })
            .collect(),
        root: root.to_string(),
        main: None,
        nondeterministic: false,
    }
}

fn token(v: Option<u32>) -> String {
    v.map_or(BOT_TOKEN.to_string(), |k| k.to_string())
}

/// Unary table over `rows` (plus the dummy row when `bot` is set).
pub(crate) fn unary(rows: &[String], bot: bool, f: impl Fn(Option<u32>) -> Option<u32>) -> RawTable {
    let mut t = BTreeMap::new();
    for r in rows {
        let k: u32 = r.parse().expect("numeric value");
        t.insert(r.clone(), RawCell::Token(token(f(Some(k)))));
    }
    if bot {
        t.insert(BOT_TOKEN.to_string(), RawCell::Token(token(f(None))));
    }
    RawTable::Unary(t)
}

pub(crate) fn predicate(rows: &[String], bot: bool, f: impl Fn(Option<u32>) -> bool) -> RawTable {
    let mut t = BTreeMap::new();
    for r in rows {
        let k: u32 = r.parse().expect("numeric value");
        t.insert(r.clone(), RawCell::Int(f(Some(k)) as i64));
    }
    if bot {
        t.insert(BOT_TOKEN.to_string(), RawCell::Int(f(None) as i64));
    }
    RawTable::Unary(t)
}

pub(crate) fn binary(
    rows: &[String],
    bot: bool,
    f: impl Fn(Option<u32>, Option<u32>) -> Option<u32>,
) -> RawTable {
    let mut keys: Vec<Option<u32>> = rows.iter().map(|r| Some(r.parse().expect("numeric value"))).collect();
    if bot {
        keys.push(None);
    }
    let mut t = BTreeMap::new();
    for &p in &keys {
        let mut row = BTreeMap::new();
        for &s in &keys {
            row.insert(token(s), RawCell::Token(token(f(p, s))));
        }
        t.insert(token(p), row);
    }
    RawTable::Binary(t)
}

pub(crate) fn model(
    alphabet: RawAlphabet,
    components: Vec<RawGraph>,
    main: Vec<String>,
    input: Vec<String>,
    output: Vec<String>,
    tables: BTreeMap<String, RawTable>,
) -> RawModel {
    RawModel {
        alphabet,
        components,
        interpretation: RawInterpretation {
            domains: RawDomains { main, input, output },
            bottom_policy: BottomPolicy::Lifted,
            tables,
        },
        provenance: None,
    }
}
