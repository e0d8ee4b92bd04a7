//! The JSON model document: parsing with positioned errors and canonical
//! serialization.

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;
use serde_json::{json, Map, Value as Json};
use thiserror::Error;

use crate::model::{
    BottomPolicy, ProtoAlgorithm, RawAlphabet, RawCell, RawDomains, RawEdge, RawGraph,
    RawInterpretation, RawModel, RawTable, RawVertex, BOT_TOKEN,
};

/// A document problem. Positions are JSON pointers into the document, except
/// for syntax errors, which carry a line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "kind")]
pub enum ParseError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{path}: unknown field `{field}`")]
    UnknownField { path: String, field: String },
    #[error("{path}: missing field `{field}`")]
    MissingField { path: String, field: String },
    #[error("{path}: expected {expected}")]
    WrongType { path: String, expected: &'static str },
    #[error("{path}: duplicate id `{id}`")]
    DuplicateId { path: String, id: String },
    #[error("{path}: `{value}` is not a declared value")]
    UndeclaredValue { path: String, value: String },
    #[error("{path}: edge label {label} is not 0 or 1")]
    InvalidEdgeLabel { path: String, label: String },
    #[error("{path}: {detail}")]
    InvalidValue { path: String, detail: String },
}

fn pointer(path: &str, key: &str) -> String {
    format!("{path}/{}", key.replace('~', "~0").replace('/', "~1"))
}

struct Walker {
    errors: Vec<ParseError>,
}

impl Walker {
    fn wrong(&mut self, path: &str, expected: &'static str) {
        self.errors.push(ParseError::WrongType {
            path: path.to_string(),
            expected,
        });
    }

    /// An object whose keys are among `required` and `optional`.
    fn object<'v>(&mut self, v: &'v Json, path: &str, required: &[&str], optional: &[&str]) -> Option<&'v Map<String, Json>> {
        let Some(map) = v.as_object() else {
            self.wrong(path, "an object");
            return None;
        };
        for k in map.keys() {
            if !required.contains(&k.as_str()) && !optional.contains(&k.as_str()) {
                self.errors.push(ParseError::UnknownField {
                    path: path.to_string(),
                    field: k.clone(),
                });
            }
        }
        for r in required {
            if !map.contains_key(*r) {
                self.errors.push(ParseError::MissingField {
                    path: path.to_string(),
                    field: r.to_string(),
                });
            }
        }
        Some(map)
    }

    fn string(&mut self, v: &Json, path: &str) -> Option<String> {
        match v.as_str() {
            Some(s) => Some(s.to_string()),
            None => {
                self.wrong(path, "a string");
                None
            }
        }
    }

    fn strings(&mut self, v: Option<&Json>, path: &str) -> Vec<String> {
        let Some(v) = v else { return Vec::new() };
        let Some(items) = v.as_array() else {
            self.wrong(path, "an array of strings");
            return Vec::new();
        };
        items
            .iter()
            .enumerate()
            .filter_map(|(k, x)| self.string(x, &format!("{path}/{k}")))
            .collect()
    }

    fn bool(&mut self, v: Option<&Json>, path: &str) -> Option<bool> {
        let v = v?;
        match v.as_bool() {
            Some(b) => Some(b),
            None => {
                self.wrong(path, "a boolean");
                None
            }
        }
    }
}

/// Parses a model document into raw structures. All problems found are
/// reported, not just the first.
pub fn parse_model(text: &str) -> Result<RawModel, Vec<ParseError>> {
    let doc: Json = serde_json::from_str(text).map_err(|e| {
        vec![ParseError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }]
    })?;
    let mut w = Walker { errors: Vec::new() };
    let Some(top) = w.object(
        &doc,
        "",
        &["alphabet", "domains", "interpretation", "components"],
        &["provenance"],
    ) else {
        return Err(w.errors);
    };

    let alphabet = match top.get("alphabet") {
        Some(v) => match w.object(v, "/alphabet", &["processing"], &["setting", "getting", "predicate"]) {
            Some(a) => RawAlphabet {
                processing: w.strings(a.get("processing"), "/alphabet/processing"),
                setting: w.strings(a.get("setting"), "/alphabet/setting"),
                getting: w.strings(a.get("getting"), "/alphabet/getting"),
                predicate: w.strings(a.get("predicate"), "/alphabet/predicate"),
            },
            None => RawAlphabet::default(),
        },
        None => RawAlphabet::default(),
    };

    let domains = match top.get("domains") {
        Some(v) => match w.object(v, "/domains", &["main", "input", "output"], &[]) {
            Some(d) => RawDomains {
                main: w.strings(d.get("main"), "/domains/main"),
                input: w.strings(d.get("input"), "/domains/input"),
                output: w.strings(d.get("output"), "/domains/output"),
            },
            None => RawDomains::default(),
        },
        None => RawDomains::default(),
    };
    let declared: HashSet<&str> = domains
        .main
        .iter()
        .chain(&domains.input)
        .chain(&domains.output)
        .map(String::as_str)
        .chain([BOT_TOKEN])
        .collect();

    let mut policy = BottomPolicy::default();
    let mut tables = BTreeMap::new();
    if let Some(v) = top.get("interpretation") {
        if let Some(i) = w.object(v, "/interpretation", &["tables"], &["bottom_policy"]) {
            if let Some(p) = i.get("bottom_policy") {
                match p.as_str() {
                    Some("strict") => policy = BottomPolicy::Strict,
                    Some("lifted") => policy = BottomPolicy::Lifted,
                    _ => w.errors.push(ParseError::InvalidValue {
                        path: "/interpretation/bottom_policy".into(),
                        detail: "expected \"strict\" or \"lifted\"".into(),
                    }),
                }
            }
            if let Some(t) = i.get("tables") {
                match t.as_object() {
                    Some(t) => {
                        for (name, table) in t {
                            let path = pointer("/interpretation/tables", name);
                            if let Some(t) = parse_table(&mut w, table, &path, &declared) {
                                tables.insert(name.clone(), t);
                            }
                        }
                    }
                    None => w.wrong("/interpretation/tables", "an object"),
                }
            }
        }
    }

    let mut components = Vec::new();
    match top.get("components") {
        Some(Json::Array(items)) => {
            for (k, c) in items.iter().enumerate() {
                if let Some(g) = parse_component(&mut w, c, &format!("/components/{k}")) {
                    components.push(g);
                }
            }
        }
        Some(_) => w.wrong("/components", "an array"),
        None => {}
    }

    let provenance = match top.get("provenance") {
        None => None,
        Some(Json::Object(p)) => {
            let mut out = BTreeMap::new();
            for (k, v) in p {
                if let Some(s) = w.string(v, &pointer("/provenance", k)) {
                    out.insert(k.clone(), s);
                }
            }
            Some(out)
        }
        Some(_) => {
            w.wrong("/provenance", "an object of strings");
            None
        }
    };

    if !w.errors.is_empty() {
        return Err(w.errors);
    }
    Ok(RawModel {
        alphabet,
        components,
        interpretation: RawInterpretation {
            domains,
            bottom_policy: policy,
            tables,
        },
        provenance,
    })
}

fn parse_cell(w: &mut Walker, v: &Json, path: &str, declared: &HashSet<&str>) -> Option<RawCell> {
    match v {
        Json::String(s) => {
            if !declared.contains(s.as_str()) {
                w.errors.push(ParseError::UndeclaredValue {
                    path: path.to_string(),
                    value: s.clone(),
                });
                return None;
            }
            Some(RawCell::Token(s.clone()))
        }
        Json::Number(n) => match n.as_i64() {
            Some(i) => Some(RawCell::Int(i)),
            None => {
                w.wrong(path, "a value name or an integer");
                None
            }
        },
        _ => {
            w.wrong(path, "a value name or an integer");
            None
        }
    }
}

fn check_key(w: &mut Walker, key: &str, path: &str, declared: &HashSet<&str>) -> bool {
    if declared.contains(key) {
        return true;
    }
    w.errors.push(ParseError::UndeclaredValue {
        path: path.to_string(),
        value: key.to_string(),
    });
    false
}

/// A table is a mapping from arguments to results; nested mappings make a
/// binary table.
fn parse_table(w: &mut Walker, v: &Json, path: &str, declared: &HashSet<&str>) -> Option<RawTable> {
    let Some(rows) = v.as_object() else {
        w.wrong(path, "an object mapping arguments to results");
        return None;
    };
    let binary = rows.values().next().is_some_and(Json::is_object);
    if binary {
        let mut out = BTreeMap::new();
        for (k, row) in rows {
            let rp = pointer(path, k);
            if !check_key(w, k, &rp, declared) {
                continue;
            }
            let Some(row) = row.as_object() else {
                w.wrong(&rp, "an object mapping shared arguments to results");
                continue;
            };
            let mut cells = BTreeMap::new();
            for (k2, c) in row {
                let cp = pointer(&rp, k2);
                if check_key(w, k2, &cp, declared) {
                    if let Some(c) = parse_cell(w, c, &cp, declared) {
                        cells.insert(k2.clone(), c);
                    }
                }
            }
            out.insert(k.clone(), cells);
        }
        Some(RawTable::Binary(out))
    } else {
        let mut out = BTreeMap::new();
        for (k, c) in rows {
            let cp = pointer(path, k);
            if check_key(w, k, &cp, declared) {
                if let Some(c) = parse_cell(w, c, &cp, declared) {
                    out.insert(k.clone(), c);
                }
            }
        }
        Some(RawTable::Unary(out))
    }
}

fn parse_component(w: &mut Walker, v: &Json, path: &str) -> Option<RawGraph> {
    let c = w.object(v, path, &["root", "vertices", "edges"], &["main", "nondeterministic"])?;
    let root = c.get("root").and_then(|r| w.string(r, &format!("{path}/root")));
    let main = w.bool(c.get("main"), &format!("{path}/main"));
    let nondeterministic = w.bool(c.get("nondeterministic"), &format!("{path}/nondeterministic")).unwrap_or(false);

    let mut vertices = Vec::new();
    let mut ids = HashSet::new();
    match c.get("vertices") {
        Some(Json::Array(vs)) => {
            for (k, v) in vs.iter().enumerate() {
                let vp = format!("{path}/vertices/{k}");
                let Some(o) = w.object(v, &vp, &["id", "label"], &[]) else { continue };
                let id = o.get("id").and_then(|x| w.string(x, &format!("{vp}/id")));
                let label = o.get("label").and_then(|x| w.string(x, &format!("{vp}/label")));
                if let (Some(id), Some(label)) = (id, label) {
                    if !ids.insert(id.clone()) {
                        w.errors.push(ParseError::DuplicateId {
                            path: format!("{vp}/id"),
                            id,
                        });
                        continue;
                    }
                    vertices.push(RawVertex { id, label });
                }
            }
        }
        Some(_) => w.wrong(&format!("{path}/vertices"), "an array"),
        None => {}
    }

    let mut edges = Vec::new();
    match c.get("edges") {
        Some(Json::Array(es)) => {
            for (k, e) in es.iter().enumerate() {
                let ep = format!("{path}/edges/{k}");
                let Some(o) = w.object(e, &ep, &["from", "to"], &["label"]) else { continue };
                let from = o.get("from").and_then(|x| w.string(x, &format!("{ep}/from")));
                let to = o.get("to").and_then(|x| w.string(x, &format!("{ep}/to")));
                let label = match o.get("label") {
                    None | Some(Json::Null) => Some(None),
                    Some(Json::Number(n)) if matches!(n.as_i64(), Some(0 | 1)) => Some(n.as_i64()),
                    Some(other) => {
                        w.errors.push(ParseError::InvalidEdgeLabel {
                            path: format!("{ep}/label"),
                            label: other.to_string(),
                        });
                        None
                    }
                };
                if let (Some(from), Some(to), Some(label)) = (from, to, label) {
                    edges.push(RawEdge { from, to, label });
                }
            }
        }
        Some(_) => w.wrong(&format!("{path}/edges"), "an array"),
        None => {}
    }
    Some(RawGraph {
        vertices,
        edges,
        root: root?,
        main,
        nondeterministic,
    })
}

fn table_json(t: &RawTable) -> Json {
    let cell = |c: &RawCell| match c {
        RawCell::Int(i) => json!(i),
        RawCell::Token(s) => json!(s),
    };
    match t {
        RawTable::Unary(rows) => Json::Object(rows.iter().map(|(k, c)| (k.clone(), cell(c))).collect()),
        RawTable::Binary(rows) => Json::Object(
            rows.iter()
                .map(|(k, row)| {
                    (
                        k.clone(),
                        Json::Object(row.iter().map(|(k2, c)| (k2.clone(), cell(c))).collect()),
                    )
                })
                .collect(),
        ),
    }
}

/// Canonical document text: object keys sorted, lists in declared order,
/// two-space indentation and a trailing newline.
pub fn serialize_raw(m: &RawModel) -> String {
    let components: Vec<Json> = m
        .components
        .iter()
        .map(|g| {
            let mut o = Map::new();
            o.insert("root".into(), json!(g.root));
            if let Some(main) = g.main {
                o.insert("main".into(), json!(main));
            }
            o.insert("nondeterministic".into(), json!(g.nondeterministic));
            o.insert(
                "vertices".into(),
                Json::Array(g.vertices.iter().map(|v| json!({"id": v.id, "label": v.label})).collect()),
            );
            o.insert(
                "edges".into(),
                Json::Array(
                    g.edges
                        .iter()
                        .map(|e| {
                            let mut x = Map::new();
                            x.insert("from".into(), json!(e.from));
                            x.insert("to".into(), json!(e.to));
                            if let Some(l) = e.label {
                                x.insert("label".into(), json!(l));
                            }
                            Json::Object(x)
                        })
                        .collect(),
                ),
            );
            Json::Object(o)
        })
        .collect();
    let tables: Map<String, Json> = m
        .interpretation
        .tables
        .iter()
        .map(|(k, t)| (k.clone(), table_json(t)))
        .collect();
    let policy = match m.interpretation.bottom_policy {
        BottomPolicy::Strict => "strict",
        BottomPolicy::Lifted => "lifted",
    };
    let mut doc = Map::new();
    doc.insert(
        "alphabet".into(),
        json!({
            "processing": m.alphabet.processing,
            "setting": m.alphabet.setting,
            "getting": m.alphabet.getting,
            "predicate": m.alphabet.predicate,
        }),
    );
    doc.insert(
        "domains".into(),
        json!({
            "main": m.interpretation.domains.main,
            "input": m.interpretation.domains.input,
            "output": m.interpretation.domains.output,
        }),
    );
    doc.insert(
        "interpretation".into(),
        json!({"bottom_policy": policy, "tables": Json::Object(tables)}),
    );
    doc.insert("components".into(), Json::Array(components));
    if let Some(p) = &m.provenance {
        doc.insert("provenance".into(), json!(p));
    }
    let mut s = serde_json::to_string_pretty(&Json::Object(doc)).expect("serializable");
    s.push('\n');
    s
}

pub fn serialize_model(a: &ProtoAlgorithm) -> String {
    serialize_raw(&a.to_raw())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{countdown, handoff};

    #[test]
    fn fixtures_round_trip() {
        for m in [countdown(3), handoff(2)] {
            let text = serialize_raw(&m);
            let back = parse_model(&text).unwrap();
            assert_eq!(serialize_raw(&back), text);
        }
    }

    #[test]
    fn empty_document_is_a_syntax_error() {
        assert!(matches!(parse_model("").unwrap_err()[..], [ParseError::Syntax { line: 1, .. }]));
    }

    #[test]
    fn edge_label_two_is_reported_with_its_path() {
        let text = serialize_raw(&countdown(3)).replacen("\"label\": 1", "\"label\": 2", 1);
        let errs = parse_model(&text).unwrap_err();
        assert_eq!(
            errs,
            [ParseError::InvalidEdgeLabel {
                path: "/components/0/edges/2/label".into(),
                label: "2".into()
            }]
        );
    }

    #[test]
    fn unknown_fields_and_undeclared_values() {
        let mut doc: Json = serde_json::from_str(&serialize_raw(&countdown(1))).unwrap();
        doc["components"][0]["colour"] = json!("red");
        doc["interpretation"]["tables"]["dec"]["1"] = json!("7");
        let errs = parse_model(&doc.to_string()).unwrap_err();
        assert!(errs.contains(&ParseError::UnknownField {
            path: "/components/0".into(),
            field: "colour".into()
        }));
        assert!(errs.contains(&ParseError::UndeclaredValue {
            path: "/interpretation/tables/dec/1".into(),
            value: "7".into()
        }));
    }

    #[test]
    fn duplicate_vertex_ids() {
        let mut doc: Json = serde_json::from_str(&serialize_raw(&countdown(1))).unwrap();
        doc["components"][0]["vertices"][1]["id"] = json!("r");
        let errs = parse_model(&doc.to_string()).unwrap_err();
        assert!(matches!(&errs[..], [ParseError::DuplicateId { id, .. }] if id == "r"));
    }
}
