//! Unvalidated model structures, as produced by the document parser or by
//! generators. Validators in the sibling modules turn these into checked
//! objects.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Spelling of the dummy value in raw tables and documents.
pub const BOT_TOKEN: &str = "_bot";

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawAlphabet {
    pub processing: Vec<String>,
    pub setting: Vec<String>,
    pub getting: Vec<String>,
    pub predicate: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawVertex {
    pub id: String,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawEdge {
    pub from: String,
    pub to: String,
    pub label: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawGraph {
    pub vertices: Vec<RawVertex>,
    pub edges: Vec<RawEdge>,
    pub root: String,
    /// Declared main flag; checked against the root label when present.
    pub main: Option<bool>,
    /// Selects the relaxed outdegree rule for function vertices.
    pub nondeterministic: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BottomPolicy {
    /// Steps fire only when every operand is a proper value.
    Strict,
    /// Tables also cover dummy-valued operands.
    #[default]
    Lifted,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValidationLevel {
    #[default]
    Strict,
    /// Minimality and the setting/getting laws only produce warnings.
    Lenient,
}

/// A table entry: a value token for functions, a 0/1 integer for predicates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawCell {
    Int(i64),
    Token(String),
}

/// One function or predicate table, keyed by value tokens (`_bot` allowed).
/// Binary tables are keyed first by the private argument, then by the shared
/// one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RawTable {
    Unary(BTreeMap<String, RawCell>),
    Binary(BTreeMap<String, BTreeMap<String, RawCell>>),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawDomains {
    pub main: Vec<String>,
    pub input: Vec<String>,
    pub output: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawInterpretation {
    pub domains: RawDomains,
    pub bottom_policy: BottomPolicy,
    pub tables: BTreeMap<String, RawTable>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawModel {
    pub alphabet: RawAlphabet,
    pub components: Vec<RawGraph>,
    pub interpretation: RawInterpretation,
    pub provenance: Option<BTreeMap<String, String>>,
}

/// A state written with value tokens; `None` stands for the dummy value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawState {
    pub input: Option<String>,
    pub control: Option<RawControl>,
    pub output: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawControl {
    pub vertices: Vec<Option<String>>,
    pub privs: Vec<Option<String>>,
    pub shared: Option<String>,
    /// 1-based component index.
    pub sched: Option<usize>,
}
