use std::fmt;

use serde::Serialize;
use thiserror::Error;

use super::alphabet::SymbolKind;

/// Structural clauses a component graph must satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum GraphClause {
    /// Vertex labels come from the alphabet, edge labels from {0, 1}.
    LabelSets,
    /// The root is exactly the vertex with indegree 0.
    RootIndegree,
    /// `ini` labels only the root.
    IniAtRoot,
    /// `fin` vertices have no successors.
    FinOutdegree,
    /// Function vertices have one (or, nondeterministically, at least one)
    /// unlabeled out-edge.
    FunctionVertex,
    /// Predicate vertices have two out-edges with distinct labels.
    PredicateVertex,
    /// The root is labeled `ini` iff some vertex is labeled `fin`.
    MainIffFin,
    /// Every cycle passes through a vertex labeled by a non-reserved function.
    CycleCondition,
}

impl GraphClause {
    pub const ALL: [GraphClause; 8] = [
        GraphClause::LabelSets,
        GraphClause::RootIndegree,
        GraphClause::IniAtRoot,
        GraphClause::FinOutdegree,
        GraphClause::FunctionVertex,
        GraphClause::PredicateVertex,
        GraphClause::MainIffFin,
        GraphClause::CycleCondition,
    ];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LawKind {
    /// f(d, f(d, d')) = f(d, d') for a setter.
    SetterIdempotent,
    /// Some getter recovers the private argument of a setter.
    SetterHasGetter,
    /// f(f(d, d'), d') = f(d, d') for a getter.
    GetterIdempotent,
    /// Some setter recovers the shared argument of a getter.
    GetterHasSetter,
}

impl fmt::Display for LawKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LawKind::SetterIdempotent => "f(d, f(d, d')) = f(d, d')",
            LawKind::SetterHasGetter => "exists getter g: g(d, f(d, d')) = d",
            LawKind::GetterIdempotent => "f(f(d, d'), d') = f(d, d')",
            LawKind::GetterHasSetter => "exists setter g: g(f(d, d'), d') = d'",
        };
        f.write_str(s)
    }
}

/// Every way a model can fail validation. Validators collect all of them.
#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize)]
pub enum ModelError {
    #[error("symbol `{symbol}` is declared as both {first:?} and {second:?}")]
    OverlappingSymbolClasses {
        symbol: String,
        first: SymbolKind,
        second: SymbolKind,
    },
    #[error("reserved symbol `{symbol}` is missing from the processing symbols")]
    MissingReservedSymbol { symbol: String },
    #[error("reserved symbol `{symbol}` declared as {kind:?}")]
    ReservedSymbolMisplaced { symbol: String, kind: SymbolKind },
    #[error("symbol `{symbol}` declared twice")]
    DuplicateSymbol { symbol: String },
    #[error("empty symbol name")]
    EmptySymbolName,

    #[error("component {component}: vertex `{vertex}` declared twice")]
    DuplicateVertex { component: usize, vertex: String },
    #[error("component {component}: edge endpoint `{vertex}` is not a vertex")]
    UnknownVertex { component: usize, vertex: String },
    #[error("component {component}: edge {from} -> {to} declared twice")]
    DuplicateEdge {
        component: usize,
        from: String,
        to: String,
    },
    #[error("component {component}: root `{root}` is not a vertex")]
    UnknownRoot { component: usize, root: String },
    #[error("component {component}: vertex `{vertex}` has label `{label}` outside the alphabet")]
    UnknownLabel {
        component: usize,
        vertex: String,
        label: String,
    },
    #[error("component {component}: edge {from} -> {to} has label {label}, expected 0 or 1")]
    InvalidEdgeLabel {
        component: usize,
        from: String,
        to: String,
        label: i64,
    },
    #[error("component {component}: root `{root}` has indegree {indegree}")]
    RootHasPredecessor {
        component: usize,
        root: String,
        indegree: usize,
    },
    #[error("component {component}: non-root vertex `{vertex}` has indegree 0")]
    NonRootWithoutPredecessor { component: usize, vertex: String },
    #[error("component {component}: `ini` labels non-root vertex `{vertex}`")]
    IniNotAtRoot { component: usize, vertex: String },
    #[error("component {component}: `fin` vertex `{vertex}` has outdegree {outdegree}")]
    FinHasSuccessors {
        component: usize,
        vertex: String,
        outdegree: usize,
    },
    #[error("component {component}: function vertex `{vertex}` has outdegree {outdegree}, expected {expected}")]
    FunctionOutdegree {
        component: usize,
        vertex: String,
        outdegree: usize,
        expected: &'static str,
    },
    #[error("component {component}: out-edge {from} -> {to} of a function vertex is labeled")]
    FunctionEdgeLabeled {
        component: usize,
        from: String,
        to: String,
    },
    #[error("component {component}: predicate vertex `{vertex}` has outdegree {outdegree}, expected 2")]
    PredicateOutdegree {
        component: usize,
        vertex: String,
        outdegree: usize,
    },
    #[error("component {component}: out-edge {from} -> {to} of a predicate vertex is unlabeled")]
    PredicateEdgeUnlabeled {
        component: usize,
        from: String,
        to: String,
    },
    #[error("component {component}: predicate out-edges must carry distinct labels at `{vertex}`")]
    PredicateLabelsNotDistinct { component: usize, vertex: String },
    #[error("component {component}: root labeled ini is {root_is_ini} but a fin vertex exists is {has_fin}")]
    MainIffFin {
        component: usize,
        root_is_ini: bool,
        has_fin: bool,
    },
    #[error("component {component}: cycle {cycle:?} has no function vertex")]
    CycleWithoutFunctionVertex { component: usize, cycle: Vec<String> },
    #[error("component {component}: declared main flag {declared} disagrees with its root label")]
    MainFlagMismatch { component: usize, declared: bool },

    #[error("{domain} domain is empty")]
    EmptyDomain { domain: &'static str },
    #[error("value `{value}` listed twice in the {domain} domain")]
    DuplicateValue { domain: &'static str, value: String },
    #[error("the dummy value may not be listed in the {domain} domain")]
    BotInDomain { domain: &'static str },
    #[error("no table for symbol `{symbol}`")]
    MissingTable { symbol: String },
    #[error("table given for `{symbol}`, which is not in the alphabet")]
    UnexpectedTable { symbol: String },
    #[error("table for `{symbol}` lacks row {row}")]
    IncompleteTable { symbol: String, row: String },
    #[error("table for `{symbol}`: {detail}")]
    SignatureMismatch { symbol: String, detail: String },
    #[error("predicate `{symbol}` returns the dummy value on row {row}")]
    PredicateReturnsBot { symbol: String, row: String },
    #[error("`fin` returns the dummy value on proper row {row}; that step never reaches a final state")]
    FinReturnsBot { row: String },
    #[error("main domain is not minimal: {closed_subset:?} is a closed proper subset")]
    NonMinimalDomain { closed_subset: Vec<String> },
    #[error("`{symbol}` violates {law} at d = {d}, d' = {d_prime}")]
    SettingGettingLawViolated {
        symbol: String,
        law: LawKind,
        d: String,
        d_prime: String,
    },

    #[error("no component is a main component")]
    NoMainComponent,
    #[error("components {components:?} are all main components")]
    MultipleMainComponents { components: Vec<usize> },
    #[error("no components")]
    NoComponents,

    #[error("ill-formed state: {clause}")]
    IllFormedState { clause: String },
}

impl ModelError {
    /// The component-graph clause this error witnesses, if any.
    pub fn clause(&self) -> Option<GraphClause> {
        use ModelError::*;
        Some(match self {
            UnknownLabel { .. } | InvalidEdgeLabel { .. } => GraphClause::LabelSets,
            RootHasPredecessor { .. } | NonRootWithoutPredecessor { .. } => {
                GraphClause::RootIndegree
            }
            IniNotAtRoot { .. } => GraphClause::IniAtRoot,
            FinHasSuccessors { .. } => GraphClause::FinOutdegree,
            FunctionOutdegree { .. } | FunctionEdgeLabeled { .. } => GraphClause::FunctionVertex,
            PredicateOutdegree { .. }
            | PredicateEdgeUnlabeled { .. }
            | PredicateLabelsNotDistinct { .. } => GraphClause::PredicateVertex,
            MainIffFin { .. } => GraphClause::MainIffFin,
            CycleWithoutFunctionVertex { .. } => GraphClause::CycleCondition,
            _ => return None,
        })
    }
}
