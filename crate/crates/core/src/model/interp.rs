use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::alphabet::{Alphabet, Symbol, SymbolKind};
use super::error::{LawKind, ModelError};
use super::raw::{
    BottomPolicy, RawCell, RawDomains, RawInterpretation, RawTable, ValidationLevel, BOT_TOKEN,
};

/// An interned value token. Ids are local to one interpretation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Value(pub u32);

/// A value or the dummy value (`None`).
pub type Slot = Option<Value>;

const ABSENT: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Table {
    /// Indexed by input-domain position.
    Ini(Vec<Value>),
    /// Indexed by main-domain position, last row for the dummy value.
    Unary(Vec<Slot>),
    /// Row-major over (private, shared), each of size |D| + 1.
    Binary(Vec<Slot>),
    Predicate(Vec<u8>),
}

/// Finite domains and total tables for every symbol of an alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interpretation {
    names: Vec<String>,
    by_name: HashMap<String, Value>,
    main: Vec<Value>,
    input: Vec<Value>,
    output: Vec<Value>,
    main_pos: Vec<u32>,
    input_pos: Vec<u32>,
    output_pos: Vec<u32>,
    policy: BottomPolicy,
    ini: Vec<Value>,
    tables: Vec<Table>,
}

/// Result of interpretation validation: the interpretation, the closure of
/// the `ini` images used for the minimality check, and any downgraded
/// findings.
#[derive(Clone, Debug)]
pub struct CheckedInterpretation {
    pub interpretation: Interpretation,
    pub closure: Vec<Value>,
    pub warnings: Vec<ModelError>,
}

impl Interpretation {
    pub fn policy(&self) -> BottomPolicy {
        self.policy
    }

    pub fn main_domain(&self) -> &[Value] {
        &self.main
    }

    pub fn input_domain(&self) -> &[Value] {
        &self.input
    }

    pub fn output_domain(&self) -> &[Value] {
        &self.output
    }

    pub fn name(&self, v: Value) -> &str {
        &self.names[v.0 as usize]
    }

    /// Number of distinct value names across the three domains; value ids
    /// are below this bound.
    pub fn name_count(&self) -> usize {
        self.names.len()
    }

    pub fn slot_name(&self, s: Slot) -> &str {
        s.map_or(BOT_TOKEN, |v| self.name(v))
    }

    pub fn value(&self, name: &str) -> Option<Value> {
        self.by_name.get(name).copied()
    }

    pub fn in_main(&self, v: Value) -> bool {
        self.main_pos[v.0 as usize] != ABSENT
    }

    pub fn in_input(&self, v: Value) -> bool {
        self.input_pos[v.0 as usize] != ABSENT
    }

    pub fn in_output(&self, v: Value) -> bool {
        self.output_pos[v.0 as usize] != ABSENT
    }

    /// Position of a main-domain value; the dummy value sits after all of
    /// them.
    fn row(&self, s: Slot) -> usize {
        match s {
            Some(v) => self.main_pos[v.0 as usize] as usize,
            None => self.main.len(),
        }
    }

    fn fires(&self, operands: &[Slot]) -> bool {
        self.policy == BottomPolicy::Lifted || operands.iter().all(Option::is_some)
    }

    pub fn ini(&self, input: Value) -> Value {
        self.ini[self.input_pos[input.0 as usize] as usize]
    }

    /// Applies a unary function (plain processing symbol or `fin`). `None`
    /// means the step does not fire under the strict policy.
    pub fn unary(&self, f: Symbol, arg: Slot) -> Option<Slot> {
        if !self.fires(&[arg]) {
            return None;
        }
        match &self.tables[f.0 as usize] {
            Table::Unary(t) => Some(t[self.row(arg)]),
            _ => panic!("symbol {f:?} has no unary table"),
        }
    }

    /// Applies a setter or getter to (private, shared).
    pub fn binary(&self, f: Symbol, private: Slot, shared: Slot) -> Option<Slot> {
        if !self.fires(&[private, shared]) {
            return None;
        }
        match &self.tables[f.0 as usize] {
            Table::Binary(t) => Some(t[self.row(private) * (self.main.len() + 1) + self.row(shared)]),
            _ => panic!("symbol {f:?} has no binary table"),
        }
    }

    pub fn test(&self, p: Symbol, arg: Slot) -> Option<u8> {
        if !self.fires(&[arg]) {
            return None;
        }
        match &self.tables[p.0 as usize] {
            Table::Predicate(t) => Some(t[self.row(arg)]),
            _ => panic!("symbol {p:?} has no predicate table"),
        }
    }

    pub fn to_raw(&self, alphabet: &Alphabet) -> RawInterpretation {
        let names = |vs: &[Value]| vs.iter().map(|v| self.name(*v).to_string()).collect();
        let mut rows: Vec<Slot> = self.main.iter().copied().map(Some).collect();
        if self.policy == BottomPolicy::Lifted {
            rows.push(None);
        }
        let tok = |s: Slot| RawCell::Token(self.slot_name(s).to_string());
        let mut tables = BTreeMap::new();
        for sym in alphabet.symbols() {
            let table = match &self.tables[sym.0 as usize] {
                Table::Ini(t) => RawTable::Unary(
                    self.input
                        .iter()
                        .zip(t)
                        .map(|(x, y)| (self.name(*x).to_string(), tok(Some(*y))))
                        .collect(),
                ),
                Table::Unary(t) => RawTable::Unary(
                    rows.iter()
                        .map(|&r| (self.slot_name(r).to_string(), tok(t[self.row(r)])))
                        .collect(),
                ),
                Table::Predicate(t) => RawTable::Unary(
                    rows.iter()
                        .map(|&r| (self.slot_name(r).to_string(), RawCell::Int(t[self.row(r)].into())))
                        .collect(),
                ),
                Table::Binary(t) => RawTable::Binary(
                    rows.iter()
                        .map(|&a| {
                            let inner = rows
                                .iter()
                                .map(|&b| {
                                    let cell = t[self.row(a) * (self.main.len() + 1) + self.row(b)];
                                    (self.slot_name(b).to_string(), tok(cell))
                                })
                                .collect();
                            (self.slot_name(a).to_string(), inner)
                        })
                        .collect(),
                ),
            };
            tables.insert(alphabet.name(sym).to_string(), table);
        }
        RawInterpretation {
            domains: RawDomains {
                main: names(&self.main),
                input: names(&self.input),
                output: names(&self.output),
            },
            bottom_policy: self.policy,
            tables,
        }
    }
}

/// Validates domains and tables. Totality and signature problems are always
/// errors; minimality, the setting/getting laws and `fin` rows returning the
/// dummy value are errors under the strict level and warnings under the
/// lenient one.
pub fn validate_interpretation(
    raw: &RawInterpretation,
    alphabet: &Alphabet,
    level: ValidationLevel,
) -> Result<CheckedInterpretation, Vec<ModelError>> {
    let mut errors = Vec::new();
    let mut names: Vec<String> = Vec::new();
    let mut by_name: HashMap<String, Value> = HashMap::new();

    let mut intern = |list: &[String], domain: &'static str, errors: &mut Vec<ModelError>| {
        let mut out = Vec::new();
        if list.is_empty() {
            errors.push(ModelError::EmptyDomain { domain });
        }
        for tok in list {
            if tok == BOT_TOKEN {
                errors.push(ModelError::BotInDomain { domain });
                continue;
            }
            let v = *by_name.entry(tok.clone()).or_insert_with(|| {
                names.push(tok.clone());
                Value(names.len() as u32 - 1)
            });
            if out.contains(&v) {
                errors.push(ModelError::DuplicateValue {
                    domain,
                    value: tok.clone(),
                });
                continue;
            }
            out.push(v);
        }
        out
    };
    let main = intern(&raw.domains.main, "main", &mut errors);
    let input = intern(&raw.domains.input, "input", &mut errors);
    let output = intern(&raw.domains.output, "output", &mut errors);
    if !errors.is_empty() {
        return Err(errors);
    }

    let positions = |vs: &[Value]| {
        let mut pos = vec![ABSENT; names.len()];
        for (i, v) in vs.iter().enumerate() {
            pos[v.0 as usize] = i as u32;
        }
        pos
    };
    let mut interp = Interpretation {
        main_pos: positions(&main),
        input_pos: positions(&input),
        output_pos: positions(&output),
        names,
        by_name,
        main,
        input,
        output,
        policy: raw.bottom_policy,
        ini: Vec::new(),
        tables: Vec::new(),
    };

    for name in raw.tables.keys() {
        if alphabet.lookup(name).is_none() {
            errors.push(ModelError::UnexpectedTable {
                symbol: name.clone(),
            });
        }
    }

    let mut partial = Vec::new();
    let mut tables = Vec::with_capacity(alphabet.len());
    for sym in alphabet.symbols() {
        let name = alphabet.name(sym);
        let Some(table) = raw.tables.get(name) else {
            errors.push(ModelError::MissingTable {
                symbol: name.to_string(),
            });
            tables.push(None);
            continue;
        };
        let mut reader = TableReader {
            interp: &interp,
            symbol: name,
            errors: &mut errors,
            partial: &mut partial,
        };
        let built = if sym == alphabet.ini() {
            reader.ini(table)
        } else if sym == alphabet.fin() {
            reader.unary(table, Codomain::Output)
        } else {
            match alphabet.kind(sym) {
                SymbolKind::Processing => reader.unary(table, Codomain::Main),
                SymbolKind::Setting | SymbolKind::Getting => reader.binary(table),
                SymbolKind::Predicate => reader.predicate(table),
            }
        };
        tables.push(built);
    }
    if !errors.is_empty() {
        return Err(errors);
    }
    interp.tables = tables.into_iter().map(Option::unwrap).collect();
    if let Table::Ini(t) = &interp.tables[alphabet.ini().0 as usize] {
        interp.ini = t.clone();
    }

    let closure = closure_of_inputs(&interp, alphabet);
    let mut soft = partial;
    if closure.len() < interp.main.len() {
        let mut subset: Vec<Value> = closure.clone();
        subset.sort_by_key(|v| interp.main_pos[v.0 as usize]);
        soft.push(ModelError::NonMinimalDomain {
            closed_subset: subset.iter().map(|v| interp.name(*v).to_string()).collect(),
        });
    }
    soft.extend(law_violations(&interp, alphabet));

    match level {
        ValidationLevel::Strict if !soft.is_empty() => Err(soft),
        _ => Ok(CheckedInterpretation {
            interpretation: interp,
            closure,
            warnings: soft,
        }),
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Codomain {
    Main,
    Output,
}

struct TableReader<'a> {
    interp: &'a Interpretation,
    symbol: &'a str,
    errors: &'a mut Vec<ModelError>,
    /// `fin` rows over proper values that return the dummy value.
    partial: &'a mut Vec<ModelError>,
}

impl TableReader<'_> {
    fn mismatch(&mut self, detail: String) {
        self.errors.push(ModelError::SignatureMismatch {
            symbol: self.symbol.to_string(),
            detail,
        });
    }

    fn missing(&mut self, row: String) {
        self.errors.push(ModelError::IncompleteTable {
            symbol: self.symbol.to_string(),
            row,
        });
    }

    fn lifted(&self) -> bool {
        self.interp.policy == BottomPolicy::Lifted
    }

    /// Rows a table over the main domain must have, with their slots.
    fn rows(&self) -> Vec<(String, Slot)> {
        let mut rows: Vec<(String, Slot)> = self
            .interp
            .main
            .iter()
            .map(|v| (self.interp.name(*v).to_string(), Some(*v)))
            .collect();
        if self.lifted() {
            rows.push((BOT_TOKEN.to_string(), None));
        }
        rows
    }

    /// Keys outside the main domain. A dummy-value row is tolerated (and
    /// ignored) under the strict policy.
    fn check_keys<'k>(&mut self, keys: impl Iterator<Item = &'k String>, context: &str) {
        for k in keys {
            if k == BOT_TOKEN {
                continue;
            }
            if !self.interp.value(k).is_some_and(|v| self.interp.in_main(v)) {
                self.mismatch(format!("row `{k}`{context} is outside the main domain"));
            }
        }
    }

    /// Reads a result cell. Rows over proper values must land in the
    /// codomain; dummy-value rows may also return the dummy value.
    fn result(&mut self, cell: &RawCell, row: &str, bot_row: bool, codomain: Codomain) -> Option<Slot> {
        let RawCell::Token(tok) = cell else {
            self.mismatch(format!("row {row} holds an integer, expected a value token"));
            return None;
        };
        if tok == BOT_TOKEN {
            if bot_row {
                return Some(None);
            }
            if codomain == Codomain::Output {
                self.partial.push(ModelError::FinReturnsBot { row: row.to_string() });
                return Some(None);
            }
            self.mismatch(format!("row {row} returns the dummy value"));
            return None;
        }
        let v = self.interp.value(tok);
        let ok = v.is_some_and(|v| match codomain {
            Codomain::Main => self.interp.in_main(v),
            Codomain::Output => self.interp.in_output(v),
        });
        if !ok {
            let dom = if codomain == Codomain::Main { "main" } else { "output" };
            self.mismatch(format!("row {row} returns `{tok}`, outside the {dom} domain"));
            return None;
        }
        Some(v)
    }

    fn ini(&mut self, table: &RawTable) -> Option<Table> {
        let RawTable::Unary(map) = table else {
            self.mismatch("expected a unary table over the input domain".into());
            return None;
        };
        for k in map.keys() {
            if !self.interp.value(k).is_some_and(|v| self.interp.in_input(v)) {
                self.mismatch(format!("row `{k}` is outside the input domain"));
            }
        }
        let mut out = Vec::new();
        let mut ok = true;
        for &x in &self.interp.input {
            let name = self.interp.name(x).to_string();
            match map.get(&name) {
                None => {
                    self.missing(name);
                    ok = false;
                }
                Some(cell) => match self.result(cell, &name, false, Codomain::Main) {
                    Some(Some(v)) => out.push(v),
                    _ => ok = false,
                },
            }
        }
        ok.then_some(Table::Ini(out))
    }

    fn unary(&mut self, table: &RawTable, codomain: Codomain) -> Option<Table> {
        let RawTable::Unary(map) = table else {
            self.mismatch("expected a unary table".into());
            return None;
        };
        self.check_keys(map.keys(), "");
        let mut out = vec![None; self.interp.main.len() + 1];
        let mut ok = true;
        for (name, slot) in self.rows() {
            match map.get(&name) {
                None => {
                    self.missing(name);
                    ok = false;
                }
                Some(cell) => match self.result(cell, &name, slot.is_none(), codomain) {
                    Some(r) => out[self.interp.row(slot)] = r,
                    None => ok = false,
                },
            }
        }
        ok.then_some(Table::Unary(out))
    }

    fn binary(&mut self, table: &RawTable) -> Option<Table> {
        let RawTable::Binary(map) = table else {
            self.mismatch("expected a binary table keyed by private then shared argument".into());
            return None;
        };
        self.check_keys(map.keys(), "");
        let width = self.interp.main.len() + 1;
        let mut out = vec![None; width * width];
        let mut ok = true;
        let rows = self.rows();
        for (a_name, a) in &rows {
            let Some(inner) = map.get(a_name) else {
                self.missing(format!("{a_name}, *"));
                ok = false;
                continue;
            };
            self.check_keys(inner.keys(), &format!(" under `{a_name}`"));
            for (b_name, b) in &rows {
                let label = format!("({a_name}, {b_name})");
                match inner.get(b_name) {
                    None => {
                        self.missing(label);
                        ok = false;
                    }
                    Some(cell) => {
                        let bot_row = a.is_none() || b.is_none();
                        match self.result(cell, &label, bot_row, Codomain::Main) {
                            Some(r) => out[self.interp.row(*a) * width + self.interp.row(*b)] = r,
                            None => ok = false,
                        }
                    }
                }
            }
        }
        ok.then_some(Table::Binary(out))
    }

    fn predicate(&mut self, table: &RawTable) -> Option<Table> {
        let RawTable::Unary(map) = table else {
            self.mismatch("expected a unary predicate table".into());
            return None;
        };
        self.check_keys(map.keys(), "");
        let mut out = vec![0u8; self.interp.main.len() + 1];
        let mut ok = true;
        for (name, slot) in self.rows() {
            match map.get(&name) {
                None => {
                    self.missing(name);
                    ok = false;
                }
                Some(RawCell::Int(b @ (0 | 1))) => out[self.interp.row(slot)] = *b as u8,
                Some(RawCell::Token(t)) if t == BOT_TOKEN => {
                    self.errors.push(ModelError::PredicateReturnsBot {
                        symbol: self.symbol.to_string(),
                        row: name,
                    });
                    ok = false;
                }
                Some(other) => {
                    self.mismatch(format!("row {name} holds {other:?}, expected 0 or 1"));
                    ok = false;
                }
            }
        }
        ok.then_some(Table::Predicate(out))
    }
}

/// Smallest subset of the main domain containing every `ini` image and
/// closed under all plain processing, setting and getting functions
/// (proper-value rows only).
fn closure_of_inputs(interp: &Interpretation, alphabet: &Alphabet) -> Vec<Value> {
    let unary: Vec<Symbol> = alphabet
        .symbols()
        .filter(|s| alphabet.is_plain_processing(*s))
        .collect();
    let binary: Vec<Symbol> = alphabet
        .symbols()
        .filter(|s| matches!(alphabet.kind(*s), SymbolKind::Setting | SymbolKind::Getting))
        .collect();
    let mut member = vec![false; interp.main.len()];
    let mut order: Vec<Value> = Vec::new();
    let push = |v: Value, member: &mut Vec<bool>, order: &mut Vec<Value>| {
        let p = interp.main_pos[v.0 as usize] as usize;
        if !member[p] {
            member[p] = true;
            order.push(v);
        }
    };
    for &x in &interp.input {
        push(interp.ini(x), &mut member, &mut order);
    }
    let mut next = 0;
    while next < order.len() {
        let v = order[next];
        next += 1;
        for &f in &unary {
            if let Some(Some(w)) = interp.unary(f, Some(v)) {
                push(w, &mut member, &mut order);
            }
        }
        for &f in &binary {
            for k in 0..next {
                let u = order[k];
                for (a, b) in [(u, v), (v, u)] {
                    if let Some(Some(w)) = interp.binary(f, Some(a), Some(b)) {
                        push(w, &mut member, &mut order);
                    }
                }
            }
        }
    }
    order
}

/// Every (symbol, d, d') instance where a setting/getting law fails, taken
/// over proper values only.
fn law_violations(interp: &Interpretation, alphabet: &Alphabet) -> Vec<ModelError> {
    let setters: Vec<Symbol> = alphabet.symbols_of(SymbolKind::Setting).collect();
    let getters: Vec<Symbol> = alphabet.symbols_of(SymbolKind::Getting).collect();
    let ap = |f: Symbol, a: Value, b: Value| -> Value {
        interp
            .binary(f, Some(a), Some(b))
            .flatten()
            .expect("proper rows map to proper values")
    };
    let mut out = Vec::new();
    let mut report = |f: Symbol, law: LawKind, d: Value, e: Value| {
        out.push(ModelError::SettingGettingLawViolated {
            symbol: alphabet.name(f).to_string(),
            law,
            d: interp.name(d).to_string(),
            d_prime: interp.name(e).to_string(),
        });
    };
    for &d in &interp.main {
        for &e in &interp.main {
            for &f in &setters {
                let r = ap(f, d, e);
                if ap(f, d, r) != r {
                    report(f, LawKind::SetterIdempotent, d, e);
                }
                if !getters.iter().any(|&g| ap(g, d, r) == d) {
                    report(f, LawKind::SetterHasGetter, d, e);
                }
            }
            for &g in &getters {
                let r = ap(g, d, e);
                if ap(g, r, e) != r {
                    report(g, LawKind::GetterIdempotent, d, e);
                }
                if !setters.iter().any(|&f| ap(f, r, e) == e) {
                    report(g, LawKind::GetterHasSetter, d, e);
                }
            }
        }
    }
    out
}
