use std::collections::HashSet;

use super::error::EquivalenceError;
use crate::model::{BottomPolicy, ComponentGraph, ProtoAlgorithm, Slot, Symbol, SymbolKind, Value, Vertex};

pub const DEFAULT_SEARCH_CAP: u64 = 20_000_000;

/// Bijections showing two proto-algorithms isomorphic. Maps go from the left
/// model to the right one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsomorphismWitness {
    /// Whether edge labels (and predicate results) are swapped.
    pub swap_bits: bool,
    /// Component index map.
    pub components: Vec<usize>,
    /// Per left component, the image of each vertex.
    pub vertices: Vec<Vec<Vertex>>,
    /// Image of each left symbol.
    pub symbols: Vec<Symbol>,
    pub main: Vec<(Value, Value)>,
    pub input: Vec<(Value, Value)>,
    pub output: Vec<(Value, Value)>,
}

fn class_sizes(p: &ProtoAlgorithm) -> [usize; 4] {
    let a = p.alphabet();
    [
        a.symbols_of(SymbolKind::Processing).count(),
        a.symbols_of(SymbolKind::Setting).count(),
        a.symbols_of(SymbolKind::Getting).count(),
        a.symbols_of(SymbolKind::Predicate).count(),
    ]
}

fn shape(g: &ComponentGraph) -> (usize, usize, bool) {
    (g.len(), g.edge_count(), g.is_main())
}

/// Searches for an isomorphism: component permutations, then vertex
/// bijections grown breadth-first from the roots (which fixes most symbol
/// images), then data bijections by propagation over the tables.
pub fn check_isomorphism(
    a: &ProtoAlgorithm,
    b: &ProtoAlgorithm,
) -> Result<Option<IsomorphismWitness>, EquivalenceError> {
    check_isomorphism_bounded(a, b, DEFAULT_SEARCH_CAP)
}

pub fn check_isomorphism_bounded(
    a: &ProtoAlgorithm,
    b: &ProtoAlgorithm,
    cap: u64,
) -> Result<Option<IsomorphismWitness>, EquivalenceError> {
    let (ia, ib) = (a.interpretation(), b.interpretation());
    let mut sa: Vec<_> = a.components().iter().map(shape).collect();
    let mut sb: Vec<_> = b.components().iter().map(shape).collect();
    sa.sort();
    sb.sort();
    if sa != sb
        || class_sizes(a) != class_sizes(b)
        || ia.policy() != ib.policy()
        || ia.main_domain().len() != ib.main_domain().len()
        || ia.input_domain().len() != ib.input_domain().len()
        || ia.output_domain().len() != ib.output_domain().len()
    {
        return Ok(None);
    }
    let mut s = Search {
        a,
        b,
        cap,
        steps: 0,
        swap: false,
        perm: vec![usize::MAX; a.components().len()],
        vmaps: a.components().iter().map(|g| vec![None; g.len()]).collect(),
        sym: vec![None; a.alphabet().len()],
        sym_used: vec![false; b.alphabet().len()],
        tried: HashSet::new(),
        found: None,
    };
    for swap in [false, true] {
        s.swap = swap;
        if s.components(0)? {
            return Ok(s.found);
        }
    }
    Ok(None)
}

struct Search<'a> {
    a: &'a ProtoAlgorithm,
    b: &'a ProtoAlgorithm,
    cap: u64,
    steps: u64,
    swap: bool,
    perm: Vec<usize>,
    vmaps: Vec<Vec<Option<Vertex>>>,
    sym: Vec<Option<Symbol>>,
    sym_used: Vec<bool>,
    tried: HashSet<(bool, Vec<Option<Symbol>>)>,
    found: Option<IsomorphismWitness>,
}

impl Search<'_> {
    fn tick(&mut self) -> Result<(), EquivalenceError> {
        self.steps += 1;
        if self.steps > self.cap {
            return Err(EquivalenceError::SearchBoundExceeded { cap: self.cap });
        }
        Ok(())
    }

    fn bit(&self, l: Option<u8>) -> Option<u8> {
        l.map(|b| if self.swap { 1 - b } else { b })
    }

    fn components(&mut self, k: usize) -> Result<bool, EquivalenceError> {
        if k == self.perm.len() {
            return self.vertices(0, 0, &[]);
        }
        let (a, b) = (self.a, self.b);
        for c in 0..b.components().len() {
            if self.perm.contains(&c) || shape(&a.components()[k]) != shape(&b.components()[c]) {
                continue;
            }
            self.perm[k] = c;
            if self.components(k + 1)? {
                return Ok(true);
            }
            self.perm[k] = usize::MAX;
        }
        Ok(false)
    }

    /// Maps symbol `f` to `g`; returns whether a new entry was made, or
    /// `None` if inconsistent.
    fn bind_symbol(&mut self, f: Symbol, g: Symbol) -> Option<bool> {
        let (x, y) = (self.a.alphabet(), self.b.alphabet());
        if x.kind(f) != y.kind(g)
            || (f == x.ini()) != (g == y.ini())
            || (f == x.fin()) != (g == y.fin())
        {
            return None;
        }
        match self.sym[f.0 as usize] {
            Some(h) if h == g => Some(false),
            Some(_) => None,
            None if self.sym_used[g.0 as usize] => None,
            None => {
                self.sym[f.0 as usize] = Some(g);
                self.sym_used[g.0 as usize] = true;
                Some(true)
            }
        }
    }

    fn unbind_symbol(&mut self, f: Symbol) {
        if let Some(g) = self.sym[f.0 as usize].take() {
            self.sym_used[g.0 as usize] = false;
        }
    }

    /// Vertex bijection for left component `k`, assigning the `pos`-th
    /// vertex of its search order.
    fn vertices(&mut self, k: usize, pos: usize, order: &[Vertex]) -> Result<bool, EquivalenceError> {
        if k == self.perm.len() {
            return self.data();
        }
        let g = &self.a.components()[k];
        if pos == 0 && order.is_empty() {
            let order = search_order(g);
            return self.vertices(k, 0, &order);
        }
        if pos == order.len() {
            return self.vertices(k + 1, 0, &[]);
        }
        self.tick()?;
        let h = &self.b.components()[self.perm[k]];
        let v = order[pos];
        let candidates: Vec<Vertex> = if v == g.root() {
            vec![h.root()]
        } else {
            match mapped_parent(g, &self.vmaps[k], v) {
                Some((u, l)) => {
                    let l = self.bit(l);
                    h.successors(u)
                        .iter()
                        .filter(|(_, m)| *m == l)
                        .map(|(w, _)| *w)
                        .collect()
                }
                None => h.vertices().collect(),
            }
        };
        for w in candidates {
            if self.vmaps[k].contains(&Some(w))
                || (w == h.root()) != (v == g.root())
                || g.indegree(v) != h.indegree(w)
                || g.outdegree(v) != h.outdegree(w)
                || !self.edges_agree(k, v, w)
            {
                continue;
            }
            let Some(fresh) = self.bind_symbol(g.label(v), h.label(w)) else {
                continue;
            };
            self.vmaps[k][v as usize] = Some(w);
            if self.vertices(k, pos + 1, order)? {
                return Ok(true);
            }
            self.vmaps[k][v as usize] = None;
            if fresh {
                self.unbind_symbol(g.label(v));
            }
        }
        Ok(false)
    }

    /// Edges between `v` and already mapped vertices (including `v` itself)
    /// have matching images at `w`.
    fn edges_agree(&self, k: usize, v: Vertex, w: Vertex) -> bool {
        let g = &self.a.components()[k];
        let h = &self.b.components()[self.perm[k]];
        let map = |x: Vertex| if x == v { Some(w) } else { self.vmaps[k][x as usize] };
        let has = |from: Vertex, to: Vertex, l: Option<u8>| h.successors(from).contains(&(to, self.bit(l)));
        for &(x, l) in g.successors(v) {
            if let Some(y) = map(x) {
                if !has(w, y, l) {
                    return false;
                }
            }
        }
        for u in g.vertices() {
            if u == v {
                continue;
            }
            let Some(y) = self.vmaps[k][u as usize] else { continue };
            for &(x, l) in g.successors(u) {
                if x == v && !has(y, w, l) {
                    return false;
                }
            }
        }
        true
    }

    fn data(&mut self) -> Result<bool, EquivalenceError> {
        let key = (self.swap, self.sym.clone());
        if !self.tried.insert(key) {
            return Ok(false);
        }
        let mut d = DataSearch::new(self.a, self.b, self.swap);
        for f in self.a.alphabet().symbols() {
            if let Some(g) = self.sym[f.0 as usize] {
                d.symbols.push((f, g));
            }
        }
        let unused_a: Vec<Symbol> = self
            .a
            .alphabet()
            .symbols()
            .filter(|f| self.sym[f.0 as usize].is_none())
            .collect();
        let unused_b: Vec<Symbol> = self
            .b
            .alphabet()
            .symbols()
            .filter(|g| !self.sym_used[g.0 as usize])
            .collect();
        let Some(maps) = d.solve(&unused_a, &unused_b, &mut self.steps, self.cap)? else {
            return Ok(false);
        };
        let (maps, extra) = maps;
        let mut symbols: Vec<Symbol> = self.sym.iter().map(|s| s.unwrap_or(Symbol(u32::MAX))).collect();
        for (f, g) in extra {
            symbols[f.0 as usize] = g;
        }
        self.found = Some(IsomorphismWitness {
            swap_bits: self.swap,
            components: self.perm.clone(),
            vertices: self
                .vmaps
                .iter()
                .map(|m| m.iter().map(|v| v.expect("complete vertex map")).collect())
                .collect(),
            symbols,
            main: maps[0].clone(),
            input: maps[1].clone(),
            output: maps[2].clone(),
        });
        Ok(true)
    }
}

/// Breadth-first order from the root, then unreachable vertices.
fn search_order(g: &ComponentGraph) -> Vec<Vertex> {
    let mut seen = vec![false; g.len()];
    let mut order = vec![g.root()];
    seen[g.root() as usize] = true;
    let mut k = 0;
    while k < order.len() {
        for &(w, _) in g.successors(order[k]) {
            if !seen[w as usize] {
                seen[w as usize] = true;
                order.push(w);
            }
        }
        k += 1;
    }
    order.extend(g.vertices().filter(|v| !seen[*v as usize]));
    order
}

/// A mapped predecessor of `v` and the label of its edge to `v`, returning
/// the predecessor's image.
fn mapped_parent(g: &ComponentGraph, map: &[Option<Vertex>], v: Vertex) -> Option<(Vertex, Option<u8>)> {
    g.vertices().find_map(|u| {
        let img = map[u as usize]?;
        g.successors(u).iter().find(|(x, _)| *x == v).map(|&(_, l)| (img, l))
    })
}

const MAIN: usize = 0;
const INPUT: usize = 1;
const OUTPUT: usize = 2;

/// Partial data bijections for the three domains, indexed by left value id.
#[derive(Clone)]
struct Maps {
    fwd: [Vec<Option<Value>>; 3],
    used: [HashSet<Value>; 3],
}

enum Prop {
    Ok,
    Conflict,
    Changed,
}

struct DataSearch<'a> {
    a: &'a ProtoAlgorithm,
    b: &'a ProtoAlgorithm,
    swap: bool,
    symbols: Vec<(Symbol, Symbol)>,
    args: Vec<Slot>,
}

type Solution = ([Vec<(Value, Value)>; 3], Vec<(Symbol, Symbol)>);

impl<'a> DataSearch<'a> {
    fn new(a: &'a ProtoAlgorithm, b: &'a ProtoAlgorithm, swap: bool) -> Self {
        let ia = a.interpretation();
        let mut args: Vec<Slot> = ia.main_domain().iter().copied().map(Some).collect();
        if ia.policy() == BottomPolicy::Lifted {
            args.push(None);
        }
        DataSearch {
            a,
            b,
            swap,
            symbols: Vec::new(),
            args,
        }
    }

    fn solve(
        &self,
        unused_a: &[Symbol],
        unused_b: &[Symbol],
        steps: &mut u64,
        cap: u64,
    ) -> Result<Option<Solution>, EquivalenceError> {
        let n = self.a.interpretation().name_count();
        let mut maps = Maps {
            fwd: [vec![None; n], vec![None; n], vec![None; n]],
            used: Default::default(),
        };
        if !self.propagate(&mut maps, &self.symbols) {
            return Ok(None);
        }
        self.assign(&mut maps, unused_a, unused_b, steps, cap)
    }

    fn domain(&self, p: &ProtoAlgorithm, d: usize) -> Vec<Value> {
        let i = p.interpretation();
        match d {
            MAIN => i.main_domain().to_vec(),
            INPUT => i.input_domain().to_vec(),
            _ => i.output_domain().to_vec(),
        }
    }

    fn assign(
        &self,
        maps: &mut Maps,
        unused_a: &[Symbol],
        unused_b: &[Symbol],
        steps: &mut u64,
        cap: u64,
    ) -> Result<Option<Solution>, EquivalenceError> {
        *steps += 1;
        if *steps > cap {
            return Err(EquivalenceError::SearchBoundExceeded { cap });
        }
        let next = [INPUT, MAIN, OUTPUT].into_iter().find_map(|d| {
            self.domain(self.a, d)
                .into_iter()
                .find(|v| maps.fwd[d][v.0 as usize].is_none())
                .map(|v| (d, v))
        });
        let Some((d, v)) = next else {
            let mut extra = Vec::new();
            if !self.match_unused(maps, unused_a, unused_b, &mut extra) {
                return Ok(None);
            }
            let pairs = |d: usize| -> Vec<(Value, Value)> {
                self.domain(self.a, d)
                    .into_iter()
                    .map(|v| (v, maps.fwd[d][v.0 as usize].expect("complete")))
                    .collect()
            };
            return Ok(Some(([pairs(MAIN), pairs(INPUT), pairs(OUTPUT)], extra)));
        };
        for w in self.domain(self.b, d) {
            if maps.used[d].contains(&w) {
                continue;
            }
            let mut trial = maps.clone();
            trial.fwd[d][v.0 as usize] = Some(w);
            trial.used[d].insert(w);
            if !self.propagate(&mut trial, &self.symbols) {
                continue;
            }
            if let Some(sol) = self.assign(&mut trial, unused_a, unused_b, steps, cap)? {
                return Ok(Some(sol));
            }
        }
        Ok(None)
    }

    /// Pairs the symbols that label no vertex, by class and table.
    fn match_unused(
        &self,
        maps: &Maps,
        left: &[Symbol],
        right: &[Symbol],
        out: &mut Vec<(Symbol, Symbol)>,
    ) -> bool {
        let Some((&f, rest)) = left.split_first() else {
            return true;
        };
        for (k, &g) in right.iter().enumerate() {
            let (x, y) = (self.a.alphabet(), self.b.alphabet());
            if x.kind(f) != y.kind(g) || (f == x.ini()) != (g == y.ini()) || (f == x.fin()) != (g == y.fin()) {
                continue;
            }
            let mut probe = maps.clone();
            if !matches!(self.check(&mut probe, f, g, false), Prop::Ok) {
                continue;
            }
            let mut others = right.to_vec();
            others.remove(k);
            out.push((f, g));
            if self.match_unused(maps, rest, &others, out) {
                return true;
            }
            out.pop();
        }
        false
    }

    /// Applies forced assignments until a fixed point; false on conflict.
    fn propagate(&self, maps: &mut Maps, symbols: &[(Symbol, Symbol)]) -> bool {
        loop {
            let mut changed = false;
            for &(f, g) in symbols {
                match self.check(maps, f, g, true) {
                    Prop::Conflict => return false,
                    Prop::Changed => changed = true,
                    Prop::Ok => {}
                }
            }
            if !changed {
                return true;
            }
        }
    }

    /// Binds `r` (a left result in domain `d`) to `s` (the right result).
    fn bind(maps: &mut Maps, d: usize, r: Slot, s: Slot, force: bool, changed: &mut bool) -> bool {
        match (r, s) {
            (None, None) => true,
            (None, Some(_)) | (Some(_), None) => false,
            (Some(r), Some(s)) => match maps.fwd[d][r.0 as usize] {
                Some(x) => x == s,
                None if !force => true,
                None => {
                    if maps.used[d].contains(&s) {
                        return false;
                    }
                    maps.fwd[d][r.0 as usize] = Some(s);
                    maps.used[d].insert(s);
                    *changed = true;
                    true
                }
            },
        }
    }

    fn image(maps: &Maps, a: Slot) -> Option<Slot> {
        match a {
            None => Some(None),
            Some(v) => maps.fwd[MAIN][v.0 as usize].map(Some),
        }
    }

    /// Checks the commutation equations of one symbol pair over all argument
    /// tuples whose images are known, forcing result images when `force`.
    fn check(&self, maps: &mut Maps, f: Symbol, g: Symbol, force: bool) -> Prop {
        let (ia, ib) = (self.a.interpretation(), self.b.interpretation());
        let x = self.a.alphabet();
        let mut changed = false;
        if f == x.ini() {
            for &d in ia.input_domain() {
                let Some(e) = maps.fwd[INPUT][d.0 as usize] else { continue };
                if !Self::bind(maps, MAIN, Some(ia.ini(d)), Some(ib.ini(e)), force, &mut changed) {
                    return Prop::Conflict;
                }
            }
        } else {
            let binary = matches!(x.kind(f), SymbolKind::Setting | SymbolKind::Getting);
            for &p in &self.args {
                let Some(pi) = Self::image(maps, p) else { continue };
                if !binary {
                    let ok = match x.kind(f) {
                        SymbolKind::Predicate => {
                            let l = ia.test(f, p).map(|b| if self.swap { 1 - b } else { b });
                            l == ib.test(g, pi)
                        }
                        _ => {
                            let d = if f == x.fin() { OUTPUT } else { MAIN };
                            let r = ia.unary(f, p).flatten();
                            let s = ib.unary(g, pi).flatten();
                            Self::bind(maps, d, r, s, force, &mut changed)
                        }
                    };
                    if !ok {
                        return Prop::Conflict;
                    }
                    continue;
                }
                for &q in &self.args {
                    let Some(qi) = Self::image(maps, q) else { continue };
                    let r = ia.binary(f, p, q).flatten();
                    let s = ib.binary(g, pi, qi).flatten();
                    if !Self::bind(maps, MAIN, r, s, force, &mut changed) {
                        return Prop::Conflict;
                    }
                }
            }
        }
        if changed {
            Prop::Changed
        } else {
            Prop::Ok
        }
    }
}

/// Independent check of every isomorphism clause for a witness.
pub fn verify_isomorphism(a: &ProtoAlgorithm, b: &ProtoAlgorithm, w: &IsomorphismWitness) -> Result<(), String> {
    let (x, y) = (a.alphabet(), b.alphabet());
    let (ia, ib) = (a.interpretation(), b.interpretation());
    let bit = |l: Option<u8>| l.map(|v| if w.swap_bits { 1 - v } else { v });
    if ia.policy() != ib.policy() {
        return Err("dummy-value policies differ".into());
    }
    let n = a.components().len();
    if b.components().len() != n || w.components.len() != n {
        return Err("component counts differ".into());
    }
    let mut seen: Vec<usize> = w.components.clone();
    seen.sort();
    if seen != (0..n).collect::<Vec<_>>() {
        return Err("component map is not a bijection".into());
    }

    // Symbols.
    if w.symbols.len() != x.len() || y.len() != x.len() {
        return Err("alphabet sizes differ".into());
    }
    let img: HashSet<Symbol> = w.symbols.iter().copied().collect();
    if img.len() != x.len() || img.iter().any(|s| s.0 as usize >= y.len()) {
        return Err("symbol map is not a bijection".into());
    }
    for f in x.symbols() {
        let g = w.symbols[f.0 as usize];
        if x.kind(f) != y.kind(g) {
            return Err(format!("symbol `{}` changes class", x.name(f)));
        }
    }
    if w.symbols[x.ini().0 as usize] != y.ini() || w.symbols[x.fin().0 as usize] != y.fin() {
        return Err("`ini` and `fin` must be fixed".into());
    }

    // Graphs.
    for (k, g) in a.components().iter().enumerate() {
        let h = &b.components()[w.components[k]];
        let m = &w.vertices[k];
        let distinct: HashSet<Vertex> = m.iter().copied().collect();
        if m.len() != g.len() || h.len() != g.len() || distinct.len() != g.len() {
            return Err(format!("vertex map of component {} is not a bijection", k + 1));
        }
        if m[g.root() as usize] != h.root() {
            return Err(format!("root of component {} is not preserved", k + 1));
        }
        if g.edge_count() != h.edge_count() {
            return Err(format!("edge counts of component {} differ", k + 1));
        }
        for v in g.vertices() {
            if w.symbols[g.label(v).0 as usize] != h.label(m[v as usize]) {
                return Err(format!("label of vertex `{}` does not commute", g.id(v)));
            }
            for &(u, l) in g.successors(v) {
                if !h.successors(m[v as usize]).contains(&(m[u as usize], bit(l))) {
                    return Err(format!("edge `{}` -> `{}` has no image", g.id(v), g.id(u)));
                }
            }
        }
    }

    // Data.
    let check_map = |pairs: &[(Value, Value)], left: &[Value], right: &[Value], what: &str| {
        let l: HashSet<Value> = pairs.iter().map(|p| p.0).collect();
        let r: HashSet<Value> = pairs.iter().map(|p| p.1).collect();
        let dl: HashSet<Value> = left.iter().copied().collect();
        let dr: HashSet<Value> = right.iter().copied().collect();
        if pairs.len() != left.len() || l != dl || r != dr {
            return Err(format!("{what} data map is not a bijection"));
        }
        Ok(())
    };
    check_map(&w.main, ia.main_domain(), ib.main_domain(), "main")?;
    check_map(&w.input, ia.input_domain(), ib.input_domain(), "input")?;
    check_map(&w.output, ia.output_domain(), ib.output_domain(), "output")?;
    let lookup = |pairs: &[(Value, Value)], v: Slot| -> Slot {
        v.map(|v| pairs.iter().find(|p| p.0 == v).expect("total map").1)
    };
    let bd = |v: Slot| lookup(&w.main, v);

    for &d in ia.input_domain() {
        if Some(ib.ini(lookup(&w.input, Some(d)).unwrap())) != bd(Some(ia.ini(d))) {
            return Err(format!("`ini` does not commute at `{}`", ia.name(d)));
        }
    }
    let mut args: Vec<Slot> = ia.main_domain().iter().copied().map(Some).collect();
    if ia.policy() == BottomPolicy::Lifted {
        args.push(None);
    }
    for f in x.symbols() {
        if f == x.ini() {
            continue;
        }
        let g = w.symbols[f.0 as usize];
        let name = x.name(f);
        for &p in &args {
            match x.kind(f) {
                SymbolKind::Predicate => {
                    if bit(ia.test(f, p)) != ib.test(g, bd(p)) {
                        return Err(format!("`{name}` does not commute at `{}`", ia.slot_name(p)));
                    }
                }
                SymbolKind::Processing => {
                    let r = ia.unary(f, p).flatten();
                    let mapped = if f == x.fin() { lookup(&w.output, r) } else { bd(r) };
                    if mapped != ib.unary(g, bd(p)).flatten() {
                        return Err(format!("`{name}` does not commute at `{}`", ia.slot_name(p)));
                    }
                }
                SymbolKind::Setting | SymbolKind::Getting => {
                    for &q in &args {
                        if bd(ia.binary(f, p, q).flatten()) != ib.binary(g, bd(p), bd(q)).flatten() {
                            return Err(format!(
                                "`{name}` does not commute at (`{}`, `{}`)",
                                ia.slot_name(p),
                                ia.slot_name(q)
                            ));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}
