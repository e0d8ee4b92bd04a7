use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::error::ModelError;
use super::raw::RawAlphabet;

pub const INI: &str = "ini";
pub const FIN: &str = "fin";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Symbol(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SymbolKind {
    Processing,
    Setting,
    Getting,
    Predicate,
}

/// The four disjoint symbol classes, with `ini` and `fin` among the
/// processing symbols. Symbols are numbered class by class in declaration
/// order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    kinds: Vec<SymbolKind>,
    by_name: HashMap<String, Symbol>,
    ini: Symbol,
    fin: Symbol,
}

impl Alphabet {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        (0..self.names.len() as u32).map(Symbol)
    }

    pub fn symbols_of(&self, kind: SymbolKind) -> impl Iterator<Item = Symbol> + '_ {
        self.symbols().filter(move |s| self.kind(*s) == kind)
    }

    pub fn name(&self, s: Symbol) -> &str {
        &self.names[s.0 as usize]
    }

    pub fn kind(&self, s: Symbol) -> SymbolKind {
        self.kinds[s.0 as usize]
    }

    pub fn lookup(&self, name: &str) -> Option<Symbol> {
        self.by_name.get(name).copied()
    }

    pub fn ini(&self) -> Symbol {
        self.ini
    }

    pub fn fin(&self) -> Symbol {
        self.fin
    }

    /// Processing symbols other than `ini` and `fin`.
    pub fn is_plain_processing(&self, s: Symbol) -> bool {
        self.kind(s) == SymbolKind::Processing && s != self.ini && s != self.fin
    }

    /// Symbols whose vertices take exactly one (or, nondeterministically, at
    /// least one) unlabeled out-edge: processing symbols except `fin`, plus
    /// setters and getters.
    pub fn is_stepping_function(&self, s: Symbol) -> bool {
        match self.kind(s) {
            SymbolKind::Processing => s != self.fin,
            SymbolKind::Setting | SymbolKind::Getting => true,
            SymbolKind::Predicate => false,
        }
    }

    /// Symbols that break an otherwise all-inspection cycle.
    pub fn is_cycle_breaking(&self, s: Symbol) -> bool {
        match self.kind(s) {
            SymbolKind::Processing => self.is_plain_processing(s),
            SymbolKind::Setting | SymbolKind::Getting => true,
            SymbolKind::Predicate => false,
        }
    }

    pub fn is_classical(&self) -> bool {
        self.symbols_of(SymbolKind::Setting).next().is_none()
            && self.symbols_of(SymbolKind::Getting).next().is_none()
    }

    pub fn to_raw(&self) -> RawAlphabet {
        let list = |k| self.symbols_of(k).map(|s| self.name(s).to_string()).collect();
        RawAlphabet {
            processing: list(SymbolKind::Processing),
            setting: list(SymbolKind::Setting),
            getting: list(SymbolKind::Getting),
            predicate: list(SymbolKind::Predicate),
        }
    }
}

/// Checks disjointness of the symbol classes and the placement of the
/// reserved symbols.
pub fn validate_alphabet(raw: &RawAlphabet) -> Result<Alphabet, Vec<ModelError>> {
    let mut errors = Vec::new();
    let mut names = Vec::new();
    let mut kinds = Vec::new();
    let mut by_name: HashMap<String, Symbol> = HashMap::new();

    let groups = [
        (SymbolKind::Processing, &raw.processing),
        (SymbolKind::Setting, &raw.setting),
        (SymbolKind::Getting, &raw.getting),
        (SymbolKind::Predicate, &raw.predicate),
    ];
    for (kind, list) in groups {
        for name in list.iter() {
            if name.is_empty() {
                errors.push(ModelError::EmptySymbolName);
                continue;
            }
            if let Some(prev) = by_name.get(name) {
                let first = kinds[prev.0 as usize];
                if first == kind {
                    errors.push(ModelError::DuplicateSymbol {
                        symbol: name.clone(),
                    });
                } else {
                    errors.push(ModelError::OverlappingSymbolClasses {
                        symbol: name.clone(),
                        first,
                        second: kind,
                    });
                }
                continue;
            }
            if (name == INI || name == FIN) && kind != SymbolKind::Processing {
                errors.push(ModelError::ReservedSymbolMisplaced {
                    symbol: name.clone(),
                    kind,
                });
            }
            let sym = Symbol(names.len() as u32);
            names.push(name.clone());
            kinds.push(kind);
            by_name.insert(name.clone(), sym);
        }
    }

    let reserved = |n: &str| {
        by_name
            .get(n)
            .copied()
            .filter(|s| kinds[s.0 as usize] == SymbolKind::Processing)
    };
    let ini = reserved(INI);
    let fin = reserved(FIN);
    for (name, found) in [(INI, ini), (FIN, fin)] {
        if found.is_none() {
            errors.push(ModelError::MissingReservedSymbol {
                symbol: name.to_string(),
            });
        }
    }

    match (ini, fin) {
        (Some(ini), Some(fin)) if errors.is_empty() => Ok(Alphabet {
            names,
            kinds,
            by_name,
            ini,
            fin,
        }),
        _ => Err(errors),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(p: &[&str], s: &[&str], g: &[&str], q: &[&str]) -> RawAlphabet {
        let v = |x: &[&str]| x.iter().map(|s| s.to_string()).collect();
        RawAlphabet {
            processing: v(p),
            setting: v(s),
            getting: v(g),
            predicate: v(q),
        }
    }

    #[test]
    fn classical_alphabet_accepted() {
        let a = validate_alphabet(&raw(&["ini", "fin", "dec"], &[], &[], &["z"])).unwrap();
        assert!(a.is_classical());
        let dec = a.lookup("dec").unwrap();
        assert!(a.is_plain_processing(dec));
        assert!(!a.is_plain_processing(a.ini()));
        assert!(a.is_stepping_function(a.ini()));
        assert!(!a.is_stepping_function(a.fin()));
    }

    #[test]
    fn overlapping_classes_rejected() {
        let errs = validate_alphabet(&raw(&["ini", "fin"], &["put"], &["put"], &[])).unwrap_err();
        assert!(matches!(
            errs.as_slice(),
            [ModelError::OverlappingSymbolClasses { symbol, .. }] if symbol == "put"
        ));
    }

    #[test]
    fn missing_ini_rejected() {
        let errs = validate_alphabet(&raw(&["fin", "dec"], &[], &[], &["z"])).unwrap_err();
        assert_eq!(
            errs,
            vec![ModelError::MissingReservedSymbol {
                symbol: "ini".into()
            }]
        );
    }

    #[test]
    fn misplaced_fin_rejected() {
        let errs = validate_alphabet(&raw(&["ini"], &[], &[], &["fin"])).unwrap_err();
        assert!(errs.contains(&ModelError::ReservedSymbolMisplaced {
            symbol: "fin".into(),
            kind: SymbolKind::Predicate
        }));
        assert!(errs.contains(&ModelError::MissingReservedSymbol {
            symbol: "fin".into()
        }));
    }

    #[test]
    fn non_classical_with_setters() {
        let a = validate_alphabet(&raw(&["ini", "fin"], &["put"], &["take"], &[])).unwrap();
        assert!(!a.is_classical());
        assert_eq!(a.to_raw(), raw(&["ini", "fin"], &["put"], &["take"], &[]));
    }
}
