use std::collections::BTreeMap;

use super::alphabet::{validate_alphabet, Alphabet, INI};
use super::error::ModelError;
use super::graph::{validate_component_graph, ComponentGraph};
use super::interp::{validate_interpretation, Interpretation, Value};
use super::raw::{RawModel, ValidationLevel};

/// A validated concurrent proto-algorithm: alphabet, component graphs (one of
/// them main) and interpretation.
#[derive(Clone, Debug)]
pub struct ProtoAlgorithm {
    alphabet: Alphabet,
    components: Vec<ComponentGraph>,
    interp: Interpretation,
    level: ValidationLevel,
    main: usize,
    warnings: Vec<ModelError>,
    closure: Vec<Value>,
    provenance: Option<BTreeMap<String, String>>,
}

impl ProtoAlgorithm {
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn components(&self) -> &[ComponentGraph] {
        &self.components
    }

    pub fn interpretation(&self) -> &Interpretation {
        &self.interp
    }

    pub fn level(&self) -> ValidationLevel {
        self.level
    }

    /// Index of the main component (0-based).
    pub fn main_index(&self) -> usize {
        self.main
    }

    pub fn warnings(&self) -> &[ModelError] {
        &self.warnings
    }

    /// Closure of the `ini` images computed during validation.
    pub fn closure(&self) -> &[Value] {
        &self.closure
    }

    pub fn provenance(&self) -> Option<&BTreeMap<String, String>> {
        self.provenance.as_ref()
    }

    pub fn set_provenance(&mut self, p: Option<BTreeMap<String, String>>) {
        self.provenance = p;
    }

    pub fn is_sequential(&self) -> bool {
        self.components.len() == 1
    }

    /// Some component needs the relaxed (at least one successor) rule.
    pub fn has_nondeterministic_components(&self) -> bool {
        self.components
            .iter()
            .any(|g| !g.is_deterministic(&self.alphabet))
    }

    /// Classical alphabet, one component, deterministic.
    pub fn is_classical(&self) -> bool {
        self.alphabet.is_classical() && self.is_sequential() && !self.has_nondeterministic_components()
    }

    pub fn to_raw(&self) -> RawModel {
        RawModel {
            alphabet: self.alphabet.to_raw(),
            components: self
                .components
                .iter()
                .map(|g| g.to_raw(&self.alphabet))
                .collect(),
            interpretation: self.interp.to_raw(&self.alphabet),
            provenance: self.provenance.clone(),
        }
    }
}

/// Validates all parts of a raw model and enforces the single-main rule.
pub fn validate_proto_algorithm(
    raw: &RawModel,
    level: ValidationLevel,
) -> Result<ProtoAlgorithm, Vec<ModelError>> {
    let alphabet = validate_alphabet(&raw.alphabet)?;
    let mut errors = Vec::new();

    if raw.components.is_empty() {
        errors.push(ModelError::NoComponents);
    }
    let mut components = Vec::new();
    for (k, g) in raw.components.iter().enumerate() {
        match validate_component_graph(g, &alphabet, g.nondeterministic, k) {
            Ok(g) => components.push(g),
            Err(e) => errors.extend(e),
        }
    }

    let mains: Vec<usize> = raw
        .components
        .iter()
        .enumerate()
        .filter(|(_, g)| {
            g.vertices
                .iter()
                .any(|v| v.id == g.root && v.label == INI)
        })
        .map(|(k, _)| k)
        .collect();
    match mains.len() {
        0 if !raw.components.is_empty() => errors.push(ModelError::NoMainComponent),
        0 | 1 => {}
        _ => errors.push(ModelError::MultipleMainComponents {
            components: mains.clone(),
        }),
    }

    let checked = match validate_interpretation(&raw.interpretation, &alphabet, level) {
        Ok(c) => Some(c),
        Err(e) => {
            errors.extend(e);
            None
        }
    };

    if !errors.is_empty() {
        return Err(errors);
    }
    let checked = checked.expect("no errors implies a checked interpretation");
    Ok(ProtoAlgorithm {
        alphabet,
        components,
        interp: checked.interpretation,
        level,
        main: mains[0],
        warnings: checked.warnings,
        closure: checked.closure,
        provenance: raw.provenance.clone(),
    })
}
