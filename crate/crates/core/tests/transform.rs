mod common;

use common::{fixture, random_models, valid};
use protoalg::equivalence::check_equivalence;
use protoalg::gen;
use protoalg::io::{parse_model, serialize_model};
use protoalg::model::{validate_proto_algorithm, BottomPolicy, ProtoAlgorithm, ValidationLevel};
use protoalg::semantics::{Variant, DEFAULT_STATE_CAP};
use protoalg::transform::{build_sequential, check_theorem3, named_function, sequentialize, TransformError};

const CAP: usize = DEFAULT_STATE_CAP;

fn certify(a: &ProtoAlgorithm) {
    let t = check_theorem3(a, CAP).unwrap();
    assert!(t.holds(), "{:?}", t.result.certificate.as_ref().map(|c| &c.correspondence_checked));
    let out = &t.result.output;
    assert!(out.is_sequential() && out.alphabet().is_classical());
    // The output survives a trip through the document format.
    let text = serialize_model(out);
    let back = validate_proto_algorithm(&parse_model(&text).unwrap(), ValidationLevel::Lenient).unwrap();
    assert_eq!(serialize_model(&back), text);
    assert!(check_equivalence(a, &back, Variant::Algorithmic, CAP).unwrap().verdict);
    assert_eq!(named_function(a, CAP).unwrap(), named_function(&back, CAP).unwrap());
}

#[test]
fn fixtures_sequentialize_to_equivalent_models() {
    for name in common::FIXTURES {
        certify(&fixture(name));
    }
}

#[test]
fn random_concurrent_models_sequentialize_to_equivalent_models() {
    let models: Vec<_> = random_models(71, 40).into_iter().filter(|a| a.components().len() >= 2).collect();
    assert_eq!(models.len(), 20);
    for a in &models {
        certify(a);
    }
}

#[test]
fn handoff_product_shape() {
    let a = fixture("f2");
    let r = build_sequential(&a, CAP).unwrap();
    assert!(r.certificate.is_none());
    let g = &r.output.components()[0];
    let (vm, vw) = (a.components()[0].len(), a.components()[1].len());
    assert!(g.len() <= vm * vw * 2);
    assert!(r.output.has_nondeterministic_components());
    for v in g.vertices() {
        let f = g.label(v);
        let kind = r.output.alphabet().kind(f);
        if f != r.output.alphabet().fin() && kind != protoalg::model::SymbolKind::Predicate {
            assert_eq!(g.outdegree(v), 2, "{}", g.id(v));
        }
    }
}

#[test]
fn sequential_source_keeps_its_shape() {
    let a = fixture("f1");
    let r = sequentialize(&a, CAP).unwrap();
    assert_eq!(r.output.components()[0].len(), 4);
    assert_eq!(r.output.components()[0].edge_count(), 4);
    assert!(r.output.is_classical());
}

#[test]
fn strict_source_with_stuck_states_is_refused() {
    let a = valid(&gen::with_policy(gen::handoff(2), BottomPolicy::Strict));
    assert!(matches!(sequentialize(&a, CAP), Err(TransformError::StuckSource { .. })));
}

#[test]
fn state_cap_is_reported() {
    let a = fixture("f2");
    assert!(matches!(sequentialize(&a, 3), Err(TransformError::Semantics(_))));
}
