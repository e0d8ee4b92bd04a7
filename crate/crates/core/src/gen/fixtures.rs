//! The reference models: a sequential countdown and a two-component handoff
//! through the shared datum, plus the countdown variants used as equivalence
//! witnesses.

use std::collections::BTreeMap;

use super::build::{alphabet, binary, graph, model, numbers, predicate, strings, unary};
use crate::model::{BottomPolicy, RawModel};

fn countdown_with(n: u32, g: crate::model::RawGraph) -> RawModel {
    let d = numbers(0..=n);
    let mut tables = BTreeMap::new();
    tables.insert("ini".into(), unary(&d, false, |x| x));
    tables.insert("fin".into(), unary(&d, true, |_| Some(0)));
    tables.insert("dec".into(), unary(&d, true, |x| x.map(|k| k.saturating_sub(1))));
    tables.insert("z".into(), predicate(&d, true, |x| x == Some(0)));
    model(
        alphabet(&["ini", "fin", "dec"], &[], &[], &["z"]),
        vec![g],
        d.clone(),
        d,
        strings(&["0"]),
        tables,
    )
}

/// Sequential countdown from the input to zero, output 0.
pub fn countdown(n: u32) -> RawModel {
    countdown_with(
        n,
        graph(
            "r",
            &[("r", "ini"), ("v1", "z"), ("v2", "dec"), ("v3", "fin")],
            &[
                ("r", "v1", None),
                ("v1", "v2", Some(0)),
                ("v1", "v3", Some(1)),
                ("v2", "v1", None),
            ],
        ),
    )
}

/// The countdown with its loop body written out twice.
pub fn countdown_unrolled(n: u32) -> RawModel {
    countdown_with(
        n,
        graph(
            "r",
            &[
                ("r", "ini"),
                ("v1", "z"),
                ("v2", "dec"),
                ("v3", "fin"),
                ("v4", "z"),
                ("v5", "dec"),
                ("v6", "fin"),
            ],
            &[
                ("r", "v1", None),
                ("v1", "v2", Some(0)),
                ("v1", "v3", Some(1)),
                ("v2", "v4", None),
                ("v4", "v5", Some(0)),
                ("v4", "v6", Some(1)),
                ("v5", "v1", None),
            ],
        ),
    )
}

/// The countdown with a second, redundant zero test before `fin`.
pub fn countdown_double_test(n: u32) -> RawModel {
    countdown_with(
        n,
        graph(
            "r",
            &[("r", "ini"), ("v1", "z"), ("v2", "dec"), ("v3", "fin"), ("v3'", "z")],
            &[
                ("r", "v1", None),
                ("v1", "v2", Some(0)),
                ("v1", "v3'", Some(1)),
                ("v3'", "v3", Some(1)),
                ("v3'", "v2", Some(0)),
                ("v2", "v1", None),
            ],
        ),
    )
}

/// Main component hands its input to a worker through the shared datum and
/// waits until the worker has bumped it to `n`.
pub fn handoff(n: u32) -> RawModel {
    let d = numbers(0..=n);
    let mut tables = BTreeMap::new();
    tables.insert("ini".into(), unary(&numbers(0..=1), false, |x| x));
    tables.insert("fin".into(), unary(&d, true, |x| x));
    tables.insert(
        "bump".into(),
        unary(&d, true, |x| x.map(|k| if k == 0 { 0 } else { (k + 1).min(n) })),
    );
    tables.insert("top".into(), predicate(&d, true, |x| x == Some(n)));
    tables.insert("put".into(), binary(&d, true, |p, s| p.or(s)));
    tables.insert("take".into(), binary(&d, true, |p, s| s.or(p)));
    let main = graph(
        "m0",
        &[
            ("m0", "ini"),
            ("m1", "put"),
            ("m2", "take"),
            ("m3", "top"),
            ("m4", "fin"),
        ],
        &[
            ("m0", "m1", None),
            ("m1", "m2", None),
            ("m2", "m3", None),
            ("m3", "m4", Some(1)),
            ("m3", "m2", Some(0)),
        ],
    );
    let worker = graph(
        "w0",
        &[("w0", "take"), ("w1", "bump"), ("w2", "put"), ("w3", "take")],
        &[
            ("w0", "w1", None),
            ("w1", "w2", None),
            ("w2", "w3", None),
            ("w3", "w1", None),
        ],
    );
    model(
        alphabet(&["ini", "fin", "bump"], &["put"], &["take"], &["top"]),
        vec![main, worker],
        d.clone(),
        numbers(0..=1),
        d,
        tables,
    )
}

pub fn with_policy(mut m: RawModel, policy: BottomPolicy) -> RawModel {
    m.interpretation.bottom_policy = policy;
    m
}
