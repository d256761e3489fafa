//! The textual format: round trips, diagnostics and robustness.

mod common;

use bipsym_core::{parse, parse_bytes, parse_source, serialize, AcTerm, DslErrorKind, Span};
use common::random_system;
use proptest::prelude::*;

const MODELS: [&str; 2] = [
    include_str!("../../../models/modulo8.bip-lite"),
    include_str!("../../../models/sender_receivers.bip-lite"),
];

#[test]
fn shipped_models_round_trip() {
    for text in MODELS {
        let sys = parse(text).unwrap();
        let printed = serialize(&sys);
        assert_eq!(parse(&printed).unwrap(), sys);
        assert_eq!(serialize(&parse(&printed).unwrap()), printed);
    }
}

#[test]
fn random_systems_round_trip() {
    for seed in 0..200 {
        let sys = random_system(seed, 4, 3, 2);
        let text = serialize(&sys);
        let back = parse(&text).unwrap_or_else(|e| panic!("{text}\n{e:?}"));
        assert_eq!(back, sys, "{text}");
    }
}

#[test]
fn broadcast_connector_text() {
    let sys = parse(
        "system k {
           atom a { ports s, r1, r2, r3; states init x; trans x -[s]-> x; }
           connector k = s' r1 r2 r3;
         }",
    )
    .unwrap();
    assert_eq!(sys.connectors()[0].term, AcTerm::broadcast("s", &["r1", "r2", "r3"]));
}

#[test]
fn empty_system_text() {
    assert_eq!(serialize(&parse("system X { }").unwrap()), "system X { }\n");
}

#[test]
fn diagnostics_carry_locations() {
    let cases: &[(&str, DslErrorKind, Span)] = &[
        (
            "system s {\n  connector c = [p q;\n}",
            DslErrorKind::Syntax,
            Span { line: 2, column: 21 },
        ),
        (
            "system s { atom a { ports p; states x; } }",
            DslErrorKind::Semantic,
            Span { line: 1, column: 30 },
        ),
        (
            "system s {\n\n  atom a { ports p; states init x; trans x -[p]-> y; } }",
            DslErrorKind::Semantic,
            Span { line: 3, column: 51 },
        ),
        (
            "system s { connector c = p $ q; }",
            DslErrorKind::Lexical,
            Span { line: 1, column: 28 },
        ),
        (
            "system s { connector c = 12; }",
            DslErrorKind::Lexical,
            Span { line: 1, column: 26 },
        ),
        (
            "system s {\n  connector c = z;\n}",
            DslErrorKind::Semantic,
            Span { line: 2, column: 3 },
        ),
        (
            "system s { atom a { ports p; states init x; } atom b { ports p; states init y; } }",
            DslErrorKind::Semantic,
            Span { line: 1, column: 47 },
        ),
        ("system s { }\nextra", DslErrorKind::Syntax, Span { line: 2, column: 1 }),
    ];
    for (text, kind, span) in cases {
        let errs = parse(text).unwrap_err();
        assert_eq!((errs[0].kind, errs[0].span), (*kind, *span), "{text}: {}", errs[0]);
    }
}

#[test]
fn source_map_points_at_declarations() {
    let src = parse_source(MODELS[0]).unwrap();
    assert_eq!(src.map.atoms.len(), 3);
    assert_eq!(src.map.atoms[0], Span { line: 3, column: 3 });
    assert_eq!(src.map.connectors[0].line, 21);
}

#[test]
fn invalid_utf8_is_a_lexical_diagnostic() {
    let errs = parse_bytes(b"system s {\n  \xff }").unwrap_err();
    assert_eq!(errs[0].kind, DslErrorKind::Lexical);
    assert_eq!(errs[0].span, Span { line: 2, column: 3 });
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn arbitrary_bytes_never_panic(bytes in prop::collection::vec(any::<u8>(), 0..200)) {
        if let Err(errs) = parse_bytes(&bytes) {
            prop_assert!(!errs.is_empty());
            prop_assert!(errs.iter().all(|e| e.span.line >= 1 && e.span.column >= 1));
        }
    }

    #[test]
    fn token_soup_never_panics(words in prop::collection::vec(
        prop::sample::select(vec![
            "system", "atom", "ports", "states", "init", "trans", "connector", "priority",
            "maximal_progress", "p", "q", "x", "{", "}", "[", "]", "-[", "]->", ";", ",", "'", "=", "<", "0", "1", "#", "\n",
        ]),
        0..60,
    )) {
        let text = words.join(" ");
        if let Err(errs) = parse(&text) {
            prop_assert!(!errs.is_empty());
        }
    }

    #[test]
    fn mutated_models_never_panic(pos in 0usize..400, byte: u8) {
        let mut bytes = MODELS[0].as_bytes().to_vec();
        let at = pos % bytes.len();
        bytes[at] = byte;
        let _ = parse_bytes(&bytes);
    }
}
