//! Property tests for the structural invariants the rule engine leans on.

use proptest::prelude::*;

use transguard::prerules::{default_arr_pattern, rename_arr_params};
use transguard::render::{render_method, render_unit};
use transguard::token::Language;
use transguard::{classify, parse_method, parse_unit, CollapseConfig};

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

fn ident() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["x", "y", "s", "n", "count", "temp"]).prop_map(str::to_string)
}

fn number() -> impl Strategy<Value = String> {
    (0u32..100).prop_map(|n| n.to_string())
}

fn java_simple_stmt() -> impl Strategy<Value = String> {
    prop_oneof![
        (ident(), number()).prop_map(|(v, n)| format!("{v} = {v} + {n} ;")),
        (ident(), number()).prop_map(|(v, n)| format!("int {v} = {n} ;")),
        ident().prop_map(|v| format!("{v} ++ ;")),
        (ident(), number()).prop_map(|(v, n)| format!("return {v} + {n} ;")),
    ]
}

fn java_stmt() -> impl Strategy<Value = String> {
    let simple = java_simple_stmt();
    simple.prop_recursive(2, 8, 3, |inner| {
        prop_oneof![
            (
                ident(),
                number(),
                prop::collection::vec(inner.clone(), 1..3)
            )
                .prop_map(|(v, n, body)| format!("if ( {v} < {n} ) {{ {} }}", body.join(" "))),
            (
                ident(),
                number(),
                prop::collection::vec(inner.clone(), 1..3)
            )
                .prop_map(|(v, n, body)| format!("while ( {v} > {n} ) {{ {} }}", body.join(" "))),
            (number(), prop::collection::vec(inner, 1..3)).prop_map(|(n, body)| format!(
                "for ( int i = 0 ; i < {n} ; i ++ ) {{ {} }}",
                body.join(" ")
            )),
        ]
    })
}

fn java_method() -> impl Strategy<Value = String> {
    prop::collection::vec(java_stmt(), 1..5).prop_map(|stmts| {
        format!(
            "static int f_gold ( int x , int n ) {{ {} }}",
            stmts.join(" ")
        )
    })
}

fn python_params() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(
        prop::sample::select(vec!["arr", "arr1", "arr2", "x", "n"]).prop_map(str::to_string),
        1..4,
    )
    .prop_map(|mut params| {
        params.dedup();
        params
    })
}

// ---------------------------------------------------------------------------
// Properties
// ---------------------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// parse . render . parse is the identity on structure.
    #[test]
    fn java_round_trip(source in java_method()) {
        let once = parse_unit(&source, Language::Java).unwrap();
        let rendered = render_unit(&once);
        let twice = parse_unit(&rendered, Language::Java).unwrap();
        prop_assert_eq!(once, twice);
    }

    /// Rendering is a fixed point: rendering a reparsed render changes nothing.
    #[test]
    fn render_is_stable(source in java_method()) {
        let rendered = render_unit(&parse_unit(&source, Language::Java).unwrap());
        let again = render_unit(&parse_unit(&rendered, Language::Java).unwrap());
        prop_assert_eq!(rendered, again);
    }

    /// Renaming arr parameters twice equals renaming them once.
    #[test]
    fn arr_rename_idempotent(params in python_params()) {
        let source = format!(
            "def f_gold ( {} ) :\n\treturn {}\n",
            params.join(" , "),
            params[0]
        );
        let m = parse_method(&source, Language::Python).unwrap();
        let pattern = default_arr_pattern();
        let (once, _) = rename_arr_params(&m, &pattern, 1);
        let (twice, record) = rename_arr_params(&once, &pattern, 1);
        prop_assert!(!record.applied);
        prop_assert_eq!(render_method(&once), render_method(&twice));
    }

    /// Appending more spam never removes a detected collapse class.
    #[test]
    fn collapse_monotonic(
        base in java_method(),
        commas in 0usize..20,
        spacetokens in 0usize..6,
    ) {
        let config = CollapseConfig::default();
        let spam: String = std::iter::repeat_n(", ", commas)
            .chain(std::iter::repeat_n("SPACETOKEN ", spacetokens))
            .collect();
        let small = format!("{base}\n{spam}");
        let large = format!("{base}\n{spam}{spam}");
        let before = classify(&small, Language::Java, None, &config);
        let after = classify(&large, Language::Java, None, &config);
        prop_assert!(before.classes.is_subset(&after.classes),
            "classes shrank: {:?} -> {:?}", before.classes, after.classes);
    }
}
