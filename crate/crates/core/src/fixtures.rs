//! Generated evaluation corpus: 50 labeled cases per direction whose label
//! distribution matches the observed error-pattern percentages, plus a
//! hand-checked set of clean methods for collapse false-positive testing.
//!
//! Label counts per 50 cases (labels are sets, so sums exceed 50):
//!   j2p: additional_context 9, loop_conversion 6, type_sensitivity 19,
//!        extra_constraints 0, miscellaneous 7, mostly_correct 11
//!        (two cases carry {additional_context, type_sensitivity})
//!   p2j: additional_context 19, loop_conversion 0, type_sensitivity 2,
//!        extra_constraints 25, miscellaneous 8, mostly_correct 9
//!        (thirteen cases carry {additional_context, extra_constraints})

use std::path::Path;

use crate::error::Result;
use crate::eval::Category;
use crate::parse::parse_unit;
use crate::pipeline::{MockProfile, MockTranslator};
use crate::prerules::{apply_pre, PreConfig};
use crate::token::{Direction, Language};

#[derive(Debug, Clone)]
pub struct FixtureCase {
    pub id: String,
    pub direction: Direction,
    /// Source text in the direction's input language.
    pub source: String,
    /// Clean ground-truth translation in the target language.
    pub translation: String,
    pub labels: Vec<Category>,
}

const OPS: [&str; 3] = ["+", "-", "*"];
const CMPS: [&str; 3] = [">", "<", "!="];

fn op(i: usize) -> &'static str {
    OPS[i % OPS.len()]
}

fn cmp(i: usize) -> &'static str {
    CMPS[i % CMPS.len()]
}

// Paired program templates; each index yields distinct text.

fn simple_java(i: usize) -> String {
    format!(
        "static int f_gold ( int a , int b ) {{ int t = a {} b ; return t + {} ; }}",
        op(i),
        i + 1
    )
}

fn simple_python(i: usize) -> String {
    format!(
        "def f_gold ( a , b ) :\n\tt = a {} b\n\treturn t + {}\n",
        op(i),
        i + 1
    )
}

fn java_with_main(i: usize) -> String {
    format!(
        "class GFG {{ {} public static void main ( String [ ] args ) {{ int r = f_gold ( {} , {} ) ; System . out . println ( r ) ; }} }}",
        simple_java(i),
        i + 1,
        i + 2
    )
}

fn array_java(i: usize) -> String {
    format!(
        "static int f_gold ( int arr [ ] , int n ) {{ int s = {} ; for ( int i = 0 ; i < n ; i ++ ) {{ s = s {} arr [ i ] ; }} return s ; }}",
        i, op(i)
    )
}

fn array_python(i: usize) -> String {
    format!(
        "def f_gold ( arr , n ) :\n\ts = {}\n\tfor i in range ( n ) :\n\t\ts = s {} arr [ i ]\n\treturn s\n",
        i, op(i)
    )
}

fn array_java_with_main(i: usize) -> String {
    format!(
        "class GFG {{ {} public static void main ( String [ ] args ) {{ int [ ] a = {{ 1 , 2 , {} }} ; System . out . println ( f_gold ( a , 3 ) ) ; }} }}",
        array_java(i),
        i + 3
    )
}

fn complex_for_java(i: usize) -> String {
    format!(
        "static int f_gold ( int n ) {{ int s = 0 ; for ( int x = n ; x > {} ; x = x / {} ) {{ s = s + x ; }} return s ; }}",
        i % 2,
        (i % 3) + 2
    )
}

fn complex_for_python(i: usize) -> String {
    format!(
        "def f_gold ( n ) :\n\ts = 0\n\tx = n\n\twhile x > {} :\n\t\ts = s + x\n\t\tx = x / {}\n\treturn s\n",
        i % 2,
        (i % 3) + 2
    )
}

fn while_python(i: usize) -> String {
    format!(
        "def f_gold ( x ) :\n\tc = 0\n\twhile x {} {} :\n\t\tc = c + 1\n\t\tx = x - {}\n\treturn c\n",
        cmp(i),
        i % 5,
        (i % 4) + 1
    )
}

fn while_java(i: usize) -> String {
    format!(
        "static int f_gold ( int x ) {{ int c = 0 ; while ( x {} {} ) {{ c = c + 1 ; x = x - {} ; }} return c ; }}",
        cmp(i),
        i % 5,
        (i % 4) + 1
    )
}

fn while_python_with_context(i: usize) -> String {
    format!(
        "{}\nif __name__ == '__main__' :\n\tprint ( f_gold ( {} ) )\n",
        while_python(i),
        i + 10
    )
}

fn straight_python(i: usize) -> String {
    format!("def f_gold ( a , b ) :\n\treturn a {} b + {}\n", op(i), i)
}

fn straight_java(i: usize) -> String {
    format!(
        "static int f_gold ( int a , int b ) {{ return a {} b + {} ; }}",
        op(i),
        i
    )
}

fn straight_python_with_context(i: usize) -> String {
    format!(
        "{}\nif __name__ == '__main__' :\n\tprint ( f_gold ( {} , {} ) )\n",
        straight_python(i),
        i,
        i + 1
    )
}

fn arr_params_python(i: usize) -> String {
    format!(
        "def f_gold ( arr1 , arr2 , n ) :\n\ts = {}\n\tfor i in range ( n ) :\n\t\ts = s + arr1 [ i ] {} arr2 [ i ]\n\treturn s\n",
        i, op(i)
    )
}

fn arr_params_java(i: usize) -> String {
    format!(
        "static int f_gold ( List < Integer > list1 , List < Integer > list2 , int n ) {{ int s = {} ; for ( int i = 0 ; i < n ; i ++ ) {{ s = s + list1 . get ( i ) {} list2 . get ( i ) ; }} return s ; }}",
        i, op(i)
    )
}

/// The full two-direction corpus: 50 labeled cases each way.
pub fn fixture_corpus() -> Vec<FixtureCase> {
    use Category::*;
    let mut cases = Vec::new();
    let mut j2p = |i: usize, source: String, translation: String, labels: Vec<Category>| {
        cases.push(FixtureCase {
            id: format!("j2p_{i:03}"),
            direction: Direction::J2p,
            source,
            translation,
            labels,
        });
    };
    let mut i = 0usize;
    for _ in 0..2 {
        j2p(
            i,
            array_java_with_main(i),
            array_python(i),
            vec![AdditionalContext, TypeSensitivity],
        );
        i += 1;
    }
    for _ in 0..7 {
        j2p(
            i,
            java_with_main(i),
            simple_python(i),
            vec![AdditionalContext],
        );
        i += 1;
    }
    for _ in 0..6 {
        j2p(
            i,
            complex_for_java(i),
            complex_for_python(i),
            vec![LoopConversion],
        );
        i += 1;
    }
    for _ in 0..17 {
        j2p(i, array_java(i), array_python(i), vec![TypeSensitivity]);
        i += 1;
    }
    for _ in 0..7 {
        j2p(i, simple_java(i), simple_python(i), vec![Miscellaneous]);
        i += 1;
    }
    for _ in 0..11 {
        j2p(i, simple_java(i), simple_python(i), vec![MostlyCorrect]);
        i += 1;
    }
    assert_eq!(i, 50);

    let mut p2j = |i: usize, source: String, translation: String, labels: Vec<Category>| {
        cases.push(FixtureCase {
            id: format!("p2j_{i:03}"),
            direction: Direction::P2j,
            source,
            translation,
            labels,
        });
    };
    let mut i = 0usize;
    for _ in 0..13 {
        p2j(
            i,
            while_python_with_context(i),
            while_java(i),
            vec![AdditionalContext, ExtraConstraints],
        );
        i += 1;
    }
    for _ in 0..6 {
        p2j(
            i,
            straight_python_with_context(i),
            straight_java(i),
            vec![AdditionalContext],
        );
        i += 1;
    }
    for _ in 0..12 {
        p2j(i, while_python(i), while_java(i), vec![ExtraConstraints]);
        i += 1;
    }
    for _ in 0..2 {
        p2j(
            i,
            arr_params_python(i),
            arr_params_java(i),
            vec![TypeSensitivity],
        );
        i += 1;
    }
    for _ in 0..8 {
        p2j(i, straight_python(i), straight_java(i), vec![Miscellaneous]);
        i += 1;
    }
    for _ in 0..9 {
        p2j(i, straight_python(i), straight_java(i), vec![MostlyCorrect]);
        i += 1;
    }
    assert_eq!(i, 50);
    cases
}

/// Write the corpus in the on-disk layout the harness ingests:
/// `<root>/{java,python}/<id>.<ext>` plus `labels.json`.
pub fn write_corpus(root: &Path) -> Result<Vec<FixtureCase>> {
    let cases = fixture_corpus();
    std::fs::create_dir_all(root.join("java"))?;
    std::fs::create_dir_all(root.join("python"))?;
    let mut j2p_labels = serde_json::Map::new();
    let mut p2j_labels = serde_json::Map::new();
    for case in &cases {
        // Only the source side goes on disk; the ground-truth translation
        // lives in the mock translator's fixture table.
        match case.direction {
            Direction::J2p => std::fs::write(
                root.join("java").join(format!("{}.java", case.id)),
                &case.source,
            )?,
            Direction::P2j => std::fs::write(
                root.join("python").join(format!("{}.py", case.id)),
                &case.source,
            )?,
        }
        let tags = serde_json::to_value(&case.labels).expect("labels serialize");
        match case.direction {
            Direction::J2p => j2p_labels.insert(case.id.clone(), tags),
            Direction::P2j => p2j_labels.insert(case.id.clone(), tags),
        };
    }
    let labels = serde_json::json!({ "j2p": j2p_labels, "p2j": p2j_labels });
    std::fs::write(
        root.join("labels.json"),
        serde_json::to_string_pretty(&labels)? + "\n",
    )?;
    Ok(cases)
}

/// Build a mock translator whose fixture table answers both the raw and the
/// pre-processed form of every corpus source.
pub fn fixture_mock(profile: MockProfile, seed: u64) -> MockTranslator {
    let mut mock = MockTranslator::new(profile, seed);
    for case in fixture_corpus() {
        mock.insert(case.direction, &case.source, &case.translation);
        let lang = case.direction.source_lang();
        if let Ok(unit) = parse_unit(&case.source, lang) {
            let (pre, _) = apply_pre(&unit, &PreConfig::new(case.direction));
            mock.insert(case.direction, &pre, &case.translation);
        }
    }
    mock
}

/// Twenty hand-checked clean methods the collapse detector must not flag.
pub fn clean_fixtures() -> Vec<(String, Language)> {
    let java = [
        "static int f_gold ( int n ) { int c = 0 ; while ( n > 0 ) { c = c + n % 10 ; n = n / 10 ; } return c ; }",
        "static int f_gold ( int a , int b ) { if ( a > b ) { return a ; } return b ; }",
        "static boolean f_gold ( int n ) { for ( int i = 2 ; i * i <= n ; i ++ ) { if ( n % i == 0 ) { return false ; } } return n > 1 ; }",
        "static int f_gold ( int arr [ ] , int n ) { int s = 0 ; for ( int i = 0 ; i < n ; i ++ ) { s = s + arr [ i ] ; } return s ; }",
        "import java . util . * ;\nclass GFG { static int f_gold ( int x ) { return x * x ; } public static void main ( String [ ] args ) { System . out . println ( f_gold ( 4 ) ) ; } }",
        "static int f_gold ( int n ) { int a = 0 ; int b = 1 ; for ( int i = 0 ; i < n ; i ++ ) { int t = a + b ; a = b ; b = t ; } return a ; }",
        "static double f_gold ( double r ) { return 3.14159 * r * r ; }",
        "static int f_gold ( String s ) { int v = 0 ; for ( int i = 0 ; i < s . length ( ) ; i ++ ) { v = v + s . charAt ( i ) ; } return v ; }",
        "static int f_gold ( int x , int y , int z ) { int m = x ; if ( y > m ) { m = y ; } if ( z > m ) { m = z ; } return m ; }",
        "static long f_gold ( int n ) { long f = 1 ; while ( n > 1 ) { f = f * n ; n -- ; } return f ; }",
    ];
    let python = [
        "def f_gold ( n ) :\n\tc = 0\n\twhile n > 0 :\n\t\tc = c + n % 10\n\t\tn = n // 10\n\treturn c\n",
        "def f_gold ( a , b ) :\n\tif a > b :\n\t\treturn a\n\treturn b\n",
        "def f_gold ( lst ) :\n\ts = 0\n\tfor x in lst :\n\t\ts = s + x\n\treturn s\n",
        "import math\ndef f_gold ( r ) :\n\treturn math . pi * r * r\n",
        "def f_gold ( n ) :\n\ta , b = 0 , 1\n\tfor _ in range ( n ) :\n\t\ta , b = b , a + b\n\treturn a\n",
        "def f_gold ( s ) :\n\treturn s [ : : - 1 ]\n",
        "def f_gold ( x , y , z ) :\n\tm = x\n\tif y > m :\n\t\tm = y\n\tif z > m :\n\t\tm = z\n\treturn m\n",
        "def f_gold ( n ) :\n\tf = 1\n\twhile n > 1 :\n\t\tf = f * n\n\t\tn = n - 1\n\treturn f\n",
        "def f_gold ( values ) :\n\tsquares = [ 1 , 4 , 9 , 16 , 25 ]\n\treturn [ v for v in values if v in squares ]\n",
        "def f_gold ( text ) :\n\twords = text . split ( ' ' )\n\treturn len ( words )\n",
    ];
    java.iter()
        .map(|t| (t.to_string(), Language::Java))
        .chain(python.iter().map(|t| (t.to_string(), Language::Python)))
        .collect()
}
