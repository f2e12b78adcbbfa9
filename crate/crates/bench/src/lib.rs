//! Shared inputs for the criterion benchmarks: representative corpus texts
//! drawn from the fixture generators.

use transguard::fixtures::fixture_corpus;
use transguard::token::{Direction, Language};

/// A Java focal method with an array parameter and a loop (pre-rule heavy).
pub fn java_sample() -> String {
    fixture_corpus()
        .into_iter()
        .find(|c| c.direction == Direction::J2p && c.source.contains("arr ["))
        .map(|c| c.source)
        .expect("corpus has an array case")
}

/// A Python focal method with a while loop (prune-rule input).
pub fn python_sample() -> String {
    fixture_corpus()
        .into_iter()
        .find(|c| c.direction == Direction::P2j && c.source.contains("while"))
        .map(|c| c.source)
        .expect("corpus has a while case")
}

/// Language of a direction's source side, re-exported for the benches.
pub fn source_lang(direction: Direction) -> Language {
    direction.source_lang()
}
