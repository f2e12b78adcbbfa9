//! Output mutation applied after translation.
//!
//! R4: the translator sometimes appends extra logical clauses to `if`,
//! `else if` and `while` conditions that do not appear in the source.
//! Pruning pairs conditionals by pre-order position and discards the
//! surplus clauses, never editing clause interiors.

use serde::{Deserialize, Serialize};

use crate::cond::{normalize_clause, CondChain};
use crate::error::Error;
use crate::parse::{parse_unit, parse_unit_lenient, Block, MethodUnit, Stmt};
use crate::prerules::{MutationRecord, Rule};
use crate::render::render_unit;
use crate::token::{Direction, Language};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PruneMode {
    Count,
    Match,
}

impl std::str::FromStr for PruneMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "count" => Ok(PruneMode::Count),
            "match" => Ok(PruneMode::Match),
            other => Err(Error::Config(format!("unknown prune mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PrunePolicy {
    pub mode: PruneMode,
    pub normalize: bool,
}

impl Default for PrunePolicy {
    fn default() -> Self {
        PrunePolicy {
            mode: PruneMode::Count,
            normalize: true,
        }
    }
}

/// Statement kind carrying the condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CondKind {
    If,
    While,
}

#[derive(Debug, Clone)]
pub struct CondPair {
    pub src: CondChain,
    pub dst: CondChain,
    pub src_kind: CondKind,
    pub dst_kind: CondKind,
}

#[derive(Debug, Clone)]
pub struct CondAlignment {
    pub pairs: Vec<CondPair>,
    pub unmatched_src: usize,
    pub unmatched_dst: usize,
}

/// Collect (kind, chain) for every condition-bearing statement in pre-order.
fn collect_conds(block: &Block, out: &mut Vec<(CondKind, CondChain)>) {
    for stmt in &block.stmts {
        match stmt {
            Stmt::If {
                cond,
                then_block,
                else_block,
                ..
            } => {
                out.push((CondKind::If, cond.clone()));
                collect_conds(then_block, out);
                if let Some(b) = else_block {
                    collect_conds(b, out);
                }
            }
            Stmt::While { cond, body, .. } => {
                out.push((CondKind::While, cond.clone()));
                collect_conds(body, out);
            }
            Stmt::For { body, .. } | Stmt::ForEach { body, .. } => collect_conds(body, out),
            _ => {}
        }
    }
}

/// Pair source and translated conditionals by traversal order, zipped up to
/// the shorter side.
pub fn align_conditionals(src: &MethodUnit, dst: &MethodUnit) -> CondAlignment {
    let mut src_conds = Vec::new();
    let mut dst_conds = Vec::new();
    collect_conds(&src.body, &mut src_conds);
    collect_conds(&dst.body, &mut dst_conds);
    let n = src_conds.len().min(dst_conds.len());
    let unmatched_src = src_conds.len() - n;
    let unmatched_dst = dst_conds.len() - n;
    let pairs = src_conds
        .into_iter()
        .zip(dst_conds)
        .map(|((src_kind, src), (dst_kind, dst))| CondPair {
            src,
            dst,
            src_kind,
            dst_kind,
        })
        .collect();
    CondAlignment {
        pairs,
        unmatched_src,
        unmatched_dst,
    }
}

/// Prune the translated chain of one pair down to the source clause count
/// (count mode) or to the normalized-matching clauses (match mode).
pub fn prune_extra_clauses(pair: &CondPair, policy: &PrunePolicy) -> (CondChain, MutationRecord) {
    let mut record = MutationRecord::new(Rule::R4Prune);
    let n = pair.src.count();
    let m = pair.dst.count();
    record.applicable = m > n;
    if !record.applicable {
        return (pair.dst.clone(), record);
    }
    if pair.src_kind != pair.dst_kind {
        record.notes = "rule skipped: conditional kind mismatch".into();
        return (pair.dst.clone(), record);
    }
    let kept: Vec<Vec<crate::token::Token>> = match policy.mode {
        PruneMode::Count => pair.dst.clauses.iter().take(n).cloned().collect(),
        PruneMode::Match => {
            let src_forms: Vec<String> = pair.src.clauses.iter().map(|c| key(c, policy)).collect();
            pair.dst
                .clauses
                .iter()
                .filter(|c| src_forms.contains(&key(c, policy)))
                .cloned()
                .collect()
        }
    };
    if kept.is_empty() {
        record.notes = "warning: match mode kept no clause, chain left unchanged".into();
        return (pair.dst.clone(), record);
    }
    record.applied = true;
    record.notes = format!("pruned {} of {m} clause(s)", m - kept.len());
    let op = if kept.len() == 1 {
        crate::cond::CondOp::Single
    } else {
        pair.dst.op
    };
    (CondChain { op, clauses: kept }, record)
}

fn key(clause: &[crate::token::Token], policy: &PrunePolicy) -> String {
    if policy.normalize {
        normalize_clause(clause)
    } else {
        crate::token::render_tokens(clause)
    }
}

/// Replace the chains of the first `replacements.len()` condition-bearing
/// statements in pre-order.
fn replace_conds(block: &mut Block, replacements: &[Option<CondChain>], idx: &mut usize) {
    for stmt in &mut block.stmts {
        match stmt {
            Stmt::If {
                cond,
                then_block,
                else_block,
                ..
            } => {
                if let Some(Some(chain)) = replacements.get(*idx) {
                    *cond = chain.clone();
                }
                *idx += 1;
                replace_conds(then_block, replacements, idx);
                if let Some(b) = else_block {
                    replace_conds(b, replacements, idx);
                }
            }
            Stmt::While { cond, body, .. } => {
                if let Some(Some(chain)) = replacements.get(*idx) {
                    *cond = chain.clone();
                }
                *idx += 1;
                replace_conds(body, replacements, idx);
            }
            Stmt::For { body, .. } | Stmt::ForEach { body, .. } => {
                replace_conds(body, replacements, idx)
            }
            _ => {}
        }
    }
}

/// Run R4 over a whole translated file. `src_text` is the pre-processed
/// input that was sent to the translator, `dst_text` its output. The rule
/// only fires for Python-to-Java.
pub fn apply_post(
    src_text: &str,
    dst_text: &str,
    direction: Direction,
    policy: &PrunePolicy,
) -> (String, Vec<MutationRecord>) {
    let mut record = MutationRecord::new(Rule::R4Prune);
    if direction != Direction::P2j {
        record.notes = "clause pruning only applies to p2j output".into();
        return (dst_text.to_string(), vec![record]);
    }
    let src_unit = match parse_unit(src_text, Language::Python) {
        Ok(u) => u,
        Err(e) => {
            record.notes = format!("rule skipped: source failed to parse: {e}");
            return (dst_text.to_string(), vec![record]);
        }
    };
    let Some(src_method) = src_unit.methods().next() else {
        record.notes = "rule skipped: no method in source".into();
        return (dst_text.to_string(), vec![record]);
    };
    let mut dst_unit = parse_unit_lenient(dst_text, Language::Java);
    let Some(dst_method) = dst_unit.methods().next() else {
        record.notes = "rule skipped: translated output unparseable".into();
        return (dst_text.to_string(), vec![record]);
    };

    let alignment = align_conditionals(src_method, dst_method);
    let mut records = Vec::new();
    let mut replacements: Vec<Option<CondChain>> = Vec::new();
    for pair in &alignment.pairs {
        let (chain, rec) = prune_extra_clauses(pair, policy);
        replacements.push(if rec.applied { Some(chain) } else { None });
        records.push(rec);
    }
    if records.iter().all(|r| !r.applied) {
        if records.is_empty() {
            records.push(record);
        }
        return (dst_text.to_string(), records);
    }
    let method = dst_unit.methods_mut().next().expect("method present above");
    let mut idx = 0usize;
    replace_conds(&mut method.body, &replacements, &mut idx);
    (render_unit(&dst_unit), records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cond::{parse_condition, CondOp};
    use crate::parse::parse_method;
    use crate::token::{render_tokens, tokenize};

    fn chain(text: &str, lang: Language) -> CondChain {
        parse_condition(&tokenize(text, lang).unwrap(), lang).unwrap()
    }

    fn norm(text: &str, lang: Language) -> String {
        render_tokens(&tokenize(text, lang).unwrap())
    }

    #[test]
    fn align_by_order() {
        let src = parse_method(
            "def f ( x ) :\n\tif x > 0 :\n\t\twhile x > 1 :\n\t\t\tx = x - 1\n\treturn x\n",
            Language::Python,
        )
        .unwrap();
        let dst = parse_method(
            "static int f ( int x ) { if ( x > 0 ) { while ( x > 1 ) { x = x - 1 ; } } return x ; }",
            Language::Java,
        )
        .unwrap();
        let alignment = align_conditionals(&src, &dst);
        assert_eq!(alignment.pairs.len(), 2);
        assert_eq!(alignment.pairs[0].src_kind, CondKind::If);
        assert_eq!(alignment.pairs[1].dst_kind, CondKind::While);
        assert_eq!(alignment.unmatched_src, 0);
        assert_eq!(alignment.unmatched_dst, 0);
    }

    #[test]
    fn align_unmatched_counts() {
        let src = parse_method("def f ( x ) :\n\treturn x\n", Language::Python).unwrap();
        let dst = parse_method(
            "static int f ( int x ) { if ( x > 0 ) { if ( x > 1 ) { return 1 ; } } return x ; }",
            Language::Java,
        )
        .unwrap();
        let alignment = align_conditionals(&src, &dst);
        assert!(alignment.pairs.is_empty());
        assert_eq!(alignment.unmatched_dst, 2);
    }

    #[test]
    fn prune_duplicate_clause() {
        let pair = CondPair {
            src: chain("x * x < n", Language::Python),
            dst: chain("( x * x < n ) && ( x * x < n )", Language::Java),
            src_kind: CondKind::While,
            dst_kind: CondKind::While,
        };
        let (out, record) = prune_extra_clauses(&pair, &PrunePolicy::default());
        assert!(record.applied);
        assert_eq!(out.count(), 1);
        assert_eq!(render_tokens(&out.render(Language::Java)), "x * x < n");
    }

    #[test]
    fn prune_appended_foreign_clause() {
        let pair = CondPair {
            src: chain("x != 0", Language::Python),
            dst: chain("( x != 0 ) && ( x % 10 == 0 )", Language::Java),
            src_kind: CondKind::While,
            dst_kind: CondKind::While,
        };
        let (out, record) = prune_extra_clauses(&pair, &PrunePolicy::default());
        assert!(record.applied);
        assert_eq!(render_tokens(&out.render(Language::Java)), "x != 0");
    }

    #[test]
    fn equal_counts_not_applicable() {
        let pair = CondPair {
            src: chain("x > 0", Language::Python),
            dst: chain("x > 0", Language::Java),
            src_kind: CondKind::If,
            dst_kind: CondKind::If,
        };
        let (out, record) = prune_extra_clauses(&pair, &PrunePolicy::default());
        assert!(!record.applicable && !record.applied);
        assert_eq!(out, pair.dst);
    }

    #[test]
    fn kind_mismatch_skips() {
        let pair = CondPair {
            src: chain("x > 0", Language::Python),
            dst: chain("( x > 0 ) && ( y > 0 )", Language::Java),
            src_kind: CondKind::If,
            dst_kind: CondKind::While,
        };
        let (out, record) = prune_extra_clauses(&pair, &PrunePolicy::default());
        assert!(record.applicable && !record.applied);
        assert_eq!(out, pair.dst);
    }

    #[test]
    fn match_mode_keeps_normalized_matches() {
        let pair = CondPair {
            src: chain("x != 0 and y > 1", Language::Python),
            dst: chain("( y > 1 ) && ( x % 10 == 0 ) && ( x != 0 )", Language::Java),
            src_kind: CondKind::While,
            dst_kind: CondKind::While,
        };
        let policy = PrunePolicy {
            mode: PruneMode::Match,
            normalize: true,
        };
        let (out, record) = prune_extra_clauses(&pair, &policy);
        assert!(record.applied);
        assert_eq!(out.count(), 2);
        assert_eq!(
            render_tokens(&out.render(Language::Java)),
            "y > 1 && x != 0"
        );
    }

    #[test]
    fn match_mode_empty_keeps_chain() {
        let pair = CondPair {
            src: chain("a > b", Language::Python),
            dst: chain("( c < d ) && ( e == f )", Language::Java),
            src_kind: CondKind::If,
            dst_kind: CondKind::If,
        };
        let policy = PrunePolicy {
            mode: PruneMode::Match,
            normalize: true,
        };
        let (out, record) = prune_extra_clauses(&pair, &policy);
        assert!(record.applicable && !record.applied);
        assert!(record.notes.contains("warning"));
        assert_eq!(out, pair.dst);
    }

    #[test]
    fn prune_is_prefix_of_dst() {
        let pair = CondPair {
            src: chain("a and b", Language::Python),
            dst: chain("( a ) && ( b ) && ( c ) && ( d )", Language::Java),
            src_kind: CondKind::While,
            dst_kind: CondKind::While,
        };
        let (out, record) = prune_extra_clauses(&pair, &PrunePolicy::default());
        assert!(record.applied);
        assert_eq!(out.clauses, pair.dst.clauses[..2].to_vec());
        assert_eq!(out.op, CondOp::And);
    }

    #[test]
    fn apply_post_whole_method() {
        let src = "def f_gold ( x ) :\n\twhile x != 0 :\n\t\tx = x - 1\n\treturn x\n";
        let dst = "static int f_gold ( int x ) { while ( x != 0 && x % 10 == 0 ) { x = x - 1 ; } return x ; }";
        let (out, records) = apply_post(src, dst, Direction::P2j, &PrunePolicy::default());
        assert!(records.iter().any(|r| r.applied));
        let text = norm(&out, Language::Java);
        assert!(text.contains("while ( x != 0 )"), "got: {text}");
        assert!(!text.contains("% 10"), "got: {text}");
    }

    #[test]
    fn apply_post_unparseable_dst_noop() {
        let src = "def f_gold ( x ) :\n\treturn x\n";
        let dst = "',' ',' ',' ',' ','";
        let (out, records) = apply_post(src, dst, Direction::P2j, &PrunePolicy::default());
        assert_eq!(out, dst);
        assert_eq!(records.len(), 1);
        assert!(records[0].notes.contains("unparseable"));
    }

    #[test]
    fn apply_post_identity_when_equal() {
        let src = "def f_gold ( x ) :\n\tif x > 0 :\n\t\treturn 1\n\treturn 0\n";
        let dst = "static int f_gold ( int x ) { if ( x > 0 ) { return 1 ; } return 0 ; }";
        let (out, records) = apply_post(src, dst, Direction::P2j, &PrunePolicy::default());
        assert_eq!(out, dst);
        assert!(records.iter().all(|r| !r.applied));
    }

    #[test]
    fn apply_post_j2p_is_noop() {
        let src = "static int f ( int x ) { while ( x != 0 ) { x -- ; } return x ; }";
        let dst = "def f ( x ) :\n\twhile x != 0 and x > - 5 :\n\t\tx = x - 1\n\treturn x\n";
        let (out, records) = apply_post(src, dst, Direction::J2p, &PrunePolicy::default());
        assert_eq!(out, dst);
        assert!(records.iter().all(|r| !r.applied));
    }

    #[test]
    fn apply_post_idempotent() {
        let src = "def f_gold ( x ) :\n\twhile x != 0 :\n\t\tx = x - 1\n\treturn x\n";
        let dst = "static int f_gold ( int x ) { while ( x != 0 && x % 10 == 0 ) { x = x - 1 ; } return x ; }";
        let policy = PrunePolicy::default();
        let (once, _) = apply_post(src, dst, Direction::P2j, &policy);
        let (twice, records) = apply_post(src, &once, Direction::P2j, &policy);
        assert_eq!(once, twice);
        assert!(records.iter().all(|r| !r.applied));
    }
}
