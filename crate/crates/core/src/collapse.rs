//! Detection of degenerate translator output ("collapse"): instead of a
//! translation the model emits import spam, runs of numbers, comma/quote
//! noise, `SPACETOKEN` artifacts, or output with no function resembling the
//! original.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::parse::{parse_unit_lenient, MethodUnit};
use crate::token::{tokenize_lenient, Language, Span, Token, TokenKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CollapseClass {
    ImportSpam,
    NumberSpam,
    CommaSpam,
    SpacetokenSpam,
    Structural,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Evidence {
    pub class: CollapseClass,
    pub count: usize,
    pub span: Option<Span>,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CollapseVerdict {
    pub classes: BTreeSet<CollapseClass>,
    pub clean: bool,
    pub evidence: Vec<Evidence>,
}

impl CollapseVerdict {
    fn from_evidence(evidence: Vec<Evidence>) -> Self {
        let classes: BTreeSet<CollapseClass> = evidence.iter().map(|e| e.class).collect();
        CollapseVerdict {
            clean: classes.is_empty(),
            classes,
            evidence,
        }
    }
}

/// Detection thresholds. The defaults are tight enough to match the known
/// collapse shapes and loose enough not to flag real corpus methods.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CollapseConfig {
    /// Minimum imported-module mentions in one consecutive import run.
    pub import_run: usize,
    /// Fraction of non-empty lines that are imports before flagging.
    pub import_line_ratio: f64,
    /// Minimum length of a comma-separated numeric literal run.
    pub number_run: usize,
    /// Fraction of repeated values within the numeric run.
    pub number_repeat_ratio: f64,
    /// Minimum consecutive comma/quote tokens.
    pub comma_run: usize,
    /// Minimum `SPACETOKEN` identifier tokens.
    pub spacetoken_count: usize,
}

impl Default for CollapseConfig {
    fn default() -> Self {
        CollapseConfig {
            import_run: 3,
            import_line_ratio: 0.30,
            number_run: 16,
            number_repeat_ratio: 0.75,
            comma_run: 10,
            spacetoken_count: 3,
        }
    }
}

/// Classify arbitrary translator output. Never fails: garbage input is the
/// whole point.
pub fn classify(
    text: &str,
    language: Language,
    original: Option<&MethodUnit>,
    config: &CollapseConfig,
) -> CollapseVerdict {
    let tokens = tokenize_lenient(text, language);
    let mut evidence = Vec::new();
    if let Some(e) = detect_import_spam(text, &tokens, config) {
        evidence.push(e);
    }
    if let Some(e) = detect_number_spam(&tokens, config) {
        evidence.push(e);
    }
    if let Some(e) = detect_comma_spam(&tokens, config) {
        evidence.push(e);
    }
    if let Some(e) = detect_spacetoken_spam(&tokens, config) {
        evidence.push(e);
    }
    if let Some(orig) = original {
        if let Some(e) = detect_structural(text, language, orig) {
            evidence.push(e);
        }
    }
    CollapseVerdict::from_evidence(evidence)
}

fn span_over(tokens: &[Token]) -> Option<Span> {
    match (tokens.first(), tokens.last()) {
        (Some(a), Some(b)) => Some(Span::new(a.span.start, b.span.end)),
        _ => None,
    }
}

/// Import spam: a consecutive run of import statements mentioning the same
/// module more than once, or an import-dominated file.
fn detect_import_spam(text: &str, tokens: &[Token], config: &CollapseConfig) -> Option<Evidence> {
    // Token pass: module mentions inside consecutive import constructs,
    // e.g. `import numpy , numpy , stream , numpy`.
    let mut run_modules: Vec<&str> = Vec::new();
    let mut run_tokens: Vec<&Token> = Vec::new();
    let mut best: Option<(Vec<String>, Option<Span>)> = None;
    let mut in_import = false;
    for tok in tokens {
        let import_kw = tok.is_text("import") || tok.is_text("from");
        if import_kw {
            in_import = true;
            run_tokens.push(tok);
            continue;
        }
        if in_import {
            match tok.kind {
                TokenKind::Identifier => {
                    run_modules.push(&tok.text);
                    run_tokens.push(tok);
                }
                TokenKind::Punct if tok.text == "," || tok.text == "." || tok.text == ";" => {
                    run_tokens.push(tok);
                }
                TokenKind::Indent => {
                    // Run continues only if the next line starts another
                    // import; handled by the `import_kw` branch.
                    in_import = false;
                }
                _ => {
                    flush_import_run(&mut run_modules, &mut run_tokens, &mut best);
                    in_import = false;
                }
            }
        } else if tok.kind != TokenKind::Indent {
            flush_import_run(&mut run_modules, &mut run_tokens, &mut best);
        }
    }
    flush_import_run(&mut run_modules, &mut run_tokens, &mut best);
    if let Some((modules, span)) = &best {
        let distinct: BTreeSet<&String> = modules.iter().collect();
        if modules.len() >= config.import_run && distinct.len() < modules.len() {
            return Some(Evidence {
                class: CollapseClass::ImportSpam,
                count: modules.len(),
                span: *span,
                detail: format!(
                    "{} module mentions, {} distinct",
                    modules.len(),
                    distinct.len()
                ),
            });
        }
    }

    // Line pass: import-dominated output.
    let non_empty: Vec<&str> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .collect();
    let import_lines = non_empty
        .iter()
        .filter(|l| l.starts_with("import ") || l.starts_with("from "))
        .count();
    if !non_empty.is_empty()
        && import_lines as f64 / non_empty.len() as f64 > config.import_line_ratio
        && import_lines >= 2
    {
        return Some(Evidence {
            class: CollapseClass::ImportSpam,
            count: import_lines,
            span: None,
            detail: format!("{import_lines} of {} lines are imports", non_empty.len()),
        });
    }
    None
}

fn flush_import_run(
    modules: &mut Vec<&str>,
    run_tokens: &mut Vec<&Token>,
    best: &mut Option<(Vec<String>, Option<Span>)>,
) {
    if best.as_ref().is_none_or(|(b, _)| modules.len() > b.len()) && !modules.is_empty() {
        let span = match (run_tokens.first(), run_tokens.last()) {
            (Some(a), Some(b)) => Some(Span::new(a.span.start, b.span.end)),
            _ => None,
        };
        *best = Some((modules.iter().map(|m| m.to_string()).collect(), span));
    }
    modules.clear();
    run_tokens.clear();
}

/// Number spam: a long comma-separated run of numeric literals that mostly
/// repeat or are all single digits.
fn detect_number_spam(tokens: &[Token], config: &CollapseConfig) -> Option<Evidence> {
    let mut i = 0usize;
    while i < tokens.len() {
        if tokens[i].kind != TokenKind::Number {
            i += 1;
            continue;
        }
        let start = i;
        let mut values = vec![tokens[i].text.as_str()];
        let mut j = i + 1;
        while j + 1 < tokens.len()
            && tokens[j].is(TokenKind::Punct, ",")
            && tokens[j + 1].kind == TokenKind::Number
        {
            values.push(tokens[j + 1].text.as_str());
            j += 2;
        }
        if values.len() >= config.number_run {
            let distinct: BTreeSet<&&str> = values.iter().collect();
            let repeats = values.len() - distinct.len();
            let repeat_ratio = repeats as f64 / values.len() as f64;
            let all_single = values.iter().all(|v| v.len() == 1);
            if repeat_ratio >= config.number_repeat_ratio || all_single {
                return Some(Evidence {
                    class: CollapseClass::NumberSpam,
                    count: values.len(),
                    span: span_over(&tokens[start..j]),
                    detail: format!(
                        "{} numerals, repeat ratio {:.2}, single-digit: {all_single}",
                        values.len(),
                        repeat_ratio
                    ),
                });
            }
        }
        i = j.max(i + 1);
    }
    None
}

/// Comma spam: a long consecutive run of comma and quote-only tokens.
fn detect_comma_spam(tokens: &[Token], config: &CollapseConfig) -> Option<Evidence> {
    let comma_ish = |tok: &Token| match tok.kind {
        TokenKind::Punct => tok.text == ",",
        TokenKind::Str => tok
            .text
            .chars()
            .all(|c| matches!(c, '\'' | '"' | ',' | ' ')),
        _ => false,
    };
    let mut start = 0usize;
    let mut run = 0usize;
    for (i, tok) in tokens.iter().enumerate() {
        if comma_ish(tok) {
            if run == 0 {
                start = i;
            }
            run += 1;
            if run >= config.comma_run {
                // Extend to the full run for the evidence span.
                let mut end = i;
                while end + 1 < tokens.len() && comma_ish(&tokens[end + 1]) {
                    end += 1;
                }
                return Some(Evidence {
                    class: CollapseClass::CommaSpam,
                    count: end - start + 1,
                    span: span_over(&tokens[start..=end]),
                    detail: format!("{} comma/quote tokens in a row", end - start + 1),
                });
            }
        } else if tok.kind != TokenKind::Indent {
            run = 0;
        }
    }
    None
}

fn detect_spacetoken_spam(tokens: &[Token], config: &CollapseConfig) -> Option<Evidence> {
    let hits: Vec<&Token> = tokens
        .iter()
        .filter(|t| t.kind == TokenKind::Identifier && t.text == "SPACETOKEN")
        .collect();
    if hits.len() >= config.spacetoken_count {
        return Some(Evidence {
            class: CollapseClass::SpacetokenSpam,
            count: hits.len(),
            span: Some(Span::new(hits[0].span.start, hits[hits.len() - 1].span.end)),
            detail: format!("{} SPACETOKEN markers", hits.len()),
        });
    }
    None
}

/// Structural collapse: the output contains no function resembling the
/// original (same name or same parameter count).
fn detect_structural(text: &str, language: Language, original: &MethodUnit) -> Option<Evidence> {
    let unit = parse_unit_lenient(text, language);
    let resembles = unit
        .methods()
        .any(|m| m.name == original.name || m.params.len() == original.params.len());
    if resembles {
        return None;
    }
    Some(Evidence {
        class: CollapseClass::Structural,
        count: 0,
        span: None,
        detail: format!(
            "no function named `{}` or taking {} parameter(s)",
            original.name,
            original.params.len()
        ),
    })
}
