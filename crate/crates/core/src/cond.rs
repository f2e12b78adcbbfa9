//! Decomposition of conditional expressions into homogeneous logical chains.

use crate::error::{Error, Result};
use crate::token::{Language, Span, Token, TokenKind};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CondOp {
    And,
    Or,
    Single,
}

/// A conditional expression seen as a top-level logical operator over an
/// ordered clause sequence. Only a homogeneous top-level chain is
/// decomposed; a mixed `&&`/`||` top level stays a single clause.
#[derive(Debug, Clone, PartialEq)]
pub struct CondChain {
    pub op: CondOp,
    pub clauses: Vec<Vec<Token>>,
}

impl CondChain {
    pub fn count(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty() || self.clauses.iter().all(|c| c.is_empty())
    }

    /// Rejoin clauses with the chain operator.
    pub fn render(&self, lang: Language) -> Vec<Token> {
        let join = match (self.op, lang) {
            (CondOp::And, Language::Java) => Some(Token::synth(TokenKind::Operator, "&&")),
            (CondOp::Or, Language::Java) => Some(Token::synth(TokenKind::Operator, "||")),
            (CondOp::And, Language::Python) => Some(Token::synth(TokenKind::Keyword, "and")),
            (CondOp::Or, Language::Python) => Some(Token::synth(TokenKind::Keyword, "or")),
            (CondOp::Single, _) => None,
        };
        let mut out = Vec::new();
        for (i, clause) in self.clauses.iter().enumerate() {
            if i > 0 {
                out.push(join.clone().expect("multi-clause chain has an operator"));
            }
            out.extend(clause.iter().cloned());
        }
        out
    }
}

fn chain_op(tok: &Token, lang: Language) -> Option<CondOp> {
    match lang {
        Language::Java if tok.kind == TokenKind::Operator => match tok.text.as_str() {
            "&&" => Some(CondOp::And),
            "||" => Some(CondOp::Or),
            _ => None,
        },
        Language::Python if tok.kind == TokenKind::Keyword => match tok.text.as_str() {
            "and" => Some(CondOp::And),
            "or" => Some(CondOp::Or),
            _ => None,
        },
        _ => None,
    }
}

fn check_balance(tokens: &[Token]) -> Result<()> {
    let mut stack = Vec::new();
    for tok in tokens {
        if tok.kind != TokenKind::Punct {
            continue;
        }
        match tok.text.as_str() {
            "(" | "[" | "{" => stack.push((tok.text.as_str(), tok.span)),
            ")" | "]" | "}" => {
                let open = match tok.text.as_str() {
                    ")" => "(",
                    "]" => "[",
                    _ => "{",
                };
                match stack.pop() {
                    Some((o, _)) if o == open => {}
                    _ => {
                        return Err(Error::Parse {
                            span: tok.span,
                            message: format!("unbalanced `{}`", tok.text),
                        })
                    }
                }
            }
            _ => {}
        }
    }
    if let Some((open, span)) = stack.pop() {
        return Err(Error::Parse {
            span,
            message: format!("unclosed `{open}`"),
        });
    }
    Ok(())
}

/// Strip layers of parentheses that wrap the entire expression.
fn strip_outer_parens(mut tokens: &[Token]) -> &[Token] {
    'outer: loop {
        if tokens.len() < 2
            || !tokens[0].is(TokenKind::Punct, "(")
            || !tokens[tokens.len() - 1].is(TokenKind::Punct, ")")
        {
            return tokens;
        }
        let mut depth = 0usize;
        for (i, tok) in tokens.iter().enumerate() {
            if tok.kind == TokenKind::Punct {
                match tok.text.as_str() {
                    "(" => depth += 1,
                    ")" => {
                        depth -= 1;
                        if depth == 0 && i != tokens.len() - 1 {
                            // Opening paren closes before the end; not a wrapper.
                            return tokens;
                        }
                    }
                    _ => {}
                }
            }
            if i == tokens.len() - 1 {
                tokens = &tokens[1..tokens.len() - 1];
                continue 'outer;
            }
        }
        return tokens;
    }
}

/// Decompose a bracket-balanced expression into a [`CondChain`].
pub fn parse_condition(tokens: &[Token], lang: Language) -> Result<CondChain> {
    check_balance(tokens)?;
    let tokens = strip_outer_parens(tokens);
    if tokens.is_empty() {
        return Ok(CondChain {
            op: CondOp::Single,
            clauses: vec![Vec::new()],
        });
    }
    let mut depth = 0usize;
    let mut split_ops = Vec::new();
    for (i, tok) in tokens.iter().enumerate() {
        if tok.kind == TokenKind::Punct {
            match tok.text.as_str() {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" | "}" => depth -= 1,
                _ => {}
            }
        }
        if depth == 0 {
            if let Some(op) = chain_op(tok, lang) {
                split_ops.push((i, op));
            }
        }
    }
    let ops: Vec<CondOp> = split_ops.iter().map(|(_, op)| *op).collect();
    let homogeneous = !ops.is_empty() && ops.windows(2).all(|w| w[0] == w[1]);
    if !homogeneous {
        return Ok(CondChain {
            op: CondOp::Single,
            clauses: vec![tokens.to_vec()],
        });
    }
    let mut clauses = Vec::new();
    let mut start = 0usize;
    for (idx, _) in &split_ops {
        clauses.push(tokens[start..*idx].to_vec());
        start = idx + 1;
    }
    clauses.push(tokens[start..].to_vec());
    let clauses = clauses
        .iter()
        .map(|c| strip_clause_parens(c, lang).to_vec())
        .collect();
    Ok(CondChain {
        op: ops[0],
        clauses,
    })
}

/// Strip a full-wrapper paren pair from a clause when doing so cannot
/// change how the clause re-binds inside a rebuilt chain: the inner run
/// must have no top-level operator binding looser than `&&`/`||`.
fn strip_clause_parens(tokens: &[Token], lang: Language) -> &[Token] {
    let inner = strip_outer_parens(tokens);
    if inner.len() == tokens.len() {
        return tokens;
    }
    let mut depth = 0usize;
    for tok in inner {
        if tok.kind == TokenKind::Punct {
            match tok.text.as_str() {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" | "}" => depth -= 1,
                "?" | ":" | "," if depth == 0 => return tokens,
                _ => {}
            }
        }
        if depth == 0 {
            if chain_op(tok, lang).is_some() {
                return tokens;
            }
            if tok.kind == TokenKind::Keyword && (tok.text == "if" || tok.text == "else") {
                return tokens;
            }
            if tok.kind == TokenKind::Operator && tok.text == "=" {
                return tokens;
            }
        }
    }
    inner
}

/// Normalized clause form used by match-mode pruning: Python logical tokens
/// mapped to their Java spelling, parentheses and spacing dropped.
pub fn normalize_clause(tokens: &[Token]) -> String {
    let mut out = String::new();
    for tok in tokens {
        if tok.kind == TokenKind::Punct && (tok.text == "(" || tok.text == ")") {
            continue;
        }
        if tok.kind == TokenKind::Indent || tok.kind == TokenKind::Comment {
            continue;
        }
        let mapped = match tok.text.as_str() {
            "and" => "&&",
            "or" => "||",
            "True" => "true",
            "False" => "false",
            other => other,
        };
        out.push_str(mapped);
    }
    out
}

/// The always-true condition, used when a for-header has an empty test.
pub fn always_true(lang: Language) -> Vec<Token> {
    match lang {
        Language::Java => vec![Token::synth(TokenKind::Keyword, "true")],
        Language::Python => vec![Token::synth(TokenKind::Keyword, "True")],
    }
}

/// Span covered by a token run in the original source, when available.
pub fn run_span(tokens: &[Token]) -> Option<Span> {
    let first = tokens.first()?;
    let last = tokens.last()?;
    if first.span == Span::default() && last.span == Span::default() {
        return None;
    }
    Some(Span::new(first.span.start, last.span.end))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::token::{render_tokens, tokenize};

    fn chain(src: &str, lang: Language) -> CondChain {
        let toks = tokenize(src, lang).unwrap();
        parse_condition(&toks, lang).unwrap()
    }

    #[test]
    fn repeated_and_clauses() {
        let c = chain("( x * x < n ) && ( x * x < n )", Language::Java);
        assert_eq!(c.op, CondOp::And);
        assert_eq!(c.count(), 2);
        // Wrapper parens around a simple comparison are dropped.
        assert_eq!(render_tokens(&c.clauses[0]), "x * x < n");
    }

    #[test]
    fn single_comparison() {
        let c = chain("x != 0", Language::Java);
        assert_eq!(c.op, CondOp::Single);
        assert_eq!(c.count(), 1);
    }

    #[test]
    fn homogeneous_top_level_only() {
        // `( a && b ) || c`: the `&&` is shielded by parens, so the top
        // level is a homogeneous `or` chain with two clauses.
        let c = chain("( a && b ) || c", Language::Java);
        assert_eq!(c.op, CondOp::Or);
        assert_eq!(c.count(), 2);
        assert_eq!(render_tokens(&c.clauses[0]), "( a && b )");
        assert_eq!(render_tokens(&c.clauses[1]), "c");
    }

    #[test]
    fn mixed_top_level_is_single() {
        let c = chain("a && b || c", Language::Java);
        assert_eq!(c.op, CondOp::Single);
        assert_eq!(c.count(), 1);
    }

    #[test]
    fn python_and_or() {
        let c = chain("x != 0 and x % 10 == 0", Language::Python);
        assert_eq!(c.op, CondOp::And);
        assert_eq!(c.count(), 2);
    }

    #[test]
    fn outer_parens_stripped_before_split() {
        let c = chain("( ( x != 0 ) && ( x % 10 == 0 ) )", Language::Java);
        assert_eq!(c.op, CondOp::And);
        assert_eq!(c.count(), 2);
        assert_eq!(render_tokens(&c.clauses[1]), "x % 10 == 0");
    }

    #[test]
    fn unbalanced_parens_rejected() {
        let toks = tokenize("( x != 0", Language::Java).unwrap();
        assert!(parse_condition(&toks, Language::Java).is_err());
    }

    #[test]
    fn rejoin_reproduces_input() {
        let src = "( x != 0 ) && ( y > 1 ) && ( z < 2 )";
        let c = chain(src, Language::Java);
        assert_eq!(
            render_tokens(&c.render(Language::Java)),
            "x != 0 && y > 1 && z < 2"
        );
    }

    #[test]
    fn clause_parens_kept_when_precedence_requires() {
        let c = chain("( a && b ) || c", Language::Java);
        assert_eq!(render_tokens(&c.render(Language::Java)), "( a && b ) || c");
    }

    #[test]
    fn normalization_maps_python_to_java() {
        let toks = tokenize("( x != 0 ) and True", Language::Python).unwrap();
        assert_eq!(normalize_clause(&toks), "x!=0&&true");
    }
}
