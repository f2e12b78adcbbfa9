//! Structural parsing of the method corpus.
//!
//! Two tiers: cheap item segmentation (methods vs. everything else), then a
//! statement-level parse of method bodies covering exactly the constructs
//! the mutation rules inspect. Anything unrecognized becomes an opaque
//! statement, so parsing is total on well-bracketed input.

use crate::cond::{parse_condition, CondChain};
use crate::error::{Error, Result};
use crate::token::{render_tokens, tokenize, tokenize_lenient, Language, Span, Token, TokenKind};

#[derive(Debug, Clone)]
pub struct SyntaxUnit {
    pub language: Language,
    pub items: Vec<Item>,
    pub source: String,
}

#[derive(Debug, Clone)]
pub enum Item {
    Method(MethodUnit),
    Other(OtherItem),
}

#[derive(Debug, Clone)]
pub struct OtherItem {
    pub tokens: Vec<Token>,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub struct Param {
    /// Original token run of the parameter declaration.
    pub tokens: Vec<Token>,
    pub name: String,
    /// Declared type text (absent for Python).
    pub ty_text: Option<String>,
}

#[derive(Debug, Clone)]
pub struct MethodUnit {
    pub language: Language,
    pub name: String,
    /// Java: modifiers and return type, everything before the name.
    /// Python: just `def`.
    pub modifiers: Vec<Token>,
    pub params: Vec<Param>,
    pub body: Block,
    pub span: Span,
    /// Indentation level the method was declared at.
    pub indent: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Block {
    pub stmts: Vec<Stmt>,
}

#[derive(Debug, Clone)]
pub struct ForHeader {
    /// Raw init token run (no trailing `;`). May be empty.
    pub init: Vec<Token>,
    /// Loop test. `None` when the header slot is empty.
    pub cond: Option<CondChain>,
    /// Comma-separated update expressions.
    pub update: Vec<Vec<Token>>,
}

#[derive(Debug, Clone)]
pub enum Stmt {
    For {
        header: ForHeader,
        body: Block,
        span: Span,
    },
    /// Java enhanced for / Python `for .. in ..`; header kept raw.
    ForEach {
        header: Vec<Token>,
        body: Block,
        span: Span,
    },
    While {
        cond: CondChain,
        body: Block,
        span: Span,
    },
    If {
        cond: CondChain,
        then_block: Block,
        else_block: Option<Block>,
        span: Span,
    },
    Return {
        tokens: Vec<Token>,
        span: Span,
    },
    Break {
        tokens: Vec<Token>,
        span: Span,
    },
    Continue {
        tokens: Vec<Token>,
        span: Span,
    },
    Decl {
        tokens: Vec<Token>,
        span: Span,
    },
    Expr {
        tokens: Vec<Token>,
        span: Span,
    },
    Opaque {
        tokens: Vec<Token>,
        span: Span,
    },
}

impl PartialEq for Stmt {
    fn eq(&self, other: &Self) -> bool {
        use Stmt::*;
        match (self, other) {
            (
                For {
                    header: a,
                    body: ab,
                    ..
                },
                For {
                    header: b,
                    body: bb,
                    ..
                },
            ) => a == b && ab == bb,
            (
                ForEach {
                    header: a,
                    body: ab,
                    ..
                },
                ForEach {
                    header: b,
                    body: bb,
                    ..
                },
            ) => a == b && ab == bb,
            (
                While {
                    cond: a, body: ab, ..
                },
                While {
                    cond: b, body: bb, ..
                },
            ) => a == b && ab == bb,
            (
                If {
                    cond: a,
                    then_block: at,
                    else_block: ae,
                    ..
                },
                If {
                    cond: b,
                    then_block: bt,
                    else_block: be,
                    ..
                },
            ) => a == b && at == bt && ae == be,
            (Return { tokens: a, .. }, Return { tokens: b, .. }) => a == b,
            (Break { tokens: a, .. }, Break { tokens: b, .. }) => a == b,
            (Continue { tokens: a, .. }, Continue { tokens: b, .. }) => a == b,
            (Decl { tokens: a, .. }, Decl { tokens: b, .. }) => a == b,
            (Expr { tokens: a, .. }, Expr { tokens: b, .. }) => a == b,
            (Opaque { tokens: a, .. }, Opaque { tokens: b, .. }) => a == b,
            _ => false,
        }
    }
}

impl PartialEq for ForHeader {
    fn eq(&self, other: &Self) -> bool {
        self.init == other.init && self.cond == other.cond && self.update == other.update
    }
}

impl PartialEq for Param {
    fn eq(&self, other: &Self) -> bool {
        self.tokens == other.tokens
    }
}

impl PartialEq for MethodUnit {
    fn eq(&self, other: &Self) -> bool {
        self.language == other.language
            && self.name == other.name
            && self.modifiers == other.modifiers
            && self.params == other.params
            && self.body == other.body
    }
}

impl PartialEq for Item {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Item::Method(a), Item::Method(b)) => a == b,
            (Item::Other(a), Item::Other(b)) => a.tokens == b.tokens,
            _ => false,
        }
    }
}

impl PartialEq for SyntaxUnit {
    fn eq(&self, other: &Self) -> bool {
        self.language == other.language && self.items == other.items
    }
}

impl Stmt {
    pub fn span(&self) -> Span {
        match self {
            Stmt::For { span, .. }
            | Stmt::ForEach { span, .. }
            | Stmt::While { span, .. }
            | Stmt::If { span, .. }
            | Stmt::Return { span, .. }
            | Stmt::Break { span, .. }
            | Stmt::Continue { span, .. }
            | Stmt::Decl { span, .. }
            | Stmt::Expr { span, .. }
            | Stmt::Opaque { span, .. } => *span,
        }
    }
}

impl SyntaxUnit {
    pub fn methods(&self) -> impl Iterator<Item = &MethodUnit> {
        self.items.iter().filter_map(|item| match item {
            Item::Method(m) => Some(m),
            Item::Other(_) => None,
        })
    }

    pub fn methods_mut(&mut self) -> impl Iterator<Item = &mut MethodUnit> {
        self.items.iter_mut().filter_map(|item| match item {
            Item::Method(m) => Some(m),
            Item::Other(_) => None,
        })
    }

    pub fn find_method(&self, name: &str) -> Option<&MethodUnit> {
        self.methods().find(|m| m.name == name)
    }
}

fn span_of(tokens: &[Token]) -> Span {
    match (tokens.first(), tokens.last()) {
        (Some(a), Some(b)) => Span::new(a.span.start, b.span.end),
        _ => Span::default(),
    }
}

/// Index of the bracket matching `tokens[open]`, or None if unbalanced.
pub fn find_matching(tokens: &[Token], open: usize) -> Option<usize> {
    let close_text = match tokens[open].text.as_str() {
        "(" => ")",
        "[" => "]",
        "{" => "}",
        _ => return None,
    };
    let open_text = tokens[open].text.clone();
    let mut depth = 0usize;
    for (i, tok) in tokens.iter().enumerate().skip(open) {
        if tok.kind == TokenKind::Punct {
            if tok.text == open_text {
                depth += 1;
            } else if tok.text == close_text {
                depth -= 1;
                if depth == 0 {
                    return Some(i);
                }
            }
        }
    }
    None
}

/// Split a token run at depth-0 occurrences of `sep`.
pub fn split_top_level<'a>(tokens: &'a [Token], sep: &str) -> Vec<&'a [Token]> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, tok) in tokens.iter().enumerate() {
        if tok.kind == TokenKind::Punct {
            match tok.text.as_str() {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" | "}" => depth = depth.saturating_sub(1),
                t if t == sep && depth == 0 => {
                    parts.push(&tokens[start..i]);
                    start = i + 1;
                    continue;
                }
                _ => {}
            }
        } else if tok.kind == TokenKind::Operator && tok.text == sep && depth == 0 {
            parts.push(&tokens[start..i]);
            start = i + 1;
        }
    }
    parts.push(&tokens[start..]);
    parts
}

/// Parse a full source file into items.
pub fn parse_unit(text: &str, lang: Language) -> Result<SyntaxUnit> {
    parse_unit_inner(text, lang, false)
}

/// Lenient parse: never fails; unparseable content degrades to opaque items.
pub fn parse_unit_lenient(text: &str, lang: Language) -> SyntaxUnit {
    parse_unit_inner(text, lang, true).expect("lenient parse is total")
}

fn parse_unit_inner(text: &str, lang: Language, lenient: bool) -> Result<SyntaxUnit> {
    let tokens = if lenient {
        tokenize_lenient(text, lang)
    } else {
        tokenize(text, lang)?
    };
    let meaningful = tokens
        .iter()
        .any(|t| !matches!(t.kind, TokenKind::Indent | TokenKind::Comment));
    if !lenient && !meaningful {
        return Err(Error::Parse {
            span: Span::default(),
            message: "empty input".into(),
        });
    }
    let result = match lang {
        Language::Java => segment_java(&tokens, lenient),
        Language::Python => segment_python(&tokens, lenient),
    };
    let items = match result {
        Ok(items) => items,
        Err(e) if lenient => {
            let _ = e;
            vec![Item::Other(OtherItem {
                span: span_of(&tokens),
                tokens,
            })]
        }
        Err(e) => return Err(e),
    };
    Ok(SyntaxUnit {
        language: lang,
        items,
        source: text.to_string(),
    })
}

/// Parse text expected to contain exactly one method; returns the first
/// method found, or an error when there is none.
pub fn parse_method(text: &str, lang: Language) -> Result<MethodUnit> {
    let unit = parse_unit(text, lang)?;
    let method = unit.methods().next().cloned();
    method.ok_or_else(|| Error::Parse {
        span: Span::new(0, text.len()),
        message: "no method found".into(),
    })
}

// ---------------------------------------------------------------------------
// Java
// ---------------------------------------------------------------------------

const JAVA_NON_SIGNATURE: &[&str] = &[
    "if",
    "while",
    "for",
    "switch",
    "catch",
    "do",
    "else",
    "new",
    "return",
    "try",
    "synchronized",
    "throw",
    "case",
];

fn segment_java(tokens: &[Token], lenient: bool) -> Result<Vec<Item>> {
    let mut items = Vec::new();
    let mut item_start = 0usize; // token index where the pending OtherItem begins
    let mut seg_start = 0usize; // start of the current signature segment
    let mut i = 0usize;
    while i < tokens.len() {
        let tok = &tokens[i];
        if tok.kind == TokenKind::Punct && matches!(tok.text.as_str(), ";" | "{" | "}") {
            seg_start = i + 1;
            i += 1;
            continue;
        }
        if is_java_method_start(tokens, seg_start, i) {
            let open = i + 1;
            let close = match find_matching(tokens, open) {
                Some(c) => c,
                None => {
                    return unbalanced(tokens, open, lenient);
                }
            };
            let brace = close + 1;
            let brace_close = match find_matching(tokens, brace) {
                Some(c) => c,
                None => return unbalanced(tokens, brace, lenient),
            };
            if seg_start > item_start {
                items.push(other_item(&tokens[item_start..seg_start]));
            }
            let method = build_java_method(tokens, seg_start, i, open, close, brace_close)?;
            items.push(Item::Method(method));
            i = brace_close + 1;
            item_start = i;
            seg_start = i;
            continue;
        }
        // Skip bracket groups inside non-method context (e.g. annotations).
        if tok.is(TokenKind::Punct, "(") || tok.is(TokenKind::Punct, "[") {
            if let Some(close) = find_matching(tokens, i) {
                i = close + 1;
                continue;
            } else if !lenient {
                return Err(Error::Parse {
                    span: tok.span,
                    message: "unbalanced bracket".into(),
                });
            }
        }
        i += 1;
    }
    if item_start < tokens.len() {
        items.push(other_item(&tokens[item_start..]));
    }
    if items.is_empty() {
        items.push(Item::Other(OtherItem {
            tokens: Vec::new(),
            span: Span::default(),
        }));
    }
    Ok(items)
}

fn unbalanced(tokens: &[Token], at: usize, lenient: bool) -> Result<Vec<Item>> {
    if lenient {
        Ok(vec![other_item(tokens)])
    } else {
        Err(Error::Parse {
            span: tokens[at].span,
            message: "unbalanced braces".into(),
        })
    }
}

fn other_item(tokens: &[Token]) -> Item {
    Item::Other(OtherItem {
        span: span_of(tokens),
        tokens: tokens.to_vec(),
    })
}

/// A method starts at `name` index when: name is an identifier immediately
/// followed by `( ... ) {`, and the signature segment before it looks like
/// modifiers plus a return type rather than a statement.
fn is_java_method_start(tokens: &[Token], seg_start: usize, name_idx: usize) -> bool {
    let name = &tokens[name_idx];
    if name.kind != TokenKind::Identifier {
        return false;
    }
    let Some(open) = tokens.get(name_idx + 1) else {
        return false;
    };
    if !open.is(TokenKind::Punct, "(") {
        return false;
    }
    let Some(close) = find_matching(tokens, name_idx + 1) else {
        return false;
    };
    let Some(brace) = tokens.get(close + 1) else {
        return false;
    };
    if !brace.is(TokenKind::Punct, "{") {
        return false;
    }
    let sig = &tokens[seg_start..name_idx];
    // Require at least one type-ish token before the name (return type or
    // `void`); rules out plain calls followed by blocks.
    let has_type = sig.iter().any(|t| {
        matches!(t.kind, TokenKind::Identifier)
            || (t.kind == TokenKind::Keyword && !JAVA_NON_SIGNATURE.contains(&t.text.as_str()))
    });
    if !has_type {
        return false;
    }
    !sig.iter().any(|t| {
        t.is(TokenKind::Operator, "=")
            || (t.kind == TokenKind::Keyword && JAVA_NON_SIGNATURE.contains(&t.text.as_str()))
    })
}

fn build_java_method(
    tokens: &[Token],
    seg_start: usize,
    name_idx: usize,
    open: usize,
    close: usize,
    brace_close: usize,
) -> Result<MethodUnit> {
    let params = parse_java_params(&tokens[open + 1..close]);
    let body = JavaStmtParser {
        tokens: &tokens[close + 2..brace_close],
    }
    .parse_block();
    Ok(MethodUnit {
        language: Language::Java,
        name: tokens[name_idx].text.clone(),
        modifiers: tokens[seg_start..name_idx].to_vec(),
        params,
        body,
        span: Span::new(tokens[seg_start].span.start, tokens[brace_close].span.end),
        indent: 0,
    })
}

fn parse_java_params(tokens: &[Token]) -> Vec<Param> {
    if tokens.is_empty() {
        return Vec::new();
    }
    split_top_level(tokens, ",")
        .into_iter()
        .filter(|run| !run.is_empty())
        .map(|run| {
            let name_idx = run
                .iter()
                .rposition(|t| t.kind == TokenKind::Identifier)
                .unwrap_or(run.len() - 1);
            let name = run[name_idx].text.clone();
            let ty: Vec<&Token> = run
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != name_idx)
                .map(|(_, t)| t)
                .collect();
            let ty_text = if ty.is_empty() {
                None
            } else {
                Some(
                    ty.iter()
                        .map(|t| t.text.as_str())
                        .collect::<Vec<_>>()
                        .join(" "),
                )
            };
            Param {
                tokens: run.to_vec(),
                name,
                ty_text,
            }
        })
        .collect()
}

struct JavaStmtParser<'a> {
    tokens: &'a [Token],
}

impl<'a> JavaStmtParser<'a> {
    fn parse_block(&self) -> Block {
        let mut stmts = Vec::new();
        let mut i = 0usize;
        while i < self.tokens.len() {
            let (stmt, next) = self.parse_stmt(i);
            stmts.push(stmt);
            debug_assert!(next > i);
            i = next;
        }
        Block { stmts }
    }

    fn opaque(&self, start: usize, end: usize) -> Stmt {
        let run = &self.tokens[start..end];
        Stmt::Opaque {
            tokens: run.to_vec(),
            span: span_of(run),
        }
    }

    /// Parse one statement starting at `start`; returns the statement and
    /// the index just past it.
    fn parse_stmt(&self, start: usize) -> (Stmt, usize) {
        let toks = self.tokens;
        let tok = &toks[start];
        if tok.kind == TokenKind::Comment {
            let mut end = start + 1;
            while end < toks.len() && toks[end].kind == TokenKind::Comment {
                end += 1;
            }
            return (self.opaque(start, end), end);
        }
        if tok.kind == TokenKind::Keyword {
            match tok.text.as_str() {
                "for" => return self.parse_for(start),
                "while" => return self.parse_while(start),
                "if" => return self.parse_if(start),
                "return" => {
                    let end = self.stmt_end(start);
                    let run = &toks[start..end];
                    return (
                        Stmt::Return {
                            tokens: run.to_vec(),
                            span: span_of(run),
                        },
                        end,
                    );
                }
                "break" => {
                    let end = self.stmt_end(start);
                    let run = &toks[start..end];
                    return (
                        Stmt::Break {
                            tokens: run.to_vec(),
                            span: span_of(run),
                        },
                        end,
                    );
                }
                "continue" => {
                    let end = self.stmt_end(start);
                    let run = &toks[start..end];
                    return (
                        Stmt::Continue {
                            tokens: run.to_vec(),
                            span: span_of(run),
                        },
                        end,
                    );
                }
                _ => {}
            }
        }
        if tok.is(TokenKind::Punct, "{") {
            if let Some(close) = find_matching(toks, start) {
                return (self.opaque(start, close + 1), close + 1);
            }
            return (self.opaque(start, toks.len()), toks.len());
        }
        let end = self.stmt_end(start);
        let run = &toks[start..end];
        if run.iter().any(|t| t.is(TokenKind::Punct, "{")) {
            // Statement swallowed a block (lambda, anonymous class, switch...).
            return (self.opaque(start, end), end);
        }
        let span = span_of(run);
        if is_java_decl(run) {
            (
                Stmt::Decl {
                    tokens: run.to_vec(),
                    span,
                },
                end,
            )
        } else {
            (
                Stmt::Expr {
                    tokens: run.to_vec(),
                    span,
                },
                end,
            )
        }
    }

    /// End of a simple statement: past the depth-0 `;`, or past a balanced
    /// brace group encountered at depth 0 (opaque constructs).
    fn stmt_end(&self, start: usize) -> usize {
        let toks = self.tokens;
        let mut i = start;
        while i < toks.len() {
            let t = &toks[i];
            if t.kind == TokenKind::Punct {
                match t.text.as_str() {
                    ";" => return i + 1,
                    "(" | "[" => {
                        i = find_matching(toks, i).map_or(toks.len(), |c| c);
                    }
                    "{" => {
                        return find_matching(toks, i).map_or(toks.len(), |c| c + 1);
                    }
                    "}" => return i, // unexpected close: stop before it
                    _ => {}
                }
            }
            i += 1;
        }
        toks.len()
    }

    /// Body after a control header: either a braced block or a single
    /// statement. Returns (block, next index).
    fn parse_body(&self, start: usize) -> (Block, usize) {
        let toks = self.tokens;
        if start < toks.len() && toks[start].is(TokenKind::Punct, "{") {
            if let Some(close) = find_matching(toks, start) {
                let inner = JavaStmtParser {
                    tokens: &toks[start + 1..close],
                }
                .parse_block();
                return (inner, close + 1);
            }
            let inner = JavaStmtParser {
                tokens: &toks[start + 1..],
            }
            .parse_block();
            return (inner, toks.len());
        }
        if start >= toks.len() {
            return (Block::default(), start);
        }
        let (stmt, next) = self.parse_stmt(start);
        (Block { stmts: vec![stmt] }, next)
    }

    fn parse_for(&self, start: usize) -> (Stmt, usize) {
        let toks = self.tokens;
        let open = start + 1;
        if open >= toks.len() || !toks[open].is(TokenKind::Punct, "(") {
            let end = self.stmt_end(start);
            return (self.opaque(start, end), end);
        }
        let Some(close) = find_matching(toks, open) else {
            return (self.opaque(start, toks.len()), toks.len());
        };
        let header = &toks[open + 1..close];
        let (body, next) = self.parse_body(close + 1);
        let span = Span::new(toks[start].span.start, span_of(&toks[start..next]).end);
        let parts = split_top_level(header, ";");
        if parts.len() == 3 {
            let cond_chain = if parts[1].is_empty() {
                None
            } else {
                match parse_condition(parts[1], Language::Java) {
                    Ok(c) => Some(c),
                    Err(_) => return (self.opaque(start, next), next),
                }
            };
            let update = if parts[2].is_empty() {
                Vec::new()
            } else {
                split_top_level(parts[2], ",")
                    .into_iter()
                    .map(|r| r.to_vec())
                    .collect()
            };
            let hdr = ForHeader {
                init: parts[0].to_vec(),
                cond: cond_chain,
                update,
            };
            return (
                Stmt::For {
                    header: hdr,
                    body,
                    span,
                },
                next,
            );
        }
        if parts.len() == 1 && split_top_level(header, ":").len() == 2 {
            return (
                Stmt::ForEach {
                    header: header.to_vec(),
                    body,
                    span,
                },
                next,
            );
        }
        (self.opaque(start, next), next)
    }

    fn parse_while(&self, start: usize) -> (Stmt, usize) {
        let toks = self.tokens;
        let open = start + 1;
        if open >= toks.len() || !toks[open].is(TokenKind::Punct, "(") {
            let end = self.stmt_end(start);
            return (self.opaque(start, end), end);
        }
        let Some(close) = find_matching(toks, open) else {
            return (self.opaque(start, toks.len()), toks.len());
        };
        let (body, next) = self.parse_body(close + 1);
        let span = Span::new(toks[start].span.start, span_of(&toks[start..next]).end);
        match parse_condition(&toks[open + 1..close], Language::Java) {
            Ok(cond) => (Stmt::While { cond, body, span }, next),
            Err(_) => (self.opaque(start, next), next),
        }
    }

    fn parse_if(&self, start: usize) -> (Stmt, usize) {
        let toks = self.tokens;
        let open = start + 1;
        if open >= toks.len() || !toks[open].is(TokenKind::Punct, "(") {
            let end = self.stmt_end(start);
            return (self.opaque(start, end), end);
        }
        let Some(close) = find_matching(toks, open) else {
            return (self.opaque(start, toks.len()), toks.len());
        };
        let (then_block, mut next) = self.parse_body(close + 1);
        let mut else_block = None;
        if next < toks.len() && toks[next].is(TokenKind::Keyword, "else") {
            if next + 1 < toks.len() && toks[next + 1].is(TokenKind::Keyword, "if") {
                let (chained, after) = self.parse_if(next + 1);
                else_block = Some(Block {
                    stmts: vec![chained],
                });
                next = after;
            } else {
                let (blk, after) = self.parse_body(next + 1);
                else_block = Some(blk);
                next = after;
            }
        }
        let span = Span::new(toks[start].span.start, span_of(&toks[start..next]).end);
        match parse_condition(&toks[open + 1..close], Language::Java) {
            Ok(cond) => (
                Stmt::If {
                    cond,
                    then_block,
                    else_block,
                    span,
                },
                next,
            ),
            Err(_) => (self.opaque(start, next), next),
        }
    }
}

fn is_java_decl(run: &[Token]) -> bool {
    // optional `final`, then a type (keyword/identifier with optional
    // generics or array suffix), then an identifier, then `= ; , [`.
    let mut i = 0usize;
    while i < run.len() && run[i].is(TokenKind::Keyword, "final") {
        i += 1;
    }
    let Some(first) = run.get(i) else {
        return false;
    };
    let type_start = matches!(first.kind, TokenKind::Identifier)
        || (first.kind == TokenKind::Keyword
            && matches!(
                first.text.as_str(),
                "int" | "long" | "double" | "float" | "char" | "boolean" | "short" | "byte"
            ));
    if !type_start {
        return false;
    }
    i += 1;
    // Swallow generics and array brackets in the type.
    while i < run.len() {
        let t = &run[i];
        if t.is(TokenKind::Operator, "<") {
            let mut depth = 1;
            i += 1;
            while i < run.len() && depth > 0 {
                if run[i].is(TokenKind::Operator, "<") {
                    depth += 1;
                } else if run[i].is(TokenKind::Operator, ">") {
                    depth -= 1;
                } else if run[i].is(TokenKind::Operator, ">>") {
                    depth -= 2;
                }
                i += 1;
            }
        } else if t.is(TokenKind::Punct, "[") {
            if i + 1 < run.len() && run[i + 1].is(TokenKind::Punct, "]") {
                i += 2;
            } else {
                return false;
            }
        } else if t.kind == TokenKind::Punct && t.text == "." {
            i += 2; // qualified type name
        } else {
            break;
        }
    }
    let Some(name) = run.get(i) else { return false };
    if name.kind != TokenKind::Identifier {
        return false;
    }
    match run.get(i + 1) {
        None => false,
        Some(t) => {
            t.is(TokenKind::Operator, "=")
                || t.is(TokenKind::Punct, ";")
                || t.is(TokenKind::Punct, ",")
                || t.is(TokenKind::Punct, "[")
        }
    }
}

// ---------------------------------------------------------------------------
// Python
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
struct Line {
    level: usize,
    tokens: Vec<Token>,
}

fn to_lines(tokens: &[Token]) -> Vec<Line> {
    let mut lines = Vec::new();
    let mut current = Line {
        level: 0,
        tokens: Vec::new(),
    };
    for tok in tokens {
        if tok.kind == TokenKind::Indent {
            if !current.tokens.is_empty() {
                lines.push(std::mem::replace(
                    &mut current,
                    Line {
                        level: tok.indent_level(),
                        tokens: Vec::new(),
                    },
                ));
            } else {
                current.level = tok.indent_level();
            }
        } else {
            current.tokens.push(tok.clone());
        }
    }
    if !current.tokens.is_empty() {
        lines.push(current);
    }
    lines
}

fn segment_python(tokens: &[Token], _lenient: bool) -> Result<Vec<Item>> {
    let lines = to_lines(tokens);
    let mut items: Vec<Item> = Vec::new();
    let mut other: Vec<Line> = Vec::new();
    let mut i = 0usize;
    while i < lines.len() {
        let line = &lines[i];
        if is_python_def(line) {
            if !other.is_empty() {
                items.push(python_other(std::mem::take(&mut other)));
            }
            let base = line.level;
            let mut end = i + 1;
            while end < lines.len() && lines[end].level > base {
                end += 1;
            }
            match build_python_method(&lines[i..end]) {
                Some(method) => items.push(Item::Method(method)),
                None => other.extend(lines[i..end].iter().cloned()),
            }
            i = end;
            continue;
        }
        // Non-def top-level chunk: take the line plus any deeper suite.
        let base = line.level;
        other.push(line.clone());
        let mut end = i + 1;
        while end < lines.len() && lines[end].level > base {
            other.push(lines[end].clone());
            end += 1;
        }
        i = end;
    }
    if !other.is_empty() {
        items.push(python_other(other));
    }
    if items.is_empty() {
        items.push(Item::Other(OtherItem {
            tokens: Vec::new(),
            span: Span::default(),
        }));
    }
    Ok(items)
}

fn is_python_def(line: &Line) -> bool {
    line.tokens
        .first()
        .is_some_and(|t| t.is(TokenKind::Keyword, "def"))
        && line
            .tokens
            .get(1)
            .is_some_and(|t| t.kind == TokenKind::Identifier)
        && line
            .tokens
            .get(2)
            .is_some_and(|t| t.is(TokenKind::Punct, "("))
}

/// Flatten a line group back into a token run with indent markers.
fn lines_to_tokens(lines: &[Line], base: usize) -> Vec<Token> {
    let mut out = Vec::new();
    for (i, line) in lines.iter().enumerate() {
        if i > 0 {
            let mut marker = Token::indent(line.level.saturating_sub(base));
            // Keep the original span when the line came from source.
            if let Some(first) = line.tokens.first() {
                marker.span = Span::new(first.span.start, first.span.start);
            }
            out.push(marker);
        }
        out.extend(line.tokens.iter().cloned());
    }
    out
}

fn python_other(lines: Vec<Line>) -> Item {
    let base = lines.first().map_or(0, |l| l.level);
    let tokens = lines_to_tokens(&lines, base);
    Item::Other(OtherItem {
        span: span_of(&tokens),
        tokens,
    })
}

fn build_python_method(lines: &[Line]) -> Option<MethodUnit> {
    let header = &lines[0];
    let toks = &header.tokens;
    let open = 2;
    let close = find_matching(toks, open)?;
    // Expect a `:` after the parameter list.
    let colon = toks[close + 1..]
        .iter()
        .position(|t| t.is(TokenKind::Punct, ":"))?;
    let name = toks[1].text.clone();
    let params = parse_python_params(&toks[open + 1..close]);
    let body = if close + 1 + colon + 1 < toks.len() {
        // Inline suite on the def line.
        let inline = &toks[close + 2 + colon..];
        PythonStmtParser {
            lines: &[Line {
                level: header.level + 1,
                tokens: inline.to_vec(),
            }],
        }
        .parse_suite(0, header.level)
        .0
    } else {
        PythonStmtParser { lines: &lines[1..] }
            .parse_suite(0, header.level)
            .0
    };
    let last = lines.last().unwrap();
    let span = Span::new(
        toks.first().map_or(0, |t| t.span.start),
        last.tokens.last().map_or(0, |t| t.span.end),
    );
    Some(MethodUnit {
        language: Language::Python,
        name,
        modifiers: vec![toks[0].clone()],
        params,
        body,
        span,
        indent: header.level,
    })
}

fn parse_python_params(tokens: &[Token]) -> Vec<Param> {
    if tokens.is_empty() {
        return Vec::new();
    }
    split_top_level(tokens, ",")
        .into_iter()
        .filter(|run| !run.is_empty())
        .map(|run| {
            let name = run
                .iter()
                .find(|t| t.kind == TokenKind::Identifier)
                .map(|t| t.text.clone())
                .unwrap_or_else(|| render_tokens(run));
            Param {
                tokens: run.to_vec(),
                name,
                ty_text: None,
            }
        })
        .collect()
}

struct PythonStmtParser<'a> {
    lines: &'a [Line],
}

impl<'a> PythonStmtParser<'a> {
    /// Parse lines starting at `start` whose level is greater than `parent`,
    /// as one block. Returns (block, next line index).
    fn parse_suite(&self, start: usize, parent: usize) -> (Block, usize) {
        let mut stmts = Vec::new();
        let mut i = start;
        let level = match self.lines.get(start) {
            Some(l) if l.level > parent => l.level,
            _ => return (Block::default(), start),
        };
        while i < self.lines.len() && self.lines[i].level >= level {
            let (stmt, next) = self.parse_stmt(i, level);
            stmts.push(stmt);
            i = next;
        }
        (Block { stmts }, i)
    }

    fn parse_stmt(&self, i: usize, level: usize) -> (Stmt, usize) {
        let line = &self.lines[i];
        let toks = &line.tokens;
        let span = span_of(toks);
        let first = &toks[0];
        if first.kind == TokenKind::Keyword {
            match first.text.as_str() {
                "while" => {
                    if let Some((cond, inline)) = self.header_cond(toks, 1) {
                        let (body, next) = self.body_after(i, level, inline);
                        return (Stmt::While { cond, body, span }, next);
                    }
                }
                "if" => return self.parse_if(i, level, 1),
                "for" => {
                    if let Some(colon) = top_level_colon(toks, 1) {
                        let header = toks[1..colon].to_vec();
                        let inline = inline_rest(toks, colon);
                        let (body, next) = self.body_after(i, level, inline);
                        return (Stmt::ForEach { header, body, span }, next);
                    }
                }
                "return" => {
                    return (
                        Stmt::Return {
                            tokens: toks.clone(),
                            span,
                        },
                        i + 1,
                    )
                }
                "break" => {
                    return (
                        Stmt::Break {
                            tokens: toks.clone(),
                            span,
                        },
                        i + 1,
                    )
                }
                "continue" => {
                    return (
                        Stmt::Continue {
                            tokens: toks.clone(),
                            span,
                        },
                        i + 1,
                    )
                }
                _ => {}
            }
        }
        // Anything else: the line, plus any deeper suite it owns, as opaque
        // or expression.
        let mut end = i + 1;
        while end < self.lines.len() && self.lines[end].level > line.level {
            end += 1;
        }
        if end == i + 1 {
            let is_expr = first.kind != TokenKind::Keyword && first.kind != TokenKind::Comment;
            let stmt = if is_expr {
                Stmt::Expr {
                    tokens: toks.clone(),
                    span,
                }
            } else {
                Stmt::Opaque {
                    tokens: toks.clone(),
                    span,
                }
            };
            return (stmt, end);
        }
        let run = lines_to_tokens(&self.lines[i..end], line.level);
        let span = span_of(&run);
        (Stmt::Opaque { tokens: run, span }, end)
    }

    fn parse_if(&self, i: usize, level: usize, cond_from: usize) -> (Stmt, usize) {
        let line = &self.lines[i];
        let toks = &line.tokens;
        let span = span_of(toks);
        let Some((cond, inline)) = self.header_cond(toks, cond_from) else {
            return (
                Stmt::Opaque {
                    tokens: toks.clone(),
                    span,
                },
                i + 1,
            );
        };
        let (then_block, mut next) = self.body_after(i, level, inline);
        let mut else_block = None;
        if next < self.lines.len() && self.lines[next].level == level {
            let nt = &self.lines[next].tokens;
            if nt.first().is_some_and(|t| t.is(TokenKind::Keyword, "elif")) {
                let (chained, after) = self.parse_if(next, level, 1);
                else_block = Some(Block {
                    stmts: vec![chained],
                });
                next = after;
            } else if nt.first().is_some_and(|t| t.is(TokenKind::Keyword, "else")) {
                let inline = top_level_colon(nt, 1).and_then(|c| inline_rest(nt, c));
                let (blk, after) = self.body_after(next, level, inline);
                else_block = Some(blk);
                next = after;
            }
        }
        (
            Stmt::If {
                cond,
                then_block,
                else_block,
                span,
            },
            next,
        )
    }

    /// Condition between a header keyword and the suite colon.
    fn header_cond(&self, toks: &[Token], from: usize) -> Option<(CondChain, Option<Vec<Token>>)> {
        let colon = top_level_colon(toks, from)?;
        let cond = parse_condition(&toks[from..colon], Language::Python).ok()?;
        Some((cond, inline_rest(toks, colon)))
    }

    /// The suite of the header line at `i`: either the inline tokens after
    /// the colon, or the following deeper lines.
    fn body_after(&self, i: usize, level: usize, inline: Option<Vec<Token>>) -> (Block, usize) {
        if let Some(inline_toks) = inline {
            let inner = PythonStmtParser {
                lines: &[Line {
                    level: level + 1,
                    tokens: inline_toks,
                }],
            };
            let (block, _) = inner.parse_suite(0, level);
            return (block, i + 1);
        }
        self.parse_suite(i + 1, level)
    }
}

fn top_level_colon(toks: &[Token], from: usize) -> Option<usize> {
    let mut depth = 0usize;
    for (i, t) in toks.iter().enumerate().skip(from) {
        if t.kind == TokenKind::Punct {
            match t.text.as_str() {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" | "}" => depth = depth.saturating_sub(1),
                ":" if depth == 0 => return Some(i),
                _ => {}
            }
        }
    }
    None
}

fn inline_rest(toks: &[Token], colon: usize) -> Option<Vec<Token>> {
    if colon + 1 < toks.len() {
        Some(toks[colon + 1..].to_vec())
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const JAVA_PAIR: &str = "import java.util.* ;\nclass GFG {\nstatic int f_gold ( int n ) { return n ; }\npublic static void main ( String [ ] args ) { int x = f_gold ( 3 ) ; }\n}\n";

    #[test]
    fn java_unit_with_focal_and_main() {
        let unit = parse_unit(JAVA_PAIR, Language::Java).unwrap();
        let names: Vec<_> = unit.methods().map(|m| m.name.as_str()).collect();
        assert_eq!(names, vec!["f_gold", "main"]);
    }

    #[test]
    fn python_unit_with_single_def() {
        let unit = parse_unit("def f_gold ( n ) :\n\treturn n\n", Language::Python).unwrap();
        assert_eq!(unit.methods().count(), 1);
        let m = unit.find_method("f_gold").unwrap();
        assert_eq!(m.params.len(), 1);
        assert_eq!(m.params[0].name, "n");
    }

    #[test]
    fn garbage_commas_do_not_crash() {
        let unit = parse_unit_lenient("def ','','','','','','\n, , , ,", Language::Python);
        assert_eq!(unit.methods().count(), 0);
        assert!(!unit.items.is_empty());
    }

    #[test]
    fn unbalanced_braces_strict_vs_lenient() {
        let src = "class X { static int f ( ) { return 1 ;";
        assert!(parse_unit(src, Language::Java).is_err());
        let unit = parse_unit_lenient(src, Language::Java);
        assert!(!unit.items.is_empty());
    }

    #[test]
    fn java_for_header_parts() {
        let m = parse_method(
            "static int f ( int n ) { for ( int i = 0 ; i < n ; i ++ ) { n -- ; } return n ; }",
            Language::Java,
        )
        .unwrap();
        let Stmt::For { header, body, .. } = &m.body.stmts[0] else {
            panic!("expected for stmt");
        };
        assert_eq!(render_tokens(&header.init), "int i = 0");
        assert_eq!(header.cond.as_ref().unwrap().count(), 1);
        assert_eq!(header.update.len(), 1);
        assert_eq!(body.stmts.len(), 1);
    }

    #[test]
    fn java_empty_for_slots() {
        let m = parse_method(
            "static void f ( ) { for ( ; i < j ; i ++ , j -- ) { } }",
            Language::Java,
        )
        .unwrap();
        let Stmt::For { header, .. } = &m.body.stmts[0] else {
            panic!()
        };
        assert!(header.init.is_empty());
        assert_eq!(header.update.len(), 2);
    }

    #[test]
    fn java_enhanced_for() {
        let m = parse_method(
            "static void f ( int [ ] a ) { for ( int x : a ) { use ( x ) ; } }",
            Language::Java,
        )
        .unwrap();
        assert!(matches!(m.body.stmts[0], Stmt::ForEach { .. }));
    }

    #[test]
    fn python_if_elif_else() {
        let src = "def f ( x ) :\n\tif x > 0 :\n\t\treturn 1\n\telif x < 0 :\n\t\treturn - 1\n\telse :\n\t\treturn 0\n";
        let m = parse_method(src, Language::Python).unwrap();
        let Stmt::If { else_block, .. } = &m.body.stmts[0] else {
            panic!()
        };
        let inner = else_block.as_ref().unwrap();
        assert!(matches!(inner.stmts[0], Stmt::If { .. }));
    }

    #[test]
    fn item_spans_cover_all_tokens() {
        let unit = parse_unit(JAVA_PAIR, Language::Java).unwrap();
        let all = tokenize(JAVA_PAIR, Language::Java).unwrap();
        let mut covered = 0usize;
        for item in &unit.items {
            covered += match item {
                Item::Method(_) => {
                    // Count method tokens by re-lexing its span.
                    let Item::Method(m) = item else {
                        unreachable!()
                    };
                    tokenize(&unit.source[m.span.start..m.span.end], Language::Java)
                        .unwrap()
                        .len()
                }
                Item::Other(o) => o.tokens.len(),
            };
        }
        assert_eq!(covered, all.len());
    }

    #[test]
    fn test_methods_recognized_separately() {
        let src =
            "def f_gold ( n ) :\n\treturn n\ndef test_one ( ) :\n\tassert f_gold ( 1 ) == 1\n";
        let unit = parse_unit(src, Language::Python).unwrap();
        let names: Vec<_> = unit.methods().map(|m| m.name.as_str()).collect();
        assert_eq!(names, vec!["f_gold", "test_one"]);
    }
}
