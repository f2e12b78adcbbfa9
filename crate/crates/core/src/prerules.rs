//! Input mutations applied before translation.
//!
//! R1: translate the focal method in isolation (drop main/test context).
//! R2: rewrite complex Java for loops as while loops.
//! R3a: rewrite 1-D Java array parameters as `List<Wrapper>`.
//! R3b: rename Python `arr*` parameters to `list*`.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::cond::{always_true, CondChain, CondOp};
use crate::error::{Error, Result};
use crate::parse::{
    parse_method, parse_unit, split_top_level, Block, ForHeader, Item, MethodUnit, Stmt, SyntaxUnit,
};
use crate::render::{render_method, render_unit};
use crate::token::{tokenize, Direction, Language, Span, Token, TokenKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Rule {
    #[serde(rename = "R1_context")]
    R1Context,
    #[serde(rename = "R2_loop")]
    R2Loop,
    #[serde(rename = "R3a_array_list")]
    R3aArrayList,
    #[serde(rename = "R3b_arr_rename")]
    R3bArrRename,
    #[serde(rename = "R4_prune")]
    R4Prune,
}

impl Rule {
    pub fn all() -> BTreeSet<Rule> {
        [
            Rule::R1Context,
            Rule::R2Loop,
            Rule::R3aArrayList,
            Rule::R3bArrRename,
            Rule::R4Prune,
        ]
        .into_iter()
        .collect()
    }
}

impl std::str::FromStr for Rule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "r1" | "r1_context" => Ok(Rule::R1Context),
            "r2" | "r2_loop" => Ok(Rule::R2Loop),
            "r3a" | "r3a_array_list" => Ok(Rule::R3aArrayList),
            "r3b" | "r3b_arr_rename" => Ok(Rule::R3bArrRename),
            "r4" | "r4_prune" => Ok(Rule::R4Prune),
            other => Err(Error::Config(format!("unknown rule `{other}`"))),
        }
    }
}

/// One rule application attempt.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MutationRecord {
    pub rule: Rule,
    pub applicable: bool,
    pub applied: bool,
    pub notes: String,
    pub before_span: Option<Span>,
    pub after_span: Option<Span>,
}

impl MutationRecord {
    pub fn new(rule: Rule) -> Self {
        MutationRecord {
            rule,
            applicable: false,
            applied: false,
            notes: String::new(),
            before_span: None,
            after_span: None,
        }
    }

    pub fn skipped(rule: Rule, notes: impl Into<String>) -> Self {
        let mut r = MutationRecord::new(rule);
        r.applicable = true;
        r.notes = notes.into();
        r
    }
}

#[derive(Debug, Clone)]
pub struct PreConfig {
    pub rules: BTreeSet<Rule>,
    pub direction: Direction,
    /// Identifier pattern selecting renameable array parameters.
    pub arr_pattern: regex::Regex,
    /// Minimum number of matching parameters before R3b fires.
    pub arr_threshold: usize,
    /// Rewrite every for loop, not just complex ones.
    pub all_loops: bool,
    pub focal_name: String,
}

impl PreConfig {
    pub fn new(direction: Direction) -> Self {
        PreConfig {
            rules: Rule::all(),
            direction,
            arr_pattern: default_arr_pattern(),
            arr_threshold: 1,
            all_loops: false,
            focal_name: "f_gold".to_string(),
        }
    }
}

pub fn default_arr_pattern() -> regex::Regex {
    regex::Regex::new("^arr[0-9]*$").expect("static pattern")
}

// ---------------------------------------------------------------------------
// R1: focal extraction
// ---------------------------------------------------------------------------

/// Strip everything but the focal method.
pub fn extract_focal(unit: &SyntaxUnit, focal_name: &str) -> Result<(String, MutationRecord)> {
    let matches: Vec<&MethodUnit> = unit.methods().filter(|m| m.name == focal_name).collect();
    let focal = match matches.as_slice() {
        [] => return Err(Error::FocalNotFound(focal_name.to_string())),
        [one] => *one,
        _ => return Err(Error::AmbiguousFocal(focal_name.to_string())),
    };
    let has_context = unit.items.iter().any(|item| match item {
        Item::Method(m) => m.name != focal_name,
        Item::Other(o) => !o.tokens.is_empty(),
    });
    let mut record = MutationRecord::new(Rule::R1Context);
    record.applicable = has_context;
    if !has_context {
        return Ok((unit.source.clone(), record));
    }
    record.applied = true;
    record.before_span = Some(focal.span);
    // A method extracted from inside a class keeps source indentation on
    // continuation lines only; normalize by re-rendering.
    let mut method = focal.clone();
    method.indent = 0;
    let text = render_method(&method);
    record.after_span = Some(Span::new(0, text.len()));
    Ok((text, record))
}

// ---------------------------------------------------------------------------
// R2: for -> while
// ---------------------------------------------------------------------------

/// A for loop is complex when it has multiple conditions, multiple
/// variables, or a nonlinear variable update.
pub fn detect_complex_for(header: &ForHeader) -> bool {
    if header.cond.as_ref().is_some_and(|c| c.count() > 1) {
        return true;
    }
    if !header.init.is_empty() && split_top_level(&header.init, ",").len() > 1 {
        return true;
    }
    let targets: HashSet<&str> = header
        .update
        .iter()
        .filter_map(|u| u.iter().find(|t| t.kind == TokenKind::Identifier))
        .map(|t| t.text.as_str())
        .collect();
    if targets.len() > 1 {
        return true;
    }
    header.update.iter().any(|u| !is_simple_update(u))
}

fn is_simple_update(run: &[Token]) -> bool {
    let is_incdec = |t: &Token| t.is(TokenKind::Operator, "++") || t.is(TokenKind::Operator, "--");
    let is_ident = |t: &Token| t.kind == TokenKind::Identifier;
    match run {
        [a, b] => (is_ident(a) && is_incdec(b)) || (is_incdec(a) && is_ident(b)),
        [a, op, c] => {
            is_ident(a)
                && (op.is(TokenKind::Operator, "+=") || op.is(TokenKind::Operator, "-="))
                && c.kind == TokenKind::Number
        }
        _ => false,
    }
}

/// Rewrite complex for loops in a Java method as while loops. Updates are
/// appended at the loop end and inserted before every `continue` bound to
/// the loop itself; they are not inserted before `break`/`return`, which in
/// Java skip the update expression.
pub fn for_to_while(method: &MethodUnit, all_loops: bool) -> (MethodUnit, MutationRecord) {
    let mut record = MutationRecord::new(Rule::R2Loop);
    if method.language != Language::Java {
        record.notes = "for-to-while only applies to Java sources".into();
        return (method.clone(), record);
    }
    record.applicable = block_has_trigger_for(&method.body, all_loops);
    if !record.applicable {
        return (method.clone(), record);
    }
    let mut live = vec![method
        .params
        .iter()
        .map(|p| p.name.clone())
        .collect::<HashSet<_>>()];
    match transform_block(&method.body, &mut live, all_loops, &mut record) {
        Ok(body) => {
            let mut out = method.clone();
            out.body = body;
            record.applied = true;
            (out, record)
        }
        Err(e) => {
            record.applied = false;
            record.notes = format!("rule skipped: {e}");
            (method.clone(), record)
        }
    }
}

/// Whether any for loop in the method would trigger R2.
pub fn has_complex_for(method: &MethodUnit) -> bool {
    block_has_trigger_for(&method.body, false)
}

fn block_has_trigger_for(block: &Block, all_loops: bool) -> bool {
    block.stmts.iter().any(|stmt| match stmt {
        Stmt::For { header, body, .. } => {
            all_loops || detect_complex_for(header) || block_has_trigger_for(body, all_loops)
        }
        Stmt::ForEach { body, .. } | Stmt::While { body, .. } => {
            block_has_trigger_for(body, all_loops)
        }
        Stmt::If {
            then_block,
            else_block,
            ..
        } => {
            block_has_trigger_for(then_block, all_loops)
                || else_block
                    .as_ref()
                    .is_some_and(|b| block_has_trigger_for(b, all_loops))
        }
        _ => false,
    })
}

fn transform_block(
    block: &Block,
    live: &mut Vec<HashSet<String>>,
    all_loops: bool,
    record: &mut MutationRecord,
) -> Result<Block> {
    live.push(HashSet::new());
    let mut stmts = Vec::new();
    for stmt in &block.stmts {
        match stmt {
            Stmt::Decl { tokens, .. } => {
                for name in decl_names(tokens) {
                    live.last_mut().unwrap().insert(name);
                }
                stmts.push(stmt.clone());
            }
            Stmt::For { header, body, span } => {
                let body = transform_block(body, live, all_loops, record)?;
                if all_loops || detect_complex_for(header) {
                    if record.before_span.is_none() {
                        record.before_span = Some(*span);
                    }
                    stmts.extend(lower_for(header, body, live)?);
                } else {
                    stmts.push(Stmt::For {
                        header: header.clone(),
                        body,
                        span: *span,
                    });
                }
            }
            Stmt::ForEach { header, body, span } => {
                let body = transform_block(body, live, all_loops, record)?;
                stmts.push(Stmt::ForEach {
                    header: header.clone(),
                    body,
                    span: *span,
                });
            }
            Stmt::While { cond, body, span } => {
                let body = transform_block(body, live, all_loops, record)?;
                stmts.push(Stmt::While {
                    cond: cond.clone(),
                    body,
                    span: *span,
                });
            }
            Stmt::If {
                cond,
                then_block,
                else_block,
                span,
            } => {
                let then_block = transform_block(then_block, live, all_loops, record)?;
                let else_block = match else_block {
                    Some(b) => Some(transform_block(b, live, all_loops, record)?),
                    None => None,
                };
                stmts.push(Stmt::If {
                    cond: cond.clone(),
                    then_block,
                    else_block,
                    span: *span,
                });
            }
            other => stmts.push(other.clone()),
        }
    }
    live.pop();
    Ok(Block { stmts })
}

/// Replace one for loop by its init statement plus a while loop.
fn lower_for(header: &ForHeader, body: Block, live: &[HashSet<String>]) -> Result<Vec<Stmt>> {
    let mut out = Vec::new();
    if !header.init.is_empty() {
        if is_init_decl(&header.init) {
            for name in decl_names(&header.init) {
                if live.iter().any(|scope| scope.contains(&name)) {
                    return Err(Error::NameShadow(format!(
                        "loop variable `{name}` already live in enclosing scope"
                    )));
                }
            }
        }
        let mut tokens = header.init.clone();
        tokens.push(Token::synth(TokenKind::Punct, ";"));
        let span = Span::default();
        out.push(if is_init_decl(&header.init) {
            Stmt::Decl { tokens, span }
        } else {
            Stmt::Expr { tokens, span }
        });
    }
    let updates: Vec<Stmt> = header
        .update
        .iter()
        .map(|u| {
            let mut tokens = u.clone();
            tokens.push(Token::synth(TokenKind::Punct, ";"));
            Stmt::Expr {
                tokens,
                span: Span::default(),
            }
        })
        .collect();
    let mut new_body = insert_before_continues(&body, &updates)?;
    new_body.stmts.extend(updates);
    let cond = header.cond.clone().unwrap_or(CondChain {
        op: CondOp::Single,
        clauses: vec![always_true(Language::Java)],
    });
    out.push(Stmt::While {
        cond,
        body: new_body,
        span: Span::default(),
    });
    Ok(out)
}

/// Insert the update statements before every `continue` bound to the
/// current loop; nested loops keep their continues untouched.
fn insert_before_continues(block: &Block, updates: &[Stmt]) -> Result<Block> {
    let mut stmts = Vec::new();
    for stmt in &block.stmts {
        match stmt {
            Stmt::Continue { tokens, .. } => {
                if tokens.iter().any(|t| t.kind == TokenKind::Identifier) {
                    return Err(Error::Unsupported("labeled continue in loop body".into()));
                }
                stmts.extend(updates.iter().cloned());
                stmts.push(stmt.clone());
            }
            Stmt::If {
                cond,
                then_block,
                else_block,
                span,
            } => {
                let then_block = insert_before_continues(then_block, updates)?;
                let else_block = match else_block {
                    Some(b) => Some(insert_before_continues(b, updates)?),
                    None => None,
                };
                stmts.push(Stmt::If {
                    cond: cond.clone(),
                    then_block,
                    else_block,
                    span: *span,
                });
            }
            Stmt::Opaque { tokens, .. } => {
                if tokens.iter().any(|t| t.is(TokenKind::Keyword, "continue")) {
                    return Err(Error::Unsupported(
                        "continue inside unrecognized construct".into(),
                    ));
                }
                stmts.push(stmt.clone());
            }
            // Nested loops own their continues.
            other => stmts.push(other.clone()),
        }
    }
    Ok(Block { stmts })
}

fn is_init_decl(run: &[Token]) -> bool {
    matches!(
        run.first(),
        Some(t) if t.kind == TokenKind::Keyword || t.kind == TokenKind::Identifier
    ) && run.len() >= 2
        && run.get(1).is_some_and(|t| {
            t.kind == TokenKind::Identifier
                || t.is(TokenKind::Punct, "[")
                || t.is(TokenKind::Operator, "<")
        })
}

/// Names declared by a Java declaration run like `int i = 0 , j = n - 1 ;`.
fn decl_names(run: &[Token]) -> Vec<String> {
    let run = match run.last() {
        Some(t) if t.is(TokenKind::Punct, ";") => &run[..run.len() - 1],
        _ => run,
    };
    // Drop the leading type tokens: everything up to the first identifier
    // that is followed by `=`, `,`, `;` or end.
    let mut names = Vec::new();
    for (i, segment) in split_top_level(run, ",").iter().enumerate() {
        let name = if i == 0 {
            // First segment carries the type; the declarator name is the
            // last identifier before `=` (or the last identifier at all).
            let eq = segment.iter().position(|t| t.is(TokenKind::Operator, "="));
            let head = &segment[..eq.unwrap_or(segment.len())];
            head.iter().rev().find(|t| t.kind == TokenKind::Identifier)
        } else {
            segment.iter().find(|t| t.kind == TokenKind::Identifier)
        };
        if let Some(tok) = name {
            names.push(tok.text.clone());
        }
    }
    names
}

// ---------------------------------------------------------------------------
// R3a: array parameters -> List
// ---------------------------------------------------------------------------

fn wrapper_type(base: &str) -> String {
    match base {
        "int" => "Integer",
        "double" => "Double",
        "long" => "Long",
        "char" => "Character",
        "boolean" => "Boolean",
        "float" => "Float",
        "short" => "Short",
        "byte" => "Byte",
        other => other,
    }
    .to_string()
}

struct ArrayParam {
    name: String,
    wrapper: String,
}

/// Classify a Java parameter: Ok(Some) for a 1-D array, Ok(None) for a
/// non-array, Err for multi-dimensional arrays.
fn array_param(param: &crate::parse::Param) -> Result<Option<ArrayParam>> {
    let dims = param
        .tokens
        .iter()
        .filter(|t| t.is(TokenKind::Punct, "["))
        .count();
    match dims {
        0 => Ok(None),
        1 => {
            let base = param
                .tokens
                .iter()
                .find(|t| {
                    (t.kind == TokenKind::Keyword || t.kind == TokenKind::Identifier)
                        && t.text != param.name
                        && !t.is(TokenKind::Keyword, "final")
                })
                .map(|t| t.text.clone())
                .unwrap_or_default();
            Ok(Some(ArrayParam {
                name: param.name.clone(),
                wrapper: wrapper_type(&base),
            }))
        }
        _ => Err(Error::Unsupported(format!(
            "multi-dimensional array parameter `{}`",
            param.name
        ))),
    }
}

/// Rewrite 1-D array parameters as `List<Wrapper>` and every use of them to
/// the List API.
pub fn array_params_to_list(method: &MethodUnit) -> (MethodUnit, MutationRecord) {
    let mut record = MutationRecord::new(Rule::R3aArrayList);
    if method.language != Language::Java {
        record.notes = "array-to-List only applies to Java sources".into();
        return (method.clone(), record);
    }
    match try_array_params_to_list(method, &mut record) {
        Ok(Some(out)) => {
            record.applied = true;
            (out, record)
        }
        Ok(None) => (method.clone(), record),
        Err(e) => {
            record.applicable = true;
            record.notes = format!("rule skipped: {e}");
            (method.clone(), record)
        }
    }
}

fn try_array_params_to_list(
    method: &MethodUnit,
    record: &mut MutationRecord,
) -> Result<Option<MethodUnit>> {
    let mut targets = Vec::new();
    for param in &method.params {
        if let Some(ap) = array_param(param)? {
            targets.push(ap);
        }
    }
    if targets.is_empty() {
        return Ok(None);
    }
    record.applicable = true;
    record.before_span = Some(method.span);

    let mut rewritten = method.clone();
    for param in &mut rewritten.params {
        if let Some(ap) = targets.iter().find(|ap| ap.name == param.name) {
            param.tokens = vec![
                Token::ident("List"),
                Token::synth(TokenKind::Operator, "<"),
                Token::ident(ap.wrapper.clone()),
                Token::synth(TokenKind::Operator, ">"),
                Token::ident(ap.name.clone()),
            ];
            param.ty_text = Some(format!("List < {} >", ap.wrapper));
        }
    }
    // Token-level body rewrite over the re-rendered method (the signature
    // no longer contains `name [ ]`, so index patterns only match uses).
    let text = render_method(&rewritten);
    let tokens = tokenize(&text, Language::Java)?;
    let tokens = widen_enhanced_for(tokens, &targets);
    let rewritten_tokens = rewrite_array_uses(&tokens, &targets)?;
    let out_text = crate::token::render_tokens(&rewritten_tokens);
    let out = parse_method(&out_text, Language::Java)?;
    // Completeness: no converted parameter may still be indexed or asked
    // for `.length`.
    for ap in &targets {
        for (i, tok) in rewritten_tokens.iter().enumerate() {
            if tok.kind == TokenKind::Identifier && tok.text == ap.name {
                if rewritten_tokens
                    .get(i + 1)
                    .is_some_and(|t| t.is(TokenKind::Punct, "["))
                {
                    return Err(Error::Unsupported(format!(
                        "unrewritten index of `{}`",
                        ap.name
                    )));
                }
                if rewritten_tokens
                    .get(i + 1)
                    .is_some_and(|t| t.is(TokenKind::Punct, "."))
                    && rewritten_tokens
                        .get(i + 2)
                        .is_some_and(|t| t.is_text("length"))
                {
                    return Err(Error::Unsupported(format!(
                        "unrewritten `.length` of `{}`",
                        ap.name
                    )));
                }
            }
        }
    }
    Ok(Some(out))
}

/// `for ( int x : arr )` keeps its shape but the element type widens to the
/// wrapper class.
fn widen_enhanced_for(mut tokens: Vec<Token>, targets: &[ArrayParam]) -> Vec<Token> {
    for i in 0..tokens.len() {
        if !tokens[i].is(TokenKind::Keyword, "for") {
            continue;
        }
        let window: Vec<&Token> = tokens.iter().skip(i + 1).take(6).collect();
        if let [open, ty, _var, colon, src, close] = window.as_slice() {
            if open.is(TokenKind::Punct, "(")
                && colon.is(TokenKind::Punct, ":")
                && close.is(TokenKind::Punct, ")")
                && ty.kind == TokenKind::Keyword
            {
                if let Some(ap) = targets.iter().find(|ap| ap.name == src.text) {
                    tokens[i + 2] = Token::ident(ap.wrapper.clone());
                }
            }
        }
    }
    tokens
}

fn rewrite_array_uses(tokens: &[Token], targets: &[ArrayParam]) -> Result<Vec<Token>> {
    let names: HashSet<&str> = targets.iter().map(|ap| ap.name.as_str()).collect();
    let mut out = Vec::new();
    let mut i = 0usize;
    while i < tokens.len() {
        let tok = &tokens[i];
        if tok.kind != TokenKind::Identifier || !names.contains(tok.text.as_str()) {
            out.push(tok.clone());
            i += 1;
            continue;
        }
        let name = tok.text.clone();
        // Reassignment to a fresh array is out of scope.
        if next_is(tokens, i + 1, "=")
            && tokens
                .get(i + 2)
                .is_some_and(|t| t.is(TokenKind::Keyword, "new"))
        {
            return Err(Error::Unsupported(format!(
                "parameter `{name}` reassigned to a new array"
            )));
        }
        if tokens
            .get(i + 1)
            .is_some_and(|t| t.is(TokenKind::Punct, "["))
        {
            let open = i + 1;
            let close = crate::parse::find_matching(tokens, open).ok_or_else(|| Error::Parse {
                span: tokens[open].span,
                message: "unbalanced `[`".into(),
            })?;
            let index = rewrite_array_uses(&tokens[open + 1..close], targets)?;
            let after = tokens.get(close + 1);
            if after.is_some_and(|t| t.is(TokenKind::Operator, "=")) {
                let (value_end, value) = value_run(tokens, close + 2, targets)?;
                push_call(&mut out, &name, "set", &[index, value]);
                i = value_end;
                continue;
            }
            if let Some(op) = after.and_then(compound_op) {
                let (value_end, value) = value_run(tokens, close + 2, targets)?;
                let mut get_expr = Vec::new();
                push_call(&mut get_expr, &name, "get", std::slice::from_ref(&index));
                let mut rhs = get_expr;
                rhs.push(Token::synth(TokenKind::Operator, op));
                rhs.extend(value);
                push_call(&mut out, &name, "set", &[index, rhs]);
                i = value_end;
                continue;
            }
            if after
                .is_some_and(|t| t.is(TokenKind::Operator, "++") || t.is(TokenKind::Operator, "--"))
            {
                return Err(Error::Unsupported(format!(
                    "increment of indexed `{name}` has no List mapping"
                )));
            }
            push_call(&mut out, &name, "get", &[index]);
            i = close + 1;
            continue;
        }
        if tokens
            .get(i + 1)
            .is_some_and(|t| t.is(TokenKind::Punct, "."))
            && tokens.get(i + 2).is_some_and(|t| t.is_text("length"))
        {
            out.push(tok.clone());
            out.push(Token::synth(TokenKind::Punct, "."));
            out.push(Token::ident("size"));
            out.push(Token::synth(TokenKind::Punct, "("));
            out.push(Token::synth(TokenKind::Punct, ")"));
            i += 3;
            continue;
        }
        out.push(tok.clone());
        i += 1;
    }
    Ok(out)
}

fn next_is(tokens: &[Token], i: usize, op: &str) -> bool {
    tokens.get(i).is_some_and(|t| t.is(TokenKind::Operator, op))
}

fn compound_op(tok: &Token) -> Option<&'static str> {
    if tok.kind != TokenKind::Operator {
        return None;
    }
    match tok.text.as_str() {
        "+=" => Some("+"),
        "-=" => Some("-"),
        "*=" => Some("*"),
        "/=" => Some("/"),
        "%=" => Some("%"),
        "&=" => Some("&"),
        "|=" => Some("|"),
        "^=" => Some("^"),
        _ => None,
    }
}

/// Assignment right-hand side: tokens up to the enclosing `;`, `,` or
/// closing bracket at relative depth zero. Returns (index of the stop
/// token, rewritten value tokens).
fn value_run(
    tokens: &[Token],
    start: usize,
    targets: &[ArrayParam],
) -> Result<(usize, Vec<Token>)> {
    let mut depth = 0isize;
    let mut end = tokens.len();
    for (k, tok) in tokens.iter().enumerate().skip(start) {
        if tok.kind == TokenKind::Punct {
            match tok.text.as_str() {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" | "}" => {
                    depth -= 1;
                    if depth < 0 {
                        end = k;
                        break;
                    }
                }
                ";" | "," if depth == 0 => {
                    end = k;
                    break;
                }
                _ => {}
            }
        }
    }
    let value = rewrite_array_uses(&tokens[start..end], targets)?;
    Ok((end, value))
}

fn push_call(out: &mut Vec<Token>, receiver: &str, member: &str, args: &[Vec<Token>]) {
    out.push(Token::ident(receiver));
    out.push(Token::synth(TokenKind::Punct, "."));
    out.push(Token::ident(member));
    out.push(Token::synth(TokenKind::Punct, "("));
    for (i, arg) in args.iter().enumerate() {
        if i > 0 {
            out.push(Token::synth(TokenKind::Punct, ","));
        }
        out.extend(arg.iter().cloned());
    }
    out.push(Token::synth(TokenKind::Punct, ")"));
}

// ---------------------------------------------------------------------------
// R3b: arr -> list parameter renaming
// ---------------------------------------------------------------------------

/// Rename Python parameters matching the arr pattern to `listN`, together
/// with all identifier occurrences in the body. String literals and
/// comments are untouched.
pub fn rename_arr_params(
    method: &MethodUnit,
    pattern: &regex::Regex,
    threshold: usize,
) -> (MethodUnit, MutationRecord) {
    let mut record = MutationRecord::new(Rule::R3bArrRename);
    if method.language != Language::Python {
        record.notes = "arr renaming only applies to Python sources".into();
        return (method.clone(), record);
    }
    let matching: Vec<String> = method
        .params
        .iter()
        .filter(|p| pattern.is_match(&p.name))
        .map(|p| p.name.clone())
        .collect();
    record.applicable = !matching.is_empty() && matching.len() >= threshold;
    if !record.applicable {
        if !matching.is_empty() {
            record.notes = format!(
                "{} matching parameter(s), below threshold {threshold}",
                matching.len()
            );
        }
        return (method.clone(), record);
    }
    match try_rename(method, &matching) {
        Ok(out) => {
            record.applied = true;
            record.before_span = Some(method.span);
            (out, record)
        }
        Err(e) => {
            record.notes = format!("rule skipped: {e}");
            (method.clone(), record)
        }
    }
}

fn try_rename(method: &MethodUnit, matching: &[String]) -> Result<MethodUnit> {
    let text = render_method(method);
    let tokens = tokenize(&text, Language::Python)?;
    let existing: HashSet<String> = tokens
        .iter()
        .filter(|t| t.kind == TokenKind::Identifier)
        .map(|t| t.text.clone())
        .collect();

    let mut mapping = Vec::new();
    let mut used: HashSet<String> = HashSet::new();
    for name in matching {
        let suffix = &name["arr".len()..];
        let target = if suffix.is_empty() {
            // Bare `arr`: first free listN.
            let mut n = 1usize;
            loop {
                let candidate = format!("list{n}");
                if !existing.contains(&candidate) && !used.contains(&candidate) {
                    break candidate;
                }
                n += 1;
            }
        } else {
            let candidate = format!("list{suffix}");
            if existing.contains(&candidate) || used.contains(&candidate) {
                return Err(Error::Capture(format!(
                    "target `{candidate}` already bound in method"
                )));
            }
            candidate
        };
        used.insert(target.clone());
        mapping.push((name.clone(), target));
    }

    let renamed: Vec<Token> = tokens
        .into_iter()
        .map(|mut tok| {
            if tok.kind == TokenKind::Identifier {
                if let Some((_, to)) = mapping.iter().find(|(from, _)| *from == tok.text) {
                    tok.text = to.clone();
                }
            }
            tok
        })
        .collect();
    let out_text = crate::token::render_tokens(&renamed);
    parse_method(&out_text, Language::Python)
}

// ---------------------------------------------------------------------------
// Orchestration
// ---------------------------------------------------------------------------

/// Run the enabled pre-rules in order R1 -> R2 -> R3 over one source file.
/// Per-rule failures are recorded and skipped; the pipeline never aborts.
pub fn apply_pre(unit: &SyntaxUnit, config: &PreConfig) -> (String, Vec<MutationRecord>) {
    let lang = config.direction.source_lang();
    debug_assert_eq!(unit.language, lang);
    let mut records = Vec::new();
    let mut text = unit.source.clone();

    if config.rules.contains(&Rule::R1Context) {
        match extract_focal(unit, &config.focal_name) {
            Ok((out, record)) => {
                text = out;
                records.push(record);
            }
            Err(e) => {
                let mut record = MutationRecord::new(Rule::R1Context);
                record.notes = format!("rule skipped: {e}");
                records.push(record);
            }
        }
    }

    let method_rules: Vec<(Rule, Language)> = vec![
        (Rule::R2Loop, Language::Java),
        (Rule::R3aArrayList, Language::Java),
        (Rule::R3bArrRename, Language::Python),
    ];
    for (rule, rule_lang) in method_rules {
        if !config.rules.contains(&rule) {
            continue;
        }
        if rule_lang != lang {
            let mut record = MutationRecord::new(rule);
            record.notes = format!("not applicable to direction {}", config.direction);
            records.push(record);
            continue;
        }
        let Ok(current) = parse_unit(&text, lang) else {
            let mut record = MutationRecord::new(rule);
            record.notes = "rule skipped: intermediate output failed to parse".into();
            records.push(record);
            continue;
        };
        let target = current
            .find_method(&config.focal_name)
            .cloned()
            .or_else(|| current.methods().next().cloned());
        let Some(method) = target else {
            let mut record = MutationRecord::new(rule);
            record.notes = "rule skipped: no method to transform".into();
            records.push(record);
            continue;
        };
        let (new_method, record) = match rule {
            Rule::R2Loop => for_to_while(&method, config.all_loops),
            Rule::R3aArrayList => array_params_to_list(&method),
            Rule::R3bArrRename => {
                rename_arr_params(&method, &config.arr_pattern, config.arr_threshold)
            }
            _ => unreachable!(),
        };
        if record.applied {
            let mut updated = current.clone();
            for item in &mut updated.items {
                if let Item::Method(m) = item {
                    if m.name == method.name {
                        *m = new_method.clone();
                        break;
                    }
                }
            }
            text = render_unit(&updated);
        }
        records.push(record);
    }
    (text, records)
}
