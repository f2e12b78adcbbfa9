//! Re-rendering of parsed units in the corpus style: single-space token
//! separation, one statement per line, tab indentation.

use crate::cond::CondChain;
use crate::parse::{Block, ForHeader, Item, MethodUnit, Stmt, SyntaxUnit};
use crate::token::{render_tokens, Language, Token, TokenKind};

pub fn render_unit(unit: &SyntaxUnit) -> String {
    let mut parts = Vec::new();
    for item in &unit.items {
        let text = match item {
            Item::Method(m) => render_method(m),
            Item::Other(o) => {
                if o.tokens.is_empty() {
                    continue;
                }
                match unit.language {
                    Language::Java => render_tokens(&o.tokens),
                    Language::Python => render_python_run(&o.tokens, 0),
                }
            }
        };
        parts.push(text);
    }
    let mut out = parts.join("\n");
    out.push('\n');
    out
}

pub fn render_method(m: &MethodUnit) -> String {
    let mut out = String::new();
    match m.language {
        Language::Java => render_java_method(m, &mut out),
        Language::Python => render_python_method(m, &mut out),
    }
    out
}

pub fn render_block(block: &Block, lang: Language) -> String {
    let mut out = String::new();
    match lang {
        Language::Java => {
            for stmt in &block.stmts {
                render_java_stmt(stmt, 0, &mut out);
                out.push('\n');
            }
        }
        Language::Python => {
            for stmt in &block.stmts {
                render_python_stmt(stmt, 0, &mut out);
                out.push('\n');
            }
        }
    }
    out
}

fn tabs(level: usize, out: &mut String) {
    for _ in 0..level {
        out.push('\t');
    }
}

fn params_text(m: &MethodUnit) -> String {
    if m.params.is_empty() {
        return "( )".to_string();
    }
    let joined: Vec<String> = m.params.iter().map(|p| render_tokens(&p.tokens)).collect();
    format!("( {} )", joined.join(" , "))
}

// ---------------------------------------------------------------------------
// Java
// ---------------------------------------------------------------------------

fn render_java_method(m: &MethodUnit, out: &mut String) {
    tabs(m.indent, out);
    if !m.modifiers.is_empty() {
        out.push_str(&render_tokens(&m.modifiers));
        out.push(' ');
    }
    out.push_str(&m.name);
    out.push(' ');
    out.push_str(&params_text(m));
    out.push_str(" {");
    render_java_block_body(&m.body, m.indent + 1, out);
    out.push('\n');
    tabs(m.indent, out);
    out.push('}');
}

fn render_java_block_body(block: &Block, level: usize, out: &mut String) {
    for stmt in &block.stmts {
        out.push('\n');
        render_java_stmt(stmt, level, out);
    }
}

fn cond_text(cond: &CondChain, lang: Language) -> String {
    render_tokens(&cond.render(lang))
}

fn render_java_braced(body: &Block, level: usize, out: &mut String) {
    if body.stmts.is_empty() {
        out.push_str("{ }");
        return;
    }
    out.push('{');
    render_java_block_body(body, level + 1, out);
    out.push('\n');
    tabs(level, out);
    out.push('}');
}

fn render_java_stmt(stmt: &Stmt, level: usize, out: &mut String) {
    tabs(level, out);
    match stmt {
        Stmt::For { header, body, .. } => {
            out.push_str("for ( ");
            render_for_header(header, out);
            out.push_str(" ) ");
            render_java_braced(body, level, out);
        }
        Stmt::ForEach { header, body, .. } => {
            out.push_str("for ( ");
            out.push_str(&render_tokens(header));
            out.push_str(" ) ");
            render_java_braced(body, level, out);
        }
        Stmt::While { cond, body, .. } => {
            out.push_str("while ( ");
            out.push_str(&cond_text(cond, Language::Java));
            out.push_str(" ) ");
            render_java_braced(body, level, out);
        }
        Stmt::If {
            cond,
            then_block,
            else_block,
            ..
        } => {
            render_java_if(cond, then_block, else_block.as_ref(), level, out);
        }
        Stmt::Return { tokens, .. }
        | Stmt::Break { tokens, .. }
        | Stmt::Continue { tokens, .. }
        | Stmt::Decl { tokens, .. }
        | Stmt::Expr { tokens, .. }
        | Stmt::Opaque { tokens, .. } => {
            out.push_str(&render_tokens(tokens));
        }
    }
}

fn render_java_if(
    cond: &CondChain,
    then_block: &Block,
    else_block: Option<&Block>,
    level: usize,
    out: &mut String,
) {
    out.push_str("if ( ");
    out.push_str(&cond_text(cond, Language::Java));
    out.push_str(" ) ");
    render_java_braced(then_block, level, out);
    if let Some(else_blk) = else_block {
        out.push_str(" else ");
        // Chained `else if` renders inline.
        if let [Stmt::If {
            cond,
            then_block,
            else_block,
            ..
        }] = else_blk.stmts.as_slice()
        {
            render_java_if(cond, then_block, else_block.as_ref(), level, out);
        } else {
            render_java_braced(else_blk, level, out);
        }
    }
}

fn render_for_header(header: &ForHeader, out: &mut String) {
    if !header.init.is_empty() {
        out.push_str(&render_tokens(&header.init));
        out.push(' ');
    }
    out.push(';');
    if let Some(cond) = &header.cond {
        out.push(' ');
        out.push_str(&cond_text(cond, Language::Java));
    }
    out.push_str(" ;");
    if !header.update.is_empty() {
        out.push(' ');
        let parts: Vec<String> = header.update.iter().map(|u| render_tokens(u)).collect();
        out.push_str(&parts.join(" , "));
    }
}

// ---------------------------------------------------------------------------
// Python
// ---------------------------------------------------------------------------

fn render_python_method(m: &MethodUnit, out: &mut String) {
    tabs(m.indent, out);
    out.push_str("def ");
    out.push_str(&m.name);
    out.push(' ');
    out.push_str(&params_text(m));
    out.push_str(" :");
    if m.body.stmts.is_empty() {
        out.push('\n');
        tabs(m.indent + 1, out);
        out.push_str("pass");
    } else {
        render_python_block(&m.body, m.indent + 1, out);
    }
}

fn render_python_block(block: &Block, level: usize, out: &mut String) {
    if block.stmts.is_empty() {
        out.push('\n');
        tabs(level, out);
        out.push_str("pass");
        return;
    }
    for stmt in &block.stmts {
        out.push('\n');
        render_python_stmt(stmt, level, out);
    }
}

fn render_python_stmt(stmt: &Stmt, level: usize, out: &mut String) {
    tabs(level, out);
    match stmt {
        Stmt::While { cond, body, .. } => {
            out.push_str("while ");
            out.push_str(&cond_text(cond, Language::Python));
            out.push_str(" :");
            render_python_block(body, level + 1, out);
        }
        Stmt::If {
            cond,
            then_block,
            else_block,
            ..
        } => {
            render_python_if(cond, then_block, else_block.as_ref(), level, "if", out);
        }
        Stmt::ForEach { header, body, .. } => {
            out.push_str("for ");
            out.push_str(&render_tokens(header));
            out.push_str(" :");
            render_python_block(body, level + 1, out);
        }
        Stmt::For { header, body, .. } => {
            // Python has no three-slot for; this only occurs on synthetic
            // trees and degrades to a while form.
            out.push_str("while ");
            match &header.cond {
                Some(c) => out.push_str(&cond_text(c, Language::Python)),
                None => out.push_str("True"),
            }
            out.push_str(" :");
            render_python_block(body, level + 1, out);
        }
        Stmt::Return { tokens, .. }
        | Stmt::Break { tokens, .. }
        | Stmt::Continue { tokens, .. }
        | Stmt::Decl { tokens, .. }
        | Stmt::Expr { tokens, .. } => {
            out.push_str(&render_python_run_inner(tokens, level));
        }
        Stmt::Opaque { tokens, .. } => {
            out.push_str(&render_python_run_inner(tokens, level));
        }
    }
}

fn render_python_if(
    cond: &CondChain,
    then_block: &Block,
    else_block: Option<&Block>,
    level: usize,
    keyword: &str,
    out: &mut String,
) {
    out.push_str(keyword);
    out.push(' ');
    out.push_str(&cond_text(cond, Language::Python));
    out.push_str(" :");
    render_python_block(then_block, level + 1, out);
    if let Some(else_blk) = else_block {
        out.push('\n');
        tabs(level, out);
        if let [Stmt::If {
            cond,
            then_block,
            else_block,
            ..
        }] = else_blk.stmts.as_slice()
        {
            render_python_if(cond, then_block, else_block.as_ref(), level, "elif", out);
        } else {
            out.push_str("else :");
            render_python_block(else_blk, level + 1, out);
        }
    }
}

/// Render a python token run whose embedded indent markers are relative to
/// the run's first line; `level` is the rendering level of that first line.
fn render_python_run(tokens: &[Token], level: usize) -> String {
    let mut out = String::new();
    tabs(level, &mut out);
    out.push_str(&render_python_run_inner(tokens, level));
    out
}

fn render_python_run_inner(tokens: &[Token], level: usize) -> String {
    let mut out = String::new();
    let mut need_space = false;
    for tok in tokens {
        if tok.kind == TokenKind::Indent {
            out.push('\n');
            tabs(level + tok.indent_level(), &mut out);
            need_space = false;
            continue;
        }
        if need_space {
            out.push(' ');
        }
        out.push_str(&tok.text);
        need_space = true;
    }
    out
}
