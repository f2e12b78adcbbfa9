//! Test-only mini-interpreter for the Java integer subset the fuzzed loops
//! live in. Serves as the independent semantics oracle for the for->while
//! rewrite: two programs are equivalent when they produce the same final
//! variable store, the same return value, and the same write-event trace.

use std::collections::BTreeMap;

use transguard::cond::{CondChain, CondOp};
use transguard::parse::{split_top_level, Block, ForHeader, MethodUnit, Stmt};
use transguard::token::{Token, TokenKind};

const GAS: usize = 100_000;

pub type Trace = Vec<(String, i64)>;

#[derive(Debug, PartialEq, Eq)]
pub struct Outcome {
    pub ret: Option<i64>,
    pub vars: BTreeMap<String, i64>,
    pub trace: Trace,
}

enum Flow {
    Normal,
    Break,
    Continue,
    Return(Option<i64>),
}

struct Interp {
    vars: BTreeMap<String, i64>,
    trace: Trace,
    steps: usize,
}

pub fn run_method(method: &MethodUnit) -> Result<Outcome, String> {
    let mut interp = Interp {
        vars: BTreeMap::new(),
        trace: Vec::new(),
        steps: 0,
    };
    let ret = match interp.exec_block(&method.body)? {
        Flow::Return(v) => v,
        _ => None,
    };
    Ok(Outcome {
        ret,
        vars: interp.vars,
        trace: interp.trace,
    })
}

impl Interp {
    fn tick(&mut self) -> Result<(), String> {
        self.steps += 1;
        if self.steps > GAS {
            return Err("gas exhausted".into());
        }
        Ok(())
    }

    fn write(&mut self, name: &str, value: i64) {
        self.vars.insert(name.to_string(), value);
        self.trace.push((name.to_string(), value));
    }

    fn exec_block(&mut self, block: &Block) -> Result<Flow, String> {
        for stmt in &block.stmts {
            match self.exec_stmt(stmt)? {
                Flow::Normal => {}
                other => return Ok(other),
            }
        }
        Ok(Flow::Normal)
    }

    fn exec_stmt(&mut self, stmt: &Stmt) -> Result<Flow, String> {
        self.tick()?;
        match stmt {
            Stmt::Decl { tokens, .. } => {
                self.exec_decl(tokens)?;
                Ok(Flow::Normal)
            }
            Stmt::Expr { tokens, .. } => {
                self.exec_assign(strip_semi(tokens))?;
                Ok(Flow::Normal)
            }
            Stmt::Return { tokens, .. } => {
                let run = strip_semi(tokens);
                let expr = &run[1..]; // drop `return`
                let value = if expr.is_empty() {
                    None
                } else {
                    Some(self.eval(expr)?)
                };
                Ok(Flow::Return(value))
            }
            Stmt::Break { .. } => Ok(Flow::Break),
            Stmt::Continue { .. } => Ok(Flow::Continue),
            Stmt::If {
                cond,
                then_block,
                else_block,
                ..
            } => {
                if self.eval_cond(cond)? {
                    self.exec_block(then_block)
                } else if let Some(else_block) = else_block {
                    self.exec_block(else_block)
                } else {
                    Ok(Flow::Normal)
                }
            }
            Stmt::While { cond, body, .. } => {
                loop {
                    self.tick()?;
                    if !self.eval_cond(cond)? {
                        break;
                    }
                    match self.exec_block(body)? {
                        Flow::Break => break,
                        Flow::Continue | Flow::Normal => {}
                        ret @ Flow::Return(_) => return Ok(ret),
                    }
                }
                Ok(Flow::Normal)
            }
            Stmt::For { header, body, .. } => self.exec_for(header, body),
            Stmt::ForEach { .. } => Err("foreach not in interpreter subset".into()),
            Stmt::Opaque { tokens, .. } => Err(format!(
                "opaque statement not in interpreter subset: {tokens:?}"
            )),
        }
    }

    fn exec_for(&mut self, header: &ForHeader, body: &Block) -> Result<Flow, String> {
        if !header.init.is_empty() {
            if is_decl_run(&header.init) {
                self.exec_decl(&header.init)?;
            } else {
                for segment in split_top_level(&header.init, ",") {
                    self.exec_assign(segment)?;
                }
            }
        }
        loop {
            self.tick()?;
            let keep_going = match &header.cond {
                Some(cond) => self.eval_cond(cond)?,
                None => true,
            };
            if !keep_going {
                break;
            }
            match self.exec_block(body)? {
                Flow::Break => break,
                ret @ Flow::Return(_) => return Ok(ret),
                Flow::Continue | Flow::Normal => {
                    for update in &header.update {
                        self.exec_assign(update)?;
                    }
                }
            }
        }
        Ok(Flow::Normal)
    }

    /// `int i = e , j = e2 ;`
    fn exec_decl(&mut self, tokens: &[Token]) -> Result<(), String> {
        let run = strip_semi(tokens);
        if run.is_empty() {
            return Ok(());
        }
        let body = &run[1..]; // drop the type token
        for segment in split_top_level(body, ",") {
            match segment {
                [name] if name.kind == TokenKind::Identifier => {
                    self.write(&name.text, 0);
                }
                [name, eq, rest @ ..]
                    if name.kind == TokenKind::Identifier && eq.is(TokenKind::Operator, "=") =>
                {
                    let value = self.eval(rest)?;
                    self.write(&name.text, value);
                }
                _ => return Err(format!("unsupported declarator: {segment:?}")),
            }
        }
        Ok(())
    }

    /// `i ++` / `-- i` / `i = e` / `i += e`
    fn exec_assign(&mut self, tokens: &[Token]) -> Result<(), String> {
        let run = strip_semi(tokens);
        let get = |interp: &Interp, name: &Token| -> Result<i64, String> {
            interp
                .vars
                .get(&name.text)
                .copied()
                .ok_or_else(|| format!("undefined variable `{}`", name.text))
        };
        match run {
            [] => Ok(()),
            [name, op] | [op, name]
                if name.kind == TokenKind::Identifier
                    && (op.is(TokenKind::Operator, "++") || op.is(TokenKind::Operator, "--")) =>
            {
                let delta = if op.text == "++" { 1 } else { -1 };
                let value = get(self, name)? + delta;
                self.write(&name.text.clone(), value);
                Ok(())
            }
            [name, eq, rest @ ..]
                if name.kind == TokenKind::Identifier && eq.is(TokenKind::Operator, "=") =>
            {
                let value = self.eval(rest)?;
                self.write(&name.text.clone(), value);
                Ok(())
            }
            [name, op, rest @ ..]
                if name.kind == TokenKind::Identifier
                    && op.kind == TokenKind::Operator
                    && op.text.len() == 2
                    && op.text.ends_with('=')
                    && "+-*/%".contains(&op.text[..1]) =>
            {
                let lhs = get(self, name)?;
                let rhs = self.eval(rest)?;
                let value = apply_binop(&op.text[..1], lhs, rhs)?;
                self.write(&name.text.clone(), value);
                Ok(())
            }
            _ => Err(format!("unsupported assignment: {run:?}")),
        }
    }

    fn eval_cond(&mut self, cond: &CondChain) -> Result<bool, String> {
        match cond.op {
            CondOp::And => {
                for clause in &cond.clauses {
                    if self.eval(clause)? == 0 {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            CondOp::Or => {
                for clause in &cond.clauses {
                    if self.eval(clause)? != 0 {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            CondOp::Single => Ok(self.eval(&cond.clauses[0])? != 0),
        }
    }

    fn eval(&self, tokens: &[Token]) -> Result<i64, String> {
        let mut parser = ExprParser {
            tokens,
            pos: 0,
            vars: &self.vars,
        };
        let value = parser.parse_or()?;
        if parser.pos != tokens.len() {
            return Err(format!("trailing tokens in expression: {tokens:?}"));
        }
        Ok(value)
    }
}

fn strip_semi(tokens: &[Token]) -> &[Token] {
    match tokens.last() {
        Some(t) if t.is(TokenKind::Punct, ";") => &tokens[..tokens.len() - 1],
        _ => tokens,
    }
}

fn is_decl_run(tokens: &[Token]) -> bool {
    matches!(tokens.first(), Some(t) if t.is(TokenKind::Keyword, "int") || t.is(TokenKind::Keyword, "long"))
}

fn apply_binop(op: &str, lhs: i64, rhs: i64) -> Result<i64, String> {
    Ok(match op {
        "+" => lhs.wrapping_add(rhs),
        "-" => lhs.wrapping_sub(rhs),
        "*" => lhs.wrapping_mul(rhs),
        "/" => {
            if rhs == 0 {
                return Err("division by zero".into());
            }
            lhs / rhs // Rust and Java both truncate toward zero
        }
        "%" => {
            if rhs == 0 {
                return Err("modulo by zero".into());
            }
            lhs % rhs
        }
        other => return Err(format!("unsupported operator `{other}`")),
    })
}

struct ExprParser<'a> {
    tokens: &'a [Token],
    pos: usize,
    vars: &'a BTreeMap<String, i64>,
}

impl ExprParser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat_op(&mut self, ops: &[&str]) -> Option<String> {
        let tok = self.peek()?;
        if tok.kind == TokenKind::Operator && ops.contains(&tok.text.as_str()) {
            let text = tok.text.clone();
            self.pos += 1;
            return Some(text);
        }
        None
    }

    fn parse_or(&mut self) -> Result<i64, String> {
        let mut value = self.parse_and()?;
        while self.eat_op(&["||"]).is_some() {
            let rhs = self.parse_and()?;
            value = i64::from(value != 0 || rhs != 0);
        }
        Ok(value)
    }

    fn parse_and(&mut self) -> Result<i64, String> {
        let mut value = self.parse_equality()?;
        while self.eat_op(&["&&"]).is_some() {
            let rhs = self.parse_equality()?;
            value = i64::from(value != 0 && rhs != 0);
        }
        Ok(value)
    }

    fn parse_equality(&mut self) -> Result<i64, String> {
        let mut value = self.parse_relational()?;
        while let Some(op) = self.eat_op(&["==", "!="]) {
            let rhs = self.parse_relational()?;
            value = i64::from(if op == "==" {
                value == rhs
            } else {
                value != rhs
            });
        }
        Ok(value)
    }

    fn parse_relational(&mut self) -> Result<i64, String> {
        let mut value = self.parse_additive()?;
        while let Some(op) = self.eat_op(&["<", "<=", ">", ">="]) {
            let rhs = self.parse_additive()?;
            value = i64::from(match op.as_str() {
                "<" => value < rhs,
                "<=" => value <= rhs,
                ">" => value > rhs,
                _ => value >= rhs,
            });
        }
        Ok(value)
    }

    fn parse_additive(&mut self) -> Result<i64, String> {
        let mut value = self.parse_multiplicative()?;
        while let Some(op) = self.eat_op(&["+", "-"]) {
            let rhs = self.parse_multiplicative()?;
            value = apply_binop(&op, value, rhs)?;
        }
        Ok(value)
    }

    fn parse_multiplicative(&mut self) -> Result<i64, String> {
        let mut value = self.parse_unary()?;
        while let Some(op) = self.eat_op(&["*", "/", "%"]) {
            let rhs = self.parse_unary()?;
            value = apply_binop(&op, value, rhs)?;
        }
        Ok(value)
    }

    fn parse_unary(&mut self) -> Result<i64, String> {
        if self.eat_op(&["-"]).is_some() {
            return Ok(self.parse_unary()?.wrapping_neg());
        }
        if self.eat_op(&["!"]).is_some() {
            return Ok(i64::from(self.parse_unary()? == 0));
        }
        self.parse_primary()
    }

    fn parse_primary(&mut self) -> Result<i64, String> {
        let Some(tok) = self.peek().cloned() else {
            return Err("empty expression".into());
        };
        match tok.kind {
            TokenKind::Number => {
                self.pos += 1;
                tok.text
                    .parse::<i64>()
                    .map_err(|e| format!("number `{}`: {e}", tok.text))
            }
            TokenKind::Identifier => {
                self.pos += 1;
                self.vars
                    .get(&tok.text)
                    .copied()
                    .ok_or_else(|| format!("undefined variable `{}`", tok.text))
            }
            TokenKind::Keyword if tok.text == "true" => {
                self.pos += 1;
                Ok(1)
            }
            TokenKind::Keyword if tok.text == "false" => {
                self.pos += 1;
                Ok(0)
            }
            TokenKind::Punct if tok.text == "(" => {
                self.pos += 1;
                let value = self.parse_or()?;
                match self.peek() {
                    Some(t) if t.is(TokenKind::Punct, ")") => {
                        self.pos += 1;
                        Ok(value)
                    }
                    _ => Err("missing `)`".into()),
                }
            }
            _ => Err(format!("unsupported token in expression: {tok:?}")),
        }
    }
}
