//! Tokenizer for the space-tokenized Java/Python method corpus.
//!
//! The corpus files separate every token with a single space, but the lexer
//! does not depend on that: it handles ordinary source text and, in lenient
//! mode, arbitrary garbage (collapsed translator output included).
//!
//! Python line structure is carried by [`TokenKind::Indent`] tokens: one per
//! line break, whose text is a newline followed by one tab per indent level.
//! Rendering a token stream therefore reproduces a normalized form of the
//! input: tokens joined by single spaces, indent markers verbatim.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Language {
    Java,
    Python,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "j2p")]
    J2p,
    #[serde(rename = "p2j")]
    P2j,
}

impl Direction {
    pub fn source_lang(self) -> Language {
        match self {
            Direction::J2p => Language::Java,
            Direction::P2j => Language::Python,
        }
    }

    pub fn target_lang(self) -> Language {
        match self {
            Direction::J2p => Language::Python,
            Direction::P2j => Language::Java,
        }
    }
}

impl std::str::FromStr for Direction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "j2p" => Ok(Direction::J2p),
            "p2j" => Ok(Direction::P2j),
            other => Err(Error::Config(format!("unknown direction `{other}`"))),
        }
    }
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Direction::J2p => "j2p",
            Direction::P2j => "p2j",
        })
    }
}

/// Byte range into the original source text. Half-open.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TokenKind {
    Identifier,
    Keyword,
    Number,
    Str,
    Operator,
    Punct,
    Comment,
    /// Line break plus indentation level (Python only).
    Indent,
}

/// One lexical token. Equality compares kind and text only, not spans:
/// transforms synthesize tokens with empty spans, and structural comparison
/// of parse trees must not see them.
#[derive(Debug, Clone, Eq, Serialize, Deserialize)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub span: Span,
}

impl PartialEq for Token {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.text == other.text
    }
}

impl std::hash::Hash for Token {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.kind.hash(state);
        self.text.hash(state);
    }
}

impl Token {
    pub fn new(kind: TokenKind, text: impl Into<String>, span: Span) -> Self {
        Token {
            kind,
            text: text.into(),
            span,
        }
    }

    /// Synthesized token with an empty span (produced by transforms).
    pub fn synth(kind: TokenKind, text: impl Into<String>) -> Self {
        Token::new(kind, text, Span::default())
    }

    pub fn ident(text: impl Into<String>) -> Self {
        Token::synth(TokenKind::Identifier, text)
    }

    pub fn indent(level: usize) -> Self {
        let mut text = String::from("\n");
        for _ in 0..level {
            text.push('\t');
        }
        Token::synth(TokenKind::Indent, text)
    }

    pub fn indent_level(&self) -> usize {
        debug_assert_eq!(self.kind, TokenKind::Indent);
        self.text.chars().filter(|&c| c == '\t').count()
    }

    pub fn is(&self, kind: TokenKind, text: &str) -> bool {
        self.kind == kind && self.text == text
    }

    pub fn is_text(&self, text: &str) -> bool {
        self.text == text
    }
}

const JAVA_KEYWORDS: &[&str] = &[
    "abstract",
    "assert",
    "boolean",
    "break",
    "byte",
    "case",
    "catch",
    "char",
    "class",
    "const",
    "continue",
    "default",
    "do",
    "double",
    "else",
    "enum",
    "extends",
    "final",
    "finally",
    "float",
    "for",
    "goto",
    "if",
    "implements",
    "import",
    "instanceof",
    "int",
    "interface",
    "long",
    "native",
    "new",
    "package",
    "private",
    "protected",
    "public",
    "return",
    "short",
    "static",
    "strictfp",
    "super",
    "switch",
    "synchronized",
    "this",
    "throw",
    "throws",
    "transient",
    "try",
    "void",
    "volatile",
    "while",
    "true",
    "false",
    "null",
];

const PYTHON_KEYWORDS: &[&str] = &[
    "False", "None", "True", "and", "as", "assert", "break", "class", "continue", "def", "del",
    "elif", "else", "except", "finally", "for", "from", "global", "if", "import", "in", "is",
    "lambda", "nonlocal", "not", "or", "pass", "raise", "return", "try", "while", "with", "yield",
];

// Longest match first.
const JAVA_OPERATORS: &[&str] = &[
    ">>>=", "<<=", ">>=", ">>>", "==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=", "-=", "*=",
    "/=", "%=", "&=", "|=", "^=", "->", "::", "<<", ">>", "+", "-", "*", "/", "%", "=", "<", ">",
    "!", "&", "|", "^", "~", "?",
];

const PYTHON_OPERATORS: &[&str] = &[
    "**=", "//=", "<<=", ">>=", "==", "!=", "<=", ">=", "**", "//", "+=", "-=", "*=", "/=", "%=",
    "&=", "|=", "^=", "->", "<<", ">>", "+", "-", "*", "/", "%", "=", "<", ">", "&", "|", "^", "~",
    "@",
];

const JAVA_PUNCT: &[char] = &['(', ')', '{', '}', '[', ']', ';', ',', '.', ':', '@'];
const PYTHON_PUNCT: &[char] = &['(', ')', '{', '}', '[', ']', ';', ',', '.', ':'];

pub fn is_keyword(text: &str, lang: Language) -> bool {
    match lang {
        Language::Java => JAVA_KEYWORDS.contains(&text),
        Language::Python => PYTHON_KEYWORDS.contains(&text),
    }
}

/// Strict tokenization: unterminated string literals are an error.
pub fn tokenize(text: &str, lang: Language) -> Result<Vec<Token>> {
    Lexer::new(text, lang, false).run()
}

/// Lenient tokenization: never fails; an unterminated string literal is
/// truncated at the end of its line. Used by the collapse detector, which
/// must accept arbitrary garbage.
pub fn tokenize_lenient(text: &str, lang: Language) -> Vec<Token> {
    Lexer::new(text, lang, true)
        .run()
        .expect("lenient lexer is total")
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    lang: Language,
    lenient: bool,
    bracket_depth: usize,
    tokens: Vec<Token>,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str, lang: Language, lenient: bool) -> Self {
        Lexer {
            src,
            bytes: src.as_bytes(),
            pos: 0,
            lang,
            lenient,
            bracket_depth: 0,
            tokens: Vec::new(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn peek_at(&self, off: usize) -> Option<u8> {
        self.bytes.get(self.pos + off).copied()
    }

    fn starts_with(&self, s: &str) -> bool {
        self.src[self.pos..].starts_with(s)
    }

    fn push(&mut self, kind: TokenKind, start: usize) {
        let text = self.src[start..self.pos].to_string();
        self.tokens
            .push(Token::new(kind, text, Span::new(start, self.pos)));
    }

    fn run(mut self) -> Result<Vec<Token>> {
        if self.lang == Language::Python {
            // Leading indentation of the very first line is dropped; snippet
            // parsing treats the first line as level 0.
            self.skip_inline_ws();
        }
        while self.pos < self.src.len() {
            match self.lang {
                Language::Java => self.java_step()?,
                Language::Python => self.python_step()?,
            }
        }
        Ok(self.tokens)
    }

    fn skip_inline_ws(&mut self) {
        while matches!(self.peek(), Some(b' ') | Some(b'\t') | Some(b'\r')) {
            self.pos += 1;
        }
    }

    fn java_step(&mut self) -> Result<()> {
        let c = self.peek().unwrap();
        if c.is_ascii_whitespace() {
            self.pos += 1;
            return Ok(());
        }
        let start = self.pos;
        if self.starts_with("//") {
            while self.peek().is_some_and(|b| b != b'\n') {
                self.pos += 1;
            }
            self.push(TokenKind::Comment, start);
            return Ok(());
        }
        if self.starts_with("/*") {
            self.pos += 2;
            while self.pos < self.src.len() && !self.starts_with("*/") {
                self.pos += 1;
            }
            self.pos = (self.pos + 2).min(self.src.len());
            self.push(TokenKind::Comment, start);
            return Ok(());
        }
        if c == b'"' || c == b'\'' {
            return self.string_literal(c);
        }
        if c.is_ascii_digit() {
            self.number();
            return Ok(());
        }
        if c.is_ascii_alphabetic() || c == b'_' || c == b'$' {
            self.word();
            return Ok(());
        }
        if JAVA_PUNCT.contains(&(c as char)) {
            self.pos += 1;
            self.push(TokenKind::Punct, start);
            return Ok(());
        }
        for op in JAVA_OPERATORS {
            if self.starts_with(op) {
                self.pos += op.len();
                self.push(TokenKind::Operator, start);
                return Ok(());
            }
        }
        // Unknown byte: keep it as punctuation so lexing stays total.
        self.pos += self.char_len();
        self.push(TokenKind::Punct, start);
        Ok(())
    }

    fn python_step(&mut self) -> Result<()> {
        let c = self.peek().unwrap();
        if c == b'\n' {
            self.newline();
            return Ok(());
        }
        if c == b' ' || c == b'\t' || c == b'\r' {
            self.pos += 1;
            return Ok(());
        }
        let start = self.pos;
        if c == b'#' {
            while self.peek().is_some_and(|b| b != b'\n') {
                self.pos += 1;
            }
            self.push(TokenKind::Comment, start);
            return Ok(());
        }
        if self.starts_with("\"\"\"") || self.starts_with("'''") {
            let quote = &self.src[self.pos..self.pos + 3].to_string();
            self.pos += 3;
            while self.pos < self.src.len() && !self.starts_with(quote) {
                self.pos += 1;
            }
            if self.pos >= self.src.len() && !self.lenient {
                return Err(Error::Lex {
                    span: Span::new(start, self.src.len()),
                    message: "unterminated string literal".into(),
                });
            }
            self.pos = (self.pos + 3).min(self.src.len());
            self.push(TokenKind::Str, start);
            return Ok(());
        }
        if c == b'"' || c == b'\'' {
            return self.string_literal(c);
        }
        // String prefixes like r"..." or b'...'.
        if matches!(c, b'r' | b'b' | b'f' | b'u' | b'R' | b'B' | b'F' | b'U')
            && matches!(self.peek_at(1), Some(b'"') | Some(b'\''))
        {
            self.pos += 1;
            let quote = self.peek().unwrap();
            return self.string_literal_from(quote, start);
        }
        if c.is_ascii_digit() {
            self.number();
            return Ok(());
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            self.word();
            return Ok(());
        }
        if matches!(c, b'(' | b'[' | b'{') {
            self.bracket_depth += 1;
            self.pos += 1;
            self.push(TokenKind::Punct, start);
            return Ok(());
        }
        if matches!(c, b')' | b']' | b'}') {
            self.bracket_depth = self.bracket_depth.saturating_sub(1);
            self.pos += 1;
            self.push(TokenKind::Punct, start);
            return Ok(());
        }
        if PYTHON_PUNCT.contains(&(c as char)) {
            self.pos += 1;
            self.push(TokenKind::Punct, start);
            return Ok(());
        }
        if c == b'\\' && self.peek_at(1) == Some(b'\n') {
            // Explicit line continuation.
            self.pos += 2;
            return Ok(());
        }
        for op in PYTHON_OPERATORS {
            if self.starts_with(op) {
                self.pos += op.len();
                self.push(TokenKind::Operator, start);
                return Ok(());
            }
        }
        self.pos += self.char_len();
        self.push(TokenKind::Punct, start);
        Ok(())
    }

    /// Consume a newline plus following indentation; emit one Indent token
    /// unless inside brackets or the following line is blank.
    fn newline(&mut self) {
        self.pos += 1; // the '\n'
        if self.bracket_depth > 0 {
            return;
        }
        loop {
            let start = self.pos;
            let mut level = 0usize;
            let mut spaces = 0usize;
            while let Some(c) = self.peek() {
                match c {
                    b'\t' => {
                        level += 1;
                        self.pos += 1;
                    }
                    b' ' => {
                        spaces += 1;
                        if spaces == 4 {
                            level += 1;
                            spaces = 0;
                        }
                        self.pos += 1;
                    }
                    b'\r' => self.pos += 1,
                    _ => break,
                }
            }
            match self.peek() {
                None => return, // trailing blank
                Some(b'\n') => {
                    // Blank line: skip it entirely.
                    self.pos += 1;
                    continue;
                }
                Some(_) => {
                    let mut text = String::from("\n");
                    for _ in 0..level {
                        text.push('\t');
                    }
                    self.tokens.push(Token::new(
                        TokenKind::Indent,
                        text,
                        Span::new(start, self.pos),
                    ));
                    return;
                }
            }
        }
    }

    fn string_literal(&mut self, quote: u8) -> Result<()> {
        let start = self.pos;
        self.string_literal_from(quote, start)
    }

    fn string_literal_from(&mut self, quote: u8, start: usize) -> Result<()> {
        self.pos += 1;
        while let Some(c) = self.peek() {
            if c == b'\\' {
                self.pos = (self.pos + 2).min(self.src.len());
                continue;
            }
            if c == quote {
                self.pos += 1;
                self.push(TokenKind::Str, start);
                return Ok(());
            }
            if c == b'\n' {
                break;
            }
            self.pos += 1;
        }
        if self.lenient {
            self.push(TokenKind::Str, start);
            Ok(())
        } else {
            Err(Error::Lex {
                span: Span::new(start, self.pos),
                message: "unterminated string literal".into(),
            })
        }
    }

    fn number(&mut self) {
        let start = self.pos;
        self.pos += 1;
        while let Some(c) = self.peek() {
            let continues = c.is_ascii_alphanumeric()
                || c == b'_'
                || (c == b'.' && self.peek_at(1).is_some_and(|b| b.is_ascii_digit()));
            if !continues {
                break;
            }
            self.pos += 1;
        }
        self.push(TokenKind::Number, start);
    }

    fn word(&mut self) {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == b'_' || (self.lang == Language::Java && c == b'$')
            {
                self.pos += 1;
            } else {
                break;
            }
        }
        let text = &self.src[start..self.pos];
        let kind = if is_keyword(text, self.lang) {
            TokenKind::Keyword
        } else {
            TokenKind::Identifier
        };
        self.push(kind, start);
    }

    fn char_len(&self) -> usize {
        self.src[self.pos..]
            .chars()
            .next()
            .map_or(1, |c| c.len_utf8())
    }
}

/// Render a raw token run in the corpus style: single spaces between tokens,
/// indent markers emitted verbatim (newline + tabs) with no extra spacing.
pub fn render_tokens(tokens: &[Token]) -> String {
    let mut out = String::new();
    let mut need_space = false;
    for tok in tokens {
        if tok.kind == TokenKind::Indent {
            out.push_str(&tok.text);
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

/// Structural equality of two token runs (kind + text, spans ignored).
pub fn tokens_eq(a: &[Token], b: &[Token]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x == y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(tokens: &[Token]) -> Vec<&str> {
        tokens.iter().map(|t| t.text.as_str()).collect()
    }

    #[test]
    fn smallest_java_statement() {
        let toks = tokenize("int x = 0 ;", Language::Java).unwrap();
        assert_eq!(texts(&toks), vec!["int", "x", "=", "0", ";"]);
        assert_eq!(toks[0].kind, TokenKind::Keyword);
        assert_eq!(toks[1].kind, TokenKind::Identifier);
        assert_eq!(toks[2].kind, TokenKind::Operator);
        assert_eq!(toks[3].kind, TokenKind::Number);
        assert_eq!(toks[4].kind, TokenKind::Punct);
    }

    #[test]
    fn spacetoken_is_one_identifier() {
        let toks = tokenize("def SPACETOKEN f ( param1 ) :", Language::Python).unwrap();
        assert!(toks
            .iter()
            .any(|t| t.kind == TokenKind::Identifier && t.text == "SPACETOKEN"));
    }

    #[test]
    fn bracket_access() {
        let toks = tokenize("arr [ i ]", Language::Java).unwrap();
        assert_eq!(texts(&toks), vec!["arr", "[", "i", "]"]);
        assert_eq!(toks[0].kind, TokenKind::Identifier);
        assert_eq!(toks[1].kind, TokenKind::Punct);
    }

    #[test]
    fn unterminated_string_is_lex_error() {
        let err = tokenize("String s = \"abc ;", Language::Java).unwrap_err();
        assert!(matches!(err, Error::Lex { .. }));
        // Lenient mode keeps going.
        let toks = tokenize_lenient("String s = \"abc ;", Language::Java);
        assert!(toks.iter().any(|t| t.kind == TokenKind::Str));
    }

    #[test]
    fn python_indent_markers() {
        let toks = tokenize("def f ( x ) :\n\treturn x\n", Language::Python).unwrap();
        let indents: Vec<_> = toks
            .iter()
            .filter(|t| t.kind == TokenKind::Indent)
            .collect();
        assert_eq!(indents.len(), 1);
        assert_eq!(indents[0].indent_level(), 1);
    }

    #[test]
    fn python_indent_suppressed_in_brackets() {
        let toks = tokenize("x = [ 1 ,\n    2 ]\ny = 0\n", Language::Python).unwrap();
        let indents: Vec<_> = toks
            .iter()
            .filter(|t| t.kind == TokenKind::Indent)
            .collect();
        assert_eq!(indents.len(), 1);
        assert_eq!(indents[0].indent_level(), 0);
    }

    #[test]
    fn spans_are_ordered_and_disjoint() {
        let toks = tokenize("while ( x != 0 ) { x = x / 10 ; }", Language::Java).unwrap();
        for pair in toks.windows(2) {
            assert!(pair[0].span.end <= pair[1].span.start);
        }
    }

    #[test]
    fn render_round_trip_normalized() {
        let src = "int x = 0 ; x ++ ;";
        let toks = tokenize(src, Language::Java).unwrap();
        assert_eq!(render_tokens(&toks), src);
    }

    #[test]
    fn string_content_stays_opaque() {
        let toks = tokenize("s = \" arr \"", Language::Python).unwrap();
        let idents: Vec<_> = toks
            .iter()
            .filter(|t| t.kind == TokenKind::Identifier)
            .map(|t| t.text.as_str())
            .collect();
        assert_eq!(idents, vec!["s"]);
    }
}
