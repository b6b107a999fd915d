//! Lexer and recursive-descent parser for the heuristic language.
//!
//! ```text
//! expr  := let | ite | or
//! let   := "let" IDENT "=" expr "in" expr
//! ite   := "if" expr "then" expr "else" expr
//! or    := and {"or" and}
//! and   := cmp {"and" cmp}
//! cmp   := add [("=="|"!="|"<"|"<="|">"|">=") add]
//! add   := mul {("+"|"-") mul}
//! mul   := unary {("*"|"/") unary}
//! unary := ["-"] atom
//! atom  := NUMBER | IDENT | call | "(" expr ")"
//! call  := IDENT "(" [args] ")" | IDENT "(" IDENT "in" expr "," expr ")"
//! ```
//!
//! `#` starts a comment that runs to the end of the line.

use std::fmt;

use super::ast::{BinOp, Expr, Func};
use crate::domains::DomainId;

/// Limit on both syntactic nesting and expression-tree depth.
const MAX_DEPTH: usize = 200;
const KEYWORDS: [&str; 8] = ["let", "in", "if", "then", "else", "and", "or", "not"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParseErrorKind {
    Syntax,
    Unbound,
    Arity,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub span: Span,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ParseErrorKind::Syntax => "syntax error",
            ParseErrorKind::Unbound => "unbound identifier",
            ParseErrorKind::Arity => "arity mismatch",
        };
        write!(f, "{kind} at line {}, column {}: {}", self.span.line, self.span.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(&'static str),
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    span: Span,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let bytes = src.as_bytes();
    let mut i = 0;
    let mut line = 1;
    let mut line_start = 0;
    let span_at = |start: usize, end: usize, line: usize, line_start: usize| Span {
        start,
        end,
        line,
        column: src[line_start..start].chars().count() + 1,
    };
    while i < bytes.len() {
        let c = bytes[i];
        if c == b'\n' {
            i += 1;
            line += 1;
            line_start = i;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == b'#' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || (c == b'.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            let text = &src[start..i];
            let span = span_at(start, i, line, line_start);
            let value: f64 = text.parse().map_err(|_| ParseError {
                kind: ParseErrorKind::Syntax,
                span,
                message: format!("malformed number {text:?}"),
            })?;
            if !value.is_finite() {
                return Err(ParseError { kind: ParseErrorKind::Syntax, span, message: "number out of range".into() });
            }
            out.push(Token { tok: Tok::Num(value), span });
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(src[start..i].to_string()), span: span_at(start, i, line, line_start) });
            continue;
        }
        let two = src.get(i..i + 2).unwrap_or("");
        let sym: Option<&'static str> = match two {
            "==" => Some("=="),
            "!=" => Some("!="),
            "<=" => Some("<="),
            ">=" => Some(">="),
            _ => None,
        };
        if let Some(s) = sym {
            i += 2;
            out.push(Token { tok: Tok::Sym(s), span: span_at(start, i, line, line_start) });
            continue;
        }
        let sym: Option<&'static str> = match c {
            b'+' => Some("+"),
            b'-' => Some("-"),
            b'*' => Some("*"),
            b'/' => Some("/"),
            b'<' => Some("<"),
            b'>' => Some(">"),
            b'=' => Some("="),
            b'(' => Some("("),
            b')' => Some(")"),
            b',' => Some(","),
            _ => None,
        };
        match sym {
            Some(s) => {
                i += 1;
                out.push(Token { tok: Tok::Sym(s), span: span_at(start, i, line, line_start) });
            }
            None => {
                let ch = src[i..].chars().next().unwrap_or('?');
                return Err(ParseError {
                    kind: ParseErrorKind::Syntax,
                    span: span_at(start, i + ch.len_utf8(), line, line_start),
                    message: format!("unexpected character {ch:?}"),
                });
            }
        }
    }
    out.push(Token { tok: Tok::Eof, span: span_at(src.len(), src.len(), line, line_start) });
    Ok(out)
}

/// Names bound in every program of a domain.
pub fn domain_bindings(domain: DomainId) -> &'static [&'static str] {
    match domain {
        DomainId::Blocksworld => &["state", "goal"],
        DomainId::Game24 => &["state", "target"],
        DomainId::Cube2x2 => &["state"],
    }
}

/// Functions that only make sense for one domain's state view.
fn func_allowed(f: Func, domain: DomainId) -> bool {
    match f {
        Func::Faces | Func::Uniform => domain == DomainId::Cube2x2,
        Func::Block | Func::Support | Func::Height => domain == DomainId::Blocksworld,
        Func::Results => domain == DomainId::Game24,
        _ => true,
    }
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    domain: DomainId,
    scope: Vec<String>,
    depth: usize,
    _src: &'a str,
}

type PResult<T> = Result<T, ParseError>;
type Node = (Expr, usize);

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, kind: ParseErrorKind, span: Span, message: impl Into<String>) -> ParseError {
        ParseError { kind, span, message: message.into() }
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(&self.peek().tok, Tok::Sym(x) if *x == s)
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(x) if x == kw)
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.is_sym(s) {
            self.next();
            Ok(())
        } else {
            let t = self.peek().clone();
            Err(self.err(ParseErrorKind::Syntax, t.span, format!("expected '{s}', found {}", describe(&t.tok))))
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<()> {
        if self.is_kw(kw) {
            self.next();
            Ok(())
        } else {
            let t = self.peek().clone();
            Err(self.err(ParseErrorKind::Syntax, t.span, format!("expected '{kw}', found {}", describe(&t.tok))))
        }
    }

    fn binder_name(&mut self) -> PResult<String> {
        let t = self.next();
        match t.tok {
            Tok::Ident(name) if !KEYWORDS.contains(&name.as_str()) && Func::lookup(&name).is_none() => Ok(name),
            other => Err(self.err(ParseErrorKind::Syntax, t.span, format!("expected a variable name, found {}", describe(&other)))),
        }
    }

    fn enter(&mut self) -> PResult<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            let span = self.peek().span;
            return Err(self.err(ParseErrorKind::Syntax, span, "expression nested too deeply"));
        }
        Ok(())
    }

    /// Wraps a freshly built node, enforcing the tree-depth limit.
    fn node(&self, e: Expr, depth: usize) -> PResult<Node> {
        if depth > MAX_DEPTH {
            let span = self.peek().span;
            return Err(self.err(ParseErrorKind::Syntax, span, "expression nested too deeply"));
        }
        Ok((e, depth))
    }

    fn binary(&self, op: BinOp, lhs: Node, rhs: Node) -> PResult<Node> {
        let depth = lhs.1.max(rhs.1) + 1;
        self.node(Expr::Binary(op, Box::new(lhs.0), Box::new(rhs.0)), depth)
    }

    fn expr(&mut self) -> PResult<Node> {
        self.enter()?;
        let e = if self.is_kw("let") {
            self.next();
            let name = self.binder_name()?;
            self.expect_sym("=")?;
            let value = self.expr()?;
            self.expect_kw("in")?;
            self.scope.push(name.clone());
            let body = self.expr();
            self.scope.pop();
            let body = body?;
            let depth = value.1.max(body.1) + 1;
            self.node(Expr::Let(name, Box::new(value.0), Box::new(body.0)), depth)?
        } else if self.is_kw("if") {
            self.next();
            let c = self.expr()?;
            self.expect_kw("then")?;
            let t = self.expr()?;
            self.expect_kw("else")?;
            let e = self.expr()?;
            let depth = c.1.max(t.1).max(e.1) + 1;
            self.node(Expr::If(Box::new(c.0), Box::new(t.0), Box::new(e.0)), depth)?
        } else {
            self.or()?
        };
        self.depth -= 1;
        Ok(e)
    }

    fn or(&mut self) -> PResult<Node> {
        let mut lhs = self.and()?;
        while self.is_kw("or") {
            self.next();
            let rhs = self.and()?;
            lhs = self.binary(BinOp::Or, lhs, rhs)?;
        }
        Ok(lhs)
    }

    fn and(&mut self) -> PResult<Node> {
        let mut lhs = self.cmp()?;
        while self.is_kw("and") {
            self.next();
            let rhs = self.cmp()?;
            lhs = self.binary(BinOp::And, lhs, rhs)?;
        }
        Ok(lhs)
    }

    fn cmp(&mut self) -> PResult<Node> {
        let lhs = self.add()?;
        let op = match &self.peek().tok {
            Tok::Sym("==") => BinOp::Eq,
            Tok::Sym("!=") => BinOp::Ne,
            Tok::Sym("<") => BinOp::Lt,
            Tok::Sym("<=") => BinOp::Le,
            Tok::Sym(">") => BinOp::Gt,
            Tok::Sym(">=") => BinOp::Ge,
            _ => return Ok(lhs),
        };
        self.next();
        let rhs = self.add()?;
        self.binary(op, lhs, rhs)
    }

    fn add(&mut self) -> PResult<Node> {
        let mut lhs = self.mul()?;
        loop {
            let op = match &self.peek().tok {
                Tok::Sym("+") => BinOp::Add,
                Tok::Sym("-") => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.next();
            let rhs = self.mul()?;
            lhs = self.binary(op, lhs, rhs)?;
        }
    }

    fn mul(&mut self) -> PResult<Node> {
        let mut lhs = self.unary()?;
        loop {
            let op = match &self.peek().tok {
                Tok::Sym("*") => BinOp::Mul,
                Tok::Sym("/") => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.next();
            let rhs = self.unary()?;
            lhs = self.binary(op, lhs, rhs)?;
        }
    }

    fn unary(&mut self) -> PResult<Node> {
        if self.is_sym("-") {
            self.next();
            let (inner, d) = self.atom()?;
            return self.node(Expr::Neg(Box::new(inner)), d + 1);
        }
        self.atom()
    }

    fn atom(&mut self) -> PResult<Node> {
        let t = self.next();
        match t.tok {
            Tok::Num(v) => Ok((Expr::Num(v), 1)),
            Tok::Sym("(") => {
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            Tok::Ident(name) if KEYWORDS.contains(&name.as_str()) => {
                Err(self.err(ParseErrorKind::Syntax, t.span, format!("unexpected keyword '{name}'")))
            }
            Tok::Ident(name) => {
                if self.is_sym("(") {
                    self.call(name, t.span)
                } else if self.scope.iter().rev().any(|s| *s == name) {
                    Ok((Expr::Var(name), 1))
                } else {
                    Err(self.err(ParseErrorKind::Unbound, t.span, format!("'{name}' is not bound")))
                }
            }
            other => Err(self.err(ParseErrorKind::Syntax, t.span, format!("unexpected {}", describe(&other)))),
        }
    }

    fn call(&mut self, name: String, span: Span) -> PResult<Node> {
        let func = match Func::lookup(&name) {
            Some(f) if func_allowed(f, self.domain) => f,
            _ => {
                return Err(self.err(
                    ParseErrorKind::Unbound,
                    span,
                    format!("unknown function '{name}' for domain {}", self.domain),
                ))
            }
        };
        self.expect_sym("(")?;
        if func.is_binder() {
            let var = self.binder_name()?;
            self.expect_kw("in")?;
            let coll = self.expr()?;
            self.expect_sym(",")?;
            self.scope.push(var.clone());
            let body = self.expr();
            self.scope.pop();
            let body = body?;
            self.expect_sym(")")?;
            let depth = coll.1.max(body.1) + 1;
            return self.node(Expr::Bind(func, var, Box::new(coll.0), Box::new(body.0)), depth);
        }
        let mut args = Vec::new();
        let mut depth = 0;
        if !self.is_sym(")") {
            loop {
                let (a, d) = self.expr()?;
                depth = depth.max(d);
                args.push(a);
                if self.is_sym(",") {
                    self.next();
                } else {
                    break;
                }
            }
        }
        self.expect_sym(")")?;
        if !func.arity().contains(&args.len()) {
            return Err(self.err(
                ParseErrorKind::Arity,
                span,
                format!("'{name}' takes {:?} argument(s), got {}", func.arity(), args.len()),
            ));
        }
        self.node(Expr::Call(func, args), depth + 1)
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(v) => format!("number {v}"),
        Tok::Ident(s) => format!("'{s}'"),
        Tok::Sym(s) => format!("'{s}'"),
        Tok::Eof => "end of input".into(),
    }
}

/// Parses `src` for `domain`, rejecting free variables other than the
/// domain's state-view names.
pub fn parse(src: &str, domain: DomainId) -> Result<Expr, ParseError> {
    let tokens = lex(src)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        domain,
        scope: domain_bindings(domain).iter().map(|s| s.to_string()).collect(),
        depth: 0,
        _src: src,
    };
    if matches!(p.peek().tok, Tok::Eof) {
        let span = p.peek().span;
        return Err(p.err(ParseErrorKind::Syntax, span, "empty program"));
    }
    let (e, _) = p.expr()?;
    if !matches!(p.peek().tok, Tok::Eof) {
        let t = p.peek().clone();
        return Err(p.err(ParseErrorKind::Syntax, t.span, format!("unexpected {} after expression", describe(&t.tok))));
    }
    Ok(e)
}
