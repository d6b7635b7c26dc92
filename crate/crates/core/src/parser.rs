//! Concrete syntax front end.
//!
//! Grammar (one expression per source):
//!
//! ```text
//! expr    := 'fun' '(' vars ')' '->' expr
//!          | 'let' VAR '=' expr 'in' expr
//!          | 'let' '<' vars '>' '=' '<' exprs '>' 'in' expr
//!          | 'letrec' (ATOM '/' INT '=' 'fun' '(' vars ')' '->' expr ','?)* 'in' expr
//!          | 'case' expr 'of' (pat ('when' expr)? '->' expr)* 'end'
//!          | 'call' ATOM (':' ATOM)? '(' exprs ')'
//!          | 'apply' primary '(' exprs ')'
//!          | primary
//! primary := INT | ATOM | ATOM '/' INT | VAR | '(' expr ')'
//!          | '[' ']' | '[' exprs ('|' expr)? ']'
//!          | '{' '}' | '{' exprs '}' | '#tuple' '{' '}'
//!          | '~{' '}~' | '~{' expr '=>' expr (',' expr '=>' expr)* '}~' | '#map' '{' '}'
//! ```
//!
//! Bodies extend as far right as possible. `%` starts a line comment. The
//! module part of `call 'm':'f'(..)` is dropped. Atoms starting with `@` are
//! rejected in source text; they only appear in value terms.

use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::ast::{Clause, EnvKey, Expr, FunDef, FunId, Literal, Pattern, Var};
use crate::env::{ClosureEnv, Environment};
use crate::values::{ClosureRef, Value};

const RED_ZONE: usize = 64 * 1024;
const STACK_SEGMENT: usize = 1024 * 1024;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: expected {}, found {found}", expected.join(" or "))]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub expected: Vec<String>,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Atom(String),
    Var(String),
    Word(String),
    Hash(String),
    Punct(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "integer {n}"),
            Tok::Atom(a) => write!(f, "atom {}", crate::printer::quote_atom(a)),
            Tok::Var(v) => write!(f, "variable {v}"),
            Tok::Word(w) => write!(f, "'{w}'"),
            Tok::Hash(h) => write!(f, "'#{h}'"),
            Tok::Punct(p) => write!(f, "'{p}'"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

const KEYWORDS: &[&str] = &[
    "apply", "call", "case", "end", "fun", "in", "let", "letrec", "of", "when",
];

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |line, column, expected: &str, found: String| ParseError {
        line,
        column,
        expected: vec![expected.to_string()],
        found,
    };
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let peek = chars.get(i + 1).copied();
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            advance(1, &mut i, &mut col);
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                advance(1, &mut i, &mut col);
            }
            continue;
        }
        let tok = if c.is_ascii_digit() || (c == '-' && peek.is_some_and(|p| p.is_ascii_digit())) {
            let start = i;
            advance(1, &mut i, &mut col);
            while i < chars.len() && chars[i].is_ascii_digit() {
                advance(1, &mut i, &mut col);
            }
            let text: String = chars[start..i].iter().collect();
            Tok::Int(text.parse().expect("digits"))
        } else if c == '\'' {
            advance(1, &mut i, &mut col);
            let mut text = String::new();
            loop {
                match chars.get(i) {
                    None | Some('\n') => {
                        return Err(err(tl, tc, "closing quote", "end of line".into()))
                    }
                    Some('\'') => {
                        advance(1, &mut i, &mut col);
                        break;
                    }
                    Some('\\') => {
                        let e = match chars.get(i + 1) {
                            Some('\\') => '\\',
                            Some('\'') => '\'',
                            Some('n') => '\n',
                            Some('t') => '\t',
                            Some('r') => '\r',
                            other => {
                                return Err(err(
                                    line,
                                    col,
                                    "escape sequence",
                                    format!("{other:?}"),
                                ))
                            }
                        };
                        text.push(e);
                        advance(2, &mut i, &mut col);
                    }
                    Some(ch) => {
                        text.push(*ch);
                        advance(1, &mut i, &mut col);
                    }
                }
            }
            Tok::Atom(text)
        } else if c.is_alphabetic() || c == '_' || c == '#' {
            let start = i;
            advance(1, &mut i, &mut col);
            while i < chars.len()
                && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '@')
            {
                advance(1, &mut i, &mut col);
            }
            let text: String = chars[start..i].iter().collect();
            if let Some(h) = text.strip_prefix('#') {
                Tok::Hash(h.to_string())
            } else if c.is_uppercase() || c == '_' {
                Tok::Var(text)
            } else if KEYWORDS.contains(&text.as_str()) {
                Tok::Word(text)
            } else {
                return Err(err(tl, tc, "keyword, variable or quoted atom", text));
            }
        } else {
            let two: String = [Some(c), peek].iter().flatten().collect();
            let p: &'static str = match two.as_str() {
                "->" => "->",
                "=>" => "=>",
                "~{" => "~{",
                "}~" => "}~",
                _ => match c {
                    '(' => "(",
                    ')' => ")",
                    '{' => "{",
                    '}' => "}",
                    '[' => "[",
                    ']' => "]",
                    '<' => "<",
                    '>' => ">",
                    '|' => "|",
                    ',' => ",",
                    '=' => "=",
                    '/' => "/",
                    ':' => ":",
                    other => return Err(err(tl, tc, "token", format!("'{other}'"))),
                },
            };
            advance(p.len(), &mut i, &mut col);
            Tok::Punct(p)
        };
        out.push(Token {
            tok,
            line: tl,
            column: tc,
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    allow_reserved: bool,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn new(src: &str, allow_reserved: bool) -> PResult<Self> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
            allow_reserved,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: &[&str]) -> PResult<T> {
        let t = &self.toks[self.pos];
        Err(ParseError {
            line: t.line,
            column: t.column,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: t.tok.to_string(),
        })
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Word(q) if q == w)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        let hit = self.is_punct(p);
        if hit {
            self.bump();
        }
        hit
    }

    fn punct(&mut self, p: &'static str) -> PResult<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            self.error(&[&format!("'{p}'")])
        }
    }

    fn word(&mut self, w: &'static str) -> PResult<()> {
        if self.is_word(w) {
            self.bump();
            Ok(())
        } else {
            self.error(&[&format!("'{w}'")])
        }
    }

    fn end(&mut self) -> PResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.error(&["end of input"])
        }
    }

    fn atom(&mut self) -> PResult<String> {
        match self.peek() {
            Tok::Atom(a) => {
                if a.starts_with('@') && !self.allow_reserved {
                    return self.error(&["atom not starting with '@'"]);
                }
                let a = a.clone();
                self.bump();
                Ok(a)
            }
            _ => self.error(&["atom"]),
        }
    }

    fn var(&mut self) -> PResult<Var> {
        match self.peek() {
            Tok::Var(v) => {
                let v = v.clone();
                self.bump();
                Ok(v)
            }
            _ => self.error(&["variable"]),
        }
    }

    fn arity(&mut self) -> PResult<usize> {
        match self.peek() {
            Tok::Int(n) => match usize::try_from(n) {
                Ok(a) => {
                    self.bump();
                    Ok(a)
                }
                Err(_) => self.error(&["non-negative arity"]),
            },
            _ => self.error(&["arity"]),
        }
    }

    fn fun_id(&mut self) -> PResult<FunId> {
        let name = self.atom()?;
        self.punct("/")?;
        Ok(FunId::new(name, self.arity()?))
    }

    /// Comma-separated items up to (not including) `close`.
    fn seq<T>(&mut self, close: &str, mut item: impl FnMut(&mut Self) -> PResult<T>) -> PResult<Vec<T>> {
        let mut out = Vec::new();
        if self.is_punct(close) {
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            if !self.eat_punct(",") {
                return Ok(out);
            }
        }
    }

    fn vars(&mut self, close: &str) -> PResult<Vec<Var>> {
        self.seq(close, Self::var)
    }

    fn expr(&mut self) -> PResult<Expr> {
        stacker::maybe_grow(RED_ZONE, STACK_SEGMENT, || self.expr_inner())
    }

    fn expr_inner(&mut self) -> PResult<Expr> {
        let Tok::Word(w) = self.peek() else {
            return self.primary();
        };
        match w.as_str() {
            "fun" => {
                self.bump();
                self.punct("(")?;
                let params = self.vars(")")?;
                self.punct(")")?;
                self.punct("->")?;
                Ok(Expr::fun(params, self.expr()?))
            }
            "let" => {
                self.bump();
                let (vars, binds) = if self.eat_punct("<") {
                    let vars = self.vars(">")?;
                    self.punct(">")?;
                    self.punct("=")?;
                    self.punct("<")?;
                    let binds = self.seq(">", Self::expr)?;
                    self.punct(">")?;
                    (vars, binds)
                } else {
                    let v = self.var()?;
                    self.punct("=")?;
                    (vec![v], vec![self.expr()?])
                };
                self.word("in")?;
                Ok(Expr::let_in(vars, binds, self.expr()?))
            }
            "letrec" => {
                self.bump();
                let mut fnames = Vec::new();
                let mut funs = Vec::new();
                while matches!(self.peek(), Tok::Atom(_)) {
                    fnames.push(self.fun_id()?);
                    self.punct("=")?;
                    self.word("fun")?;
                    self.punct("(")?;
                    let params = self.vars(")")?;
                    self.punct(")")?;
                    self.punct("->")?;
                    funs.push(FunDef::new(params, self.expr()?));
                    self.eat_punct(",");
                }
                if !self.is_word("in") {
                    return self.error(&["function name", "'in'"]);
                }
                self.bump();
                Ok(Expr::letrec(fnames, funs, self.expr()?))
            }
            "case" => {
                self.bump();
                let scrutinee = self.expr()?;
                self.word("of")?;
                let mut clauses = Vec::new();
                while !self.is_word("end") {
                    let pattern = self.pattern()?;
                    let guard = if self.is_word("when") {
                        self.bump();
                        self.expr()?
                    } else {
                        Expr::atom("true")
                    };
                    if !self.is_punct("->") {
                        return self.error(&["'when'", "'->'"]);
                    }
                    self.bump();
                    clauses.push(Clause::new(pattern, guard, self.expr()?));
                }
                self.bump();
                Ok(Expr::case(scrutinee, clauses))
            }
            "call" => {
                self.bump();
                let mut fname = self.atom()?;
                if self.eat_punct(":") {
                    fname = self.atom()?;
                }
                Ok(Expr::call(fname, self.args()?))
            }
            "apply" => {
                self.bump();
                let target = self.primary()?;
                Ok(Expr::apply(target, self.args()?))
            }
            _ => self.error(&["expression"]),
        }
    }

    fn args(&mut self) -> PResult<Vec<Expr>> {
        self.punct("(")?;
        let args = self.seq(")", Self::expr)?;
        self.punct(")")?;
        Ok(args)
    }

    fn primary(&mut self) -> PResult<Expr> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::Literal(Literal::Integer(n)))
            }
            Tok::Atom(_) => {
                let a = self.atom()?;
                if self.eat_punct("/") {
                    Ok(Expr::FunSig(FunId::new(a, self.arity()?)))
                } else {
                    Ok(Expr::Literal(Literal::Atom(a)))
                }
            }
            Tok::Var(v) => {
                self.bump();
                Ok(Expr::Var(v))
            }
            Tok::Hash(h) if h == "tuple" || h == "map" => {
                self.bump();
                self.punct("{")?;
                self.punct("}")?;
                Ok(if h == "tuple" {
                    Expr::Tuple(vec![])
                } else {
                    Expr::Map(vec![], vec![])
                })
            }
            Tok::Punct("(") => {
                self.bump();
                let e = self.expr()?;
                self.punct(")")?;
                Ok(e)
            }
            Tok::Punct("[") => {
                self.bump();
                if self.eat_punct("]") {
                    return Ok(Expr::Literal(Literal::EmptyList));
                }
                let items = self.seq("]", Self::expr)?;
                let tail = if self.eat_punct("|") {
                    self.expr()?
                } else {
                    Expr::Literal(Literal::EmptyList)
                };
                self.punct("]")?;
                Ok(items.into_iter().rev().fold(tail, |t, h| Expr::list(h, t)))
            }
            Tok::Punct("{") => {
                self.bump();
                if self.eat_punct("}") {
                    return Ok(Expr::Literal(Literal::EmptyTuple));
                }
                let items = self.seq("}", Self::expr)?;
                self.punct("}")?;
                Ok(Expr::Tuple(items))
            }
            Tok::Punct("~{") => {
                self.bump();
                if self.eat_punct("}~") {
                    return Ok(Expr::Literal(Literal::EmptyMap));
                }
                let pairs = self.seq("}~", |p| {
                    let k = p.expr()?;
                    p.punct("=>")?;
                    Ok((k, p.expr()?))
                })?;
                self.punct("}~")?;
                let (keys, vals) = pairs.into_iter().unzip();
                Ok(Expr::Map(keys, vals))
            }
            _ => self.error(&["expression"]),
        }
    }

    fn pattern(&mut self) -> PResult<Pattern> {
        stacker::maybe_grow(RED_ZONE, STACK_SEGMENT, || self.pattern_inner())
    }

    fn pattern_inner(&mut self) -> PResult<Pattern> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Pattern::Literal(Literal::Integer(n)))
            }
            Tok::Atom(_) => Ok(Pattern::Literal(Literal::Atom(self.atom()?))),
            Tok::Var(v) => {
                self.bump();
                Ok(Pattern::Var(v))
            }
            Tok::Hash(h) if h == "tuple" => {
                self.bump();
                self.punct("{")?;
                self.punct("}")?;
                Ok(Pattern::Tuple(vec![]))
            }
            Tok::Punct("[") => {
                self.bump();
                if self.eat_punct("]") {
                    return Ok(Pattern::Literal(Literal::EmptyList));
                }
                let items = self.seq("]", Self::pattern)?;
                let tail = if self.eat_punct("|") {
                    self.pattern()?
                } else {
                    Pattern::Literal(Literal::EmptyList)
                };
                self.punct("]")?;
                Ok(items.into_iter().rev().fold(tail, |t, h| Pattern::list(h, t)))
            }
            Tok::Punct("{") => {
                self.bump();
                if self.eat_punct("}") {
                    return Ok(Pattern::Literal(Literal::EmptyTuple));
                }
                let items = self.seq("}", Self::pattern)?;
                self.punct("}")?;
                Ok(Pattern::Tuple(items))
            }
            Tok::Punct("~{") => {
                self.bump();
                self.punct("}~")?;
                Ok(Pattern::Literal(Literal::EmptyMap))
            }
            _ => self.error(&["pattern"]),
        }
    }

    fn value(&mut self) -> PResult<Value> {
        stacker::maybe_grow(RED_ZONE, STACK_SEGMENT, || self.value_inner())
    }

    fn value_inner(&mut self) -> PResult<Value> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Value::Literal(Literal::Integer(n)))
            }
            Tok::Atom(_) => Ok(Value::Literal(Literal::Atom(self.atom()?))),
            Tok::Hash(h) if h == "tuple" || h == "map" => {
                self.bump();
                self.punct("{")?;
                self.punct("}")?;
                Ok(if h == "tuple" {
                    Value::Tuple(vec![])
                } else {
                    Value::Map(vec![], vec![])
                })
            }
            Tok::Hash(h) if h == "closure" => {
                self.bump();
                self.punct("(")?;
                let r = if matches!(self.peek(), Tok::Hash(h) if h == "env") {
                    ClosureRef::Concrete(self.env()?)
                } else {
                    ClosureRef::Named(self.fun_id()?)
                };
                self.punct(",")?;
                self.punct("[")?;
                let params = self.vars("]")?;
                self.punct("]")?;
                self.punct(",")?;
                let body = self.expr()?;
                self.punct(")")?;
                Ok(Value::closure(r, params, body))
            }
            Tok::Punct("[") => {
                self.bump();
                if self.eat_punct("]") {
                    return Ok(Value::Literal(Literal::EmptyList));
                }
                let items = self.seq("]", Self::value)?;
                let tail = if self.eat_punct("|") {
                    self.value()?
                } else {
                    Value::Literal(Literal::EmptyList)
                };
                self.punct("]")?;
                Ok(items.into_iter().rev().fold(tail, |t, h| Value::list(h, t)))
            }
            Tok::Punct("{") => {
                self.bump();
                if self.eat_punct("}") {
                    return Ok(Value::Literal(Literal::EmptyTuple));
                }
                let items = self.seq("}", Self::value)?;
                self.punct("}")?;
                Ok(Value::Tuple(items))
            }
            Tok::Punct("~{") => {
                self.bump();
                if self.eat_punct("}~") {
                    return Ok(Value::Literal(Literal::EmptyMap));
                }
                let pairs = self.seq("}~", |p| {
                    let k = p.value()?;
                    p.punct("=>")?;
                    Ok((k, p.value()?))
                })?;
                self.punct("}~")?;
                let (keys, vals) = pairs.into_iter().unzip();
                Ok(Value::Map(keys, vals))
            }
            _ => self.error(&["value"]),
        }
    }

    fn env_key(&mut self) -> PResult<EnvKey> {
        match self.peek() {
            Tok::Var(_) => Ok(EnvKey::Var(self.var()?)),
            Tok::Atom(_) => Ok(EnvKey::FunId(self.fun_id()?)),
            _ => self.error(&["variable", "function identifier"]),
        }
    }

    fn env(&mut self) -> PResult<Environment> {
        match self.peek() {
            Tok::Hash(h) if h == "env" => {
                self.bump();
            }
            _ => return self.error(&["'#env'"]),
        }
        self.punct("{")?;
        let entries = self.seq("}", |p| {
            let k = p.env_key()?;
            p.punct("=>")?;
            Ok((k, p.value()?))
        })?;
        self.punct("}")?;
        Ok(entries.into_iter().collect())
    }

    fn clos(&mut self) -> PResult<ClosureEnv> {
        match self.peek() {
            Tok::Hash(h) if h == "clos" => {
                self.bump();
            }
            _ => return self.error(&["'#clos'"]),
        }
        self.punct("{")?;
        let entries = self.seq("}", |p| {
            let k = p.fun_id()?;
            p.punct("=>")?;
            Ok((k, p.env()?))
        })?;
        self.punct("}")?;
        Ok(entries.into_iter().collect())
    }
}

/// Parses one source expression.
pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser::new(src, false)?;
    let e = p.expr()?;
    p.end()?;
    Ok(e)
}

/// Parses a value in the lossless term form of [`crate::printer::value_term`].
pub fn parse_value(src: &str) -> Result<Value, ParseError> {
    let mut p = Parser::new(src, true)?;
    let v = p.value()?;
    p.end()?;
    Ok(v)
}

/// Parses `#env{Key => value, ..}`.
pub fn parse_env(src: &str) -> Result<Environment, ParseError> {
    let mut p = Parser::new(src, true)?;
    let e = p.env()?;
    p.end()?;
    Ok(e)
}

/// Parses `#clos{'f'/n => #env{..}, ..}`.
pub fn parse_clos(src: &str) -> Result<ClosureEnv, ParseError> {
    let mut p = Parser::new(src, true)?;
    let c = p.clos()?;
    p.end()?;
    Ok(c)
}

/// Parses an expression that may mention reserved `@` atoms, as found
/// inside derivation files.
pub fn parse_expr_term(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser::new(src, true)?;
    let e = p.expr()?;
    p.end()?;
    Ok(e)
}
