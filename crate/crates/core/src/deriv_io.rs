//! Line-oriented text form of derivation trees (`.deriv` files).
//!
//! Nodes are written in pre-order. Each node is a fixed sequence of lines:
//!
//! ```text
//! node <rule name>
//! env <#env{..}>
//! clos <#clos{..}>
//! expr <expression>
//! result <value term>
//! chosen <i>                      (case nodes only)
//! skip <j> no_match|guard_false   (case nodes only, one per earlier clause)
//! premises <n>
//! ```
//!
//! followed by its children: one sub-tree per `guard_false` skip, then the
//! `n` premises. Blank lines and lines starting with `%` are ignored.
//! Reading does not recurse, so file depth is not limited by the stack.

use std::fmt::Write;

use thiserror::Error;

use crate::eval::{Assembler, DerivationNode, Rule, Shell, SkippedClause};
use crate::parser::{parse_clos, parse_env, parse_expr_term, parse_value};
use crate::printer::{clos_term, env_term, format_expr, value_term};

pub const HEADER: &str = "% core-erlang derivation";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct DerivError {
    pub line: usize,
    pub message: String,
}

pub fn write_derivation(d: &DerivationNode) -> String {
    let mut out = String::new();
    writeln!(out, "{HEADER}").unwrap();
    let mut stack = vec![d];
    while let Some(n) = stack.pop() {
        writeln!(out, "node {}", n.rule.name()).unwrap();
        writeln!(out, "env {}", env_term(&n.env)).unwrap();
        writeln!(out, "clos {}", clos_term(&n.clos)).unwrap();
        writeln!(out, "expr {}", format_expr(&n.expr)).unwrap();
        writeln!(out, "result {}", value_term(&n.result)).unwrap();
        if let Some(ev) = &n.case_evidence {
            writeln!(out, "chosen {}", ev.chosen).unwrap();
            for s in &ev.skipped {
                let why = match s {
                    SkippedClause::NoMatch(_) => "no_match",
                    SkippedClause::GuardFalse(..) => "guard_false",
                };
                writeln!(out, "skip {} {why}", s.index()).unwrap();
            }
        }
        writeln!(out, "premises {}", n.premises.len()).unwrap();
        let children: Vec<_> = n.children().collect();
        stack.extend(children.into_iter().rev());
    }
    out
}

struct Lines<'a> {
    inner: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn skip_blank(&mut self) {
        while let Some((_, l)) = self.inner.peek() {
            let t = l.trim();
            if t.is_empty() || t.starts_with('%') {
                self.inner.next();
            } else {
                break;
            }
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_blank();
        self.inner.peek().is_none()
    }

    fn peek_key(&mut self) -> Option<&'a str> {
        self.skip_blank();
        self.inner
            .peek()
            .map(|(_, l)| l.trim().split_once(' ').map_or(l.trim(), |(k, _)| k))
    }

    fn err(&self, message: impl Into<String>) -> DerivError {
        DerivError {
            line: self.last,
            message: message.into(),
        }
    }

    /// The text after `key ` on the next significant line.
    fn field(&mut self, key: &str) -> Result<&'a str, DerivError> {
        self.skip_blank();
        let Some((i, l)) = self.inner.next() else {
            self.last += 1;
            return Err(self.err(format!("expected '{key}', found end of input")));
        };
        self.last = i + 1;
        let l = l.trim();
        let (k, rest) = l.split_once(' ').unwrap_or((l, ""));
        if k != key {
            return Err(self.err(format!("expected '{key}', found '{k}'")));
        }
        Ok(rest.trim())
    }

    fn number(&mut self, key: &str) -> Result<usize, DerivError> {
        let text = self.field(key)?;
        text.parse()
            .map_err(|_| self.err(format!("'{key}' needs a count, found '{text}'")))
    }

    fn parsed<T, E: std::fmt::Display>(
        &mut self,
        key: &str,
        parse: impl Fn(&str) -> Result<T, E>,
    ) -> Result<T, DerivError> {
        let text = self.field(key)?;
        parse(text).map_err(|e| self.err(format!("bad {key}: {e}")))
    }
}

fn read_header(lines: &mut Lines<'_>) -> Result<Shell, DerivError> {
    let name = lines.field("node")?;
    let rule = Rule::from_name(name).ok_or_else(|| lines.err(format!("unknown rule '{name}'")))?;
    let env = lines.parsed("env", parse_env)?;
    let clos = lines.parsed("clos", parse_clos)?;
    let expr = lines.parsed("expr", parse_expr_term)?;
    let result = lines.parsed("result", parse_value)?;
    let mut chosen = None;
    let mut skips = Vec::new();
    if lines.peek_key() == Some("chosen") {
        chosen = Some(lines.number("chosen")?);
        while lines.peek_key() == Some("skip") {
            let text = lines.field("skip")?;
            let skip = match text.split_once(' ') {
                Some((j, "no_match")) => j.parse().ok().map(|j| (j, false)),
                Some((j, "guard_false")) => j.parse().ok().map(|j| (j, true)),
                _ => None,
            };
            skips.push(skip.ok_or_else(|| lines.err(format!("bad skip '{text}'")))?);
        }
    }
    let premises = lines.number("premises")?;
    Ok(Shell {
        node: DerivationNode {
            rule,
            env,
            clos,
            expr,
            result,
            premises: Vec::new(),
            case_evidence: None,
        },
        chosen,
        skips,
        premises,
    })
}

pub fn read_derivation(text: &str) -> Result<DerivationNode, DerivError> {
    let mut lines = Lines {
        inner: text.lines().enumerate().peekable(),
        last: 0,
    };
    let mut asm = Assembler::default();
    loop {
        if let Some(root) = asm.push(read_header(&mut lines)?) {
            if !lines.at_end() {
                lines.field("end of input")?;
            }
            return Ok(root);
        }
    }
}
