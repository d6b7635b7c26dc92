//! Canonical text forms.
//!
//! [`format_expr`] output is accepted by [`crate::parser::parse_expr`] and
//! parses back to the same tree. Values have two renderings: a short one for
//! people ([`value_short`]) and a lossless one ([`value_term`]) that
//! [`crate::parser::parse_value`] reads back, used in derivation files.
//!
//! Empty `ETuple`/`EMap`/`PTuple` nodes (and the values they produce) are
//! distinct from the `{}`/`~{}~` literals and are written `#tuple{}` and
//! `#map{}`.

use std::fmt::Write;

use crate::ast::{Clause, Expr, FunId, Literal, Pattern};
use crate::env::{ClosureEnv, Environment};
use crate::values::{ClosureRef, Value};

pub fn quote_atom(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('\'');
    for c in text.chars() {
        match c {
            '\'' => out.push_str("\\'"),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out.push('\'');
    out
}

fn literal(out: &mut String, l: &Literal) {
    match l {
        Literal::Atom(a) => out.push_str(&quote_atom(a)),
        Literal::Integer(n) => write!(out, "{n}").unwrap(),
        Literal::EmptyList => out.push_str("[]"),
        Literal::EmptyTuple => out.push_str("{}"),
        Literal::EmptyMap => out.push_str("~{}~"),
    }
}

fn fun_id(out: &mut String, fid: &FunId) {
    write!(out, "{fid}").unwrap();
}

fn sep<T>(out: &mut String, items: &[T], mut each: impl FnMut(&mut String, &T)) {
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        each(out, item);
    }
}

pub fn format_expr(e: &Expr) -> String {
    let mut out = String::new();
    expr(&mut out, e);
    out
}

pub fn format_pattern(p: &Pattern) -> String {
    let mut out = String::new();
    pattern(&mut out, p);
    out
}

fn pattern(out: &mut String, p: &Pattern) {
    stacker::maybe_grow(RED_ZONE, STACK_SEGMENT, || pattern_inner(out, p))
}

fn pattern_inner(out: &mut String, p: &Pattern) {
    match p {
        Pattern::Var(v) => out.push_str(v),
        Pattern::Literal(l) => literal(out, l),
        Pattern::List(h, t) => {
            out.push('[');
            pattern(out, h);
            out.push('|');
            pattern(out, t);
            out.push(']');
        }
        Pattern::Tuple(ps) if ps.is_empty() => out.push_str("#tuple{}"),
        Pattern::Tuple(ps) => {
            out.push('{');
            sep(out, ps, |o, p| pattern(o, p));
            out.push('}');
        }
    }
}

fn names(out: &mut String, vs: &[String]) {
    sep(out, vs, |o, v| o.push_str(v));
}

const RED_ZONE: usize = 32 * 1024;
const STACK_SEGMENT: usize = 1024 * 1024;

fn expr(out: &mut String, e: &Expr) {
    stacker::maybe_grow(RED_ZONE, STACK_SEGMENT, || expr_inner(out, e))
}

fn expr_inner(out: &mut String, e: &Expr) {
    match e {
        Expr::Literal(l) => literal(out, l),
        Expr::Var(v) => out.push_str(v),
        Expr::FunSig(fid) => fun_id(out, fid),
        Expr::Fun(params, body) => {
            out.push_str("fun(");
            names(out, params);
            out.push_str(") -> ");
            expr(out, body);
        }
        Expr::List(h, t) => {
            out.push('[');
            expr(out, h);
            out.push('|');
            expr(out, t);
            out.push(']');
        }
        Expr::Tuple(es) if es.is_empty() => out.push_str("#tuple{}"),
        Expr::Tuple(es) => {
            out.push('{');
            sep(out, es, |o, e| expr(o, e));
            out.push('}');
        }
        Expr::Call(f, args) => {
            out.push_str("call ");
            out.push_str(&quote_atom(f));
            args_list(out, args);
        }
        Expr::Apply(target, args) => {
            out.push_str("apply ");
            match &**target {
                Expr::Var(_) | Expr::FunSig(_) => expr(out, target),
                _ => {
                    out.push('(');
                    expr(out, target);
                    out.push(')');
                }
            }
            args_list(out, args);
        }
        Expr::Case(scrutinee, clauses) => {
            out.push_str("case ");
            expr(out, scrutinee);
            out.push_str(" of");
            for Clause {
                pattern: p,
                guard,
                body,
            } in clauses
            {
                out.push(' ');
                pattern(out, p);
                out.push_str(" when ");
                expr(out, guard);
                out.push_str(" -> ");
                expr(out, body);
            }
            out.push_str(" end");
        }
        Expr::Let(vars, binds, body) => {
            out.push_str("let ");
            if let ([v], [b]) = (vars.as_slice(), binds.as_slice()) {
                out.push_str(v);
                out.push_str(" = ");
                expr(out, b);
            } else {
                out.push('<');
                names(out, vars);
                out.push_str("> = <");
                sep(out, binds, |o, e| expr(o, e));
                out.push('>');
            }
            out.push_str(" in ");
            expr(out, body);
        }
        Expr::Letrec(fnames, funs, body) => {
            out.push_str("letrec ");
            let defs: Vec<_> = fnames.iter().zip(funs).collect();
            sep(out, &defs, |o, (fid, def)| {
                fun_id(o, fid);
                o.push_str(" = fun(");
                names(o, &def.params);
                o.push_str(") -> ");
                expr(o, &def.body);
            });
            if !defs.is_empty() {
                out.push(' ');
            }
            out.push_str("in ");
            expr(out, body);
        }
        Expr::Map(keys, vals) if keys.is_empty() && vals.is_empty() => out.push_str("#map{}"),
        Expr::Map(keys, vals) => {
            out.push_str("~{");
            let pairs: Vec<_> = keys.iter().zip(vals).collect();
            sep(out, &pairs, |o, (k, v)| {
                expr(o, k);
                o.push_str(" => ");
                expr(o, v);
            });
            out.push_str("}~");
        }
    }
}

fn args_list(out: &mut String, args: &[Expr]) {
    out.push('(');
    sep(out, args, |o, e| expr(o, e));
    out.push(')');
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Short,
    Term,
}

pub fn value_short(v: &Value) -> String {
    let mut out = String::new();
    value(&mut out, v, Mode::Short);
    out
}

pub fn value_term(v: &Value) -> String {
    let mut out = String::new();
    value(&mut out, v, Mode::Term);
    out
}

pub fn env_term(env: &Environment) -> String {
    let mut out = String::new();
    env_into(&mut out, env);
    out
}

pub fn clos_term(clos: &ClosureEnv) -> String {
    let mut out = String::from("#clos{");
    let entries: Vec<_> = clos.iter().collect();
    sep(&mut out, &entries, |o, (fid, env)| {
        fun_id(o, fid);
        o.push_str(" => ");
        env_into(o, env);
    });
    out.push('}');
    out
}

fn env_into(out: &mut String, env: &Environment) {
    out.push_str("#env{");
    let entries: Vec<_> = env.iter().collect();
    sep(out, &entries, |o, (k, v)| {
        write!(o, "{k} => ").unwrap();
        value(o, v, Mode::Term);
    });
    out.push('}');
}

fn value(out: &mut String, v: &Value, mode: Mode) {
    stacker::maybe_grow(RED_ZONE, STACK_SEGMENT, || value_inner(out, v, mode))
}

fn value_inner(out: &mut String, v: &Value, mode: Mode) {
    match v {
        Value::Literal(l) => literal(out, l),
        Value::Closure { env, params, body } => match mode {
            Mode::Short => {
                out.push_str("#closure<");
                out.push_str(&params.join(","));
                out.push_str(">/");
                match env {
                    ClosureRef::Concrete(_) => out.push_str("env"),
                    ClosureRef::Named(fid) => fun_id(out, fid),
                }
            }
            Mode::Term => {
                out.push_str("#closure(");
                match env {
                    ClosureRef::Concrete(e) => env_into(out, e),
                    ClosureRef::Named(fid) => fun_id(out, fid),
                }
                out.push_str(", [");
                names(out, params);
                out.push_str("], ");
                expr(out, body);
                out.push(')');
            }
        },
        Value::List(h, t) => {
            out.push('[');
            value(out, h, mode);
            out.push('|');
            value(out, t, mode);
            out.push(']');
        }
        Value::Tuple(vs) if vs.is_empty() => out.push_str("#tuple{}"),
        Value::Tuple(vs) => {
            out.push('{');
            sep(out, vs, |o, v| value(o, v, mode));
            out.push('}');
        }
        Value::Map(ks, vs) if ks.is_empty() && vs.is_empty() => out.push_str("#map{}"),
        Value::Map(ks, vs) => {
            out.push_str("~{");
            let pairs: Vec<_> = ks.iter().zip(vs).collect();
            sep(out, &pairs, |o, (k, v)| {
                value(o, k, mode);
                o.push_str(" => ");
                value(o, v, mode);
            });
            out.push_str("}~");
        }
    }
}
