//! Abstract syntax of the sequential Core Erlang subset.
//!
//! Expressions, patterns and clauses are plain immutable trees. Structural
//! constraints that the constructors cannot express (matching list lengths,
//! linear patterns, distinct parameters) are reported by [`well_formed`].

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;

/// Variable names are arbitrary non-empty strings at this level.
pub type Var = String;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Literal {
    Atom(String),
    Integer(BigInt),
    EmptyList,
    EmptyTuple,
    EmptyMap,
}

impl Literal {
    pub fn atom(text: impl Into<String>) -> Self {
        Literal::Atom(text.into())
    }

    pub fn int(n: impl Into<BigInt>) -> Self {
        Literal::Integer(n.into())
    }
}

/// A function name paired with its arity, written `'f'/n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FunId {
    pub name: String,
    pub arity: usize,
}

impl FunId {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        FunId {
            name: name.into(),
            arity,
        }
    }
}

impl fmt::Display for FunId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", crate::printer::quote_atom(&self.name), self.arity)
    }
}

/// Key of an environment binding: either a variable or a function identifier.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EnvKey {
    Var(Var),
    FunId(FunId),
}

impl EnvKey {
    pub fn var(name: impl Into<String>) -> Self {
        EnvKey::Var(name.into())
    }
}

impl fmt::Display for EnvKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnvKey::Var(v) => f.write_str(v),
            EnvKey::FunId(fid) => fid.fmt(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Pattern {
    Var(Var),
    Literal(Literal),
    List(Box<Pattern>, Box<Pattern>),
    Tuple(Vec<Pattern>),
}

impl Pattern {
    pub fn var(name: impl Into<String>) -> Self {
        Pattern::Var(name.into())
    }

    pub fn list(head: Pattern, tail: Pattern) -> Self {
        Pattern::List(Box::new(head), Box::new(tail))
    }

    /// Variables of the pattern in left-to-right order, duplicates included.
    pub fn variables(&self) -> Vec<&Var> {
        let mut out = Vec::new();
        self.collect_variables(&mut out);
        out
    }

    fn collect_variables<'a>(&'a self, out: &mut Vec<&'a Var>) {
        match self {
            Pattern::Var(v) => out.push(v),
            Pattern::Literal(_) => {}
            Pattern::List(hd, tl) => {
                hd.collect_variables(out);
                tl.collect_variables(out);
            }
            Pattern::Tuple(ps) => ps.iter().for_each(|p| p.collect_variables(out)),
        }
    }
}

/// A parameter list and body, as bound by `letrec`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FunDef {
    pub params: Vec<Var>,
    pub body: Expr,
}

impl FunDef {
    pub fn new(params: Vec<Var>, body: Expr) -> Self {
        FunDef { params, body }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    pub pattern: Pattern,
    pub guard: Expr,
    pub body: Expr,
}

impl Clause {
    pub fn new(pattern: Pattern, guard: Expr, body: Expr) -> Self {
        Clause {
            pattern,
            guard,
            body,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Literal(Literal),
    Var(Var),
    FunSig(FunId),
    Fun(Vec<Var>, Box<Expr>),
    List(Box<Expr>, Box<Expr>),
    Tuple(Vec<Expr>),
    Call(String, Vec<Expr>),
    Apply(Box<Expr>, Vec<Expr>),
    Case(Box<Expr>, Vec<Clause>),
    Let(Vec<Var>, Vec<Expr>, Box<Expr>),
    Letrec(Vec<FunId>, Vec<FunDef>, Box<Expr>),
    Map(Vec<Expr>, Vec<Expr>),
}

impl Expr {
    pub fn int(n: impl Into<BigInt>) -> Self {
        Expr::Literal(Literal::int(n))
    }

    pub fn atom(text: impl Into<String>) -> Self {
        Expr::Literal(Literal::atom(text))
    }

    pub fn var(name: impl Into<String>) -> Self {
        Expr::Var(name.into())
    }

    pub fn fun_sig(name: impl Into<String>, arity: usize) -> Self {
        Expr::FunSig(FunId::new(name, arity))
    }

    pub fn fun(params: Vec<Var>, body: Expr) -> Self {
        Expr::Fun(params, Box::new(body))
    }

    pub fn list(head: Expr, tail: Expr) -> Self {
        Expr::List(Box::new(head), Box::new(tail))
    }

    pub fn call(fname: impl Into<String>, args: Vec<Expr>) -> Self {
        Expr::Call(fname.into(), args)
    }

    pub fn apply(target: Expr, args: Vec<Expr>) -> Self {
        Expr::Apply(Box::new(target), args)
    }

    pub fn case(scrutinee: Expr, clauses: Vec<Clause>) -> Self {
        Expr::Case(Box::new(scrutinee), clauses)
    }

    pub fn let_in(vars: Vec<Var>, binds: Vec<Expr>, body: Expr) -> Self {
        Expr::Let(vars, binds, Box::new(body))
    }

    /// `let Var = bind in body`
    pub fn let1(var: impl Into<String>, bind: Expr, body: Expr) -> Self {
        Expr::Let(vec![var.into()], vec![bind], Box::new(body))
    }

    pub fn letrec(fnames: Vec<FunId>, funs: Vec<FunDef>, body: Expr) -> Self {
        Expr::Letrec(fnames, funs, Box::new(body))
    }

    /// Short constructor name, used in diagnostics and derivation checks.
    pub fn kind(&self) -> &'static str {
        match self {
            Expr::Literal(_) => "literal",
            Expr::Var(_) => "var",
            Expr::FunSig(_) => "funsig",
            Expr::Fun(..) => "fun",
            Expr::List(..) => "list",
            Expr::Tuple(_) => "tuple",
            Expr::Call(..) => "call",
            Expr::Apply(..) => "apply",
            Expr::Case(..) => "case",
            Expr::Let(..) => "let",
            Expr::Letrec(..) => "letrec",
            Expr::Map(..) => "map",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Construct {
    Let,
    Letrec,
    Map,
}

impl fmt::Display for Construct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Construct::Let => "let",
            Construct::Letrec => "letrec",
            Construct::Map => "map",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiagnosticKind {
    /// The two parallel lists of a `let`, `letrec` or map differ in length.
    LengthMismatch {
        construct: Construct,
        left: usize,
        right: usize,
    },
    /// The i-th `letrec` function has a parameter count other than its declared arity.
    ArityMismatch { fid: FunId, params: usize },
    DuplicateParameter(Var),
    NonLinearPattern(Var),
    EmptyName,
}

impl DiagnosticKind {
    pub fn code(&self) -> &'static str {
        match self {
            DiagnosticKind::LengthMismatch { .. } => "LengthMismatch",
            DiagnosticKind::ArityMismatch { .. } => "ArityMismatch",
            DiagnosticKind::DuplicateParameter(_) => "DuplicateParameter",
            DiagnosticKind::NonLinearPattern(_) => "NonLinearPattern",
            DiagnosticKind::EmptyName => "EmptyName",
        }
    }
}

/// A structural problem found by [`well_formed`].
///
/// `path` lists child positions from the root. Child numbering per
/// constructor: list `[hd, tl]`; tuple, call args and map keys/values in
/// order (keys first); apply `[target, args..]`; case `[scrutinee, guard0,
/// body0, guard1, body1, ..]`; let `[binds.., body]`; letrec `[fun bodies..,
/// body]`; fun `[body]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub path: Vec<usize>,
    pub kind: DiagnosticKind,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at ", self.kind.code())?;
        if self.path.is_empty() {
            f.write_str("root")?;
        } else {
            let parts: Vec<String> = self.path.iter().map(|i| i.to_string()).collect();
            write!(f, "/{}", parts.join("/"))?;
        }
        match &self.kind {
            DiagnosticKind::LengthMismatch {
                construct,
                left,
                right,
            } => write!(f, ": {construct} has {left} names but {right} expressions"),
            DiagnosticKind::ArityMismatch { fid, params } => {
                write!(f, ": {fid} defined with {params} parameters")
            }
            DiagnosticKind::DuplicateParameter(v) => write!(f, ": parameter {v} repeated"),
            DiagnosticKind::NonLinearPattern(v) => write!(f, ": pattern variable {v} repeated"),
            DiagnosticKind::EmptyName => f.write_str(": empty atom, variable or function name"),
        }
    }
}

/// Checks every structural invariant of `e` recursively. Never evaluates.
pub fn well_formed(e: &Expr) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut path = Vec::new();
    check_expr(e, &mut path, &mut out);
    out
}

fn report(out: &mut Vec<Diagnostic>, path: &[usize], kind: DiagnosticKind) {
    out.push(Diagnostic {
        path: path.to_vec(),
        kind,
    });
}

fn check_literal(l: &Literal, path: &[usize], out: &mut Vec<Diagnostic>) {
    if let Literal::Atom(a) = l {
        if a.is_empty() {
            report(out, path, DiagnosticKind::EmptyName);
        }
    }
}

fn check_names<'a>(
    names: impl IntoIterator<Item = &'a Var>,
    path: &[usize],
    out: &mut Vec<Diagnostic>,
    dup: fn(Var) -> DiagnosticKind,
) {
    let mut seen = BTreeSet::new();
    for n in names {
        if n.is_empty() {
            report(out, path, DiagnosticKind::EmptyName);
        }
        if !seen.insert(n) {
            report(out, path, dup(n.clone()));
        }
    }
}

fn check_pattern(p: &Pattern, path: &[usize], out: &mut Vec<Diagnostic>) {
    check_names(p.variables(), path, out, DiagnosticKind::NonLinearPattern);
    let mut stack = vec![p];
    while let Some(p) = stack.pop() {
        match p {
            Pattern::Var(_) => {}
            Pattern::Literal(l) => check_literal(l, path, out),
            Pattern::List(hd, tl) => {
                stack.push(tl);
                stack.push(hd);
            }
            Pattern::Tuple(ps) => stack.extend(ps.iter().rev()),
        }
    }
}

fn check_child(e: &Expr, index: usize, path: &mut Vec<usize>, out: &mut Vec<Diagnostic>) {
    path.push(index);
    check_expr(e, path, out);
    path.pop();
}

fn check_expr(e: &Expr, path: &mut Vec<usize>, out: &mut Vec<Diagnostic>) {
    match e {
        Expr::Literal(l) => check_literal(l, path, out),
        Expr::Var(v) => {
            if v.is_empty() {
                report(out, path, DiagnosticKind::EmptyName);
            }
        }
        Expr::FunSig(fid) => {
            if fid.name.is_empty() {
                report(out, path, DiagnosticKind::EmptyName);
            }
        }
        Expr::Fun(params, body) => {
            check_names(params, path, out, DiagnosticKind::DuplicateParameter);
            check_child(body, 0, path, out);
        }
        Expr::List(hd, tl) => {
            check_child(hd, 0, path, out);
            check_child(tl, 1, path, out);
        }
        Expr::Tuple(es) | Expr::Call(_, es) => {
            if let Expr::Call(f, _) = e {
                if f.is_empty() {
                    report(out, path, DiagnosticKind::EmptyName);
                }
            }
            for (i, c) in es.iter().enumerate() {
                check_child(c, i, path, out);
            }
        }
        Expr::Apply(target, args) => {
            check_child(target, 0, path, out);
            for (i, c) in args.iter().enumerate() {
                check_child(c, i + 1, path, out);
            }
        }
        Expr::Case(scrutinee, clauses) => {
            check_child(scrutinee, 0, path, out);
            for (k, clause) in clauses.iter().enumerate() {
                check_pattern(&clause.pattern, path, out);
                check_child(&clause.guard, 1 + 2 * k, path, out);
                check_child(&clause.body, 2 + 2 * k, path, out);
            }
        }
        Expr::Let(vars, binds, body) => {
            if vars.len() != binds.len() {
                report(
                    out,
                    path,
                    DiagnosticKind::LengthMismatch {
                        construct: Construct::Let,
                        left: vars.len(),
                        right: binds.len(),
                    },
                );
            }
            if vars.iter().any(String::is_empty) {
                report(out, path, DiagnosticKind::EmptyName);
            }
            for (i, c) in binds.iter().enumerate() {
                check_child(c, i, path, out);
            }
            check_child(body, binds.len(), path, out);
        }
        Expr::Letrec(fnames, funs, body) => {
            if fnames.len() != funs.len() {
                report(
                    out,
                    path,
                    DiagnosticKind::LengthMismatch {
                        construct: Construct::Letrec,
                        left: fnames.len(),
                        right: funs.len(),
                    },
                );
            }
            for (fid, def) in fnames.iter().zip(funs) {
                if fid.name.is_empty() {
                    report(out, path, DiagnosticKind::EmptyName);
                }
                if def.params.len() != fid.arity {
                    report(
                        out,
                        path,
                        DiagnosticKind::ArityMismatch {
                            fid: fid.clone(),
                            params: def.params.len(),
                        },
                    );
                }
            }
            for (i, def) in funs.iter().enumerate() {
                check_names(&def.params, path, out, DiagnosticKind::DuplicateParameter);
                check_child(&def.body, i, path, out);
            }
            check_child(body, funs.len(), path, out);
        }
        Expr::Map(keys, values) => {
            if keys.len() != values.len() {
                report(
                    out,
                    path,
                    DiagnosticKind::LengthMismatch {
                        construct: Construct::Map,
                        left: keys.len(),
                        right: values.len(),
                    },
                );
            }
            for (i, c) in keys.iter().chain(values).enumerate() {
                check_child(c, i, path, out);
            }
        }
    }
}

/// Identifiers referenced but not bound within `e`.
pub fn free_variables(e: &Expr) -> BTreeSet<EnvKey> {
    let mut out = BTreeSet::new();
    collect_free(e, &mut Vec::new(), &mut out);
    out
}

fn collect_free(e: &Expr, bound: &mut Vec<EnvKey>, out: &mut BTreeSet<EnvKey>) {
    let mut note = |key: EnvKey, bound: &Vec<EnvKey>| {
        if !bound.contains(&key) {
            out.insert(key);
        }
    };
    match e {
        Expr::Literal(_) => {}
        Expr::Var(v) => note(EnvKey::Var(v.clone()), bound),
        Expr::FunSig(fid) => note(EnvKey::FunId(fid.clone()), bound),
        Expr::Fun(params, body) => {
            with_bound(bound, params.iter().cloned().map(EnvKey::Var), |b| {
                collect_free(body, b, out)
            });
        }
        Expr::List(hd, tl) => {
            collect_free(hd, bound, out);
            collect_free(tl, bound, out);
        }
        Expr::Tuple(es) | Expr::Call(_, es) => es.iter().for_each(|c| collect_free(c, bound, out)),
        Expr::Apply(target, args) => {
            collect_free(target, bound, out);
            args.iter().for_each(|c| collect_free(c, bound, out));
        }
        Expr::Case(scrutinee, clauses) => {
            collect_free(scrutinee, bound, out);
            for clause in clauses {
                let vars = clause.pattern.variables().into_iter().cloned().map(EnvKey::Var);
                with_bound(bound, vars, |b| {
                    collect_free(&clause.guard, b, out);
                    collect_free(&clause.body, b, out);
                });
            }
        }
        Expr::Let(vars, binds, body) => {
            binds.iter().for_each(|c| collect_free(c, bound, out));
            with_bound(bound, vars.iter().cloned().map(EnvKey::Var), |b| {
                collect_free(body, b, out)
            });
        }
        Expr::Letrec(fnames, funs, body) => {
            with_bound(bound, fnames.iter().cloned().map(EnvKey::FunId), |b| {
                for def in funs {
                    with_bound(b, def.params.iter().cloned().map(EnvKey::Var), |b| {
                        collect_free(&def.body, b, out)
                    });
                }
                collect_free(body, b, out);
            });
        }
        Expr::Map(keys, values) => keys
            .iter()
            .chain(values)
            .for_each(|c| collect_free(c, bound, out)),
    }
}

fn with_bound(
    bound: &mut Vec<EnvKey>,
    keys: impl Iterator<Item = EnvKey>,
    f: impl FnOnce(&mut Vec<EnvKey>),
) {
    let mark = bound.len();
    bound.extend(keys);
    f(bound);
    bound.truncate(mark);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn codes(e: &Expr) -> Vec<(&'static str, Vec<usize>)> {
        well_formed(e)
            .into_iter()
            .map(|d| (d.kind.code(), d.path))
            .collect()
    }

    #[test]
    fn literal_is_well_formed() {
        assert!(well_formed(&Expr::int(5)).is_empty());
    }

    #[test]
    fn letrec_length_mismatch_at_root() {
        let e = Expr::letrec(vec![FunId::new("f", 0)], vec![], Expr::var("X"));
        assert_eq!(codes(&e), vec![("LengthMismatch", vec![])]);
    }

    #[test]
    fn let_length_mismatch_at_root() {
        let e = Expr::let_in(
            vec!["X".into(), "Y".into()],
            vec![Expr::int(5)],
            Expr::var("X"),
        );
        assert_eq!(codes(&e), vec![("LengthMismatch", vec![])]);
    }

    #[test]
    fn map_length_mismatch_is_reported() {
        let e = Expr::Map(vec![Expr::int(1)], vec![]);
        assert_eq!(codes(&e), vec![("LengthMismatch", vec![])]);
    }

    #[test]
    fn nested_problems_carry_paths() {
        let bad = Expr::fun(vec!["A".into(), "A".into()], Expr::var("A"));
        let e = Expr::Tuple(vec![Expr::int(1), bad]);
        assert_eq!(codes(&e), vec![("DuplicateParameter", vec![1])]);
    }

    #[test]
    fn letrec_arity_must_match_params() {
        let e = Expr::letrec(
            vec![FunId::new("f", 2)],
            vec![FunDef::new(vec!["A".into()], Expr::var("A"))],
            Expr::int(0),
        );
        assert_eq!(codes(&e), vec![("ArityMismatch", vec![])]);
    }

    #[test]
    fn non_linear_pattern_is_rejected() {
        let e = Expr::case(
            Expr::int(1),
            vec![Clause::new(
                Pattern::Tuple(vec![Pattern::var("A"), Pattern::var("A")]),
                Expr::atom("true"),
                Expr::var("A"),
            )],
        );
        assert_eq!(codes(&e), vec![("NonLinearPattern", vec![])]);
    }

    #[test]
    fn empty_atom_is_rejected() {
        assert_eq!(codes(&Expr::atom("")), vec![("EmptyName", vec![])]);
    }

    #[test]
    fn free_variable_examples() {
        let x = EnvKey::var("X");
        assert_eq!(free_variables(&Expr::var("X")), BTreeSet::from([x.clone()]));
        let bound = Expr::let1("X", Expr::int(5), Expr::var("X"));
        assert!(free_variables(&bound).is_empty());
        let under_lambda = Expr::fun(vec![], Expr::var("X"));
        assert_eq!(free_variables(&under_lambda), BTreeSet::from([x]));
    }

    #[test]
    fn let_binds_only_in_body() {
        // let X = X in X: the bind's X is free
        let e = Expr::let1("X", Expr::var("X"), Expr::var("X"));
        assert_eq!(free_variables(&e), BTreeSet::from([EnvKey::var("X")]));
    }

    #[test]
    fn letrec_binds_in_funs_and_body() {
        let f = FunId::new("f", 1);
        let e = Expr::letrec(
            vec![f.clone()],
            vec![FunDef::new(
                vec!["A".into()],
                Expr::apply(Expr::FunSig(f.clone()), vec![Expr::var("B")]),
            )],
            Expr::apply(Expr::FunSig(f), vec![Expr::var("A")]),
        );
        assert_eq!(
            free_variables(&e),
            BTreeSet::from([EnvKey::var("A"), EnvKey::var("B")])
        );
    }

    #[test]
    fn clause_patterns_bind_guard_and_body() {
        let e = Expr::case(
            Expr::var("S"),
            vec![Clause::new(
                Pattern::list(Pattern::var("H"), Pattern::var("T")),
                Expr::var("H"),
                Expr::Tuple(vec![Expr::var("T"), Expr::var("Z")]),
            )],
        );
        assert_eq!(
            free_variables(&e),
            BTreeSet::from([EnvKey::var("S"), EnvKey::var("Z")])
        );
    }
}
