//! Fuel-bounded big-step evaluator.
//!
//! Every successful evaluation produces a [`DerivationNode`] tree recording
//! one inference-rule instance per node. Fuel bounds the height of that
//! tree: entering a node with zero fuel fails with
//! [`EvalErrorKind::OutOfFuel`], so a program succeeds at fuel `F` iff it
//! has a derivation of height at most `F`.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::ast::{Clause, Construct, EnvKey, Expr, FunDef, FunId, Var};
use crate::env::{
    add_bindings, append_funs_to_closure, append_funs_to_env, append_vars_to_env, get_env,
    get_value, ClosureEnv, Environment,
};
use crate::matching::match_clause;
use crate::values::{ClosureRef, Value};

/// Error value produced by `plus` on anything but two integers.
pub const BADARITH: &str = "@badarith";
/// Error value produced by calls to unknown functions.
pub const UNDEF: &str = "@undef";

pub const DEFAULT_FUEL: usize = 10_000;

// Stack headroom for deep derivations; segments are allocated on demand.
const RED_ZONE: usize = 1024 * 1024;
const STACK_SEGMENT: usize = 16 * 1024 * 1024;

/// One inference rule of the semantics, in the order they are numbered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    Literal,
    Var,
    FunSig,
    Fun,
    Tuple,
    List,
    Case,
    Call,
    Apply,
    Let,
    Letrec,
    Map,
}

impl Rule {
    pub const ALL: [Rule; 12] = [
        Rule::Literal,
        Rule::Var,
        Rule::FunSig,
        Rule::Fun,
        Rule::Tuple,
        Rule::List,
        Rule::Case,
        Rule::Call,
        Rule::Apply,
        Rule::Let,
        Rule::Letrec,
        Rule::Map,
    ];

    /// The only rule whose conclusion can have `e` as its expression.
    pub fn for_expr(e: &Expr) -> Rule {
        match e {
            Expr::Literal(_) => Rule::Literal,
            Expr::Var(_) => Rule::Var,
            Expr::FunSig(_) => Rule::FunSig,
            Expr::Fun(..) => Rule::Fun,
            Expr::Tuple(_) => Rule::Tuple,
            Expr::List(..) => Rule::List,
            Expr::Case(..) => Rule::Case,
            Expr::Call(..) => Rule::Call,
            Expr::Apply(..) => Rule::Apply,
            Expr::Let(..) => Rule::Let,
            Expr::Letrec(..) => Rule::Letrec,
            Expr::Map(..) => Rule::Map,
        }
    }

    pub fn number(self) -> u8 {
        Rule::ALL.iter().position(|r| *r == self).unwrap() as u8 + 1
    }

    pub fn name(self) -> &'static str {
        match self {
            Rule::Literal => "literal",
            Rule::Var => "var",
            Rule::FunSig => "funsig",
            Rule::Fun => "fun",
            Rule::Tuple => "tuple",
            Rule::List => "list",
            Rule::Case => "case",
            Rule::Call => "call",
            Rule::Apply => "apply",
            Rule::Let => "let",
            Rule::Letrec => "letrec",
            Rule::Map => "map",
        }
    }

    pub fn from_name(name: &str) -> Option<Rule> {
        Rule::ALL.into_iter().find(|r| r.name() == name)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) {}", self.number(), self.name())
    }
}

/// Why an earlier clause of a `case` was passed over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SkippedClause {
    /// The pattern of clause `j` does not match the scrutinee value.
    NoMatch(usize),
    /// Clause `j` matched but its guard evaluated to `'false'`.
    GuardFalse(usize, Box<DerivationNode>),
}

impl SkippedClause {
    pub fn index(&self) -> usize {
        match self {
            SkippedClause::NoMatch(j) | SkippedClause::GuardFalse(j, _) => *j,
        }
    }
}

/// Witness for the clause-selection side condition of a `case` node: the
/// chosen clause and, for every earlier clause, why it was skipped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseEvidence {
    pub chosen: usize,
    pub skipped: Vec<SkippedClause>,
}

/// One rule instance `<env, clos, expr> -> result` and its premises.
///
/// Premise order per rule: tuple, call: one per element; list: head, tail;
/// map: all keys then all values; let: binds then body; letrec: body;
/// apply: arguments, then the applied expression, then the closure body;
/// case: scrutinee, chosen guard, chosen body.
///
/// Trees are as tall as the fuel allows, so cloning, comparing and dropping
/// are iterative.
#[derive(Debug)]
pub struct DerivationNode {
    pub rule: Rule,
    pub env: Environment,
    pub clos: ClosureEnv,
    pub expr: Expr,
    pub result: Value,
    pub premises: Vec<DerivationNode>,
    pub case_evidence: Option<CaseEvidence>,
}

impl DerivationNode {
    /// Number of nodes, counting skipped-guard derivations.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |_| n += 1);
        n
    }

    pub fn height(&self) -> usize {
        let mut best = 0;
        let mut stack = vec![(self, 1)];
        while let Some((node, depth)) = stack.pop() {
            best = best.max(depth);
            stack.extend(node.children().map(|c| (c, depth + 1)));
        }
        best
    }

    /// A copy of this node with no premises and no guard sub-derivations.
    fn shell(&self) -> Shell {
        let (chosen, skips) = match &self.case_evidence {
            Some(ev) => (
                Some(ev.chosen),
                ev.skipped
                    .iter()
                    .map(|s| (s.index(), matches!(s, SkippedClause::GuardFalse(..))))
                    .collect(),
            ),
            None => (None, Vec::new()),
        };
        Shell {
            node: DerivationNode {
                rule: self.rule,
                env: self.env.clone(),
                clos: self.clos.clone(),
                expr: self.expr.clone(),
                result: self.result.clone(),
                premises: Vec::new(),
                case_evidence: None,
            },
            chosen,
            skips,
            premises: self.premises.len(),
        }
    }

    /// Direct sub-derivations: skipped-guard derivations first, then premises.
    pub fn children(&self) -> impl Iterator<Item = &DerivationNode> {
        let guards = self
            .case_evidence
            .iter()
            .flat_map(|ev| ev.skipped.iter())
            .filter_map(|s| match s {
                SkippedClause::GuardFalse(_, d) => Some(&**d),
                SkippedClause::NoMatch(_) => None,
            });
        guards.chain(self.premises.iter())
    }

    /// Pre-order traversal over every node, children as in [`Self::children`].
    pub fn walk(&self, f: &mut impl FnMut(&DerivationNode)) {
        let mut stack = vec![self];
        while let Some(node) = stack.pop() {
            f(node);
            let children: Vec<&DerivationNode> = node.children().collect();
            stack.extend(children.into_iter().rev());
        }
    }
}

impl Clone for DerivationNode {
    fn clone(&self) -> Self {
        let mut asm = Assembler::default();
        let mut stack = vec![self];
        while let Some(node) = stack.pop() {
            if let Some(root) = asm.push(node.shell()) {
                return root;
            }
            let children: Vec<_> = node.children().collect();
            stack.extend(children.into_iter().rev());
        }
        unreachable!("pre-order walk always completes the root")
    }
}

impl PartialEq for DerivationNode {
    fn eq(&self, other: &Self) -> bool {
        let mut stack = vec![(self, other)];
        while let Some((a, b)) = stack.pop() {
            if a.rule != b.rule
                || a.result != b.result
                || a.expr != b.expr
                || a.env != b.env
                || a.clos != b.clos
                || a.premises.len() != b.premises.len()
            {
                return false;
            }
            match (&a.case_evidence, &b.case_evidence) {
                (None, None) => {}
                (Some(x), Some(y)) => {
                    if x.chosen != y.chosen || x.skipped.len() != y.skipped.len() {
                        return false;
                    }
                    for pair in x.skipped.iter().zip(&y.skipped) {
                        match pair {
                            (SkippedClause::NoMatch(i), SkippedClause::NoMatch(j)) if i == j => {}
                            (SkippedClause::GuardFalse(i, d), SkippedClause::GuardFalse(j, e))
                                if i == j =>
                            {
                                stack.push((d, e))
                            }
                            _ => return false,
                        }
                    }
                }
                _ => return false,
            }
            stack.extend(a.premises.iter().zip(&b.premises));
        }
        true
    }
}

impl Eq for DerivationNode {}

impl Drop for DerivationNode {
    fn drop(&mut self) {
        let mut stack = Vec::new();
        detach(self, &mut stack);
        while let Some(mut node) = stack.pop() {
            detach(&mut node, &mut stack);
        }
    }
}

fn detach(node: &mut DerivationNode, out: &mut Vec<DerivationNode>) {
    out.append(&mut node.premises);
    if let Some(ev) = node.case_evidence.take() {
        for s in ev.skipped {
            if let SkippedClause::GuardFalse(_, d) = s {
                out.push(*d);
            }
        }
    }
}

/// A node read or copied without its children, which follow it in
/// pre-order: one per guard-false skip, then the premises.
pub(crate) struct Shell {
    pub node: DerivationNode,
    pub chosen: Option<usize>,
    /// Clause index and whether its guard ran to `'false'`.
    pub skips: Vec<(usize, bool)>,
    pub premises: usize,
}

impl Shell {
    fn needed(&self) -> usize {
        self.skips.iter().filter(|(_, g)| *g).count() + self.premises
    }

    fn finish(self, children: Vec<DerivationNode>) -> DerivationNode {
        let Shell {
            mut node,
            chosen,
            skips,
            ..
        } = self;
        let mut children = children.into_iter();
        if let Some(chosen) = chosen {
            let skipped = skips
                .into_iter()
                .map(|(j, guard_false)| {
                    if guard_false {
                        SkippedClause::GuardFalse(j, Box::new(children.next().unwrap()))
                    } else {
                        SkippedClause::NoMatch(j)
                    }
                })
                .collect();
            node.case_evidence = Some(CaseEvidence { chosen, skipped });
        }
        node.premises = children.collect();
        node
    }
}

/// Rebuilds a tree from shells arriving in pre-order.
#[derive(Default)]
pub(crate) struct Assembler {
    open: Vec<(Shell, Vec<DerivationNode>)>,
}

impl Assembler {
    /// Adds the next node; returns the root once the tree is complete.
    pub fn push(&mut self, shell: Shell) -> Option<DerivationNode> {
        self.open.push((shell, Vec::new()));
        while let Some((shell, children)) = self.open.last() {
            if children.len() < shell.needed() {
                return None;
            }
            let (shell, children) = self.open.pop().unwrap();
            let done = shell.finish(children);
            match self.open.last_mut() {
                Some((_, siblings)) => siblings.push(done),
                None => return Some(done),
            }
        }
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalErrorKind {
    UnboundIdentifier(EnvKey),
    NotAClosure(Value),
    BadArity { expected: usize, got: usize },
    NoMatchingClause,
    NonBooleanGuard(Value),
    LengthMismatch(Construct),
    OutOfFuel,
}

impl EvalErrorKind {
    pub fn name(&self) -> &'static str {
        match self {
            EvalErrorKind::UnboundIdentifier(_) => "UnboundIdentifier",
            EvalErrorKind::NotAClosure(_) => "NotAClosure",
            EvalErrorKind::BadArity { .. } => "BadArity",
            EvalErrorKind::NoMatchingClause => "NoMatchingClause",
            EvalErrorKind::NonBooleanGuard(_) => "NonBooleanGuard",
            EvalErrorKind::LengthMismatch(_) => "LengthMismatch",
            EvalErrorKind::OutOfFuel => "OutOfFuel",
        }
    }
}

/// A configuration with no derivation (within the fuel bound).
///
/// `path` locates the failing configuration by premise positions from the
/// root, numbered as in [`DerivationNode`]; inside a `case`, 0 is the
/// scrutinee, 1 any guard, 2 the chosen body.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}{}", self.kind.name(), self.detail())]
pub struct EvalError {
    pub kind: EvalErrorKind,
    pub path: Vec<usize>,
}

impl EvalError {
    fn new(kind: EvalErrorKind) -> Self {
        EvalError {
            kind,
            path: Vec::new(),
        }
    }

    fn at(mut self, index: usize) -> Self {
        // reversed once at the top, see `Evaluator::eval`
        self.path.push(index);
        self
    }

    fn detail(&self) -> String {
        match &self.kind {
            EvalErrorKind::UnboundIdentifier(k) => format!(": {k}"),
            EvalErrorKind::NotAClosure(v) | EvalErrorKind::NonBooleanGuard(v) => format!(": {v}"),
            EvalErrorKind::BadArity { expected, got } => {
                format!(": expected {expected} arguments, got {got}")
            }
            EvalErrorKind::LengthMismatch(c) => format!(": {c}"),
            EvalErrorKind::NoMatchingClause | EvalErrorKind::OutOfFuel => String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalConfig {
    pub env: Environment,
    pub clos: ClosureEnv,
    pub expr: Expr,
    pub fuel: usize,
}

impl EvalConfig {
    /// Empty environments and the default fuel.
    pub fn new(expr: Expr) -> Self {
        EvalConfig {
            env: Environment::new(),
            clos: ClosureEnv::new(),
            expr,
            fuel: DEFAULT_FUEL,
        }
    }

    pub fn with_fuel(mut self, fuel: usize) -> Self {
        self.fuel = fuel;
        self
    }

    pub fn with_env(mut self, env: Environment) -> Self {
        self.env = env;
        self
    }

    pub fn with_clos(mut self, clos: ClosureEnv) -> Self {
        self.clos = clos;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalOutcome {
    Success {
        value: Value,
        derivation: DerivationNode,
    },
    Failure(EvalError),
}

impl EvalOutcome {
    pub fn is_success(&self) -> bool {
        matches!(self, EvalOutcome::Success { .. })
    }

    pub fn value(&self) -> Option<&Value> {
        match self {
            EvalOutcome::Success { value, .. } => Some(value),
            EvalOutcome::Failure(_) => None,
        }
    }

    pub fn derivation(&self) -> Option<&DerivationNode> {
        match self {
            EvalOutcome::Success { derivation, .. } => Some(derivation),
            EvalOutcome::Failure(_) => None,
        }
    }

    pub fn error(&self) -> Option<&EvalError> {
        match self {
            EvalOutcome::Success { .. } => None,
            EvalOutcome::Failure(e) => Some(e),
        }
    }

    pub fn is_out_of_fuel(&self) -> bool {
        matches!(self.error(), Some(e) if e.kind == EvalErrorKind::OutOfFuel)
    }

    pub fn into_result(self) -> Result<(Value, DerivationNode), EvalError> {
        match self {
            EvalOutcome::Success { value, derivation } => Ok((value, derivation)),
            EvalOutcome::Failure(e) => Err(e),
        }
    }
}

pub type BuiltinFn = fn(&[Value]) -> Value;

/// Registry backing `call`. Unknown names evaluate to the `@undef` atom.
#[derive(Debug, Clone)]
pub struct Builtins {
    table: BTreeMap<String, BuiltinFn>,
}

impl Default for Builtins {
    fn default() -> Self {
        let mut b = Builtins::empty();
        b.register("plus", plus);
        b
    }
}

impl Builtins {
    pub fn empty() -> Self {
        Builtins {
            table: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, name: impl Into<String>, f: BuiltinFn) -> &mut Self {
        self.table.insert(name.into(), f);
        self
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.table.keys().map(String::as_str)
    }

    pub fn eval(&self, fname: &str, vals: &[Value]) -> Value {
        match self.table.get(fname) {
            Some(f) => f(vals),
            None => Value::atom(UNDEF),
        }
    }
}

fn plus(vals: &[Value]) -> Value {
    match vals {
        [a, b] => match (a.as_int(), b.as_int()) {
            (Some(x), Some(y)) => Value::int(x + y),
            _ => Value::atom(BADARITH),
        },
        _ => Value::atom(BADARITH),
    }
}

/// Evaluates `fname` against the default registry.
pub fn builtin_eval(fname: &str, vals: &[Value]) -> Value {
    Builtins::default().eval(fname, vals)
}

/// Evaluates with the default builtins.
pub fn eval_expr(cfg: &EvalConfig) -> EvalOutcome {
    Evaluator::default().eval(cfg)
}

#[derive(Debug, Clone, Default)]
pub struct Evaluator {
    builtins: Builtins,
}

impl Evaluator {
    pub fn new(builtins: Builtins) -> Self {
        Evaluator { builtins }
    }

    pub fn builtins(&self) -> &Builtins {
        &self.builtins
    }

    pub fn eval(&self, cfg: &EvalConfig) -> EvalOutcome {
        match self.node(&cfg.env, &cfg.clos, &cfg.expr, cfg.fuel) {
            Ok(derivation) => EvalOutcome::Success {
                value: derivation.result.clone(),
                derivation,
            },
            Err(mut e) => {
                e.path.reverse();
                EvalOutcome::Failure(e)
            }
        }
    }

    fn node(
        &self,
        env: &Environment,
        clos: &ClosureEnv,
        expr: &Expr,
        fuel: usize,
    ) -> Result<DerivationNode, EvalError> {
        if fuel == 0 {
            return Err(EvalError::new(EvalErrorKind::OutOfFuel));
        }
        stacker::maybe_grow(RED_ZONE, STACK_SEGMENT, || {
            self.step(env, clos, expr, fuel - 1)
        })
    }

    fn all(
        &self,
        env: &Environment,
        clos: &ClosureEnv,
        exps: &[Expr],
        fuel: usize,
        offset: usize,
    ) -> Result<Vec<DerivationNode>, EvalError> {
        exps.iter()
            .enumerate()
            .map(|(i, e)| self.node(env, clos, e, fuel).map_err(|err| err.at(offset + i)))
            .collect()
    }

    /// Applies the rule for `expr`; `fuel` is what the premises get.
    fn step(
        &self,
        env: &Environment,
        clos: &ClosureEnv,
        expr: &Expr,
        fuel: usize,
    ) -> Result<DerivationNode, EvalError> {
        let (result, premises, case_evidence) = match expr {
            Expr::Literal(l) => (Value::Literal(l.clone()), vec![], None),
            Expr::Var(s) => (lookup(env, EnvKey::Var(s.clone()))?, vec![], None),
            Expr::FunSig(fid) => (lookup(env, EnvKey::FunId(fid.clone()))?, vec![], None),
            Expr::Fun(params, body) => (
                Value::closure(
                    ClosureRef::Concrete(env.clone()),
                    params.clone(),
                    (**body).clone(),
                ),
                vec![],
                None,
            ),
            Expr::Tuple(exps) => {
                let premises = self.all(env, clos, exps, fuel, 0)?;
                (Value::Tuple(results(&premises)), premises, None)
            }
            Expr::List(hd, tl) => self.list(env, clos, hd, tl, fuel)?,
            Expr::Case(scrutinee, clauses) => self.case(env, clos, scrutinee, clauses, fuel)?,
            Expr::Call(fname, params) => {
                let premises = self.all(env, clos, params, fuel, 0)?;
                (self.builtins.eval(fname, &results(&premises)), premises, None)
            }
            Expr::Apply(target, params) => self.apply(env, clos, target, params, fuel)?,
            Expr::Let(vars, exps, body) => self.let_in(env, clos, vars, exps, body, fuel)?,
            Expr::Letrec(fnames, funs, body) => self.letrec(env, clos, fnames, funs, body, fuel)?,
            Expr::Map(keys, vals) => self.map(env, clos, keys, vals, fuel)?,
        };
        Ok(DerivationNode {
            rule: Rule::for_expr(expr),
            env: env.clone(),
            clos: clos.clone(),
            expr: expr.clone(),
            result,
            premises,
            case_evidence,
        })
    }

    #[inline(never)]
    fn list(
        &self,
        env: &Environment,
        clos: &ClosureEnv,
        hd: &Expr,
        tl: &Expr,
        fuel: usize,
    ) -> Result<Step, EvalError> {
        let h = self.node(env, clos, hd, fuel).map_err(|e| e.at(0))?;
        let t = self.node(env, clos, tl, fuel).map_err(|e| e.at(1))?;
        let v = Value::list(h.result.clone(), t.result.clone());
        Ok((v, vec![h, t], None))
    }

    #[inline(never)]
    fn case(
        &self,
        env: &Environment,
        clos: &ClosureEnv,
        scrutinee: &Expr,
        clauses: &[Clause],
        fuel: usize,
    ) -> Result<Step, EvalError> {
        let scrut = self.node(env, clos, scrutinee, fuel).map_err(|e| e.at(0))?;
        let mut skipped = Vec::new();
        let mut chosen = None;
        for i in 0..clauses.len() {
            let Some((guard, body, bindings)) = match_clause(&scrut.result, clauses, i) else {
                skipped.push(SkippedClause::NoMatch(i));
                continue;
            };
            let extended = add_bindings(&bindings, env);
            let g = self.node(&extended, clos, guard, fuel).map_err(|e| e.at(1))?;
            if g.result == Value::tt() {
                chosen = Some((i, g, body, extended));
                break;
            } else if g.result == Value::ff() {
                skipped.push(SkippedClause::GuardFalse(i, Box::new(g)));
            } else {
                return Err(EvalError::new(EvalErrorKind::NonBooleanGuard(g.result.clone())).at(1));
            }
        }
        let (i, g, body, extended) =
            chosen.ok_or_else(|| EvalError::new(EvalErrorKind::NoMatchingClause))?;
        let b = self.node(&extended, clos, body, fuel).map_err(|e| e.at(2))?;
        let v = b.result.clone();
        Ok((v, vec![scrut, g, b], Some(CaseEvidence { chosen: i, skipped })))
    }

    #[inline(never)]
    fn apply(
        &self,
        env: &Environment,
        clos: &ClosureEnv,
        target: &Expr,
        params: &[Expr],
        fuel: usize,
    ) -> Result<Step, EvalError> {
        let mut premises = self.all(env, clos, params, fuel, 0)?;
        let n = params.len();
        let f = self.node(env, clos, target, fuel).map_err(|e| e.at(n))?;
        let Value::Closure {
            env: cref,
            params: vars,
            body,
        } = &f.result
        else {
            return Err(EvalError::new(EvalErrorKind::NotAClosure(f.result.clone())));
        };
        let vals = results(&premises);
        let call_env = append_vars_to_env(vars, &vals, &get_env(cref, clos)).map_err(|e| {
            EvalError::new(EvalErrorKind::BadArity {
                expected: e.expected,
                got: e.got,
            })
        })?;
        let b = self.node(&call_env, clos, body, fuel).map_err(|e| e.at(n + 1))?;
        let v = b.result.clone();
        premises.push(f);
        premises.push(b);
        Ok((v, premises, None))
    }

    #[inline(never)]
    fn let_in(
        &self,
        env: &Environment,
        clos: &ClosureEnv,
        vars: &[Var],
        exps: &[Expr],
        body: &Expr,
        fuel: usize,
    ) -> Result<Step, EvalError> {
        if vars.len() != exps.len() {
            return Err(EvalError::new(EvalErrorKind::LengthMismatch(Construct::Let)));
        }
        let mut premises = self.all(env, clos, exps, fuel, 0)?;
        let extended =
            append_vars_to_env(vars, &results(&premises), env).expect("lengths checked above");
        let b = self
            .node(&extended, clos, body, fuel)
            .map_err(|e| e.at(exps.len()))?;
        let v = b.result.clone();
        premises.push(b);
        Ok((v, premises, None))
    }

    #[inline(never)]
    fn letrec(
        &self,
        env: &Environment,
        clos: &ClosureEnv,
        fnames: &[FunId],
        funs: &[FunDef],
        body: &Expr,
        fuel: usize,
    ) -> Result<Step, EvalError> {
        let extended = append_funs_to_env(fnames, funs, env)
            .map_err(|_| EvalError::new(EvalErrorKind::LengthMismatch(Construct::Letrec)))?;
        let clos2 = append_funs_to_closure(fnames, clos, &extended);
        let b = self.node(&extended, &clos2, body, fuel).map_err(|e| e.at(0))?;
        let v = b.result.clone();
        Ok((v, vec![b], None))
    }

    #[inline(never)]
    fn map(
        &self,
        env: &Environment,
        clos: &ClosureEnv,
        keys: &[Expr],
        vals: &[Expr],
        fuel: usize,
    ) -> Result<Step, EvalError> {
        if keys.len() != vals.len() {
            return Err(EvalError::new(EvalErrorKind::LengthMismatch(Construct::Map)));
        }
        let mut premises = self.all(env, clos, keys, fuel, 0)?;
        let mut vs = self.all(env, clos, vals, fuel, keys.len())?;
        let kvals = results(&premises);
        let vvals = results(&vs);
        premises.append(&mut vs);
        Ok((Value::Map(kvals, vvals), premises, None))
    }
}

type Step = (Value, Vec<DerivationNode>, Option<CaseEvidence>);

fn lookup(env: &Environment, key: EnvKey) -> Result<Value, EvalError> {
    match get_value(env, &key) {
        Some(v) => Ok(v.clone()),
        None => Err(EvalError::new(EvalErrorKind::UnboundIdentifier(key))),
    }
}

fn results(nodes: &[DerivationNode]) -> Vec<Value> {
    nodes.iter().map(|n| n.result.clone()).collect()
}
