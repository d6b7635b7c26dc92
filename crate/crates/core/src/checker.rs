//! Independent validation of derivation trees.
//!
//! Each node is checked against the rule named by its expression, with every
//! side condition recomputed from the node's configuration rather than
//! trusted from the evaluator. Nodes are addressed by child positions from
//! the root, children ordered as in [`DerivationNode::children`]: for a
//! `case`, skipped-guard derivations come before the premises.

use std::fmt;

use crate::ast::{EnvKey, Expr};
use crate::env::{
    add_bindings, append_funs_to_closure, append_funs_to_env, append_vars_to_env, get_env,
    get_value, ClosureEnv, Environment,
};
use crate::eval::{Builtins, DerivationNode, Rule, SkippedClause};
use crate::matching::match_clause;
use crate::values::{ClosureRef, Value};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub path: Vec<usize>,
    pub rule: Rule,
    pub reason: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: {}", format_path(&self.path), self.rule, self.reason)
    }
}

pub fn format_path(path: &[usize]) -> String {
    if path.is_empty() {
        "root".to_string()
    } else {
        path.iter().map(|i| format!("/{i}")).collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CheckReport {
    pub violations: Vec<Violation>,
}

impl CheckReport {
    pub fn valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.valid() {
            return f.write_str("valid");
        }
        writeln!(f, "invalid: {} violation(s)", self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "  {v}")?;
        }
        Ok(())
    }
}

/// Validates against the default builtin registry.
pub fn validate(d: &DerivationNode) -> CheckReport {
    validate_with(d, &Builtins::default())
}

pub fn validate_with(d: &DerivationNode, builtins: &Builtins) -> CheckReport {
    let mut report = CheckReport::default();
    let mut stack = vec![(d, Vec::new())];
    while let Some((node, path)) = stack.pop() {
        let mut local = Local {
            node,
            builtins,
            reasons: Vec::new(),
        };
        local.check();
        report.violations.extend(local.reasons.into_iter().map(|reason| Violation {
            path: path.clone(),
            rule: node.rule,
            reason,
        }));
        let children: Vec<_> = node.children().collect();
        for (i, child) in children.into_iter().enumerate().rev() {
            let mut p = path.clone();
            p.push(i);
            stack.push((child, p));
        }
    }
    report
}

struct Local<'a> {
    node: &'a DerivationNode,
    builtins: &'a Builtins,
    reasons: Vec<String>,
}

impl Local<'_> {
    fn fail(&mut self, reason: impl Into<String>) {
        self.reasons.push(reason.into());
    }

    fn count(&mut self, expected: usize) -> bool {
        let got = self.node.premises.len();
        if got != expected {
            self.fail(format!("expected {expected} premises, found {got}"));
        }
        got == expected
    }

    fn config(
        &mut self,
        what: &str,
        d: &DerivationNode,
        env: &Environment,
        clos: &ClosureEnv,
        expr: &Expr,
    ) {
        if d.expr != *expr {
            self.fail(format!("{what}: expression differs from the rule's"));
        }
        if d.env != *env {
            self.fail(format!("{what}: environment differs from the rule's"));
        }
        if d.clos != *clos {
            self.fail(format!("{what}: closure environment differs from the rule's"));
        }
    }

    fn premise(&mut self, i: usize, env: &Environment, clos: &ClosureEnv, expr: &Expr) {
        let d = &self.node.premises[i];
        self.config(&format!("premise {i}"), d, env, clos, expr);
    }

    fn same_env_premises(&mut self, exps: &[Expr], offset: usize) {
        let (env, clos) = (&self.node.env, &self.node.clos);
        for (i, e) in exps.iter().enumerate() {
            self.premise(offset + i, env, clos, e);
        }
    }

    fn result(&mut self, expected: &Value) {
        if self.node.result != *expected {
            self.fail(format!(
                "result {} but the rule gives {}",
                self.node.result, expected
            ));
        }
    }

    fn results(&self, range: std::ops::Range<usize>) -> Vec<Value> {
        self.node.premises[range]
            .iter()
            .map(|d| d.result.clone())
            .collect()
    }

    fn check(&mut self) {
        let n = self.node;
        let expected_rule = Rule::for_expr(&n.expr);
        if n.rule != expected_rule {
            self.fail(format!(
                "rule does not fit a {} expression, which needs {}",
                n.expr.kind(),
                expected_rule
            ));
            return;
        }
        if n.rule != Rule::Case && n.case_evidence.is_some() {
            self.fail("clause evidence on a non-case node");
        }
        let (env, clos) = (&n.env, &n.clos);
        match &n.expr {
            Expr::Literal(l) => {
                if self.count(0) {
                    self.result(&Value::Literal(l.clone()));
                }
            }
            Expr::Var(x) => self.lookup(EnvKey::Var(x.clone())),
            Expr::FunSig(fid) => self.lookup(EnvKey::FunId(fid.clone())),
            Expr::Fun(params, body) => {
                if self.count(0) {
                    self.result(&Value::closure(
                        ClosureRef::Concrete(env.clone()),
                        params.clone(),
                        (**body).clone(),
                    ));
                }
            }
            Expr::Tuple(exps) => {
                if self.count(exps.len()) {
                    self.same_env_premises(exps, 0);
                    self.result(&Value::Tuple(self.results(0..exps.len())));
                }
            }
            Expr::List(hd, tl) => {
                if self.count(2) {
                    self.premise(0, env, clos, hd);
                    self.premise(1, env, clos, tl);
                    let r = self.results(0..2);
                    self.result(&Value::list(r[0].clone(), r[1].clone()));
                }
            }
            Expr::Call(fname, args) => {
                if self.count(args.len()) {
                    self.same_env_premises(args, 0);
                    let v = self.builtins.eval(fname, &self.results(0..args.len()));
                    self.result(&v);
                }
            }
            Expr::Apply(target, args) => self.apply(target, args),
            Expr::Let(vars, exps, body) => {
                if vars.len() != exps.len() {
                    self.fail("let binds a different number of variables and expressions");
                    return;
                }
                let k = exps.len();
                if self.count(k + 1) {
                    self.same_env_premises(exps, 0);
                    let extended = append_vars_to_env(vars, &self.results(0..k), env)
                        .expect("lengths checked above");
                    self.premise(k, &extended, clos, body);
                    self.result(&n.premises[k].result);
                }
            }
            Expr::Letrec(fnames, funs, body) => {
                let Ok(extended) = append_funs_to_env(fnames, funs, env) else {
                    self.fail("letrec names and definitions differ in number");
                    return;
                };
                let clos2 = append_funs_to_closure(fnames, clos, &extended);
                if self.count(1) {
                    self.premise(0, &extended, &clos2, body);
                    self.result(&n.premises[0].result);
                }
            }
            Expr::Map(keys, vals) => {
                if keys.len() != vals.len() {
                    self.fail("map has a different number of keys and values");
                    return;
                }
                let k = keys.len();
                if self.count(2 * k) {
                    self.same_env_premises(keys, 0);
                    self.same_env_premises(vals, k);
                    self.result(&Value::Map(self.results(0..k), self.results(k..2 * k)));
                }
            }
            Expr::Case(scrutinee, clauses) => self.case(scrutinee, clauses),
        }
    }

    fn lookup(&mut self, key: EnvKey) {
        if !self.count(0) {
            return;
        }
        match get_value(&self.node.env, &key) {
            Some(v) => {
                let v = v.clone();
                self.result(&v);
            }
            None => self.fail(format!("{key} is not bound in the environment")),
        }
    }

    fn apply(&mut self, target: &Expr, args: &[Expr]) {
        let n = self.node;
        let k = args.len();
        if !self.count(k + 2) {
            return;
        }
        self.same_env_premises(args, 0);
        self.premise(k, &n.env, &n.clos, target);
        let Value::Closure {
            env: cref,
            params,
            body,
        } = &n.premises[k].result
        else {
            self.fail(format!("premise {k} does not yield a closure"));
            return;
        };
        match append_vars_to_env(params, &self.results(0..k), &get_env(cref, &n.clos)) {
            Ok(call_env) => {
                self.premise(k + 1, &call_env, &n.clos, body);
                self.result(&n.premises[k + 1].result);
            }
            Err(e) => self.fail(format!(
                "closure takes {} arguments but is applied to {}",
                e.expected, e.got
            )),
        }
    }

    fn case(&mut self, scrutinee: &Expr, clauses: &[crate::ast::Clause]) {
        let n = self.node;
        let (env, clos) = (&n.env, &n.clos);
        let Some(evidence) = &n.case_evidence else {
            self.fail("case node without clause evidence");
            return;
        };
        if !self.count(3) {
            return;
        }
        self.premise(0, env, clos, scrutinee);
        let scrut = &n.premises[0].result;
        let i = evidence.chosen;
        match match_clause(scrut, clauses, i) {
            None => self.fail(format!("clause {i} does not match the scrutinee value")),
            Some((guard, body, bindings)) => {
                let extended = add_bindings(&bindings, env);
                self.premise(1, &extended, clos, guard);
                if n.premises[1].result != Value::tt() {
                    self.fail(format!("guard of clause {i} is not 'true'"));
                }
                self.premise(2, &extended, clos, body);
                self.result(&n.premises[2].result);
            }
        }
        let indices: Vec<usize> = evidence.skipped.iter().map(SkippedClause::index).collect();
        if indices != (0..i).collect::<Vec<_>>() {
            self.fail(format!(
                "evidence covers clauses {indices:?} but must cover exactly 0..{i}"
            ));
        }
        for s in &evidence.skipped {
            let j = s.index();
            let m = match_clause(scrut, clauses, j);
            match (s, m) {
                (SkippedClause::NoMatch(_), None) => {}
                (SkippedClause::NoMatch(_), Some(_)) => {
                    self.fail(format!("clause {j} is claimed not to match, but it does"))
                }
                (SkippedClause::GuardFalse(..), None) => {
                    self.fail(format!("clause {j} does not match, so its guard cannot run"))
                }
                (SkippedClause::GuardFalse(_, d), Some((guard, _, bindings))) => {
                    let extended = add_bindings(&bindings, env);
                    self.config(&format!("guard of skipped clause {j}"), d, &extended, clos, guard);
                    if d.result != Value::ff() {
                        self.fail(format!("guard of skipped clause {j} is not 'false'"));
                    }
                }
            }
        }
    }
}

/// Which single field of one node a [`Mutation`] altered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MutatedField {
    Result,
    Rule,
    Env,
}

#[derive(Debug, Clone)]
pub struct Mutation {
    pub path: Vec<usize>,
    pub field: MutatedField,
    pub tree: DerivationNode,
}

/// Every single-field mutation of `d`: for each node, its result is
/// perturbed, its rule replaced by the next one, and a fresh variable added
/// to its environment.
pub fn single_field_mutations(d: &DerivationNode) -> Vec<Mutation> {
    let mut paths = Vec::new();
    let mut stack = vec![(d, Vec::new())];
    while let Some((node, path)) = stack.pop() {
        let children: Vec<_> = node.children().collect();
        for (i, child) in children.into_iter().enumerate().rev() {
            let mut p = path.clone();
            p.push(i);
            stack.push((child, p));
        }
        paths.push(path);
    }
    let mut out = Vec::new();
    for path in paths {
        for field in [MutatedField::Result, MutatedField::Rule, MutatedField::Env] {
            let mut tree = d.clone();
            mutate(node_at_mut(&mut tree, &path), field);
            out.push(Mutation {
                path: path.clone(),
                field,
                tree,
            });
        }
    }
    out
}

fn mutate(node: &mut DerivationNode, field: MutatedField) {
    match field {
        MutatedField::Result => {
            node.result = match node.result.as_int() {
                Some(n) => Value::int(n + 1),
                None => Value::Tuple(vec![node.result.clone()]),
            }
        }
        MutatedField::Rule => {
            let all = Rule::ALL;
            let i = all.iter().position(|r| *r == node.rule).unwrap();
            node.rule = all[(i + 1) % all.len()];
        }
        MutatedField::Env => {
            let mut name = "Mutant".to_string();
            while node.env.get(&EnvKey::var(&name)).is_some() {
                name.push('_');
            }
            node.env.insert(EnvKey::var(name), Value::atom("mutant"));
        }
    }
}

/// The node reached by following child positions from the root.
pub fn node_at<'a>(d: &'a DerivationNode, path: &[usize]) -> Option<&'a DerivationNode> {
    path.iter()
        .try_fold(d, |node, &i| node.children().nth(i))
}

fn node_at_mut<'a>(mut node: &'a mut DerivationNode, path: &[usize]) -> &'a mut DerivationNode {
    for &i in path {
        let guards = node
            .case_evidence
            .as_ref()
            .map_or(0, |ev| {
                ev.skipped
                    .iter()
                    .filter(|s| matches!(s, SkippedClause::GuardFalse(..)))
                    .count()
            });
        node = if i < guards {
            let ev = node.case_evidence.as_mut().unwrap();
            ev.skipped
                .iter_mut()
                .filter_map(|s| match s {
                    SkippedClause::GuardFalse(_, d) => Some(&mut **d),
                    SkippedClause::NoMatch(_) => None,
                })
                .nth(i)
                .unwrap()
        } else {
            &mut node.premises[i - guards]
        };
    }
    node
}
