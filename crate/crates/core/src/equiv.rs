//! Observational equivalence of expression pairs, and the four swap and
//! function-wrapping equivalences packaged as instance generators.

use std::fmt;
use std::path::{Path, PathBuf};

use rand::Rng;
use thiserror::Error;

use crate::ast::{free_variables, EnvKey, Expr, Var};
use crate::env::{insert_value, ClosureEnv, Environment};
use crate::eval::{EvalConfig, EvalErrorKind, EvalOutcome, Evaluator};
use crate::gen::Gen;
use crate::parser::{parse_expr, parse_value, ParseError};
use crate::values::Value;

/// What one side of a comparison did.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Observed {
    Value(Value),
    Error(EvalErrorKind),
}

impl From<EvalOutcome> for Observed {
    fn from(o: EvalOutcome) -> Self {
        match o {
            EvalOutcome::Success { value, .. } => Observed::Value(value),
            EvalOutcome::Failure(e) => Observed::Error(e.kind),
        }
    }
}

impl fmt::Display for Observed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observed::Value(v) => write!(f, "{v}"),
            Observed::Error(k) => f.write_str(k.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EquivVerdict {
    /// Both sides evaluate to this value.
    Equivalent(Value),
    /// Both sides run out of fuel.
    Divergent,
    Distinct(Observed, Observed),
    /// Assumption `i` does not hold, so the case says nothing.
    Vacuous(usize),
}

impl EquivVerdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, EquivVerdict::Equivalent(_))
    }

    pub fn name(&self) -> &'static str {
        match self {
            EquivVerdict::Equivalent(_) => "Equivalent",
            EquivVerdict::Divergent => "Divergent",
            EquivVerdict::Distinct(..) => "Distinct",
            EquivVerdict::Vacuous(_) => "Vacuous",
        }
    }
}

impl fmt::Display for EquivVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EquivVerdict::Equivalent(v) => write!(f, "Equivalent {v}"),
            EquivVerdict::Divergent => f.write_str("Divergent"),
            EquivVerdict::Distinct(l, r) => write!(f, "Distinct {l} | {r}"),
            EquivVerdict::Vacuous(i) => write!(f, "Vacuous assumption {i}"),
        }
    }
}

/// `expr` evaluates to `expected` in `env` (and the case's closure env).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assumption {
    pub expr: Expr,
    pub env: Environment,
    pub expected: Value,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivCase {
    pub name: String,
    pub left: Expr,
    pub right: Expr,
    pub env: Environment,
    pub clos: ClosureEnv,
    pub assumptions: Vec<Assumption>,
}

impl EquivCase {
    pub fn new(name: impl Into<String>, left: Expr, right: Expr) -> Self {
        EquivCase {
            name: name.into(),
            left,
            right,
            env: Environment::new(),
            clos: ClosureEnv::new(),
            assumptions: Vec::new(),
        }
    }

    pub fn with_env(mut self, env: Environment) -> Self {
        self.env = env;
        self
    }

    /// The same case with its sides exchanged.
    pub fn mirrored(&self) -> Self {
        EquivCase {
            left: self.right.clone(),
            right: self.left.clone(),
            ..self.clone()
        }
    }
}

pub fn check_equiv(case: &EquivCase, fuel: usize) -> EquivVerdict {
    check_equiv_with(case, fuel, &Evaluator::default())
}

pub fn check_equiv_with(case: &EquivCase, fuel: usize, ev: &Evaluator) -> EquivVerdict {
    let run = |env: &Environment, expr: &Expr| {
        let cfg = EvalConfig::new(expr.clone())
            .with_env(env.clone())
            .with_clos(case.clos.clone())
            .with_fuel(fuel);
        Observed::from(ev.eval(&cfg))
    };
    for (i, a) in case.assumptions.iter().enumerate() {
        if run(&a.env, &a.expr) != Observed::Value(a.expected.clone()) {
            return EquivVerdict::Vacuous(i);
        }
    }
    let left = run(&case.env, &case.left);
    let right = run(&case.env, &case.right);
    match (left, right) {
        (Observed::Value(l), Observed::Value(r)) if l == r => EquivVerdict::Equivalent(l),
        (Observed::Error(EvalErrorKind::OutOfFuel), Observed::Error(EvalErrorKind::OutOfFuel)) => {
            EquivVerdict::Divergent
        }
        (l, r) => EquivVerdict::Distinct(l, r),
    }
}

fn plus_xy() -> Expr {
    Expr::call("plus", vec![Expr::var("X"), Expr::var("Y")])
}

/// `let X = a in let Y = b in call 'plus'(X, Y)`
pub fn nested_let_sum(a: Expr, b: Expr) -> Expr {
    Expr::let1("X", a, Expr::let1("Y", b, plus_xy()))
}

/// `let <X, Y> = <a, b> in call 'plus'(X, Y)`
pub fn simultaneous_let_sum(a: Expr, b: Expr) -> Expr {
    Expr::let_in(vec!["X".into(), "Y".into()], vec![a, b], plus_xy())
}

/// `let X = fun() -> e in apply X()`
pub fn wrap_in_fun(e: Expr) -> Expr {
    Expr::let1("X", Expr::fun(vec![], e), Expr::apply(Expr::var("X"), vec![]))
}

/// Swapping the values 5 and 6 bound to `X` and `Y` in a sum.
pub fn example1() -> EquivCase {
    EquivCase::new(
        "swap-values",
        nested_let_sum(Expr::int(5), Expr::int(6)),
        nested_let_sum(Expr::int(6), Expr::int(5)),
    )
}

/// The swapped-expression case for given `e1`, `e2` under `env`, with the
/// four assumptions instantiated by evaluating `e1`, `e2` once.
/// `None` when either side does not evaluate within `fuel`.
pub fn example2_case(
    name: impl Into<String>,
    e1: Expr,
    e2: Expr,
    env: Environment,
    fuel: usize,
) -> Option<EquivCase> {
    let value = |e: &Expr| {
        let cfg = EvalConfig::new(e.clone()).with_env(env.clone()).with_fuel(fuel);
        Evaluator::default().eval(&cfg).value().cloned()
    };
    let v1 = value(&e1)?;
    let v2 = value(&e2)?;
    let with_x = |v: &Value| insert_value(&env, EnvKey::var("X"), v.clone());
    let assumptions = vec![
        Assumption {
            expr: e1.clone(),
            env: env.clone(),
            expected: v1.clone(),
        },
        Assumption {
            expr: e1.clone(),
            env: with_x(&v2),
            expected: v1.clone(),
        },
        Assumption {
            expr: e2.clone(),
            env: env.clone(),
            expected: v2.clone(),
        },
        Assumption {
            expr: e2.clone(),
            env: with_x(&v1),
            expected: v2,
        },
    ];
    let left = nested_let_sum(e1.clone(), e2.clone());
    let right = nested_let_sum(e2, e1);
    Some(EquivCase {
        assumptions,
        ..EquivCase::new(name, left, right).with_env(env)
    })
}

/// Generation budget per instance, in derivation height.
pub const INSTANCE_FUEL: usize = 2000;

fn instance_env(g: &mut Gen) -> Environment {
    let mut env = Environment::new();
    for name in ["A", "B"] {
        if g.rng().gen_bool(0.5) {
            env.insert(EnvKey::var(name), Value::int(g.int()));
        }
    }
    env
}

/// A generated `(e1, e2, env)` triple for the swap examples: `e1` and `e2`
/// mention neither `X` nor `Y`, may read the variables bound in `env`, and
/// evaluate to values that do not depend on an extra `X` binding.
fn swap_operands(g: &mut Gen) -> (Expr, Expr, Environment) {
    loop {
        let env = instance_env(g);
        let free: Vec<Var> = env
            .iter()
            .filter_map(|(k, _)| match k {
                EnvKey::Var(v) => Some(v.clone()),
                EnvKey::FunId(_) => None,
            })
            .collect();
        let e1 = g.program_over(4, &free);
        let e2 = g.program_over(4, &free);
        let mentions_xy = |e: &Expr| {
            free_variables(e)
                .iter()
                .any(|k| *k == EnvKey::var("X") || *k == EnvKey::var("Y"))
        };
        if mentions_xy(&e1) || mentions_xy(&e2) {
            continue;
        }
        // closures capture the whole environment, so a value can change
        // under an extra X binding even when X is not free
        let Some(case) = example2_case("", e1.clone(), e2.clone(), env.clone(), INSTANCE_FUEL)
        else {
            continue;
        };
        if !matches!(check_equiv(&case, INSTANCE_FUEL), EquivVerdict::Vacuous(_)) {
            return (e1, e2, env);
        }
    }
}

/// `n` instances of the swapped-expression equivalence, assumptions
/// holding by construction.
pub fn generate_example2_instances(seed: u64, n: usize) -> Vec<EquivCase> {
    let mut g = Gen::new(seed);
    (0..n)
        .map(|i| {
            let (e1, e2, env) = swap_operands(&mut g);
            example2_case(format!("swap-exprs-{seed}-{i}"), e1, e2, env, INSTANCE_FUEL)
                .expect("operands evaluated during generation")
        })
        .collect()
}

/// `n` simultaneous-let instances over the same operands as
/// [`generate_example2_instances`] with the same seed. No assumptions.
pub fn generate_example3_instances(seed: u64, n: usize) -> Vec<EquivCase> {
    let mut g = Gen::new(seed);
    (0..n)
        .map(|i| {
            let (e1, e2, env) = swap_operands(&mut g);
            EquivCase::new(
                format!("swap-simultaneous-{seed}-{i}"),
                simultaneous_let_sum(e1.clone(), e2.clone()),
                simultaneous_let_sum(e2, e1),
            )
            .with_env(env)
        })
        .collect()
}

/// `n` instances of `e` against `let X = fun() -> e in apply X()` for
/// generated `e` that evaluate successfully.
pub fn generate_example4_instances(seed: u64, n: usize) -> Vec<EquivCase> {
    let mut g = Gen::new(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let env = instance_env(&mut g);
        let free: Vec<Var> = env
            .iter()
            .filter_map(|(k, _)| match k {
                EnvKey::Var(v) => Some(v.clone()),
                EnvKey::FunId(_) => None,
            })
            .collect();
        let e = g.program_over(5, &free);
        let cfg = EvalConfig::new(e.clone())
            .with_env(env.clone())
            .with_fuel(INSTANCE_FUEL);
        if !Evaluator::default().eval(&cfg).is_success() {
            continue;
        }
        let name = format!("fun-wrap-{seed}-{}", out.len());
        out.push(EquivCase::new(name, e.clone(), wrap_in_fun(e)).with_env(env));
    }
    out
}

/// The non-terminating instance of the function-wrapping equivalence.
pub fn example4_divergent() -> EquivCase {
    let e = parse_expr("letrec 'x'/0 = fun() -> apply 'x'/0() in apply 'x'/0()")
        .expect("fixed source parses");
    EquivCase::new("fun-wrap-divergent", e.clone(), wrap_in_fun(e))
}

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("{path}:{line}: {message}")]
    Syntax {
        path: String,
        line: usize,
        message: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
}

/// Reads an equivalence manifest. Each significant line is
///
/// ```text
/// case <name> <left.core> <right.core> [X=5,Y=6]
/// ```
///
/// with source paths relative to the manifest. `%` starts a comment line.
pub fn read_manifest(path: &Path) -> Result<Vec<EquivCase>, ManifestError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| ManifestError::Io {
        path: shown.clone(),
        source,
    })?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse_manifest(&text, &shown, &base)
}

pub fn parse_manifest(
    text: &str,
    shown: &str,
    base: &Path,
) -> Result<Vec<EquivCase>, ManifestError> {
    let mut cases = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let syntax = |message: String| ManifestError::Syntax {
            path: shown.to_string(),
            line: i + 1,
            message,
        };
        let words: Vec<&str> = line.split_whitespace().collect();
        let (name, left, right, env) = match words.as_slice() {
            ["case", name, left, right] => (name, left, right, None),
            ["case", name, left, right, env] => (name, left, right, Some(*env)),
            _ => {
                return Err(syntax(
                    "expected 'case <name> <left> <right> [bindings]'".into(),
                ))
            }
        };
        let env = match env {
            Some(b) => parse_bindings(b).map_err(syntax)?,
            None => Environment::new(),
        };
        let load = |rel: &str| -> Result<Expr, ManifestError> {
            let p: PathBuf = base.join(rel);
            let shown = p.display().to_string();
            let src = std::fs::read_to_string(&p).map_err(|source| ManifestError::Io {
                path: shown.clone(),
                source,
            })?;
            parse_expr(&src).map_err(|source| ManifestError::Parse {
                path: shown,
                source,
            })
        };
        cases.push(EquivCase::new(*name, load(left)?, load(right)?).with_env(env));
    }
    Ok(cases)
}

/// Parses `X=5,Y='ok'`: variable names bound to literal values.
pub fn parse_bindings(text: &str) -> Result<Environment, String> {
    let mut env = Environment::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| format!("binding '{item}' lacks '='"))?;
        let name = name.trim();
        let starts_ok = name
            .chars()
            .next()
            .is_some_and(|c| c.is_uppercase() || c == '_');
        if !starts_ok || !name.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '@') {
            return Err(format!("'{name}' is not a variable name"));
        }
        let v = parse_value(value.trim()).map_err(|e| format!("binding {name}: {e}"))?;
        if !matches!(v, Value::Literal(_)) {
            return Err(format!("binding {name}: only literals are allowed"));
        }
        env.insert(EnvKey::var(name), v);
    }
    Ok(env)
}

/// One report line per case: `name verdict`.
pub fn report_line(case: &EquivCase, verdict: &EquivVerdict) -> String {
    format!("{} {}", case.name, verdict)
}
