//! Variable environments and closure environments.
//!
//! Both are ordered association lists. Inserting an existing key replaces
//! its binding in place, so every key occurs at most once and the order of
//! first insertion is preserved. Nothing is ever removed.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use crate::ast::EnvKey;
use crate::ast::{FunDef, FunId, Var};
use crate::values::{ClosureRef, Value};

/// Two parallel lists that were expected to have the same length did not.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("expected {expected} values, got {got}")]
pub struct ArityError {
    pub expected: usize,
    pub got: usize,
}

/// The variable environment: `(Var | FunId) -> Value`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Environment {
    entries: Arc<Vec<(EnvKey, Value)>>,
}

impl Environment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(EnvKey, Value)> {
        self.entries.iter()
    }

    pub fn get(&self, key: &EnvKey) -> Option<&Value> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn insert(&mut self, key: EnvKey, value: Value) {
        let entries = Arc::make_mut(&mut self.entries);
        match entries.iter_mut().find(|(k, _)| *k == key) {
            Some(slot) => slot.1 = value,
            None => entries.push((key, value)),
        }
    }
}

impl FromIterator<(EnvKey, Value)> for Environment {
    fn from_iter<I: IntoIterator<Item = (EnvKey, Value)>>(iter: I) -> Self {
        let mut env = Environment::new();
        for (k, v) in iter {
            env.insert(k, v);
        }
        env
    }
}

impl fmt::Display for Environment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::printer::env_term(self))
    }
}

/// The closure environment: `FunId -> Environment`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ClosureEnv {
    entries: Arc<Vec<(FunId, Environment)>>,
}

impl ClosureEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(FunId, Environment)> {
        self.entries.iter()
    }

    pub fn get(&self, fid: &FunId) -> Option<&Environment> {
        self.entries.iter().find(|(k, _)| k == fid).map(|(_, e)| e)
    }

    pub fn set(&mut self, fid: FunId, env: Environment) {
        let entries = Arc::make_mut(&mut self.entries);
        match entries.iter_mut().find(|(k, _)| *k == fid) {
            Some(slot) => slot.1 = env,
            None => entries.push((fid, env)),
        }
    }
}

impl FromIterator<(FunId, Environment)> for ClosureEnv {
    fn from_iter<I: IntoIterator<Item = (FunId, Environment)>>(iter: I) -> Self {
        let mut clos = ClosureEnv::new();
        for (k, e) in iter {
            clos.set(k, e);
        }
        clos
    }
}

impl fmt::Display for ClosureEnv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::printer::clos_term(self))
    }
}

pub fn get_value<'a>(env: &'a Environment, key: &EnvKey) -> Option<&'a Value> {
    env.get(key)
}

pub fn insert_value(env: &Environment, key: EnvKey, value: Value) -> Environment {
    let mut out = env.clone();
    out.insert(key, value);
    out
}

/// Left fold of [`insert_value`] over `bindings`.
pub fn add_bindings(bindings: &[(Var, Value)], env: &Environment) -> Environment {
    let mut out = env.clone();
    for (var, value) in bindings {
        out.insert(EnvKey::Var(var.clone()), value.clone());
    }
    out
}

pub fn append_vars_to_env(
    vars: &[Var],
    vals: &[Value],
    env: &Environment,
) -> Result<Environment, ArityError> {
    if vars.len() != vals.len() {
        return Err(ArityError {
            expected: vars.len(),
            got: vals.len(),
        });
    }
    let mut out = env.clone();
    for (var, value) in vars.iter().zip(vals) {
        out.insert(EnvKey::Var(var.clone()), value.clone());
    }
    Ok(out)
}

/// Binds each `fnames[i]` to a closure over `funs[i]` that refers to its
/// evaluation environment by name.
pub fn append_funs_to_env(
    fnames: &[FunId],
    funs: &[FunDef],
    env: &Environment,
) -> Result<Environment, ArityError> {
    if fnames.len() != funs.len() {
        return Err(ArityError {
            expected: fnames.len(),
            got: funs.len(),
        });
    }
    let mut out = env.clone();
    for (fid, def) in fnames.iter().zip(funs) {
        let closure = Value::closure(
            ClosureRef::Named(fid.clone()),
            def.params.clone(),
            def.body.clone(),
        );
        out.insert(EnvKey::FunId(fid.clone()), closure);
    }
    Ok(out)
}

pub fn get_env(r: &ClosureRef, clos: &ClosureEnv) -> Environment {
    match r {
        ClosureRef::Concrete(env) => env.clone(),
        ClosureRef::Named(fid) => get_env_from_closure(fid, clos),
    }
}

/// The environment bound to `fid`, or the empty environment.
pub fn get_env_from_closure(fid: &FunId, clos: &ClosureEnv) -> Environment {
    clos.get(fid).cloned().unwrap_or_default()
}

pub fn set_closure(clos: &ClosureEnv, fid: FunId, env: Environment) -> ClosureEnv {
    let mut out = clos.clone();
    out.set(fid, env);
    out
}

pub fn append_funs_to_closure(fnames: &[FunId], clos: &ClosureEnv, env: &Environment) -> ClosureEnv {
    let mut out = clos.clone();
    for fid in fnames {
        out.set(fid.clone(), env.clone());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::Expr;
    use proptest::prelude::*;

    fn x() -> EnvKey {
        EnvKey::var("X")
    }

    fn env_of(pairs: &[(&str, i64)]) -> Environment {
        pairs
            .iter()
            .map(|(k, v)| (EnvKey::var(*k), Value::int(*v)))
            .collect()
    }

    fn keys(env: &Environment) -> Vec<EnvKey> {
        env.iter().map(|(k, _)| k.clone()).collect()
    }

    #[test]
    fn get_value_examples() {
        assert_eq!(get_value(&env_of(&[("X", 5)]), &x()), Some(&Value::int(5)));
        assert_eq!(get_value(&Environment::new(), &x()), None);
        let replaced = insert_value(&env_of(&[("X", 5)]), x(), Value::int(10));
        assert_eq!(get_value(&replaced, &x()), Some(&Value::int(10)));
    }

    #[test]
    fn insert_value_examples() {
        assert_eq!(
            insert_value(&Environment::new(), x(), Value::int(5)),
            env_of(&[("X", 5)])
        );
        assert_eq!(
            insert_value(&env_of(&[("X", 5)]), x(), Value::int(10)),
            env_of(&[("X", 10)])
        );
        assert_eq!(
            insert_value(&env_of(&[("X", 5)]), EnvKey::var("Y"), Value::int(6)),
            env_of(&[("X", 5), ("Y", 6)])
        );
    }

    #[test]
    fn replacement_keeps_position() {
        let env = env_of(&[("X", 1), ("Y", 2), ("Z", 3)]);
        let env = insert_value(&env, EnvKey::var("Y"), Value::int(20));
        assert_eq!(keys(&env), vec![x(), EnvKey::var("Y"), EnvKey::var("Z")]);
        assert_eq!(env.get(&EnvKey::var("Y")), Some(&Value::int(20)));
    }

    #[test]
    fn add_bindings_examples() {
        let gamma = env_of(&[("Q", 1)]);
        assert_eq!(add_bindings(&[], &gamma), gamma);
        let two = [("X".to_string(), Value::int(5)), ("Y".to_string(), Value::int(6))];
        assert_eq!(add_bindings(&two, &Environment::new()), env_of(&[("X", 5), ("Y", 6)]));
        let dup = [("X".to_string(), Value::int(5)), ("X".to_string(), Value::int(7))];
        // direct fold of insert_value
        let folded = dup
            .iter()
            .fold(Environment::new(), |e, (k, v)| insert_value(&e, EnvKey::var(k), v.clone()));
        assert_eq!(add_bindings(&dup, &Environment::new()), folded);
        assert_eq!(folded, env_of(&[("X", 7)]));
    }

    #[test]
    fn append_vars_examples() {
        let empty = Environment::new();
        assert_eq!(
            append_vars_to_env(&["X".into()], &[Value::int(5)], &empty),
            Ok(env_of(&[("X", 5)]))
        );
        let gamma = env_of(&[("A", 1)]);
        assert_eq!(append_vars_to_env(&[], &[], &gamma), Ok(gamma));
        assert_eq!(
            append_vars_to_env(&["X".into(), "Y".into()], &[Value::int(6), Value::int(5)], &empty),
            Ok(env_of(&[("X", 6), ("Y", 5)]))
        );
        assert_eq!(
            append_vars_to_env(&["X".into()], &[], &empty),
            Err(ArityError { expected: 1, got: 0 })
        );
    }

    #[test]
    fn append_funs_examples() {
        let xf = FunId::new("x", 0);
        let body = Expr::apply(Expr::FunSig(xf.clone()), vec![]);
        let env = append_funs_to_env(
            &[xf.clone()],
            &[FunDef::new(vec![], body.clone())],
            &Environment::new(),
        )
        .unwrap();
        let expected: Environment = [(
            EnvKey::FunId(xf.clone()),
            Value::closure(ClosureRef::Named(xf), vec![], body),
        )]
        .into_iter()
        .collect();
        assert_eq!(env, expected);

        let gamma = env_of(&[("A", 1)]);
        assert_eq!(append_funs_to_env(&[], &[], &gamma), Ok(gamma));

        let f = FunId::new("f", 1);
        let env = append_funs_to_env(
            &[f.clone()],
            &[FunDef::new(vec!["A".into()], Expr::var("A"))],
            &env_of(&[("X", 5)]),
        )
        .unwrap();
        let mut expected = env_of(&[("X", 5)]);
        expected.insert(
            EnvKey::FunId(f.clone()),
            Value::closure(ClosureRef::Named(f), vec!["A".into()], Expr::var("A")),
        );
        assert_eq!(env, expected);

        assert!(append_funs_to_env(&[FunId::new("f", 0)], &[], &Environment::new()).is_err());
    }

    #[test]
    fn get_env_examples() {
        let g42 = env_of(&[("X", 42)]);
        assert_eq!(get_env(&ClosureRef::Concrete(g42.clone()), &ClosureEnv::new()), g42);
        let xf = FunId::new("x", 0);
        let clos = set_closure(&ClosureEnv::new(), xf.clone(), g42.clone());
        assert_eq!(get_env(&ClosureRef::Named(xf), &clos), g42);
        assert!(get_env(&ClosureRef::Named(FunId::new("g", 1)), &ClosureEnv::new()).is_empty());
    }

    #[test]
    fn get_env_from_closure_examples() {
        let a1 = env_of(&[("A", 1)]);
        let clos = set_closure(&ClosureEnv::new(), FunId::new("x", 0), a1.clone());
        assert_eq!(get_env_from_closure(&FunId::new("x", 0), &clos), a1);
        assert!(get_env_from_closure(&FunId::new("x", 0), &ClosureEnv::new()).is_empty());
        assert!(get_env_from_closure(&FunId::new("x", 1), &clos).is_empty());
    }

    #[test]
    fn set_closure_examples() {
        let f = FunId::new("f", 0);
        let g = FunId::new("g", 0);
        let g1 = env_of(&[("A", 1)]);
        let g2 = env_of(&[("B", 2)]);
        let one = set_closure(&ClosureEnv::new(), f.clone(), g1.clone());
        assert_eq!(one.iter().cloned().collect::<Vec<_>>(), vec![(f.clone(), g1.clone())]);
        let over = set_closure(&one, f.clone(), g2.clone());
        assert_eq!(over.iter().cloned().collect::<Vec<_>>(), vec![(f.clone(), g2)]);
        let both = set_closure(&one, g.clone(), g1.clone());
        assert_eq!(
            both.iter().cloned().collect::<Vec<_>>(),
            vec![(f, g1.clone()), (g, g1)]
        );
    }

    #[test]
    fn append_funs_to_closure_examples() {
        let f = FunId::new("f", 0);
        let g = FunId::new("g", 0);
        let gamma = env_of(&[("A", 1)]);
        let delta = append_funs_to_closure(&[f.clone()], &ClosureEnv::new(), &gamma);
        assert_eq!(delta.get(&f), Some(&gamma));
        assert_eq!(append_funs_to_closure(&[], &delta, &gamma), delta);
        let two = append_funs_to_closure(&[f.clone(), g.clone()], &ClosureEnv::new(), &gamma);
        let stepwise = set_closure(&set_closure(&ClosureEnv::new(), f, gamma.clone()), g, gamma);
        assert_eq!(two, stepwise);
    }

    fn arb_key() -> impl Strategy<Value = EnvKey> {
        prop_oneof![
            prop::sample::select(vec!["A", "B", "C", "X"]).prop_map(EnvKey::var),
            (prop::sample::select(vec!["f", "g"]), 0usize..2)
                .prop_map(|(n, a)| EnvKey::FunId(FunId::new(n, a))),
        ]
    }

    proptest! {
        #[test]
        fn keys_stay_unique(ops in prop::collection::vec((arb_key(), -5i64..5), 0..30)) {
            let env = ops.into_iter().fold(Environment::new(), |e, (k, v)| insert_value(&e, k, Value::int(v)));
            let ks = keys(&env);
            let mut dedup = ks.clone();
            dedup.sort();
            dedup.dedup();
            prop_assert_eq!(ks.len(), dedup.len());
        }

        #[test]
        fn read_your_write_and_frame(
            ops in prop::collection::vec((arb_key(), -5i64..5), 0..20),
            k in arb_key(), other in arb_key(), v in -5i64..5,
        ) {
            let env = ops.into_iter().fold(Environment::new(), |e, (k, v)| insert_value(&e, k, Value::int(v)));
            let updated = insert_value(&env, k.clone(), Value::int(v));
            prop_assert_eq!(get_value(&updated, &k), Some(&Value::int(v)));
            if other != k {
                prop_assert_eq!(get_value(&updated, &other), get_value(&env, &other));
            }
        }

        #[test]
        fn concrete_refs_ignore_closure_env(pairs in prop::collection::vec((-3i64..3, 0usize..2), 0..5)) {
            let gamma: Environment = pairs.iter().enumerate()
                .map(|(i, (v, _))| (EnvKey::var(format!("V{i}")), Value::int(*v))).collect();
            let delta: ClosureEnv = pairs.iter()
                .map(|(_, a)| (FunId::new("f", *a), Environment::new())).collect();
            prop_assert_eq!(get_env(&ClosureRef::Concrete(gamma.clone()), &delta), gamma);
        }

        #[test]
        fn letrec_closures_never_embed_environments(arities in prop::collection::vec(0usize..3, 0..4)) {
            let fnames: Vec<FunId> = arities.iter().enumerate().map(|(i, a)| FunId::new(format!("f{i}"), *a)).collect();
            let funs: Vec<FunDef> = arities.iter()
                .map(|a| FunDef::new((0..*a).map(|i| format!("P{i}")).collect(), Expr::int(0))).collect();
            let env = append_funs_to_env(&fnames, &funs, &env_of(&[("X", 1)])).unwrap();
            for (k, v) in env.iter() {
                if let EnvKey::FunId(_) = k {
                    let named = matches!(v, Value::Closure { env: ClosureRef::Named(_), .. });
                    prop_assert!(named);
                }
            }
        }
    }
}
