//! The semantic domain: normal forms that expressions evaluate to.

use std::fmt;

use num_bigint::BigInt;

use crate::ast::{Expr, FunId, Literal, Var};
use crate::env::Environment;

/// Where a closure finds its evaluation environment.
///
/// `fun` expressions capture the current environment directly. Functions
/// bound by `letrec` only carry their own identifier and look their
/// environment up in the closure environment when applied, which keeps
/// recursive closures finite.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ClosureRef {
    Concrete(Environment),
    Named(FunId),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Literal(Literal),
    Closure {
        env: ClosureRef,
        params: Vec<Var>,
        body: Expr,
    },
    List(Box<Value>, Box<Value>),
    Tuple(Vec<Value>),
    /// Keys and values in evaluation order; no deduplication or sorting.
    Map(Vec<Value>, Vec<Value>),
}

impl Value {
    pub fn int(n: impl Into<BigInt>) -> Self {
        Value::Literal(Literal::int(n))
    }

    pub fn atom(text: impl Into<String>) -> Self {
        Value::Literal(Literal::atom(text))
    }

    pub fn list(head: Value, tail: Value) -> Self {
        Value::List(Box::new(head), Box::new(tail))
    }

    pub fn closure(env: ClosureRef, params: Vec<Var>, body: Expr) -> Self {
        Value::Closure { env, params, body }
    }

    /// `'true'`
    pub fn tt() -> Self {
        Value::atom("true")
    }

    /// `'false'`
    pub fn ff() -> Self {
        Value::atom("false")
    }

    pub fn as_int(&self) -> Option<&BigInt> {
        match self {
            Value::Literal(Literal::Integer(n)) => Some(n),
            _ => None,
        }
    }

    pub fn is_closure(&self) -> bool {
        matches!(self, Value::Closure { .. })
    }
}

/// Structural equality. Closures compare by reference, parameters and body;
/// concrete environments compare as ordered association lists.
pub fn value_eq(a: &Value, b: &Value) -> bool {
    a == b
}

/// Short form used for user-facing output. Closures are abbreviated to
/// `#closure<Params>/env` or `#closure<Params>/'f'/n`; use
/// [`crate::printer::value_term`] for the lossless form.
impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::printer::value_short(self))
    }
}
