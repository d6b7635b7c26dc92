//! A big-step semantics for a sequential subset of Core Erlang, with
//! derivation trees, an independent derivation checker and an
//! expression equivalence harness.

pub mod ast;
pub mod checker;
pub mod cli;
pub mod deriv_io;
pub mod env;
pub mod equiv;
pub mod eval;
pub mod gen;
pub mod matching;
pub mod parser;
pub mod printer;
pub mod values;

pub use ast::{Clause, EnvKey, Expr, FunDef, FunId, Literal, Pattern, Var};
pub use env::{ClosureEnv, Environment};
pub use eval::{Builtins, DerivationNode, EvalConfig, EvalError, EvalErrorKind, EvalOutcome, Evaluator, Rule};
pub use parser::{parse_expr, parse_value, ParseError};
pub use values::{ClosureRef, Value};
