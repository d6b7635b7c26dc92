//! Static binding: a closure sees the environment it was built in.

use core_erlang::printer::value_term;
use core_erlang::{parse_expr, EvalConfig, Evaluator};

const PROGRAMS: &[(&str, &str)] = &[
    ("captured", "let X = 42 in let Y = fun() -> X in let X = 5 in apply Y()"),
    ("shadowed", "let X = 5 in let Y = fun() -> X in let X = 10 in apply Y()"),
    (
        "recursive",
        "letrec 'count'/1 = fun(N) -> case N of 0 when 'true' -> 'done'  M when 'true' -> apply 'count'/1(call 'plus'(M, -1)) end in apply 'count'/1(3)",
    ),
    ("value", "letrec 'f1'/0 = fun() -> 1 in 'f1'/0"),
];

fn main() {
    let ev = Evaluator::default();
    for (name, src) in PROGRAMS {
        let out = ev.eval(&EvalConfig::new(parse_expr(src).unwrap()));
        let value = out.value().expect("program succeeds");
        println!("{name:>9}: {value}");
        if value.is_closure() {
            println!("{:>9}  {}", "", value_term(value));
        }
    }
}
