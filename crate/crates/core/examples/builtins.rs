//! The builtin registry: `plus` ships by default, more can be registered.

use core_erlang::eval::{BADARITH, UNDEF};
use core_erlang::{parse_expr, Builtins, EvalConfig, Evaluator, Value};

fn times(vals: &[Value]) -> Value {
    match vals {
        [a, b] => match (a.as_int(), b.as_int()) {
            (Some(x), Some(y)) => Value::int(x * y),
            _ => Value::atom(BADARITH),
        },
        _ => Value::atom(UNDEF),
    }
}

fn main() {
    let mut builtins = Builtins::default();
    builtins.register("times", times);
    let ev = Evaluator::new(builtins);
    println!("registered: {}", ev.builtins().names().collect::<Vec<_>>().join(", "));
    for src in [
        "call 'plus'(20, 22)",
        "call 'plus'(1, 'one')",
        "call 'times'(6, 7)",
        "call 'erlang':'times'(call 'plus'(1, 1), 21)",
        "call 'minus'(1, 1)",
    ] {
        let out = ev.eval(&EvalConfig::new(parse_expr(src).unwrap()));
        println!("{src:>45} = {}", out.value().unwrap());
    }
}
