//! Fuel bounds derivation height, so non-terminating programs stop.

use core_erlang::{parse_expr, EvalConfig, Evaluator};

fn main() {
    let ev = Evaluator::default();
    let diverges = parse_expr("letrec 'x'/0 = fun() -> apply 'x'/0() in apply 'x'/0()").unwrap();
    let countdown = parse_expr(
        "letrec 'd'/1 = fun(N) -> case N of 0 -> 'done'  M -> apply 'd'/1(call 'plus'(M, -1)) end \
         in apply 'd'/1(50)",
    )
    .unwrap();
    for fuel in [10, 100, 1_000] {
        let a = ev.eval(&EvalConfig::new(diverges.clone()).with_fuel(fuel));
        let b = ev.eval(&EvalConfig::new(countdown.clone()).with_fuel(fuel));
        let show = |o: &core_erlang::EvalOutcome| match o.value() {
            Some(v) => v.to_string(),
            None => o.error().unwrap().kind.name().to_string(),
        };
        println!("fuel {fuel:>5}: loop -> {:<10} countdown -> {}", show(&a), show(&b));
    }
}
