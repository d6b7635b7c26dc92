//! Clause selection: first clause whose pattern matches and guard holds.

use core_erlang::{parse_expr, EvalConfig, Evaluator};

fn main() {
    let ev = Evaluator::default();
    let classify = |v: &str| {
        format!(
            "case {v} of \
               {{}} -> 'empty_tuple' \
               [H|T] when 'true' -> {{'head', H}} \
               {{X, 1}} -> 'ends_in_one' \
               {{X, Y}} -> 'pair' \
               {{'k', V, W}} when 'false' -> 'never' \
               Other -> {{'other', Other}} \
             end"
        )
    };
    for v in ["{}", "[7, 8]", "{1, 1}", "{1, 2}", "{'k', 1, 2}", "'atom'"] {
        let out = ev.eval(&EvalConfig::new(parse_expr(&classify(v)).unwrap()));
        match out.value() {
            Some(r) => println!("{v:>12} -> {r}"),
            None => println!("{v:>12} -> {}", out.error().unwrap().kind.name()),
        }
    }
    let stuck = ev.eval(&EvalConfig::new(parse_expr("case 1 of 2 -> 'two' end").unwrap()));
    println!("{:>12} -> {}", "no clause", stuck.error().unwrap().kind.name());
}
