//! Evaluate a program given on the command line (or a default one).
//!
//! cargo run --example evaluate -- "let X = 5 in call 'plus'(X, 1)"

use core_erlang::{parse_expr, EvalConfig, Evaluator};

fn main() {
    let src = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "let <X, Y> = <5, 6> in call 'plus'(X, Y)".to_string());
    let expr = match parse_expr(&src) {
        Ok(e) => e,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(1);
        }
    };
    let outcome = Evaluator::default().eval(&EvalConfig::new(expr).with_fuel(10_000));
    match outcome.into_result() {
        Ok((value, derivation)) => {
            println!("{value}");
            println!("derivation: {} nodes, height {}", derivation.size(), derivation.height());
        }
        Err(e) => println!("{}", e.kind.name()),
    }
}
