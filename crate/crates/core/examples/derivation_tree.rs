//! Build a derivation, print it, read it back and check it.

use core_erlang::checker::validate;
use core_erlang::deriv_io::{read_derivation, write_derivation};
use core_erlang::{parse_expr, DerivationNode, EvalConfig, Evaluator};

fn outline(d: &DerivationNode, depth: usize) {
    println!("{:indent$}{} => {}", "", d.rule.name(), d.result, indent = depth * 2);
    for p in &d.premises {
        outline(p, depth + 1);
    }
}

fn main() {
    let src = "case {1, 2} of {A, 1} when 'true' -> A  {A, B} when 'true' -> call 'plus'(A, B) end";
    let out = Evaluator::default().eval(&EvalConfig::new(parse_expr(src).unwrap()));
    let d = out.derivation().expect("evaluation succeeds");
    outline(d, 0);

    let text = write_derivation(d);
    println!("\n{text}");
    let back = read_derivation(&text).expect("own output reads back");
    assert_eq!(&back, d);
    println!("check: {}", validate(&back));
}
