//! Parse source text and print its canonical form.

use core_erlang::ast::well_formed;
use core_erlang::parse_expr;
use core_erlang::printer::format_expr;

fn main() {
    let sources = [
        "let X=5 in\n  X  % trailing comment",
        "case [1,2|T] of [H|_] -> H end",
        "letrec 'f'/1 = fun(N) -> N 'g'/0 = fun() -> 'ok' in apply 'f'/1(1)",
        "~{'a' => 1, 'b' => {}}~",
        "fun(X, X) -> X",
        "let X = in X",
    ];
    for src in sources {
        match parse_expr(src) {
            Ok(e) => {
                println!("{}", format_expr(&e));
                for d in well_formed(&e) {
                    println!("  warning: {d}");
                }
            }
            Err(e) => println!("error at {e}"),
        }
    }
}
