//! Compare pairs of expressions by evaluating both sides.

use core_erlang::equiv::{
    check_equiv, example1, example4_divergent, generate_example2_instances,
    generate_example3_instances, generate_example4_instances, INSTANCE_FUEL,
};

fn main() {
    println!("swap of values: {}", check_equiv(&example1(), 10_000));
    for (label, cases) in [
        ("swap of expressions", generate_example2_instances(7, 50)),
        ("simultaneous let", generate_example3_instances(7, 50)),
        ("fun wrapping", generate_example4_instances(7, 50)),
    ] {
        let equivalent = cases
            .iter()
            .filter(|c| check_equiv(c, INSTANCE_FUEL).is_equivalent())
            .count();
        println!("{label}: {equivalent}/{} equivalent", cases.len());
    }
    println!("divergent wrapping: {}", check_equiv(&example4_divergent(), 2_000));
}
