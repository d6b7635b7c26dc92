//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if
//! any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::io::Write;
use std::process::{Command, Stdio};
use std::time::Instant;

use core_erlang::ast::{well_formed, EnvKey};
use core_erlang::checker::{single_field_mutations, validate};
use core_erlang::deriv_io::read_derivation;
use core_erlang::equiv::{
    check_equiv, example1, example4_divergent, generate_example2_instances,
    generate_example3_instances, generate_example4_instances, EquivVerdict, INSTANCE_FUEL,
};
use core_erlang::eval::{builtin_eval, eval_expr, BADARITH};
use core_erlang::gen::Gen;
use core_erlang::printer::format_expr;
use core_erlang::{parse_expr, ClosureRef, EvalConfig, Expr, FunId, Literal, Value};
use num_bigint::BigInt;
use rand::Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn run_source(src: &str, fuel: usize) -> core_erlang::EvalOutcome {
    eval_expr(&EvalConfig::new(parse_expr(src).expect("source parses")).with_fuel(fuel))
}

fn worked_evaluations() -> Outcome {
    let cases = [
        ("let X = 5 in X", 5),
        (
            "let X = 42 in let Y = fun() -> X in let X = 5 in apply Y()",
            42,
        ),
        (
            "let X = 5 in let Y = fun() -> X in let X = 10 in apply Y()",
            5,
        ),
    ];
    for (src, expected) in cases {
        let o = run_source(src, 10_000);
        ensure(o.value() == Some(&Value::int(expected)), || {
            format!("{src} gave {o:?}, expected {expected}")
        })?;
    }
    let o = run_source(
        "letrec 'x'/0 = fun() -> apply 'x'/0() in apply 'x'/0()",
        1000,
    );
    ensure(o.is_out_of_fuel(), || format!("divergent letrec gave {o:?}"))?;
    Ok("5, 42, 5 and OutOfFuel at fuel 1000".into())
}

/// Oracle for `plus`: integer sum, otherwise the error atom.
fn plus_oracle(a: &Value, b: &Value) -> Value {
    match (a, b) {
        (Value::Literal(Literal::Integer(x)), Value::Literal(Literal::Integer(y))) => {
            Value::Literal(Literal::Integer(x + y))
        }
        _ => Value::atom(BADARITH),
    }
}

fn representatives() -> Vec<(&'static str, Vec<Value>)> {
    let big: BigInt = "123456789012345678901234567890".parse().unwrap();
    let body = parse_expr("call 'plus'(X, 1)").unwrap();
    let env: core_erlang::Environment = [(EnvKey::var("X"), Value::int(1))].into_iter().collect();
    let nil = || Value::Literal(Literal::EmptyList);
    let concrete = |params: Vec<String>| {
        Value::closure(ClosureRef::Concrete(env.clone()), params, body.clone())
    };
    let named = |name: &str, arity: usize| {
        let params = (0..arity).map(|i| format!("P{i}")).collect();
        Value::closure(ClosureRef::Named(FunId::new(name, arity)), params, body.clone())
    };
    vec![
        (
            "literal",
            vec![Value::int(0), Value::int(-7), Value::int(big), Value::atom("ok"), nil()],
        ),
        (
            "closure",
            vec![
                concrete(vec![]),
                concrete(vec!["X".into()]),
                Value::closure(ClosureRef::Concrete(Default::default()), vec![], Expr::int(3)),
                named("f", 1),
                named("g", 0),
            ],
        ),
        (
            "list",
            vec![
                Value::list(Value::int(1), nil()),
                Value::list(Value::int(1), Value::int(2)),
                Value::list(Value::atom("a"), Value::list(Value::atom("b"), nil())),
                Value::list(nil(), nil()),
                Value::list(Value::Tuple(vec![]), nil()),
            ],
        ),
        (
            "tuple",
            vec![
                Value::Tuple(vec![]),
                Value::Tuple(vec![Value::int(1)]),
                Value::Tuple(vec![Value::int(1), Value::int(2)]),
                Value::Tuple(vec![Value::atom("x"), nil(), Value::Tuple(vec![])]),
                Value::Tuple(vec![concrete(vec![])]),
            ],
        ),
        (
            "map",
            vec![
                Value::Map(vec![], vec![]),
                Value::Map(vec![Value::int(1)], vec![Value::int(2)]),
                Value::Map(vec![Value::atom("a"), Value::atom("b")], vec![Value::int(1), Value::int(2)]),
                Value::Map(vec![Value::int(1), Value::int(1)], vec![Value::int(2), Value::int(3)]),
                Value::Map(vec![Value::Tuple(vec![])], vec![named("f", 1)]),
            ],
        ),
    ]
}

fn commutativity() -> Outcome {
    let reps = representatives();
    let mut pairs = 0;
    let mut cells = BTreeSet::new();
    for (ka, va) in &reps {
        for (kb, vb) in &reps {
            for a in va {
                for b in vb {
                    let ab = builtin_eval("plus", &[a.clone(), b.clone()]);
                    let ba = builtin_eval("plus", &[b.clone(), a.clone()]);
                    ensure(ab == ba, || format!("plus({a}, {b}) = {ab} but plus({b}, {a}) = {ba}"))?;
                    ensure(ab == plus_oracle(a, b), || format!("plus({a}, {b}) = {ab}"))?;
                    pairs += 1;
                }
            }
            ensure(va.len() == 5 && vb.len() == 5, || format!("{ka}/{kb} is not 5x5"))?;
            cells.insert((*ka, *kb));
        }
    }
    ensure(cells.len() == 25, || format!("grid has {} cells", cells.len()))?;
    let mut g = Gen::new(0xC0FFEE);
    for _ in 0..1000 {
        let (a, b) = if g.rng().gen_bool(0.3) {
            (Value::int(g.int()), Value::int(g.int()))
        } else {
            (g.value(3), g.value(3))
        };
        let ab = builtin_eval("plus", &[a.clone(), b.clone()]);
        let ba = builtin_eval("plus", &[b.clone(), a.clone()]);
        ensure(ab == ba, || format!("plus({a}, {b}) is not commutative"))?;
    }
    Ok(format!("25 constructor pairs at 5x5 ({pairs} pairs) and 1000 seeded pairs"))
}

fn determinism() -> Outcome {
    const F: usize = 1000;
    let mut g = Gen::new(2024);
    let (mut both, mut validated) = (0, 0);
    for i in 0..500 {
        let e = g.program(6);
        let at_f = eval_expr(&EvalConfig::new(e.clone()).with_fuel(F));
        let at_2f = eval_expr(&EvalConfig::new(e.clone()).with_fuel(2 * F));
        for o in [&at_f, &at_2f] {
            if let Some(d) = o.derivation() {
                let r = validate(d);
                ensure(r.valid(), || format!("program {i} derivation invalid: {r}"))?;
                ensure(Some(&d.result) == o.value(), || format!("program {i} root mismatch"))?;
                validated += 1;
            }
        }
        if let (Some(a), Some(b)) = (at_f.value(), at_2f.value()) {
            ensure(a == b, || format!("program {i}: {a} at F but {b} at 2F"))?;
            both += 1;
        }
        if at_f.is_success() {
            ensure(at_2f.is_success(), || format!("program {i} lost its result with more fuel"))?;
        }
    }
    // golden trees from the checked-in derivation files
    let mut golden = 0;
    let mut mutations = 0;
    let mut files: Vec<_> = std::fs::read_dir(common::golden_dir())
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    for path in files {
        let d = read_derivation(&std::fs::read_to_string(&path).unwrap())
            .map_err(|e| format!("{}: {e}", path.display()))?;
        ensure(validate(&d).valid(), || format!("{} is invalid", path.display()))?;
        let ms = single_field_mutations(&d);
        if ms.len() < 20 || d.premises.is_empty() {
            continue;
        }
        for m in &ms {
            ensure(!validate(&m.tree).valid(), || {
                format!("{}: {:?} mutation at {:?} accepted", path.display(), m.field, m.path)
            })?;
        }
        golden += 1;
        mutations += ms.len();
    }
    ensure(golden >= 10, || format!("only {golden} golden trees with >= 20 mutations"))?;
    Ok(format!(
        "{both}/500 agree at F and 2F, {validated} derivations valid, {mutations} mutations over {golden} golden trees rejected"
    ))
}

fn equivalences() -> Outcome {
    let v = check_equiv(&example1(), 10_000);
    ensure(v == EquivVerdict::Equivalent(Value::int(11)), || format!("example 1: {v}"))?;
    for (label, cases) in [
        ("example 2", generate_example2_instances(42, 100)),
        ("example 3", generate_example3_instances(42, 100)),
        ("example 4", generate_example4_instances(42, 100)),
    ] {
        ensure(cases.len() == 100, || format!("{label}: {} cases", cases.len()))?;
        for c in &cases {
            let v = check_equiv(c, INSTANCE_FUEL);
            ensure(v.is_equivalent(), || {
                format!(
                    "{label} {}: {v}\n  left  {}\n  right {}",
                    c.name,
                    format_expr(&c.left),
                    format_expr(&c.right)
                )
            })?;
        }
    }
    let v = check_equiv(&example4_divergent(), 10_000);
    ensure(v == EquivVerdict::Divergent, || format!("divergent wrapping: {v}"))?;
    Ok("Equivalent(11); 3x100 generated instances Equivalent; divergent instance Divergent".into())
}

fn parser() -> Outcome {
    let corpus = common::corpus();
    ensure(corpus.len() >= 9, || format!("only {} corpus files", corpus.len()))?;
    for p in &corpus {
        let e = parse_expr(&p.source).map_err(|e| format!("{}: {e}", p.name))?;
        ensure(well_formed(&e).is_empty(), || format!("{} is ill-formed", p.name))?;
        ensure(parse_expr(&format_expr(&e)).as_ref() == Ok(&e), || {
            format!("{} does not survive format", p.name)
        })?;
    }
    let mut g = Gen::new(77);
    for i in 0..1000 {
        let e: Expr = g.expr(5);
        let text = format_expr(&e);
        let back = parse_expr(&text).map_err(|err| format!("case {i}: {err}\n  {text}"))?;
        ensure(back == e, || format!("case {i} changed: {text}"))?;
    }
    Ok(format!("{} corpus files parse; 1000 round trips", corpus.len()))
}

fn environment_laws() -> Outcome {
    let mut g = Gen::new(99);
    let keys: Vec<EnvKey> = ["X", "Y", "Z", "A"]
        .iter()
        .map(|v| EnvKey::var(*v))
        .chain([EnvKey::FunId(FunId::new("f", 0)), EnvKey::FunId(FunId::new("f", 1))])
        .collect();
    for seq in 0..1000 {
        let mut env = core_erlang::Environment::new();
        // reference model: a plain association list
        let mut model: Vec<(EnvKey, Value)> = Vec::new();
        let ops = g.rng().gen_range(1..20);
        for _ in 0..ops {
            let k = keys[g.rng().gen_range(0..keys.len())].clone();
            let v = g.value(2);
            let before = env.clone();
            env.insert(k.clone(), v.clone());
            match model.iter_mut().find(|(mk, _)| *mk == k) {
                Some(slot) => slot.1 = v.clone(),
                None => model.push((k.clone(), v.clone())),
            }
            ensure(env.get(&k) == Some(&v), || format!("sequence {seq}: read-your-write"))?;
            for other in keys.iter().filter(|o| **o != k) {
                ensure(env.get(other) == before.get(other), || {
                    format!("sequence {seq}: frame broken at {other}")
                })?;
            }
            let order: Vec<&EnvKey> = env.iter().map(|(k, _)| k).collect();
            let expected: Vec<&EnvKey> = model.iter().map(|(k, _)| k).collect();
            ensure(order == expected, || format!("sequence {seq}: replace-on-insert order"))?;
            ensure(env.iter().eq(model.iter()), || format!("sequence {seq}: contents differ"))?;
        }
    }
    Ok("1000 seeded sequences".into())
}

fn pipeline() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_core-erlang");
    let mut checked = 0;
    for p in common::corpus() {
        let eval = Command::new(bin)
            .args(["eval", p.path.to_str().unwrap()])
            .output()
            .map_err(|e| e.to_string())?;
        if !eval.status.success() {
            continue;
        }
        let trace = Command::new(bin)
            .args(["trace", p.path.to_str().unwrap()])
            .output()
            .map_err(|e| e.to_string())?;
        ensure(trace.status.success(), || format!("{}: trace failed", p.name))?;
        let mut check = Command::new(bin)
            .args(["check", "-"])
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .map_err(|e| e.to_string())?;
        check
            .stdin
            .take()
            .unwrap()
            .write_all(&trace.stdout)
            .map_err(|e| e.to_string())?;
        let out = check.wait_with_output().map_err(|e| e.to_string())?;
        ensure(out.status.success(), || {
            format!("{}: check said {}", p.name, String::from_utf8_lossy(&out.stdout))
        })?;
        checked += 1;
    }
    ensure(checked > 0, || "no corpus program evaluated".into())?;
    Ok(format!("{checked} corpus programs: trace | check exits 0"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("worked evaluations", worked_evaluations),
        ("commutativity of plus", commutativity),
        ("determinism and derivation checking", determinism),
        ("equivalence examples", equivalences),
        ("parser", parser),
        ("environment laws", environment_laws),
        ("trace/check pipeline", pipeline),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = run();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail}) [{secs:.2}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL {why} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.2}s",
        criteria.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
