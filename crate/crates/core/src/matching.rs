//! Pattern matching and clause selection.

use crate::ast::{Clause, Expr, Pattern, Var};
use crate::values::Value;

pub type Bindings = Vec<(Var, Value)>;

/// Matches `v` against a linear pattern, returning its variable bindings in
/// left-to-right order. Maps and closures only match a variable pattern.
pub fn match_pattern(v: &Value, p: &Pattern) -> Option<Bindings> {
    let mut out = Vec::new();
    match_into(v, p, &mut out).then_some(out)
}

fn match_into(v: &Value, p: &Pattern, out: &mut Bindings) -> bool {
    match (p, v) {
        (Pattern::Var(x), _) => {
            out.push((x.clone(), v.clone()));
            true
        }
        (Pattern::Literal(l), Value::Literal(l2)) => l == l2,
        (Pattern::List(ph, pt), Value::List(vh, vt)) => {
            match_into(vh, ph, out) && match_into(vt, pt, out)
        }
        (Pattern::Tuple(ps), Value::Tuple(vs)) => {
            ps.len() == vs.len() && ps.iter().zip(vs).all(|(p, v)| match_into(v, p, out))
        }
        _ => false,
    }
}

/// Tries the `i`-th clause: its guard, body and the pattern bindings.
pub fn match_clause<'a>(
    v: &Value,
    cs: &'a [Clause],
    i: usize,
) -> Option<(&'a Expr, &'a Expr, Bindings)> {
    let clause = cs.get(i)?;
    let bindings = match_pattern(v, &clause.pattern)?;
    Some((&clause.guard, &clause.body, bindings))
}

/// True when the pattern contains no variables.
pub fn is_ground(p: &Pattern) -> bool {
    p.variables().is_empty()
}

/// The unique value a ground pattern matches.
pub fn ground_value(p: &Pattern) -> Option<Value> {
    match p {
        Pattern::Var(_) => None,
        Pattern::Literal(l) => Some(Value::Literal(l.clone())),
        Pattern::List(h, t) => Some(Value::list(ground_value(h)?, ground_value(t)?)),
        Pattern::Tuple(ps) => ps
            .iter()
            .map(ground_value)
            .collect::<Option<Vec<_>>>()
            .map(Value::Tuple),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{Expr, Literal};
    use crate::env::Environment;
    use crate::values::ClosureRef;
    use proptest::prelude::*;

    /// Reference matcher: enumerates the sub-patterns paired with sub-values
    /// by walking both trees in lockstep with an explicit work list, without
    /// sharing code with `match_pattern`.
    fn brute_force(v: &Value, p: &Pattern) -> Option<Bindings> {
        let mut work = vec![(p, v)];
        let mut found = Vec::new();
        while let Some((p, v)) = work.pop() {
            match p {
                Pattern::Var(x) => found.push((x.clone(), v.clone())),
                Pattern::Literal(l) => {
                    if *v != Value::Literal(l.clone()) {
                        return None;
                    }
                }
                Pattern::List(ph, pt) => match v {
                    Value::List(vh, vt) => {
                        work.push((pt, vt));
                        work.push((ph, vh));
                    }
                    _ => return None,
                },
                Pattern::Tuple(ps) => match v {
                    Value::Tuple(vs) if vs.len() == ps.len() => {
                        for pair in ps.iter().zip(vs).rev() {
                            work.push(pair);
                        }
                    }
                    _ => return None,
                },
            }
        }
        Some(found)
    }

    #[test]
    fn variable_matches_anything() {
        assert_eq!(
            match_pattern(&Value::int(5), &Pattern::var("X")),
            Some(vec![("X".into(), Value::int(5))])
        );
    }

    #[test]
    fn literal_mismatch() {
        assert_eq!(
            match_pattern(&Value::int(5), &Pattern::Literal(Literal::int(6))),
            None
        );
    }

    #[test]
    fn tuple_componentwise() {
        let v = Value::Tuple(vec![Value::int(1), Value::int(2)]);
        let p = Pattern::Tuple(vec![Pattern::var("A"), Pattern::var("B")]);
        let expected = brute_force(&v, &p);
        assert_eq!(
            expected,
            Some(vec![("A".into(), Value::int(1)), ("B".into(), Value::int(2))])
        );
        assert_eq!(match_pattern(&v, &p), expected);
    }

    #[test]
    fn tuple_arity_mismatch_fails() {
        let v = Value::Tuple(vec![Value::int(1)]);
        let p = Pattern::Tuple(vec![Pattern::var("A"), Pattern::var("B")]);
        assert_eq!(match_pattern(&v, &p), None);
    }

    #[test]
    fn maps_and_closures_only_match_variables() {
        let m = Value::Map(vec![], vec![]);
        assert_eq!(match_pattern(&m, &Pattern::Tuple(vec![])), None);
        assert!(match_pattern(&m, &Pattern::var("M")).is_some());
        let c = Value::closure(ClosureRef::Concrete(Environment::new()), vec![], Expr::int(1));
        assert_eq!(match_pattern(&c, &Pattern::Literal(Literal::EmptyMap)), None);
    }

    #[test]
    fn match_clause_examples() {
        let tt = Expr::atom("true");
        let cs = vec![Clause::new(Pattern::var("X"), tt.clone(), Expr::var("X"))];
        let (g, b, bs) = match_clause(&Value::int(5), &cs, 0).unwrap();
        assert_eq!((g, b), (&tt, &Expr::var("X")));
        assert_eq!(bs, vec![("X".into(), Value::int(5))]);

        let cs6 = vec![Clause::new(Pattern::Literal(Literal::int(6)), tt.clone(), Expr::int(0))];
        assert!(match_clause(&Value::int(5), &cs6, 0).is_none());
        assert!(match_clause(&Value::int(5), &cs, cs.len()).is_none());
    }

    fn arb_literal() -> impl Strategy<Value = Literal> {
        prop_oneof![
            (-3i64..3).prop_map(Literal::int),
            prop::sample::select(vec!["a", "b"]).prop_map(Literal::atom),
            Just(Literal::EmptyList),
            Just(Literal::EmptyTuple),
        ]
    }

    fn arb_value() -> impl Strategy<Value = Value> {
        arb_literal().prop_map(Value::Literal).prop_recursive(3, 16, 3, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(h, t)| Value::list(h, t)),
                prop::collection::vec(inner, 0..3).prop_map(Value::Tuple),
            ]
        })
    }

    /// Patterns with unique variable names (numbered as they are created).
    fn arb_pattern() -> impl Strategy<Value = Pattern> {
        let leaf = prop_oneof![
            Just(Pattern::var("_")),
            arb_literal().prop_map(Pattern::Literal),
        ];
        leaf.prop_recursive(3, 16, 3, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(h, t)| Pattern::list(h, t)),
                prop::collection::vec(inner, 0..3).prop_map(Pattern::Tuple),
            ]
        })
        .prop_map(|p| {
            let mut n = 0;
            rename(p, &mut n)
        })
    }

    fn rename(p: Pattern, n: &mut usize) -> Pattern {
        match p {
            Pattern::Var(_) => {
                *n += 1;
                Pattern::var(format!("V{n}"))
            }
            Pattern::Literal(l) => Pattern::Literal(l),
            Pattern::List(h, t) => {
                let h = rename(*h, n);
                Pattern::list(h, rename(*t, n))
            }
            Pattern::Tuple(ps) => Pattern::Tuple(ps.into_iter().map(|p| rename(p, n)).collect()),
        }
    }

    proptest! {
        #[test]
        fn agrees_with_brute_force(v in arb_value(), p in arb_pattern()) {
            prop_assert_eq!(match_pattern(&v, &p), brute_force(&v, &p));
        }

        #[test]
        fn var_pattern_binds_once(v in arb_value()) {
            let bs = match_pattern(&v, &Pattern::var("X")).unwrap();
            prop_assert_eq!(bs.len(), 1);
        }

        #[test]
        fn bindings_cover_pattern_variables(v in arb_value(), p in arb_pattern()) {
            if let Some(bs) = match_pattern(&v, &p) {
                let names: Vec<&Var> = bs.iter().map(|(x, _)| x).collect();
                prop_assert_eq!(names, p.variables());
            }
        }

        #[test]
        fn ground_patterns_match_by_equality(v in arb_value(), p in arb_pattern()) {
            if is_ground(&p) {
                let expected = ground_value(&p).unwrap() == v;
                let got = match_pattern(&v, &p);
                prop_assert_eq!(got.is_some(), expected);
                if let Some(bs) = got {
                    prop_assert!(bs.is_empty());
                }
            }
        }

        #[test]
        fn matching_a_ground_value_of_itself(p in arb_pattern()) {
            if let Some(v) = ground_value(&p) {
                prop_assert_eq!(match_pattern(&v, &p), Some(vec![]));
            }
        }
    }
}
