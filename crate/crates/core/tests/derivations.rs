//! Golden derivation trees and the text format.

mod common;

use core_erlang::checker::{node_at, single_field_mutations, validate};
use core_erlang::deriv_io::{read_derivation, write_derivation};
use core_erlang::eval::{eval_expr, Rule};
use core_erlang::{parse_expr, EvalConfig};

fn golden_text(name: &str) -> Option<String> {
    std::fs::read_to_string(common::golden_dir().join(format!("{name}.deriv"))).ok()
}

#[test]
fn every_successful_program_has_a_golden_tree() {
    let mut seen = 0;
    for p in common::corpus() {
        let out = eval_expr(&EvalConfig::new(parse_expr(&p.source).unwrap()));
        let Some(d) = out.derivation() else {
            assert!(golden_text(&p.name).is_none(), "{} failed but has a golden tree", p.name);
            continue;
        };
        let golden = golden_text(&p.name).unwrap_or_else(|| panic!("no golden tree for {}", p.name));
        assert_eq!(write_derivation(d), golden, "{} drifted from its golden tree", p.name);
        seen += 1;
    }
    assert!(seen >= 10);
}

#[test]
fn golden_trees_round_trip_and_validate() {
    for entry in std::fs::read_dir(common::golden_dir()).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let d = read_derivation(&text).unwrap();
        assert_eq!(write_derivation(&d), text, "{}", path.display());
        let report = validate(&d);
        assert!(report.valid(), "{}: {report}", path.display());
        assert!(d.height() <= d.size());
    }
}

#[test]
fn mutations_point_at_the_mutated_node() {
    let text = golden_text("case_clauses").unwrap();
    let d = read_derivation(&text).unwrap();
    for m in single_field_mutations(&d) {
        let report = validate(&m.tree);
        assert!(!report.valid(), "{:?} at {:?} accepted", m.field, m.path);
        assert!(node_at(&m.tree, &m.path).is_some());
        // a result change may also surface at the parent, never below the node
        assert!(
            report.violations.iter().any(|v| m.path.starts_with(&v.path)),
            "{:?} at {:?}: {report}",
            m.field,
            m.path
        );
    }
}

#[test]
fn root_rule_matches_expression() {
    for entry in std::fs::read_dir(common::golden_dir()).unwrap() {
        let d = read_derivation(&std::fs::read_to_string(entry.unwrap().path()).unwrap()).unwrap();
        assert_eq!(d.rule, Rule::for_expr(&d.expr));
    }
}

#[test]
fn truncated_file_is_rejected() {
    let text = golden_text("list_sum").unwrap();
    let cut: String = text.lines().take(20).map(|l| format!("{l}\n")).collect();
    assert!(read_derivation(&cut).is_err());
}
