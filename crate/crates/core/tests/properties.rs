use std::collections::BTreeMap;
use std::path::PathBuf;

use formtutor_core::autoform::{parse_model_output, FormalizationOutput};
use formtutor_core::corpus::{load_benchmark_file, load_exercise_file, Gold};
use formtutor_core::formula::{parse_formula, render_formula, Formula, Style, Term};
use formtutor_core::prover::{check_equivalence, classify_verdict, ProofBudget, Verdict};
use formtutor_core::tutor::check_formalization;
use proptest::prelude::*;

fn data(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(rel)
}

const LETTERS: [&str; 5] = ["A", "B", "M", "P", "S"];

fn prop_formula() -> impl Strategy<Value = Formula> {
    let leaf = prop::sample::select(LETTERS.to_vec()).prop_map(|l| Formula::Prop(l.to_string()));
    leaf.prop_recursive(5, 40, 2, |inner| {
        let pair = (inner.clone(), inner.clone());
        prop_oneof![
            inner.prop_map(|f| Formula::Not(Box::new(f))),
            pair.clone().prop_map(|(l, r)| Formula::And(Box::new(l), Box::new(r))),
            pair.clone().prop_map(|(l, r)| Formula::Or(Box::new(l), Box::new(r))),
            pair.clone().prop_map(|(l, r)| Formula::Xor(Box::new(l), Box::new(r))),
            pair.clone().prop_map(|(l, r)| Formula::Implies(Box::new(l), Box::new(r))),
            pair.prop_map(|(l, r)| Formula::Iff(Box::new(l), Box::new(r))),
        ]
    })
}

fn term() -> impl Strategy<Value = Term> {
    prop_oneof![
        prop::sample::select(vec!["x", "y"]).prop_map(|v| Term::Variable(v.into())),
        prop::sample::select(vec!["fr", "he"]).prop_map(|c| Term::Constant(c.into())),
    ]
}

fn fol_formula() -> impl Strategy<Value = Formula> {
    let atom = prop_oneof![
        (prop::sample::select(vec!["D", "B"]), term()).prop_map(|(p, t)| Formula::Pred(p.into(), vec![t])),
        (term(), term()).prop_map(|(a, b)| Formula::Pred("L".into(), vec![a, b])),
        (term(), term()).prop_map(|(a, b)| Formula::Equal(a, b)),
        (term(), term()).prop_map(|(a, b)| Formula::NotEqual(a, b)),
    ];
    atom.prop_recursive(4, 24, 2, |inner| {
        let pair = (inner.clone(), inner.clone());
        prop_oneof![
            inner.clone().prop_map(|f| Formula::Not(Box::new(f))),
            pair.clone().prop_map(|(l, r)| Formula::And(Box::new(l), Box::new(r))),
            pair.clone().prop_map(|(l, r)| Formula::Or(Box::new(l), Box::new(r))),
            pair.prop_map(|(l, r)| Formula::Implies(Box::new(l), Box::new(r))),
            (prop::sample::select(vec!["x", "y"]), inner.clone())
                .prop_map(|(v, f)| Formula::Forall(v.into(), Box::new(f))),
            (prop::sample::select(vec!["x", "y"]), inner).prop_map(|(v, f)| Formula::Exists(v.into(), Box::new(f))),
        ]
    })
}

fn rename(f: &Formula, map: &BTreeMap<String, String>) -> Formula {
    let go = |g: &Formula| Box::new(rename(g, map));
    match f {
        Formula::Prop(p) => Formula::Prop(map[p].clone()),
        Formula::Not(g) => Formula::Not(go(g)),
        Formula::And(l, r) => Formula::And(go(l), go(r)),
        Formula::Or(l, r) => Formula::Or(go(l), go(r)),
        Formula::Xor(l, r) => Formula::Xor(go(l), go(r)),
        Formula::Implies(l, r) => Formula::Implies(go(l), go(r)),
        Formula::Iff(l, r) => Formula::Iff(go(l), go(r)),
        other => other.clone(),
    }
}

proptest! {
    #[test]
    fn prop_render_parse_roundtrip(f in prop_formula()) {
        for style in [Style::Unicode, Style::Ascii] {
            let text = render_formula(&f, style);
            prop_assert_eq!(parse_formula(&text).unwrap(), f.clone(), "{}", text);
        }
    }

    #[test]
    fn fol_render_parse_roundtrip(f in fol_formula()) {
        for style in [Style::Unicode, Style::Ascii] {
            let text = render_formula(&f, style);
            prop_assert_eq!(parse_formula(&text).unwrap(), f.clone(), "{}", text);
        }
    }

    #[test]
    fn verdict_survives_letter_renaming(
        f in prop_formula(),
        g in prop_formula(),
        perm in Just(LETTERS.to_vec()).prop_shuffle(),
    ) {
        let map: BTreeMap<String, String> =
            LETTERS.iter().zip(&perm).map(|(a, b)| (a.to_string(), b.to_string())).collect();
        let budget = ProofBudget::default();
        let before = classify_verdict(&check_equivalence(&f, &g, &budget).unwrap());
        let after = classify_verdict(&check_equivalence(&rename(&f, &map), &rename(&g, &map), &budget).unwrap());
        prop_assert_eq!(before, after);
    }
}

#[test]
fn corpus_golds_echo_stably() {
    let mut checked = 0;
    for file in ["bench/prop.json", "bench/fol.json"] {
        let b = load_benchmark_file(data(file)).unwrap();
        for row in &b.rows {
            for g in &row.gold {
                let Gold::Formula(f) = g else { continue };
                match parse_model_output(&render_formula(f, Style::Unicode), &b.signature) {
                    FormalizationOutput::Formalized { formula, .. } => assert_eq!(&formula, f, "row {}", row.id),
                    other => panic!("row {}: {other:?}", row.id),
                }
                checked += 1;
            }
        }
    }
    assert!(checked > 100);
}

#[test]
fn exercises_accept_their_own_gold() {
    let budget = ProofBudget::default();
    for ex in load_exercise_file(data("exercises.json")).unwrap() {
        for style in [Style::Unicode, Style::Ascii] {
            let r = check_formalization(&ex, &render_formula(&ex.gold, style), &budget);
            assert_eq!(r.verdict, Some(Verdict::Equivalent), "{}", ex.id);
        }
    }
}
