//! Step-by-step checking of natural-language arguments.
//!
//! Each sentence is formalized and classified as claim or assumption. An
//! assumption opens a scope; a claim `A → B` directly after a scope opened
//! by `A` whose last verified claim is `B` closes it (conditional proof).
//! Any other claim counts as one inference step: it is verified when at
//! most two formulas of the active context entail it.

use serde::{Deserialize, Serialize};

use crate::autoform::{formalize_with_kind, BackendConfig, ClassifiedOutput, PromptTemplate, StepKind};
use crate::formula::{check_well_formed, Formula, ParseError};
use crate::prover::{prop_validity, PropResult};
use crate::signature::{validate_signature, LogicKind, Signature};

/// Largest number of context formulas combined in one verified step.
pub const MAX_STEP_PREMISES: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Premise {
    pub sentence: String,
    pub formula: Formula,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArgumentExercise {
    pub id: String,
    pub signature: Signature,
    pub premises: Vec<Premise>,
    pub goal: Formula,
    pub goal_sentence: String,
}

impl ArgumentExercise {
    pub fn validate(&self) -> Result<(), Vec<ParseError>> {
        validate_signature(&self.signature)?;
        if self.signature.kind != LogicKind::Propositional {
            return Err(vec![ParseError::new(
                0,
                crate::formula::ErrorKind::KindMismatch,
                "argument exercises are propositional",
            )]);
        }
        for f in self.premises.iter().map(|p| &p.formula).chain([&self.goal]) {
            check_well_formed(f, &self.signature)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArgStepKind {
    Claim,
    Assumption,
    Discharge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepStatus {
    Verified,
    NotEntailed,
    FormalizationError,
    Unverified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FallacyHint {
    AffirmingConsequent,
    DenyingAntecedent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArgumentStep {
    pub text: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<ArgStepKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub formula: Option<Formula>,
    pub status: StepStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fallacy_hint: Option<FallacyHint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArgumentReport {
    pub steps: Vec<ArgumentStep>,
    pub goal_achieved: bool,
    pub open_assumptions_at_end: usize,
    pub message: String,
}

struct Scope {
    /// `None` for the premise scope.
    assumption: Option<Formula>,
    formulas: Vec<Formula>,
    last_verified: Option<Formula>,
}

fn valid(f: &Formula) -> Option<bool> {
    prop_validity(f).ok().map(|r| r == PropResult::Valid)
}

fn entails(context: &[&Formula], claim: &Formula) -> Option<bool> {
    let hyp = Formula::conjoin(context.iter().map(|f| (*f).clone()));
    match hyp {
        Some(h) => valid(&Formula::implies(h, claim.clone())),
        None => valid(claim),
    }
}

fn equivalent(a: &Formula, b: &Formula) -> bool {
    valid(&Formula::iff(a.clone(), b.clone())) == Some(true)
}

/// Whether some set of at most [`MAX_STEP_PREMISES`] context formulas
/// entails `claim`.
fn entailed_in_one_step(context: &[&Formula], claim: &Formula) -> Option<bool> {
    if entails(&[], claim)? {
        return Some(true);
    }
    for i in 0..context.len() {
        if entails(&[context[i]], claim)? {
            return Some(true);
        }
        for j in i + 1..context.len() {
            if entails(&[context[i], context[j]], claim)? {
                return Some(true);
            }
        }
    }
    Some(false)
}

/// Names a classic invalid pattern behind a claim that does not follow.
pub fn detect_fallacy_hint(context: &[Formula], claim: &Formula) -> Option<FallacyHint> {
    let refs: Vec<&Formula> = context.iter().collect();
    let holds = |f: &Formula| entails(&refs, f) == Some(true);
    for f in context {
        let Formula::Implies(p, q) = f else { continue };
        // from p→q and q, concluding p
        if equivalent(claim, p) && holds(q) {
            return Some(FallacyHint::AffirmingConsequent);
        }
        // from p→q and ¬p, concluding ¬q
        if equivalent(claim, &Formula::not((**q).clone())) && holds(&Formula::not((**p).clone())) {
            return Some(FallacyHint::DenyingAntecedent);
        }
    }
    None
}

fn step(text: &str, status: StepStatus) -> ArgumentStep {
    ArgumentStep {
        text: text.to_string(),
        kind: None,
        formula: None,
        status,
        fallacy_hint: None,
        note: None,
    }
}

pub fn check_argument(
    ex: &ArgumentExercise,
    sentences: &[String],
    backend: &BackendConfig,
    tpl: &PromptTemplate,
) -> ArgumentReport {
    let mut scopes = vec![Scope {
        assumption: None,
        formulas: ex.premises.iter().map(|p| p.formula.clone()).collect(),
        last_verified: None,
    }];
    let mut outer_claims: Vec<Formula> = Vec::new();
    let mut steps = Vec::with_capacity(sentences.len());
    for text in sentences {
        let (kind, formula) = match formalize_with_kind(backend, &ex.signature, text, tpl) {
            ClassifiedOutput::Classified { kind, formula, .. } => (kind, formula),
            ClassifiedOutput::NotExpressible { .. } => {
                let mut s = step(text, StepStatus::FormalizationError);
                s.note = Some("the sentence cannot be expressed in the given notation".into());
                steps.push(s);
                continue;
            }
            ClassifiedOutput::BackendError { detail, .. } => {
                let mut s = step(text, StepStatus::FormalizationError);
                s.note = Some(detail);
                steps.push(s);
                continue;
            }
        };
        if !formula.is_propositional() {
            let mut s = step(text, StepStatus::Unverified);
            s.formula = Some(formula);
            s.note = Some("only propositional steps are checked".into());
            steps.push(s);
            continue;
        }
        let mut s = step(text, StepStatus::Verified);
        s.formula = Some(formula.clone());
        if kind == StepKind::Assumption {
            s.kind = Some(ArgStepKind::Assumption);
            scopes.push(Scope {
                assumption: Some(formula.clone()),
                formulas: vec![formula],
                last_verified: None,
            });
            steps.push(s);
            continue;
        }
        let inner = scopes.last().expect("premise scope");
        let discharges = match (&inner.assumption, &inner.last_verified, &formula) {
            (Some(a), Some(b), Formula::Implies(p, q)) => equivalent(a, p) && equivalent(b, q),
            _ => false,
        };
        if discharges {
            s.kind = Some(ArgStepKind::Discharge);
            scopes.pop();
            let outer = scopes.last_mut().expect("enclosing scope");
            outer.formulas.push(formula.clone());
            outer.last_verified = Some(formula.clone());
            if scopes.len() == 1 {
                outer_claims.push(formula);
            }
            steps.push(s);
            continue;
        }
        s.kind = Some(ArgStepKind::Claim);
        let context: Vec<&Formula> = scopes.iter().flat_map(|sc| sc.formulas.iter()).collect();
        match entailed_in_one_step(&context, &formula) {
            Some(true) => {
                let inner = scopes.last_mut().expect("scope");
                inner.formulas.push(formula.clone());
                inner.last_verified = Some(formula.clone());
                if scopes.len() == 1 {
                    outer_claims.push(formula);
                }
            }
            Some(false) => {
                s.status = StepStatus::NotEntailed;
                if entails(&context, &formula) == Some(true) {
                    s.note = Some("this follows only by combining more than two earlier statements; add intermediate steps".into());
                } else {
                    let owned: Vec<Formula> = context.iter().map(|f| (*f).clone()).collect();
                    s.fallacy_hint = detect_fallacy_hint(&owned, &formula);
                }
            }
            None => s.status = StepStatus::Unverified,
        }
        steps.push(s);
    }
    let open = scopes.len() - 1;
    let goal_achieved = outer_claims.iter().any(|c| equivalent(c, &ex.goal));
    let failed = steps.iter().filter(|s| s.status != StepStatus::Verified).count();
    let mut message = Vec::new();
    if failed == 0 {
        message.push("Every step is verified.".to_string());
    } else {
        message.push(format!(
            "{failed} of {} step{} could not be verified.",
            steps.len(),
            if steps.len() == 1 { "" } else { "s" }
        ));
    }
    if open > 0 {
        message.push(format!(
            "{open} assumption{} still open.",
            if open == 1 { " is" } else { "s are" }
        ));
    }
    message.push(if goal_achieved {
        "The goal has been reached.".to_string()
    } else {
        "The goal has not been reached yet.".to_string()
    });
    ArgumentReport {
        steps,
        goal_achieved,
        open_assumptions_at_end: open,
        message: message.join(" "),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autoform::ScriptedTable;
    use crate::formula::parse_formula;
    use crate::signature::parse_notation_block;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn sun() -> ArgumentExercise {
        let sig = parse_notation_block(
            "notation:{S:The sun shines;H:Hans goes for a walk;D:Hans takes his dog for a walk;B:The dog barks at the cat;C:The cat runs away}",
        )
        .unwrap();
        let premise = |s: &str, g: &str| Premise {
            sentence: s.into(),
            formula: f(g),
        };
        ArgumentExercise {
            id: "sun".into(),
            signature: sig,
            premises: vec![
                premise("If the sun shines, Hans goes for a walk.", "S→H"),
                premise("When Hans goes for a walk, he takes his dog with him.", "H→D"),
                premise("When Hans takes his dog for a walk, the dog barks at the cat.", "D→B"),
                premise("When the dog barks at the cat, the cat runs away.", "B→C"),
                premise("However, the cat still sits on the roof.", "¬C"),
            ],
            goal: f("¬S"),
            goal_sentence: "The sun does not shine.".into(),
        }
    }

    fn run(ex: &ArgumentExercise, script: &[(&str, &str)]) -> ArgumentReport {
        let mut replies = ScriptedTable::default();
        for (s, r) in script {
            replies.insert(&ex.signature, s, *r);
        }
        let sentences: Vec<String> = script.iter().map(|(s, _)| s.to_string()).collect();
        check_argument(
            ex,
            &sentences,
            &BackendConfig::Scripted { replies },
            &PromptTemplate::instruction_for(&ex.signature),
        )
    }

    const SOLUTION: [(&str, &str); 5] = [
        ("The cat still sits on the roof.", "[claim,[neg,C]]"),
        ("Hence the dog did not bark.", "[claim,[neg,B]]"),
        ("Consequently, Hans did not take his dog for a walk.", "[claim,[neg,D]]"),
        ("So Hans did not go for a walk.", "[claim,[neg,H]]"),
        ("Thus the sun does not shine.", "[claim,[neg,S]]"),
    ];

    #[test]
    fn five_step_solution() {
        let r = run(&sun(), &SOLUTION);
        assert!(r.steps.iter().all(|s| s.status == StepStatus::Verified), "{r:?}");
        assert!(r.goal_achieved);
        assert_eq!(r.open_assumptions_at_end, 0);
    }

    #[test]
    fn skipping_a_step_breaks_the_next() {
        for skip in 1..4 {
            let script: Vec<(&str, &str)> = SOLUTION
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != skip)
                .map(|(_, p)| *p)
                .collect();
            let r = run(&sun(), &script);
            assert_eq!(r.steps[skip].status, StepStatus::NotEntailed, "skip {skip}");
            assert!(r.steps[skip].note.is_some());
        }
    }

    #[test]
    fn unsupported_claim() {
        let r = run(&sun(), &[("The dog barks.", "[claim,[B]]")]);
        assert_eq!(r.steps[0].status, StepStatus::NotEntailed);
        assert!(!r.goal_achieved);
    }

    #[test]
    fn conditional_proof() {
        let r = run(
            &sun(),
            &[
                ("Suppose the sun shines.", "[vss,[S]]"),
                ("Then Hans goes for a walk.", "[claim,[H]]"),
                ("So if the sun shines, Hans goes for a walk.", "[claim,[S,→,H]]"),
            ],
        );
        assert_eq!(r.steps[0].kind, Some(ArgStepKind::Assumption));
        assert_eq!(r.steps[2].kind, Some(ArgStepKind::Discharge));
        assert!(r.steps.iter().all(|s| s.status == StepStatus::Verified));
        assert_eq!(r.open_assumptions_at_end, 0);
    }

    #[test]
    fn goal_inside_open_scope_does_not_count() {
        let mut ex = sun();
        ex.premises.truncate(2);
        let r = run(
            &ex,
            &[
                ("Suppose the sun does not shine.", "[vss,[neg,S]]"),
                ("Then the sun does not shine.", "[claim,[neg,S]]"),
            ],
        );
        assert_eq!(r.steps[1].status, StepStatus::Verified);
        assert_eq!(r.open_assumptions_at_end, 1);
        assert!(!r.goal_achieved);
    }

    #[test]
    fn formalization_errors_are_skipped() {
        let r = run(
            &sun(),
            &[
                ("Gibberish.", "error"),
                ("There is a unicorn.", "not expressable"),
                ("The cat still sits on the roof.", "[claim,[neg,C]]"),
            ],
        );
        assert_eq!(r.steps[0].status, StepStatus::FormalizationError);
        assert_eq!(r.steps[1].status, StepStatus::FormalizationError);
        assert_eq!(r.steps[2].status, StepStatus::Verified);
    }

    #[test]
    fn fallacy_hints() {
        assert_eq!(
            detect_fallacy_hint(&[f("S→H"), f("H")], &f("S")),
            Some(FallacyHint::AffirmingConsequent)
        );
        assert_eq!(
            detect_fallacy_hint(&[f("S→H"), f("¬S")], &f("¬H")),
            Some(FallacyHint::DenyingAntecedent)
        );
        assert_eq!(detect_fallacy_hint(&[f("S→H"), f("D")], &f("S")), None);
        let mut ex = sun();
        ex.premises.truncate(2);
        let r = run(
            &ex,
            &[
                ("Suppose the sun does not shine.", "[vss,[neg,S]]"),
                ("Then Hans does not go for a walk.", "[claim,[neg,H]]"),
            ],
        );
        assert_eq!(r.steps[1].status, StepStatus::NotEntailed);
        assert_eq!(r.steps[1].fallacy_hint, Some(FallacyHint::DenyingAntecedent));
    }
}
