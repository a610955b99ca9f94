//! Checking (de)formalization answers against an exercise and composing
//! feedback.

use serde::{Deserialize, Serialize};

use crate::autoform::{formalize, BackendConfig, BackendErrorKind, FormalizationOutput, PromptTemplate};
use crate::formula::{
    check_well_formed, free_variables, parse_in_signature, render_formula, Formula, ParseError, Style,
};
use crate::grader::{simplicity_score, Band, SimplicityScore};
use crate::prover::{
    check_equivalence, classify_verdict, Assignment, Direction, DirectionResult, DirectionalEquivalence,
    FolResult, ProofBudget, Status, Verdict,
};
use crate::signature::{validate_signature, Signature};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exercise {
    pub id: String,
    pub signature: Signature,
    /// Template sentence η.
    pub sentence: String,
    /// Gold formalization φ.
    pub gold: Formula,
}

impl Exercise {
    pub fn validate(&self) -> Result<(), Vec<ParseError>> {
        validate_signature(&self.signature)?;
        check_well_formed(&self.gold, &self.signature)?;
        let mut errors = Vec::new();
        if let Some(v) = free_variables(&self.gold).into_iter().next() {
            errors.push(ParseError::new(
                0,
                crate::formula::ErrorKind::UnboundVariable,
                format!("gold formula has free variable `{v}`"),
            ));
        }
        if self.sentence.trim().is_empty() {
            errors.push(ParseError::new(
                0,
                crate::formula::ErrorKind::EmptyInput,
                "exercise sentence is empty",
            ));
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(errors)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectedCountermodel {
    pub direction: Direction,
    pub assignment: Assignment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeformalizationReport {
    pub echo: FormalizationOutput,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub directional: Option<DirectionalEquivalence>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simplicity: Option<SimplicityScore>,
    pub countermodels: Vec<DirectedCountermodel>,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParseStatus {
    Ok,
    Errors,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormalizationReport {
    pub parse_status: ParseStatus,
    pub errors: Vec<ParseError>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub formula: Option<Formula>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub directional: Option<DirectionalEquivalence>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    pub countermodels: Vec<DirectedCountermodel>,
    pub message: String,
}

fn countermodels(d: &DirectionalEquivalence) -> Vec<DirectedCountermodel> {
    [(Direction::Forward, &d.forward), (Direction::Backward, &d.backward)]
        .into_iter()
        .filter_map(|(direction, r)| {
            r.countermodel().map(|a| DirectedCountermodel {
                direction,
                assignment: a.clone(),
            })
        })
        .collect()
}

/// Deformalization: the user describes the gold formula in words.
pub fn check_deformalization(
    ex: &Exercise,
    user_text: &str,
    backend: &BackendConfig,
    tpl: &PromptTemplate,
    budget: &ProofBudget,
) -> DeformalizationReport {
    let echo = formalize(backend, &ex.signature, user_text, tpl);
    let mut report = DeformalizationReport {
        echo,
        directional: None,
        verdict: None,
        simplicity: None,
        countermodels: Vec::new(),
        message: String::new(),
    };
    if let Some(user) = report.echo.formula() {
        if let Ok(d) = check_equivalence(user, &ex.gold, budget) {
            let verdict = classify_verdict(&d);
            if verdict == Verdict::Equivalent {
                report.simplicity = simplicity_score(&ex.sentence, user_text).ok();
            }
            report.countermodels = countermodels(&d);
            report.verdict = Some(verdict);
            report.directional = Some(d);
        }
    }
    report.message = feedback_text(&report);
    report
}

/// Formalization: the user writes a formula for the template sentence.
pub fn check_formalization(ex: &Exercise, user_formula_text: &str, budget: &ProofBudget) -> FormalizationReport {
    let mut report = match parse_in_signature(user_formula_text, &ex.signature) {
        Err(errors) => FormalizationReport {
            parse_status: ParseStatus::Errors,
            errors,
            formula: None,
            directional: None,
            verdict: None,
            countermodels: Vec::new(),
            message: String::new(),
        },
        Ok(f) => {
            let directional = check_equivalence(&f, &ex.gold, budget).ok();
            FormalizationReport {
                parse_status: ParseStatus::Ok,
                errors: Vec::new(),
                verdict: directional.as_ref().map(classify_verdict),
                countermodels: directional.as_ref().map(countermodels).unwrap_or_default(),
                directional,
                formula: Some(f),
                message: String::new(),
            }
        }
    };
    report.message = formalization_feedback_text(&report);
    report
}

struct Wording {
    answer: &'static str,
    target: &'static str,
}

const DEFORMALIZATION: Wording = Wording {
    answer: "your sentence",
    target: "the given formula",
};

const FORMALIZATION: Wording = Wording {
    answer: "your formula",
    target: "the intended formalization",
};

/// `A=false, M=true`, in letter order.
pub fn render_assignment(a: &Assignment) -> String {
    a.iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn direction_clause(w: &Wording, dir: Direction) -> String {
    match dir {
        Direction::Forward => format!("{} implies {}", w.answer, w.target),
        Direction::Backward => format!("{} implies {}", w.target, w.answer),
    }
}

fn capitalize(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

fn logical_sentences(w: &Wording, verdict: &Verdict, d: &DirectionalEquivalence) -> Vec<String> {
    let mut out = vec![match verdict {
        Verdict::Equivalent => format!("Correct: {} is logically equivalent to {}.", w.answer, w.target),
        Verdict::SufficientNotNecessary => format!(
            "Not equivalent: {} is sufficient, but not necessary for {}.",
            w.answer, w.target
        ),
        Verdict::NecessaryNotSufficient => format!(
            "Not equivalent: {} is necessary, but not sufficient for {}.",
            w.answer, w.target
        ),
        Verdict::Neither => format!("Not equivalent: neither of {} and {} implies the other.", w.answer, w.target),
        Verdict::PartiallyUnverified { .. } => format!(
            "The system could not verify whether {} is equivalent to {}.",
            w.answer, w.target
        ),
    }];
    if *verdict == Verdict::Equivalent {
        return out;
    }
    for (dir, r) in [(Direction::Forward, &d.forward), (Direction::Backward, &d.backward)] {
        let clause = direction_clause(w, dir);
        out.push(match r.status() {
            Status::Proved => format!("Verified: {clause}."),
            Status::Refuted => format!("Refuted: it is not the case that {clause}."),
            Status::Unknown => format!("The system could not verify whether {clause}."),
        });
        match r {
            DirectionResult::Prop(_) => {
                if let Some(a) = r.countermodel() {
                    out.push(format!("Counterexample: {}.", render_assignment(a)));
                }
            }
            DirectionResult::Fol(FolResult::RefutedBySmallModel { model }) => {
                out.push(format!(
                    "Counterexample: a model with {} element{}.",
                    model.domain_size,
                    if model.domain_size == 1 { "" } else { "s" }
                ));
            }
            DirectionResult::Fol(_) => {}
        }
    }
    out
}

fn simplicity_sentence(s: &SimplicityScore) -> String {
    match s.band {
        Band::High => format!("Your phrasing is natural (simplicity {s} of 10)."),
        Band::Mid => format!("Your phrasing is acceptable (simplicity {s} of 10), but a simpler one may exist."),
        Band::Low => format!(
            "Your phrasing is rather complicated (simplicity {s} of 10); try your hand at further simplifications."
        ),
    }
}

pub fn feedback_text(report: &DeformalizationReport) -> String {
    let w = &DEFORMALIZATION;
    match (&report.echo, &report.verdict, &report.directional) {
        (FormalizationOutput::BackendError { kind, .. }, _, _) => match kind {
            BackendErrorKind::Refused => {
                "Error: your input could not be processed as a statement in the given notation.".into()
            }
            BackendErrorKind::MalformedOutput => {
                "Error: your input could not be translated into a formula over the given notation.".into()
            }
            BackendErrorKind::Transport => {
                "The formalization service is unavailable; please try again later.".into()
            }
        },
        (FormalizationOutput::NotExpressible { .. }, _, _) => {
            "Your sentence cannot be expressed in the given notation, so it does not describe the given formula."
                .into()
        }
        (FormalizationOutput::Formalized { .. }, Some(verdict), Some(d)) => {
            let mut sentences = logical_sentences(w, verdict, d);
            if let Some(s) = &report.simplicity {
                sentences.push(simplicity_sentence(s));
            }
            sentences.join(" ")
        }
        (FormalizationOutput::Formalized { formula, .. }, _, _) => format!(
            "Your sentence was read as {}, which could not be compared with the given formula.",
            render_formula(formula, Style::Unicode)
        ),
    }
}

pub fn formalization_feedback_text(report: &FormalizationReport) -> String {
    let w = &FORMALIZATION;
    if report.parse_status == ParseStatus::Errors {
        let details: Vec<String> = report.errors.iter().map(|e| e.message.clone()).collect();
        return format!(
            "Your input is not a well-formed formula over the given notation: {}.",
            details.join("; ")
        );
    }
    match (&report.verdict, &report.directional) {
        (Some(verdict), Some(d)) => logical_sentences(w, verdict, d).join(" "),
        _ => capitalize(&format!("{} could not be compared with {}.", w.answer, w.target)),
    }
}
