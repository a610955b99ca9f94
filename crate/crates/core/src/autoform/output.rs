//! Turning a raw model reply into a formula or a sentinel.

use serde::{Deserialize, Serialize};

use super::{BackendErrorKind, FormalizationOutput};
use crate::formula::{parse_in_signature, ErrorKind, Formula, ParseError};
use crate::signature::Signature;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    Claim,
    Assumption,
}

/// A reply in the classified bracket dialect, `[claim,[...]]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ClassifiedOutput {
    Classified {
        kind: StepKind,
        formula: Formula,
        raw: String,
    },
    NotExpressible {
        raw: String,
    },
    BackendError {
        kind: BackendErrorKind,
        detail: String,
    },
}

fn strip_fences(s: &str) -> &str {
    let s = s.trim();
    let Some(rest) = s.strip_prefix("```") else {
        return s;
    };
    // drop an info string such as ```text
    let rest = match rest.find('\n') {
        Some(nl) if !rest[..nl].contains(|c: char| !c.is_ascii_alphanumeric()) => &rest[nl + 1..],
        _ => rest,
    };
    rest.trim_end().strip_suffix("```").unwrap_or(rest).trim()
}

fn strip_quotes(s: &str) -> &str {
    for (open, close) in [("``", "''"), ("\"", "\""), ("'", "'"), ("“", "”"), ("`", "`")] {
        if let Some(inner) = s.strip_prefix(open).and_then(|r| r.strip_suffix(close)) {
            return inner.trim();
        }
    }
    s
}

/// Removes fences, backticks, quotes, math dollars and one trailing period.
pub(crate) fn clean_reply(raw: &str) -> String {
    let s = strip_fences(raw);
    let s = strip_quotes(s.trim_matches('`').trim());
    let s: String = s.chars().filter(|&c| c != '$').collect();
    let s = s.trim();
    s.strip_suffix('.').unwrap_or(s).trim().to_string()
}

enum Sentinel {
    Refused,
    NotExpressible,
}

fn sentinel(cleaned: &str) -> Option<Sentinel> {
    match cleaned.to_lowercase().as_str() {
        "error" => Some(Sentinel::Refused),
        "not expressable" | "not expressible" => Some(Sentinel::NotExpressible),
        _ => None,
    }
}

/// Parses under `sig`, trying a single bracket repair when the only
/// problem is one unbalanced bracket at either end.
fn parse_with_repair(text: &str, sig: &Signature) -> Result<Formula, Vec<ParseError>> {
    let errors = match parse_in_signature(text, sig) {
        Ok(f) => return Ok(f),
        Err(errors) => errors,
    };
    if errors.iter().any(|e| e.kind == ErrorKind::UnbalancedBracket) {
        let candidates = [
            format!("{text})"),
            format!("{text}]"),
            format!("({text}"),
        ];
        for candidate in candidates {
            if let Ok(f) = parse_in_signature(&candidate, sig) {
                return Ok(f);
            }
        }
    }
    Err(errors)
}

fn describe(errors: &[ParseError]) -> String {
    errors
        .iter()
        .map(|e| e.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub fn parse_model_output(raw: &str, sig: &Signature) -> FormalizationOutput {
    let cleaned = clean_reply(raw);
    match sentinel(&cleaned) {
        Some(Sentinel::Refused) => {
            return FormalizationOutput::BackendError {
                kind: BackendErrorKind::Refused,
                detail: "the backend answered \"error\"".into(),
            }
        }
        Some(Sentinel::NotExpressible) => {
            return FormalizationOutput::NotExpressible { raw: raw.to_string() }
        }
        None => {}
    }
    match parse_with_repair(&cleaned, sig) {
        Ok(formula) => FormalizationOutput::Formalized {
            formula,
            raw: raw.to_string(),
        },
        Err(errors) => FormalizationOutput::BackendError {
            kind: BackendErrorKind::MalformedOutput,
            detail: format!("{cleaned:?}: {}", describe(&errors)),
        },
    }
}

fn step_kind(tag: &str) -> Option<StepKind> {
    match tag.trim().to_lowercase().as_str() {
        "claim" | "beh" => Some(StepKind::Claim),
        "assumption" | "vss" => Some(StepKind::Assumption),
        _ => None,
    }
}

/// Parses `[tag,formula]` where the tag classifies the sentence.
pub fn parse_classified_output(raw: &str, sig: &Signature) -> ClassifiedOutput {
    let cleaned = clean_reply(raw);
    let malformed = |detail: String| ClassifiedOutput::BackendError {
        kind: BackendErrorKind::MalformedOutput,
        detail,
    };
    match sentinel(&cleaned) {
        Some(Sentinel::Refused) => {
            return ClassifiedOutput::BackendError {
                kind: BackendErrorKind::Refused,
                detail: "the backend answered \"error\"".into(),
            }
        }
        Some(Sentinel::NotExpressible) => {
            return ClassifiedOutput::NotExpressible { raw: raw.to_string() }
        }
        None => {}
    }
    let Some(inner) = cleaned.strip_prefix('[').and_then(|s| s.strip_suffix(']')) else {
        return malformed(format!("{cleaned:?} is not a classified list"));
    };
    let Some((tag, body)) = inner.split_once(',') else {
        return malformed(format!("{cleaned:?} has no classification tag"));
    };
    let Some(kind) = step_kind(tag) else {
        return malformed(format!("unknown classification tag {:?}", tag.trim()));
    };
    match parse_model_output(body, sig) {
        FormalizationOutput::Formalized { formula, .. } => ClassifiedOutput::Classified {
            kind,
            formula,
            raw: raw.to_string(),
        },
        FormalizationOutput::NotExpressible { .. } => {
            ClassifiedOutput::NotExpressible { raw: raw.to_string() }
        }
        FormalizationOutput::BackendError { kind, detail } => {
            ClassifiedOutput::BackendError { kind, detail }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;
    use crate::signature::parse_notation_block;

    fn party() -> Signature {
        parse_notation_block(crate::signature::tests::APPENDIX_PROP).unwrap()
    }

    fn formula_of(out: FormalizationOutput) -> Formula {
        match out {
            FormalizationOutput::Formalized { formula, .. } => formula,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn fenced_reply() {
        let f = formula_of(parse_model_output("```\n(M→(C∧G))\n```", &party()));
        assert_eq!(f, parse_formula("M→(C∧G)").unwrap());
        let f = formula_of(parse_model_output("`$\\neg S\\wedge\\neg R$`", &party()));
        assert_eq!(f, parse_formula("¬S∧¬R").unwrap());
    }

    #[test]
    fn sentinels() {
        for raw in ["not expressable", "Not expressible.", "\"not expressible\""] {
            assert!(matches!(
                parse_model_output(raw, &party()),
                FormalizationOutput::NotExpressible { .. }
            ));
        }
        assert!(matches!(
            parse_model_output("error", &party()),
            FormalizationOutput::BackendError {
                kind: BackendErrorKind::Refused,
                ..
            }
        ));
    }

    #[test]
    fn malformed() {
        for raw in ["The answer is 42.", "(→¬A)→P", "S → Q", "((S∧R"] {
            assert!(
                matches!(
                    parse_model_output(raw, &party()),
                    FormalizationOutput::BackendError {
                        kind: BackendErrorKind::MalformedOutput,
                        ..
                    }
                ),
                "{raw}"
            );
        }
    }

    #[test]
    fn one_bracket_is_repaired() {
        let f = formula_of(parse_model_output("(S→(A∧B)", &party()));
        assert_eq!(f, parse_formula("S→(A∧B)").unwrap());
        let f = formula_of(parse_model_output("(M∧R)→¬A)", &party()));
        assert_eq!(f, parse_formula("(M∧R)→¬A").unwrap());
    }

    #[test]
    fn classified_replies() {
        let sig = parse_notation_block(
            "notation:{W:This is supposed to be a joke;L:This is supposed to be funny;N:This is new}",
        )
        .unwrap();
        match parse_classified_output("[claim,[W,→,[neg,[L,or,N]]]]", &sig) {
            ClassifiedOutput::Classified { kind, formula, .. } => {
                assert_eq!(kind, StepKind::Claim);
                assert_eq!(formula, parse_formula("W→¬(L∨N)").unwrap());
            }
            other => panic!("{other:?}"),
        }
        match parse_classified_output("[vss,[W]]", &sig) {
            ClassifiedOutput::Classified { kind, formula, .. } => {
                assert_eq!(kind, StepKind::Assumption);
                assert_eq!(formula, parse_formula("W").unwrap());
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_classified_output("[maybe,[W]]", &sig),
            ClassifiedOutput::BackendError {
                kind: BackendErrorKind::MalformedOutput,
                ..
            }
        ));
        assert!(matches!(
            parse_classified_output("W", &sig),
            ClassifiedOutput::BackendError { .. }
        ));
    }
}
