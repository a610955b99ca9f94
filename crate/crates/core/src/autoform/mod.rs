//! Autoformalization: prompt a backend, then parse its reply against the
//! exercise signature.

mod backend;
mod output;
mod prompt;

use serde::{Deserialize, Serialize};

use crate::formula::Formula;
use crate::grader::normalize;
use crate::signature::Signature;

pub use backend::{BackendConfig, BackendFailure, RemoteConfig, ScriptedEntry, ScriptedTable};
pub use output::{parse_classified_output, parse_model_output, ClassifiedOutput, StepKind};
pub use prompt::{
    build_fewshot_prompt, build_instruction_prompt, FewShotExample, PromptTemplate, SEPARATOR, STOP,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BackendErrorKind {
    Transport,
    MalformedOutput,
    Refused,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FormalizationOutput {
    Formalized { formula: Formula, raw: String },
    NotExpressible { raw: String },
    BackendError { kind: BackendErrorKind, detail: String },
}

impl FormalizationOutput {
    pub fn formula(&self) -> Option<&Formula> {
        match self {
            FormalizationOutput::Formalized { formula, .. } => Some(formula),
            _ => None,
        }
    }
}

fn raw_reply(
    backend: &BackendConfig,
    sig: &Signature,
    sentence: &str,
    tpl: &PromptTemplate,
) -> Result<String, BackendFailure> {
    if normalize(sentence).is_empty() {
        return Err(BackendFailure {
            kind: BackendErrorKind::Transport,
            detail: "empty sentence".into(),
        });
    }
    match backend {
        BackendConfig::Scripted { replies } => {
            replies
                .lookup(sig, sentence)
                .map(str::to_string)
                .ok_or_else(|| BackendFailure {
                    kind: BackendErrorKind::Transport,
                    detail: "no scripted reply".into(),
                })
        }
        BackendConfig::Remote(remote) => remote.complete(&tpl.render(sig, sentence)),
    }
}

/// Formalizes `sentence` under `sig`. A `Formalized` result is always
/// well-formed against `sig`.
pub fn formalize(
    backend: &BackendConfig,
    sig: &Signature,
    sentence: &str,
    tpl: &PromptTemplate,
) -> FormalizationOutput {
    match raw_reply(backend, sig, sentence, tpl) {
        Ok(raw) => parse_model_output(&raw, sig),
        Err(f) => FormalizationOutput::BackendError {
            kind: f.kind,
            detail: f.detail,
        },
    }
}

/// Formalizes and classifies a sentence as claim or assumption.
pub fn formalize_with_kind(
    backend: &BackendConfig,
    sig: &Signature,
    sentence: &str,
    tpl: &PromptTemplate,
) -> ClassifiedOutput {
    match raw_reply(backend, sig, sentence, tpl) {
        Ok(raw) => parse_classified_output(&raw, sig),
        Err(f) => ClassifiedOutput::BackendError {
            kind: f.kind,
            detail: f.detail,
        },
    }
}
