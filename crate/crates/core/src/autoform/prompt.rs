//! Prompt construction: few-shot completions and instruction prompts.

use serde::{Deserialize, Serialize};

use crate::signature::{LogicKind, Signature};

/// Separates a sentence from its formalization.
pub const SEPARATOR: char = '#';
/// Terminates each worked example.
pub const STOP: char = '§';

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FewShotExample {
    /// Wire form, `notation:{...}`.
    pub notation: String,
    pub sentence: String,
    pub answer: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "template", rename_all = "snake_case")]
pub enum PromptTemplate {
    FewShot { examples: Vec<FewShotExample> },
    Instruction { kind: LogicKind },
}

impl PromptTemplate {
    /// The instruction prompt matching the signature's logic.
    pub fn instruction_for(sig: &Signature) -> Self {
        PromptTemplate::Instruction { kind: sig.kind }
    }

    /// The full text sent for one sentence.
    pub fn render(&self, sig: &Signature, sentence: &str) -> String {
        match self {
            PromptTemplate::FewShot { examples } => build_fewshot_prompt(examples, sig, sentence),
            PromptTemplate::Instruction { kind } => {
                format!("{}\n\n{sentence}", build_instruction_prompt(*kind, sig))
            }
        }
    }
}

/// Worked examples as `notation:{...}sentence#answer§`, followed by the
/// open query `notation:{...}sentence#`.
pub fn build_fewshot_prompt(examples: &[FewShotExample], sig: &Signature, sentence: &str) -> String {
    let mut out = String::new();
    for ex in examples {
        out.push_str(&ex.notation);
        out.push_str(&ex.sentence);
        out.push(SEPARATOR);
        out.push_str(&ex.answer);
        out.push(STOP);
    }
    out.push_str(&sig.to_wire());
    out.push_str(sentence);
    out.push(SEPARATOR);
    out
}

/// Instruction prompt listing the notation, one entry per line.
pub fn build_instruction_prompt(kind: LogicKind, sig: &Signature) -> String {
    let mut out = String::new();
    match kind {
        LogicKind::Propositional => {
            out.push_str("Express the sentence as a formula in propositional logic, using the given notation.\n\n");
            out.push_str("Notation:\n\n");
            for (symbol, gloss) in sig.entries() {
                out.push_str(&format!("- {symbol}:\"{gloss}\"\n"));
            }
            out.push_str("\nIf the given sentence cannot be expressed with the given notation, return \"not expressable\".");
        }
        LogicKind::FirstOrder => {
            out.push_str("Express the given sentence as a formula in first-order logic, using the following notation:\n\n");
            for (symbol, gloss) in sig.entries() {
                out.push_str(&format!("- {symbol}:{gloss}\n"));
            }
            out.push_str("\nIf the given sentence cannot be expressed with the given notation, return \"not expressible\".\n");
            out.push_str("No comment or explanation; only return the formula.");
        }
    }
    out
}
