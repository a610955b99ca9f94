//! Dataset files: exercises, argument exercises and recorded benchmark
//! runs, plus the replay scorer for the benchmarks.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::argue::{ArgumentExercise, Premise};
use crate::autoform::{parse_model_output, BackendConfig, FormalizationOutput, ScriptedTable};
use crate::formula::{parse_in_signature, Formula, ParseError};
use crate::prover::{check_equivalence, classify_verdict, ProofBudget, Verdict};
use crate::signature::{validate_signature, ConstEntry, LogicKind, PredEntry, PropEntry, Signature};
use crate::tutor::Exercise;

/// Gold entry marking a sentence the notation cannot express.
pub const NOT_EXPRESSIBLE: &str = "NOT_EXPRESSIBLE";

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: at `{field}`: {message}")]
    Schema {
        path: String,
        field: String,
        message: String,
    },
    #[error("unsupported format version {0}")]
    Version(u32),
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("`{id}`: {}", join_errors(.errors))]
    Invalid { id: String, errors: Vec<ParseError> },
    #[error("row {row} has no output for model `{model}`")]
    MissingModel { row: u32, model: String },
}

fn join_errors(errors: &[ParseError]) -> String {
    errors.iter().map(|e| e.message.as_str()).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Notation {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub props: Vec<PropEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub preds: Vec<PredEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub consts: Vec<ConstEntry>,
}

impl Notation {
    pub fn signature(&self, kind: LogicKind) -> Signature {
        Signature {
            kind,
            props: self.props.clone(),
            preds: self.preds.clone(),
            consts: self.consts.clone(),
        }
    }

    pub fn of(sig: &Signature) -> Self {
        Notation {
            props: sig.props.clone(),
            preds: sig.preds.clone(),
            consts: sig.consts.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExerciseRecord {
    pub id: String,
    pub kind: LogicKind,
    pub notation: Notation,
    pub sentence: String,
    pub formula: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExerciseFile {
    pub version: u32,
    pub exercises: Vec<ExerciseRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PremiseRecord {
    pub sentence: String,
    pub formula: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArgumentRecord {
    pub id: String,
    pub notation: Notation,
    pub premises: Vec<PremiseRecord>,
    pub goal: String,
    pub goal_sentence: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArgumentFile {
    pub version: u32,
    pub arguments: Vec<ArgumentRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mark {
    #[serde(rename = "+")]
    Correct,
    #[serde(rename = "-")]
    Incorrect,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Gold {
    Formula(Formula),
    NotExpressible,
}

impl Gold {
    fn to_wire(&self) -> String {
        match self {
            Gold::Formula(f) => f.to_string(),
            Gold::NotExpressible => NOT_EXPRESSIBLE.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchRow {
    pub id: u32,
    pub sentence: String,
    pub gold: Vec<Gold>,
    pub outputs: BTreeMap<String, String>,
    pub expected: BTreeMap<String, Mark>,
    /// Models that were shown this row as a worked example.
    pub in_prompt: BTreeSet<String>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchRowRecord {
    pub id: u32,
    pub sentence: String,
    pub gold: Vec<String>,
    pub outputs: BTreeMap<String, String>,
    pub expected: BTreeMap<String, Mark>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub in_prompt: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchFile {
    pub version: u32,
    pub kind: LogicKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub notation: Notation,
    pub rows: Vec<BenchRowRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Benchmark {
    pub signature: Signature,
    pub rows: Vec<BenchRow>,
}

impl Benchmark {
    pub fn to_file(&self) -> BenchFile {
        BenchFile {
            version: FORMAT_VERSION,
            kind: self.signature.kind,
            description: None,
            notation: Notation::of(&self.signature),
            rows: self
                .rows
                .iter()
                .map(|r| BenchRowRecord {
                    id: r.id,
                    sentence: r.sentence.clone(),
                    gold: r.gold.iter().map(Gold::to_wire).collect(),
                    outputs: r.outputs.clone(),
                    expected: r.expected.clone(),
                    in_prompt: r.in_prompt.iter().cloned().collect(),
                    note: r.note.clone(),
                })
                .collect(),
        }
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CorpusError> {
    let display = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: display.clone(),
        source,
    })?;
    parse_json(&text, &display)
}

pub fn parse_json<T: DeserializeOwned>(text: &str, origin: &str) -> Result<T, CorpusError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| CorpusError::Schema {
        path: origin.to_string(),
        field: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

fn check_version(v: u32) -> Result<(), CorpusError> {
    if v == FORMAT_VERSION {
        Ok(())
    } else {
        Err(CorpusError::Version(v))
    }
}

fn check_unique(ids: impl IntoIterator<Item = String>) -> Result<(), CorpusError> {
    let mut seen = BTreeSet::new();
    for id in ids {
        if !seen.insert(id.clone()) {
            return Err(CorpusError::DuplicateId(id));
        }
    }
    Ok(())
}

fn parse_for(id: &str, text: &str, sig: &Signature) -> Result<Formula, CorpusError> {
    parse_in_signature(text, sig).map_err(|errors| CorpusError::Invalid {
        id: id.to_string(),
        errors,
    })
}

fn checked_signature(id: &str, notation: &Notation, kind: LogicKind) -> Result<Signature, CorpusError> {
    let sig = notation.signature(kind);
    validate_signature(&sig).map_err(|errors| CorpusError::Invalid {
        id: id.to_string(),
        errors,
    })?;
    Ok(sig)
}

pub fn exercises_from_file(file: ExerciseFile) -> Result<Vec<Exercise>, CorpusError> {
    check_version(file.version)?;
    check_unique(file.exercises.iter().map(|e| e.id.clone()))?;
    file.exercises
        .into_iter()
        .map(|r| {
            let signature = checked_signature(&r.id, &r.notation, r.kind)?;
            let gold = parse_for(&r.id, &r.formula, &signature)?;
            let ex = Exercise {
                id: r.id,
                signature,
                sentence: r.sentence,
                gold,
            };
            ex.validate().map_err(|errors| CorpusError::Invalid {
                id: ex.id.clone(),
                errors,
            })?;
            Ok(ex)
        })
        .collect()
}

pub fn load_exercise_file(path: impl AsRef<Path>) -> Result<Vec<Exercise>, CorpusError> {
    exercises_from_file(read_json(path.as_ref())?)
}

pub fn arguments_from_file(file: ArgumentFile) -> Result<Vec<ArgumentExercise>, CorpusError> {
    check_version(file.version)?;
    check_unique(file.arguments.iter().map(|a| a.id.clone()))?;
    file.arguments
        .into_iter()
        .map(|r| {
            let signature = checked_signature(&r.id, &r.notation, LogicKind::Propositional)?;
            let premises = r
                .premises
                .iter()
                .map(|p| {
                    Ok(Premise {
                        sentence: p.sentence.clone(),
                        formula: parse_for(&r.id, &p.formula, &signature)?,
                    })
                })
                .collect::<Result<Vec<_>, CorpusError>>()?;
            let goal = parse_for(&r.id, &r.goal, &signature)?;
            let ex = ArgumentExercise {
                id: r.id,
                signature,
                premises,
                goal,
                goal_sentence: r.goal_sentence,
            };
            ex.validate().map_err(|errors| CorpusError::Invalid {
                id: ex.id.clone(),
                errors,
            })?;
            Ok(ex)
        })
        .collect()
}

pub fn load_argument_file(path: impl AsRef<Path>) -> Result<Vec<ArgumentExercise>, CorpusError> {
    arguments_from_file(read_json(path.as_ref())?)
}

pub fn benchmark_from_file(file: BenchFile) -> Result<Benchmark, CorpusError> {
    check_version(file.version)?;
    check_unique(file.rows.iter().map(|r| r.id.to_string()))?;
    let signature = checked_signature("notation", &file.notation, file.kind)?;
    let rows = file
        .rows
        .into_iter()
        .map(|r| {
            let id = r.id.to_string();
            if r.gold.is_empty() {
                return Err(CorpusError::Invalid {
                    id,
                    errors: vec![ParseError::new(
                        0,
                        crate::formula::ErrorKind::EmptyInput,
                        "gold list is empty",
                    )],
                });
            }
            let gold = r
                .gold
                .iter()
                .map(|g| {
                    if g == NOT_EXPRESSIBLE {
                        Ok(Gold::NotExpressible)
                    } else {
                        parse_for(&id, g, &signature).map(Gold::Formula)
                    }
                })
                .collect::<Result<Vec<_>, _>>()?;
            if let Some(model) = r.expected.keys().find(|m| !r.outputs.contains_key(*m)) {
                return Err(CorpusError::MissingModel {
                    row: r.id,
                    model: model.clone(),
                });
            }
            Ok(BenchRow {
                id: r.id,
                sentence: r.sentence,
                gold,
                outputs: r.outputs,
                expected: r.expected,
                in_prompt: r.in_prompt.into_iter().collect(),
                note: r.note,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Benchmark { signature, rows })
}

pub fn load_benchmark_file(path: impl AsRef<Path>) -> Result<Benchmark, CorpusError> {
    benchmark_from_file(read_json(path.as_ref())?)
}

/// Replays the recorded outputs of `model`. Rows the model saw as worked
/// examples have no recorded output and are left out.
pub fn scripted_backend_from_benchmark(
    rows: &[BenchRow],
    model: &str,
    sig: &Signature,
) -> Result<BackendConfig, CorpusError> {
    let mut replies = ScriptedTable::default();
    for row in rows {
        if row.in_prompt.contains(model) {
            continue;
        }
        let reply = row.outputs.get(model).ok_or_else(|| CorpusError::MissingModel {
            row: row.id,
            model: model.to_string(),
        })?;
        replies.insert(sig, &row.sentence, reply.clone());
    }
    Ok(BackendConfig::Scripted { replies })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowOutcome {
    /// Worked example shown to the model; counted as correct.
    InPrompt,
    NotExpressible,
    Formalized { formula: Formula, verdict: Verdict },
    Unscorable { diagnostic: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowVerdict {
    pub id: u32,
    pub correct: bool,
    pub outcome: RowOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub id: u32,
    pub expected: Mark,
    pub derived: Mark,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSummary {
    pub model: String,
    pub total: usize,
    pub correct: usize,
    pub incorrect: usize,
    pub rows: Vec<RowVerdict>,
    pub mismatches: Vec<Mismatch>,
}

impl BenchSummary {
    pub fn incorrect_ids(&self) -> Vec<u32> {
        self.rows.iter().filter(|r| !r.correct).map(|r| r.id).collect()
    }
}

/// Scores one recorded output against the row's gold list. The verdict
/// reported is the one against the first gold of matching kind, or the
/// equivalent gold when there is one.
pub fn score_row(row: &BenchRow, model: &str, sig: &Signature, budget: &ProofBudget) -> RowVerdict {
    let verdict = |correct, outcome| RowVerdict {
        id: row.id,
        correct,
        outcome,
    };
    if row.in_prompt.contains(model) {
        return verdict(true, RowOutcome::InPrompt);
    }
    let Some(raw) = row.outputs.get(model) else {
        return verdict(
            false,
            RowOutcome::Unscorable {
                diagnostic: format!("no output recorded for `{model}`"),
            },
        );
    };
    match parse_model_output(raw, sig) {
        FormalizationOutput::NotExpressible { .. } => {
            let ok = row.gold.contains(&Gold::NotExpressible);
            verdict(ok, RowOutcome::NotExpressible)
        }
        FormalizationOutput::BackendError { detail, .. } => {
            verdict(false, RowOutcome::Unscorable { diagnostic: detail })
        }
        FormalizationOutput::Formalized { formula, .. } => {
            let mut first = None;
            for gold in &row.gold {
                let Gold::Formula(g) = gold else { continue };
                let v = match check_equivalence(&formula, g, budget) {
                    Ok(d) => classify_verdict(&d),
                    Err(e) => {
                        first.get_or_insert(RowOutcome::Unscorable {
                            diagnostic: e.to_string(),
                        });
                        continue;
                    }
                };
                if v == Verdict::Equivalent {
                    return verdict(true, RowOutcome::Formalized { formula, verdict: v });
                }
                first.get_or_insert(RowOutcome::Formalized {
                    formula: formula.clone(),
                    verdict: v,
                });
            }
            let outcome = first.unwrap_or(RowOutcome::Formalized {
                formula,
                verdict: Verdict::Neither,
            });
            verdict(false, outcome)
        }
    }
}

pub fn score_benchmark(bench: &Benchmark, model: &str, budget: &ProofBudget) -> BenchSummary {
    let rows: Vec<RowVerdict> = std::thread::scope(|s| {
        let handles: Vec<_> = bench
            .rows
            .iter()
            .map(|row| s.spawn(|| score_row(row, model, &bench.signature, budget)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("scoring thread")).collect()
    });
    let mismatches = bench
        .rows
        .iter()
        .zip(&rows)
        .filter_map(|(row, v)| {
            let expected = *row.expected.get(model)?;
            let derived = if v.correct { Mark::Correct } else { Mark::Incorrect };
            (expected != derived).then_some(Mismatch {
                id: row.id,
                expected,
                derived,
            })
        })
        .collect();
    let correct = rows.iter().filter(|r| r.correct).count();
    BenchSummary {
        model: model.to_string(),
        total: rows.len(),
        correct,
        incorrect: rows.len() - correct,
        rows,
        mismatches,
    }
}

/// Models with an output or expected mark in some row, in name order.
pub fn benchmark_models(bench: &Benchmark) -> Vec<String> {
    let mut models = BTreeSet::new();
    for row in &bench.rows {
        models.extend(row.outputs.keys().cloned());
        models.extend(row.in_prompt.iter().cloned());
    }
    models.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::tests::APPENDIX_PROP;
    use crate::signature::parse_notation_block;

    fn bench(json: &str) -> Result<Benchmark, CorpusError> {
        benchmark_from_file(parse_json(json, "test")?)
    }

    fn small() -> Benchmark {
        let sig = parse_notation_block(APPENDIX_PROP).unwrap();
        let notation = serde_json::to_string(&Notation::of(&sig)).unwrap();
        bench(&format!(
            r#"{{"version":1,"kind":"prop","notation":{notation},"rows":[
              {{"id":1,"sentence":"It does not rain and the sun shines.","gold":["¬R∧S"],
                "outputs":{{"a":"¬R∧S"}},"expected":{{"a":"+"}},"in_prompt":["b"]}},
              {{"id":2,"sentence":"It's neither sunny nor rainy.","gold":["¬S∧¬R"],
                "outputs":{{"a":"¬S∧¬R","b":"¬(S∨R)"}},"expected":{{"a":"+","b":"+"}}}},
              {{"id":3,"sentence":"On Tuesday, there is a thunderstorm.","gold":["NOT_EXPRESSIBLE"],
                "outputs":{{"a":"not expressable","b":"S∧R"}},"expected":{{"a":"+","b":"+"}}}}
            ]}}"#
        ))
        .unwrap()
    }

    #[test]
    fn scoring_counts_and_mismatches() {
        let b = small();
        let budget = ProofBudget::default();
        let a = score_benchmark(&b, "a", &budget);
        assert_eq!((a.total, a.correct, a.incorrect), (3, 3, 0));
        assert!(a.mismatches.is_empty());
        let s = score_benchmark(&b, "b", &budget);
        assert_eq!((s.correct, s.incorrect_ids()), (2, vec![3]));
        assert_eq!(s.rows[0].outcome, RowOutcome::InPrompt);
        assert_eq!(
            s.mismatches,
            vec![Mismatch {
                id: 3,
                expected: Mark::Correct,
                derived: Mark::Incorrect
            }]
        );
    }

    #[test]
    fn equivalent_rendering_scores_the_same() {
        let mut b = small();
        b.rows[1].outputs.insert("a".into(), "¬(R∨S)".into());
        let s = score_benchmark(&b, "a", &ProofBudget::default());
        assert_eq!(s.correct, 3);
    }

    #[test]
    fn scripted_backend_skips_in_prompt_rows() {
        let b = small();
        let BackendConfig::Scripted { replies } =
            scripted_backend_from_benchmark(&b.rows, "b", &b.signature).unwrap()
        else {
            unreachable!()
        };
        assert_eq!(replies.len(), 2);
        assert_eq!(replies.lookup(&b.signature, "It's neither sunny nor rainy."), Some("¬(S∨R)"));
        assert_eq!(replies.lookup(&b.signature, "It rains."), None);
        assert!(matches!(
            scripted_backend_from_benchmark(&b.rows, "c", &b.signature),
            Err(CorpusError::MissingModel { row: 1, .. })
        ));
    }

    #[test]
    fn schema_errors_name_the_field() {
        let err = bench(r#"{"version":1,"kind":"prop","notation":{},"rows":[{"id":"x"}]}"#).unwrap_err();
        match err {
            CorpusError::Schema { field, .. } => assert_eq!(field, "rows[0].id"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_bad_rows() {
        let notation = r#"{"props":[{"symbol":"S","gloss":"The sun shines"}]}"#;
        let row = |id: u32, gold: &str| {
            format!(r#"{{"id":{id},"sentence":"s","gold":[{gold}],"outputs":{{}},"expected":{{}}}}"#)
        };
        let doc = |rows: &[String]| {
            format!(r#"{{"version":1,"kind":"prop","notation":{notation},"rows":[{}]}}"#, rows.join(","))
        };
        assert!(matches!(
            bench(&doc(&[row(1, r#""S""#), row(1, r#""S""#)])),
            Err(CorpusError::DuplicateId(id)) if id == "1"
        ));
        assert!(matches!(bench(&doc(&[row(1, "")])), Err(CorpusError::Invalid { .. })));
        assert!(matches!(bench(&doc(&[row(1, r#""Q""#)])), Err(CorpusError::Invalid { .. })));
        let missing = r#"{"id":1,"sentence":"s","gold":["S"],"outputs":{},"expected":{"m":"+"}}"#;
        assert!(matches!(
            bench(&doc(&[missing.to_string()])),
            Err(CorpusError::MissingModel { .. })
        ));
    }

    #[test]
    fn exercise_file_roundtrip() {
        let json = r#"{"version":1,"exercises":[{"id":"swim","kind":"fol",
            "notation":{"preds":[{"symbol":"C","arity":1,"gloss":"x is a child"},
                                 {"symbol":"S","arity":1,"gloss":"x swims"}]},
            "sentence":"Some children swim.","formula":"∃x(C(x)∧S(x))"}]}"#;
        let file: ExerciseFile = parse_json(json, "test").unwrap();
        let ex = exercises_from_file(file.clone()).unwrap();
        assert_eq!(ex[0].gold.to_string(), "∃x(C(x) ∧ S(x))");
        assert_eq!(ex[0].signature.preds.len(), 2);
        let again: ExerciseFile = parse_json(&serde_json::to_string(&file).unwrap(), "test").unwrap();
        assert_eq!(again, file);
        let empty: ExerciseFile = parse_json(r#"{"version":1,"exercises":[]}"#, "test").unwrap();
        assert!(exercises_from_file(empty).unwrap().is_empty());
        let mut dup = file.clone();
        dup.exercises.push(dup.exercises[0].clone());
        assert!(matches!(exercises_from_file(dup), Err(CorpusError::DuplicateId(_))));
    }
}
