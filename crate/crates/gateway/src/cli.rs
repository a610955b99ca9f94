//! The `formtutor` command line.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use formtutor_core::argue::check_argument;
use formtutor_core::autoform::PromptTemplate;
use formtutor_core::corpus::{benchmark_models, load_benchmark_file, score_benchmark, Mark, RowOutcome};
use formtutor_core::formula::{parse_formula, Formula};
use formtutor_core::prover::{
    check_equivalence, classify_verdict, fol_validity, prop_validity, DirectionResult, FolResult, ProofBudget,
    PropResult,
};
use formtutor_core::tutor::{
    check_deformalization, check_formalization, feedback_text, formalization_feedback_text, render_assignment,
};
use serde::Serialize;

use crate::api::{router, AppState};
use crate::config::{load_backend, Corpus, ServiceConfig};

#[derive(Debug, Parser)]
#[command(name = "formtutor", version, about = "Logic formalization tutor")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Replay a recorded benchmark and score it against its gold answers.
    Bench {
        dataset: PathBuf,
        #[arg(long)]
        model: String,
        #[arg(long)]
        budget_ms: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Decide validity of a formula.
    Prove {
        formula: String,
        #[arg(long)]
        budget_ms: Option<u64>,
    },
    /// Compare two formulas in both directions.
    Equiv {
        first: String,
        second: String,
        #[arg(long)]
        budget_ms: Option<u64>,
    },
    /// Check a natural-language rendering of an exercise formula.
    CheckDeformalization {
        #[arg(long)]
        exercise: String,
        #[arg(long)]
        text: String,
        #[arg(long)]
        backend: PathBuf,
        #[arg(long, default_value = "data")]
        corpus: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Check a formula written for an exercise sentence.
    CheckFormalization {
        #[arg(long)]
        exercise: String,
        #[arg(long)]
        formula: String,
        #[arg(long, default_value = "data")]
        corpus: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Check an argument given one sentence per line.
    CheckArgument {
        #[arg(long)]
        exercise: String,
        #[arg(long)]
        steps: PathBuf,
        #[arg(long)]
        backend: PathBuf,
        #[arg(long, default_value = "data")]
        corpus: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long)]
        config: PathBuf,
    },
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_DATA: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Parses `args`, runs the command and returns the process exit code.
/// Output goes to `out`, diagnostics to stderr.
pub fn run(args: impl IntoIterator<Item = impl Into<OsString> + Clone>, out: &mut dyn std::io::Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_DATA
        }
    }
}

fn budget(ms: Option<u64>) -> Result<ProofBudget> {
    let mut b = ProofBudget::default();
    if let Some(ms) = ms {
        b.time_limit_ms = ms;
    }
    b.validate()?;
    Ok(b)
}

fn formula(text: &str) -> Result<Formula> {
    parse_formula(text).map_err(|e| anyhow!("cannot parse `{text}`: {e}"))
}

fn emit(out: &mut dyn std::io::Write, text: &str) -> Result<()> {
    writeln!(out, "{text}")?;
    Ok(())
}

fn emit_json(out: &mut dyn std::io::Write, value: &impl Serialize) -> Result<()> {
    emit(out, &serde_json::to_string_pretty(value)?)
}

fn describe(r: &DirectionResult) -> String {
    match r {
        DirectionResult::Prop(PropResult::Valid) | DirectionResult::Fol(FolResult::Proved) => "proved".into(),
        DirectionResult::Prop(PropResult::Countermodel(a)) => format!("refuted, countermodel {}", render_assignment(a)),
        DirectionResult::Fol(FolResult::RefutedBySmallModel { model }) => format!("refuted, countermodel {model}"),
        DirectionResult::Fol(FolResult::Unknown { reason }) => format!("unknown ({reason:?})"),
    }
}

fn execute(command: Command, out: &mut dyn std::io::Write) -> Result<i32> {
    match command {
        Command::Bench {
            dataset,
            model,
            budget_ms,
            json,
        } => bench(&dataset, &model, budget(budget_ms)?, json, out),
        Command::Prove { formula: text, budget_ms } => {
            let f = formula(&text)?;
            let line = if f.is_propositional() {
                match prop_validity(&f)? {
                    PropResult::Valid => "Valid".to_string(),
                    PropResult::Countermodel(a) => format!("Countermodel: {}", render_assignment(&a)),
                }
            } else {
                match fol_validity(&f, &budget(budget_ms)?) {
                    FolResult::Proved => "Valid".to_string(),
                    FolResult::RefutedBySmallModel { model } => format!("Countermodel: {model}"),
                    FolResult::Unknown { reason } => format!("Unknown: {reason:?}"),
                }
            };
            emit(out, &line)?;
            Ok(EXIT_OK)
        }
        Command::Equiv {
            first,
            second,
            budget_ms,
        } => {
            let (a, b) = (formula(&first)?, formula(&second)?);
            let d = check_equivalence(&a, &b, &budget(budget_ms)?)?;
            let verdict = serde_json::to_value(classify_verdict(&d))?;
            let name = verdict["verdict"].as_str().unwrap_or_default();
            emit(out, &title_case(name))?;
            emit(out, &format!("  {a} → {b}: {}", describe(&d.forward)))?;
            emit(out, &format!("  {b} → {a}: {}", describe(&d.backward)))?;
            Ok(EXIT_OK)
        }
        Command::CheckDeformalization {
            exercise,
            text,
            backend,
            corpus,
            json,
        } => {
            let corpus = Corpus::load(&corpus)?;
            let ex = corpus
                .exercises
                .get(&exercise)
                .ok_or_else(|| anyhow!("unknown exercise `{exercise}`"))?;
            let backend = load_backend(&backend)?;
            let tpl = PromptTemplate::instruction_for(&ex.signature);
            let report = check_deformalization(ex, &text, &backend, &tpl, &ProofBudget::default());
            if json {
                emit_json(out, &report)?;
            } else {
                emit(out, &feedback_text(&report))?;
            }
            Ok(EXIT_OK)
        }
        Command::CheckFormalization {
            exercise,
            formula: text,
            corpus,
            json,
        } => {
            let corpus = Corpus::load(&corpus)?;
            let ex = corpus
                .exercises
                .get(&exercise)
                .ok_or_else(|| anyhow!("unknown exercise `{exercise}`"))?;
            let report = check_formalization(ex, &text, &ProofBudget::default());
            if json {
                emit_json(out, &report)?;
            } else {
                emit(out, &formalization_feedback_text(&report))?;
            }
            Ok(EXIT_OK)
        }
        Command::CheckArgument {
            exercise,
            steps,
            backend,
            corpus,
            json,
        } => {
            let corpus = Corpus::load(&corpus)?;
            let ex = corpus
                .arguments
                .get(&exercise)
                .ok_or_else(|| anyhow!("unknown argument exercise `{exercise}`"))?;
            let sentences = read_steps(&steps)?;
            let backend = load_backend(&backend)?;
            let tpl = PromptTemplate::instruction_for(&ex.signature);
            let report = check_argument(ex, &sentences, &backend, &tpl);
            if json {
                emit_json(out, &report)?;
            } else {
                for (i, s) in report.steps.iter().enumerate() {
                    let status = serde_json::to_value(s.status)?;
                    let mut line = format!("{:>2}. [{}] {}", i + 1, status.as_str().unwrap_or_default(), s.text);
                    if let Some(f) = &s.formula {
                        let _ = write!(line, "  ({f})");
                    }
                    if let Some(h) = s.fallacy_hint {
                        let _ = write!(line, "  hint: {}", serde_json::to_value(h)?.as_str().unwrap_or_default());
                    }
                    emit(out, &line)?;
                }
                emit(out, &report.message)?;
            }
            Ok(EXIT_OK)
        }
        Command::Serve { config } => {
            serve(&config)?;
            Ok(EXIT_OK)
        }
    }
}

fn title_case(snake: &str) -> String {
    snake
        .split('_')
        .map(|w| {
            let mut c = w.chars();
            c.next().map(|f| f.to_uppercase().chain(c).collect::<String>()).unwrap_or_default()
        })
        .collect()
}

fn read_steps(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let steps: Vec<String> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(String::from)
        .collect();
    if steps.is_empty() {
        bail!("{} contains no steps", path.display());
    }
    Ok(steps)
}

fn mark(m: Mark) -> &'static str {
    match m {
        Mark::Correct => "+",
        Mark::Incorrect => "-",
    }
}

fn bench(dataset: &Path, model: &str, budget: ProofBudget, json: bool, out: &mut dyn std::io::Write) -> Result<i32> {
    let b = load_benchmark_file(dataset)?;
    let models = benchmark_models(&b);
    if !models.iter().any(|m| m == model) {
        bail!("model `{model}` not in {}; available: {}", dataset.display(), models.join(", "));
    }
    let summary = score_benchmark(&b, model, &budget);
    if json {
        emit_json(out, &summary)?;
    } else {
        emit(out, " row  exp  got  outcome")?;
        for (row, v) in b.rows.iter().zip(&summary.rows) {
            let expected = row.expected.get(model).map(|m| mark(*m)).unwrap_or(" ");
            let got = if v.correct { "+" } else { "-" };
            let outcome = match &v.outcome {
                RowOutcome::InPrompt => "worked example".to_string(),
                RowOutcome::NotExpressible => "not expressible".to_string(),
                RowOutcome::Formalized { formula, verdict } => {
                    let v = serde_json::to_value(verdict)?;
                    format!("{formula}  [{}]", v["verdict"].as_str().unwrap_or_default())
                }
                RowOutcome::Unscorable { diagnostic } => format!("unscorable: {diagnostic}"),
            };
            emit(out, &format!("{:>4}   {expected}    {got}   {outcome}", row.id))?;
        }
        emit(out, &format!("correct {}/{}", summary.correct, summary.total))?;
        if summary.mismatches.is_empty() {
            emit(out, "mismatches: none")?;
        } else {
            let ids: Vec<String> = summary.mismatches.iter().map(|m| m.id.to_string()).collect();
            emit(out, &format!("mismatches: {}", ids.join(", ")))?;
        }
    }
    Ok(if summary.mismatches.is_empty() { EXIT_OK } else { EXIT_DATA })
}

fn serve(config: &Path) -> Result<()> {
    let cfg = ServiceConfig::load(config)?;
    let state = AppState {
        corpus: Corpus::load(&cfg.corpus_dir)?,
        backend: cfg.backend()?,
        budget: cfg.budget,
    };
    let app = router(state, cfg.static_dir.as_deref());
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind(cfg.listen)
            .await
            .with_context(|| format!("binding {}", cfg.listen))?;
        tracing::info!(addr = %listener.local_addr()?, "listening");
        axum::serve(listener, app).with_graceful_shutdown(shutdown_signal()).await?;
        Ok(())
    })
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        if let Ok(mut s) = tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            s.recv().await;
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {}
        _ = term => {}
    }
    tracing::info!("shutting down");
}
