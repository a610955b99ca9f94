//! Service configuration and the read-only data it serves.

use std::collections::BTreeMap;
use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use formtutor_core::argue::ArgumentExercise;
use formtutor_core::autoform::BackendConfig;
use formtutor_core::corpus::{load_argument_file, load_exercise_file, parse_json};
use formtutor_core::prover::ProofBudget;
use formtutor_core::tutor::Exercise;
use serde::{Deserialize, Serialize};

pub const EXERCISE_FILE: &str = "exercises.json";
pub const ARGUMENT_FILE: &str = "arguments.json";

/// A backend given inline or as a path to a JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BackendRef {
    Path(PathBuf),
    Inline(BackendConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServiceConfig {
    pub listen: SocketAddr,
    pub corpus_dir: PathBuf,
    pub backend: BackendRef,
    #[serde(default)]
    pub budget: ProofBudget,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub static_dir: Option<PathBuf>,
}

impl ServiceConfig {
    /// Reads a config file; relative paths in it are taken relative to the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg: ServiceConfig = parse_json(&text, &path.display().to_string())?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.corpus_dir = base.join(&cfg.corpus_dir);
        if let BackendRef::Path(p) = &mut cfg.backend {
            *p = base.join(&*p);
        }
        if let Some(dir) = &mut cfg.static_dir {
            *dir = base.join(&*dir);
        }
        cfg.budget.validate()?;
        Ok(cfg)
    }

    pub fn backend(&self) -> Result<BackendConfig> {
        match &self.backend {
            BackendRef::Inline(b) => Ok(b.clone()),
            BackendRef::Path(p) => load_backend(p),
        }
    }
}

pub fn load_backend(path: &Path) -> Result<BackendConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(parse_json(&text, &path.display().to_string())?)
}

/// Exercises and argument exercises by id.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    pub exercises: BTreeMap<String, Exercise>,
    pub arguments: BTreeMap<String, ArgumentExercise>,
}

impl Corpus {
    /// Loads `exercises.json` and `arguments.json` from `dir`; either file
    /// may be absent.
    pub fn load(dir: &Path) -> Result<Self> {
        if !dir.is_dir() {
            bail!("corpus directory {} is not readable", dir.display());
        }
        let mut corpus = Corpus::default();
        let exercises = dir.join(EXERCISE_FILE);
        if exercises.exists() {
            for ex in load_exercise_file(&exercises)? {
                corpus.exercises.insert(ex.id.clone(), ex);
            }
        }
        let arguments = dir.join(ARGUMENT_FILE);
        if arguments.exists() {
            for ex in load_argument_file(&arguments)? {
                corpus.arguments.insert(ex.id.clone(), ex);
            }
        }
        Ok(corpus)
    }
}
