//! Formalization backends: a replay table and a chat-completion client.

use std::collections::HashMap;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::BackendErrorKind;
use crate::grader::normalize;
use crate::signature::{signature_fingerprint, Signature};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptedEntry {
    /// Signature fingerprint; absent entries match any signature.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fingerprint: Option<String>,
    pub sentence: String,
    pub reply: String,
}

/// Recorded replies keyed by (signature fingerprint, normalized sentence).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<ScriptedEntry>", into = "Vec<ScriptedEntry>")]
pub struct ScriptedTable {
    replies: HashMap<(Option<String>, String), String>,
}

impl From<Vec<ScriptedEntry>> for ScriptedTable {
    fn from(entries: Vec<ScriptedEntry>) -> Self {
        let mut table = ScriptedTable::default();
        for e in entries {
            table.replies.insert((e.fingerprint, normalize(&e.sentence)), e.reply);
        }
        table
    }
}

impl From<ScriptedTable> for Vec<ScriptedEntry> {
    fn from(table: ScriptedTable) -> Self {
        let mut entries: Vec<ScriptedEntry> = table
            .replies
            .into_iter()
            .map(|((fingerprint, sentence), reply)| ScriptedEntry {
                fingerprint,
                sentence,
                reply,
            })
            .collect();
        entries.sort_by(|a, b| (&a.fingerprint, &a.sentence).cmp(&(&b.fingerprint, &b.sentence)));
        entries
    }
}

impl ScriptedTable {
    pub fn insert(&mut self, sig: &Signature, sentence: &str, reply: impl Into<String>) {
        self.replies.insert(
            (Some(signature_fingerprint(sig)), normalize(sentence)),
            reply.into(),
        );
    }

    pub fn lookup(&self, sig: &Signature, sentence: &str) -> Option<&str> {
        let sentence = normalize(sentence);
        self.replies
            .get(&(Some(signature_fingerprint(sig)), sentence.clone()))
            .or_else(|| self.replies.get(&(None, sentence)))
            .map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.replies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.replies.is_empty()
    }
}

fn default_timeout_ms() -> u64 {
    30_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RemoteConfig {
    pub endpoint: String,
    pub model: String,
    #[serde(default)]
    pub temperature: f64,
    /// Name of the environment variable holding the bearer token.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub api_key_env: Option<String>,
    #[serde(default = "default_timeout_ms")]
    pub timeout_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BackendConfig {
    Scripted { replies: ScriptedTable },
    Remote(RemoteConfig),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BackendFailure {
    pub kind: BackendErrorKind,
    pub detail: String,
}

fn failure(kind: BackendErrorKind, detail: impl Into<String>) -> BackendFailure {
    BackendFailure {
        kind,
        detail: detail.into(),
    }
}

enum Attempt {
    Done(Result<String, BackendFailure>),
    Retryable(BackendFailure),
}

fn reply_text(body: &Value) -> Option<String> {
    let choice = body.get("choices")?.get(0)?;
    choice
        .pointer("/message/content")
        .or_else(|| choice.get("text"))
        .and_then(Value::as_str)
        .map(str::to_string)
}

impl RemoteConfig {
    /// Sends `prompt` as a single user message and returns the reply text.
    /// Transport failures and 5xx responses are retried once.
    pub fn complete(&self, prompt: &str) -> Result<String, BackendFailure> {
        let key = match &self.api_key_env {
            Some(var) => Some(std::env::var(var).map_err(|_| {
                failure(
                    BackendErrorKind::Transport,
                    format!("environment variable {var} is not set"),
                )
            })?),
            None => None,
        };
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_millis(self.timeout_ms))
            .build()
            .map_err(|e| failure(BackendErrorKind::Transport, e.to_string()))?;
        let body = json!({
            "model": self.model,
            "temperature": self.temperature,
            "messages": [{"role": "user", "content": prompt}],
        });
        match self.attempt(&client, &body, key.as_deref()) {
            Attempt::Done(r) => r,
            Attempt::Retryable(_) => match self.attempt(&client, &body, key.as_deref()) {
                Attempt::Done(r) => r,
                Attempt::Retryable(f) => Err(f),
            },
        }
    }

    fn attempt(&self, client: &reqwest::blocking::Client, body: &Value, key: Option<&str>) -> Attempt {
        let mut request = client.post(&self.endpoint).json(body);
        if let Some(key) = key {
            request = request.bearer_auth(key);
        }
        let response = match request.send() {
            Ok(r) => r,
            Err(e) => {
                // the error text never includes request headers
                return Attempt::Retryable(failure(BackendErrorKind::Transport, e.without_url().to_string()));
            }
        };
        let status = response.status();
        if status.is_server_error() {
            return Attempt::Retryable(failure(BackendErrorKind::Transport, format!("HTTP {status}")));
        }
        if !status.is_success() {
            return Attempt::Done(Err(failure(BackendErrorKind::Transport, format!("HTTP {status}"))));
        }
        let parsed: Value = match response.json() {
            Ok(v) => v,
            Err(e) => {
                return Attempt::Done(Err(failure(
                    BackendErrorKind::MalformedOutput,
                    format!("response is not JSON: {}", e.without_url()),
                )))
            }
        };
        Attempt::Done(reply_text(&parsed).ok_or_else(|| {
            failure(
                BackendErrorKind::MalformedOutput,
                "response has no choices[0].message.content",
            )
        }))
    }
}
