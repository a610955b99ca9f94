//! The notation block of an exercise: symbols, arities and glosses.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::formula::{ErrorKind, ParseError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LogicKind {
    #[serde(rename = "prop")]
    Propositional,
    #[serde(rename = "fol")]
    FirstOrder,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropEntry {
    pub symbol: String,
    pub gloss: String,
}

/// A predicate with its gloss template. `params` are the placeholder
/// names used in the template, e.g. `["a", "b"]` for `L(a,b):a is larger
/// than b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredEntry {
    pub symbol: String,
    pub arity: usize,
    pub gloss: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<String>,
}

const DEFAULT_PARAMS: [&str; 6] = ["x", "y", "z", "u", "v", "w"];

impl PredEntry {
    pub fn new(symbol: impl Into<String>, arity: usize, gloss: impl Into<String>) -> Self {
        PredEntry {
            symbol: symbol.into(),
            arity,
            gloss: gloss.into(),
            params: Vec::new(),
        }
    }

    /// Placeholder names, defaulting to `x, y, z, ...` when none are given.
    pub fn placeholders(&self) -> Vec<String> {
        if !self.params.is_empty() {
            return self.params.clone();
        }
        (0..self.arity)
            .map(|i| match DEFAULT_PARAMS.get(i) {
                Some(p) => p.to_string(),
                None => format!("x{i}"),
            })
            .collect()
    }

    /// Number of distinct placeholders occurring as whole words in the gloss.
    pub fn placeholders_in_gloss(&self) -> usize {
        let words: BTreeSet<&str> = self
            .gloss
            .split(|c: char| !c.is_alphanumeric() && c != '_')
            .filter(|w| !w.is_empty())
            .collect();
        let params: BTreeSet<String> = self.placeholders().into_iter().collect();
        params.iter().filter(|p| words.contains(p.as_str())).count()
    }

    fn head(&self) -> String {
        format!("{}({})", self.symbol, self.placeholders().join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstEntry {
    pub symbol: String,
    pub gloss: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub kind: LogicKind,
    #[serde(default)]
    pub props: Vec<PropEntry>,
    #[serde(default)]
    pub preds: Vec<PredEntry>,
    #[serde(default)]
    pub consts: Vec<ConstEntry>,
}

impl Signature {
    pub fn propositional(props: impl IntoIterator<Item = (&'static str, &'static str)>) -> Self {
        Signature {
            kind: LogicKind::Propositional,
            props: props
                .into_iter()
                .map(|(s, g)| PropEntry {
                    symbol: s.into(),
                    gloss: g.into(),
                })
                .collect(),
            preds: Vec::new(),
            consts: Vec::new(),
        }
    }

    pub fn has_prop(&self, symbol: &str) -> bool {
        self.props.iter().any(|p| p.symbol == symbol)
    }

    pub fn has_constant(&self, symbol: &str) -> bool {
        self.consts.iter().any(|c| c.symbol == symbol)
    }

    pub fn predicate_arity(&self, symbol: &str) -> Option<usize> {
        self.preds.iter().find(|p| p.symbol == symbol).map(|p| p.arity)
    }

    fn symbols(&self) -> impl Iterator<Item = &str> {
        self.props
            .iter()
            .map(|p| p.symbol.as_str())
            .chain(self.preds.iter().map(|p| p.symbol.as_str()))
            .chain(self.consts.iter().map(|c| c.symbol.as_str()))
    }

    /// `symbol:gloss` entries in declaration order, predicates written
    /// with their head, e.g. `L(a,b)`.
    pub fn entries(&self) -> Vec<(String, &str)> {
        let mut out: Vec<(String, &str)> = Vec::new();
        out.extend(self.props.iter().map(|p| (p.symbol.clone(), p.gloss.as_str())));
        out.extend(self.preds.iter().map(|p| (p.head(), p.gloss.as_str())));
        out.extend(self.consts.iter().map(|c| (c.symbol.clone(), c.gloss.as_str())));
        out
    }

    /// The brace wire form, `notation:{S:The sun shines;R:It rains}`.
    pub fn to_wire(&self) -> String {
        let body: Vec<String> = self
            .entries()
            .into_iter()
            .map(|(s, g)| format!("{s}:{g}"))
            .collect();
        format!("notation:{{{}}}", body.join(";"))
    }
}

fn valid_symbol(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Parses the `notation:{sym:gloss;...}` wire form.
///
/// Entries with a `sym(x,...)` head are predicates. When at least one
/// predicate is present the block is first-order and bare symbols are
/// constants; otherwise bare symbols are propositional letters.
pub fn parse_notation_block(text: &str) -> Result<Signature, ParseError> {
    let trimmed = text.trim();
    let offset = text.chars().count() - text.trim_start().chars().count();
    let inner = trimmed
        .strip_prefix("notation:{")
        .and_then(|rest| rest.strip_suffix('}'))
        .ok_or_else(|| {
            ParseError::new(
                offset,
                ErrorKind::MalformedEntry,
                "expected `notation:{...}`",
            )
        })?;
    let mut pos = offset + "notation:{".chars().count();

    enum Raw {
        Bare(String, String),
        Pred(PredEntry),
    }
    let mut raws = Vec::new();
    let mut seen = BTreeSet::new();
    if !inner.trim().is_empty() {
        for entry in inner.split(';') {
            let entry_pos = pos;
            pos += entry.chars().count() + 1;
            let malformed = |msg: String| ParseError::new(entry_pos, ErrorKind::MalformedEntry, msg);
            let (head, gloss) = entry
                .split_once(':')
                .ok_or_else(|| malformed(format!("entry `{entry}` has no `:`")))?;
            let (head, gloss) = (head.trim(), gloss.trim());
            if gloss.is_empty() {
                return Err(malformed(format!("entry `{entry}` has an empty gloss")));
            }
            let (symbol, raw) = match head.split_once('(') {
                Some((sym, rest)) => {
                    let params = rest
                        .strip_suffix(')')
                        .ok_or_else(|| malformed(format!("bad predicate head `{head}`")))?;
                    let params: Vec<String> =
                        params.split(',').map(|p| p.trim().to_string()).collect();
                    if params.iter().any(|p| !valid_symbol(p)) {
                        return Err(malformed(format!("bad predicate head `{head}`")));
                    }
                    let sym = sym.trim().to_string();
                    let pred = PredEntry {
                        symbol: sym.clone(),
                        arity: params.len(),
                        gloss: gloss.to_string(),
                        params,
                    };
                    (sym, Raw::Pred(pred))
                }
                None => (
                    head.to_string(),
                    Raw::Bare(head.to_string(), gloss.to_string()),
                ),
            };
            if !valid_symbol(&symbol) {
                return Err(malformed(format!("bad symbol `{symbol}`")));
            }
            if !seen.insert(symbol.clone()) {
                return Err(ParseError::new(
                    entry_pos,
                    ErrorKind::DuplicateSymbol,
                    format!("symbol `{symbol}` is declared twice"),
                ));
            }
            raws.push(raw);
        }
    }

    let first_order = raws.iter().any(|r| matches!(r, Raw::Pred(_)));
    let mut sig = Signature {
        kind: if first_order {
            LogicKind::FirstOrder
        } else {
            LogicKind::Propositional
        },
        props: Vec::new(),
        preds: Vec::new(),
        consts: Vec::new(),
    };
    for raw in raws {
        match raw {
            Raw::Pred(p) => sig.preds.push(p),
            Raw::Bare(symbol, gloss) if first_order => sig.consts.push(ConstEntry { symbol, gloss }),
            Raw::Bare(symbol, gloss) => sig.props.push(PropEntry { symbol, gloss }),
        }
    }
    Ok(sig)
}

/// Checks the structural invariants of a signature, one error per
/// violation.
pub fn validate_signature(sig: &Signature) -> Result<(), Vec<ParseError>> {
    let mut errors = Vec::new();
    let mut seen = BTreeSet::new();
    for s in sig.symbols() {
        if !valid_symbol(s) {
            errors.push(ParseError::new(
                0,
                ErrorKind::MalformedEntry,
                format!("bad symbol `{s}`"),
            ));
        }
        if !seen.insert(s) {
            errors.push(ParseError::new(
                0,
                ErrorKind::DuplicateSymbol,
                format!("symbol `{s}` is declared more than once"),
            ));
        }
    }
    match sig.kind {
        LogicKind::Propositional => {
            for s in sig
                .preds
                .iter()
                .map(|p| &p.symbol)
                .chain(sig.consts.iter().map(|c| &c.symbol))
            {
                errors.push(ParseError::new(
                    0,
                    ErrorKind::KindMismatch,
                    format!("`{s}` cannot appear in a propositional notation"),
                ));
            }
        }
        LogicKind::FirstOrder => {
            for p in &sig.props {
                errors.push(ParseError::new(
                    0,
                    ErrorKind::KindMismatch,
                    format!(
                        "propositional letter `{}` cannot appear in a first-order notation",
                        p.symbol
                    ),
                ));
            }
        }
    }
    for p in &sig.preds {
        let params: BTreeSet<String> = p.placeholders().into_iter().collect();
        if p.arity == 0
            || (!p.params.is_empty() && (p.params.len() != p.arity || params.len() != p.arity))
            || p.placeholders_in_gloss() != p.arity
        {
            errors.push(ParseError::new(
                0,
                ErrorKind::PlaceholderCount,
                format!(
                    "gloss of `{}` must mention each of its {} placeholder(s) {:?}",
                    p.symbol,
                    p.arity,
                    p.placeholders()
                ),
            ));
        }
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}

/// Content hash of a signature, insensitive to entry order.
pub fn signature_fingerprint(sig: &Signature) -> String {
    let mut lines: Vec<String> = Vec::new();
    lines.extend(
        sig.props
            .iter()
            .map(|p| format!("prop\u{1f}{}\u{1f}{}", p.symbol, p.gloss)),
    );
    lines.extend(sig.preds.iter().map(|p| {
        format!(
            "pred\u{1f}{}\u{1f}{}\u{1f}{}\u{1f}{}",
            p.symbol,
            p.arity,
            p.placeholders().join(","),
            p.gloss
        )
    }));
    lines.extend(
        sig.consts
            .iter()
            .map(|c| format!("const\u{1f}{}\u{1f}{}", c.symbol, c.gloss)),
    );
    lines.sort();
    let mut hasher = Sha256::new();
    hasher.update(match sig.kind {
        LogicKind::Propositional => b"prop\n".as_slice(),
        LogicKind::FirstOrder => b"fol\n".as_slice(),
    });
    for line in &lines {
        hasher.update(line.as_bytes());
        hasher.update(b"\n");
    }
    hex::encode(hasher.finalize())
}
