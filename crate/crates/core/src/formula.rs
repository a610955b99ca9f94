//! Formula language shared by propositional and first-order exercises.
//!
//! The concrete syntax accepts three dialects:
//!
//! * infix notation with Unicode (`¬ ∧ ∨ ⊻ → ↔ ∀ ∃ = ≠`) or ASCII
//!   (`~ & | ^ -> <-> forall exists = !=`) operators, with the LaTeX
//!   macros `\neg \wedge \vee \veebar \rightarrow \leftrightarrow \forall
//!   \exists \neq` mapped onto the Unicode operators;
//! * the bracketed list format emitted by backends prompted in the style
//!   `[W,→,[neg,[L,or,N]]]`.
//!
//! Precedence, tightest first: `¬`/quantifiers, `∧`, `∨`, `⊻`, `→`, `↔`.
//! `∧ ∨ ⊻` associate to the left, `→ ↔` to the right. A quantifier binds
//! like a negation, so `∀x D(x) → B(x)` is `(∀x D(x)) → B(x)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::signature::{LogicKind, Signature};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Variable(String),
    Constant(String),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Variable(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Term::Constant(name.into())
    }

    pub fn name(&self) -> &str {
        match self {
            Term::Variable(n) | Term::Constant(n) => n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Prop(String),
    Pred(String, Vec<Term>),
    Equal(Term, Term),
    /// `t1 ≠ t2`, kept apart from `¬(t1 = t2)` until [`desugar`].
    NotEqual(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Xor(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    And,
    Or,
    Xor,
    Implies,
    Iff,
}

impl BinOp {
    fn right_assoc(self) -> bool {
        matches!(self, BinOp::Implies | BinOp::Iff)
    }

    fn symbol(self, style: Style) -> &'static str {
        match (self, style) {
            (BinOp::And, Style::Unicode) => "∧",
            (BinOp::Or, Style::Unicode) => "∨",
            (BinOp::Xor, Style::Unicode) => "⊻",
            (BinOp::Implies, Style::Unicode) => "→",
            (BinOp::Iff, Style::Unicode) => "↔",
            (BinOp::And, Style::Ascii) => "&",
            (BinOp::Or, Style::Ascii) => "|",
            (BinOp::Xor, Style::Ascii) => "^",
            (BinOp::Implies, Style::Ascii) => "->",
            (BinOp::Iff, Style::Ascii) => "<->",
        }
    }
}

impl Formula {
    pub fn prop(letter: impl Into<String>) -> Self {
        Formula::Prop(letter.into())
    }

    pub fn pred(symbol: impl Into<String>, args: Vec<Term>) -> Self {
        Formula::Pred(symbol.into(), args)
    }

    pub fn equal(lhs: Term, rhs: Term) -> Self {
        Formula::Equal(lhs, rhs)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Self {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn xor(l: Formula, r: Formula) -> Self {
        Formula::Xor(Box::new(l), Box::new(r))
    }

    pub fn implies(l: Formula, r: Formula) -> Self {
        Formula::Implies(Box::new(l), Box::new(r))
    }

    pub fn iff(l: Formula, r: Formula) -> Self {
        Formula::Iff(Box::new(l), Box::new(r))
    }

    pub fn forall(var: impl Into<String>, body: Formula) -> Self {
        Formula::Forall(var.into(), Box::new(body))
    }

    pub fn exists(var: impl Into<String>, body: Formula) -> Self {
        Formula::Exists(var.into(), Box::new(body))
    }

    /// Left-nested conjunction of `parts`, `None` when empty.
    pub fn conjoin(parts: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        parts.into_iter().reduce(Formula::and)
    }

    pub fn binary(&self) -> Option<(BinOp, &Formula, &Formula)> {
        match self {
            Formula::And(l, r) => Some((BinOp::And, l, r)),
            Formula::Or(l, r) => Some((BinOp::Or, l, r)),
            Formula::Xor(l, r) => Some((BinOp::Xor, l, r)),
            Formula::Implies(l, r) => Some((BinOp::Implies, l, r)),
            Formula::Iff(l, r) => Some((BinOp::Iff, l, r)),
            _ => None,
        }
    }

    fn rebuild(op: BinOp, l: Formula, r: Formula) -> Formula {
        match op {
            BinOp::And => Formula::and(l, r),
            BinOp::Or => Formula::or(l, r),
            BinOp::Xor => Formula::xor(l, r),
            BinOp::Implies => Formula::implies(l, r),
            BinOp::Iff => Formula::iff(l, r),
        }
    }

    /// True iff the formula has no predicate, equality or quantifier node.
    pub fn is_propositional(&self) -> bool {
        match self {
            Formula::Prop(_) => true,
            Formula::Pred(..)
            | Formula::Equal(..)
            | Formula::NotEqual(..)
            | Formula::Forall(..)
            | Formula::Exists(..) => false,
            Formula::Not(f) => f.is_propositional(),
            _ => {
                let (_, l, r) = self.binary().expect("binary node");
                l.is_propositional() && r.is_propositional()
            }
        }
    }

    /// True iff some node is a propositional letter.
    pub fn has_prop_atoms(&self) -> bool {
        let mut found = false;
        self.visit(&mut |f| found |= matches!(f, Formula::Prop(_)));
        found
    }

    pub fn has_equality(&self) -> bool {
        let mut found = false;
        self.visit(&mut |f| found |= matches!(f, Formula::Equal(..) | Formula::NotEqual(..)));
        found
    }

    pub fn prop_letters(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Prop(p) = f {
                out.insert(p.clone());
            }
        });
        out
    }

    /// Predicate symbols with the arity of their first occurrence.
    pub fn predicates(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        self.visit(&mut |f| {
            if let Formula::Pred(p, args) = f {
                out.entry(p.clone()).or_insert(args.len());
            }
        });
        out
    }

    pub fn constants(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            for t in f.atom_terms() {
                if let Term::Constant(c) = t {
                    out.insert(c.clone());
                }
            }
        });
        out
    }

    fn atom_terms(&self) -> Vec<&Term> {
        match self {
            Formula::Pred(_, args) => args.iter().collect(),
            Formula::Equal(a, b) | Formula::NotEqual(a, b) => vec![a, b],
            _ => Vec::new(),
        }
    }

    /// Pre-order traversal.
    pub fn visit(&self, f: &mut dyn FnMut(&Formula)) {
        f(self);
        match self {
            Formula::Not(g) | Formula::Forall(_, g) | Formula::Exists(_, g) => g.visit(f),
            Formula::And(l, r)
            | Formula::Or(l, r)
            | Formula::Xor(l, r)
            | Formula::Implies(l, r)
            | Formula::Iff(l, r) => {
                l.visit(f);
                r.visit(f);
            }
            _ => {}
        }
    }

    /// Applies `rename` to every propositional letter.
    pub fn rename_props(&self, rename: &dyn Fn(&str) -> String) -> Formula {
        match self {
            Formula::Prop(p) => Formula::Prop(rename(p)),
            Formula::Not(g) => Formula::not(g.rename_props(rename)),
            Formula::Forall(v, g) => Formula::forall(v.clone(), g.rename_props(rename)),
            Formula::Exists(v, g) => Formula::exists(v.clone(), g.rename_props(rename)),
            other => match other.binary() {
                Some((op, l, r)) => {
                    Formula::rebuild(op, l.rename_props(rename), r.rename_props(rename))
                }
                None => other.clone(),
            },
        }
    }

    /// Turns free variables whose name is a declared constant of `sig`
    /// into constants. Parsing alone cannot tell `a` the constant from `a`
    /// the variable.
    pub fn resolve_constants(&self, sig: &Signature) -> Formula {
        fn go(f: &Formula, sig: &Signature, bound: &mut Vec<String>) -> Formula {
            let fix = |t: &Term, bound: &[String]| match t {
                Term::Variable(v) if !bound.contains(v) && sig.has_constant(v) => {
                    Term::Constant(v.clone())
                }
                other => other.clone(),
            };
            match f {
                Formula::Prop(_) => f.clone(),
                Formula::Pred(p, args) => {
                    Formula::Pred(p.clone(), args.iter().map(|t| fix(t, bound)).collect())
                }
                Formula::Equal(a, b) => Formula::Equal(fix(a, bound), fix(b, bound)),
                Formula::NotEqual(a, b) => Formula::NotEqual(fix(a, bound), fix(b, bound)),
                Formula::Not(g) => Formula::not(go(g, sig, bound)),
                Formula::Forall(v, g) | Formula::Exists(v, g) => {
                    bound.push(v.clone());
                    let body = go(g, sig, bound);
                    bound.pop();
                    if matches!(f, Formula::Forall(..)) {
                        Formula::forall(v.clone(), body)
                    } else {
                        Formula::exists(v.clone(), body)
                    }
                }
                other => {
                    let (op, l, r) = other.binary().expect("binary node");
                    Formula::rebuild(op, go(l, sig, bound), go(r, sig, bound))
                }
            }
        }
        go(self, sig, &mut Vec::new())
    }

    pub fn render(&self, style: Style) -> String {
        render_formula(self, style)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_formula(self, Style::Unicode))
    }
}

impl Serialize for Formula {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&render_formula(self, Style::Unicode))
    }
}

impl<'de> Deserialize<'de> for Formula {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_formula(&text).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorKind {
    UnexpectedToken,
    UnbalancedBracket,
    UnknownSymbol,
    ArityMismatch,
    UnboundVariable,
    EmptyInput,
    KindMismatch,
    DuplicateSymbol,
    MalformedEntry,
    PlaceholderCount,
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ErrorKind::UnexpectedToken => "unexpected-token",
            ErrorKind::UnbalancedBracket => "unbalanced-bracket",
            ErrorKind::UnknownSymbol => "unknown-symbol",
            ErrorKind::ArityMismatch => "arity-mismatch",
            ErrorKind::UnboundVariable => "unbound-variable",
            ErrorKind::EmptyInput => "empty-input",
            ErrorKind::KindMismatch => "kind-mismatch",
            ErrorKind::DuplicateSymbol => "duplicate-symbol",
            ErrorKind::MalformedEntry => "malformed-entry",
            ErrorKind::PlaceholderCount => "placeholder-count",
        };
        f.write_str(s)
    }
}

/// A syntax or well-formedness error. `position` is a 0-based character
/// offset into the parsed text; semantic errors found on an already parsed
/// formula report position 0.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[error("{kind} at {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub kind: ErrorKind,
    pub message: String,
}

impl ParseError {
    pub fn new(position: usize, kind: ErrorKind, message: impl Into<String>) -> Self {
        ParseError {
            position,
            kind,
            message: message.into(),
        }
    }
}

// ---------------------------------------------------------------------------
// Lexer

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Colon,
    Dot,
    Not,
    And,
    Or,
    Xor,
    Implies,
    Iff,
    Forall,
    Exists,
    Eq,
    Neq,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Not => "negation".into(),
            Tok::And => "conjunction".into(),
            Tok::Or => "disjunction".into(),
            Tok::Xor => "exclusive disjunction".into(),
            Tok::Implies => "implication".into(),
            Tok::Iff => "biconditional".into(),
            Tok::Forall => "universal quantifier".into(),
            Tok::Exists => "existential quantifier".into(),
            Tok::Eq => "`=`".into(),
            Tok::Neq => "`≠`".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    pos: usize,
}

fn latex_macro(name: &str) -> Option<Tok> {
    Some(match name {
        "neg" => Tok::Not,
        "wedge" => Tok::And,
        "vee" => Tok::Or,
        "veebar" => Tok::Xor,
        "rightarrow" => Tok::Implies,
        "leftrightarrow" => Tok::Iff,
        "forall" => Tok::Forall,
        "exists" => Tok::Exists,
        "neq" => Tok::Neq,
        _ => return None,
    })
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic()
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = i;
        let next = chars.get(i + 1).copied();
        let simple = match c {
            _ if c.is_whitespace() || c == '$' => {
                i += 1;
                continue;
            }
            '¬' | '~' => Some(Tok::Not),
            '∧' | '&' => Some(Tok::And),
            '∨' | '|' => Some(Tok::Or),
            '⊻' | '^' => Some(Tok::Xor),
            '→' => Some(Tok::Implies),
            '↔' => Some(Tok::Iff),
            '∀' => Some(Tok::Forall),
            '∃' => Some(Tok::Exists),
            '=' => Some(Tok::Eq),
            '≠' => Some(Tok::Neq),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ',' => Some(Tok::Comma),
            ':' => Some(Tok::Colon),
            '.' => Some(Tok::Dot),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push(Token { tok, pos });
            i += 1;
            continue;
        }
        match c {
            '!' if next == Some('=') => {
                out.push(Token { tok: Tok::Neq, pos });
                i += 2;
            }
            '!' => {
                out.push(Token { tok: Tok::Not, pos });
                i += 1;
            }
            '-' if next == Some('>') => {
                out.push(Token { tok: Tok::Implies, pos });
                i += 2;
            }
            '<' if next == Some('-') && chars.get(i + 2) == Some(&'>') => {
                out.push(Token { tok: Tok::Iff, pos });
                i += 3;
            }
            '\\' => {
                let start = i + 1;
                let mut j = start;
                while j < chars.len() && chars[j].is_ascii_alphabetic() {
                    j += 1;
                }
                let name: String = chars[start..j].iter().collect();
                match latex_macro(&name) {
                    Some(tok) => out.push(Token { tok, pos }),
                    None => {
                        return Err(ParseError::new(
                            pos,
                            ErrorKind::UnknownSymbol,
                            format!("unknown macro `\\{name}`"),
                        ))
                    }
                }
                i = j;
            }
            _ if is_ident_start(c) => {
                let mut j = i;
                while j < chars.len() && is_ident_char(chars[j]) {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                let tok = match word.as_str() {
                    "forall" => Tok::Forall,
                    "exists" => Tok::Exists,
                    _ => Tok::Ident(word),
                };
                out.push(Token { tok, pos });
                i = j;
            }
            _ => {
                return Err(ParseError::new(
                    pos,
                    ErrorKind::UnknownSymbol,
                    format!("unknown symbol `{c}`"),
                ))
            }
        }
    }
    Ok(out)
}

fn check_brackets(tokens: &[Token]) -> Result<(), ParseError> {
    let mut stack: Vec<&Token> = Vec::new();
    for t in tokens {
        match t.tok {
            Tok::LParen | Tok::LBrace | Tok::LBracket => stack.push(t),
            Tok::RParen | Tok::RBrace | Tok::RBracket => {
                let expected = match t.tok {
                    Tok::RParen => Tok::LParen,
                    Tok::RBrace => Tok::LBrace,
                    _ => Tok::LBracket,
                };
                match stack.pop() {
                    Some(open) if open.tok == expected => {}
                    Some(open) => {
                        return Err(ParseError::new(
                            t.pos,
                            ErrorKind::UnbalancedBracket,
                            format!(
                                "{} closes {} opened at {}",
                                t.tok.describe(),
                                open.tok.describe(),
                                open.pos
                            ),
                        ))
                    }
                    None => {
                        return Err(ParseError::new(
                            t.pos,
                            ErrorKind::UnbalancedBracket,
                            format!("unmatched {}", t.tok.describe()),
                        ))
                    }
                }
            }
            _ => {}
        }
    }
    match stack.pop() {
        Some(open) => Err(ParseError::new(
            open.pos,
            ErrorKind::UnbalancedBracket,
            format!("{} is never closed", open.tok.describe()),
        )),
        None => Ok(()),
    }
}

// ---------------------------------------------------------------------------
// Parser

/// Unbound single lowercase letters (optionally followed by digits) are
/// read as variables; every other unbound term name is a constant.
fn looks_like_variable(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_digit() || c == '_')
}

struct Parser {
    toks: Vec<Token>,
    i: usize,
    end: usize,
    bound: Vec<String>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.i + k).map(|t| &t.tok)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map_or(self.end, |t| t.pos)
    }

    fn advance(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.i).map(|t| t.tok.clone());
        self.i += 1;
        t
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        match self.peek() {
            Some(t) => ParseError::new(
                self.pos(),
                ErrorKind::UnexpectedToken,
                format!("expected {wanted}, found {}", t.describe()),
            ),
            None => ParseError::new(
                self.end,
                ErrorKind::UnexpectedToken,
                format!("expected {wanted}, found end of input"),
            ),
        }
    }

    fn expect(&mut self, tok: Tok, wanted: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.i += 1;
            Ok(())
        } else {
            Err(self.unexpected(wanted))
        }
    }

    fn ident(&mut self, wanted: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(name)) => {
                let name = name.clone();
                self.i += 1;
                Ok(name)
            }
            _ => Err(self.unexpected(wanted)),
        }
    }

    fn term(&self, name: String) -> Term {
        if self.bound.contains(&name) || looks_like_variable(&name) {
            Term::Variable(name)
        } else {
            Term::Constant(name)
        }
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.implication()?;
        if self.peek() == Some(&Tok::Iff) {
            self.i += 1;
            let rhs = self.iff()?;
            return Ok(Formula::iff(lhs, rhs));
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.xor()?;
        if self.peek() == Some(&Tok::Implies) {
            self.i += 1;
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn xor(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.disjunction()?;
        while self.peek() == Some(&Tok::Xor) {
            self.i += 1;
            lhs = Formula::xor(lhs, self.disjunction()?);
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while self.peek() == Some(&Tok::Or) {
            self.i += 1;
            lhs = Formula::or(lhs, self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Tok::And) {
            self.i += 1;
            lhs = Formula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Not) => {
                self.i += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::Forall) => {
                self.i += 1;
                self.quantified(true)
            }
            Some(Tok::Exists) => {
                self.i += 1;
                self.quantified(false)
            }
            // ASCII `A x: ...` / `E x: ...`; a letter directly followed by
            // another identifier cannot be anything else.
            Some(Tok::Ident(q))
                if (q == "A" || q == "E") && matches!(self.peek_at(1), Some(Tok::Ident(_))) =>
            {
                let universal = q == "A";
                self.i += 1;
                self.quantified(universal)
            }
            _ => self.primary(),
        }
    }

    fn quantified(&mut self, universal: bool) -> Result<Formula, ParseError> {
        let wrap = |var: String, body: Formula| {
            if universal {
                Formula::forall(var, body)
            } else {
                Formula::exists(var, body)
            }
        };
        // LaTeX input: `\forall{x}D(x)` or `\forall{x(...)}`.
        if self.peek() == Some(&Tok::LBrace) {
            self.i += 1;
            let var = self.ident("a bound variable")?;
            self.bound.push(var.clone());
            let body = if self.peek() == Some(&Tok::RBrace) {
                self.i += 1;
                self.unary()
            } else {
                let body = self.iff();
                if body.is_ok() {
                    self.expect(Tok::RBrace, "`}`")?;
                }
                body
            };
            self.bound.pop();
            return Ok(wrap(var, body?));
        }
        let var = self.ident("a bound variable")?;
        if matches!(self.peek(), Some(Tok::Colon) | Some(Tok::Dot)) {
            self.i += 1;
        }
        self.bound.push(var.clone());
        let body = self.unary();
        self.bound.pop();
        Ok(wrap(var, body?))
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::LParen) => {
                self.i += 1;
                let f = self.iff()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Some(Tok::LBrace) => {
                self.i += 1;
                let f = self.iff()?;
                self.expect(Tok::RBrace, "`}`")?;
                Ok(f)
            }
            Some(Tok::LBracket) => self.bracketed(),
            Some(Tok::Ident(_)) => {
                let name = self.ident("an atom")?;
                match self.peek() {
                    Some(Tok::LParen) => {
                        self.i += 1;
                        let mut args = Vec::new();
                        loop {
                            let t = self.ident("a term")?;
                            args.push(self.term(t));
                            match self.peek() {
                                Some(Tok::Comma) => self.i += 1,
                                Some(Tok::RParen) => {
                                    self.i += 1;
                                    break;
                                }
                                _ => return Err(self.unexpected("`,` or `)`")),
                            }
                        }
                        Ok(Formula::Pred(name, args))
                    }
                    Some(Tok::Eq) | Some(Tok::Neq) => {
                        let negated = self.advance() == Some(Tok::Neq);
                        let rhs = self.ident("a term")?;
                        let (l, r) = (self.term(name), self.term(rhs));
                        Ok(if negated {
                            Formula::NotEqual(l, r)
                        } else {
                            Formula::Equal(l, r)
                        })
                    }
                    _ => Ok(Formula::Prop(name)),
                }
            }
            _ => Err(self.unexpected("a formula")),
        }
    }

    /// The bracketed list dialect: `[A]`, `[neg, A]`, `[A, op, B, op, C]`.
    fn bracketed(&mut self) -> Result<Formula, ParseError> {
        enum Item {
            F(Formula),
            Op(BinOp),
            Neg,
        }
        let open = self.pos();
        self.expect(Tok::LBracket, "`[`")?;
        let mut items = Vec::new();
        loop {
            let item = match self.peek() {
                Some(Tok::Not) => {
                    self.i += 1;
                    Item::Neg
                }
                Some(Tok::And) => {
                    self.i += 1;
                    Item::Op(BinOp::And)
                }
                Some(Tok::Or) => {
                    self.i += 1;
                    Item::Op(BinOp::Or)
                }
                Some(Tok::Xor) => {
                    self.i += 1;
                    Item::Op(BinOp::Xor)
                }
                Some(Tok::Implies) => {
                    self.i += 1;
                    Item::Op(BinOp::Implies)
                }
                Some(Tok::Iff) => {
                    self.i += 1;
                    Item::Op(BinOp::Iff)
                }
                Some(Tok::Ident(w))
                    if matches!(self.peek_at(1), Some(Tok::Comma) | Some(Tok::RBracket)) =>
                {
                    let item = match w.as_str() {
                        "neg" | "not" => Item::Neg,
                        "and" => Item::Op(BinOp::And),
                        "or" => Item::Op(BinOp::Or),
                        "xor" => Item::Op(BinOp::Xor),
                        "impl" | "implies" => Item::Op(BinOp::Implies),
                        "iff" | "equiv" => Item::Op(BinOp::Iff),
                        _ => Item::F(Formula::Prop(w.clone())),
                    };
                    self.i += 1;
                    item
                }
                _ => Item::F(self.iff()?),
            };
            items.push(item);
            match self.peek() {
                Some(Tok::Comma) => self.i += 1,
                Some(Tok::RBracket) => {
                    self.i += 1;
                    break;
                }
                _ => return Err(self.unexpected("`,` or `]`")),
            }
        }
        let malformed = || {
            ParseError::new(
                open,
                ErrorKind::UnexpectedToken,
                "malformed bracketed formula".to_string(),
            )
        };
        let mut items = items.into_iter();
        match (items.next(), items.len()) {
            (Some(Item::F(f)), 0) => Ok(f),
            (Some(Item::Neg), 1) => match items.next() {
                Some(Item::F(f)) => Ok(Formula::not(f)),
                _ => Err(malformed()),
            },
            (Some(Item::F(first)), n) if n % 2 == 0 => {
                let mut ops = Vec::new();
                let mut operands = vec![first];
                while let (Some(op), Some(rhs)) = (items.next(), items.next()) {
                    match (op, rhs) {
                        (Item::Op(op), Item::F(rhs)) => {
                            ops.push(op);
                            operands.push(rhs);
                        }
                        _ => return Err(malformed()),
                    }
                }
                let op = ops[0];
                if ops.iter().any(|o| *o != op) {
                    return Err(malformed());
                }
                Ok(if op.right_assoc() {
                    let mut it = operands.into_iter().rev();
                    let last = it.next().expect("operand");
                    it.fold(last, |acc, f| Formula::rebuild(op, f, acc))
                } else {
                    let mut it = operands.into_iter();
                    let first = it.next().expect("operand");
                    it.fold(first, |acc, f| Formula::rebuild(op, acc, f))
                })
            }
            _ => Err(malformed()),
        }
    }
}

/// Parses a formula in any of the accepted dialects.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(ParseError::new(0, ErrorKind::EmptyInput, "empty input"));
    }
    check_brackets(&toks)?;
    let mut p = Parser {
        toks,
        i: 0,
        end: text.chars().count(),
        bound: Vec::new(),
    };
    let f = p.iff()?;
    if p.peek().is_some() {
        return Err(p.unexpected("end of input"));
    }
    Ok(f)
}

/// Parses and resolves constants against `sig`, then checks
/// well-formedness. Syntax errors come back as a one-element list.
pub fn parse_in_signature(text: &str, sig: &Signature) -> Result<Formula, Vec<ParseError>> {
    let f = parse_formula(text).map_err(|e| vec![e])?.resolve_constants(sig);
    check_well_formed(&f, sig).map_err(|errs| {
        errs.into_iter()
            .map(|mut e| {
                if let Some(sym) = e.message.split('`').nth(1) {
                    if let Some(byte) = text.find(sym) {
                        e.position = text[..byte].chars().count();
                    }
                }
                e
            })
            .collect::<Vec<_>>()
    })?;
    Ok(f)
}

// ---------------------------------------------------------------------------
// Printer

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Style {
    #[default]
    Unicode,
    Ascii,
}

fn is_atomic(f: &Formula) -> bool {
    matches!(
        f,
        Formula::Prop(_) | Formula::Pred(..) | Formula::Equal(..) | Formula::NotEqual(..)
    )
}

/// Prints `f` so that [`parse_formula`] gives back the same tree.
///
/// Same-operator chains follow associativity without parentheses; a
/// binary operand of a different binary operator is always parenthesized.
pub fn render_formula(f: &Formula, style: Style) -> String {
    let mut out = String::new();
    write_formula(f, style, &mut out);
    out
}

fn write_terms(args: &[Term], out: &mut String) {
    for (i, t) in args.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(t.name());
    }
}

fn write_operand(f: &Formula, style: Style, parens: bool, out: &mut String) {
    if parens {
        out.push('(');
        write_formula(f, style, out);
        out.push(')');
    } else {
        write_formula(f, style, out);
    }
}

fn write_formula(f: &Formula, style: Style, out: &mut String) {
    match f {
        Formula::Prop(p) => out.push_str(p),
        Formula::Pred(p, args) => {
            out.push_str(p);
            out.push('(');
            write_terms(args, out);
            out.push(')');
        }
        Formula::Equal(a, b) | Formula::NotEqual(a, b) => {
            let op = match (f, style) {
                (Formula::Equal(..), _) => "=",
                (_, Style::Unicode) => "≠",
                (_, Style::Ascii) => "!=",
            };
            out.push_str(a.name());
            out.push(' ');
            out.push_str(op);
            out.push(' ');
            out.push_str(b.name());
        }
        Formula::Not(g) => {
            out.push_str(match style {
                Style::Unicode => "¬",
                Style::Ascii => "~",
            });
            write_operand(g, style, g.binary().is_some(), out);
        }
        Formula::Forall(v, g) | Formula::Exists(v, g) => {
            let universal = matches!(f, Formula::Forall(..));
            match style {
                Style::Unicode => {
                    out.push(if universal { '∀' } else { '∃' });
                    out.push_str(v);
                    if is_atomic(g) {
                        out.push(' ');
                    }
                }
                Style::Ascii => {
                    out.push_str(if universal { "forall " } else { "exists " });
                    out.push_str(v);
                    out.push_str(": ");
                }
            }
            write_operand(g, style, g.binary().is_some(), out);
        }
        _ => {
            let (op, l, r) = f.binary().expect("binary node");
            let left_parens = match l.binary() {
                Some((lop, ..)) => lop != op || op.right_assoc(),
                None => false,
            };
            let right_parens = match r.binary() {
                Some((rop, ..)) => rop != op || !op.right_assoc(),
                None => false,
            };
            write_operand(l, style, left_parens, out);
            out.push(' ');
            out.push_str(op.symbol(style));
            out.push(' ');
            write_operand(r, style, right_parens, out);
        }
    }
}

// ---------------------------------------------------------------------------
// Structural utilities

/// Expands `⊻` and `≠`. Idempotent.
pub fn desugar(f: &Formula) -> Formula {
    match f {
        Formula::Prop(_) | Formula::Pred(..) | Formula::Equal(..) => f.clone(),
        Formula::NotEqual(a, b) => Formula::not(Formula::Equal(a.clone(), b.clone())),
        Formula::Not(g) => Formula::not(desugar(g)),
        Formula::Forall(v, g) => Formula::forall(v.clone(), desugar(g)),
        Formula::Exists(v, g) => Formula::exists(v.clone(), desugar(g)),
        Formula::Xor(l, r) => {
            let (l, r) = (desugar(l), desugar(r));
            Formula::and(
                Formula::or(l.clone(), r.clone()),
                Formula::not(Formula::and(l, r)),
            )
        }
        other => {
            let (op, l, r) = other.binary().expect("binary node");
            Formula::rebuild(op, desugar(l), desugar(r))
        }
    }
}

pub fn free_variables(f: &Formula) -> BTreeSet<String> {
    fn go(f: &Formula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match f {
            Formula::Forall(v, g) | Formula::Exists(v, g) => {
                bound.push(v.clone());
                go(g, bound, out);
                bound.pop();
            }
            Formula::Not(g) => go(g, bound, out),
            Formula::Prop(_) => {}
            Formula::Pred(..) | Formula::Equal(..) | Formula::NotEqual(..) => {
                for t in f.atom_terms() {
                    if let Term::Variable(v) = t {
                        if !bound.contains(v) {
                            out.insert(v.clone());
                        }
                    }
                }
            }
            other => {
                let (_, l, r) = other.binary().expect("binary node");
                go(l, bound, out);
                go(r, bound, out);
            }
        }
    }
    let mut out = BTreeSet::new();
    go(f, &mut Vec::new(), &mut out);
    out
}

/// Checks symbols, arities, closedness and logic kind against `sig`,
/// collecting every violation.
pub fn check_well_formed(f: &Formula, sig: &Signature) -> Result<(), Vec<ParseError>> {
    struct Ctx<'a> {
        sig: &'a Signature,
        bound: Vec<String>,
        errors: Vec<ParseError>,
        seen: BTreeSet<(ErrorKind, String)>,
    }
    impl Ctx<'_> {
        fn report(&mut self, kind: ErrorKind, key: &str, message: String) {
            if self.seen.insert((kind, key.to_string())) {
                self.errors.push(ParseError::new(0, kind, message));
            }
        }

        fn term(&mut self, t: &Term) {
            match t {
                Term::Variable(v) if !self.bound.contains(v) => self.report(
                    ErrorKind::UnboundVariable,
                    v,
                    format!("variable `{v}` is not bound by a quantifier"),
                ),
                Term::Variable(_) => {}
                Term::Constant(c) if !self.sig.has_constant(c) => self.report(
                    ErrorKind::UnknownSymbol,
                    c,
                    format!("constant `{c}` is not declared in the notation"),
                ),
                Term::Constant(_) => {}
            }
        }

        fn first_order_only(&mut self, what: &str) -> bool {
            if self.sig.kind == LogicKind::Propositional {
                self.report(
                    ErrorKind::KindMismatch,
                    what,
                    format!("`{what}` is not allowed in a propositional exercise"),
                );
                false
            } else {
                true
            }
        }

        fn walk(&mut self, f: &Formula) {
            match f {
                Formula::Prop(p) => {
                    if self.sig.kind == LogicKind::FirstOrder {
                        self.report(
                            ErrorKind::KindMismatch,
                            p,
                            format!(
                                "`{p}` is a propositional letter, but the notation is first-order"
                            ),
                        );
                    } else if !self.sig.has_prop(p) {
                        self.report(
                            ErrorKind::UnknownSymbol,
                            p,
                            format!("`{p}` is not declared in the notation"),
                        );
                    }
                }
                Formula::Pred(p, args) => {
                    if self.first_order_only(p) {
                        match self.sig.predicate_arity(p) {
                            None => self.report(
                                ErrorKind::UnknownSymbol,
                                p,
                                format!("predicate `{p}` is not declared in the notation"),
                            ),
                            Some(n) if n != args.len() => self.report(
                                ErrorKind::ArityMismatch,
                                p,
                                format!(
                                    "`{p}` takes {n} argument(s), but {} were given",
                                    args.len()
                                ),
                            ),
                            Some(_) => {}
                        }
                    }
                    for t in args {
                        self.term(t);
                    }
                }
                Formula::Equal(a, b) | Formula::NotEqual(a, b) => {
                    self.first_order_only("=");
                    self.term(a);
                    self.term(b);
                }
                Formula::Forall(v, g) | Formula::Exists(v, g) => {
                    let q = if matches!(f, Formula::Forall(..)) { "∀" } else { "∃" };
                    self.first_order_only(q);
                    self.bound.push(v.clone());
                    self.walk(g);
                    self.bound.pop();
                }
                Formula::Not(g) => self.walk(g),
                other => {
                    let (_, l, r) = other.binary().expect("binary node");
                    self.walk(l);
                    self.walk(r);
                }
            }
        }
    }
    let mut ctx = Ctx {
        sig,
        bound: Vec::new(),
        errors: Vec::new(),
        seen: BTreeSet::new(),
    };
    ctx.walk(f);
    if ctx.errors.is_empty() {
        Ok(())
    } else {
        Err(ctx.errors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::parse_notation_block;

    fn p(s: &str) -> Formula {
        Formula::prop(s)
    }

    fn unary(name: &str, v: &str) -> Formula {
        Formula::pred(name, vec![Term::var(v)])
    }

    #[test]
    fn precedence_puts_conjunction_below_biconditional() {
        let f = parse_formula("(S | F) <-> A & (K -> ~A)").unwrap();
        let expected = Formula::iff(
            Formula::or(p("S"), p("F")),
            Formula::and(p("A"), Formula::implies(p("K"), Formula::not(p("A")))),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn parses_quantified_row() {
        let f = parse_formula("∀x((D(x)∧B(x))→¬S(x))").unwrap();
        let expected = Formula::forall(
            "x",
            Formula::implies(
                Formula::and(unary("D", "x"), unary("B", "x")),
                Formula::not(unary("S", "x")),
            ),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn unclosed_paren_is_unbalanced() {
        let e = parse_formula("(A &").unwrap_err();
        assert_eq!(e.kind, ErrorKind::UnbalancedBracket);
        assert_eq!(e.position, 0);
    }

    #[test]
    fn empty_and_blank_input() {
        assert_eq!(parse_formula("").unwrap_err().kind, ErrorKind::EmptyInput);
        assert_eq!(parse_formula("  \t ").unwrap_err().kind, ErrorKind::EmptyInput);
    }

    #[test]
    fn associativity_and_negation() {
        assert_eq!(
            parse_formula("A -> B -> C").unwrap(),
            Formula::implies(p("A"), Formula::implies(p("B"), p("C")))
        );
        assert_eq!(
            parse_formula("~A & B").unwrap(),
            Formula::and(Formula::not(p("A")), p("B"))
        );
        assert_eq!(
            parse_formula("A & B & C").unwrap(),
            Formula::and(Formula::and(p("A"), p("B")), p("C"))
        );
    }

    #[test]
    fn quantifier_binds_tightly() {
        let f = parse_formula("∀x:∀z:(∃y:(B(x,y)∧S(y,z))→S(x,z))").unwrap();
        let bxy = Formula::pred("B", vec![Term::var("x"), Term::var("y")]);
        let syz = Formula::pred("S", vec![Term::var("y"), Term::var("z")]);
        let sxz = Formula::pred("S", vec![Term::var("x"), Term::var("z")]);
        let expected = Formula::forall(
            "x",
            Formula::forall(
                "z",
                Formula::implies(Formula::exists("y", Formula::and(bxy, syz)), sxz),
            ),
        );
        assert_eq!(f, expected);
        assert_eq!(
            parse_formula("forall x: D(x) -> B(x)").unwrap(),
            Formula::implies(Formula::forall("x", unary("D", "x")), unary("B", "x"))
        );
    }

    #[test]
    fn ascii_single_letter_quantifiers() {
        assert_eq!(
            parse_formula("A x: D(x)").unwrap(),
            Formula::forall("x", unary("D", "x"))
        );
        assert_eq!(
            parse_formula("E y (D(y))").unwrap(),
            Formula::exists("y", unary("D", "y"))
        );
        // a lone `A` stays a letter
        assert_eq!(parse_formula("A & E").unwrap(), Formula::and(p("A"), p("E")));
    }

    #[test]
    fn equality_and_constants() {
        let f = parse_formula("D(fr) ∧ ∀x(D(x) → x = fr)").unwrap();
        let expected = Formula::and(
            Formula::pred("D", vec![Term::constant("fr")]),
            Formula::forall(
                "x",
                Formula::implies(
                    unary("D", "x"),
                    Formula::equal(Term::var("x"), Term::constant("fr")),
                ),
            ),
        );
        assert_eq!(f, expected);
        assert_eq!(
            parse_formula("x != y").unwrap(),
            Formula::NotEqual(Term::var("x"), Term::var("y"))
        );
        assert_eq!(
            parse_formula("x ≠ he").unwrap(),
            Formula::NotEqual(Term::var("x"), Term::constant("he"))
        );
    }

    #[test]
    fn latex_macros() {
        let f = parse_formula(r"\forall{x}((D(x)\wedge B(x))\rightarrow\neg S(x))").unwrap();
        assert_eq!(f, parse_formula("∀x((D(x)∧B(x))→¬S(x))").unwrap());
        let g = parse_formula(r"\forall{x((D(x)\wedge (B(x)\vee S(x)))\rightarrow L(fr,x))}")
            .unwrap();
        assert_eq!(
            g,
            parse_formula("∀x((D(x)∧(B(x)∨S(x)))→L(fr,x))").unwrap()
        );
        assert_eq!(
            parse_formula(r"$(A\veebar B)$").unwrap(),
            Formula::xor(p("A"), p("B"))
        );
        let e = parse_formula(r"A \land B").unwrap_err();
        assert_eq!(e.kind, ErrorKind::UnknownSymbol);
        assert_eq!(e.position, 2);
    }

    #[test]
    fn bracket_dialect() {
        let f = parse_formula("[W,→,[neg,[L,or,N]]]").unwrap();
        assert_eq!(
            f,
            Formula::implies(p("W"), Formula::not(Formula::or(p("L"), p("N"))))
        );
        assert_eq!(parse_formula("[S]").unwrap(), p("S"));
        assert_eq!(
            parse_formula("[A, and, B, and, C]").unwrap(),
            Formula::and(Formula::and(p("A"), p("B")), p("C"))
        );
        assert_eq!(
            parse_formula("[A, ->, B]").unwrap(),
            Formula::implies(p("A"), p("B"))
        );
        assert!(parse_formula("[A, and, B, or, C]").is_err());
        assert!(parse_formula("[neg]").is_err());
    }

    #[test]
    fn unknown_characters() {
        let e = parse_formula("A # B").unwrap_err();
        assert_eq!(e.kind, ErrorKind::UnknownSymbol);
        assert_eq!(e.position, 2);
        let e = parse_formula("A & B C").unwrap_err();
        assert_eq!(e.kind, ErrorKind::UnexpectedToken);
        assert_eq!(e.position, 6);
        let e = parse_formula("A &").unwrap_err();
        assert_eq!(e.kind, ErrorKind::UnexpectedToken);
        assert_eq!(e.position, 3);
        let e = parse_formula("A)").unwrap_err();
        assert_eq!(e.kind, ErrorKind::UnbalancedBracket);
        assert_eq!(e.position, 1);
    }

    #[test]
    fn render_examples() {
        let f = Formula::and(Formula::not(p("R")), p("S"));
        assert_eq!(render_formula(&f, Style::Unicode), "¬R ∧ S");
        let g = Formula::implies(Formula::and(p("R"), p("M")), Formula::not(p("B")));
        assert_eq!(render_formula(&g, Style::Ascii), "(R & M) -> ~B");
        assert_eq!(render_formula(&p("P"), Style::Unicode), "P");
        assert_eq!(render_formula(&p("P"), Style::Ascii), "P");
    }

    #[test]
    fn render_quantifiers() {
        let f = parse_formula("∀x((D(x)∧B(x))→¬S(x))").unwrap();
        assert_eq!(f.to_string(), "∀x((D(x) ∧ B(x)) → ¬S(x))");
        assert_eq!(
            render_formula(&f, Style::Ascii),
            "forall x: ((D(x) & B(x)) -> ~S(x))"
        );
        let g = parse_formula("∃x D(x)").unwrap();
        assert_eq!(g.to_string(), "∃x D(x)");
        let h = parse_formula("∀x∀y(D(x)∧D(y)∧x≠y → L(x,y))").unwrap();
        assert_eq!(h.to_string(), "∀x∀y((D(x) ∧ D(y) ∧ x ≠ y) → L(x,y))");
        assert_eq!(parse_formula(&h.to_string()).unwrap(), h);
    }

    #[test]
    fn render_chains() {
        let f = parse_formula("A -> (B -> C)").unwrap();
        assert_eq!(f.to_string(), "A → B → C");
        let g = parse_formula("(A -> B) -> C").unwrap();
        assert_eq!(g.to_string(), "(A → B) → C");
        let h = parse_formula("A & (B & C)").unwrap();
        assert_eq!(h.to_string(), "A ∧ (B ∧ C)");
    }

    #[test]
    fn desugar_cases() {
        let x = Formula::xor(p("A"), p("B"));
        assert_eq!(
            desugar(&x),
            Formula::and(
                Formula::or(p("A"), p("B")),
                Formula::not(Formula::and(p("A"), p("B")))
            )
        );
        let ne = parse_formula("x != y").unwrap();
        assert_eq!(
            desugar(&ne),
            Formula::not(Formula::equal(Term::var("x"), Term::var("y")))
        );
        let iff = Formula::iff(p("A"), p("B"));
        assert_eq!(desugar(&iff), iff);
        assert_eq!(desugar(&desugar(&x)), desugar(&x));
    }

    #[test]
    fn free_variable_cases() {
        assert!(free_variables(&Formula::forall("x", unary("D", "x"))).is_empty());
        let l = Formula::pred("L", vec![Term::var("x"), Term::constant("fr")]);
        assert_eq!(free_variables(&l), BTreeSet::from(["x".to_string()]));
        let f = Formula::exists(
            "y",
            Formula::and(
                Formula::pred("B", vec![Term::var("x"), Term::var("y")]),
                Formula::pred("S", vec![Term::var("y"), Term::var("z")]),
            ),
        );
        assert_eq!(
            free_variables(&f),
            BTreeSet::from(["x".to_string(), "z".to_string()])
        );
    }

    fn dog_signature() -> Signature {
        parse_notation_block(
            "notation:{D(x):x is a dog;B(b):b barks;S(a):a bites;L(a,b):a is larger than b;fr:Fritz;he:Hector}",
        )
        .unwrap()
    }

    #[test]
    fn well_formedness() {
        let dog = dog_signature();
        let ok = parse_formula("∀x(D(x)→S(x))").unwrap();
        assert_eq!(check_well_formed(&ok, &dog), Ok(()));

        let bad = parse_formula("S(he, fr)").unwrap();
        let errs = check_well_formed(&bad, &dog).unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].kind, ErrorKind::ArityMismatch);

        let props = parse_notation_block(
            "notation:{S:a;R:b;P:c;M:d;A:e;B:f;C:g;G:h}",
        )
        .unwrap();
        let errs = check_well_formed(&p("Q"), &props).unwrap_err();
        assert_eq!(errs[0].kind, ErrorKind::UnknownSymbol);
    }

    #[test]
    fn well_formedness_reports_everything() {
        let dog = dog_signature();
        let f = parse_formula("Q(x) ∧ S(fr, he) ∧ D(hugo) ∧ A").unwrap();
        let kinds: Vec<ErrorKind> = check_well_formed(&f, &dog)
            .unwrap_err()
            .into_iter()
            .map(|e| e.kind)
            .collect();
        assert_eq!(
            kinds,
            vec![
                ErrorKind::UnknownSymbol,
                ErrorKind::UnboundVariable,
                ErrorKind::ArityMismatch,
                ErrorKind::UnknownSymbol,
                ErrorKind::KindMismatch,
            ]
        );
        let props = parse_notation_block("notation:{S:sun}").unwrap();
        let errs = check_well_formed(&parse_formula("∀x S").unwrap(), &props).unwrap_err();
        assert_eq!(errs[0].kind, ErrorKind::KindMismatch);
    }

    #[test]
    fn resolves_single_letter_constants() {
        let sig = parse_notation_block("notation:{P(x):x is prime;a:two}").unwrap();
        let f = parse_formula("P(a)").unwrap();
        assert_eq!(f, Formula::pred("P", vec![Term::var("a")]));
        assert!(check_well_formed(&f, &sig).is_err());
        let g = f.resolve_constants(&sig);
        assert_eq!(g, Formula::pred("P", vec![Term::constant("a")]));
        assert_eq!(check_well_formed(&g, &sig), Ok(()));
        // bound occurrences are left alone
        let h = parse_formula("∀a P(a)").unwrap().resolve_constants(&sig);
        assert_eq!(h, Formula::forall("a", Formula::pred("P", vec![Term::var("a")])));
    }

    #[test]
    fn parse_in_signature_locates_symbols() {
        let sig = parse_notation_block("notation:{S:sun;W:walk}").unwrap();
        let errs = parse_in_signature("W -> Q", &sig).unwrap_err();
        assert_eq!(errs[0].kind, ErrorKind::UnknownSymbol);
        assert_eq!(errs[0].position, 5);
    }
}
