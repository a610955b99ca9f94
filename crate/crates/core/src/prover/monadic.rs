//! Decision procedure for the equality-free monadic fragment.
//!
//! Without equality, elements that satisfy the same unary predicates are
//! indistinguishable, so every model collapses onto the set of predicate
//! combinations ("types") it realizes. With `k` predicates there are
//! `2^k` types and it suffices to check every non-empty set of types as a
//! domain, with each constant sent to one of its elements.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::ProverError;
use crate::formula::{free_variables, Formula, Term};

/// Enumeration over `2^(2^k)` type sets stops being practical beyond this.
pub const MONADIC_MAX_PREDICATES: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmallModel {
    pub domain_size: usize,
    /// Tuples of elements (0-based) in each predicate's extension.
    pub extensions: BTreeMap<String, Vec<Vec<usize>>>,
    pub constants: BTreeMap<String, usize>,
}

/// `domain {0, 1}; B = {}; D = {0}; fr = 0`.
impl fmt::Display for SmallModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let elements: Vec<String> = (0..self.domain_size).map(|e| e.to_string()).collect();
        write!(f, "domain {{{}}}", elements.join(", "))?;
        for (p, tuples) in &self.extensions {
            let members: Vec<String> = tuples
                .iter()
                .map(|t| match t.as_slice() {
                    [e] => e.to_string(),
                    _ => format!("({})", t.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(", ")),
                })
                .collect();
            write!(f, "; {p} = {{{}}}", members.join(", "))?;
        }
        for (c, e) in &self.constants {
            write!(f, "; {c} = {e}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum MonadicResult {
    Valid,
    RefutedBySmallModel(SmallModel),
}

/// Closed, equality-free, no propositional letters, all predicates unary.
pub fn is_monadic(f: &Formula) -> bool {
    !f.has_equality()
        && !f.has_prop_atoms()
        && f.predicates().values().all(|&arity| arity == 1)
        && free_variables(f).is_empty()
}

struct Model<'a> {
    preds: &'a [String],
    /// Type bitmask of each element.
    domain: Vec<u32>,
    constants: BTreeMap<&'a str, usize>,
}

impl Model<'_> {
    fn holds(&self, f: &Formula, env: &mut Vec<(String, usize)>) -> bool {
        match f {
            Formula::Pred(p, args) => {
                let element = match &args[0] {
                    Term::Variable(v) => env
                        .iter()
                        .rev()
                        .find(|(n, _)| n == v)
                        .map(|(_, e)| *e)
                        .expect("closed formula"),
                    Term::Constant(c) => self.constants[c.as_str()],
                };
                let bit = self.preds.iter().position(|q| q == p).expect("known predicate");
                self.domain[element] & (1 << bit) != 0
            }
            Formula::Not(g) => !self.holds(g, env),
            Formula::And(l, r) => self.holds(l, env) && self.holds(r, env),
            Formula::Or(l, r) => self.holds(l, env) || self.holds(r, env),
            Formula::Xor(l, r) => self.holds(l, env) != self.holds(r, env),
            Formula::Implies(l, r) => !self.holds(l, env) || self.holds(r, env),
            Formula::Iff(l, r) => self.holds(l, env) == self.holds(r, env),
            Formula::Forall(v, g) | Formula::Exists(v, g) => {
                let universal = matches!(f, Formula::Forall(..));
                for e in 0..self.domain.len() {
                    env.push((v.clone(), e));
                    let value = self.holds(g, env);
                    env.pop();
                    if value != universal {
                        return !universal;
                    }
                }
                universal
            }
            Formula::Prop(_) | Formula::Equal(..) | Formula::NotEqual(..) => {
                unreachable!("checked by is_monadic")
            }
        }
    }
}

/// Subsets of `0..n` with exactly `size` members, in lexicographic order.
fn combinations(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < size - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, size, &mut Vec::new(), &mut out);
    out
}

/// Decides validity of a monadic formula by exhaustive small-model search.
/// The smallest refuting model found is returned.
pub fn decide_monadic(f: &Formula) -> Result<MonadicResult, ProverError> {
    if !is_monadic(f) {
        return Err(ProverError::NotMonadic(f.to_string()));
    }
    let preds: Vec<String> = f.predicates().into_keys().collect();
    if preds.len() > MONADIC_MAX_PREDICATES {
        return Err(ProverError::TooManyPredicates(preds.len()));
    }
    let constants: Vec<String> = f.constants().into_iter().collect();
    let types = 1usize << preds.len();
    for size in 1..=types {
        for chosen in combinations(types, size) {
            let domain: Vec<u32> = chosen.iter().map(|&t| t as u32).collect();
            let assignments = size.pow(constants.len() as u32);
            for mut code in 0..assignments {
                let mut constant_map = BTreeMap::new();
                for c in &constants {
                    constant_map.insert(c.as_str(), code % size);
                    code /= size;
                }
                let model = Model {
                    preds: &preds,
                    domain: domain.clone(),
                    constants: constant_map,
                };
                if !model.holds(f, &mut Vec::new()) {
                    return Ok(MonadicResult::RefutedBySmallModel(describe(&model)));
                }
            }
        }
    }
    Ok(MonadicResult::Valid)
}

fn describe(model: &Model<'_>) -> SmallModel {
    SmallModel {
        domain_size: model.domain.len(),
        extensions: model
            .preds
            .iter()
            .enumerate()
            .map(|(bit, p)| {
                let members = model
                    .domain
                    .iter()
                    .enumerate()
                    .filter(|(_, t)| *t & (1 << bit) != 0)
                    .map(|(e, _)| vec![e])
                    .collect();
                (p.clone(), members)
            })
            .collect(),
        constants: model
            .constants
            .iter()
            .map(|(c, e)| (c.to_string(), *e))
            .collect(),
    }
}
