//! Propositional validity: truth tables for small letter sets, DPLL over
//! the Tseitin clauses of the negation otherwise.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::ProverError;
use crate::formula::{desugar, Formula};

pub type Assignment = BTreeMap<String, bool>;

/// Largest letter count decided by exhaustive evaluation.
pub const TRUTH_TABLE_MAX_LETTERS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", content = "assignment", rename_all = "snake_case")]
pub enum PropResult {
    Valid,
    Countermodel(Assignment),
}

impl PropResult {
    pub fn is_valid(&self) -> bool {
        matches!(self, PropResult::Valid)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropMethod {
    /// Truth table up to [`TRUTH_TABLE_MAX_LETTERS`], DPLL above.
    Auto,
    TruthTable,
    Dpll,
}

/// Evaluates a propositional formula. Letters missing from `assignment`
/// count as false.
pub fn eval(f: &Formula, assignment: &Assignment) -> Result<bool, ProverError> {
    Ok(match f {
        Formula::Prop(p) => assignment.get(p).copied().unwrap_or(false),
        Formula::Not(g) => !eval(g, assignment)?,
        Formula::And(l, r) => eval(l, assignment)? && eval(r, assignment)?,
        Formula::Or(l, r) => eval(l, assignment)? || eval(r, assignment)?,
        Formula::Xor(l, r) => eval(l, assignment)? != eval(r, assignment)?,
        Formula::Implies(l, r) => !eval(l, assignment)? || eval(r, assignment)?,
        Formula::Iff(l, r) => eval(l, assignment)? == eval(r, assignment)?,
        _ => return Err(ProverError::NotPropositional(f.to_string())),
    })
}

pub fn prop_validity(f: &Formula) -> Result<PropResult, ProverError> {
    prop_validity_with(f, PropMethod::Auto)
}

pub fn prop_validity_with(f: &Formula, method: PropMethod) -> Result<PropResult, ProverError> {
    if !f.is_propositional() {
        return Err(ProverError::NotPropositional(f.to_string()));
    }
    let letters: Vec<String> = f.prop_letters().into_iter().collect();
    let use_table = match method {
        PropMethod::Auto => letters.len() <= TRUTH_TABLE_MAX_LETTERS,
        PropMethod::TruthTable => true,
        PropMethod::Dpll => false,
    };
    if use_table {
        truth_table(f, &letters)
    } else {
        dpll_validity(f, &letters)
    }
}

fn truth_table(f: &Formula, letters: &[String]) -> Result<PropResult, ProverError> {
    if letters.len() >= 63 {
        return Err(ProverError::TooManyLetters(letters.len()));
    }
    let mut assignment: Assignment = letters.iter().map(|l| (l.clone(), false)).collect();
    for bits in 0u64..(1u64 << letters.len()) {
        for (i, l) in letters.iter().enumerate() {
            *assignment.get_mut(l).expect("letter") = bits & (1 << i) != 0;
        }
        if !eval(f, &assignment)? {
            return Ok(PropResult::Countermodel(assignment));
        }
    }
    Ok(PropResult::Valid)
}

// ---------------------------------------------------------------------------
// Tseitin + DPLL

/// Literal as a signed variable index (1-based).
type Lit = i32;

struct Cnf {
    clauses: Vec<Vec<Lit>>,
    vars: usize,
}

impl Cnf {
    fn fresh(&mut self) -> Lit {
        self.vars += 1;
        self.vars as Lit
    }

    fn encode(&mut self, f: &Formula, letters: &HashMap<&str, Lit>) -> Lit {
        match f {
            Formula::Prop(p) => letters[p.as_str()],
            Formula::Not(g) => -self.encode(g, letters),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) | Formula::Iff(l, r) => {
                let a = self.encode(l, letters);
                let b = self.encode(r, letters);
                let x = self.fresh();
                match f {
                    Formula::And(..) => {
                        self.clauses.push(vec![-x, a]);
                        self.clauses.push(vec![-x, b]);
                        self.clauses.push(vec![x, -a, -b]);
                    }
                    Formula::Or(..) => {
                        self.clauses.push(vec![-x, a, b]);
                        self.clauses.push(vec![x, -a]);
                        self.clauses.push(vec![x, -b]);
                    }
                    Formula::Implies(..) => {
                        self.clauses.push(vec![-x, -a, b]);
                        self.clauses.push(vec![x, a]);
                        self.clauses.push(vec![x, -b]);
                    }
                    _ => {
                        self.clauses.push(vec![-x, -a, b]);
                        self.clauses.push(vec![-x, a, -b]);
                        self.clauses.push(vec![x, a, b]);
                        self.clauses.push(vec![x, -a, -b]);
                    }
                }
                x
            }
            _ => unreachable!("desugared propositional formula"),
        }
    }
}

fn dpll_validity(f: &Formula, letters: &[String]) -> Result<PropResult, ProverError> {
    let f = desugar(f);
    let index: HashMap<&str, Lit> = letters
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i as Lit + 1))
        .collect();
    let mut cnf = Cnf {
        clauses: Vec::new(),
        vars: letters.len(),
    };
    let root = cnf.encode(&f, &index);
    cnf.clauses.push(vec![-root]);
    let mut values = vec![None; cnf.vars + 1];
    if !dpll(&cnf.clauses, &mut values) {
        return Ok(PropResult::Valid);
    }
    Ok(PropResult::Countermodel(
        letters
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), values[i + 1].unwrap_or(false)))
            .collect(),
    ))
}

fn lit_value(values: &[Option<bool>], lit: Lit) -> Option<bool> {
    values[lit.unsigned_abs() as usize].map(|v| v == (lit > 0))
}

/// Unit propagation to fixpoint. Returns false on a conflict; assigned
/// variables are pushed onto `trail`.
fn propagate(clauses: &[Vec<Lit>], values: &mut [Option<bool>], trail: &mut Vec<usize>) -> bool {
    loop {
        let mut changed = false;
        for clause in clauses {
            let mut unassigned = None;
            let mut open = 0;
            let mut satisfied = false;
            for &lit in clause {
                match lit_value(values, lit) {
                    Some(true) => {
                        satisfied = true;
                        break;
                    }
                    Some(false) => {}
                    None => {
                        open += 1;
                        unassigned = Some(lit);
                    }
                }
            }
            if satisfied {
                continue;
            }
            match (open, unassigned) {
                (0, _) => return false,
                (1, Some(lit)) => {
                    let var = lit.unsigned_abs() as usize;
                    values[var] = Some(lit > 0);
                    trail.push(var);
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            return true;
        }
    }
}

fn dpll(clauses: &[Vec<Lit>], values: &mut Vec<Option<bool>>) -> bool {
    let mut trail = Vec::new();
    if !propagate(clauses, values, &mut trail) {
        for v in trail {
            values[v] = None;
        }
        return false;
    }
    // branch on the most frequent unassigned variable of an open clause
    let mut counts: HashMap<usize, usize> = HashMap::new();
    for clause in clauses {
        if clause.iter().any(|&l| lit_value(values, l) == Some(true)) {
            continue;
        }
        for &l in clause {
            if lit_value(values, l).is_none() {
                *counts.entry(l.unsigned_abs() as usize).or_default() += 1;
            }
        }
    }
    let Some(var) = counts
        .into_iter()
        .max_by_key(|&(v, c)| (c, std::cmp::Reverse(v)))
        .map(|(v, _)| v)
    else {
        return true;
    };
    for choice in [false, true] {
        values[var] = Some(choice);
        if dpll(clauses, values) {
            return true;
        }
    }
    values[var] = None;
    for v in trail {
        values[v] = None;
    }
    false
}
