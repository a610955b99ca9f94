//! Exact validity for formulas whose negation lies in the
//! Bernays-Schönfinkel class (∃*∀* after skolemization: no existential
//! depends on a universal). Skolemization then only introduces constants, the
//! Herbrand universe is finite, and the negation is satisfiable iff its
//! grounding over that universe is, with equality handled by ground
//! congruence axioms.

use std::collections::{BTreeMap, BTreeSet};

use super::{prop_validity, MonadicResult, PropResult, SmallModel};
use crate::formula::{free_variables, Formula, Term};

/// Largest ground formula, in nodes, before giving up on this route.
pub const GROUND_SIZE_LIMIT: usize = 60_000;

const SKOLEM_PREFIX: &str = "#sk";
const DEFAULT_ELEMENT: &str = "#d";

/// Skolemized negation normal form of `f` (or `¬f` when `!positive`).
/// `None` when an existential depends on an enclosing universal.
fn skolemize(
    f: &Formula,
    positive: bool,
    env: &mut Vec<(String, String)>,
    under_universal: bool,
    fresh: &mut usize,
) -> Option<Formula> {
    let term = |t: &Term, env: &[(String, String)]| match t {
        Term::Variable(v) => match env.iter().rev().find(|(n, _)| n == v) {
            Some((_, c)) if c.starts_with(SKOLEM_PREFIX) => Term::Constant(c.clone()),
            Some(_) => t.clone(),
            None => Term::Constant(v.clone()),
        },
        Term::Constant(_) => t.clone(),
    };
    let literal = |atom: Formula| if positive { atom } else { Formula::not(atom) };
    Some(match f {
        Formula::Prop(_) => literal(f.clone()),
        Formula::Pred(p, args) => literal(Formula::pred(
            p.clone(),
            args.iter().map(|t| term(t, env)).collect(),
        )),
        Formula::Equal(a, b) => literal(Formula::equal(term(a, env), term(b, env))),
        Formula::NotEqual(a, b) => {
            let atom = Formula::equal(term(a, env), term(b, env));
            if positive {
                Formula::not(atom)
            } else {
                atom
            }
        }
        Formula::Not(g) => skolemize(g, !positive, env, under_universal, fresh)?,
        Formula::And(l, r) | Formula::Or(l, r) => {
            let a = skolemize(l, positive, env, under_universal, fresh)?;
            let b = skolemize(r, positive, env, under_universal, fresh)?;
            if matches!(f, Formula::And(..)) == positive {
                Formula::and(a, b)
            } else {
                Formula::or(a, b)
            }
        }
        Formula::Implies(l, r) => {
            let a = skolemize(l, !positive, env, under_universal, fresh)?;
            let b = skolemize(r, positive, env, under_universal, fresh)?;
            if positive {
                Formula::or(a, b)
            } else {
                Formula::and(a, b)
            }
        }
        Formula::Iff(l, r) => {
            let lp = skolemize(l, true, env, under_universal, fresh)?;
            let ln = skolemize(l, false, env, under_universal, fresh)?;
            let rp = skolemize(r, true, env, under_universal, fresh)?;
            let rn = skolemize(r, false, env, under_universal, fresh)?;
            if positive {
                Formula::and(Formula::or(ln, rp), Formula::or(lp, rn))
            } else {
                Formula::or(Formula::and(lp, rn), Formula::and(ln, rp))
            }
        }
        Formula::Xor(l, r) => {
            let expanded = Formula::and(
                Formula::or((**l).clone(), (**r).clone()),
                Formula::not(Formula::and((**l).clone(), (**r).clone())),
            );
            skolemize(&expanded, positive, env, under_universal, fresh)?
        }
        Formula::Forall(v, g) | Formula::Exists(v, g) => {
            if matches!(f, Formula::Forall(..)) == positive {
                env.push((v.clone(), v.clone()));
                let body = skolemize(g, positive, env, true, fresh);
                env.pop();
                Formula::forall(v.clone(), body?)
            } else {
                // the skolem term only needs the universals it mentions
                let dependent = free_variables(g).into_iter().any(|w| {
                    w != *v
                        && env
                            .iter()
                            .rev()
                            .find(|(n, _)| *n == w)
                            .is_some_and(|(_, c)| !c.starts_with(SKOLEM_PREFIX))
                });
                if under_universal && dependent {
                    return None;
                }
                *fresh += 1;
                env.push((v.clone(), format!("{SKOLEM_PREFIX}{fresh}")));
                let body = skolemize(g, positive, env, under_universal, fresh);
                env.pop();
                body?
            }
        }
    })
}

fn atom_name(pred: &str, args: &[&str]) -> String {
    format!("{pred}({})", args.join(","))
}

fn eq_name(a: &str, b: &str) -> String {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    atom_name("=", &[a, b])
}

struct Grounder<'u> {
    universe: &'u [String],
    nodes: usize,
}

impl Grounder<'_> {
    fn ground(&mut self, f: &Formula, env: &mut Vec<(String, String)>) -> Option<Formula> {
        self.nodes += 1;
        if self.nodes > GROUND_SIZE_LIMIT {
            return None;
        }
        let name = |t: &Term, env: &[(String, String)]| -> String {
            match t {
                Term::Variable(v) => env
                    .iter()
                    .rev()
                    .find(|(n, _)| n == v)
                    .map(|(_, c)| c.clone())
                    .unwrap_or_else(|| v.clone()),
                Term::Constant(c) => c.clone(),
            }
        };
        Some(match f {
            Formula::Prop(_) => f.clone(),
            Formula::Pred(p, args) => {
                let args: Vec<String> = args.iter().map(|t| name(t, env)).collect();
                let refs: Vec<&str> = args.iter().map(String::as_str).collect();
                Formula::prop(atom_name(p, &refs))
            }
            Formula::Equal(a, b) => Formula::prop(eq_name(&name(a, env), &name(b, env))),
            Formula::Not(g) => Formula::not(self.ground(g, env)?),
            Formula::And(l, r) => Formula::and(self.ground(l, env)?, self.ground(r, env)?),
            Formula::Or(l, r) => Formula::or(self.ground(l, env)?, self.ground(r, env)?),
            Formula::Forall(v, g) => {
                let mut parts = Vec::with_capacity(self.universe.len());
                for c in self.universe {
                    env.push((v.clone(), c.clone()));
                    let part = self.ground(g, env);
                    env.pop();
                    parts.push(part?);
                }
                Formula::conjoin(parts).expect("non-empty universe")
            }
            _ => unreachable!("skolemized negation normal form"),
        })
    }
}

/// Reflexivity, transitivity and single-position congruence over the
/// universe; symmetry is built into the atom names.
fn ground_equality_axioms(universe: &[String], preds: &BTreeMap<String, usize>) -> Vec<Formula> {
    let eq = |a: &str, b: &str| Formula::prop(eq_name(a, b));
    let mut axioms: Vec<Formula> = universe.iter().map(|a| eq(a, a)).collect();
    for a in universe {
        for b in universe {
            for c in universe {
                if a != b && b != c && a != c {
                    axioms.push(Formula::implies(Formula::and(eq(a, b), eq(b, c)), eq(a, c)));
                }
            }
        }
    }
    for (pred, &arity) in preds {
        let mut tuples: Vec<Vec<&str>> = vec![Vec::new()];
        for _ in 0..arity {
            tuples = tuples
                .into_iter()
                .flat_map(|t| {
                    universe.iter().map(move |c| {
                        let mut t = t.clone();
                        t.push(c.as_str());
                        t
                    })
                })
                .collect();
        }
        for tuple in &tuples {
            for i in 0..arity {
                for c in universe {
                    if c == tuple[i] {
                        continue;
                    }
                    let mut moved = tuple.clone();
                    moved[i] = c;
                    axioms.push(Formula::implies(
                        Formula::and(eq(tuple[i], c), Formula::prop(atom_name(pred, tuple))),
                        Formula::prop(atom_name(pred, &moved)),
                    ));
                }
            }
        }
    }
    axioms
}

fn find(parent: &mut [usize], i: usize) -> usize {
    if parent[i] != i {
        let root = find(parent, parent[i]);
        parent[i] = root;
    }
    parent[i]
}

fn read_model(
    universe: &[String],
    preds: &BTreeMap<String, usize>,
    truth: &BTreeMap<String, bool>,
) -> SmallModel {
    let holds = |atom: &str| truth.get(atom).copied().unwrap_or(false);
    let mut parent: Vec<usize> = (0..universe.len()).collect();
    for i in 0..universe.len() {
        for j in i + 1..universe.len() {
            if holds(&eq_name(&universe[i], &universe[j])) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[b.max(a)] = a.min(b);
            }
        }
    }
    let mut element_of_root = BTreeMap::new();
    let element: Vec<usize> = (0..universe.len())
        .map(|i| {
            let root = find(&mut parent, i);
            let next = element_of_root.len();
            *element_of_root.entry(root).or_insert(next)
        })
        .collect();
    let mut extensions = BTreeMap::new();
    for (pred, &arity) in preds {
        let mut members = BTreeSet::new();
        let mut tuple = vec![0usize; arity];
        loop {
            let names: Vec<&str> = tuple.iter().map(|&i| universe[i].as_str()).collect();
            if holds(&atom_name(pred, &names)) {
                members.insert(tuple.iter().map(|&i| element[i]).collect::<Vec<_>>());
            }
            // odometer over universe^arity
            let mut pos = 0;
            while pos < arity {
                tuple[pos] += 1;
                if tuple[pos] < universe.len() {
                    break;
                }
                tuple[pos] = 0;
                pos += 1;
            }
            if pos == arity {
                break;
            }
        }
        extensions.insert(pred.clone(), members.into_iter().collect());
    }
    SmallModel {
        domain_size: element_of_root.len(),
        extensions,
        constants: universe
            .iter()
            .zip(&element)
            .filter(|(c, _)| !c.starts_with('#'))
            .map(|(c, e)| (c.clone(), *e))
            .collect(),
    }
}

/// Decides validity of `f` when its negation skolemizes to constants only
/// and the grounding stays below [`GROUND_SIZE_LIMIT`]; `None` otherwise.
/// Xor and ≠ may appear; propositional letters are ignored in the model.
pub fn decide_ground(f: &Formula) -> Option<MonadicResult> {
    let mut fresh = 0;
    let negated = skolemize(f, false, &mut Vec::new(), false, &mut fresh)?;
    let mut universe: Vec<String> = negated.constants().into_iter().collect();
    if universe.is_empty() {
        universe.push(DEFAULT_ELEMENT.to_string());
    }
    let preds = negated.predicates();
    let mut grounder = Grounder {
        universe: &universe,
        nodes: 0,
    };
    let mut parts = vec![grounder.ground(&negated, &mut Vec::new())?];
    if negated.has_equality() {
        parts.extend(ground_equality_axioms(&universe, &preds));
    }
    let problem = Formula::conjoin(parts).expect("non-empty");
    match prop_validity(&Formula::not(problem)).ok()? {
        PropResult::Valid => Some(MonadicResult::Valid),
        PropResult::Countermodel(truth) => Some(MonadicResult::RefutedBySmallModel(read_model(
            &universe, &preds, &truth,
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    fn decide(s: &str) -> Option<MonadicResult> {
        decide_ground(&parse_formula(s).unwrap())
    }

    fn valid(s: &str) -> bool {
        decide(s).expect("in the fragment") == MonadicResult::Valid
    }

    #[test]
    fn equality_through_a_unique_dog() {
        assert!(valid("(∀x(D(x) → x = fr) ∧ D(he) ∧ B(fr)) → B(he)"));
        assert!(valid("∀x∀y(x = y → y = x)"));
        assert!(valid("∀x∀y∀z((x = y ∧ y = z) → x = z)"));
        assert!(!valid("∀x∀y(D(x) ∧ D(y) → x = y)"));
    }

    #[test]
    fn at_most_one_formulations_agree() {
        assert!(valid(
            "∀x∀y((D(x)∧D(y))→x=y) ↔ ¬∃x∃y(D(x)∧D(y)∧x≠y)"
        ));
        assert!(!valid("∀x∀y((D(x)∧D(y))→x=y) ↔ ∃x D(x)"));
    }

    #[test]
    fn countermodel_separates_constants() {
        match decide("L(fr,he) → L(he,fr)").unwrap() {
            MonadicResult::RefutedBySmallModel(m) => {
                // frozen: the two constants must be distinct elements with
                // exactly the pair (fr, he) in L
                assert_eq!(m.domain_size, 2);
                let (fr, he) = (m.constants["fr"], m.constants["he"]);
                assert_eq!(m.extensions["L"], vec![vec![fr, he]]);
            }
            MonadicResult::Valid => panic!("not valid"),
        }
    }

    #[test]
    fn existential_below_universal_is_out_of_scope() {
        // ¬(∀x∃y L(x,y) → ...) keeps ∀x∃y positive
        assert_eq!(decide("∀x∃y L(x,y) → ∃y∀x L(x,y)"), None);
        // but the converse direction negates into ∃∀
        assert!(valid("∃y∀x L(x,y) → ∀x∃y L(x,y)"));
    }

    #[test]
    fn empty_vocabulary_gets_one_element() {
        assert!(valid("∃x (D(x) → ∀y D(y))"));
        assert!(valid("∀x x = x"));
    }
}
