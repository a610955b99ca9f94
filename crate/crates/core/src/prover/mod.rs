//! Validity and two-directional equivalence checking.

mod ground;
mod monadic;
mod prop;
mod tableau;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{desugar, Formula};

pub use ground::{decide_ground, GROUND_SIZE_LIMIT};
pub use monadic::{decide_monadic, is_monadic, MonadicResult, SmallModel, MONADIC_MAX_PREDICATES};
pub use prop::{
    eval, prop_validity, prop_validity_with, Assignment, PropMethod, PropResult,
    TRUTH_TABLE_MAX_LETTERS,
};
pub use tableau::tableau_validity;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProverError {
    #[error("not a propositional formula: {0}")]
    NotPropositional(String),
    #[error("not a closed, equality-free monadic formula: {0}")]
    NotMonadic(String),
    #[error("{0} predicates exceed the monadic enumeration limit")]
    TooManyPredicates(usize),
    #[error("{0} letters are too many for a truth table")]
    TooManyLetters(usize),
    #[error("cannot compare a propositional with a first-order formula")]
    KindMismatch,
    #[error("invalid proof budget: {0}")]
    InvalidBudget(String),
}

/// Resource limits of one proof attempt.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProofBudget {
    pub time_limit_ms: u64,
    /// Largest number of free variables on a tableau branch.
    pub instantiation_cap: usize,
    /// Largest number of literals on a tableau branch.
    pub depth_cap: usize,
}

impl Default for ProofBudget {
    fn default() -> Self {
        ProofBudget {
            time_limit_ms: 2000,
            instantiation_cap: 64,
            depth_cap: 40,
        }
    }
}

impl ProofBudget {
    pub fn new(time_limit_ms: u64, instantiation_cap: usize, depth_cap: usize) -> Result<Self, ProverError> {
        let b = ProofBudget {
            time_limit_ms,
            instantiation_cap,
            depth_cap,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<(), ProverError> {
        if self.time_limit_ms == 0 || self.instantiation_cap == 0 || self.depth_cap == 0 {
            return Err(ProverError::InvalidBudget(format!(
                "all limits must be positive, got {self:?}"
            )));
        }
        Ok(())
    }

    /// The same caps with half the time, rounded up.
    pub fn halved(&self) -> Self {
        ProofBudget {
            time_limit_ms: self.time_limit_ms.div_ceil(2),
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnknownReason {
    BudgetExhausted,
    Timeout,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum FolResult {
    Proved,
    Unknown { reason: UnknownReason },
    /// Only produced by the exact procedures for decidable fragments.
    RefutedBySmallModel { model: SmallModel },
}

/// First-order validity under `budget`. Equality-free monadic formulas and
/// formulas whose negation skolemizes to constants only are decided
/// exactly; everything else goes to the tableau.
pub fn fol_validity(f: &Formula, budget: &ProofBudget) -> FolResult {
    let f = desugar(f);
    let decided = if is_monadic(&f) && f.predicates().len() <= MONADIC_MAX_PREDICATES {
        decide_monadic(&f).ok()
    } else {
        None
    };
    match decided.or_else(|| decide_ground(&f)) {
        Some(MonadicResult::Valid) => FolResult::Proved,
        Some(MonadicResult::RefutedBySmallModel(model)) => FolResult::RefutedBySmallModel { model },
        None => tableau_validity(&f, budget),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// user → gold
    Forward,
    /// gold → user
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Proved,
    Refuted,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "logic", rename_all = "snake_case")]
pub enum DirectionResult {
    Prop(PropResult),
    Fol(FolResult),
}

impl DirectionResult {
    pub fn status(&self) -> Status {
        match self {
            DirectionResult::Prop(PropResult::Valid) | DirectionResult::Fol(FolResult::Proved) => {
                Status::Proved
            }
            DirectionResult::Prop(PropResult::Countermodel(_))
            | DirectionResult::Fol(FolResult::RefutedBySmallModel { .. }) => Status::Refuted,
            DirectionResult::Fol(FolResult::Unknown { .. }) => Status::Unknown,
        }
    }

    pub fn countermodel(&self) -> Option<&Assignment> {
        match self {
            DirectionResult::Prop(PropResult::Countermodel(a)) => Some(a),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectionalEquivalence {
    /// Validity of user → gold.
    pub forward: DirectionResult,
    /// Validity of gold → user.
    pub backward: DirectionResult,
}

/// Proves both implications between `user` and `gold`, splitting the time
/// budget evenly between them.
pub fn check_equivalence(
    user: &Formula,
    gold: &Formula,
    budget: &ProofBudget,
) -> Result<DirectionalEquivalence, ProverError> {
    budget.validate()?;
    let (user_prop, gold_prop) = (user.is_propositional(), gold.is_propositional());
    if user_prop != gold_prop {
        return Err(ProverError::KindMismatch);
    }
    let forward = Formula::implies(user.clone(), gold.clone());
    let backward = Formula::implies(gold.clone(), user.clone());
    if user_prop {
        Ok(DirectionalEquivalence {
            forward: DirectionResult::Prop(prop_validity(&forward)?),
            backward: DirectionResult::Prop(prop_validity(&backward)?),
        })
    } else {
        let half = budget.halved();
        Ok(DirectionalEquivalence {
            forward: DirectionResult::Fol(fol_validity(&forward, &half)),
            backward: DirectionResult::Fol(fol_validity(&backward, &half)),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Equivalent,
    /// The user's statement is strictly stronger than the gold formula.
    SufficientNotNecessary,
    /// The user's statement is strictly weaker than the gold formula.
    NecessaryNotSufficient,
    Neither,
    PartiallyUnverified { unknown: Vec<Direction> },
}

pub fn classify_verdict(d: &DirectionalEquivalence) -> Verdict {
    let (f, b) = (d.forward.status(), d.backward.status());
    let mut unknown = Vec::new();
    if f == Status::Unknown {
        unknown.push(Direction::Forward);
    }
    if b == Status::Unknown {
        unknown.push(Direction::Backward);
    }
    if !unknown.is_empty() {
        return Verdict::PartiallyUnverified { unknown };
    }
    match (f, b) {
        (Status::Proved, Status::Proved) => Verdict::Equivalent,
        (Status::Proved, _) => Verdict::SufficientNotNecessary,
        (_, Status::Proved) => Verdict::NecessaryNotSufficient,
        _ => Verdict::Neither,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn verdict(a: &str, b: &str) -> Verdict {
        classify_verdict(&check_equivalence(&f(a), &f(b), &ProofBudget::default()).unwrap())
    }

    #[test]
    fn de_morgan_row_is_equivalent() {
        let d = check_equivalence(&f("¬S∧¬R"), &f("¬(S∨R)"), &ProofBudget::default()).unwrap();
        assert_eq!(d.forward, DirectionalEquivalence::valid_prop().forward);
        assert_eq!(classify_verdict(&d), Verdict::Equivalent);
    }

    impl DirectionalEquivalence {
        fn valid_prop() -> Self {
            DirectionalEquivalence {
                forward: DirectionResult::Prop(PropResult::Valid),
                backward: DirectionResult::Prop(PropResult::Valid),
            }
        }
    }

    #[test]
    fn weaker_answer_is_necessary_only() {
        // user (P∧M)→A against gold M→A: gold implies user, not conversely
        let d = check_equivalence(&f("(P∧M)→A"), &f("M→A"), &ProofBudget::default()).unwrap();
        assert_eq!(d.backward.status(), Status::Proved);
        assert_eq!(
            d.forward.countermodel().unwrap(),
            &Assignment::from([
                ("A".to_string(), false),
                ("M".to_string(), true),
                ("P".to_string(), false)
            ])
        );
        assert_eq!(classify_verdict(&d), Verdict::NecessaryNotSufficient);
    }

    #[test]
    fn stronger_claim_direction() {
        // claim M→¬B against gold (M∧R)→¬B: the claim is stronger. Truth
        // table over {B, M, R}: gold→claim fails only at B, M true and R
        // false.
        let d = check_equivalence(&f("M→¬B"), &f("(M∧R)→¬B"), &ProofBudget::default()).unwrap();
        assert_eq!(d.forward.status(), Status::Proved);
        assert_eq!(
            d.backward.countermodel().unwrap(),
            &Assignment::from([
                ("B".to_string(), true),
                ("M".to_string(), true),
                ("R".to_string(), false)
            ])
        );
        assert_eq!(classify_verdict(&d), Verdict::SufficientNotNecessary);
    }

    #[test]
    fn classification_table() {
        let valid = DirectionResult::Prop(PropResult::Valid);
        let refuted = DirectionResult::Prop(PropResult::Countermodel(Assignment::new()));
        let proved = DirectionResult::Fol(FolResult::Proved);
        let unknown = DirectionResult::Fol(FolResult::Unknown {
            reason: UnknownReason::Timeout,
        });
        let case = |a: &DirectionResult, b: &DirectionResult| {
            classify_verdict(&DirectionalEquivalence {
                forward: a.clone(),
                backward: b.clone(),
            })
        };
        assert_eq!(case(&valid, &valid), Verdict::Equivalent);
        assert_eq!(case(&valid, &refuted), Verdict::SufficientNotNecessary);
        assert_eq!(case(&refuted, &valid), Verdict::NecessaryNotSufficient);
        assert_eq!(case(&refuted, &refuted), Verdict::Neither);
        assert_eq!(
            case(&proved, &unknown),
            Verdict::PartiallyUnverified {
                unknown: vec![Direction::Backward]
            }
        );
        assert_eq!(
            case(&unknown, &unknown),
            Verdict::PartiallyUnverified {
                unknown: vec![Direction::Forward, Direction::Backward]
            }
        );
    }

    #[test]
    fn first_order_equivalences() {
        assert_eq!(
            verdict("∀x(D(x)→¬S(x))", "¬∃x(D(x)∧S(x))"),
            Verdict::Equivalent
        );
        assert_eq!(
            verdict("∀x((D(x)∧B(x))→¬S(x))", "∀x(D(x)→¬S(x))"),
            Verdict::NecessaryNotSufficient
        );
        assert_eq!(verdict("L(fr,he)", "L(fr,he)"), Verdict::Equivalent);
    }

    #[test]
    fn kind_mismatch_is_an_error() {
        assert_eq!(
            check_equivalence(&f("A"), &f("D(fr)"), &ProofBudget::default()),
            Err(ProverError::KindMismatch)
        );
    }

    #[test]
    fn budget_validation() {
        assert!(ProofBudget::new(0, 1, 1).is_err());
        assert!(ProofBudget::new(1, 0, 1).is_err());
        assert!(ProofBudget::new(1, 1, 0).is_err());
        assert_eq!(ProofBudget::default(), ProofBudget::new(2000, 64, 40).unwrap());
        assert_eq!(ProofBudget::default().halved().time_limit_ms, 1000);
    }

    #[test]
    fn monadic_route_refutes() {
        assert!(matches!(
            fol_validity(&f("∀x(D(x)→B(x))"), &ProofBudget::default()),
            FolResult::RefutedBySmallModel { .. }
        ));
    }
}
