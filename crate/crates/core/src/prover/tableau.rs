//! Free-variable analytic tableau with unification.
//!
//! The negated goal is put in negation normal form and skolemized, then
//! expanded depth-first in the style of leanTAP: conjunctions queue their
//! second half, disjunctions split the branch, universal formulas are
//! instantiated with a fresh free variable and re-queued at the back, and
//! literals try to close the branch against a complementary literal by
//! unification before the branch is extended. Bindings are kept on a
//! trail and undone on backtracking; branch closure is threaded through
//! continuations so that a later branch can force a different closing
//! substitution on an earlier one.
//!
//! Completeness is bounded by the number of free variables per branch,
//! raised by iterative deepening (1, 2, 4, ... up to the instantiation cap).

use std::collections::HashMap;
use std::rc::Rc;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{mpsc, Arc};
use std::thread;
use std::time::{Duration, Instant};

use super::{FolResult, ProofBudget, UnknownReason};
use crate::formula::{desugar, Formula, Term};

type Sym = u32;

#[derive(Debug)]
enum T {
    Var(usize),
    App(Sym, Vec<TRef>),
}

type TRef = Rc<T>;

#[derive(Debug)]
enum Nf {
    Lit(Rc<Literal>),
    And(Rc<Nf>, Rc<Nf>),
    Or(Rc<Nf>, Rc<Nf>),
    All(usize, Rc<Nf>),
}

#[derive(Debug)]
struct Literal {
    positive: bool,
    pred: Sym,
    args: Vec<TRef>,
}

/// Converts formulas to skolemized negation normal form.
struct Builder {
    symbols: HashMap<String, Sym>,
    next_var: usize,
    skolems: usize,
}

impl Builder {
    fn symbol(&mut self, key: String) -> Sym {
        let next = self.symbols.len() as Sym;
        *self.symbols.entry(key).or_insert(next)
    }

    fn term(&mut self, t: &Term, env: &[(String, TRef)]) -> TRef {
        match t {
            Term::Variable(v) => env
                .iter()
                .rev()
                .find(|(name, _)| name == v)
                .map(|(_, t)| t.clone())
                // free variables are read as constants; callers only pass
                // closed formulas
                .unwrap_or_else(|| {
                    let s = self.symbol(format!("c:{v}"));
                    Rc::new(T::App(s, Vec::new()))
                }),
            Term::Constant(c) => {
                let s = self.symbol(format!("c:{c}"));
                Rc::new(T::App(s, Vec::new()))
            }
        }
    }

    fn lit(&mut self, positive: bool, key: String, args: Vec<TRef>) -> Rc<Nf> {
        let pred = self.symbol(key);
        Rc::new(Nf::Lit(Rc::new(Literal {
            positive,
            pred,
            args,
        })))
    }

    fn nnf(
        &mut self,
        f: &Formula,
        positive: bool,
        env: &mut Vec<(String, TRef)>,
        universals: &mut Vec<TRef>,
    ) -> Rc<Nf> {
        match f {
            Formula::Prop(p) => self.lit(positive, format!("p:{p}"), Vec::new()),
            Formula::Pred(p, args) => {
                let args: Vec<TRef> = args.iter().map(|t| self.term(t, env)).collect();
                self.lit(positive, format!("P:{p}/{}", args.len()), args)
            }
            Formula::Equal(a, b) => {
                let args = vec![self.term(a, env), self.term(b, env)];
                self.lit(positive, "=".to_string(), args)
            }
            Formula::NotEqual(a, b) => {
                let args = vec![self.term(a, env), self.term(b, env)];
                self.lit(!positive, "=".to_string(), args)
            }
            Formula::Not(g) => self.nnf(g, !positive, env, universals),
            Formula::And(l, r) | Formula::Or(l, r) => {
                let a = self.nnf(l, positive, env, universals);
                let b = self.nnf(r, positive, env, universals);
                if matches!(f, Formula::And(..)) == positive {
                    Rc::new(Nf::And(a, b))
                } else {
                    Rc::new(Nf::Or(a, b))
                }
            }
            Formula::Implies(l, r) => {
                if positive {
                    let a = self.nnf(l, false, env, universals);
                    let b = self.nnf(r, true, env, universals);
                    Rc::new(Nf::Or(a, b))
                } else {
                    let a = self.nnf(l, true, env, universals);
                    let b = self.nnf(r, false, env, universals);
                    Rc::new(Nf::And(a, b))
                }
            }
            Formula::Iff(l, r) => {
                let lp = self.nnf(l, true, env, universals);
                let ln = self.nnf(l, false, env, universals);
                let rp = self.nnf(r, true, env, universals);
                let rn = self.nnf(r, false, env, universals);
                if positive {
                    Rc::new(Nf::And(Rc::new(Nf::Or(ln, rp)), Rc::new(Nf::Or(lp, rn))))
                } else {
                    Rc::new(Nf::Or(Rc::new(Nf::And(lp, rn)), Rc::new(Nf::And(ln, rp))))
                }
            }
            Formula::Xor(l, r) => {
                let expanded = desugar(&Formula::xor((**l).clone(), (**r).clone()));
                self.nnf(&expanded, positive, env, universals)
            }
            Formula::Forall(v, g) | Formula::Exists(v, g) => {
                let universal = matches!(f, Formula::Forall(..)) == positive;
                if universal {
                    let id = self.next_var;
                    self.next_var += 1;
                    let var = Rc::new(T::Var(id));
                    env.push((v.clone(), var.clone()));
                    universals.push(var);
                    let body = self.nnf(g, positive, env, universals);
                    universals.pop();
                    env.pop();
                    Rc::new(Nf::All(id, body))
                } else {
                    let sym = self.symbol(format!("sk:{}", self.skolems));
                    self.skolems += 1;
                    let sk = Rc::new(T::App(sym, universals.clone()));
                    env.push((v.clone(), sk));
                    let body = self.nnf(g, positive, env, universals);
                    env.pop();
                    body
                }
            }
        }
    }
}

fn rename_term(t: &TRef, from: usize, to: &TRef) -> TRef {
    match &**t {
        T::Var(v) if *v == from => to.clone(),
        T::Var(_) => t.clone(),
        T::App(_, args) if args.is_empty() => t.clone(),
        T::App(s, args) => Rc::new(T::App(
            *s,
            args.iter().map(|a| rename_term(a, from, to)).collect(),
        )),
    }
}

fn rename(f: &Rc<Nf>, from: usize, to: &TRef) -> Rc<Nf> {
    match &**f {
        Nf::Lit(l) => Rc::new(Nf::Lit(Rc::new(Literal {
            positive: l.positive,
            pred: l.pred,
            args: l.args.iter().map(|a| rename_term(a, from, to)).collect(),
        }))),
        Nf::And(a, b) => Rc::new(Nf::And(rename(a, from, to), rename(b, from, to))),
        Nf::Or(a, b) => Rc::new(Nf::Or(rename(a, from, to), rename(b, from, to))),
        Nf::All(v, _) if *v == from => f.clone(),
        Nf::All(v, body) => Rc::new(Nf::All(*v, rename(body, from, to))),
    }
}

/// Persistent list of the literals on the current branch.
struct Branch {
    lit: Rc<Literal>,
    next: Option<Rc<Branch>>,
    len: usize,
}

type Lits = Option<Rc<Branch>>;

struct Search<'c> {
    bindings: Vec<Option<TRef>>,
    trail: Vec<usize>,
    var_limit: usize,
    depth_cap: usize,
    deadline: Instant,
    cancel: &'c AtomicBool,
    steps: u64,
    timed_out: bool,
    limit_hit: bool,
}

type Cont<'a, 'c> = &'a mut dyn FnMut(&mut Search<'c>) -> bool;

impl<'c> Search<'c> {
    fn fresh(&mut self) -> TRef {
        self.bindings.push(None);
        Rc::new(T::Var(self.bindings.len() - 1))
    }

    fn resolve(&self, t: &TRef) -> TRef {
        let mut t = t.clone();
        loop {
            let next = match &*t {
                T::Var(v) => match &self.bindings[*v] {
                    Some(b) => b.clone(),
                    None => return t,
                },
                T::App(..) => return t,
            };
            t = next;
        }
    }

    fn occurs(&self, var: usize, t: &TRef) -> bool {
        match &*self.resolve(t) {
            T::Var(v) => *v == var,
            T::App(_, args) => args.iter().any(|a| self.occurs(var, a)),
        }
    }

    fn unify(&mut self, a: &TRef, b: &TRef) -> bool {
        let (a, b) = (self.resolve(a), self.resolve(b));
        match (&*a, &*b) {
            (T::Var(x), T::Var(y)) if x == y => true,
            (T::Var(x), _) => {
                if self.occurs(*x, &b) {
                    return false;
                }
                self.bindings[*x] = Some(b.clone());
                self.trail.push(*x);
                true
            }
            (_, T::Var(_)) => self.unify(&b, &a),
            (T::App(f, xs), T::App(g, ys)) => {
                f == g
                    && xs.len() == ys.len()
                    && xs.iter().zip(ys.iter()).all(|(x, y)| self.unify(x, y))
            }
        }
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let v = self.trail.pop().expect("trail entry");
            self.bindings[v] = None;
        }
    }

    fn out_of_time(&mut self) -> bool {
        if self.timed_out {
            return true;
        }
        self.steps += 1;
        if self.steps.is_multiple_of(256)
            && (Instant::now() >= self.deadline || self.cancel.load(Ordering::Relaxed))
        {
            self.timed_out = true;
        }
        self.timed_out
    }

    fn prove(
        &mut self,
        f: Rc<Nf>,
        mut unexp: Vec<Rc<Nf>>,
        lits: Lits,
        free: usize,
        k: Cont<'_, 'c>,
    ) -> bool {
        if self.out_of_time() {
            return false;
        }
        match &*f {
            Nf::And(a, b) => {
                unexp.insert(0, b.clone());
                self.prove(a.clone(), unexp, lits, free, k)
            }
            Nf::Or(a, b) => {
                let b = b.clone();
                let unexp_b = unexp.clone();
                let lits_b = lits.clone();
                self.prove(a.clone(), unexp, lits, free, &mut |s: &mut Search<'c>| {
                    s.prove(b.clone(), unexp_b.clone(), lits_b.clone(), free, &mut *k)
                })
            }
            Nf::All(v, body) => {
                if free >= self.var_limit {
                    // drop the formula on this branch; the next round of
                    // deepening gets another chance
                    self.limit_hit = true;
                    return self.next(unexp, lits, free, k);
                }
                let var = self.fresh();
                let inst = rename(body, *v, &var);
                unexp.push(f.clone());
                self.prove(inst, unexp, lits, free + 1, k)
            }
            Nf::Lit(lit) => {
                let mut node = lits.clone();
                while let Some(b) = node {
                    let other = &b.lit;
                    if other.positive != lit.positive
                        && other.pred == lit.pred
                        && other.args.len() == lit.args.len()
                    {
                        let mark = self.trail.len();
                        let unified = lit
                            .args
                            .iter()
                            .zip(other.args.iter())
                            .all(|(x, y)| self.unify(x, y));
                        if unified {
                            let general = self.trail.len() == mark;
                            if k(self) {
                                return true;
                            }
                            self.undo(mark);
                            // no binding was needed, so no other choice
                            // can leave more room for the remaining branches
                            if general || self.timed_out {
                                return false;
                            }
                        } else {
                            self.undo(mark);
                        }
                    }
                    node = b.next.clone();
                }
                let len = lits.as_ref().map_or(0, |b| b.len);
                if len >= self.depth_cap {
                    self.limit_hit = true;
                    return false;
                }
                let extended = Some(Rc::new(Branch {
                    lit: lit.clone(),
                    next: lits,
                    len: len + 1,
                }));
                self.next(unexp, extended, free, k)
            }
        }
    }

    fn next(&mut self, mut unexp: Vec<Rc<Nf>>, lits: Lits, free: usize, k: Cont<'_, 'c>) -> bool {
        if unexp.is_empty() {
            return false;
        }
        let f = unexp.remove(0);
        self.prove(f, unexp, lits, free, k)
    }
}

fn var(name: &str) -> Term {
    Term::var(name)
}

/// Reflexivity, symmetry, transitivity and one congruence axiom for each
/// predicate of `f`.
pub(crate) fn equality_axioms(f: &Formula) -> Vec<Formula> {
    let eq = |a: &str, b: &str| Formula::equal(var(a), var(b));
    let mut axioms = vec![
        Formula::forall("x", eq("x", "x")),
        Formula::forall("x", Formula::forall("y", Formula::implies(eq("x", "y"), eq("y", "x")))),
        Formula::forall(
            "x",
            Formula::forall(
                "y",
                Formula::forall(
                    "z",
                    Formula::implies(Formula::and(eq("x", "y"), eq("y", "z")), eq("x", "z")),
                ),
            ),
        ),
    ];
    for (pred, arity) in f.predicates() {
        let xs: Vec<String> = (1..=arity).map(|i| format!("x{i}")).collect();
        let ys: Vec<String> = (1..=arity).map(|i| format!("y{i}")).collect();
        let antecedent = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| eq(x, y))
            .chain(std::iter::once(Formula::pred(
                pred.clone(),
                xs.iter().map(|x| var(x)).collect(),
            )));
        let body = Formula::implies(
            Formula::conjoin(antecedent).expect("non-empty"),
            Formula::pred(pred.clone(), ys.iter().map(|y| var(y)).collect()),
        );
        let closed = xs
            .iter()
            .chain(&ys)
            .rev()
            .fold(body, |acc, v| Formula::forall(v.clone(), acc));
        axioms.push(closed);
    }
    axioms
}

fn deepening_schedule(cap: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut limit = 1;
    while limit < cap {
        out.push(limit);
        limit *= 2;
    }
    out.push(cap);
    out
}

fn search(f: &Formula, budget: &ProofBudget, deadline: Instant, cancel: &AtomicBool) -> FolResult {
    let mut builder = Builder {
        symbols: HashMap::new(),
        next_var: 0,
        skolems: 0,
    };
    let negated = builder.nnf(f, false, &mut Vec::new(), &mut Vec::new());
    let axioms: Vec<Rc<Nf>> = if f.has_equality() {
        equality_axioms(f)
            .iter()
            .map(|a| builder.nnf(a, true, &mut Vec::new(), &mut Vec::new()))
            .collect()
    } else {
        Vec::new()
    };
    for limit in deepening_schedule(budget.instantiation_cap) {
        let mut s = Search {
            bindings: vec![None; builder.next_var],
            trail: Vec::new(),
            var_limit: limit,
            depth_cap: budget.depth_cap,
            deadline,
            cancel,
            steps: 0,
            timed_out: false,
            limit_hit: false,
        };
        if s.prove(negated.clone(), axioms.clone(), None, 0, &mut |_| true) {
            return FolResult::Proved;
        }
        if s.timed_out {
            return FolResult::Unknown {
                reason: UnknownReason::Timeout,
            };
        }
        if !s.limit_hit {
            // the tableau saturated without closing
            break;
        }
    }
    FolResult::Unknown {
        reason: UnknownReason::BudgetExhausted,
    }
}

const SEARCH_STACK_BYTES: usize = 256 * 1024 * 1024;

/// Tries to prove `f` valid. The search runs on its own thread; when the
/// wall-clock limit passes the caller returns `Unknown(timeout)` without
/// waiting, and the search is told to stop.
pub fn tableau_validity(f: &Formula, budget: &ProofBudget) -> FolResult {
    let start = Instant::now();
    let deadline = start + Duration::from_millis(budget.time_limit_ms);
    let cancel = Arc::new(AtomicBool::new(false));
    let (tx, rx) = mpsc::channel();
    let formula = desugar(f);
    let budget_copy = *budget;
    let flag = cancel.clone();
    let spawned = thread::Builder::new()
        .name("tableau".into())
        .stack_size(SEARCH_STACK_BYTES)
        .spawn(move || {
            let _ = tx.send(search(&formula, &budget_copy, deadline, &flag));
        });
    if spawned.is_err() {
        return FolResult::Unknown {
            reason: UnknownReason::BudgetExhausted,
        };
    }
    // small grace period so a search that noticed the deadline itself
    // still gets to report
    let wait = deadline.saturating_duration_since(Instant::now()) + Duration::from_millis(50);
    match rx.recv_timeout(wait) {
        Ok(result) => result,
        Err(_) => {
            cancel.store(true, Ordering::Relaxed);
            FolResult::Unknown {
                reason: UnknownReason::Timeout,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    fn prove(s: &str) -> FolResult {
        tableau_validity(&parse_formula(s).unwrap(), &ProofBudget::default())
    }

    #[test]
    fn identity_implication() {
        let f = "∀x∀z(∃y(B(x,y)∧S(y,z)) → S(x,z))";
        assert_eq!(prove(&format!("({f}) → ({f})")), FolResult::Proved);
    }

    #[test]
    fn universal_instantiation() {
        assert_eq!(
            prove("(∀x(D(x)→S(x)) ∧ D(fr)) → S(fr)"),
            FolResult::Proved
        );
    }

    #[test]
    fn equality_row() {
        assert_eq!(prove("(D(fr) ∧ ∀x(D(x) → x = fr)) → D(fr)"), FolResult::Proved);
        assert_eq!(prove("(fr = he ∧ D(fr)) → D(he)"), FolResult::Proved);
        assert_eq!(prove("∀x∀y(x = y → y = x)"), FolResult::Proved);
    }

    #[test]
    fn quantifier_swap() {
        assert_eq!(prove("∃x∀y L(x,y) → ∀y∃x L(x,y)"), FolResult::Proved);
        assert!(matches!(
            prove("∀y∃x L(x,y) → ∃x∀y L(x,y)"),
            FolResult::Unknown { .. }
        ));
    }

    #[test]
    fn needs_two_instances() {
        assert_eq!(
            prove("∀x(D(x) → B(x)) → ((D(fr) ∧ D(he)) → (B(fr) ∧ B(he)))"),
            FolResult::Proved
        );
    }

    #[test]
    fn invalid_is_never_proved() {
        for s in [
            "∀x(D(x)→B(x))",
            "∃x D(x) → D(fr)",
            "L(fr,he) → L(he,fr)",
            "∀x∀y(D(x) ∧ D(y) → x = y)",
        ] {
            assert!(matches!(prove(s), FolResult::Unknown { .. }), "{s}");
        }
    }

    #[test]
    fn times_out_on_tiny_budget() {
        // an invalid formula with an infinite search space
        let f = parse_formula("∀x∃y L(x,y) → ∃y∀x L(x,y)").unwrap();
        let budget = ProofBudget::new(5, 1 << 20, 1 << 20).unwrap();
        let started = Instant::now();
        let r = tableau_validity(&f, &budget);
        assert!(started.elapsed() < Duration::from_millis(500));
        assert!(matches!(r, FolResult::Unknown { .. }));
    }

    #[test]
    fn schedule_doubles_to_cap() {
        assert_eq!(deepening_schedule(64), vec![1, 2, 4, 8, 16, 32, 64]);
        assert_eq!(deepening_schedule(5), vec![1, 2, 4, 5]);
        assert_eq!(deepening_schedule(1), vec![1]);
    }
}
