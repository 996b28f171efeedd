//! Deterministic call-by-name small-step evaluation of closed terms.
//!
//! The machine ignores type annotations. Ascriptions are removed before
//! running; a term that still contains one is stuck at it.

mod step;

use std::rc::Rc;

use thiserror::Error;

use crate::syntax::{strip_ascriptions, Term};

pub use step::{contract, decompose, is_value, step, step_by_decomposition, Frame};

pub const DEFAULT_FUEL: u64 = 1_000_000;

/// Which redex search `eval` uses. Both yield the same reduction sequence.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strategy {
    #[default]
    Descent,
    Decomposition,
}

impl Strategy {
    pub fn step(self, t: &Rc<Term>) -> Option<Rc<Term>> {
        match self {
            Strategy::Descent => step(t),
            Strategy::Decomposition => step_by_decomposition(t),
        }
    }
}

#[derive(Clone, Debug)]
pub enum EvalOutcome {
    Value { value: Rc<Term>, steps: u64 },
    FuelExhausted { term: Rc<Term>, steps: u64 },
    Stuck { term: Rc<Term>, steps: u64 },
}

impl EvalOutcome {
    pub fn steps(&self) -> u64 {
        match self {
            EvalOutcome::Value { steps, .. }
            | EvalOutcome::FuelExhausted { steps, .. }
            | EvalOutcome::Stuck { steps, .. } => *steps,
        }
    }

    pub fn into_value(self) -> Result<Rc<Term>, EvalError> {
        match self {
            EvalOutcome::Value { value, .. } => Ok(value),
            EvalOutcome::FuelExhausted { steps, .. } => Err(EvalError::FuelExhausted { steps }),
            EvalOutcome::Stuck { term, .. } => Err(EvalError::Stuck {
                term: term.to_string(),
            }),
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("fuel exhausted after {steps} steps")]
    FuelExhausted { steps: u64 },
    #[error("evaluation is stuck at `{term}`")]
    Stuck { term: String },
    #[error("expected a numeral, got `{term}`")]
    NotANumeral { term: String },
}

impl EvalError {
    pub fn code(&self) -> &'static str {
        match self {
            EvalError::FuelExhausted { .. } => "E-FUEL",
            EvalError::Stuck { .. } => "E-STUCK",
            EvalError::NotANumeral { .. } => "E-NOTNAT",
        }
    }
}

/// Reduce a closed term until it is a value, it is stuck, or `fuel` steps
/// have been taken.
pub fn eval(t: &Rc<Term>, fuel: u64) -> EvalOutcome {
    eval_with(Strategy::Descent, t, fuel)
}

pub fn eval_with(strategy: Strategy, t: &Rc<Term>, fuel: u64) -> EvalOutcome {
    let mut cur = strip_ascriptions(t);
    let mut steps = 0;
    loop {
        if is_value(&cur) {
            return EvalOutcome::Value { value: cur, steps };
        }
        if steps >= fuel {
            return EvalOutcome::FuelExhausted { term: cur, steps };
        }
        match strategy.step(&cur) {
            Some(next) => {
                cur = next;
                steps += 1;
            }
            None => return EvalOutcome::Stuck { term: cur, steps },
        }
    }
}

fn decode_nat(v: &Term) -> Result<u64, EvalError> {
    v.as_numeral().ok_or_else(|| EvalError::NotANumeral {
        term: v.to_string(),
    })
}

/// Evaluate a closed term of type `Nat` and decode the numeral.
pub fn observe_nat(t: &Rc<Term>, fuel: u64) -> Result<u64, EvalError> {
    let v = eval(t, fuel).into_value()?;
    decode_nat(&v)
}

/// The first `n` elements of a closed guarded stream, or of a boxed one,
/// which is unboxed first. Each element gets its own `fuel` budget.
pub fn take_stream(t: &Rc<Term>, n: usize, fuel: u64) -> Result<Vec<u64>, EvalError> {
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return Ok(out);
    }
    let mut cur = eval(t, fuel).into_value()?;
    if let Term::BoxI(..) = &*cur {
        cur = eval(&Term::unbox(cur), fuel).into_value()?;
    }
    loop {
        let unfolded = Term::unfold(cur.clone());
        out.push(observe_nat(&Term::fst(unfolded.clone()), fuel)?);
        if out.len() == n {
            return Ok(out);
        }
        cur = eval(&Term::prev_closed(Term::snd(unfolded)), fuel).into_value()?;
    }
}

/// The reduction sequence from `t`, at most `max_steps` steps long.
pub fn trace(t: &Rc<Term>, max_steps: usize) -> Vec<Rc<Term>> {
    let mut out = vec![strip_ascriptions(t)];
    while out.len() <= max_steps {
        match step(out.last().expect("nonempty")) {
            Some(next) => out.push(next),
            None => break,
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_term;

    fn term(s: &str) -> Rc<Term> {
        parse_term(s).unwrap()
    }

    #[test]
    fn identity_application() {
        let out = eval(&term("(\\x. x) ()"), 10);
        assert!(matches!(out, EvalOutcome::Value { ref value, steps: 1 } if **value == Term::Unit));
    }

    #[test]
    fn observations() {
        assert_eq!(observe_nat(&term("succ 0"), 10), Ok(1));
        assert_eq!(observe_nat(&term("addN 1 2"), 10), Ok(3));
    }

    #[test]
    fn fuel_runs_out() {
        let omega = term("(\\x. x x) (\\x. x x)");
        assert!(matches!(eval(&omega, 50), EvalOutcome::FuelExhausted { steps: 50, .. }));
    }

    #[test]
    fn stuck_terms_are_reported() {
        assert!(matches!(eval(&term("fst ()"), 10), EvalOutcome::Stuck { .. }));
    }

    #[test]
    fn traces() {
        assert_eq!(trace(&term("()"), 5).len(), 1);
        let t = trace(&term("unfold (fold ())"), 5);
        assert_eq!(t.len(), 2);
        assert_eq!(*t[1], Term::Unit);
    }

    #[test]
    fn strategies_agree() {
        let t = term("(\\f. f (f 1)) (\\n. addN n n)");
        let a = eval_with(Strategy::Descent, &t, 100);
        let b = eval_with(Strategy::Decomposition, &t, 100);
        assert_eq!(a.steps(), b.steps());
        assert_eq!(a.into_value(), b.into_value());
    }
}
