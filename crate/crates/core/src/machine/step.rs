use std::rc::Rc;

use crate::syntax::{subst_closed, ExplicitSubst, Name, PrimOp, Side, Term, Type};

/// Canonical forms: `succ^n zero`, `()`, pairs, injections, lambdas, folds,
/// `next t` and `box σ. t`. Components are not evaluated.
pub fn is_value(t: &Term) -> bool {
    match t {
        Term::Zero => true,
        Term::Succ(_) => t.as_numeral().is_some(),
        Term::Unit
        | Term::Pair(..)
        | Term::Inj(..)
        | Term::Lam(..)
        | Term::Fold(..)
        | Term::Next(_)
        | Term::BoxI(..) => true,
        _ => false,
    }
}

/// The reduct of `t` if `t` itself is a redex.
pub fn contract(t: &Term) -> Option<Rc<Term>> {
    match t {
        Term::Proj(side, p) => match &**p {
            Term::Pair(a, b) => Some(match side {
                Side::Left => a.clone(),
                Side::Right => b.clone(),
            }),
            _ => None,
        },
        Term::Case(s, x, l, y, r) => match &**s {
            Term::Inj(Side::Left, _, u) => Some(subst_closed(l, &[(x.clone(), u.clone())])),
            Term::Inj(Side::Right, _, u) => Some(subst_closed(r, &[(y.clone(), u.clone())])),
            _ => None,
        },
        Term::App(f, a) => match &**f {
            Term::Lam(x, _, body) => Some(subst_closed(body, &[(x.clone(), a.clone())])),
            _ => None,
        },
        Term::Unfold(a) => match &**a {
            Term::Fold(_, u) => Some(u.clone()),
            _ => None,
        },
        Term::Prev(sub, body) if !sub.is_empty() => Some(Rc::new(Term::Prev(
            ExplicitSubst::empty(),
            subst_closed(body, &sub.0),
        ))),
        Term::Prev(_, body) => match &**body {
            Term::Next(u) => Some(u.clone()),
            _ => None,
        },
        Term::LaterApp(f, a) => match (&**f, &**a) {
            (Term::Next(g), Term::Next(u)) => Some(Term::next(Term::app(g.clone(), u.clone()))),
            _ => None,
        },
        Term::Unbox(a) => match &**a {
            Term::BoxI(sub, body) => Some(subst_closed(body, &sub.0)),
            _ => None,
        },
        Term::BoxSum(sub, body) if !sub.is_empty() => Some(Rc::new(Term::BoxSum(
            ExplicitSubst::empty(),
            subst_closed(body, &sub.0),
        ))),
        Term::BoxSum(_, body) => match &**body {
            Term::Inj(side, ann, u) => {
                let ann = ann.as_ref().and_then(|a| match a {
                    Type::Sum(l, r) => Some(Type::sum(
                        Type::boxed((**l).clone()),
                        Type::boxed((**r).clone()),
                    )),
                    _ => None,
                });
                Some(Rc::new(Term::Inj(*side, ann, Term::box_closed(u.clone()))))
            }
            _ => None,
        },
        Term::Prim(op, args) => {
            let ns: Option<Vec<u64>> = args.iter().map(|a| a.as_numeral()).collect();
            ns.map(|ns| Term::numeral(op.apply(&ns)))
        }
        _ => None,
    }
}

/// One call-by-name step by recursive descent through evaluation contexts.
/// `None` on values and on stuck terms.
pub fn step(t: &Rc<Term>) -> Option<Rc<Term>> {
    if let Some(r) = contract(t) {
        return Some(r);
    }
    match &**t {
        Term::Succ(a) => step(a).map(|a| Rc::new(Term::Succ(a))),
        Term::Proj(side, a) => step(a).map(|a| Rc::new(Term::Proj(*side, a))),
        Term::Case(s, x, l, y, r) => step(s).map(|s| {
            Rc::new(Term::Case(s, x.clone(), l.clone(), y.clone(), r.clone()))
        }),
        Term::App(f, a) => step(f).map(|f| Term::app(f, a.clone())),
        Term::Unfold(a) => step(a).map(Term::unfold),
        Term::Prev(sub, body) if sub.is_empty() => step(body).map(Term::prev_closed),
        Term::LaterApp(f, a) => {
            if is_value(f) {
                step(a).map(|a| Term::later_app(f.clone(), a))
            } else {
                step(f).map(|f| Term::later_app(f, a.clone()))
            }
        }
        Term::Unbox(a) => step(a).map(Term::unbox),
        Term::BoxSum(sub, body) if sub.is_empty() => {
            step(body).map(|b| Rc::new(Term::BoxSum(ExplicitSubst::empty(), b)))
        }
        Term::Prim(op, args) => {
            let i = args.iter().position(|a| a.as_numeral().is_none())?;
            let a = step(&args[i])?;
            let mut args = args.clone();
            args[i] = a;
            Some(Term::prim(*op, args))
        }
        _ => None,
    }
}

/// One frame of an evaluation context.
#[derive(Clone, Debug)]
pub enum Frame {
    Succ,
    Proj(Side),
    Case(Name, Rc<Term>, Name, Rc<Term>),
    AppFun(Rc<Term>),
    Unfold,
    Prev,
    ApFun(Rc<Term>),
    ApArg(Rc<Term>),
    Unbox,
    BoxSum,
    Prim(PrimOp, Vec<Rc<Term>>, Vec<Rc<Term>>),
}

impl Frame {
    pub fn plug(&self, t: Rc<Term>) -> Rc<Term> {
        Rc::new(match self {
            Frame::Succ => Term::Succ(t),
            Frame::Proj(side) => Term::Proj(*side, t),
            Frame::Case(x, l, y, r) => Term::Case(t, x.clone(), l.clone(), y.clone(), r.clone()),
            Frame::AppFun(a) => Term::App(t, a.clone()),
            Frame::Unfold => Term::Unfold(t),
            Frame::Prev => Term::Prev(ExplicitSubst::empty(), t),
            Frame::ApFun(a) => Term::LaterApp(t, a.clone()),
            Frame::ApArg(f) => Term::LaterApp(f.clone(), t),
            Frame::Unbox => Term::Unbox(t),
            Frame::BoxSum => Term::BoxSum(ExplicitSubst::empty(), t),
            Frame::Prim(op, before, after) => {
                let mut args = before.clone();
                args.push(t);
                args.extend(after.iter().cloned());
                Term::Prim(*op, args)
            }
        })
    }
}

/// Split `t` as `E[r]` where `r` is its focus: the subterm that the
/// context grammar selects. The focus is a redex unless `t` is a value or
/// stuck. Frames are listed outermost first.
pub fn decompose(t: &Rc<Term>) -> (Vec<Frame>, Rc<Term>) {
    let mut frames = Vec::new();
    let mut cur = t.clone();
    loop {
        if contract(&cur).is_some() {
            return (frames, cur);
        }
        let (frame, next) = match &*cur {
            Term::Succ(a) if !is_value(&cur) => (Frame::Succ, a.clone()),
            Term::Proj(side, a) => (Frame::Proj(*side), a.clone()),
            Term::Case(s, x, l, y, r) => (
                Frame::Case(x.clone(), l.clone(), y.clone(), r.clone()),
                s.clone(),
            ),
            Term::App(f, a) => (Frame::AppFun(a.clone()), f.clone()),
            Term::Unfold(a) => (Frame::Unfold, a.clone()),
            Term::Prev(sub, body) if sub.is_empty() => (Frame::Prev, body.clone()),
            Term::LaterApp(f, a) if is_value(f) => (Frame::ApArg(f.clone()), a.clone()),
            Term::LaterApp(f, a) => (Frame::ApFun(a.clone()), f.clone()),
            Term::Unbox(a) => (Frame::Unbox, a.clone()),
            Term::BoxSum(sub, body) if sub.is_empty() => (Frame::BoxSum, body.clone()),
            Term::Prim(op, args) => match args.iter().position(|a| a.as_numeral().is_none()) {
                Some(i) => (
                    Frame::Prim(*op, args[..i].to_vec(), args[i + 1..].to_vec()),
                    args[i].clone(),
                ),
                None => return (frames, cur),
            },
            _ => return (frames, cur),
        };
        frames.push(frame);
        cur = next;
    }
}

/// One step via an explicit decomposition into context and redex.
pub fn step_by_decomposition(t: &Rc<Term>) -> Option<Rc<Term>> {
    let (frames, focus) = decompose(t);
    let reduct = contract(&focus)?;
    Some(frames.iter().rev().fold(reduct, |acc, f| f.plug(acc)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_term;
    use crate::syntax::alpha_eq;

    fn steps_to(src: &str, expected: &str) {
        let t = parse_term(src).unwrap();
        let e = parse_term(expected).unwrap();
        for s in [step(&t), step_by_decomposition(&t)] {
            let s = s.unwrap_or_else(|| panic!("{src} does not step"));
            assert!(alpha_eq(&s, &e), "{src} stepped to {s}, expected {expected}");
        }
    }

    #[test]
    fn unfold_fold() {
        steps_to("unfold (fold ())", "()");
    }

    #[test]
    fn prev_next() {
        steps_to("prev next ()", "()");
    }

    #[test]
    fn next_ap_next() {
        steps_to("next (\\x. x) <*> next ()", "next ((\\x. x) ())");
    }

    #[test]
    fn boxsum_of_injection() {
        steps_to("boxp inl ()", "inl (box ())");
    }

    #[test]
    fn substitutions_fire_first() {
        steps_to("prev{x <- next ()}. x", "prev next ()");
        steps_to("boxp{x <- inl ()}. x", "boxp inl ()");
        steps_to("unbox (box{x <- ()}. (x, x))", "((), ())");
    }

    #[test]
    fn contexts() {
        steps_to("succ (fst (1, 2))", "succ 1");
        steps_to("next (\\x. x) <*> fst (next 0, ())", "next (\\x. x) <*> next 0");
        steps_to("fst (next 0, ()) <*> next 1", "next 0 <*> next 1");
        steps_to("addN 1 (fst (2, 3))", "addN 1 2");
        steps_to("mulN 3 4", "12");
        steps_to(
            "case inr () of inl x -> x | inr y -> (y, y)",
            "((), ())",
        );
    }

    #[test]
    fn values_do_not_step() {
        for v in ["3", "()", "(fst (), ())", "\\x. x", "next (fst ())", "box fst ()", "fold ()"] {
            let t = parse_term(v).unwrap();
            assert!(is_value(&t), "{v}");
            assert!(step(&t).is_none() && step_by_decomposition(&t).is_none(), "{v}");
        }
    }

    #[test]
    fn nonempty_prev_is_not_a_context() {
        let t = parse_term("prev{x <- fst (next 0, ())}. x").unwrap();
        let s = step(&t).unwrap();
        assert!(matches!(&*s, Term::Prev(sub, _) if sub.is_empty()));
    }
}
