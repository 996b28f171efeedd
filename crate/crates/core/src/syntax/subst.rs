//! Free variables, capture-avoiding substitution and alpha-equivalence.
//!
//! `prev`, `box` and `boxp` close their bodies with an explicit
//! substitution, so the body is opaque to everything here: free variables
//! come only from the substituted terms, and substitution rewrites only the
//! substituted terms.

use std::collections::BTreeSet;
use std::rc::Rc;

use super::{fresh_name, type_alpha_eq, ExplicitSubst, Name, Term, Type};

pub type Bindings = [(Name, Rc<Term>)];

pub fn free_vars(t: &Term) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    collect_free(t, &mut Vec::new(), &mut out);
    out
}

pub fn is_closed(t: &Term) -> bool {
    free_vars(t).is_empty()
}

fn collect_free<'a>(t: &'a Term, bound: &mut Vec<&'a Name>, out: &mut BTreeSet<Name>) {
    match t {
        Term::Var(x) => {
            if !bound.contains(&x) {
                out.insert(x.clone());
            }
        }
        Term::Lam(x, _, body) => {
            bound.push(x);
            collect_free(body, bound, out);
            bound.pop();
        }
        Term::Case(s, x, l, y, r) => {
            collect_free(s, bound, out);
            bound.push(x);
            collect_free(l, bound, out);
            bound.pop();
            bound.push(y);
            collect_free(r, bound, out);
            bound.pop();
        }
        Term::Prev(sub, _) | Term::BoxI(sub, _) | Term::BoxSum(sub, _) => {
            for (_, u) in sub.iter() {
                collect_free(u, bound, out);
            }
        }
        _ => {
            for c in t.children() {
                collect_free(c, bound, out);
            }
        }
    }
}

/// Free variables of the body of a `prev`/`box`/`boxp`, i.e. the names it
/// expects its explicit substitution to provide.
pub fn body_free_vars(body: &Term) -> BTreeSet<Name> {
    free_vars(body)
}

/// Simultaneous capture-avoiding substitution `t[u1/x1, ..., un/xn]`.
pub fn subst(t: &Rc<Term>, bindings: &Bindings) -> Rc<Term> {
    let mut fvs = BTreeSet::new();
    for (_, u) in bindings {
        fvs.extend(free_vars(u));
    }
    let map: Vec<(Name, Rc<Term>)> = bindings.to_vec();
    go(t, &map, &fvs).unwrap_or_else(|| t.clone())
}

/// Substitution of closed terms. No renaming is ever required, so the free
/// variables of the substituted terms are not computed. The caller must
/// guarantee closedness; the reduction machine does, since it only
/// contracts closed redexes.
pub fn subst_closed(t: &Rc<Term>, bindings: &Bindings) -> Rc<Term> {
    let map: Vec<(Name, Rc<Term>)> = bindings.to_vec();
    go(t, &map, &BTreeSet::new()).unwrap_or_else(|| t.clone())
}

fn lookup<'a>(map: &'a [(Name, Rc<Term>)], x: &str) -> Option<&'a Rc<Term>> {
    map.iter().rev().find(|(n, _)| &**n == x).map(|(_, u)| u)
}

/// The binder to use, the bindings in force beneath it, and the enlarged
/// avoid set if it was renamed.
type Scoped = (Name, Vec<(Name, Rc<Term>)>, Option<BTreeSet<Name>>);

/// Enter the scope of binder `x` over `body`: drop any binding of `x` and,
/// if `x` would capture a free variable of the substituted terms, rename it.
fn under_binder(
    x: &Name,
    bodies: &[&Rc<Term>],
    map: &[(Name, Rc<Term>)],
    fvs: &BTreeSet<Name>,
) -> Scoped {
    let mut inner: Vec<(Name, Rc<Term>)> =
        map.iter().filter(|(n, _)| n != x).cloned().collect();
    if inner.is_empty() || !fvs.contains(x) {
        return (x.clone(), inner, None);
    }
    let mut avoid = fvs.clone();
    for b in bodies {
        avoid.extend(free_vars(b));
    }
    avoid.extend(map.iter().map(|(n, _)| n.clone()));
    let fresh = fresh_name(x, |n| avoid.contains(n));
    inner.push((x.clone(), Rc::new(Term::Var(fresh.clone()))));
    let mut fvs2 = fvs.clone();
    fvs2.insert(fresh.clone());
    (fresh, inner, Some(fvs2))
}

fn go(t: &Rc<Term>, map: &[(Name, Rc<Term>)], fvs: &BTreeSet<Name>) -> Option<Rc<Term>> {
    if map.is_empty() {
        return None;
    }
    let r = |u: &Rc<Term>| go(u, map, fvs);
    let keep = |u: &Rc<Term>, n: Option<Rc<Term>>| n.unwrap_or_else(|| u.clone());
    match &**t {
        Term::Var(x) => lookup(map, x).cloned(),
        Term::Zero | Term::Unit => None,
        Term::Succ(a) => r(a).map(|a| Rc::new(Term::Succ(a))),
        Term::Proj(s, a) => r(a).map(|a| Rc::new(Term::Proj(*s, a))),
        Term::Abort(ty, a) => r(a).map(|a| Rc::new(Term::Abort(ty.clone(), a))),
        Term::Inj(s, ty, a) => r(a).map(|a| Rc::new(Term::Inj(*s, ty.clone(), a))),
        Term::Fold(ty, a) => r(a).map(|a| Rc::new(Term::Fold(ty.clone(), a))),
        Term::Unfold(a) => r(a).map(|a| Rc::new(Term::Unfold(a))),
        Term::Next(a) => r(a).map(|a| Rc::new(Term::Next(a))),
        Term::Unbox(a) => r(a).map(|a| Rc::new(Term::Unbox(a))),
        Term::Ascribe(a, ty) => r(a).map(|a| Rc::new(Term::Ascribe(a, ty.clone()))),
        Term::Pair(a, b) | Term::App(a, b) | Term::LaterApp(a, b) => {
            let (na, nb) = (r(a), r(b));
            if na.is_none() && nb.is_none() {
                return None;
            }
            let (a, b) = (keep(a, na), keep(b, nb));
            Some(Rc::new(match &**t {
                Term::Pair(..) => Term::Pair(a, b),
                Term::App(..) => Term::App(a, b),
                _ => Term::LaterApp(a, b),
            }))
        }
        Term::Lam(x, ty, body) => {
            let (x2, inner, fvs2) = under_binder(x, &[body], map, fvs);
            let nb = go(body, &inner, fvs2.as_ref().unwrap_or(fvs));
            if nb.is_none() && &x2 == x {
                return None;
            }
            Some(Rc::new(Term::Lam(x2, ty.clone(), keep(body, nb))))
        }
        Term::Case(s, x, l, y, rr) => {
            let ns = r(s);
            let (x2, inner_l, fl) = under_binder(x, &[l], map, fvs);
            let nl = go(l, &inner_l, fl.as_ref().unwrap_or(fvs));
            let (y2, inner_r, fr) = under_binder(y, &[rr], map, fvs);
            let nr = go(rr, &inner_r, fr.as_ref().unwrap_or(fvs));
            if ns.is_none() && nl.is_none() && nr.is_none() && &x2 == x && &y2 == y {
                return None;
            }
            Some(Rc::new(Term::Case(
                keep(s, ns),
                x2,
                keep(l, nl),
                y2,
                keep(rr, nr),
            )))
        }
        Term::Prev(sub, body) | Term::BoxI(sub, body) | Term::BoxSum(sub, body) => {
            let new: Vec<Option<Rc<Term>>> = sub.iter().map(|(_, u)| r(u)).collect();
            if new.iter().all(Option::is_none) {
                return None;
            }
            let sub2 = ExplicitSubst(
                sub.iter()
                    .zip(new)
                    .map(|((n, u), nu)| (n.clone(), keep(u, nu)))
                    .collect(),
            );
            Some(Rc::new(match &**t {
                Term::Prev(..) => Term::Prev(sub2, body.clone()),
                Term::BoxI(..) => Term::BoxI(sub2, body.clone()),
                _ => Term::BoxSum(sub2, body.clone()),
            }))
        }
        Term::Prim(op, args) => {
            let new: Vec<Option<Rc<Term>>> = args.iter().map(r).collect();
            if new.iter().all(Option::is_none) {
                return None;
            }
            Some(Rc::new(Term::Prim(
                *op,
                args.iter().zip(new).map(|(a, n)| keep(a, n)).collect(),
            )))
        }
    }
}

/// Alpha-equivalence. Annotations are compared with [`type_alpha_eq`];
/// use [`erase_annotations`] first to ignore them.
pub fn alpha_eq(t: &Term, u: &Term) -> bool {
    alpha_go(t, u, &mut Vec::new())
}

fn opt_ty_eq(a: &Option<Type>, b: &Option<Type>) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(a), Some(b)) => type_alpha_eq(a, b),
        _ => false,
    }
}

fn alpha_go<'a>(t: &'a Term, u: &'a Term, env: &mut Vec<(&'a Name, &'a Name)>) -> bool {
    if std::ptr::eq(t, u) && env.iter().all(|(l, r)| l == r) {
        return true;
    }
    match (t, u) {
        (Term::Var(x), Term::Var(y)) => {
            for (l, r) in env.iter().rev() {
                if *l == x || *r == y {
                    return *l == x && *r == y;
                }
            }
            x == y
        }
        (Term::Zero, Term::Zero) | (Term::Unit, Term::Unit) => true,
        (Term::Succ(a), Term::Succ(b))
        | (Term::Unfold(a), Term::Unfold(b))
        | (Term::Next(a), Term::Next(b))
        | (Term::Unbox(a), Term::Unbox(b)) => alpha_go(a, b, env),
        (Term::Proj(s1, a), Term::Proj(s2, b)) => s1 == s2 && alpha_go(a, b, env),
        (Term::Abort(t1, a), Term::Abort(t2, b)) | (Term::Fold(t1, a), Term::Fold(t2, b)) => {
            opt_ty_eq(t1, t2) && alpha_go(a, b, env)
        }
        (Term::Inj(s1, t1, a), Term::Inj(s2, t2, b)) => {
            s1 == s2 && opt_ty_eq(t1, t2) && alpha_go(a, b, env)
        }
        (Term::Ascribe(a, t1), Term::Ascribe(b, t2)) => {
            type_alpha_eq(t1, t2) && alpha_go(a, b, env)
        }
        (Term::Pair(a1, a2), Term::Pair(b1, b2))
        | (Term::App(a1, a2), Term::App(b1, b2))
        | (Term::LaterApp(a1, a2), Term::LaterApp(b1, b2)) => {
            alpha_go(a1, b1, env) && alpha_go(a2, b2, env)
        }
        (Term::Lam(x, t1, a), Term::Lam(y, t2, b)) => {
            if !opt_ty_eq(t1, t2) {
                return false;
            }
            env.push((x, y));
            let r = alpha_go(a, b, env);
            env.pop();
            r
        }
        (Term::Case(s1, x1, l1, y1, r1), Term::Case(s2, x2, l2, y2, r2)) => {
            if !alpha_go(s1, s2, env) {
                return false;
            }
            env.push((x1, x2));
            let ok = alpha_go(l1, l2, env);
            env.pop();
            if !ok {
                return false;
            }
            env.push((y1, y2));
            let ok = alpha_go(r1, r2, env);
            env.pop();
            ok
        }
        (Term::Prev(s1, a), Term::Prev(s2, b))
        | (Term::BoxI(s1, a), Term::BoxI(s2, b))
        | (Term::BoxSum(s1, a), Term::BoxSum(s2, b)) => {
            if s1.len() != s2.len() {
                return false;
            }
            for ((_, u1), (_, u2)) in s1.iter().zip(s2.iter()) {
                if !alpha_go(u1, u2, env) {
                    return false;
                }
            }
            // The body only sees the substitution's own variables.
            let mut inner: Vec<(&Name, &Name)> =
                s1.vars().zip(s2.vars()).collect();
            alpha_go(a, b, &mut inner)
        }
        (Term::Prim(o1, a1), Term::Prim(o2, a2)) => {
            o1 == o2
                && a1.len() == a2.len()
                && a1.iter().zip(a2).all(|(x, y)| alpha_go(x, y, env))
        }
        _ => false,
    }
}

/// Drop every type annotation and ascription. Reduction never consults
/// annotations, so `erase_annotations` commutes with a reduction step.
pub fn erase_annotations(t: &Rc<Term>) -> Rc<Term> {
    let e = erase_annotations;
    let sub = |s: &ExplicitSubst| {
        ExplicitSubst(s.iter().map(|(n, u)| (n.clone(), e(u))).collect())
    };
    Rc::new(match &**t {
        Term::Var(_) | Term::Zero | Term::Unit => return t.clone(),
        Term::Succ(a) => Term::Succ(e(a)),
        Term::Pair(a, b) => Term::Pair(e(a), e(b)),
        Term::Proj(s, a) => Term::Proj(*s, e(a)),
        Term::Abort(_, a) => Term::Abort(None, e(a)),
        Term::Inj(s, _, a) => Term::Inj(*s, None, e(a)),
        Term::Case(s, x, l, y, r) => Term::Case(e(s), x.clone(), e(l), y.clone(), e(r)),
        Term::Lam(x, _, b) => Term::Lam(x.clone(), None, e(b)),
        Term::App(a, b) => Term::App(e(a), e(b)),
        Term::Fold(_, a) => Term::Fold(None, e(a)),
        Term::Unfold(a) => Term::Unfold(e(a)),
        Term::Next(a) => Term::Next(e(a)),
        Term::Prev(s, b) => Term::Prev(sub(s), e(b)),
        Term::LaterApp(a, b) => Term::LaterApp(e(a), e(b)),
        Term::BoxI(s, b) => Term::BoxI(sub(s), e(b)),
        Term::Unbox(a) => Term::Unbox(e(a)),
        Term::BoxSum(s, b) => Term::BoxSum(sub(s), e(b)),
        Term::Prim(op, args) => Term::Prim(*op, args.iter().map(e).collect()),
        Term::Ascribe(a, _) => return e(a),
    })
}

/// Remove ascriptions `(t : T)` but keep constructor annotations.
pub fn strip_ascriptions(t: &Rc<Term>) -> Rc<Term> {
    if !contains_ascription(t) {
        return t.clone();
    }
    let s = strip_ascriptions;
    let sub = |x: &ExplicitSubst| {
        ExplicitSubst(x.iter().map(|(n, u)| (n.clone(), s(u))).collect())
    };
    Rc::new(match &**t {
        Term::Var(_) | Term::Zero | Term::Unit => return t.clone(),
        Term::Succ(a) => Term::Succ(s(a)),
        Term::Pair(a, b) => Term::Pair(s(a), s(b)),
        Term::Proj(side, a) => Term::Proj(*side, s(a)),
        Term::Abort(ty, a) => Term::Abort(ty.clone(), s(a)),
        Term::Inj(side, ty, a) => Term::Inj(*side, ty.clone(), s(a)),
        Term::Case(c, x, l, y, r) => Term::Case(s(c), x.clone(), s(l), y.clone(), s(r)),
        Term::Lam(x, ty, b) => Term::Lam(x.clone(), ty.clone(), s(b)),
        Term::App(a, b) => Term::App(s(a), s(b)),
        Term::Fold(ty, a) => Term::Fold(ty.clone(), s(a)),
        Term::Unfold(a) => Term::Unfold(s(a)),
        Term::Next(a) => Term::Next(s(a)),
        Term::Prev(x, b) => Term::Prev(sub(x), s(b)),
        Term::LaterApp(a, b) => Term::LaterApp(s(a), s(b)),
        Term::BoxI(x, b) => Term::BoxI(sub(x), s(b)),
        Term::Unbox(a) => Term::Unbox(s(a)),
        Term::BoxSum(x, b) => Term::BoxSum(sub(x), s(b)),
        Term::Prim(op, args) => Term::Prim(*op, args.iter().map(s).collect()),
        Term::Ascribe(a, _) => return s(a),
    })
}

fn contains_ascription(t: &Term) -> bool {
    matches!(t, Term::Ascribe(..)) || t.children().any(|c| contains_ascription(c))
}

/// Replace free occurrences of closed global definitions everywhere,
/// including inside the bodies of `prev`/`box`/`boxp`. Definitions are
/// closed, so their insertion into a closed body keeps it closed; ordinary
/// substitution would leave those bodies untouched.
pub fn inline_globals(t: &Rc<Term>, globals: &dyn Fn(&str) -> Option<Rc<Term>>) -> Rc<Term> {
    fn walk(
        t: &Rc<Term>,
        bound: &mut Vec<Name>,
        globals: &dyn Fn(&str) -> Option<Rc<Term>>,
    ) -> Rc<Term> {
        let w = |u: &Rc<Term>, bound: &mut Vec<Name>| walk(u, bound, globals);
        match &**t {
            Term::Var(x) => {
                if !bound.contains(x) {
                    if let Some(def) = globals(x) {
                        return def;
                    }
                }
                t.clone()
            }
            Term::Lam(x, ty, b) => {
                bound.push(x.clone());
                let b2 = w(b, bound);
                bound.pop();
                Rc::new(Term::Lam(x.clone(), ty.clone(), b2))
            }
            Term::Case(s, x, l, y, r) => {
                let s2 = w(s, bound);
                bound.push(x.clone());
                let l2 = w(l, bound);
                bound.pop();
                bound.push(y.clone());
                let r2 = w(r, bound);
                bound.pop();
                Rc::new(Term::Case(s2, x.clone(), l2, y.clone(), r2))
            }
            Term::Prev(sub, b) | Term::BoxI(sub, b) | Term::BoxSum(sub, b) => {
                let sub2 = ExplicitSubst(
                    sub.iter().map(|(n, u)| (n.clone(), w(u, bound))).collect(),
                );
                let mut inner: Vec<Name> = sub.vars().cloned().collect();
                let b2 = w(b, &mut inner);
                Rc::new(match &**t {
                    Term::Prev(..) => Term::Prev(sub2, b2),
                    Term::BoxI(..) => Term::BoxI(sub2, b2),
                    _ => Term::BoxSum(sub2, b2),
                })
            }
            _ => map_children(t, |c| w(c, bound)),
        }
    }
    walk(t, &mut Vec::new(), globals)
}

/// Rebuild a binder-free node with its children mapped.
fn map_children(t: &Rc<Term>, mut f: impl FnMut(&Rc<Term>) -> Rc<Term>) -> Rc<Term> {
    Rc::new(match &**t {
        Term::Var(_) | Term::Zero | Term::Unit => return t.clone(),
        Term::Succ(a) => Term::Succ(f(a)),
        Term::Pair(a, b) => {
            let a = f(a);
            Term::Pair(a, f(b))
        }
        Term::Proj(s, a) => Term::Proj(*s, f(a)),
        Term::Abort(ty, a) => Term::Abort(ty.clone(), f(a)),
        Term::Inj(s, ty, a) => Term::Inj(*s, ty.clone(), f(a)),
        Term::App(a, b) => {
            let a = f(a);
            Term::App(a, f(b))
        }
        Term::Fold(ty, a) => Term::Fold(ty.clone(), f(a)),
        Term::Unfold(a) => Term::Unfold(f(a)),
        Term::Next(a) => Term::Next(f(a)),
        Term::LaterApp(a, b) => {
            let a = f(a);
            Term::LaterApp(a, f(b))
        }
        Term::Unbox(a) => Term::Unbox(f(a)),
        Term::Prim(op, args) => Term::Prim(*op, args.iter().map(f).collect()),
        Term::Ascribe(a, ty) => Term::Ascribe(f(a), ty.clone()),
        Term::Lam(..) | Term::Case(..) | Term::Prev(..) | Term::BoxI(..) | Term::BoxSum(..) => {
            unreachable!("binders are handled by the caller")
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(s: &str) -> Name {
        Name::from(s)
    }

    fn prev(pairs: &[(&str, Rc<Term>)], body: Rc<Term>) -> Rc<Term> {
        Rc::new(Term::Prev(
            ExplicitSubst(pairs.iter().map(|(x, t)| (n(x), t.clone())).collect()),
            body,
        ))
    }

    #[test]
    fn variable_case() {
        let u = Term::numeral(3);
        assert!(alpha_eq(&subst(&Term::var("x"), &[(n("x"), u.clone())]), &u));
    }

    #[test]
    fn bound_variable_untouched() {
        let t = Term::lam("x", None, Term::var("x"));
        assert!(alpha_eq(&subst(&t, &[(n("y"), Term::Unit.into())]), &t));
    }

    #[test]
    fn substitution_lands_in_explicit_list() {
        let t = prev(&[("y", Term::var("x"))], Term::next(Term::var("y")));
        let u = Term::numeral(1);
        let expected = prev(&[("y", u.clone())], Term::next(Term::var("y")));
        assert!(alpha_eq(&subst(&t, &[(n("x"), u)]), &expected));
    }

    #[test]
    fn prev_body_is_never_rewritten() {
        // The body mentions x, but x is bound by the list.
        let t = prev(&[("x", Term::var("z"))], Term::next(Term::var("x")));
        let r = subst(&t, &[(n("x"), Term::numeral(5))]);
        assert!(alpha_eq(&r, &t));
    }

    #[test]
    fn free_vars_examples() {
        let t = prev(&[("y", Term::var("x"))], Term::var("y"));
        assert_eq!(free_vars(&t), BTreeSet::from([n("x")]));
        let t = Term::lam("x", None, Term::app(Term::var("x"), Term::var("y")));
        assert_eq!(free_vars(&t), BTreeSet::from([n("y")]));
        assert_eq!(free_vars(&Term::next(Term::var("x"))), BTreeSet::from([n("x")]));
    }

    #[test]
    fn alpha_examples() {
        let idx = Term::lam("x", None, Term::var("x"));
        let idy = Term::lam("y", None, Term::var("y"));
        assert!(alpha_eq(&idx, &idy));
        let l = prev(&[("x", Term::var("z"))], Term::next(Term::var("x")));
        let r = prev(&[("y", Term::var("z"))], Term::next(Term::var("y")));
        assert!(alpha_eq(&l, &r));
        let a = Term::lam("x", None, Term::var("y"));
        let b = Term::lam("x", None, Term::var("z"));
        assert!(!alpha_eq(&a, &b));
    }

    #[test]
    fn capture_is_avoided() {
        // (\y. x y)[y/x] = \y'. y y'
        let t = Term::lam("y", None, Term::app(Term::var("x"), Term::var("y")));
        let r = subst(&t, &[(n("x"), Term::var("y"))]);
        let expected = Term::lam("w", None, Term::app(Term::var("y"), Term::var("w")));
        assert!(alpha_eq(&r, &expected), "{r:?}");
    }

    #[test]
    fn case_binders_avoid_capture() {
        let t = Rc::new(Term::Case(
            Term::var("s"),
            n("a"),
            Term::app(Term::var("x"), Term::var("a")),
            n("b"),
            Term::var("x"),
        ));
        let r = subst(&t, &[(n("x"), Term::var("a"))]);
        let expected = Rc::new(Term::Case(
            Term::var("s"),
            n("c"),
            Term::app(Term::var("a"), Term::var("c")),
            n("b"),
            Term::var("a"),
        ));
        assert!(alpha_eq(&r, &expected), "{r:?}");
    }

    #[test]
    fn simultaneous_substitution() {
        let t = Term::pair(Term::var("x"), Term::var("y"));
        let r = subst(&t, &[(n("x"), Term::var("y")), (n("y"), Term::var("x"))]);
        assert!(alpha_eq(&r, &Term::pair(Term::var("y"), Term::var("x"))));
    }

    #[test]
    fn globals_are_inlined_under_prev() {
        let body = Term::app(Term::var("g"), Term::var("y"));
        let t = prev(&[("y", Term::var("g"))], body);
        let def = Term::lam("k", None, Term::var("k"));
        let r = inline_globals(&t, &|x| (x == "g").then(|| def.clone()));
        let expected = prev(&[("y", def.clone())], Term::app(def, Term::var("y")));
        assert!(alpha_eq(&r, &expected));
    }

    #[test]
    fn erasure_drops_annotations() {
        let t = Term::fold(Some(Type::guarded_stream()), Term::var("x"));
        let e = erase_annotations(&t);
        assert!(alpha_eq(&e, &Term::fold(None, Term::var("x"))));
    }
}
