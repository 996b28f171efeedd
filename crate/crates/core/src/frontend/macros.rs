use std::rc::Rc;

use crate::syntax::{alpha_eq, fresh_name, Name, Term, Type};

/// `mu r. |>r -> (|>T -> T) -> T`, the recursive type behind `fix[T]`.
pub fn rec_type(t: &Type) -> Type {
    let fv = t.free_vars();
    let r = if fv.iter().any(|v| &**v == "r") {
        fresh_name("r", |n| fv.iter().any(|v| &**v == n))
    } else {
        Name::from("r")
    };
    let body = Type::arrows(
        [
            Type::later(Type::Var(r.clone())),
            Type::arrow(Type::later(t.clone()), t.clone()),
        ],
        t.clone(),
    );
    Type::Mu(r, Rc::new(body))
}

/// Turing's combinator at `T`:
/// `\y:|>Rec. \f:|>T -> T. f ((next (\z:Rec. unfold z)) <*> y <*> next y <*> next f)`.
pub fn theta_term(t: &Type) -> Rc<Term> {
    let rec = rec_type(t);
    let unroll = Term::lam("z", Some(rec.clone()), Term::unfold(Term::var("z")));
    let delayed = [
        Term::var("y"),
        Term::next(Term::var("y")),
        Term::next(Term::var("f")),
    ]
    .into_iter()
    .fold(Term::next(unroll), Term::later_app);
    let body = Term::app(Term::var("f"), delayed);
    Term::lam(
        "y",
        Some(Type::later(rec)),
        Term::lam(
            "f",
            Some(Type::arrow(Type::later(t.clone()), t.clone())),
            body,
        ),
    )
}

/// `fix[T] = theta (next (fold[Rec] theta))`, of type `(|>T -> T) -> T`.
pub fn fix_term(t: &Type) -> Rc<Term> {
    let theta = theta_term(t);
    Term::app(
        theta.clone(),
        Term::next(Term::fold(Some(rec_type(t)), theta)),
    )
}

/// The `T` of a term that is α-equal to `fix[T]`.
pub fn recognize_fix(term: &Term) -> Option<Type> {
    let Term::App(head, _) = term else {
        return None;
    };
    let Term::Lam(_, _, inner) = &**head else {
        return None;
    };
    let Term::Lam(_, Some(Type::Arrow(_, t)), _) = &**inner else {
        return None;
    };
    let t = (**t).clone();
    alpha_eq(term, &fix_term(&t)).then_some(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recognizes_its_own_output() {
        let t = Type::guarded_stream();
        assert_eq!(recognize_fix(&fix_term(&t)), Some(t));
        assert_eq!(recognize_fix(&Term::App(Term::var("f"), Term::var("x"))), None);
    }

    #[test]
    fn rec_binder_avoids_free_names() {
        let Type::Mu(r, _) = rec_type(&Type::var("r")) else {
            panic!()
        };
        assert_ne!(&*r, "r");
    }
}
