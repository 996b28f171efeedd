use std::fmt::Write;

use super::macros::recognize_fix;
use crate::syntax::{ExplicitSubst, Side, Term, Type};

// Term precedence levels, loosest first.
const TOP: u8 = 0;
const AP: u8 = 1;
const APP: u8 = 2;
const ATOM: u8 = 3;

/// Render a term in the surface syntax. Parsing the output yields an
/// α-equal term.
pub fn pretty_term(t: &Term) -> String {
    let mut out = String::new();
    term(t, TOP, &mut out);
    out
}

/// Render a type in the surface syntax.
pub fn pretty_type(a: &Type) -> String {
    let mut out = String::new();
    ty(a, 0, &mut out);
    out
}

fn ty(a: &Type, prec: u8, out: &mut String) {
    let open = |p: u8, out: &mut String| {
        if prec > p {
            out.push('(');
        }
    };
    let close = |p: u8, out: &mut String| {
        if prec > p {
            out.push(')');
        }
    };
    match a {
        Type::Var(v) => out.push_str(v),
        Type::Nat => out.push_str("Nat"),
        Type::Unit => out.push_str("Unit"),
        Type::Void => out.push_str("Void"),
        Type::Arrow(l, r) => {
            open(0, out);
            ty(l, 1, out);
            out.push_str(" -> ");
            ty(r, 0, out);
            close(0, out);
        }
        Type::Sum(l, r) => {
            open(1, out);
            ty(l, 1, out);
            out.push_str(" + ");
            ty(r, 2, out);
            close(1, out);
        }
        Type::Prod(l, r) => {
            open(2, out);
            ty(l, 2, out);
            out.push_str(" * ");
            ty(r, 3, out);
            close(2, out);
        }
        Type::Later(b) => {
            out.push_str("|>");
            ty(b, 3, out);
        }
        Type::Box(b) => {
            out.push('#');
            ty(b, 3, out);
        }
        Type::Mu(v, body) => {
            open(0, out);
            let _ = write!(out, "mu {v}. ");
            ty(body, 0, out);
            close(0, out);
        }
    }
}

fn is_greedy(t: &Term) -> bool {
    matches!(
        t,
        Term::Lam(..) | Term::Case(..) | Term::Prev(..) | Term::BoxI(..) | Term::BoxSum(..)
    )
}

fn term(t: &Term, prec: u8, out: &mut String) {
    if let Some(n) = t.as_numeral() {
        let _ = write!(out, "{n}");
        return;
    }
    if let Term::App(..) = t {
        if let Some(a) = recognize_fix(t) {
            out.push_str("fix[");
            ty(&a, 0, out);
            out.push(']');
            return;
        }
    }
    let level = match t {
        Term::Lam(..) | Term::Case(..) | Term::Prev(..) | Term::BoxI(..) | Term::BoxSum(..) => TOP,
        Term::LaterApp(..) => AP,
        Term::App(..) | Term::Prim(..) => APP,
        Term::Succ(_)
        | Term::Proj(..)
        | Term::Abort(..)
        | Term::Inj(..)
        | Term::Fold(..)
        | Term::Unfold(_)
        | Term::Next(_)
        | Term::Unbox(_) => APP,
        Term::Var(_) | Term::Zero | Term::Unit | Term::Pair(..) | Term::Ascribe(..) => ATOM,
    };
    let parens = prec > level;
    if parens {
        out.push('(');
    }
    match t {
        Term::Var(v) => out.push_str(v),
        Term::Zero => out.push('0'),
        Term::Unit => out.push_str("()"),
        Term::Pair(a, b) => {
            out.push('(');
            term(a, TOP, out);
            out.push_str(", ");
            term(b, TOP, out);
            out.push(')');
        }
        Term::Ascribe(a, b) => {
            out.push('(');
            term(a, TOP, out);
            out.push_str(" : ");
            ty(b, 0, out);
            out.push(')');
        }
        Term::Succ(a) => prefix("succ", None, a, out),
        Term::Proj(Side::Left, a) => prefix("fst", None, a, out),
        Term::Proj(Side::Right, a) => prefix("snd", None, a, out),
        Term::Unfold(a) => prefix("unfold", None, a, out),
        Term::Next(a) => prefix("next", None, a, out),
        Term::Unbox(a) => prefix("unbox", None, a, out),
        Term::Abort(ann, a) => prefix("abort", ann.as_ref(), a, out),
        Term::Fold(ann, a) => prefix("fold", ann.as_ref(), a, out),
        Term::Inj(Side::Left, ann, a) => prefix("inl", ann.as_ref(), a, out),
        Term::Inj(Side::Right, ann, a) => prefix("inr", ann.as_ref(), a, out),
        Term::App(f, a) => {
            // A primitive head would absorb the argument.
            let head_prec = if matches!(&**f, Term::Prim(..)) { ATOM } else { APP };
            term(f, head_prec, out);
            out.push(' ');
            term(a, ATOM, out);
        }
        Term::Prim(op, args) => {
            out.push_str(op.name());
            for a in args {
                out.push(' ');
                term(a, ATOM, out);
            }
        }
        Term::LaterApp(f, a) => {
            term(f, AP, out);
            out.push_str(" <*> ");
            term(a, APP, out);
        }
        Term::Lam(x, ann, body) => {
            out.push('\\');
            out.push_str(x);
            if let Some(a) = ann {
                out.push_str(": ");
                ty(a, 0, out);
            }
            out.push_str(". ");
            term(body, TOP, out);
        }
        Term::Case(s, x, l, y, r) => {
            out.push_str("case ");
            term(s, AP, out);
            let _ = write!(out, " of inl {x} -> ");
            term(l, if is_greedy(l) { AP } else { TOP }, out);
            let _ = write!(out, " | inr {y} -> ");
            term(r, TOP, out);
        }
        Term::Prev(sub, body) => boxlike("prev", sub, body, out),
        Term::BoxI(sub, body) => boxlike("box", sub, body, out),
        Term::BoxSum(sub, body) => boxlike("boxp", sub, body, out),
    }
    if parens {
        out.push(')');
    }
}

fn prefix(kw: &str, ann: Option<&Type>, a: &Term, out: &mut String) {
    out.push_str(kw);
    if let Some(t) = ann {
        out.push('[');
        ty(t, 0, out);
        out.push(']');
    }
    out.push(' ');
    term(a, ATOM, out);
}

fn boxlike(kw: &str, sub: &ExplicitSubst, body: &Term, out: &mut String) {
    out.push_str(kw);
    if sub.is_empty() {
        out.push(' ');
    } else {
        out.push('{');
        for (i, (x, t)) in sub.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            let _ = write!(out, "{x} <- ");
            term(t, TOP, out);
        }
        out.push_str("}. ");
    }
    term(body, TOP, out);
}
