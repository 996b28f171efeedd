use std::collections::HashMap;
use std::rc::Rc;

use thiserror::Error;

use super::types::{is_constant, wf_closed, WfError};
use crate::frontend::{pretty_term, pretty_type};
use crate::syntax::{free_vars, type_alpha_eq, ExplicitSubst, Name, PrimOp, Side, Term, Type};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum TypeError {
    #[error("type mismatch at `{term}`: expected {expected}, found {found}")]
    TypeMismatch {
        term: String,
        expected: String,
        found: String,
    },
    #[error("`{var}` is bound to a term of non-constant type `{ty}`")]
    NonConstantSubstType { var: Name, ty: Type },
    #[error("`{var}` is used in a closed body but not listed in its substitution")]
    EscapingVariable { var: Name },
    #[error("cannot synthesize a type for `{term}`; add an annotation")]
    CannotSynthesize { term: String },
    #[error("unbound variable `{0}`")]
    UnboundVariable(Name),
    #[error("`{op}` expects {expected} arguments, got {found}")]
    PrimArity {
        op: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("ill-formed type: {0}")]
    IllFormedType(#[from] WfError),
}

impl TypeError {
    /// Stable machine-readable error code.
    pub fn code(&self) -> &'static str {
        match self {
            TypeError::TypeMismatch { .. } => "E-MISMATCH",
            TypeError::NonConstantSubstType { .. } => "E-NONCONSTANT",
            TypeError::EscapingVariable { .. } => "E-ESCAPE",
            TypeError::CannotSynthesize { .. } => "E-SYNTH",
            TypeError::UnboundVariable(_) => "E-UNBOUND",
            TypeError::PrimArity { .. } => "E-ARITY",
            TypeError::IllFormedType(WfError::UnboundTypeVar(_)) => "E-TYVAR",
            TypeError::IllFormedType(WfError::UnguardedMu { .. }) => "E-UNGUARDED",
            TypeError::IllFormedType(WfError::OpenBox(_)) => "E-OPENBOX",
        }
    }
}

fn excerpt(t: &Term) -> String {
    const MAX: usize = 72;
    let s = pretty_term(t);
    if s.chars().count() <= MAX {
        s
    } else {
        let cut: String = s.chars().take(MAX - 3).collect();
        format!("{cut}...")
    }
}

fn mismatch(t: &Term, expected: impl Into<String>, found: &Type) -> TypeError {
    shape(t, expected, format!("`{}`", pretty_type(found)))
}

fn shape(t: &Term, expected: impl Into<String>, found: impl Into<String>) -> TypeError {
    TypeError::TypeMismatch {
        term: excerpt(t),
        expected: expected.into(),
        found: found.into(),
    }
}

fn mismatch_ty(t: &Term, expected: &Type, found: &Type) -> TypeError {
    mismatch(t, format!("`{}`", pretty_type(expected)), found)
}

fn cannot_synth(t: &Term) -> TypeError {
    TypeError::CannotSynthesize { term: excerpt(t) }
}

/// An ordered typing context `x1 : A1, ..., xn : An`. Later entries shadow
/// earlier ones.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TypingContext {
    entries: Vec<(Name, Type)>,
}

impl TypingContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, x: &str, a: Type) -> Self {
        self.entries.push((Name::from(x), a));
        self
    }

    pub fn push(&mut self, x: Name, a: Type) {
        self.entries.push((x, a));
    }

    pub fn pop(&mut self) {
        self.entries.pop();
    }

    pub fn lookup(&self, x: &str) -> Option<&Type> {
        self.entries
            .iter()
            .rev()
            .find(|(n, _)| &**n == x)
            .map(|(_, a)| a)
    }

    pub fn contains(&self, x: &str) -> bool {
        self.lookup(x).is_some()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Name, Type)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl FromIterator<(Name, Type)> for TypingContext {
    fn from_iter<I: IntoIterator<Item = (Name, Type)>>(iter: I) -> Self {
        TypingContext {
            entries: iter.into_iter().collect(),
        }
    }
}

type TResult<T> = Result<T, TypeError>;

/// Bidirectional checker. Besides deciding typability it elaborates the
/// input into a fully annotated term: every lambda carries its domain and
/// every injection, fold and abort its type, and ascriptions are dropped.
/// Fully annotated terms always synthesize.
pub struct Checker<'g> {
    globals: &'g HashMap<Name, Type>,
}

impl<'g> Checker<'g> {
    /// `globals` are closed definitions visible everywhere, including inside
    /// closed bodies.
    pub fn new(globals: &'g HashMap<Name, Type>) -> Self {
        Checker { globals }
    }

    pub fn infer(&self, ctx: &TypingContext, t: &Rc<Term>) -> TResult<(Rc<Term>, Type)> {
        self.synth(&mut ctx.clone(), t)
    }

    pub fn check(&self, ctx: &TypingContext, t: &Rc<Term>, a: &Type) -> TResult<Rc<Term>> {
        wf_closed(a)?;
        self.chk(&mut ctx.clone(), t, a)
    }

    fn var(&self, ctx: &TypingContext, x: &Name) -> TResult<Type> {
        ctx.lookup(x)
            .or_else(|| self.globals.get(x))
            .cloned()
            .ok_or_else(|| TypeError::UnboundVariable(x.clone()))
    }

    fn under(
        &self,
        ctx: &mut TypingContext,
        x: &Name,
        a: Type,
        f: impl FnOnce(&Self, &mut TypingContext) -> TResult<(Rc<Term>, Type)>,
    ) -> TResult<(Rc<Term>, Type)> {
        ctx.push(x.clone(), a);
        let r = f(self, ctx);
        ctx.pop();
        r
    }

    /// Type the substitution of a `prev`/`box`/`boxp` and build the context
    /// of its body.
    fn closing(
        &self,
        ctx: &mut TypingContext,
        sub: &ExplicitSubst,
        body: &Term,
    ) -> TResult<(ExplicitSubst, TypingContext)> {
        let mut out = Vec::with_capacity(sub.len());
        let mut inner = TypingContext::new();
        for (x, u) in sub.iter() {
            let (u2, a) = self.synth(ctx, u)?;
            if !is_constant(&a) {
                return Err(TypeError::NonConstantSubstType {
                    var: x.clone(),
                    ty: a,
                });
            }
            out.push((x.clone(), u2));
            inner.push(x.clone(), a);
        }
        for v in free_vars(body) {
            if !inner.contains(&v) && !self.globals.contains_key(&v) {
                return Err(TypeError::EscapingVariable { var: v });
            }
        }
        Ok((ExplicitSubst(out), inner))
    }

    fn synth(&self, ctx: &mut TypingContext, t: &Rc<Term>) -> TResult<(Rc<Term>, Type)> {
        match &**t {
            Term::Var(x) => Ok((t.clone(), self.var(ctx, x)?)),
            Term::Zero => Ok((t.clone(), Type::Nat)),
            Term::Unit => Ok((t.clone(), Type::Unit)),
            Term::Succ(a) => {
                let a2 = self.chk(ctx, a, &Type::Nat)?;
                Ok((Rc::new(Term::Succ(a2)), Type::Nat))
            }
            Term::Pair(a, b) => {
                let (a2, ta) = self.synth(ctx, a)?;
                let (b2, tb) = self.synth(ctx, b)?;
                Ok((Term::pair(a2, b2), Type::prod(ta, tb)))
            }
            Term::Proj(side, a) => {
                let (a2, ta) = self.synth(ctx, a)?;
                let Type::Prod(l, r) = &ta else {
                    return Err(mismatch(a, "a product type", &ta));
                };
                let c = match side {
                    Side::Left => (**l).clone(),
                    Side::Right => (**r).clone(),
                };
                Ok((Rc::new(Term::Proj(*side, a2)), c))
            }
            Term::Abort(Some(ann), a) => {
                wf_closed(ann)?;
                let a2 = self.chk(ctx, a, &Type::Void)?;
                Ok((Rc::new(Term::Abort(Some(ann.clone()), a2)), ann.clone()))
            }
            Term::Inj(_, Some(ann), _) | Term::Fold(Some(ann), _) => {
                wf_closed(ann)?;
                let t2 = self.chk(ctx, t, ann)?;
                Ok((t2, ann.clone()))
            }
            Term::Abort(None, _) | Term::Inj(_, None, _) | Term::Fold(None, _) => {
                Err(cannot_synth(t))
            }
            Term::Lam(x, Some(ann), body) => {
                wf_closed(ann)?;
                let (b2, tb) = self.under(ctx, x, ann.clone(), |c, ctx| c.synth(ctx, body))?;
                Ok((
                    Rc::new(Term::Lam(x.clone(), Some(ann.clone()), b2)),
                    Type::arrow(ann.clone(), tb),
                ))
            }
            Term::Lam(_, None, _) => Err(cannot_synth(t)),
            Term::Case(s, x, l, y, r) => {
                let (s2, ts) = self.synth(ctx, s)?;
                let Type::Sum(a, b) = &ts else {
                    return Err(mismatch(s, "a sum type", &ts));
                };
                let (a, b) = ((**a).clone(), (**b).clone());
                let (l2, r2, c) = match self.under(ctx, x, a.clone(), |c, ctx| c.synth(ctx, l)) {
                    Ok((l2, c)) => {
                        ctx.push(y.clone(), b);
                        let r2 = self.chk(ctx, r, &c);
                        ctx.pop();
                        (l2, r2?, c)
                    }
                    Err(TypeError::CannotSynthesize { .. }) => {
                        let (r2, c) = self.under(ctx, y, b, |c, ctx| c.synth(ctx, r))?;
                        ctx.push(x.clone(), a);
                        let l2 = self.chk(ctx, l, &c);
                        ctx.pop();
                        (l2?, r2, c)
                    }
                    Err(e) => return Err(e),
                };
                Ok((Rc::new(Term::Case(s2, x.clone(), l2, y.clone(), r2)), c))
            }
            Term::App(f, a) => {
                let (f2, tf) = self.synth(ctx, f)?;
                let Type::Arrow(dom, cod) = &tf else {
                    return Err(mismatch(f, "a function type", &tf));
                };
                let a2 = self.chk(ctx, a, dom)?;
                Ok((Term::app(f2, a2), (**cod).clone()))
            }
            Term::Unfold(a) => {
                let (a2, ta) = self.synth(ctx, a)?;
                let Some(unfolded) = ta.unfold_mu() else {
                    return Err(mismatch(a, "a recursive type", &ta));
                };
                Ok((Term::unfold(a2), unfolded))
            }
            Term::Next(a) => {
                let (a2, ta) = self.synth(ctx, a)?;
                Ok((Term::next(a2), Type::later(ta)))
            }
            Term::LaterApp(f, a) => {
                let (f2, tf) = self.synth(ctx, f)?;
                let (dom, cod) = later_arrow(f, &tf)?;
                let a2 = self.chk(ctx, a, &Type::later(dom))?;
                Ok((Term::later_app(f2, a2), Type::later(cod)))
            }
            Term::Prev(sub, body) => {
                let (sub2, mut inner) = self.closing(ctx, sub, body)?;
                let (b2, tb) = self.synth(&mut inner, body)?;
                let Type::Later(a) = &tb else {
                    return Err(mismatch(body, "a later type", &tb));
                };
                Ok((Rc::new(Term::Prev(sub2, b2)), (**a).clone()))
            }
            Term::BoxI(sub, body) => {
                let (sub2, mut inner) = self.closing(ctx, sub, body)?;
                let (b2, tb) = self.synth(&mut inner, body)?;
                Ok((Rc::new(Term::BoxI(sub2, b2)), Type::boxed(tb)))
            }
            Term::BoxSum(sub, body) => {
                let (sub2, mut inner) = self.closing(ctx, sub, body)?;
                let (b2, tb) = self.synth(&mut inner, body)?;
                let Type::Sum(l, r) = &tb else {
                    return Err(mismatch(body, "a sum type", &tb));
                };
                let ty = Type::sum(Type::boxed((**l).clone()), Type::boxed((**r).clone()));
                Ok((Rc::new(Term::BoxSum(sub2, b2)), ty))
            }
            Term::Unbox(a) => {
                let (a2, ta) = self.synth(ctx, a)?;
                let Type::Box(inner) = &ta else {
                    return Err(mismatch(a, "a boxed type", &ta));
                };
                Ok((Term::unbox(a2), (**inner).clone()))
            }
            Term::Prim(op, args) => Ok((self.prim(ctx, *op, args)?, Type::Nat)),
            Term::Ascribe(a, ty) => {
                wf_closed(ty)?;
                Ok((self.chk(ctx, a, ty)?, ty.clone()))
            }
        }
    }

    fn prim(&self, ctx: &mut TypingContext, op: PrimOp, args: &[Rc<Term>]) -> TResult<Rc<Term>> {
        if args.len() != op.arity() {
            return Err(TypeError::PrimArity {
                op: op.name(),
                expected: op.arity(),
                found: args.len(),
            });
        }
        let args2 = args
            .iter()
            .map(|a| self.chk(ctx, a, &Type::Nat))
            .collect::<TResult<Vec<_>>>()?;
        Ok(Term::prim(op, args2))
    }

    fn chk(&self, ctx: &mut TypingContext, t: &Rc<Term>, expected: &Type) -> TResult<Rc<Term>> {
        match (&**t, expected) {
            (Term::Lam(x, ann, body), Type::Arrow(dom, cod)) => {
                if let Some(ann) = ann {
                    wf_closed(ann)?;
                    if !type_alpha_eq(ann, dom) {
                        return Err(mismatch_ty(t, expected, &Type::arrow(ann.clone(), (**cod).clone())));
                    }
                }
                ctx.push(x.clone(), (**dom).clone());
                let b2 = self.chk(ctx, body, cod);
                ctx.pop();
                Ok(Rc::new(Term::Lam(x.clone(), Some((**dom).clone()), b2?)))
            }
            (Term::Lam(..), _) => Err(shape(t, format!("`{}`", pretty_type(expected)), "a function")),
            (Term::Pair(a, b), Type::Prod(ta, tb)) => {
                let a2 = self.chk(ctx, a, ta)?;
                let b2 = self.chk(ctx, b, tb)?;
                Ok(Term::pair(a2, b2))
            }
            (Term::Inj(side, ann, a), _) => {
                if let Some(ann) = ann {
                    wf_closed(ann)?;
                    if !type_alpha_eq(ann, expected) {
                        return Err(mismatch_ty(t, expected, ann));
                    }
                }
                let Type::Sum(l, r) = expected else {
                    return Err(shape(t, format!("`{}`", pretty_type(expected)), "an injection"));
                };
                let component = match side {
                    Side::Left => l,
                    Side::Right => r,
                };
                let a2 = self.chk(ctx, a, component)?;
                Ok(Rc::new(Term::Inj(*side, Some(expected.clone()), a2)))
            }
            (Term::Fold(ann, a), _) => {
                if let Some(ann) = ann {
                    wf_closed(ann)?;
                    if !type_alpha_eq(ann, expected) {
                        return Err(mismatch_ty(t, expected, ann));
                    }
                }
                let Some(unfolded) = expected.unfold_mu() else {
                    return Err(shape(t, format!("`{}`", pretty_type(expected)), "a fold"));
                };
                let a2 = self.chk(ctx, a, &unfolded)?;
                Ok(Term::fold(Some(expected.clone()), a2))
            }
            (Term::Abort(ann, a), _) => {
                if let Some(ann) = ann {
                    wf_closed(ann)?;
                    if !type_alpha_eq(ann, expected) {
                        return Err(mismatch_ty(t, expected, ann));
                    }
                }
                let a2 = self.chk(ctx, a, &Type::Void)?;
                Ok(Rc::new(Term::Abort(Some(expected.clone()), a2)))
            }
            (Term::Succ(a), Type::Nat) => Ok(Rc::new(Term::Succ(self.chk(ctx, a, &Type::Nat)?))),
            (Term::Case(s, x, l, y, r), _) => {
                let (s2, ts) = self.synth(ctx, s)?;
                let Type::Sum(a, b) = &ts else {
                    return Err(mismatch(s, "a sum type", &ts));
                };
                ctx.push(x.clone(), (**a).clone());
                let l2 = self.chk(ctx, l, expected);
                ctx.pop();
                let l2 = l2?;
                ctx.push(y.clone(), (**b).clone());
                let r2 = self.chk(ctx, r, expected);
                ctx.pop();
                Ok(Rc::new(Term::Case(s2, x.clone(), l2, y.clone(), r2?)))
            }
            (Term::Next(a), Type::Later(inner)) => Ok(Term::next(self.chk(ctx, a, inner)?)),
            (Term::App(f, a), _) => match self.synth(ctx, f) {
                Ok((f2, tf)) => {
                    let Type::Arrow(dom, cod) = &tf else {
                        return Err(mismatch(f, "a function type", &tf));
                    };
                    let a2 = self.chk(ctx, a, dom)?;
                    if !type_alpha_eq(cod, expected) {
                        return Err(mismatch_ty(t, expected, cod));
                    }
                    Ok(Term::app(f2, a2))
                }
                Err(first @ TypeError::CannotSynthesize { .. }) => {
                    let (a2, ta) = self.synth(ctx, a).map_err(|_| first)?;
                    let f2 = self.chk(ctx, f, &Type::arrow(ta, expected.clone()))?;
                    Ok(Term::app(f2, a2))
                }
                Err(e) => Err(e),
            },
            (Term::LaterApp(f, a), Type::Later(cod_expected)) => match self.synth(ctx, f) {
                Ok((f2, tf)) => {
                    let (dom, cod) = later_arrow(f, &tf)?;
                    let a2 = self.chk(ctx, a, &Type::later(dom))?;
                    if !type_alpha_eq(&cod, cod_expected) {
                        return Err(mismatch_ty(t, expected, &Type::later(cod)));
                    }
                    Ok(Term::later_app(f2, a2))
                }
                Err(first @ TypeError::CannotSynthesize { .. }) => {
                    let (a2, ta) = self.synth(ctx, a).map_err(|_| first)?;
                    let Type::Later(dom) = &ta else {
                        return Err(mismatch(a, "a later type", &ta));
                    };
                    let want = Type::later(Type::arrow((**dom).clone(), (**cod_expected).clone()));
                    let f2 = self.chk(ctx, f, &want)?;
                    Ok(Term::later_app(f2, a2))
                }
                Err(e) => Err(e),
            },
            (Term::Prev(sub, body), _) => {
                let (sub2, mut inner) = self.closing(ctx, sub, body)?;
                let b2 = self.chk(&mut inner, body, &Type::later(expected.clone()))?;
                Ok(Rc::new(Term::Prev(sub2, b2)))
            }
            (Term::BoxI(sub, body), Type::Box(inner_ty)) => {
                let (sub2, mut inner) = self.closing(ctx, sub, body)?;
                let b2 = self.chk(&mut inner, body, inner_ty)?;
                Ok(Rc::new(Term::BoxI(sub2, b2)))
            }
            (Term::BoxSum(sub, body), Type::Sum(l, r)) => {
                let (Type::Box(bl), Type::Box(br)) = (&**l, &**r) else {
                    return Err(shape(t, format!("`{}`", pretty_type(expected)), "a boxed sum"));
                };
                let (sub2, mut inner) = self.closing(ctx, sub, body)?;
                let want = Type::sum((**bl).clone(), (**br).clone());
                let b2 = self.chk(&mut inner, body, &want)?;
                Ok(Rc::new(Term::BoxSum(sub2, b2)))
            }
            _ => {
                let (t2, found) = self.synth(ctx, t)?;
                if type_alpha_eq(&found, expected) {
                    Ok(t2)
                } else {
                    Err(mismatch_ty(t, expected, &found))
                }
            }
        }
    }
}

fn later_arrow(f: &Term, tf: &Type) -> TResult<(Type, Type)> {
    if let Type::Later(inner) = tf {
        if let Type::Arrow(dom, cod) = &**inner {
            return Ok(((**dom).clone(), (**cod).clone()));
        }
    }
    Err(mismatch(f, "a later function type `|>(A -> B)`", tf))
}
