use std::fmt;
use std::rc::Rc;

use super::{Name, Type};

/// Which half of a product or sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn index(self) -> u8 {
        match self {
            Side::Left => 1,
            Side::Right => 2,
        }
    }
}

/// Built-in function symbols on `Nat`. Both are binary and curried at the
/// surface; in the AST they only ever appear saturated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PrimOp {
    AddN,
    MulN,
}

impl PrimOp {
    pub const ALL: [PrimOp; 2] = [PrimOp::AddN, PrimOp::MulN];

    pub fn name(self) -> &'static str {
        match self {
            PrimOp::AddN => "addN",
            PrimOp::MulN => "mulN",
        }
    }

    pub fn arity(self) -> usize {
        2
    }

    pub fn from_name(name: &str) -> Option<PrimOp> {
        PrimOp::ALL.into_iter().find(|op| op.name() == name)
    }

    pub fn apply(self, args: &[u64]) -> u64 {
        match self {
            PrimOp::AddN => args.iter().fold(0u64, |a, b| a.saturating_add(*b)),
            PrimOp::MulN => args.iter().fold(1u64, |a, b| a.saturating_mul(*b)),
        }
    }
}

/// The binding list `[x1 <- t1, ..., xn <- tn]` carried by `prev`, `box`
/// and `boxp`. The variables are bound in the body, not in the terms.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExplicitSubst(pub Vec<(Name, Rc<Term>)>);

impl ExplicitSubst {
    pub fn empty() -> Self {
        ExplicitSubst(Vec::new())
    }

    /// The identity substitution `[x <- x, ...]` on the given names.
    pub fn identity<'a>(names: impl IntoIterator<Item = &'a Name>) -> Self {
        ExplicitSubst(
            names
                .into_iter()
                .map(|n| (n.clone(), Rc::new(Term::Var(n.clone()))))
                .collect(),
        )
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Name, Rc<Term>)> {
        self.0.iter()
    }

    pub fn vars(&self) -> impl Iterator<Item = &Name> {
        self.0.iter().map(|(n, _)| n)
    }
}

/// Terms of the guarded lambda-calculus, with the `boxp` (boxed sum)
/// extension and saturated primitive applications.
///
/// `Abort`, `Inj` and `Fold` carry an optional type annotation and `Lam` an
/// optional domain annotation. They are only consulted by the type checker;
/// reduction never looks at them.
#[derive(Clone, Debug, PartialEq)]
pub enum Term {
    Var(Name),
    Zero,
    Succ(Rc<Term>),
    Unit,
    Pair(Rc<Term>, Rc<Term>),
    Proj(Side, Rc<Term>),
    Abort(Option<Type>, Rc<Term>),
    Inj(Side, Option<Type>, Rc<Term>),
    /// `case t of inl x -> t1 | inr y -> t2`
    Case(Rc<Term>, Name, Rc<Term>, Name, Rc<Term>),
    Lam(Name, Option<Type>, Rc<Term>),
    App(Rc<Term>, Rc<Term>),
    Fold(Option<Type>, Rc<Term>),
    Unfold(Rc<Term>),
    Next(Rc<Term>),
    Prev(ExplicitSubst, Rc<Term>),
    /// `t <*> u`
    LaterApp(Rc<Term>, Rc<Term>),
    BoxI(ExplicitSubst, Rc<Term>),
    Unbox(Rc<Term>),
    BoxSum(ExplicitSubst, Rc<Term>),
    Prim(PrimOp, Vec<Rc<Term>>),
    Ascribe(Rc<Term>, Type),
}

impl Term {
    pub fn var(name: &str) -> Rc<Term> {
        Rc::new(Term::Var(Name::from(name)))
    }

    pub fn numeral(n: u64) -> Rc<Term> {
        let mut t = Rc::new(Term::Zero);
        for _ in 0..n {
            t = Rc::new(Term::Succ(t));
        }
        t
    }

    /// `Some(n)` iff the term is `succ^n zero`.
    pub fn as_numeral(&self) -> Option<u64> {
        let mut n = 0u64;
        let mut cur = self;
        loop {
            match cur {
                Term::Zero => return Some(n),
                Term::Succ(t) => {
                    n += 1;
                    cur = t;
                }
                _ => return None,
            }
        }
    }

    pub fn lam(x: &str, ann: Option<Type>, body: Rc<Term>) -> Rc<Term> {
        Rc::new(Term::Lam(Name::from(x), ann, body))
    }

    pub fn app(f: Rc<Term>, a: Rc<Term>) -> Rc<Term> {
        Rc::new(Term::App(f, a))
    }

    pub fn apps(f: Rc<Term>, args: impl IntoIterator<Item = Rc<Term>>) -> Rc<Term> {
        args.into_iter().fold(f, Term::app)
    }

    pub fn pair(a: Rc<Term>, b: Rc<Term>) -> Rc<Term> {
        Rc::new(Term::Pair(a, b))
    }

    pub fn fst(t: Rc<Term>) -> Rc<Term> {
        Rc::new(Term::Proj(Side::Left, t))
    }

    pub fn snd(t: Rc<Term>) -> Rc<Term> {
        Rc::new(Term::Proj(Side::Right, t))
    }

    pub fn fold(ann: Option<Type>, t: Rc<Term>) -> Rc<Term> {
        Rc::new(Term::Fold(ann, t))
    }

    pub fn unfold(t: Rc<Term>) -> Rc<Term> {
        Rc::new(Term::Unfold(t))
    }

    pub fn next(t: Rc<Term>) -> Rc<Term> {
        Rc::new(Term::Next(t))
    }

    pub fn later_app(f: Rc<Term>, a: Rc<Term>) -> Rc<Term> {
        Rc::new(Term::LaterApp(f, a))
    }

    /// `prev t` with the empty substitution.
    pub fn prev_closed(t: Rc<Term>) -> Rc<Term> {
        Rc::new(Term::Prev(ExplicitSubst::empty(), t))
    }

    /// `box t` with the empty substitution.
    pub fn box_closed(t: Rc<Term>) -> Rc<Term> {
        Rc::new(Term::BoxI(ExplicitSubst::empty(), t))
    }

    pub fn unbox(t: Rc<Term>) -> Rc<Term> {
        Rc::new(Term::Unbox(t))
    }

    pub fn prim(op: PrimOp, args: Vec<Rc<Term>>) -> Rc<Term> {
        Rc::new(Term::Prim(op, args))
    }

    /// Number of AST nodes, counting explicit-substitution entries.
    pub fn size(&self) -> usize {
        1 + self.children().map(|c| c.size()).sum::<usize>()
    }

    /// Immediate subterms, in left-to-right order, including terms inside
    /// explicit substitutions (listed before the body).
    pub fn children(&self) -> Box<dyn Iterator<Item = &Rc<Term>> + '_> {
        use std::iter::once;
        match self {
            Term::Var(_) | Term::Zero | Term::Unit => Box::new(std::iter::empty()),
            Term::Succ(t)
            | Term::Proj(_, t)
            | Term::Abort(_, t)
            | Term::Inj(_, _, t)
            | Term::Lam(_, _, t)
            | Term::Fold(_, t)
            | Term::Unfold(t)
            | Term::Next(t)
            | Term::Unbox(t)
            | Term::Ascribe(t, _) => Box::new(once(t)),
            Term::Pair(a, b) | Term::App(a, b) | Term::LaterApp(a, b) => {
                Box::new(once(a).chain(once(b)))
            }
            Term::Case(s, _, l, _, r) => Box::new(once(s).chain(once(l)).chain(once(r))),
            Term::Prev(sub, body) | Term::BoxI(sub, body) | Term::BoxSum(sub, body) => {
                Box::new(sub.iter().map(|(_, t)| t).chain(once(body)))
            }
            Term::Prim(_, args) => Box::new(args.iter()),
        }
    }
}

impl Term {
    fn for_each_child_mut(&mut self, mut f: impl FnMut(&mut Rc<Term>)) {
        match self {
            Term::Var(_) | Term::Zero | Term::Unit => {}
            Term::Succ(t)
            | Term::Proj(_, t)
            | Term::Abort(_, t)
            | Term::Inj(_, _, t)
            | Term::Lam(_, _, t)
            | Term::Fold(_, t)
            | Term::Unfold(t)
            | Term::Next(t)
            | Term::Unbox(t)
            | Term::Ascribe(t, _) => f(t),
            Term::Pair(a, b) | Term::App(a, b) | Term::LaterApp(a, b) => {
                f(a);
                f(b);
            }
            Term::Case(s, _, l, _, r) => {
                f(s);
                f(l);
                f(r);
            }
            Term::Prev(sub, body) | Term::BoxI(sub, body) | Term::BoxSum(sub, body) => {
                sub.0.iter_mut().for_each(|(_, t)| f(t));
                f(body);
            }
            Term::Prim(_, args) => args.iter_mut().for_each(f),
        }
    }
}

thread_local! {
    static HOLE: Rc<Term> = Rc::new(Term::Unit);
}

fn is_leaf(t: &Term) -> bool {
    matches!(t, Term::Var(_) | Term::Zero | Term::Unit)
}

/// Frees uniquely owned subterms with an explicit stack, so that long
/// chains such as large numerals do not exhaust the call stack.
impl Drop for Term {
    fn drop(&mut self) {
        let mut owned = false;
        self.for_each_child_mut(|c| owned |= Rc::strong_count(c) == 1 && !is_leaf(c));
        if !owned {
            return;
        }
        let _ = HOLE.try_with(|hole| {
            let mut stack: Vec<Rc<Term>> = Vec::new();
            let detach = |t: &mut Term, stack: &mut Vec<Rc<Term>>| {
                t.for_each_child_mut(|c| {
                    if Rc::strong_count(c) == 1 && !is_leaf(c) {
                        stack.push(std::mem::replace(c, hole.clone()));
                    }
                })
            };
            detach(self, &mut stack);
            while let Some(rc) = stack.pop() {
                if let Ok(mut t) = Rc::try_unwrap(rc) {
                    detach(&mut t, &mut stack);
                }
            }
        });
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::frontend::pretty_term(self))
    }
}
