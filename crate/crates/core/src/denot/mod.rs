//! Denotations in the topos of trees, computed at a finite index.
//!
//! Values of `μ`-types are represented by the value of their unfolding, and
//! values of constant types do not change under restriction. Restriction
//! depends only on the shape of a value, so environments hold values at
//! the index they were built and are restricted on lookup.

use std::cell::{Cell, RefCell};
use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use thiserror::Error;

use crate::syntax::{Name, Side, Term, Type};

/// Recursion bound of the evaluator.
pub const DEFAULT_DEPTH: usize = 10_000;

/// Index of a stage of the topos of trees, at least 1.
pub type Index = u32;

type FunBody = dyn Fn(Index, SemVal) -> Result<SemVal, DenotError>;
type GlobalBody = dyn Fn(Index) -> Result<SemVal, DenotError>;

/// An element of the denotation of a type at some index.
#[derive(Clone)]
pub enum SemVal {
    Nat(u64),
    Unit,
    Pair(Rc<SemVal>, Rc<SemVal>),
    In(Side, Rc<SemVal>),
    Fun(SemFun),
    /// The single element of a later type at stage 1.
    LaterStar,
    /// An element of a later type at stage `i + 1`, given at stage `i`.
    Later(Rc<SemVal>),
    /// A global element: a family of values, one per index.
    Global(SemGlobal),
}

/// A function value usable at every index up to `ceiling`.
#[derive(Clone)]
pub struct SemFun {
    pub ceiling: Index,
    body: Rc<FunBody>,
}

impl SemFun {
    pub fn new(ceiling: Index, body: impl Fn(Index, SemVal) -> Result<SemVal, DenotError> + 'static) -> Self {
        SemFun {
            ceiling,
            body: Rc::new(body),
        }
    }

    pub fn apply(&self, j: Index, arg: SemVal) -> Result<SemVal, DenotError> {
        (self.body)(j, arg)
    }
}

/// A memoized family of values indexed by stage.
#[derive(Clone)]
pub struct SemGlobal {
    body: Rc<GlobalBody>,
    memo: Rc<RefCell<HashMap<Index, SemVal>>>,
}

impl SemGlobal {
    pub fn new(body: impl Fn(Index) -> Result<SemVal, DenotError> + 'static) -> Self {
        SemGlobal {
            body: Rc::new(body),
            memo: Rc::default(),
        }
    }

    /// The component at stage `j`.
    pub fn at(&self, j: Index) -> Result<SemVal, DenotError> {
        if let Some(v) = self.memo.borrow().get(&j) {
            return Ok(v.clone());
        }
        let v = (self.body)(j)?;
        self.memo.borrow_mut().insert(j, v.clone());
        Ok(v)
    }
}

impl SemVal {
    pub fn pair(a: SemVal, b: SemVal) -> SemVal {
        SemVal::Pair(Rc::new(a), Rc::new(b))
    }

    pub fn later(v: SemVal) -> SemVal {
        SemVal::Later(Rc::new(v))
    }

    fn kind(&self) -> &'static str {
        match self {
            SemVal::Nat(_) => "a number",
            SemVal::Unit => "unit",
            SemVal::Pair(..) => "a pair",
            SemVal::In(..) => "an injection",
            SemVal::Fun(_) => "a function",
            SemVal::LaterStar | SemVal::Later(_) => "a later value",
            SemVal::Global(_) => "a global element",
        }
    }

    /// Restriction to stage `j`. Values already at stage `j` or below are
    /// returned unchanged.
    pub fn at(&self, j: Index) -> SemVal {
        match self {
            SemVal::Nat(_) | SemVal::Unit | SemVal::LaterStar | SemVal::Global(_) => self.clone(),
            SemVal::Pair(a, b) => SemVal::pair(a.at(j), b.at(j)),
            SemVal::In(side, v) => SemVal::In(*side, Rc::new(v.at(j))),
            SemVal::Fun(f) => SemVal::Fun(SemFun {
                ceiling: f.ceiling.min(j),
                body: f.body.clone(),
            }),
            SemVal::Later(_) if j <= 1 => SemVal::LaterStar,
            SemVal::Later(v) => SemVal::later(v.at(j - 1)),
        }
    }
}

impl PartialEq for SemVal {
    /// Structural on data; functions and global elements compare by identity.
    fn eq(&self, other: &SemVal) -> bool {
        match (self, other) {
            (SemVal::Nat(a), SemVal::Nat(b)) => a == b,
            (SemVal::Unit, SemVal::Unit) | (SemVal::LaterStar, SemVal::LaterStar) => true,
            (SemVal::Pair(a, b), SemVal::Pair(c, d)) => a == c && b == d,
            (SemVal::In(s, a), SemVal::In(t, b)) => s == t && a == b,
            (SemVal::Later(a), SemVal::Later(b)) => a == b,
            (SemVal::Fun(f), SemVal::Fun(g)) => Rc::ptr_eq(&f.body, &g.body),
            (SemVal::Global(f), SemVal::Global(g)) => Rc::ptr_eq(&f.body, &g.body),
            _ => false,
        }
    }
}

impl fmt::Display for SemVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemVal::Nat(n) => write!(f, "{n}"),
            SemVal::Unit => write!(f, "()"),
            SemVal::Pair(a, b) => write!(f, "({a}, {b})"),
            SemVal::In(Side::Left, v) => write!(f, "inl {v}"),
            SemVal::In(Side::Right, v) => write!(f, "inr {v}"),
            SemVal::Fun(g) => write!(f, "<fun@{}>", g.ceiling),
            SemVal::LaterStar => write!(f, "*"),
            SemVal::Later(v) => write!(f, "next {v}"),
            SemVal::Global(_) => write!(f, "<global>"),
        }
    }
}

impl fmt::Debug for SemVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum DenotError {
    #[error("index must be at least 1")]
    IndexZero,
    #[error("recursion depth exceeded {limit}")]
    DepthExceeded { limit: usize },
    #[error("unbound variable `{0}`")]
    Unbound(Name),
    #[error("expected {expected}, got {found}")]
    Shape { expected: &'static str, found: String },
    #[error("the empty type has no elements")]
    Void,
}

impl DenotError {
    pub fn code(&self) -> &'static str {
        match self {
            DenotError::IndexZero => "E-INDEX",
            DenotError::DepthExceeded { .. } => "E-DEPTH",
            DenotError::Unbound(_) => "E-UNBOUND",
            DenotError::Shape { .. } => "E-SHAPE",
            DenotError::Void => "E-VOID",
        }
    }
}

fn shape(expected: &'static str, found: &SemVal) -> DenotError {
    DenotError::Shape {
        expected,
        found: found.kind().to_string(),
    }
}

/// A persistent environment mapping variables to values.
#[derive(Clone, Default)]
pub struct SemEnv(Option<Rc<EnvNode>>);

struct EnvNode {
    name: Name,
    value: SemVal,
    rest: SemEnv,
}

impl SemEnv {
    pub fn new() -> Self {
        SemEnv(None)
    }

    pub fn with(&self, name: Name, value: SemVal) -> SemEnv {
        SemEnv(Some(Rc::new(EnvNode {
            name,
            value,
            rest: self.clone(),
        })))
    }

    pub fn lookup(&self, name: &str) -> Option<&SemVal> {
        let mut cur = self;
        while let Some(node) = &cur.0 {
            if &*node.name == name {
                return Some(&node.value);
            }
            cur = &node.rest;
        }
        None
    }
}

impl FromIterator<(Name, SemVal)> for SemEnv {
    fn from_iter<I: IntoIterator<Item = (Name, SemVal)>>(iter: I) -> Self {
        iter.into_iter().fold(SemEnv::new(), |env, (x, v)| env.with(x, v))
    }
}

thread_local! {
    static DEPTH: Cell<usize> = const { Cell::new(0) };
    static LIMIT: Cell<usize> = const { Cell::new(DEFAULT_DEPTH) };
}

struct DepthGuard;

impl DepthGuard {
    fn enter() -> Result<DepthGuard, DenotError> {
        let limit = LIMIT.with(Cell::get);
        DEPTH.with(|d| {
            if d.get() >= limit {
                Err(DenotError::DepthExceeded { limit })
            } else {
                d.set(d.get() + 1);
                Ok(DepthGuard)
            }
        })
    }
}

impl Drop for DepthGuard {
    fn drop(&mut self) {
        DEPTH.with(|d| d.set(d.get() - 1));
    }
}

/// Run `f` with the recursion bound set to `limit`.
pub fn with_depth_limit<R>(limit: usize, f: impl FnOnce() -> R) -> R {
    let old = LIMIT.with(|l| l.replace(limit));
    let r = f();
    LIMIT.with(|l| l.set(old));
    r
}

/// Restrict `v`, an element of `a` at stage `i + 1`, to stage `i`.
pub fn restrict(a: &Type, i: Index, v: &SemVal) -> Result<SemVal, DenotError> {
    if i < 1 {
        return Err(DenotError::IndexZero);
    }
    let r = v.at(i);
    if inhabits(a, i, &r) {
        Ok(r)
    } else {
        Err(DenotError::Shape {
            expected: "an element of the given type",
            found: v.to_string(),
        })
    }
}

/// Whether `v` has the shape of an element of closed type `a` at stage `i`.
/// Functions and global elements are not inspected.
pub fn inhabits(a: &Type, i: Index, v: &SemVal) -> bool {
    match (a, v) {
        (Type::Nat, SemVal::Nat(_)) | (Type::Unit, SemVal::Unit) => true,
        (Type::Prod(a, b), SemVal::Pair(x, y)) => inhabits(a, i, x) && inhabits(b, i, y),
        (Type::Sum(a, _), SemVal::In(Side::Left, x)) => inhabits(a, i, x),
        (Type::Sum(_, b), SemVal::In(Side::Right, x)) => inhabits(b, i, x),
        (Type::Arrow(..), SemVal::Fun(_)) => true,
        (Type::Later(_), SemVal::LaterStar) => i == 1,
        (Type::Later(a), SemVal::Later(x)) => i > 1 && inhabits(a, i - 1, x),
        (Type::Box(_), SemVal::Global(_)) => true,
        (Type::Mu(..), _) => a.unfold_mu().is_some_and(|u| inhabits(&u, i, v)),
        _ => false,
    }
}

/// The denotation of `t` at stage `i` in `env`. `t` must be well typed.
pub fn den_term(t: &Rc<Term>, i: Index, env: &SemEnv) -> Result<SemVal, DenotError> {
    if i < 1 {
        return Err(DenotError::IndexZero);
    }
    let _guard = DepthGuard::enter()?;
    stacker::maybe_grow(64 * 1024, 1024 * 1024, || den(t, i, env))
}

fn nat(t: &Rc<Term>, i: Index, env: &SemEnv) -> Result<u64, DenotError> {
    match den_term(t, i, env)? {
        SemVal::Nat(n) => Ok(n),
        v => Err(shape("a number", &v)),
    }
}

fn apply(f: &SemVal, j: Index, arg: SemVal) -> Result<SemVal, DenotError> {
    match f {
        SemVal::Fun(f) => f.apply(j, arg),
        v => Err(shape("a function", v)),
    }
}

fn sigma_env(sub: &[(Name, Rc<Term>)], i: Index, env: &SemEnv) -> Result<SemEnv, DenotError> {
    sub.iter()
        .map(|(x, u)| Ok((x.clone(), den_term(u, i, env)?)))
        .collect()
}

fn den(t: &Rc<Term>, i: Index, env: &SemEnv) -> Result<SemVal, DenotError> {
    Ok(match &**t {
        Term::Var(x) => env
            .lookup(x)
            .ok_or_else(|| DenotError::Unbound(x.clone()))?
            .at(i),
        Term::Zero => SemVal::Nat(0),
        Term::Succ(a) => SemVal::Nat(nat(a, i, env)? + 1),
        Term::Prim(op, args) => {
            let ns = args.iter().map(|a| nat(a, i, env)).collect::<Result<Vec<_>, _>>()?;
            SemVal::Nat(op.apply(&ns))
        }
        Term::Unit => SemVal::Unit,
        Term::Pair(a, b) => SemVal::pair(den_term(a, i, env)?, den_term(b, i, env)?),
        Term::Proj(side, p) => match den_term(p, i, env)? {
            SemVal::Pair(a, b) => match side {
                Side::Left => (*a).clone(),
                Side::Right => (*b).clone(),
            },
            v => return Err(shape("a pair", &v)),
        },
        Term::Abort(..) => return Err(DenotError::Void),
        Term::Inj(side, _, a) => SemVal::In(*side, Rc::new(den_term(a, i, env)?)),
        Term::Case(s, x, l, y, r) => match den_term(s, i, env)? {
            SemVal::In(Side::Left, v) => den_term(l, i, &env.with(x.clone(), (*v).clone()))?,
            SemVal::In(Side::Right, v) => den_term(r, i, &env.with(y.clone(), (*v).clone()))?,
            v => return Err(shape("an injection", &v)),
        },
        Term::Lam(x, _, body) => {
            let (x, body, env) = (x.clone(), body.clone(), env.clone());
            SemVal::Fun(SemFun::new(i, move |j, a| {
                den_term(&body, j, &env.with(x.clone(), a))
            }))
        }
        Term::App(f, a) => {
            let f = den_term(f, i, env)?;
            apply(&f, i, den_term(a, i, env)?)?
        }
        Term::Fold(_, a) | Term::Unfold(a) | Term::Ascribe(a, _) => den_term(a, i, env)?,
        Term::Next(_) if i == 1 => SemVal::LaterStar,
        Term::Next(a) => SemVal::later(den_term(a, i - 1, env)?),
        Term::LaterApp(..) if i == 1 => SemVal::LaterStar,
        Term::LaterApp(f, a) => match (den_term(f, i, env)?, den_term(a, i, env)?) {
            (SemVal::Later(f), SemVal::Later(a)) => SemVal::later(apply(&f, i - 1, (*a).clone())?),
            (SemVal::Later(_), v) | (v, _) => return Err(shape("a later value", &v)),
        },
        Term::Prev(sub, body) => {
            let env = sigma_env(&sub.0, i, env)?;
            match den_term(body, i + 1, &env)? {
                SemVal::Later(v) => (*v).clone(),
                v => return Err(shape("a later value", &v)),
            }
        }
        Term::BoxI(sub, body) => {
            let env = sigma_env(&sub.0, i, env)?;
            let body = body.clone();
            SemVal::Global(SemGlobal::new(move |j| den_term(&body, j, &env)))
        }
        Term::Unbox(a) => match den_term(a, i, env)? {
            SemVal::Global(g) => g.at(i)?,
            v => return Err(shape("a global element", &v)),
        },
        Term::BoxSum(sub, body) => {
            let env = sigma_env(&sub.0, i, env)?;
            let side = match den_term(body, 1, &env)? {
                SemVal::In(side, _) => side,
                v => return Err(shape("an injection", &v)),
            };
            let body = body.clone();
            SemVal::In(
                side,
                Rc::new(SemVal::Global(SemGlobal::new(move |j| {
                    match den_term(&body, j, &env)? {
                        SemVal::In(s, v) if s == side => Ok((*v).clone()),
                        v => Err(shape("an injection on a fixed side", &v)),
                    }
                }))),
            )
        }
    })
}

/// The denotation of a closed term at stage `i`.
pub fn den_closed(t: &Rc<Term>, i: Index) -> Result<SemVal, DenotError> {
    den_term(t, i, &SemEnv::new())
}

/// The number denoted by a closed term of type `Nat`.
pub fn den_nat(t: &Rc<Term>, i: Index) -> Result<u64, DenotError> {
    match den_closed(t, i)? {
        SemVal::Nat(n) => Ok(n),
        v => Err(shape("a number", &v)),
    }
}

/// The elements of a stream value at stage `i`: heads of the nested pairs
/// down to the stage-1 star.
pub fn stream_prefix(v: &SemVal) -> Result<Vec<u64>, DenotError> {
    let mut out = Vec::new();
    let mut cur = v.clone();
    loop {
        let rest = match &cur {
            SemVal::Pair(h, rest) => match &**h {
                SemVal::Nat(n) => {
                    out.push(*n);
                    rest.clone()
                }
                v => return Err(shape("a number", v)),
            },
            v => return Err(shape("a stream cell", v)),
        };
        cur = match &*rest {
            SemVal::LaterStar => return Ok(out),
            SemVal::Later(v) => (**v).clone(),
            v => return Err(shape("a later value", v)),
        };
    }
}

/// The first `i` elements of a closed guarded stream, read from its
/// denotation at stage `i`. A boxed stream is unboxed first.
pub fn den_take(t: &Rc<Term>, i: Index) -> Result<Vec<u64>, DenotError> {
    let v = match den_closed(t, i)? {
        SemVal::Global(g) => g.at(i)?,
        v => v,
    };
    stream_prefix(&v)
}
