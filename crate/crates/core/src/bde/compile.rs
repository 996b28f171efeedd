use std::collections::HashMap;
use std::rc::Rc;

use crate::frontend::fix_term;
use crate::prelude::checked_prelude;
use crate::syntax::{ExplicitSubst, Name, PrimOp, Term, Type};
use crate::typing::{elaborate, TypingContext};

use super::syntax::{BdeDef, BdeVar, HeadTerm, TailTerm};
use super::{resolve, validate_bde, BdeError, Target};

/// A compiled equation. The `guarded` and `lifted` terms are closed and
/// elaborated; the `_source` terms show the same programs with references
/// to the prelude and to earlier equations by name.
#[derive(Clone, Debug)]
pub struct CompiledBde {
    pub name: Name,
    pub arity: usize,
    pub guarded: Rc<Term>,
    pub guarded_ty: Type,
    pub lifted: Rc<Term>,
    pub lifted_ty: Type,
    pub guarded_source: Rc<Term>,
    pub lifted_source: Rc<Term>,
}

/// How global names are rendered in a generated term.
trait Globals {
    fn prelude(&self, name: &str) -> Rc<Term>;
    fn equation(&self, name: &str) -> Rc<Term>;
}

/// Globals by name.
struct Named;

impl Globals for Named {
    fn prelude(&self, name: &str) -> Rc<Term> {
        Term::var(name)
    }

    fn equation(&self, name: &str) -> Rc<Term> {
        Term::var(name)
    }
}

/// Globals replaced by their closed definitions.
struct Linked<'a> {
    compiled: &'a HashMap<Name, Rc<Term>>,
}

impl Globals for Linked<'_> {
    fn prelude(&self, name: &str) -> Rc<Term> {
        checked_prelude()
            .get(name)
            .unwrap_or_else(|| panic!("the prelude defines `{name}`"))
            .term
            .clone()
    }

    fn equation(&self, name: &str) -> Rc<Term> {
        self.compiled[name].clone()
    }
}

fn y(i: usize) -> Rc<Term> {
    Term::var(&format!("y{i}"))
}

fn guarded_type(arity: usize) -> Type {
    Type::arrows(vec![Type::guarded_stream(); arity], Type::guarded_stream())
}

fn lifted_type(arity: usize) -> Type {
    Type::arrows(vec![Type::stream(); arity], Type::stream())
}

struct Builder<'a, G> {
    def: &'a BdeDef,
    globals: &'a G,
}

impl<G: Globals> Builder<'_, G> {
    fn call(&self, f: &str, args: Vec<Rc<Term>>) -> Rc<Term> {
        Term::apps(self.globals.prelude(f), args)
    }

    fn head_of(&self, i: usize) -> Rc<Term> {
        self.call("head", vec![y(i)])
    }

    fn head(&self, t: &HeadTerm) -> Rc<Term> {
        match t {
            HeadTerm::Num(n) => Term::numeral(*n),
            HeadTerm::Ident(x, _) => match BdeVar::parse(x) {
                Some(BdeVar::X(i)) => self.head_of(i),
                _ => unreachable!("validated head mentions `{x}`"),
            },
            HeadTerm::Add(a, b) => Term::prim(PrimOp::AddN, vec![self.head(a), self.head(b)]),
            HeadTerm::Mul(a, b) => Term::prim(PrimOp::MulN, vec![self.head(a), self.head(b)]),
        }
    }

    /// A stream expression of the tail as a term of type `|>GStr`.
    fn tail(&self, t: &TailTerm) -> Rc<Term> {
        match t {
            TailTerm::Ident(x, _) => match resolve(self.def, x) {
                Target::Var(BdeVar::X(i)) => Term::next(self.call(
                    "cons",
                    vec![self.head_of(i), Term::next(self.globals.prelude("zeros"))],
                )),
                Target::Var(BdeVar::Y(i)) => Term::next(y(i)),
                Target::Var(BdeVar::Z(i)) => self.call("tail", vec![y(i)]),
                target => self.apply(target, &[]),
            },
            TailTerm::Call(g, args, _) => self.apply(resolve(self.def, g), args),
            TailTerm::Infix(op, a, b, _) => {
                let args = [(**a).clone(), (**b).clone()];
                self.apply(resolve(self.def, op.target()), &args)
            }
        }
    }

    fn apply(&self, target: Target, args: &[TailTerm]) -> Rc<Term> {
        let f = match target {
            Target::Recursive => Term::var(&self.def.name),
            Target::Earlier(e) => Term::next(self.globals.equation(&e)),
            Target::Var(_) => unreachable!("variables are not applied"),
        };
        args.iter().fold(f, |f, a| Term::later_app(f, self.tail(a)))
    }

    /// `fix[GStr^k -> GStr] (\f. \y1 .. yk. cons h t)`.
    fn guarded(&self) -> Rc<Term> {
        let d = self.def;
        let mut body = self.call("cons", vec![self.head(&d.head), self.tail(&d.tail)]);
        for i in (1..=d.arity).rev() {
            body = Term::lam(&format!("y{i}"), None, body);
        }
        let phi = Term::lam(&d.name, None, body);
        Term::app(fix_term(&guarded_type(d.arity)), phi)
    }

    /// The guarded function lifted to coinductive streams.
    fn lifted(&self) -> Rc<Term> {
        let d = self.def;
        let f = self.globals.equation(&d.name);
        let boxed = Rc::new(Term::BoxI(ExplicitSubst::empty(), f.clone()));
        match d.arity {
            0 => boxed,
            1 => self.call("lift", vec![boxed]),
            2 => self.call("lift2", vec![boxed]),
            k => {
                let names: Vec<Name> = (1..=k).map(|i| Name::from(format!("y{i}"))).collect();
                let body = Term::apps(f, (1..=k).map(|i| Term::unbox(y(i))));
                let boxed = Rc::new(Term::BoxI(ExplicitSubst::identity(&names), body));
                names
                    .iter()
                    .rev()
                    .fold(boxed, |b, x| Term::lam(x, None, b))
            }
        }
    }
}

fn check(name: &Name, t: &Rc<Term>, ty: &Type) -> Result<Rc<Term>, BdeError> {
    elaborate(&TypingContext::new(), t, ty).map_err(|error| BdeError::Type {
        name: name.clone(),
        error,
    })
}

/// Compile every equation of a file, in order.
pub fn compile_all(defs: &[BdeDef]) -> Result<Vec<CompiledBde>, BdeError> {
    validate_bde(defs)?;
    let mut compiled: HashMap<Name, Rc<Term>> = HashMap::new();
    let mut out = Vec::with_capacity(defs.len());
    for d in defs {
        let guarded_ty = guarded_type(d.arity);
        let lifted_ty = lifted_type(d.arity);
        let named = Builder { def: d, globals: &Named };
        let guarded = {
            let linked = Builder {
                def: d,
                globals: &Linked { compiled: &compiled },
            };
            check(&d.name, &linked.guarded(), &guarded_ty)?
        };
        compiled.insert(d.name.clone(), guarded.clone());
        let lifted = {
            let linked = Builder {
                def: d,
                globals: &Linked { compiled: &compiled },
            };
            check(&d.name, &linked.lifted(), &lifted_ty)?
        };
        out.push(CompiledBde {
            name: d.name.clone(),
            arity: d.arity,
            guarded,
            guarded_ty,
            lifted,
            lifted_ty,
            guarded_source: named.guarded(),
            lifted_source: named.lifted(),
        });
    }
    Ok(out)
}

/// Compile the equation `name` together with the earlier ones it may use.
pub fn compile_bde(defs: &[BdeDef], name: &str) -> Result<CompiledBde, BdeError> {
    validate_bde(defs)?;
    let end = defs
        .iter()
        .position(|d| &*d.name == name)
        .ok_or_else(|| BdeError::Undefined(Name::from(name)))?;
    let mut all = compile_all(&defs[..=end])?;
    Ok(all.pop().expect("at least one equation"))
}
