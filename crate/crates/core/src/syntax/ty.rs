use std::collections::BTreeSet;
use std::fmt;
use std::rc::Rc;

use super::Name;

/// Types of the guarded lambda-calculus.
///
/// Recursive types are iso-recursive: `Mu` is only ever related to its
/// unfolding through explicit `fold`/`unfold`. Structural equality
/// (`PartialEq`) is sensitive to binder names; use [`type_alpha_eq`] when
/// comparing types.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Type {
    Var(Name),
    Nat,
    Unit,
    Void,
    Prod(Rc<Type>, Rc<Type>),
    Sum(Rc<Type>, Rc<Type>),
    Arrow(Rc<Type>, Rc<Type>),
    Mu(Name, Rc<Type>),
    Later(Rc<Type>),
    Box(Rc<Type>),
}

impl Type {
    pub fn var(name: &str) -> Type {
        Type::Var(Name::from(name))
    }

    pub fn prod(a: Type, b: Type) -> Type {
        Type::Prod(Rc::new(a), Rc::new(b))
    }

    pub fn sum(a: Type, b: Type) -> Type {
        Type::Sum(Rc::new(a), Rc::new(b))
    }

    pub fn arrow(a: Type, b: Type) -> Type {
        Type::Arrow(Rc::new(a), Rc::new(b))
    }

    pub fn mu(binder: &str, body: Type) -> Type {
        Type::Mu(Name::from(binder), Rc::new(body))
    }

    pub fn later(a: Type) -> Type {
        Type::Later(Rc::new(a))
    }

    pub fn boxed(a: Type) -> Type {
        Type::Box(Rc::new(a))
    }

    /// Curried arrow `args[0] -> ... -> args[n-1] -> result`.
    pub fn arrows(args: impl IntoIterator<Item = Type>, result: Type) -> Type {
        let args: Vec<Type> = args.into_iter().collect();
        args.into_iter()
            .rev()
            .fold(result, |acc, arg| Type::arrow(arg, acc))
    }

    /// `mu a. Nat * |>a`, guarded streams of naturals.
    pub fn guarded_stream() -> Type {
        Type::mu("a", Type::prod(Type::Nat, Type::later(Type::var("a"))))
    }

    /// `#(mu a. Nat * |>a)`, coinductive streams of naturals.
    pub fn stream() -> Type {
        Type::boxed(Type::guarded_stream())
    }

    /// `mu a. Unit + |>a`, guarded conatural numbers.
    pub fn guarded_conat() -> Type {
        Type::mu("a", Type::sum(Type::Unit, Type::later(Type::var("a"))))
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            Type::Var(v) => {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
            Type::Nat | Type::Unit | Type::Void => {}
            Type::Prod(a, b) | Type::Sum(a, b) | Type::Arrow(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Type::Mu(v, body) => {
                bound.push(v.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
            Type::Later(a) | Type::Box(a) => a.collect_free(bound, out),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Capture-avoiding substitution `self[replacement/var]`.
    pub fn subst(&self, var: &str, replacement: &Type) -> Type {
        let fv = replacement.free_vars();
        self.subst_inner(var, replacement, &fv)
    }

    fn subst_inner(&self, var: &str, replacement: &Type, fv: &BTreeSet<Name>) -> Type {
        match self {
            Type::Var(v) if &**v == var => replacement.clone(),
            Type::Var(_) | Type::Nat | Type::Unit | Type::Void => self.clone(),
            Type::Prod(a, b) => Type::prod(
                a.subst_inner(var, replacement, fv),
                b.subst_inner(var, replacement, fv),
            ),
            Type::Sum(a, b) => Type::sum(
                a.subst_inner(var, replacement, fv),
                b.subst_inner(var, replacement, fv),
            ),
            Type::Arrow(a, b) => Type::arrow(
                a.subst_inner(var, replacement, fv),
                b.subst_inner(var, replacement, fv),
            ),
            Type::Mu(v, body) => {
                if &**v == var {
                    return self.clone();
                }
                if fv.contains(v) {
                    let mut avoid = body.free_vars();
                    avoid.extend(fv.iter().cloned());
                    avoid.insert(Name::from(var));
                    let fresh = super::fresh_name(v, |n| avoid.contains(n));
                    let renamed = body.subst(v, &Type::Var(fresh.clone()));
                    Type::Mu(fresh, Rc::new(renamed.subst_inner(var, replacement, fv)))
                } else {
                    Type::Mu(v.clone(), Rc::new(body.subst_inner(var, replacement, fv)))
                }
            }
            Type::Later(a) => Type::later(a.subst_inner(var, replacement, fv)),
            Type::Box(a) => Type::boxed(a.subst_inner(var, replacement, fv)),
        }
    }

    /// One-step unfolding `A[mu a.A / a]` of a recursive type.
    pub fn unfold_mu(&self) -> Option<Type> {
        match self {
            Type::Mu(v, body) => Some(body.subst(v, self)),
            _ => None,
        }
    }
}

/// Equality of types up to renaming of `mu`-bound variables.
pub fn type_alpha_eq(a: &Type, b: &Type) -> bool {
    fn go<'a>(a: &'a Type, b: &'a Type, env: &mut Vec<(&'a Name, &'a Name)>) -> bool {
        match (a, b) {
            (Type::Var(x), Type::Var(y)) => {
                for (l, r) in env.iter().rev() {
                    if *l == x || *r == y {
                        return *l == x && *r == y;
                    }
                }
                x == y
            }
            (Type::Nat, Type::Nat) | (Type::Unit, Type::Unit) | (Type::Void, Type::Void) => true,
            (Type::Prod(a1, a2), Type::Prod(b1, b2))
            | (Type::Sum(a1, a2), Type::Sum(b1, b2))
            | (Type::Arrow(a1, a2), Type::Arrow(b1, b2)) => go(a1, b1, env) && go(a2, b2, env),
            (Type::Mu(x, a), Type::Mu(y, b)) => {
                env.push((x, y));
                let r = go(a, b, env);
                env.pop();
                r
            }
            (Type::Later(a), Type::Later(b)) | (Type::Box(a), Type::Box(b)) => go(a, b, env),
            _ => false,
        }
    }
    std::ptr::eq(a, b) || go(a, b, &mut Vec::new())
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::frontend::pretty_type(self))
    }
}
