use std::collections::BTreeSet;

use thiserror::Error;

use crate::syntax::{Name, Type};

/// Reasons a type fails to be well formed.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum WfError {
    #[error("type variable `{0}` is not bound")]
    UnboundTypeVar(Name),
    #[error("`{var}` is not guarded in `{ty}`")]
    UnguardedMu { var: Name, ty: Type },
    #[error("`{0}` is not closed and cannot appear under `#`")]
    OpenBox(Type),
}

/// Every free occurrence of `alpha` in `a` lies beneath a `|>`.
pub fn guarded_in(alpha: &str, a: &Type) -> bool {
    match a {
        Type::Var(v) => &**v != alpha,
        Type::Nat | Type::Unit | Type::Void => true,
        Type::Prod(l, r) | Type::Sum(l, r) | Type::Arrow(l, r) => {
            guarded_in(alpha, l) && guarded_in(alpha, r)
        }
        Type::Mu(v, body) => &**v == alpha || guarded_in(alpha, body),
        Type::Later(_) => true,
        Type::Box(b) => guarded_in(alpha, b),
    }
}

/// Every `|>` in `a` lies beneath a `#`.
pub fn is_constant(a: &Type) -> bool {
    match a {
        Type::Var(_) | Type::Nat | Type::Unit | Type::Void | Type::Box(_) => true,
        Type::Prod(l, r) | Type::Sum(l, r) | Type::Arrow(l, r) => is_constant(l) && is_constant(r),
        Type::Mu(_, body) => is_constant(body),
        Type::Later(_) => false,
    }
}

/// Type formation: `vars |- a`.
pub fn wf_type(vars: &BTreeSet<Name>, a: &Type) -> Result<(), WfError> {
    match a {
        Type::Var(v) => {
            if vars.contains(v) {
                Ok(())
            } else {
                Err(WfError::UnboundTypeVar(v.clone()))
            }
        }
        Type::Nat | Type::Unit | Type::Void => Ok(()),
        Type::Prod(l, r) | Type::Sum(l, r) | Type::Arrow(l, r) => {
            wf_type(vars, l)?;
            wf_type(vars, r)
        }
        Type::Mu(v, body) => {
            let mut inner = vars.clone();
            inner.insert(v.clone());
            wf_type(&inner, body)?;
            if guarded_in(v, body) {
                Ok(())
            } else {
                Err(WfError::UnguardedMu {
                    var: v.clone(),
                    ty: a.clone(),
                })
            }
        }
        Type::Later(b) => wf_type(vars, b),
        Type::Box(b) => {
            if !b.is_closed() {
                return Err(WfError::OpenBox((**b).clone()));
            }
            wf_type(&BTreeSet::new(), b)
        }
    }
}

/// Well-formed and closed.
pub fn wf_closed(a: &Type) -> Result<(), WfError> {
    wf_type(&BTreeSet::new(), a)
}

/// Node count, with `|>A` counting 0 in total.
pub fn unguarded_size(a: &Type) -> usize {
    match a {
        Type::Var(_) | Type::Nat | Type::Unit | Type::Void => 1,
        Type::Prod(l, r) | Type::Sum(l, r) | Type::Arrow(l, r) => {
            1 + unguarded_size(l) + unguarded_size(r)
        }
        Type::Mu(_, b) | Type::Box(b) => 1 + unguarded_size(b),
        Type::Later(_) => 0,
    }
}

pub fn box_depth(a: &Type) -> usize {
    match a {
        Type::Var(_) | Type::Nat | Type::Unit | Type::Void => 0,
        Type::Prod(l, r) | Type::Sum(l, r) | Type::Arrow(l, r) => box_depth(l).min(box_depth(r)),
        Type::Mu(_, b) | Type::Later(b) => box_depth(b),
        Type::Box(b) => box_depth(b) + 1,
    }
}
