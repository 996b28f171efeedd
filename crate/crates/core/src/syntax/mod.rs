//! Abstract syntax of terms and types.

mod subst;
mod term;
mod ty;

use std::rc::Rc;

pub use subst::{
    alpha_eq, body_free_vars, erase_annotations, free_vars, inline_globals, is_closed,
    strip_ascriptions, subst, subst_closed, Bindings,
};
pub use term::{ExplicitSubst, PrimOp, Side, Term};
pub use ty::{type_alpha_eq, Type};

/// Variable names (term and type variables). Cheap to clone.
pub type Name = Rc<str>;

/// A variant of `base` for which `taken` is false: the base with its
/// trailing digits replaced by the smallest positive counter that works.
pub fn fresh_name(base: &str, taken: impl Fn(&str) -> bool) -> Name {
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit());
    let stem = if stem.is_empty() { "v" } else { stem };
    (1u64..)
        .map(|i| format!("{stem}{i}"))
        .find(|c| !taken(c))
        .map(Name::from)
        .expect("unbounded counter")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_names_skip_taken() {
        assert_eq!(&*fresh_name("x", |n| n == "x1"), "x2");
        assert_eq!(&*fresh_name("x7", |_| false), "x1");
    }
}
