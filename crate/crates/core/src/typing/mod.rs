//! Type formation, constancy and guardedness, bidirectional checking with
//! elaboration, and the size metrics on types.

mod check;
mod types;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::rc::Rc;

use thiserror::Error;

use crate::frontend::{Pos, Program};
use crate::syntax::{inline_globals, Name, Term, Type};

pub use check::{Checker, TypeError, TypingContext};
pub use types::{box_depth, guarded_in, is_constant, unguarded_size, wf_closed, wf_type, WfError};

/// The `∇` of type formation.
pub type TypeVarSet = BTreeSet<Name>;

/// Check `t` against `a` with no globals in scope.
pub fn check(ctx: &TypingContext, t: &Rc<Term>, a: &Type) -> Result<(), TypeError> {
    Checker::new(&HashMap::new()).check(ctx, t, a).map(|_| ())
}

/// Synthesize the type of `t` with no globals in scope.
pub fn infer(ctx: &TypingContext, t: &Rc<Term>) -> Result<Type, TypeError> {
    Checker::new(&HashMap::new()).infer(ctx, t).map(|(_, a)| a)
}

/// Check `t` against `a` and return its fully annotated elaboration.
pub fn elaborate(ctx: &TypingContext, t: &Rc<Term>, a: &Type) -> Result<Rc<Term>, TypeError> {
    Checker::new(&HashMap::new()).check(ctx, t, a)
}

/// A checked definition. `term` is elaborated and linked: every reference
/// to an earlier definition has been replaced by that definition, so it is
/// closed.
#[derive(Clone, Debug)]
pub struct CheckedDef {
    pub name: Name,
    pub ty: Type,
    pub term: Rc<Term>,
}

/// A type-correct program with linked definitions. Later definitions
/// shadow earlier ones of the same name.
#[derive(Clone, Debug, Default)]
pub struct CheckedProgram {
    defs: Vec<CheckedDef>,
    index: HashMap<Name, usize>,
    types: HashMap<Name, Type>,
}

impl CheckedProgram {
    pub fn get(&self, name: &str) -> Option<&CheckedDef> {
        self.index.get(name).map(|&i| &self.defs[i])
    }

    /// All definitions in order, including shadowed ones.
    pub fn iter(&self) -> impl Iterator<Item = &CheckedDef> {
        self.defs.iter()
    }

    pub fn len(&self) -> usize {
        self.defs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }

    /// Types of the visible definitions.
    pub fn types(&self) -> &HashMap<Name, Type> {
        &self.types
    }

    fn push(&mut self, def: CheckedDef) {
        self.index.insert(def.name.clone(), self.defs.len());
        self.types.insert(def.name.clone(), def.ty.clone());
        self.defs.push(def);
    }

    /// Replace references to visible definitions by their linked terms.
    pub fn link(&self, t: &Rc<Term>) -> Rc<Term> {
        inline_globals(t, &|x| self.get(x).map(|d| d.term.clone()))
    }

    /// Check `t` against `a` with the definitions in scope; returns the
    /// elaborated, linked term.
    pub fn check_term(&self, t: &Rc<Term>, a: &Type) -> Result<Rc<Term>, TypeError> {
        let e = Checker::new(&self.types).check(&TypingContext::new(), t, a)?;
        Ok(self.link(&e))
    }

    /// Synthesize the type of `t` with the definitions in scope; returns the
    /// elaborated, linked term and its type.
    pub fn infer_term(&self, t: &Rc<Term>) -> Result<(Rc<Term>, Type), TypeError> {
        let (e, a) = Checker::new(&self.types).infer(&TypingContext::new(), t)?;
        Ok((self.link(&e), a))
    }
}

/// A typing error located at a definition.
#[derive(Clone, Debug, Error, PartialEq)]
pub struct ProgramError {
    pub name: Name,
    pub pos: Pos,
    pub error: TypeError,
}

impl fmt::Display for ProgramError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: in `{}`: {}", self.pos, self.name, self.error)
    }
}

/// Check every definition against its declared type, each in the scope of
/// the earlier ones.
pub fn check_program(p: &Program) -> Result<CheckedProgram, ProgramError> {
    check_program_with(&CheckedProgram::default(), p)
}

/// As [`check_program`], with the definitions of `base` in scope. The
/// result contains `base` followed by the definitions of `p`.
pub fn check_program_with(
    base: &CheckedProgram,
    p: &Program,
) -> Result<CheckedProgram, ProgramError> {
    let mut out = base.clone();
    for d in &p.defs {
        let located = |error: TypeError| ProgramError {
            name: d.name.clone(),
            pos: d.pos,
            error,
        };
        wf_closed(&d.ty).map_err(|e| located(e.into()))?;
        let term = out.check_term(&d.term, &d.ty).map_err(located)?;
        out.push(CheckedDef {
            name: d.name.clone(),
            ty: d.ty.clone(),
            term,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{parse_program, parse_term, parse_type};

    fn check_src(term: &str, ty: &str) -> Result<(), TypeError> {
        check(
            &TypingContext::new(),
            &parse_term(term).unwrap(),
            &parse_type(ty).unwrap(),
        )
    }

    const GSTR: &str = "mu a. Nat * |>a";

    #[test]
    fn guarded_head() {
        let t = parse_term("(\\s. fst (unfold s) : (mu a. Nat * |>a) -> Nat)").unwrap();
        let a = infer(&TypingContext::new(), &t).unwrap();
        assert_eq!(a, parse_type(&format!("({GSTR}) -> Nat")).unwrap());
    }

    #[test]
    fn zeros_checks() {
        let zeros = format!("fix[{GSTR}] (\\s. fold (0, s))");
        assert_eq!(check_src(&zeros, GSTR), Ok(()));
    }

    #[test]
    fn circular_is_rejected() {
        let err = check_src(&format!("fix[{GSTR}] (\\s. s)"), GSTR).unwrap_err();
        assert!(matches!(err, TypeError::TypeMismatch { .. }), "{err}");
    }

    #[test]
    fn nonconstant_substitution() {
        let ctx = TypingContext::new().with("x", Type::later(Type::Nat));
        let t = parse_term("prev{y <- x}. y").unwrap();
        let err = Checker::new(&HashMap::new())
            .check(&ctx, &t, &Type::Nat)
            .unwrap_err();
        assert!(matches!(err, TypeError::NonConstantSubstType { .. }));
    }

    #[test]
    fn escaping_variable() {
        let ctx = TypingContext::new().with("x", Type::Nat);
        let t = Rc::new(Term::BoxI(
            crate::syntax::ExplicitSubst::empty(),
            Term::var("x"),
        ));
        let err = Checker::new(&HashMap::new())
            .check(&ctx, &t, &Type::boxed(Type::Nat))
            .unwrap_err();
        assert!(matches!(err, TypeError::EscapingVariable { .. }));
    }

    #[test]
    fn boxsum_rule() {
        let ctx = TypingContext::new().with("c", parse_type("#(Unit + |>(mu a. Unit + |>a))").unwrap());
        let t = parse_term("boxp{c <- c}. unbox c").unwrap();
        let a = Checker::new(&HashMap::new()).infer(&ctx, &t).unwrap().1;
        assert_eq!(
            a,
            parse_type("#Unit + #(|>(mu a. Unit + |>a))").unwrap()
        );
    }

    #[test]
    fn injection_needs_annotation_to_synthesize() {
        let err = infer(&TypingContext::new(), &parse_term("inl ()").unwrap()).unwrap_err();
        assert!(matches!(err, TypeError::CannotSynthesize { .. }));
        assert_eq!(check_src("inl ()", "Unit + Nat"), Ok(()));
    }

    #[test]
    fn elaboration_synthesizes() {
        let t = parse_term("\\f. \\x. f (inl x)").unwrap();
        let a = parse_type("(Nat + Unit -> Nat) -> Nat -> Nat").unwrap();
        let e = elaborate(&TypingContext::new(), &t, &a).unwrap();
        assert_eq!(infer(&TypingContext::new(), &e), Ok(a));
    }

    #[test]
    fn programs_report_the_failing_definition() {
        let p = parse_program("def a : Nat = 0; def b : Unit = a;").unwrap();
        let err = check_program(&p).unwrap_err();
        assert_eq!(&*err.name, "b");
        assert_eq!(err.error.code(), "E-MISMATCH");
        assert!(err.to_string().starts_with("1:18: in `b`"), "{err}");
    }

    #[test]
    fn empty_program() {
        assert!(check_program(&Program::default()).unwrap().is_empty());
    }

    #[test]
    fn globals_are_visible_in_closed_bodies() {
        let p = parse_program("def one : Nat = 1; def b : #Nat = box one;").unwrap();
        let c = check_program(&p).unwrap();
        assert!(crate::syntax::is_closed(&c.get("b").unwrap().term));
    }
}
