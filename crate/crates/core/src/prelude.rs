//! The shipped prelude and loading of programs on top of it.

use std::rc::Rc;

use thiserror::Error;

use crate::frontend::{parse_program, parse_program_with, ParseError, Program};
use crate::typing::{check_program, check_program_with, CheckedProgram, ProgramError};

/// Source of the prelude.
pub const PRELUDE_SOURCE: &str = include_str!("../prelude.gl");

#[derive(Clone, Debug, Error, PartialEq)]
pub enum LoadError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Type(#[from] ProgramError),
}

impl LoadError {
    pub fn code(&self) -> &'static str {
        match self {
            LoadError::Parse(e) => e.code(),
            LoadError::Type(e) => e.error.code(),
        }
    }
}

/// The prelude as parsed source.
pub fn load_prelude() -> Program {
    parse_program(PRELUDE_SOURCE).expect("the prelude parses")
}

/// The prelude, checked and linked.
pub fn checked_prelude() -> Rc<CheckedProgram> {
    thread_local! {
        static PRELUDE: Rc<CheckedProgram> =
            Rc::new(check_program(&load_prelude()).expect("the prelude type-checks"));
    }
    PRELUDE.with(Rc::clone)
}

/// A program and its checked form.
#[derive(Clone, Debug)]
pub struct Loaded {
    /// The definitions of the loaded text alone.
    pub program: Program,
    /// The base definitions followed by the loaded ones.
    pub checked: CheckedProgram,
    /// Scope for parsing further input against `checked`.
    pub source: Program,
}

/// Parse and check `text` in the scope of `base`, whose definitions may be
/// shadowed but not redefined within `text` itself.
pub fn load_on(base: &Program, checked_base: &CheckedProgram, text: &str) -> Result<Loaded, LoadError> {
    let program = parse_program_with(text, &base.scope())?;
    let checked = check_program_with(checked_base, &program)?;
    Ok(Loaded {
        source: base.concat(&program),
        program,
        checked,
    })
}

/// Parse and check `text` with the prelude in scope.
pub fn load_with_prelude(text: &str) -> Result<Loaded, LoadError> {
    load_on(&load_prelude(), &checked_prelude(), text)
}

/// Parse and check `text` on its own, without the prelude.
pub fn load_standalone(text: &str) -> Result<Loaded, LoadError> {
    load_on(&Program::default(), &CheckedProgram::default(), text)
}
