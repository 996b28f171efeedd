//! Concrete syntax: lexer, parser, pretty-printer and program files.

mod lexer;
mod macros;
mod parser;
mod pretty;

use std::fmt;
use std::rc::Rc;

use thiserror::Error;

use crate::syntax::{Name, Term, Type};

pub use lexer::{lex, Tok, Token};
pub use macros::{fix_term, recognize_fix, rec_type, theta_term};
pub use parser::{is_keyword, Scope};
pub use pretty::{pretty_term, pretty_type};

/// A 1-based source position.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("{pos}: lexical error: {message}")]
    Lexical { pos: Pos, message: String },
    #[error("{pos}: syntax error: {message}")]
    Syntax { pos: Pos, message: String },
    #[error("{pos}: arity error: {message}")]
    Arity { pos: Pos, message: String },
    #[error("{pos}: unknown identifier `{name}`")]
    UnknownIdentifier { pos: Pos, name: Name },
    #[error("{pos}: `{name}` is defined twice")]
    DuplicateDefinition { pos: Pos, name: Name },
}

impl ParseError {
    pub fn pos(&self) -> Pos {
        match self {
            ParseError::Lexical { pos, .. }
            | ParseError::Syntax { pos, .. }
            | ParseError::Arity { pos, .. }
            | ParseError::UnknownIdentifier { pos, .. }
            | ParseError::DuplicateDefinition { pos, .. } => *pos,
        }
    }

    /// Stable machine-readable error code.
    pub fn code(&self) -> &'static str {
        match self {
            ParseError::Lexical { .. } => "E-LEX",
            ParseError::Syntax { .. } => "E-SYNTAX",
            ParseError::Arity { .. } => "E-ARITY",
            ParseError::UnknownIdentifier { .. } => "E-UNKNOWN",
            ParseError::DuplicateDefinition { .. } => "E-DUPLICATE",
        }
    }
}

/// One `def name : T = t;` item.
#[derive(Clone, Debug, PartialEq)]
pub struct Definition {
    pub name: Name,
    pub ty: Type,
    pub term: Rc<Term>,
    pub pos: Pos,
}

/// A parsed program file: type aliases and definitions in source order.
/// Definitions may refer to earlier ones by name; references stay as free
/// variables until linking.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Program {
    pub aliases: Vec<(Name, Type)>,
    pub defs: Vec<Definition>,
}

impl Program {
    pub fn get(&self, name: &str) -> Option<&Definition> {
        self.defs.iter().rev().find(|d| &*d.name == name)
    }

    pub fn names(&self) -> impl Iterator<Item = &Name> {
        self.defs.iter().map(|d| &d.name)
    }

    pub fn alias(&self, name: &str) -> Option<&Type> {
        self.aliases
            .iter()
            .rev()
            .find(|(n, _)| &**n == name)
            .map(|(_, t)| t)
    }

    pub fn len(&self) -> usize {
        self.defs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }

    pub fn scope(&self) -> Scope {
        Scope::of_program(self)
    }

    /// `self` followed by `later`; later definitions shadow earlier ones.
    pub fn concat(&self, later: &Program) -> Program {
        let mut out = self.clone();
        out.aliases.extend(later.aliases.iter().cloned());
        out.defs.extend(later.defs.iter().cloned());
        out
    }
}

/// Parse a term. Unknown identifiers are accepted as free variables.
pub fn parse_term(text: &str) -> Result<Rc<Term>, ParseError> {
    parse_term_with(text, &Scope::default(), false)
}

/// Parse a term that may mention the globals and aliases of `scope`. With
/// `closed`, identifiers that are neither bound nor global are rejected.
pub fn parse_term_with(text: &str, scope: &Scope, closed: bool) -> Result<Rc<Term>, ParseError> {
    let mut p = parser::Parser::new(text, scope.clone(), closed)?;
    let t = p.term()?;
    p.expect_eof()?;
    Ok(t)
}

pub fn parse_type(text: &str) -> Result<Type, ParseError> {
    parse_type_with(text, &Scope::default())
}

pub fn parse_type_with(text: &str, scope: &Scope) -> Result<Type, ParseError> {
    let mut p = parser::Parser::new(text, scope.clone(), false)?;
    let t = p.ty()?;
    p.expect_eof()?;
    Ok(t)
}

/// Parse a program file of `def` and `type` items.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    parse_program_with(text, &Scope::default())
}

/// Parse a program file that may refer to the names in `outer`.
pub fn parse_program_with(text: &str, outer: &Scope) -> Result<Program, ParseError> {
    let mut p = parser::Parser::new(text, outer.clone(), true)?;
    p.program()
}
