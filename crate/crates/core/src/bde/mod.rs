//! Behavioural differential equations over streams of naturals: the `.bde`
//! format, validation, compilation to guarded and coinductive stream
//! functions, and a corecursive host oracle.

mod compile;
mod oracle;
mod syntax;

use std::collections::HashMap;

use thiserror::Error;

use crate::frontend::Pos;
use crate::syntax::Name;
use crate::typing::TypeError;

pub use compile::{compile_all, compile_bde, CompiledBde};
pub use oracle::{oracle_eval, oracle_stream, standard_stream, HostStream, StandardStream, STANDARD_STREAMS};
pub use syntax::{parse_bde, variable_shaped, BdeDef, BdeVar, HeadTerm, StreamOp, TailTerm};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum BdeError {
    #[error("{pos}: syntax error: {message}")]
    Syntax { pos: Pos, message: String },
    #[error("{pos}: unknown symbol `{name}`")]
    UnknownSymbol { pos: Pos, name: Name },
    #[error("{pos}: variable `{name}` is not allowed here")]
    BadVariable { pos: Pos, name: Name },
    #[error("{pos}: `{name}` is used before it is defined")]
    ForwardReference { pos: Pos, name: Name },
    #[error("{pos}: `{name}` expects {expected} arguments, got {found}")]
    Arity {
        pos: Pos,
        name: Name,
        expected: usize,
        found: usize,
    },
    #[error("{pos}: `{name}` is defined twice")]
    Duplicate { pos: Pos, name: Name },
    #[error("no equation named `{0}`")]
    Undefined(Name),
    #[error("compiled `{name}` is ill-typed: {error}")]
    Type { name: Name, error: TypeError },
}

impl BdeError {
    pub fn code(&self) -> &'static str {
        match self {
            BdeError::Syntax { .. } => "E-SYNTAX",
            BdeError::UnknownSymbol { .. } => "E-UNKNOWN",
            BdeError::BadVariable { .. } => "E-BADVAR",
            BdeError::ForwardReference { .. } => "E-FORWARD",
            BdeError::Arity { .. } => "E-ARITY",
            BdeError::Duplicate { .. } => "E-DUPLICATE",
            BdeError::Undefined(_) => "E-UNDEFINED",
            BdeError::Type { .. } => "E-TYPE",
        }
    }
}

/// What a name in a tail refers to.
#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Target {
    Var(BdeVar),
    /// The equation being defined.
    Recursive,
    /// An earlier equation.
    Earlier(Name),
}

/// Names visible while checking one equation.
struct Scope<'a> {
    def: &'a BdeDef,
    arities: &'a HashMap<Name, usize>,
    later: &'a HashMap<Name, usize>,
}

impl Scope<'_> {
    fn bad(&self, name: &Name, pos: Pos) -> BdeError {
        if variable_shaped(name) {
            BdeError::BadVariable {
                pos,
                name: name.clone(),
            }
        } else if self.later.contains_key(name) {
            BdeError::ForwardReference {
                pos,
                name: name.clone(),
            }
        } else {
            BdeError::UnknownSymbol {
                pos,
                name: name.clone(),
            }
        }
    }

    fn callee(&self, name: &Name, pos: Pos, found: usize) -> Result<Target, BdeError> {
        let (target, expected) = if *name == self.def.name {
            (Target::Recursive, self.def.arity)
        } else if let Some(&k) = self.arities.get(name) {
            (Target::Earlier(name.clone()), k)
        } else {
            return Err(self.bad(name, pos));
        };
        if expected != found {
            return Err(BdeError::Arity {
                pos,
                name: name.clone(),
                expected,
                found,
            });
        }
        Ok(target)
    }

    fn var(&self, name: &Name, pos: Pos, allowed: fn(BdeVar) -> bool) -> Result<Option<BdeVar>, BdeError> {
        match BdeVar::parse(name) {
            Some(v) if allowed(v) && v.index() <= self.def.arity => Ok(Some(v)),
            Some(_) => Err(BdeError::BadVariable {
                pos,
                name: name.clone(),
            }),
            None => Ok(None),
        }
    }

    fn head(&self, t: &HeadTerm) -> Result<(), BdeError> {
        match t {
            HeadTerm::Num(_) => Ok(()),
            HeadTerm::Ident(x, pos) => match self.var(x, *pos, |v| matches!(v, BdeVar::X(_)))? {
                Some(_) => Ok(()),
                None => Err(self.bad(x, *pos)),
            },
            HeadTerm::Add(a, b) | HeadTerm::Mul(a, b) => {
                self.head(a)?;
                self.head(b)
            }
        }
    }

    fn tail(&self, t: &TailTerm) -> Result<(), BdeError> {
        match t {
            TailTerm::Ident(x, pos) => match self.var(x, *pos, |_| true)? {
                Some(_) => Ok(()),
                None => self.callee(x, *pos, 0).map(|_| ()),
            },
            TailTerm::Call(g, args, pos) => {
                self.callee(g, *pos, args.len())?;
                args.iter().try_for_each(|a| self.tail(a))
            }
            TailTerm::Infix(op, a, b, pos) => {
                self.callee(&Name::from(op.target()), *pos, 2)?;
                self.tail(a)?;
                self.tail(b)
            }
        }
    }
}

/// Check variable scoping, arities and that every equation refers only to
/// itself and earlier ones.
pub fn validate_bde(defs: &[BdeDef]) -> Result<(), BdeError> {
    let mut later: HashMap<Name, usize> = HashMap::new();
    for d in defs.iter().rev() {
        later.insert(d.name.clone(), d.arity);
    }
    let mut arities = HashMap::new();
    for d in defs {
        if arities.contains_key(&d.name) {
            return Err(BdeError::Duplicate {
                pos: d.pos,
                name: d.name.clone(),
            });
        }
        if variable_shaped(&d.name) {
            return Err(BdeError::BadVariable {
                pos: d.pos,
                name: d.name.clone(),
            });
        }
        let scope = Scope {
            def: d,
            arities: &arities,
            later: &later,
        };
        scope.head(&d.head)?;
        scope.tail(&d.tail)?;
        arities.insert(d.name.clone(), d.arity);
    }
    Ok(())
}

/// Parse and validate a `.bde` file.
pub fn load_bde(text: &str) -> Result<Vec<BdeDef>, BdeError> {
    let defs = parse_bde(text)?;
    validate_bde(&defs)?;
    Ok(defs)
}

/// The referent of a name in the tail of a validated equation.
pub(crate) fn resolve(def: &BdeDef, name: &str) -> Target {
    match BdeVar::parse(name) {
        Some(v) => Target::Var(v),
        None if name == &*def.name => Target::Recursive,
        None => Target::Earlier(Name::from(name)),
    }
}
