//! Core algorithms for the guarded lambda-calculus: syntax, parsing and
//! printing, type checking, call-by-name evaluation, a step-indexed
//! denotational evaluator and the compilation of behavioural differential
//! equations.

pub mod bde;
pub mod denot;
pub mod frontend;
pub mod machine;
pub mod prelude;
pub mod syntax;
pub mod typing;
