use std::fmt;

use crate::frontend::{lex, ParseError, Pos, Tok, Token};
use crate::syntax::Name;

use super::BdeError;

/// The head of an equation: an arithmetic expression over the heads
/// `x1 .. xk` of the arguments.
#[derive(Clone, Debug, PartialEq)]
pub enum HeadTerm {
    Num(u64),
    Ident(Name, Pos),
    Add(Box<HeadTerm>, Box<HeadTerm>),
    Mul(Box<HeadTerm>, Box<HeadTerm>),
}

/// Stream-level infix operators in tails.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StreamOp {
    Plus,
    Times,
}

impl StreamOp {
    /// The equation an infix operator refers to.
    pub fn target(self) -> &'static str {
        match self {
            StreamOp::Plus => "plus",
            StreamOp::Times => "times",
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            StreamOp::Plus => "+",
            StreamOp::Times => "*",
        }
    }
}

/// The tail of an equation: a stream expression over `x_i`, `y_i`, `z_i`,
/// the equation itself and earlier equations.
#[derive(Clone, Debug, PartialEq)]
pub enum TailTerm {
    Ident(Name, Pos),
    Call(Name, Vec<TailTerm>, Pos),
    Infix(StreamOp, Box<TailTerm>, Box<TailTerm>, Pos),
}

/// One behavioural differential equation.
#[derive(Clone, Debug, PartialEq)]
pub struct BdeDef {
    pub name: Name,
    pub arity: usize,
    pub head: HeadTerm,
    pub tail: TailTerm,
    /// Other equations referenced by the tail, in order of first use.
    pub dependencies: Vec<Name>,
    pub pos: Pos,
}

/// A variable of an equation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BdeVar {
    /// The `i`-th argument head, 1-based.
    X(usize),
    /// The `i`-th argument.
    Y(usize),
    /// The tail of the `i`-th argument.
    Z(usize),
}

impl BdeVar {
    /// Parse `x1`, `y2`, ... without checking the index against an arity.
    pub fn parse(s: &str) -> Option<BdeVar> {
        let mut chars = s.chars();
        let kind = chars.next()?;
        let digits = chars.as_str();
        if digits.is_empty() || digits.starts_with('0') || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let i = digits.parse().ok()?;
        match kind {
            'x' => Some(BdeVar::X(i)),
            'y' => Some(BdeVar::Y(i)),
            'z' => Some(BdeVar::Z(i)),
            _ => None,
        }
    }

    pub fn index(self) -> usize {
        match self {
            BdeVar::X(i) | BdeVar::Y(i) | BdeVar::Z(i) => i,
        }
    }
}

/// Whether `s` looks like a variable: one letter followed by digits.
pub fn variable_shaped(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && !chars.as_str().is_empty()
        && chars.all(|c| c.is_ascii_digit())
}

impl fmt::Display for HeadTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HeadTerm::Num(n) => write!(f, "{n}"),
            HeadTerm::Ident(x, _) => write!(f, "{x}"),
            HeadTerm::Add(a, b) => write!(f, "{a} + {b}"),
            HeadTerm::Mul(a, b) => {
                for (i, t) in [a, b].into_iter().enumerate() {
                    if i > 0 {
                        write!(f, " * ")?;
                    }
                    match **t {
                        HeadTerm::Add(..) => write!(f, "({t})")?,
                        _ => write!(f, "{t}")?,
                    }
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for TailTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TailTerm::Ident(x, _) => write!(f, "{x}"),
            TailTerm::Call(g, args, _) => {
                write!(f, "{g}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
            TailTerm::Infix(op, a, b, _) => {
                let wrap = |t: &TailTerm| matches!(t, TailTerm::Infix(StreamOp::Plus, ..)) && *op == StreamOp::Times;
                for (i, t) in [a, b].into_iter().enumerate() {
                    if i > 0 {
                        write!(f, " {} ", op.symbol())?;
                    }
                    if wrap(t) {
                        write!(f, "({t})")?;
                    } else {
                        write!(f, "{t}")?;
                    }
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for BdeDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "bde {}({}) {{ head = {}; tail = {}; }}",
            self.name, self.arity, self.head, self.tail
        )
    }
}

impl TailTerm {
    pub fn pos(&self) -> Pos {
        match self {
            TailTerm::Ident(_, p) | TailTerm::Call(_, _, p) | TailTerm::Infix(_, _, _, p) => *p,
        }
    }

    fn references(&self, own: &str, out: &mut Vec<Name>) {
        let mut add = |n: &Name| {
            if &**n != own && !out.contains(n) {
                out.push(n.clone());
            }
        };
        match self {
            TailTerm::Ident(x, _) => {
                if BdeVar::parse(x).is_none() {
                    add(x);
                }
            }
            TailTerm::Call(g, args, _) => {
                add(g);
                for a in args {
                    a.references(own, out);
                }
            }
            TailTerm::Infix(op, a, b, _) => {
                add(&Name::from(op.target()));
                a.references(own, out);
                b.references(own, out);
            }
        }
    }
}

struct Parser {
    toks: Vec<Token>,
    at: usize,
}

fn syntax(pos: Pos, message: impl Into<String>) -> BdeError {
    BdeError::Syntax {
        pos,
        message: message.into(),
    }
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.at.min(self.toks.len() - 1)]
    }

    fn bump(&mut self) -> Token {
        let t = self.peek().clone();
        self.at += 1;
        t
    }

    fn expect(&mut self, tok: Tok) -> Result<Pos, BdeError> {
        let t = self.bump();
        if t.tok == tok {
            Ok(t.pos)
        } else {
            Err(syntax(
                t.pos,
                format!("expected {}, found {}", tok.describe(), t.tok.describe()),
            ))
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<Pos, BdeError> {
        let t = self.bump();
        match &t.tok {
            Tok::Ident(s) if s == kw => Ok(t.pos),
            other => Err(syntax(t.pos, format!("expected `{kw}`, found {}", other.describe()))),
        }
    }

    fn ident(&mut self) -> Result<(Name, Pos), BdeError> {
        let t = self.bump();
        match t.tok {
            Tok::Ident(s) => Ok((Name::from(s), t.pos)),
            other => Err(syntax(t.pos, format!("expected a name, found {}", other.describe()))),
        }
    }

    fn def(&mut self) -> Result<BdeDef, BdeError> {
        let pos = self.keyword("bde")?;
        let (name, _) = self.ident()?;
        self.expect(Tok::LParen)?;
        let t = self.bump();
        let Tok::Num(arity) = t.tok else {
            return Err(syntax(t.pos, format!("expected an arity, found {}", t.tok.describe())));
        };
        self.expect(Tok::RParen)?;
        self.expect(Tok::LBrace)?;
        self.keyword("head")?;
        self.expect(Tok::Eq)?;
        let head = self.head_sum()?;
        self.expect(Tok::Semi)?;
        self.keyword("tail")?;
        self.expect(Tok::Eq)?;
        let tail = self.tail_sum()?;
        self.expect(Tok::Semi)?;
        self.expect(Tok::RBrace)?;
        let mut dependencies = Vec::new();
        tail.references(&name, &mut dependencies);
        Ok(BdeDef {
            name,
            arity: arity as usize,
            head,
            tail,
            dependencies,
            pos,
        })
    }

    fn head_sum(&mut self) -> Result<HeadTerm, BdeError> {
        let mut t = self.head_product()?;
        while self.peek().tok == Tok::Plus {
            self.bump();
            t = HeadTerm::Add(Box::new(t), Box::new(self.head_product()?));
        }
        Ok(t)
    }

    fn head_product(&mut self) -> Result<HeadTerm, BdeError> {
        let mut t = self.head_atom()?;
        while self.peek().tok == Tok::Star {
            self.bump();
            t = HeadTerm::Mul(Box::new(t), Box::new(self.head_atom()?));
        }
        Ok(t)
    }

    fn head_atom(&mut self) -> Result<HeadTerm, BdeError> {
        let t = self.bump();
        match t.tok {
            Tok::Num(n) => Ok(HeadTerm::Num(n)),
            Tok::Ident(s) => Ok(HeadTerm::Ident(Name::from(s), t.pos)),
            Tok::LParen => {
                let e = self.head_sum()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            other => Err(syntax(t.pos, format!("expected a head expression, found {}", other.describe()))),
        }
    }

    fn tail_sum(&mut self) -> Result<TailTerm, BdeError> {
        let mut t = self.tail_product()?;
        while self.peek().tok == Tok::Plus {
            let pos = self.bump().pos;
            t = TailTerm::Infix(StreamOp::Plus, Box::new(t), Box::new(self.tail_product()?), pos);
        }
        Ok(t)
    }

    fn tail_product(&mut self) -> Result<TailTerm, BdeError> {
        let mut t = self.tail_atom()?;
        while self.peek().tok == Tok::Star {
            let pos = self.bump().pos;
            t = TailTerm::Infix(StreamOp::Times, Box::new(t), Box::new(self.tail_atom()?), pos);
        }
        Ok(t)
    }

    fn tail_atom(&mut self) -> Result<TailTerm, BdeError> {
        let t = self.bump();
        match t.tok {
            Tok::Ident(s) => {
                let name = Name::from(s);
                if self.peek().tok != Tok::LParen {
                    return Ok(TailTerm::Ident(name, t.pos));
                }
                self.bump();
                let mut args = Vec::new();
                if self.peek().tok != Tok::RParen {
                    args.push(self.tail_sum()?);
                    while self.peek().tok == Tok::Comma {
                        self.bump();
                        args.push(self.tail_sum()?);
                    }
                }
                self.expect(Tok::RParen)?;
                Ok(TailTerm::Call(name, args, t.pos))
            }
            Tok::LParen => {
                let e = self.tail_sum()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            other => Err(syntax(t.pos, format!("expected a tail expression, found {}", other.describe()))),
        }
    }
}

/// Parse the equations of a `.bde` file.
pub fn parse_bde(text: &str) -> Result<Vec<BdeDef>, BdeError> {
    let toks = lex(text).map_err(|e| match e {
        ParseError::Lexical { pos, message } => syntax(pos, message),
        other => syntax(other.pos(), other.to_string()),
    })?;
    let mut p = Parser { toks, at: 0 };
    let mut out = Vec::new();
    while p.peek().tok != Tok::Eof {
        out.push(p.def()?);
    }
    Ok(out)
}
