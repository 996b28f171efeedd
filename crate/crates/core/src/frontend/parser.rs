use std::collections::{BTreeSet, HashMap, HashSet};
use std::rc::Rc;

use super::lexer::{lex, Tok, Token};
use super::macros::fix_term;
use super::{Definition, ParseError, Pos, Program};
use crate::syntax::{fresh_name, free_vars, ExplicitSubst, Name, PrimOp, Side, Term, Type};

const KEYWORDS: &[&str] = &[
    "def", "type", "mu", "Nat", "Unit", "Void", "fst", "snd", "inl", "inr", "abort", "case", "of",
    "fold", "unfold", "next", "prev", "box", "boxp", "unbox", "succ", "zero", "fix",
];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

/// Names visible to a parse: earlier global definitions and type aliases.
#[derive(Clone, Debug, Default)]
pub struct Scope {
    pub globals: HashSet<Name>,
    pub aliases: HashMap<Name, Type>,
}

impl Scope {
    pub fn of_program(p: &Program) -> Scope {
        let mut s = Scope::default();
        s.extend(p);
        s
    }

    pub fn extend(&mut self, p: &Program) {
        self.globals.extend(p.defs.iter().map(|d| d.name.clone()));
        self.aliases
            .extend(p.aliases.iter().map(|(n, t)| (n.clone(), t.clone())));
    }
}

#[derive(Clone, Copy, PartialEq)]
enum BoxKind {
    Prev,
    Box,
    BoxSum,
}

pub(crate) struct Parser {
    toks: Vec<Token>,
    i: usize,
    scope: Scope,
    /// Reject identifiers that are neither bound nor global.
    closed: bool,
    locals: Vec<Name>,
    /// Locals of enclosing scopes hidden by a closed `prev`/`box` body.
    hidden: Vec<Name>,
    tyvars: Vec<Name>,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    pub fn new(src: &str, scope: Scope, closed: bool) -> PResult<Self> {
        Ok(Parser {
            toks: lex(src)?,
            i: 0,
            scope,
            closed,
            locals: Vec::new(),
            hidden: Vec::new(),
            tyvars: Vec::new(),
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].pos
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].tok.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(ParseError::Syntax {
            pos: self.pos(),
            message: message.into(),
        })
    }

    fn expect(&mut self, t: Tok) -> PResult<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            self.error(format!("expected {}, found {}", t.describe(), self.peek().describe()))
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<()> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            self.error(format!("expected `{kw}`, found {}", self.peek().describe()))
        }
    }

    fn binder(&mut self) -> PResult<Name> {
        match self.peek().clone() {
            Tok::Ident(s) if !is_keyword(&s) && PrimOp::from_name(&s).is_none() => {
                self.bump();
                Ok(Name::from(s.as_str()))
            }
            other => self.error(format!("expected a variable name, found {}", other.describe())),
        }
    }

    pub fn expect_eof(&mut self) -> PResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.error(format!("unexpected {}", self.peek().describe()))
        }
    }

    // ---- types ----

    pub fn ty(&mut self) -> PResult<Type> {
        let a = self.ty_sum()?;
        if self.eat(&Tok::Arrow) {
            Ok(Type::arrow(a, self.ty()?))
        } else {
            Ok(a)
        }
    }

    fn ty_sum(&mut self) -> PResult<Type> {
        let mut a = self.ty_prod()?;
        while self.eat(&Tok::Plus) {
            a = Type::sum(a, self.ty_prod()?);
        }
        Ok(a)
    }

    fn ty_prod(&mut self) -> PResult<Type> {
        let mut a = self.ty_unary()?;
        while self.eat(&Tok::Star) {
            a = Type::prod(a, self.ty_unary()?);
        }
        Ok(a)
    }

    fn ty_unary(&mut self) -> PResult<Type> {
        if self.eat(&Tok::Later) {
            return Ok(Type::later(self.ty_unary()?));
        }
        if self.eat(&Tok::Hash) {
            return Ok(Type::boxed(self.ty_unary()?));
        }
        if self.eat_kw("mu") {
            let v = self.binder()?;
            self.expect(Tok::Dot)?;
            self.tyvars.push(v.clone());
            let body = self.ty();
            self.tyvars.pop();
            return Ok(Type::Mu(v, Rc::new(body?)));
        }
        self.ty_atom()
    }

    fn ty_atom(&mut self) -> PResult<Type> {
        match self.peek().clone() {
            Tok::Ident(s) if s == "Nat" => {
                self.bump();
                Ok(Type::Nat)
            }
            Tok::Ident(s) if s == "Unit" => {
                self.bump();
                Ok(Type::Unit)
            }
            Tok::Ident(s) if s == "Void" => {
                self.bump();
                Ok(Type::Void)
            }
            Tok::Ident(s) if !is_keyword(&s) => {
                self.bump();
                let name = Name::from(s.as_str());
                if !self.tyvars.contains(&name) {
                    if let Some(t) = self.scope.aliases.get(&name) {
                        return Ok(t.clone());
                    }
                }
                Ok(Type::Var(name))
            }
            Tok::LParen => {
                self.bump();
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            other => self.error(format!("expected a type, found {}", other.describe())),
        }
    }

    // ---- terms ----

    fn starts_greedy(&self) -> bool {
        match self.peek() {
            Tok::Backslash => true,
            Tok::Ident(s) => matches!(s.as_str(), "case" | "prev" | "box" | "boxp"),
            _ => false,
        }
    }

    fn starts_prefix(&self) -> bool {
        match self.peek() {
            Tok::Num(_) | Tok::LParen => true,
            Tok::Ident(s) => {
                !is_keyword(s)
                    || matches!(
                        s.as_str(),
                        "succ" | "fst" | "snd" | "unfold" | "next" | "unbox" | "inl" | "inr"
                            | "abort" | "fold" | "zero" | "fix"
                    )
            }
            _ => false,
        }
    }

    pub fn term(&mut self) -> PResult<Rc<Term>> {
        if self.starts_greedy() {
            return self.greedy();
        }
        let mut t = self.app()?;
        while self.eat(&Tok::Ap) {
            let r = self.app()?;
            t = Term::later_app(t, r);
        }
        Ok(t)
    }

    fn greedy(&mut self) -> PResult<Rc<Term>> {
        match self.peek().clone() {
            Tok::Backslash => self.lambda(),
            Tok::Ident(s) if s == "case" => self.case(),
            Tok::Ident(s) if s == "prev" => self.boxlike(BoxKind::Prev),
            Tok::Ident(s) if s == "box" => self.boxlike(BoxKind::Box),
            Tok::Ident(s) if s == "boxp" => self.boxlike(BoxKind::BoxSum),
            other => self.error(format!("unexpected {}", other.describe())),
        }
    }

    fn app(&mut self) -> PResult<Rc<Term>> {
        if self.starts_greedy() {
            return self.greedy();
        }
        if let Tok::Ident(s) = self.peek().clone() {
            if let Some(op) = PrimOp::from_name(&s) {
                return self.prim_spine(op);
            }
        }
        let mut head = self.prefix()?;
        loop {
            if self.starts_prefix() {
                let arg = self.prefix()?;
                head = Term::app(head, arg);
            } else if self.starts_greedy() {
                let arg = self.greedy()?;
                head = Term::app(head, arg);
                break;
            } else {
                break;
            }
        }
        Ok(head)
    }

    fn arguments(&mut self) -> PResult<Vec<Rc<Term>>> {
        let mut args = Vec::new();
        loop {
            if self.starts_prefix() {
                args.push(self.prefix()?);
            } else if self.starts_greedy() {
                args.push(self.greedy()?);
                break;
            } else {
                break;
            }
        }
        Ok(args)
    }

    fn prim_spine(&mut self, op: PrimOp) -> PResult<Rc<Term>> {
        let pos = self.pos();
        self.bump();
        let args = self.arguments()?;
        if args.len() > op.arity() {
            return Err(ParseError::Arity {
                pos,
                message: format!(
                    "`{}` takes {} arguments but is applied to {}",
                    op.name(),
                    op.arity(),
                    args.len()
                ),
            });
        }
        Ok(eta_expand_prim(op, args))
    }

    fn operand(&mut self) -> PResult<Rc<Term>> {
        if self.starts_greedy() {
            self.greedy()
        } else {
            self.prefix()
        }
    }

    fn annotation(&mut self) -> PResult<Option<Type>> {
        if self.eat(&Tok::LBracket) {
            let t = self.ty()?;
            self.expect(Tok::RBracket)?;
            Ok(Some(t))
        } else {
            Ok(None)
        }
    }

    fn prefix(&mut self) -> PResult<Rc<Term>> {
        let Tok::Ident(s) = self.peek().clone() else {
            return self.atom();
        };
        let unary = |p: &mut Self, f: fn(Rc<Term>) -> Term| -> PResult<Rc<Term>> {
            p.bump();
            Ok(Rc::new(f(p.operand()?)))
        };
        match s.as_str() {
            "succ" => unary(self, Term::Succ),
            "fst" => unary(self, |t| Term::Proj(Side::Left, t)),
            "snd" => unary(self, |t| Term::Proj(Side::Right, t)),
            "unfold" => unary(self, Term::Unfold),
            "next" => unary(self, Term::Next),
            "unbox" => unary(self, Term::Unbox),
            "inl" | "inr" | "abort" | "fold" => {
                self.bump();
                let ann = self.annotation()?;
                let body = self.operand()?;
                Ok(Rc::new(match s.as_str() {
                    "inl" => Term::Inj(Side::Left, ann, body),
                    "inr" => Term::Inj(Side::Right, ann, body),
                    "abort" => Term::Abort(ann, body),
                    _ => Term::Fold(ann, body),
                }))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> PResult<Rc<Term>> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(Term::numeral(n))
            }
            Tok::Ident(s) if s == "zero" => {
                self.bump();
                Ok(Rc::new(Term::Zero))
            }
            Tok::Ident(s) if s == "fix" => {
                self.bump();
                self.expect(Tok::LBracket)?;
                let t = self.ty()?;
                self.expect(Tok::RBracket)?;
                Ok(fix_term(&t))
            }
            Tok::Ident(s) if PrimOp::from_name(&s).is_some() => {
                self.bump();
                Ok(eta_expand_prim(PrimOp::from_name(&s).unwrap(), Vec::new()))
            }
            Tok::Ident(s) if !is_keyword(&s) => {
                self.bump();
                let name = Name::from(s.as_str());
                self.resolve(name, pos)
            }
            Tok::LParen => {
                self.bump();
                if self.eat(&Tok::RParen) {
                    return Ok(Rc::new(Term::Unit));
                }
                let t = self.term()?;
                let r = if self.eat(&Tok::Comma) {
                    let u = self.term()?;
                    Term::pair(t, u)
                } else if self.eat(&Tok::Colon) {
                    let ty = self.ty()?;
                    Rc::new(Term::Ascribe(t, ty))
                } else {
                    t
                };
                self.expect(Tok::RParen)?;
                Ok(r)
            }
            other => self.error(format!("expected a term, found {}", other.describe())),
        }
    }

    fn resolve(&self, name: Name, pos: Pos) -> PResult<Rc<Term>> {
        if self.locals.contains(&name) || self.scope.globals.contains(&name) || !self.closed {
            return Ok(Rc::new(Term::Var(name)));
        }
        if self.hidden.contains(&name) {
            return Err(ParseError::Syntax {
                pos,
                message: format!(
                    "`{name}` is bound outside this closed body; pass it through an explicit substitution"
                ),
            });
        }
        Err(ParseError::UnknownIdentifier { pos, name })
    }

    fn lambda(&mut self) -> PResult<Rc<Term>> {
        self.expect(Tok::Backslash)?;
        let mut binders: Vec<(Name, Option<Type>)> = Vec::new();
        loop {
            if self.eat(&Tok::LParen) {
                let x = self.binder()?;
                self.expect(Tok::Colon)?;
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                binders.push((x, Some(t)));
            } else if matches!(self.peek(), Tok::Ident(_)) {
                let x = self.binder()?;
                if self.eat(&Tok::Colon) {
                    let t = self.ty()?;
                    binders.push((x, Some(t)));
                    break;
                }
                binders.push((x, None));
            } else {
                break;
            }
        }
        if binders.is_empty() {
            return self.error("expected a binder after `\\`");
        }
        self.expect(Tok::Dot)?;
        let depth = self.locals.len();
        self.locals.extend(binders.iter().map(|(x, _)| x.clone()));
        let body = self.term();
        self.locals.truncate(depth);
        let mut body = body?;
        for (x, ann) in binders.into_iter().rev() {
            body = Rc::new(Term::Lam(x, ann, body));
        }
        Ok(body)
    }

    fn case(&mut self) -> PResult<Rc<Term>> {
        self.expect_kw("case")?;
        let scrut = self.term()?;
        self.expect_kw("of")?;
        self.eat(&Tok::Bar);
        self.expect_kw("inl")?;
        let x = self.binder()?;
        self.expect(Tok::Arrow)?;
        self.locals.push(x.clone());
        let left = self.term();
        self.locals.pop();
        let left = left?;
        self.expect(Tok::Bar)?;
        self.expect_kw("inr")?;
        let y = self.binder()?;
        self.expect(Tok::Arrow)?;
        self.locals.push(y.clone());
        let right = self.term();
        self.locals.pop();
        Ok(Rc::new(Term::Case(scrut, x, left, y, right?)))
    }

    /// Parse a body in a scope that sees only `vars`.
    fn closed_body(&mut self, vars: Vec<Name>) -> PResult<Rc<Term>> {
        let saved_locals = std::mem::replace(&mut self.locals, vars);
        let hidden_len = self.hidden.len();
        self.hidden.extend(saved_locals.iter().cloned());
        let body = self.term();
        self.hidden.truncate(hidden_len);
        self.locals = saved_locals;
        body
    }

    fn boxlike(&mut self, kind: BoxKind) -> PResult<Rc<Term>> {
        let pos = self.pos();
        self.bump();
        let (sub, body) = if self.eat(&Tok::LBrace) {
            let mut pairs: Vec<(Name, Rc<Term>)> = Vec::new();
            if !self.eat(&Tok::RBrace) {
                loop {
                    let x = self.binder()?;
                    if pairs.iter().any(|(n, _)| *n == x) {
                        return self.error(format!("`{x}` is listed twice in the substitution"));
                    }
                    self.expect(Tok::LeftArrow)?;
                    let t = self.term()?;
                    pairs.push((x, t));
                    if self.eat(&Tok::Comma) {
                        continue;
                    }
                    self.expect(Tok::RBrace)?;
                    break;
                }
            }
            self.expect(Tok::Dot)?;
            let vars = pairs.iter().map(|(n, _)| n.clone()).collect();
            let body = self.closed_body(vars)?;
            (ExplicitSubst(pairs), body)
        } else if self.eat(&Tok::Dot) {
            // `prev. t`: the identity substitution on the free variables of t
            // that are bound locally (globals are closed and are inlined).
            let body = self.term()?;
            let vars: BTreeSet<Name> = free_vars(&body)
                .into_iter()
                .filter(|v| self.locals.contains(v) || !self.scope.globals.contains(v))
                .collect();
            (ExplicitSubst::identity(vars.iter()), body)
        } else {
            let body = self.closed_body(Vec::new())?;
            let open: Vec<Name> = free_vars(&body)
                .into_iter()
                .filter(|v| !self.scope.globals.contains(v))
                .collect();
            if let Some(v) = open.first() {
                return Err(ParseError::Syntax {
                    pos,
                    message: format!(
                        "body without a substitution must be closed, but `{v}` is free; write `{}.` for the identity substitution",
                        match kind {
                            BoxKind::Prev => "prev",
                            BoxKind::Box => "box",
                            BoxKind::BoxSum => "boxp",
                        }
                    ),
                });
            }
            (ExplicitSubst::empty(), body)
        };
        Ok(Rc::new(match kind {
            BoxKind::Prev => Term::Prev(sub, body),
            BoxKind::Box => Term::BoxI(sub, body),
            BoxKind::BoxSum => Term::BoxSum(sub, body),
        }))
    }

    // ---- programs ----

    pub fn program(&mut self) -> PResult<Program> {
        let mut prog = Program::default();
        let mut seen: HashSet<Name> = HashSet::new();
        loop {
            let pos = self.pos();
            if *self.peek() == Tok::Eof {
                break;
            }
            if self.eat_kw("type") {
                let name = self.binder()?;
                if !seen.insert(name.clone()) {
                    return Err(ParseError::DuplicateDefinition { pos, name });
                }
                self.expect(Tok::Eq)?;
                let t = self.ty()?;
                self.expect(Tok::Semi)?;
                self.scope.aliases.insert(name.clone(), t.clone());
                prog.aliases.push((name, t));
                continue;
            }
            if !self.eat_kw("def") {
                return self.error(format!(
                    "expected `def` or `type`, found {}",
                    self.peek().describe()
                ));
            }
            let name = self.binder()?;
            if !seen.insert(name.clone()) {
                return Err(ParseError::DuplicateDefinition { pos, name });
            }
            self.expect(Tok::Colon)?;
            let ty = self.ty()?;
            self.expect(Tok::Eq)?;
            let term = self.term()?;
            self.expect(Tok::Semi)?;
            self.scope.globals.insert(name.clone());
            prog.defs.push(Definition {
                name,
                ty,
                term,
                pos,
            });
        }
        Ok(prog)
    }

}

/// `op a1 .. ak` with `k <= arity`, eta-expanded to a saturated primitive
/// under annotated lambdas for the missing arguments.
pub(crate) fn eta_expand_prim(op: PrimOp, mut args: Vec<Rc<Term>>) -> Rc<Term> {
    let mut avoid: BTreeSet<Name> = BTreeSet::new();
    for a in &args {
        avoid.extend(free_vars(a));
    }
    let mut params = Vec::new();
    while args.len() < op.arity() {
        let p = fresh_name("n", |c| avoid.contains(c));
        avoid.insert(p.clone());
        args.push(Rc::new(Term::Var(p.clone())));
        params.push(p);
    }
    let mut t = Term::prim(op, args);
    for p in params.into_iter().rev() {
        t = Rc::new(Term::Lam(p, Some(Type::Nat), t));
    }
    t
}
