use std::cell::{OnceCell, RefCell};
use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use crate::frontend::parse_term_with;
use crate::prelude::{checked_prelude, load_prelude};
use crate::syntax::{Name, Term, Type};

use super::syntax::{BdeDef, BdeVar, HeadTerm, TailTerm};
use super::{resolve, validate_bde, BdeError, Target};

type Thunk = Box<dyn FnOnce() -> HostStream>;

/// A lazy stream of naturals whose tail is computed at most once.
#[derive(Clone)]
pub struct HostStream(Rc<Cell>);

struct Cell {
    head: u64,
    tail: OnceCell<HostStream>,
    make_tail: RefCell<Option<Thunk>>,
}

impl HostStream {
    pub fn cons(head: u64, tail: impl FnOnce() -> HostStream + 'static) -> HostStream {
        HostStream(Rc::new(Cell {
            head,
            tail: OnceCell::new(),
            make_tail: RefCell::new(Some(Box::new(tail))),
        }))
    }

    /// The stream `f 0, f 1, ...`.
    pub fn from_fn(f: impl Fn(usize) -> u64 + 'static) -> HostStream {
        fn go(f: Rc<dyn Fn(usize) -> u64>, i: usize) -> HostStream {
            let head = f(i);
            HostStream::cons(head, move || go(f, i + 1))
        }
        go(Rc::new(f), 0)
    }

    pub fn zeros() -> HostStream {
        HostStream::from_fn(|_| 0)
    }

    pub fn head(&self) -> u64 {
        self.0.head
    }

    pub fn tail(&self) -> HostStream {
        self.0
            .tail
            .get_or_init(|| {
                let make = self.0.make_tail.borrow_mut().take();
                make.expect("a tail is forced once")()
            })
            .clone()
    }

    pub fn take(&self, n: usize) -> Vec<u64> {
        let mut out = Vec::with_capacity(n);
        let mut cur = self.clone();
        while out.len() < n {
            out.push(cur.head());
            if out.len() < n {
                cur = cur.tail();
            }
        }
        out
    }
}

impl fmt::Debug for HostStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HostStream({}, ..)", self.head())
    }
}

/// The equations of a file, shared by the streams they generate.
struct Equations {
    defs: HashMap<Name, BdeDef>,
}

impl Equations {
    fn apply(self: &Rc<Self>, name: &str, args: Vec<HostStream>) -> HostStream {
        let def = &self.defs[name];
        let head = eval_head(&def.head, &args);
        let eqs = self.clone();
        let name = def.name.clone();
        HostStream::cons(head, move || {
            let def = &eqs.defs[&name];
            eqs.eval_tail(def, &def.tail, &args)
        })
    }

    fn eval_tail(self: &Rc<Self>, def: &BdeDef, t: &TailTerm, args: &[HostStream]) -> HostStream {
        let call = |target: Target, actuals: &[TailTerm]| {
            let name = match target {
                Target::Recursive => def.name.clone(),
                Target::Earlier(e) => e,
                Target::Var(_) => unreachable!("variables are not applied"),
            };
            let vals = actuals.iter().map(|a| self.eval_tail(def, a, args)).collect();
            self.apply(&name, vals)
        };
        match t {
            TailTerm::Ident(x, _) => match resolve(def, x) {
                Target::Var(BdeVar::X(i)) => {
                    let h = args[i - 1].head();
                    HostStream::cons(h, HostStream::zeros)
                }
                Target::Var(BdeVar::Y(i)) => args[i - 1].clone(),
                Target::Var(BdeVar::Z(i)) => args[i - 1].tail(),
                target => call(target, &[]),
            },
            TailTerm::Call(g, actuals, _) => call(resolve(def, g), actuals),
            TailTerm::Infix(op, a, b, _) => {
                call(resolve(def, op.target()), &[(**a).clone(), (**b).clone()])
            }
        }
    }
}

fn eval_head(t: &HeadTerm, args: &[HostStream]) -> u64 {
    match t {
        HeadTerm::Num(n) => *n,
        HeadTerm::Ident(x, _) => match BdeVar::parse(x) {
            Some(BdeVar::X(i)) => args[i - 1].head(),
            _ => unreachable!("validated head mentions `{x}`"),
        },
        HeadTerm::Add(a, b) => eval_head(a, args) + eval_head(b, args),
        HeadTerm::Mul(a, b) => eval_head(a, args) * eval_head(b, args),
    }
}

/// The stream defined by equation `name` on `args`, computed corecursively
/// on the host.
pub fn oracle_stream(defs: &[BdeDef], name: &str, args: Vec<HostStream>) -> Result<HostStream, BdeError> {
    validate_bde(defs)?;
    let def = defs
        .iter()
        .find(|d| &*d.name == name)
        .ok_or_else(|| BdeError::Undefined(Name::from(name)))?;
    if def.arity != args.len() {
        return Err(BdeError::Arity {
            pos: def.pos,
            name: def.name.clone(),
            expected: def.arity,
            found: args.len(),
        });
    }
    let eqs = Rc::new(Equations {
        defs: defs.iter().map(|d| (d.name.clone(), d.clone())).collect(),
    });
    Ok(eqs.apply(name, args))
}

/// The first `n` elements of `name` applied to `args`.
pub fn oracle_eval(defs: &[BdeDef], name: &str, args: Vec<HostStream>, n: usize) -> Result<Vec<u64>, BdeError> {
    Ok(oracle_stream(defs, name, args)?.take(n))
}

/// Names of the argument streams known to both sides.
pub const STANDARD_STREAMS: [&str; 5] = ["zeros", "ones", "toggle", "nats", "paperfolds"];

/// An input stream given both as a term over the prelude and on the host.
#[derive(Clone, Debug)]
pub struct StandardStream {
    pub name: &'static str,
    /// Source of the term, in the scope of the prelude.
    pub source: &'static str,
    /// The closed, linked term.
    pub term: Rc<Term>,
    pub host: HostStream,
}

fn paperfold(i: usize) -> u64 {
    if i.is_multiple_of(2) {
        1 - (i as u64 / 2) % 2
    } else {
        paperfold(i / 2)
    }
}

/// One of [`STANDARD_STREAMS`].
pub fn standard_stream(name: &str) -> Option<StandardStream> {
    let (name, source, host): (&'static str, &'static str, HostStream) = match name {
        "zeros" => ("zeros", "zeros", HostStream::zeros()),
        "ones" => ("ones", "map (\\n. succ n) zeros", HostStream::from_fn(|_| 1)),
        "toggle" => ("toggle", "toggle", HostStream::from_fn(|i| (i % 2 == 0) as u64)),
        "nats" => ("nats", "iterate' (\\n. succ n) 0", HostStream::from_fn(|i| i as u64)),
        "paperfolds" => ("paperfolds", "paperfolds", HostStream::from_fn(paperfold)),
        _ => return None,
    };
    let parsed = parse_term_with(source, &load_prelude().scope(), true).expect("standard streams parse");
    let term = checked_prelude()
        .check_term(&parsed, &Type::guarded_stream())
        .expect("standard streams type-check");
    Some(StandardStream {
        name,
        source,
        term,
        host,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bde::load_bde;
    use crate::machine::{take_stream, DEFAULT_FUEL};

    const STREAMS: &str = "
        bde zeros(0) { head = 0; tail = zeros; }
        bde plus(2) { head = x1 + x2; tail = plus(z1, z2); }
        bde times(2) { head = x1 * x2; tail = plus(times(z1, y2), times(x1, z2)); }
    ";

    fn toggle() -> HostStream {
        standard_stream("toggle").unwrap().host
    }

    #[test]
    fn examples() {
        let defs = load_bde(STREAMS).unwrap();
        assert_eq!(oracle_eval(&defs, "zeros", vec![], 3), Ok(vec![0, 0, 0]));
        assert_eq!(oracle_eval(&defs, "plus", vec![toggle(), toggle()], 4), Ok(vec![2, 0, 2, 0]));
        assert_eq!(
            oracle_eval(&defs, "times", vec![toggle(), toggle()], 5),
            Ok(vec![1, 0, 2, 0, 3])
        );
    }

    #[test]
    fn times_is_convolution() {
        let defs = load_bde(STREAMS).unwrap();
        let nats = standard_stream("nats").unwrap().host;
        let got = oracle_eval(&defs, "times", vec![nats.clone(), nats], 8).unwrap();
        let want: Vec<u64> = (0..8u64).map(|n| (0..=n).map(|i| i * (n - i)).sum()).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn argument_count() {
        let defs = load_bde(STREAMS).unwrap();
        assert!(matches!(oracle_eval(&defs, "plus", vec![], 1), Err(BdeError::Arity { .. })));
    }

    #[test]
    fn standard_streams_agree() {
        for name in STANDARD_STREAMS {
            let s = standard_stream(name).unwrap();
            assert_eq!(take_stream(&s.term, 8, DEFAULT_FUEL).unwrap(), s.host.take(8), "{name}");
        }
        assert!(standard_stream("evens").is_none());
    }
}
