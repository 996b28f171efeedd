//! Closed, checked terms shared by the integration suites.
#![allow(dead_code)]

use std::rc::Rc;

use glam_core::frontend::{parse_term_with, parse_type_with, recognize_fix};
use glam_core::prelude::{load_with_prelude, Loaded};
use glam_core::syntax::{strip_ascriptions, type_alpha_eq, Term, Type};

/// Definitions used by the corpus on top of the prelude.
pub const EXTRAS: &str = r"
def natsFrom : Nat -> GStrStr =
  fix[Nat -> GStrStr] (\g. \n. fold (box{m <- n}. iterate' (\k. succ k) m, g <*> next (succ n)));
def grid : StrStr = box. natsFrom 0;
def nats : GStr = iterate' (\n. succ n) 0;
def double : Nat -> Nat = \n. addN n n;
def sq : Nat -> Nat = \n. mulN n n;
";

thread_local! {
    static LOADED: Rc<Loaded> = Rc::new(load_with_prelude(EXTRAS).expect("corpus extras check"));
}

pub fn loaded() -> Rc<Loaded> {
    LOADED.with(Rc::clone)
}

pub fn ty(src: &str) -> Type {
    parse_type_with(src, &loaded().source.scope()).unwrap_or_else(|e| panic!("{src}: {e}"))
}

/// Parse `src` closed over the prelude and the extras, check it at `a`,
/// and return the linked term.
pub fn elab(src: &str, a: &str) -> Rc<Term> {
    let l = loaded();
    let t = parse_term_with(src, &l.source.scope(), true).unwrap_or_else(|e| panic!("{src}: {e}"));
    l.checked.check_term(&t, &ty(a)).unwrap_or_else(|e| panic!("{src}: {e}"))
}

/// A named closed term with its type.
#[derive(Clone, Debug)]
pub struct Sample {
    pub name: String,
    pub term: Rc<Term>,
    pub ty: Type,
}

fn sample(src: &str, a: &str) -> Sample {
    Sample {
        name: src.to_string(),
        term: elab(src, a),
        ty: ty(a),
    }
}

/// Guarded streams, as source.
pub const STREAM_SOURCES: [&str; 12] = [
    "zeros",
    "toggle",
    "paperfolds",
    "thuemorse",
    "fibonacci",
    "map (\\n. succ n) zeros",
    "iterate' (\\n. succ n) 0",
    "iterate (next (\\n. addN n 2)) 1",
    "interleave toggle (next paperfolds)",
    "interleave' zeros toggle",
    "every2nd (box. iterate' (\\n. succ n) 0)",
    "diag grid",
];

pub fn streams() -> Vec<Sample> {
    STREAM_SOURCES.iter().map(|s| sample(s, "GStr")).collect()
}

fn co_tails(k: usize, s: &str) -> String {
    (0..k).fold(format!("(box. {s})"), |acc, _| format!("coTail ({acc})"))
}

/// Closed terms of type Nat.
pub fn nats() -> Vec<Sample> {
    let mut srcs: Vec<String> = Vec::new();
    for s in STREAM_SOURCES {
        for k in 0..8 {
            srcs.push(format!("coHead ({})", co_tails(k, s)));
        }
        srcs.push(format!("head ({s})"));
    }
    for n in 0..6 {
        srcs.push(format!("double (sq {n})"));
        srcs.push(format!("(\\(p : Nat * Nat). addN (fst p) (snd p)) ({n}, succ {n})"));
        srcs.push(format!(
            "case (inl {n} : Nat + Unit) of inl x -> succ x | inr u -> 0"
        ));
    }
    srcs.extend(
        [
            "prev. second toggle",
            "prev. prev. third paperfolds",
            "unbox (box. addN 1 2)",
            "coSecond (box. toggle)",
            "coHead (mapConst (\\n. mulN n 3) (box. iterate' (\\n. succ n) 1))",
            "coHead (coTail (lift (box. map (\\n. succ n)) (box. toggle)))",
            "coHead (coTail (lift2 (box. interleave') (box. toggle) (box. zeros)))",
            "case pred (box. cosucc (cosucc cozero)) of inl u -> 0 | inr c -> 1",
            "case pred (box. cozero) of inl u -> 0 | inr c -> 1",
            "case pred (box. infinity) of inl u -> 0 | inr c -> case pred c of inl u -> 0 | inr d -> 2",
            "coHead (coHeadS (coTailS grid))",
            "coHead (coTail (coTail (join grid)))",
            "head (initial (\\p. cons (fst p) (snd p)) toggle)",
            "prev. second (final (\\n. (n, next (succ n))) 4)",
            "bitToNat (headB fibonacciB)",
            "(\\(f : Nat -> Nat). f (f 2)) double",
        ]
        .iter()
        .map(|s| s.to_string()),
    );
    srcs.iter().map(|s| sample(s, "Nat")).collect()
}

/// Every closed term of the corpus: the Nat terms, the streams, and the
/// prelude's own definitions.
pub fn all() -> Vec<Sample> {
    let mut out = nats();
    out.extend(streams());
    for d in loaded().checked.iter() {
        out.push(Sample {
            name: d.name.to_string(),
            term: d.term.clone(),
            ty: d.ty.clone(),
        });
    }
    out
}

/// The type and functional of a term of the form `fix[T] phi`.
pub fn fix_parts(t: &Term) -> Option<(Type, Rc<Term>)> {
    match &*strip_ascriptions(&Rc::new(t.clone())) {
        Term::App(f, phi) => recognize_fix(f).map(|a| (a, phi.clone())),
        _ => None,
    }
}

/// Closed inhabitants of `a` used as probe arguments.
pub fn probes(a: &Type) -> Vec<Rc<Term>> {
    let known: [(&str, &[&str]); 9] = [
        ("Nat", &["0", "3"]),
        ("GStr", &["toggle", "nats"]),
        ("Str", &["box. toggle", "box. nats"]),
        ("StrStr", &["grid"]),
        ("GCoNat", &["cosucc cozero", "infinity"]),
        ("CoNat", &["box. cosucc cozero"]),
        ("BStr", &["thuemorseB"]),
        ("Nat -> Nat", &["\\n. succ n", "\\n. 0"]),
        ("Nat -> Nat * |>Nat", &["\\n. (n, next (succ n))"]),
    ];
    for (src, terms) in known {
        if type_alpha_eq(a, &ty(src)) {
            return terms.iter().map(|t| elab(t, src)).collect();
        }
    }
    match a {
        Type::Unit => vec![Rc::new(Term::Unit)],
        Type::Prod(x, y) => {
            let (xs, ys) = (probes(x), probes(y));
            vec![Term::pair(xs[0].clone(), ys[0].clone())]
        }
        Type::Later(x) => probes(x).into_iter().map(Term::next).collect(),
        Type::Box(x) => probes(x).into_iter().map(Term::box_closed).collect(),
        Type::Arrow(x, y) => probes(y)
            .into_iter()
            .map(|b| Term::lam("_probe", Some((**x).clone()), b))
            .collect(),
        _ => panic!("no probes at {a:?}"),
    }
}

/// A finite observation of the closed term `t : a`, looking under at most
/// `depth` laters. Functions are observed on their probes.
pub fn observe(t: &Rc<Term>, a: &Type, depth: usize) -> String {
    use glam_core::machine::{eval, DEFAULT_FUEL};
    let value = || {
        eval(t, DEFAULT_FUEL)
            .into_value()
            .unwrap_or_else(|e| panic!("{t}: {e}"))
    };
    match a {
        Type::Nat => value().as_numeral().expect("numeral").to_string(),
        Type::Unit => "()".to_string(),
        Type::Void => unreachable!("closed terms of Void"),
        Type::Prod(x, y) => format!(
            "({}, {})",
            observe(&Term::fst(t.clone()), x, depth),
            observe(&Term::snd(t.clone()), y, depth)
        ),
        Type::Sum(x, y) => match &*value() {
            Term::Inj(side, _, u) => {
                let b = if side.index() == 0 { x } else { y };
                format!("in{} {}", side.index(), observe(u, b, depth))
            }
            v => panic!("not an injection: {v}"),
        },
        Type::Arrow(x, y) => probes(x)
            .into_iter()
            .map(|p| observe(&Term::app(t.clone(), p), y, depth))
            .collect::<Vec<_>>()
            .join(" | "),
        Type::Mu(..) => observe(&Term::unfold(t.clone()), &a.unfold_mu().expect("mu"), depth),
        Type::Later(_) if depth == 0 => "..".to_string(),
        Type::Later(x) => format!("> {}", observe(&Term::prev_closed(t.clone()), x, depth - 1)),
        Type::Box(x) => format!("# {}", observe(&Term::unbox(t.clone()), x, depth)),
        Type::Var(v) => panic!("open type variable {v}"),
    }
}

pub mod gen {
    use proptest::prelude::*;

    use glam_core::syntax::Type;

    /// Types whose free variables are drawn from `vars`, with `#` only
    /// over closed types.
    pub fn open_type(vars: Vec<&'static str>, depth: u32) -> BoxedStrategy<Type> {
        let mut leaves = vec![Just(Type::Nat).boxed(), Just(Type::Unit).boxed(), Just(Type::Void).boxed()];
        for v in vars.iter().copied() {
            leaves.push(Just(Type::var(v)).boxed());
        }
        let leaf = proptest::strategy::Union::new(leaves).boxed();
        if depth == 0 {
            return leaf;
        }
        let sub = open_type(vars.clone(), depth - 1);
        let mut bound = vars.clone();
        let binder = ["a", "b", "c"][vars.len() % 3];
        bound.push(binder);
        prop_oneof![
            2 => leaf,
            1 => (sub.clone(), sub.clone()).prop_map(|(a, b)| Type::prod(a, b)),
            1 => (sub.clone(), sub.clone()).prop_map(|(a, b)| Type::sum(a, b)),
            1 => (sub.clone(), sub.clone()).prop_map(|(a, b)| Type::arrow(a, b)),
            1 => sub.clone().prop_map(Type::later),
            1 => open_type(vec![], depth - 1).prop_map(Type::boxed),
            1 => open_type(bound, depth - 1).prop_map(move |a| Type::mu(binder, a)),
        ]
        .boxed()
    }

    /// `(A, B, alpha)` with `alpha` possibly free in `A`.
    pub fn triple() -> impl Strategy<Value = (Type, Type, &'static str)> {
        (open_type(vec!["a", "b"], 4), open_type(vec!["b"], 3), Just("a"))
    }
}

/// Every prelude definition with its declared type.
pub const PRELUDE_TYPES: [(&str, &str); 55] = [
    ("cons", "Nat -> |>(mu a. Nat * |>a) -> mu a. Nat * |>a"),
    ("head", "(mu a. Nat * |>a) -> Nat"),
    ("tail", "(mu a. Nat * |>a) -> |>(mu a. Nat * |>a)"),
    ("second", "(mu a. Nat * |>a) -> |>Nat"),
    ("third", "(mu a. Nat * |>a) -> |>|>Nat"),
    ("zeros", "mu a. Nat * |>a"),
    ("map", "(Nat -> Nat) -> (mu a. Nat * |>a) -> mu a. Nat * |>a"),
    ("iterate", "|>(Nat -> Nat) -> Nat -> mu a. Nat * |>a"),
    ("iterate'", "(Nat -> Nat) -> Nat -> mu a. Nat * |>a"),
    ("interleave", "(mu a. Nat * |>a) -> |>(mu a. Nat * |>a) -> mu a. Nat * |>a"),
    ("interleave'", "(mu a. Nat * |>a) -> (mu a. Nat * |>a) -> mu a. Nat * |>a"),
    ("toggle", "mu a. Nat * |>a"),
    ("paperfolds", "mu a. Nat * |>a"),
    ("initial", "((Nat * |>(mu a. Nat * |>a)) -> mu a. Nat * |>a) -> (mu a. Nat * |>a) -> mu a. Nat * |>a"),
    ("final", "(Nat -> Nat * |>Nat) -> Nat -> mu a. Nat * |>a"),
    ("coCons", "Nat -> #(mu a. Nat * |>a) -> #(mu a. Nat * |>a)"),
    ("coHead", "#(mu a. Nat * |>a) -> Nat"),
    ("coTail", "#(mu a. Nat * |>a) -> #(mu a. Nat * |>a)"),
    ("coSecond", "#(mu a. Nat * |>a) -> Nat"),
    ("lim", "#((mu a. Nat * |>a) -> mu a. Nat * |>a) -> #(mu a. Nat * |>a) -> #(mu a. Nat * |>a)"),
    ("lift", "#((mu a. Nat * |>a) -> mu a. Nat * |>a) -> #(mu a. Nat * |>a) -> #(mu a. Nat * |>a)"),
    (
        "lift2",
        "#((mu a. Nat * |>a) -> (mu a. Nat * |>a) -> mu a. Nat * |>a) -> #(mu a. Nat * |>a) -> #(mu a. Nat * |>a) -> #(mu a. Nat * |>a)",
    ),
    ("mapConst", "(Nat -> Nat) -> #(mu a. Nat * |>a) -> #(mu a. Nat * |>a)"),
    ("every2nd", "#(mu a. Nat * |>a) -> mu a. Nat * |>a"),
    ("every2ndBox", "#(mu a. Nat * |>a) -> #(mu a. Nat * |>a)"),
    ("coHeadS", "#(mu b. #(mu a. Nat * |>a) * |>b) -> #(mu a. Nat * |>a)"),
    ("coTailS", "#(mu b. #(mu a. Nat * |>a) * |>b) -> #(mu b. #(mu a. Nat * |>a) * |>b)"),
    ("diag", "#(mu b. #(mu a. Nat * |>a) * |>b) -> mu a. Nat * |>a"),
    ("join", "#(mu b. #(mu a. Nat * |>a) * |>b) -> #(mu a. Nat * |>a)"),
    ("cozero", "mu a. Unit + |>a"),
    ("cosucc", "(mu a. Unit + |>a) -> mu a. Unit + |>a"),
    ("infinity", "mu a. Unit + |>a"),
    ("predg", "(mu a. Unit + |>a) -> Unit + |>(mu a. Unit + |>a)"),
    ("pred", "#(mu a. Unit + |>a) -> Unit + #(mu a. Unit + |>a)"),
    ("consB", "Unit + Unit -> |>(mu a. (Unit + Unit) * |>a) -> mu a. (Unit + Unit) * |>a"),
    ("headB", "(mu a. (Unit + Unit) * |>a) -> Unit + Unit"),
    ("tailB", "(mu a. (Unit + Unit) * |>a) -> |>(mu a. (Unit + Unit) * |>a)"),
    ("notB", "Unit + Unit -> Unit + Unit"),
    ("bitToNat", "Unit + Unit -> Nat"),
    ("bitsToNat", "(mu a. (Unit + Unit) * |>a) -> mu a. Nat * |>a"),
    ("thueH", "(mu a. (Unit + Unit) * |>a) -> mu a. (Unit + Unit) * |>a"),
    ("thueHTail", "(mu a. (Unit + Unit) * |>a) -> mu a. (Unit + Unit) * |>a"),
    ("thuemorseB", "mu a. (Unit + Unit) * |>a"),
    ("thuemorse", "mu a. Nat * |>a"),
    ("fibF", "(mu a. (Unit + Unit) * |>a) -> mu a. (Unit + Unit) * |>a"),
    ("fibonacciB", "mu a. (Unit + Unit) * |>a"),
    ("fibonacci", "mu a. Nat * |>a"),
    ("GStr", "mu a. Nat * |>a"),
    ("Str", "#(mu a. Nat * |>a)"),
    ("GCoNat", "mu a. Unit + |>a"),
    ("CoNat", "#(mu a. Unit + |>a)"),
    ("GStrStr", "mu b. #(mu a. Nat * |>a) * |>b"),
    ("StrStr", "#(mu b. #(mu a. Nat * |>a) * |>b)"),
    ("Bool", "Unit + Unit"),
    ("BStr", "mu a. (Unit + Unit) * |>a"),
];

/// Source generators for well-typed terms over the corpus scope. `free`
/// names extra variables of types Nat and GStr, which may occur anywhere
/// except under `box` and `prev`.
pub mod src {
    use proptest::prelude::*;

    pub type Free = Option<(&'static str, &'static str)>;

    fn arith() -> impl Strategy<Value = String> {
        prop_oneof![Just("succ n"), Just("addN n 2"), Just("mulN n 2"), Just("0")].prop_map(String::from)
    }

    fn leaves(base: Vec<&'static str>, extra: Option<&'static str>) -> BoxedStrategy<String> {
        let mut all = base;
        all.extend(extra);
        proptest::sample::select(all).prop_map(String::from).boxed()
    }

    pub fn nat(depth: u32) -> BoxedStrategy<String> {
        nat_in(depth, None)
    }

    pub fn stream(depth: u32) -> BoxedStrategy<String> {
        stream_in(depth, None)
    }

    /// Terms of type Nat.
    pub fn nat_in(depth: u32, free: Free) -> BoxedStrategy<String> {
        let leaf = leaves(vec!["0", "1", "2", "3", "4", "5"], free.map(|f| f.0));
        if depth == 0 {
            return leaf;
        }
        let n = nat_in(depth - 1, free);
        let s = stream_in(depth - 1, free);
        let closed = stream_in(depth - 1, None);
        prop_oneof![
            2 => leaf,
            1 => (n.clone(), n.clone()).prop_map(|(a, b)| format!("addN ({a}) ({b})")),
            1 => (n.clone(), n.clone()).prop_map(|(a, b)| format!("mulN ({a}) ({b})")),
            1 => n.clone().prop_map(|a| format!("succ ({a})")),
            1 => n.clone().prop_map(|a| format!("(\\(x : Nat). addN x x) ({a})")),
            1 => (n.clone(), n.clone()).prop_map(|(a, b)| format!("snd (({a}), ({b}))")),
            1 => n.clone().prop_map(|a| format!("case (inl ({a}) : Nat + Unit) of inl x -> succ x | inr u -> 0")),
            2 => s.prop_map(|s| format!("head ({s})")),
            1 => closed.clone().prop_map(|s| format!("prev. second ({s})")),
            2 => (closed, 0usize..4).prop_map(|(s, k)| {
                let tails = (0..k).fold(format!("(box. {s})"), |acc, _| format!("coTail ({acc})"));
                format!("coHead ({tails})")
            }),
        ]
        .boxed()
    }

    /// Terms of type GStr.
    pub fn stream_in(depth: u32, free: Free) -> BoxedStrategy<String> {
        let leaf = leaves(vec!["zeros", "toggle", "paperfolds", "nats"], free.map(|f| f.1));
        if depth == 0 {
            return leaf;
        }
        let n = nat_in(depth - 1, free);
        let s = stream_in(depth - 1, free);
        let closed = stream_in(depth - 1, None);
        prop_oneof![
            2 => leaf,
            1 => (arith(), s.clone()).prop_map(|(f, s)| format!("map (\\n. {f}) ({s})")),
            1 => (s.clone(), s.clone()).prop_map(|(a, b)| format!("interleave' ({a}) ({b})")),
            1 => (s.clone(), s.clone()).prop_map(|(a, b)| format!("interleave ({a}) (next ({b}))")),
            1 => (n.clone(), s.clone()).prop_map(|(a, s)| format!("cons ({a}) (next ({s}))")),
            1 => (arith(), n).prop_map(|(f, a)| format!("iterate' (\\n. {f}) ({a})")),
            1 => closed.prop_map(|s| format!("every2nd (box. {s})")),
        ]
        .boxed()
    }
}
