//! One line per acceptance criterion: verdict, wall time against its bound,
//! and what was checked. Exits nonzero if any criterion fails.

mod common;

use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;
use std::rc::Rc;
use std::time::{Duration, Instant};

use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;

use glam_core::bde::{compile_bde, load_bde, oracle_eval, standard_stream};
use glam_core::denot::{den_nat, den_take};
use glam_core::machine::{eval, is_value, observe_nat, step, take_stream, trace, Strategy as Search, DEFAULT_FUEL};
use glam_core::prelude::load_with_prelude;
use glam_core::syntax::{alpha_eq, type_alpha_eq, Term};
use glam_core::typing::{box_depth, check, guarded_in, unguarded_size, TypingContext};

use common::{elab, fix_parts, gen, loaded, nats, observe, ty, Sample, PRELUDE_TYPES};

type Verdict = Result<String, String>;

/// Title, time bound in seconds, check.
type Criterion = (&'static str, u64, fn() -> Verdict);

const TRACE_CAP: usize = 5_000;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn prelude_types() -> Verdict {
    let l = loaded();
    for (name, want) in PRELUDE_TYPES {
        let got = match l.checked.get(name) {
            Some(d) => d.ty.clone(),
            None => l.source.alias(name).cloned().ok_or(format!("`{name}` is missing"))?,
        };
        ensure(type_alpha_eq(&got, &ty(want)), || format!("`{name}` has type {got}, expected {want}"))?;
    }
    let defs = glam_core::prelude::checked_prelude().len();
    Ok(format!("{} pinned names, {defs} definitions checked", PRELUDE_TYPES.len()))
}

fn rejections() -> Verdict {
    let dir = root().join("programs/rejected");
    let mut names = Vec::new();
    for entry in fs::read_dir(&dir).map_err(|e| e.to_string())? {
        let path = entry.map_err(|e| e.to_string())?.path();
        let text = fs::read_to_string(&path).map_err(|e| e.to_string())?;
        let want = text
            .lines()
            .find_map(|l| l.strip_prefix("-- expect: "))
            .ok_or(format!("{} has no expectation", path.display()))?;
        let got = match load_with_prelude(&text) {
            Ok(_) => return Err(format!("{} was accepted", path.display())),
            Err(e) => e.code(),
        };
        ensure(got == want, || format!("{}: {got}, expected {want}", path.display()))?;
        names.push(path.file_stem().unwrap().to_string_lossy().into_owned());
    }
    for required in ["paperfolds_prime", "circular", "box_later_mu", "later_box_mu", "nonconstant_prev"] {
        ensure(names.iter().any(|n| n == required), || format!("`{required}` is not in the corpus"))?;
    }
    Ok(format!("{} programs rejected with their expected codes", names.len()))
}

fn corpus() -> Vec<Sample> {
    common::all()
}

fn subject_reduction() -> Verdict {
    let ctx = TypingContext::new();
    let mut steps = 0;
    for s in corpus() {
        let tr = trace(&s.term, TRACE_CAP);
        for (k, u) in tr.iter().enumerate() {
            check(&ctx, u, &s.ty).map_err(|e| format!("{} after {k} steps: {e}", s.name))?;
        }
        steps += tr.len() - 1;
    }
    ensure(steps >= 10_000, || format!("only {steps} steps"))?;
    Ok(format!("{steps} steps preserve their type"))
}

fn determinism() -> Verdict {
    let (mut steps, mut terms) = (0, 0);
    for s in corpus() {
        for u in trace(&s.term, TRACE_CAP) {
            let a = Search::Descent.step(&u);
            let b = Search::Decomposition.step(&u);
            let same = match (&a, &b) {
                (Some(x), Some(y)) => alpha_eq(x, y),
                (None, None) => true,
                _ => false,
            };
            ensure(same, || format!("{}: strategies disagree on {u}", s.name))?;
            ensure(is_value(&u) == step(&u).is_none(), || format!("{}: {u} is stuck", s.name))?;
            steps += 1;
        }
        let out = eval(&s.term, DEFAULT_FUEL);
        ensure(out.clone().into_value().is_ok(), || format!("{}: no value within fuel", s.name))?;
        terms += 1;
    }
    Ok(format!("{steps} terms compared, {terms} closed terms reach values"))
}

fn adequacy() -> Verdict {
    let ns = nats();
    ensure(ns.len() >= 100, || format!("only {} Nat terms", ns.len()))?;
    for s in &ns {
        let d = den_nat(&s.term, 1).map_err(|e| format!("{}: {e}", s.name))?;
        let o = observe_nat(&s.term, DEFAULT_FUEL).map_err(|e| format!("{}: {e}", s.name))?;
        ensure(d == o, || format!("{}: denotes {d}, evaluates to {o}", s.name))?;
    }
    Ok(format!("{} Nat terms agree", ns.len()))
}

fn soundness() -> Verdict {
    let mut steps = 0;
    for s in nats() {
        let tr = trace(&s.term, TRACE_CAP);
        let d0 = den_nat(&tr[0], 1).map_err(|e| format!("{}: {e}", s.name))?;
        for (k, u) in tr.iter().enumerate().skip(1) {
            let d = den_nat(u, 1).map_err(|e| format!("{} step {k}: {e}", s.name))?;
            ensure(d == d0, || format!("{} step {k}: {d} != {d0}", s.name))?;
        }
        steps += tr.len() - 1;
    }
    Ok(format!("denotation constant over {steps} steps"))
}

fn stream_agreement() -> Verdict {
    let rows: [(&str, Option<&[u64]>); 8] = [
        ("zeros", Some(&[0; 8])),
        ("toggle", Some(&[1, 0, 1, 0, 1, 0, 1, 0])),
        ("paperfolds", Some(&[1, 1, 0, 1, 1, 0, 0, 1])),
        ("map (\\n. succ n) zeros", Some(&[1; 8])),
        ("interleave toggle (next paperfolds)", None),
        ("iterate' (\\n. succ n) 0", Some(&[0, 1, 2, 3, 4, 5, 6, 7])),
        ("every2nd (box. iterate' (\\n. succ n) 0)", Some(&[0, 2, 4, 6, 8, 10, 12, 14])),
        ("diag grid", Some(&[0, 2, 4, 6, 8, 10, 12, 14])),
    ];
    for (src, want) in rows {
        let t = elab(src, "GStr");
        for i in 1..=8u32 {
            let d = den_take(&t, i).map_err(|e| format!("{src} at {i}: {e}"))?;
            let o = take_stream(&t, i as usize, DEFAULT_FUEL).map_err(|e| format!("{src} at {i}: {e}"))?;
            ensure(d == o, || format!("{src} at {i}: {d:?} != {o:?}"))?;
            if let Some(w) = want {
                ensure(o == w[..i as usize], || format!("{src}: {o:?}"))?;
            }
        }
    }
    Ok(format!("{} streams agree at stages 1..8", rows.len()))
}

fn bde_suite() -> Verdict {
    let text = fs::read_to_string(root().join("programs/streams.bde")).map_err(|e| e.to_string())?;
    let defs = load_bde(&text).map_err(|e| e.to_string())?;
    let args = ["zeros", "toggle", "nats"].map(|n| standard_stream(n).expect("standard stream"));
    let mut runs = 0;
    for d in &defs {
        let c = compile_bde(&defs, &d.name).map_err(|e| e.to_string())?;
        let tuples = (0..d.arity).fold(vec![vec![]], |acc: Vec<Vec<usize>>, _| {
            acc.iter()
                .flat_map(|t| (0..args.len()).map(move |i| [t.clone(), vec![i]].concat()))
                .collect()
        });
        for tuple in tuples {
            let picked: Vec<_> = tuple.iter().map(|&i| &args[i]).collect();
            let term = Term::apps(c.guarded.clone(), picked.iter().map(|a| a.term.clone()));
            let got = take_stream(&term, 10, DEFAULT_FUEL).map_err(|e| format!("{}: {e}", d.name))?;
            let hosts = picked.iter().map(|a| a.host.clone()).collect();
            let want = oracle_eval(&defs, &d.name, hosts, 10).map_err(|e| e.to_string())?;
            let names: Vec<_> = picked.iter().map(|a| a.name).collect();
            ensure(got == want, || format!("{}{names:?}: {got:?} != {want:?}", d.name))?;
            runs += 1;
        }
    }
    let times = compile_bde(&defs, "times").map_err(|e| e.to_string())?;
    let toggle = standard_stream("toggle").expect("toggle");
    let t = Term::apps(times.guarded, [toggle.term.clone(), toggle.term]);
    let got = take_stream(&t, 6, DEFAULT_FUEL).map_err(|e| e.to_string())?;
    ensure(got == [1, 0, 2, 0, 3, 0], || format!("times(toggle, toggle) = {got:?}"))?;
    Ok(format!("{} equations, {runs} argument tuples agree with the oracle", defs.len()))
}

fn fixed_points() -> Verdict {
    let mut names = Vec::new();
    for d in loaded().checked.iter() {
        let Some((a, phi)) = fix_parts(&d.term) else { continue };
        let unrolled = Term::app(phi, Term::next(d.term.clone()));
        let (l, r) = (observe(&d.term, &a, 5), observe(&unrolled, &a, 5));
        ensure(l == r, || format!("{}: {l} != {r}", d.name))?;
        names.push(d.name.to_string());
    }
    ensure(names.len() >= 10, || format!("only {} fix-defined terms: {names:?}", names.len()))?;
    Ok(format!("{} fix-defined terms: {}", names.len(), names.join(", ")))
}

fn metric_lemmas() -> Verdict {
    let mut runner = TestRunner::deterministic();
    let strategy = gen::triple();
    let (mut guarded, mut shallow, mut drawn) = (0, 0, 0);
    while (guarded < 1_000 || shallow < 1_000) && drawn < 200_000 {
        let (a, b, alpha) = strategy.new_tree(&mut runner).map_err(|e| e.to_string())?.current();
        drawn += 1;
        let sub = a.subst(alpha, &b);
        if guarded_in(alpha, &a) {
            guarded += 1;
            ensure(unguarded_size(&sub) <= unguarded_size(&a), || {
                format!("unguarded size grows: A = {a}, B = {b}")
            })?;
        }
        if box_depth(&b) <= box_depth(&a) {
            shallow += 1;
            ensure(box_depth(&sub) <= box_depth(&a), || format!("box depth grows: A = {a}, B = {b}"))?;
        }
    }
    ensure(guarded >= 1_000 && shallow >= 1_000, || format!("only {guarded}/{shallow} instances"))?;
    Ok(format!("{drawn} triples: {guarded} guarded, {shallow} with bd(B) <= bd(A)"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("prelude types match the pinned table", 1, prelude_types),
        ("ill-typed programs are rejected", 1, rejections),
        ("subject reduction", 30, subject_reduction),
        ("determinism and normalisation", 30, determinism),
        ("adequacy at Nat", 10, adequacy),
        ("denotation is constant along reduction", 10, soundness),
        ("stream approximations agree", 10, stream_agreement),
        ("compiled equations agree with the oracle", 10, bde_suite),
        ("fixed-point unfolding", 10, fixed_points),
        ("unguarded size and box depth lemmas", 5, metric_lemmas),
    ];
    // Panics are reported through the verdict line.
    std::panic::set_hook(Box::new(|_| {}));
    // Warm the shared corpus so its one-off parse is not billed to criterion 1.
    let _ = Rc::strong_count(&loaded());
    let mut failed = 0;
    for (i, (title, secs, run)) in criteria.into_iter().enumerate() {
        let bound = Duration::from_secs(secs);
        let start = Instant::now();
        let verdict = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".to_string()))
        });
        let took = start.elapsed();
        let (ok, detail) = match verdict {
            Ok(d) if took <= bound => (true, d),
            Ok(d) => (false, format!("too slow; {d}")),
            Err(e) => (false, e),
        };
        failed += usize::from(!ok);
        println!(
            "criterion {:>2} {} {title} [{:.2}s / {}s] {detail}",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            secs
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
