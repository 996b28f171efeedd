//! The `glam` command line: checking, running and observing programs,
//! compiling stream equations, and an interactive loop.

mod repl;

use std::fmt::Write as _;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::rc::Rc;

use clap::{Parser, Subcommand};
use thiserror::Error;

use glam_core::bde::{self, BdeError, CompiledBde};
use glam_core::denot::{den_closed, den_nat, den_take, DenotError};
use glam_core::frontend::{parse_term_with, pretty_term, pretty_type, ParseError, Program};
use glam_core::machine::{eval, observe_nat, take_stream, EvalError, DEFAULT_FUEL};
use glam_core::prelude::{checked_prelude, load_on, load_prelude, load_standalone, LoadError};
use glam_core::syntax::{type_alpha_eq, Term, Type};
use glam_core::typing::{CheckedDef, CheckedProgram, TypeError};

pub use repl::Repl;

#[derive(Debug, Parser)]
#[command(name = "glam", version, about = "Tools for the guarded lambda-calculus")]
pub struct Cli {
    /// Step budget for evaluation.
    #[arg(long, global = true, env = "GLAM_FUEL", default_value_t = DEFAULT_FUEL)]
    pub fuel: u64,
    /// Load this file instead of the built-in prelude.
    #[arg(long, global = true, value_name = "PATH")]
    pub prelude: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Type-check a program and print the type of each definition.
    Check { path: PathBuf },
    /// Evaluate a definition and print its value.
    Run { path: PathBuf, name: String },
    /// Print the first elements of a stream definition.
    Take {
        path: PathBuf,
        name: String,
        #[arg(value_name = "N")]
        count: Option<usize>,
        #[arg(long = "n", value_name = "N", conflicts_with = "count")]
        n: Option<usize>,
    },
    /// Print the denotation of a definition at a stage.
    Denote {
        path: PathBuf,
        name: String,
        #[arg(value_name = "I")]
        stage: Option<u32>,
        #[arg(long, value_name = "I", conflicts_with = "stage")]
        index: Option<u32>,
    },
    /// Print the guarded and lifted programs of stream equations.
    BdeCompile { path: PathBuf, name: Option<String> },
    /// Compare a compiled stream equation with its host oracle.
    BdeRun {
        path: PathBuf,
        name: String,
        /// Argument streams: zeros, ones, toggle, nats or paperfolds.
        args: Vec<String>,
        #[arg(long = "n", value_name = "N", default_value_t = 10)]
        n: usize,
    },
    /// Start an interactive session.
    Repl {
        /// Files to load first.
        files: Vec<PathBuf>,
    },
}

const DEFAULT_COUNT: usize = 10;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Load(#[from] LoadError),
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Type(#[from] TypeError),
    #[error("{0}")]
    Eval(#[from] EvalError),
    #[error("{0}")]
    Denot(#[from] DenotError),
    #[error("{0}")]
    Bde(#[from] BdeError),
    #[error("no definition named `{0}`")]
    UnknownDefinition(String),
    #[error("`{name}` has type `{ty}`, which is not a stream of numbers")]
    NotAStream { name: String, ty: String },
    #[error("compiled and oracle streams differ")]
    Mismatch,
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "E-IO",
            CliError::Usage(_) => "E-USAGE",
            CliError::Load(e) => e.code(),
            CliError::Parse(e) => e.code(),
            CliError::Type(e) => e.code(),
            CliError::Eval(e) => e.code(),
            CliError::Denot(e) => e.code(),
            CliError::Bde(e) => e.code(),
            CliError::UnknownDefinition(_) => "E-UNDEFINED",
            CliError::NotAStream { .. } => "E-NOTSTREAM",
            CliError::Mismatch => "E-MISMATCH",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Definitions in scope, and the evaluation budget.
#[derive(Clone)]
pub struct Session {
    pub source: Program,
    pub checked: CheckedProgram,
    pub fuel: u64,
}

impl Session {
    /// The built-in prelude.
    pub fn new(fuel: u64) -> Session {
        Session {
            source: load_prelude(),
            checked: (*checked_prelude()).clone(),
            fuel,
        }
    }

    /// The built-in prelude, or the program at `prelude` instead.
    pub fn with_prelude(prelude: Option<&Path>, fuel: u64) -> Result<Session, CliError> {
        match prelude {
            None => Ok(Session::new(fuel)),
            Some(path) => {
                let l = load_standalone(&read(path)?)?;
                Ok(Session {
                    source: l.source,
                    checked: l.checked,
                    fuel,
                })
            }
        }
    }

    /// Add the definitions of `text`; returns the new ones.
    pub fn load_text(&mut self, text: &str) -> Result<Vec<CheckedDef>, CliError> {
        let l = load_on(&self.source, &self.checked, text)?;
        let fresh = l.checked.iter().skip(self.checked.len()).cloned().collect();
        self.source = l.source;
        self.checked = l.checked;
        Ok(fresh)
    }

    pub fn load_file(&mut self, path: &Path) -> Result<Vec<CheckedDef>, CliError> {
        self.load_text(&read(path)?)
    }

    pub fn definition(&self, name: &str) -> Result<&CheckedDef, CliError> {
        self.checked
            .get(name)
            .ok_or_else(|| CliError::UnknownDefinition(name.to_string()))
    }

    /// Parse and elaborate a closed expression; returns it linked, with its
    /// type.
    pub fn expression(&self, src: &str) -> Result<(Rc<Term>, Type), CliError> {
        let t = parse_term_with(src, &self.source.scope(), true)?;
        Ok(self.checked.infer_term(&t)?)
    }

    /// Render the value of `t : ty`.
    pub fn value(&self, t: &Rc<Term>, ty: &Type) -> Result<String, CliError> {
        if *ty == Type::Nat {
            return Ok(observe_nat(t, self.fuel)?.to_string());
        }
        let v = eval(t, self.fuel).into_value()?;
        Ok(pretty_term(&v))
    }

    pub fn take(&self, t: &Rc<Term>, ty: &Type, name: &str, n: usize) -> Result<Vec<u64>, CliError> {
        stream_type(ty, name)?;
        Ok(take_stream(t, n, self.fuel)?)
    }

    pub fn denote(&self, t: &Rc<Term>, ty: &Type, index: u32) -> Result<String, CliError> {
        if *ty == Type::Nat {
            Ok(den_nat(t, index)?.to_string())
        } else if is_stream(ty) {
            Ok(spaced(&den_take(t, index)?))
        } else {
            Ok(den_closed(t, index)?.to_string())
        }
    }
}

fn is_stream(ty: &Type) -> bool {
    type_alpha_eq(ty, &Type::guarded_stream()) || type_alpha_eq(ty, &Type::stream())
}

fn stream_type(ty: &Type, name: &str) -> Result<(), CliError> {
    if is_stream(ty) {
        Ok(())
    } else {
        Err(CliError::NotAStream {
            name: name.to_string(),
            ty: pretty_type(ty),
        })
    }
}

pub fn spaced(xs: &[u64]) -> String {
    xs.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")
}

fn positive<T: Default + PartialEq + Copy>(v: Option<T>, flag: Option<T>, default: T, what: &str) -> Result<T, CliError> {
    let v = v.or(flag).unwrap_or(default);
    if v == T::default() {
        return Err(CliError::Usage(format!("{what} must be positive")));
    }
    Ok(v)
}

fn bde_listing(c: &CompiledBde) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "guarded {} : {}", c.name, pretty_type(&c.guarded_ty));
    let _ = writeln!(s, "  = {}", pretty_term(&c.guarded_source));
    let _ = writeln!(s, "lifted {} : {}", c.name, pretty_type(&c.lifted_ty));
    let _ = writeln!(s, "  = {}", pretty_term(&c.lifted_source));
    s
}

fn bde_run(path: &Path, name: &str, args: &[String], n: usize, fuel: u64) -> Result<(String, bool), CliError> {
    let defs = bde::load_bde(&read(path)?)?;
    let compiled = bde::compile_bde(&defs, name)?;
    let inputs = args
        .iter()
        .map(|a| {
            bde::standard_stream(a).ok_or_else(|| {
                CliError::Usage(format!(
                    "unknown argument stream `{a}`; expected one of {}",
                    bde::STANDARD_STREAMS.join(", ")
                ))
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    if inputs.len() != compiled.arity {
        return Err(CliError::Usage(format!(
            "`{name}` takes {} argument streams, got {}",
            compiled.arity,
            inputs.len()
        )));
    }
    let term = Term::apps(compiled.guarded.clone(), inputs.iter().map(|s| s.term.clone()));
    let got = take_stream(&term, n, fuel)?;
    let want = bde::oracle_eval(&defs, name, inputs.iter().map(|s| s.host.clone()).collect(), n)?;
    let mut out = String::new();
    let _ = writeln!(out, "{:>4}  {:>10}  {:>10}", "i", "compiled", "oracle");
    for (i, (a, b)) in got.iter().zip(&want).enumerate() {
        let _ = writeln!(out, "{i:>4}  {a:>10}  {b:>10}");
    }
    let ok = got == want;
    out += if ok { "MATCH\n" } else { "MISMATCH\n" };
    Ok((out, ok))
}

fn execute(cli: &Cli, input: &mut dyn BufRead, out: &mut dyn Write) -> Result<(), CliError> {
    let session = || Session::with_prelude(cli.prelude.as_deref(), cli.fuel);
    let io = |e: io::Error| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source: e,
    };
    match &cli.command {
        Command::Check { path } => {
            let mut s = session()?;
            for d in s.load_file(path)? {
                writeln!(out, "{} : {}", d.name, pretty_type(&d.ty)).map_err(io)?;
            }
        }
        Command::Run { path, name } => {
            let mut s = session()?;
            s.load_file(path)?;
            let d = s.definition(name)?;
            writeln!(out, "{}", s.value(&d.term, &d.ty)?).map_err(io)?;
        }
        Command::Take { path, name, count, n } => {
            let n = positive(*count, *n, DEFAULT_COUNT, "the number of elements")?;
            let mut s = session()?;
            s.load_file(path)?;
            let d = s.definition(name)?;
            writeln!(out, "{}", spaced(&s.take(&d.term, &d.ty, name, n)?)).map_err(io)?;
        }
        Command::Denote { path, name, stage, index } => {
            let i = positive(*stage, *index, DEFAULT_COUNT as u32, "the index")?;
            let mut s = session()?;
            s.load_file(path)?;
            let d = s.definition(name)?;
            writeln!(out, "{}", s.denote(&d.term, &d.ty, i)?).map_err(io)?;
        }
        Command::BdeCompile { path, name } => {
            let defs = bde::load_bde(&read(path)?)?;
            let compiled = match name {
                Some(name) => vec![bde::compile_bde(&defs, name)?],
                None => bde::compile_all(&defs)?,
            };
            for c in compiled {
                write!(out, "{}", bde_listing(&c)).map_err(io)?;
            }
        }
        Command::BdeRun { path, name, args, n } => {
            if *n == 0 {
                return Err(CliError::Usage("the number of elements must be positive".into()));
            }
            let (table, ok) = bde_run(path, name, args, *n, cli.fuel)?;
            write!(out, "{table}").map_err(io)?;
            if !ok {
                return Err(CliError::Mismatch);
            }
        }
        Command::Repl { files } => {
            let mut repl = Repl::new(session()?);
            for f in files {
                repl.session.load_file(f)?;
            }
            repl.run(input, out).map_err(io)?;
        }
    }
    Ok(())
}

/// Run a parsed command line; returns the exit code.
pub fn run(cli: &Cli, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match execute(cli, input, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error[{}] {}", e.code(), e);
            e.exit_code()
        }
    }
}

/// Parse `args` (including the program name) and run; returns the exit
/// code together with standard output and standard error.
pub fn run_command<I, S>(args: I, stdin: &str) -> (i32, String, String)
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => {
            let (mut out, mut err) = (Vec::new(), Vec::new());
            let code = run(&cli, &mut stdin.as_bytes(), &mut out, &mut err);
            (
                code,
                String::from_utf8_lossy(&out).into_owned(),
                String::from_utf8_lossy(&err).into_owned(),
            )
        }
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                (code, text, String::new())
            } else {
                (code, String::new(), text)
            }
        }
    }
}
