use std::io::{self, BufRead, Write};
use std::path::Path;

use glam_core::denot::Index;
use glam_core::frontend::{pretty_term, pretty_type};
use glam_core::machine::step;
use glam_core::syntax::strip_ascriptions;

use crate::{spaced, CliError, Session};

const HELP: &str = "\
:t e         type of e
:step e      one reduction step of e
:take n e    first n elements of the stream e
:den i e     denotation of e at stage i
:load f      load the definitions of file f
:q           quit
def x : T = e;  add a definition
e            evaluate e";

/// What a line asks the loop to do next.
#[derive(Debug, PartialEq)]
pub enum Reply {
    Output(String),
    Quit,
}

pub struct Repl {
    pub session: Session,
}

fn split_count<T: std::str::FromStr>(rest: &str, what: &str) -> Result<(T, String), CliError> {
    let rest = rest.trim_start();
    let (n, e) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
    let n = n
        .parse()
        .map_err(|_| CliError::Usage(format!("expected {what}, got `{n}`")))?;
    Ok((n, e.trim().to_string()))
}

impl Repl {
    pub fn new(session: Session) -> Repl {
        Repl { session }
    }

    /// Respond to one line of input.
    pub fn handle(&mut self, line: &str) -> Result<Reply, CliError> {
        let line = line.trim();
        let (cmd, rest) = match line.strip_prefix(':') {
            Some(c) => c.split_once(char::is_whitespace).unwrap_or((c, "")),
            None => ("", line),
        };
        let rest = rest.trim();
        let s = &mut self.session;
        let out = match cmd {
            "" if rest.is_empty() => String::new(),
            "" if rest.starts_with("def ") || rest.starts_with("type ") => s
                .load_text(rest)?
                .iter()
                .map(|d| format!("{} : {}", d.name, pretty_type(&d.ty)))
                .collect::<Vec<_>>()
                .join("\n"),
            "" => {
                let (t, ty) = s.expression(rest)?;
                format!("{} : {}", s.value(&t, &ty)?, pretty_type(&ty))
            }
            "t" | "type" => {
                let (_, ty) = s.expression(rest)?;
                format!("{rest} : {}", pretty_type(&ty))
            }
            "step" => {
                let (t, _) = s.expression(rest)?;
                match step(&strip_ascriptions(&t)) {
                    Some(u) => pretty_term(&u),
                    None => "no step".to_string(),
                }
            }
            "take" => {
                let (n, e) = split_count::<usize>(rest, "a count")?;
                let (t, ty) = s.expression(&e)?;
                spaced(&s.take(&t, &ty, &e, n)?)
            }
            "den" => {
                let (i, e) = split_count::<Index>(rest, "an index")?;
                let (t, ty) = s.expression(&e)?;
                s.denote(&t, &ty, i)?
            }
            "load" => s
                .load_file(Path::new(rest))?
                .iter()
                .map(|d| format!("{} : {}", d.name, pretty_type(&d.ty)))
                .collect::<Vec<_>>()
                .join("\n"),
            "q" | "quit" => return Ok(Reply::Quit),
            "h" | "help" | "?" => HELP.to_string(),
            other => return Err(CliError::Usage(format!("unknown command `:{other}`; try :help"))),
        };
        Ok(Reply::Output(out))
    }

    /// Read lines until end of input or `:q`. Errors are reported and the
    /// loop continues.
    pub fn run(&mut self, input: &mut dyn BufRead, out: &mut dyn Write) -> io::Result<()> {
        let mut line = String::new();
        loop {
            write!(out, "glam> ")?;
            out.flush()?;
            line.clear();
            if input.read_line(&mut line)? == 0 {
                writeln!(out)?;
                return Ok(());
            }
            match self.handle(&line) {
                Ok(Reply::Quit) => return Ok(()),
                Ok(Reply::Output(s)) if s.is_empty() => {}
                Ok(Reply::Output(s)) => writeln!(out, "{s}")?,
                Err(e) => writeln!(out, "error[{}] {}", e.code(), e)?,
            }
        }
    }
}
