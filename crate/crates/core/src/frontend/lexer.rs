use super::{ParseError, Pos};

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Ident(String),
    Num(u64),
    Backslash,
    Dot,
    Colon,
    Comma,
    Semi,
    Eq,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    LeftArrow,
    Arrow,
    Later,
    Bar,
    Hash,
    Star,
    Plus,
    Ap,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Num(n) => format!("`{n}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::Backslash => "\\",
            Tok::Dot => ".",
            Tok::Colon => ":",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Eq => "=",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LeftArrow => "<-",
            Tok::Arrow => "->",
            Tok::Later => "|>",
            Tok::Bar => "|",
            Tok::Hash => "#",
            Tok::Star => "*",
            Tok::Plus => "+",
            Tok::Ap => "<*>",
            Tok::Ident(_) | Tok::Num(_) | Tok::Eof => "",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

pub fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

pub fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

/// Split source text into tokens. `--` starts a comment running to the end
/// of the line. The Unicode spellings `λ`, `▶`, `■` and `⊛` are accepted
/// for `\`, `|>`, `#` and `<*>`.
pub fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            advance(1, &mut i, &mut col);
            continue;
        }
        let peek = |k: usize| chars.get(i + k).copied();
        if c == '-' && peek(1) == Some('-') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if is_ident_start(c) {
            let start = i;
            while i < chars.len() && is_ident_char(chars[i]) {
                i += 1;
            }
            col += i - start;
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                pos,
            });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            col += i - start;
            let text: String = chars[start..i].iter().collect();
            let n = text.parse::<u64>().map_err(|_| ParseError::Syntax {
                pos,
                message: format!("numeral `{text}` is too large"),
            })?;
            out.push(Token { tok: Tok::Num(n), pos });
            continue;
        }
        let (tok, len) = match (c, peek(1), peek(2)) {
            ('<', Some('*'), Some('>')) => (Tok::Ap, 3),
            ('<', Some('-'), _) => (Tok::LeftArrow, 2),
            ('-', Some('>'), _) => (Tok::Arrow, 2),
            ('|', Some('>'), _) => (Tok::Later, 2),
            ('|', _, _) => (Tok::Bar, 1),
            ('\\', _, _) | ('λ', _, _) => (Tok::Backslash, 1),
            ('▶', _, _) => (Tok::Later, 1),
            ('■', _, _) => (Tok::Hash, 1),
            ('⊛', _, _) => (Tok::Ap, 1),
            ('.', _, _) => (Tok::Dot, 1),
            (':', _, _) => (Tok::Colon, 1),
            (',', _, _) => (Tok::Comma, 1),
            (';', _, _) => (Tok::Semi, 1),
            ('=', _, _) => (Tok::Eq, 1),
            ('(', _, _) => (Tok::LParen, 1),
            (')', _, _) => (Tok::RParen, 1),
            ('[', _, _) => (Tok::LBracket, 1),
            (']', _, _) => (Tok::RBracket, 1),
            ('{', _, _) => (Tok::LBrace, 1),
            ('}', _, _) => (Tok::RBrace, 1),
            ('#', _, _) => (Tok::Hash, 1),
            ('*', _, _) => (Tok::Star, 1),
            ('+', _, _) => (Tok::Plus, 1),
            _ => {
                return Err(ParseError::Lexical {
                    pos,
                    message: format!("unexpected character `{c}`"),
                })
            }
        };
        out.push(Token { tok, pos });
        advance(len, &mut i, &mut col);
    }
    out.push(Token {
        tok: Tok::Eof,
        pos: Pos { line, col },
    });
    Ok(out)
}
