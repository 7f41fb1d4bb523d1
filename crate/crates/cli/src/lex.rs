//! Tokenizer shared by the definition language and the small literal
//! parsers. Tracks line and column (1-based) per token; `//` starts a
//! comment running to end of line.

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Nat(u64),
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Colon,
    /// `->` (also accepted as `↦` on input).
    Arrow,
    /// `=>`
    FatArrow,
    Plus,
    Minus,
    Star,
    /// `<=`
    Le,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Nat(n) => format!("number `{n}`"),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::FatArrow => "`=>`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Le => "`<=`".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Spanned {
    pub tok: Tok,
    pub line: u32,
    pub col: u32,
}

pub fn lex(input: &str) -> Result<Vec<Spanned>, CliError> {
    let mut out = Vec::new();
    let mut chars = input.chars().peekable();
    let mut line: u32 = 1;
    let mut col: u32 = 1;

    macro_rules! push {
        ($tok:expr, $l:expr, $c:expr) => {
            out.push(Spanned {
                tok: $tok,
                line: $l,
                col: $c,
            })
        };
    }

    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            '/' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'/') {
                    while let Some(&d) = chars.peek() {
                        if d == '\n' {
                            break;
                        }
                        chars.next();
                        col += 1;
                    }
                } else {
                    return Err(CliError::syntax(tline, tcol, "expected `//` comment"));
                }
            }
            '{' => {
                chars.next();
                col += 1;
                push!(Tok::LBrace, tline, tcol);
            }
            '}' => {
                chars.next();
                col += 1;
                push!(Tok::RBrace, tline, tcol);
            }
            '(' => {
                chars.next();
                col += 1;
                push!(Tok::LParen, tline, tcol);
            }
            ')' => {
                chars.next();
                col += 1;
                push!(Tok::RParen, tline, tcol);
            }
            '[' => {
                chars.next();
                col += 1;
                push!(Tok::LBracket, tline, tcol);
            }
            ']' => {
                chars.next();
                col += 1;
                push!(Tok::RBracket, tline, tcol);
            }
            ',' => {
                chars.next();
                col += 1;
                push!(Tok::Comma, tline, tcol);
            }
            ';' => {
                chars.next();
                col += 1;
                push!(Tok::Semi, tline, tcol);
            }
            ':' => {
                chars.next();
                col += 1;
                push!(Tok::Colon, tline, tcol);
            }
            '+' => {
                chars.next();
                col += 1;
                push!(Tok::Plus, tline, tcol);
            }
            '*' => {
                chars.next();
                col += 1;
                push!(Tok::Star, tline, tcol);
            }
            '↦' => {
                chars.next();
                col += 1;
                push!(Tok::Arrow, tline, tcol);
            }
            '-' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'>') {
                    chars.next();
                    col += 1;
                    push!(Tok::Arrow, tline, tcol);
                } else {
                    push!(Tok::Minus, tline, tcol);
                }
            }
            '=' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'>') {
                    chars.next();
                    col += 1;
                    push!(Tok::FatArrow, tline, tcol);
                } else {
                    return Err(CliError::syntax(tline, tcol, "expected `=>`"));
                }
            }
            '<' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'=') {
                    chars.next();
                    col += 1;
                    push!(Tok::Le, tline, tcol);
                } else {
                    return Err(CliError::syntax(tline, tcol, "expected `<=`"));
                }
            }
            c if c.is_ascii_digit() => {
                let mut n: u64 = 0;
                while let Some(&d) = chars.peek() {
                    if let Some(v) = d.to_digit(10) {
                        n = n
                            .checked_mul(10)
                            .and_then(|n| n.checked_add(u64::from(v)))
                            .ok_or_else(|| {
                                CliError::syntax(tline, tcol, "number does not fit in 64 bits")
                            })?;
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                push!(Tok::Nat(n), tline, tcol);
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        s.push(d);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                push!(Tok::Ident(s), tline, tcol);
            }
            other => {
                return Err(CliError::syntax(
                    tline,
                    tcol,
                    format!("unexpected character `{other}`"),
                ));
            }
        }
    }
    Ok(out)
}
