use std::fmt;

use super::error::{ParseError, ParseErrorKind, Pos};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Var(String),
    Int(usize),
    Plus,
    Minus,
    Bang,
    At,
    Colon,
    Arrow,
    Amp,
    Semi,
    Comma,
    Dot,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Slash,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Var(s) => write!(f, "variable `{s}`"),
            Tok::Int(n) => write!(f, "integer `{n}`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Minus => f.write_str("`-`"),
            Tok::Bang => f.write_str("`!`"),
            Tok::At => f.write_str("`@`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Arrow => f.write_str("`<-`"),
            Tok::Amp => f.write_str("`&`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::Slash => f.write_str("`/`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Spanned {
    pub tok: Tok,
    pub pos: Pos,
}

pub fn tokenize(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    let mut line = 1;
    let mut col = 1;

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else if c.is_some() {
                col += 1;
            }
            c
        }};
    }

    while let Some(&c) = chars.peek() {
        let pos = Pos { line, column: col };
        if c.is_whitespace() {
            bump!();
            continue;
        }
        let tok = match c {
            '/' => {
                bump!();
                if chars.peek() == Some(&'/') {
                    while let Some(&c) = chars.peek() {
                        if c == '\n' {
                            break;
                        }
                        bump!();
                    }
                    continue;
                }
                Tok::Slash
            }
            '<' => {
                bump!();
                if chars.peek() == Some(&'-') {
                    bump!();
                    Tok::Arrow
                } else {
                    return Err(ParseError::new(
                        ParseErrorKind::Lexical,
                        pos,
                        vec!["`<-`".into()],
                        "`<`".into(),
                    ));
                }
            }
            '+' | '-' | '!' | '@' | ':' | '&' | ';' | ',' | '.' | '(' | ')' | '{' | '}' => {
                bump!();
                match c {
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    '!' => Tok::Bang,
                    '@' => Tok::At,
                    ':' => Tok::Colon,
                    '&' => Tok::Amp,
                    ';' => Tok::Semi,
                    ',' => Tok::Comma,
                    '.' => Tok::Dot,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '{' => Tok::LBrace,
                    _ => Tok::RBrace,
                }
            }
            c if c.is_ascii_digit() => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if !d.is_ascii_digit() {
                        break;
                    }
                    s.push(d);
                    bump!();
                }
                match s.parse() {
                    Ok(n) => Tok::Int(n),
                    Err(_) => {
                        return Err(ParseError::new(
                            ParseErrorKind::Lexical,
                            pos,
                            vec!["integer".into()],
                            format!("`{s}`"),
                        ))
                    }
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if !(d.is_ascii_alphanumeric() || d == '_') {
                        break;
                    }
                    s.push(d);
                    bump!();
                }
                if c.is_ascii_uppercase() || c == '_' {
                    Tok::Var(s)
                } else {
                    Tok::Ident(s)
                }
            }
            other => {
                return Err(ParseError::new(
                    ParseErrorKind::Lexical,
                    pos,
                    vec!["token".into()],
                    format!("character {other:?}"),
                ))
            }
        };
        out.push(Spanned { tok, pos });
    }
    out.push(Spanned {
        tok: Tok::Eof,
        pos: Pos { line, column: col },
    });
    Ok(out)
}
