//! Recursive-descent parser. Precedence `!` > `&` > `|` > `=>` (right associative);
//! a quantifier's scope extends as far right as possible.

use super::{Formula, LogicError};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Dot,
    Amp,
    Bar,
    Implies,
    Arrow,
    Eq,
    Neq,
    Bang,
    LParen,
    RParen,
    End,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, LogicError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let two = bytes.get(i..i + 2);
        let (tok, len) = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'.' => (Tok::Dot, 1),
            b'&' => (Tok::Amp, 1),
            b'|' => (Tok::Bar, 1),
            b'(' => (Tok::LParen, 1),
            b')' => (Tok::RParen, 1),
            b'=' if two == Some(b"=>") => (Tok::Implies, 2),
            b'=' => (Tok::Eq, 1),
            b'-' if two == Some(b"->") => (Tok::Arrow, 2),
            b'!' if two == Some(b"!=") => (Tok::Neq, 2),
            b'!' => (Tok::Bang, 1),
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let end = bytes[i..]
                    .iter()
                    .position(|&d| !(d.is_ascii_alphanumeric() || d == b'_' || d == b'\''))
                    .map_or(bytes.len(), |p| i + p);
                out.push((i, Tok::Ident(text[i..end].to_string())));
                i = end;
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(LogicError::Syntax { pos: i, msg: format!("unexpected character {ch:?}") });
            }
        };
        out.push((i, tok));
        i += len;
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

const KEYWORDS: [&str; 5] = ["exists", "forall", "existsS", "forallS", "in"];

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if t != Tok::End {
            self.at += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, LogicError> {
        Err(LogicError::Syntax { pos: self.pos(), msg: msg.into() })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), LogicError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn var(&mut self) -> Result<String, LogicError> {
        match self.peek().clone() {
            Tok::Ident(name) if !KEYWORDS.contains(&name.as_str()) => {
                self.bump();
                Ok(name)
            }
            _ => self.err("expected a variable"),
        }
    }

    fn implies(&mut self) -> Result<Formula, LogicError> {
        let left = self.or()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            Ok(left.implies(self.implies()?))
        } else {
            Ok(left)
        }
    }

    fn or(&mut self) -> Result<Formula, LogicError> {
        let mut f = self.and()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            f = f.or(self.and()?);
        }
        Ok(f)
    }

    fn and(&mut self) -> Result<Formula, LogicError> {
        let mut f = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            f = f.and(self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula, LogicError> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(self.unary()?.not())
            }
            Tok::LParen => {
                self.bump();
                let f = self.implies()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(f)
            }
            Tok::Ident(kw) if matches!(kw.as_str(), "exists" | "forall" | "existsS" | "forallS") => {
                self.bump();
                let v = self.var()?;
                self.expect(Tok::Dot, "'.' after the bound variable")?;
                let body = Box::new(self.implies()?);
                Ok(match kw.as_str() {
                    "exists" => Formula::Exists(v, body),
                    "forall" => Formula::Forall(v, body),
                    "existsS" => Formula::ExistsSet(v, body),
                    _ => Formula::ForallSet(v, body),
                })
            }
            Tok::Ident(_) => {
                let x = self.var()?;
                match self.bump() {
                    Tok::Arrow => Ok(Formula::Edge(x, self.var()?)),
                    Tok::Eq => Ok(Formula::Eq(x, self.var()?)),
                    Tok::Neq => Ok(Formula::Eq(x, self.var()?).not()),
                    Tok::Ident(kw) if kw == "in" => Ok(Formula::In(x, self.var()?)),
                    _ => {
                        self.at -= 1;
                        self.err("expected '->', '=', '!=' or 'in'")
                    }
                }
            }
            Tok::End => self.err("unexpected end of input"),
            _ => self.err("expected a formula"),
        }
    }
}

/// Parses the concrete syntax; the result is not checked for closedness (see [`Formula::check`]).
pub fn parse_formula(text: &str) -> Result<Formula, LogicError> {
    let mut p = Parser { toks: lex(text)?, at: 0 };
    let f = p.implies()?;
    if *p.peek() != Tok::End {
        return p.err("trailing input");
    }
    Ok(f)
}
