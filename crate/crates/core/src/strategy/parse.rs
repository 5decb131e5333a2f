//! Textual strategies in the notation of the default pipeline, e.g.
//! `exhaustive ((inline(decreasing); usableRules) <> cfaDCE)`.
//!
//! `;` binds weakest, then `<>`, then the prefix `exhaustive`. The names
//! `simplify`, `simpATRS`, `toTRS` and `simpTRS` stand for the default
//! blocks.

use super::{Prim, Strategy};
use crate::transforms::InliningPredicate;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("strategy syntax error at offset {offset}: {message}")]
pub struct ParseStrategyError {
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Semi,
    Choice,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseStrategyError> {
    let mut out = Vec::new();
    let bytes = src.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            _ if c.is_whitespace() => i += 1,
            '(' => {
                out.push((i, Tok::LParen));
                i += 1;
            }
            ')' => {
                out.push((i, Tok::RParen));
                i += 1;
            }
            ';' => {
                out.push((i, Tok::Semi));
                i += 1;
            }
            '<' if src[i..].starts_with("<>") => {
                out.push((i, Tok::Choice));
                i += 2;
            }
            _ if c.is_ascii_alphabetic() => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'-' || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(src[start..i].to_string())));
            }
            _ => return Err(ParseStrategyError { offset: i, message: format!("unexpected character `{c}`") }),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseStrategyError> {
        Err(ParseStrategyError { offset: self.offset(), message: message.into() })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseStrategyError> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn seq(&mut self) -> Result<Strategy, ParseStrategyError> {
        let mut parts = vec![self.choice()?];
        while self.peek() == Some(&Tok::Semi) {
            self.pos += 1;
            parts.push(self.choice()?);
        }
        Ok(Strategy::seq(parts))
    }

    fn choice(&mut self) -> Result<Strategy, ParseStrategyError> {
        let mut s = self.unary()?;
        while self.peek() == Some(&Tok::Choice) {
            self.pos += 1;
            s = Strategy::choice(s, self.unary()?);
        }
        Ok(s)
    }

    fn unary(&mut self) -> Result<Strategy, ParseStrategyError> {
        match self.peek() {
            Some(Tok::Ident(w)) if w == "exhaustive" => {
                self.pos += 1;
                Ok(Strategy::exhaustive(self.unary()?))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Strategy, ParseStrategyError> {
        let Some(tok) = self.peek().cloned() else { return self.err("unexpected end of strategy") };
        match tok {
            Tok::LParen => {
                self.pos += 1;
                let s = self.seq()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(s)
            }
            Tok::Ident(w) => {
                let s = match w.as_str() {
                    "inline" => {
                        self.pos += 1;
                        self.expect(Tok::LParen, "`(` after inline")?;
                        let Some(Tok::Ident(p)) = self.peek().cloned() else {
                            return self.err("expected an inlining predicate");
                        };
                        let Some(pred) = InliningPredicate::parse(&p) else {
                            let names: Vec<&str> = InliningPredicate::ALL.iter().map(|p| p.name()).collect();
                            return self.err(format!("unknown inlining predicate `{p}`, expected one of {}", names.join(", ")));
                        };
                        self.pos += 1;
                        self.expect(Tok::RParen, "`)`")?;
                        return Ok(Strategy::Prim(Prim::Inline(pred)));
                    }
                    "usableRules" => Strategy::Prim(Prim::UsableRules),
                    "cfa" => Strategy::Prim(Prim::Cfa),
                    "cfaDCE" => Strategy::Prim(Prim::CfaDce),
                    "uncurry" => Strategy::Prim(Prim::Uncurry),
                    "id" => Strategy::Prim(Prim::Id),
                    "simplify" => Strategy::simplify(),
                    "simpATRS" => Strategy::stage("simpATRS", Strategy::simp_atrs()),
                    "toTRS" => Strategy::stage("toTRS", Strategy::to_trs()),
                    "simpTRS" => Strategy::stage("simpTRS", Strategy::simp_trs()),
                    _ => return self.err(format!("unknown transformation `{w}`")),
                };
                self.pos += 1;
                Ok(s)
            }
            _ => self.err("expected a transformation"),
        }
    }
}

pub fn parse_strategy(src: &str) -> Result<Strategy, ParseStrategyError> {
    let mut p = Parser { toks: lex(src)?, pos: 0, end: src.len() };
    let s = p.seq()?;
    if p.pos < p.toks.len() {
        return p.err("trailing input");
    }
    Ok(s)
}
