//! Infix printing (`@` left-associative, `x::y`, `[]`) and a small parser
//! for the same notation, used for listings in tests and fixtures.

use std::collections::BTreeSet;
use std::fmt;

use super::atrs::Rule;
use super::term::{Symbol, Term};

pub const NIL: &str = "[]";
pub const CONS: &str = "::";

const P_TOP: u8 = 0;
const P_CONS: u8 = 1;
const P_APP: u8 = 2;
const P_ATOM: u8 = 3;

fn write_term(t: &Term, prec: u8, out: &mut String) {
    match t {
        Term::Var(v) => out.push_str(v.name()),
        Term::Fun(f, args) if f.is_app() => {
            let wrap = prec > P_APP;
            if wrap {
                out.push('(');
            }
            write_term(&args[0], P_APP, out);
            out.push_str(" @ ");
            write_term(&args[1], P_ATOM, out);
            if wrap {
                out.push(')');
            }
        }
        Term::Fun(f, args) if f.name() == CONS && f.arity() == 2 => {
            let wrap = prec > P_CONS;
            if wrap {
                out.push('(');
            }
            write_term(&args[0], P_ATOM, out);
            out.push_str("::");
            write_term(&args[1], P_CONS, out);
            if wrap {
                out.push(')');
            }
        }
        Term::Fun(f, args) => {
            out.push_str(f.name());
            if !args.is_empty() {
                out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    write_term(a, P_TOP, out);
                }
                out.push(')');
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_term(self, P_TOP, &mut s);
        f.write_str(&s)
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Term {
    /// Canonical prefix form with `app(t,s)` for the application symbol.
    pub fn to_prefix(&self) -> String {
        match self {
            Term::Var(v) => v.name().to_string(),
            Term::Fun(f, args) => {
                let name = if f.is_app() { "app" } else { f.name() };
                if args.is_empty() {
                    name.to_string()
                } else {
                    let a: Vec<String> = args.iter().map(Term::to_prefix).collect();
                    format!("{name}({})", a.join(","))
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {msg}")]
pub struct ListingError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Nil,
    Cons,
    At,
    LParen,
    RParen,
    Comma,
    Arrow,
}

fn ident_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '\'' | '#' | '[' | ']')
}

fn lex(src: &str) -> Result<Vec<(Tok, usize, usize)>, ListingError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let mut adv = |n: usize, i: &mut usize| {
            *i += n;
            col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => adv(1, &mut i),
            '(' => {
                out.push((Tok::LParen, l0, c0));
                adv(1, &mut i)
            }
            ')' => {
                out.push((Tok::RParen, l0, c0));
                adv(1, &mut i)
            }
            ',' => {
                out.push((Tok::Comma, l0, c0));
                adv(1, &mut i)
            }
            '@' => {
                out.push((Tok::At, l0, c0));
                adv(1, &mut i)
            }
            ':' if chars.get(i + 1) == Some(&':') => {
                out.push((Tok::Cons, l0, c0));
                adv(2, &mut i)
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                out.push((Tok::Arrow, l0, c0));
                adv(2, &mut i)
            }
            '[' if chars.get(i + 1) == Some(&']') => {
                out.push((Tok::Nil, l0, c0));
                adv(2, &mut i)
            }
            c if ident_char(c) && c != '[' && c != ']' => {
                let start = i;
                while i < chars.len() && ident_char(chars[i]) {
                    i += 1;
                }
                col += i - start;
                out.push((Tok::Ident(chars[start..i].iter().collect()), l0, c0));
            }
            _ => return Err(ListingError { line, col, msg: format!("unexpected character {c:?}") }),
        }
    }
    Ok(out)
}

/// Parsed term before deciding which bare identifiers are variables.
#[derive(Debug, Clone)]
enum Raw {
    Ident(String),
    Fun(String, Vec<Raw>),
    Nil,
    Cons(Box<Raw>, Box<Raw>),
    App(Box<Raw>, Box<Raw>),
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn err(&self, msg: &str) -> ListingError {
        let (line, col) = self
            .toks
            .get(self.pos)
            .map(|t| (t.1, t.2))
            .or_else(|| self.toks.last().map(|t| (t.1, t.2 + 1)))
            .unwrap_or((1, 1));
        ListingError { line, col, msg: msg.to_string() }
    }

    fn expect(&mut self, t: Tok) -> Result<(), ListingError> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected {t:?}")))
        }
    }

    fn term(&mut self) -> Result<Raw, ListingError> {
        let head = self.app()?;
        if self.peek() == Some(&Tok::Cons) {
            self.pos += 1;
            let tail = self.term()?;
            return Ok(Raw::Cons(Box::new(head), Box::new(tail)));
        }
        Ok(head)
    }

    fn app(&mut self) -> Result<Raw, ListingError> {
        let mut t = self.atom()?;
        while self.peek() == Some(&Tok::At) {
            self.pos += 1;
            let r = self.atom()?;
            t = Raw::App(Box::new(t), Box::new(r));
        }
        Ok(t)
    }

    fn atom(&mut self) -> Result<Raw, ListingError> {
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Some(Tok::Nil) => {
                self.pos += 1;
                Ok(Raw::Nil)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if self.peek() == Some(&Tok::LParen) {
                    self.pos += 1;
                    let mut args = vec![self.term()?];
                    while self.peek() == Some(&Tok::Comma) {
                        self.pos += 1;
                        args.push(self.term()?);
                    }
                    self.expect(Tok::RParen)?;
                    Ok(Raw::Fun(name, args))
                } else {
                    Ok(Raw::Ident(name))
                }
            }
            _ => Err(self.err("expected a term")),
        }
    }
}

pub(crate) fn looks_like_var(name: &str) -> bool {
    let mut cs = name.chars();
    matches!(cs.next(), Some(c) if c.is_lowercase() || c == '_')
        && name.chars().all(|c| c.is_alphanumeric() || matches!(c, '_' | '\'' | '#'))
}

fn convert(r: &Raw, is_var: &dyn Fn(&str) -> bool) -> Term {
    match r {
        Raw::Ident(n) if is_var(n) => Term::var(n),
        Raw::Ident(n) => Term::constant(n),
        Raw::Fun(n, args) => Term::fun(n, args.iter().map(|a| convert(a, is_var)).collect()),
        Raw::Nil => Term::constant(NIL),
        Raw::Cons(h, t) => Term::fun(CONS, vec![convert(h, is_var), convert(t, is_var)]),
        Raw::App(l, r) => Term::app(convert(l, is_var), convert(r, is_var)),
    }
}

/// Parses a single term. Bare identifiers starting with a lowercase letter
/// (and without brackets) are variables; everything else is a symbol.
pub fn parse_term(src: &str) -> Result<Term, ListingError> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let raw = p.term()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(convert(&raw, &looks_like_var))
}

/// Parses a rule listing `l -> r` (one or more, whitespace separated).
///
/// In a left-hand side, the head of the application spine is always a
/// symbol and other bare lowercase identifiers are variables; in a
/// right-hand side, a bare identifier is a variable iff it is one in the
/// left-hand side.
pub fn parse_rules(src: &str) -> Result<Vec<Rule>, ListingError> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let mut rules = Vec::new();
    while p.pos < p.toks.len() {
        let (line, col) = (p.toks[p.pos].1, p.toks[p.pos].2);
        let lhs_raw = p.term()?;
        p.expect(Tok::Arrow)?;
        let rhs_raw = p.term()?;
        let mut head = &lhs_raw;
        while let Raw::App(l, _) = head {
            head = l;
        }
        let head_name = match head {
            Raw::Ident(n) => Some(n.clone()),
            _ => None,
        };
        let mut lhs_vars = BTreeSet::new();
        collect_lhs_vars(&lhs_raw, head_name.as_deref(), true, &mut lhs_vars);
        let lhs = convert(&lhs_raw, &|n| lhs_vars.contains(n) && Some(n) != head_name.as_deref());
        let rhs = convert(&rhs_raw, &|n| lhs_vars.contains(n));
        let rule = Rule::new(lhs, rhs).map_err(|e| ListingError { line, col, msg: e.to_string() })?;
        rules.push(rule);
    }
    Ok(rules)
}

fn collect_lhs_vars(r: &Raw, head: Option<&str>, on_spine: bool, out: &mut BTreeSet<String>) {
    match r {
        Raw::Ident(n) => {
            if !(on_spine && Some(n.as_str()) == head) && looks_like_var(n) {
                out.insert(n.clone());
            }
        }
        Raw::Fun(_, args) => args.iter().for_each(|a| collect_lhs_vars(a, head, false, out)),
        Raw::Nil => {}
        Raw::Cons(h, t) => {
            collect_lhs_vars(h, head, false, out);
            collect_lhs_vars(t, head, false, out);
        }
        Raw::App(l, r) => {
            collect_lhs_vars(l, head, on_spine, out);
            collect_lhs_vars(r, head, false, out);
        }
    }
}

/// `x1 :: x2 :: ... :: []` over the given element terms.
pub fn list_term(items: Vec<Term>) -> Term {
    items
        .into_iter()
        .rev()
        .fold(Term::constant(NIL), |acc, x| Term::fun(CONS, vec![x, acc]))
}

pub fn nil_symbol() -> Symbol {
    Symbol::new(NIL, 0)
}

pub fn cons_symbol() -> Symbol {
    Symbol::new(CONS, 2)
}
