//! Lexer and recursive-descent parser for `.fp` source files.

use super::syntax::{ConDecl, Item, Module, Pattern, SCase, SExpr, Span, TypeDecl};
use super::PcfError;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Lower(String),
    Upper(String),
    TyVar(String),
    Int(u64),
    Let,
    Rec,
    In,
    Fun,
    Match,
    With,
    Type,
    Of,
    Arrow,
    Bar,
    SemiSemi,
    Semi,
    ColonColon,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Comma,
    Eq,
    Star,
    Underscore,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Lower(s) | Tok::Upper(s) | Tok::TyVar(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Eof => "end of input".into(),
            t => format!("{t:?}").to_lowercase(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, Span)>, PcfError> {
    let cs: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    macro_rules! bump {
        () => {{
            if cs[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }
    while i < cs.len() {
        let c = cs[i];
        let span = Span { line, col };
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '(' && cs.get(i + 1) == Some(&'*') {
            let mut depth = 0;
            loop {
                if i >= cs.len() {
                    return Err(PcfError::parse(span, "unterminated comment"));
                }
                if cs[i] == '(' && cs.get(i + 1) == Some(&'*') {
                    depth += 1;
                    bump!();
                    bump!();
                } else if cs[i] == '*' && cs.get(i + 1) == Some(&')') {
                    depth -= 1;
                    bump!();
                    bump!();
                    if depth == 0 {
                        break;
                    }
                } else {
                    bump!();
                }
            }
            continue;
        }
        let two: String = cs[i..(i + 2).min(cs.len())].iter().collect();
        let sym2 = match two.as_str() {
            "->" => Some(Tok::Arrow),
            ";;" => Some(Tok::SemiSemi),
            "::" => Some(Tok::ColonColon),
            _ => None,
        };
        if let Some(t) = sym2 {
            out.push((t, span));
            bump!();
            bump!();
            continue;
        }
        let sym1 = match c {
            '|' => Some(Tok::Bar),
            ';' => Some(Tok::Semi),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            '=' => Some(Tok::Eq),
            '*' => Some(Tok::Star),
            _ => None,
        };
        if let Some(t) = sym1 {
            out.push((t, span));
            bump!();
            continue;
        }
        let word_char = |c: char| c.is_alphanumeric() || c == '_' || c == '\'';
        if c.is_ascii_digit() {
            let start = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                bump!();
            }
            let s: String = cs[start..i].iter().collect();
            let n = s.parse().map_err(|_| PcfError::parse(span, "numeral too large"))?;
            out.push((Tok::Int(n), span));
            continue;
        }
        if c == '\'' {
            bump!();
            let start = i;
            while i < cs.len() && word_char(cs[i]) {
                bump!();
            }
            let s: String = cs[start..i].iter().collect();
            if s.is_empty() {
                return Err(PcfError::parse(span, "expected a type variable after `'`"));
            }
            out.push((Tok::TyVar(s), span));
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < cs.len() && word_char(cs[i]) {
                bump!();
            }
            let s: String = cs[start..i].iter().collect();
            let t = match s.as_str() {
                "let" => Tok::Let,
                "rec" => Tok::Rec,
                "in" => Tok::In,
                "fun" => Tok::Fun,
                "match" => Tok::Match,
                "with" => Tok::With,
                "type" => Tok::Type,
                "of" => Tok::Of,
                "_" => Tok::Underscore,
                _ if c.is_uppercase() => Tok::Upper(s),
                _ => Tok::Lower(s),
            };
            out.push((t, span));
            continue;
        }
        return Err(PcfError::parse(span, &format!("unexpected character {c:?}")));
    }
    out.push((Tok::Eof, Span { line, col }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
}

type PResult<T> = Result<T, PcfError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn next(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.next();
            true
        } else {
            false
        }
    }

    fn unexpected<T>(&self, what: &str) -> PResult<T> {
        Err(PcfError::parse(self.span(), &format!("expected {what}, found {}", self.peek().describe())))
    }

    fn expect(&mut self, t: Tok, what: &str) -> PResult<Span> {
        if self.peek() == &t {
            Ok(self.next().1)
        } else {
            self.unexpected(what)
        }
    }

    fn lower(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Lower(s) => {
                self.next();
                Ok(s)
            }
            _ => self.unexpected("an identifier"),
        }
    }

    /// Binder position: an identifier or `_`.
    fn binder(&mut self) -> PResult<String> {
        if self.eat(&Tok::Underscore) {
            return Ok("_".into());
        }
        self.lower()
    }

    fn module(&mut self) -> PResult<Module> {
        let mut types = Vec::new();
        let mut items = Vec::new();
        loop {
            match self.peek() {
                Tok::Type => types.push(self.type_decl()?),
                Tok::Let => items.push(self.item()?),
                Tok::Eof => break,
                _ => return self.unexpected("`type` or `let`"),
            }
        }
        Ok(Module { types, items })
    }

    fn type_decl(&mut self) -> PResult<TypeDecl> {
        let span = self.expect(Tok::Type, "`type`")?;
        let mut params = Vec::new();
        while let Tok::TyVar(v) = self.peek().clone() {
            self.next();
            params.push(v);
        }
        let name = self.lower()?;
        self.expect(Tok::Eq, "`=`")?;
        self.eat(&Tok::Bar);
        let mut constructors = Vec::new();
        loop {
            let cspan = self.span();
            let cname = match self.next().0 {
                Tok::Upper(s) => s,
                _ => return Err(PcfError::parse(cspan, "expected a constructor name")),
            };
            let mut args = Vec::new();
            if self.eat(&Tok::Of) {
                args.push(self.type_expr()?);
                while self.eat(&Tok::Star) {
                    args.push(self.type_expr()?);
                }
            }
            constructors.push(ConDecl { name: cname, args, span: cspan });
            if !self.eat(&Tok::Bar) {
                break;
            }
        }
        self.expect(Tok::SemiSemi, "`;;`")?;
        Ok(TypeDecl { name, params, constructors, span })
    }

    /// A type argument such as `t`, `'a list` or `nat`; kept as text.
    fn type_expr(&mut self) -> PResult<String> {
        let mut words = Vec::new();
        loop {
            match self.peek().clone() {
                Tok::Lower(s) => words.push(s),
                Tok::TyVar(s) => words.push(format!("'{s}")),
                _ => break,
            }
            self.next();
        }
        if words.is_empty() {
            return self.unexpected("a type");
        }
        Ok(words.join(" "))
    }

    fn item(&mut self) -> PResult<Item> {
        let span = self.expect(Tok::Let, "`let`")?;
        let rec = self.eat(&Tok::Rec);
        let name = self.lower()?;
        let mut params = Vec::new();
        while !matches!(self.peek(), Tok::Eq) {
            params.push(self.binder()?);
        }
        self.expect(Tok::Eq, "`=`")?;
        let body = self.expr()?;
        self.expect(Tok::SemiSemi, "`;;`")?;
        Ok(Item { rec, name, params, body, span })
    }

    fn expr(&mut self) -> PResult<SExpr> {
        let span = self.span();
        match self.peek() {
            Tok::Fun => {
                self.next();
                let mut params = vec![self.binder()?];
                while !matches!(self.peek(), Tok::Arrow) {
                    params.push(self.binder()?);
                }
                self.expect(Tok::Arrow, "`->`")?;
                let body = self.expr()?;
                Ok(SExpr::Fun(params, Box::new(body), span))
            }
            Tok::Let => {
                self.next();
                let rec = self.eat(&Tok::Rec);
                let name = self.lower()?;
                let mut params = Vec::new();
                while !matches!(self.peek(), Tok::Eq) {
                    params.push(self.binder()?);
                }
                self.expect(Tok::Eq, "`=`")?;
                let bound = self.expr()?;
                self.expect(Tok::In, "`in`")?;
                let body = self.expr()?;
                Ok(SExpr::Let { rec, name, params, bound: Box::new(bound), body: Box::new(body), span })
            }
            Tok::Match => {
                self.next();
                let scrut = self.expr()?;
                self.expect(Tok::With, "`with`")?;
                self.eat(&Tok::Bar);
                let mut cases = Vec::new();
                loop {
                    let cspan = self.span();
                    let pattern = self.pattern()?;
                    self.expect(Tok::Arrow, "`->`")?;
                    let body = self.expr()?;
                    cases.push(SCase { pattern, body, span: cspan });
                    if !self.eat(&Tok::Bar) {
                        break;
                    }
                }
                Ok(SExpr::Match(Box::new(scrut), cases, span))
            }
            _ => self.cons_expr(),
        }
    }

    fn cons_expr(&mut self) -> PResult<SExpr> {
        let head = self.app_expr()?;
        if self.eat(&Tok::ColonColon) {
            let tail = match self.peek() {
                Tok::Fun | Tok::Let | Tok::Match => self.expr()?,
                _ => self.cons_expr()?,
            };
            return Ok(SExpr::Cons(Box::new(head), Box::new(tail)));
        }
        Ok(head)
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Lower(_) | Tok::Upper(_) | Tok::Int(_) | Tok::LParen | Tok::LBracket
        )
    }

    fn app_expr(&mut self) -> PResult<SExpr> {
        let mut e = self.atom()?;
        while self.starts_atom() {
            let a = self.atom()?;
            e = SExpr::App(Box::new(e), Box::new(a));
        }
        if matches!(self.peek(), Tok::Fun | Tok::Let | Tok::Match) {
            // `f fun x -> ...` is not valid OCaml either; ask for parentheses.
            return self.unexpected("an operator or the end of the expression (parenthesise the argument)");
        }
        Ok(e)
    }

    fn atom(&mut self) -> PResult<SExpr> {
        let (t, span) = self.next();
        match t {
            Tok::Lower(s) => Ok(SExpr::Var(s, span)),
            Tok::Int(n) => Ok(SExpr::Num(n, span)),
            Tok::Upper(c) => {
                // `C(a, b)` takes a tuple; `C e` is left to the application
                // parser and resolved against the constructor's arity later.
                if self.peek() == &Tok::LParen {
                    self.next();
                    let mut args = vec![self.expr()?];
                    while self.eat(&Tok::Comma) {
                        args.push(self.expr()?);
                    }
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(SExpr::Con(c, args, span))
                } else {
                    Ok(SExpr::Con(c, Vec::new(), span))
                }
            }
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::LBracket => {
                if self.eat(&Tok::RBracket) {
                    return Ok(SExpr::Con("[]".into(), Vec::new(), span));
                }
                let mut items = vec![self.expr()?];
                while self.eat(&Tok::Semi) {
                    items.push(self.expr()?);
                }
                self.expect(Tok::RBracket, "`]`")?;
                Ok(SExpr::List(items, span))
            }
            t => {
                self.pos -= 1;
                let _ = t;
                self.unexpected("an expression")
            }
        }
    }

    fn pattern(&mut self) -> PResult<Pattern> {
        let (t, span) = self.next();
        match t {
            Tok::Underscore if self.peek() == &Tok::ColonColon => {
                self.next();
                let tl = self.pat_var()?;
                Ok(Pattern::Con("::".into(), vec![None, tl]))
            }
            Tok::Underscore => Ok(Pattern::Wild),
            Tok::Lower(x) => {
                if !self.eat(&Tok::ColonColon) {
                    return Err(PcfError::parse(span, "variable patterns are only allowed as `x::xs`; use `_`"));
                }
                let tl = self.pat_var()?;
                Ok(Pattern::Con("::".into(), vec![Some(x), tl]))
            }
            Tok::LBracket => {
                self.expect(Tok::RBracket, "`]` (only `[]` is a list pattern)")?;
                Ok(Pattern::Con("[]".into(), Vec::new()))
            }
            Tok::Int(0) => Ok(Pattern::Con("0".into(), Vec::new())),
            Tok::Upper(c) => {
                let mut vars = Vec::new();
                if self.eat(&Tok::LParen) {
                    vars.push(self.pat_var()?);
                    while self.eat(&Tok::Comma) {
                        vars.push(self.pat_var()?);
                    }
                    self.expect(Tok::RParen, "`)`")?;
                } else if matches!(self.peek(), Tok::Lower(_) | Tok::Underscore) {
                    vars.push(self.pat_var()?);
                }
                Ok(Pattern::Con(c, vars))
            }
            _ => Err(PcfError::parse(span, "expected a pattern")),
        }
    }

    fn pat_var(&mut self) -> PResult<Option<String>> {
        if self.eat(&Tok::Underscore) {
            return Ok(None);
        }
        Ok(Some(self.lower()?))
    }
}

/// Parses a module without resolving names.
pub fn parse_module(src: &str) -> Result<Module, PcfError> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    p.module()
}

/// Parses a single expression (used for input data).
pub fn parse_sexpr(src: &str) -> Result<SExpr, PcfError> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let e = p.expr()?;
    if p.peek() != &Tok::Eof {
        return p.unexpected("end of input");
    }
    Ok(e)
}
