//! Reading and writing rewrite systems in the `(VAR ...)(RULES ...)` exchange
//! format understood by first-order termination and complexity tools.
//!
//! Symbol names are sanitized to plain identifiers (`::` becomes `Cons`,
//! `fix[walk]` becomes `fix_walk`). A `(COMMENT ...)` header records the
//! original names together with the metadata of the system, so that
//! [`parse_trs`] inverts [`emit`]:
//!
//! ```text
//! (COMMENT
//!   main main 1
//!   name Cons ::
//!   data Cons/2 Nil/0
//!   kind C1 2 lam
//!   sufficiently-defined
//! )
//! (VAR x z)
//! (RULES
//!   C1u(C2,C3(x),z) -> Cons(x,z)
//! )
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::rewriting::looks_like_var;
use crate::rewriting::{parse_rules, Atrs, ClosureKind, Rule, Symbol, Term, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    /// First-order systems only.
    #[default]
    Classic,
    /// `@` is written as the binary symbol `app`.
    Applicative,
    /// The infix listing notation, with the header as `#` lines.
    Debug,
}

impl OutputFormat {
    pub const ALL: [OutputFormat; 3] = [OutputFormat::Classic, OutputFormat::Applicative, OutputFormat::Debug];

    pub fn name(self) -> &'static str {
        match self {
            OutputFormat::Classic => "classic",
            OutputFormat::Applicative => "applicative",
            OutputFormat::Debug => "debug",
        }
    }

    pub fn parse(s: &str) -> Option<OutputFormat> {
        Self::ALL.into_iter().find(|f| f.name() == s)
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EmitError {
    #[error("the classic format cannot express the application symbol; use the applicative format or uncurry first")]
    ApplicationInClassic,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseTrsError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

fn sanitize(name: &str) -> String {
    match name {
        "::" => return "Cons".to_string(),
        "[]" => return "Nil".to_string(),
        "@" => return "app".to_string(),
        _ => {}
    }
    let mut out = String::new();
    for c in name.chars() {
        if c.is_ascii_alphanumeric() || c == '_' || c == '\'' {
            out.push(c);
        } else if !out.ends_with('_') {
            out.push('_');
        }
    }
    let out = out.trim_end_matches('_').to_string();
    if out.is_empty() || out.starts_with('\'') {
        format!("f{out}")
    } else {
        out
    }
}

/// Sanitized, pairwise distinct names for symbols and variables.
struct Names {
    symbols: BTreeMap<Symbol, String>,
    vars: BTreeMap<Var, String>,
}

impl Names {
    fn new(a: &Atrs) -> Names {
        let mut taken = BTreeSet::new();
        let mut fresh = |base: String| {
            let mut name = base.clone();
            let mut k = 2;
            while !taken.insert(name.clone()) {
                name = format!("{base}_{k}");
                k += 1;
            }
            name
        };
        let mut symbols = BTreeMap::new();
        // metadata may mention symbols that no longer occur in the rules
        let mut syms = a.symbols();
        syms.insert(a.main.clone());
        syms.extend(a.data.iter().cloned());
        syms.extend(a.closures.keys().cloned());
        for f in syms {
            let n = fresh(sanitize(f.name()));
            symbols.insert(f, n);
        }
        let mut vars = BTreeMap::new();
        for r in &a.rules {
            for v in r.vars() {
                if !vars.contains_key(&v) {
                    let n = fresh(sanitize(v.name()));
                    vars.insert(v, n);
                }
            }
        }
        Names { symbols, vars }
    }

    fn term(&self, t: &Term, out: &mut String) {
        match t {
            Term::Var(v) => out.push_str(&self.vars[v]),
            Term::Fun(f, args) => {
                out.push_str(&self.symbols[f]);
                if !args.is_empty() {
                    out.push('(');
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            out.push(',');
                        }
                        self.term(a, out);
                    }
                    out.push(')');
                }
            }
        }
    }
}

fn header(a: &Atrs, names: &Names) -> Vec<String> {
    let mut out = vec![format!("main {} {}", names.symbols[&a.main], a.main.arity())];
    for (f, n) in &names.symbols {
        if f.name() != n {
            out.push(format!("name {n} {}", f.name()));
        }
    }
    if !a.data.is_empty() {
        let data: Vec<String> = a.data.iter().map(|c| format!("{}/{}", names.symbols[c], c.arity())).collect();
        out.push(format!("data {}", data.join(" ")));
    }
    for (f, k) in &a.closures {
        out.push(format!("kind {} {} {}", names.symbols[f], f.arity(), k.as_str()));
    }
    if a.sufficiently_defined {
        out.push("sufficiently-defined".to_string());
    }
    out
}

/// Renders `a`. Output depends only on `a`.
pub fn emit(a: &Atrs, format: OutputFormat) -> Result<String, EmitError> {
    if format == OutputFormat::Classic && a.has_app() {
        return Err(EmitError::ApplicationInClassic);
    }
    let names = Names::new(a);
    let mut out = String::new();
    if format == OutputFormat::Debug {
        // the listing notation uses the original names
        for line in header(a, &names) {
            let line = match line.split_once(' ') {
                Some(("name", _)) => continue,
                _ => line,
            };
            out.push_str(&format!("# {}\n", unsanitize_line(&line, &names)));
        }
        // nullary symbols that the listing notation would read as variables
        let constants: BTreeSet<String> = a
            .rules
            .iter()
            .flat_map(|r| r.lhs.args().iter().flat_map(|t| t.symbols()))
            .filter(|f| f.arity() == 0 && looks_like_var(f.name()))
            .map(|f| f.name().to_string())
            .collect();
        if !constants.is_empty() {
            out.push_str(&format!("# constants {}\n", constants.into_iter().collect::<Vec<_>>().join(" ")));
        }
        for r in &a.rules {
            out.push_str(&format!("{r}\n"));
        }
        return Ok(out);
    }
    out.push_str("(COMMENT\n");
    for line in header(a, &names) {
        out.push_str(&format!("  {line}\n"));
    }
    out.push_str(")\n");
    let vars: BTreeSet<&str> = names.vars.values().map(String::as_str).collect();
    out.push_str(&format!("(VAR {})\n", vars.into_iter().collect::<Vec<_>>().join(" ")));
    out.push_str("(RULES\n");
    for r in &a.rules {
        out.push_str("  ");
        names.term(&r.lhs, &mut out);
        out.push_str(" -> ");
        names.term(&r.rhs, &mut out);
        out.push('\n');
    }
    out.push_str(")\n");
    Ok(out)
}

/// Header lines in the debug format refer to symbols by original name.
fn unsanitize_line(line: &str, names: &Names) -> String {
    let back: BTreeMap<&str, &str> = names.symbols.iter().map(|(f, n)| (n.as_str(), f.name())).collect();
    let mut words: Vec<&str> = line.split(' ').collect();
    let (key, rest) = words.split_first_mut().expect("non-empty header line");
    let symbol_slots = match *key {
        "main" => 1,
        "data" => rest.len(),
        "kind" => 1,
        _ => 0,
    };
    let mut out = vec![key.to_string()];
    for (i, w) in rest.iter().enumerate() {
        let (name, arity) = match w.rsplit_once('/') {
            Some((n, k)) if *key == "data" => (n, Some(k)),
            _ => (*w, None),
        };
        let name = if i < symbol_slots { back.get(name).copied().unwrap_or(name) } else { name };
        out.push(match arity {
            Some(k) => format!("{name}/{k}"),
            None => name.to_string(),
        });
    }
    out.join(" ")
}

#[derive(Default)]
struct Header {
    main: Option<(String, usize)>,
    names: BTreeMap<String, String>,
    data: Vec<(String, Option<usize>)>,
    kinds: Vec<(String, usize, ClosureKind)>,
    constants: BTreeSet<String>,
    sufficiently_defined: bool,
}

impl Header {
    fn line(&mut self, line: &str, at: (usize, usize)) -> Result<(), ParseTrsError> {
        let err = |m: String| Err(ParseTrsError { line: at.0, column: at.1, message: m });
        let words: Vec<&str> = line.split_whitespace().collect();
        match words.as_slice() {
            [] => {}
            ["main", name, arity] => match arity.parse() {
                Ok(k) => self.main = Some((name.to_string(), k)),
                Err(_) => return err(format!("bad arity `{arity}`")),
            },
            ["name", new, old] => {
                self.names.insert(new.to_string(), old.to_string());
            }
            ["data", cs @ ..] => {
                for c in cs {
                    // `name/arity`; a bare name takes its arity from the rules
                    match c.rsplit_once('/') {
                        Some((n, k)) => match k.parse() {
                            Ok(k) => self.data.push((n.to_string(), Some(k))),
                            Err(_) => return err(format!("bad arity `{k}`")),
                        },
                        None => self.data.push((c.to_string(), None)),
                    }
                }
            }
            ["kind", f, arity, k] => match (arity.parse(), ClosureKind::parse(k)) {
                (Ok(n), Some(k)) => self.kinds.push((f.to_string(), n, k)),
                (Err(_), _) => return err(format!("bad arity `{arity}`")),
                (_, None) => return err(format!("unknown closure kind `{k}`")),
            },
            ["sufficiently-defined"] => self.sufficiently_defined = true,
            ["constants", cs @ ..] => self.constants.extend(cs.iter().map(|c| c.to_string())),
            // free-form comments from other tools
            _ => {}
        }
        Ok(())
    }

    /// Finishes a system whose rules use original names.
    fn finish(self, rules: Vec<Rule>, at: (usize, usize)) -> Result<Atrs, ParseTrsError> {
        let original = |n: &str| self.names.get(n).cloned().unwrap_or_else(|| n.to_string());
        let mut symbols: BTreeMap<String, Vec<Symbol>> = BTreeMap::new();
        for r in &rules {
            for f in r.lhs.symbols().into_iter().chain(r.rhs.symbols()) {
                let v = symbols.entry(f.name().to_string()).or_default();
                if !v.contains(&f) {
                    v.push(f);
                }
            }
        }
        let lookup = |name: &str, arity: Option<usize>| -> Option<Symbol> {
            let name = original(name);
            match symbols.get(&name).and_then(|v| v.iter().find(|f| arity.is_none_or(|k| f.arity() == k))) {
                Some(f) => Some(f.clone()),
                None => arity.map(|k| Symbol::new(&name, k)),
            }
        };
        let main = match &self.main {
            Some((n, k)) => lookup(n, Some(*k)).expect("arity given"),
            None => match lookup("main", None) {
                Some(f) => f,
                None => {
                    return Err(ParseTrsError { line: at.0, column: at.1, message: "no `main` symbol".into() })
                }
            },
        };
        let mut a = Atrs::new(rules, main);
        for (c, k) in &self.data {
            let f = lookup(c, *k).unwrap_or_else(|| Symbol::new(&original(c), 0));
            a.data.insert(f);
        }
        for (f, n, k) in &self.kinds {
            a.closures.insert(lookup(f, Some(*n)).expect("arity given"), *k);
        }
        a.sufficiently_defined = self.sufficiently_defined;
        Ok(a)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Open,
    Close,
    Comma,
    Arrow,
    Ident(String),
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn at(&self) -> (usize, usize) {
        (self.line, self.col)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.src[self.pos..].chars().next()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn peek_char(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while self.peek_char().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    /// Next token and its position.
    fn next(&mut self) -> Option<((usize, usize), Tok)> {
        self.skip_ws();
        let at = self.at();
        let c = self.peek_char()?;
        let tok = match c {
            '(' => {
                self.bump();
                Tok::Open
            }
            ')' => {
                self.bump();
                Tok::Close
            }
            ',' => {
                self.bump();
                Tok::Comma
            }
            '-' if self.src[self.pos..].starts_with("->") => {
                self.bump();
                self.bump();
                Tok::Arrow
            }
            _ => {
                let start = self.pos;
                while let Some(c) = self.peek_char() {
                    if c.is_whitespace() || "(),".contains(c) || self.src[self.pos..].starts_with("->") {
                        break;
                    }
                    self.bump();
                }
                Tok::Ident(self.src[start..self.pos].to_string())
            }
        };
        Some((at, tok))
    }

    /// Raw lines up to the `)` closing a `(COMMENT` block.
    fn comment_body(&mut self) -> Result<Vec<((usize, usize), String)>, ParseTrsError> {
        let mut depth = 0usize;
        let mut lines = Vec::new();
        let mut cur = String::new();
        let mut cur_at = self.at();
        loop {
            let Some(c) = self.bump() else {
                return Err(ParseTrsError { line: self.line, column: self.col, message: "unterminated COMMENT".into() });
            };
            match c {
                '(' => depth += 1,
                ')' if depth == 0 => {
                    lines.push((cur_at, cur));
                    return Ok(lines);
                }
                ')' => depth -= 1,
                '\n' => {
                    lines.push((cur_at, std::mem::take(&mut cur)));
                    cur_at = self.at();
                    continue;
                }
                _ => {}
            }
            cur.push(c);
        }
    }
}

struct TrsParser<'a> {
    lex: Lexer<'a>,
    peeked: Option<((usize, usize), Tok)>,
    vars: BTreeSet<String>,
}

impl TrsParser<'_> {
    fn peek(&mut self) -> Option<&((usize, usize), Tok)> {
        if self.peeked.is_none() {
            self.peeked = self.lex.next();
        }
        self.peeked.as_ref()
    }

    fn next(&mut self) -> Option<((usize, usize), Tok)> {
        self.peek();
        self.peeked.take()
    }

    fn here(&mut self) -> (usize, usize) {
        let end = self.lex.at();
        self.peek().map_or(end, |(at, _)| *at)
    }

    fn error<T>(&mut self, message: impl Into<String>) -> Result<T, ParseTrsError> {
        let (line, column) = self.here();
        Err(ParseTrsError { line, column, message: message.into() })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseTrsError> {
        match self.peek() {
            Some((_, tok)) if *tok == t => {
                self.next();
                Ok(())
            }
            _ => self.error(format!("expected {what}")),
        }
    }

    fn term(&mut self) -> Result<Term, ParseTrsError> {
        let Some((_, Tok::Ident(name))) = self.peek().cloned() else { return self.error("expected a term") };
        self.next();
        if matches!(self.peek(), Some((_, Tok::Open))) {
            self.next();
            let mut args = vec![self.term()?];
            while matches!(self.peek(), Some((_, Tok::Comma))) {
                self.next();
                args.push(self.term()?);
            }
            self.expect(Tok::Close, "`,` or `)`")?;
            return Ok(Term::Fun(Symbol::new(&name, args.len()), args));
        }
        if self.vars.contains(&name) {
            Ok(Term::var(&name))
        } else {
            Ok(Term::Fun(Symbol::new(&name, 0), Vec::new()))
        }
    }

    fn parse(mut self) -> Result<Atrs, ParseTrsError> {
        let mut header = Header::default();
        let mut rules = Vec::new();
        let mut raw: Vec<((usize, usize), Term, Term)> = Vec::new();
        while let Some((_, tok)) = self.next() {
            if tok != Tok::Open {
                return self.error("expected `(`");
            }
            let Some((_, Tok::Ident(section))) = self.next() else { return self.error("expected a section name") };
            match section.as_str() {
                "COMMENT" => {
                    self.peeked = None;
                    for (at, line) in self.lex.comment_body()? {
                        header.line(&line, at)?;
                    }
                }
                "VAR" => loop {
                    match self.next() {
                        Some((_, Tok::Ident(v))) => {
                            self.vars.insert(v);
                        }
                        Some((_, Tok::Close)) => break,
                        _ => return self.error("expected a variable or `)`"),
                    }
                },
                "RULES" => loop {
                    if matches!(self.peek(), Some((_, Tok::Close))) {
                        self.next();
                        break;
                    }
                    let at = self.here();
                    let l = self.term()?;
                    self.expect(Tok::Arrow, "`->`")?;
                    let r = self.term()?;
                    raw.push((at, l, r));
                },
                other => return self.error(format!("unknown section `{other}`")),
            }
        }
        for (at, l, r) in raw {
            let rename = |t: &Term| {
                t.map_symbols(&|f: &Symbol| match header.names.get(f.name()) {
                    Some(o) => Symbol::new(o, f.arity()),
                    None => f.clone(),
                })
            };
            let rule = Rule::new(rename(&l), rename(&r))
                .map_err(|e| ParseTrsError { line: at.0, column: at.1, message: e.to_string() })?;
            rules.push(rule);
        }
        let end = self.here();
        header.finish(rules, end)
    }
}

/// Reads either format produced by [`emit`]. Files without a header are
/// accepted; `main` is then the symbol named `main`.
pub fn parse_trs(text: &str) -> Result<Atrs, ParseTrsError> {
    if text.trim_start().starts_with('(') {
        let lex = Lexer { src: text, pos: 0, line: 1, col: 1 };
        return TrsParser { lex, peeked: None, vars: BTreeSet::new() }.parse();
    }
    let mut header = Header::default();
    let mut body = String::new();
    for (i, line) in text.lines().enumerate() {
        match line.trim_start().strip_prefix('#') {
            Some(h) => header.line(h, (i + 1, 1))?,
            None => {
                body.push_str(line);
                body.push('\n');
            }
        }
    }
    let rules = parse_rules(&body).map_err(|e| ParseTrsError { line: 0, column: 0, message: e.to_string() })?;
    let rules = if header.constants.is_empty() {
        rules
    } else {
        let fix = |t: &Term| restore_constants(t, &header.constants);
        rules.iter().map(|r| Rule::new(fix(&r.lhs), fix(&r.rhs)).expect("constants are not variables")).collect()
    };
    header.finish(rules, (text.lines().count(), 1))
}

fn restore_constants(t: &Term, constants: &BTreeSet<String>) -> Term {
    match t {
        Term::Var(v) if constants.contains(v.name()) => Term::constant(v.name()),
        Term::Var(_) => t.clone(),
        Term::Fun(f, args) => Term::Fun(f.clone(), args.iter().map(|a| restore_constants(a, constants)).collect()),
    }
}
