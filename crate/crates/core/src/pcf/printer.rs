//! Prints surface syntax back to `.fp` text that parses to the same
//! program.

use super::syntax::{Item, Module, Pattern, SCase, SExpr, TypeDecl};

const TOP: u8 = 0;
const CONS: u8 = 1;
const APP: u8 = 2;
const ATOM: u8 = 3;

fn prec(e: &SExpr) -> u8 {
    match e {
        SExpr::Fun(..) | SExpr::Let { .. } | SExpr::Match(..) => TOP,
        SExpr::Cons(..) => CONS,
        SExpr::App(..) => APP,
        _ => ATOM,
    }
}

fn binders(params: &[String]) -> String {
    params.iter().map(|p| format!(" {p}")).collect()
}

fn expr(e: &SExpr, ctx: u8, out: &mut String) {
    let wrap = prec(e) < ctx;
    if wrap {
        out.push('(');
    }
    match e {
        SExpr::Var(x, _) => out.push_str(x),
        SExpr::Num(n, _) => out.push_str(&n.to_string()),
        SExpr::Con(c, args, _) => {
            out.push_str(c);
            if !args.is_empty() {
                out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    expr(a, TOP, out);
                }
                out.push(')');
            }
        }
        SExpr::List(items, _) => {
            out.push('[');
            for (i, a) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str("; ");
                }
                expr(a, TOP, out);
            }
            out.push(']');
        }
        SExpr::Cons(h, t) => {
            expr(h, APP, out);
            out.push_str(" :: ");
            expr(t, CONS, out);
        }
        SExpr::App(f, a) => {
            expr(f, APP, out);
            out.push(' ');
            expr(a, ATOM, out);
        }
        SExpr::Fun(params, body, _) => {
            out.push_str("fun");
            out.push_str(&binders(params));
            out.push_str(" -> ");
            expr(body, TOP, out);
        }
        SExpr::Let { rec, name, params, bound, body, .. } => {
            out.push_str(if *rec { "let rec " } else { "let " });
            out.push_str(name);
            out.push_str(&binders(params));
            out.push_str(" = ");
            expr(bound, TOP, out);
            out.push_str(" in ");
            expr(body, TOP, out);
        }
        SExpr::Match(s, cases, _) => {
            out.push_str("match ");
            expr(s, TOP, out);
            out.push_str(" with");
            for (i, c) in cases.iter().enumerate() {
                case(c, i + 1 == cases.len(), out);
            }
        }
    }
    if wrap {
        out.push(')');
    }
}

fn pvar(v: &Option<String>) -> &str {
    v.as_deref().unwrap_or("_")
}

fn case(c: &SCase, last: bool, out: &mut String) {
    out.push_str(" | ");
    match &c.pattern {
        Pattern::Wild => out.push('_'),
        Pattern::Con(k, vars) if k == "::" => {
            out.push_str(&format!("{}::{}", pvar(&vars[0]), pvar(&vars[1])));
        }
        Pattern::Con(k, vars) => {
            out.push_str(k);
            if !vars.is_empty() {
                let vs: Vec<&str> = vars.iter().map(pvar).collect();
                out.push_str(&format!("({})", vs.join(", ")));
            }
        }
    }
    out.push_str(" -> ");
    // A trailing match/fun/let would swallow the following cases.
    expr(&c.body, if last { TOP } else { CONS }, out);
}

fn type_decl(t: &TypeDecl, out: &mut String) {
    out.push_str("type ");
    for p in &t.params {
        out.push_str(&format!("'{p} "));
    }
    out.push_str(&t.name);
    out.push_str(" =");
    for (i, c) in t.constructors.iter().enumerate() {
        out.push_str(if i == 0 { " " } else { " | " });
        out.push_str(&c.name);
        if !c.args.is_empty() {
            out.push_str(" of ");
            out.push_str(&c.args.join(" * "));
        }
    }
    out.push_str(" ;;\n");
}

fn item(it: &Item, out: &mut String) {
    out.push_str(if it.rec { "let rec " } else { "let " });
    out.push_str(&it.name);
    out.push_str(&binders(&it.params));
    out.push_str(" =\n  ");
    expr(&it.body, TOP, out);
    out.push_str(" ;;\n");
}

pub fn print_module(m: &Module) -> String {
    let mut out = String::new();
    for t in &m.types {
        type_decl(t, &mut out);
    }
    for it in &m.items {
        item(it, &mut out);
    }
    out
}

pub fn print_sexpr(e: &SExpr) -> String {
    let mut out = String::new();
    expr(e, TOP, &mut out);
    out
}
