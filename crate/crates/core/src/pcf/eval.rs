//! Weak call-by-value evaluation with step counting.
//!
//! One step is counted per β-reduction, per unfolding of a fixpoint (which
//! happens when it is applied) and per match dispatch. Feeding the inputs
//! to the program counts as a single step, however many inputs there are,
//! so that counts line up with the `main` rule of the translated system.
//!
//! The evaluator is an explicit-stack machine so deep recursion in the
//! evaluated program cannot overflow the native stack.

use std::rc::Rc;

use super::syntax::{Case, Expr, Ident, Program};
use crate::rewriting::{Symbol, Term};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("fuel exhausted after {steps} steps")]
    FuelExhausted { steps: usize },
    #[error("evaluation got stuck: {0}")]
    Stuck(String),
    #[error("expected {expected} inputs, got {got}")]
    Arity { expected: usize, got: usize },
}

#[derive(Debug)]
enum Value<'p> {
    Con(Symbol, Vec<Rc<Value<'p>>>),
    Lam(Env<'p>, &'p Ident, &'p Expr),
    Fix(Env<'p>, &'p Ident, &'p Expr),
}

type V<'p> = Rc<Value<'p>>;

#[derive(Debug)]
struct EnvNode<'p> {
    id: u32,
    value: V<'p>,
    next: Env<'p>,
}

#[derive(Debug, Clone)]
struct Env<'p>(Option<Rc<EnvNode<'p>>>);

impl<'p> Env<'p> {
    fn bind(&self, x: &Ident, v: V<'p>) -> Env<'p> {
        Env(Some(Rc::new(EnvNode { id: x.id, value: v, next: self.clone() })))
    }

    fn get(&self, x: &Ident) -> Option<V<'p>> {
        let mut cur = &self.0;
        while let Some(n) = cur {
            if n.id == x.id {
                return Some(n.value.clone());
            }
            cur = &n.next.0;
        }
        None
    }
}

enum Frame<'p> {
    /// Evaluate the argument next.
    Arg(&'p Expr, Env<'p>),
    /// Apply the evaluated function to the value being returned.
    Call(V<'p>),
    /// Apply the value being returned to this argument.
    CallWith(V<'p>),
    ConArgs(&'p Symbol, &'p [Expr], Vec<V<'p>>, Env<'p>),
    Dispatch(&'p [Case], Env<'p>),
}

enum State<'p> {
    Eval(&'p Expr, Env<'p>),
    Return(V<'p>),
}

struct Machine<'p> {
    stack: Vec<Frame<'p>>,
    steps: usize,
    fuel: usize,
}

impl<'p> Machine<'p> {
    fn tick(&mut self) -> Result<(), EvalError> {
        self.steps += 1;
        if self.steps > self.fuel {
            return Err(EvalError::FuelExhausted { steps: self.steps - 1 });
        }
        Ok(())
    }

    fn apply(&mut self, f: V<'p>, a: V<'p>) -> Result<State<'p>, EvalError> {
        match &*f {
            Value::Lam(env, x, body) => {
                self.tick()?;
                Ok(State::Eval(body, env.bind(x, a)))
            }
            Value::Fix(env, x, body) => {
                self.tick()?;
                self.stack.push(Frame::CallWith(a));
                Ok(State::Eval(body, env.bind(x, f.clone())))
            }
            Value::Con(c, _) => Err(EvalError::Stuck(format!("constructor {c} applied to an argument"))),
        }
    }

    fn run(&mut self, e: &'p Expr, env: Env<'p>) -> Result<V<'p>, EvalError> {
        let mut state = State::Eval(e, env);
        loop {
            state = match state {
                State::Eval(e, env) => match e {
                    Expr::Var(x) => State::Return(
                        env.get(x).ok_or_else(|| EvalError::Stuck(format!("unbound variable {x:?}")))?,
                    ),
                    Expr::Con(c, args) if args.is_empty() => State::Return(Rc::new(Value::Con(c.clone(), vec![]))),
                    Expr::Con(c, args) => {
                        self.stack.push(Frame::ConArgs(c, &args[1..], Vec::new(), env.clone()));
                        State::Eval(&args[0], env)
                    }
                    Expr::Lam(_, x, b) => State::Return(Rc::new(Value::Lam(env, x, b))),
                    Expr::Fix(_, x, b) => State::Return(Rc::new(Value::Fix(env, x, b))),
                    Expr::App(f, a) => {
                        self.stack.push(Frame::Arg(a, env.clone()));
                        State::Eval(f, env)
                    }
                    Expr::Match(_, s, cases) => {
                        self.stack.push(Frame::Dispatch(cases, env.clone()));
                        State::Eval(s, env)
                    }
                },
                State::Return(v) => match self.stack.pop() {
                    None => return Ok(v),
                    Some(Frame::Arg(a, env)) => {
                        self.stack.push(Frame::Call(v));
                        State::Eval(a, env)
                    }
                    Some(Frame::Call(f)) => self.apply(f, v)?,
                    Some(Frame::CallWith(a)) => self.apply(v, a)?,
                    Some(Frame::ConArgs(c, rest, mut done, env)) => {
                        done.push(v);
                        if rest.is_empty() {
                            State::Return(Rc::new(Value::Con(c.clone(), done)))
                        } else {
                            self.stack.push(Frame::ConArgs(c, &rest[1..], done, env.clone()));
                            State::Eval(&rest[0], env)
                        }
                    }
                    Some(Frame::Dispatch(cases, env)) => {
                        let Value::Con(c, args) = &*v else {
                            return Err(EvalError::Stuck("match on a function".into()));
                        };
                        let case = cases
                            .iter()
                            .find(|k| &k.con == c)
                            .ok_or_else(|| EvalError::Stuck(format!("no case for constructor {c}")))?;
                        self.tick()?;
                        let env = case.vars.iter().zip(args).fold(env, |env, (x, a)| env.bind(x, a.clone()));
                        State::Eval(&case.body, env)
                    }
                },
            };
        }
    }
}

fn to_value<'p>(t: &Term) -> V<'p> {
    let Term::Fun(f, args) = t else { panic!("input data must be ground") };
    Rc::new(Value::Con(f.clone(), args.iter().map(to_value).collect()))
}

fn to_term(v: &Value<'_>) -> Result<Term, EvalError> {
    match v {
        Value::Con(c, args) => Ok(Term::Fun(c.clone(), args.iter().map(|a| to_term(a)).collect::<Result<_, _>>()?)),
        _ => Err(EvalError::Stuck("result is a function".into())),
    }
}

/// Runs `p` on data inputs; returns the result and the number of steps.
pub fn pcf_eval(p: &Program, inputs: &[Term], fuel: usize) -> Result<(Term, usize), EvalError> {
    if inputs.len() != p.params.len() {
        return Err(EvalError::Arity { expected: p.params.len(), got: inputs.len() });
    }
    if inputs.iter().any(|t| !t.is_ground()) {
        return Err(EvalError::Stuck("inputs must be ground data".into()));
    }
    let env = p.params.iter().zip(inputs).fold(Env(None), |env, (x, t)| env.bind(x, to_value(t)));
    let mut m = Machine { stack: Vec::new(), steps: 0, fuel };
    m.tick()?;
    let v = m.run(&p.body, env)?;
    Ok((to_term(&v)?, m.steps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pcf::{parse_data, parse_program};

    const REV: &str = "let comp f g = fun z->f (g z) ;;\n\
        let rec walk xs = match xs with [] -> (fun z->z) | x::ys -> comp (walk ys) (fun z->x::z) ;;\n\
        let rev l = walk l [] ;;\n\
        let main l = rev l ;;";

    #[test]
    fn reverses() {
        let p = parse_program(REV).unwrap();
        let input = parse_data("[1;2;3]", &p).unwrap_err();
        // naturals are not part of rev's data
        assert!(input.to_string().contains("constructor"), "{input}");
        let input = parse_data("[[]; [[]]; [[];[]]]", &p).unwrap();
        let (out, _) = pcf_eval(&p, &[input], 1000).unwrap();
        assert_eq!(out.to_string(), "([]::[]::[])::([]::[])::[]::[]");
    }

    #[test]
    fn empty_input_takes_six_steps() {
        // enter, rev β, fix unfold, walk β, match, identity β
        let p = parse_program(REV).unwrap();
        let (out, n) = pcf_eval(&p, &[parse_data("[]", &p).unwrap()], 100).unwrap();
        assert_eq!(out.to_string(), "[]");
        assert_eq!(n, 6);
    }

    #[test]
    fn constant_program_only_counts_entry() {
        let p = parse_program("let main x = [] ;;").unwrap();
        assert_eq!(pcf_eval(&p, &[parse_data("[[]]", &p).unwrap()], 10).unwrap().1, 1);
    }

    #[test]
    fn fuel_and_stuck() {
        let p = parse_program("let rec f x = f x ;;\nlet main x = f x ;;").unwrap();
        assert_eq!(pcf_eval(&p, &[Term::constant("[]")], 50), Err(EvalError::FuelExhausted { steps: 50 }));
        let p = parse_program("let main x = match x with [] -> [] ;;").unwrap();
        let e = pcf_eval(&p, &[parse_data("[[]]", &p).unwrap()], 50).unwrap_err();
        assert!(matches!(e, EvalError::Stuck(_)));
    }
}
