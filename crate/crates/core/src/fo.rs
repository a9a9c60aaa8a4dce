//! FO(=,~) sentences over graphs: abstract syntax, a recursive-descent
//! parser for the ASCII surface syntax, quantifier depth, exact evaluation,
//! and the fixed sentence corpus used by the game tests.
//!
//! Surface syntax: `A`/`E` quantifiers (`Ax.` binds `x`, scope extends
//! maximally right), connectives `! & | ->` with precedence `!` > `&` > `|`
//! > `->` (`->` right-associative), atoms `x=y` and `x~y`, parentheses.

use std::fmt;
use std::sync::Arc;

use crate::graph::Graph;
use crate::{Error, Result};

pub type Var = Arc<str>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Forall(Var, Box<Formula>),
    Exists(Var, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Not(Box<Formula>),
    Eq(Var, Var),
    Adj(Var, Var),
}

impl Formula {
    /// Maximum quantifier nesting; atoms are 0, connectives take the max of
    /// their children, a quantifier adds 1.
    pub fn quantifier_depth(&self) -> usize {
        match self {
            Formula::Forall(_, f) | Formula::Exists(_, f) => 1 + f.quantifier_depth(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.quantifier_depth().max(b.quantifier_depth())
            }
            Formula::Not(f) => f.quantifier_depth(),
            Formula::Eq(..) | Formula::Adj(..) => 0,
        }
    }

    /// Free variables in first-occurrence order.
    pub fn free_variables(&self) -> Vec<Var> {
        let mut bound: Vec<Var> = Vec::new();
        let mut free: Vec<Var> = Vec::new();
        self.walk_free(&mut bound, &mut free);
        free
    }

    fn walk_free(&self, bound: &mut Vec<Var>, free: &mut Vec<Var>) {
        match self {
            Formula::Forall(v, f) | Formula::Exists(v, f) => {
                bound.push(v.clone());
                f.walk_free(bound, free);
                bound.pop();
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.walk_free(bound, free);
                b.walk_free(bound, free);
            }
            Formula::Not(f) => f.walk_free(bound, free),
            Formula::Eq(a, b) | Formula::Adj(a, b) => {
                for v in [a, b] {
                    if !bound.contains(v) && !free.contains(v) {
                        free.push(v.clone());
                    }
                }
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_variables().is_empty()
    }

    /// Exact truth value on `g` by nested iteration over assignments; the
    /// formula must be a sentence.
    pub fn evaluate(&self, g: &Graph) -> Result<bool> {
        match self.free_variables().first() {
            Some(v) => Err(Error::UnboundVariable(v.to_string())),
            None => {
                let mut env = Vec::new();
                Ok(self.eval_env(g, &mut env))
            }
        }
    }

    fn eval_env(&self, g: &Graph, env: &mut Vec<(Var, usize)>) -> bool {
        match self {
            Formula::Forall(v, f) => {
                for w in 0..g.v() {
                    env.push((v.clone(), w));
                    let ok = f.eval_env(g, env);
                    env.pop();
                    if !ok {
                        return false;
                    }
                }
                true
            }
            Formula::Exists(v, f) => {
                for w in 0..g.v() {
                    env.push((v.clone(), w));
                    let ok = f.eval_env(g, env);
                    env.pop();
                    if ok {
                        return true;
                    }
                }
                false
            }
            Formula::And(a, b) => a.eval_env(g, env) && b.eval_env(g, env),
            Formula::Or(a, b) => a.eval_env(g, env) || b.eval_env(g, env),
            Formula::Implies(a, b) => !a.eval_env(g, env) || b.eval_env(g, env),
            Formula::Not(f) => !f.eval_env(g, env),
            Formula::Eq(a, b) => lookup(env, a) == lookup(env, b),
            Formula::Adj(a, b) => g.has_edge(lookup(env, a), lookup(env, b)),
        }
    }

    /// Conjunction of a non-empty list (left fold).
    pub fn and_all(mut fs: Vec<Formula>) -> Option<Formula> {
        let first = if fs.is_empty() {
            return None;
        } else {
            fs.remove(0)
        };
        Some(
            fs.into_iter()
                .fold(first, |acc, f| Formula::And(Box::new(acc), Box::new(f))),
        )
    }
}

fn lookup(env: &[(Var, usize)], v: &Var) -> usize {
    // innermost binding wins (shadowing)
    env.iter()
        .rev()
        .find(|(name, _)| name == v)
        .map(|(_, w)| *w)
        .expect("evaluation of a checked sentence never misses a binding")
}

// ---------------------------------------------------------------------------
// printing

impl Formula {
    fn prec(&self) -> u8 {
        match self {
            Formula::Implies(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            Formula::Not(..) => 4,
            Formula::Forall(..) | Formula::Exists(..) => 0,
            Formula::Eq(..) | Formula::Adj(..) => 5,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, outer: u8) -> fmt::Result {
        let me = self.prec();
        let parens =
            me < outer || matches!(self, Formula::Forall(..) | Formula::Exists(..)) && outer > 0;
        if parens {
            write!(f, "(")?;
        }
        match self {
            Formula::Forall(v, g) => {
                write!(f, "A{v}.")?;
                g.fmt_prec(f, 0)?;
            }
            Formula::Exists(v, g) => {
                write!(f, "E{v}.")?;
                g.fmt_prec(f, 0)?;
            }
            Formula::Implies(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, " -> ")?;
                b.fmt_prec(f, 1)?;
            }
            Formula::Or(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, " | ")?;
                b.fmt_prec(f, 3)?;
            }
            Formula::And(a, b) => {
                a.fmt_prec(f, 3)?;
                write!(f, " & ")?;
                b.fmt_prec(f, 4)?;
            }
            Formula::Not(g) => {
                write!(f, "!")?;
                g.fmt_prec(f, 4)?;
            }
            Formula::Eq(a, b) => write!(f, "{a}={b}")?,
            Formula::Adj(a, b) => write!(f, "{a}~{b}")?,
        }
        if parens {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

// ---------------------------------------------------------------------------
// parsing

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Parser<'a> {
        Parser {
            src: src.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            col: self.col,
            msg: msg.into(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\r' | b'\n')) {
            self.bump();
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{}`", c as char)))
        }
    }

    fn ident(&mut self) -> Result<Var> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_ascii_lowercase() => {
                self.bump();
            }
            _ => return Err(self.err("expected a variable (lowercase identifier)")),
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_lowercase() || c.is_ascii_digit() || c == b'_')
        {
            self.bump();
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .into())
    }

    fn formula(&mut self) -> Result<Formula> {
        let lhs = self.or_chain()?;
        self.skip_ws();
        if self.peek() == Some(b'-') {
            self.bump();
            self.expect(b'>')?;
            let rhs = self.formula()?;
            return Ok(Formula::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn or_chain(&mut self) -> Result<Formula> {
        let mut lhs = self.and_chain()?;
        loop {
            self.skip_ws();
            if self.peek() == Some(b'|') {
                self.bump();
                let rhs = self.and_chain()?;
                lhs = Formula::Or(Box::new(lhs), Box::new(rhs));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn and_chain(&mut self) -> Result<Formula> {
        let mut lhs = self.unary()?;
        loop {
            self.skip_ws();
            if self.peek() == Some(b'&') {
                self.bump();
                let rhs = self.unary()?;
                lhs = Formula::And(Box::new(lhs), Box::new(rhs));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Formula> {
        self.skip_ws();
        match self.peek() {
            Some(b'!') => {
                self.bump();
                Ok(Formula::Not(Box::new(self.unary()?)))
            }
            Some(b'A') => {
                self.bump();
                let v = self.ident()?;
                self.expect(b'.')?;
                Ok(Formula::Forall(v, Box::new(self.formula()?)))
            }
            Some(b'E') => {
                self.bump();
                let v = self.ident()?;
                self.expect(b'.')?;
                Ok(Formula::Exists(v, Box::new(self.formula()?)))
            }
            Some(b'(') => {
                self.bump();
                let f = self.formula()?;
                self.expect(b')')?;
                Ok(f)
            }
            Some(c) if c.is_ascii_lowercase() => {
                let a = self.ident()?;
                self.skip_ws();
                match self.peek() {
                    Some(b'=') => {
                        self.bump();
                        Ok(Formula::Eq(a, self.ident()?))
                    }
                    Some(b'~') => {
                        self.bump();
                        Ok(Formula::Adj(a, self.ident()?))
                    }
                    _ => Err(self.err("expected `=` or `~` after a variable")),
                }
            }
            Some(c) => Err(self.err(format!("unexpected character `{}`", c as char))),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

/// Parses a formula, allowing free variables.
pub fn parse_formula(text: &str) -> Result<Formula> {
    let mut p = Parser::new(text);
    let f = p.formula()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("trailing input"));
    }
    Ok(f)
}

/// Parses a sentence; free variables are rejected.
pub fn parse(text: &str) -> Result<Formula> {
    let f = parse_formula(text)?;
    if let Some(v) = f.free_variables().first() {
        return Err(Error::UnboundVariable(v.to_string()));
    }
    Ok(f)
}

/// Parses a formula file: one sentence per line, `#` starts a comment.
pub fn parse_file(text: &str) -> Result<Vec<Formula>> {
    let mut out = Vec::new();
    for line in text.lines() {
        let line = match line.find('#') {
            Some(i) => &line[..i],
            None => line,
        };
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse(line.trim())?);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// corpus

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Monotonicity {
    /// preserved under edge addition
    Increasing,
    /// preserved under edge deletion
    Decreasing,
}

#[derive(Clone, Debug)]
pub struct CorpusSentence {
    pub text: &'static str,
    pub formula: Formula,
    pub depth: usize,
    pub monotone: Option<Monotonicity>,
}

use Monotonicity::{Decreasing, Increasing};

/// (text, monotonicity): the master corpus, grouped by depth below.
const CORPUS_RAW: &[(&str, Option<Monotonicity>)] = &[
    // depth 1
    ("Ex.(x=x)", None),
    ("Ax.(x=x)", None),
    ("Ex.(x~x)", None),
    ("Ax.!(x~x)", None),
    ("!Ex.(x~x)", None),
    ("Ax.(x~x)", None),
    ("Ex.!(x=x)", None),
    ("(Ax.(x=x)) & Ex.(x=x)", None),
    ("(Ex.(x=x)) | Ex.(x~x)", None),
    ("(Ax.(x~x)) -> Ex.(x=x)", None),
    ("!Ax.!(x=x)", None),
    ("(Ex.(x=x)) & !Ex.(x~x)", None),
    ("Ax.(x=x | x~x)", None),
    ("Ex.(x=x & !(x~x))", None),
    ("!Ex.(x=x)", None),
    ("Ax.!(x=x)", None),
    ("(Ex.(x=x)) -> Ax.!(x~x)", None),
    ("(Ax.(x=x)) -> Ax.(x~x)", None),
    ("(Ex.(x=x)) & Ax.(x=x)", None),
    ("!((Ex.(x=x)) & Ex.!(x=x))", None),
    ("(Ax.(x=x)) | Ex.(x~x)", None),
    // depth 2
    ("Ex.Ay.(x=y | x~y)", Some(Increasing)),
    ("Ex.Ay.(x=y)", None),
    ("Ex.Ey.(x~y)", Some(Increasing)),
    ("!Ex.Ey.(x~y)", Some(Decreasing)),
    ("Ex.Ay.!(x~y)", Some(Decreasing)),
    ("Ax.Ey.(x~y)", Some(Increasing)),
    ("Ex.Ey.!(x=y)", None),
    ("Ex.Ey.(!(x=y) & !(x~y))", Some(Decreasing)),
    ("Ax.Ay.(x=y | x~y)", Some(Increasing)),
    ("Ax.Ay.(x~y -> y~x)", None),
    ("Ex.Ey.(x~y & y~x)", Some(Increasing)),
    ("Ax.Ey.!(x=y)", None),
    ("Ex.Ay.(x=y | !(x~y))", Some(Decreasing)),
    ("Ax.Ay.!(x~y)", Some(Decreasing)),
    ("Ex.Ey.(x=y)", None),
    ("Ax.Ey.(x=y)", None),
    ("Ax.Ey.(x~y | x=y)", None),
    ("Ex.Ay.(y~x -> y=x)", Some(Decreasing)),
    ("Ax.Ay.(x=y)", None),
    ("(Ex.Ey.(x~y)) & Ex.Ay.(x=y | x~y)", Some(Increasing)),
    ("Ax.Ey.(y~x)", Some(Increasing)),
    ("(Ex.Ey.(x~y)) -> Ax.Ey.(x~y)", None),
    // depth 3
    ("Ex.Ey.Ez.(x~y & y~z & x~z)", Some(Increasing)),
    ("Ex.Ey.Ez.(!(x=y) & !(y=z) & !(x=z))", None),
    ("Ax.Ay.Ez.(x=y | (z~x & z~y))", Some(Increasing)),
    ("Ax.Ay.(x~y -> Ez.(z~x & z~y))", None),
    (
        "Ex.Ey.(!(x=y) & Az.(z=x | z=y | z~x | z~y))",
        Some(Increasing),
    ),
    ("Ax.Ey.Ez.(x~y & x~z & !(y=z))", Some(Increasing)),
    ("Ex.Ey.Ez.(x~y & y~z & !(x~z) & !(x=z))", None),
    ("Ax.Ay.(x=y | x~y | Ez.(z~x & z~y))", Some(Increasing)),
    ("Ex.Ey.Ez.(x~y & y~z)", Some(Increasing)),
    ("!Ex.Ey.Ez.(x~y & y~z & x~z)", Some(Decreasing)),
    (
        "Ex.Ey.Ez.(!(x=y) & !(y=z) & !(x=z) & !(x~y) & !(y~z) & !(x~z))",
        Some(Decreasing),
    ),
    ("Ax.Ey.Ez.(!(y=z) & !(y=x) & !(z=x))", None),
    ("Ex.Ay.Ez.(x=y | (y~z & z~x))", Some(Increasing)),
    ("Ax.Ay.Az.((x~y & y~z) -> x~z)", None),
    ("Ex.Ey.Ez.(x~y & x~z & !(y=z) & !(y~z))", None),
    ("Ax.Ay.(!(x=y) -> Ez.(z~x | z~y))", Some(Increasing)),
    ("Ex.Ay.(x=y | Ez.(z~x & z~y))", Some(Increasing)),
    ("Ax.Ey.(x~y & Ez.(z~y & !(z=x)))", Some(Increasing)),
    ("Ex.Ey.(x~y & Az.(z~x | z~y | z=x | z=y))", Some(Increasing)),
    (
        "Ax.Ay.Az.(x=y | y=z | x=z | x~y | y~z | x~z)",
        Some(Increasing),
    ),
    (
        "(Ex.Ey.Ez.(x~y & y~z & x~z)) & Ax.Ey.(x~y)",
        Some(Increasing),
    ),
    ("Ax.(Ey.(x~y)) | Ez.At.(z=t | z~t)", Some(Increasing)),
    // depth 4
    (
        "Ex.Ey.Ez.Et.(x~y & x~z & x~t & y~z & y~t & z~t)",
        Some(Increasing),
    ),
    ("Ax.Ey.Ez.(x~y & y~z & (Et.(x~z)))", None),
    (
        "Ex.Ey.Ez.Et.(!(x=y) & !(x=z) & !(x=t) & !(y=z) & !(y=t) & !(z=t))",
        None,
    ),
    ("Ex.Ey.Ez.Et.(x~y & y~z & z~t & t~x)", Some(Increasing)),
    (
        "Ex.Ey.Ez.Et.(x~y & y~z & z~t & t~x & !(x~z) & !(y~t))",
        None,
    ),
    (
        "Ex.Ey.Ez.Et.(x~y & y~z & z~t & !(x=z) & !(x=t) & !(y=t))",
        Some(Increasing),
    ),
    ("Ax.Ay.((x~y) -> Ez.Et.(z~x & t~y & !(z=t)))", None),
    ("Ex.Ay.Ez.At.(x=y | (z~y & (t~z -> t~z)))", Some(Increasing)),
    ("Ax.Ey.Ez.Et.(x~y & y~z & z~t)", Some(Increasing)),
    (
        "!Ex.Ey.Ez.Et.(x~y & x~z & x~t & y~z & y~t & z~t)",
        Some(Decreasing),
    ),
    (
        "Ex.Ey.Ez.Et.(x~t & y~t & z~t & !(x=y) & !(y=z) & !(x=z))",
        Some(Increasing),
    ),
    (
        "Ax.Ay.Az.Et.(x=y | y=z | x=z | t~x | t~y | t~z)",
        Some(Increasing),
    ),
    (
        "Ex.Ey.Ez.Et.(x~y & z~t & !(x=z) & !(x=t) & !(y=z) & !(y=t))",
        Some(Increasing),
    ),
    ("Ax.Ey.(x~y & Ez.(y~z & Et.(z~t)))", Some(Increasing)),
    ("Ex.Ay.Ez.Et.(x=y | x~y | (z~x & z~y & t~z))", None),
    (
        "Ax.Ay.(x=y | x~y | Ez.(z~x & z~y & Et.(t~z)))",
        Some(Increasing),
    ),
    (
        "Ex.Ey.Ez.Et.(x~y & x~z & x~t & !(y=z) & !(y=t) & !(z=t))",
        Some(Increasing),
    ),
    (
        "Ax.Ey.Ez.Et.(!(y=z) & !(z=t) & !(y=t) & !(x=y) & !(x=z) & !(x=t))",
        None,
    ),
    (
        "Ex.Ey.Ez.Et.((x~y & y~z & z~t) | (x~z & z~y & y~t))",
        Some(Increasing),
    ),
    ("Ax.Ay.Az.At.(x=y | z=t | x~y | z~t)", Some(Increasing)),
    (
        "Ex.Ey.Ez.At.(x~y & y~z & x~z & (t~x | t~y | t~z | t=x | t=y | t=z))",
        Some(Increasing),
    ),
];

/// The deterministic corpus of FO sentences with quantifier depth at most
/// `k`, for `k <= 4`.
pub fn sentence_corpus(k: usize) -> Result<Vec<CorpusSentence>> {
    if k > 4 {
        return Err(Error::SizeBound {
            what: "corpus depth",
            got: k,
            limit: 4,
        });
    }
    let mut out = Vec::new();
    for &(text, monotone) in CORPUS_RAW {
        let formula = parse(text)?;
        let depth = formula.quantifier_depth();
        if depth <= k {
            out.push(CorpusSentence {
                text,
                formula,
                depth,
                monotone,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probe::Rng;

    #[test]
    fn triangle_membership_sentence_depth_4() {
        let f = parse("Ax.Ey.Ez.(x~y & y~z & (Et.(x~z)))").unwrap();
        assert_eq!(f.quantifier_depth(), 4);
        // every vertex is in a triangle: true on K4, false on P3
        assert!(f.evaluate(&Graph::complete(4)).unwrap());
        assert!(!f.evaluate(&Graph::path(3)).unwrap());
    }

    #[test]
    fn simple_sentences() {
        let f = parse("Ex.(x=x)").unwrap();
        assert_eq!(f.quantifier_depth(), 1);
        assert!(f.evaluate(&Graph::empty(1)).unwrap());
        assert!(!f.evaluate(&Graph::empty(0)).unwrap());
        assert!(matches!(parse("Ex.(x~y)"), Err(Error::UnboundVariable(v)) if v == "y"));
    }

    #[test]
    fn depth_recursion() {
        assert_eq!(parse_formula("x~y").unwrap().quantifier_depth(), 0);
        let f = parse("Ax.(Ey.(x~y)) & (Ez.Et.(z~t))").unwrap();
        assert_eq!(f.quantifier_depth(), 3);
    }

    #[test]
    fn evaluation_examples() {
        let f = parse("Ax.Ey.(x~y)").unwrap();
        assert!(f.evaluate(&Graph::complete(3)).unwrap());
        assert!(!f.evaluate(&Graph::empty(1)).unwrap());
        // free variable rejected by evaluate as well
        let g = parse_formula("x~y").unwrap();
        assert!(matches!(
            g.evaluate(&Graph::complete(2)),
            Err(Error::UnboundVariable(_))
        ));
    }

    #[test]
    fn precedence_and_scope() {
        // ! binds tighter than &, & tighter than |, | tighter than ->
        let f = parse_formula("!x=y & x~y | x=y -> x~y").unwrap();
        assert!(matches!(f, Formula::Implies(..)));
        // printing is minimal-paren and reparses to the same tree
        assert_eq!(f.to_string(), "!x=y & x~y | x=y -> x~y");
        assert_eq!(parse_formula(&f.to_string()).unwrap(), f);
        // quantifier scope extends maximally right
        let g = parse("Ax.Ey.x~y & x=x").unwrap();
        assert_eq!(g.to_string(), "Ax.Ey.x~y & x=x");
        match g {
            Formula::Forall(_, inner) => match *inner {
                Formula::Exists(_, body) => {
                    assert!(matches!(*body, Formula::And(..)));
                }
                other => panic!("expected Exists, got {other}"),
            },
            other => panic!("expected Forall, got {other}"),
        }
    }

    #[test]
    fn parse_errors_have_positions() {
        match parse("Ax.(x~") {
            Err(Error::Parse { line, col, .. }) => {
                assert_eq!(line, 1);
                assert!(col >= 6);
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn file_parsing() {
        let text = "# corpus\nEx.(x=x)\n\nAx.Ey.(x~y) # min degree\n";
        let fs = parse_file(text).unwrap();
        assert_eq!(fs.len(), 2);
    }

    fn random_formula(rng: &mut Rng, depth: usize, scope: &mut Vec<Var>) -> Formula {
        let vars = ["x", "y", "z", "t"];
        let can_atom = !scope.is_empty();
        let choice = if depth == 0 {
            if can_atom {
                5 + rng.next_below(2)
            } else {
                panic!("depth 0 with empty scope")
            }
        } else if !can_atom {
            rng.next_below(2)
        } else {
            rng.next_below(7)
        };
        match choice {
            0 | 1 => {
                let v: Var = vars[rng.next_below(4) as usize].into();
                scope.push(v.clone());
                let body = random_formula(rng, depth - 1, scope);
                scope.pop();
                if choice == 0 {
                    Formula::Forall(v, Box::new(body))
                } else {
                    Formula::Exists(v, Box::new(body))
                }
            }
            2 => Formula::And(
                Box::new(random_formula(rng, depth - 1, scope)),
                Box::new(random_formula(rng, depth - 1, scope)),
            ),
            3 => Formula::Or(
                Box::new(random_formula(rng, depth - 1, scope)),
                Box::new(random_formula(rng, depth - 1, scope)),
            ),
            4 => Formula::Not(Box::new(random_formula(rng, depth - 1, scope))),
            _ => {
                let a = scope[rng.next_below(scope.len() as u64) as usize].clone();
                let b = scope[rng.next_below(scope.len() as u64) as usize].clone();
                if choice % 2 == 0 {
                    Formula::Eq(a, b)
                } else {
                    Formula::Adj(a, b)
                }
            }
        }
    }

    #[test]
    fn print_parse_round_trip() {
        let mut rng = Rng::seeded(31);
        for _ in 0..1000 {
            let mut scope = Vec::new();
            let depth = 1 + rng.next_below(3) as usize;
            let f = random_formula(&mut rng, depth, &mut scope);
            let printed = f.to_string();
            let reparsed = parse_formula(&printed)
                .unwrap_or_else(|e| panic!("reparse of `{printed}` failed: {e}"));
            assert_eq!(reparsed, f, "round trip of `{printed}`");
        }
    }

    #[test]
    fn evaluation_respects_isomorphism() {
        let mut rng = Rng::seeded(57);
        let corpus = sentence_corpus(3).unwrap();
        for _ in 0..60 {
            let n = 2 + rng.next_below(4) as usize;
            let mut g = Graph::empty(n);
            for u in 0..n {
                for v in u + 1..n {
                    if rng.next_below(2) == 0 {
                        g.add_edge(u, v);
                    }
                }
            }
            let perm = rng.permutation(n);
            let h = g.permuted(&perm);
            for s in corpus.iter().take(12) {
                assert_eq!(
                    s.formula.evaluate(&g).unwrap(),
                    s.formula.evaluate(&h).unwrap(),
                    "{} differs under relabeling",
                    s.text
                );
            }
        }
    }

    #[test]
    fn corpus_counts_and_members() {
        let corpus = sentence_corpus(4).unwrap();
        for d in 1..=4 {
            let count = corpus.iter().filter(|s| s.depth == d).count();
            assert!(count >= 20, "only {count} sentences of depth {d}");
        }
        let texts: Vec<&str> = corpus.iter().map(|s| s.text).collect();
        assert!(texts.contains(&"Ex.Ay.(x=y | x~y)"));
        assert!(texts.contains(&"Ex.Ey.Ez.(x~y & y~z & x~z)"));
        assert!(texts.contains(&"Ex.Ey.Ez.Et.(x~y & x~z & x~t & y~z & y~t & z~t)"));
        // depth filter really filters
        assert!(sentence_corpus(2).unwrap().iter().all(|s| s.depth <= 2));
        assert!(sentence_corpus(5).is_err());
    }

    #[test]
    fn monotone_sentences_preserved_under_edge_addition() {
        let mut rng = Rng::seeded(71);
        let corpus = sentence_corpus(4).unwrap();
        let flagged: Vec<&CorpusSentence> =
            corpus.iter().filter(|s| s.monotone.is_some()).collect();
        for _ in 0..200 {
            let n = 2 + rng.next_below(4) as usize;
            let mut g = Graph::empty(n);
            for u in 0..n {
                for v in u + 1..n {
                    if rng.next_below(3) == 0 {
                        g.add_edge(u, v);
                    }
                }
            }
            // add a few random edges for G'
            let mut g2 = g.clone();
            for _ in 0..3 {
                let u = rng.next_below(n as u64) as usize;
                let v = rng.next_below(n as u64) as usize;
                if u != v {
                    g2.add_edge(u, v);
                }
            }
            for s in &flagged {
                let before = s.formula.evaluate(&g).unwrap();
                let after = s.formula.evaluate(&g2).unwrap();
                match s.monotone.unwrap() {
                    Monotonicity::Increasing => assert!(!before || after, "{}", s.text),
                    Monotonicity::Decreasing => assert!(!after || before, "{}", s.text),
                }
            }
        }
    }
}
