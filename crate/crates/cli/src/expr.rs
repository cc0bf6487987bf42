//! Expression language for manifest entries and command arguments.
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := factor (("*" | "/") factor)*
//! factor := "-" factor | wedge
//! wedge  := atom ("^" (INT | atom))*      ^INT is a power, otherwise a wedge
//! atom   := INT | NAME | e[INT] | (sin|cos) "(" expr ")" | "(" expr ")"
//! ```
//!
//! Coordinates are `x1 .. xd` (`x`, `y`, `z` alias the first three), `e[j]`
//! are the fiber generators (1-based) and `t` is the time variable of
//! densities. `*` multiplies (wedge for fiber terms). Torus mode accepts
//! coordinates only inside `sin`/`cos`, with integer frequencies; chart mode
//! has no trigonometric functions.

use std::fmt;

use graded_core::algebra::{CoeffFn, Mode, Ring, Superfunction, Q};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExprError {
    /// 1-based character column; 0 when the error concerns the whole input.
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ExprError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.column > 0 {
            write!(f, "column {}: {}", self.column, self.message)
        } else {
            f.write_str(&self.message)
        }
    }
}

impl std::error::Error for ExprError {}

fn fail<T>(column: usize, message: impl Into<String>) -> Result<T, ExprError> {
    Err(ExprError { column, message: message.into() })
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Name(String),
    Sym(char),
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push((Tok::Int(s.parse().expect("digits")), col));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Name(chars[start..i].iter().collect()), col));
        } else if "+-*/^()[]".contains(c) {
            out.push((Tok::Sym(c), col));
            i += 1;
        } else {
            return fail(col, format!("unexpected character '{c}'"));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
enum Node {
    Int(BigInt),
    Name(String),
    Gen(usize),
    Func(String, Box<Ast>),
    Neg(Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, u32),
}

#[derive(Clone, Debug)]
struct Ast {
    node: Node,
    column: usize,
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn column(&self) -> usize {
        self.toks.get(self.pos).map(|(_, c)| *c).unwrap_or(self.end)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ExprError> {
        if self.eat(c) {
            Ok(())
        } else {
            fail(self.column(), format!("expected '{c}'"))
        }
    }

    fn expr(&mut self) -> Result<Ast, ExprError> {
        let mut lhs = self.term()?;
        loop {
            let column = self.column();
            let node = if self.eat('+') {
                Node::Add(Box::new(lhs), Box::new(self.term()?))
            } else if self.eat('-') {
                Node::Sub(Box::new(lhs), Box::new(self.term()?))
            } else {
                return Ok(lhs);
            };
            lhs = Ast { node, column };
        }
    }

    fn term(&mut self) -> Result<Ast, ExprError> {
        let mut lhs = self.factor()?;
        loop {
            let column = self.column();
            let node = if self.eat('*') {
                Node::Mul(Box::new(lhs), Box::new(self.factor()?))
            } else if self.eat('/') {
                Node::Div(Box::new(lhs), Box::new(self.factor()?))
            } else {
                return Ok(lhs);
            };
            lhs = Ast { node, column };
        }
    }

    fn factor(&mut self) -> Result<Ast, ExprError> {
        let column = self.column();
        if self.eat('-') {
            let inner = self.factor()?;
            return Ok(Ast { node: Node::Neg(Box::new(inner)), column });
        }
        self.wedge()
    }

    fn wedge(&mut self) -> Result<Ast, ExprError> {
        let mut lhs = self.atom()?;
        loop {
            let column = self.column();
            if !self.eat('^') {
                return Ok(lhs);
            }
            if let Some(Tok::Int(n)) = self.peek().cloned() {
                self.pos += 1;
                let n = n.to_u32().filter(|&n| n <= 64).ok_or(ExprError { column, message: "exponent too large".into() })?;
                lhs = Ast { node: Node::Pow(Box::new(lhs), n), column };
            } else {
                let rhs = self.atom()?;
                lhs = Ast { node: Node::Mul(Box::new(lhs), Box::new(rhs)), column };
            }
        }
    }

    fn atom(&mut self) -> Result<Ast, ExprError> {
        let column = self.column();
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(Ast { node: Node::Int(n), column })
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(')')?;
                Ok(inner)
            }
            Some(Tok::Name(name)) => {
                self.pos += 1;
                if name == "e" && self.eat('[') {
                    let icol = self.column();
                    let j = match self.peek().cloned() {
                        Some(Tok::Int(j)) => {
                            self.pos += 1;
                            j.to_usize().unwrap_or(usize::MAX)
                        }
                        _ => return fail(icol, "expected a generator index"),
                    };
                    self.expect(']')?;
                    return Ok(Ast { node: Node::Gen(j), column });
                }
                if self.eat('(') {
                    let arg = self.expr()?;
                    self.expect(')')?;
                    return Ok(Ast { node: Node::Func(name, Box::new(arg)), column });
                }
                Ok(Ast { node: Node::Name(name), column })
            }
            Some(Tok::Sym(c)) => fail(column, format!("unexpected '{c}'")),
            None => fail(column, "unexpected end of expression"),
        }
    }
}

fn parse_ast(src: &str) -> Result<Ast, ExprError> {
    let toks = tokenize(src)?;
    let end = src.chars().count() + 1;
    let mut p = Parser { toks, pos: 0, end };
    if p.toks.is_empty() {
        return fail(0, "empty expression");
    }
    let ast = p.expr()?;
    if p.pos != p.toks.len() {
        return fail(p.column(), "unexpected trailing input");
    }
    Ok(ast)
}

/// Polynomial in `t` with superfunction coefficients (`t^n` at index `n`).
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries(pub Vec<Superfunction>);

impl TimeSeries {
    fn constant(s: Superfunction) -> Self {
        TimeSeries(vec![s])
    }

    fn trim(mut self) -> Self {
        while self.0.len() > 1 && self.0.last().is_some_and(Superfunction::is_zero) {
            self.0.pop();
        }
        self
    }

    fn add(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        let zero = self.0[0].scale_q(&Q::zero());
        TimeSeries((0..n).map(|i| self.0.get(i).unwrap_or(&zero) + o.0.get(i).unwrap_or(&zero)).collect()).trim()
    }

    fn neg(&self) -> Self {
        TimeSeries(self.0.iter().map(|s| -s).collect())
    }

    fn mul(&self, o: &Self) -> Self {
        let zero = self.0[0].scale_q(&Q::zero());
        let mut out = vec![zero; self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        TimeSeries(out).trim()
    }

    /// The `t`-free value, if there is one.
    pub fn time_free(&self) -> Option<&Superfunction> {
        (self.0.len() == 1).then(|| &self.0[0])
    }
}

/// Evaluation context: coefficient ring, fiber rank, and whether `t` is
/// available.
#[derive(Clone, Copy, Debug)]
pub struct Context {
    pub ring: Ring,
    pub rank: usize,
    pub allow_time: bool,
}

impl Context {
    fn coordinate(&self, name: &str) -> Option<usize> {
        let d = self.ring.dim;
        let idx = match name {
            "x" => Some(0),
            "y" => Some(1),
            "z" => Some(2),
            _ => name.strip_prefix('x').and_then(|n| n.parse::<usize>().ok()).filter(|&n| n >= 1).map(|n| n - 1),
        };
        idx.filter(|&i| i < d)
    }

    fn eval(&self, ast: &Ast) -> Result<TimeSeries, ExprError> {
        let (ring, r) = (self.ring, self.rank);
        let col = ast.column;
        Ok(match &ast.node {
            Node::Int(n) => TimeSeries::constant(Superfunction::constant(ring, r, Q::from_integer(n.clone()))),
            Node::Name(name) if name == "t" => {
                if !self.allow_time {
                    return fail(col, "'t' is only available in densities");
                }
                TimeSeries(vec![Superfunction::zero(ring, r), Superfunction::one(ring, r)])
            }
            Node::Name(name) => match self.coordinate(name) {
                Some(a) => match ring.mode {
                    Mode::Chart => TimeSeries::constant(Superfunction::from_coeff(r, CoeffFn::coordinate(ring, a).expect("in range"))),
                    Mode::Torus => {
                        return fail(col, format!("non-periodic expression in torus mode: bare coordinate '{name}' (use sin/cos)"))
                    }
                },
                None => return fail(col, format!("unknown identifier '{name}'")),
            },
            Node::Gen(j) => {
                if *j == 0 || *j > r {
                    return fail(col, format!("generator e[{j}] out of range 1..={r}"));
                }
                TimeSeries::constant(Superfunction::generator(ring, r, j - 1).expect("in range"))
            }
            Node::Func(name, arg) => {
                if name != "sin" && name != "cos" {
                    return fail(col, format!("unknown function '{name}'"));
                }
                if ring.mode == Mode::Chart {
                    return fail(col, format!("'{name}' is not available in chart mode"));
                }
                let k = self.frequency(arg)?;
                let (one, zero) = (Q::from_integer(1.into()), Q::zero());
                let c = if name == "cos" { CoeffFn::trig(k, one, zero) } else { CoeffFn::trig(k, zero, one) };
                TimeSeries::constant(Superfunction::from_coeff(r, c))
            }
            Node::Neg(a) => self.eval(a)?.neg(),
            Node::Add(a, b) => self.eval(a)?.add(&self.eval(b)?),
            Node::Sub(a, b) => self.eval(a)?.add(&self.eval(b)?.neg()),
            Node::Mul(a, b) => self.eval(a)?.mul(&self.eval(b)?),
            Node::Div(a, b) => {
                let num = self.eval(a)?;
                let den = self.eval(b)?;
                let Some(den) = den.time_free() else {
                    return fail(b.column, "cannot divide by an expression in t");
                };
                let inv = self.invert(den, b.column)?;
                num.mul(&TimeSeries::constant(inv))
            }
            Node::Pow(a, n) => {
                let base = self.eval(a)?;
                let mut acc = TimeSeries::constant(Superfunction::one(ring, r));
                for _ in 0..*n {
                    acc = acc.mul(&base);
                }
                acc
            }
        })
    }

    fn invert(&self, den: &Superfunction, column: usize) -> Result<Superfunction, ExprError> {
        if let Some(c) = den.constant_value() {
            if c.is_zero() {
                return fail(column, "division by zero");
            }
            return Ok(Superfunction::constant(self.ring, self.rank, c.recip()));
        }
        if self.ring.mode == Mode::Torus && !den.body().is_constant() {
            return fail(column, "torus mode only divides by expressions with a constant body");
        }
        den.invert_even().or_else(|e| fail(column, format!("cannot divide: {e}")))
    }

    /// Integer frequency vector of a trig argument `Σ k_a x_a`.
    fn frequency(&self, ast: &Ast) -> Result<Vec<i64>, ExprError> {
        let lin = Context { ring: Ring::chart(self.ring.dim), rank: 0, allow_time: false }
            .eval(ast)
            .map_err(|e| ExprError { message: format!("in trigonometric argument: {}", e.message), ..e })?;
        let body = lin.0[0].body();
        let bad = || ExprError { column: ast.column, message: "trigonometric argument must be an integer combination of coordinates".into() };
        let mut k = vec![0i64; self.ring.dim];
        let CoeffFn::Chart(f) = body else { return Err(bad()) };
        if !f.is_polynomial() {
            return Err(bad());
        }
        for (e, c) in f.numerator().terms() {
            let deg: u32 = e.iter().sum();
            if deg != 1 || !c.is_integer() {
                return Err(bad());
            }
            let a = e.iter().position(|&x| x == 1).expect("degree one");
            k[a] = c.to_integer().to_i64().ok_or_else(bad)?;
        }
        Ok(k)
    }
}

/// Parses `src` as a polynomial in `t` over superfunctions.
pub fn parse_series(src: &str, ctx: &Context) -> Result<TimeSeries, ExprError> {
    ctx.eval(&parse_ast(src)?)
}

/// Parses a `t`-free superfunction.
pub fn parse_superfunction(src: &str, ring: Ring, rank: usize) -> Result<Superfunction, ExprError> {
    let s = parse_series(src, &Context { ring, rank, allow_time: false })?;
    Ok(s.time_free().expect("no t allowed").clone())
}

/// Parses a base function (no fiber generators).
pub fn parse_coeff(src: &str, ring: Ring) -> Result<CoeffFn, ExprError> {
    let s = parse_superfunction(src, ring, 0)?;
    Ok(s.body())
}

/// Parses a rational constant.
pub fn parse_rational(src: &str) -> Result<Q, ExprError> {
    let c = parse_coeff(src, Ring::chart(0))?;
    c.constant_value().ok_or(ExprError { column: 0, message: "expected a rational constant".into() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use graded_core::random::{self, case_rng};

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    #[test]
    fn chart_expressions() {
        let ring = Ring::chart(2);
        let s = parse_superfunction("x*e[1]^e[2] - 1/2*y^2", ring, 2).unwrap();
        let e12 = Superfunction::blade(2, 0b11, CoeffFn::coordinate(ring, 0).unwrap());
        let y2 = Superfunction::from_coeff(2, CoeffFn::coordinate(ring, 1).unwrap().pow(2).scale(&q(-1, 2)));
        assert_eq!(s, &e12 + &y2);
        let f = parse_coeff("(x1 + 1)/(x2^2 + 1)", ring).unwrap();
        assert_eq!(f.to_string(), "(x1 + 1)/(x2^2 + 1)");
    }

    #[test]
    fn torus_expressions() {
        let ring = Ring::torus(2);
        let f = parse_coeff("3*cos(2*x1 - x2) + sin(y)/2", ring).unwrap();
        let expected = &CoeffFn::trig(vec![2, -1], q(3, 1), q(0, 1)) + &CoeffFn::trig(vec![0, 1], q(0, 1), q(1, 2));
        assert_eq!(f, expected);
    }

    #[test]
    fn torus_rejects_bare_coordinates() {
        let err = parse_coeff("x^2", Ring::torus(2)).unwrap_err();
        assert_eq!(err.column, 1);
        assert!(err.message.contains("non-periodic"), "{err}");
    }

    #[test]
    fn chart_rejects_trig() {
        let err = parse_coeff("1 + sin(x)", Ring::chart(2)).unwrap_err();
        assert_eq!(err.column, 5);
    }

    #[test]
    fn positioned_errors() {
        assert_eq!(parse_coeff("x + * y", Ring::chart(2)).unwrap_err().column, 5);
        assert_eq!(parse_coeff("x + w", Ring::chart(2)).unwrap_err().column, 5);
        assert_eq!(parse_superfunction("e[3]", Ring::chart(2), 2).unwrap_err().column, 1);
        assert_eq!(parse_coeff("(x + 1", Ring::chart(2)).unwrap_err().column, 7);
        assert!(parse_coeff("cos(x/2)", Ring::torus(2)).is_err());
        assert!(parse_coeff("1/0", Ring::chart(2)).is_err());
        assert!(parse_coeff("1/(1 + cos(x))", Ring::torus(2)).is_err());
    }

    #[test]
    fn wedge_and_power() {
        let ring = Ring::chart(2);
        let a = parse_superfunction("e[2]^e[1]", ring, 2).unwrap();
        let b = parse_superfunction("-e[1]*e[2]", ring, 2).unwrap();
        assert_eq!(a, b);
        assert!(parse_superfunction("e[1]^2", ring, 2).unwrap().is_zero());
        let inv = parse_superfunction("1/(1 + e[1]*e[2])", ring, 2).unwrap();
        assert_eq!(inv, parse_superfunction("1 - e[1]^e[2]", ring, 2).unwrap());
    }

    #[test]
    fn time_series() {
        let ctx = Context { ring: Ring::chart(2), rank: 2, allow_time: true };
        let s = parse_series("(x - t*y)*e[1]^e[2] + t^2", &ctx).unwrap();
        assert_eq!(s.0.len(), 3);
        assert!(parse_superfunction("t", Ring::chart(2), 2).is_err());
    }

    #[test]
    fn printer_round_trip() {
        for (i, ring) in [Ring::chart(2), Ring::torus(2)].into_iter().cycle().take(200).enumerate() {
            let mut rng = case_rng(5, i as u64);
            let rank = if i % 3 == 0 { 4 } else { 2 };
            let s = &random::any_homogeneous(&mut rng, ring, rank) + &random::any_homogeneous(&mut rng, ring, rank);
            let printed = s.to_string();
            let back = parse_superfunction(&printed, ring, rank).unwrap_or_else(|e| panic!("{printed}: {e}"));
            assert_eq!(back, s, "{printed}");
            assert_eq!(back.to_string(), printed);
        }
    }
}
