//! Real trigonometric polynomials on the torus `T^d` with rational
//! coefficients.
//!
//! Stored in the exponential basis `Σ_k c_k e^{i k·x}` with Gaussian-rational
//! `c_k` and the reality condition `c_{-k} = conj(c_k)`. Every operation here
//! preserves that condition, so the map is a canonical normal form.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::poly::Q;

/// Integer frequency vector.
pub type Freq = Vec<i64>;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
struct Cq {
    re: Q,
    im: Q,
}

impl Cq {
    fn new(re: Q, im: Q) -> Self {
        Cq { re, im }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn add(&self, o: &Cq) -> Cq {
        Cq::new(&self.re + &o.re, &self.im + &o.im)
    }
    fn mul(&self, o: &Cq) -> Cq {
        Cq::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
    fn neg(&self) -> Cq {
        Cq::new(-self.re.clone(), -self.im.clone())
    }
    fn scale(&self, k: &Q) -> Cq {
        Cq::new(&self.re * k, &self.im * k)
    }
    /// Multiplication by `i * k`.
    fn mul_i(&self, k: &Q) -> Cq {
        Cq::new(-(&self.im * k), &self.re * k)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct TrigPoly {
    nvars: usize,
    terms: BTreeMap<Freq, Cq>,
}

/// A frequency is canonical when its first nonzero entry is positive.
fn is_canonical(k: &[i64]) -> bool {
    k.iter().find(|&&v| v != 0).is_some_and(|&v| v > 0)
}

fn negate(k: &[i64]) -> Freq {
    k.iter().map(|v| -v).collect()
}

impl TrigPoly {
    pub fn zero(nvars: usize) -> Self {
        TrigPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        let mut t = Self::zero(nvars);
        t.add_term(vec![0; nvars], Cq::new(c, Q::zero()));
        t
    }

    /// `cos(k·x)`.
    pub fn cos(k: Freq) -> Self {
        Self::cos_sin(k, Q::one(), Q::zero())
    }

    /// `sin(k·x)`.
    pub fn sin(k: Freq) -> Self {
        Self::cos_sin(k, Q::zero(), Q::one())
    }

    /// `a cos(k·x) + b sin(k·x)`.
    pub fn cos_sin(k: Freq, a: Q, b: Q) -> Self {
        let nvars = k.len();
        let mut t = Self::zero(nvars);
        if k.iter().all(|&v| v == 0) {
            // sin(0) = 0, cos(0) = 1
            t.add_term(k, Cq::new(a, Q::zero()));
            return t;
        }
        let half = Q::new(1.into(), 2.into());
        // a cos + b sin = (a - i b)/2 e^{ikx} + (a + i b)/2 e^{-ikx}
        let minus = negate(&k);
        t.add_term(k, Cq::new(&a * &half, -(&b * &half)));
        t.add_term(minus, Cq::new(&a * &half, &b * &half));
        t
    }

    fn add_term(&mut self, k: Freq, c: Cq) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(k) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = o.get().add(&c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant Fourier coefficient (real by the reality condition).
    pub fn constant_term(&self) -> Q {
        self.terms
            .get(&vec![0; self.nvars])
            .map(|c| c.re.clone())
            .unwrap_or_else(Q::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|k| k.iter().all(|&v| v == 0))
    }

    pub fn constant_value(&self) -> Option<Q> {
        self.is_constant().then(|| self.constant_term())
    }

    pub fn add(&self, o: &TrigPoly) -> TrigPoly {
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> TrigPoly {
        TrigPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, c)| (k.clone(), c.neg())).collect(),
        }
    }

    pub fn sub(&self, o: &TrigPoly) -> TrigPoly {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: &Q) -> TrigPoly {
        if s.is_zero() {
            return Self::zero(self.nvars);
        }
        TrigPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, c)| (k.clone(), c.scale(s))).collect(),
        }
    }

    pub fn mul(&self, o: &TrigPoly) -> TrigPoly {
        let mut out = Self::zero(self.nvars);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &o.terms {
                let k = ka.iter().zip(kb).map(|(a, b)| a + b).collect();
                out.add_term(k, ca.mul(cb));
            }
        }
        out
    }

    pub fn pow(&self, mut n: u32) -> TrigPoly {
        let mut base = self.clone();
        let mut acc = Self::constant(self.nvars, Q::one());
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn derivative(&self, var: usize) -> TrigPoly {
        let mut out = Self::zero(self.nvars);
        for (k, c) in &self.terms {
            if k[var] != 0 {
                out.add_term(k.clone(), c.mul_i(&Q::from_integer(k[var].into())));
            }
        }
        out
    }

    /// Real cosine/sine coefficients `(k, a, b)` for `a cos(k·x) + b sin(k·x)`
    /// over canonical frequencies, constant term first.
    pub fn real_terms(&self) -> Vec<(Freq, Q, Q)> {
        let mut out = Vec::new();
        let c0 = self.constant_term();
        if !c0.is_zero() {
            out.push((vec![0; self.nvars], c0, Q::zero()));
        }
        let two = Q::from_integer(2.into());
        for (k, c) in &self.terms {
            if is_canonical(k) {
                out.push((k.clone(), &c.re * &two, -(&c.im * &two)));
            }
        }
        out
    }

    pub fn write_with(&self, f: &mut fmt::Formatter<'_>, names: &[String]) -> fmt::Result {
        let terms = self.real_terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        let mut emit = |f: &mut fmt::Formatter<'_>, c: &Q, func: Option<(&str, &Freq)>| -> fmt::Result {
            if c.is_zero() {
                return Ok(());
            }
            let neg = c.is_negative();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let abs = c.abs();
            match func {
                None => write!(f, "{abs}"),
                Some((name, k)) => {
                    if !abs.is_one() {
                        write!(f, "{abs}*")?;
                    }
                    write!(f, "{name}(")?;
                    write_freq(f, k, names)?;
                    write!(f, ")")
                }
            }
        };
        for (k, a, b) in &terms {
            if k.iter().all(|&v| v == 0) {
                emit(f, a, None)?;
            } else {
                emit(f, a, Some(("cos", k)))?;
                emit(f, b, Some(("sin", k)))?;
            }
        }
        Ok(())
    }
}

fn write_freq(f: &mut fmt::Formatter<'_>, k: &[i64], names: &[String]) -> fmt::Result {
    let mut first = true;
    for (v, &kv) in k.iter().enumerate() {
        if kv == 0 {
            continue;
        }
        let abs = kv.abs();
        if first {
            if kv < 0 {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {} ", if kv < 0 { "-" } else { "+" })?;
        }
        first = false;
        if abs != 1 {
            write!(f, "{abs}*")?;
        }
        write!(f, "{}", names[v])?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half() -> Q {
        Q::new(1.into(), 2.into())
    }

    #[test]
    fn cos_squared_has_constant_half() {
        let c = TrigPoly::cos(vec![1, 0]);
        let sq = c.mul(&c);
        assert_eq!(sq.constant_term(), half());
        let expected = TrigPoly::constant(2, half()).add(&TrigPoly::cos(vec![2, 0]).scale(&half()));
        assert_eq!(sq, expected);
    }

    #[test]
    fn pythagoras() {
        let c = TrigPoly::cos(vec![1, -1]);
        let s = TrigPoly::sin(vec![1, -1]);
        assert_eq!(c.mul(&c).add(&s.mul(&s)), TrigPoly::constant(2, Q::one()));
    }

    #[test]
    fn derivatives() {
        assert_eq!(TrigPoly::sin(vec![1, 0]).derivative(0), TrigPoly::cos(vec![1, 0]));
        assert_eq!(TrigPoly::cos(vec![1, 0]).derivative(1), TrigPoly::zero(2));
        assert_eq!(
            TrigPoly::cos(vec![2, 3]).derivative(1),
            TrigPoly::sin(vec![2, 3]).scale(&Q::from_integer((-3).into()))
        );
    }

    #[test]
    fn negative_frequencies_normalize() {
        // sin(-x) = -sin(x), cos(-x) = cos(x)
        assert_eq!(TrigPoly::sin(vec![-1, 0]), TrigPoly::sin(vec![1, 0]).neg());
        assert_eq!(TrigPoly::cos(vec![0, -2]), TrigPoly::cos(vec![0, 2]));
    }
}
