//! Sparse multivariate polynomials over the rationals.
//!
//! Terms are kept in a `BTreeMap` keyed by exponent vectors, so the map order
//! is the lexicographic monomial order with `x1` most significant. The last
//! entry is the leading term.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

/// Exponent vector, one entry per variable.
pub type Monomial = Vec<u32>;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, Q>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Q::one())
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    /// The coordinate `x_{var+1}`.
    pub fn var(nvars: usize, var: usize) -> Self {
        assert!(var < nvars, "variable index {var} out of range");
        let mut e = vec![0; nvars];
        e[var] = 1;
        Self::monomial(e, Q::one())
    }

    pub fn monomial(exps: Monomial, c: Q) -> Self {
        let nvars = exps.len();
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    pub fn constant_value(&self) -> Option<Q> {
        if self.is_zero() {
            Some(Q::zero())
        } else if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }

    pub fn leading(&self) -> Option<(&Monomial, &Q)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> Q {
        self.leading().map(|(_, c)| c.clone()).unwrap_or_else(Q::zero)
    }

    fn add_term(&mut self, e: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect(),
        }
    }

    pub fn scale(&self, k: &Q) -> Poly {
        if k.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * k)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = Poly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, mut n: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(self.nvars);
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

    pub fn derivative(&self, var: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[var] -= 1;
            out.add_term(e2, c * Q::from_integer(e[var].into()));
        }
        out
    }

    /// Highest power of `var` occurring, or `None` for the zero polynomial.
    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[var]).max()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Coefficients of `self` viewed as a univariate polynomial in `var`;
    /// entry `i` multiplies `var^i` and no longer involves `var`.
    fn to_univariate(&self, var: usize) -> Vec<Poly> {
        let deg = self.degree_in(var).unwrap_or(0) as usize;
        let mut out = vec![Poly::zero(self.nvars); deg + 1];
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let k = e2[var] as usize;
            e2[var] = 0;
            out[k].add_term(e2, c.clone());
        }
        out
    }

    fn from_univariate(coeffs: &[Poly], var: usize, nvars: usize) -> Poly {
        let mut out = Poly::zero(nvars);
        for (k, c) in coeffs.iter().enumerate() {
            for (e, q) in &c.terms {
                let mut e2 = e.clone();
                e2[var] += k as u32;
                out.add_term(e2, q.clone());
            }
        }
        out
    }

    /// Scales so the leading coefficient is one. Zero stays zero.
    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let lc = self.leading_coeff();
        self.scale(&lc.recip())
    }

    /// Exact quotient `self / divisor`, or `None` when the division leaves a
    /// remainder.
    pub fn exact_div(&self, divisor: &Poly) -> Option<Poly> {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        if let Some(c) = divisor.constant_value() {
            return Some(self.scale(&c.recip()));
        }
        let (de, dc) = divisor.leading().map(|(e, c)| (e.clone(), c.clone()))?;
        let mut rem = self.clone();
        let mut quot = Poly::zero(self.nvars);
        while let Some((re, rc)) = rem.leading().map(|(e, c)| (e.clone(), c.clone())) {
            if re.iter().zip(&de).any(|(r, d)| r < d) {
                // lex leading term does not divide: not an exact multiple
                return None;
            }
            let e: Monomial = re.iter().zip(&de).map(|(r, d)| r - d).collect();
            let t = Poly::monomial(e, rc / &dc);
            rem = rem.sub(&t.mul(divisor));
            quot = quot.add(&t);
        }
        Some(quot)
    }

    /// Greatest common divisor, normalized to leading coefficient one.
    pub fn gcd(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.nvars, other.nvars);
        if self.is_zero() {
            return other.monic();
        }
        if other.is_zero() {
            return self.monic();
        }
        if self.is_constant() || other.is_constant() {
            return Poly::one(self.nvars);
        }
        // cheap and common: one side divides the other
        let (small, big) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        if big.exact_div(small).is_some() {
            return small.monic();
        }
        let present: Vec<usize> = (0..self.nvars)
            .filter(|&v| self.degree_in(v).unwrap_or(0) > 0 || other.degree_in(v).unwrap_or(0) > 0)
            .collect();
        if let [v] = present[..] {
            return univariate_gcd(self, other, v);
        }
        // a variable missing on one side eliminates itself
        let main = present
            .iter()
            .copied()
            .find(|&v| self.degree_in(v).unwrap_or(0) == 0 || other.degree_in(v).unwrap_or(0) == 0)
            .unwrap_or(*present.last().expect("non-constant polynomial has a variable"));
        let da = self.degree_in(main).unwrap_or(0);
        let db = other.degree_in(main).unwrap_or(0);
        if da == 0 {
            return other.gcd_with_coefficients(main, self);
        }
        if db == 0 {
            return self.gcd_with_coefficients(main, other);
        }
        let (hi, lo) = if da >= db { (self, other) } else { (other, self) };
        let mut a = hi.to_univariate(main);
        let mut b = lo.to_univariate(main);
        let cb = lo.content(main);
        // a primitive divisor only shares primitive factors
        let c = if cb.is_one() {
            cb
        } else {
            let ca = hi.content(main);
            primitive_part_in_place(&mut a, &ca);
            primitive_part_in_place(&mut b, &cb);
            ca.gcd(&cb)
        };
        strip_numeric_content(&mut a);
        strip_numeric_content(&mut b);
        // primitive polynomial remainder sequence
        while !(b.len() == 1 && b[0].is_zero()) {
            let r = pseudo_remainder(&a, &b);
            a = b;
            if r.iter().all(Poly::is_zero) {
                b = vec![Poly::zero(self.nvars)];
            } else {
                let rp = Poly::from_univariate(&r, main, self.nvars);
                let cr = rp.content(main);
                let mut rv = rp.to_univariate(main);
                primitive_part_in_place(&mut rv, &cr);
                strip_numeric_content(&mut rv);
                b = rv;
            }
        }
        let g = if a.len() == 1 {
            Poly::one(self.nvars)
        } else {
            let gp = Poly::from_univariate(&a, main, self.nvars);
            let cg = gp.content(main);
            gp.exact_div(&cg).expect("content divides")
        };
        g.mul(&c).monic()
    }

    /// `gcd(start, content(self))`, folding from the (small) `start`.
    fn gcd_with_coefficients(&self, var: usize, start: &Poly) -> Poly {
        let mut g = start.clone();
        let mut coeffs = self.to_univariate(var);
        coeffs.sort_by_key(Poly::len);
        for c in coeffs.iter().filter(|c| !c.is_zero()) {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g.monic()
    }

    /// GCD of the coefficients of `self` viewed as a polynomial in `var`.
    pub fn content(&self, var: usize) -> Poly {
        let coeffs = self.to_univariate(var);
        let mut g = Poly::zero(self.nvars);
        for c in coeffs.iter().filter(|c| !c.is_zero()) {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    pub fn write_with(&self, f: &mut fmt::Formatter<'_>, names: &[String]) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let is_const = e.iter().all(|&x| x == 0);
            let mut wrote = false;
            if !abs.is_one() || is_const {
                write!(f, "{abs}")?;
                wrote = true;
            }
            for (v, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                if wrote {
                    write!(f, "*")?;
                }
                write!(f, "{}", names[v])?;
                if k > 1 {
                    write!(f, "^{k}")?;
                }
                wrote = true;
            }
        }
        Ok(())
    }
}

fn primitive_part_in_place(coeffs: &mut [Poly], content: &Poly) {
    if content.is_one() || content.is_zero() {
        return;
    }
    for c in coeffs.iter_mut() {
        *c = c.exact_div(content).expect("content divides every coefficient");
    }
}

/// Euclid over Q on dense coefficient vectors in `var`.
fn univariate_gcd(a: &Poly, b: &Poly, var: usize) -> Poly {
    let dense = |p: &Poly| {
        let mut v = vec![Q::zero(); p.degree_in(var).unwrap_or(0) as usize + 1];
        for (e, c) in &p.terms {
            v[e[var] as usize] = c.clone();
        }
        v
    };
    let (mut x, mut y) = (dense(a), dense(b));
    if x.len() < y.len() {
        std::mem::swap(&mut x, &mut y);
    }
    fn make_monic(v: &mut Vec<Q>) {
        while v.len() > 1 && v.last().is_some_and(Zero::is_zero) {
            v.pop();
        }
        let lc = v.last().expect("nonempty").recip();
        for c in v.iter_mut() {
            *c *= &lc;
        }
    }
    make_monic(&mut y);
    while !(y.len() == 1 && y[0].is_zero()) {
        // x mod y with y monic
        let n = y.len() - 1;
        while x.len() > n && !(x.len() == 1 && x[0].is_zero()) {
            let m = x.len() - 1;
            let lc = x[m].clone();
            if !lc.is_zero() {
                for i in 0..=n {
                    let t = &lc * &y[i];
                    x[m - n + i] -= t;
                }
            }
            x.pop();
            if x.is_empty() {
                x.push(Q::zero());
            }
        }
        while x.len() > 1 && x.last().is_some_and(Zero::is_zero) {
            x.pop();
        }
        std::mem::swap(&mut x, &mut y);
        if !(y.len() == 1 && y[0].is_zero()) {
            make_monic(&mut y);
        }
    }
    make_monic(&mut x);
    let mut out = Poly::zero(a.nvars);
    for (k, c) in x.into_iter().enumerate() {
        if !c.is_zero() {
            let mut e = vec![0; a.nvars];
            e[var] = k as u32;
            out.add_term(e, c);
        }
    }
    out
}

/// Scales so the coefficients are coprime integers; keeps remainder
/// sequences over Q from growing.
fn strip_numeric_content(coeffs: &mut [Poly]) {
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for (_, c) in coeffs.iter().flat_map(|p| p.terms.iter()) {
        num = num.gcd(c.numer());
        den = den.lcm(c.denom());
    }
    if num.is_zero() || (num.is_one() && den.is_one()) {
        return;
    }
    let k = Q::new(den, num);
    for c in coeffs.iter_mut() {
        *c = c.scale(&k);
    }
}

/// Pseudo-remainder of univariate polynomials with polynomial coefficients.
fn pseudo_remainder(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    let nv = b[0].nvars;
    let n = b.len() - 1;
    let lb = b[n].clone();
    let mut r: Vec<Poly> = a.to_vec();
    let trim = |r: &mut Vec<Poly>| {
        while r.len() > 1 && r.last().is_some_and(Poly::is_zero) {
            r.pop();
        }
    };
    trim(&mut r);
    while r.len() > n && !(r.len() == 1 && r[0].is_zero()) {
        let m = r.len() - 1;
        let lr = r[m].clone();
        let shift = m - n;
        let mut next: Vec<Poly> = r.iter().map(|c| c.mul(&lb)).collect();
        for (i, bc) in b.iter().enumerate() {
            next[i + shift] = next[i + shift].sub(&bc.mul(&lr));
        }
        debug_assert!(next[m].is_zero());
        r = next;
        trim(&mut r);
        if r.is_empty() {
            r.push(Poly::zero(nv));
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Q {
        Q::from_integer(n.into())
    }

    fn x() -> Poly {
        Poly::var(2, 0)
    }

    fn y() -> Poly {
        Poly::var(2, 1)
    }

    #[test]
    fn derivative_of_x2y() {
        let p = x().pow(2).mul(&y());
        assert_eq!(p.derivative(0), x().mul(&y()).scale(&q(2)));
        assert_eq!(p.derivative(1), x().pow(2));
    }

    #[test]
    fn exact_division() {
        let a = x().add(&y());
        let b = x().sub(&y());
        let p = a.mul(&b);
        assert_eq!(p.exact_div(&a), Some(b.clone()));
        assert_eq!(p.exact_div(&x()), None);
    }

    #[test]
    fn gcd_recovers_common_factor() {
        let one = Poly::one(2);
        let f = x().mul(&y()).add(&one);
        let g = x().sub(&y().pow(2));
        let h = x().add(&one);
        let a = f.mul(&g).scale(&q(3));
        let b = f.mul(&h).scale(&q(-5));
        assert_eq!(a.gcd(&b), f.monic());
        assert!(g.gcd(&h).is_one());
    }

    #[test]
    fn univariate_gcd_over_q() {
        let one = Poly::one(2);
        let f = x().pow(3).scale(&q(2)).add(&one);
        let a = f.mul(&x().sub(&one)).pow(2);
        let b = f.mul(&x().add(&one).pow(5));
        assert_eq!(a.gcd(&b), f.monic());
    }

    #[test]
    fn gcd_eliminates_missing_variable() {
        let one = Poly::one(2);
        let w = y().pow(2).add(&one);
        // `a` involves x, `b` does not: the gcd is free of x
        let a = w.mul(&x().mul(&y()).add(&x().pow(2)).add(&one));
        let b = w.pow(3);
        assert_eq!(a.gcd(&b), w);
        assert!(x().add(&one).gcd(&b).is_one());
    }

    #[test]
    fn gcd_with_powers() {
        let one = Poly::one(2);
        let f = x().add(&one);
        let a = f.pow(3).mul(&y());
        let b = f.pow(2).mul(&y().pow(2));
        assert_eq!(a.gcd(&b), f.pow(2).mul(&y()).monic());
    }
}
