//! Sections of the exterior algebra bundle: superfunctions.
//!
//! A superfunction of fiber rank `r` is a finite sum `Σ_J c_J e_J` over
//! multi-indices `J ⊆ {1..r}`, encoded as bitmasks (bit `j` is generator
//! `e_{j+1}`), with blades written in ascending order. All Koszul signs are
//! derived from transposition counts against that order.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;

use super::coeff::{CoeffFn, Ring};
use super::poly::Q;
use crate::error::{Error, Result};

pub type Blade = u32;

/// Maximum supported fiber rank (blades are `u32` bitmasks).
pub const MAX_RANK: usize = 32;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of_degree(k: usize) -> Self {
        if k % 2 == 0 { Parity::Even } else { Parity::Odd }
    }

    pub fn flip(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    pub fn add(self, o: Parity) -> Parity {
        if self == o { Parity::Even } else { Parity::Odd }
    }

    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    /// True when the Koszul sign `(-1)^{|a||b|}` is negative.
    pub fn koszul(self, o: Parity) -> bool {
        self.is_odd() && o.is_odd()
    }
}

/// Sign of `e_J ∧ e_K` relative to the ascending blade `e_{J∪K}`: `None` if
/// the blades share a generator, `Some(true)` if the sign is negative.
pub fn wedge_sign(j: Blade, k: Blade) -> Option<bool> {
    if j & k != 0 {
        return None;
    }
    // count pairs (a ∈ J, b ∈ K) with a > b
    let mut swaps = 0u32;
    let mut rest = k;
    while rest != 0 {
        let b = rest.trailing_zeros();
        rest &= rest - 1;
        swaps += (j >> b >> 1).count_ones();
    }
    Some(swaps % 2 == 1)
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Superfunction {
    ring: Ring,
    rank: usize,
    terms: BTreeMap<Blade, CoeffFn>,
}

impl Superfunction {
    pub fn zero(ring: Ring, rank: usize) -> Self {
        assert!(rank <= MAX_RANK, "fiber rank {rank} exceeds {MAX_RANK}");
        Superfunction {
            ring,
            rank,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ring: Ring, rank: usize) -> Self {
        Self::from_coeff(rank, CoeffFn::one(ring))
    }

    pub fn constant(ring: Ring, rank: usize, c: Q) -> Self {
        Self::from_coeff(rank, CoeffFn::constant(ring, c))
    }

    /// A degree-0 superfunction with body `c`.
    pub fn from_coeff(rank: usize, c: CoeffFn) -> Self {
        Self::blade(rank, 0, c)
    }

    /// `c · e_J` for an ascending blade `J`.
    pub fn blade(rank: usize, mask: Blade, c: CoeffFn) -> Self {
        let mut s = Self::zero(c.ring(), rank);
        assert!(rank == MAX_RANK || mask >> rank == 0, "blade outside fiber rank");
        if !c.is_zero() {
            s.terms.insert(mask, c);
        }
        s
    }

    /// The generator `e_{j+1}`.
    pub fn generator(ring: Ring, rank: usize, j: usize) -> Result<Self> {
        if j >= rank {
            return Err(Error::IndexOutOfRange { index: j, bound: rank });
        }
        Ok(Self::blade(rank, 1 << j, CoeffFn::one(ring)))
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn terms(&self) -> impl Iterator<Item = (Blade, &CoeffFn)> {
        self.terms.iter().map(|(&m, c)| (m, c))
    }

    pub fn coefficient(&self, mask: Blade) -> CoeffFn {
        self.terms.get(&mask).cloned().unwrap_or_else(|| CoeffFn::zero(self.ring))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(CoeffFn::is_one)
    }

    pub fn ensure_compatible(&self, other: &Superfunction) -> Result<()> {
        self.ring.ensure_same(&other.ring)?;
        if self.rank != other.rank {
            return Err(Error::RankMismatch(self.rank, other.rank));
        }
        Ok(())
    }

    fn push(&mut self, mask: Blade, c: CoeffFn) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(mask) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// Adds `c · e_mask` in place.
    pub fn add_blade(&mut self, mask: Blade, c: CoeffFn) {
        self.push(mask, c);
    }

    /// Graded-commutative exterior product.
    pub fn wedge(&self, other: &Superfunction) -> Result<Superfunction> {
        self.ensure_compatible(other)?;
        Ok(self.wedge_unchecked(other))
    }

    fn wedge_unchecked(&self, other: &Superfunction) -> Superfunction {
        let mut out = Self::zero(self.ring, self.rank);
        for (&ja, ca) in &self.terms {
            for (&jb, cb) in &other.terms {
                if let Some(neg) = wedge_sign(ja, jb) {
                    let p = ca * cb;
                    out.push(ja | jb, if neg { -p } else { p });
                }
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Superfunction {
        let mut acc = Self::one(self.ring, self.rank);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Degree-`k` part.
    pub fn grade_project(&self, k: usize) -> Superfunction {
        self.filter(|m| m.count_ones() as usize == k)
    }

    fn filter(&self, keep: impl Fn(Blade) -> bool) -> Superfunction {
        Superfunction {
            ring: self.ring,
            rank: self.rank,
            terms: self
                .terms
                .iter()
                .filter(|(&m, _)| keep(m))
                .map(|(&m, c)| (m, c.clone()))
                .collect(),
        }
    }

    pub fn body(&self) -> CoeffFn {
        self.coefficient(0)
    }

    pub fn soul(&self) -> Superfunction {
        self.filter(|m| m != 0)
    }

    pub fn even_part(&self) -> Superfunction {
        self.filter(|m| m.count_ones() % 2 == 0)
    }

    pub fn odd_part(&self) -> Superfunction {
        self.filter(|m| m.count_ones() % 2 == 1)
    }

    /// Coefficient of the top blade `e_1 ∧ … ∧ e_r`.
    pub fn top_coefficient(&self) -> CoeffFn {
        let top = if self.rank == MAX_RANK { u32::MAX } else { (1u32 << self.rank) - 1 };
        self.coefficient(top)
    }

    /// `Some(k)` if every term has degree `k`; zero is homogeneous of every
    /// degree and reports `None`.
    pub fn degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(|m| m.count_ones() as usize);
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    /// Parity if homogeneous; zero is reported as even.
    pub fn parity(&self) -> Option<Parity> {
        let mut it = self.terms.keys().map(|m| Parity::of_degree(m.count_ones() as usize));
        let Some(first) = it.next() else {
            return Some(Parity::Even);
        };
        it.all(|p| p == first).then_some(first)
    }

    pub fn is_even(&self) -> bool {
        self.parity() == Some(Parity::Even)
    }

    /// Grade involution `s ↦ Σ (-1)^{|J|} c_J e_J`.
    pub fn involution(&self) -> Superfunction {
        let mut out = self.clone();
        for (m, c) in out.terms.iter_mut() {
            if m.count_ones() % 2 == 1 {
                *c = -&*c;
            }
        }
        out
    }

    /// Applies `f` to every coefficient, keeping blades in place.
    pub fn map_coeffs(&self, f: impl Fn(&CoeffFn) -> CoeffFn) -> Superfunction {
        let mut out = Self::zero(self.ring, self.rank);
        for (&m, c) in &self.terms {
            out.push(m, f(c));
        }
        out
    }

    pub fn scale(&self, c: &CoeffFn) -> Superfunction {
        self.map_coeffs(|x| x * c)
    }

    pub fn scale_q(&self, k: &Q) -> Superfunction {
        self.map_coeffs(|x| x.scale(k))
    }

    /// `∂_a` on coefficients only (the flat part of `∇_a`).
    pub fn partial(&self, a: usize) -> Superfunction {
        self.map_coeffs(|c| c.partial(a))
    }

    /// Contraction `i_{ε^{j+1}}`: odd derivation with `i_j(e_k) = δ_{jk}`.
    pub fn contract(&self, j: usize) -> Superfunction {
        let bit = 1u32 << j;
        let mut out = Self::zero(self.ring, self.rank);
        for (&m, c) in &self.terms {
            if m & bit == 0 {
                continue;
            }
            let before = (m & (bit - 1)).count_ones();
            let v = if before % 2 == 1 { -c } else { c.clone() };
            out.push(m & !bit, v);
        }
        out
    }

    /// Inverse of an even element with invertible body, via the terminating
    /// Neumann series `b^{-1} Σ_k (-b^{-1} ν)^k` on the nilpotent soul `ν`.
    pub fn invert_even(&self) -> Result<Superfunction> {
        if !self.is_even() {
            return Err(Error::OddElement);
        }
        let binv = self
            .body()
            .inverse()
            .map_err(|_| Error::NonInvertibleBody(self.ring.mode))?;
        let step = -&self.soul().scale(&binv);
        let mut term = Self::one(self.ring, self.rank);
        let mut acc = term.clone();
        for _ in 0..=self.rank / 2 {
            term = &term * &step;
            if term.is_zero() {
                return Ok(acc.scale(&binv));
            }
            acc = &acc + &term;
        }
        Err(Error::SeriesDidNotTerminate(self.rank / 2 + 1))
    }

    /// `log(1 + ν) = Σ_{k≥1} (-1)^{k+1} ν^k / k` for even `s = 1 + ν`.
    pub fn log_even(&self) -> Result<Superfunction> {
        if !self.is_even() {
            return Err(Error::OddElement);
        }
        if !self.body().is_one() {
            return Err(Error::BodyNotOne);
        }
        let nu = self.soul();
        let mut term = nu.clone();
        let mut acc = Self::zero(self.ring, self.rank);
        let mut k = 1i64;
        while !term.is_zero() {
            let sign = if k % 2 == 1 { 1 } else { -1 };
            acc = &acc + &term.scale_q(&Q::new(sign.into(), k.into()));
            term = &term * &nu;
            k += 1;
        }
        Ok(acc)
    }

    /// `exp(ν) = Σ_k ν^k / k!` for an even nilpotent `ν` (zero body).
    pub fn exp_nilpotent(&self) -> Result<Superfunction> {
        if !self.is_even() {
            return Err(Error::OddElement);
        }
        if !self.body().is_zero() {
            return Err(Error::NonInvertibleBody(self.ring.mode));
        }
        let mut term = Self::one(self.ring, self.rank);
        let mut acc = term.clone();
        let mut k = 1i64;
        loop {
            term = (&term * self).scale_q(&Q::new(1.into(), k.into()));
            if term.is_zero() {
                return Ok(acc);
            }
            acc = &acc + &term;
            k += 1;
        }
    }

    pub fn is_base_function(&self) -> bool {
        self.terms.keys().all(|&m| m == 0)
    }

    pub fn constant_value(&self) -> Option<Q> {
        if self.is_zero() {
            return Some(Q::zero());
        }
        if self.is_base_function() { self.body().constant_value() } else { None }
    }
}

impl fmt::Display for Superfunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if m == 0 {
                if c.is_compound() {
                    write!(f, "({c})")?;
                } else {
                    write!(f, "{c}")?;
                }
                continue;
            }
            if !c.is_one() {
                if c.is_compound() || c.to_string().starts_with('-') {
                    write!(f, "({c})*")?;
                } else {
                    write!(f, "{c}*")?;
                }
            }
            let idx: Vec<String> = (0..32).filter(|b| m >> b & 1 == 1).map(|b| format!("e[{}]", b + 1)).collect();
            write!(f, "{}", idx.join("^"))?;
        }
        Ok(())
    }
}

impl Add for &Superfunction {
    type Output = Superfunction;
    fn add(self, o: &Superfunction) -> Superfunction {
        self.ensure_compatible(o).expect("incompatible superfunctions");
        let mut out = self.clone();
        for (&m, c) in &o.terms {
            out.push(m, c.clone());
        }
        out
    }
}

impl Sub for &Superfunction {
    type Output = Superfunction;
    fn sub(self, o: &Superfunction) -> Superfunction {
        self + &(-o)
    }
}

impl Neg for &Superfunction {
    type Output = Superfunction;
    fn neg(self) -> Superfunction {
        self.map_coeffs(|c| -c)
    }
}

/// Exterior product; panics on incompatible operands (use `wedge` for a
/// checked version).
impl Mul for &Superfunction {
    type Output = Superfunction;
    fn mul(self, o: &Superfunction) -> Superfunction {
        self.ensure_compatible(o).expect("incompatible superfunctions");
        self.wedge_unchecked(o)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Superfunction {
            type Output = Superfunction;
            fn $m(self, o: Superfunction) -> Superfunction {
                (&self).$m(&o)
            }
        }
        impl $tr<&Superfunction> for Superfunction {
            type Output = Superfunction;
            fn $m(self, o: &Superfunction) -> Superfunction {
                (&self).$m(o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Superfunction {
    type Output = Superfunction;
    fn neg(self) -> Superfunction {
        -&self
    }
}

impl std::iter::Sum for Superfunction {
    fn sum<I: Iterator<Item = Superfunction>>(mut iter: I) -> Superfunction {
        let first = iter.next().expect("sum of an empty iterator needs a ring");
        iter.fold(first, |a, b| &a + &b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Mode;

    const R: Ring = Ring { mode: Mode::Chart, dim: 2 };

    fn e(j: usize) -> Superfunction {
        Superfunction::generator(R, 2, j).unwrap()
    }

    fn c(n: i64) -> Superfunction {
        Superfunction::constant(R, 2, Q::from_integer(n.into()))
    }

    fn x() -> CoeffFn {
        CoeffFn::coordinate(R, 0).unwrap()
    }

    fn y() -> CoeffFn {
        CoeffFn::coordinate(R, 1).unwrap()
    }

    #[test]
    fn wedge_examples() {
        assert!((&e(0) * &e(0)).is_zero());
        let a = e(0).scale(&x());
        let b = e(1).scale(&y());
        assert_eq!(a.wedge(&b).unwrap(), Superfunction::blade(2, 0b11, &x() * &y()));
        assert_eq!(&e(1) * &e(0), -&(&e(0) * &e(1)));
    }

    #[test]
    fn wedge_rejects_mismatch() {
        let other = Superfunction::one(R, 3);
        assert_eq!(e(0).wedge(&other), Err(Error::RankMismatch(2, 3)));
        let torus = Superfunction::one(Ring::torus(2), 2);
        assert!(matches!(e(0).wedge(&torus), Err(Error::RingMismatch(..))));
    }

    #[test]
    fn grade_projections() {
        let e12 = &e(0) * &e(1);
        let s = &c(1) + &e12;
        assert_eq!(s.grade_project(0), c(1));
        assert_eq!(s.grade_project(2), e12);
        assert!(e(0).grade_project(2).is_zero());
    }

    #[test]
    fn inversion() {
        let e12 = &e(0) * &e(1);
        let s = &c(1) + &e12;
        assert_eq!(s.invert_even().unwrap(), &c(1) - &e12);
        assert_eq!(
            c(2).invert_even().unwrap(),
            Superfunction::constant(R, 2, Q::new(1.into(), 2.into()))
        );
        assert_eq!(e12.invert_even(), Err(Error::NonInvertibleBody(Mode::Chart)));
        assert_eq!(e(0).invert_even(), Err(Error::OddElement));
    }

    #[test]
    fn logarithm() {
        let e12 = &e(0) * &e(1);
        assert_eq!((&c(1) + &e12).log_even().unwrap(), e12);
        assert!(c(1).log_even().unwrap().is_zero());
        assert_eq!((&c(2) + &e12).log_even(), Err(Error::BodyNotOne));
    }

    #[test]
    fn contraction_signs() {
        let e12 = &e(0) * &e(1);
        assert_eq!(e12.contract(0), e(1));
        assert_eq!(e12.contract(1), -&e(0));
    }

    #[test]
    fn display_round_trip_shape() {
        let s = &c(1) + &(&e(0) * &e(1)).scale(&(&x() + &y()));
        assert_eq!(s.to_string(), "1 + (x1 + x2)*e[1]^e[2]");
    }
}
