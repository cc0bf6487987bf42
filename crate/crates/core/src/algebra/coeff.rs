//! Base-chart coefficient functions.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::poly::{Poly, Q};
use super::ratfn::RatFn;
use super::trig::{Freq, TrigPoly};
use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Mode {
    /// Rational functions on a coordinate chart.
    Chart,
    /// Trigonometric polynomials on the torus.
    Torus,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Chart => write!(f, "chart"),
            Mode::Torus => write!(f, "torus"),
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "chart" => Ok(Mode::Chart),
            "torus" => Ok(Mode::Torus),
            other => Err(format!("unknown mode `{other}` (expected `chart` or `torus`)")),
        }
    }
}

/// The coefficient ring: a mode and the base dimension.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Ring {
    pub mode: Mode,
    pub dim: usize,
}

impl Ring {
    pub fn chart(dim: usize) -> Self {
        Ring { mode: Mode::Chart, dim }
    }

    pub fn torus(dim: usize) -> Self {
        Ring { mode: Mode::Torus, dim }
    }

    pub fn coordinate_names(&self) -> Vec<String> {
        (1..=self.dim).map(|i| format!("x{i}")).collect()
    }

    pub fn ensure_same(&self, other: &Ring) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::RingMismatch(self.to_string(), other.to_string()))
        }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (d = {})", self.mode, self.dim)
    }
}

/// Exact value `coefficient · (2π)^power` of a torus integral.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct TorusIntegral {
    pub coefficient: Q,
    pub two_pi_power: usize,
}

impl TorusIntegral {
    pub fn is_zero(&self) -> bool {
        self.coefficient.is_zero()
    }
}

impl fmt::Display for TorusIntegral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coefficient.is_zero() {
            write!(f, "0")
        } else {
            write!(f, "{}*(2pi)^{}", self.coefficient, self.two_pi_power)
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum CoeffFn {
    Chart(RatFn),
    Torus(TrigPoly),
}

impl CoeffFn {
    pub fn zero(ring: Ring) -> Self {
        Self::constant(ring, Q::zero())
    }

    pub fn one(ring: Ring) -> Self {
        Self::constant(ring, Q::one())
    }

    pub fn constant(ring: Ring, c: Q) -> Self {
        match ring.mode {
            Mode::Chart => CoeffFn::Chart(RatFn::constant(ring.dim, c)),
            Mode::Torus => CoeffFn::Torus(TrigPoly::constant(ring.dim, c)),
        }
    }

    pub fn integer(ring: Ring, n: i64) -> Self {
        Self::constant(ring, Q::from_integer(n.into()))
    }

    /// The coordinate function `x_{a+1}`; not periodic, so chart mode only.
    pub fn coordinate(ring: Ring, a: usize) -> Result<Self> {
        if a >= ring.dim {
            return Err(Error::IndexOutOfRange { index: a, bound: ring.dim });
        }
        match ring.mode {
            Mode::Chart => Ok(CoeffFn::Chart(RatFn::from_poly(Poly::var(ring.dim, a)))),
            Mode::Torus => Err(Error::NonPeriodic(a + 1)),
        }
    }

    pub fn from_poly(p: Poly) -> Self {
        CoeffFn::Chart(RatFn::from_poly(p))
    }

    /// `a cos(k·x) + b sin(k·x)`, torus mode.
    pub fn trig(k: Freq, a: Q, b: Q) -> Self {
        CoeffFn::Torus(TrigPoly::cos_sin(k, a, b))
    }

    pub fn ring(&self) -> Ring {
        match self {
            CoeffFn::Chart(r) => Ring::chart(r.nvars()),
            CoeffFn::Torus(t) => Ring::torus(t.nvars()),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            CoeffFn::Chart(r) => r.is_zero(),
            CoeffFn::Torus(t) => t.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }

    pub fn constant_value(&self) -> Option<Q> {
        match self {
            CoeffFn::Chart(r) => r.constant_value(),
            CoeffFn::Torus(t) => t.constant_value(),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.constant_value().is_some()
    }

    pub fn scale(&self, k: &Q) -> CoeffFn {
        match self {
            CoeffFn::Chart(r) => CoeffFn::Chart(r.scale(k)),
            CoeffFn::Torus(t) => CoeffFn::Torus(t.scale(k)),
        }
    }

    pub fn pow(&self, n: u32) -> CoeffFn {
        match self {
            CoeffFn::Chart(r) => CoeffFn::Chart(r.pow(n)),
            CoeffFn::Torus(t) => CoeffFn::Torus(t.pow(n)),
        }
    }

    /// Exact partial derivative `∂/∂x_{a+1}`.
    pub fn partial(&self, a: usize) -> CoeffFn {
        match self {
            CoeffFn::Chart(r) => CoeffFn::Chart(r.derivative(a)),
            CoeffFn::Torus(t) => CoeffFn::Torus(t.derivative(a)),
        }
    }

    /// Multiplicative inverse. Torus mode only inverts nonzero constants.
    pub fn inverse(&self) -> Result<CoeffFn> {
        match self {
            CoeffFn::Chart(r) => r
                .recip()
                .map(CoeffFn::Chart)
                .ok_or(Error::NonUnitCoefficient(Mode::Chart)),
            CoeffFn::Torus(t) => match t.constant_value() {
                Some(c) if !c.is_zero() => Ok(CoeffFn::Torus(TrigPoly::constant(t.nvars(), c.recip()))),
                _ => Err(Error::NonUnitCoefficient(Mode::Torus)),
            },
        }
    }

    pub fn checked_div(&self, divisor: &CoeffFn) -> Result<CoeffFn> {
        Ok(self * &divisor.inverse()?)
    }

    /// Constant Fourier coefficient, torus mode.
    pub fn constant_term(&self) -> Result<Q> {
        match self {
            CoeffFn::Chart(_) => Err(Error::ChartModeUnsupported),
            CoeffFn::Torus(t) => Ok(t.constant_term()),
        }
    }

    /// `∫_{T^d} c dx = (2π)^d · c_0`.
    pub fn torus_integral(&self) -> Result<TorusIntegral> {
        let c0 = self.constant_term()?;
        Ok(TorusIntegral {
            coefficient: c0,
            two_pi_power: self.ring().dim,
        })
    }

    /// True when printing needs parentheses as a factor.
    pub fn is_compound(&self) -> bool {
        match self {
            CoeffFn::Chart(r) => r.is_polynomial() && r.numerator().len() > 1,
            CoeffFn::Torus(t) => t.real_terms().iter().map(|(_, a, b)| (!a.is_zero()) as usize + (!b.is_zero()) as usize).sum::<usize>() > 1,
        }
    }

    fn check_same(&self, other: &CoeffFn) {
        let (a, b) = (self.ring(), other.ring());
        assert!(a == b, "coefficient ring mismatch: {a} vs {b}");
    }
}

impl fmt::Display for CoeffFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.ring().coordinate_names();
        match self {
            CoeffFn::Chart(r) => r.write_with(f, &names),
            CoeffFn::Torus(t) => t.write_with(f, &names),
        }
    }
}

impl Add for &CoeffFn {
    type Output = CoeffFn;
    fn add(self, o: &CoeffFn) -> CoeffFn {
        self.check_same(o);
        match (self, o) {
            (CoeffFn::Chart(a), CoeffFn::Chart(b)) => CoeffFn::Chart(a.add(b)),
            (CoeffFn::Torus(a), CoeffFn::Torus(b)) => CoeffFn::Torus(a.add(b)),
            _ => unreachable!(),
        }
    }
}

impl Sub for &CoeffFn {
    type Output = CoeffFn;
    fn sub(self, o: &CoeffFn) -> CoeffFn {
        self.check_same(o);
        match (self, o) {
            (CoeffFn::Chart(a), CoeffFn::Chart(b)) => CoeffFn::Chart(a.sub(b)),
            (CoeffFn::Torus(a), CoeffFn::Torus(b)) => CoeffFn::Torus(a.sub(b)),
            _ => unreachable!(),
        }
    }
}

impl Mul for &CoeffFn {
    type Output = CoeffFn;
    fn mul(self, o: &CoeffFn) -> CoeffFn {
        self.check_same(o);
        match (self, o) {
            (CoeffFn::Chart(a), CoeffFn::Chart(b)) => CoeffFn::Chart(a.mul(b)),
            (CoeffFn::Torus(a), CoeffFn::Torus(b)) => CoeffFn::Torus(a.mul(b)),
            _ => unreachable!(),
        }
    }
}

impl Neg for &CoeffFn {
    type Output = CoeffFn;
    fn neg(self) -> CoeffFn {
        match self {
            CoeffFn::Chart(a) => CoeffFn::Chart(a.neg()),
            CoeffFn::Torus(a) => CoeffFn::Torus(a.neg()),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for CoeffFn {
            type Output = CoeffFn;
            fn $m(self, o: CoeffFn) -> CoeffFn {
                (&self).$m(&o)
            }
        }
        impl $tr<&CoeffFn> for CoeffFn {
            type Output = CoeffFn;
            fn $m(self, o: &CoeffFn) -> CoeffFn {
                (&self).$m(o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for CoeffFn {
    type Output = CoeffFn;
    fn neg(self) -> CoeffFn {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Q {
        Q::from_integer(n.into())
    }

    #[test]
    fn chart_partials() {
        let r = Ring::chart(2);
        let x = CoeffFn::coordinate(r, 0).unwrap();
        let y = CoeffFn::coordinate(r, 1).unwrap();
        let f = &(&x * &x) * &y;
        assert_eq!(f.partial(0), &CoeffFn::integer(r, 2) * &(&x * &y));
        let g = CoeffFn::trig(vec![1, 0], q(1), q(0));
        assert!(g.partial(1).is_zero());
    }

    #[test]
    fn torus_partials() {
        let sin = CoeffFn::trig(vec![1, 0], q(0), q(1));
        let cos = CoeffFn::trig(vec![1, 0], q(1), q(0));
        assert_eq!(sin.partial(0), cos);
        assert!(cos.partial(1).is_zero());
    }

    #[test]
    fn torus_integrals() {
        let r = Ring::torus(2);
        let cos = CoeffFn::trig(vec![1, 0], q(1), q(0));
        let sin = CoeffFn::trig(vec![1, 0], q(0), q(1));
        let f = &CoeffFn::integer(r, 2) + &cos;
        assert_eq!(f.torus_integral().unwrap(), TorusIntegral { coefficient: q(2), two_pi_power: 2 });
        assert!(sin.torus_integral().unwrap().is_zero());
        // cos^2 = 1/2 + cos(2x)/2
        assert_eq!((&cos * &cos).torus_integral().unwrap().coefficient, Q::new(1.into(), 2.into()));
        assert_eq!(CoeffFn::one(Ring::chart(2)).torus_integral(), Err(Error::ChartModeUnsupported));
    }

    #[test]
    fn torus_inverse_only_for_constants() {
        let r = Ring::torus(2);
        assert_eq!(CoeffFn::integer(r, 4).inverse().unwrap(), CoeffFn::constant(r, Q::new(1.into(), 4.into())));
        let f = &CoeffFn::integer(r, 2) + &CoeffFn::trig(vec![1, 0], q(1), q(0));
        assert_eq!(f.inverse(), Err(Error::NonUnitCoefficient(Mode::Torus)));
        assert_eq!(CoeffFn::coordinate(r, 0), Err(Error::NonPeriodic(1)));
    }
}
