//! Rational functions in canonical form: coprime numerator and denominator,
//! denominator with leading coefficient one.

use std::fmt;

use num_traits::{One, Zero};

use super::poly::{Poly, Q};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatFn {
    num: Poly,
    den: Poly,
}

impl RatFn {
    pub fn zero(nvars: usize) -> Self {
        RatFn {
            num: Poly::zero(nvars),
            den: Poly::one(nvars),
        }
    }

    pub fn from_poly(p: Poly) -> Self {
        let nvars = p.nvars();
        RatFn {
            num: p,
            den: Poly::one(nvars),
        }
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        Self::from_poly(Poly::constant(nvars, c))
    }

    /// Builds `num / den` and reduces it. Panics if `den` is zero.
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Self::zero(num.nvars());
        }
        if let Some(c) = den.constant_value() {
            return RatFn {
                num: num.scale(&c.recip()),
                den: Poly::one(den.nvars()),
            };
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.exact_div(&g).expect("gcd divides numerator"),
                den.exact_div(&g).expect("gcd divides denominator"),
            )
        };
        let lc = den.leading_coeff().recip();
        RatFn {
            num: num.scale(&lc),
            den: den.scale(&lc),
        }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn constant_value(&self) -> Option<Q> {
        if self.den.is_one() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn add(&self, o: &RatFn) -> RatFn {
        if self.den.is_one() && o.den.is_one() {
            return Self::from_poly(self.num.add(&o.num));
        }
        if self.den == o.den {
            return Self::new(self.num.add(&o.num), self.den.clone());
        }
        // reduced inputs: the sum can only cancel against gcd(den, o.den)
        let g = self.den.gcd(&o.den);
        let (d1, d2) = (self.den.exact_div(&g).expect("gcd divides"), o.den.exact_div(&g).expect("gcd divides"));
        let num = self.num.mul(&d2).add(&o.num.mul(&d1));
        if num.is_zero() {
            return Self::zero(self.nvars());
        }
        let h = num.gcd(&g);
        let (num, g) = if h.is_one() {
            (num, g)
        } else {
            (num.exact_div(&h).expect("gcd divides"), g.exact_div(&h).expect("gcd divides"))
        };
        Self::normalized(num, g.mul(&d1).mul(&d2))
    }

    /// Already coprime; fix the denominator's leading coefficient.
    fn normalized(num: Poly, den: Poly) -> Self {
        let lc = den.leading_coeff().recip();
        RatFn {
            num: num.scale(&lc),
            den: den.scale(&lc),
        }
    }

    pub fn neg(&self) -> RatFn {
        RatFn {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, o: &RatFn) -> RatFn {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &RatFn) -> RatFn {
        if self.den.is_one() && o.den.is_one() {
            return Self::from_poly(self.num.mul(&o.num));
        }
        // reduced inputs: cancel only across the pairs
        let cancel = |n: &Poly, d: &Poly| -> (Poly, Poly) {
            if d.is_one() || n.is_constant() {
                return (n.clone(), d.clone());
            }
            let g = n.gcd(d);
            if g.is_one() {
                (n.clone(), d.clone())
            } else {
                (n.exact_div(&g).expect("gcd divides"), d.exact_div(&g).expect("gcd divides"))
            }
        };
        let (n1, d2) = cancel(&self.num, &o.den);
        let (n2, d1) = cancel(&o.num, &self.den);
        let num = n1.mul(&n2);
        if num.is_zero() {
            return Self::zero(self.nvars());
        }
        Self::normalized(num, d1.mul(&d2))
    }

    pub fn scale(&self, k: &Q) -> RatFn {
        if k.is_zero() {
            return Self::zero(self.nvars());
        }
        RatFn {
            num: self.num.scale(k),
            den: self.den.clone(),
        }
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn recip(&self) -> Option<RatFn> {
        if self.is_zero() {
            None
        } else {
            Some(Self::new(self.den.clone(), self.num.clone()))
        }
    }

    pub fn derivative(&self, var: usize) -> RatFn {
        if self.den.is_one() {
            return Self::from_poly(self.num.derivative(var));
        }
        let n = self
            .num
            .derivative(var)
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.derivative(var)));
        Self::new(n, self.den.mul(&self.den))
    }

    pub fn pow(&self, n: u32) -> RatFn {
        // coprime inputs stay coprime under powers
        RatFn {
            num: self.num.pow(n),
            den: self.den.pow(n),
        }
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }

    pub fn write_with(&self, f: &mut fmt::Formatter<'_>, names: &[String]) -> fmt::Result {
        if self.den.is_one() {
            return self.num.write_with(f, names);
        }
        write!(f, "(")?;
        self.num.write_with(f, names)?;
        write!(f, ")/(")?;
        self.den.write_with(f, names)?;
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Poly {
        Poly::var(2, 0)
    }
    fn y() -> Poly {
        Poly::var(2, 1)
    }

    #[test]
    fn canonical_form_is_structural() {
        let one = Poly::one(2);
        // (x^2 - 1)/(x - 1) == (x + 1)/1
        let a = RatFn::new(x().pow(2).sub(&one), x().sub(&one));
        let b = RatFn::from_poly(x().add(&one));
        assert_eq!(a, b);
        // 2y/(4xy) == 1/(2x)
        let c = RatFn::new(y().scale(&Q::from_integer(2.into())), x().mul(&y()).scale(&Q::from_integer(4.into())));
        let d = RatFn::new(one.clone(), x().scale(&Q::from_integer(2.into())));
        assert_eq!(c, d);
    }

    #[test]
    fn sum_of_fractions() {
        let one = Poly::one(2);
        let a = RatFn::new(one.clone(), x());
        let b = RatFn::new(one.clone(), y());
        let s = a.add(&b);
        assert_eq!(s, RatFn::new(x().add(&y()), x().mul(&y())));
        assert!(s.sub(&a).sub(&b).is_zero());
    }

    #[test]
    fn quotient_rule() {
        let one = Poly::one(2);
        let a = RatFn::new(one.clone(), x());
        let expected = RatFn::new(one.neg(), x().pow(2));
        assert_eq!(a.derivative(0), expected);
        assert!(a.derivative(1).is_zero());
    }
}
