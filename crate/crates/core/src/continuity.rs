//! The graded continuity equation for densities `ρ = ρ₀(t) + σ ρ₁(t)`, with
//! `t` even, `σ` odd and `σ² = 0`.
//!
//! Two residuals are computed independently:
//!
//! * Lie form: `(∂_t + ∂_σ)ρ + D(ρ)`
//! * divergence form: `(∂_t + ∂_σ)ρ + (-1)^{|D||ρ|} div(ρ ∧ D)`
//!
//! and they differ by `(-1)^{|D||ρ|} ρ ∧ div(D)`.

use std::fmt;
use std::sync::Arc;

use crate::algebra::{CoeffFn, Parity, Ring, Superfunction, Q};
use crate::berezin::{berezin_integral, BerezinianVolume, DivergenceOperator};
use crate::derivations::{Connection, GradedDerivation};
use crate::error::{Error, Result};
use crate::geometry::classical_divergence;

/// Polynomials in `t` with superfunction coefficients, lowest power first.
fn trim(mut v: Vec<Superfunction>) -> Vec<Superfunction> {
    while v.last().is_some_and(Superfunction::is_zero) {
        v.pop();
    }
    v
}

fn add_polys(a: &[Superfunction], b: &[Superfunction], zero: &Superfunction) -> Vec<Superfunction> {
    let n = a.len().max(b.len());
    trim((0..n).map(|i| &*a.get(i).unwrap_or(zero) + b.get(i).unwrap_or(zero)).collect())
}

fn d_dt(a: &[Superfunction]) -> Vec<Superfunction> {
    trim(a.iter().enumerate().skip(1).map(|(n, c)| c.scale_q(&Q::from_integer(n.into()))).collect())
}

#[derive(Clone, PartialEq, Debug)]
pub struct TimeDependentSection {
    ring: Ring,
    rank: usize,
    rho0: Vec<Superfunction>,
    rho1: Vec<Superfunction>,
}

impl TimeDependentSection {
    /// `rho0[n]` and `rho1[n]` are the coefficients of `t^n`.
    pub fn new(ring: Ring, rank: usize, rho0: Vec<Superfunction>, rho1: Vec<Superfunction>) -> Result<Self> {
        let z = Superfunction::zero(ring, rank);
        for c in rho0.iter().chain(&rho1) {
            c.ensure_compatible(&z)?;
        }
        Ok(TimeDependentSection {
            ring,
            rank,
            rho0: trim(rho0),
            rho1: trim(rho1),
        })
    }

    pub fn constant(s: Superfunction) -> Self {
        TimeDependentSection {
            ring: s.ring(),
            rank: s.rank(),
            rho0: trim(vec![s]),
            rho1: Vec::new(),
        }
    }

    pub fn zero(ring: Ring, rank: usize) -> Self {
        TimeDependentSection {
            ring,
            rank,
            rho0: Vec::new(),
            rho1: Vec::new(),
        }
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rho0(&self) -> &[Superfunction] {
        &self.rho0
    }

    pub fn rho1(&self) -> &[Superfunction] {
        &self.rho1
    }

    pub fn is_zero(&self) -> bool {
        self.rho0.is_empty() && self.rho1.is_empty()
    }

    fn zero_fn(&self) -> Superfunction {
        Superfunction::zero(self.ring, self.rank)
    }

    /// Parity of a homogeneous density (`σ` counts as odd); `None` when mixed.
    pub fn parity(&self) -> Option<Parity> {
        let mut p: Option<Parity> = None;
        let parts = self.rho0.iter().map(|c| (c, false)).chain(self.rho1.iter().map(|c| (c, true)));
        for (c, with_sigma) in parts.filter(|(c, _)| !c.is_zero()) {
            let q = c.parity()?;
            let q = if with_sigma { q.flip() } else { q };
            match p {
                None => p = Some(q),
                Some(old) if old != q => return None,
                _ => {}
            }
        }
        Some(p.unwrap_or(Parity::Even))
    }

    pub fn add(&self, o: &Self) -> Self {
        let z = self.zero_fn();
        TimeDependentSection {
            ring: self.ring,
            rank: self.rank,
            rho0: add_polys(&self.rho0, &o.rho0, &z),
            rho1: add_polys(&self.rho1, &o.rho1, &z),
        }
    }

    pub fn neg(&self) -> Self {
        self.map(|c| -c, |c| -c)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    fn map(&self, f0: impl Fn(&Superfunction) -> Superfunction, f1: impl Fn(&Superfunction) -> Superfunction) -> Self {
        TimeDependentSection {
            ring: self.ring,
            rank: self.rank,
            rho0: trim(self.rho0.iter().map(f0).collect()),
            rho1: trim(self.rho1.iter().map(f1).collect()),
        }
    }

    /// `ρ ∧ s`.
    pub fn wedge_right(&self, s: &Superfunction) -> Self {
        self.map(|c| c * s, |c| c * s)
    }

    /// `(∂_t + ∂_σ)ρ = ∂_t ρ₀ + ρ₁ + σ ∂_t ρ₁`.
    pub fn flow_derivative(&self) -> Self {
        let z = self.zero_fn();
        TimeDependentSection {
            ring: self.ring,
            rank: self.rank,
            rho0: add_polys(&d_dt(&self.rho0), &self.rho1, &z),
            rho1: d_dt(&self.rho1),
        }
    }

    /// `D(ρ) = D(ρ₀) + (-1)^{|D|} σ D(ρ₁)`.
    pub fn apply(&self, d: &GradedDerivation) -> Result<Self> {
        let odd = d.parity().ok_or(Error::Inhomogeneous)?.is_odd();
        let mut out = self.clone();
        out.rho0 = trim(self.rho0.iter().map(|c| d.apply(c)).collect::<Result<_>>()?);
        out.rho1 = trim(
            self.rho1
                .iter()
                .map(|c| d.apply(c).map(|v| if odd { -v } else { v }))
                .collect::<Result<_>>()?,
        );
        Ok(out)
    }

    /// `div(ρ ∧ D) = div(ρ₀ D) + σ div(ρ₁ D)`.
    pub fn divergence_of_product(&self, d: &GradedDerivation, op: &DivergenceOperator) -> Result<Self> {
        let div = |c: &Superfunction| op.divergence(&d.left_mul(c)?);
        let mut out = self.clone();
        out.rho0 = trim(self.rho0.iter().map(div).collect::<Result<_>>()?);
        out.rho1 = trim(self.rho1.iter().map(div).collect::<Result<_>>()?);
        Ok(out)
    }
}

impl fmt::Display for TimeDependentSection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut part = |f: &mut fmt::Formatter<'_>, c: &Superfunction, n: usize, sigma: bool| -> fmt::Result {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            match n {
                0 => {}
                1 => write!(f, "*t")?,
                _ => write!(f, "*t^{n}")?,
            }
            if sigma {
                write!(f, "*sigma")?;
            }
            Ok(())
        };
        for (n, c) in self.rho0.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            part(f, c, n, false)?;
        }
        for (n, c) in self.rho1.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            part(f, c, n, true)?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct ContinuityResidual {
    pub divergence_form: TimeDependentSection,
    pub lie_form: TimeDependentSection,
    /// `div(D)`.
    pub divergence_of_field: Superfunction,
    /// Divergence form minus Lie form equals `(-1)^{|D||ρ|} ρ ∧ div(D)`.
    pub forms_related: bool,
    /// Both residuals coincide; expected whenever `div(D) = 0`.
    pub forms_agree: bool,
}

impl ContinuityResidual {
    pub fn is_zero(&self) -> bool {
        self.divergence_form.is_zero()
    }
}

pub fn continuity_residual(rho: &TimeDependentSection, d: &GradedDerivation, op: &DivergenceOperator) -> Result<ContinuityResidual> {
    let pd = d.parity().ok_or(Error::Inhomogeneous)?;
    let pr = rho.parity().ok_or(Error::Inhomogeneous)?;
    let flow = rho.flow_derivative();
    let lie_form = flow.add(&rho.apply(d)?);
    let div_rho_d = rho.divergence_of_product(d, op)?;
    let signed = if pd.koszul(pr) { div_rho_d.neg() } else { div_rho_d };
    let divergence_form = flow.add(&signed);
    let divergence_of_field = op.divergence(d)?;
    let correction = rho.wedge_right(&divergence_of_field);
    let correction = if pd.koszul(pr) { correction.neg() } else { correction };
    Ok(ContinuityResidual {
        forms_related: divergence_form.sub(&lie_form) == correction,
        forms_agree: divergence_form == lie_form,
        divergence_form,
        lie_form,
        divergence_of_field,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConservationReport {
    /// `∫ρ₀` coefficient of `t^n` (in units of `(2π)^d`).
    pub integral_rho0: Vec<Q>,
    /// `∫ρ₁` likewise.
    pub integral_rho1: Vec<Q>,
    /// `d/dt ∫ρ₀` vanishes identically.
    pub rho0_conserved: bool,
    /// `(∂_t + ∂_σ)∫ρ` vanishes identically.
    pub conserved: bool,
}

fn integrals(part: &[Superfunction], vol: &BerezinianVolume) -> Result<Vec<Q>> {
    part.iter().map(|c| berezin_integral(c, vol).map(|i| i.coefficient)).collect()
}

/// Integral form of a vanishing residual, on the torus.
pub fn conservation_check(rho: &TimeDependentSection, d: &GradedDerivation, op: &DivergenceOperator) -> Result<ConservationReport> {
    if rho.ring().mode == crate::algebra::Mode::Chart {
        return Err(Error::ChartModeUnsupported);
    }
    if !continuity_residual(rho, d, op)?.is_zero() {
        return Err(Error::NonzeroResidual);
    }
    let vol = op.volume();
    let i0 = integrals(rho.rho0(), vol)?;
    let i1 = integrals(rho.rho1(), vol)?;
    let zero = |v: &[Q]| v.iter().all(num_traits::Zero::is_zero);
    let d0: Vec<Q> = i0.iter().enumerate().skip(1).map(|(n, c)| c * Q::from_integer(n.into())).collect();
    let total: Vec<Q> = (0..d0.len().max(i1.len()))
        .map(|n| d0.get(n).cloned().unwrap_or_default() + i1.get(n).cloned().unwrap_or_default())
        .collect();
    let d1: Vec<Q> = i1.iter().enumerate().skip(1).map(|(n, c)| c * Q::from_integer(n.into())).collect();
    Ok(ConservationReport {
        rho0_conserved: zero(&d0),
        conserved: zero(&total) && zero(&d1),
        integral_rho0: i0,
        integral_rho1: i1,
    })
}

/// `L_X` on `ΛT*M` in the frame: `∇`-part `X`, and on generators
/// `L_X e_j = Σ_k ∂_k X^j e_k`. Requires `rank = dim`.
pub fn lie_derivative_frame(conn: &Arc<Connection>, x: &[CoeffFn]) -> Result<GradedDerivation> {
    let (d, r) = (conn.dim(), conn.rank());
    if r != d || x.len() != d {
        return Err(Error::Shape(format!("L_X needs rank = dim = {} components", d)));
    }
    let ring = conn.ring();
    let on_coordinates = x.iter().map(|c| Superfunction::from_coeff(r, c.clone())).collect();
    let on_generators = (0..r)
        .map(|j| {
            let mut acc = conn.zero();
            for k in 0..r {
                let c = x[j].partial(k);
                if !c.is_zero() {
                    acc = &acc + &Superfunction::generator(ring, r, k)?.scale(&c);
                }
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    GradedDerivation::from_action(conn.clone(), on_coordinates, on_generators)
}

#[derive(Clone, Debug)]
pub struct ReductionReport {
    /// Lie-form residual of `f e_1∧e_2` under `L_X`.
    pub residual: TimeDependentSection,
    /// `(∂_t f + div(fX)) e_1∧e_2`.
    pub expected: TimeDependentSection,
    pub holds: bool,
}

/// The classical density `f(x, t) μ` transported by `X`, with `ΛE = ΛT*M`
/// and constant `ω` coefficient; `f[n]` is the coefficient of `t^n`.
pub fn classical_reduction_demo(f: &[CoeffFn], x: &[CoeffFn], op: &DivergenceOperator) -> Result<ReductionReport> {
    let sd = op.volume().symplectic_data().clone();
    if !sd.volume_coefficient().is_constant() {
        return Err(Error::Shape("classical reduction needs a constant symplectic volume coefficient".into()));
    }
    let conn = sd.connection();
    let d = lie_derivative_frame(conn, x)?;
    let r = sd.rank();
    let top = Superfunction::blade(r, (1 << r) - 1, CoeffFn::one(sd.ring()));
    let rho0: Vec<Superfunction> = f.iter().map(|c| top.scale(c)).collect();
    let rho = TimeDependentSection::new(sd.ring(), r, rho0, Vec::new())?;
    let residual = continuity_residual(&rho, &d, op)?.lie_form;
    let expected_coeffs: Vec<Superfunction> = (0..f.len())
        .map(|n| {
            let dt = f.get(n + 1).map(|c| c.scale(&Q::from_integer((n + 1).into()))).unwrap_or_else(|| CoeffFn::zero(sd.ring()));
            let fx: Vec<CoeffFn> = x.iter().map(|xa| xa * &f[n]).collect();
            Ok(top.scale(&(&dt + &classical_divergence(&fx, &sd)?)))
        })
        .collect::<Result<_>>()?;
    let expected = TimeDependentSection::new(sd.ring(), r, expected_coeffs, Vec::new())?;
    Ok(ReductionReport {
        holds: residual == expected,
        residual,
        expected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SymplecticData;
    use crate::symplectic::build_rothstein;

    fn q(n: i64) -> Q {
        Q::from_integer(n.into())
    }

    fn chart() -> Arc<SymplecticData> {
        Arc::new(SymplecticData::flat(Ring::chart(2), 2))
    }

    fn torus() -> Arc<SymplecticData> {
        Arc::new(SymplecticData::flat(Ring::torus(2), 2))
    }

    fn top(r: Ring) -> Superfunction {
        Superfunction::blade(2, 0b11, CoeffFn::one(r))
    }

    #[test]
    fn constant_density_without_flow() {
        let sd = chart();
        let op = DivergenceOperator::symplectic(&sd).unwrap();
        let rho = TimeDependentSection::constant(top(sd.ring()));
        let d = GradedDerivation::zero(sd.connection().clone());
        assert!(continuity_residual(&rho, &d, &op).unwrap().is_zero());
    }

    #[test]
    fn hamiltonian_flow_forms_agree() {
        let sd = chart();
        let r = sd.ring();
        let th = build_rothstein(&sd).unwrap();
        let op = DivergenceOperator::symplectic(&sd).unwrap();
        let x = CoeffFn::coordinate(r, 0).unwrap();
        let y = CoeffFn::coordinate(r, 1).unwrap();
        let d = th.hamiltonian_field(&Superfunction::from_coeff(2, &x * &y)).unwrap();
        let rho = TimeDependentSection::new(
            r,
            2,
            vec![Superfunction::from_coeff(2, x.clone()), top(r).scale(&y)],
            vec![Superfunction::generator(r, 2, 0).unwrap()],
        )
        .unwrap();
        let res = continuity_residual(&rho, &d, &op).unwrap();
        assert!(res.forms_agree && res.forms_related);
        assert_eq!(res.lie_form, rho.flow_derivative().add(&rho.apply(&d).unwrap()));
    }

    #[test]
    fn reduction_examples() {
        let sd = chart();
        let r = sd.ring();
        let op = DivergenceOperator::symplectic(&sd).unwrap();
        let x = CoeffFn::coordinate(r, 0).unwrap();
        let zero = CoeffFn::zero(r);
        let rep = classical_reduction_demo(&[CoeffFn::one(r)], &[x.clone(), zero.clone()], &op).unwrap();
        assert!(rep.holds);
        assert_eq!(rep.residual, TimeDependentSection::constant(top(r)));
        // f = 1 + 3t, X = 0
        let rep = classical_reduction_demo(&[CoeffFn::one(r), CoeffFn::integer(r, 3)], &[zero.clone(), zero], &op).unwrap();
        assert!(rep.holds);
        assert_eq!(rep.residual, TimeDependentSection::constant(top(r).scale_q(&q(3))));
    }

    #[test]
    fn transported_chart_density() {
        // f = x - t y moves under X_h, h = y²/2, i.e. X = (y, 0)
        let sd = chart();
        let r = sd.ring();
        let op = DivergenceOperator::symplectic(&sd).unwrap();
        let x = CoeffFn::coordinate(r, 0).unwrap();
        let y = CoeffFn::coordinate(r, 1).unwrap();
        let rep = classical_reduction_demo(&[x, -&y], &[y.clone(), CoeffFn::zero(r)], &op).unwrap();
        assert!(rep.holds && rep.residual.is_zero());
    }

    #[test]
    fn transported_torus_density_is_conserved() {
        let sd = torus();
        let r = sd.ring();
        let th = build_rothstein(&sd).unwrap();
        let op = DivergenceOperator::symplectic(&sd).unwrap();
        let cos = |k: Vec<i64>| CoeffFn::trig(k, q(1), q(0));
        let h = (&top(r)).scale(&cos(vec![1, 0]));
        let d = th.hamiltonian_field(&h).unwrap();
        // ρ = cos x2 + t sin x1 sin x2 e12
        let sin_sin = &cos(vec![1, -1]).scale(&Q::new(1.into(), 2.into())) - &cos(vec![1, 1]).scale(&Q::new(1.into(), 2.into()));
        let rho = TimeDependentSection::new(r, 2, vec![Superfunction::from_coeff(2, cos(vec![0, 1])), top(r).scale(&sin_sin)], vec![]).unwrap();
        let res = continuity_residual(&rho, &d, &op).unwrap();
        assert!(res.is_zero(), "{}", res.divergence_form);
        let rep = conservation_check(&rho, &d, &op).unwrap();
        assert!(rep.conserved && rep.rho0_conserved);
    }

    #[test]
    fn growing_density_is_not_conserved() {
        let sd = torus();
        let op = DivergenceOperator::symplectic(&sd).unwrap();
        let rho = TimeDependentSection::new(sd.ring(), 2, vec![sd.connection().zero(), top(sd.ring())], vec![]).unwrap();
        let d = GradedDerivation::zero(sd.connection().clone());
        assert_eq!(continuity_residual(&rho, &d, &op).unwrap().divergence_form, TimeDependentSection::constant(top(sd.ring())));
        assert!(matches!(conservation_check(&rho, &d, &op), Err(Error::NonzeroResidual)));
    }

    #[test]
    fn sigma_part_feeds_the_flow_derivative() {
        let r = Ring::chart(2);
        let e1 = Superfunction::generator(r, 2, 0).unwrap();
        let rho = TimeDependentSection::new(r, 2, vec![], vec![e1.clone(), e1.clone()]).unwrap();
        assert_eq!(rho.parity(), Some(Parity::Even));
        let fd = rho.flow_derivative();
        assert_eq!(fd.rho0(), &[e1.clone(), e1.clone()]);
        assert_eq!(fd.rho1(), &[e1]);
    }
}
