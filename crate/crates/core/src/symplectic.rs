//! The even symplectic form built from `(ω, g, ∇)`, graded Hamiltonian
//! fields and the even Poisson bracket.
//!
//! Gram blocks over the frame:
//!
//! * `⟨∇_a, ∇_b; Θ⟩ = W_{ab} = ω_{ab} + ½ Σ_{j,k} B_{ab}^{jk} e_j ∧ e_k`
//! * `⟨∇_a, i_j; Θ⟩ = 0`
//! * `⟨i_j, i_k; Θ⟩ = G^{jk}`
//!
//! Insertion uses `⟨E; ι_D Θ⟩ = (-1)^{|E|(|D|+1)} ⟨D, E; Θ⟩` on frame elements
//! `E`, and the Hamiltonian field of `s` is the unique `D_s` with
//! `ι_{D_s} Θ = d^G s`. With these signs `[[e_1, e_1]] = 1` and
//! `[[x, y]] = -1` in the flat model.

use std::fmt;
use std::sync::Arc;


use crate::algebra::{CoeffFn, Superfunction, Q};
use crate::derivations::{d_graded, Connection, GradedDerivation, GradedOneForm};
use crate::error::{Error, Result};
use crate::geometry::{check_data, curvature, CurvatureData, SymplecticData};
use crate::linalg::{CoeffMatrix, Matrix};

pub type SuperMatrix = Matrix<Superfunction>;

#[derive(Clone, Debug)]
pub struct RothsteinForm {
    data: Arc<SymplecticData>,
    curvature: CurvatureData,
    w: SuperMatrix,
    w_inverse: SuperMatrix,
    g_inverse: CoeffMatrix,
    neumann_terms: usize,
}

/// Inverts `T = T₀ + N` with `T₀` the body (degree-0) block and `N`
/// nilpotent, via the terminating series `Σ_k (-T₀^{-1} N)^k T₀^{-1}`.
/// Returns the inverse and the number of nonzero series terms.
pub fn invert_nilpotent_perturbation(t: &SuperMatrix) -> Result<(SuperMatrix, usize)> {
    let n = t.rows();
    let sample = t.get(0, 0);
    let (ring, rank) = (sample.ring(), sample.rank());
    if !t.entries().all(|(_, _, v)| v.is_even()) {
        return Err(Error::OddElement);
    }
    let body = Matrix::from_fn(n, n, |i, j| t.get(i, j).body());
    let body_inv = body
        .inverse()
        .map_err(|_| Error::DegenerateBody(format!("det = {}", body.determinant())))?;
    let lift = |m: &CoeffMatrix| m.map(|c| Superfunction::from_coeff(rank, c.clone()));
    let body_inv = lift(&body_inv);
    let soul = t.map(Superfunction::soul);
    let step = body_inv.mul(&soul).neg();
    let mut term = Matrix::identity(n, &Superfunction::one(ring, rank));
    let mut acc = term.clone();
    let mut used = 1;
    // soul entries have degree ≥ 2, so step^k = 0 once 2k > r
    let bound = rank / 2 + 1;
    loop {
        term = term.mul(&step);
        if term.is_zero() {
            break;
        }
        used += 1;
        if used > bound {
            return Err(Error::SeriesDidNotTerminate(bound));
        }
        acc = acc.add(&term);
    }
    Ok((acc.mul(&body_inv), used))
}

impl RothsteinForm {
    pub fn symplectic_data(&self) -> &Arc<SymplecticData> {
        &self.data
    }

    pub fn connection(&self) -> &Arc<Connection> {
        self.data.connection()
    }

    pub fn curvature(&self) -> &CurvatureData {
        &self.curvature
    }

    /// The `∇`-block `W`.
    pub fn w(&self) -> &SuperMatrix {
        &self.w
    }

    pub fn w_inverse(&self) -> &SuperMatrix {
        &self.w_inverse
    }

    pub fn g(&self) -> &CoeffMatrix {
        self.data.metric()
    }

    /// Number of nonzero Neumann-series terms used to invert `W`.
    pub fn neumann_terms(&self) -> usize {
        self.neumann_terms
    }

    /// The degree-0 part `Θ_(0)`: the `ω` block alone.
    pub fn degree_zero_block(&self) -> SuperMatrix {
        self.w.map(|s| s.grade_project(0))
    }

    /// The part of `W` above degree 0 (the curvature term in `Θ_(2)`).
    pub fn curvature_block(&self) -> SuperMatrix {
        self.w.map(|s| s.soul())
    }

    fn zero(&self) -> Superfunction {
        self.data.connection().zero()
    }

    fn ensure_frame(&self, d: &GradedDerivation) -> Result<()> {
        if Arc::ptr_eq(d.connection(), self.data.connection()) || **d.connection() == **self.data.connection() {
            Ok(())
        } else {
            Err(Error::Shape("derivation is not over this form's connection".into()))
        }
    }

    /// `⟨D, E; Θ⟩ = Σ α_D^a ∧ α_E^b ∧ W_{ab} + Σ β_D^j ∧ ŝ(β_E^k) G^{jk}`,
    /// where `ŝ` is the grade involution (moving a component past an odd
    /// frame element).
    pub fn theta_pair(&self, d: &GradedDerivation, e: &GradedDerivation) -> Result<Superfunction> {
        self.ensure_frame(d)?;
        self.ensure_frame(e)?;
        let mut out = self.zero();
        let (ad, ae) = (d.nabla_components(), e.nabla_components());
        for (a, x) in ad.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            for (b, y) in ae.iter().enumerate().filter(|(_, y)| !y.is_zero()) {
                let w = self.w.get(a, b);
                if !w.is_zero() {
                    out = &out + &(&(x * y) * w);
                }
            }
        }
        let (bd, be) = (d.contraction_components(), e.contraction_components());
        let g = self.data.metric();
        for (j, x) in bd.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            for (k, y) in be.iter().enumerate().filter(|(_, y)| !y.is_zero()) {
                let gjk = g.get(j, k);
                if !gjk.is_zero() {
                    out = &out + &(x * &y.involution()).scale(gjk);
                }
            }
        }
        Ok(out)
    }

    /// `ι_D Θ`, with components `⟨D, ∇_b; Θ⟩` and `ŝ⟨D, i_k; Θ⟩`.
    pub fn insert(&self, d: &GradedDerivation) -> Result<GradedOneForm> {
        self.ensure_frame(d)?;
        let conn = self.data.connection();
        let nabla = (0..conn.dim())
            .map(|b| {
                let mut acc = self.zero();
                for (a, x) in d.nabla_components().iter().enumerate() {
                    if !x.is_zero() {
                        acc = &acc + &(x * self.w.get(a, b));
                    }
                }
                acc
            })
            .collect();
        let g = self.data.metric();
        let contraction = (0..conn.rank())
            .map(|k| {
                let mut acc = self.zero();
                for (j, x) in d.contraction_components().iter().enumerate() {
                    acc = &acc + &x.scale(g.get(j, k));
                }
                acc.involution()
            })
            .collect();
        Ok(GradedOneForm { nabla, contraction })
    }

    /// Solves `ι_D Θ = λ` for `D`; `λ` need not be exact.
    pub fn hamiltonian_field_of_form(&self, form: &GradedOneForm) -> Result<GradedDerivation> {
        let conn = self.data.connection().clone();
        let (d, r) = (conn.dim(), conn.rank());
        if form.nabla.len() != d || form.contraction.len() != r {
            return Err(Error::Shape("one-form does not match the frame".into()));
        }
        let nabla: Vec<Superfunction> = (0..d)
            .map(|a| {
                let mut acc = self.zero();
                for (b, l) in form.nabla.iter().enumerate() {
                    if !l.is_zero() {
                        acc = &acc + &(l * self.w_inverse.get(b, a));
                    }
                }
                acc
            })
            .collect();
        let contraction: Vec<Superfunction> = (0..r)
            .map(|j| {
                let mut acc = self.zero();
                for (k, l) in form.contraction.iter().enumerate() {
                    let ginv = self.g_inverse.get(k, j);
                    if !l.is_zero() && !ginv.is_zero() {
                        acc = &acc + &l.involution().scale(ginv);
                    }
                }
                acc
            })
            .collect();
        let field = GradedDerivation::new(conn, nabla, contraction)?;
        if self.insert(&field)? != *form {
            return Err(Error::BackSubstitution);
        }
        Ok(field)
    }

    /// The graded Hamiltonian field `D_s`.
    pub fn hamiltonian_field(&self, s: &Superfunction) -> Result<GradedDerivation> {
        let form = d_graded(self.data.connection(), s)?;
        self.hamiltonian_field_of_form(&form)
    }

    /// Hamiltonian field of the coordinate `x^a` (well defined on the torus
    /// too, where `x^a` itself is not a function).
    pub fn coordinate_field(&self, a: usize) -> Result<GradedDerivation> {
        let form = GradedOneForm::coordinate_differential(self.data.connection(), a);
        self.hamiltonian_field_of_form(&form)
    }

    /// Even Poisson bracket `[[s, t]] = D_s(t)`.
    pub fn poisson_bracket(&self, s: &Superfunction, t: &Superfunction) -> Result<Superfunction> {
        self.hamiltonian_field(s)?.apply(t)
    }
}

/// Builds `Θ_{ω,g,∇}` from validated data.
pub fn build_rothstein(sd: &SymplecticData) -> Result<RothsteinForm> {
    build_weighted(sd, &Q::new(1.into(), 2.into()))
}

pub(crate) fn build_weighted(sd: &SymplecticData, half: &Q) -> Result<RothsteinForm> {
    let ring = sd.ring();
    let (d, r) = (sd.dim(), sd.rank());
    let det_omega = sd.omega().determinant();
    if det_omega.inverse().is_err() {
        return Err(Error::DegenerateBody(format!("det omega = {det_omega}")));
    }
    let det_g = sd.metric().determinant();
    if det_g.inverse().is_err() {
        return Err(Error::DegenerateBody(format!("det g = {det_g}")));
    }
    let report = check_data(sd);
    if !report.all_passed() {
        let msg: Vec<String> = report
            .failures()
            .map(|c| format!("{}: {}", c.name, c.detail.clone().unwrap_or_default()))
            .collect();
        return Err(Error::InvalidData(msg.join("; ")));
    }
    let cd = curvature(sd);
    let gens: Vec<Superfunction> = (0..r)
        .map(|j| Superfunction::generator(ring, r, j).expect("in range"))
        .collect();
    let w = Matrix::from_fn(d, d, |a, b| {
        let mut acc = Superfunction::from_coeff(r, sd.omega().get(a, b).clone());
        let bv = cd.bivector(a, b);
        for j in 0..r {
            for k in 0..r {
                let c = bv.get(j, k);
                if j != k && !c.is_zero() {
                    acc = &acc + &(&gens[j] * &gens[k]).scale(&c.scale(half));
                }
            }
        }
        acc
    });
    let (w_inverse, neumann_terms) = invert_nilpotent_perturbation(&w)?;
    let g_inverse = sd.metric().inverse()?;
    Ok(RothsteinForm {
        data: Arc::new(sd.clone()),
        curvature: cd,
        w,
        w_inverse,
        g_inverse,
        neumann_terms,
    })
}

impl fmt::Display for RothsteinForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.data.dim();
        let r = self.data.rank();
        for a in 0..d {
            for b in a + 1..d {
                writeln!(f, "<nabla[{}], nabla[{}]> = {}", a + 1, b + 1, self.w.get(a, b))?;
            }
        }
        writeln!(f, "<nabla[a], i[j]> = 0")?;
        for j in 0..r {
            for k in j..r {
                writeln!(f, "<i[{}], i[{}]> = {}", j + 1, k + 1, self.data.metric().get(j, k))?;
            }
        }
        Ok(())
    }
}

/// Lifts a coefficient matrix to degree-0 superfunctions.
pub fn lift_matrix(m: &CoeffMatrix, rank: usize) -> SuperMatrix {
    m.map(|c: &CoeffFn| Superfunction::from_coeff(rank, c.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Ring;
    use crate::geometry::classical_bracket;
    use crate::models::{curved_chart, curved_torus};

    fn ring() -> Ring {
        Ring::chart(2)
    }
    fn c(v: CoeffFn) -> Superfunction {
        Superfunction::from_coeff(2, v)
    }
    fn x() -> CoeffFn {
        CoeffFn::coordinate(ring(), 0).unwrap()
    }
    fn y() -> CoeffFn {
        CoeffFn::coordinate(ring(), 1).unwrap()
    }
    fn e(j: usize) -> Superfunction {
        Superfunction::generator(ring(), 2, j).unwrap()
    }
    fn int(n: i64) -> Superfunction {
        c(CoeffFn::integer(ring(), n))
    }

    fn samples() -> Vec<Superfunction> {
        vec![
            c(x()),
            c(&y() * &y()),
            c(&x() * &y()),
            e(0).scale(&x()),
            e(1).scale(&(&y() + &CoeffFn::integer(ring(), 2))),
            &e(0) * &e(1),
            (&e(0) * &e(1)).scale(&(&x() * &x())),
        ]
    }

    fn sign(s: &Superfunction, t: &Superfunction) -> i64 {
        if s.parity().unwrap().is_odd() && t.parity().unwrap().is_odd() {
            -1
        } else {
            1
        }
    }

    #[test]
    fn flat_blocks() {
        let th = build_rothstein(&SymplecticData::flat(ring(), 2)).unwrap();
        assert_eq!(th.w().get(0, 1), &int(1));
        assert_eq!(th.w().get(1, 0), &int(-1));
        assert_eq!(th.neumann_terms(), 1);
        assert!(th.curvature_block().is_zero());
    }

    #[test]
    fn curved_block_has_curvature_term() {
        let th = build_rothstein(&curved_chart(2)).unwrap();
        assert_eq!(th.w().get(0, 1), &(&int(1) + &(&e(0) * &e(1))));
        assert_eq!(th.w().get(1, 0), &-&(&int(1) + &(&e(0) * &e(1))));
        assert_eq!(th.degree_zero_block().get(0, 1), &int(1));
        assert_eq!(th.neumann_terms(), 2);
        assert_eq!(th.w().mul(th.w_inverse()), Matrix::identity(2, &int(1)));
    }

    #[test]
    fn degenerate_omega_is_rejected() {
        let sd = SymplecticData::flat(ring(), 2);
        let zero = CoeffMatrix::filled(2, 2, CoeffFn::zero(ring()));
        let bad = SymplecticData::new(zero, sd.metric().clone(), (**sd.connection()).clone()).unwrap();
        assert!(matches!(build_rothstein(&bad), Err(Error::DegenerateBody(_))));
    }

    #[test]
    fn pairing_table() {
        let th = build_rothstein(&SymplecticData::flat(ring(), 2)).unwrap();
        let conn = th.connection().clone();
        let nx = GradedDerivation::nabla_basis(conn.clone(), 0);
        let ny = GradedDerivation::nabla_basis(conn.clone(), 1);
        let i1 = GradedDerivation::contraction_basis(conn, 0);
        assert_eq!(th.theta_pair(&nx, &ny).unwrap(), int(1));
        assert_eq!(th.theta_pair(&ny, &nx).unwrap(), int(-1));
        assert_eq!(th.theta_pair(&i1, &i1).unwrap(), int(1));
        assert!(th.theta_pair(&nx, &i1).unwrap().is_zero());
    }

    #[test]
    fn pinned_fields() {
        let th = build_rothstein(&SymplecticData::flat(ring(), 2)).unwrap();
        let conn = th.connection().clone();
        let de1 = th.hamiltonian_field(&e(0)).unwrap();
        assert_eq!(de1, GradedDerivation::contraction_basis(conn.clone(), 0));
        assert_eq!(th.poisson_bracket(&e(0), &e(0)).unwrap(), int(1));
        assert_eq!(th.poisson_bracket(&c(x()), &c(y())).unwrap(), int(-1));
        let f = &(&x() * &x()) * &y();
        let df = th.hamiltonian_field(&c(f.clone())).unwrap();
        assert!(df.contraction_components().iter().all(Superfunction::is_zero));
        let xf = crate::geometry::hamiltonian_vector_field(&f, th.symplectic_data()).unwrap();
        assert_eq!(df, GradedDerivation::vector_field(conn, &xf).unwrap());
    }

    #[test]
    fn curved_coordinate_field_has_higher_terms() {
        let th = build_rothstein(&curved_chart(2)).unwrap();
        let dx = th.hamiltonian_field(&c(x())).unwrap();
        assert_eq!(th.insert(&dx).unwrap(), d_graded(th.connection(), &c(x())).unwrap());
        assert_eq!(dx.classical_part(), vec![CoeffFn::zero(ring()), CoeffFn::integer(ring(), -1)]);
        let alpha_y = &dx.nabla_components()[1];
        assert!(!alpha_y.soul().is_zero());
    }

    #[test]
    fn classical_restriction() {
        let th = build_rothstein(&curved_chart(2)).unwrap();
        let (f, h) = (&x() * &y(), &(&y() * &y()) + &x());
        let expected = classical_bracket(&f, &h, th.symplectic_data()).unwrap();
        assert_eq!(th.poisson_bracket(&c(f), &c(h)).unwrap().grade_project(0), c(expected));
    }

    fn check_laws(th: &RothsteinForm, set: &[Superfunction]) {
        let br = |a: &Superfunction, b: &Superfunction| th.poisson_bracket(a, b).unwrap();
        for s in set {
            for t in set {
                let st = br(s, t);
                assert_eq!(st, -&br(t, s).scale_q(&Q::from_integer(sign(s, t).into())), "antisymmetry {s} {t}");
                for u in set {
                    let lhs = br(s, &br(t, u));
                    let rhs = &br(&st, u) + &br(t, &br(s, u)).scale_q(&Q::from_integer(sign(s, t).into()));
                    assert_eq!(lhs, rhs, "jacobi {s} | {t} | {u}");
                    let leib = &(&st * u) + &(t * &br(s, u)).scale_q(&Q::from_integer(sign(s, t).into()));
                    assert_eq!(br(s, &(t * u)), leib, "leibniz {s} | {t} | {u}");
                }
            }
        }
    }

    #[test]
    fn other_curvature_weights_break_jacobi() {
        for (n, d) in [(-1, 2), (1, 1), (0, 1)] {
            let th = build_weighted(&curved_chart(2), &Q::new(n.into(), d.into())).unwrap();
            let res = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| check_laws(&th, &samples())));
            assert!(res.is_err(), "weight {n}/{d}");
        }
    }

    #[test]
    fn bracket_laws_flat() {
        check_laws(&build_rothstein(&SymplecticData::flat(ring(), 2)).unwrap(), &samples());
    }

    #[test]
    fn bracket_laws_curved() {
        check_laws(&build_rothstein(&curved_chart(2)).unwrap(), &samples());
    }

    #[test]
    fn bracket_laws_curved_torus() {
        let sd = curved_torus(2);
        let r = sd.ring();
        let q = |n: i64| Q::from_integer(n.into());
        let t = |k: Vec<i64>, a, b| Superfunction::from_coeff(2, CoeffFn::trig(k, q(a), q(b)));
        let g = |j| Superfunction::generator(r, 2, j).unwrap();
        let set = vec![
            t(vec![1, 0], 1, 0),
            t(vec![1, 1], 0, 2),
            &g(0) * &t(vec![0, 1], 1, 1),
            &g(0) * &g(1),
        ];
        check_laws(&build_rothstein(&sd).unwrap(), &set);
    }
}
