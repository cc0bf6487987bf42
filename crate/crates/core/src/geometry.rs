//! Classical data on the base and bundle: the symplectic form `ω`, the fiber
//! metric `G^{jk} = g(ε^j, ε^k)`, the connection `Γ` and what is derived from
//! them (curvature, volumes, classical divergence, exactness).

use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::algebra::{CoeffFn, Mode, Ring, Superfunction, Q};
use crate::derivations::Connection;
use crate::error::{Error, Result};
use crate::linalg::CoeffMatrix;

#[derive(Clone, PartialEq, Debug)]
pub struct SymplecticData {
    conn: Arc<Connection>,
    omega: CoeffMatrix,
    metric: CoeffMatrix,
    volume_scale: Option<Q>,
}

impl SymplecticData {
    /// Checks shapes only; use [`check_data`] for the geometric conditions.
    pub fn new(omega: CoeffMatrix, metric: CoeffMatrix, conn: Connection) -> Result<Self> {
        let d = conn.dim();
        let r = conn.rank();
        if omega.rows() != d || omega.cols() != d {
            return Err(Error::Shape(format!("omega must be {d}x{d}")));
        }
        if metric.rows() != r || metric.cols() != r {
            return Err(Error::Shape(format!("g must be {r}x{r}")));
        }
        for (_, _, v) in omega.entries().chain(metric.entries()) {
            conn.ring().ensure_same(&v.ring())?;
        }
        Ok(SymplecticData {
            conn: Arc::new(conn),
            omega,
            metric,
            volume_scale: None,
        })
    }

    /// Constant `ω = Σ_{i} dx^{2i-1} ∧ dx^{2i}`, `G = I`, `Γ = 0`.
    pub fn flat(ring: Ring, rank: usize) -> Self {
        let d = ring.dim;
        let omega = CoeffMatrix::from_fn(d, d, |i, j| {
            if i % 2 == 0 && j == i + 1 {
                CoeffFn::one(ring)
            } else if j % 2 == 0 && i == j + 1 {
                CoeffFn::integer(ring, -1)
            } else {
                CoeffFn::zero(ring)
            }
        });
        let metric = CoeffMatrix::identity(rank, &CoeffFn::one(ring));
        Self::new(omega, metric, Connection::flat(ring, rank)).expect("flat model is well-shaped")
    }

    /// Overrides `det(G)^{-1/2}` in the metric volume contraction.
    pub fn with_volume_scale(mut self, scale: Q) -> Self {
        self.volume_scale = Some(scale);
        self
    }

    pub fn volume_scale(&self) -> Option<&Q> {
        self.volume_scale.as_ref()
    }

    pub fn connection(&self) -> &Arc<Connection> {
        &self.conn
    }

    pub fn omega(&self) -> &CoeffMatrix {
        &self.omega
    }

    pub fn metric(&self) -> &CoeffMatrix {
        &self.metric
    }

    pub fn ring(&self) -> Ring {
        self.conn.ring()
    }

    pub fn dim(&self) -> usize {
        self.conn.dim()
    }

    pub fn rank(&self) -> usize {
        self.conn.rank()
    }

    /// Coefficient `W` of `ω^n = W dx^1 ∧ … ∧ dx^d`, the literal `(d/2)`-fold
    /// wedge power.
    pub fn volume_coefficient(&self) -> CoeffFn {
        let d = self.dim();
        let ring = self.ring();
        // reuse the Grassmann algebra on the base differentials dx^a
        let mut two_form = Superfunction::zero(ring, d);
        for a in 0..d {
            for b in a + 1..d {
                let w = self.omega.get(a, b);
                if !w.is_zero() {
                    two_form.add_blade(1 << a | 1 << b, w.clone());
                }
            }
        }
        two_form.pow((d / 2) as u32).top_coefficient()
    }
}

/// One verified condition in a [`DataReport`].
#[derive(Clone, PartialEq, Debug)]
pub struct Condition {
    pub name: &'static str,
    pub passed: bool,
    /// The offending entry and its value when the condition fails.
    pub detail: Option<String>,
}

#[derive(Clone, PartialEq, Debug)]
pub struct DataReport {
    pub conditions: Vec<Condition>,
}

impl DataReport {
    pub fn all_passed(&self) -> bool {
        self.conditions.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Condition> {
        self.conditions.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for DataReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.conditions {
            write!(f, "{:<24} {}", c.name, if c.passed { "pass" } else { "FAIL" })?;
            if let Some(d) = &c.detail {
                write!(f, "  ({d})")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn is_unit(c: &CoeffFn) -> bool {
    c.inverse().is_ok()
}

fn condition(name: &'static str, failure: Option<String>) -> Condition {
    Condition {
        name,
        passed: failure.is_none(),
        detail: failure,
    }
}

/// Verifies every invariant of [`SymplecticData`]; reports the first
/// offending coefficient for each failed condition.
pub fn check_data(sd: &SymplecticData) -> DataReport {
    let d = sd.dim();
    let omega = sd.omega();
    let g = sd.metric();
    let mut out = Vec::new();

    out.push(condition(
        "even_base_dimension",
        (d % 2 != 0).then(|| format!("d = {d}")),
    ));
    out.push(condition(
        "omega_antisymmetric",
        omega
            .antisymmetry_defect()
            .map(|(i, j)| format!("omega[{i}][{j}] = {}, omega[{j}][{i}] = {}", omega.get(i, j), omega.get(j, i))),
    ));
    let mut closed = None;
    'outer: for a in 0..d {
        for b in a + 1..d {
            for c in b + 1..d {
                let v = &(&omega.get(b, c).partial(a) + &omega.get(c, a).partial(b)) + &omega.get(a, b).partial(c);
                if !v.is_zero() {
                    closed = Some(format!("(d omega)_{{{a}{b}{c}}} = {v}"));
                    break 'outer;
                }
            }
        }
    }
    out.push(condition("omega_closed", closed));
    let det_omega = omega.determinant();
    out.push(condition(
        "omega_nondegenerate",
        (!is_unit(&det_omega)).then(|| format!("det omega = {det_omega} is not a unit in {} mode", sd.ring().mode)),
    ));
    out.push(condition(
        "metric_symmetric",
        g.entries()
            .find(|(i, j, v)| *v != g.get(*j, *i))
            .map(|(i, j, v)| format!("g[{i}][{j}] = {v}, g[{j}][{i}] = {}", g.get(j, i))),
    ));
    let det_g = g.determinant();
    out.push(condition(
        "metric_nondegenerate",
        (!is_unit(&det_g)).then(|| format!("det g = {det_g} is not a unit in {} mode", sd.ring().mode)),
    ));
    // ∂_a G + Γ_a G + G Γ_a^T = 0
    let mut compat = None;
    for a in 0..d {
        let gamma = sd.connection().gamma(a);
        let defect = g.partial(a).add(&gamma.mul(g)).add(&g.mul(&gamma.transpose()));
        let bad = defect
            .entries()
            .find(|(_, _, v)| !v.is_zero())
            .map(|(j, k, v)| format!("(nabla_{a} g)^{{{j}{k}}} = {v}"));
        if bad.is_some() {
            compat = bad;
            break;
        }
    }
    out.push(condition("metric_compatibility", compat));
    DataReport { conditions: out }
}

/// Matrix curvature `R_{ab}` and its raised bivector form `B_{ab} = R_{ab} G`.
#[derive(Clone, PartialEq, Debug)]
pub struct CurvatureData {
    dim: usize,
    r: Vec<CoeffMatrix>,
    b: Vec<CoeffMatrix>,
}

impl CurvatureData {
    /// `(R_{ab})^k_j`, row `k`, column `j`.
    pub fn r(&self, a: usize, b: usize) -> &CoeffMatrix {
        &self.r[a * self.dim + b]
    }

    /// `B_{ab}^{jk}`.
    pub fn bivector(&self, a: usize, b: usize) -> &CoeffMatrix {
        &self.b[a * self.dim + b]
    }

    pub fn is_flat(&self) -> bool {
        self.r.iter().all(CoeffMatrix::is_zero)
    }
}

/// `R_{ab} = ∂_a Γ_b - ∂_b Γ_a + Γ_a Γ_b - Γ_b Γ_a`.
pub fn curvature(sd: &SymplecticData) -> CurvatureData {
    let d = sd.dim();
    let conn = sd.connection();
    let mut r = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            let (ga, gb) = (conn.gamma(a), conn.gamma(b));
            let m = gb.partial(a).sub(&ga.partial(b)).add(&ga.mul(gb)).sub(&gb.mul(ga));
            r.push(m);
        }
    }
    let b = r.iter().map(|m| m.mul(sd.metric())).collect();
    CurvatureData { dim: d, r, b }
}

/// `div^{ω^n}(X) = Σ_a ∂_a(W X^a) / W`.
pub fn classical_divergence(x: &[CoeffFn], sd: &SymplecticData) -> Result<CoeffFn> {
    divergence_for_volume(x, &sd.volume_coefficient())
}

/// Classical divergence against the volume `W dx^1 ∧ … ∧ dx^d`.
pub fn divergence_for_volume(x: &[CoeffFn], w: &CoeffFn) -> Result<CoeffFn> {
    let ring = w.ring();
    if x.len() != ring.dim {
        return Err(Error::Shape(format!("vector field needs {} components", ring.dim)));
    }
    let mut num = CoeffFn::zero(ring);
    for (a, xa) in x.iter().enumerate() {
        num = &num + &(w * xa).partial(a);
    }
    if num.is_zero() {
        return Ok(num);
    }
    num.checked_div(w).map_err(|_| Error::NonUnitVolumeCoefficient(ring.mode))
}

/// `X_f` with `ι_{X_f} ω = df`, i.e. `X^a = Σ_b ∂_b f (ω^{-1})_{ba}`; for
/// `ω = dx ∧ dy` this is `(∂_y f, -∂_x f)`.
pub fn hamiltonian_vector_field(f: &CoeffFn, sd: &SymplecticData) -> Result<Vec<CoeffFn>> {
    let inv = sd.omega().inverse()?;
    let d = sd.dim();
    Ok((0..d)
        .map(|a| {
            let mut acc = CoeffFn::zero(sd.ring());
            for b in 0..d {
                let w = inv.get(b, a);
                if !w.is_zero() {
                    acc = &acc + &(&f.partial(b) * w);
                }
            }
            acc
        })
        .collect())
}

/// Classical bracket `{f, h} = X_f(h)`.
pub fn classical_bracket(f: &CoeffFn, h: &CoeffFn, sd: &SymplecticData) -> Result<CoeffFn> {
    let xf = hamiltonian_vector_field(f, sd)?;
    let mut acc = CoeffFn::zero(sd.ring());
    for (a, xa) in xf.iter().enumerate() {
        acc = &acc + &(xa * &h.partial(a));
    }
    Ok(acc)
}

fn rational_sqrt(q: &Q) -> Option<Q> {
    if q.is_negative() {
        return None;
    }
    let (n, d) = (q.numer(), q.denom());
    let (sn, sd) = (n.sqrt(), d.sqrt());
    (&sn * &sn == *n && &sd * &sd == *d).then(|| BigRational::new(sn, sd))
}

/// Normalization `c = |det G|^{-1/2}` of the metric volume element, or the
/// explicit override.
pub fn metric_volume_scale(sd: &SymplecticData) -> Result<Q> {
    if let Some(s) = sd.volume_scale() {
        return Ok(s.clone());
    }
    let det = sd.metric().determinant();
    let c = det.constant_value().ok_or(Error::NonConstantMetricDeterminant)?;
    if c.is_zero() {
        return Err(Error::DegenerateBody("det g = 0".into()));
    }
    let root = rational_sqrt(&c.abs()).ok_or_else(|| Error::IrrationalSqrt(c.to_string()))?;
    Ok(root.recip())
}

/// Total contraction `i_{μ_g} s = c · (coefficient of e_1 ∧ … ∧ e_r)`.
pub fn metric_volume_contract(s: &Superfunction, sd: &SymplecticData) -> Result<CoeffFn> {
    s.ensure_compatible(&sd.connection().zero())?;
    let c = metric_volume_scale(sd)?;
    Ok(s.top_coefficient().scale(&c))
}

/// Exactness of a classical one-form `α = Σ α_a dx^a`: closed, and in torus
/// mode with vanishing periods (zero constant Fourier coefficients).
pub fn is_exact_classical(alpha: &[CoeffFn]) -> bool {
    if !is_closed_classical(alpha) {
        return false;
    }
    alpha.iter().all(|c| match c.ring().mode {
        Mode::Chart => true,
        Mode::Torus => c.constant_term().map(|q| q.is_zero()).unwrap_or(false),
    })
}

/// `dα = 0`.
pub fn is_closed_classical(alpha: &[CoeffFn]) -> bool {
    let d = alpha.len();
    (0..d).all(|a| (a + 1..d).all(|b| (&alpha[b].partial(a) - &alpha[a].partial(b)).is_zero()))
}

/// `ι_X ω`: `(ι_X ω)_b = Σ_a X^a ω_{ab}`.
pub fn contract_omega(x: &[CoeffFn], sd: &SymplecticData) -> Vec<CoeffFn> {
    let d = sd.dim();
    (0..d)
        .map(|b| {
            let mut acc = CoeffFn::zero(sd.ring());
            for (a, xa) in x.iter().enumerate() {
                acc = &acc + &(xa * sd.omega().get(a, b));
            }
            acc
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;

    fn ring() -> Ring {
        Ring::chart(2)
    }
    fn int(n: i64) -> CoeffFn {
        CoeffFn::integer(ring(), n)
    }
    fn x() -> CoeffFn {
        CoeffFn::coordinate(ring(), 0).unwrap()
    }
    fn y() -> CoeffFn {
        CoeffFn::coordinate(ring(), 1).unwrap()
    }
    fn mat(rows: Vec<Vec<CoeffFn>>) -> CoeffMatrix {
        Matrix::from_rows(rows).unwrap()
    }
    fn rot(c: CoeffFn) -> CoeffMatrix {
        mat(vec![vec![int(0), -&c], vec![c, int(0)]])
    }
    fn std_omega() -> CoeffMatrix {
        mat(vec![vec![int(0), int(1)], vec![int(-1), int(0)]])
    }
    fn with_gamma(g: CoeffMatrix, gamma: Vec<CoeffMatrix>) -> SymplecticData {
        SymplecticData::new(std_omega(), g, Connection::new(ring(), 2, gamma).unwrap()).unwrap()
    }
    fn zeros() -> CoeffMatrix {
        CoeffMatrix::filled(2, 2, int(0))
    }
    fn eye() -> CoeffMatrix {
        CoeffMatrix::identity(2, &int(1))
    }

    #[test]
    fn flat_model_passes() {
        assert!(check_data(&SymplecticData::flat(ring(), 2)).all_passed());
    }

    #[test]
    fn skew_connection_is_compatible() {
        let sd = with_gamma(eye(), vec![rot(&x() + &y()), zeros()]);
        assert!(check_data(&sd).get("metric_compatibility").unwrap().passed);
    }

    #[test]
    fn non_skew_connection_fails() {
        let g = mat(vec![vec![int(1), int(0)], vec![int(0), int(0)]]);
        let sd = with_gamma(eye(), vec![g, zeros()]);
        let report = check_data(&sd);
        let c = report.get("metric_compatibility").unwrap();
        assert!(!c.passed);
        assert!(c.detail.as_ref().unwrap().contains("nabla_0"));
    }

    #[test]
    fn curvature_of_rotating_connection() {
        let sd = with_gamma(eye(), vec![rot(y()), zeros()]);
        let cd = curvature(&sd);
        assert_eq!(*cd.r(0, 1), rot(int(1)).neg());
        assert_eq!(*cd.bivector(0, 1).get(0, 1), int(1));
        assert_eq!(*cd.r(1, 0), rot(int(1)));
        assert!(curvature(&SymplecticData::flat(ring(), 2)).is_flat());
    }

    #[test]
    fn classical_divergences() {
        let sd = SymplecticData::flat(ring(), 2);
        assert!(classical_divergence(&[int(1), int(0)], &sd).unwrap().is_zero());
        assert_eq!(classical_divergence(&[x(), int(0)], &sd).unwrap(), int(1));
        let f = &(&x() * &x()) * &y();
        let xf = hamiltonian_vector_field(&f, &sd).unwrap();
        assert!(classical_divergence(&xf, &sd).unwrap().is_zero());
    }

    #[test]
    fn hamiltonian_fields() {
        let sd = SymplecticData::flat(ring(), 2);
        assert_eq!(hamiltonian_vector_field(&x(), &sd).unwrap(), vec![int(0), int(-1)]);
        assert_eq!(hamiltonian_vector_field(&int(5), &sd).unwrap(), vec![int(0), int(0)]);
        let half = Q::new(1.into(), 2.into());
        let f = (&x() * &x()).scale(&half);
        assert_eq!(hamiltonian_vector_field(&f, &sd).unwrap(), vec![int(0), -&x()]);
    }

    #[test]
    fn metric_contraction() {
        let sd = SymplecticData::flat(ring(), 2);
        let h = &x() + &int(3);
        let top = Superfunction::blade(2, 0b11, h.clone());
        assert_eq!(metric_volume_contract(&top, &sd).unwrap(), h);
        let low = Superfunction::blade(2, 0b01, h.clone());
        assert!(metric_volume_contract(&low, &sd).unwrap().is_zero());
        let sd4 = with_gamma(eye().apply_fn(|v| v.scale(&Q::from_integer(4.into()))), vec![zeros(), zeros()]);
        assert_eq!(metric_volume_contract(&top, &sd4).unwrap(), h.scale(&Q::new(1.into(), 4.into())));
        // det g = 2 has no rational square root
        let sd2 = with_gamma(mat(vec![vec![int(2), int(0)], vec![int(0), int(1)]]), vec![zeros(), zeros()]);
        assert!(matches!(metric_volume_contract(&top, &sd2), Err(Error::IrrationalSqrt(_))));
        let scaled = sd2.with_volume_scale(Q::new(1.into(), 2.into()));
        assert_eq!(metric_volume_contract(&top, &scaled).unwrap(), h.scale(&Q::new(1.into(), 2.into())));
    }

    #[test]
    fn exactness() {
        assert!(is_exact_classical(&[x(), int(0)]));
        assert!(!is_exact_classical(&[y(), int(0)]));
        let t = Ring::torus(2);
        assert!(!is_exact_classical(&[CoeffFn::one(t), CoeffFn::zero(t)]));
        let s = CoeffFn::trig(vec![1, 0], Q::zero(), Q::from_integer(1.into()));
        assert!(is_exact_classical(&[s, CoeffFn::zero(t)]));
    }

    #[test]
    fn volume_coefficient_is_literal_power() {
        let r = Ring::chart(4);
        let sd = SymplecticData::flat(r, 2);
        // (dx1 dx2 + dx3 dx4)^2 = 2 dx1 dx2 dx3 dx4
        assert_eq!(sd.volume_coefficient(), CoeffFn::integer(r, 2));
        assert!(check_data(&sd).all_passed());
    }
}
