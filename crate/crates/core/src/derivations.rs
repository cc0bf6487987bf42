//! Graded derivations of the exterior algebra in the frame `{∇_a} ∪ {i_j}`.
//!
//! A derivation is stored as `D = Σ_a α^a ∧ ∇_a + Σ_j β^j ∧ i_j` with
//! superfunction coefficients acting from the left. `∇_a` is the even
//! derivation acting as `∂_a` on coefficients and by `∇_a e_j = Σ_k Γ^k_{aj} e_k`
//! on generators; `i_j` is the odd contraction with `i_j(e_k) = δ_{jk}`.
//! One-forms pair with derivations so that `⟨D; d^G s⟩ = D(s)`.

use std::fmt;
use std::sync::Arc;

use crate::algebra::{CoeffFn, Parity, Ring, Superfunction};
use crate::error::{Error, Result};
use crate::linalg::CoeffMatrix;

/// Connection on the fiber bundle: `gamma[a]` holds `(Γ_a)^k_j = Γ^k_{aj}`
/// (row `k`, column `j`).
#[derive(Clone, PartialEq, Debug)]
pub struct Connection {
    ring: Ring,
    rank: usize,
    gamma: Vec<CoeffMatrix>,
}

impl Connection {
    pub fn new(ring: Ring, rank: usize, gamma: Vec<CoeffMatrix>) -> Result<Self> {
        if gamma.len() != ring.dim {
            return Err(Error::Shape(format!("expected {} Christoffel matrices, got {}", ring.dim, gamma.len())));
        }
        for (a, g) in gamma.iter().enumerate() {
            if g.rows() != rank || g.cols() != rank {
                return Err(Error::Shape(format!("gamma[{a}] must be {rank}x{rank}")));
            }
            for (_, _, v) in g.entries() {
                ring.ensure_same(&v.ring())?;
            }
        }
        Ok(Connection { ring, rank, gamma })
    }

    pub fn flat(ring: Ring, rank: usize) -> Self {
        let z = CoeffMatrix::filled(rank, rank, CoeffFn::zero(ring));
        Connection {
            ring,
            rank,
            gamma: vec![z; ring.dim],
        }
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.ring.dim
    }

    pub fn gamma(&self, a: usize) -> &CoeffMatrix {
        &self.gamma[a]
    }

    pub fn is_flat(&self) -> bool {
        self.gamma.iter().all(CoeffMatrix::is_zero)
    }

    pub fn zero(&self) -> Superfunction {
        Superfunction::zero(self.ring, self.rank)
    }

    /// `∇_a e_j = Σ_k Γ^k_{aj} e_k`.
    pub fn generator_image(&self, a: usize, j: usize) -> Superfunction {
        let mut out = self.zero();
        for k in 0..self.rank {
            let c = self.gamma[a].get(k, j);
            if !c.is_zero() {
                out.add_blade(1 << k, c.clone());
            }
        }
        out
    }

    /// Covariant derivative `∇_a` of a superfunction.
    pub fn nabla(&self, a: usize, s: &Superfunction) -> Superfunction {
        let mut out = s.partial(a);
        if self.gamma[a].is_zero() {
            return out;
        }
        for (mask, c) in s.terms() {
            // even derivation: replace each generator in turn by its image
            let idx: Vec<usize> = (0..self.rank).filter(|b| mask >> b & 1 == 1).collect();
            for (pos, &jm) in idx.iter().enumerate() {
                let prefix = idx[..pos].iter().fold(0u32, |m, b| m | 1 << b);
                let suffix = idx[pos + 1..].iter().fold(0u32, |m, b| m | 1 << b);
                let p = Superfunction::blade(self.rank, prefix, c.clone());
                let q = Superfunction::blade(self.rank, suffix, CoeffFn::one(self.ring));
                out = &out + &(&(&p * &self.generator_image(a, jm)) * &q);
            }
        }
        out
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct GradedDerivation {
    conn: Arc<Connection>,
    nabla: Vec<Superfunction>,
    contraction: Vec<Superfunction>,
}

impl GradedDerivation {
    pub fn new(conn: Arc<Connection>, nabla: Vec<Superfunction>, contraction: Vec<Superfunction>) -> Result<Self> {
        if nabla.len() != conn.dim() {
            return Err(Error::Shape(format!("expected {} nabla components, got {}", conn.dim(), nabla.len())));
        }
        if contraction.len() != conn.rank() {
            return Err(Error::Shape(format!(
                "expected {} contraction components, got {}",
                conn.rank(),
                contraction.len()
            )));
        }
        let z = conn.zero();
        for s in nabla.iter().chain(&contraction) {
            s.ensure_compatible(&z)?;
        }
        Ok(GradedDerivation { conn, nabla, contraction })
    }

    pub fn zero(conn: Arc<Connection>) -> Self {
        let z = conn.zero();
        GradedDerivation {
            nabla: vec![z.clone(); conn.dim()],
            contraction: vec![z; conn.rank()],
            conn,
        }
    }

    /// The frame derivation `∇_a`.
    pub fn nabla_basis(conn: Arc<Connection>, a: usize) -> Self {
        let mut d = Self::zero(conn);
        d.nabla[a] = Superfunction::one(d.conn.ring(), d.conn.rank());
        d
    }

    /// The frame derivation `i_{ε^j}`.
    pub fn contraction_basis(conn: Arc<Connection>, j: usize) -> Self {
        let mut d = Self::zero(conn);
        d.contraction[j] = Superfunction::one(d.conn.ring(), d.conn.rank());
        d
    }

    /// `∇_X` for a classical vector field `X`.
    pub fn vector_field(conn: Arc<Connection>, x: &[CoeffFn]) -> Result<Self> {
        let r = conn.rank();
        let nabla = x.iter().map(|c| Superfunction::from_coeff(r, c.clone())).collect();
        let contraction = vec![conn.zero(); r];
        Self::new(conn, nabla, contraction)
    }

    /// Reassembles the derivation from its values on the coordinates `x^a`
    /// and on the generators `e_j`.
    pub fn from_action(conn: Arc<Connection>, on_coordinates: Vec<Superfunction>, on_generators: Vec<Superfunction>) -> Result<Self> {
        if on_generators.len() != conn.rank() {
            return Err(Error::Shape("one value per generator required".into()));
        }
        let mut contraction = Vec::with_capacity(conn.rank());
        for (j, v) in on_generators.into_iter().enumerate() {
            let mut beta = v;
            for (a, alpha) in on_coordinates.iter().enumerate() {
                if !alpha.is_zero() {
                    beta = &beta - &(alpha * &conn.generator_image(a, j));
                }
            }
            contraction.push(beta);
        }
        Self::new(conn, on_coordinates, contraction)
    }

    pub fn connection(&self) -> &Arc<Connection> {
        &self.conn
    }

    pub fn nabla_components(&self) -> &[Superfunction] {
        &self.nabla
    }

    pub fn contraction_components(&self) -> &[Superfunction] {
        &self.contraction
    }

    pub fn is_zero(&self) -> bool {
        self.nabla.iter().chain(&self.contraction).all(Superfunction::is_zero)
    }

    pub fn ensure_compatible_with(&self, s: &Superfunction) -> Result<()> {
        s.ensure_compatible(&self.conn.zero())
    }

    fn ensure_same_frame(&self, o: &GradedDerivation) -> Result<()> {
        if Arc::ptr_eq(&self.conn, &o.conn) || self.conn == o.conn {
            Ok(())
        } else {
            Err(Error::Shape("derivations live over different connections".into()))
        }
    }

    /// Action on a superfunction.
    pub fn apply(&self, s: &Superfunction) -> Result<Superfunction> {
        self.ensure_compatible_with(s)?;
        Ok(self.act(s))
    }

    pub(crate) fn act(&self, s: &Superfunction) -> Superfunction {
        let mut out = self.conn.zero();
        for (a, alpha) in self.nabla.iter().enumerate() {
            if !alpha.is_zero() {
                out = &out + &(alpha * &self.conn.nabla(a, s));
            }
        }
        for (j, beta) in self.contraction.iter().enumerate() {
            if !beta.is_zero() {
                out = &out + &(beta * &s.contract(j));
            }
        }
        out
    }

    /// Values on the generators, `D(e_j)`.
    pub fn on_generators(&self) -> Vec<Superfunction> {
        (0..self.conn.rank())
            .map(|j| {
                let mut v = self.contraction[j].clone();
                for (a, alpha) in self.nabla.iter().enumerate() {
                    if !alpha.is_zero() {
                        v = &v + &(alpha * &self.conn.generator_image(a, j));
                    }
                }
                v
            })
            .collect()
    }

    /// Z-degree `k` if `α^a` all have degree `k` and `β^j` degree `k+1`.
    pub fn degree(&self) -> Option<i64> {
        let mut deg: Option<i64> = None;
        let comps = self
            .nabla
            .iter()
            .map(|s| (s, 0i64))
            .chain(self.contraction.iter().map(|s| (s, -1i64)));
        for (s, shift) in comps {
            if s.is_zero() {
                continue;
            }
            let d = s.degree()? as i64 + shift;
            match deg {
                None => deg = Some(d),
                Some(prev) if prev != d => return None,
                _ => {}
            }
        }
        Some(deg.unwrap_or(0))
    }

    /// Parity if homogeneous; zero is even.
    pub fn parity(&self) -> Option<Parity> {
        let mut par: Option<Parity> = None;
        let comps = self
            .nabla
            .iter()
            .map(|s| (s, false))
            .chain(self.contraction.iter().map(|s| (s, true)));
        for (s, flip) in comps {
            if s.is_zero() {
                continue;
            }
            let p = s.parity()?;
            let p = if flip { p.flip() } else { p };
            match par {
                None => par = Some(p),
                Some(prev) if prev != p => return None,
                _ => {}
            }
        }
        Some(par.unwrap_or(Parity::Even))
    }

    fn zip(&self, o: &GradedDerivation, f: impl Fn(&Superfunction, &Superfunction) -> Superfunction) -> GradedDerivation {
        GradedDerivation {
            conn: self.conn.clone(),
            nabla: self.nabla.iter().zip(&o.nabla).map(|(a, b)| f(a, b)).collect(),
            contraction: self.contraction.iter().zip(&o.contraction).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn add(&self, o: &GradedDerivation) -> Result<GradedDerivation> {
        self.ensure_same_frame(o)?;
        Ok(self.zip(o, |a, b| a + b))
    }

    pub fn sub(&self, o: &GradedDerivation) -> Result<GradedDerivation> {
        self.ensure_same_frame(o)?;
        Ok(self.zip(o, |a, b| a - b))
    }

    pub fn neg(&self) -> GradedDerivation {
        self.map_components(|s| -s)
    }

    pub fn map_components(&self, f: impl Fn(&Superfunction) -> Superfunction) -> GradedDerivation {
        GradedDerivation {
            conn: self.conn.clone(),
            nabla: self.nabla.iter().map(&f).collect(),
            contraction: self.contraction.iter().map(&f).collect(),
        }
    }

    /// `s ∧ D`.
    pub fn left_mul(&self, s: &Superfunction) -> Result<GradedDerivation> {
        self.ensure_compatible_with(s)?;
        Ok(self.map_components(|c| s * c))
    }

    /// Graded commutator `[D, E] = D∘E - (-1)^{|D||E|} E∘D`, computed from the
    /// action on coordinates and generators.
    pub fn commutator(&self, o: &GradedDerivation) -> Result<GradedDerivation> {
        self.ensure_same_frame(o)?;
        let pd = self.parity().ok_or(Error::Inhomogeneous)?;
        let pe = o.parity().ok_or(Error::Inhomogeneous)?;
        let neg = pd.koszul(pe);
        let combine = |de: Superfunction, ed: Superfunction| if neg { &de + &ed } else { &de - &ed };
        let on_coords = (0..self.conn.dim())
            .map(|a| combine(self.act(&o.nabla[a]), o.act(&self.nabla[a])))
            .collect();
        let ge = o.on_generators();
        let gd = self.on_generators();
        let on_gens = ge
            .iter()
            .zip(&gd)
            .map(|(e_img, d_img)| combine(self.act(e_img), o.act(d_img)))
            .collect();
        Self::from_action(self.conn.clone(), on_coords, on_gens)
    }

    /// Degree-0 parts of the `∇` components: the classical vector field read
    /// off from `D`.
    pub fn classical_part(&self) -> Vec<CoeffFn> {
        self.nabla.iter().map(Superfunction::body).collect()
    }
}

impl fmt::Display for GradedDerivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (a, s) in self.nabla.iter().enumerate() {
            if !s.is_zero() {
                parts.push(format!("({s})*nabla[{}]", a + 1));
            }
        }
        for (j, s) in self.contraction.iter().enumerate() {
            if !s.is_zero() {
                parts.push(format!("({s})*i[{}]", j + 1));
            }
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Graded one-form in the coframe dual to `{∇_a} ∪ {i_j}`.
#[derive(Clone, PartialEq, Debug)]
pub struct GradedOneForm {
    pub nabla: Vec<Superfunction>,
    pub contraction: Vec<Superfunction>,
}

impl GradedOneForm {
    /// `d^G s`, with components `∇_a(s)` and `i_j(s)`.
    pub fn differential(conn: &Connection, s: &Superfunction) -> Result<Self> {
        s.ensure_compatible(&conn.zero())?;
        Ok(GradedOneForm {
            nabla: (0..conn.dim()).map(|a| conn.nabla(a, s)).collect(),
            contraction: (0..conn.rank()).map(|j| s.contract(j)).collect(),
        })
    }

    /// `d^G x^a`: the coordinate differential, available in both modes.
    pub fn coordinate_differential(conn: &Connection, a: usize) -> Self {
        let z = conn.zero();
        let mut nabla = vec![z.clone(); conn.dim()];
        nabla[a] = Superfunction::one(conn.ring(), conn.rank());
        GradedOneForm {
            nabla,
            contraction: vec![z; conn.rank()],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.nabla.iter().chain(&self.contraction).all(Superfunction::is_zero)
    }

    pub fn scale_left(&self, s: &Superfunction) -> GradedOneForm {
        GradedOneForm {
            nabla: self.nabla.iter().map(|c| s * c).collect(),
            contraction: self.contraction.iter().map(|c| s * c).collect(),
        }
    }

    pub fn neg(&self) -> GradedOneForm {
        GradedOneForm {
            nabla: self.nabla.iter().map(|c| -c).collect(),
            contraction: self.contraction.iter().map(|c| -c).collect(),
        }
    }
}

/// `d^G s`.
pub fn d_graded(conn: &Connection, s: &Superfunction) -> Result<GradedOneForm> {
    GradedOneForm::differential(conn, s)
}

/// `⟨D; λ⟩ = Σ_a α^a ∧ λ_∇[a] + Σ_j β^j ∧ λ_i[j]`.
pub fn pair(d: &GradedDerivation, form: &GradedOneForm) -> Result<Superfunction> {
    if form.nabla.len() != d.nabla.len() || form.contraction.len() != d.contraction.len() {
        return Err(Error::Shape("one-form and derivation frames differ".into()));
    }
    let mut out = d.conn.zero();
    for (alpha, l) in d.nabla.iter().zip(&form.nabla).chain(d.contraction.iter().zip(&form.contraction)) {
        l.ensure_compatible(&out)?;
        if !alpha.is_zero() && !l.is_zero() {
            out = &out + &(alpha * l);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring() -> Ring {
        Ring::chart(2)
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
    fn sf(c: CoeffFn) -> Superfunction {
        Superfunction::from_coeff(2, c)
    }
    fn int(n: i64) -> CoeffFn {
        CoeffFn::integer(ring(), n)
    }

    /// J = [[0,-1],[1,0]] scaled by `c`.
    fn rot(c: CoeffFn) -> CoeffMatrix {
        let z = int(0);
        CoeffMatrix::from_rows(vec![vec![z.clone(), -&c], vec![c, z]]).unwrap()
    }

    fn curved() -> Arc<Connection> {
        let zero = CoeffMatrix::filled(2, 2, int(0));
        Arc::new(Connection::new(ring(), 2, vec![rot(y()), zero]).unwrap())
    }

    fn flat() -> Arc<Connection> {
        Arc::new(Connection::flat(ring(), 2))
    }

    #[test]
    fn nabla_acts_on_coefficients_when_flat() {
        let f = &(&x() * &x()) * &y();
        let d = GradedDerivation::nabla_basis(flat(), 0);
        assert_eq!(d.apply(&e(0).scale(&f)).unwrap(), e(0).scale(&f.partial(0)));
    }

    #[test]
    fn contraction_of_top_blade() {
        let d = GradedDerivation::contraction_basis(flat(), 0);
        assert_eq!(d.apply(&(&e(0) * &e(1))).unwrap(), e(1));
    }

    #[test]
    fn nabla_on_generator_reads_christoffel() {
        // Γ_x = a(x,y) J with a = x + y: ∇_x e_1 = a e_2
        let a = &x() + &y();
        let zero = CoeffMatrix::filled(2, 2, int(0));
        let conn = Arc::new(Connection::new(ring(), 2, vec![rot(a.clone()), zero]).unwrap());
        let d = GradedDerivation::nabla_basis(conn, 0);
        assert_eq!(d.apply(&e(0)).unwrap(), e(1).scale(&a));
        assert_eq!(d.apply(&e(1)).unwrap(), -&e(0).scale(&a));
    }

    #[test]
    fn flat_commutators_vanish() {
        let dx = GradedDerivation::nabla_basis(flat(), 0);
        let dy = GradedDerivation::nabla_basis(flat(), 1);
        assert!(dx.commutator(&dy).unwrap().is_zero());
        let i1 = GradedDerivation::contraction_basis(flat(), 0);
        let i2 = GradedDerivation::contraction_basis(flat(), 1);
        assert!(i1.commutator(&i2).unwrap().is_zero());
    }

    #[test]
    fn curved_commutator_is_minus_j() {
        let dx = GradedDerivation::nabla_basis(curved(), 0);
        let dy = GradedDerivation::nabla_basis(curved(), 1);
        let c = dx.commutator(&dy).unwrap();
        assert!(c.nabla_components().iter().all(Superfunction::is_zero));
        // -J: e_1 ↦ -e_2, e_2 ↦ e_1
        assert_eq!(c.apply(&e(0)).unwrap(), -&e(1));
        assert_eq!(c.apply(&e(1)).unwrap(), e(0));
        assert_eq!(c.degree(), Some(0));
    }

    #[test]
    fn differential_examples() {
        let conn = flat();
        let l = d_graded(&conn, &e(0).scale(&x())).unwrap();
        assert_eq!(l.nabla, vec![e(0), sf(int(0))]);
        assert_eq!(l.contraction, vec![sf(x()), sf(int(0))]);
        assert!(d_graded(&conn, &sf(int(1))).unwrap().is_zero());
        let l = d_graded(&conn, &(&e(0) * &e(1))).unwrap();
        assert_eq!(l.contraction, vec![e(1), -&e(0)]);
    }

    #[test]
    fn pairing_examples() {
        let conn = curved();
        let s = &e(0).scale(&x()) + &sf(&y() * &y());
        let dx = GradedDerivation::nabla_basis(conn.clone(), 0);
        assert_eq!(pair(&dx, &d_graded(&conn, &s).unwrap()).unwrap(), dx.apply(&s).unwrap());
        let i1 = GradedDerivation::contraction_basis(conn.clone(), 0);
        assert!(pair(&i1, &d_graded(&conn, &e(0)).unwrap()).unwrap().is_one());
        let xdx = dx.left_mul(&sf(x())).unwrap();
        assert!(pair(&xdx, &d_graded(&conn, &sf(y())).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn from_action_round_trips() {
        let conn = curved();
        let d = GradedDerivation::new(
            conn.clone(),
            vec![e(0).scale(&x()), e(1).scale(&int(2))],
            vec![&e(0) * &e(1), sf(y())],
        )
        .unwrap();
        let coords = d.nabla_components().to_vec();
        let back = GradedDerivation::from_action(conn, coords, d.on_generators()).unwrap();
        assert_eq!(back, d);
        assert_eq!(d.parity(), Some(Parity::Odd));
        assert_eq!(d.degree(), None);
    }
}
