//! Seeded generators for coefficients, superfunctions, derivations and valid
//! symplectic data.
//!
//! Fuzzed data in dimension 2: `G = L G₀ Lᵀ` with `L` unipotent and `G₀`
//! constant diagonal, `Γ_a = (A_a - ½ ∂_a G) G^{-1}` with `A_a` skew, and `ω`
//! a nonvanishing multiple of `dx∧dy` (constant in torus mode).

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{CoeffFn, Mode, Monomial, Poly, Ring, Superfunction, Q};
use crate::derivations::{Connection, GradedDerivation};
use crate::geometry::SymplecticData;
use crate::linalg::CoeffMatrix;

pub type CaseRng = ChaCha8Rng;

/// Independent stream for case `index` under `seed`.
pub fn case_rng(seed: u64, index: u64) -> CaseRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn small_q(rng: &mut CaseRng) -> Q {
    let n: i64 = rng.gen_range(-3..=3);
    let d: i64 = *[1, 1, 1, 2].choose(rng).expect("nonempty");
    Q::new(n.into(), d.into())
}

fn nonzero_q(rng: &mut CaseRng) -> Q {
    loop {
        let q = small_q(rng);
        if q != Q::from_integer(0.into()) {
            return q;
        }
    }
}

/// Sparse polynomial (chart) or trigonometric polynomial (torus) with small
/// degree/frequencies and up to `terms` terms.
pub fn coeff(rng: &mut CaseRng, ring: Ring, terms: usize) -> CoeffFn {
    let mut acc = CoeffFn::zero(ring);
    let n = rng.gen_range(1..=terms.max(1));
    for _ in 0..n {
        let t = match ring.mode {
            Mode::Chart => {
                let exps: Monomial = (0..ring.dim).map(|_| rng.gen_range(0..=2)).collect();
                CoeffFn::from_poly(Poly::monomial(exps, nonzero_q(rng)))
            }
            Mode::Torus => {
                let k: Vec<i64> = (0..ring.dim).map(|_| rng.gen_range(-2..=2)).collect();
                CoeffFn::trig(k, small_q(rng), small_q(rng))
            }
        };
        acc = &acc + &t;
    }
    acc
}

pub fn nonzero_coeff(rng: &mut CaseRng, ring: Ring, terms: usize) -> CoeffFn {
    loop {
        let c = coeff(rng, ring, terms);
        if !c.is_zero() {
            return c;
        }
    }
}

/// Homogeneous superfunction of fiber degree `k`; zero when `k > rank`.
pub fn homogeneous(rng: &mut CaseRng, ring: Ring, rank: usize, k: usize) -> Superfunction {
    let mut s = Superfunction::zero(ring, rank);
    if k > rank {
        return s;
    }
    let blades: Vec<u32> = (0u32..1 << rank).filter(|m| m.count_ones() as usize == k).collect();
    let mut tries = 0;
    while s.is_zero() && tries < 8 {
        for &m in &blades {
            if rng.gen_bool(0.6) {
                s.add_blade(m, coeff(rng, ring, 2));
            }
        }
        tries += 1;
    }
    s
}

/// Nonzero homogeneous superfunction of a random degree in `0..=rank`.
pub fn any_homogeneous(rng: &mut CaseRng, ring: Ring, rank: usize) -> Superfunction {
    loop {
        let k = rng.gen_range(0..=rank);
        let s = homogeneous(rng, ring, rank, k);
        if !s.is_zero() {
            return s;
        }
    }
}

/// Base function as a degree-0 superfunction.
pub fn base_function(rng: &mut CaseRng, ring: Ring, rank: usize) -> Superfunction {
    Superfunction::from_coeff(rank, nonzero_coeff(rng, ring, 3))
}

/// Homogeneous derivation of degree `k ≥ -1`.
pub fn derivation_of_degree(rng: &mut CaseRng, conn: &Arc<Connection>, k: i64) -> GradedDerivation {
    let (ring, d, r) = (conn.ring(), conn.dim(), conn.rank());
    let pick = |rng: &mut CaseRng, deg: i64| {
        if deg < 0 || !rng.gen_bool(0.7) {
            Superfunction::zero(ring, r)
        } else {
            homogeneous(rng, ring, r, deg as usize)
        }
    };
    loop {
        let nabla = (0..d).map(|_| pick(rng, k)).collect();
        let contraction = (0..r).map(|_| pick(rng, k + 1)).collect();
        let der = GradedDerivation::new(conn.clone(), nabla, contraction).expect("frame-shaped");
        if !der.is_zero() {
            return der;
        }
    }
}

/// Nonzero homogeneous derivation of random degree `-1..=rank`.
pub fn derivation(rng: &mut CaseRng, conn: &Arc<Connection>) -> GradedDerivation {
    let k = rng.gen_range(-1..=conn.rank() as i64);
    let k = if k == conn.rank() as i64 { 0 } else { k };
    derivation_of_degree(rng, conn, k)
}

/// Even superfunction with body exactly 1.
pub fn unipotent_even(rng: &mut CaseRng, ring: Ring, rank: usize) -> Superfunction {
    let mut s = Superfunction::one(ring, rank);
    for k in (2..=rank).step_by(2) {
        s = &s + &homogeneous(rng, ring, rank, k);
    }
    s
}

/// Even superfunction with invertible body: a nonzero constant in torus mode,
/// a nonzero function in chart mode.
pub fn invertible_even(rng: &mut CaseRng, ring: Ring, rank: usize) -> Superfunction {
    let body = match ring.mode {
        Mode::Chart if rng.gen_bool(0.5) => &CoeffFn::constant(ring, nonzero_q(rng)) + &coeff(rng, ring, 1),
        Mode::Chart => CoeffFn::constant(ring, nonzero_q(rng)),
        Mode::Torus => CoeffFn::constant(ring, nonzero_q(rng)),
    };
    let body = if body.is_zero() { CoeffFn::one(ring) } else { body };
    let mut s = Superfunction::from_coeff(rank, body);
    for k in (2..=rank).step_by(2) {
        s = &s + &homogeneous(rng, ring, rank, k);
    }
    s
}

/// Single low-order term for geometric data: a monomial of total degree at
/// most 1 (chart) or one mode with frequencies in `{-1, 0, 1}` (torus).
fn data_coeff(rng: &mut CaseRng, ring: Ring) -> CoeffFn {
    match ring.mode {
        Mode::Chart => {
            let mut exps: Monomial = vec![0; ring.dim];
            if rng.gen_bool(0.7) {
                exps[rng.gen_range(0..ring.dim)] = 1;
            }
            CoeffFn::from_poly(Poly::monomial(exps, nonzero_q(rng)))
        }
        Mode::Torus => {
            let k: Vec<i64> = (0..ring.dim).map(|_| rng.gen_range(-1..=1)).collect();
            CoeffFn::trig(k, small_q(rng), small_q(rng))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuzzOptions {
    pub mode: Mode,
    pub rank: usize,
    /// Zero connection and `G = G₀`.
    pub flat: bool,
}

/// Squares of small integers split into a (possibly indefinite) diagonal.
const DIAGONALS: &[(i64, i64)] = &[(1, 1), (1, 4), (4, 1), (2, 2), (1, 9), (3, 3), (1, -1), (-2, -2)];

fn diagonal_metric(rng: &mut CaseRng, rank: usize) -> Vec<Q> {
    let mut out = Vec::with_capacity(rank);
    for _ in 0..rank / 2 {
        let (a, b) = *DIAGONALS.choose(rng).expect("nonempty");
        out.push(Q::from_integer(a.into()));
        out.push(Q::from_integer(b.into()));
    }
    if rank % 2 == 1 {
        out.push(Q::from_integer(1.into()));
    }
    out
}

/// A random valid `(ω, g, ∇)` in dimension 2.
pub fn symplectic_data(rng: &mut CaseRng, opts: &FuzzOptions) -> SymplecticData {
    let ring = match opts.mode {
        Mode::Chart => Ring::chart(2),
        Mode::Torus => Ring::torus(2),
    };
    let r = opts.rank;
    let zero = CoeffFn::zero(ring);
    let g0 = diagonal_metric(rng, r);
    let mut l = CoeffMatrix::identity(r, &CoeffFn::one(ring));
    if !opts.flat {
        for i in 1..r {
            if rng.gen_bool(0.5) {
                let j = rng.gen_range(0..i);
                l.set(i, j, data_coeff(rng, ring));
            }
        }
    }
    let g0m = CoeffMatrix::from_fn(r, r, |i, j| if i == j { CoeffFn::constant(ring, g0[i].clone()) } else { zero.clone() });
    let g = l.mul(&g0m).mul(&l.transpose());
    let g_inv = g.inverse().expect("constant determinant");
    let half = Q::new(1.into(), 2.into());
    let gamma = (0..2)
        .map(|a| {
            if opts.flat {
                return CoeffMatrix::filled(r, r, zero.clone());
            }
            let mut skew = CoeffMatrix::filled(r, r, zero.clone());
            for i in 0..r {
                for j in i + 1..r {
                    if rng.gen_bool(if r > 2 { 0.4 } else { 0.7 }) {
                        let c = data_coeff(rng, ring);
                        skew.set(i, j, c.clone());
                        skew.set(j, i, -&c);
                    }
                }
            }
            skew.sub(&g.partial(a).apply_fn(|v| v.scale(&half))).mul(&g_inv)
        })
        .collect();
    let w = match opts.mode {
        Mode::Torus => CoeffFn::constant(ring, nonzero_q(rng)),
        Mode::Chart => {
            if rng.gen_bool(0.5) {
                CoeffFn::constant(ring, nonzero_q(rng))
            } else {
                // 1 + p², never zero
                let p = data_coeff(rng, ring);
                &CoeffFn::one(ring) + &(&p * &p)
            }
        }
    };
    let omega = CoeffMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 1) => w.clone(),
        (1, 0) => -&w,
        _ => zero.clone(),
    });
    let conn = Connection::new(ring, r, gamma).expect("well-shaped");
    SymplecticData::new(omega, g, conn).expect("well-shaped")
}

/// Options cycling through chart/torus by parity of the case index; cases
/// with `index % 5 < 2` are flat.
pub fn cycled_options(index: u64, rank: usize) -> FuzzOptions {
    FuzzOptions {
        mode: if index % 2 == 0 { Mode::Chart } else { Mode::Torus },
        rank,
        flat: index % 5 < 2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::check_data;

    #[test]
    fn fuzzed_data_is_valid() {
        for i in 0..24 {
            let mut rng = case_rng(11, i);
            let opts = FuzzOptions {
                mode: if i % 2 == 0 { Mode::Chart } else { Mode::Torus },
                rank: if i % 3 == 0 { 4 } else { 2 },
                flat: i % 5 == 0,
            };
            let sd = symplectic_data(&mut rng, &opts);
            let report = check_data(&sd);
            assert!(report.all_passed(), "case {i}: {report}");
        }
    }

    #[test]
    fn streams_are_reproducible() {
        let ring = Ring::torus(2);
        let a = any_homogeneous(&mut case_rng(3, 5), ring, 2);
        let b = any_homogeneous(&mut case_rng(3, 5), ring, 2);
        assert_eq!(a, b);
    }

    #[test]
    fn derivations_are_homogeneous() {
        let conn = Arc::new(Connection::flat(Ring::chart(2), 2));
        for i in 0..20 {
            let mut rng = case_rng(1, i);
            let d = derivation(&mut rng, &conn);
            assert!(d.degree().is_some(), "{d}");
        }
    }
}
