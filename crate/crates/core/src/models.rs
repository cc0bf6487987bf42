//! Small named instances used by the tests, the CLI and the docs.

use crate::algebra::{CoeffFn, Ring, Q};
use crate::derivations::Connection;
use crate::geometry::SymplecticData;
use crate::linalg::CoeffMatrix;

/// `a·J` on consecutive fiber pairs, `J = [[0, -1], [1, 0]]`; zero on a
/// trailing odd index.
pub fn rotation(ring: Ring, rank: usize, a: &CoeffFn) -> CoeffMatrix {
    CoeffMatrix::from_fn(rank, rank, |k, j| {
        if k % 2 == 1 && j == k - 1 {
            a.clone()
        } else if k % 2 == 0 && j == k + 1 {
            -a
        } else {
            CoeffFn::zero(ring)
        }
    })
}

fn standard_omega(ring: Ring) -> CoeffMatrix {
    SymplecticData::flat(ring, 1).omega().clone()
}

fn with_connection(ring: Ring, rank: usize, gamma: Vec<CoeffMatrix>) -> SymplecticData {
    let metric = CoeffMatrix::identity(rank, &CoeffFn::one(ring));
    let conn = Connection::new(ring, rank, gamma).expect("well-shaped connection");
    SymplecticData::new(standard_omega(ring), metric, conn).expect("well-shaped data")
}

/// Chart `ℝ²`, `ω = dx∧dy`, `G = I`, `Γ_x = y·J`, `Γ_y = 0`.
pub fn curved_chart(rank: usize) -> SymplecticData {
    let ring = Ring::chart(2);
    let y = CoeffFn::coordinate(ring, 1).expect("chart coordinate");
    let gamma = vec![rotation(ring, rank, &y), CoeffMatrix::filled(rank, rank, CoeffFn::zero(ring))];
    with_connection(ring, rank, gamma)
}

/// Torus `T²`, `ω = dx∧dy`, `G = I`, `Γ_x = sin(x2)·J`, `Γ_y = cos(x1)·J`.
pub fn curved_torus(rank: usize) -> SymplecticData {
    let ring = Ring::torus(2);
    let zero = Q::from_integer(0.into());
    let one = Q::from_integer(1.into());
    let sin_y = CoeffFn::trig(vec![0, 1], zero.clone(), one.clone());
    let cos_x = CoeffFn::trig(vec![1, 0], one, zero);
    let gamma = vec![rotation(ring, rank, &sin_y), rotation(ring, rank, &cos_x)];
    with_connection(ring, rank, gamma)
}

/// Chart `ℝ²` with the nonconstant `ω = (1 + x²) dx∧dy` and the curved
/// connection of [`curved_chart`].
pub fn curved_chart_weighted(rank: usize) -> SymplecticData {
    let sd = curved_chart(rank);
    let ring = sd.ring();
    let x = CoeffFn::coordinate(ring, 0).expect("chart coordinate");
    let w = &CoeffFn::one(ring) + &(&x * &x);
    let omega = standard_omega(ring).apply_fn(|v| v * &w);
    SymplecticData::new(omega, sd.metric().clone(), (**sd.connection()).clone()).expect("well-shaped data")
}
