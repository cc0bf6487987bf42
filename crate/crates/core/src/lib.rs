//! Exact symbolic computations on even symplectic graded manifolds of the
//! form `ΠE` over a symplectic base: the even form built from `(ω, g, ∇)`,
//! graded Hamiltonian fields, Berezinian divergences, modular classes and
//! graded continuity equations.

pub mod algebra;
pub mod berezin;
pub mod continuity;
pub mod derivations;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod models;
pub mod random;
pub mod suites;
pub mod symplectic;

pub use error::{Error, Result};
