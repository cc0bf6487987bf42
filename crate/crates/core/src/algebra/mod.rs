//! Exact coefficient rings and the Grassmann algebra of superfunctions.

mod coeff;
mod poly;
mod ratfn;
mod superfunction;
mod trig;

pub use coeff::{CoeffFn, Mode, Ring, TorusIntegral};
pub use poly::{Monomial, Poly, Q};
pub use ratfn::RatFn;
pub use superfunction::{wedge_sign, Blade, Parity, Superfunction, MAX_RANK};
pub use trig::{Freq, TrigPoly};
