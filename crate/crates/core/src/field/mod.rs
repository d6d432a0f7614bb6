//! Exact arithmetic in F_p, F_p[t₁,…,t_r] and K = F_p(t₁,…,t_r).

pub mod gcd;
pub mod modulus;
pub mod mpoly;
pub mod ratfunc;

pub use gcd::poly_gcd;
pub use modulus::PrimeModulus;
pub use mpoly::{Monomial, MultiPoly};
pub use ratfunc::{FractionSum, RatFunc};
