//! Exact arithmetic modulo a prime: residues, polynomials and rational functions.

mod poly;
mod prime;
mod ratfunc;
mod residue;

pub use poly::PolyFq;
pub use prime::{is_prime, next_prime, PrimeModulus, INV_TABLE_LIMIT};
pub use ratfunc::{quartic_roots, rat_is_square_closure, RatFq, SquareTest, ROOT_SCAN_LIMIT};
pub use residue::{least_nonresidue, legendre, mod_inv, Residue};
