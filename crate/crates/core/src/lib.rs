//! Density bounds for the integers represented by a diagonal form
//! `a_1 x_1^k + ... + a_s x_s^k`.
//!
//! The crate is organised bottom-up:
//!
//! * [`arith`]: prime sieves, primes in progressions, von Mangoldt, totients.
//! * [`local`]: exact value sets of a form modulo a prime and the coset bound
//!   `alpha_{k,p} = ((p-1)/(k,p-1) + 1)^s / p`.
//! * [`global`]: products of local densities giving upper bounds on the
//!   global upper density.
//! * [`avg`]: Chebyshev `psi(X; q, a)` tables and the averaged-over-`k`
//!   machinery (sums of `psi(mX; m, 1)`, the error integral, the
//!   partial-summation lower bound).
//! * [`scan`]: finite-window measurements, a box search from below and a
//!   residue sieve from above.
//! * [`cli`] and [`verify`]: the command-line front end and its property
//!   suite.

pub mod arith;
pub mod avg;
pub mod cli;
pub mod error;
pub mod global;
pub mod local;
pub mod scan;
pub mod sum;
pub mod verify;

pub use error::{Error, Result};
pub use local::{Density, FormSpec};
