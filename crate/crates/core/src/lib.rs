//! Generalized Ramanujan sums over free abelian monoids with a completely
//! multiplicative norm.
//!
//! The monoid `I_X` is the set of finitely supported maps from a countable set
//! of atoms to the non-negative integers. With the rational primes as atoms it
//! is the multiplicative monoid of positive integers; with the prime ideals of a
//! quadratic field it is the monoid of non-zero ideals of the ring of integers.
//!
//! The crate is organized bottom-up:
//!
//! * [`element`] and [`monoid`]: elements, atom tables, divisor and norm-bounded
//!   enumeration.
//! * [`arith`]: the Dirichlet convolution algebra (`mu`, `Lambda`, inverses,
//!   Jordan totients, Abel summation).
//! * [`ramanujan`]: `C_K(M)`, the general sums `S_{f,g}` and the exact identity
//!   checks built on them.
//! * [`series`]: truncated series and counting experiments (residue estimator,
//!   zeta truncations, the double sum `S(x, y)`).
//! * [`fields`]: the rational integers and quadratic number fields as concrete
//!   instances, with the invariants entering the class number formula.
//! * [`checks`]: seeded, deterministic property suites used by the CLI.

pub mod arith;
pub mod checks;
pub mod element;
mod error;
pub mod fields;
pub mod monoid;
pub mod notation;
pub mod ramanujan;
pub mod ring;
pub mod series;
pub mod sieve;

pub use element::Element;
pub use error::{Error, Result};
pub use monoid::{Atom, AtomSeed, AtomSource, AtomView, DensityMeta, Monoid, NormTable};
pub use ring::Ring;
