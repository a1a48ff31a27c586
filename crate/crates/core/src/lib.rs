//! Tabulation of strong pseudoprimes to the first `m` prime bases.
//!
//! Every odd squarefree composite `n <= B` that is a strong pseudoprime to
//! bases `2, 3, 5, ...` (the first `m` primes) is built in factored form as
//! `n = k * p_t`. Small `k` are handled with a chain of big-integer GCDs
//! ([`gcdfilter`]), large `k` by sieving an arithmetic progression through a
//! space-saving wheel of quadratic-character classes ([`wheelsieve`]).
//! Composite `k` are assembled from primes with identical signatures, stored
//! in [`sigtable`].
//!
//! The number theory in [`bigmath`] is written once against the [`Scalar`]
//! trait and runs on `u32`, `u64`, `u128` and the GMP-backed [`Natural`].

pub mod bigmath;
pub mod driver;
pub mod error;
pub mod gcdfilter;
pub mod primestream;
pub mod signatures;
pub mod sigtable;
pub mod wheelsieve;

pub use bigmath::{FactoredNumber, Natural, Scalar};
pub use error::{Error, Result};
pub use signatures::{BaseVector, Signature};

/// Word type of the search pipeline: primes, `k`, and `n <= B` all fit in it.
pub type Word = u64;

/// Factored `p - 1` for word-size primes.
pub type FactoredWord = FactoredNumber<Word>;

/// Factored big naturals, as used when verifying published witnesses.
pub type FactoredNatural = FactoredNumber<Natural>;
