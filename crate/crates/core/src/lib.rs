//! Desk-scale verification toolkit for Piatetski-Shapiro primes.
//!
//! The crate is split by subject:
//!
//! * [`certified_real`]: exact floors and enclosures of `n^(p/q)`.
//! * [`sieve`]: segmented wheel sieve, von Mangoldt and Möbius functions.
//! * [`ps`]: membership, prime counts and main terms for single, intersected
//!   and iterated Piatetski-Shapiro sequences, plus the admissible region.
//! * [`identities`]: exact Vaughan and Heath-Brown decompositions of Λ.
//! * [`exponent_pairs`]: A/B process algebra and the bilinear sum bound.
//! * [`exp_sums`]: brute-force evaluators for the exponential sums.
//! * [`lattice`]: polar lattices, Beurling-Selberg functions, the smoothed
//!   lattice counting formula and the Kolesnik expansion.

pub mod certified_real;
pub mod exp_sums;
pub mod exponent_pairs;
pub mod identities;
pub mod lattice;
pub mod ps;
pub mod sieve;
pub mod summation;

pub use certified_real::{CertifiedError, CertifiedInterval, PrecisionContext, RationalExponent};
