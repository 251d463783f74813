//! Arithmetic engine for the unitary-perfect-number elimination toolkit.
//!
//! The crate is organised around one pipeline:
//!
//! * [`arith`] — big-integer primitives: deterministic primality below 2^64,
//!   BPSW above, a budgeted factoring ladder (trial division, Brent rho,
//!   Pollard p-1), unitary divisor sums, valuations and multiplicative orders.
//! * [`higgs`] — the 3-Higgs prime predicate with Pratt-tree witnesses,
//!   Higgs-cubefree tests and the ascending enumerator behind the counting
//!   function.
//! * [`oracle`] — factor knowledge for numbers 2^m+1: a bundled JSON cache,
//!   Aurifeuillean splits, divisor inheritance, budgeted local factoring and
//!   an optional remote factor-database client (off by default).
//! * [`kernel`] — the odd dependency graph, source-kernel enumeration inside
//!   the bounded box, debt/needs accounting and seed congruence derivation.
//! * [`filters`] — the three elimination filters (Z, N, O) and the
//!   certificate runner that applies them to every candidate exponent in a
//!   seed congruence class.
//! * [`heven`] — membership classification for even exponents m with
//!   2^m+1 free of non-Higgs primes, deep Pratt closures, the open-candidate
//!   frontier export and the v2 histogram.
//! * [`report`] — deterministic machine-readable run reports.

pub mod arith;
pub mod filters;
pub mod heven;
pub mod higgs;
pub mod kernel;
pub mod oracle;
pub mod report;
pub mod ser;

pub use num_bigint::BigUint;
