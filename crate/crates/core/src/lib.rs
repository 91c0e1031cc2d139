//! Exact calculator for the local-global obstruction to embedding an
//! etale algebra with involution into a central simple algebra with
//! involution over Q.
//!
//! The pipeline: model the stable factors E_i = F_i(sqrt d_i) inside
//! multiquadratic extensions, build the obstruction group from witnessed
//! V-set intersections, evaluate the invariant homomorphism rho on
//! supplied local embedding data, gate everything behind the oriented
//! local-existence criterion, and assemble a verdict with re-checkable
//! evidence. Odd-degree descent bookkeeping is verified against splitting
//! tables of the extension polynomial.
//!
//! Everything is exact: arbitrary-precision integers, square classes,
//! and invariants in {0, 1/2}; no floating point anywhere.

pub mod arith;
pub mod error;
pub mod local;
pub mod multiquad;
pub mod involution;
pub mod obstruction;
pub mod datum;
pub mod engine;
pub mod descent;
pub mod schema;
pub mod cli;

pub use error::{Error, Result};
