//! Exact computer algebra for Milnor K-symbols over truncated local ℚ-algebras.
//!
//! The crate computes Kähler differential modules of Artinian local
//! ℚ-algebras, realizes Milnor symbols through `dlog`, evaluates the
//! relative-symbol isomorphism onto `Ω^{p-1} ⊗ σⁿ/σⁿ⁺¹`, checks rewrite
//! certificates for symbol identities in `K₂ ⊗ ℚ`, and models finite windows
//! of inverse systems of vector spaces.
//!
//! Everything is exact: coefficients are unbounded rationals.

pub mod algebra;
pub mod certify;
pub mod cli;
mod error;
pub mod expr;
pub mod family;
pub mod groebner;
pub mod kahler;
pub mod linalg;
pub mod milnor;
pub mod poly;
pub mod report;
pub mod towers;

pub use error::{Error, Result};

/// Exact rational scalar used everywhere in the crate.
pub type Q = num_rational::BigRational;

/// Shorthand for an integer-valued rational.
pub fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

/// Renders a rational the way the expression grammar reads it (`3`, `-2/5`).
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}
