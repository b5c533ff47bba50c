//! Exact-arithmetic verification of Gauss-type congruences for Apéry-like
//! sequences and their Bernoulli-number refinement modulo `p^{3m+1}`.

pub mod arith;
pub mod bernoulli;
pub mod binomial;
pub mod error;
pub mod harmonic;
pub mod lemmas;
pub mod search;
pub mod sequences;
pub mod theorem;

pub use arith::{ord_p, rational_congruent, reduce_mod, PrimePowerModulus, Rational, Residue, Valuation};
pub use error::{Error, Result};
