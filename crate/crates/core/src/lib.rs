//! Exact maximum k-free sets in `Z/nZ` and minimal maximal k-free sets in
//! `[1, n]`.
//!
//! A set `A ⊆ Z/nZ` is k-free when `kx ∉ A` for every `x ∈ A`. The largest
//! such set has size `R_k(n)`, computed here by the divisor forest
//! ([`forest`]) and by closed forms on special shapes ([`closed_form`]),
//! each cross-checked against brute-force references ([`oracle`]).
//!
//! ```
//! use kfree_core::{forest, strata::ModulusContext};
//!
//! let ctx = ModulusContext::new(15, 826875).unwrap();
//! assert_eq!(forest::rk_general(&ctx).unwrap().value, 775180);
//! ```

pub mod arith;
pub mod closed_form;
pub mod error;
pub mod forest;
pub mod interval;
pub mod oracle;
pub mod strata;

pub use closed_form::{Method, RkValue};
pub use error::{Error, Result};
pub use strata::{KFreeSet, ModulusContext};
