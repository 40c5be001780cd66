//! Classical and quantum numerics for a family of superintegrable
//! Hamiltonians on the pseudo-Euclidean plane `E(1,1)`:
//!
//! ```text
//! H = 4ρ p_ρ² - 4(σ²/ρ) p_σ² + ω²ρ + (α σ^{2k} + β σ^k)/ρ,   k = p/q.
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classical;
pub mod error;
pub mod invariants;
pub mod model;
pub mod presets;
pub mod quantum;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
