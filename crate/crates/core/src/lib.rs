//! Local distinguishability of orthogonal states and entanglement
//! distillation.
//!
//! The crate links three quantities for `n` copies of a bipartite mixed
//! state `sigma = sum_i lambda_i |Phi_i><Phi_i|`:
//!
//! * the entropy `S` of its spectrum, which fixes the number (`~2^(nS)`) of
//!   likely eigenstate strings ([`typical`]);
//! * the distinguishable information (DI) one product measurement on a single
//!   pair yields about those strings ([`measurement_di`]);
//! * the yield of a protocol that measures pairs one at a time until the
//!   string is identified, `(1 - S / I_d) E(sigma)` ([`bell_protocol`]).
//!
//! Entropies and DI are in bits throughout.

pub mod bell_protocol;
pub mod ensemble_file;
pub mod error;
pub mod linalg;
pub mod measurement_di;
pub mod optimize;
pub mod rng;
pub mod states;
pub mod typical;

pub use error::{Error, Result};

/// Version string embedded in emitted artifacts.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
