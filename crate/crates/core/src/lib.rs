//! Breeding entanglement-distillation protocols from stabilizer codes.
//!
//! A stabilizer code over F_p is a self-orthogonal subspace `C` of F_p^{2n}
//! under the symplectic form. Converted to a distillation protocol it lets
//! Alice and Bob turn `n` noisy pairs into `k = n - dim C` perfect ones. A
//! breeding protocol additionally spends `c` preshared perfect pairs: it
//! starts from an arbitrary subspace `D` on the noisy positions, appends `c`
//! positions to make it self-orthogonal, and nets `k - c` pairs.
//!
//! Everything here runs in the symplectic (Pauli-frame) picture:
//!
//! - [`field`], [`matrix`]: F_p arithmetic and small dense linear algebra.
//! - [`symplectic`]: the symplectic form, star map, duals, puncturing, and
//!   the minimal self-orthogonal extension.
//! - [`code`], [`decoder`]: stabilizer codes, distance, purity, syndromes,
//!   and an exact coset-leader decoder with erasure support.
//! - [`eaqecc`]: ebit counts and the conversion of codes and subspaces into
//!   [`eaqecc::BreedingProtocolSpec`]s.
//! - [`engine`]: protocol execution over Pauli and erasure channels,
//!   exhaustive guarantee checks, Monte Carlo and exact fidelity.
//! - [`catalog`], [`search`], [`compare`]: the code catalog file format,
//!   exhaustive parameter search, and the breeding-vs-hashing report.

pub mod catalog;
pub mod code;
pub mod compare;
pub mod decoder;
pub mod eaqecc;
pub mod engine;
pub mod error;
pub mod field;
mod gf2;
pub mod matrix;
pub mod search;
pub mod symplectic;

#[cfg(feature = "cli")]
pub mod cli;

pub use code::{Distance, LogicalClass, StabilizerCode, Syndrome};
pub use eaqecc::{BreedingProtocolSpec, EaqeccParams};
pub use error::{Error, Result};
pub use field::FieldModulus;
pub use matrix::Matrix;
pub use symplectic::{SympSubspace, SympVector};
