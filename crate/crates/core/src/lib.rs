//! Trotter-error toolkit for product-formula Hamiltonian simulation.
//!
//! The crate is organized around a symbolic Pauli layer and a dense matrix
//! kernel. On top of those sit the product formulas themselves, the error
//! bounds (operator-norm, random-input, and observable-aware families), and a
//! simulated-annealing optimizer for the evolution order inside a Trotter
//! block.
//!
//! Everything is deterministic: stochastic pieces take explicit 64-bit seeds
//! and all term maps iterate in a fixed order, so identical inputs reproduce
//! identical outputs bit for bit.

pub mod anneal;
pub mod bounds;
pub mod dense;
pub mod eig;
pub mod error;
pub mod formula;
pub mod model;
pub mod norms;
pub mod pauli;
pub mod rng;
pub mod sylvester;

pub use dense::DenseOperator;
pub use error::CoreError;
pub use model::HamiltonianModel;
pub use pauli::{PauliString, PauliSum};
pub use rng::SplitMix64;

/// Magnitude below which Pauli-sum coefficients are dropped after algebra.
pub const PRUNE_TOL: f64 = 1e-14;

pub type Result<T> = std::result::Result<T, CoreError>;
