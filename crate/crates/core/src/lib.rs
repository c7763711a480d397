//! Statevector simulation of tensor-network-shaped variational circuits, with expressibility and
//! entanglement analysis, exact diagonalization of small spin models, and quantum classifiers.

pub mod analysis;
pub mod ansatz;
pub mod classifier;
pub mod cli;
pub mod data_io;
pub mod eigen;
pub mod error;
pub mod hamiltonian;
pub mod qsim;
pub mod seeding;
pub mod spin;
pub mod variational;

pub use error::{Error, Result};
