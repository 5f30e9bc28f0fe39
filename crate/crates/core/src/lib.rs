//! Desk-scale constructions around quantum verification with exponentially
//! small promise gaps.
//!
//! The crate covers row-oracle sparse matrices, reversible Turing machines
//! and their configuration-graph reductions, the spectra of the resulting
//! path and cycle blocks, an exact statevector simulator, and the verifier
//! protocols built on top of them.

mod error;

pub mod corpus;
pub mod instance;
pub mod protocols;
pub mod rtm;
pub mod simulator;
pub mod sparse_oracle;
pub mod spectral;

pub use error::{Error, Result};
pub use protocols::{AcceptOperator, AmplificationParams, PreciseLHInstance, Verifier};
pub use rtm::{Configuration, ReversibleTM};
pub use simulator::{Gate, QuantumCircuit, Statevector, Witness};
pub use sparse_oracle::{DenseMatrix, RowOracleMatrix};
pub use spectral::BlockKind;
