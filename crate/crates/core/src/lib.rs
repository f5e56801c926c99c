//! Noise benchmarking of fermion-to-qubit encodings with stabilizer simulation.
//!
//! The crate is `no_std` + `alloc`. It contains everything that is pure
//! computation:
//!
//! - [`pauli`]: bit-packed Pauli strings with exact quarter phases, symplectic
//!   Gaussian elimination and destabilizers.
//! - [`circuit`], [`tableau`], [`frame`]: a Clifford circuit representation, a
//!   tableau simulator that produces the noiseless reference record (and proves
//!   detector/observable determinism), and a bit-parallel Pauli-frame sampler.
//! - [`lattice`], [`encodings`]: the periodic square lattice and the
//!   Jordan-Wigner, ternary-tree and Derby-Klassen encodings of the spinless
//!   Fermi-Hubbard model.
//! - [`circuits`]: experiment assembly (state preparation, Trotter and random
//!   logical circuits, mirroring, flagged stabilizer measurement, readout, VQED).
//! - [`noise`], [`analysis`]: circuit-level error models and the postselection
//!   metrics computed from sampled batches.
//!
//! File formats, the CLI and parallel sampling live in the `fermistab` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod analysis;
pub mod bits;
pub mod circuit;
pub mod circuits;
pub mod encodings;
pub mod error;
pub mod frame;
pub mod lattice;
pub mod noise;
pub mod pauli;
pub mod tableau;

pub use circuit::{CliffordCircuit, Gate, Instruction, NoiseChannel};
pub use error::{Error, Result};
pub use frame::{sample_frames, SampleBatch};
pub use lattice::SquareLattice;
pub use pauli::{GeneratorSet, Letter, PauliString, Phase};
pub use tableau::{reference_sample, Tableau};
