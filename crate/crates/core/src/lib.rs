//! Certificates of long-range order for quantum spin systems with
//! reflection-positive couplings, plus a desk-scale exact-diagonalization
//! engine that checks every inequality the certificates rest on.
//!
//! The crate has two halves that deliberately do not share numerics:
//!
//! * [`momentum_sums`] and [`certificates`] evaluate closed-form lattice
//!   sums and the resulting lower bounds on the long-range-order parameter.
//!   No Hilbert space is involved; everything is a deterministic sum over
//!   the dual torus.
//! * [`spin`], [`hamiltonian`], [`gibbs`], [`observables`] and [`verify`]
//!   build the actual quantum models on small tori, diagonalize them
//!   densely, and measure the same quantities the bounds constrain, so the
//!   two routes can be played against each other in tests and in the CLI.
//!
//! Shared geometry (tori, momentum grids, periodized couplings, reflection
//! planes) lives in [`lattice`], [`couplings`] and [`rp`].

pub mod certificates;
pub mod couplings;
pub mod error;
pub mod gibbs;
pub mod hamiltonian;
pub mod lattice;
pub mod momentum_sums;
pub mod observables;
pub mod report;
pub mod rp;
pub mod sampling;
pub mod spin;
pub mod verify;

pub use error::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Complex scalar used for all operator matrices.
pub type C64 = num_complex::Complex64;

/// Dense complex matrix type used for operators and eigenvectors.
pub type CMatrix = nalgebra::DMatrix<C64>;

/// Dense complex vector type (diagonals, fields in momentum space).
pub type CVector = nalgebra::DVector<C64>;

/// Default seed for every randomized check; reports echo the seed used.
pub const DEFAULT_SEED: u64 = 0x5EED;

/// Hard cap on the Hilbert-space dimension for dense diagonalization.
pub const HILBERT_DIM_CAP: usize = 4096;
