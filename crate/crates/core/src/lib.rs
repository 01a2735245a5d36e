//! Simulation and verification toolkit for reverse circulant and symmetric
//! circulant random matrices.
//!
//! * [`entries`], [`matrix`]: seeded entry laws and the two index-map ensembles.
//! * [`spectra`]: eigenvalues (dense reference and Fourier fast path), ESDs,
//!   moments, the symmetrized Rayleigh and Gaussian limit laws, KS distance.
//! * [`trace`]: closed trace formulas checked exactly against matrix products.
//! * [`combinatorics`]: constrained index sets, pair-matching classifiers,
//!   counting identities and the exact expected-moment oracle.
//! * [`joint`]: mixed moments of independent families and their limits.
//! * [`experiment`]: the experiment runner behind the `circlab` binary.

pub mod combinatorics;
pub mod entries;
pub mod error;
pub mod exact;
pub mod experiment;
pub mod fourier;
pub mod joint;
pub mod matrix;
pub mod spectra;
pub mod stats;
pub mod trace;

pub use entries::{sample_entries, EntryDistribution, EntrySequence, IntegerLaw};
pub use error::{Error, Result};
pub use matrix::{CirculantMatrix, MatrixKind};
pub use spectra::{LimitLaw, SpectralSample};
