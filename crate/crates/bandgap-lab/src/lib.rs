//! Numerical laboratory for the discrete spectra of finite-band Jacobi
//! operators under non-selfadjoint trace-class perturbations.
//!
//! The crate is organised around one experiment: take a periodic Jacobi
//! operator whose essential spectrum is a finite union of closed bands,
//! perturb it by a compactly supported (complex, generally non-normal)
//! matrix, and measure how the discrete eigenvalues accumulate towards the
//! bands.  Everything else exists in service of that loop:
//!
//! * [`jacobi`] builds the unperturbed operators and locates their band
//!   edges from the discriminant of the transfer matrix.
//! * [`perturbation`] constructs the windowed perturbations and their
//!   Schatten norms.
//! * [`linalg`] supplies the dense eigensolver, singular values and banded
//!   resolvent solves that the rest of the crate leans on.
//! * [`band_geometry`] evaluates the distance-weighted eigenvalue sums and
//!   the exponent bookkeeping behind them.
//! * [`determinant`] forms regularized perturbation determinants and counts
//!   their zeros by the argument principle.
//! * [`spectrum`] separates genuine discrete eigenvalues from truncation
//!   artifacts by comparing two matrix sizes.
//! * [`disk`] carries the unit-disk side of the story: Blaschke-type sums
//!   for analytic functions with controlled growth, and the conformal map
//!   from the disk picture to a single band.
//!
//! All floating point work is `f64`; randomness is always seeded and flows
//! through [`rand_chacha::ChaCha8Rng`] so every run is reproducible.

pub mod band_geometry;
pub mod determinant;
pub mod disk;
mod error;
pub mod jacobi;
pub mod linalg;
pub mod perturbation;
pub mod report;
pub mod spectrum;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
