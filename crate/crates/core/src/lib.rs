//! Global matrix-symbol calculus on SU(2) and Hörmander flags of su(2)/su(3).
//!
//! The crate is organised bottom-up:
//!
//! * [`grid`]: SU(2) elements, Euler angles and Haar-exact quadrature grids.
//! * [`repr`]: Wigner matrices, derived representations, Laplacian and
//!   sub-Laplacian symbols.
//! * [`fourier`]: the group Fourier transform, Plancherel and convolution.
//! * [`liealg`]: exact rational Lie-algebra engine (brackets, flags, Hausdorff
//!   dimension).
//! * [`symcalc`]: multiplier and full symbols, quantization, difference
//!   operators and subelliptic seminorms.
//! * [`speccalc`]: spectral calculus (Bessel potentials, heat semigroup,
//!   Riesz powers, heat trace at the identity).
//! * [`axial`]: fast evaluation and L^p quadrature for kernels whose symbols
//!   are diagonal in the weight basis.
//! * [`normlab`]: L^p norms, operator-norm lower bounds and the threshold
//!   experiments, with [`report`] handling their serialization.

pub mod axial;
pub mod error;
pub mod fourier;
pub mod grid;
pub mod halfint;
pub mod liealg;
pub mod normlab;
pub mod report;
pub mod repr;
pub mod speccalc;
pub mod symcalc;

pub use error::{Error, Result};
pub use halfint::HalfInt;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
/// Dense complex matrix used for representation blocks and symbols.
pub type CMatrix = nalgebra::DMatrix<C64>;
