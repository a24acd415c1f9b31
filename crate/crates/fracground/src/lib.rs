//! Numerical laboratory for ground states of the nearly-critical fractional
//! Schrödinger equation (-Lap)^s u + V(x) u = u^{2*_s - 1 - eps} on R^N,
//! realized spectrally on a periodic box.
//!
//! The crate computes constrained minimizers of the Rayleigh quotient
//! ||u||_{s,V}^2 / ||u||_{2*-eps}^2, sweeps eps toward the critical exponent,
//! and verifies the quantitative blow-up asymptotics: the blow-up rate and
//! constant, convergence of the constrained infimum to the Sobolev constant,
//! concentration of maxima at minima of V, the Pohozaev identity, the
//! nondegeneracy kernel of the linearization, and local uniqueness under
//! rescaling.

pub mod bubble;
pub mod config;
pub mod constants;
pub mod diagnostics;
pub mod error;
pub mod fft;
pub mod field;
pub mod io;
pub mod operator;
pub mod solver;
pub mod special;
pub mod sweep;

pub use constants::Params;
pub use error::{Error, Result};
pub use field::{Field, Grid, Potential};
