//! Two-mode bosonic quantum metrology in the Dicke basis.

pub mod error;
pub mod fock_dicke;
mod linalg;
pub mod spectral;
pub mod states;
pub mod metrology;
pub mod variational;

pub use error::{Error, Result};
pub use fock_dicke::{BandedHermitian, CouplingSet, DickeVector, ParticleNumber, Term};
