//! Variance maximization of short maps and its dual, first-eigenvalue
//! maximization of the Bakry-Émery Laplacian over cometrics.
//!
//! The crate solves the pair exactly on flat tori ([`torus`]) and on
//! left-invariant metrics of SU(2) ([`su2`]), and numerically on a periodic
//! grid discretization of the torus ([`discrete`]). [`tensor`] and
//! [`duality`] hold the family-agnostic pieces: the `(g*, h)` pairing and the
//! certificates that check weak duality and its equality conditions.

pub mod discrete;
pub mod duality;
pub mod error;
pub mod su2;
pub mod tensor;
pub mod torus;

pub use duality::{DualityCertificate, SampledMap, TensorField};
pub use error::{Error, Result};
pub use tensor::{pair, psd_check, Frame, SymTensor, Variance};
