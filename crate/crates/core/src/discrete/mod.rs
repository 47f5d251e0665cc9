//! Periodic grid discretization of `(T², dμ, h)`.
//!
//! Each grid cell carries a constant cometric and is split into two P1
//! triangles; the stiffness form is therefore linear in the cometric field
//! and the eigenvalue derivative is an exact algebraic identity. On top of
//! the operator sit a first-eigenvalue ascent, the reconstruction of
//! `h = Σ du_k⊗du_k` from the first eigenspace, and a primal lower bound
//! that sandwiches the optimum.

pub mod ascent;
pub mod certificate;
pub mod eigen;
pub mod probes;
pub mod problem;

pub use ascent::{maximize_from, maximize_lambda1, objective, AscentOptions, AscentResult, HistoryRow, StepRule};
pub use certificate::{
    certificate_from_pairs, fit_gram, lambda1_of, max_stretch, nadirashvili_certificate, primal_lower_bound,
    NadirashviliCertificate, PrimalBound, CERTIFICATE_TOL,
};
pub use eigen::{lambda1_discrete, lambda1_discrete_with, residual_norm, EigenOptions, EigenPair};
pub use probes::{concavity_probe, gradient_probe, random_field, rayleigh_probe, scaling_probe, ProbeReport};
pub use problem::{assemble, cell_pair, cell_rank, eigenvalue_gradient, node, project_psd, Cell, DiscreteProblem, Mass, Stiffness, OFFSETS};
