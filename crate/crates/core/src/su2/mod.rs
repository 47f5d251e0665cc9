//! Left-invariant geometry on `SU(2) ≅ S³`.
//!
//! Functions are polynomials in `ζ₁, ζ̄₁, ζ₂, ζ̄₂` ([`ZPoly`]) and all
//! integrals are exact moments of the normalized Haar measure. The frame
//! `E₁, E₂, E₃` satisfies `[Eₐ, E_b] = −2E_c` cyclically, `σ₁, σ₂, σ₃` is its
//! dual coframe, and left-invariant cometrics are diagonal in it.

pub mod landscape;
pub mod maps;
pub mod quadrature;
pub mod scalar;
pub mod solve;
pub mod spectrum;
pub mod zpoly;

pub use landscape::{
    landscape, lambda1_uvw, phi, phi_extended, phi_minimize, phi_minimize_in, phi_projective_infimum, region,
    LandscapeSample, PhiLandscape, PhiMinimum, ProjectiveMinimum, Region,
};
pub use maps::{inflated_map, pullback_left_invariant, LeftInvariantPullback, PolyMap};
pub use quadrature::S3Quadrature;
pub use scalar::Scalar;
pub use solve::{
    berger_certificate, berger_solution_set, certify_left_invariant, left_invariant_metric, solve_left_invariant,
    BergerSet, BergerSolutionSet, Su2Branch, Su2Solution,
};
pub use spectrum::{
    berger_lambda1, eigen_table_check, lambda1_left_invariant, EigenRowCheck, EigenTableReport, Lambda1,
    LeftInvariantCometric, TableRow,
};
pub use zpoly::{derive, equal_on_s3, laplacian, s3_integrate, Exponent, FPoly, QPoly, ZPoly};
