//! Flat tori: exact lattice spectra and the inflated maps built from first
//! eigenfunctions of the equilateral and square metrics.

pub mod lattice;
pub mod solve;
pub mod trig_map;

pub use lattice::{
    check_normalized, dual_lattice, multiplicity_rule, normalize_lattice, quadratic_form_levels,
    recognize_rational, spectrum, spectrum_exact, Lattice2, NormalizedLattice, Rational, SpectralLevel,
};
pub use solve::{certify_constant, solve_pair, ConstantCertificate, RectangularSolutions, TorusSolution};
pub use trig_map::{
    equilateral_metric, inflated_map_el, inflated_map_sq, inflation_amplitudes, lattice_metric, psi_pqr,
    PullbackReport, TrigMap, TrigTerm, Wave,
};
