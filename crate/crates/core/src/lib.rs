//! Coherent states for nondegenerate discrete spectra.
//!
//! A spectrum is a dimensionless level sequence `0 = e_0 < e_1 < ...`
//! together with a frequency `omega`. From the moment products
//! `rho_n = e_n * ... * e_1` the crate assembles label states
//!
//! ```text
//! |J, gamma> = M(J)^{-1} sum_n J^{n/2} e^{-i e_n gamma} / sqrt(rho_n) |n>
//! ```
//!
//! and verifies, with certified numerics, the four properties that make them
//! coherent: continuity of the labeling, resolution of unity against the
//! canonical measure, temporal stability `e^{-iHt}|J,gamma> = |J,gamma+wt>`,
//! and the action identity `<H> = omega J`.
//!
//! Built-in spectra: the harmonic chain `e_n = n` and the 1-D hydrogen-like
//! chain `e_n = 1 - 1/(n+1)^2`; custom spectra come in as explicit tables or
//! parametric formulas.

pub mod dynamics;
mod error;
pub mod moments;
pub mod observables;
pub mod phase;
pub mod quad;
pub mod spectrum;
pub mod state;
pub mod unity;

pub use dynamics::{autocorrelation, evolve_direct, evolve_label, TimeGrid};
pub use error::{Error, Result};
pub use moments::{
    canonical_measure, hydrogen_rho_closed, moment_of_measure, radius_of_convergence, Atom,
    Density, Measure, MomentSequence,
};
pub use observables::{
    canonical_one_form, hydrogen_variance_bound_check, mean_energy, observable_report,
    one_form_finite_difference, variance_v, ObservableReport, VarianceBoundReport,
    ONE_FORM_FD_DELTA,
};
pub use phase::unit_phase;
pub use quad::{QuadraturePolicy, QuadratureResult};
pub use spectrum::{
    FormulaFamily, LimitEstimate, SpectrumKind, SpectrumSpec, ValidationResult, Violation,
    ViolationKind,
};
pub use state::{
    coefficients, hydrogen_normalization_closed, normalization_sq, overlap, CoherentState,
    SeriesValue, TruncationPolicy,
};
pub use unity::{
    bohr_offdiagonal, bohr_offdiagonal_closed, resolution_check, verify_diagonal, OffdiagSample,
    PairSlope, UnityReport, SLOPE_BAND,
};
