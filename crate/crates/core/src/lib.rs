//! Single-photon cross-phase modulation in a three-level ladder medium
//! inside a high-finesse cavity.
//!
//! Two estimates of the phase one photon imprints on another are provided:
//! a fourth-order perturbative expression (with a Gaussian-mode refinement)
//! and exact diagonalization of the collective four-state Hamiltonian.
//! [`sweep`] compares them over a control-detuning grid.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod config;
pub mod constants;
pub mod dataset;
pub mod diagonalization;
pub mod eigen;
pub mod error;
pub mod model;
pub mod oracle;
pub mod perturbation;
pub mod quadrature;
pub mod sweep;
pub mod table;
pub mod validate;

pub use config::Config;
pub use dataset::MediumData;
pub use diagonalization::{nonlinear_shift, NonlinearShiftResult};
pub use error::{Error, Result};
pub use model::{
    xenon_default, AtomCount, CavityMode, CavitySpec, CavitySystem, CouplingSet, DerivedQuantities,
    LadderMedium, LifetimeFormula, ModelOptions, Transition,
};
pub use perturbation::{
    evaluate_perturbative, phi_gaussian, phi_uniform, PerturbativeResult, Scenario,
};
pub use quadrature::QuadratureOptions;
pub use sweep::{
    convention_sensitivity, divergence_report, find_max_phase, run_sweep, DivergenceReport,
    MaxPhase, PhasePoint, SensitivityRow, Spacing, SweepSpec,
};
pub use table::{emit_table, parse_table, TableFormat};
pub use validate::{run_checks, CheckResult, ValidationReport};
