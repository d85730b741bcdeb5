//! SIS epidemics on discretized kernels and graphons.
//!
//! A [`KernelModel`] describes transmission rates `kappa` between atoms of a
//! finite feature space together with recovery rates `gamma`. On top of it the
//! crate computes reproduction numbers and spectral bounds, integrates the SIS
//! equation, finds the maximal equilibrium, and evaluates vaccination and
//! lockdown policies. [`scenario`] drives all of this from JSON files and
//! backs the `sis` command-line tool.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod families;
pub mod io;
pub mod kernel;
pub mod linalg;
pub mod lockdown;
pub mod scenario;
pub mod spectral;
pub mod support;
pub mod vaccination;

pub use dynamics::{
    classify_regime, counterexample_equilibria, integrate, maximal_equilibrium,
    one_group_closed_form, vector_field, EquilibriumReport, Regime, StateVector, Trajectory,
};
pub use error::{Error, Result};
pub use families::{GraphonForm, KernelSpec};
pub use kernel::{DiscreteSpace, KernelModel};
pub use linalg::Matrix;
pub use lockdown::{is_perfect_lockdown, partial_lockdown_check, r0_bounds, LockdownReport};
pub use spectral::{
    eigen_threshold, gelfand_sequence, r0, r0_effective, spectral_bound, spectral_radius,
    SpectralResult,
};
pub use vaccination::{
    build_perfect_vaccine_model, build_vaccinated_model, r0_vaccinated, Mechanism,
    VaccinationPolicy, VaccineSet,
};
