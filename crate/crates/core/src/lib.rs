//! Zero-energy scattering, upper and lower bounds on the ground-state energy
//! of the dilute Bose gas, and Monte Carlo oracles for the pieces of the
//! lower-bound argument.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cells;
pub mod error;
pub mod lower_bound;
pub mod oracles;
pub mod potential;
pub(crate) mod quadrature;
pub mod scattering;
pub mod upper_bounds;

pub use error::{Error, Result};
pub use lower_bound::{LowerBoundParams, SoftPotential};
pub use potential::{PotentialKind, RadialPotential, Shell};
pub use scattering::{
    energy_identity, radial_form_minimize, scattering_length, solve_zero_energy, EnergyIdentity,
    GridSpec, RadialMinimum, ScatteringSolution,
};
pub use upper_bounds::{BoundKind, BoundResult, FiniteBox, GasParameters, InvalidReason};
