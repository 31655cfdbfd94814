//! Numerical toolkit for a three-species predator-prey model with a strong
//! Allee effect in the prey and interference between two predators.
//!
//! * [`model`]: parameters, vector field, Jacobian.
//! * [`equilibria`]: boundary and internal steady states.
//! * [`stability`]: spectra, classification and degenerate parameter sets.
//! * [`integrator`]: RK4 / adaptive RK45 trajectories.
//! * [`cli`]: configuration, reports and the `alleedyn` command.

pub mod cli;
pub mod equilibria;
pub mod integrator;
pub mod model;
pub mod presets;
pub mod roots;
pub mod stability;
