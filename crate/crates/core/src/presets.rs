//! The two reference setups used throughout the tests and examples.

use crate::model::{ModelParams, State};

/// Parameters under which the prey-only state `(1, 0, 0)` attracts.
pub const PREY_ONLY_ATTRACTOR: ModelParams = ModelParams {
    m: 0.2,
    theta: 0.5,
    s1: 0.2,
    s2: 0.3,
    alpha1: 0.2,
    alpha2: 0.1,
    beta1: 0.15,
    beta2: 0.12,
};

pub const PREY_ONLY_INIT: State = State::from_array([0.9, 0.1, 0.1]);

/// Parameters under which the predator-2 boundary state `(0.4, 0, 0.228)`
/// attracts.
pub const PREDATOR2_ATTRACTOR: ModelParams = ModelParams {
    m: 0.02,
    theta: 0.5,
    s1: 0.08,
    s2: 0.04,
    alpha1: 0.2,
    alpha2: 0.1,
    beta1: 0.15,
    beta2: 0.12,
};

pub const PREDATOR2_INIT: State = State::from_array([0.35, 0.1, 0.1]);
