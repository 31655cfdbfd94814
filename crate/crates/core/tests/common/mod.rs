#![allow(dead_code)]

use alleedyn::model::{ModelParams, State};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::Rng;

/// Positive parameter sets with `0 < m < 1`.
pub fn params() -> impl Strategy<Value = ModelParams> {
    (
        0.01..0.99f64,
        0.05..3.0f64,
        0.01..1.0f64,
        0.01..1.0f64,
        0.01..2.0f64,
        0.01..2.0f64,
        0.01..1.0f64,
        0.01..1.0f64,
    )
        .prop_map(
            |(m, theta, s1, s2, alpha1, alpha2, beta1, beta2)| ModelParams {
                m,
                theta,
                s1,
                s2,
                alpha1,
                alpha2,
                beta1,
                beta2,
            },
        )
}

pub fn states() -> impl Strategy<Value = State> {
    (0.0..1.5f64, 0.0..1.5f64, 0.0..1.5f64).prop_map(|(x, y1, y2)| State { x, y1, y2 })
}

pub fn random_params(rng: &mut StdRng) -> ModelParams {
    ModelParams {
        m: rng.random_range(0.01..0.99),
        theta: rng.random_range(0.05..3.0),
        s1: rng.random_range(0.01..1.0),
        s2: rng.random_range(0.01..1.0),
        alpha1: rng.random_range(0.01..2.0),
        alpha2: rng.random_range(0.01..2.0),
        beta1: rng.random_range(0.01..1.0),
        beta2: rng.random_range(0.01..1.0),
    }
}

pub fn random_state(rng: &mut StdRng) -> State {
    State {
        x: rng.random_range(0.0..1.5),
        y1: rng.random_range(0.0..1.5),
        y2: rng.random_range(0.0..1.5),
    }
}

/// `(s1, beta1)` with `0 < s1 < beta1 / 2`.
pub fn random_family_base(rng: &mut StdRng) -> (f64, f64) {
    let beta1 = rng.random_range(0.1..2.0);
    let s1 = beta1 * rng.random_range(0.01..0.49);
    (s1, beta1)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
