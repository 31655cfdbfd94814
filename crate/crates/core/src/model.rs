//! Dimensionless three-species model: parameters, state, vector field and
//! Jacobian.
//!
//! The prey `x` grows logistically with a strong Allee threshold `m`. Predator
//! 1 (`y1`) feeds through a Holling type II response `x / (1 + theta x)`,
//! predator 2 (`y2`) through a linear response, and the two predators
//! interfere with each other through the bilinear `beta` terms:
//!
//! ```text
//! x'  = x (1 - x)(x - m) - x y1 / (1 + theta x) - x y2
//! y1' = -s1 y1 + alpha1 x y1 / (1 + theta x) - beta1 y1 y2
//! y2' = -s2 y2 + alpha2 x y2 - beta2 y1 y2
//! ```

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("Allee threshold m = {m} is outside the strong-Allee range (0, 1)")]
    AlleeOutOfRange { m: f64 },
    #[error("parameter `{name}` must be strictly positive and finite, got {value}")]
    NonPositiveParam { name: &'static str, value: f64 },
    #[error("finite-difference step must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("state {0} is outside the non-negative orthant")]
    OutsideDomain(State),
}

/// Dimensional parameters of the original model, before rescaling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawParams {
    /// Intrinsic prey growth rate.
    pub r: f64,
    /// Prey carrying capacity.
    pub k: f64,
    /// Allee threshold, in population units.
    pub m_dim: f64,
    /// Predation rate of predator 1.
    pub c1: f64,
    /// Predation rate of predator 2.
    pub c2: f64,
    pub theta_dim: f64,
    pub s1_dim: f64,
    pub s2_dim: f64,
    pub alpha1_dim: f64,
    pub alpha2_dim: f64,
    pub beta1_dim: f64,
    pub beta2_dim: f64,
}

impl RawParams {
    fn fields(&self) -> [(&'static str, f64); 12] {
        [
            ("r", self.r),
            ("k", self.k),
            ("m_dim", self.m_dim),
            ("c1", self.c1),
            ("c2", self.c2),
            ("theta_dim", self.theta_dim),
            ("s1_dim", self.s1_dim),
            ("s2_dim", self.s2_dim),
            ("alpha1_dim", self.alpha1_dim),
            ("alpha2_dim", self.alpha2_dim),
            ("beta1_dim", self.beta1_dim),
            ("beta2_dim", self.beta2_dim),
        ]
    }
}

/// The eight dimensionless parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    /// Allee threshold, `0 < m < 1`.
    pub m: f64,
    /// Semi-saturation constant of predator 1's functional response.
    pub theta: f64,
    pub s1: f64,
    pub s2: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
}

impl ModelParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        m: f64,
        theta: f64,
        s1: f64,
        s2: f64,
        alpha1: f64,
        alpha2: f64,
        beta1: f64,
        beta2: f64,
    ) -> Result<Self, ModelError> {
        let p = Self {
            m,
            theta,
            s1,
            s2,
            alpha1,
            alpha2,
            beta1,
            beta2,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn fields(&self) -> [(&'static str, f64); 8] {
        [
            ("m", self.m),
            ("theta", self.theta),
            ("s1", self.s1),
            ("s2", self.s2),
            ("alpha1", self.alpha1),
            ("alpha2", self.alpha2),
            ("beta1", self.beta1),
            ("beta2", self.beta2),
        ]
    }

    /// Returns a copy with the named parameter replaced, or `None` if the name
    /// is unknown. The result is not validated.
    pub fn with(&self, name: &str, value: f64) -> Option<Self> {
        let mut p = *self;
        let slot = match name {
            "m" => &mut p.m,
            "theta" => &mut p.theta,
            "s1" => &mut p.s1,
            "s2" => &mut p.s2,
            "alpha1" => &mut p.alpha1,
            "alpha2" => &mut p.alpha2,
            "beta1" => &mut p.beta1,
            "beta2" => &mut p.beta2,
            _ => return None,
        };
        *slot = value;
        Some(p)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for (name, value) in self.fields() {
            if !(value.is_finite() && value > 0.0) {
                if name == "m" {
                    return Err(ModelError::AlleeOutOfRange { m: value });
                }
                return Err(ModelError::NonPositiveParam { name, value });
            }
        }
        if self.m >= 1.0 {
            return Err(ModelError::AlleeOutOfRange { m: self.m });
        }
        Ok(())
    }
}

/// Population triple `(x, y1, y2)` in dimensionless units.
///
/// The fields are public and unchecked: infeasible equilibria legitimately
/// carry negative coordinates. Use [`State::new`] where membership of the
/// non-negative orthant is required.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct State {
    pub x: f64,
    pub y1: f64,
    pub y2: f64,
}

impl State {
    pub fn new(x: f64, y1: f64, y2: f64) -> Result<Self, ModelError> {
        let s = Self { x, y1, y2 };
        if s.in_domain() {
            Ok(s)
        } else {
            Err(ModelError::OutsideDomain(s))
        }
    }

    pub const fn from_array(a: [f64; 3]) -> Self {
        Self {
            x: a[0],
            y1: a[1],
            y2: a[2],
        }
    }

    pub const fn to_array(self) -> [f64; 3] {
        [self.x, self.y1, self.y2]
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y1.is_finite() && self.y2.is_finite()
    }

    /// Finite and componentwise non-negative.
    pub fn in_domain(&self) -> bool {
        self.is_finite() && self.x >= 0.0 && self.y1 >= 0.0 && self.y2 >= 0.0
    }

    pub fn norm_inf(&self) -> f64 {
        self.x.abs().max(self.y1.abs()).max(self.y2.abs())
    }

    pub fn dist_inf(&self, other: &State) -> f64 {
        (self.x - other.x)
            .abs()
            .max((self.y1 - other.y1).abs())
            .max((self.y2 - other.y2).abs())
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}, {:?}, {:?})", self.x, self.y1, self.y2)
    }
}

/// Dense 3x3 real matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Mat3(pub [[f64; 3]; 3]);

impl Mat3 {
    pub const fn zeros() -> Self {
        Mat3([[0.0; 3]; 3])
    }

    pub fn diag(d: [f64; 3]) -> Self {
        let mut m = Self::zeros();
        for (i, v) in d.into_iter().enumerate() {
            m.0[i][i] = v;
        }
        m
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    /// Sum of the three principal 2x2 minors.
    pub fn principal_minor_sum(&self) -> f64 {
        let a = &self.0;
        (a[0][0] * a[1][1] - a[0][1] * a[1][0])
            + (a[0][0] * a[2][2] - a[0][2] * a[2][0])
            + (a[1][1] * a[2][2] - a[1][2] * a[2][1])
    }

    pub fn det(&self) -> f64 {
        let a = &self.0;
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0, |acc, v| acc.max(v.abs()))
    }
}

impl Index<(usize, usize)> for Mat3 {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for Mat3 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.0[i][j]
    }
}

/// Rescales dimensional parameters into the eight dimensionless ones.
pub fn nondimensionalize(raw: &RawParams) -> Result<ModelParams, ModelError> {
    for (name, value) in raw.fields() {
        if !(value.is_finite() && value > 0.0) {
            return Err(ModelError::NonPositiveParam { name, value });
        }
    }
    let rk = raw.r * raw.k;
    let p = ModelParams {
        m: raw.m_dim / raw.k,
        theta: raw.theta_dim * raw.k,
        s1: raw.s1_dim / rk,
        s2: raw.s2_dim / rk,
        alpha1: raw.alpha1_dim / raw.r,
        alpha2: raw.alpha2_dim / raw.r,
        beta1: raw.beta1_dim / raw.c2,
        beta2: raw.beta2_dim / raw.c1,
    };
    p.validate()?;
    Ok(p)
}

/// Time derivatives `(x', y1', y2')` at `s`.
///
/// Each component carries its own species as a factor, so a zero density
/// yields an exactly zero rate for that species.
pub fn vector_field(p: &ModelParams, s: &State) -> [f64; 3] {
    let State { x, y1, y2 } = *s;
    let holling = x / (1.0 + p.theta * x);
    [
        x * (1.0 - x) * (x - p.m) - holling * y1 - x * y2,
        y1 * (-p.s1 + p.alpha1 * holling - p.beta1 * y2),
        y2 * (-p.s2 + p.alpha2 * x - p.beta2 * y1),
    ]
}

/// Analytic Jacobian of [`vector_field`].
pub fn jacobian(p: &ModelParams, s: &State) -> Mat3 {
    let State { x, y1, y2 } = *s;
    let den = 1.0 + p.theta * x;
    let den2 = den * den;
    Mat3([
        [
            -3.0 * x * x + 2.0 * (p.m + 1.0) * x - p.m - y1 / den2 - y2,
            -x / den,
            -x,
        ],
        [
            p.alpha1 * y1 / den2,
            -p.s1 + p.alpha1 * x / den - p.beta1 * y2,
            -p.beta1 * y1,
        ],
        [
            p.alpha2 * y2,
            -p.beta2 * y2,
            -p.s2 + p.alpha2 * x - p.beta2 * y1,
        ],
    ])
}

/// Central-difference Jacobian of an arbitrary field on R^3, column by column.
pub fn fd_jacobian<F>(f: F, at: [f64; 3], h: f64) -> Result<Mat3, ModelError>
where
    F: Fn([f64; 3]) -> [f64; 3],
{
    if !(h.is_finite() && h > 0.0) {
        return Err(ModelError::InvalidStep(h));
    }
    let mut jac = Mat3::zeros();
    for j in 0..3 {
        let mut plus = at;
        let mut minus = at;
        plus[j] += h;
        minus[j] -= h;
        let step = plus[j] - minus[j];
        let (fp, fm) = (f(plus), f(minus));
        for i in 0..3 {
            jac[(i, j)] = (fp[i] - fm[i]) / step;
        }
    }
    Ok(jac)
}

/// Finite-difference Jacobian of the model's vector field.
pub fn jacobian_fd(p: &ModelParams, s: &State, h: f64) -> Result<Mat3, ModelError> {
    fd_jacobian(|v| vector_field(p, &State::from_array(v)), s.to_array(), h)
}
