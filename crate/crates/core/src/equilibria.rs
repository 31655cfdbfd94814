//! Boundary and internal equilibria.
//!
//! Boundary states come from closed forms. Internal states are found two ways:
//! on the constrained family (`beta1 = beta2`, `theta = 1`, `s1 = s2`,
//! `m = 2 s1 / beta1`) the steady-state equations collapse to a quadratic, and
//! in general the predator densities are eliminated so that a scalar residual
//! in `x` remains, whose roots are bracketed on a grid and polished.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{vector_field, ModelError, ModelParams, State};
use crate::roots::{bracketed_root, quadratic_real_roots};

/// Grid resolution of the general internal-equilibrium search.
pub const ROOT_GRID: usize = 10_000;

/// Relative residual threshold below which a point counts as an equilibrium.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Relative threshold on the constrained discriminant for the double root.
pub const DOUBLE_ROOT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EquilibriumError {
    #[error("{label:?} is undefined: {reason}")]
    DegenerateDenominator {
        label: EquilibriumLabel,
        reason: String,
    },
    #[error("constrained family needs 0 < s1 < beta1/2, got s1 = {s1}, beta1 = {beta1}")]
    AlleeOutOfRange { s1: f64, beta1: f64 },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EquilibriumLabel {
    E1,
    E2,
    E3,
    E4,
    E5,
    E6,
    E7,
    Generic,
}

impl std::str::FromStr for EquilibriumLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.to_ascii_uppercase().as_str() {
            "E1" => Self::E1,
            "E2" => Self::E2,
            "E3" => Self::E3,
            "E4" => Self::E4,
            "E5" => Self::E5,
            "E6" => Self::E6,
            "E7" => Self::E7,
            "GENERIC" => Self::Generic,
            _ => return Err(format!("unknown equilibrium label `{s}`")),
        })
    }
}

/// How an equilibrium was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    BoundaryClosedForm,
    ConstrainedQuadratic,
    ResidualRootFinder,
}

/// A named predicate evaluated on concrete numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    pub holds: bool,
}

impl Condition {
    pub fn new(name: impl Into<String>, holds: bool) -> Self {
        Self {
            name: name.into(),
            holds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub label: EquilibriumLabel,
    pub point: State,
    /// All coordinates non-negative and every existence condition holds.
    pub feasible: bool,
    pub existence_conditions: Vec<Condition>,
    pub source: Source,
}

impl Equilibrium {
    fn from_conditions(
        label: EquilibriumLabel,
        point: State,
        existence_conditions: Vec<Condition>,
        source: Source,
    ) -> Self {
        let feasible = point.in_domain() && existence_conditions.iter().all(|c| c.holds);
        Self {
            label,
            point,
            feasible,
            existence_conditions,
            source,
        }
    }
}

/// Sup-norm of the vector field at `point`.
pub fn residual(p: &ModelParams, point: &State) -> f64 {
    vector_field(p, point)
        .iter()
        .fold(0.0, |acc, v| acc.max(v.abs()))
}

/// Scale-relative equilibrium test: `‖f(point)‖∞ < 1e-10 · max(1, ‖point‖∞)`.
pub fn is_equilibrium(p: &ModelParams, point: &State) -> bool {
    residual(p, point) < RESIDUAL_TOL * point.norm_inf().max(1.0)
}

/// The four boundary equilibria. `e4` is absent when `alpha1 = theta s1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryEquilibria {
    pub e1: Equilibrium,
    pub e2: Equilibrium,
    pub e3: Equilibrium,
    pub e4: Result<Equilibrium, EquilibriumError>,
}

impl BoundaryEquilibria {
    pub fn iter(&self) -> impl Iterator<Item = &Equilibrium> {
        [&self.e1, &self.e2, &self.e3]
            .into_iter()
            .chain(self.e4.as_ref().ok())
    }

    pub fn get(&self, label: EquilibriumLabel) -> Option<&Equilibrium> {
        self.iter().find(|e| e.label == label)
    }
}

pub fn boundary_equilibria(p: &ModelParams) -> BoundaryEquilibria {
    let e1 = Equilibrium::from_conditions(
        EquilibriumLabel::E1,
        State::from_array([1.0, 0.0, 0.0]),
        vec![],
        Source::BoundaryClosedForm,
    );
    let e2 = Equilibrium::from_conditions(
        EquilibriumLabel::E2,
        State::from_array([p.m, 0.0, 0.0]),
        vec![],
        Source::BoundaryClosedForm,
    );
    BoundaryEquilibria {
        e1,
        e2,
        e3: predator2_only(p),
        e4: predator1_only(p),
    }
}

/// Boundary equilibrium without predator 1.
pub fn predator2_only(p: &ModelParams) -> Equilibrium {
    let x = p.s2 / p.alpha2;
    let y2 = (p.alpha2 - p.s2) * (p.s2 - p.m * p.alpha2) / (p.alpha2 * p.alpha2);
    Equilibrium::from_conditions(
        EquilibriumLabel::E3,
        State::from_array([x, 0.0, y2]),
        vec![
            Condition::new("alpha2 > s2", p.alpha2 > p.s2),
            Condition::new("s2 > m*alpha2", p.s2 > p.m * p.alpha2),
        ],
        Source::BoundaryClosedForm,
    )
}

/// Boundary equilibrium without predator 2.
///
/// With `d = alpha1 - theta s1` the prey level is `s1 / d` and the predator
/// level is `(1 + theta x)(1 - x)(x - m) = alpha1 (d - s1)(s1 - m d) / d^3`.
pub fn predator1_only(p: &ModelParams) -> Result<Equilibrium, EquilibriumError> {
    let d = p.alpha1 - p.theta * p.s1;
    if d.abs() <= 4.0 * f64::EPSILON * p.alpha1.max(p.theta * p.s1) {
        return Err(EquilibriumError::DegenerateDenominator {
            label: EquilibriumLabel::E4,
            reason: "alpha1 = theta*s1: predator 1 cannot break even at any prey level".to_string(),
        });
    }
    let a = d - p.s1;
    let b = p.s1 - p.m * d;
    let x = p.s1 / d;
    let y1 = p.alpha1 * a * b / (d * d * d);
    Ok(Equilibrium::from_conditions(
        EquilibriumLabel::E4,
        State::from_array([x, y1, 0.0]),
        vec![
            Condition::new("alpha1 > theta*s1", d > 0.0),
            Condition::new("alpha1 - theta*s1 - s1 > 0", a > 0.0),
            Condition::new("s1 - m*alpha1 + m*theta*s1 > 0", b > 0.0),
        ],
        Source::BoundaryClosedForm,
    ))
}

/// One-parameter-reduced family on which internal equilibria solve a
/// quadratic: `beta2 = beta1`, `theta = 1`, `s2 = s1`, `m = 2 s1 / beta1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstrainedFamily {
    pub s1: f64,
    pub beta1: f64,
    pub alpha1: f64,
    pub alpha2: f64,
}

impl ConstrainedFamily {
    pub fn new(s1: f64, beta1: f64, alpha1: f64, alpha2: f64) -> Result<Self, EquilibriumError> {
        let f = Self {
            s1,
            beta1,
            alpha1,
            alpha2,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<(), EquilibriumError> {
        for (name, value) in [
            ("s1", self.s1),
            ("beta1", self.beta1),
            ("alpha1", self.alpha1),
            ("alpha2", self.alpha2),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(ModelError::NonPositiveParam { name, value }.into());
            }
        }
        if 2.0 * self.s1 >= self.beta1 {
            return Err(EquilibriumError::AlleeOutOfRange {
                s1: self.s1,
                beta1: self.beta1,
            });
        }
        Ok(())
    }

    /// Recognises a full parameter set that lies on the family.
    pub fn from_params(p: &ModelParams) -> Option<Self> {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);
        let on_family = close(p.beta1, p.beta2)
            && close(p.theta, 1.0)
            && close(p.s1, p.s2)
            && close(p.m, 2.0 * p.s1 / p.beta1);
        on_family
            .then(|| Self::new(p.s1, p.beta1, p.alpha1, p.alpha2).ok())
            .flatten()
    }

    /// Constant term of the reduced quadratic
    /// `beta1 x^2 - 2 s1 x + (alpha1 + alpha2 - beta1 - s1) = 0`.
    pub fn quadratic_constant(&self) -> f64 {
        self.alpha1 + self.alpha2 - self.beta1 - self.s1
    }
}

pub fn expand_family(f: &ConstrainedFamily) -> Result<ModelParams, EquilibriumError> {
    f.validate()?;
    Ok(ModelParams::new(
        2.0 * f.s1 / f.beta1,
        1.0,
        f.s1,
        f.s1,
        f.alpha1,
        f.alpha2,
        f.beta1,
        f.beta1,
    )?)
}

/// Discriminant of the reduced quadratic written with leading coefficient
/// `beta1^2`: `4 s1^2 beta1^2 - 4 beta1^3 (alpha1 + alpha2 - beta1 - s1)`.
pub fn discriminant(f: &ConstrainedFamily) -> f64 {
    let b2 = f.beta1 * f.beta1;
    4.0 * f.s1 * f.s1 * b2 - 4.0 * b2 * f.beta1 * f.quadratic_constant()
}

/// The `alpha2` at which the reduced quadratic has a double root.
pub fn double_root_alpha2(s1: f64, beta1: f64, alpha1: f64) -> f64 {
    beta1 + s1 + s1 * s1 / beta1 - alpha1
}

/// Roots of the reduced quadratic, including non-positive ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuadraticRoots {
    None,
    Double(f64),
    /// Ascending.
    Two(f64, f64),
}

pub fn constrained_quadratic_roots(f: &ConstrainedFamily) -> QuadraticRoots {
    let delta = discriminant(f);
    if delta.abs() < DOUBLE_ROOT_TOL * 4.0 * f.s1 * f.s1 * f.beta1 * f.beta1 {
        return QuadraticRoots::Double(f.s1 / f.beta1);
    }
    if delta < 0.0 {
        return QuadraticRoots::None;
    }
    match quadratic_real_roots(f.beta1, -2.0 * f.s1, f.quadratic_constant())[..] {
        [lo, hi] => QuadraticRoots::Two(lo, hi),
        _ => QuadraticRoots::None,
    }
}

/// Predator densities that zero the two predator equations at prey level `x`.
pub fn predator_levels(p: &ModelParams, x: f64) -> (f64, f64) {
    let y1 = (p.alpha2 * x - p.s2) / p.beta2;
    let y2 = (p.alpha1 * x / (1.0 + p.theta * x) - p.s1) / p.beta1;
    (y1, y2)
}

/// Prey-equation residual after eliminating both predators, divided by `x`.
pub fn reduced_residual(p: &ModelParams, x: f64) -> f64 {
    let (y1, y2) = predator_levels(p, x);
    (1.0 - x) * (x - p.m) - y1 / (1.0 + p.theta * x) - y2
}

fn reduced_residual_scale(p: &ModelParams, x: f64) -> f64 {
    let (y1, y2) = predator_levels(p, x);
    let den = 1.0 + p.theta * x;
    1f64.max(((1.0 - x) * (x - p.m)).abs())
        .max((y1 / den).abs())
        .max(y2.abs())
}

fn reduced_residual_slope(p: &ModelParams, x: f64) -> f64 {
    let den = 1.0 + p.theta * x;
    1.0 + p.m - 2.0 * x - ((p.alpha2 + p.theta * p.s2) / p.beta2 + p.alpha1 / p.beta1) / (den * den)
}

fn reduced_residual_curvature(p: &ModelParams, x: f64) -> f64 {
    let den = 1.0 + p.theta * x;
    -2.0 + 2.0 * p.theta * ((p.alpha2 + p.theta * p.s2) / p.beta2 + p.alpha1 / p.beta1)
        / (den * den * den)
}

fn internal_at(p: &ModelParams, label: EquilibriumLabel, x: f64, source: Source) -> Equilibrium {
    let (y1, y2) = predator_levels(p, x);
    Equilibrium::from_conditions(
        label,
        State::from_array([x, y1, y2]),
        vec![
            Condition::new("x > 0", x > 0.0),
            Condition::new("y1 >= 0", y1 >= 0.0),
            Condition::new("y2 >= 0", y2 >= 0.0),
        ],
        source,
    )
}

/// Internal equilibria on the constrained family. Non-positive prey roots are
/// dropped; the remaining points carry feasibility flags for the predators.
pub fn internal_equilibria_constrained(
    f: &ConstrainedFamily,
) -> Result<Vec<Equilibrium>, EquilibriumError> {
    let p = expand_family(f)?;
    let candidates: Vec<(EquilibriumLabel, f64)> = match constrained_quadratic_roots(f) {
        QuadraticRoots::None => vec![],
        QuadraticRoots::Double(x) => vec![(EquilibriumLabel::E5, x)],
        QuadraticRoots::Two(lo, hi) => {
            vec![(EquilibriumLabel::E6, lo), (EquilibriumLabel::E7, hi)]
        }
    };
    Ok(candidates
        .into_iter()
        .filter(|&(label, x)| {
            if x <= 0.0 {
                log::debug!("dropping {label:?}: prey root x = {x} is not positive");
            }
            x > 0.0
        })
        .map(|(label, x)| internal_at(&p, label, x, Source::ConstrainedQuadratic))
        .collect())
}

/// All internal equilibria with prey level in `(0, x_max]`, found from sign
/// changes of the reduced residual on a uniform grid. Tangential (double)
/// roots are caught by also locating the residual's extrema.
pub fn internal_equilibria_general(p: &ModelParams, x_max: f64) -> Vec<Equilibrium> {
    internal_roots(p, x_max)
        .into_iter()
        .map(|x| internal_at(p, EquilibriumLabel::Generic, x, Source::ResidualRootFinder))
        .collect()
}

/// Prey levels of the internal equilibria in `(0, x_max]`, ascending.
pub fn internal_roots(p: &ModelParams, x_max: f64) -> Vec<f64> {
    if !(x_max.is_finite() && x_max > 0.0) {
        return vec![];
    }
    let g = |x: f64| reduced_residual(p, x);
    let dg = |x: f64| reduced_residual_slope(p, x);
    let d2g = |x: f64| reduced_residual_curvature(p, x);

    let grid: Vec<f64> = (1..=ROOT_GRID)
        .map(|i| x_max * i as f64 / ROOT_GRID as f64)
        .collect();

    let mut extrema = Vec::new();
    for w in grid.windows(2) {
        let (da, db) = (dg(w[0]), dg(w[1]));
        if da == 0.0 {
            extrema.push(w[0]);
        } else if da * db < 0.0 {
            extrema.push(bracketed_root(dg, Some(d2g), w[0], w[1]));
        }
    }

    let mut breakpoints: Vec<f64> = grid
        .iter()
        .copied()
        .chain(extrema.iter().copied())
        .collect();
    breakpoints.sort_by(f64::total_cmp);
    breakpoints.dedup();

    let mut roots = Vec::new();
    for w in breakpoints.windows(2) {
        let (ga, gb) = (g(w[0]), g(w[1]));
        if ga == 0.0 {
            roots.push(w[0]);
        } else if ga * gb < 0.0 {
            roots.push(bracketed_root(g, Some(dg), w[0], w[1]));
        }
    }
    if let Some(&last) = breakpoints.last() {
        if g(last) == 0.0 {
            roots.push(last);
        }
    }

    for &e in &extrema {
        if g(e).abs() <= 1e-13 * reduced_residual_scale(p, e) {
            roots.retain(|r| (r - e).abs() > 1e-5 * e.max(1.0));
            roots.push(e);
        }
    }

    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * a.abs().max(1.0));
    roots
}
