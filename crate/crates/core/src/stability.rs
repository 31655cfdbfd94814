//! Linear stability of equilibria.
//!
//! Eigenvalues come from the characteristic cubic `λ³ + a2 λ² + a1 λ + a0` of
//! the 3x3 Jacobian. Verdicts are read off the eigenvalue signs; the closed-form
//! parameter conditions known for each boundary equilibrium are evaluated and
//! reported next to the verdict, and a note is attached when the region's
//! stated verdict disagrees with the spectrum.
//!
//! The second half of the module handles the degenerate spectra at the
//! constrained internal point `E5`: the `alpha1` that zeroes `det J`, the
//! `alpha2` window where that value is positive, and bisection solvers for
//! the fold-Hopf (`{0, ±iω}`) and double-zero (`{0, 0, λ}`) loci.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::equilibria::{
    predator1_only, predator2_only, residual, Condition, ConstrainedFamily, Equilibrium,
    EquilibriumError, EquilibriumLabel, RESIDUAL_TOL,
};
use crate::model::{jacobian, Mat3, ModelParams, State};
use crate::roots::{bracketed_root, quadratic_real_roots};

/// Relative eigenvalue zero threshold: `|λ| < ZERO_TOL · max(1, ρ)`.
pub const ZERO_TOL: f64 = 1e-8;

/// Sample count used to bracket sign changes inside the `alpha2` window.
const WINDOW_SAMPLES: usize = 2000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StabilityError {
    #[error("point is not an equilibrium: residual {residual:e} exceeds {tol:e}")]
    NotAnEquilibrium { residual: f64, tol: f64 },
    #[error("precondition not met: {0}")]
    ConditionNotMet(String),
    #[error("alpha1* is undefined: 2*beta1*alpha2 - beta1^2 + s1*alpha2 = 0")]
    SingularDenominator,
    #[error("the alpha2 window polynomial has no real roots")]
    NegativeWindowDiscriminant,
    #[error("no degenerate point found: {0}")]
    NotFound(NotFoundReason),
    #[error(transparent)]
    Equilibrium(#[from] EquilibriumError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NotFoundReason {
    /// The targeted coefficient keeps one sign over the window.
    NoSignChange,
    /// `a2` vanishes but `a1 <= 0`, so `λ² + a1` has real roots.
    ImaginaryPairAbsent,
    /// `a1` vanishes together with `a2`.
    TripleZero,
}

impl std::fmt::Display for NotFoundReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Self::NoSignChange => "no sign change over the alpha2 window",
            Self::ImaginaryPairAbsent => "a1 <= 0 at the candidate, no imaginary pair",
            Self::TripleZero => "a2 also vanishes at the candidate (triple zero)",
        };
        f.write_str(s)
    }
}

/// Coefficients of `λ³ + a2 λ² + a1 λ + a0 = det(λI - J)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharCubic {
    pub a2: f64,
    pub a1: f64,
    pub a0: f64,
}

impl CharCubic {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        ((z + self.a2) * z + self.a1) * z + self.a0
    }

    fn derivative(&self, z: Complex64) -> Complex64 {
        (z * 3.0 + 2.0 * self.a2) * z + self.a1
    }

    /// Root-magnitude scale `max(1, |a2|, |a1|^½, |a0|^⅓)`.
    pub fn scale(&self) -> f64 {
        1f64.max(self.a2.abs())
            .max(self.a1.abs().sqrt())
            .max(self.a0.abs().cbrt())
    }
}

pub fn char_cubic(j: &Mat3) -> CharCubic {
    CharCubic {
        a2: -j.trace(),
        a1: j.principal_minor_sum(),
        a0: -j.det(),
    }
}

/// Roots of `λ² + b λ + c`.
fn monic_quadratic(b: f64, c: f64) -> [Complex64; 2] {
    let disc = b * b - 4.0 * c;
    if disc >= 0.0 {
        match quadratic_real_roots(1.0, b, c)[..] {
            [r1, r2] => [Complex64::new(r1, 0.0), Complex64::new(r2, 0.0)],
            _ => unreachable!("non-negative discriminant"),
        }
    } else {
        let im = 0.5 * (-disc).sqrt();
        [Complex64::new(-0.5 * b, -im), Complex64::new(-0.5 * b, im)]
    }
}

/// All three roots of the characteristic cubic, sorted by real part.
///
/// Three real roots use the trigonometric form, one real root uses Cardano
/// with deflation for the complex pair; each root then gets one Newton step.
/// Coefficients `a0` (and then `a1`) below `zero_tol² · scale^k` are treated as
/// exact zeros: perturbations that small cannot move even a double root by
/// more than `zero_tol · scale`. Imaginary parts under `zero_tol · scale` are
/// snapped to zero.
pub fn eigenvalues(c: &CharCubic, zero_tol: f64) -> [Complex64; 3] {
    let s = c.scale();
    let tau2 = zero_tol * zero_tol;
    let mut roots = if c.a0.abs() <= tau2 * s * s * s {
        let a1 = if c.a1.abs() <= tau2 * s * s {
            0.0
        } else {
            c.a1
        };
        let [r1, r2] = monic_quadratic(c.a2, a1);
        [Complex64::new(0.0, 0.0), r1, r2]
    } else {
        let mut r = cubic_roots(c);
        for z in r.iter_mut() {
            let d = c.derivative(*z);
            if d.norm() > 0.0 {
                let next = *z - c.eval(*z) / d;
                if next.is_finite() && c.eval(next).norm() < c.eval(*z).norm() {
                    *z = next;
                }
            }
        }
        r
    };
    for z in roots.iter_mut() {
        if z.im.abs() < zero_tol * s {
            z.im = 0.0;
        }
        // Normalise negative zeros.
        z.re += 0.0;
        z.im += 0.0;
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    roots
}

fn cubic_roots(c: &CharCubic) -> [Complex64; 3] {
    let shift = c.a2 / 3.0;
    let p = c.a1 - c.a2 * c.a2 / 3.0;
    let q = 2.0 * c.a2 * c.a2 * c.a2 / 27.0 - c.a2 * c.a1 / 3.0 + c.a0;
    let disc = 0.25 * q * q + p * p * p / 27.0;
    if disc <= 0.0 {
        if p == 0.0 {
            let r = Complex64::new(-shift, 0.0);
            return [r; 3];
        }
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        let mut out = [Complex64::default(); 3];
        for (k, z) in out.iter_mut().enumerate() {
            let t = m * (phi - 2.0 * PI * k as f64 / 3.0).cos();
            *z = Complex64::new(t - shift, 0.0);
        }
        out
    } else {
        let u = (-(0.5 * q + disc.sqrt().copysign(q))).cbrt();
        let t = if u == 0.0 { 0.0 } else { u - p / (3.0 * u) };
        let r = t - shift;
        // Deflate: λ³ + a2 λ² + a1 λ + a0 = (λ - r)(λ² + b λ + k).
        let b = c.a2 + r;
        let k = if r.abs() > 1e-3 * c.scale() {
            -c.a0 / r
        } else {
            c.a1 + r * b
        };
        let [z1, z2] = monic_quadratic(b, k);
        [Complex64::new(r, 0.0), z1, z2]
    }
}

fn spectral_radius(eig: &[Complex64; 3]) -> f64 {
    eig.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    StableNode,
    UnstableNode,
    Saddle,
    SaddleNodeCodim1,
    SingleZeroDegenerate,
    FoldHopfCandidate,
    DoubleZeroCandidate,
    StableFocusNode,
    UnstableFocusNode,
    Unclassified,
}

impl Classification {
    pub fn is_stable(self) -> bool {
        matches!(self, Self::StableNode | Self::StableFocusNode)
    }

    pub fn is_unstable(self) -> bool {
        matches!(
            self,
            Self::Saddle | Self::UnstableNode | Self::UnstableFocusNode
        )
    }

    fn coarse(self) -> Option<Verdict> {
        match self {
            Self::StableNode | Self::StableFocusNode => Some(Verdict::Stable),
            Self::UnstableNode | Self::UnstableFocusNode => Some(Verdict::Unstable),
            Self::Saddle => Some(Verdict::Saddle),
            Self::SaddleNodeCodim1 => Some(Verdict::SaddleNode),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::StableNode => "StableNode",
            Self::UnstableNode => "UnstableNode",
            Self::Saddle => "Saddle",
            Self::SaddleNodeCodim1 => "SaddleNodeCodim1",
            Self::SingleZeroDegenerate => "SingleZeroDegenerate",
            Self::FoldHopfCandidate => "FoldHopfCandidate",
            Self::DoubleZeroCandidate => "DoubleZeroCandidate",
            Self::StableFocusNode => "StableFocusNode",
            Self::UnstableFocusNode => "UnstableFocusNode",
            Self::Unclassified => "Unclassified",
        }
    }
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Verdict {
    Stable,
    Unstable,
    Saddle,
    SaddleNode,
}

impl Verdict {
    fn describe(self) -> &'static str {
        match self {
            Self::Stable => "a stable node",
            Self::Unstable => "an unstable node",
            Self::Saddle => "a saddle",
            Self::SaddleNode => "a codimension-1 saddle-node",
        }
    }
}

/// Classifies a spectrum given the absolute zero threshold `tol`.
/// `saddle_node_available` signals a known nonzero quadratic center-manifold
/// coefficient for the zero eigenvalue.
pub fn classify_spectrum(
    eig: &[Complex64; 3],
    tol: f64,
    saddle_node_available: bool,
) -> Classification {
    let zeros = eig.iter().filter(|z| z.norm() < tol).count();
    let rest: Vec<&Complex64> = eig.iter().filter(|z| z.norm() >= tol).collect();
    let imaginary_pair = rest.len() == 2
        && rest.iter().all(|z| z.re.abs() < tol && z.im.abs() >= tol)
        && rest[0].im * rest[1].im < 0.0;
    match zeros {
        0 => {
            if rest.iter().any(|z| z.re.abs() < tol) {
                return Classification::Unclassified;
            }
            let complex = rest.iter().any(|z| z.im != 0.0);
            let negatives = rest.iter().filter(|z| z.re < 0.0).count();
            match (negatives, complex) {
                (3, false) => Classification::StableNode,
                (3, true) => Classification::StableFocusNode,
                (0, false) => Classification::UnstableNode,
                (0, true) => Classification::UnstableFocusNode,
                _ => Classification::Saddle,
            }
        }
        1 if imaginary_pair => Classification::FoldHopfCandidate,
        1 if rest.iter().any(|z| z.re.abs() < tol) => Classification::Unclassified,
        1 if saddle_node_available => Classification::SaddleNodeCodim1,
        1 => Classification::SingleZeroDegenerate,
        2 => Classification::DoubleZeroCandidate,
        _ => Classification::Unclassified,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SaddleNodeSource {
    /// Predator-2 boundary point with the predator-1 invasion eigenvalue at zero.
    E3CaseV,
    /// Predator-1 boundary point with the predator-2 invasion eigenvalue at zero.
    E4CaseIii,
}

/// Quadratic coefficient of the flow on the one-dimensional center manifold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaddleNodeCoeff {
    pub g200: f64,
    pub source: SaddleNodeSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub cubic: CharCubic,
    pub eigenvalues: [Complex64; 3],
    pub classification: Classification,
    /// Absolute zero threshold actually applied.
    pub zero_tol: f64,
    pub conditions: Vec<Condition>,
    /// Set when the verdict stated for the parameter region disagrees with
    /// the eigenvalue signs.
    pub discrepancy: Option<String>,
    pub saddle_node: Option<SaddleNodeCoeff>,
}

/// The invasion eigenvalue of the missing predator at E3 / E4. It decouples
/// because the absent species multiplies its own row.
fn invasion_eigenvalue(p: &ModelParams, which: EquilibriumLabel, point: &State) -> Option<f64> {
    let j = jacobian(p, point);
    match which {
        EquilibriumLabel::E3 => Some(j[(1, 1)]),
        EquilibriumLabel::E4 => Some(j[(2, 2)]),
        _ => None,
    }
}

/// Closed-form center-manifold coefficient at the E3 or E4 saddle-node.
pub fn saddle_node_coefficient(
    p: &ModelParams,
    which: EquilibriumLabel,
) -> Result<SaddleNodeCoeff, StabilityError> {
    let (e, source) = match which {
        EquilibriumLabel::E3 => (predator2_only(p), SaddleNodeSource::E3CaseV),
        EquilibriumLabel::E4 => (predator1_only(p)?, SaddleNodeSource::E4CaseIii),
        other => {
            return Err(StabilityError::ConditionNotMet(format!(
                "no closed-form saddle-node coefficient for {other:?}"
            )))
        }
    };
    let lambda1 = invasion_eigenvalue(p, which, &e.point).expect("boundary label");
    let eig = eigenvalues(&char_cubic(&jacobian(p, &e.point)), ZERO_TOL);
    let tol = ZERO_TOL * spectral_radius(&eig).max(1.0);
    if lambda1.abs() >= tol {
        return Err(StabilityError::ConditionNotMet(format!(
            "invasion eigenvalue at {which:?} is {lambda1:e}, not zero"
        )));
    }
    let g200 = match source {
        SaddleNodeSource::E3CaseV => p.alpha2,
        SaddleNodeSource::E4CaseIii => {
            let den = 1.0 + p.theta * e.point.x;
            p.alpha1 / (den * den)
        }
    };
    Ok(SaddleNodeCoeff { g200, source })
}

struct RegionReport {
    conditions: Vec<Condition>,
    stated: Option<(&'static str, Verdict)>,
}

fn region_report(p: &ModelParams, e: &Equilibrium, tol: f64) -> RegionReport {
    let lt = |a: f64, b: f64| a < b;
    match e.label {
        EquilibriumLabel::E1 => {
            let r1 = p.alpha1 / (1.0 + p.theta);
            let c1 = lt(r1, p.s1);
            let c2 = lt(p.alpha2, p.s2);
            let stated = if c1 && c2 {
                Some(("both predators below break-even", Verdict::Stable))
            } else if (r1 > p.s1 && p.alpha2 != p.s2) || (r1 != p.s1 && p.alpha2 > p.s2) {
                Some(("a predator can invade", Verdict::Saddle))
            } else {
                None
            };
            RegionReport {
                conditions: vec![
                    Condition::new("alpha1/(1+theta) < s1", c1),
                    Condition::new("alpha2 < s2", c2),
                ],
                stated,
            }
        }
        EquilibriumLabel::E2 => {
            let r1 = p.alpha1 * p.m / (1.0 + p.theta * p.m);
            let r2 = p.alpha2 * p.m;
            let stated = if r1 > p.s1 && r2 > p.s2 {
                Some(("both predators invade", Verdict::Unstable))
            } else if (r1 < p.s1 && r2 != p.s2) || (r1 != p.s1 && r2 < p.s2) {
                Some(("a predator cannot invade", Verdict::Saddle))
            } else {
                None
            };
            RegionReport {
                conditions: vec![
                    Condition::new("m - m^2 > 0", p.m - p.m * p.m > 0.0),
                    Condition::new("alpha1*m/(1+theta*m) > s1", r1 > p.s1),
                    Condition::new("alpha2*m > s2", r2 > p.s2),
                ],
                stated,
            }
        }
        EquilibriumLabel::E3 => {
            let y2 = e.point.y2;
            let threshold = p.alpha1 * p.s2 / (p.alpha2 + p.theta * p.s2) - p.beta1 * y2;
            let half_trace = (p.m + 1.0) * p.alpha2 / 4.0;
            let on_fold = (p.s1 - threshold).abs() < tol;
            let stated = if y2 <= 0.0 {
                None
            } else if on_fold {
                (p.s2 != half_trace).then_some(("invasion eigenvalue zero", Verdict::SaddleNode))
            } else {
                match (p.s1 > threshold, p.s2 > half_trace) {
                    (true, true) => Some(("invasion negative, trace negative", Verdict::Stable)),
                    (true, false) => Some(("invasion negative, trace positive", Verdict::Saddle)),
                    (false, true) => Some(("invasion positive, trace negative", Verdict::Saddle)),
                    (false, false) => Some(("invasion positive, trace positive", Verdict::Stable)),
                }
            };
            RegionReport {
                conditions: vec![
                    Condition::new("y2 > 0", y2 > 0.0),
                    Condition::new(
                        "s1 > alpha1*s2/(alpha2+theta*s2) - beta1*y2",
                        p.s1 > threshold,
                    ),
                    Condition::new("s2 > (m+1)*alpha2/4", p.s2 > half_trace),
                    Condition::new("s1 = alpha1*s2/(alpha2+theta*s2) - beta1*y2", on_fold),
                ],
                stated,
            }
        }
        EquilibriumLabel::E4 => {
            let State { x, y1, .. } = e.point;
            let invasion = p.alpha2 * x - p.beta2 * y1;
            let alpha1_bound = p.s1 * (2.0 * p.m + p.m * p.theta + 1.0) / p.m;
            let j = jacobian(p, &e.point);
            let on_fold = (p.s2 - invasion).abs() < tol;
            let big_alpha1 = p.alpha1 > alpha1_bound;
            let stated = if y1 <= 0.0 || !big_alpha1 {
                None
            } else if on_fold {
                Some(("invasion eigenvalue zero", Verdict::SaddleNode))
            } else if p.s2 > invasion {
                Some(("invasion negative", Verdict::Stable))
            } else {
                Some(("invasion positive", Verdict::Stable))
            };
            RegionReport {
                conditions: vec![
                    Condition::new("y1 > 0", y1 > 0.0),
                    Condition::new("s2 > alpha2*x - beta2*y1", p.s2 > invasion),
                    Condition::new("alpha1 > s1*(2m+m*theta+1)/m", big_alpha1),
                    Condition::new(
                        "prey-predator1 block trace < 0",
                        j[(0, 0)] + j[(1, 1)] < 0.0,
                    ),
                    Condition::new("s2 = alpha2*x - beta2*y1", on_fold),
                ],
                stated,
            }
        }
        _ => RegionReport {
            conditions: e.existence_conditions.clone(),
            stated: None,
        },
    }
}

/// Spectrum, verdict and condition report for an equilibrium.
pub fn classify(p: &ModelParams, e: &Equilibrium) -> Result<SpectrumReport, StabilityError> {
    let res = residual(p, &e.point);
    let res_tol = RESIDUAL_TOL * e.point.norm_inf().max(1.0);
    if res.is_nan() || res >= res_tol {
        return Err(StabilityError::NotAnEquilibrium {
            residual: res,
            tol: res_tol,
        });
    }
    let j = jacobian(p, &e.point);
    let cubic = char_cubic(&j);
    let eig = eigenvalues(&cubic, ZERO_TOL);
    let tol = ZERO_TOL * spectral_radius(&eig).max(1.0);

    let saddle_node = match e.label {
        EquilibriumLabel::E3 | EquilibriumLabel::E4 => saddle_node_coefficient(p, e.label).ok(),
        _ => None,
    };
    let classification = classify_spectrum(&eig, tol, saddle_node.is_some_and(|c| c.g200 != 0.0));

    let region = region_report(p, e, tol);
    let discrepancy = region.stated.and_then(|(region_name, stated)| {
        let actual = classification.coarse()?;
        (actual != stated).then(|| {
            format!(
                "region '{region_name}' is stated to make {:?} {} but the spectrum gives {}",
                e.label,
                stated.describe(),
                actual.describe()
            )
        })
    });

    Ok(SpectrumReport {
        cubic,
        eigenvalues: eig,
        classification,
        zero_tol: tol,
        conditions: region.conditions,
        discrepancy,
        saddle_node,
    })
}

/// Unit direction spanning the kernel of a rank-2 matrix: the largest cross
/// product of two rows. `None` when every such product vanishes.
pub fn center_direction(j: &Mat3) -> Option<[f64; 3]> {
    let r = j.0;
    let cross = |a: [f64; 3], b: [f64; 3]| {
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    };
    let norm = |v: &[f64; 3]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let best = [cross(r[0], r[1]), cross(r[0], r[2]), cross(r[1], r[2])]
        .into_iter()
        .max_by(|a, b| norm(a).total_cmp(&norm(b)))?;
    let n = norm(&best);
    (n > 0.0).then(|| best.map(|v| v / n))
}

// ---------------------------------------------------------------------------
// Degenerate spectra at the constrained internal point.

/// Model parameters of the constrained family without positivity checks;
/// `alpha1` may be any real here.
fn family_params(s1: f64, beta1: f64, alpha2: f64, alpha1: f64) -> ModelParams {
    ModelParams {
        m: 2.0 * s1 / beta1,
        theta: 1.0,
        s1,
        s2: s1,
        alpha1,
        alpha2,
        beta1,
        beta2: beta1,
    }
}

/// Evaluation point of the degenerate-spectrum analysis:
/// `(s1/β1, s1(α2-β1)/β1², s1(α2-s1-β1)/(β1(β1+s1)))`.
pub fn e5_point(s1: f64, beta1: f64, alpha2: f64) -> State {
    State {
        x: s1 / beta1,
        y1: s1 * (alpha2 - beta1) / (beta1 * beta1),
        y2: s1 * (alpha2 - s1 - beta1) / (beta1 * (beta1 + s1)),
    }
}

pub fn e5_jacobian(s1: f64, beta1: f64, alpha2: f64, alpha1: f64) -> Mat3 {
    jacobian(
        &family_params(s1, beta1, alpha2, alpha1),
        &e5_point(s1, beta1, alpha2),
    )
}

fn check_family(s1: f64, beta1: f64) -> Result<(), StabilityError> {
    // alpha values are irrelevant to the range check.
    ConstrainedFamily::new(s1, beta1, 1.0, 1.0)?;
    Ok(())
}

/// Quadratic in `alpha2` whose sign is the sign of `alpha1*` on the side where
/// its denominator is positive.
pub fn window_polynomial(s1: f64, beta1: f64) -> [f64; 3] {
    let (s, b) = (s1, beta1);
    [
        -(2.0 * b * b + s * b),
        5.0 * s * b * b + 3.0 * s * s * b + s * s * s + 5.0 * b * b * b,
        -(3.0 * s * b * b * b + 3.0 * s * s * b * b + s * s * s * b + 2.0 * b * b * b * b),
    ]
}

/// The `alpha1` at which `det J(E5)` vanishes.
pub fn alpha1_star(s1: f64, beta1: f64, alpha2: f64) -> Result<f64, StabilityError> {
    let [qa, qb, qc] = window_polynomial(s1, beta1);
    let numerator = (qa * alpha2 + qb) * alpha2 + qc;
    let inner = 2.0 * beta1 * alpha2 - beta1 * beta1 + s1 * alpha2;
    let scale = (2.0 * beta1 * alpha2).abs() + beta1 * beta1 + (s1 * alpha2).abs();
    if inner.abs() <= 8.0 * f64::EPSILON * scale {
        return Err(StabilityError::SingularDenominator);
    }
    Ok(numerator / (beta1 * inner))
}

/// `(lo, hi)` roots of [`window_polynomial`]; it is positive strictly between.
pub fn alpha2_star_window(s1: f64, beta1: f64) -> Result<(f64, f64), StabilityError> {
    check_family(s1, beta1)?;
    let [qa, qb, qc] = window_polynomial(s1, beta1);
    match quadratic_real_roots(qa, qb, qc)[..] {
        [lo, hi] if lo < hi => Ok((lo, hi)),
        _ => Err(StabilityError::NegativeWindowDiscriminant),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DegenerateStructure {
    SingleZero,
    FoldHopf,
    DoubleZero,
    NonDegenerate,
}

/// Coefficient pattern of the characteristic cubic at E5.
pub fn degenerate_structure(s1: f64, beta1: f64, alpha2: f64, alpha1: f64) -> DegenerateStructure {
    let j = e5_jacobian(s1, beta1, alpha2, alpha1);
    let c = char_cubic(&j);
    let tau = 1e-8 * j.max_abs().max(1.0);
    let zero = |v: f64| v.abs() < tau;
    if !zero(c.a0) {
        DegenerateStructure::NonDegenerate
    } else if zero(c.a2) && c.a1 > tau {
        DegenerateStructure::FoldHopf
    } else if zero(c.a1) && !zero(c.a2) {
        DegenerateStructure::DoubleZero
    } else if !zero(c.a1) && !zero(c.a2) {
        DegenerateStructure::SingleZero
    } else {
        DegenerateStructure::NonDegenerate
    }
}

/// A point on one of the degenerate loci.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegeneratePoint {
    pub alpha2: f64,
    pub alpha1: f64,
    pub cubic: CharCubic,
    pub eigenvalues: [Complex64; 3],
}

impl DegeneratePoint {
    /// Frequency of the imaginary pair, when `a1 > 0`.
    pub fn omega(&self) -> Option<f64> {
        (self.cubic.a1 > 0.0).then(|| self.cubic.a1.sqrt())
    }
}

fn cubic_on_locus(s1: f64, beta1: f64, alpha2: f64) -> Result<(f64, CharCubic), StabilityError> {
    let alpha1 = alpha1_star(s1, beta1, alpha2)?;
    Ok((alpha1, char_cubic(&e5_jacobian(s1, beta1, alpha2, alpha1))))
}

/// Finds the sign changes of `pick(cubic)` along the `alpha1 = alpha1*` curve
/// over the `alpha2` window and polishes each by bisection.
fn locus_roots(
    s1: f64,
    beta1: f64,
    pick: fn(&CharCubic) -> f64,
) -> Result<Vec<f64>, StabilityError> {
    let (lo, hi) = alpha2_star_window(s1, beta1)?;
    let h = |a2: f64| cubic_on_locus(s1, beta1, a2).map(|(_, c)| pick(&c));
    let samples: Vec<(f64, Option<f64>)> = (1..WINDOW_SAMPLES)
        .map(|i| {
            let a2 = lo + (hi - lo) * i as f64 / WINDOW_SAMPLES as f64;
            (a2, h(a2).ok())
        })
        .collect();
    let mut out = Vec::new();
    for w in samples.windows(2) {
        let ((xa, Some(fa)), (xb, Some(fb))) = (w[0], w[1]) else {
            continue;
        };
        if fa == 0.0 {
            out.push(xa);
            continue;
        }
        if fa * fb >= 0.0 {
            continue;
        }
        let f = |a2: f64| h(a2).unwrap_or(f64::NAN);
        let root = bracketed_root(f, None::<fn(f64) -> f64>, xa, xb);
        // A jump through a pole also changes sign; keep genuine zeros only.
        if f(root).abs() <= 1e-10 {
            out.push(root);
        }
    }
    Ok(out)
}

fn degenerate_point(s1: f64, beta1: f64, alpha2: f64) -> Result<DegeneratePoint, StabilityError> {
    let (alpha1, cubic) = cubic_on_locus(s1, beta1, alpha2)?;
    Ok(DegeneratePoint {
        alpha2,
        alpha1,
        cubic,
        eigenvalues: eigenvalues(&cubic, ZERO_TOL),
    })
}

/// `alpha2` in the window where, with `alpha1 = alpha1*`, the spectrum at E5
/// is `{0, ±iω}`: the `λ²` coefficient vanishes while `a1 > 0`.
pub fn solve_fold_hopf(s1: f64, beta1: f64) -> Result<DegeneratePoint, StabilityError> {
    let candidates = locus_roots(s1, beta1, |c| c.a2)?;
    if candidates.is_empty() {
        return Err(StabilityError::NotFound(NotFoundReason::NoSignChange));
    }
    for a2 in candidates {
        let pt = degenerate_point(s1, beta1, a2)?;
        if pt.cubic.a1 > 1e-8 * pt.cubic.scale() {
            return Ok(pt);
        }
    }
    Err(StabilityError::NotFound(
        NotFoundReason::ImaginaryPairAbsent,
    ))
}

/// `alpha2` in the window where, with `alpha1 = alpha1*`, the spectrum at E5
/// is `{0, 0, -a2}`: the `λ` coefficient vanishes while `a2 != 0`.
pub fn solve_double_zero(s1: f64, beta1: f64) -> Result<DegeneratePoint, StabilityError> {
    let candidates = locus_roots(s1, beta1, |c| c.a1)?;
    if candidates.is_empty() {
        return Err(StabilityError::NotFound(NotFoundReason::NoSignChange));
    }
    for a2 in candidates {
        let pt = degenerate_point(s1, beta1, a2)?;
        if pt.cubic.a2.abs() > 1e-8 * pt.cubic.scale() {
            return Ok(pt);
        }
    }
    Err(StabilityError::NotFound(NotFoundReason::TripleZero))
}
