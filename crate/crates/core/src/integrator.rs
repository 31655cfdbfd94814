//! Time integration of the model: fixed-step RK4 and adaptive Dormand–Prince
//! 5(4), plus convergence detection and perturbation probes around
//! equilibria.

use rand::rngs::StdRng;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{vector_field, ModelError, ModelParams, State};

/// Components below this are clamped with a warning.
pub const CLAMP_WARN: f64 = -1e-12;

pub const DEFAULT_T_END: f64 = 2000.0;
pub const DEFAULT_RK4_DT: f64 = 1e-2;
pub const DEFAULT_RTOL: f64 = 1e-9;
pub const DEFAULT_ATOL: f64 = 1e-12;
pub const DEFAULT_DT_MIN: f64 = 1e-12;
pub const DEFAULT_DT_MAX: f64 = 10.0;
pub const DEFAULT_DIVERGENCE_BOUND: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegrationError {
    #[error("adaptive step {dt:e} fell below the minimum {dt_min:e} at t = {t}")]
    StepUnderflow { t: f64, dt: f64, dt_min: f64 },
    #[error("state became non-finite at t = {t}")]
    NonFiniteState { t: f64 },
    #[error("invalid integration options: {0}")]
    InvalidOptions(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Method {
    Rk4 {
        dt: f64,
    },
    Rk45 {
        rtol: f64,
        atol: f64,
        dt_min: f64,
        dt_max: f64,
    },
}

impl Method {
    pub fn rk4() -> Self {
        Self::Rk4 { dt: DEFAULT_RK4_DT }
    }

    pub fn rk45() -> Self {
        Self::Rk45 {
            rtol: DEFAULT_RTOL,
            atol: DEFAULT_ATOL,
            dt_min: DEFAULT_DT_MIN,
            dt_max: DEFAULT_DT_MAX,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrationOpts {
    pub method: Method,
    pub t_end: f64,
    /// Record every n-th accepted step; `None` uses 10 for RK4 and 1 for RK45.
    pub record_every: Option<usize>,
    /// Stop once `‖f(state)‖∞` drops below this value.
    pub stop_when_stationary: Option<f64>,
    /// Stop once `‖state‖∞` exceeds this value.
    pub divergence_bound: f64,
    /// Clamp states to the non-negative orthant after every step. Disabled only
    /// for probes that must cross an invariant plane.
    pub project_to_domain: bool,
}

impl Default for IntegrationOpts {
    fn default() -> Self {
        Self {
            method: Method::rk45(),
            t_end: DEFAULT_T_END,
            record_every: None,
            stop_when_stationary: None,
            divergence_bound: DEFAULT_DIVERGENCE_BOUND,
            project_to_domain: true,
        }
    }
}

impl IntegrationOpts {
    pub fn rk4(dt: f64, t_end: f64) -> Self {
        Self {
            method: Method::Rk4 { dt },
            t_end,
            ..Self::default()
        }
    }

    pub fn rk45(t_end: f64) -> Self {
        Self {
            t_end,
            ..Self::default()
        }
    }

    fn stride(&self) -> usize {
        self.record_every.unwrap_or(match self.method {
            Method::Rk4 { .. } => 10,
            Method::Rk45 { .. } => 1,
        })
    }

    pub fn validate(&self) -> Result<(), IntegrationError> {
        let bad = |msg: String| Err(IntegrationError::InvalidOptions(msg));
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return bad(format!("t_end must be positive, got {}", self.t_end));
        }
        if self.record_every == Some(0) {
            return bad("record_every must be at least 1".into());
        }
        if self.divergence_bound.is_nan() || self.divergence_bound <= 0.0 {
            return bad("divergence_bound must be positive".into());
        }
        match self.method {
            Method::Rk4 { dt } if !(dt > 0.0 && dt.is_finite()) => {
                bad(format!("dt must be positive, got {dt}"))
            }
            Method::Rk45 {
                rtol,
                atol,
                dt_min,
                dt_max,
            } if !(rtol > 0.0 && atol > 0.0 && dt_min > 0.0 && dt_max >= dt_min) => {
                bad("tolerances and step bounds must be positive with dt_min <= dt_max".into())
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    Horizon,
    Stationary,
    Diverged,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub method: Method,
    pub t_end: f64,
    pub termination: Termination,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    /// Steps after which some component fell below [`CLAMP_WARN`].
    pub clamp_events: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<State>,
    pub meta: TrajectoryMeta,
}

impl Trajectory {
    pub fn last(&self) -> State {
        *self
            .states
            .last()
            .expect("trajectory holds the initial state")
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

type V3 = [f64; 3];

fn axpy(y: &V3, h: f64, k: &V3) -> V3 {
    [y[0] + h * k[0], y[1] + h * k[1], y[2] + h * k[2]]
}

fn field(p: &ModelParams, y: &V3) -> V3 {
    vector_field(p, &State::from_array(*y))
}

/// Increment of one classical RK4 step.
fn rk4_increment(p: &ModelParams, y: &V3, h: f64) -> V3 {
    let k1 = field(p, y);
    let k2 = field(p, &axpy(y, 0.5 * h, &k1));
    let k3 = field(p, &axpy(y, 0.5 * h, &k2));
    let k4 = field(p, &axpy(y, h, &k3));
    std::array::from_fn(|i| h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
}

/// One classical RK4 step.
pub fn rk4_step(p: &ModelParams, y: &V3, h: f64) -> V3 {
    let d = rk4_increment(p, y, h);
    std::array::from_fn(|i| y[i] + d[i])
}

// Dormand–Prince 5(4) tableau. The system is autonomous, so stage times are unused.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Fifth-order minus embedded fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// One Dormand–Prince step from `y` with derivative `k1`. Returns the new
/// state, its derivative (first stage of the next step) and the error estimate.
fn dopri_step(p: &ModelParams, y: &V3, k1: &V3, h: f64) -> (V3, V3, V3) {
    let lin = |terms: &[(f64, &V3)]| {
        let mut out = *y;
        for (a, k) in terms {
            for i in 0..3 {
                out[i] += h * a * k[i];
            }
        }
        out
    };
    let k2 = field(p, &lin(&[(A21, k1)]));
    let k3 = field(p, &lin(&[(A31, k1), (A32, &k2)]));
    let k4 = field(p, &lin(&[(A41, k1), (A42, &k2), (A43, &k3)]));
    let k5 = field(p, &lin(&[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
    let k6 = field(
        p,
        &lin(&[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
    );
    let y5 = lin(&[(B1, k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
    let k7 = field(p, &y5);
    let mut err = [0.0; 3];
    for i in 0..3 {
        err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
    }
    (y5, k7, err)
}

/// Clamps small negative undershoot to zero. Returns true when some
/// component had fallen below [`CLAMP_WARN`].
fn project(y: &mut V3, t: f64) -> bool {
    let mut warned = false;
    for v in y.iter_mut() {
        if *v < 0.0 {
            if *v < CLAMP_WARN {
                log::warn!("component {v:e} below {CLAMP_WARN:e} at t = {t}; clamped to 0");
                warned = true;
            }
            *v = 0.0;
        }
    }
    warned
}

struct Recorder {
    times: Vec<f64>,
    states: Vec<State>,
    stride: usize,
    since: usize,
}

impl Recorder {
    fn new(t0: f64, y0: State, stride: usize) -> Self {
        Self {
            times: vec![t0],
            states: vec![y0],
            stride,
            since: 0,
        }
    }

    fn step(&mut self, t: f64, y: &V3, force: bool) {
        self.since += 1;
        if force || self.since >= self.stride {
            self.since = 0;
            self.times.push(t);
            self.states.push(State::from_array(*y));
        }
    }

    /// Makes sure the final state is recorded.
    fn finish(&mut self, t: f64, y: &V3) {
        if *self.times.last().unwrap() < t {
            self.times.push(t);
            self.states.push(State::from_array(*y));
        }
    }
}

fn norm_inf(v: &V3) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

/// Integrates from `init` at `t = 0` up to `opts.t_end` or an earlier
/// stationarity / divergence event.
pub fn integrate(
    p: &ModelParams,
    init: &State,
    opts: &IntegrationOpts,
) -> Result<Trajectory, IntegrationError> {
    opts.validate()?;
    if opts.project_to_domain && !init.in_domain() {
        return Err(ModelError::OutsideDomain(*init).into());
    }
    if !init.is_finite() {
        return Err(IntegrationError::NonFiniteState { t: 0.0 });
    }
    let mut rec = Recorder::new(0.0, *init, opts.stride());
    let mut y = init.to_array();
    let mut meta = TrajectoryMeta {
        method: opts.method,
        t_end: opts.t_end,
        termination: Termination::Horizon,
        accepted_steps: 0,
        rejected_steps: 0,
        clamp_events: 0,
    };

    // Returns Some(termination) when an event fires after an accepted step.
    let check = |y: &V3, t: f64| -> Result<Option<Termination>, IntegrationError> {
        if !y.iter().all(|v| v.is_finite()) {
            return Err(IntegrationError::NonFiniteState { t });
        }
        if norm_inf(y) > opts.divergence_bound {
            return Ok(Some(Termination::Diverged));
        }
        if let Some(tol) = opts.stop_when_stationary {
            if norm_inf(&field(p, y)) < tol {
                return Ok(Some(Termination::Stationary));
            }
        }
        Ok(None)
    };

    let t = match opts.method {
        Method::Rk4 { dt } => {
            let n = (opts.t_end / dt).ceil().max(1.0) as usize;
            let mut t = 0.0;
            // Compensated summation keeps accumulated rounding near one ulp,
            // below the truncation error even for small steps.
            let mut carry = [0.0; 3];
            for k in 1..=n {
                let t_next = if k == n { opts.t_end } else { k as f64 * dt };
                let d = rk4_increment(p, &y, t_next - t);
                for i in 0..3 {
                    let inc = d[i] - carry[i];
                    let sum = y[i] + inc;
                    carry[i] = (sum - y[i]) - inc;
                    y[i] = sum;
                }
                t = t_next;
                meta.accepted_steps += 1;
                if opts.project_to_domain && project(&mut y, t) {
                    meta.clamp_events += 1;
                    carry = [0.0; 3];
                }
                if let Some(term) = check(&y, t)? {
                    meta.termination = term;
                    break;
                }
                rec.step(t, &y, k == n);
            }
            t
        }
        Method::Rk45 {
            rtol,
            atol,
            dt_min,
            dt_max,
        } => {
            let mut t = 0.0;
            let mut k1 = field(p, &y);
            let mut h = initial_step(&y, &k1, rtol, atol).clamp(dt_min, dt_max);
            while t < opts.t_end {
                let last = t + h >= opts.t_end;
                let step = if last { opts.t_end - t } else { h };
                let (y_new, k_new, err) = dopri_step(p, &y, &k1, step);
                let mut e = 0.0f64;
                for i in 0..3 {
                    let sc = atol + rtol * y[i].abs().max(y_new[i].abs());
                    e = e.max(err[i].abs() / sc);
                }
                if !e.is_finite() {
                    e = f64::INFINITY;
                }
                if e <= 1.0 {
                    t = if last { opts.t_end } else { t + step };
                    y = y_new;
                    k1 = k_new;
                    meta.accepted_steps += 1;
                    if opts.project_to_domain && project(&mut y, t) {
                        meta.clamp_events += 1;
                        k1 = field(p, &y);
                    }
                    if let Some(term) = check(&y, t)? {
                        meta.termination = term;
                        break;
                    }
                    rec.step(t, &y, last);
                    let grow = if e == 0.0 {
                        5.0
                    } else {
                        (0.9 * e.powf(-0.2)).clamp(0.2, 5.0)
                    };
                    h = (step * grow).min(dt_max);
                } else {
                    meta.rejected_steps += 1;
                    h = step * (0.9 * e.powf(-0.2)).clamp(0.1, 1.0);
                    if h < dt_min {
                        return Err(IntegrationError::StepUnderflow { t, dt: h, dt_min });
                    }
                }
            }
            t
        }
    };
    rec.finish(t, &y);
    Ok(Trajectory {
        times: rec.times,
        states: rec.states,
        meta,
    })
}

fn initial_step(y: &V3, f: &V3, rtol: f64, atol: f64) -> f64 {
    let mut d0 = 0.0f64;
    let mut d1 = 0.0f64;
    for i in 0..3 {
        let sc = atol + rtol * y[i].abs();
        d0 = d0.max(y[i].abs() / sc);
        d1 = d1.max(f[i].abs() / sc);
    }
    if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Convergence {
    pub converged: bool,
    /// First sample time after which the trajectory never leaves the ball.
    pub time: Option<f64>,
}

/// Convergence iff every sample in the trailing 10% of the time span lies
/// within `tol` of `target` in the max norm.
pub fn detect_convergence(t: &Trajectory, target: &State, tol: f64) -> Convergence {
    let n = t.times.len();
    if n == 0 {
        return Convergence {
            converged: false,
            time: None,
        };
    }
    let inside: Vec<bool> = t.states.iter().map(|s| s.dist_inf(target) < tol).collect();
    let (t0, t1) = (t.times[0], t.times[n - 1]);
    let cutoff = t1 - 0.1 * (t1 - t0);
    let converged = t
        .times
        .iter()
        .zip(&inside)
        .filter(|(time, _)| **time >= cutoff)
        .all(|(_, ok)| *ok);
    let entry = inside.iter().rposition(|ok| !ok).map_or(0, |i| i + 1);
    Convergence {
        converged,
        time: (entry < n).then(|| t.times[entry]),
    }
}

/// Tolerance used by [`basin_probe`] to decide that a start returned.
pub const BASIN_TOL: f64 = 1e-6;

/// Fraction of `n_samples` starts, uniform on the sphere of `radius` around
/// `eq` and clamped to the orthant, that converge back within `t_end`.
pub fn basin_probe(
    p: &ModelParams,
    eq: &State,
    radius: f64,
    n_samples: usize,
    t_end: f64,
    seed: u64,
) -> Result<f64, IntegrationError> {
    if n_samples == 0 {
        return Ok(1.0);
    }
    let mut rng = StdRng::seed_from_u64(seed);
    let opts = IntegrationOpts::rk45(t_end);
    let mut returned = 0usize;
    for _ in 0..n_samples {
        let mut dir: V3 = std::array::from_fn(|_| StandardNormal.sample(&mut rng));
        let len = norm2(&dir);
        if len > 0.0 {
            dir.iter_mut().for_each(|v| *v /= len);
        }
        let mut start = axpy(&eq.to_array(), radius, &dir);
        start.iter_mut().for_each(|v| *v = v.max(0.0));
        let traj = integrate(p, &State::from_array(start), &opts)?;
        if traj.meta.termination == Termination::Horizon
            && detect_convergence(&traj, eq, BASIN_TOL).converged
        {
            returned += 1;
        }
    }
    Ok(returned as f64 / n_samples as f64)
}

fn norm2(v: &V3) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Outcome of pushing an equilibrium along `±direction`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SideProbe {
    pub plus_final_distance: f64,
    pub minus_final_distance: f64,
    /// Exactly one side ends closer than it started.
    pub one_sided: bool,
}

/// Integrates from `eq ± eps·direction` (unit-normalised) without clamping to
/// the orthant, so both sides of an invariant plane can be probed. A
/// saddle-node attracts along one side of its center direction and repels
/// along the other.
pub fn side_probe(
    p: &ModelParams,
    eq: &State,
    direction: [f64; 3],
    eps: f64,
    t_end: f64,
) -> Result<SideProbe, IntegrationError> {
    let len = norm2(&direction);
    let unit = direction.map(|v| v / len);
    let start_dist = eps * norm_inf(&unit);
    let opts = IntegrationOpts {
        project_to_domain: false,
        ..IntegrationOpts::rk45(t_end)
    };
    let run = |sign: f64| -> Result<f64, IntegrationError> {
        let start = State::from_array(axpy(&eq.to_array(), sign * eps, &unit));
        let traj = integrate(p, &start, &opts)?;
        Ok(traj.last().dist_inf(eq))
    };
    let plus = run(1.0)?;
    let minus = run(-1.0)?;
    Ok(SideProbe {
        plus_final_distance: plus,
        minus_final_distance: minus,
        one_sided: (plus < start_dist) != (minus < start_dist),
    })
}
