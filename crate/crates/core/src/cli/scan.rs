//! Parameter scans: classify one equilibrium over a 1-D or 2-D grid and list
//! the grid edges where the verdict changes.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::equilibria::{boundary_equilibria, predator1_only, predator2_only, EquilibriumLabel};
use crate::model::ModelParams;
use crate::stability::classify;

/// Environment variable capping the scan worker count.
pub const THREADS_ENV: &str = "ALLEEDYN_THREADS";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScanError {
    #[error("invalid range: {0}")]
    InvalidRange(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Axis {
    pub param: String,
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Axis {
    /// Parses `name,lo,hi,n`.
    pub fn parse(spec: &str) -> Result<Self, ScanError> {
        let bad = || ScanError::InvalidRange(format!("expected `name,lo,hi,n`, got `{spec}`"));
        let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
        let [name, lo, hi, n] = parts[..] else {
            return Err(bad());
        };
        Ok(Self {
            param: name.to_string(),
            lo: lo.parse().map_err(|_| bad())?,
            hi: hi.parse().map_err(|_| bad())?,
            n: n.parse().map_err(|_| bad())?,
        })
    }

    pub fn value(&self, i: usize) -> f64 {
        if self.n == 1 {
            self.lo
        } else {
            self.lo + (self.hi - self.lo) * i as f64 / (self.n - 1) as f64
        }
    }

    fn check(&self, base: &ModelParams) -> Result<(), ScanError> {
        let err = |m: String| Err(ScanError::InvalidRange(m));
        if base.with(&self.param, 1.0).is_none() {
            return err(format!("unknown parameter `{}`", self.param));
        }
        if self.n == 0 {
            return err(format!("axis `{}` needs at least one point", self.param));
        }
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo <= self.hi) {
            return err(format!("axis `{}` needs finite lo <= hi", self.param));
        }
        for v in [self.lo, self.hi] {
            let p = base.with(&self.param, v).expect("name checked");
            if let Err(e) = p.validate() {
                return err(format!("`{}` = {v}: {e}", self.param));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanPoint {
    pub values: Vec<f64>,
    pub label: String,
}

/// A grid edge whose two ends carry different labels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Boundary {
    pub param: String,
    pub from_value: f64,
    pub to_value: f64,
    pub from_label: String,
    pub to_label: String,
    /// The other axis and its value, for 2-D scans.
    pub fixed: Option<(String, f64)>,
}

impl Boundary {
    pub fn brackets(&self, param: &str, v: f64) -> bool {
        self.param == param
            && self.from_value.min(self.to_value) <= v
            && v <= self.from_value.max(self.to_value)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub equilibrium: EquilibriumLabel,
    pub axes: Vec<Axis>,
    /// Row-major: the last axis varies fastest.
    pub points: Vec<ScanPoint>,
    pub boundaries: Vec<Boundary>,
}

/// Verdict label of `which` under `p`.
pub fn label_at(p: &ModelParams, which: EquilibriumLabel) -> String {
    let e = match which {
        EquilibriumLabel::E1 | EquilibriumLabel::E2 => {
            let b = boundary_equilibria(p);
            if which == EquilibriumLabel::E1 {
                b.e1
            } else {
                b.e2
            }
        }
        EquilibriumLabel::E3 => predator2_only(p),
        EquilibriumLabel::E4 => match predator1_only(p) {
            Ok(e) => e,
            Err(_) => return "Undefined".into(),
        },
        _ => return "Unsupported".into(),
    };
    match classify(p, &e) {
        Ok(r) => r.classification.to_string(),
        Err(_) => "NotAnEquilibrium".into(),
    }
}

/// Worker count from [`THREADS_ENV`], if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()?
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
}

pub fn scan(
    base: &ModelParams,
    axes: &[Axis],
    which: EquilibriumLabel,
) -> Result<ScanReport, ScanError> {
    if axes.is_empty() || axes.len() > 2 {
        return Err(ScanError::InvalidRange("give one or two axes".into()));
    }
    if axes.len() == 2 && axes[0].param == axes[1].param {
        return Err(ScanError::InvalidRange("the two axes must differ".into()));
    }
    if !matches!(
        which,
        EquilibriumLabel::E1 | EquilibriumLabel::E2 | EquilibriumLabel::E3 | EquilibriumLabel::E4
    ) {
        return Err(ScanError::InvalidRange(format!(
            "scans support E1-E4, got {which:?}"
        )));
    }
    for a in axes {
        a.check(base)?;
    }
    let n1 = axes.get(1).map_or(1, |a| a.n);
    let total = axes[0].n * n1;
    let point = |k: usize| {
        let idx = [k / n1, k % n1];
        let values: Vec<f64> = axes.iter().zip(idx).map(|(a, i)| a.value(i)).collect();
        let mut p = *base;
        for (a, v) in axes.iter().zip(&values) {
            p = p.with(&a.param, *v).expect("checked");
        }
        ScanPoint {
            values,
            label: label_at(&p, which),
        }
    };
    let compute = || (0..total).into_par_iter().map(point).collect::<Vec<_>>();
    let points = match thread_cap() {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(compute))
            .unwrap_or_else(|_| (0..total).map(point).collect()),
        None => compute(),
    };

    let mut boundaries = Vec::new();
    let at = |i: usize, j: usize| &points[i * n1 + j];
    for j in 0..n1 {
        for i in 1..axes[0].n {
            let (a, b) = (at(i - 1, j), at(i, j));
            if a.label != b.label {
                boundaries.push(Boundary {
                    param: axes[0].param.clone(),
                    from_value: a.values[0],
                    to_value: b.values[0],
                    from_label: a.label.clone(),
                    to_label: b.label.clone(),
                    fixed: axes.get(1).map(|ax| (ax.param.clone(), a.values[1])),
                });
            }
        }
    }
    if let Some(ax1) = axes.get(1) {
        for i in 0..axes[0].n {
            for j in 1..n1 {
                let (a, b) = (at(i, j - 1), at(i, j));
                if a.label != b.label {
                    boundaries.push(Boundary {
                        param: ax1.param.clone(),
                        from_value: a.values[1],
                        to_value: b.values[1],
                        from_label: a.label.clone(),
                        to_label: b.label.clone(),
                        fixed: Some((axes[0].param.clone(), a.values[0])),
                    });
                }
            }
        }
    }
    Ok(ScanReport {
        equilibrium: which,
        axes: axes.to_vec(),
        points,
        boundaries,
    })
}

/// `param1[,param2],label` rows in grid order.
pub fn scan_csv(r: &ScanReport) -> String {
    let mut out: Vec<String> = r.axes.iter().map(|a| a.param.clone()).collect();
    out.push("label".into());
    let mut text = out.join(",") + "\n";
    for p in &r.points {
        let mut row: Vec<String> = p.values.iter().map(|v| format!("{v:?}")).collect();
        row.push(p.label.clone());
        text += &(row.join(",") + "\n");
    }
    text
}

/// `param,from_value,to_value,from_label,to_label,fixed_param,fixed_value`.
pub fn boundaries_csv(r: &ScanReport) -> String {
    let mut text =
        String::from("param,from_value,to_value,from_label,to_label,fixed_param,fixed_value\n");
    for b in &r.boundaries {
        let (fp, fv) = b
            .fixed
            .as_ref()
            .map_or((String::new(), String::new()), |(n, v)| {
                (n.clone(), format!("{v:?}"))
            });
        text += &format!(
            "{},{:?},{:?},{},{},{fp},{fv}\n",
            b.param, b.from_value, b.to_value, b.from_label, b.to_label
        );
    }
    text
}
