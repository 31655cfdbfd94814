//! The `analyze` report: every boundary and internal equilibrium with its
//! spectrum, verdict and condition table, plus the degenerate-spectrum data
//! when the parameters sit on the constrained family.

use serde::Serialize;

use crate::equilibria::{
    boundary_equilibria, discriminant, double_root_alpha2, internal_equilibria_constrained,
    internal_equilibria_general, Condition, ConstrainedFamily, Equilibrium, EquilibriumLabel,
    Source,
};
use crate::integrator::{side_probe, SideProbe};
use crate::model::{jacobian, ModelParams, State};
use crate::stability::{
    alpha1_star, alpha2_star_window, center_direction, classify, degenerate_structure,
    Classification, DegenerateStructure, SpectrumReport,
};

/// Offset and horizon scale of the saddle-node side probe.
const PROBE_EPS: f64 = 1e-3;
const PROBE_HORIZON: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumEntry {
    pub label: EquilibriumLabel,
    pub point: Option<State>,
    pub feasible: bool,
    pub existence_conditions: Vec<Condition>,
    pub source: Option<Source>,
    /// Why the point could not be computed.
    pub error: Option<String>,
    pub stability: Option<SpectrumReport>,
    pub stability_error: Option<String>,
    /// Trajectory check along the center direction of a saddle-node.
    pub saddle_node_probe: Option<SideProbe>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyReport {
    pub discriminant: f64,
    /// `alpha2` at which the internal equilibria merge.
    pub double_root_alpha2: f64,
    pub alpha1_star: Option<f64>,
    pub alpha2_window: Option<(f64, f64)>,
    pub degenerate_structure: Option<DegenerateStructure>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub params: ModelParams,
    pub equilibria: Vec<EquilibriumEntry>,
    pub constrained_family: Option<FamilyReport>,
}

fn entry(p: &ModelParams, e: &Equilibrium) -> EquilibriumEntry {
    let (stability, stability_error) = match classify(p, e) {
        Ok(r) => (Some(r), None),
        Err(err) => (None, Some(err.to_string())),
    };
    let saddle_node_probe = stability
        .as_ref()
        .filter(|r| r.classification == Classification::SaddleNodeCodim1)
        .and_then(|r| {
            let dir = center_direction(&jacobian(p, &e.point))?;
            let g = r.saddle_node.map_or(1.0, |c| c.g200.abs().max(1e-12));
            side_probe(p, &e.point, dir, PROBE_EPS, PROBE_HORIZON / (g * PROBE_EPS)).ok()
        });
    EquilibriumEntry {
        label: e.label,
        point: Some(e.point),
        feasible: e.feasible,
        existence_conditions: e.existence_conditions.clone(),
        source: Some(e.source),
        error: None,
        stability,
        stability_error,
        saddle_node_probe,
    }
}

pub fn analyze(p: &ModelParams) -> AnalysisReport {
    let b = boundary_equilibria(p);
    let mut equilibria: Vec<EquilibriumEntry> = [&b.e1, &b.e2, &b.e3]
        .into_iter()
        .map(|e| entry(p, e))
        .collect();
    equilibria.push(match &b.e4 {
        Ok(e) => entry(p, e),
        Err(err) => EquilibriumEntry {
            label: EquilibriumLabel::E4,
            point: None,
            feasible: false,
            existence_conditions: vec![],
            source: None,
            error: Some(err.to_string()),
            stability: None,
            stability_error: None,
            saddle_node_probe: None,
        },
    });

    let family = ConstrainedFamily::from_params(p).filter(|f| f.validate().is_ok());
    let internal = match &family {
        Some(f) => internal_equilibria_constrained(f).unwrap_or_default(),
        None => internal_equilibria_general(p, 1.0),
    };
    equilibria.extend(internal.iter().map(|e| entry(p, e)));

    let constrained_family = family.map(|f| {
        let a1 = alpha1_star(f.s1, f.beta1, f.alpha2).ok();
        FamilyReport {
            discriminant: discriminant(&f),
            double_root_alpha2: double_root_alpha2(f.s1, f.beta1, f.alpha1),
            alpha1_star: a1,
            alpha2_window: alpha2_star_window(f.s1, f.beta1).ok(),
            degenerate_structure: Some(degenerate_structure(f.s1, f.beta1, f.alpha2, f.alpha1)),
        }
    });

    AnalysisReport {
        params: *p,
        equilibria,
        constrained_family,
    }
}
