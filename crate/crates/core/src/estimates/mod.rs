//! Numerical audits of the pointwise identities and a-priori estimates
//! satisfied by solutions of the coupled system.
//!
//! Every inequality audit reports a signed margin (slack) per checked point;
//! an audit passes when the worst margin is at least `-tolerance`.

mod constants;
mod feasibility;
mod gradient;
mod hopf;
mod pointwise;
mod scaling;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::clifford::SpinorField;
use crate::grid::{derivative, integrate, Axis, DiscRegion, Region, ScalarField};
use crate::sphere::MapField;

pub use constants::{EstimateConstants, EstimateInputs, C_L, C_SLACK};
pub use feasibility::{feasibility_scan, FeasibilityReport, FeasibilityScan, FeasibleTuple, LinRange};
pub use gradient::{
    gradient_estimate_audit, maximizer_diagnostic, GradientEstimateConfig, MaximizerReport, CHECK_FRACTION,
    MAX_DOMAIN_RADIUS,
};
pub use hopf::{hopf_audit, hopf_differential, polar_identity_audit, HopfReport, PolarRow};
pub use pointwise::{bochner_audit, coupling_bound_ratio, kato_audit};
pub use scaling::{epsilon_regularity_probe, EpsRegEntry, EpsRegReport};

/// Where the worst margin of an audit was attained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Location {
    Point { x: f64, y: f64 },
    Radius { r: f64 },
    Nowhere {},
}

/// Per-row numeric table attached to an audit (written as CSV).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditReport {
    pub name: String,
    pub pass: bool,
    pub worst_margin: f64,
    pub location: Location,
    pub tolerance: f64,
    /// Auxiliary numbers (defects, scales, counts) for the record.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub metrics: BTreeMap<String, f64>,
    /// Pointwise margin field, when the audit is pointwise.
    #[serde(skip)]
    pub margins: Option<ScalarField>,
    /// Per-radius or per-sample data.
    #[serde(skip)]
    pub table: Option<Table>,
}

impl AuditReport {
    pub fn new(name: &str, worst_margin: f64, location: Location, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            pass: worst_margin >= -tolerance,
            worst_margin,
            location,
            tolerance,
            metrics: BTreeMap::new(),
            margins: None,
            table: None,
        }
    }

    pub fn with_metric(mut self, key: &str, value: f64) -> Self {
        self.metrics.insert(key.to_string(), value);
        self
    }
}

/// Smallest entry of a margin field with its grid location; points where
/// the field is NaN (not checked) are ignored.
pub(crate) fn worst_of(margins: &ScalarField) -> (f64, Location) {
    let g = margins.grid();
    let mut worst = f64::INFINITY;
    let mut loc = Location::Nowhere {};
    for (k, x, y) in g.points() {
        let m = margins.value(k);
        if m < worst {
            worst = m;
            loc = Location::Point { x, y };
        }
    }
    (worst, loc)
}

/// `|d phi|^2` with centered differences.
pub fn dphi_norm_sq(phi: &MapField) -> ScalarField {
    let g = *phi.grid();
    let dx = derivative(phi.field(), Axis::X);
    let dy = derivative(phi.field(), Axis::Y);
    let mut out = ScalarField::zeros(g, 1);
    for k in 0..g.len() {
        out.at_mut(k)[0] = dx.at(k).iter().chain(dy.at(k)).map(|v| v * v).sum();
    }
    out
}

/// `e(phi, psi) = 1/2 (|d phi|^2 + |psi|^4)`.
pub fn energy_density(phi: &MapField, psi: &SpinorField) -> ScalarField {
    let d = dphi_norm_sq(phi);
    let p = psi.norm_sq();
    let mut out = d.clone();
    for k in 0..phi.grid().len() {
        out.at_mut(k)[0] = 0.5 * (d.value(k) + p.value(k) * p.value(k));
    }
    out
}

/// `E(phi, psi, U) = int_U (|d phi|^2 + |psi|^4)`.
pub fn local_energy(phi: &MapField, psi: &SpinorField, region: &DiscRegion) -> f64 {
    let e = energy_density(phi, psi);
    2.0 * integrate(&e, Region::Disc(*region))
}
