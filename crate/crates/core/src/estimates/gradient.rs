//! The explicit interior gradient estimate for maps into a geodesic ball.

use serde::{Deserialize, Serialize};

use super::{dphi_norm_sq, energy_density, AuditReport, EstimateConstants, Location, C_SLACK};
use crate::clifford::SpinorField;
use crate::error::{LabError, Result};
use crate::grid::{torus_distance, ScalarField};
use crate::sphere::{el_residuals, MapField};

/// Largest admissible domain radius: keeps `B_a(x0)` away from the cut
/// locus of the torus distance.
pub const MAX_DOMAIN_RADIUS: f64 = 0.45;

/// Points with `r > CHECK_FRACTION * a` are not checked (the bound blows up
/// at the ball boundary).
pub const CHECK_FRACTION: f64 = 0.9;

/// Missing keys take the values of [`GradientEstimateConfig::around_pole`]
/// for `S^2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GradientEstimateConfig {
    /// Center of the target ball, a unit vector.
    pub y0: Vec<f64>,
    /// Radius `R` of the target ball `B_R(y0)`.
    #[serde(alias = "R")]
    pub target_radius: f64,
    pub d1: f64,
    pub x0: (f64, f64),
    /// Radius `a` of the domain ball.
    pub a: f64,
}

impl Default for GradientEstimateConfig {
    fn default() -> Self {
        Self::around_pole(3)
    }
}

impl GradientEstimateConfig {
    /// Target ball around `e_q` of radius 0.45, domain ball of radius 0.4
    /// around the torus center, `d1 = 10`.
    pub fn around_pole(q: usize) -> Self {
        let mut y0 = vec![0.0; q];
        if q > 0 {
            y0[q - 1] = 1.0;
        }
        Self {
            y0,
            target_radius: 0.45,
            d1: 10.0,
            x0: (0.5, 0.5),
            a: 0.4,
        }
    }

    /// Checks the shape constraints and feasibility; returns `d_tilde`.
    pub fn validate(&self, q: usize, constants: &EstimateConstants) -> Result<f64> {
        if self.y0.len() != q {
            return Err(LabError::Mismatch(format!(
                "y0 has {} components, target has {q}",
                self.y0.len()
            )));
        }
        let norm = self.y0.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !((norm - 1.0).abs() <= 1e-12) {
            return Err(LabError::InvalidConstants(format!("|y0| = {norm} must be 1")));
        }
        if !(self.d1 > 0.0 && self.d1.is_finite()) {
            return Err(LabError::InvalidConstants(format!("d1 = {} must be > 0", self.d1)));
        }
        if !(self.a > 0.0 && self.a <= MAX_DOMAIN_RADIUS) {
            return Err(LabError::InvalidRegion(format!(
                "domain radius a = {} must lie in (0, {MAX_DOMAIN_RADIUS}]",
                self.a
            )));
        }
        let r_max = std::f64::consts::FRAC_PI_2 / self.d1.sqrt();
        if !(self.target_radius > 0.0 && self.target_radius < r_max) {
            return Err(LabError::InvalidConstants(format!(
                "R = {} must lie in (0, pi/(2 sqrt d1) = {r_max})",
                self.target_radius
            )));
        }
        let dtilde = constants.dtilde(self.d1);
        if !(dtilde > 0.0) {
            return Err(LabError::Infeasible { dtilde });
        }
        Ok(dtilde)
    }
}

/// Per-point data on `B_a(x0)`.
struct BallPoint {
    k: usize,
    x: f64,
    y: f64,
    r: f64,
    xi: f64,
}

/// Validates and collects the points of `B_a(x0)` with `xi(phi)`, checking
/// the range condition `arccos <phi, y0> < R`.
fn ball_points(phi: &MapField, cfg: &GradientEstimateConfig) -> Result<Vec<BallPoint>> {
    let sd = cfg.d1.sqrt();
    let mut out = Vec::new();
    for (k, x, y) in phi.grid().points() {
        let r = torus_distance(cfg.x0, (x, y));
        if r >= cfg.a {
            continue;
        }
        let c: f64 = phi.at(k).iter().zip(&cfg.y0).map(|(a, b)| a * b).sum();
        let rho = c.clamp(-1.0, 1.0).acos();
        if !(rho < cfg.target_radius) {
            return Err(LabError::RangeViolation {
                distance: rho,
                radius: cfg.target_radius,
                x,
                y,
            });
        }
        out.push(BallPoint {
            k,
            x,
            y,
            r,
            xi: sd * (sd * rho).cos(),
        });
    }
    Ok(out)
}

/// Pointwise check of
/// `|d phi| <= 4 r d1 / (d_tilde (a^2 - r^2) xi) + sqrt((L1 + L2 |psi|^4) / d_tilde)`
/// on `B_{0.9 a}(x0)`, with slack `C_SLACK (residual + h)(1 + sup |d phi|)`.
pub fn gradient_estimate_audit(
    phi: &MapField,
    psi: &SpinorField,
    cfg: &GradientEstimateConfig,
    constants: &EstimateConstants,
) -> Result<AuditReport> {
    phi.check_spinor(psi)?;
    let dtilde = cfg.validate(phi.q(), constants)?;
    let pts = ball_points(phi, cfg)?;
    let g = *phi.grid();
    let residual = el_residuals(phi, psi)?.linf;
    let dphi = dphi_norm_sq(phi).map(f64::sqrt);
    let psi2 = psi.norm_sq();
    let a2 = cfg.a * cfg.a;
    let mut margins = ScalarField::zeros(g, 1);
    margins.data_mut().fill(f64::NAN);
    let (mut worst, mut loc) = (f64::INFINITY, Location::Nowhere {});
    let mut sup_dphi: f64 = 0.0;
    let mut min_xi = f64::INFINITY;
    let mut checked = 0usize;
    for p in pts.iter().filter(|p| p.r <= CHECK_FRACTION * cfg.a) {
        let lhs = dphi.value(p.k);
        let s4 = psi2.value(p.k).powi(2);
        let l1 = constants.l1(p.r, cfg.a);
        let l2 = constants.l2(cfg.d1, p.xi);
        let rhs = 4.0 * p.r * cfg.d1 / (dtilde * (a2 - p.r * p.r) * p.xi) + ((l1 + l2 * s4) / dtilde).sqrt();
        let m = rhs - lhs;
        margins.at_mut(p.k)[0] = m;
        if m < worst {
            worst = m;
            loc = Location::Point { x: p.x, y: p.y };
        }
        sup_dphi = sup_dphi.max(lhs);
        min_xi = min_xi.min(p.xi);
        checked += 1;
    }
    let tol = C_SLACK * (residual + g.h()) * (1.0 + sup_dphi);
    let mut r = AuditReport::new("gradient-estimate", worst, loc, tol)
        .with_metric("dtilde", dtilde)
        .with_metric("d1", cfg.d1)
        .with_metric("checked_points", checked as f64)
        .with_metric("min_xi", min_xi)
        .with_metric("residual_linf", residual)
        .with_metric("c_l", super::C_L);
    r.margins = Some(margins);
    Ok(r)
}

/// Location and value of the maximum of `F = (a^2 - r^2) e^p / xi` on
/// `B_a(x0)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MaximizerReport {
    /// `None` when `F` vanishes identically.
    pub point: Option<(f64, f64)>,
    pub value: f64,
    pub r: f64,
    /// The argmax lies in `r <= 0.9 a`.
    pub interior: bool,
    pub degenerate: bool,
    /// Largest `F` on the outermost ring `r > a - h`.
    pub edge_value: f64,
}

pub fn maximizer_diagnostic(
    phi: &MapField,
    psi: &SpinorField,
    cfg: &GradientEstimateConfig,
    constants: &EstimateConstants,
) -> Result<MaximizerReport> {
    phi.check_spinor(psi)?;
    cfg.validate(phi.q(), constants)?;
    let pts = ball_points(phi, cfg)?;
    let e = energy_density(phi, psi);
    let h = phi.grid().h();
    let a2 = cfg.a * cfg.a;
    let mut best: Option<(&BallPoint, f64)> = None;
    let mut edge_value: f64 = 0.0;
    for p in &pts {
        let f = (a2 - p.r * p.r) * e.value(p.k).powf(constants.p) / p.xi;
        if p.r > cfg.a - h {
            edge_value = edge_value.max(f);
        }
        if best.is_none_or(|(_, v)| f > v) {
            best = Some((p, f));
        }
    }
    Ok(match best {
        Some((p, v)) if v > 0.0 => MaximizerReport {
            point: Some((p.x, p.y)),
            value: v,
            r: p.r,
            interior: p.r <= CHECK_FRACTION * cfg.a,
            degenerate: false,
            edge_value,
        },
        _ => MaximizerReport {
            point: None,
            value: 0.0,
            r: 0.0,
            interior: false,
            degenerate: true,
            edge_value,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimates::EstimateInputs;
    use crate::grid::Grid2D;
    use crate::solver::{seed, SeedKind};

    fn cap(n: usize) -> (MapField, SpinorField) {
        seed(&SeedKind::Cap { k: 1, epsilon: 0.1 }, Grid2D::new(n).unwrap(), 3, 0).unwrap()
    }

    #[test]
    fn constant_map_passes() {
        let c = EstimateConstants::sphere();
        let (phi, psi) = seed(&SeedKind::Constant, Grid2D::new(32).unwrap(), 3, 0).unwrap();
        let cfg = GradientEstimateConfig::around_pole(3);
        let r = gradient_estimate_audit(&phi, &psi, &cfg, &c).unwrap();
        assert!(r.pass && r.worst_margin > 0.0);
        let m = maximizer_diagnostic(&phi, &psi, &cfg, &c).unwrap();
        assert!(m.degenerate && m.point.is_none());
    }

    #[test]
    fn cap_family_passes_with_defaults() {
        let c = EstimateConstants::sphere();
        let cfg = GradientEstimateConfig::around_pole(3);
        for n in [32, 64] {
            let (phi, psi) = cap(n);
            let r = gradient_estimate_audit(&phi, &psi, &cfg, &c).unwrap();
            assert!(r.pass && r.worst_margin > 0.0, "{}", r.worst_margin);
            assert!(r.metrics["min_xi"] > 0.0 && r.metrics["min_xi"] <= cfg.d1.sqrt());
            assert!(r.metrics["checked_points"] > 0.0);
        }
    }

    #[test]
    fn infeasible_d1_is_structured() {
        let c = EstimateConstants::sphere();
        let (phi, psi) = cap(32);
        let mut cfg = GradientEstimateConfig::around_pole(3);
        cfg.d1 = 7.0;
        cfg.target_radius = 0.3;
        match gradient_estimate_audit(&phi, &psi, &cfg, &c) {
            Err(LabError::Infeasible { dtilde }) => assert!((dtilde + 0.75).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn range_violation_is_reported() {
        let c = EstimateConstants::sphere();
        let (phi, psi) = seed(&SeedKind::Geodesic { k: 1 }, Grid2D::new(32).unwrap(), 3, 0).unwrap();
        let cfg = GradientEstimateConfig::around_pole(3);
        assert!(matches!(
            gradient_estimate_audit(&phi, &psi, &cfg, &c),
            Err(LabError::RangeViolation { .. })
        ));
    }

    #[test]
    fn config_guards() {
        let c = EstimateConstants::sphere();
        let mut cfg = GradientEstimateConfig::around_pole(3);
        cfg.a = 0.47;
        assert!(cfg.validate(3, &c).is_err());
        let mut cfg = GradientEstimateConfig::around_pole(3);
        cfg.target_radius = 0.6;
        assert!(cfg.validate(3, &c).is_err());
        let mut cfg = GradientEstimateConfig::around_pole(3);
        cfg.y0 = vec![0.0, 0.0, 2.0];
        assert!(cfg.validate(3, &c).is_err());
        assert!(GradientEstimateConfig::around_pole(4).validate(3, &c).is_err());
    }

    #[test]
    fn larger_d1_keeps_passing() {
        let c = EstimateConstants::sphere();
        let (phi, psi) = cap(32);
        for d1 in [8.0, 9.0, 10.0, 11.0, 12.0] {
            let cfg = GradientEstimateConfig {
                d1,
                target_radius: 0.3,
                ..GradientEstimateConfig::around_pole(3)
            };
            let r = gradient_estimate_audit(&phi, &psi, &cfg, &c).unwrap();
            assert!(r.pass, "d1 = {d1}");
        }
    }

    #[test]
    fn coupled_pair_in_a_cap() {
        let c = EstimateConstants::new(EstimateInputs::sphere()).unwrap();
        let g = Grid2D::new(32).unwrap();
        let kind = SeedKind::RandomSmooth {
            bandwidth: 2,
            amplitude: 0.1,
            spinor_amplitude: 0.3,
        };
        let (phi, psi) = seed(&kind, g, 3, 5).unwrap();
        let cfg = GradientEstimateConfig::around_pole(3);
        let r = gradient_estimate_audit(&phi, &psi, &cfg, &c).unwrap();
        assert!(r.worst_margin.is_finite());
    }

    #[test]
    fn maximizer_on_cap_is_interior() {
        let c = EstimateConstants::sphere();
        let cfg = GradientEstimateConfig::around_pole(3);
        let (phi, psi) = cap(64);
        let m = maximizer_diagnostic(&phi, &psi, &cfg, &c).unwrap();
        assert!(!m.degenerate && m.interior);
        let h = phi.grid().h();
        // (a^2 - r^2) <= 2 a h on the outer ring
        assert!(m.edge_value <= m.value * 2.0 * h / cfg.a * 1.05);
    }
}
