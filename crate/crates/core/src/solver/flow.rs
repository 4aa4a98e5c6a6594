//! Explicit constrained gradient flow for the coupled system.
//!
//! Map update: `phi' = retract(phi + dt_map * map_residual)`. The map
//! residual is the negative `L^2` gradient of the energy, so this is plain
//! descent on `E` in `phi`.
//!
//! Spinor update: `psi' = P_phi'(psi - dt_spinor * J)`, where
//! `J = D r - 1/3 P dS_psi[r]` is the `L^2` gradient of `1/2 |r|^2` for the
//! spinor residual `r = D psi - 1/3 S(psi)`. The energy is strongly
//! indefinite in `psi`, so the spinor equation is driven to zero by residual
//! minimization rather than by descent on `E`.

use serde::Serialize;

use crate::clifford::{twisted_dirac, SpinorField};
use crate::error::{LabError, Result};
use crate::sphere::{
    curvature_cubic_derivative, el_residuals, energy, project_spinor, tangency_defect, MapField,
    ResidualPair,
};

/// Step sizes and stopping rule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FlowConfig {
    pub step_map: f64,
    pub step_spinor: f64,
    pub max_iters: usize,
    pub residual_tol: f64,
}

impl FlowConfig {
    /// Largest admissible map step, `h^2 / 8`.
    pub fn map_step_bound(h: f64) -> f64 {
        h * h / 8.0
    }

    /// Largest admissible spinor step, `h^2 / 4`.
    pub fn spinor_step_bound(h: f64) -> f64 {
        h * h / 4.0
    }

    /// Steps at their bounds for spacing `h`.
    pub fn at_bounds(h: f64, max_iters: usize, residual_tol: f64) -> Self {
        Self {
            step_map: Self::map_step_bound(h),
            step_spinor: Self::spinor_step_bound(h),
            max_iters,
            residual_tol,
        }
    }

    pub fn validate(&self, h: f64) -> Result<()> {
        let map_bound = Self::map_step_bound(h);
        let spinor_bound = Self::spinor_step_bound(h);
        if !(self.step_map > 0.0 && self.step_map <= map_bound * (1.0 + 1e-12)) {
            return Err(LabError::InvalidFlow(format!(
                "step_map = {} must lie in (0, h^2/8 = {map_bound}]",
                self.step_map
            )));
        }
        if !(self.step_spinor > 0.0 && self.step_spinor <= spinor_bound * (1.0 + 1e-12)) {
            return Err(LabError::InvalidFlow(format!(
                "step_spinor = {} must lie in (0, h^2/4 = {spinor_bound}]",
                self.step_spinor
            )));
        }
        if !(self.residual_tol > 0.0) {
            return Err(LabError::InvalidFlow("residual_tol must be > 0".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TraceRecord {
    pub iter: usize,
    pub energy: f64,
    pub res_map: f64,
    pub res_spinor: f64,
    /// Larger of the sphere defect of `phi` and the tangency defect of `psi`.
    pub defect: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct FlowTrace {
    pub records: Vec<TraceRecord>,
}

impl FlowTrace {
    pub fn energies(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.energy)
    }

    /// Largest energy increase between consecutive records from `start` on.
    pub fn max_energy_increase(&self, start: usize) -> f64 {
        self.records
            .windows(2)
            .skip(start)
            .map(|w| w[1].energy - w[0].energy)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowOutcome {
    pub trace: FlowTrace,
    pub phi: MapField,
    pub psi: SpinorField,
    pub converged: bool,
    /// Number of steps taken.
    pub iterations: usize,
}

fn step_with(phi: &MapField, psi: &SpinorField, res: &ResidualPair, cfg: &FlowConfig) -> Result<(MapField, SpinorField)> {
    let next_phi = phi.step(cfg.step_map, &res.map_residual)?;
    if psi.is_zero() {
        return Ok((next_phi, psi.clone()));
    }
    let r = &res.spinor_residual;
    let j = twisted_dirac(phi, r)?.axpy(
        -1.0 / 3.0,
        &project_spinor(phi, &curvature_cubic_derivative(psi, r)),
    );
    let next_psi = project_spinor(&next_phi, &psi.axpy(-cfg.step_spinor, &j));
    Ok((next_phi, next_psi))
}

fn check_finite(phi: &MapField, psi: &SpinorField, iter: usize) -> Result<()> {
    if phi.field().is_finite() && psi.is_finite() {
        Ok(())
    } else {
        Err(LabError::BlowUp { iter })
    }
}

/// One flow step. Fails with [`LabError::BlowUp`] on non-finite output.
pub fn flow_step(phi: &MapField, psi: &SpinorField, cfg: &FlowConfig) -> Result<(MapField, SpinorField)> {
    cfg.validate(phi.grid().h())?;
    let res = el_residuals(phi, psi)?;
    let out = step_with(phi, psi, &res, cfg).map_err(|e| blow_up_or(e, 1))?;
    check_finite(&out.0, &out.1, 1)?;
    Ok(out)
}

fn blow_up_or(e: LabError, iter: usize) -> LabError {
    match e {
        LabError::OffSphere { .. } => LabError::BlowUp { iter },
        other => other,
    }
}

/// Iterates [`flow_step`] until both residual `L^2` norms drop below
/// `residual_tol` or `max_iters` steps were taken. Every iterate, including
/// the initial one, is recorded in the trace.
pub fn run_flow(phi: MapField, psi: SpinorField, cfg: &FlowConfig) -> Result<FlowOutcome> {
    cfg.validate(phi.grid().h())?;
    phi.check_spinor(&psi)?;
    let (mut phi, mut psi) = (phi, psi);
    let mut trace = FlowTrace::default();
    let mut iter = 0;
    loop {
        let res = el_residuals(&phi, &psi)?;
        let e = energy(&phi, &psi)?;
        let defect = phi.sphere_defect().max(tangency_defect(&phi, &psi)?);
        if !(e.total.is_finite() && res.l2.is_finite()) {
            return Err(LabError::BlowUp { iter });
        }
        trace.records.push(TraceRecord {
            iter,
            energy: e.total,
            res_map: res.map_l2,
            res_spinor: res.spinor_l2,
            defect,
        });
        let converged = res.map_l2 < cfg.residual_tol && res.spinor_l2 < cfg.residual_tol;
        if converged || iter >= cfg.max_iters {
            return Ok(FlowOutcome {
                trace,
                phi,
                psi,
                converged,
                iterations: iter,
            });
        }
        iter += 1;
        let (p, s) = step_with(&phi, &psi, &res, cfg).map_err(|e| blow_up_or(e, iter))?;
        check_finite(&p, &s, iter)?;
        phi = p;
        psi = s;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid2D;
    use crate::solver::{seed, SeedKind};

    fn grid(n: usize) -> Grid2D {
        Grid2D::new(n).unwrap()
    }

    #[test]
    fn step_bounds_are_enforced() {
        let h = 1.0 / 32.0;
        let mut cfg = FlowConfig::at_bounds(h, 10, 1e-6);
        assert!(cfg.validate(h).is_ok());
        cfg.step_map *= 2.0;
        assert!(matches!(cfg.validate(h), Err(LabError::InvalidFlow(_))));
        let mut cfg = FlowConfig::at_bounds(h, 10, 1e-6);
        cfg.step_spinor = h / 4.0;
        assert!(cfg.validate(h).is_err());
    }

    #[test]
    fn critical_point_is_fixed() {
        let g = grid(64);
        let (phi, psi) = seed(&SeedKind::Geodesic { k: 1 }, g, 3, 0).unwrap();
        let cfg = FlowConfig::at_bounds(g.h(), 10, 1e-6);
        let (p, s) = flow_step(&phi, &psi, &cfg).unwrap();
        assert!(p.field().sub(phi.field()).norm_linf() < 1e-9);
        assert!(s.is_zero());

        let (phi, psi) = seed(&SeedKind::DiracGeodesic { k: 1, amplitude: 0.5 }, g, 3, 0).unwrap();
        let (p, s) = flow_step(&phi, &psi, &cfg).unwrap();
        assert!(p.field().sub(phi.field()).norm_linf() < 1e-9);
        assert!(s.axpy(-1.0, &psi).norm_linf() < 1e-9);
    }

    #[test]
    fn non_critical_point_moves() {
        let g = grid(32);
        let (phi, psi) = seed(&SeedKind::Hedgehog { radius: 0.3 }, g, 3, 0).unwrap();
        let cfg = FlowConfig::at_bounds(g.h(), 10, 1e-6);
        let (p, _) = flow_step(&phi, &psi, &cfg).unwrap();
        assert!(p.field().sub(phi.field()).norm_linf() > 1e-6);
    }

    #[test]
    fn zero_spinor_stays_zero() {
        let g = grid(32);
        let kind = SeedKind::PerturbedGeodesic { k: 1, amplitude: 0.05 };
        let (phi, psi) = seed(&kind, g, 3, 1).unwrap();
        let cfg = FlowConfig::at_bounds(g.h(), 10, 1e-6);
        let (_, s) = flow_step(&phi, &psi, &cfg).unwrap();
        assert!(s.is_zero());
    }

    #[test]
    fn single_step_decreases_energy() {
        let g = grid(32);
        let kind = SeedKind::PerturbedGeodesic { k: 1, amplitude: 0.05 };
        let (phi, psi) = seed(&kind, g, 3, 4).unwrap();
        let cfg = FlowConfig::at_bounds(g.h(), 10, 1e-6);
        let e0 = energy(&phi, &psi).unwrap().total;
        let (p, s) = flow_step(&phi, &psi, &cfg).unwrap();
        let e1 = energy(&p, &s).unwrap().total;
        assert!(e1 <= e0 + 1e-12, "{e0} -> {e1}");
    }

    #[test]
    fn constant_seed_converges_immediately() {
        let g = grid(16);
        let (phi, psi) = seed(&SeedKind::Constant, g, 3, 0).unwrap();
        let out = run_flow(phi, psi, &FlowConfig::at_bounds(g.h(), 100, 1e-6)).unwrap();
        assert!(out.converged);
        assert_eq!(out.iterations, 0);
        assert_eq!(out.trace.records.len(), 1);
    }

    #[test]
    fn non_convergence_is_reported() {
        let g = grid(16);
        let (phi, psi) = seed(&SeedKind::Hedgehog { radius: 0.3 }, g, 3, 0).unwrap();
        let out = run_flow(phi, psi, &FlowConfig::at_bounds(g.h(), 3, 1e-12)).unwrap();
        assert!(!out.converged);
        assert_eq!(out.iterations, 3);
        assert_eq!(out.trace.records.len(), 4);
    }
}
