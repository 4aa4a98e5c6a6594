//! Small-energy regularity probes: sup norms against local energy norms.

use serde::Serialize;

use super::{dphi_norm_sq, local_energy};
use crate::clifford::{spinor_derivative, SpinorField};
use crate::error::{LabError, Result};
use crate::grid::{integrate, torus_distance, Axis, DiscRegion, Region, ScalarField};
use crate::sphere::{project_spinor, MapField};

const GUARD: f64 = 1e-12;

/// Ratios on one nested sub-disc. `None` marks a degenerate `0/0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EpsRegEntry {
    pub shrink: f64,
    pub radius: f64,
    pub sup_dphi: f64,
    /// `sup_{D~} |d phi| / (||d phi||_{L^2(D)} + ||psi||^2_{L^4(D)})`.
    pub ratio1: Option<f64>,
    /// `sup_x (|psi|^{1/2} |x|^{1/2} + |nabla psi| |x|^{3/2}) / ||psi||_{L^4(D_{2|x|})}`
    /// over grid points of `D~` with `|x| >= 2h`, `|x|` measured from the
    /// center.
    pub ratio2: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpsRegReport {
    pub radius: f64,
    /// `E(phi, psi, D)`.
    pub energy: f64,
    pub dphi_l2: f64,
    pub psi_l4_sq: f64,
    pub entries: Vec<EpsRegEntry>,
}

/// `||psi||^4_{L^4}` on centered discs of any radius from one sorted pass.
struct RadialProfile {
    dist: Vec<f64>,
    cumulative: Vec<f64>,
}

impl RadialProfile {
    fn new(center: (f64, f64), psi4: &ScalarField) -> Self {
        let g = psi4.grid();
        let h2 = g.h() * g.h();
        let mut pts: Vec<(f64, f64)> = g
            .points()
            .map(|(k, x, y)| (torus_distance(center, (x, y)), psi4.value(k) * h2))
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut acc = 0.0;
        let cumulative = pts
            .iter()
            .map(|p| {
                acc += p.1;
                acc
            })
            .collect();
        Self {
            dist: pts.iter().map(|p| p.0).collect(),
            cumulative,
        }
    }

    /// `int_{D_rho} |psi|^4` with the same sharp indicator as [`integrate`].
    fn integral(&self, rho: f64) -> f64 {
        let idx = self.dist.partition_point(|&d| d <= rho);
        if idx == 0 {
            0.0
        } else {
            self.cumulative[idx - 1]
        }
    }
}

fn quotient(num: f64, den: f64) -> Option<f64> {
    (den >= GUARD).then(|| num / den)
}

/// Ratios of interior sup norms to local energy norms for each sub-disc
/// `D.shrink(f)`, `f` in `nested`. The probe certifies boundedness of the
/// ratios across a family, not a particular constant.
pub fn epsilon_regularity_probe(
    phi: &MapField,
    psi: &SpinorField,
    disc: &DiscRegion,
    nested: &[f64],
) -> Result<EpsRegReport> {
    phi.check_spinor(psi)?;
    let g = *phi.grid();
    let h = g.h();
    let dphi2 = dphi_norm_sq(phi);
    let psi2 = psi.norm_sq();
    let psi4 = psi2.map(|v| v * v);
    let nab2 = {
        let nx = project_spinor(phi, &spinor_derivative(psi, Axis::X));
        let ny = project_spinor(phi, &spinor_derivative(psi, Axis::Y));
        nx.norm_sq().axpy(1.0, &ny.norm_sq())
    };
    let dphi_l2 = integrate(&dphi2, Region::Disc(*disc)).sqrt();
    let psi_l4_sq = integrate(&psi4, Region::Disc(*disc)).sqrt();
    let profile = RadialProfile::new(disc.center(), &psi4);
    let mut entries = Vec::with_capacity(nested.len());
    for &f in nested {
        if !(f > 0.0 && f <= 1.0) {
            return Err(LabError::InvalidRegion(format!(
                "shrink factor {f} must lie in (0, 1]"
            )));
        }
        let sub = disc.shrink(f)?;
        let mut sup_dphi: f64 = 0.0;
        let mut ratio2: Option<f64> = None;
        for (k, x, y) in g.points() {
            if !sub.contains((x, y)) {
                continue;
            }
            sup_dphi = sup_dphi.max(dphi2.value(k).sqrt());
            let r = torus_distance(disc.center(), (x, y));
            if r < 2.0 * h || 2.0 * r >= 0.5 {
                continue;
            }
            let num = psi2.value(k).powf(0.25) * r.sqrt() + nab2.value(k).sqrt() * r.powf(1.5);
            if let Some(q) = quotient(num, profile.integral(2.0 * r).powf(0.25)) {
                ratio2 = Some(ratio2.map_or(q, |m| m.max(q)));
            }
        }
        entries.push(EpsRegEntry {
            shrink: f,
            radius: sub.radius(),
            sup_dphi,
            ratio1: quotient(sup_dphi, dphi_l2 + psi_l4_sq),
            ratio2,
        });
    }
    Ok(EpsRegReport {
        radius: disc.radius(),
        energy: local_energy(phi, psi, disc),
        dphi_l2,
        psi_l4_sq,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid2D;
    use crate::solver::{seed, SeedKind};
    use std::f64::consts::PI;

    #[test]
    fn geodesic_ratio_matches_area_formula() {
        let g = Grid2D::new(128).unwrap();
        let d = DiscRegion::new((0.5, 0.5), 0.25).unwrap();
        for k in [1u32, 2] {
            let (phi, psi) = seed(&SeedKind::Geodesic { k }, g, 3, 0).unwrap();
            let rep = epsilon_regularity_probe(&phi, &psi, &d, &[0.5, 0.75]).unwrap();
            let expect = 1.0 / (PI * 0.25f64 * 0.25).sqrt();
            for e in &rep.entries {
                let r1 = e.ratio1.unwrap();
                assert!((r1 / expect - 1.0).abs() < 0.05, "{r1} vs {expect}");
                assert_eq!(e.ratio2, None);
            }
            assert!(rep.energy > 0.0);
        }
    }

    #[test]
    fn degenerate_ratios_are_not_applicable() {
        let g = Grid2D::new(32).unwrap();
        let (phi, psi) = seed(&SeedKind::Constant, g, 3, 0).unwrap();
        let d = DiscRegion::new((0.3, 0.6), 0.2).unwrap();
        let rep = epsilon_regularity_probe(&phi, &psi, &d, &[0.5]).unwrap();
        assert_eq!(rep.entries[0].ratio1, None);
        assert_eq!(rep.entries[0].ratio2, None);
        assert_eq!(rep.energy, 0.0);
    }

    #[test]
    fn ratios_are_stable_under_refinement() {
        let d = DiscRegion::new((0.5, 0.5), 0.3).unwrap();
        let mut r1 = Vec::new();
        let mut r2 = Vec::new();
        for n in [64, 128, 256] {
            let g = Grid2D::new(n).unwrap();
            let kind = SeedKind::DiracGeodesic { k: 1, amplitude: 0.5 };
            let (phi, psi) = seed(&kind, g, 3, 0).unwrap();
            let rep = epsilon_regularity_probe(&phi, &psi, &d, &[0.5]).unwrap();
            r1.push(rep.entries[0].ratio1.unwrap());
            r2.push(rep.entries[0].ratio2.unwrap());
        }
        for v in [&r1, &r2] {
            let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = v.iter().cloned().fold(0.0, f64::max);
            assert!(hi / lo < 1.1, "{v:?}");
        }
    }

    #[test]
    fn radial_profile_matches_disc_integral() {
        let g = Grid2D::new(32).unwrap();
        let f = ScalarField::scalar_from_fn(g, |x, y| 1.0 + x * y);
        let c = (0.4, 0.55);
        let p = RadialProfile::new(c, &f);
        for rho in [0.05, 0.1, 0.23] {
            let d = DiscRegion::new(c, rho).unwrap();
            assert!((p.integral(rho) - integrate(&f, Region::Disc(d))).abs() < 1e-12);
        }
    }

    #[test]
    fn bad_shrink_factor() {
        let g = Grid2D::new(16).unwrap();
        let (phi, psi) = seed(&SeedKind::Constant, g, 3, 0).unwrap();
        let d = DiscRegion::new((0.5, 0.5), 0.2).unwrap();
        assert!(epsilon_regularity_probe(&phi, &psi, &d, &[1.5]).is_err());
    }
}
