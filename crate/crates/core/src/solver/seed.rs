//! Initial configurations for the flow and for the audits.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::clifford::SpinorField;
use crate::error::{LabError, Result};
use crate::grid::{torus_displacement, Field, Grid2D};
use crate::random::{rng_from_seed, smooth_complex, smooth_real};
use crate::sphere::{project_spinor, MapField};

/// Seed descriptor. Every map seed lives in the span of the first three
/// coordinates of `R^q` unless noted; `e_q` is the base point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SeedKind {
    /// `phi = e_q`, `psi = 0`.
    Constant,
    /// `phi = (cos 2 pi k x, sin 2 pi k x, 0, ...)`, `psi = 0`.
    Geodesic { k: u32 },
    /// Geodesic with phase `2 pi k x + amplitude * w(x, y)`, where `w` is a
    /// seeded band-limited field with `max |w| = 1`; `psi = 0`.
    PerturbedGeodesic { k: u32, amplitude: f64 },
    /// `phi = retract(e_q + amplitude W)`, `psi = P(spinor_amplitude Psi)`
    /// with seeded band-limited `W`, `Psi`.
    RandomSmooth {
        bandwidth: usize,
        amplitude: f64,
        spinor_amplitude: f64,
    },
    /// `phi = (cos 2 pi y cos 2 pi k x, cos 2 pi y sin 2 pi k x, sin 2 pi y, 0, ...)`.
    /// The flow keeps the ansatz `phi = (cos f(y) cos 2 pi k x, .., sin f(y))`
    /// and converges to a non-geodesic harmonic map.
    Equivariant { k: u32 },
    /// `phi = retract(e_q + epsilon (cos 2 pi k x, sin 2 pi k x, 0, ...))`,
    /// a geodesic squeezed into a small cap around `e_q`.
    Cap { k: u32, epsilon: f64 },
    /// Degree-one bubble of radius `radius` centred at `(1/2, 1/2)`, equal to
    /// `-e_3` outside; not a critical point.
    Hedgehog { radius: f64 },
    /// Geodesic map with `psi^i = a t^i`, `t` the unit tangent of the
    /// geodesic and `a = amplitude (1, i) / sqrt 2`. An exact coupled
    /// solution of the discrete system.
    DiracGeodesic { k: u32, amplitude: f64 },
}

impl SeedKind {
    pub fn name(&self) -> &'static str {
        match self {
            SeedKind::Constant => "constant",
            SeedKind::Geodesic { .. } => "geodesic",
            SeedKind::PerturbedGeodesic { .. } => "perturbed-geodesic",
            SeedKind::RandomSmooth { .. } => "random-smooth",
            SeedKind::Equivariant { .. } => "equivariant",
            SeedKind::Cap { .. } => "cap",
            SeedKind::Hedgehog { .. } => "hedgehog",
            SeedKind::DiracGeodesic { .. } => "dirac-geodesic",
        }
    }
}

fn check_k(k: u32, grid: &Grid2D) -> Result<f64> {
    if k == 0 {
        return Err(LabError::InvalidSeed("winding number k must be >= 1".into()));
    }
    if 4 * k as usize >= grid.n() {
        return Err(LabError::InvalidSeed(format!(
            "k = {k} is not resolved on n = {} (need k < n/4)",
            grid.n()
        )));
    }
    Ok(k as f64)
}

fn check_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(LabError::InvalidSeed(format!("{name} must be finite")))
    }
}

/// Builds `(phi, psi)` for `kind` on `grid` with target `S^{q-1}`.
/// `rng_seed` drives the random seeds and is ignored by the others.
pub fn seed(kind: &SeedKind, grid: Grid2D, q: usize, rng_seed: u64) -> Result<(MapField, SpinorField)> {
    if q < 3 {
        return Err(LabError::InvalidSeed(format!("q = {q} (need q >= 3)")));
    }
    let zero = SpinorField::zeros(grid, q);
    let planar = |theta: &dyn Fn(f64, f64) -> f64| {
        Field::from_fn(grid, q, |x, y, out| {
            let t = theta(x, y);
            out[0] = t.cos();
            out[1] = t.sin();
        })
    };
    match *kind {
        SeedKind::Constant => {
            let mut p = vec![0.0; q];
            p[q - 1] = 1.0;
            Ok((MapField::constant(grid, &p)?, zero))
        }
        SeedKind::Geodesic { k } => {
            let k = check_k(k, &grid)?;
            Ok((MapField::new(planar(&|x, _| 2.0 * PI * k * x))?, zero))
        }
        SeedKind::PerturbedGeodesic { k, amplitude } => {
            let k = check_k(k, &grid)?;
            check_finite("amplitude", amplitude)?;
            let w = smooth_real(grid, 1, 2, &mut rng_from_seed(rng_seed));
            let mut f = Field::zeros(grid, q);
            for (idx, x, _) in grid.points() {
                let t = 2.0 * PI * k * x + amplitude * w.at(idx)[0];
                f.at_mut(idx)[0] = t.cos();
                f.at_mut(idx)[1] = t.sin();
            }
            Ok((MapField::new(f)?, zero))
        }
        SeedKind::RandomSmooth {
            bandwidth,
            amplitude,
            spinor_amplitude,
        } => {
            check_finite("amplitude", amplitude)?;
            check_finite("spinor_amplitude", spinor_amplitude)?;
            let mut rng = rng_from_seed(rng_seed);
            let w = smooth_real(grid, q, bandwidth, &mut rng);
            let mut base = Field::zeros(grid, q);
            for k in 0..grid.len() {
                base.at_mut(k)[q - 1] = 1.0;
            }
            let phi = MapField::retract(base.axpy(amplitude, &w))?;
            let raw = smooth_complex(grid, 2 * q, bandwidth, &mut rng);
            let psi = SpinorField::from_field(raw.scale(spinor_amplitude))?;
            let psi = project_spinor(&phi, &psi);
            Ok((phi, psi))
        }
        SeedKind::Equivariant { k } => {
            let k = check_k(k, &grid)?;
            let f = Field::from_fn(grid, q, |x, y, out| {
                let (a, b) = (2.0 * PI * k * x, 2.0 * PI * y);
                out[0] = b.cos() * a.cos();
                out[1] = b.cos() * a.sin();
                out[2] = b.sin();
            });
            Ok((MapField::retract(f)?, zero))
        }
        SeedKind::Cap { k, epsilon } => {
            let k = check_k(k, &grid)?;
            if !(epsilon.is_finite() && epsilon >= 0.0) {
                return Err(LabError::InvalidSeed("cap epsilon must be >= 0".into()));
            }
            let f = Field::from_fn(grid, q, |x, _, out| {
                let a = 2.0 * PI * k * x;
                out[0] = epsilon * a.cos();
                out[1] = epsilon * a.sin();
                out[q - 1] = 1.0;
            });
            Ok((MapField::retract(f)?, zero))
        }
        SeedKind::Hedgehog { radius } => {
            if !(radius > 0.0 && radius < 0.5) {
                return Err(LabError::InvalidSeed(format!(
                    "hedgehog radius {radius} must lie in (0, 1/2)"
                )));
            }
            let f = Field::from_fn(grid, q, |x, y, out| {
                let (dx, dy) = torus_displacement((0.5, 0.5), (x, y));
                let rho = dx.hypot(dy);
                let alpha = if rho < radius {
                    PI * (PI * rho / (2.0 * radius)).sin().powi(2)
                } else {
                    PI
                };
                let th = dy.atan2(dx);
                out[0] = alpha.sin() * th.cos();
                out[1] = alpha.sin() * th.sin();
                out[2] = alpha.cos();
            });
            Ok((MapField::retract(f)?, zero))
        }
        SeedKind::DiracGeodesic { k, amplitude } => {
            let k = check_k(k, &grid)?;
            check_finite("amplitude", amplitude)?;
            let phi = MapField::new(planar(&|x, _| 2.0 * PI * k * x))?;
            let s = amplitude / 2f64.sqrt();
            let a = [Complex64::new(s, 0.0), Complex64::new(0.0, s)];
            let psi = SpinorField::from_fn(grid, q, |x, _, out| {
                let th = 2.0 * PI * k * x;
                let t = [-th.sin(), th.cos()];
                for i in 0..2 {
                    out[2 * i] = a[0] * t[i];
                    out[2 * i + 1] = a[1] * t[i];
                }
            });
            Ok((phi, psi))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::{el_residuals, tangency_defect};

    fn grid(n: usize) -> Grid2D {
        Grid2D::new(n).unwrap()
    }

    #[test]
    fn constant_seed_is_critical() {
        let (phi, psi) = seed(&SeedKind::Constant, grid(16), 4, 0).unwrap();
        let r = el_residuals(&phi, &psi).unwrap();
        assert_eq!(r.linf, 0.0);
        assert_eq!(phi.at(0), &[0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn geodesic_seed_is_critical() {
        let (phi, psi) = seed(&SeedKind::Geodesic { k: 1 }, grid(64), 3, 0).unwrap();
        assert!(el_residuals(&phi, &psi).unwrap().linf < 1e-9);
    }

    #[test]
    fn dirac_geodesic_is_an_exact_coupled_solution() {
        for q in [3, 5] {
            let kind = SeedKind::DiracGeodesic { k: 2, amplitude: 0.7 };
            let (phi, psi) = seed(&kind, grid(32), q, 0).unwrap();
            assert!(!psi.is_zero());
            let r = el_residuals(&phi, &psi).unwrap();
            assert!(r.linf < 1e-9, "q = {q}: {}", r.linf);
        }
    }

    #[test]
    fn random_seed_satisfies_constraints() {
        let kind = SeedKind::RandomSmooth {
            bandwidth: 3,
            amplitude: 0.5,
            spinor_amplitude: 0.2,
        };
        let (phi, psi) = seed(&kind, grid(32), 3, 11).unwrap();
        assert!(phi.sphere_defect() < 1e-10);
        assert!(tangency_defect(&phi, &psi).unwrap() < 1e-10);
        assert!(psi.norm_linf() > 0.0);
        let again = seed(&kind, grid(32), 3, 11).unwrap();
        assert_eq!(again.0, phi);
        assert_eq!(again.1, psi);
    }

    #[test]
    fn resolution_guard() {
        assert!(seed(&SeedKind::Geodesic { k: 4 }, grid(16), 3, 0).is_err());
        assert!(seed(&SeedKind::Geodesic { k: 3 }, grid(16), 3, 0).is_ok());
        assert!(seed(&SeedKind::Geodesic { k: 0 }, grid(16), 3, 0).is_err());
        assert!(seed(&SeedKind::Cap { k: 8, epsilon: 0.1 }, grid(32), 3, 0).is_err());
        assert!(seed(&SeedKind::Constant, grid(16), 2, 0).is_err());
        assert!(seed(&SeedKind::Hedgehog { radius: 0.6 }, grid(16), 3, 0).is_err());
    }

    #[test]
    fn perturbed_geodesic_stays_in_plane() {
        let kind = SeedKind::PerturbedGeodesic { k: 1, amplitude: 0.05 };
        let (phi, _) = seed(&kind, grid(32), 3, 2).unwrap();
        let (geo, _) = seed(&SeedKind::Geodesic { k: 1 }, grid(32), 3, 0).unwrap();
        let dev = phi.field().sub(geo.field()).norm_linf();
        assert!(dev > 0.0 && dev <= 0.05 + 1e-12);
        assert!((0..phi.grid().len()).all(|k| phi.at(k)[2] == 0.0));
    }

    #[test]
    fn hedgehog_is_continuous_at_its_rim() {
        let (phi, _) = seed(&SeedKind::Hedgehog { radius: 0.3 }, grid(64), 3, 0).unwrap();
        let far = phi.at(0);
        assert!((far[2] + 1.0).abs() < 1e-15);
        let centre = phi.at(32 * 64 + 32);
        assert!((centre[2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn seed_kind_toml_shape() {
        let k: SeedKind = serde_json::from_str(r#"{"kind":"cap","k":1,"epsilon":0.1}"#).unwrap();
        assert_eq!(k, SeedKind::Cap { k: 1, epsilon: 0.1 });
        assert_eq!(k.name(), "cap");
    }
}
