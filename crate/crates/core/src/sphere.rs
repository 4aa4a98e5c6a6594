//! The round target `S^{q-1} ⊂ R^q`: maps, tangent projections, the
//! constant-curvature tensor, the energy with curvature term and its
//! Euler-Lagrange residuals.
//!
//! Curvature convention: `R(X, Y) Z = <Y, Z> X - <X, Z> Y`, so that
//! `<R(X, Y) Y, X> = 1` for orthonormal `X, Y`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::clifford::{dirac, spinor_inner, Spinor, SpinorField, STANDARD, TANGENCY_PRECONDITION};
use crate::error::{LabError, Result};
use crate::grid::{derivative, forward_difference, integrate, laplacian, Axis, Field, Grid2D, Region, ScalarField};

/// Pointwise tolerance on `| |phi| - 1 |`.
pub const SPHERE_TOL: f64 = 1e-12;

const CZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A map into the unit sphere of `R^q`.
#[derive(Clone, Debug, PartialEq)]
pub struct MapField {
    field: Field<f64>,
}

impl MapField {
    /// Wraps `field`, checking the sphere constraint.
    pub fn new(field: Field<f64>) -> Result<Self> {
        if field.ncomp() < 3 {
            return Err(LabError::Mismatch(format!(
                "target dimension q = {} (need q >= 3)",
                field.ncomp()
            )));
        }
        let defect = sphere_defect(&field);
        if !(defect <= SPHERE_TOL) {
            return Err(LabError::OffSphere { defect });
        }
        Ok(Self { field })
    }

    /// `phi / |phi|` pointwise.
    pub fn retract(mut field: Field<f64>) -> Result<Self> {
        if field.ncomp() < 3 {
            return Err(LabError::Mismatch(format!(
                "target dimension q = {} (need q >= 3)",
                field.ncomp()
            )));
        }
        for k in 0..field.grid().len() {
            let v = field.at_mut(k);
            let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            if !(norm.is_finite() && norm > 0.0) {
                return Err(LabError::OffSphere { defect: f64::INFINITY });
            }
            v.iter_mut().for_each(|a| *a /= norm);
        }
        Ok(Self { field })
    }

    pub fn constant(grid: Grid2D, p: &[f64]) -> Result<Self> {
        Self::new(Field::from_fn(grid, p.len(), |_, _, out| out.copy_from_slice(p)))
    }

    #[inline]
    pub fn q(&self) -> usize {
        self.field.ncomp()
    }

    #[inline]
    pub fn grid(&self) -> &Grid2D {
        self.field.grid()
    }

    #[inline]
    pub fn field(&self) -> &Field<f64> {
        &self.field
    }

    pub fn into_field(self) -> Field<f64> {
        self.field
    }

    #[inline]
    pub fn at(&self, k: usize) -> &[f64] {
        self.field.at(k)
    }

    /// `retract(phi + s * v)`.
    pub fn step(&self, s: f64, v: &Field<f64>) -> Result<Self> {
        self.field.check_same_shape(v)?;
        Self::retract(self.field.axpy(s, v))
    }

    pub fn sphere_defect(&self) -> f64 {
        sphere_defect(&self.field)
    }

    pub fn check_spinor(&self, psi: &SpinorField) -> Result<()> {
        if psi.grid() != self.grid() || psi.q() != self.q() {
            return Err(LabError::Mismatch(format!(
                "map has n = {}, q = {}; spinor has n = {}, q = {}",
                self.grid().n(),
                self.q(),
                psi.grid().n(),
                psi.q()
            )));
        }
        Ok(())
    }
}

fn sphere_defect(field: &Field<f64>) -> f64 {
    (0..field.grid().len())
        .map(|k| (field.at(k).iter().map(|a| a * a).sum::<f64>().sqrt() - 1.0).abs())
        .fold(0.0, |m, d| if d.is_nan() { f64::NAN } else { m.max(d) })
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `v - <v, phi> phi` pointwise.
pub fn project_tangent(phi: &MapField, v: &Field<f64>) -> Result<Field<f64>> {
    phi.field.check_same_shape(v)?;
    let mut out = v.clone();
    for k in 0..phi.grid().len() {
        let p = phi.at(k);
        let c = dot(p, v.at(k));
        out.at_mut(k).iter_mut().zip(p).for_each(|(o, pi)| *o -= c * pi);
    }
    Ok(out)
}

/// Projects the target index of a twisted spinor onto `T_phi S^{q-1}`:
/// `psi^i - phi^i sum_j phi^j psi^j`.
///
/// # Panics
/// If the spinor and the map live on different grids or targets.
pub fn project_spinor(phi: &MapField, psi: &SpinorField) -> SpinorField {
    phi.check_spinor(psi).expect("project_spinor: incompatible fields");
    let q = phi.q();
    let mut out = psi.clone();
    for k in 0..phi.grid().len() {
        let p = phi.at(k);
        let f = out.at_mut(k);
        let mut nu = [CZERO; 2];
        for i in 0..q {
            nu[0] += f[2 * i] * p[i];
            nu[1] += f[2 * i + 1] * p[i];
        }
        for i in 0..q {
            f[2 * i] -= nu[0] * p[i];
            f[2 * i + 1] -= nu[1] * p[i];
        }
    }
    out
}

/// `max_x |sum_i phi^i psi^i|`.
pub fn tangency_defect(phi: &MapField, psi: &SpinorField) -> Result<f64> {
    phi.check_spinor(psi)?;
    if psi.is_zero() {
        return Ok(0.0);
    }
    let q = phi.q();
    Ok((0..phi.grid().len())
        .map(|k| {
            let (p, f) = (phi.at(k), psi.at(k));
            let mut nu = [CZERO; 2];
            for i in 0..q {
                nu[0] += f[2 * i] * p[i];
                nu[1] += f[2 * i + 1] * p[i];
            }
            (nu[0].norm_sqr() + nu[1].norm_sqr()).sqrt()
        })
        .fold(0.0, f64::max))
}

/// `R(X, Y) Z = <Y, Z> X - <X, Z> Y`.
pub fn curvature_apply(x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
    let (yz, xz) = (dot(y, z), dot(x, z));
    x.iter().zip(y).map(|(a, b)| yz * a - xz * b).collect()
}

/// `R(X, Y)` acting on the target index of a twisted fiber (`2q` slots).
pub fn curvature_apply_spinor(x: &[f64], y: &[f64], fiber: &[Complex64]) -> Vec<Complex64> {
    let q = x.len();
    let mut yz = [CZERO; 2];
    let mut xz = [CZERO; 2];
    for j in 0..q {
        for s in 0..2 {
            yz[s] += fiber[2 * j + s] * y[j];
            xz[s] += fiber[2 * j + s] * x[j];
        }
    }
    let mut out = vec![CZERO; 2 * q];
    for i in 0..q {
        for s in 0..2 {
            out[2 * i + s] = yz[s] * x[i] - xz[s] * y[i];
        }
    }
    out
}

/// Gram matrix `G_ij = <psi^i, psi^j>` of one fiber, row-major `q x q`.
pub fn gram(fiber: &[Complex64]) -> Vec<Complex64> {
    let q = fiber.len() / 2;
    let mut g = vec![CZERO; q * q];
    gram_into(fiber, &mut g);
    g
}

fn gram_into(fiber: &[Complex64], g: &mut [Complex64]) {
    let q = fiber.len() / 2;
    for i in 0..q {
        let a: Spinor = [fiber[2 * i], fiber[2 * i + 1]];
        for j in 0..q {
            g[i * q + j] = spinor_inner(a, [fiber[2 * j], fiber[2 * j + 1]]);
        }
    }
}

/// `R_ijkl <psi^i, psi^k> <psi^j, psi^l> = (tr G)^2 - sum_ij G_ij G_ji`,
/// returned as a complex number so callers can check the imaginary part.
pub fn contraction_at(fiber: &[Complex64]) -> Complex64 {
    let q = fiber.len() / 2;
    let mut g = vec![CZERO; q * q];
    contraction_with(fiber, &mut g)
}

fn contraction_with(fiber: &[Complex64], g: &mut [Complex64]) -> Complex64 {
    let q = fiber.len() / 2;
    gram_into(fiber, g);
    let tr: Complex64 = (0..q).map(|i| g[i * q + i]).sum();
    let mut cross = CZERO;
    for i in 0..q {
        for j in 0..q {
            cross += g[i * q + j] * g[j * q + i];
        }
    }
    tr * tr - cross
}

/// Pointwise `<R(psi, psi) psi, psi>` with the four-index contraction.
pub fn curvature_contraction(phi: &MapField, psi: &SpinorField) -> Result<ScalarField> {
    let defect = tangency_defect(phi, psi)?;
    if defect > TANGENCY_PRECONDITION {
        return Err(LabError::NonTangent { defect });
    }
    let g = *psi.grid();
    let mut out = ScalarField::zeros(g, 1);
    if psi.is_zero() {
        return Ok(out);
    }
    let mut buf = vec![CZERO; psi.q() * psi.q()];
    for k in 0..g.len() {
        let f = psi.at(k);
        let v = contraction_with(f, &mut buf);
        let scale = f.iter().map(|z| z.norm_sqr()).sum::<f64>().powi(2).max(1.0);
        if v.im.abs() > 1e-12 * scale {
            return Err(LabError::ImaginaryPart {
                context: "curvature contraction",
                value: v.im,
            });
        }
        out.at_mut(k)[0] = v.re;
    }
    Ok(out)
}

/// The cubic spinor term `R(psi, psi) psi`, component `i`:
/// `sum_j (G_jj psi^i - G_ji psi^j)`. It satisfies
/// `d/de Q(psi + e chi) = 4 Re <chi, S>` for the pointwise contraction `Q`.
pub fn curvature_cubic(psi: &SpinorField) -> SpinorField {
    let q = psi.q();
    let mut out = SpinorField::zeros(*psi.grid(), q);
    let mut g = vec![CZERO; q * q];
    for k in 0..psi.grid().len() {
        let f = psi.at(k);
        gram_into(f, &mut g);
        let tr: Complex64 = (0..q).map(|i| g[i * q + i]).sum();
        let o = out.at_mut(k);
        for i in 0..q {
            for s in 0..2 {
                let mut v = tr * f[2 * i + s];
                for j in 0..q {
                    v -= g[j * q + i] * f[2 * j + s];
                }
                o[2 * i + s] = v;
            }
        }
    }
    out
}

/// Directional derivative of [`curvature_cubic`] at `psi` along `chi`.
pub fn curvature_cubic_derivative(psi: &SpinorField, chi: &SpinorField) -> SpinorField {
    let q = psi.q();
    let mut out = SpinorField::zeros(*psi.grid(), q);
    let mut dg = vec![CZERO; q * q];
    let mut g = vec![CZERO; q * q];
    for k in 0..psi.grid().len() {
        let (f, c) = (psi.at(k), chi.at(k));
        gram_into(f, &mut g);
        for j in 0..q {
            let pj: Spinor = [f[2 * j], f[2 * j + 1]];
            let cj: Spinor = [c[2 * j], c[2 * j + 1]];
            for i in 0..q {
                let pi: Spinor = [f[2 * i], f[2 * i + 1]];
                let ci: Spinor = [c[2 * i], c[2 * i + 1]];
                dg[j * q + i] = spinor_inner(cj, pi) + spinor_inner(pj, ci);
            }
        }
        let tr: Complex64 = (0..q).map(|i| g[i * q + i]).sum();
        let dtr: Complex64 = (0..q).map(|i| dg[i * q + i]).sum();
        let o = out.at_mut(k);
        for i in 0..q {
            for s in 0..2 {
                let mut v = dtr * f[2 * i + s] + tr * c[2 * i + s];
                for j in 0..q {
                    v -= dg[j * q + i] * f[2 * j + s] + g[j * q + i] * c[2 * j + s];
                }
                o[2 * i + s] = v;
            }
        }
    }
    out
}

/// The three parts of the energy and their sum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub dirichlet: f64,
    pub spinor: f64,
    pub curvature: f64,
    pub total: f64,
}

/// `1/2 int |d phi|^2` with forward differences (its gradient is exactly
/// minus the 5-point Laplacian).
pub fn dirichlet_energy(phi: &MapField) -> f64 {
    let g = phi.grid();
    let h2 = g.h() * g.h();
    let sum: f64 = Axis::BOTH
        .iter()
        .map(|&a| forward_difference(phi.field(), a).data().iter().map(|v| v * v).sum::<f64>())
        .sum();
    0.5 * h2 * sum
}

/// `E = 1/2 int ( |d phi|^2 + <psi, D psi> - 1/6 <R(psi,psi)psi, psi> )`.
pub fn energy(phi: &MapField, psi: &SpinorField) -> Result<EnergyBreakdown> {
    let contraction = curvature_contraction(phi, psi)?;
    let dirichlet = dirichlet_energy(phi);
    if psi.is_zero() {
        return Ok(EnergyBreakdown {
            dirichlet,
            spinor: 0.0,
            curvature: 0.0,
            total: dirichlet,
        });
    }
    let dpsi = project_spinor(phi, &dirac(psi));
    let pairing = psi.inner(&dpsi);
    let scale = (psi.norm_l2() * dpsi.norm_l2()).max(1.0);
    if pairing.im.abs() > 1e-10 * scale {
        return Err(LabError::ImaginaryPart {
            context: "spinor energy",
            value: pairing.im,
        });
    }
    let spinor = 0.5 * pairing.re;
    let curvature = -integrate(&contraction, Region::Torus) / 12.0;
    Ok(EnergyBreakdown {
        dirichlet,
        spinor,
        curvature,
        total: dirichlet + spinor + curvature,
    })
}

/// Euler-Lagrange residuals and their norms.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualPair {
    pub map_residual: Field<f64>,
    pub spinor_residual: SpinorField,
    pub map_linf: f64,
    pub map_l2: f64,
    pub spinor_linf: f64,
    pub spinor_l2: f64,
    /// Larger of the two sup norms.
    pub linf: f64,
    /// `sqrt(map_l2^2 + spinor_l2^2)`.
    pub l2: f64,
}

/// Residuals of the coupled system on the current grid.
///
/// `map_residual = P(Delta phi + Re <nu, psi^j>)` with
/// `nu = sum_i phi^i (dirac psi)^i`; it is the negative `L^2` gradient of
/// the discrete energy along tangent map variations (the spinor moving with
/// the tangent projection). Its continuum limit is
/// `tau(phi) - sum_a Re <e_a · w_a, psi^j>`, `w_a = sum_i d_a phi^i psi^i`
/// (see [`coupling_term`]).
///
/// `spinor_residual = D psi - 1/3 R(psi, psi) psi` is the `L^2` gradient of
/// the energy along tangent spinor variations, with pairing `Re <., .>`.
pub fn el_residuals(phi: &MapField, psi: &SpinorField) -> Result<ResidualPair> {
    let defect = tangency_defect(phi, psi)?;
    if defect > TANGENCY_PRECONDITION {
        return Err(LabError::NonTangent { defect });
    }
    let q = phi.q();
    let g = *phi.grid();
    let mut map_raw = laplacian(phi.field());
    let psi_zero = psi.is_zero();
    let dpsi = if psi_zero { SpinorField::zeros(g, q) } else { dirac(psi) };
    if !psi_zero {
        for k in 0..g.len() {
            let (p, d, f) = (phi.at(k), dpsi.at(k), psi.at(k));
            let mut nu = [CZERO; 2];
            for i in 0..q {
                nu[0] += d[2 * i] * p[i];
                nu[1] += d[2 * i + 1] * p[i];
            }
            let m = map_raw.at_mut(k);
            for (j, mj) in m.iter_mut().enumerate() {
                *mj += spinor_inner(nu, [f[2 * j], f[2 * j + 1]]).re;
            }
        }
    }
    let map_residual = project_tangent(phi, &map_raw)?;
    let spinor_residual = if psi_zero {
        dpsi
    } else {
        project_spinor(phi, &dpsi).axpy(-1.0 / 3.0, &curvature_cubic(psi))
    };
    let (map_linf, map_l2) = (map_residual.norm_linf(), map_residual.norm_l2());
    let (spinor_linf, spinor_l2) = (spinor_residual.norm_linf(), spinor_residual.norm_l2());
    Ok(ResidualPair {
        map_residual,
        spinor_residual,
        map_linf,
        map_l2,
        spinor_linf,
        spinor_l2,
        linf: map_linf.max(spinor_linf),
        l2: map_l2.hypot(spinor_l2),
    })
}

/// Continuum form of the spinor coupling in the map equation,
/// `P( sum_a Re <e_a · w_a, psi^j> )_j` with `w_a = sum_i d_a phi^i psi^i`.
pub fn coupling_term(phi: &MapField, psi: &SpinorField) -> Result<Field<f64>> {
    phi.check_spinor(psi)?;
    let q = phi.q();
    let g = *phi.grid();
    let dphi = [derivative(phi.field(), Axis::X), derivative(phi.field(), Axis::Y)];
    let mut out = Field::zeros(g, q);
    for k in 0..g.len() {
        let f = psi.at(k);
        for a in Axis::BOTH {
            let dp = dphi[a.slot()].at(k);
            let mut w = [CZERO; 2];
            for i in 0..q {
                w[0] += f[2 * i] * dp[i];
                w[1] += f[2 * i + 1] * dp[i];
            }
            let gw = STANDARD.apply(a, w);
            let o = out.at_mut(k);
            for (j, oj) in o.iter_mut().enumerate() {
                *oj += spinor_inner(gw, [f[2 * j], f[2 * j + 1]]).re;
            }
        }
    }
    project_tangent(phi, &out)
}
