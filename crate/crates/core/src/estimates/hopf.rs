//! Hopf differential and the circle identity derived from it.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::{AuditReport, Location, Table, C_SLACK};
use crate::clifford::{spinor_derivative, spinor_inner, SpinorField, Spinor, STANDARD};
use crate::error::{LabError, Result};
use crate::grid::{derivative, sample_circle, Axis, Field, FieldValue, Grid2D};
use crate::sphere::{curvature_contraction, el_residuals, project_spinor, MapField};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Clone, Debug, PartialEq)]
pub struct HopfReport {
    /// The quadratic differential `T` (one complex component per point).
    pub t: Field<Complex64>,
    /// `|| 1/2 (D_x + i D_y) T ||_{L^2}`.
    pub defect_l2: f64,
    pub t_linf: f64,
}

/// `Re sum_i <psi^i, v . w^i>` over the target index.
fn clifford_pairing(psi: &[Complex64], v: [f64; 2], w: &[Complex64]) -> f64 {
    psi.chunks_exact(2)
        .zip(w.chunks_exact(2))
        .map(|(p, w)| {
            let p: Spinor = [p[0], p[1]];
            spinor_inner(p, STANDARD.mul_vector(v, [w[0], w[1]])).re
        })
        .sum()
}

/// Cartesian ingredients shared by both computations.
struct Parts {
    phi_x: Field<f64>,
    phi_y: Field<f64>,
    /// `nabla_x psi`, `nabla_y psi` (projected).
    nab_x: SpinorField,
    nab_y: SpinorField,
    /// `<R(psi, psi) psi, psi>`.
    q: Field<f64>,
}

fn parts(phi: &MapField, psi: &SpinorField) -> Result<Parts> {
    let q = curvature_contraction(phi, psi)?;
    Ok(Parts {
        phi_x: derivative(phi.field(), Axis::X),
        phi_y: derivative(phi.field(), Axis::Y),
        nab_x: project_spinor(phi, &spinor_derivative(psi, Axis::X)),
        nab_y: project_spinor(phi, &spinor_derivative(psi, Axis::Y)),
        q,
    })
}

/// `T = |phi_x|^2 - |phi_y|^2 - 2i <phi_x, phi_y> + <psi, e_x . nabla_x psi>
/// - i <psi, e_x . nabla_y psi> - 1/3 <R(psi, psi) psi, psi>` and the
/// `L^2` norm of `dbar T`.
pub fn hopf_differential(phi: &MapField, psi: &SpinorField) -> Result<HopfReport> {
    let p = parts(phi, psi)?;
    let g = *phi.grid();
    let mut t = Field::<Complex64>::zeros(g, 1);
    for k in 0..g.len() {
        let (dx, dy) = (p.phi_x.at(k), p.phi_y.at(k));
        let xx: f64 = dx.iter().map(|v| v * v).sum();
        let yy: f64 = dy.iter().map(|v| v * v).sum();
        let xy: f64 = dx.iter().zip(dy).map(|(a, b)| a * b).sum();
        let s = psi.at(k);
        let sx = clifford_pairing(s, [1.0, 0.0], p.nab_x.at(k));
        let sy = clifford_pairing(s, [1.0, 0.0], p.nab_y.at(k));
        t.at_mut(k)[0] = Complex64::new(xx - yy + sx - p.q.value(k) / 3.0, -2.0 * xy - sy);
    }
    let tx = derivative(&t, Axis::X);
    let ty = derivative(&t, Axis::Y);
    let dbar = tx.axpy(1.0, &ty.map(|z| z * I)).scale(0.5);
    Ok(HopfReport {
        defect_l2: dbar.norm_l2(),
        t_linf: t.norm_linf(),
        t,
    })
}

/// Smallest decay order of the defect under halving `h` that counts as
/// discretization error (the scheme is second order).
pub const MIN_DEFECT_ORDER: f64 = 1.5;

/// Every other grid point in each direction; `None` when `n` is odd or the
/// coarse grid would be too small.
fn coarsen<T: FieldValue>(f: &Field<T>) -> Option<Field<T>> {
    let n = f.grid().n();
    if !n.is_multiple_of(2) {
        return None;
    }
    let g = Grid2D::new(n / 2).ok()?;
    let mut data = Vec::with_capacity(g.len() * f.ncomp());
    for i in (0..n).step_by(2) {
        for j in (0..n).step_by(2) {
            data.extend_from_slice(f.at(i * n + j));
        }
    }
    Field::from_vec(g, f.ncomp(), data).ok()
}

/// [`hopf_differential`] as an audit. The defect passes when it stays below
/// `C_SLACK (residual + h^2)(1 + sup |T|)`, or when it behaves like
/// truncation error: recomputed on the subsampled grid `2h` it must be at
/// least `2^MIN_DEFECT_ORDER` times larger.
pub fn hopf_audit(phi: &MapField, psi: &SpinorField) -> Result<AuditReport> {
    let rep = hopf_differential(phi, psi)?;
    let residual = el_residuals(phi, psi)?.linf;
    let h = phi.grid().h();
    let tol = C_SLACK * (residual + h * h) * (1.0 + rep.t_linf);
    let mut r = AuditReport::new("hopf", -rep.defect_l2, Location::Nowhere {}, tol)
        .with_metric("defect_l2", rep.defect_l2)
        .with_metric("t_linf", rep.t_linf)
        .with_metric("residual_linf", residual);
    if let (Some(pc), Some(sc)) = (coarsen(phi.field()), coarsen(psi.field())) {
        let coarse = hopf_differential(&MapField::new(pc)?, &SpinorField::from_field(sc)?)?;
        let order = (coarse.defect_l2 / rep.defect_l2).log2();
        r = r
            .with_metric("coarse_defect_l2", coarse.defect_l2)
            .with_metric("observed_order", order);
        r.pass |= order >= MIN_DEFECT_ORDER;
    }
    Ok(r)
}

/// Circle data for one radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PolarRow {
    pub r: f64,
    pub samples: usize,
    /// `int |phi_theta|^2 / r^2`.
    pub lhs: f64,
    /// `int |phi_r|^2 + <psi, e_r . nabla_r psi> - 1/3 (1 + sin^2) Q`.
    pub rhs_radial: f64,
    /// `int |phi_r|^2 - <psi, e_theta . nabla_theta psi> - 1/3 sin^2 Q`.
    pub rhs_angular: f64,
    pub mismatch_radial: f64,
    pub mismatch_angular: f64,
    /// Between the two right-hand sides.
    pub mismatch_forms: f64,
}

impl PolarRow {
    pub const HEADER: [&'static str; 8] = [
        "r",
        "samples",
        "lhs",
        "rhs_radial",
        "rhs_angular",
        "mismatch_radial",
        "mismatch_angular",
        "mismatch_forms",
    ];

    pub fn values(&self) -> Vec<f64> {
        vec![
            self.r,
            self.samples as f64,
            self.lhs,
            self.rhs_radial,
            self.rhs_angular,
            self.mismatch_radial,
            self.mismatch_angular,
            self.mismatch_forms,
        ]
    }

    pub fn worst(&self) -> f64 {
        self.mismatch_radial.max(self.mismatch_angular).max(self.mismatch_forms)
    }
}

fn relative(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s < 1e-14 {
        0.0
    } else {
        (a - b).abs() / s
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

/// Evaluates both sides of the circle identity around `center` for every
/// radius with trapezoidal quadrature over `max(64, ceil(8 r / h))` samples.
/// Polar derivatives come from interpolated Cartesian ones by the chain
/// rule. The worst relative mismatch across radii and forms is the negated
/// margin; the tolerance is `5 (h + residual_scale)`.
pub fn polar_identity_audit(
    phi: &MapField,
    psi: &SpinorField,
    center: (f64, f64),
    radii: &[f64],
    residual_scale: f64,
) -> Result<AuditReport> {
    if radii.is_empty() {
        return Err(LabError::InvalidRegion("polar audit needs at least one radius".into()));
    }
    let g = *phi.grid();
    let h = g.h();
    let p = parts(phi, psi)?;
    let mut rows = Vec::with_capacity(radii.len());
    for &r in radii {
        let m = 64usize.max((8.0 * r / h).ceil() as usize);
        let px = sample_circle(&p.phi_x, center, r, m)?;
        let py = sample_circle(&p.phi_y, center, r, m)?;
        let s = sample_circle(psi.field(), center, r, m)?;
        let nx = sample_circle(p.nab_x.field(), center, r, m)?;
        let ny = sample_circle(p.nab_y.field(), center, r, m)?;
        let q = sample_circle(&p.q, center, r, m)?;
        let (mut lhs, mut rad, mut ang) = (0.0, 0.0, 0.0);
        for j in 0..m {
            let th = 2.0 * PI * j as f64 / m as f64;
            let (c, sn) = (th.cos(), th.sin());
            let phi_r: Vec<f64> = px[j].iter().zip(&py[j]).map(|(a, b)| c * a + sn * b).collect();
            let phi_t: Vec<f64> = px[j].iter().zip(&py[j]).map(|(a, b)| -sn * a + c * b).collect();
            let nab_r: Vec<Complex64> = nx[j].iter().zip(&ny[j]).map(|(a, b)| a * c + b * sn).collect();
            let nab_t: Vec<Complex64> = nx[j].iter().zip(&ny[j]).map(|(a, b)| -a * sn + b * c).collect();
            let term_r = clifford_pairing(&s[j], [c, sn], &nab_r);
            let term_t = clifford_pairing(&s[j], [-sn, c], &nab_t);
            let qj = q[j][0];
            let rr = dot(&phi_r, &phi_r);
            lhs += dot(&phi_t, &phi_t);
            rad += rr + term_r - (1.0 + sn * sn) * qj / 3.0;
            ang += rr - term_t - sn * sn * qj / 3.0;
        }
        let w = 2.0 * PI / m as f64;
        let (lhs, rad, ang) = (lhs * w, rad * w, ang * w);
        rows.push(PolarRow {
            r,
            samples: m,
            lhs,
            rhs_radial: rad,
            rhs_angular: ang,
            mismatch_radial: relative(lhs, rad),
            mismatch_angular: relative(lhs, ang),
            mismatch_forms: relative(rad, ang),
        });
    }
    let worst_row = rows
        .iter()
        .max_by(|a, b| a.worst().total_cmp(&b.worst()))
        .expect("radii is non-empty");
    let tol = 5.0 * (h + residual_scale);
    let residual = el_residuals(phi, psi)?.linf;
    let mut report = AuditReport::new("polar", -worst_row.worst(), Location::Radius { r: worst_row.r }, tol)
        .with_metric("residual_linf", residual)
        .with_metric("residual_scale", residual_scale)
        .with_metric("worst_mismatch_forms", rows.iter().map(|r| r.mismatch_forms).fold(0.0, f64::max));
    report.table = Some(Table {
        header: PolarRow::HEADER.iter().map(|s| s.to_string()).collect(),
        rows: rows.iter().map(PolarRow::values).collect(),
    });
    Ok(report)
}
