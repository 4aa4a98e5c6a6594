//! Kato and Bochner-type pointwise inequalities.

use num_complex::Complex64;

use super::{dphi_norm_sq, energy_density, worst_of, AuditReport, EstimateConstants, C_SLACK};
use crate::clifford::{spinor_derivative, SpinorField};
use crate::error::{LabError, Result};
use crate::grid::{derivative, laplacian, Axis, Field, ScalarField};
use crate::sphere::{coupling_term, el_residuals, project_spinor, MapField};

/// Densities entering both audits, all with centered differences.
struct Pieces {
    /// `e = 1/2 (|d phi|^2 + |psi|^4)`.
    e: ScalarField,
    /// `|d phi|^2`.
    dphi2: ScalarField,
    /// `|psi|^2`.
    psi2: ScalarField,
    /// Ambient Hessian norm `sum_{a,b} |D_b D_a phi|^2`.
    hess2: ScalarField,
    /// Product-rule gradient of `e`.
    de: [ScalarField; 2],
    /// Product-rule gradient of `|psi|^2`, `2 Re <psi, D_b psi>`.
    dpsi2: [ScalarField; 2],
    /// Flat derivatives of `psi`.
    dpsi: [SpinorField; 2],
}

fn pieces(phi: &MapField, psi: &SpinorField) -> Pieces {
    let g = *phi.grid();
    let d = [derivative(phi.field(), Axis::X), derivative(phi.field(), Axis::Y)];
    let dd: [[Field<f64>; 2]; 2] = [
        [derivative(&d[0], Axis::X), derivative(&d[0], Axis::Y)],
        [derivative(&d[1], Axis::X), derivative(&d[1], Axis::Y)],
    ];
    let dpsi = [spinor_derivative(psi, Axis::X), spinor_derivative(psi, Axis::Y)];
    let e = energy_density(phi, psi);
    let dphi2 = dphi_norm_sq(phi);
    let psi2 = psi.norm_sq();
    let mut hess2 = ScalarField::zeros(g, 1);
    let mut de = [ScalarField::zeros(g, 1), ScalarField::zeros(g, 1)];
    let mut dpsi2 = [ScalarField::zeros(g, 1), ScalarField::zeros(g, 1)];
    for k in 0..g.len() {
        let mut h2 = 0.0;
        for row in &dd {
            for f in row {
                h2 += f.at(k).iter().map(|v| v * v).sum::<f64>();
            }
        }
        hess2.at_mut(k)[0] = h2;
        for b in 0..2 {
            let mut map_part = 0.0;
            for a in 0..2 {
                map_part += d[a].at(k).iter().zip(dd[a][b].at(k)).map(|(u, v)| u * v).sum::<f64>();
            }
            let s: f64 = psi
                .at(k)
                .iter()
                .zip(dpsi[b].at(k))
                .map(|(u, v)| (u.conj() * v).re)
                .sum();
            dpsi2[b].at_mut(k)[0] = 2.0 * s;
            de[b].at_mut(k)[0] = map_part + psi2.value(k) * 2.0 * s;
        }
    }
    Pieces {
        e,
        dphi2,
        psi2,
        hess2,
        de,
        dpsi2,
        dpsi,
    }
}

/// Pointwise check of `|de|^2 / (2e) <= |nabla d phi|^2 + |d |psi|^2|^2`
/// where `e > 1e-10`. Tolerance `1e-6 (1 + sup RHS)`.
pub fn kato_audit(phi: &MapField, psi: &SpinorField) -> Result<AuditReport> {
    phi.check_spinor(psi)?;
    let g = *phi.grid();
    let p = pieces(phi, psi);
    let mut margins = ScalarField::zeros(g, 1);
    let mut scale: f64 = 0.0;
    let mut checked = 0usize;
    for k in 0..g.len() {
        let e = p.e.value(k);
        if !(e > 1e-10) {
            margins.at_mut(k)[0] = f64::NAN;
            continue;
        }
        checked += 1;
        let de2 = p.de[0].value(k).powi(2) + p.de[1].value(k).powi(2);
        let rhs = p.hess2.value(k) + p.dpsi2[0].value(k).powi(2) + p.dpsi2[1].value(k).powi(2);
        scale = scale.max(rhs);
        margins.at_mut(k)[0] = rhs - de2 / (2.0 * e);
    }
    let tol = 1e-6 * (1.0 + scale);
    let (worst, loc) = worst_of(&margins);
    let mut r = AuditReport::new("kato", worst, loc, tol)
        .with_metric("checked_points", checked as f64)
        .with_metric("scale", 1.0 + scale);
    r.margins = Some(margins);
    Ok(r)
}

/// Pointwise check of the energy-density inequality
///
/// `Delta e >= (1 - t)|nabla d phi|^2 + |d|psi|^2|^2
///   + (2 - delta4 - delta6 - delta7 - delta8)|psi|^2 |nabla psi|^2
///   - c10 |d phi|^4 - kappa1 |d phi|^2 - c11 |d phi|^2 |psi|^4 - c12 |psi|^8`
///
/// on an approximate solution. Inputs whose residual sup norm exceeds
/// `eps_res` are rejected. Tolerance `C_SLACK (res + h^2)(1 + sup e)`.
pub fn bochner_audit(
    phi: &MapField,
    psi: &SpinorField,
    constants: &EstimateConstants,
    eps_res: f64,
) -> Result<AuditReport> {
    let res = el_residuals(phi, psi)?;
    if !(res.linf <= eps_res) {
        return Err(LabError::ResidualTooLarge {
            residual: res.linf,
            limit: eps_res,
        });
    }
    let g = *phi.grid();
    let h = g.h();
    let p = pieces(phi, psi);
    let lap_e = laplacian(&p.e);
    let nab = [project_spinor(phi, &p.dpsi[0]), project_spinor(phi, &p.dpsi[1])];
    let i = &constants.inputs;
    let a_sp = constants.spinor_gradient_coefficient();
    let mut margins = ScalarField::zeros(g, 1);
    let mut sup_e: f64 = 0.0;
    for k in 0..g.len() {
        let d2 = p.dphi2.value(k);
        let s2 = p.psi2.value(k);
        let s4 = s2 * s2;
        let nab2: f64 = nab[0].at(k).iter().chain(nab[1].at(k)).map(Complex64::norm_sqr).sum();
        let grad_psi2 = p.dpsi2[0].value(k).powi(2) + p.dpsi2[1].value(k).powi(2);
        let rhs = (1.0 - constants.t) * p.hess2.value(k) + grad_psi2 + a_sp * s2 * nab2
            - constants.c10 * d2 * d2
            - i.kappa1 * d2
            - constants.c11 * d2 * s4
            - constants.c12 * s4 * s4;
        margins.at_mut(k)[0] = lap_e.value(k) - rhs;
        sup_e = sup_e.max(p.e.value(k));
    }
    let tol = C_SLACK * (res.linf + h * h) * (1.0 + sup_e);
    let (worst, loc) = worst_of(&margins);
    let mut r = AuditReport::new("bochner", worst, loc, tol)
        .with_metric("residual_linf", res.linf)
        .with_metric("sup_e", sup_e);
    r.margins = Some(margins);
    Ok(r)
}

/// `sup |B| / (|d phi| |psi|^2)` for the spinor coupling `B` of the map
/// equation, over points where the denominator exceeds `1e-12`. The
/// analytic bound is `sqrt 2`. `None` when no point qualifies.
pub fn coupling_bound_ratio(phi: &MapField, psi: &SpinorField) -> Result<Option<f64>> {
    let b = coupling_term(phi, psi)?;
    let d2 = dphi_norm_sq(phi);
    let s2 = psi.norm_sq();
    let mut best: Option<f64> = None;
    for k in 0..phi.grid().len() {
        let den = d2.value(k).sqrt() * s2.value(k);
        if den > 1e-12 {
            let num = b.at(k).iter().map(|v| v * v).sum::<f64>().sqrt();
            let r = num / den;
            best = Some(best.map_or(r, |m: f64| m.max(r)));
        }
    }
    Ok(best)
}
