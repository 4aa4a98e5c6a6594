use std::f64::consts::PI;

use sigma_core::grid::Grid2D;
use sigma_core::solver::{run_flow, seed, FlowConfig, SeedKind};
use sigma_core::sphere::{dirichlet_energy, el_residuals, tangency_defect};

#[test]
fn perturbed_geodesic_relaxes_to_the_geodesic_energy() {
    let g = Grid2D::new(64).unwrap();
    let kind = SeedKind::PerturbedGeodesic { k: 1, amplitude: 0.05 };
    let (phi, psi) = seed(&kind, g, 3, 2024).unwrap();
    let cfg = FlowConfig::at_bounds(g.h(), 100_000, 1e-6);
    let out = run_flow(phi, psi, &cfg).unwrap();
    assert!(out.converged, "no convergence after {} steps", out.iterations);
    let inc = out.trace.max_energy_increase(5);
    assert!(inc <= 1e-12, "energy increase {inc:e}");
    let e = dirichlet_energy(&out.phi);
    assert!((e / (2.0 * PI * PI) - 1.0).abs() < 0.02, "dirichlet {e}");
    assert!(out.trace.records.iter().all(|r| r.defect < 1e-10));
}

#[test]
fn equivariant_seed_converges_to_a_non_geodesic_solution() {
    let g = Grid2D::new(32).unwrap();
    let (phi, psi) = seed(&SeedKind::Equivariant { k: 1 }, g, 3, 0).unwrap();
    let cfg = FlowConfig::at_bounds(g.h(), 20_000, 1e-6);
    let out = run_flow(phi, psi, &cfg).unwrap();
    assert!(out.converged);
    let r = el_residuals(&out.phi, &out.psi).unwrap();
    assert!(r.l2 < 1e-6);
    // the third component still depends on y only
    let n = g.n();
    for i in 0..n {
        for j in 0..n {
            let a = out.phi.at(i * n + j)[2];
            let b = out.phi.at(j)[2];
            assert!((a - b).abs() < 1e-12);
        }
    }
    let spread = (0..n).map(|j| out.phi.at(j)[2].abs()).fold(0.0, f64::max);
    assert!(spread > 0.1);
}

#[test]
fn small_coupled_random_seed_has_monotone_energy() {
    let g = Grid2D::new(32).unwrap();
    let kind = SeedKind::RandomSmooth {
        bandwidth: 2,
        amplitude: 0.3,
        spinor_amplitude: 0.01,
    };
    let (phi, psi) = seed(&kind, g, 3, 17).unwrap();
    let cfg = FlowConfig::at_bounds(g.h(), 400, 1e-8);
    let out = run_flow(phi, psi, &cfg).unwrap();
    assert!(out.trace.max_energy_increase(5) <= 1e-10);
    assert!(!out.psi.is_zero());
    assert!(tangency_defect(&out.phi, &out.psi).unwrap() < 1e-10);
    assert!(out.trace.records.iter().all(|r| r.defect < 1e-10));
}
