//! Band-limited random fields on the torus.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::grid::{Field, Grid2D};

/// The generator used everywhere a seed is accepted.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One random trigonometric polynomial with wave numbers
/// `|k_x|, |k_y| <= bandwidth`, coefficients damped by `1 / (1 + |k|^2)`.
struct Modes {
    terms: Vec<(f64, f64, f64, f64)>,
}

impl Modes {
    fn sample<R: Rng>(bandwidth: usize, rng: &mut R) -> Self {
        let b = bandwidth as i64;
        let mut terms = Vec::new();
        for kx in -b..=b {
            for ky in 0..=b {
                if ky == 0 && kx < 0 {
                    continue;
                }
                let damp = 1.0 / (1.0 + (kx * kx + ky * ky) as f64);
                let a: f64 = rng.sample(StandardNormal);
                let c: f64 = rng.sample(StandardNormal);
                terms.push((kx as f64, ky as f64, a * damp, c * damp));
            }
        }
        Self { terms }
    }

    fn eval(&self, x: f64, y: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(kx, ky, a, c)| {
                let t = 2.0 * PI * (kx * x + ky * y);
                a * t.cos() + c * t.sin()
            })
            .sum()
    }
}

/// Real field with `ncomp` independent band-limited components, scaled so
/// that the largest component magnitude equals 1 (left as is when zero).
pub fn smooth_real<R: Rng>(grid: Grid2D, ncomp: usize, bandwidth: usize, rng: &mut R) -> Field<f64> {
    let modes: Vec<Modes> = (0..ncomp).map(|_| Modes::sample(bandwidth, rng)).collect();
    let f = Field::from_fn(grid, ncomp, |x, y, out| {
        for (o, m) in out.iter_mut().zip(&modes) {
            *o = m.eval(x, y);
        }
    });
    normalize(f)
}

/// Complex analogue of [`smooth_real`].
pub fn smooth_complex<R: Rng>(
    grid: Grid2D,
    ncomp: usize,
    bandwidth: usize,
    rng: &mut R,
) -> Field<Complex64> {
    let re: Vec<Modes> = (0..ncomp).map(|_| Modes::sample(bandwidth, rng)).collect();
    let im: Vec<Modes> = (0..ncomp).map(|_| Modes::sample(bandwidth, rng)).collect();
    let f = Field::from_fn(grid, ncomp, |x, y, out| {
        for (c, o) in out.iter_mut().enumerate() {
            *o = Complex64::new(re[c].eval(x, y), im[c].eval(x, y));
        }
    });
    let m = f.data().iter().map(|v| v.norm()).fold(0.0, f64::max);
    if m > 0.0 {
        f.scale(1.0 / m)
    } else {
        f
    }
}

fn normalize(f: Field<f64>) -> Field<f64> {
    let m = f.data().iter().map(|v| v.abs()).fold(0.0, f64::max);
    if m > 0.0 {
        f.scale(1.0 / m)
    } else {
        f
    }
}
