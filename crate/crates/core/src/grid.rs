//! Discrete calculus on the flat torus `[0,1)^2`.
//!
//! Every field lives on a uniform periodic `n x n` grid. Grid point `(i, j)`
//! sits at `(x, y) = (i h, j h)` and is stored at flat index `i * n + j`
//! (row-major in `(i, j)`, `i` runs along the x axis). Each point carries a
//! fiber of `ncomp` values of type `T` (real or complex).
//!
//! First derivatives are second-order centered differences with periodic
//! wraparound, so `D^T = -D` holds exactly and summation by parts is exact.
//! The Laplacian is the 5-point stencil; [`laplacian_composed`] is the wide
//! stencil `D_x D_x + D_y D_y` that the Dirac operator squares to.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{LabError, Result};

/// Smallest admissible number of points per axis.
pub const MIN_POINTS: usize = 8;

/// Uniform periodic discretization of the unit torus.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid2D {
    n: usize,
    h: f64,
}

impl Grid2D {
    pub fn new(n: usize) -> Result<Self> {
        if n < MIN_POINTS {
            return Err(LabError::InvalidGrid(format!(
                "n = {n} is below the minimum of {MIN_POINTS}"
            )));
        }
        let h = 1.0 / n as f64;
        if h * n as f64 != 1.0 {
            return Err(LabError::InvalidGrid(format!(
                "n = {n} does not satisfy h * n == 1 in f64"
            )));
        }
        Ok(Self { n, h })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn h(&self) -> f64 {
        self.h
    }

    /// Number of grid points, `n^2`.
    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n + j
    }

    /// Flat index of `(i + di, j + dj)` with periodic wraparound.
    #[inline]
    pub fn shifted(&self, i: usize, j: usize, di: isize, dj: isize) -> usize {
        let n = self.n as isize;
        let ii = (i as isize + di).rem_euclid(n) as usize;
        let jj = (j as isize + dj).rem_euclid(n) as usize;
        self.index(ii, jj)
    }

    #[inline]
    pub fn coords(&self, k: usize) -> (f64, f64) {
        let (i, j) = (k / self.n, k % self.n);
        (i as f64 * self.h, j as f64 * self.h)
    }

    pub fn points(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        (0..self.len()).map(move |k| {
            let (x, y) = self.coords(k);
            (k, x, y)
        })
    }
}

/// Coordinate direction on the torus. `X` is axis 1, `Y` is axis 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub const BOTH: [Axis; 2] = [Axis::X, Axis::Y];

    /// Zero-based position (0 for x, 1 for y).
    pub fn slot(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
        }
    }
}

/// Scalar types that can populate a field fiber.
pub trait FieldValue:
    Copy
    + Default
    + PartialEq
    + std::fmt::Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<f64, Output = Self>
{
    fn modulus(self) -> f64;
    fn modulus_sqr(self) -> f64;
    fn is_finite_value(self) -> bool;
}

impl FieldValue for f64 {
    #[inline]
    fn modulus(self) -> f64 {
        self.abs()
    }
    #[inline]
    fn modulus_sqr(self) -> f64 {
        self * self
    }
    #[inline]
    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
}

impl FieldValue for Complex64 {
    #[inline]
    fn modulus(self) -> f64 {
        self.norm()
    }
    #[inline]
    fn modulus_sqr(self) -> f64 {
        self.norm_sqr()
    }
    #[inline]
    fn is_finite_value(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// A grid function with `ncomp` values of type `T` per point.
#[derive(Clone, Debug, PartialEq)]
pub struct Field<T> {
    grid: Grid2D,
    ncomp: usize,
    data: Vec<T>,
}

/// Real scalar field (one component per point).
pub type ScalarField = Field<f64>;

impl<T: FieldValue> Field<T> {
    pub fn zeros(grid: Grid2D, ncomp: usize) -> Self {
        Self {
            grid,
            ncomp,
            data: vec![T::default(); grid.len() * ncomp],
        }
    }

    pub fn from_vec(grid: Grid2D, ncomp: usize, data: Vec<T>) -> Result<Self> {
        if ncomp == 0 || data.len() != grid.len() * ncomp {
            return Err(LabError::Mismatch(format!(
                "expected {} values ({} points x {ncomp}), got {}",
                grid.len() * ncomp,
                grid.len(),
                data.len()
            )));
        }
        Ok(Self { grid, ncomp, data })
    }

    /// Builds a field by evaluating `f(x, y, fiber)` at every grid point.
    pub fn from_fn(grid: Grid2D, ncomp: usize, mut f: impl FnMut(f64, f64, &mut [T])) -> Self {
        let mut out = Self::zeros(grid, ncomp);
        for (k, x, y) in grid.points() {
            f(x, y, out.at_mut(k));
        }
        out
    }

    #[inline]
    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    #[inline]
    pub fn ncomp(&self) -> usize {
        self.ncomp
    }

    #[inline]
    pub fn data(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    /// Fiber at flat index `k`.
    #[inline]
    pub fn at(&self, k: usize) -> &[T] {
        &self.data[k * self.ncomp..(k + 1) * self.ncomp]
    }

    #[inline]
    pub fn at_mut(&mut self, k: usize) -> &mut [T] {
        let c = self.ncomp;
        &mut self.data[k * c..(k + 1) * c]
    }

    pub fn same_shape(&self, other: &Field<T>) -> bool {
        self.grid == other.grid && self.ncomp == other.ncomp
    }

    pub fn check_same_shape(&self, other: &Field<T>) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(LabError::Mismatch(format!(
                "n = {} x {} components vs n = {} x {} components",
                self.grid.n(),
                self.ncomp,
                other.grid.n(),
                other.ncomp
            )))
        }
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            grid: self.grid,
            ncomp: self.ncomp,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// `self + s * other`, componentwise.
    pub fn axpy(&self, s: f64, other: &Field<T>) -> Self {
        debug_assert!(self.same_shape(other));
        Self {
            grid: self.grid,
            ncomp: self.ncomp,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a + b * s)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Field<T>) -> Self {
        self.axpy(-1.0, other)
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|v| v * s)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite_value())
    }

    /// Largest pointwise Euclidean norm of the fiber.
    pub fn norm_linf(&self) -> f64 {
        (0..self.grid.len())
            .map(|k| self.at(k).iter().map(|v| v.modulus_sqr()).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    /// Discrete L2 norm, `sqrt(h^2 sum |f|^2)`.
    pub fn norm_l2(&self) -> f64 {
        let h2 = self.grid.h() * self.grid.h();
        (h2 * self.data.iter().map(|v| v.modulus_sqr()).sum::<f64>()).sqrt()
    }
}

impl ScalarField {
    pub fn scalar_from_fn(grid: Grid2D, f: impl Fn(f64, f64) -> f64) -> Self {
        Self::from_fn(grid, 1, |x, y, out| out[0] = f(x, y))
    }

    #[inline]
    pub fn value(&self, k: usize) -> f64 {
        self.data[k * self.ncomp]
    }

    pub fn max_value(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Discrete L2 inner product of two real fields, `h^2 sum f g`.
    pub fn dot(&self, other: &ScalarField) -> f64 {
        let h2 = self.grid.h() * self.grid.h();
        h2 * self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum::<f64>()
    }
}

#[inline]
fn wrap_pm(i: usize, n: usize) -> (usize, usize) {
    (if i == 0 { n - 1 } else { i - 1 }, if i + 1 == n { 0 } else { i + 1 })
}

/// Flat indices of the `-` and `+` neighbours of `(i, j)` along `axis`.
#[inline]
fn axis_neighbours(g: &Grid2D, i: usize, j: usize, axis: Axis) -> (usize, usize) {
    let n = g.n();
    match axis {
        Axis::X => {
            let (im, ip) = wrap_pm(i, n);
            (g.index(im, j), g.index(ip, j))
        }
        Axis::Y => {
            let (jm, jp) = wrap_pm(j, n);
            (g.index(i, jm), g.index(i, jp))
        }
    }
}

/// Discrete partial derivative along `axis` (centered, periodic).
pub fn derivative<T: FieldValue>(f: &Field<T>, axis: Axis) -> Field<T> {
    let g = *f.grid();
    let c = f.ncomp();
    let inv = 0.5 / g.h();
    let mut out = Field::zeros(g, c);
    let src = f.data();
    let dst = out.data_mut();
    for i in 0..g.n() {
        for j in 0..g.n() {
            let k = g.index(i, j);
            let (km, kp) = axis_neighbours(&g, i, j, axis);
            for m in 0..c {
                dst[k * c + m] = (src[kp * c + m] - src[km * c + m]) * inv;
            }
        }
    }
    out
}

/// Forward difference `(f(k + e) - f(k)) / h`; the edge gradient whose
/// squared norm is the Dirichlet form of [`laplacian`].
pub fn forward_difference<T: FieldValue>(f: &Field<T>, axis: Axis) -> Field<T> {
    let g = *f.grid();
    let c = f.ncomp();
    let inv = 1.0 / g.h();
    let mut out = Field::zeros(g, c);
    let src = f.data();
    let dst = out.data_mut();
    for i in 0..g.n() {
        for j in 0..g.n() {
            let k = g.index(i, j);
            let (_, kp) = axis_neighbours(&g, i, j, axis);
            for m in 0..c {
                dst[k * c + m] = (src[kp * c + m] - src[k * c + m]) * inv;
            }
        }
    }
    out
}

/// 5-point Laplacian.
pub fn laplacian<T: FieldValue>(f: &Field<T>) -> Field<T> {
    let g = *f.grid();
    let c = f.ncomp();
    let inv = 1.0 / (g.h() * g.h());
    let mut out = Field::zeros(g, c);
    let src = f.data();
    let dst = out.data_mut();
    for i in 0..g.n() {
        for j in 0..g.n() {
            let k = g.index(i, j);
            let (xm, xp) = axis_neighbours(&g, i, j, Axis::X);
            let (ym, yp) = axis_neighbours(&g, i, j, Axis::Y);
            for m in 0..c {
                let sum = src[xp * c + m] + src[xm * c + m] + src[yp * c + m] + src[ym * c + m];
                dst[k * c + m] = (sum - src[k * c + m] * 4.0) * inv;
            }
        }
    }
    out
}

/// Wide Laplacian `D_x D_x + D_y D_y` built from the centered derivative.
pub fn laplacian_composed<T: FieldValue>(f: &Field<T>) -> Field<T> {
    let dxx = derivative(&derivative(f, Axis::X), Axis::X);
    let dyy = derivative(&derivative(f, Axis::Y), Axis::Y);
    dxx.axpy(1.0, &dyy)
}

/// Displacement `q - p` on the torus, each coordinate reduced to `[-1/2, 1/2)`.
pub fn torus_displacement(p: (f64, f64), q: (f64, f64)) -> (f64, f64) {
    let wrap = |d: f64| d - (d + 0.5).floor();
    (wrap(q.0 - p.0), wrap(q.1 - p.1))
}

pub fn torus_distance(p: (f64, f64), q: (f64, f64)) -> f64 {
    let (dx, dy) = torus_displacement(p, q);
    dx.hypot(dy)
}

/// A disc on the torus that fits in one fundamental-domain chart.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiscRegion {
    center: (f64, f64),
    radius: f64,
}

impl DiscRegion {
    pub fn new(center: (f64, f64), radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius < 0.5) {
            return Err(LabError::InvalidRegion(format!(
                "disc radius {radius} must lie in (0, 1/2)"
            )));
        }
        if !(center.0.is_finite() && center.1.is_finite()) {
            return Err(LabError::InvalidRegion("non-finite disc center".into()));
        }
        let center = (center.0.rem_euclid(1.0), center.1.rem_euclid(1.0));
        Ok(Self { center, radius })
    }

    pub fn center(&self) -> (f64, f64) {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn contains(&self, p: (f64, f64)) -> bool {
        torus_distance(self.center, p) <= self.radius
    }

    /// Same center, radius multiplied by `factor`.
    pub fn shrink(&self, factor: f64) -> Result<Self> {
        Self::new(self.center, self.radius * factor)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Region {
    Torus,
    Disc(DiscRegion),
}

/// Quadrature of a scalar field: `h^2`-weighted sum over the torus or over
/// the grid points inside a disc (sharp indicator weight).
pub fn integrate(f: &ScalarField, region: Region) -> f64 {
    let g = f.grid();
    let h2 = g.h() * g.h();
    let sum: f64 = match region {
        Region::Torus => (0..g.len()).map(|k| f.value(k)).sum(),
        Region::Disc(d) => g
            .points()
            .filter(|&(_, x, y)| d.contains((x, y)))
            .map(|(k, _, _)| f.value(k))
            .sum(),
    };
    h2 * sum
}

/// Bilinear interpolation of `f` at `m` equally spaced points on the circle
/// `center + r (cos t_j, sin t_j)`, `t_j = 2 pi j / m`.
pub fn sample_circle<T: FieldValue>(
    f: &Field<T>,
    center: (f64, f64),
    r: f64,
    m: usize,
) -> Result<Vec<Vec<T>>> {
    let g = f.grid();
    if !(r > 0.0) || r + 2.0 * g.h() >= 0.5 {
        return Err(LabError::ChartBoundary { radius: r });
    }
    Ok((0..m)
        .map(|j| {
            let t = 2.0 * PI * j as f64 / m as f64;
            interpolate(f, (center.0 + r * t.cos(), center.1 + r * t.sin()))
        })
        .collect())
}

/// Bilinear interpolation at an arbitrary point (periodic).
pub fn interpolate<T: FieldValue>(f: &Field<T>, p: (f64, f64)) -> Vec<T> {
    let g = f.grid();
    let n = g.n() as isize;
    let u = p.0 / g.h();
    let v = p.1 / g.h();
    let (i0, j0) = (u.floor(), v.floor());
    let (a, b) = (u - i0, v - j0);
    let (i0, j0) = (
        (i0 as isize).rem_euclid(n) as usize,
        (j0 as isize).rem_euclid(n) as usize,
    );
    let corners = [
        (g.index(i0, j0), (1.0 - a) * (1.0 - b)),
        (g.shifted(i0, j0, 1, 0), a * (1.0 - b)),
        (g.shifted(i0, j0, 0, 1), (1.0 - a) * b),
        (g.shifted(i0, j0, 1, 1), a * b),
    ];
    (0..f.ncomp())
        .map(|c| {
            corners
                .iter()
                .fold(T::default(), |acc, &(k, w)| acc + f.at(k)[c] * w)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Grid2D {
        Grid2D::new(n).unwrap()
    }

    fn smooth(x: f64, y: f64, phase: f64) -> f64 {
        (2.0 * PI * x + phase).sin() * (2.0 * PI * y).cos() + 0.3 * (4.0 * PI * (x + y)).cos()
    }

    #[test]
    fn grid_guards() {
        assert!(Grid2D::new(4).is_err());
        assert!(Grid2D::new(8).is_ok());
        let g = grid(64);
        assert_eq!(g.h() * g.n() as f64, 1.0);
        assert_eq!(g.shifted(0, 0, -1, 0), g.index(63, 0));
    }

    #[test]
    fn derivative_of_constant_vanishes() {
        let f = ScalarField::scalar_from_fn(grid(16), |_, _| 3.7);
        assert!(derivative(&f, Axis::X).norm_linf() == 0.0);
        assert!(derivative(&f, Axis::Y).norm_linf() == 0.0);
    }

    #[test]
    fn derivative_of_sine_is_second_order() {
        let n = 64;
        let g = grid(n);
        let f = ScalarField::scalar_from_fn(g, |x, _| (2.0 * PI * x).sin());
        let d = derivative(&f, Axis::X);
        let h = g.h();
        let bound = h * h * (2.0 * PI).powi(3);
        for (k, x, _) in g.points() {
            let exact = 2.0 * PI * (2.0 * PI * x).cos();
            assert!((d.value(k) - exact).abs() <= bound);
        }
        let dy = derivative(&f, Axis::Y);
        assert!(dy.norm_linf() == 0.0);
    }

    #[test]
    fn laplacian_of_sine() {
        let g = grid(64);
        let f = ScalarField::scalar_from_fn(g, |x, _| (2.0 * PI * x).sin());
        let l = laplacian(&f);
        let bound = g.h() * g.h() * (2.0 * PI).powi(4);
        for (k, x, _) in g.points() {
            let exact = -4.0 * PI * PI * (2.0 * PI * x).sin();
            assert!((l.value(k) - exact).abs() <= bound);
        }
        let c = ScalarField::scalar_from_fn(g, |_, _| -2.5);
        assert!(laplacian(&c).norm_linf() < 1e-12);
    }

    #[test]
    fn laplacian_is_symmetric() {
        let g = grid(32);
        let f = ScalarField::scalar_from_fn(g, |x, y| smooth(x, y, 0.3));
        let h = ScalarField::scalar_from_fn(g, |x, y| smooth(y, x, 1.1) * (2.0 * PI * x).cos());
        let a = laplacian(&f).dot(&h);
        let b = f.dot(&laplacian(&h));
        let scale = laplacian(&f).norm_l2() * h.norm_l2();
        assert!((a - b).abs() <= 1e-12 * scale);
    }

    #[test]
    fn composed_laplacian_matches_wide_stencil() {
        let g = grid(16);
        let f = ScalarField::scalar_from_fn(g, |x, y| smooth(x, y, 0.7));
        let l = laplacian_composed(&f);
        let h = g.h();
        for i in 0..g.n() {
            for j in 0..g.n() {
                let c = f.value(g.index(i, j));
                let s = f.value(g.shifted(i, j, 2, 0))
                    + f.value(g.shifted(i, j, -2, 0))
                    + f.value(g.shifted(i, j, 0, 2))
                    + f.value(g.shifted(i, j, 0, -2));
                let wide = (s - 4.0 * c) / (4.0 * h * h);
                assert!((l.value(g.index(i, j)) - wide).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn integrate_unit_area_and_mean_zero() {
        let g = grid(64);
        let one = ScalarField::scalar_from_fn(g, |_, _| 1.0);
        assert!((integrate(&one, Region::Torus) - 1.0).abs() < 1e-14);
        let s = ScalarField::scalar_from_fn(g, |x, _| (2.0 * PI * x).sin());
        assert!(integrate(&s, Region::Torus).abs() < 1e-12);
    }

    #[test]
    fn disc_area_is_first_order() {
        for &n in &[64, 128, 256] {
            let g = grid(n);
            let one = ScalarField::scalar_from_fn(g, |_, _| 1.0);
            let r = 0.3;
            let d = DiscRegion::new((0.5, 0.5), r).unwrap();
            let area = integrate(&one, Region::Disc(d));
            let exact = PI * r * r;
            // boundary layer of width ~h along a circle of length 2 pi r
            assert!((area - exact).abs() <= 2.0 * PI * r * g.h(), "n={n}");
        }
    }

    #[test]
    fn disc_wraps_around_the_torus() {
        let d = DiscRegion::new((0.02, 0.98), 0.1).unwrap();
        assert!(d.contains((0.97, 0.03)));
        assert!(!d.contains((0.5, 0.5)));
        assert!(DiscRegion::new((0.5, 0.5), 0.5).is_err());
        assert!(DiscRegion::new((0.5, 0.5), 0.0).is_err());
    }

    #[test]
    fn sample_circle_layout_and_accuracy() {
        let g = grid(64);
        let c = ScalarField::scalar_from_fn(g, |_, _| 2.25);
        for v in sample_circle(&c, (0.3, 0.6), 0.2, 16).unwrap() {
            assert!((v[0] - 2.25).abs() < 1e-14);
        }
        // f = x is not periodic, but the circle stays inside one chart,
        // where bilinear interpolation of a linear function is exact.
        let fx = ScalarField::scalar_from_fn(g, |x, _| x);
        let m = 32;
        let s = sample_circle(&fx, (0.5, 0.5), 0.1, m).unwrap();
        for (j, v) in s.iter().enumerate() {
            let t = 2.0 * PI * j as f64 / m as f64;
            assert!((v[0] - (0.5 + 0.1 * t.cos())).abs() < g.h() * g.h());
        }
        // m = 4 samples at angles 0, pi/2, pi, 3pi/2
        let fy = ScalarField::scalar_from_fn(g, |_, y| y);
        let s = sample_circle(&fy, (0.5, 0.5), 0.125, 4).unwrap();
        let expect = [0.5, 0.625, 0.5, 0.375];
        for (v, e) in s.iter().zip(expect) {
            assert!((v[0] - e).abs() < 1e-12);
        }
    }

    #[test]
    fn sample_circle_rejects_chart_boundary() {
        let g = grid(32);
        let f = ScalarField::zeros(g, 1);
        assert!(matches!(
            sample_circle(&f, (0.5, 0.5), 0.49, 8),
            Err(LabError::ChartBoundary { .. })
        ));
    }

    #[test]
    fn summation_by_parts_is_exact() {
        let g = grid(32);
        let f = ScalarField::scalar_from_fn(g, |x, y| smooth(x, y, 0.2));
        let h = ScalarField::scalar_from_fn(g, |x, y| smooth(x + 0.1, y * 2.0, 0.9));
        for axis in Axis::BOTH {
            let lhs = f.dot(&derivative(&h, axis));
            let rhs = -derivative(&f, axis).dot(&h);
            assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
        }
    }

    #[test]
    fn derivative_and_laplacian_converge_at_second_order() {
        let err = |n: usize| {
            let g = grid(n);
            let f = ScalarField::scalar_from_fn(g, |x, y| (2.0 * PI * x).sin() * (2.0 * PI * y).cos());
            let d = derivative(&f, Axis::X);
            let l = laplacian(&f);
            let mut ed: f64 = 0.0;
            let mut el: f64 = 0.0;
            for (k, x, y) in g.points() {
                let dx = 2.0 * PI * (2.0 * PI * x).cos() * (2.0 * PI * y).cos();
                let lap = -8.0 * PI * PI * f.value(k);
                ed = ed.max((d.value(k) - dx).abs());
                el = el.max((l.value(k) - lap).abs());
            }
            (ed, el)
        };
        let (d1, l1) = err(32);
        let (d2, l2) = err(64);
        assert!(d1 / d2 >= 3.8, "derivative ratio {}", d1 / d2);
        assert!(l1 / l2 >= 3.8, "laplacian ratio {}", l1 / l2);
    }
}
