//! Uniform 1-D space and time grids, the sampled objects that live on them,
//! trapezoid quadrature and the Gaussian heat kernel.
//!
//! Space is the truncated line `[-L, L]` with Dirichlet-zero extension. Time
//! is split into cells `[t_k, t_{k+1})`; a [`SpaceTimeDeviation`] is constant
//! on each cell (its value is sampled at the left endpoint), while a [`Field`]
//! holds one profile per time node.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default half width of the truncated spatial domain.
pub const DEFAULT_HALF_WIDTH: f64 = 20.0;

/// `p(t, x) = (2 pi t)^{-1/2} exp(-x^2 / 2t)`.
pub fn heat_kernel(t: f64, x: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("heat kernel needs t > 0, got {t}")));
    }
    Ok(heat_kernel_unchecked(t, x))
}

#[inline]
pub(crate) fn heat_kernel_unchecked(t: f64, x: f64) -> f64 {
    (-x * x / (2.0 * t)).exp() / (2.0 * std::f64::consts::PI * t).sqrt()
}

/// `log p(t, x)`, finite far beyond the range where `p` underflows.
pub fn log_heat_kernel(t: f64, x: f64) -> f64 {
    -x * x / (2.0 * t) - 0.5 * (2.0 * std::f64::consts::PI * t).ln()
}

/// Uniform grid on `[-L, L]` with an odd number of nodes, so `x = 0` is a node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceGrid {
    half_width: f64,
    n_points: usize,
}

impl SpaceGrid {
    pub fn new(half_width: f64, n_points: usize) -> Result<Self> {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::Grid(format!("half width must be positive, got {half_width}")));
        }
        if n_points < 3 || n_points % 2 == 0 {
            return Err(Error::Grid(format!("n_points must be odd and >= 3, got {n_points}")));
        }
        Ok(Self { half_width, n_points })
    }

    /// Grid on `[-L, L]` whose spacing is as close as possible to `dx`
    /// (rounded so that the node count is odd).
    pub fn with_spacing(half_width: f64, dx: f64) -> Result<Self> {
        if !(dx > 0.0) || !dx.is_finite() {
            return Err(Error::Grid(format!("spacing must be positive, got {dx}")));
        }
        let cells = (half_width / dx).round().max(1.0) as usize;
        Self::new(half_width, 2 * cells + 1)
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / (self.n_points - 1) as f64
    }

    /// Index of the node at `x = 0`.
    pub fn center(&self) -> usize {
        (self.n_points - 1) / 2
    }

    /// Node `i`, computed as `(i - center) * dx` so mirrored nodes are exact negatives.
    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        (i as f64 - self.center() as f64) * self.dx()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.x(i)).collect()
    }

    /// Trapezoid weights; the two wall nodes get `dx / 2`.
    pub fn weight(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.n_points {
            0.5 * self.dx()
        } else {
            self.dx()
        }
    }

    /// Trapezoid integral of node values.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.n_points);
        let n = values.len();
        let interior: f64 = values[1..n - 1].iter().sum();
        self.dx() * (interior + 0.5 * (values[0] + values[n - 1]))
    }

    /// Linear interpolation of node values at `x`, zero outside `[-L, L]`.
    pub fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        let dx = self.dx();
        let u = (x + self.half_width) / dx;
        if !(u >= 0.0) || u > (self.n_points - 1) as f64 {
            return 0.0;
        }
        let i = (u.floor() as usize).min(self.n_points - 2);
        let frac = u - i as f64;
        values[i] * (1.0 - frac) + values[i + 1] * frac
    }

    /// Index of the node nearest to `x`, if `x` lies within the grid.
    pub fn nearest(&self, x: f64) -> Option<usize> {
        let u = ((x + self.half_width) / self.dx()).round();
        if u < 0.0 || u > (self.n_points - 1) as f64 {
            None
        } else {
            Some(u as usize)
        }
    }
}

/// Uniform time grid `t_start = t_0 < t_1 < ... < t_n = t_end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    t_start: f64,
    t_end: f64,
    n_steps: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, n_steps: usize) -> Result<Self> {
        if !(t_start >= 0.0) || !(t_end > t_start) || !t_end.is_finite() {
            return Err(Error::Grid(format!(
                "time grid needs t_end > t_start >= 0, got [{t_start}, {t_end}]"
            )));
        }
        if n_steps == 0 {
            return Err(Error::Grid("time grid needs at least one step".into()));
        }
        Ok(Self { t_start, t_end, n_steps })
    }

    /// Grid on `[t_start, t_end]` with step as close as possible to `dt`.
    pub fn with_step(t_start: f64, t_end: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::Grid(format!("time step must be positive, got {dt}")));
        }
        let n = ((t_end - t_start) / dt).round().max(1.0) as usize;
        Self::new(t_start, t_end, n)
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn dt(&self) -> f64 {
        (self.t_end - self.t_start) / self.n_steps as f64
    }

    #[inline]
    pub fn t(&self, k: usize) -> f64 {
        if k == self.n_steps {
            self.t_end
        } else {
            self.t_start + k as f64 * self.dt()
        }
    }

    /// Index of the time node nearest to `t`, if within the grid.
    pub fn nearest(&self, t: f64) -> Option<usize> {
        let u = ((t - self.t_start) / self.dt()).round();
        if u < 0.0 || u > self.n_steps as f64 {
            None
        } else {
            Some(u as usize)
        }
    }

    /// Cell containing `t` (the last cell for `t = t_end`).
    pub fn cell_of(&self, t: f64) -> usize {
        let u = ((t - self.t_start) / self.dt()).floor();
        (u.max(0.0) as usize).min(self.n_steps - 1)
    }
}

/// A time-independent potential sampled on a [`SpaceGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    grid: SpaceGrid,
    values: Vec<f64>,
}

impl Potential {
    pub fn new(grid: SpaceGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::Grid(format!(
                "potential has {} values for {} nodes",
                values.len(),
                grid.n_points()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::domain(format!("potential value at node {i} is not finite")));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: SpaceGrid, f: impl Fn(f64) -> f64) -> Self {
        let values = (0..grid.n_points()).map(|i| f(grid.x(i))).collect();
        Self { grid, values }
    }

    pub fn zeros(grid: SpaceGrid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.n_points()],
        }
    }

    pub fn grid(&self) -> &SpaceGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn at(&self, x: f64) -> f64 {
        self.grid.interpolate(&self.values, x)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    pub fn integrate(&self) -> f64 {
        self.grid.integrate(&self.values)
    }

    /// Trapezoid inner product.
    pub fn dot(&self, other: &Potential) -> f64 {
        let prod: Vec<f64> = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        self.grid.integrate(&prod)
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Trapezoid approximation of `(int f^2 dx)^{1/2}`.
pub fn l2_norm_space(f: &Potential) -> f64 {
    let sq: Vec<f64> = f.values.iter().map(|v| v * v).collect();
    f.grid.integrate(&sq).max(0.0).sqrt()
}

/// A space-time deviation `rho(t, x)`, constant on each time cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeDeviation {
    tgrid: TimeGrid,
    sgrid: SpaceGrid,
    values: Vec<f64>,
}

impl SpaceTimeDeviation {
    pub fn new(tgrid: TimeGrid, sgrid: SpaceGrid, values: Vec<f64>) -> Result<Self> {
        let expected = tgrid.n_steps() * sgrid.n_points();
        if values.len() != expected {
            return Err(Error::Grid(format!("deviation has {} values, expected {expected}", values.len())));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::domain(format!("deviation value {i} is not finite")));
        }
        Ok(Self { tgrid, sgrid, values })
    }

    pub fn zeros(tgrid: TimeGrid, sgrid: SpaceGrid) -> Self {
        Self {
            tgrid,
            sgrid,
            values: vec![0.0; tgrid.n_steps() * sgrid.n_points()],
        }
    }

    /// Samples `f(t_k, x_i)` at the left endpoint of each time cell.
    pub fn from_fn(tgrid: TimeGrid, sgrid: SpaceGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(tgrid.n_steps() * sgrid.n_points());
        for k in 0..tgrid.n_steps() {
            let t = tgrid.t(k);
            values.extend((0..sgrid.n_points()).map(|i| f(t, sgrid.x(i))));
        }
        Self { tgrid, sgrid, values }
    }

    /// `rho(t, x) = phi(x)` for every cell.
    pub fn constant_in_time(tgrid: TimeGrid, phi: &Potential) -> Self {
        let mut values = Vec::with_capacity(tgrid.n_steps() * phi.grid.n_points());
        for _ in 0..tgrid.n_steps() {
            values.extend_from_slice(&phi.values);
        }
        Self {
            tgrid,
            sgrid: phi.grid,
            values,
        }
    }

    pub fn tgrid(&self) -> &TimeGrid {
        &self.tgrid
    }

    pub fn sgrid(&self) -> &SpaceGrid {
        &self.sgrid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn slice(&self, k: usize) -> &[f64] {
        let n = self.sgrid.n_points();
        &self.values[k * n..(k + 1) * n]
    }

    pub fn slice_mut(&mut self, k: usize) -> &mut [f64] {
        let n = self.sgrid.n_points();
        &mut self.values[k * n..(k + 1) * n]
    }

    /// Slice `k` as a [`Potential`].
    pub fn potential_at(&self, k: usize) -> Potential {
        Potential {
            grid: self.sgrid,
            values: self.slice(k).to_vec(),
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            tgrid: self.tgrid,
            sgrid: self.sgrid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.tgrid != other.tgrid || self.sgrid != other.sgrid {
            return Err(Error::Grid("deviations live on different grids".into()));
        }
        Ok(Self {
            tgrid: self.tgrid,
            sgrid: self.sgrid,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    /// Space-time inner product (trapezoid in space, rectangle in time).
    pub fn dot(&self, other: &Self) -> f64 {
        let n = self.sgrid.n_points();
        let dt = self.tgrid.dt();
        let mut total = 0.0;
        for k in 0..self.tgrid.n_steps() {
            let a = &self.values[k * n..(k + 1) * n];
            let b = &other.values[k * n..(k + 1) * n];
            let mut s = 0.5 * (a[0] * b[0] + a[n - 1] * b[n - 1]);
            for i in 1..n - 1 {
                s += a[i] * b[i];
            }
            total += s;
        }
        total * self.sgrid.dx() * dt
    }
}

/// Trapezoid-in-space, left-rectangle-in-time approximation of `||rho||_{L^2}`.
pub fn l2_norm_spacetime(rho: &SpaceTimeDeviation) -> f64 {
    rho.dot(rho).max(0.0).sqrt()
}

/// A solution surface `Z(t, x)` with one profile per time node.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    tgrid: TimeGrid,
    sgrid: SpaceGrid,
    values: Vec<f64>,
    strictly_positive: bool,
}

impl Field {
    pub fn new(tgrid: TimeGrid, sgrid: SpaceGrid, values: Vec<f64>) -> Result<Self> {
        let expected = (tgrid.n_steps() + 1) * sgrid.n_points();
        if values.len() != expected {
            return Err(Error::Grid(format!("field has {} values, expected {expected}", values.len())));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::domain(format!("field value {i} is not finite")));
        }
        let n = sgrid.n_points();
        let strictly_positive = values.chunks(n).all(|row| row[1..n - 1].iter().all(|&v| v > 0.0));
        Ok(Self {
            tgrid,
            sgrid,
            values,
            strictly_positive,
        })
    }

    pub fn tgrid(&self) -> &TimeGrid {
        &self.tgrid
    }

    pub fn sgrid(&self) -> &SpaceGrid {
        &self.sgrid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// True when every interior node is positive (the walls carry the
    /// Dirichlet zero).
    pub fn strictly_positive(&self) -> bool {
        self.strictly_positive
    }

    /// Profile at time node `k`.
    pub fn slice(&self, k: usize) -> &[f64] {
        let n = self.sgrid.n_points();
        &self.values[k * n..(k + 1) * n]
    }

    pub fn profile(&self, k: usize) -> Potential {
        Potential {
            grid: self.sgrid,
            values: self.slice(k).to_vec(),
        }
    }

    pub fn value(&self, k: usize, i: usize) -> f64 {
        self.values[k * self.sgrid.n_points() + i]
    }

    /// Value at time node `k`, interpolated linearly in space.
    pub fn at_node(&self, k: usize, x: f64) -> f64 {
        self.sgrid.interpolate(self.slice(k), x)
    }

    /// Value at the time node nearest to `t`, interpolated in space.
    pub fn at(&self, t: f64, x: f64) -> Option<f64> {
        self.tgrid.nearest(t).map(|k| self.at_node(k, x))
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Smallest value over interior nodes of rows `k >= from`.
    pub fn interior_min(&self, from: usize) -> f64 {
        let n = self.sgrid.n_points();
        self.values
            .chunks(n)
            .skip(from)
            .flat_map(|row| row[1..n - 1].iter().copied())
            .fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sech2(x: f64) -> f64 {
        let c = x.cosh();
        1.0 / (c * c)
    }

    #[test]
    fn heat_kernel_values() {
        assert!((heat_kernel(2.0, 0.0).unwrap() - 0.2820947918).abs() < 1e-10);
        assert!((heat_kernel(1.0, 0.0).unwrap() - 0.3989422804).abs() < 1e-10);
        assert!(heat_kernel(0.0, 1.0).is_err());
        assert!(heat_kernel(-1.0, 1.0).is_err());
    }

    #[test]
    fn heat_kernel_normalizes() {
        let g = SpaceGrid::with_spacing(20.0, 0.01).unwrap();
        let p = Potential::from_fn(g, |x| heat_kernel(0.5, x).unwrap());
        assert!((p.integrate() - 1.0).abs() < 1e-6);
        // L >= 10 sqrt(t) for t up to 4.
        for t in [0.1, 1.0, 4.0] {
            let p = Potential::from_fn(g, |x| heat_kernel(t, x).unwrap());
            assert!((p.integrate() - 1.0).abs() < 1e-6, "t = {t}");
        }
    }

    #[test]
    fn grid_is_symmetric() {
        for n in [3, 5, 401, 4001] {
            let g = SpaceGrid::new(20.0, n).unwrap();
            for i in 0..n {
                assert_eq!(g.x(i), -g.x(n - 1 - i));
            }
            assert_eq!(g.x(g.center()), 0.0);
        }
        assert!(SpaceGrid::new(20.0, 4).is_err());
        assert!(SpaceGrid::new(20.0, 1).is_err());
        assert!(SpaceGrid::new(-1.0, 5).is_err());
    }

    #[test]
    fn space_norms() {
        let g = SpaceGrid::with_spacing(20.0, 0.01).unwrap();
        let s = Potential::from_fn(g, sech2);
        assert!((l2_norm_space(&s) - (4.0f64 / 3.0).sqrt()).abs() < 1e-6);
        assert_eq!(l2_norm_space(&Potential::zeros(g)), 0.0);
        let ind = Potential::from_fn(g, |x| if x.abs() <= 1.0 + 1e-12 { 1.0 } else { 0.0 });
        assert!((l2_norm_space(&ind) - 2f64.sqrt()).abs() < g.dx());
        let scaled = s.scaled(-3.5);
        assert!((l2_norm_space(&scaled) - 3.5 * l2_norm_space(&s)).abs() < 1e-14);
    }

    #[test]
    fn spacetime_norms() {
        let g = SpaceGrid::with_spacing(20.0, 0.01).unwrap();
        let tg = TimeGrid::with_step(0.0, 2.0, 0.01).unwrap();
        let rho = SpaceTimeDeviation::from_fn(tg, g, |_, x| sech2(x));
        assert!((l2_norm_spacetime(&rho) - (8.0f64 / 3.0).sqrt()).abs() < 1e-4);
        assert_eq!(l2_norm_spacetime(&SpaceTimeDeviation::zeros(tg, g)), 0.0);
        let tg1 = TimeGrid::with_step(0.0, 1.0, 0.01).unwrap();
        let c = 0.7;
        let box_ = SpaceTimeDeviation::from_fn(tg1, g, |_, x| if x.abs() <= 1.0 + 1e-12 { c } else { 0.0 });
        assert!((l2_norm_spacetime(&box_) - c * 2f64.sqrt()).abs() < g.dx());
    }

    #[test]
    fn interpolation_matches_nodes() {
        let g = SpaceGrid::new(2.0, 21).unwrap();
        let p = Potential::from_fn(g, |x| x * x);
        for i in 0..21 {
            assert!((p.at(g.x(i)) - p.values()[i]).abs() < 1e-12);
        }
        assert_eq!(p.at(5.0), 0.0);
    }

    #[test]
    fn rejects_bad_values() {
        let g = SpaceGrid::new(1.0, 3).unwrap();
        assert!(Potential::new(g, vec![0.0, f64::NAN, 0.0]).is_err());
        assert!(Potential::new(g, vec![0.0; 4]).is_err());
        assert!(TimeGrid::new(1.0, 1.0, 3).is_err());
    }
}
