//! Brownian-bridge Monte Carlo for `E[exp(int phi(B))]`, bridge hitting
//! times and their Laplace asymptotics, and the limit shape `h*`.
//!
//! Every path draws from its own ChaCha8 stream (`seed`, stream = path index),
//! paths run in parallel, and the per-path results are reduced in path order
//! with a max-shifted log-sum-exp. Estimates are therefore bitwise identical
//! for any thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{log_heat_kernel, Potential, SpaceGrid, TimeGrid};
use crate::quad;
use crate::solver::{solve_delta_stationary, SolverConfig};
use crate::spectral::rho_star;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BridgeConfig {
    pub n_paths: usize,
    pub n_time_steps: usize,
    pub seed: u64,
}

impl BridgeConfig {
    /// `20 * duration` steps (at least 2), which keeps the trapezoid error
    /// along each path below the Monte Carlo noise.
    pub fn for_duration(n_paths: usize, duration: f64, seed: u64) -> Self {
        Self {
            n_paths,
            n_time_steps: ((20.0 * duration).ceil() as usize).max(2),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_paths < 1 {
            return Err(Error::Config("n_paths must be at least 1".into()));
        }
        if self.n_time_steps < 2 {
            return Err(Error::Config("n_time_steps must be at least 2".into()));
        }
        Ok(())
    }
}

/// Random stream of path `index`.
pub fn path_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// One exact bridge step from `y` at time `s` towards `to` at `duration`.
#[inline]
fn bridge_step<R: Rng>(y: f64, to: f64, s: f64, h: f64, duration: f64, rng: &mut R) -> f64 {
    let rest = duration - s;
    let mean = y + (to - y) * h / rest;
    let var = (h * (rest - h) / rest).max(0.0);
    let z: f64 = rng.sample(StandardNormal);
    mean + var.sqrt() * z
}

/// A discretized Brownian bridge from `from` at time 0 to `to` at `duration`,
/// `n_steps + 1` points with exactly pinned endpoints.
pub fn sample_bridge<R: Rng>(from: f64, to: f64, duration: f64, n_steps: usize, rng: &mut R) -> Result<Vec<f64>> {
    if !(duration > 0.0) {
        return Err(Error::domain(format!("bridge duration must be positive, got {duration}")));
    }
    if n_steps < 1 {
        return Err(Error::domain("a bridge needs at least one step"));
    }
    let h = duration / n_steps as f64;
    let mut path = Vec::with_capacity(n_steps + 1);
    let mut y = from;
    path.push(y);
    for j in 1..n_steps {
        y = bridge_step(y, to, (j - 1) as f64 * h, h, duration, rng);
        path.push(y);
    }
    path.push(to);
    Ok(path)
}

/// Trapezoid `int_0^duration phi(B(s)) ds` along one bridge, without storing it.
fn path_integral<R: Rng>(phi: &Potential, from: f64, to: f64, duration: f64, n_steps: usize, rng: &mut R) -> f64 {
    let h = duration / n_steps as f64;
    let mut y = from;
    let mut acc = 0.5 * phi.at(from);
    for j in 1..n_steps {
        y = bridge_step(y, to, (j - 1) as f64 * h, h, duration, rng);
        acc += phi.at(y);
    }
    acc += 0.5 * phi.at(to);
    acc * h
}

/// Summary of `E[exp(I)]` from per-path exponents `I`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogMeanExp {
    /// `log E[exp(I)]`.
    pub log_mean: f64,
    /// Standard error of the mean relative to the mean.
    pub rel_std_error: f64,
    /// `(sum w)^2 / sum w^2` with `w = exp(I)`.
    pub effective_sample_size: f64,
}

/// Max-shifted streaming reduction in the given (canonical) order.
pub fn log_mean_exp(exponents: &[f64]) -> LogMeanExp {
    let n = exponents.len() as f64;
    let m = exponents.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (mut s1, mut s2) = (0.0, 0.0);
    for &e in exponents {
        let w = (e - m).exp();
        s1 += w;
        s2 += w * w;
    }
    let mean = s1 / n;
    let var = (s2 / n - mean * mean).max(0.0);
    let rel = if exponents.len() > 1 {
        (var / (n - 1.0)).sqrt() / mean
    } else {
        0.0
    };
    LogMeanExp {
        log_mean: m + mean.ln(),
        rel_std_error: rel,
        effective_sample_size: s1 * s1 / s2,
    }
}

fn exponents(phi: &Potential, from: f64, to: f64, duration: f64, cfg: &BridgeConfig) -> Vec<f64> {
    (0..cfg.n_paths as u64)
        .into_par_iter()
        .map(|p| {
            let mut rng = path_rng(cfg.seed, p);
            path_integral(phi, from, to, duration, cfg.n_time_steps, &mut rng)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FkEstimate {
    pub mean: f64,
    pub std_error: f64,
    /// `log mean`, finite even when `mean` over- or underflows.
    pub log_mean: f64,
    pub effective_sample_size: f64,
}

/// `Z(phi; duration, to - from) = p(duration, to - from) E_{from -> to}[exp(int phi(B))]`.
pub fn fk_estimate(phi: &Potential, duration: f64, from: f64, to: f64, cfg: &BridgeConfig) -> Result<FkEstimate> {
    cfg.validate()?;
    if !(duration > 0.0) {
        return Err(Error::domain(format!("duration must be positive, got {duration}")));
    }
    let lme = log_mean_exp(&exponents(phi, from, to, duration, cfg));
    let log_mean = log_heat_kernel(duration, to - from) + lme.log_mean;
    let mean = log_mean.exp();
    Ok(FkEstimate {
        mean,
        std_error: mean * lme.rel_std_error,
        log_mean,
        effective_sample_size: lme.effective_sample_size,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthRate {
    pub rate: f64,
    /// Standard error of `rate` by the delta method.
    pub std_error: f64,
    pub effective_sample_size: f64,
}

/// `lambda^{-1} log E_{x -> 0}[exp(int_0^lambda phi(B(s)) ds)]`.
pub fn growth_rate(phi: &Potential, lambda: f64, x: f64, cfg: &BridgeConfig) -> Result<GrowthRate> {
    cfg.validate()?;
    if !(lambda >= 4.0) {
        return Err(Error::domain(format!("growth rate needs lambda >= 4, got {lambda}")));
    }
    if x.abs() > lambda.powf(0.25) * (1.0 + 1e-12) {
        return Err(Error::domain(format!("|x| = {} exceeds lambda^(1/4)", x.abs())));
    }
    let lme = log_mean_exp(&exponents(phi, x, 0.0, lambda, cfg));
    Ok(GrowthRate {
        rate: lme.log_mean / lambda,
        std_error: lme.rel_std_error / lambda,
        effective_sample_size: lme.effective_sample_size,
    })
}

/// Density of the first hitting time of 0 for the bridge from `lambda x` at
/// time 0 to 0 at time `lambda t`; zero outside `(0, lambda t)`.
pub fn hitting_density(s: f64, t: f64, x: f64, lambda: f64) -> f64 {
    let end = lambda * t;
    if !(s > 0.0 && s < end) || x == 0.0 {
        return 0.0;
    }
    let lx = lambda * x;
    ((lambda.powi(3) * t * x * x) / (2.0 * std::f64::consts::PI * s.powi(3) * (end - s))).sqrt()
        * (-(end - s) / (2.0 * end * s) * lx * lx).exp()
}

/// `int_a^b` of the hitting density, in the variable `u` with
/// `s = lambda t (1 - u^2)`, which removes the endpoint singularity.
pub fn hitting_probability(a: f64, b: f64, t: f64, x: f64, lambda: f64) -> f64 {
    let end = lambda * t;
    let (a, b) = (a.max(0.0), b.min(end));
    if !(b > a) {
        return 0.0;
    }
    let u_of = |s: f64| (1.0 - s / end).max(0.0).sqrt();
    let q = quad::integrate(
        |u| 2.0 * end * u * hitting_density(end * (1.0 - u * u), t, x, lambda),
        u_of(b),
        u_of(a),
        1e-15,
        1e-12,
        400,
    );
    q.value
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HittingHistogram {
    pub edges: Vec<f64>,
    /// Monte Carlo density per bin.
    pub empirical: Vec<f64>,
    /// Bin average of the exact density.
    pub expected: Vec<f64>,
    /// Binomial standard error of `empirical` under `expected`.
    pub std_error: Vec<f64>,
    pub n_paths: usize,
}

impl HittingHistogram {
    /// Largest `|empirical - expected|` in units of `max(std_error, one count)`.
    pub fn max_discrepancy(&self) -> f64 {
        let width = self.edges[1] - self.edges[0];
        let one_count = 1.0 / (self.n_paths as f64 * width);
        self.empirical
            .iter()
            .zip(&self.expected)
            .zip(&self.std_error)
            .map(|((e, x), s)| (e - x).abs() / s.max(one_count))
            .fold(0.0, f64::max)
    }
}

/// Histogram of first hitting times of 0 from sampled bridges. Each bin is
/// split into `substeps` bridge steps, and a crossing inside a step is
/// detected exactly with probability `exp(-2 a b / h)` for endpoints `a`, `b`
/// of equal sign, so bins carry no time-discretization bias.
pub fn hitting_time_histogram(t: f64, x: f64, lambda: f64, n_bins: usize, substeps: usize, cfg: &BridgeConfig) -> Result<HittingHistogram> {
    cfg.validate()?;
    if !(t > 0.0 && lambda > 0.0) || x == 0.0 || n_bins == 0 || substeps == 0 {
        return Err(Error::domain(
            "hitting histogram needs t, lambda > 0, x != 0 and positive bin counts",
        ));
    }
    let end = lambda * t;
    let width = end / n_bins as f64;
    let n_steps = n_bins * substeps;
    let h = end / n_steps as f64;
    let from = lambda * x;
    let bins: Vec<usize> = (0..cfg.n_paths as u64)
        .into_par_iter()
        .map(|p| {
            let mut rng = path_rng(cfg.seed, p);
            let mut y = from;
            for j in 0..n_steps {
                let next = if j + 1 == n_steps {
                    0.0
                } else {
                    bridge_step(y, 0.0, j as f64 * h, h, end, &mut rng)
                };
                let u: f64 = rng.random();
                if y * next <= 0.0 || u < (-2.0 * y * next / h).exp() {
                    return j / substeps;
                }
                y = next;
            }
            n_bins - 1
        })
        .collect();
    let mut counts = vec![0usize; n_bins];
    for b in bins {
        counts[b] += 1;
    }
    let n = cfg.n_paths as f64;
    let edges: Vec<f64> = (0..=n_bins).map(|k| k as f64 * width).collect();
    let mut expected = Vec::with_capacity(n_bins);
    let mut std_error = Vec::with_capacity(n_bins);
    for k in 0..n_bins {
        let p = hitting_probability(edges[k], edges[k + 1], t, x, lambda).clamp(0.0, 1.0);
        expected.push(p / width);
        std_error.push((p * (1.0 - p) / n).sqrt() / width);
    }
    Ok(HittingHistogram {
        edges,
        empirical: counts.iter().map(|&c| c as f64 / (n * width)).collect(),
        expected,
        std_error,
        n_paths: cfg.n_paths,
    })
}

/// `V_beta(s, t, x) = -beta t s - (1 - s) x^2 / (2 s t)`.
pub fn laplace_v(beta: f64, s: f64, t: f64, x: f64) -> Result<f64> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::domain(format!("V needs s in (0, 1], got {s}")));
    }
    if !(t > 0.0 && beta > 0.0) {
        return Err(Error::domain("V needs t > 0 and beta > 0"));
    }
    Ok(-beta * t * s - (1.0 - s) * x * x / (2.0 * s * t))
}

/// `d^2 V / ds^2 = -x^2 / (t s^3)`; negative, as it must be at the maximum.
pub fn laplace_v_dss(s: f64, t: f64, x: f64) -> Result<f64> {
    if !(s > 0.0 && t > 0.0) {
        return Err(Error::domain("second derivative needs s > 0 and t > 0"));
    }
    Ok(-x * x / (t * s.powi(3)))
}

/// Maximizer `min(|x| / (sqrt(2 beta) t), 1)` of `V_beta(., t, x)`.
pub fn laplace_argmax(beta: f64, t: f64, x: f64) -> f64 {
    (x.abs() / ((2.0 * beta).sqrt() * t)).min(1.0)
}

/// Limit of `lambda^{-1} log E[exp(-beta T(lambda t, lambda x))]`:
/// `V_beta` at its maximizer (0 when `x = 0`, where the bridge starts at 0).
pub fn laplace_logmgf(beta: f64, t: f64, x: f64) -> Result<f64> {
    if !(t > 0.0 && beta > 0.0) {
        return Err(Error::domain("log-mgf needs t > 0 and beta > 0"));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    laplace_v(beta, laplace_argmax(beta, t, x), t, x.abs())
}

/// `lambda^{-1} log E[exp(-beta T(lambda t, lambda x))]` at finite `lambda`,
/// by quadrature of the exact hitting-time integral over `s in (0, 1)`.
pub fn exact_logmgf(beta: f64, t: f64, x: f64, lambda: f64) -> Result<f64> {
    if !(t > 0.0 && beta > 0.0 && lambda > 0.0) {
        return Err(Error::domain("exact log-mgf needs t, beta, lambda > 0"));
    }
    let x = x.abs();
    if x == 0.0 {
        return Ok(0.0);
    }
    let s_star = laplace_argmax(beta, t, x);
    let v_max = laplace_v(beta, s_star, t, x)?;
    let pref = (lambda * x * x / (2.0 * std::f64::consts::PI * t)).sqrt();
    // s = 1 - u^2: the (1 - s)^{-1/2} endpoint singularity becomes 2 du.
    let integrand = |u: f64| {
        let s = 1.0 - u * u;
        if !(s > 0.0) {
            return 0.0;
        }
        let v = -beta * t * s - u * u * x * x / (2.0 * s * t);
        2.0 * pref * s.powf(-1.5) * (lambda * (v - v_max)).exp()
    };
    let u_star = (1.0 - s_star).max(0.0).sqrt();
    let width = (1.0 / lambda).sqrt();
    let q = quad::integrate_split(
        integrand,
        0.0,
        1.0,
        &[u_star - 3.0 * width, u_star, u_star + 3.0 * width],
        1e-300,
        1e-12,
    );
    if !(q.value > 0.0) {
        return Err(Error::domain("hitting-time integral vanished"));
    }
    Ok(v_max + q.value.ln() / lambda)
}

/// `h*(t, x) = t/2 - |x|` for `|x| <= t`, else `-x^2 / (2t)`.
pub fn h_star(t: f64, x: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::domain(format!("h* needs t > 0, got {t}")));
    }
    let ax = x.abs();
    Ok(if ax <= t { -ax + t / 2.0 } else { -x * x / (2.0 * t) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Pde,
    Mc,
}

impl std::str::FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pde" => Ok(Backend::Pde),
            "mc" => Ok(Backend::Mc),
            other => Err(Error::Config(format!("unknown backend '{other}' (expected pde or mc)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ShapeOptions {
    /// Spatial step of the PDE grid (original coordinates).
    pub dx: f64,
    /// Target time step of the PDE grid (original coordinates).
    pub dt: f64,
    /// Overrides the default half width `lambda / delta + 10 sqrt(2 lambda)`.
    pub half_width: Option<f64>,
    /// Output grid steps in `t` and `x`.
    pub t_step: f64,
    pub x_step: f64,
    pub n_paths: usize,
    pub seed: u64,
}

impl Default for ShapeOptions {
    fn default() -> Self {
        Self {
            dx: 0.05,
            dt: 0.01,
            half_width: None,
            t_step: 0.05,
            x_step: 0.05,
            n_paths: 20_000,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShapeProfile {
    pub lambda: f64,
    pub delta: f64,
    pub backend: Backend,
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    /// `h_lambda(t_j, x_i)` at index `j * x.len() + i`.
    pub values: Vec<f64>,
    /// Monte Carlo standard errors (zeros for the PDE backend).
    pub std_errors: Vec<f64>,
    pub sup_error: f64,
}

impl ShapeProfile {
    pub fn value(&self, j: usize, i: usize) -> f64 {
        self.values[j * self.x.len() + i]
    }
}

/// Multiples of `step` inside `[lo, hi]`.
fn lattice(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let first = (lo / step - 1e-9).ceil() as i64;
    let last = (hi / step + 1e-9).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

/// `h_lambda(rho*; t, x) = lambda^{-1} log(lambda^{1/2} Z(rho*; lambda t, lambda x))`
/// over `[delta, 2] x [-1/delta, 1/delta]`, with its sup distance to `h*`.
pub fn shape_profile(lambda: f64, delta: f64, backend: Backend, opts: &ShapeOptions) -> Result<ShapeProfile> {
    if !(lambda >= 4.0) {
        return Err(Error::domain(format!("shape profile needs lambda >= 4, got {lambda}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::domain(format!("delta must lie in (0, 1), got {delta}")));
    }
    if !(opts.t_step > 0.0 && opts.x_step > 0.0 && opts.dx > 0.0 && opts.dt > 0.0) {
        return Err(Error::Config("shape steps must be positive".into()));
    }
    let ts = lattice(delta, 2.0, opts.t_step);
    let xs = lattice(-1.0 / delta, 1.0 / delta, opts.x_step);
    if ts.is_empty() || xs.is_empty() {
        return Err(Error::Config("shape grid is empty".into()));
    }
    let (values, std_errors) = match backend {
        Backend::Pde => (shape_pde(lambda, delta, &ts, &xs, opts)?, vec![0.0; ts.len() * xs.len()]),
        Backend::Mc => shape_mc(lambda, &ts, &xs, opts)?,
    };
    let mut sup_error = 0.0f64;
    for (j, &t) in ts.iter().enumerate() {
        for (i, &x) in xs.iter().enumerate() {
            sup_error = sup_error.max((values[j * xs.len() + i] - h_star(t, x)?).abs());
        }
    }
    Ok(ShapeProfile {
        lambda,
        delta,
        backend,
        t: ts,
        x: xs,
        values,
        std_errors,
        sup_error,
    })
}

fn shape_pde(lambda: f64, delta: f64, ts: &[f64], xs: &[f64], opts: &ShapeOptions) -> Result<Vec<f64>> {
    let half_width = opts.half_width.unwrap_or(lambda / delta + 10.0 * (2.0 * lambda).sqrt());
    let sg = SpaceGrid::with_spacing(half_width, opts.dx)?;
    // Time step dividing lambda * t_step so every output time is a node.
    let per = (lambda * opts.t_step / opts.dt).ceil().max(1.0);
    let dt = lambda * opts.t_step / per;
    let n_steps = (2.0 * lambda / dt).round() as usize;
    let tg = TimeGrid::new(0.0, n_steps as f64 * dt, n_steps)?;
    let nodes: Vec<usize> = ts.iter().map(|&t| (lambda * t / dt).round() as usize).collect();
    let rows = solve_delta_stationary(&rho_star(sg), &tg, &nodes, &SolverConfig::default()).map_err(|e| e.in_module("forward_solver"))?;
    let n = sg.n_points();
    let mut out = Vec::with_capacity(ts.len() * xs.len());
    for (row, &t) in rows.iter().zip(ts) {
        let peak = row.iter().copied().fold(0.0, f64::max);
        if row[1].max(row[n - 2]) > 1e-12 * peak {
            return Err(Error::Config(format!(
                "half width {half_width} is too small at lambda = {lambda}: mass reaches the wall by t = {t}"
            )));
        }
        for &x in xs {
            let z = log_interpolate(&sg, row, lambda * x);
            out.push((0.5 * lambda.ln() + z) / lambda);
        }
    }
    Ok(out)
}

/// `log` of a positive profile, interpolated linearly in the logarithm.
fn log_interpolate(grid: &SpaceGrid, row: &[f64], x: f64) -> f64 {
    let u = (x + grid.half_width()) / grid.dx();
    let i = (u.floor() as usize).min(grid.n_points() - 2);
    let w = u - i as f64;
    let (a, b) = (row[i].ln(), row[i + 1].ln());
    if w == 0.0 {
        a
    } else {
        (1.0 - w) * a + w * b
    }
}

fn shape_mc(lambda: f64, ts: &[f64], xs: &[f64], opts: &ShapeOptions) -> Result<(Vec<f64>, Vec<f64>)> {
    let grid = SpaceGrid::with_spacing(20.0, 0.01)?;
    let phi = rho_star(grid);
    let mut values = Vec::with_capacity(ts.len() * xs.len());
    let mut errors = Vec::with_capacity(ts.len() * xs.len());
    for (j, &t) in ts.iter().enumerate() {
        for (i, &x) in xs.iter().enumerate() {
            let point = (j * xs.len() + i) as u64;
            let seed = opts.seed.wrapping_add(point.wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let cfg = BridgeConfig::for_duration(opts.n_paths, lambda * t, seed);
            let lme = log_mean_exp(&exponents(&phi, lambda * x, 0.0, lambda * t, &cfg));
            let log_z = log_heat_kernel(lambda * t, lambda * x) + lme.log_mean;
            values.push((0.5 * lambda.ln() + log_z) / lambda);
            errors.push(lme.rel_std_error / lambda);
        }
    }
    Ok((values, errors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::heat_kernel;
    use crate::spectral::sech2;

    fn small(n_paths: usize, steps: usize) -> BridgeConfig {
        BridgeConfig {
            n_paths,
            n_time_steps: steps,
            seed: 7,
        }
    }

    #[test]
    fn bridge_endpoints_and_moments() {
        let mut rng = path_rng(3, 0);
        let path = sample_bridge(1.5, -0.5, 2.0, 40, &mut rng).unwrap();
        assert_eq!(path[0], 1.5);
        assert_eq!(*path.last().unwrap(), -0.5);
        assert!(sample_bridge(0.0, 0.0, 0.0, 4, &mut rng).is_err());

        let n = 20_000;
        let mids: Vec<(f64, f64)> = (0..n)
            .map(|p| {
                let mut rng = path_rng(11, p);
                let a = sample_bridge(0.0, 0.0, 1.0, 4, &mut rng).unwrap()[2];
                let b = sample_bridge(2.0, 0.0, 1.0, 4, &mut rng).unwrap()[1];
                (a, b)
            })
            .collect();
        let var = mids.iter().map(|m| m.0 * m.0).sum::<f64>() / n as f64;
        // Var of a squared normal with variance 1/4 is 2/16.
        assert!((var - 0.25).abs() < 3.0 * (0.125f64 / n as f64).sqrt());
        let mean = mids.iter().map(|m| m.1).sum::<f64>() / n as f64;
        let sd = (0.25 * 0.75f64 / n as f64).sqrt();
        assert!((mean - 1.5).abs() < 3.0 * sd);
    }

    #[test]
    fn zero_and_constant_potentials() {
        let grid = SpaceGrid::with_spacing(20.0, 0.05).unwrap();
        let cfg = small(500, 40);
        let free = fk_estimate(&Potential::zeros(grid), 2.0, 0.3, -0.2, &cfg).unwrap();
        assert_eq!(free.mean, heat_kernel(2.0, -0.5).unwrap());
        assert_eq!(free.std_error, 0.0);
        let c = 0.7;
        let flat = fk_estimate(&Potential::from_fn(grid, |_| c), 2.0, 0.0, 0.0, &cfg).unwrap();
        let exact = (c * 2.0f64).exp() * heat_kernel(2.0, 0.0).unwrap();
        assert!((flat.mean - exact).abs() < 1e-6 * exact);
        let g = growth_rate(&Potential::zeros(grid), 8.0, 0.0, &cfg).unwrap();
        assert_eq!(g.rate, 0.0);
        assert!(growth_rate(&Potential::zeros(grid), 8.0, 3.0, &cfg).is_err());
    }

    #[test]
    fn seed_determinism() {
        let grid = SpaceGrid::with_spacing(20.0, 0.05).unwrap();
        let phi = Potential::from_fn(grid, sech2);
        let cfg = small(2000, 80);
        let a = fk_estimate(&phi, 4.0, 0.0, 0.0, &cfg).unwrap();
        let b = fk_estimate(&phi, 4.0, 0.0, 0.0, &cfg).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        let other = fk_estimate(&phi, 4.0, 0.0, 0.0, &BridgeConfig { seed: 8, ..cfg }).unwrap();
        assert_ne!(a.mean, other.mean);
    }

    #[test]
    fn log_mean_exp_survives_large_exponents() {
        let e = log_mean_exp(&[700.0, 800.0, 900.0]);
        assert!(e.log_mean.is_finite());
        assert!((e.log_mean - (900.0 + (1.0f64 / 3.0).ln())).abs() < 1e-9);
        assert!(e.effective_sample_size >= 1.0);
    }

    #[test]
    fn hitting_density_normalizes() {
        let total = hitting_probability(0.0, 4.0, 1.0, 1.0, 4.0);
        assert!((total - 1.0).abs() < 1e-4, "{total}");
        assert_eq!(hitting_density(1.0, 1.0, 0.7, 4.0), hitting_density(1.0, 1.0, -0.7, 4.0));
        assert_eq!(hitting_density(5.0, 1.0, 1.0, 4.0), 0.0);
        assert_eq!(hitting_density(-1.0, 1.0, 1.0, 4.0), 0.0);
    }

    #[test]
    fn hitting_histogram_small() {
        let hist = hitting_time_histogram(1.0, 0.5, 4.0, 40, 4, &small(20_000, 2)).unwrap();
        let mass: f64 = hist.empirical.iter().sum::<f64>() * (hist.edges[1] - hist.edges[0]);
        assert!((mass - 1.0).abs() < 1e-12);
        assert!(hist.max_discrepancy() < 5.0, "{}", hist.max_discrepancy());
    }

    #[test]
    fn laplace_exponent() {
        assert_eq!(laplace_v(0.5, 1.0, 1.3, 0.8).unwrap(), -0.5 * 1.3);
        assert!(laplace_v(0.5, 0.0, 1.0, 1.0).is_err());
        // Golden-section search for the maximizer.
        let (beta, t, x) = (0.5, 1.0, 0.5);
        let f = |s: f64| laplace_v(beta, s, t, x).unwrap();
        let (mut a, mut b) = (1e-6, 1.0);
        let r = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let c = b - r * (b - a);
            let d = a + r * (b - a);
            if f(c) > f(d) {
                b = d;
            } else {
                a = c;
            }
        }
        assert!((0.5 * (a + b) - 0.5).abs() < 1e-6);
        assert_eq!(laplace_argmax(beta, t, x), 0.5);
        let s = 0.5;
        let h = 1e-4;
        let fd = (f(s + h) - 2.0 * f(s) + f(s - h)) / (h * h);
        let exact = laplace_v_dss(s, t, x).unwrap();
        assert!((fd - exact).abs() < 1e-4 * exact.abs());
        assert!(exact < 0.0);
    }

    #[test]
    fn logmgf_limits_and_quadrature() {
        assert_eq!(laplace_logmgf(0.5, 2.0, 1.0).unwrap(), -0.75);
        assert_eq!(laplace_logmgf(0.5, 1.0, 2.0).unwrap(), -0.5);
        let exact = exact_logmgf(0.5, 1.0, 0.5, 200.0).unwrap();
        assert!((exact - laplace_logmgf(0.5, 1.0, 0.5).unwrap()).abs() < 0.02);
        // At lambda = 1 the integral is the mgf itself; compare with direct
        // quadrature of the density.
        let direct = quad::integrate(
            |s| hitting_density(s, 1.0, 1.0, 1.0) * (-0.5 * s).exp(),
            0.0,
            1.0,
            1e-14,
            1e-12,
            500,
        );
        let via = exact_logmgf(0.5, 1.0, 1.0, 1.0).unwrap();
        assert!((via - direct.value.ln()).abs() < 1e-5, "{via} vs {}", direct.value.ln());
    }

    #[test]
    fn limit_shape_branches() {
        assert_eq!(h_star(1.0, 0.0).unwrap(), 0.5);
        assert_eq!(h_star(2.0, 3.0).unwrap(), -2.25);
        assert_eq!(h_star(1.5, 1.5).unwrap(), -0.75);
        assert_eq!(h_star(1.5, -1.5).unwrap(), -0.75);
        assert!(h_star(0.0, 1.0).is_err());
    }

    #[test]
    fn shape_profile_small_pde() {
        let opts = ShapeOptions {
            t_step: 0.5,
            x_step: 0.5,
            dx: 0.1,
            dt: 0.02,
            ..ShapeOptions::default()
        };
        let p = shape_profile(4.0, 0.5, Backend::Pde, &opts).unwrap();
        assert_eq!(p.t, vec![0.5, 1.0, 1.5, 2.0]);
        assert_eq!(p.x.len(), 9);
        for j in 0..p.t.len() {
            for i in 0..p.x.len() {
                assert!((p.value(j, i) - p.value(j, p.x.len() - 1 - i)).abs() < 1e-6);
            }
        }
        assert!(p.sup_error.is_finite() && p.sup_error >= 0.0);
        let cramped = ShapeOptions {
            half_width: Some(3.0),
            ..opts
        };
        assert!(matches!(shape_profile(4.0, 0.5, Backend::Pde, &cramped), Err(Error::Config(_))));
        assert!(shape_profile(2.0, 0.5, Backend::Pde, &opts).is_err());
        assert!("mc".parse::<Backend>().is_ok() && "x".parse::<Backend>().is_err());
    }
}
