//! Deterministic solvers for `dZ/dt = Z_xx / 2 + rho Z` on `[-L, L]` with
//! Dirichlet walls.
//!
//! Time stepping is Crank–Nicolson with the potential treated implicitly at
//! both levels. A step over `h` applies `M = B^{-1} C`, where
//! `B = I - h A / 2`, `C = I + h A / 2` and `A = D2 / 2 + diag(rho)`. Both
//! factors are symmetric and commute, so `M^T = C B^{-1}`; the adjoint and the
//! gradient below are exact transposes of the forward scheme.
//!
//! Dirac initial data is replaced by the heat kernel at a warm-up time `t0`,
//! tilted by the short-time Feynman–Kac factor
//! `exp(t0 (rho(0, 0) + rho(0, x)) / 2)` (the straight-line bridge with the
//! trapezoid rule), so the warm-up error is `O(t0^2)`. Near the singular ends of a delta solve (the start, and the end where
//! the adjoint of a point evaluation starts) the step size is graded
//! geometrically, `h <= ratio * (distance to the end + t0)`, which keeps CN
//! free of the undamped high-frequency ringing it otherwise produces there.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{heat_kernel_unchecked, Field, Potential, SpaceGrid, SpaceTimeDeviation, TimeGrid};
use crate::tridiag;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    CrankNicolson,
    ChaosSeries,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub scheme: Scheme,
    /// Warm-up time `t0`: the solve starts from `p(t0, .)`.
    pub delta_warmup: f64,
    pub chaos_order: usize,
    pub tolerance: f64,
    /// Step grading near the singular ends, `h <= ratio * distance`.
    pub grading_ratio: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::CrankNicolson,
            delta_warmup: 1e-3,
            chaos_order: 8,
            tolerance: 1e-8,
            grading_ratio: 0.05,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta_warmup > 0.0) {
            return Err(Error::Config(format!("delta_warmup must be positive, got {}", self.delta_warmup)));
        }
        if self.chaos_order < 1 {
            return Err(Error::Config("chaos_order must be at least 1".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Config("tolerance must be positive".into()));
        }
        if !(self.grading_ratio > 0.0 && self.grading_ratio <= 1.0) {
            return Err(Error::Config("grading_ratio must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

/// One time step: the deviation cell it reads and its length.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Step {
    pub cell: usize,
    pub t_from: f64,
    pub h: f64,
}

/// Steps covering `[from, to]`. With `grade = Some((t0, ratio, end_grading))`
/// steps shrink geometrically towards `from - t0` and, if requested, `to`.
pub(crate) fn schedule(tgrid: &TimeGrid, from: f64, to: f64, grade: Option<(f64, f64, bool)>) -> Vec<Step> {
    let mut steps = Vec::new();
    let eps = 1e-12 * (1.0 + to.abs());
    let mut tau = from;
    let origin = grade.map(|(t0, _, _)| from - t0);
    while to - tau > eps {
        let cell = tgrid.cell_of(tau + eps);
        let cell_end = tgrid.t(cell + 1).min(to);
        let mut h = cell_end - tau;
        if let (Some((t0, ratio, end)), Some(origin)) = (grade, origin) {
            let mut dist = tau - origin;
            if end {
                dist = dist.min(to - tau + t0);
            }
            let cap = ratio * dist;
            if cap < h {
                // Land exactly on the cell boundary when the remainder is tiny.
                h = if h - cap < 0.25 * cap { h } else { cap };
            }
        }
        steps.push(Step { cell, t_from: tau, h });
        tau = if (cell_end - (tau + h)).abs() <= eps { cell_end } else { tau + h };
    }
    steps
}

/// Workspace for Crank–Nicolson steps on interior nodes.
pub(crate) struct Stepper {
    dx2: f64,
    diag_b: Vec<f64>,
    scratch: Vec<f64>,
    tmp: Vec<f64>,
}

impl Stepper {
    pub(crate) fn new(grid: &SpaceGrid) -> Self {
        let m = grid.n_points() - 2;
        Self {
            dx2: grid.dx() * grid.dx(),
            diag_b: vec![0.0; m],
            scratch: Vec::with_capacity(m),
            tmp: vec![0.0; m],
        }
    }

    fn fill_b(&mut self, rho: Option<&[f64]>, h: f64) {
        let base = 1.0 + h / (2.0 * self.dx2);
        match rho {
            Some(r) => {
                for (d, &v) in self.diag_b.iter_mut().zip(&r[1..r.len() - 1]) {
                    *d = base - 0.5 * h * v;
                }
            }
            None => self.diag_b.iter_mut().for_each(|d| *d = base),
        }
    }

    /// `out = C z` on interior nodes of the full-length vector `z`.
    fn apply_c(&self, rho: Option<&[f64]>, h: f64, z: &[f64], out: &mut [f64]) {
        let n = z.len();
        let a = h / (4.0 * self.dx2);
        let base = 1.0 - h / (2.0 * self.dx2);
        for i in 1..n - 1 {
            let pot = rho.map_or(0.0, |r| 0.5 * h * r[i]);
            out[i - 1] = (base + pot) * z[i] + a * (z[i - 1] + z[i + 1]);
        }
    }

    fn solve_b(&mut self, rhs: &mut [f64], h: f64) -> std::result::Result<(), usize> {
        let off = -h / (4.0 * self.dx2);
        tridiag::solve_in_place(&self.diag_b, off, rhs, &mut self.scratch)
    }

    /// `z <- M z` (walls stay zero).
    pub(crate) fn forward(&mut self, rho: Option<&[f64]>, h: f64, z: &mut [f64]) -> std::result::Result<(), usize> {
        let mut tmp = std::mem::take(&mut self.tmp);
        self.apply_c(rho, h, z, &mut tmp);
        self.fill_b(rho, h);
        let r = self.solve_b(&mut tmp, h);
        let n = z.len();
        z[1..n - 1].copy_from_slice(&tmp);
        self.tmp = tmp;
        r
    }

    /// `a <- M^T a`, also returning `w = B^{-1} a` (interior) for gradients.
    pub(crate) fn transpose(&mut self, rho: Option<&[f64]>, h: f64, a: &mut [f64], w: &mut Vec<f64>) -> std::result::Result<(), usize> {
        let n = a.len();
        w.clear();
        w.extend_from_slice(&a[1..n - 1]);
        self.fill_b(rho, h);
        self.solve_b(w, h)?;
        let mut full = std::mem::take(&mut self.tmp);
        // C w with zero walls.
        let mut wz = vec![0.0; n];
        wz[1..n - 1].copy_from_slice(w);
        self.apply_c(rho, h, &wz, &mut full);
        a[1..n - 1].copy_from_slice(&full);
        self.tmp = full;
        Ok(())
    }
}

/// Rejects non-finite values and negative values that are not round-off.
/// Negative values below `1e-12` of the maximum arise in far tails where the
/// true solution is under the scheme's resolution; they are flushed to zero.
fn check_state(z: &mut [f64], step: usize, time: f64) -> Result<()> {
    let max = z.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    if !max.is_finite() {
        return Err(Error::Solver {
            step,
            time,
            reason: "non-finite value".into(),
        });
    }
    let floor = -1e-12 * max;
    for (i, v) in z.iter_mut().enumerate() {
        if *v < 0.0 {
            if *v < floor {
                return Err(Error::Solver {
                    step,
                    time,
                    reason: format!("negative value {v:e} at node {i}"),
                });
            }
            *v = 0.0;
        }
    }
    Ok(())
}

/// `p(t0, x) exp(t0 (rho(0) + rho(x)) / 2)` with zero walls.
fn warm_start(rho0: &[f64], sg: &SpaceGrid, t0: f64) -> Vec<f64> {
    let n = sg.n_points();
    let c = rho0[sg.center()];
    let mut z: Vec<f64> = (0..n)
        .map(|i| heat_kernel_unchecked(t0, sg.x(i)) * (0.5 * t0 * (c + rho0[i])).exp())
        .collect();
    z[0] = 0.0;
    z[n - 1] = 0.0;
    z
}

/// Source of the potential on each time cell.
pub(crate) trait CellPotential {
    fn cell(&self, k: usize) -> &[f64];
}

impl CellPotential for SpaceTimeDeviation {
    fn cell(&self, k: usize) -> &[f64] {
        self.slice(k)
    }
}

impl CellPotential for Potential {
    fn cell(&self, _k: usize) -> &[f64] {
        self.values()
    }
}

/// Which time-node profiles a forward pass keeps.
#[derive(Clone, Copy)]
pub(crate) enum Keep<'a> {
    All,
    Last,
    Nodes(&'a [usize]),
}

impl Keep<'_> {
    fn wants(&self, k: usize, last: usize) -> bool {
        match self {
            Keep::All => true,
            Keep::Last => k == last,
            Keep::Nodes(list) => list.contains(&k),
        }
    }
}

/// Forward pass of a delta solve, optionally keeping every intermediate state.
pub(crate) struct DeltaRun {
    pub steps: Vec<Step>,
    /// `states[j]` is the state before step `j`; the last entry is the final state.
    pub states: Vec<Vec<f64>>,
    /// Kept time-node profiles, in time order.
    pub rows: Vec<Vec<f64>>,
}

pub(crate) fn run_delta<R: CellPotential + ?Sized>(
    rho: &R,
    tg: &TimeGrid,
    sg: &SpaceGrid,
    cfg: &SolverConfig,
    keep: Keep<'_>,
    keep_states: bool,
) -> Result<DeltaRun> {
    cfg.validate()?;
    let t0 = cfg.delta_warmup;
    if t0 >= tg.dt() {
        return Err(Error::Config(format!("delta_warmup {t0} must be below the time step {}", tg.dt())));
    }
    let end_time = tg.t_end();
    let last = tg.n_steps();
    let mut z = warm_start(rho.cell(0), sg, t0);
    let steps = schedule(tg, tg.t_start() + t0, end_time, Some((t0, cfg.grading_ratio, true)));
    let mut rows = Vec::new();
    if keep.wants(0, last) {
        rows.push(z.clone());
    }
    let mut node = 1;
    let mut states = Vec::new();
    let mut stepper = Stepper::new(sg);
    let eps = 1e-12 * (1.0 + end_time.abs());
    for (j, st) in steps.iter().enumerate() {
        if keep_states {
            states.push(z.clone());
        }
        stepper.forward(Some(rho.cell(st.cell)), st.h, &mut z).map_err(|i| Error::Solver {
            step: j,
            time: st.t_from,
            reason: format!("zero pivot at interior node {i}"),
        })?;
        let t_now = st.t_from + st.h;
        check_state(&mut z, j, t_now)?;
        if node <= last && (t_now - tg.t(node)).abs() <= eps {
            if keep.wants(node, last) {
                rows.push(z.clone());
            }
            node += 1;
        }
    }
    if node != last + 1 {
        return Err(Error::Solver {
            step: steps.len(),
            time: end_time,
            reason: format!("reached {node} of {} time nodes", last + 1),
        });
    }
    if keep_states {
        states.push(z);
    }
    Ok(DeltaRun { steps, states, rows })
}

/// Profiles of `Z(phi; t, .)` for a time-independent potential at the
/// requested time nodes of `tgrid`, without materializing a space-time array.
pub fn solve_delta_stationary(phi: &Potential, tgrid: &TimeGrid, nodes: &[usize], cfg: &SolverConfig) -> Result<Vec<Vec<f64>>> {
    if let Some(&k) = nodes.iter().find(|&&k| k > tgrid.n_steps()) {
        return Err(Error::domain(format!("time node {k} is beyond the grid")));
    }
    Ok(run_delta(phi, tgrid, phi.grid(), cfg, Keep::Nodes(nodes), false)?.rows)
}

/// `Z(rho; t, x)` on every time node of `rho`'s grid, started from a Dirac
/// mass at `t_start`. Row 0 holds the warm-up profile `p(t0, .)`.
///
/// `strictly_positive` on the returned field refers to interior nodes; far
/// tails of early rows may underflow to exact zero.
pub fn solve_delta(rho: &SpaceTimeDeviation, cfg: &SolverConfig) -> Result<Field> {
    let run = run_delta(rho, rho.tgrid(), rho.sgrid(), cfg, Keep::All, false)?;
    field_from_rows(rho.tgrid(), rho.sgrid(), run.rows)
}

fn field_from_rows(tg: &TimeGrid, sg: &SpaceGrid, rows: Vec<Vec<f64>>) -> Result<Field> {
    if rows.len() != tg.n_steps() + 1 {
        return Err(Error::Solver {
            step: rows.len(),
            time: tg.t_end(),
            reason: format!("produced {} rows for {} time nodes", rows.len(), tg.n_steps() + 1),
        });
    }
    Field::new(*tg, *sg, rows.concat())
}

/// `Z(rho; T, x_i)` at the final time and its `L^2` gradient with respect to
/// `rho`: `dZ = <grad, d rho>` in the space-time inner product. The gradient is
/// the exact derivative of the discrete scheme.
pub fn terminal_value_and_gradient(rho: &SpaceTimeDeviation, cfg: &SolverConfig, node: usize) -> Result<(f64, SpaceTimeDeviation)> {
    let tg = rho.tgrid();
    let sg = rho.sgrid();
    let n = sg.n_points();
    if node == 0 || node + 1 >= n {
        return Err(Error::domain("gradient node must be an interior node"));
    }
    let run = run_delta(rho, tg, sg, cfg, Keep::Last, true)?;
    let value = run.states.last().expect("at least one state")[node];
    let mut grad = SpaceTimeDeviation::zeros(*tg, *sg);
    let mut a = vec![0.0; n];
    a[node] = 1.0;
    let mut w = Vec::with_capacity(n);
    let mut stepper = Stepper::new(sg);
    let scale = 1.0 / (tg.dt() * sg.dx());
    for (j, st) in run.steps.iter().enumerate().rev() {
        let r = rho.slice(st.cell);
        stepper.transpose(Some(r), st.h, &mut a, &mut w).map_err(|i| Error::Solver {
            step: j,
            time: st.t_from,
            reason: format!("zero pivot at interior node {i} in the adjoint pass"),
        })?;
        let before = &run.states[j];
        let after = &run.states[j + 1];
        let g = grad.slice_mut(st.cell);
        let c = 0.5 * st.h * scale;
        for i in 1..n - 1 {
            g[i] += c * w[i - 1] * (before[i] + after[i]);
        }
    }
    // Dependence of the warm start on the first slice.
    let z0 = &run.states[0];
    let c = 0.5 * cfg.delta_warmup * scale;
    let g = grad.slice_mut(0);
    let mut total = 0.0;
    for i in 1..n - 1 {
        let v = a[i] * z0[i];
        g[i] += c * v;
        total += v;
    }
    g[sg.center()] += c * total;
    Ok((value, grad))
}

/// Backward field `A(s, .) = P(rho; s -> T)^* terminal` on the time nodes.
/// Uses the same step schedule as [`solve_delta`], so
/// `<A(s, .), Z(s, .)>` is constant in `s` up to rounding.
pub fn adjoint_solve(rho: &SpaceTimeDeviation, terminal: &Potential, cfg: &SolverConfig) -> Result<Field> {
    cfg.validate()?;
    let tg = rho.tgrid();
    let sg = rho.sgrid();
    if terminal.grid() != sg {
        return Err(Error::Grid("terminal profile lives on a different grid".into()));
    }
    let n = sg.n_points();
    let steps = schedule(
        tg,
        tg.t_start() + cfg.delta_warmup,
        tg.t_end(),
        Some((cfg.delta_warmup, cfg.grading_ratio, true)),
    );
    let mut a = terminal.values().to_vec();
    a[0] = 0.0;
    a[n - 1] = 0.0;
    let mut rows = vec![Vec::new(); tg.n_steps() + 1];
    rows[tg.n_steps()] = a.clone();
    let mut w = Vec::with_capacity(n);
    let mut stepper = Stepper::new(sg);
    let eps = 1e-12 * (1.0 + tg.t_end());
    for (j, st) in steps.iter().enumerate().rev() {
        stepper
            .transpose(Some(rho.slice(st.cell)), st.h, &mut a, &mut w)
            .map_err(|i| Error::Solver {
                step: j,
                time: st.t_from,
                reason: format!("zero pivot at interior node {i}"),
            })?;
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::Solver {
                step: j,
                time: st.t_from,
                reason: "non-finite adjoint value".into(),
            });
        }
        if (st.t_from - tg.t(st.cell)).abs() <= eps {
            rows[st.cell] = a.clone();
        }
    }
    // Row 0 is the warm-up time t0, matching the forward field.
    rows[0] = a;
    Field::new(*tg, *sg, rows.concat())
}

/// `P(rho; s -> t) f`: evolves `f` from `s` to `t` (no grading; `f` is
/// assumed resolved on the grid).
pub fn propagate(rho: &SpaceTimeDeviation, s: f64, t: f64, f: &Potential) -> Result<Potential> {
    check_interval(rho, s, t)?;
    if f.grid() != rho.sgrid() {
        return Err(Error::Grid("profile lives on a different grid".into()));
    }
    let mut z = f.values().to_vec();
    let n = z.len();
    z[0] = 0.0;
    z[n - 1] = 0.0;
    let mut stepper = Stepper::new(rho.sgrid());
    for (j, st) in schedule(rho.tgrid(), s, t, None).iter().enumerate() {
        stepper.forward(Some(rho.slice(st.cell)), st.h, &mut z).map_err(|i| Error::Solver {
            step: j,
            time: st.t_from,
            reason: format!("zero pivot at interior node {i}"),
        })?;
    }
    Potential::new(*rho.sgrid(), z)
}

fn check_interval(rho: &SpaceTimeDeviation, s: f64, t: f64) -> Result<()> {
    let tg = rho.tgrid();
    let eps = 1e-12 * (1.0 + tg.t_end().abs());
    if !(s < t) {
        return Err(Error::domain(format!("propagator needs s < t, got s = {s}, t = {t}")));
    }
    if s < tg.t_start() - eps || t > tg.t_end() + eps {
        return Err(Error::domain(format!(
            "[{s}, {t}] is outside the deviation's time range [{}, {}]",
            tg.t_start(),
            tg.t_end()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OperatorNorm {
    pub value: f64,
    pub iterations: usize,
    /// False when the relative change was still above `1e-8` after `iters`.
    pub converged: bool,
}

/// Power iteration on `P^* P` for the `L^2 -> L^2` norm of the discrete
/// propagator from `s` to `t`.
pub fn operator_norm(rho: &SpaceTimeDeviation, s: f64, t: f64, iters: usize) -> Result<OperatorNorm> {
    check_interval(rho, s, t)?;
    if iters < 10 {
        return Err(Error::domain(format!("operator_norm needs at least 10 iterations, got {iters}")));
    }
    let sg = rho.sgrid();
    let n = sg.n_points();
    let steps = schedule(rho.tgrid(), s, t, None);
    let mut rng = ChaCha8Rng::seed_from_u64(0x6f70_6e6f_726d);
    let mut v: Vec<f64> = (0..n).map(|_| 0.5 + rng.random::<f64>()).collect();
    v[0] = 0.0;
    v[n - 1] = 0.0;
    normalize(&mut v);
    let mut stepper = Stepper::new(sg);
    let mut w = Vec::with_capacity(n);
    let mut estimate = 0.0;
    let mut converged = false;
    let mut done = 0;
    for it in 0..iters {
        done = it + 1;
        for st in &steps {
            let _ = stepper.forward(Some(rho.slice(st.cell)), st.h, &mut v);
        }
        // ||P v|| with ||v|| = 1 is monotone in the iteration for P^* P.
        let next = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        for st in steps.iter().rev() {
            stepper
                .transpose(Some(rho.slice(st.cell)), st.h, &mut v, &mut w)
                .map_err(|i| Error::Solver {
                    step: 0,
                    time: st.t_from,
                    reason: format!("zero pivot at interior node {i}"),
                })?;
        }
        normalize(&mut v);
        let change = (next - estimate).abs() / next.max(f64::MIN_POSITIVE);
        estimate = next;
        if change < 1e-8 {
            converged = true;
            break;
        }
    }
    Ok(OperatorNorm {
        value: estimate,
        iterations: done,
        converged,
    })
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|a| *a /= norm);
    }
}

/// Partial sums of the kernel series for `Z(rho; t, x)`, terms `0..=order`.
///
/// Term `n` solves `u_n' = u_n'' / 2 + rho u_{n-1}` with `u_n(0) = 0` and
/// `u_0 = p`, which is the simplex integral of the series written as an
/// iterated Duhamel convolution. Each step is trapezoidal in the source.
pub fn chaos_series_terms(rho: &SpaceTimeDeviation, t: f64, x: f64, order: usize, cfg: &SolverConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let tg = rho.tgrid();
    let sg = rho.sgrid();
    let t_start = tg.t_start();
    if !(t > t_start) || t > tg.t_end() + 1e-12 {
        return Err(Error::domain(format!("t = {t} outside ({t_start}, {}]", tg.t_end())));
    }
    let p0 = heat_kernel_unchecked(t - t_start, x);
    let mut terms = vec![p0];
    if order == 0 {
        return Ok(terms);
    }
    let t0 = cfg.delta_warmup;
    let n = sg.n_points();
    let steps = schedule(tg, t_start + t0, t, Some((t0, cfg.grading_ratio, false)));
    // Previous order at every step time (including the start).
    let mut prev: Vec<Vec<f64>> = Vec::with_capacity(steps.len() + 1);
    let heat_at = |tau: f64| -> Vec<f64> {
        let mut v: Vec<f64> = (0..n).map(|i| heat_kernel_unchecked(tau - t_start, sg.x(i))).collect();
        v[0] = 0.0;
        v[n - 1] = 0.0;
        v
    };
    prev.push(heat_at(t_start + t0));
    for st in &steps {
        prev.push(heat_at(st.t_from + st.h));
    }
    let mut stepper = Stepper::new(sg);
    // Warm start of term k: p(t0, x) a(x)^k / k!, the expansion of the tilted
    // warm start used by the Crank–Nicolson solver.
    let r0 = rho.slice(0);
    let tilt: Vec<f64> = (0..n).map(|i| 0.5 * t0 * (r0[sg.center()] + r0[i])).collect();
    let mut start = prev[0].clone();
    for k in 1..=order {
        for (s, a) in start.iter_mut().zip(&tilt) {
            *s *= a / k as f64;
        }
        let mut u = start.clone();
        let mut cur = Vec::with_capacity(steps.len() + 1);
        cur.push(u.clone());
        for (j, st) in steps.iter().enumerate() {
            let r = rho.slice(st.cell);
            // Source enters as (h/2) B^{-1} (s_j + s_{j+1}) on top of the free step.
            let mut src = vec![0.0; n];
            for i in 1..n - 1 {
                src[i] = 0.5 * st.h * r[i] * (prev[j][i] + prev[j + 1][i]);
            }
            let mut tmp = vec![0.0; n - 2];
            stepper.apply_c(None, st.h, &u, &mut tmp);
            for i in 1..n - 1 {
                tmp[i - 1] += src[i];
            }
            stepper.fill_b(None, st.h);
            stepper.solve_b(&mut tmp, st.h).map_err(|i| Error::Solver {
                step: j,
                time: st.t_from,
                reason: format!("zero pivot at interior node {i}"),
            })?;
            u[1..n - 1].copy_from_slice(&tmp);
            cur.push(u.clone());
        }
        terms.push(sg.interpolate(cur.last().expect("nonempty"), x));
        prev = cur;
    }
    Ok(terms)
}

/// Sum of the kernel series through `order`.
pub fn chaos_series_point(rho: &SpaceTimeDeviation, t: f64, x: f64, order: usize, cfg: &SolverConfig) -> Result<f64> {
    Ok(chaos_series_terms(rho, t, x, order, cfg)?.iter().sum())
}

/// `Z(rho; T, x)` by whichever scheme `cfg` selects.
pub fn terminal_value(rho: &SpaceTimeDeviation, x: f64, cfg: &SolverConfig) -> Result<f64> {
    match cfg.scheme {
        Scheme::CrankNicolson => {
            let run = run_delta(rho, rho.tgrid(), rho.sgrid(), cfg, Keep::Last, false)?;
            Ok(rho.sgrid().interpolate(run.rows.last().expect("rows"), x))
        }
        Scheme::ChaosSeries => chaos_series_point(rho, rho.tgrid().t_end(), x, cfg.chaos_order, cfg),
    }
}
