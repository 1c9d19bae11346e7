//! The rate function
//!
//! ```text
//! Phi(lambda) = lambda^{3/2} inf { ||rho||^2 / (2 lambda) : Z(rho; 2 lambda, 0) >= e^lambda / sqrt(4 pi lambda) }
//! ```
//!
//! computed in scaled coordinates on `[0, 2 lambda] x [-L, L]` by an augmented
//! Lagrangian on the log-form constraint
//! `c(rho) = log Z(rho; 2 lambda, 0) - lambda + log(4 pi lambda) / 2 >= 0`,
//! with projected-gradient inner steps onto `rho >= 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{l2_norm_spacetime, SpaceGrid, SpaceTimeDeviation, TimeGrid};
use crate::rearrange::steiner;
use crate::solver::{run_delta, terminal_value_and_gradient, Keep, SolverConfig};
use crate::spectral::{rho_star, sech2};

/// `dZ(rho; T, 0) / d rho` as an `L^2` density on the grid of `rho`.
pub fn terminal_gradient(rho: &SpaceTimeDeviation, cfg: &SolverConfig) -> Result<SpaceTimeDeviation> {
    Ok(terminal_value_and_gradient(rho, cfg, rho.sgrid().center())?.1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RateOptions {
    pub dt: f64,
    pub dx: f64,
    pub half_width: f64,
    /// Initial iterate `init_scale * rho*`, constant in time.
    pub init_scale: f64,
    pub max_iterations: usize,
    pub multiplier_every: usize,
    pub rearrange_every: usize,
    pub stationarity_tol: f64,
    pub feasibility_tol: f64,
    /// Initial penalty parameter of the augmented Lagrangian.
    pub penalty: f64,
    /// Candidate `zeta` values for the certificate, tried in increasing order.
    pub zetas: Vec<f64>,
    pub solver: SolverConfig,
}

impl Default for RateOptions {
    fn default() -> Self {
        Self {
            dt: 0.01,
            dx: 0.05,
            half_width: 20.0,
            init_scale: 1.0,
            max_iterations: 1500,
            multiplier_every: 25,
            rearrange_every: 50,
            stationarity_tol: 1e-5,
            feasibility_tol: 1e-6,
            penalty: 10.0,
            zetas: vec![0.001, 0.01, 0.05, 0.1, 0.2, 0.5, 1.0],
            solver: SolverConfig::default(),
        }
    }
}

impl RateOptions {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("dt", self.dt),
            ("dx", self.dx),
            ("half_width", self.half_width),
            ("stationarity_tol", self.stationarity_tol),
            ("feasibility_tol", self.feasibility_tol),
            ("penalty", self.penalty),
        ];
        if let Some((name, v)) = positive.iter().find(|(_, v)| !(*v > 0.0)) {
            return Err(Error::Config(format!("{name} must be positive, got {v}")));
        }
        if !(self.init_scale >= 0.0) {
            return Err(Error::Config("init_scale must be nonnegative".into()));
        }
        if self.multiplier_every == 0 || self.rearrange_every == 0 {
            return Err(Error::Config("update periods must be positive".into()));
        }
        if self.zetas.iter().any(|z| !(*z > 0.0)) {
            return Err(Error::Config("certificate zetas must be positive".into()));
        }
        self.solver.validate()
    }

    fn grids(&self, horizon: f64) -> Result<(TimeGrid, SpaceGrid)> {
        Ok((
            TimeGrid::with_step(0.0, horizon, self.dt)?,
            SpaceGrid::with_spacing(self.half_width, self.dx)?,
        ))
    }
}

/// Constraint `log Z(rho; horizon, 0) >= log_target`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Target {
    pub horizon: f64,
    pub log_target: f64,
}

impl Target {
    /// The scaled constraint at `lambda`: horizon `2 lambda`,
    /// target `lambda - log(4 pi lambda) / 2`.
    pub fn for_lambda(lambda: f64) -> Self {
        Self {
            horizon: 2.0 * lambda,
            log_target: lambda - 0.5 * (4.0 * std::f64::consts::PI * lambda).ln(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceEntry {
    pub iteration: usize,
    pub objective: f64,
    pub constraint: f64,
    pub multiplier: f64,
    pub stationarity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateReport {
    pub lambda: f64,
    pub phi_hat: f64,
    /// `phi_hat / lambda^{3/2}`.
    pub ratio: f64,
    #[serde(skip)]
    pub minimizer: SpaceTimeDeviation,
    /// `c(rho_hat)`; nonnegative when the constraint holds.
    pub constraint_residual: f64,
    pub iterations: usize,
    /// `(4/3)(1 + zeta)^2 lambda^{3/2}` for the smallest feasible `zeta`, if any.
    pub upper_certificate: Option<f64>,
    pub certificate_zeta: Option<f64>,
    pub converged: bool,
    pub multiplier: f64,
    pub stationarity: f64,
    pub trace: Vec<TraceEntry>,
}

/// `Z(rho; T, 0)` and `log Z` with its `L^2` gradient.
struct Evaluation {
    log_z: f64,
    grad_log_z: Option<SpaceTimeDeviation>,
}

fn evaluate(rho: &SpaceTimeDeviation, cfg: &SolverConfig, with_gradient: bool) -> Result<Evaluation> {
    let c = rho.sgrid().center();
    if with_gradient {
        let (z, g) = terminal_value_and_gradient(rho, cfg, c)?;
        Ok(Evaluation {
            log_z: z.ln(),
            grad_log_z: Some(g.map(|v| v / z)),
        })
    } else {
        let run = run_delta(rho, rho.tgrid(), rho.sgrid(), cfg, Keep::Last, false)?;
        Ok(Evaluation {
            log_z: run.rows[0][c].ln(),
            grad_log_z: None,
        })
    }
}

/// Augmented Lagrangian for `c >= 0`:
/// `J + (max(0, y - mu c)^2 - y^2) / (2 mu)`.
fn lagrangian(objective: f64, c: f64, y: f64, mu: f64) -> f64 {
    let shifted = (y - mu * c).max(0.0);
    objective + (shifted * shifted - y * y) / (2.0 * mu)
}

struct State {
    rho: SpaceTimeDeviation,
    objective: f64,
    c: f64,
    /// Gradient of the augmented Lagrangian.
    grad: SpaceTimeDeviation,
    grad_c: SpaceTimeDeviation,
}

fn state(rho: SpaceTimeDeviation, target: &Target, y: f64, mu: f64, cfg: &SolverConfig) -> Result<State> {
    let ev = evaluate(&rho, cfg, true)?;
    let grad_c = ev.grad_log_z.expect("gradient requested");
    let c = ev.log_z - target.log_target;
    let weight = (y - mu * c).max(0.0);
    let grad = rho.zip_with(&grad_c, |r, g| r - weight * g)?;
    Ok(State {
        objective: 0.5 * rho.dot(&rho),
        rho,
        c,
        grad,
        grad_c,
    })
}

/// Relative KKT residual at the multiplier estimate `max(0, y - mu c)`: the
/// projected gradient `rho - max(0, y grad c)` together with complementarity.
fn stationarity(s: &State, y: f64, mu: f64) -> f64 {
    let y = (y - mu * s.c).max(0.0);
    let r = s.rho.zip_with(&s.grad_c, |r, g| r - (y * g).max(0.0)).expect("same grids");
    let scale = l2_norm_spacetime(&s.rho).max(1.0);
    (l2_norm_spacetime(&r) / scale).max((y * s.c).abs() / (scale * scale))
}

fn project(rho: &SpaceTimeDeviation, grad: &SpaceTimeDeviation, step: f64) -> SpaceTimeDeviation {
    rho.zip_with(grad, |r, g| (r - step * g).max(0.0)).expect("same grids")
}

/// Minimizes `||rho||^2 / 2` subject to `target`, starting from `init`.
pub fn minimize(
    init: SpaceTimeDeviation,
    target: &Target,
    opts: &RateOptions,
) -> Result<(SpaceTimeDeviation, Vec<TraceEntry>, bool, f64, f64)> {
    opts.validate()?;
    let cfg = &opts.solver;
    let mut mu = opts.penalty;
    let mut y = 0.0;
    let mut cur = state(init.map(|v| v.max(0.0)), target, y, mu, cfg)?;
    // Multiplier estimate from the KKT condition rho = y grad c.
    let gc2 = cur.grad_c.dot(&cur.grad_c);
    if gc2 > 0.0 {
        y = (cur.rho.dot(&cur.grad_c) / gc2).max(0.0);
        cur = state(cur.rho, target, y, mu, cfg)?;
    }
    let mut step = 1.0;
    let mut trace = Vec::new();
    let mut last_c = cur.c;
    let mut converged = false;
    let mut station = stationarity(&cur, y, mu);
    let mut stalled = false;
    for it in 1..=opts.max_iterations {
        // Armijo backtracking on the projected path.
        let l0 = lagrangian(cur.objective, cur.c, y, mu);
        let mut accepted = None;
        let mut trial_step = step;
        for _ in 0..30 {
            let cand = project(&cur.rho, &cur.grad, trial_step);
            let diff = cand.zip_with(&cur.rho, |a, b| a - b)?;
            // Overflow on an overlong trial step counts as a rejection.
            let log_z = match evaluate(&cand, cfg, false) {
                Ok(ev) => ev.log_z,
                Err(Error::Solver { .. }) => f64::NAN,
                Err(e) => return Err(e),
            };
            let obj = 0.5 * cand.dot(&cand);
            let l1 = lagrangian(obj, log_z - target.log_target, y, mu);
            if l1.is_finite() && l1 <= l0 + 1e-4 * cur.grad.dot(&diff) {
                accepted = Some(cand);
                break;
            }
            trial_step *= 0.5;
        }
        let stall = accepted.is_none();
        let mut next = match accepted {
            Some(next) => {
                stalled = false;
                let next = state(next, target, y, mu, cfg)?;
                // Barzilai–Borwein step for the next iteration.
                let s_vec = next.rho.zip_with(&cur.rho, |a, b| a - b)?;
                let g_vec = next.grad.zip_with(&cur.grad, |a, b| a - b)?;
                let sy = s_vec.dot(&g_vec);
                step = if sy > 0.0 {
                    (s_vec.dot(&s_vec) / sy).clamp(1e-6, 1e3)
                } else {
                    (2.0 * trial_step).min(1e3)
                };
                next
            }
            // No descent left for this multiplier: update it early, and
            // give up only if that does not help either.
            None if stalled => break,
            None => {
                stalled = true;
                step = 1.0;
                cur
            }
        };
        if it % opts.rearrange_every == 0 {
            next = state(steiner(&next.rho)?, target, y, mu, cfg)?;
        }
        if stall || it % opts.multiplier_every == 0 {
            y = (y - mu * next.c).max(0.0);
            if next.c < -opts.feasibility_tol && next.c.abs() > 0.25 * last_c.abs() {
                mu = (10.0 * mu).min(1e8);
            }
            last_c = next.c;
            next = state(next.rho, target, y, mu, cfg)?;
        }
        cur = next;
        station = stationarity(&cur, y, mu);
        trace.push(TraceEntry {
            iteration: it,
            objective: cur.objective,
            constraint: cur.c,
            multiplier: y,
            stationarity: station,
        });
        if station <= opts.stationarity_tol && cur.c >= -opts.feasibility_tol {
            converged = true;
            break;
        }
    }
    Ok((cur.rho, trace, converged, y, station))
}

/// Rate function at `lambda` by constrained optimization, with the analytic
/// certificate for the smallest feasible `zeta` in `opts.zetas`.
pub fn rate_phi(lambda: f64, opts: &RateOptions) -> Result<RateReport> {
    if !(1.0..=32.0).contains(&lambda) {
        return Err(Error::domain(format!("rate_phi supports lambda in [1, 32], got {lambda}")));
    }
    opts.validate()?;
    let target = Target::for_lambda(lambda);
    let (tg, sg) = opts.grids(target.horizon)?;
    let init = SpaceTimeDeviation::constant_in_time(tg, &rho_star(sg).scaled(opts.init_scale));
    let (rho, trace, converged, multiplier, station) = minimize(init, &target, opts)?;
    let c = evaluate(&rho, &opts.solver, false)?.log_z - target.log_target;
    let norm2 = rho.dot(&rho);
    let phi_hat = lambda.sqrt() * norm2 / 2.0;
    let mut certificate = None;
    for &zeta in &opts.zetas {
        match upper_certificate(lambda, zeta, opts) {
            Ok(v) => {
                certificate = Some((v, zeta));
                break;
            }
            Err(Error::CertificateUnavailable { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(RateReport {
        lambda,
        phi_hat,
        ratio: phi_hat / lambda.powf(1.5),
        minimizer: rho,
        constraint_residual: c,
        iterations: trace.len(),
        upper_certificate: certificate.map(|c| c.0),
        certificate_zeta: certificate.map(|c| c.1),
        converged: converged && c >= -opts.feasibility_tol,
        multiplier,
        stationarity: station,
        trace,
    })
}

/// `(4/3)(1 + zeta)^2 lambda^{3/2}` after checking that `(1 + zeta) rho*` is
/// feasible at `lambda` on the grids of `opts`.
pub fn upper_certificate(lambda: f64, zeta: f64, opts: &RateOptions) -> Result<f64> {
    if !(zeta > 0.0) {
        return Err(Error::domain(format!("certificate needs zeta > 0, got {zeta}")));
    }
    if !(lambda > 0.0) {
        return Err(Error::domain(format!("certificate needs lambda > 0, got {lambda}")));
    }
    let target = Target::for_lambda(lambda);
    let (tg, sg) = opts.grids(target.horizon)?;
    let phi = rho_star(sg).scaled(1.0 + zeta);
    let run = run_delta(&phi, &tg, &sg, &opts.solver, Keep::Last, false)?;
    let log_z = run.rows[0][sg.center()].ln();
    if log_z < target.log_target {
        return Err(Error::CertificateUnavailable { lambda, zeta });
    }
    Ok(4.0 / 3.0 * (1.0 + zeta).powi(2) * lambda.powf(1.5))
}

/// `||rho_hat - rho*||^2 / (2 lambda)` with `rho*` constant in time.
pub fn minimizer_distance(report: &RateReport) -> f64 {
    let rho = &report.minimizer;
    let star = SpaceTimeDeviation::from_fn(*rho.tgrid(), *rho.sgrid(), |_, x| sech2(x));
    let diff = rho.zip_with(&star, |a, b| a - b).expect("same grids");
    diff.dot(&diff) / (2.0 * report.lambda)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Equicontinuity {
    pub lhs: f64,
    pub modulus: f64,
}

impl Equicontinuity {
    pub fn ratio(&self) -> f64 {
        if self.modulus == 0.0 {
            0.0
        } else {
            self.lhs / self.modulus
        }
    }
}

/// `h_lambda(rho; t, x) = lambda^{-1} log(lambda^{1/2} Z(rho; lambda t, lambda x))`.
pub fn h_lambda(rho: &SpaceTimeDeviation, lambda: f64, t: f64, x: f64, cfg: &SolverConfig) -> Result<f64> {
    let tg = rho.tgrid();
    let node = tg
        .nearest(lambda * t)
        .filter(|&k| (tg.t(k) - lambda * t).abs() <= 1e-9 * (1.0 + lambda * t) && k > 0)
        .ok_or_else(|| Error::domain(format!("lambda t = {} is not a time node of the deviation", lambda * t)))?;
    let run = run_delta(rho, tg, rho.sgrid(), cfg, Keep::Nodes(&[node]), false)?;
    let z = rho.sgrid().interpolate(&run.rows[0], lambda * x);
    if !(z > 0.0) {
        return Err(Error::domain(format!("Z vanishes at x = {}", lambda * x)));
    }
    Ok((0.5 * lambda.ln() + z.ln()) / lambda)
}

/// Compares `|h_lambda(rho1) - h_lambda(rho2)|` with
/// `lambda^{-1/2} ||rho1 - rho2|| (1 + ||rho1||^2 / lambda + ||rho2||^2 / lambda)`.
pub fn equicontinuity_probe(
    rho1: &SpaceTimeDeviation,
    rho2: &SpaceTimeDeviation,
    lambda: f64,
    t: f64,
    x: f64,
    cfg: &SolverConfig,
) -> Result<Equicontinuity> {
    if rho1.values().iter().chain(rho2.values()).any(|&v| v < 0.0) {
        return Err(Error::domain("equicontinuity probe needs nonnegative deviations"));
    }
    let diff = rho1.zip_with(rho2, |a, b| a - b)?;
    let gap = l2_norm_spacetime(&diff) / lambda.sqrt();
    if !(gap < 1.0) {
        return Err(Error::domain(format!("lambda^(-1/2) ||rho1 - rho2|| = {gap} must be below 1")));
    }
    let (n1, n2) = (rho1.dot(rho1), rho2.dot(rho2));
    let modulus = gap * (1.0 + n1 / lambda + n2 / lambda);
    if gap == 0.0 {
        return Ok(Equicontinuity { lhs: 0.0, modulus });
    }
    let h1 = h_lambda(rho1, lambda, t, x, cfg)?;
    let h2 = h_lambda(rho2, lambda, t, x, cfg)?;
    Ok(Equicontinuity {
        lhs: (h1 - h2).abs(),
        modulus,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::heat_kernel;
    use crate::spectral::potbd_bound;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn star_on(tg: TimeGrid, sg: SpaceGrid, scale: f64) -> SpaceTimeDeviation {
        SpaceTimeDeviation::from_fn(tg, sg, |_, x| scale * sech2(x))
    }

    #[test]
    fn free_gradient_is_product_of_kernels() {
        let tg = TimeGrid::with_step(0.0, 2.0, 0.01).unwrap();
        let sg = SpaceGrid::with_spacing(20.0, 0.01).unwrap();
        let grad = terminal_gradient(&SpaceTimeDeviation::zeros(tg, sg), &SolverConfig::default()).unwrap();
        let mut worst: f64 = 0.0;
        for k in 25..175 {
            let s = tg.t(k) + 0.5 * tg.dt();
            for i in (0..sg.n_points()).step_by(13) {
                let y = sg.x(i);
                let exact = heat_kernel(s, y).unwrap() * heat_kernel(2.0 - s, y).unwrap();
                worst = worst.max((grad.slice(k)[i] - exact).abs());
            }
        }
        assert!(worst < 1e-4, "{worst}");
    }

    #[test]
    fn gradient_of_rho_star_matches_differences_and_is_symmetric() {
        let tg = TimeGrid::with_step(0.0, 2.0, 0.02).unwrap();
        let sg = SpaceGrid::with_spacing(10.0, 0.1).unwrap();
        let cfg = SolverConfig::default();
        let rho = star_on(tg, sg, 1.0);
        let grad = terminal_gradient(&rho, &cfg).unwrap();
        let n = sg.n_points();
        let c = sg.center();
        let peak = grad.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for k in 0..tg.n_steps() {
            let g = grad.slice(k);
            for i in 0..n {
                assert!((g[i] - g[n - 1 - i]).abs() <= 1e-10 * peak);
            }
        }
        let z = |r: &SpaceTimeDeviation| run_delta(r, r.tgrid(), r.sgrid(), &cfg, Keep::Last, false).unwrap().rows[0][c];
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut tested = 0;
        while tested < 20 {
            let (k, i) = (rng.random_range(0..tg.n_steps()), rng.random_range(c - 15..=c + 15));
            let an = grad.slice(k)[i] * tg.dt() * sg.dx();
            if grad.slice(k)[i].abs() < 1e-2 * peak {
                continue;
            }
            tested += 1;
            let mut up = rho.clone();
            up.slice_mut(k)[i] += 1e-5;
            let mut down = rho.clone();
            down.slice_mut(k)[i] -= 1e-5;
            let fd = (z(&up) - z(&down)) / 2e-5;
            assert!((fd - an).abs() < 1e-3 * fd.abs(), "({k}, {i}): {fd} vs {an}");
        }
    }

    #[test]
    fn zero_lambda_limit_has_zero_minimizer() {
        let tg = TimeGrid::with_step(0.0, 2.0, 0.01).unwrap();
        let sg = SpaceGrid::with_spacing(20.0, 0.05).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut init = SpaceTimeDeviation::zeros(tg, sg);
        for v in init.values_mut() {
            *v = rng.random_range(0.0..0.01);
        }
        let target = Target {
            horizon: 2.0,
            log_target: heat_kernel(2.0, 0.0).unwrap().ln(),
        };
        let (rho, _, converged, _, _) = minimize(init, &target, &RateOptions::default()).unwrap();
        assert!(converged);
        assert!(l2_norm_spacetime(&rho) <= 1e-3, "{}", l2_norm_spacetime(&rho));
    }

    #[test]
    fn rate_at_four() {
        let r = rate_phi(4.0, &RateOptions::default()).unwrap();
        assert!(r.converged);
        assert!(r.constraint_residual >= -1e-6);
        assert!(r.phi_hat <= r.upper_certificate.unwrap() + 1e-6);
        assert!((r.phi_hat / 8.0 - r.ratio).abs() < 1e-12);
        assert_eq!(r.iterations, r.trace.len());
        // Symmetric start, symmetric iterates.
        let n = r.minimizer.sgrid().n_points();
        let peak = r.minimizer.values().iter().fold(0.0f64, |m, v| m.max(*v));
        for k in (0..r.minimizer.tgrid().n_steps()).step_by(37) {
            let s = r.minimizer.slice(k);
            for i in 0..n {
                assert!((s[i] - s[n - 1 - i]).abs() <= 1e-10 * peak);
            }
        }
        // Every time slice stays below the growth it must buy.
        let mid = r.minimizer.potential_at(r.minimizer.tgrid().n_steps() / 2);
        assert!(potbd_bound(&mid) < 0.5);
        assert!(matches!(rate_phi(0.5, &RateOptions::default()), Err(Error::Domain(_))));
    }

    #[test]
    fn certificates() {
        let opts = RateOptions::default();
        let v = upper_certificate(16.0, 0.1, &opts).unwrap();
        assert!((v - 4.0 / 3.0 * 1.21 * 64.0).abs() < 1e-9);
        assert!((v - 103.253_333).abs() < 1e-6);
        let v = upper_certificate(4.0, 1.0, &opts).unwrap();
        assert!((v - 128.0 / 3.0).abs() < 1e-12);
        assert!(matches!(upper_certificate(4.0, 0.0, &opts), Err(Error::Domain(_))));
        // A narrow box drains mass through the walls.
        let narrow = RateOptions {
            half_width: 1.0,
            ..RateOptions::default()
        };
        assert!(matches!(
            upper_certificate(4.0, 0.1, &narrow),
            Err(Error::CertificateUnavailable { .. })
        ));
    }

    #[test]
    fn distances() {
        let tg = TimeGrid::with_step(0.0, 8.0, 0.05).unwrap();
        let sg = SpaceGrid::with_spacing(20.0, 0.01).unwrap();
        let report = |minimizer: SpaceTimeDeviation| RateReport {
            lambda: 4.0,
            phi_hat: 0.0,
            ratio: 0.0,
            minimizer,
            constraint_residual: 0.0,
            iterations: 0,
            upper_certificate: None,
            certificate_zeta: None,
            converged: true,
            multiplier: 0.0,
            stationarity: 0.0,
            trace: Vec::new(),
        };
        assert_eq!(minimizer_distance(&report(star_on(tg, sg, 1.0))), 0.0);
        let d = minimizer_distance(&report(SpaceTimeDeviation::zeros(tg, sg)));
        assert!((d - 4.0 / 3.0).abs() < 1e-6, "{d}");
    }

    #[test]
    fn equicontinuity() {
        let cfg = SolverConfig::default();
        let sg = SpaceGrid::with_spacing(20.0, 0.05).unwrap();
        let tg = TimeGrid::with_step(0.0, 8.0, 0.01).unwrap();
        let star = star_on(tg, sg, 1.0);
        let same = equicontinuity_probe(&star, &star, 8.0, 1.0, 0.0, &cfg).unwrap();
        assert_eq!(same.lhs, 0.0);
        let mut ratios = Vec::new();
        for delta in [0.2, 0.1, 0.05] {
            let e = equicontinuity_probe(&star, &star_on(tg, sg, 1.0 + delta), 8.0, 1.0, 0.0, &cfg).unwrap();
            ratios.push(e.ratio());
        }
        assert!(ratios.iter().all(|r| *r > 0.0 && *r < 1.0), "{ratios:?}");
        assert!(equicontinuity_probe(&star, &star_on(tg, sg, 2.0), 8.0, 1.0, 0.0, &cfg).is_err());
        assert!(equicontinuity_probe(&star, &star_on(tg, sg, -0.1), 8.0, 1.0, 0.0, &cfg).is_err());

        // A bump near the start: its effect on h_lambda fades like 1 / lambda.
        let mut lhs = Vec::new();
        for lambda in [4.0, 8.0, 16.0] {
            let tg = TimeGrid::with_step(0.0, lambda, 0.01).unwrap();
            let base = star_on(tg, sg, 1.0);
            let bumped = SpaceTimeDeviation::from_fn(tg, sg, |t, x| sech2(x) + if t < 1.0 { 0.5 * (-x * x).exp() } else { 0.0 });
            lhs.push(equicontinuity_probe(&base, &bumped, lambda, 1.0, 0.0, &cfg).unwrap().lhs);
        }
        for w in lhs.windows(2) {
            assert!(w[1] <= 1.2 * w[0] / 2f64.sqrt(), "{lhs:?}");
        }
    }
}
