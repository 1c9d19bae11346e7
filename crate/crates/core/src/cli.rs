//! Command-line front end.
//!
//! A JSON config file supplies defaults and command-line flags override it.
//! Every run writes its artifacts plus `manifest.json` (resolved config,
//! version, seed and a SHA-256 per file) into the output directory.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::acceptance::{self, CRITERIA};
use crate::bridge::{self, Backend, BridgeConfig, ShapeOptions};
use crate::error::{Error, Result};
use crate::grid::{Potential, SpaceGrid};
use crate::io::{fmt_num, potential_from_csv};
use crate::solver::SolverConfig;
use crate::spectral;
use crate::variational::{self, RateOptions, RateReport};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "KPZ_TAIL_OUT";

#[derive(Debug, Parser)]
#[command(name = "kpz-tail", version, about = "Upper-tail experiments for the weak-noise KPZ equation")]
pub struct Cli {
    /// JSON config file; flags take precedence over its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, env = OUT_DIR_ENV)]
    pub out: Option<PathBuf>,
    /// Seed for every random stream of the run.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Default)]
pub struct GridFlags {
    #[arg(long)]
    pub half_width: Option<f64>,
    #[arg(long)]
    pub dx: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ground state, bound and GNS ratio of a potential.
    Spectral {
        /// `sech2` or a CSV file with header `x,value`.
        #[arg(long)]
        phi: Option<String>,
        #[command(flatten)]
        grid: GridFlags,
    },
    /// Randomized rearrangement inequalities and Steiner monotonicity.
    RearrangeCheck,
    /// Rate function at one lambda.
    Rate {
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        init_scale: Option<f64>,
        /// Certificate inflation; replaces the configured `zetas` list.
        #[arg(long)]
        zeta: Option<f64>,
        #[command(flatten)]
        grid: GridFlags,
    },
    /// Rate function over a list of lambdas with trend checks.
    TailLaw {
        #[arg(long, value_delimiter = ',')]
        lambdas: Option<Vec<f64>>,
        #[command(flatten)]
        grid: GridFlags,
    },
    /// Rescaled profile against the limit shape.
    LimitShape {
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        backend: Option<Backend>,
        #[arg(long)]
        n_paths: Option<usize>,
    },
    /// Bridge hitting-time density and Monte Carlo histogram.
    HittingTime {
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        x: Option<f64>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        n_paths: Option<usize>,
        #[arg(long)]
        bins: Option<usize>,
    },
    /// Feynman–Kac bridge estimate.
    Fk {
        #[arg(long)]
        phi: Option<String>,
        #[arg(long)]
        duration: Option<f64>,
        #[arg(long)]
        n_paths: Option<usize>,
    },
    /// Limit-shape curves at t = 0.5, 1, 1.5.
    Figure1,
    /// Acceptance suite.
    Selftest {
        /// Comma-separated criterion numbers; all by default.
        #[arg(long, value_delimiter = ',')]
        only: Option<Vec<u8>>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectral { .. } => "spectral",
            Command::RearrangeCheck => "rearrange-check",
            Command::Rate { .. } => "rate",
            Command::TailLaw { .. } => "tail-law",
            Command::LimitShape { .. } => "limit-shape",
            Command::HittingTime { .. } => "hitting-time",
            Command::Fk { .. } => "fk",
            Command::Figure1 => "figure1",
            Command::Selftest { .. } => "selftest",
        }
    }
}

/// Fully resolved experiment parameters. The config file may set any subset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub half_width: f64,
    pub dx: f64,
    pub dt: f64,
    pub delta_warmup: f64,
    pub lambdas: Vec<f64>,
    pub lambda: f64,
    pub delta: f64,
    pub zetas: Vec<f64>,
    pub init_scale: f64,
    pub n_paths: usize,
    pub seed: u64,
    pub t: f64,
    pub x: f64,
    pub duration: f64,
    pub bins: usize,
    pub backend: Backend,
    pub phi: String,
    pub only: Vec<u8>,
    pub out_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            half_width: 20.0,
            dx: 0.05,
            dt: 0.01,
            delta_warmup: 1e-3,
            lambdas: vec![4.0, 8.0, 16.0],
            lambda: 8.0,
            delta: 0.5,
            zetas: RateOptions::default().zetas,
            init_scale: 1.0,
            n_paths: 100_000,
            seed: 1,
            t: 1.0,
            x: 1.0,
            duration: 4.0,
            bins: 200,
            backend: Backend::Pde,
            phi: "sech2".into(),
            only: CRITERIA.to_vec(),
            out_dir: PathBuf::from("kpz-tail-out"),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("config file: {e}")))
    }

    pub fn validate(&self, command: &str) -> Result<()> {
        let positive = [
            ("half_width", self.half_width),
            ("dx", self.dx),
            ("dt", self.dt),
            ("delta_warmup", self.delta_warmup),
            ("lambda", self.lambda),
            ("delta", self.delta),
            ("init_scale", self.init_scale),
            ("t", self.t),
            ("duration", self.duration),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.n_paths == 0 || self.bins == 0 {
            return Err(Error::Config("n_paths and bins must be positive".into()));
        }
        if let Some(bad) = self.lambdas.iter().chain(&self.zetas).find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::Config(format!("lambdas and zetas must be positive, got {bad}")));
        }
        if command == "tail-law" && self.lambdas.is_empty() {
            return Err(Error::Config("lambdas must be non-empty for tail-law".into()));
        }
        if command == "selftest" {
            if self.only.is_empty() {
                return Err(Error::Config("only must list at least one criterion".into()));
            }
            if let Some(bad) = self.only.iter().find(|c| !CRITERIA.contains(c)) {
                return Err(Error::Config(format!("only: unknown criterion {bad}")));
            }
        }
        Ok(())
    }

    fn solver(&self) -> SolverConfig {
        SolverConfig {
            delta_warmup: self.delta_warmup,
            ..SolverConfig::default()
        }
    }

    fn rate_options(&self) -> RateOptions {
        RateOptions {
            dt: self.dt,
            dx: self.dx,
            half_width: self.half_width,
            init_scale: self.init_scale,
            zetas: self.zetas.clone(),
            solver: self.solver(),
            ..RateOptions::default()
        }
    }

    fn apply_grid(&mut self, g: &GridFlags) {
        override_with(&mut self.half_width, g.half_width);
        override_with(&mut self.dx, g.dx);
        override_with(&mut self.dt, g.dt);
    }
}

fn override_with<T>(slot: &mut T, flag: Option<T>) {
    if let Some(v) = flag {
        *slot = v;
    }
}

/// Merges defaults, the config file and flags (flags win).
pub fn resolve(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::from_json(&fs::read_to_string(path)?)?,
        None => ExperimentConfig::default(),
    };
    override_with(&mut cfg.out_dir, cli.out.clone());
    override_with(&mut cfg.seed, cli.seed);
    match &cli.command {
        Command::Spectral { phi, grid } => {
            override_with(&mut cfg.phi, phi.clone());
            cfg.apply_grid(grid);
        }
        Command::RearrangeCheck | Command::Figure1 => {}
        Command::Rate {
            lambda,
            init_scale,
            zeta,
            grid,
        } => {
            override_with(&mut cfg.lambda, *lambda);
            override_with(&mut cfg.init_scale, *init_scale);
            override_with(&mut cfg.zetas, zeta.map(|z| vec![z]));
            cfg.apply_grid(grid);
        }
        Command::TailLaw { lambdas, grid } => {
            override_with(&mut cfg.lambdas, lambdas.clone());
            cfg.apply_grid(grid);
        }
        Command::LimitShape {
            lambda,
            delta,
            backend,
            n_paths,
        } => {
            override_with(&mut cfg.lambda, *lambda);
            override_with(&mut cfg.delta, *delta);
            override_with(&mut cfg.backend, *backend);
            override_with(&mut cfg.n_paths, *n_paths);
        }
        Command::HittingTime {
            t,
            x,
            lambda,
            n_paths,
            bins,
        } => {
            override_with(&mut cfg.t, *t);
            override_with(&mut cfg.x, *x);
            override_with(&mut cfg.lambda, *lambda);
            override_with(&mut cfg.n_paths, *n_paths);
            override_with(&mut cfg.bins, *bins);
        }
        Command::Fk { phi, duration, n_paths } => {
            override_with(&mut cfg.phi, phi.clone());
            override_with(&mut cfg.duration, *duration);
            override_with(&mut cfg.n_paths, *n_paths);
        }
        Command::Selftest { only } => override_with(&mut cfg.only, only.clone()),
    }
    cfg.validate(cli.command.name())?;
    Ok(cfg)
}

/// Rounds every float in a JSON tree to 12 significant digits.
fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let f = n.as_f64().expect("f64");
            fmt_num(f)
                .parse::<f64>()
                .ok()
                .and_then(serde_json::Number::from_f64)
                .map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_json).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

/// Collects artifacts and writes them with a manifest.
struct Artifacts {
    dir: PathBuf,
    files: Vec<(String, String)>,
}

impl Artifacts {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        fs::write(self.dir.join(name), contents)?;
        self.files
            .push((name.to_string(), hex::encode(Sha256::digest(contents.as_bytes()))));
        Ok(())
    }

    fn json(&mut self, name: &str, value: Value) -> Result<()> {
        let mut text = serde_json::to_string_pretty(&round_json(value))?;
        text.push('\n');
        self.write(name, &text)
    }

    fn finish(self, command: &str, cfg: &ExperimentConfig, passed: bool) -> Result<()> {
        let files: Vec<Value> = self.files.iter().map(|(n, h)| json!({"file": n, "sha256": h})).collect();
        let manifest = json!({
            "command": command,
            "version": env!("CARGO_PKG_VERSION"),
            "seed": cfg.seed,
            "config": cfg,
            "passed": passed,
            "files": files,
        });
        let mut text = serde_json::to_string_pretty(&round_json(manifest))?;
        text.push('\n');
        fs::write(self.dir.join("manifest.json"), text)?;
        Ok(())
    }
}

fn load_phi(source: &str, grid: SpaceGrid) -> Result<Potential> {
    match source {
        "sech2" => Ok(spectral::rho_star(grid)),
        "zero" => Ok(Potential::zeros(grid)),
        path => potential_from_csv(&fs::read_to_string(path)?),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailRow {
    pub lambda: f64,
    pub phi_hat: f64,
    pub ratio: f64,
    pub certificate_ratio: Option<f64>,
    pub minimizer_distance: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailLaw {
    pub rows: Vec<TailRow>,
    /// Ratio column non-increasing within 5% (vacuous for one row).
    pub non_increasing: bool,
    /// Each ratio in `[1, certificate]`.
    pub bracketed: bool,
    pub all_converged: bool,
}

impl TailLaw {
    pub fn passed(&self) -> bool {
        self.non_increasing && self.bracketed && self.all_converged
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda,phi_hat,ratio,certificate_ratio,minimizer_distance,converged\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                fmt_num(r.lambda),
                fmt_num(r.phi_hat),
                fmt_num(r.ratio),
                r.certificate_ratio.map_or("NA".into(), fmt_num),
                fmt_num(r.minimizer_distance),
                r.converged
            ));
        }
        out
    }
}

/// Runs `rate_phi` over `lambdas` (sorted, within `[4, 16]`) and checks the
/// ratio column for the expected trend and bracket.
pub fn tail_law(lambdas: &[f64], opts: &RateOptions) -> Result<TailLaw> {
    if lambdas.is_empty() {
        return Err(Error::Config("lambda list must be non-empty".into()));
    }
    if lambdas.windows(2).any(|w| w[1] <= w[0]) || lambdas.iter().any(|l| !(4.0..=16.0).contains(l)) {
        return Err(Error::domain("lambda list must be increasing within [4, 16]"));
    }
    let rows = lambdas
        .iter()
        .map(|&lambda| {
            let r = variational::rate_phi(lambda, opts)?;
            Ok(TailRow {
                lambda,
                phi_hat: r.phi_hat,
                ratio: r.ratio,
                certificate_ratio: r.upper_certificate.map(|c| c / lambda.powf(1.5)),
                minimizer_distance: variational::minimizer_distance(&r),
                converged: r.converged,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let non_increasing = rows.windows(2).all(|w| w[1].ratio <= 1.05 * w[0].ratio);
    let bracketed = rows
        .iter()
        .all(|r| r.ratio >= 1.0 && r.certificate_ratio.is_some_and(|c| r.ratio <= c));
    Ok(TailLaw {
        all_converged: rows.iter().all(|r| r.converged),
        rows,
        non_increasing,
        bracketed,
    })
}

fn rate_trace_csv(r: &RateReport) -> String {
    let mut out = String::from("iteration,objective,constraint,multiplier,stationarity\n");
    for e in &r.trace {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            e.iteration,
            fmt_num(e.objective),
            fmt_num(e.constraint),
            fmt_num(e.multiplier),
            fmt_num(e.stationarity)
        ));
    }
    out
}

/// The minimizer as `t,x,value` on at most about 200 time rows and `|x| <= 8`;
/// the full field runs to millions of rows.
fn minimizer_csv(r: &RateReport) -> String {
    let rho = &r.minimizer;
    let (tg, sg) = (rho.tgrid(), rho.sgrid());
    let stride = tg.n_steps().div_ceil(200).max(1);
    let mut out = String::from("t,x,value\n");
    for k in (0..tg.n_steps()).step_by(stride) {
        let slice = rho.slice(k);
        for (i, v) in slice.iter().enumerate() {
            let x = sg.x(i);
            if x.abs() <= 8.0 + 1e-9 {
                out.push_str(&format!("{},{},{}\n", fmt_num(tg.t(k)), fmt_num(x), fmt_num(*v)));
            }
        }
    }
    out
}

/// Executes one subcommand with a resolved config; `Ok(true)` iff every
/// requested check passed.
pub fn execute(command: &Command, cfg: &ExperimentConfig) -> Result<bool> {
    let name = command.name();
    let mut out = Artifacts::new(&cfg.out_dir)?;
    let passed = match command {
        Command::Spectral { .. } => {
            let grid = SpaceGrid::with_spacing(cfg.half_width, cfg.dx)?;
            let phi = load_phi(&cfg.phi, grid).map_err(|e| e.in_module("spectral"))?;
            let gs = spectral::ground_state(&phi).map_err(|e| e.in_module("spectral"))?;
            let bound = spectral::potbd_bound(&phi);
            let g = gs.eigenfunction.values();
            let mut csv = String::from("x,ground_state\n");
            for (i, v) in g.iter().enumerate() {
                csv.push_str(&format!("{},{}\n", fmt_num(gs.eigenfunction.grid().x(i)), fmt_num(*v)));
            }
            out.write("ground_state.csv", &csv)?;
            out.json(
                "spectral.json",
                json!({
                    "phi": cfg.phi,
                    "f": gs.value,
                    "potbd_bound": bound,
                    "gns_ratio": spectral::gns_ratio(&gs.eigenfunction).map_err(|e| e.in_module("spectral"))?,
                }),
            )?;
            // sech^2 attains the bound, where the O(dx^2) kinetic-energy error
            // shows through.
            let dx = phi.grid().dx();
            gs.value <= bound + 1e-6 + 0.05 * dx * dx
        }
        Command::RearrangeCheck => {
            let r = acceptance::run(5, cfg.seed).map_err(|e| e.in_module("rearrangement"))?;
            println!("{}", r.summary_line());
            out.write("rearrange_check.csv", &acceptance::reports_to_csv(std::slice::from_ref(&r)))?;
            r.checks_passed()
        }
        Command::Rate { .. } => {
            let r = variational::rate_phi(cfg.lambda, &cfg.rate_options()).map_err(|e| e.in_module("variational"))?;
            out.write("rate_trace.csv", &rate_trace_csv(&r))?;
            out.write("rate_minimizer.csv", &minimizer_csv(&r))?;
            let mut report = serde_json::to_value(&r)?;
            if let Value::Object(o) = &mut report {
                o.remove("trace");
                o.insert("minimizer_distance".into(), json!(variational::minimizer_distance(&r)));
            }
            out.json("rate.json", report)?;
            r.converged
        }
        Command::TailLaw { .. } => {
            let t = tail_law(&cfg.lambdas, &cfg.rate_options()).map_err(|e| e.in_module("variational"))?;
            out.write("tail_law.csv", &t.to_csv())?;
            out.json("tail_law.json", serde_json::to_value(&t)?)?;
            t.passed()
        }
        Command::LimitShape { .. } => {
            let opts = ShapeOptions {
                n_paths: cfg.n_paths,
                seed: cfg.seed,
                ..ShapeOptions::default()
            };
            let p = bridge::shape_profile(cfg.lambda, cfg.delta, cfg.backend, &opts).map_err(|e| e.in_module("bridge"))?;
            let mut csv = String::from("t,x,h_lambda,h_star,abs_err\n");
            for (j, &t) in p.t.iter().enumerate() {
                for (i, &x) in p.x.iter().enumerate() {
                    let h = p.value(j, i);
                    let star = bridge::h_star(t, x)?;
                    csv.push_str(&format!(
                        "{},{},{},{},{}\n",
                        fmt_num(t),
                        fmt_num(x),
                        fmt_num(h),
                        fmt_num(star),
                        fmt_num((h - star).abs())
                    ));
                }
            }
            out.write("limit_shape.csv", &csv)?;
            out.json(
                "limit_shape.json",
                json!({"lambda": p.lambda, "delta": p.delta, "backend": p.backend, "sup_error": p.sup_error}),
            )?;
            true
        }
        Command::HittingTime { .. } => {
            let (t, x, lambda) = (cfg.t, cfg.x, cfg.lambda);
            let end = lambda * t;
            let mut density = String::from("s,density\n");
            for k in 1..1000 {
                let s = end * k as f64 / 1000.0;
                density.push_str(&format!("{},{}\n", fmt_num(s), fmt_num(bridge::hitting_density(s, t, x, lambda))));
            }
            out.write("hitting_density.csv", &density)?;
            let bc = BridgeConfig {
                n_paths: cfg.n_paths,
                n_time_steps: 4 * cfg.bins,
                seed: cfg.seed,
            };
            let h = bridge::hitting_time_histogram(t, x, lambda, cfg.bins, 4, &bc).map_err(|e| e.in_module("bridge"))?;
            let mut hist = String::from("bin_start,bin_end,empirical,expected,std_error\n");
            for k in 0..h.empirical.len() {
                hist.push_str(&format!(
                    "{},{},{},{},{}\n",
                    fmt_num(h.edges[k]),
                    fmt_num(h.edges[k + 1]),
                    fmt_num(h.empirical[k]),
                    fmt_num(h.expected[k]),
                    fmt_num(h.std_error[k])
                ));
            }
            out.write("hitting_histogram.csv", &hist)?;
            let disc = h.max_discrepancy();
            out.json(
                "hitting_time.json",
                json!({"t": t, "x": x, "lambda": lambda, "max_discrepancy": disc}),
            )?;
            disc <= 5.0
        }
        Command::Fk { .. } => {
            let grid = SpaceGrid::with_spacing(cfg.half_width, 0.01)?;
            let phi = load_phi(&cfg.phi, grid).map_err(|e| e.in_module("bridge"))?;
            let bc = BridgeConfig::for_duration(cfg.n_paths, cfg.duration, cfg.seed);
            let e = bridge::fk_estimate(&phi, cfg.duration, 0.0, 0.0, &bc).map_err(|e| e.in_module("bridge"))?;
            out.json("fk.json", json!({"phi": cfg.phi, "duration": cfg.duration, "estimate": e}))?;
            true
        }
        Command::Figure1 => {
            let mut csv = String::from("x,h_star_t0.5,h_star_t1,h_star_t1.5\n");
            for k in 0..=600 {
                let x = -3.0 + k as f64 * 0.01;
                let vals = [0.5, 1.0, 1.5].map(|t| bridge::h_star(t, x).map(fmt_num));
                let [a, b, c] = vals;
                csv.push_str(&format!("{},{},{},{}\n", fmt_num(x), a?, b?, c?));
            }
            out.write("figure1.csv", &csv)?;
            true
        }
        Command::Selftest { .. } => {
            let mut reports = Vec::new();
            for &id in &cfg.only {
                let r = acceptance::run(id, cfg.seed).map_err(|e| e.in_module("selftest"))?;
                println!("{}", r.summary_line());
                reports.push(r);
            }
            out.write("selftest.csv", &acceptance::reports_to_csv(&reports))?;
            let summary: Vec<Value> = reports
                .iter()
                .map(|r| json!({"criterion": r.id, "title": r.title, "passed": r.passed(), "seconds": r.seconds, "budget_seconds": r.budget_seconds}))
                .collect();
            out.json("selftest_summary.json", Value::Array(summary))?;
            reports.iter().all(|r| r.passed())
        }
    };
    out.finish(name, cfg, passed)?;
    Ok(passed)
}

/// Parses `args`, runs the command and maps the outcome to an exit status:
/// 0 when every check passed, 1 on a failed check or runtime error,
/// 2 on a usage error.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let cfg = match resolve(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("usage error: {e}");
            return ExitCode::from(2);
        }
    };
    match execute(&cli.command, &cfg) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("kpz-tail").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn flags_override_config() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        fs::write(&path, r#"{"lambda": 4.0, "seed": 7, "dx": 0.1}"#).unwrap();
        let cli = parse(&["--config", path.to_str().unwrap(), "rate", "--lambda", "8"]);
        let cfg = resolve(&cli).unwrap();
        assert_eq!(cfg.lambda, 8.0);
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.dx, 0.1);
    }

    #[test]
    fn invalid_values_are_usage_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        fs::write(&path, r#"{"lambdas": []}"#).unwrap();
        let cli = parse(&["--config", path.to_str().unwrap(), "tail-law"]);
        assert!(matches!(resolve(&cli), Err(Error::Config(_))));
        let cli = parse(&["rate", "--dx=-1"]);
        let err = resolve(&cli).unwrap_err().to_string();
        assert!(err.contains("dx"), "{err}");
        assert!(ExperimentConfig::from_json(r#"{"bogus": 1}"#).is_err());
        let cli = parse(&["selftest", "--only", "12"]);
        assert!(resolve(&cli).is_err());
    }

    #[test]
    fn json_rounding() {
        let v = round_json(json!({"a": [1.0 / 3.0, 2], "b": "s"}));
        assert_eq!(v["a"][0].as_f64().unwrap(), 0.333333333333);
        assert_eq!(v["a"][1], json!(2));
    }

    #[test]
    fn tail_law_rejects_bad_lists() {
        let opts = RateOptions::default();
        assert!(tail_law(&[], &opts).is_err());
        assert!(tail_law(&[8.0, 4.0], &opts).is_err());
        assert!(tail_law(&[2.0], &opts).is_err());
    }
}
