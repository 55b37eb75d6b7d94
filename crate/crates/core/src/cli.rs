//! Command-line front end.
//!
//! Every subcommand reads its settings from flags, optionally layered over
//! a JSON file given with `--config` (flags win). Output goes to `--out` or
//! stdout; warnings and summaries go to stderr. Exit codes: 0 success,
//! 1 verification failure, 2 usage or input error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::closed_form::{full_solution, linear_solution, symmetric_solution, TauSolver};
use crate::dynamics::vf_x4;
use crate::error::Error;
use crate::integrate::{integrate, solve, Field, IntegratorOptions, Termination};
use crate::invariants::{linear_invariants, K_values};
use crate::pde::{convergence_ladder, rarefaction_residual};
use crate::report::{Check, Report, VERSION};
use crate::sampling::Sampler;
use crate::series::{integrate_series, SeriesState};
use crate::state::{LinearState, State5, SymState3};
use crate::verify::{full_suite, SuiteConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Parser, Debug)]
#[command(name = "airy", version = VERSION, about = "Parabolic reductions of the dispersionless shallow-water system")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate the five-field system (or the linear-linear one) and
    /// compare with the closed form.
    Simulate(LinearFlags),
    /// Tabulate the closed-form solution.
    ClosedForm(LinearFlags),
    /// Run the Poisson-structure and invariant checks.
    Verify(VerifyFlags),
    /// Finite-volume solution against the reduction on a resolution ladder.
    PdeCompare(PdeFlags),
    /// Integrate the truncated coefficient hierarchy from parabolic data.
    Series(SeriesFlags),
    /// Residual of the expansion-fan solution at random points.
    Rarefaction(Common),
}

#[derive(Args, Debug, Clone, Default)]
struct Common {
    #[arg(long, allow_negative_numbers = true)]
    alpha0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    gamma0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    zeta0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    omega0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    beta0: Option<f64>,
    /// Final time.
    #[arg(long)]
    t_end: Option<f64>,
    /// Fixed RK4 step (adaptive Dormand–Prince when absent); output
    /// spacing for `closed-form`.
    #[arg(long)]
    dt: Option<f64>,
    /// Tolerance of the adaptive integrator.
    #[arg(long)]
    tol: Option<f64>,
    /// Number of random sample points.
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// JSON file with any of the flag values (snake_case keys).
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct LinearFlags {
    #[command(flatten)]
    common: Common,
    /// Use the linear-linear system (γ = 0; state α, ζ, ω, β).
    #[arg(long)]
    linear: bool,
}

#[derive(Args, Debug)]
struct VerifyFlags {
    #[command(flatten)]
    common: Common,
    /// Scale f by 1.5 inside the tensors; the Jacobi checks must then fail.
    #[arg(long)]
    inject_wrong_f: bool,
}

#[derive(Args, Debug)]
struct PdeFlags {
    #[command(flatten)]
    common: Common,
    /// Comma-separated cell counts.
    #[arg(long, value_delimiter = ',')]
    cells: Option<Vec<usize>>,
}

#[derive(Args, Debug)]
struct SeriesFlags {
    #[command(flatten)]
    common: Common,
    /// Truncation order N of the coefficient series.
    #[arg(long)]
    order: Option<usize>,
}

/// Settings of one run after merging the config file with the flags.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub alpha0: Option<f64>,
    pub gamma0: Option<f64>,
    pub zeta0: Option<f64>,
    pub omega0: Option<f64>,
    pub beta0: Option<f64>,
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
    pub tol: Option<f64>,
    pub points: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub linear: Option<bool>,
    pub inject_wrong_f: Option<bool>,
    pub cells: Option<Vec<usize>>,
    pub order: Option<usize>,
}

impl RunConfig {
    /// Values of `self` where set, `base` otherwise.
    pub fn over(self, base: RunConfig) -> RunConfig {
        RunConfig {
            alpha0: self.alpha0.or(base.alpha0),
            gamma0: self.gamma0.or(base.gamma0),
            zeta0: self.zeta0.or(base.zeta0),
            omega0: self.omega0.or(base.omega0),
            beta0: self.beta0.or(base.beta0),
            t_end: self.t_end.or(base.t_end),
            dt: self.dt.or(base.dt),
            tol: self.tol.or(base.tol),
            points: self.points.or(base.points),
            seed: self.seed.or(base.seed),
            out: self.out.or(base.out),
            format: self.format.or(base.format),
            linear: self.linear.or(base.linear),
            inject_wrong_f: self.inject_wrong_f.or(base.inject_wrong_f),
            cells: self.cells.or(base.cells),
            order: self.order.or(base.order),
        }
    }

    pub fn load(path: &Path) -> Result<RunConfig, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("bad config {}: {e}", path.display())))
    }

    fn state(&self) -> State5 {
        State5::new(
            self.alpha0.unwrap_or(0.0),
            self.gamma0.unwrap_or(-1.0),
            self.zeta0.unwrap_or(1.0),
            self.omega0.unwrap_or(0.0),
            self.beta0.unwrap_or(0.0),
        )
    }

    fn linear_state(&self) -> Result<LinearState, Failure> {
        if self.gamma0.is_some_and(|g| g != 0.0) {
            return Err(Failure::Usage("--linear states have gamma0 = 0".into()));
        }
        let s = LinearState::new(
            self.alpha0.unwrap_or(0.0),
            self.zeta0.unwrap_or(1.0),
            self.omega0.unwrap_or(0.0),
            self.beta0.unwrap_or(0.0),
        );
        if s.to_array().iter().any(|v| !v.is_finite()) {
            return Err(Failure::Usage("initial data must be finite".into()));
        }
        Ok(s)
    }

    fn t_end(&self, default: f64) -> Result<f64, Failure> {
        let t = self.t_end.unwrap_or(default);
        if !(t.is_finite() && t >= 0.0) {
            return Err(Failure::Usage(format!("t_end must be finite and >= 0 (got {t})")));
        }
        Ok(t)
    }

    fn integrator(&self) -> Result<IntegratorOptions, Failure> {
        match (self.dt, self.tol) {
            (Some(dt), _) if !(dt > 0.0 && dt.is_finite()) => Err(Failure::Usage(format!("dt must be > 0 (got {dt})"))),
            (_, Some(tol)) if !(tol > 0.0 && tol.is_finite()) => {
                Err(Failure::Usage(format!("tol must be > 0 (got {tol})")))
            }
            (Some(dt), _) => Ok(IntegratorOptions::rk4(dt)),
            (None, tol) => Ok(IntegratorOptions::adaptive(tol.unwrap_or(1e-10))),
        }
    }

    fn echo(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap_or(serde_json::Value::Null)
    }
}

impl From<&Common> for RunConfig {
    fn from(c: &Common) -> Self {
        RunConfig {
            alpha0: c.alpha0,
            gamma0: c.gamma0,
            zeta0: c.zeta0,
            omega0: c.omega0,
            beta0: c.beta0,
            t_end: c.t_end,
            dt: c.dt,
            tol: c.tol,
            points: c.points,
            seed: c.seed,
            out: c.out.clone(),
            format: c.format,
            ..RunConfig::default()
        }
    }
}

/// Reason for a nonzero exit.
#[derive(Debug)]
pub enum Failure {
    /// Exit code 1.
    Verification,
    /// Exit code 2.
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Verification => 1,
            Failure::Usage(_) => 2,
        }
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                2
            } else {
                let _ = write!(stdout, "{text}");
                0
            };
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(()) => 0,
        Err(f) => {
            if let Failure::Usage(msg) = &f {
                let _ = writeln!(stderr, "error: {msg}");
            }
            f.code()
        }
    }
}

fn dispatch(cmd: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), Failure> {
    let (common, extra) = match &cmd {
        Command::Simulate(f) | Command::ClosedForm(f) => (
            &f.common,
            RunConfig {
                linear: f.linear.then_some(true),
                ..RunConfig::default()
            },
        ),
        Command::Verify(f) => (
            &f.common,
            RunConfig {
                inject_wrong_f: f.inject_wrong_f.then_some(true),
                ..RunConfig::default()
            },
        ),
        Command::PdeCompare(f) => (
            &f.common,
            RunConfig {
                cells: f.cells.clone(),
                ..RunConfig::default()
            },
        ),
        Command::Series(f) => (
            &f.common,
            RunConfig {
                order: f.order,
                ..RunConfig::default()
            },
        ),
        Command::Rarefaction(c) => (c, RunConfig::default()),
    };
    let flags = RunConfig::from(common).over(extra);
    let cfg = match &common.config {
        Some(p) => flags.over(RunConfig::load(p)?),
        None => flags,
    };
    let mut buf = Vec::new();
    let outcome = match cmd {
        Command::Simulate(_) => simulate(&cfg, &mut buf, stderr),
        Command::ClosedForm(_) => closed_form(&cfg, &mut buf, stderr),
        Command::Verify(_) => verify(&cfg, &mut buf, stderr),
        Command::PdeCompare(_) => pde_compare(&cfg, &mut buf, stderr),
        Command::Series(_) => series(&cfg, &mut buf, stderr),
        Command::Rarefaction(_) => rarefaction(&cfg, &mut buf, stderr),
    };
    // Reports are written even when verification fails.
    match &outcome {
        Ok(()) | Err(Failure::Verification) => emit(&cfg, &buf, stdout)?,
        Err(Failure::Usage(_)) => {}
    }
    outcome
}

fn emit(cfg: &RunConfig, buf: &[u8], stdout: &mut dyn Write) -> Result<(), Failure> {
    let res = match &cfg.out {
        Some(p) => std::fs::write(p, buf),
        None => stdout.write_all(buf),
    };
    res.map_err(|e| Failure::Usage(format!("cannot write output: {e}")))
}

fn write_rows(
    format: Format,
    header: &[String],
    rows: &[Vec<f64>],
    meta: serde_json::Value,
    out: &mut Vec<u8>,
) -> Result<(), Failure> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(header).map_err(Error::from)?;
            for r in rows {
                w.serialize(r).map_err(Error::from)?;
            }
            w.flush().map_err(Error::from)?;
        }
        Format::Json => {
            let rows: Vec<serde_json::Map<String, serde_json::Value>> = rows
                .iter()
                .map(|r| header.iter().cloned().zip(r.iter().map(|v| json!(v))).collect())
                .collect();
            let mut doc = meta;
            doc["version"] = json!(VERSION);
            doc["rows"] = json!(rows);
            serde_json::to_writer_pretty(&mut *out, &doc).map_err(Error::from)?;
            out.push(b'\n');
        }
    }
    Ok(())
}

fn write_report(format: Format, report: &Report, out: &mut Vec<u8>) -> Result<(), Failure> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, report).map_err(Error::from)?;
            out.push(b'\n');
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["check", "tolerance", "max_residual", "failing", "evaluated", "passed"])
                .map_err(Error::from)?;
            for c in &report.checks {
                w.write_record([
                    c.name.clone(),
                    format!("{:e}", c.tolerance),
                    format!("{:e}", c.max_residual),
                    c.failing_points.len().to_string(),
                    c.evaluated.to_string(),
                    c.passed.to_string(),
                ])
                .map_err(Error::from)?;
            }
            w.flush().map_err(Error::from)?;
        }
    }
    Ok(())
}

fn names(prefix: &[&str], fields: &[&str], suffix: &str) -> Vec<String> {
    prefix
        .iter()
        .map(|s| s.to_string())
        .chain(fields.iter().map(|f| format!("{f}{suffix}")))
        .collect()
}

fn rel_dev(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / y.abs().max(1.0))
        .fold(0.0, f64::max)
}

fn warn_blowup(stderr: &mut dyn Write, t_end: f64, closed: Option<f64>, detected: Option<f64>) {
    if let Some(ts) = closed {
        let _ = writeln!(
            stderr,
            "warning: closed-form blow-up at t = {ts:.9}{}",
            if t_end >= ts { " (inside the horizon)" } else { "" }
        );
    }
    if let Some(td) = detected {
        let _ = writeln!(stderr, "warning: integration stopped by blow-up at t = {td:.9}");
    }
}

const FIELDS5: [&str; 5] = ["alpha", "gamma", "zeta", "omega", "beta"];
const FIELDS4: [&str; 4] = ["alpha", "zeta", "omega", "beta"];

fn simulate(cfg: &RunConfig, out: &mut Vec<u8>, stderr: &mut dyn Write) -> Result<(), Failure> {
    let t_end = cfg.t_end(1.0)?;
    let opts = cfg.integrator()?;
    let format = cfg.format.unwrap_or(Format::Csv);
    let meta = json!({ "command": "simulate", "config": cfg.echo() });
    if cfg.linear.unwrap_or(false) {
        let s0 = cfg.linear_state()?;
        let sol = solve(
            |y: &[f64], dy: &mut [f64]| dy.copy_from_slice(&vf_x4(&LinearState::from_array([y[0], y[1], y[2], y[3]]))),
            &s0.to_array(),
            t_end,
            &opts,
        )?;
        let mut header = names(&["t"], &FIELDS4, "");
        header.extend(["Hl1", "Hl2", "Hl3"].map(String::from));
        header.extend(names(&[], &FIELDS4, "_cf"));
        header.push("max_dev".into());
        let rows: Vec<Vec<f64>> = sol
            .t
            .iter()
            .zip(&sol.y)
            .map(|(t, y)| {
                let s = LinearState::from_array([y[0], y[1], y[2], y[3]]);
                let h = linear_invariants(&s, s.zeta).unwrap_or([f64::NAN; 3]);
                let cf = linear_solution(*t, &s0).map(|c| c.to_array()).unwrap_or([f64::NAN; 4]);
                let mut row = vec![*t];
                row.extend_from_slice(y);
                row.extend(h);
                row.extend(cf);
                row.push(rel_dev(y, &cf));
                row
            })
            .collect();
        let closed = (s0.alpha < 0.0).then(|| -1.0 / s0.alpha);
        let detected = matches!(sol.reason, Termination::BlowUp | Termination::StepUnderflow).then(|| sol.last().0);
        warn_blowup(stderr, t_end, closed, detected);
        return write_rows(format, &header, &rows, meta, out);
    }
    let s0 = cfg.state();
    s0.validate()?;
    let tr = integrate(Field::X, &s0, t_end, &opts)?;
    let mut header = names(&["t"], &FIELDS5, "");
    header.extend(["K0", "K1", "K2"].map(String::from));
    header.extend(names(&[], &FIELDS5, "_cf"));
    header.push("max_dev".into());
    let rows: Vec<Vec<f64>> = tr
        .samples
        .iter()
        .map(|smp| {
            let y = smp.state.to_array();
            let cf = full_solution(smp.t, &s0).map(|c| c.to_array()).unwrap_or([f64::NAN; 5]);
            let mut row = vec![smp.t];
            row.extend(y);
            row.extend(smp.k);
            row.extend(cf);
            row.push(rel_dev(&y, &cf));
            row
        })
        .collect();
    let closed = TauSolver::new(s0.alpha, s0.gamma).ok().and_then(|s| s.blowup_time());
    warn_blowup(stderr, t_end, closed, tr.blowup_time());
    write_rows(format, &header, &rows, meta, out)
}

fn closed_form(cfg: &RunConfig, out: &mut Vec<u8>, stderr: &mut dyn Write) -> Result<(), Failure> {
    let t_end = cfg.t_end(1.0)?;
    let dt = match cfg.dt {
        Some(dt) if !(dt > 0.0 && dt.is_finite()) => return Err(Failure::Usage(format!("dt must be > 0 (got {dt})"))),
        Some(dt) => dt,
        None => t_end / 100.0,
    };
    let steps = if t_end == 0.0 { 0 } else { (t_end / dt).ceil() as usize };
    let times = (0..=steps).map(|k| (k as f64 * dt).min(t_end));
    let format = cfg.format.unwrap_or(Format::Csv);
    let meta = json!({ "command": "closed-form", "config": cfg.echo() });
    let mut rows = Vec::new();
    let header;
    let blowup;
    if cfg.linear.unwrap_or(false) {
        let s0 = cfg.linear_state()?;
        header = names(&["t"], &FIELDS4, "");
        blowup = (s0.alpha < 0.0).then(|| -1.0 / s0.alpha);
        for t in times {
            match linear_solution(t, &s0) {
                Ok(s) => rows.push(std::iter::once(t).chain(s.to_array()).collect()),
                Err(_) => break,
            }
        }
    } else {
        let s0 = cfg.state();
        s0.validate()?;
        header = names(&["t"], &FIELDS5, "")
            .into_iter()
            .chain(["K0", "K1", "K2"].map(String::from))
            .collect();
        blowup = TauSolver::new(s0.alpha, s0.gamma)?.blowup_time();
        for t in times {
            match full_solution(t, &s0) {
                Ok(s) => {
                    let k = K_values(&s).map(|k| [k.k0, k.k1, k.k2]).unwrap_or([f64::NAN; 3]);
                    rows.push(std::iter::once(t).chain(s.to_array()).chain(k).collect());
                }
                Err(Error::OutOfDomain { .. }) => break,
                Err(e) => return Err(e.into()),
            }
        }
    }
    warn_blowup(stderr, t_end, blowup, None);
    write_rows(format, &header, &rows, meta, out)
}

fn verify(cfg: &RunConfig, out: &mut Vec<u8>, stderr: &mut dyn Write) -> Result<(), Failure> {
    let suite = SuiteConfig {
        points: cfg.points.unwrap_or(100),
        seed: cfg.seed.unwrap_or(0),
        f_factor: if cfg.inject_wrong_f.unwrap_or(false) { 1.5 } else { 1.0 },
    };
    if suite.points == 0 {
        let _ = writeln!(stderr, "warning: --points 0 makes every check vacuous");
    }
    let report = full_suite(&suite)?;
    let _ = write!(stderr, "{}", report.to_text());
    write_report(cfg.format.unwrap_or(Format::Json), &report, out)?;
    if report.passed {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn pde_compare(cfg: &RunConfig, out: &mut Vec<u8>, stderr: &mut dyn Write) -> Result<(), Failure> {
    let s0 = cfg.state();
    s0.validate()?;
    let t_end = cfg.t_end(0.2)?;
    let cells = cfg.cells.clone().unwrap_or_else(|| vec![400, 800, 1600]);
    if cells.is_empty() || cells.iter().any(|&n| n < 10) {
        return Err(Failure::Usage("cells must list counts >= 10".into()));
    }
    let ladder = convergence_ladder(&s0, t_end, &cells)?;
    let drift = s0.to_sigma()?.delta * t_end;
    let header: Vec<String> = [
        "cells",
        "dx",
        "t",
        "linf_eta",
        "linf_u",
        "l1_eta",
        "l1_u",
        "linf",
        "vertex_offset",
        "vertex_drift",
        "expected_drift",
        "order",
    ]
    .map(String::from)
    .to_vec();
    let rows: Vec<Vec<f64>> = ladder
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let order = if i == 0 { f64::NAN } else { ladder.orders[i - 1] };
            vec![
                r.cells as f64,
                r.dx,
                r.t,
                r.linf_eta,
                r.linf_u,
                r.l1_eta,
                r.l1_u,
                r.linf,
                r.vertex_offset,
                r.vertex_drift,
                drift,
                order,
            ]
        })
        .collect();
    let _ = writeln!(
        stderr,
        "errors {} monotonically; orders {:?}",
        if ladder.monotone { "decrease" } else { "do not decrease" },
        ladder.orders
    );
    if ladder.rows.iter().any(|r| r.truncated) {
        let _ = writeln!(stderr, "warning: the support reached the domain boundary before t_end");
    }
    let meta = json!({ "command": "pde-compare", "config": cfg.echo(), "monotone": ladder.monotone });
    write_rows(cfg.format.unwrap_or(Format::Csv), &header, &rows, meta, out)
}

fn series(cfg: &RunConfig, out: &mut Vec<u8>, stderr: &mut dyn Write) -> Result<(), Failure> {
    if cfg.omega0.is_some_and(|v| v != 0.0) || cfg.beta0.is_some_and(|v| v != 0.0) {
        return Err(Failure::Usage(
            "series starts from symmetric data: omega0 = beta0 = 0".into(),
        ));
    }
    let p = SymState3 {
        alpha: cfg.alpha0.unwrap_or(0.0),
        gamma: cfg.gamma0.unwrap_or(-1.0),
        zeta: cfg.zeta0.unwrap_or(1.0),
    };
    let order = cfg.order.unwrap_or(1);
    if order == 0 {
        return Err(Failure::Usage("order must be >= 1".into()));
    }
    let t_end = cfg.t_end(1.0)?;
    let s0 = SeriesState::from_parabolic(&p, order)?;
    let tr = integrate_series(&s0, t_end, &cfg.integrator()?)?;
    let mut dev = 0.0f64;
    for (t, s) in tr.t.iter().zip(&tr.states) {
        if let Ok(c) = symmetric_solution(*t, p.alpha, p.gamma, p.zeta) {
            dev = dev.max(rel_dev(&[s.u[0], s.eta[1], s.eta[0]], &c.to_array()));
        }
    }
    let _ = writeln!(
        stderr,
        "max relative deviation from the parabolic closed form: {dev:.3e}"
    );
    if matches!(tr.reason, Termination::BlowUp | Termination::StepUnderflow) {
        let _ = writeln!(
            stderr,
            "warning: integration stopped by blow-up at t = {:.9}",
            tr.t[tr.t.len() - 1]
        );
    }
    match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => tr.write_csv(&mut *out)?,
        Format::Json => {
            let header: Vec<String> = std::iter::once("t".to_string())
                .chain((0..=order).map(|m| format!("eta{m}")))
                .chain((0..=order).map(|m| format!("u{m}")))
                .collect();
            let rows: Vec<Vec<f64>> =
                tr.t.iter()
                    .zip(&tr.states)
                    .map(|(t, s)| {
                        std::iter::once(*t)
                            .chain(s.eta.iter().copied())
                            .chain(s.u.iter().copied())
                            .collect()
                    })
                    .collect();
            let meta = json!({ "command": "series", "config": cfg.echo(), "closed_form_deviation": dev });
            write_rows(Format::Json, &header, &rows, meta, out)?;
        }
    }
    Ok(())
}

/// Residual of the expansion fan at `n` seeded points with
/// `x ∈ [−5, 5]`, `t ∈ [0.05, 5]`.
pub fn rarefaction_check(n: usize, seed: u64) -> Check {
    let mut s = Sampler::new(seed);
    let res: Vec<Option<f64>> = (0..n)
        .map(|_| {
            let x = s.uniform(-5.0, 5.0);
            let t = s.uniform(0.05, 5.0);
            rarefaction_residual(x, t).ok().map(|(a, b)| a.abs().max(b.abs()))
        })
        .collect();
    Check::from_residuals("rarefaction residual", 1e-14, &res)
}

fn rarefaction(cfg: &RunConfig, out: &mut Vec<u8>, stderr: &mut dyn Write) -> Result<(), Failure> {
    let n = cfg.points.unwrap_or(1000);
    let seed = cfg.seed.unwrap_or(0);
    let report = Report::new(
        "rarefaction",
        json!({ "points": n, "seed": seed, "x": [-5.0, 5.0], "t": [0.05, 5.0] }),
        vec![rarefaction_check(n, seed)],
    );
    let _ = write!(stderr, "{}", report.to_text());
    write_report(cfg.format.unwrap_or(Format::Json), &report, out)?;
    if report.passed {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}
