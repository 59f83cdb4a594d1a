//! Forward integration, parameter sweeps and power-law fits.

use std::io;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::admissible::{AdmissibleError, AdmissibleSystem};
use crate::model::Hypernetwork;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("state became non-finite at step {step} (lambda = {lambda})")]
    NonFinite { step: usize, lambda: f64 },
    #[error("need at least {needed} usable points, found {found}")]
    InsufficientPoints { needed: usize, found: usize },
    #[error("unknown column {0}")]
    UnknownColumn(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("malformed diagram: {0}")]
    Malformed(String),
    #[error(transparent)]
    Admissible(#[from] AdmissibleError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Integrator {
    Euler,
    Rk4,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimConfig {
    pub dt: f64,
    pub t_end: f64,
    pub initial: Vec<f64>,
    pub lambdas: Vec<f64>,
    /// A final state counts as converged when `‖f‖∞` is below this.
    pub steady_tol: f64,
    /// Record every `stride`-th step in traces (the final state is always kept).
    pub stride: usize,
    pub integrator: Integrator,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            dt: 0.1,
            t_end: 2000.0,
            initial: vec![0.1, -0.2, 0.3, 0.4, 0.5],
            lambdas: linspace(-0.03, 0.03, 600),
            steady_tol: 1e-8,
            stride: 100,
            integrator: Integrator::Euler,
        }
    }
}

impl SimConfig {
    pub fn validate(&self, dim: usize) -> Result<(), SimError> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(SimError::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(SimError::Config(format!("t_end must be positive, got {}", self.t_end)));
        }
        if self.lambdas.is_empty() {
            return Err(SimError::Config("lambda grid is empty".into()));
        }
        if self.initial.len() != dim {
            return Err(SimError::Config(format!(
                "initial state has {} entries, the system has dimension {dim}",
                self.initial.len()
            )));
        }
        if self.stride == 0 {
            return Err(SimError::Config("stride must be at least 1".into()));
        }
        Ok(())
    }

    /// `⌈t_end / dt⌉`, ignoring rounding noise in the division.
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt - 1e-9).ceil().max(0.0) as usize
    }
}

/// `n` equally spaced values from `a` to `b`, both included.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimulationTrace {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

impl SimulationTrace {
    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("trace holds at least the initial state")
    }
}

struct Stepper<'a> {
    system: &'a AdmissibleSystem,
    lambda: f64,
    dt: f64,
    k: [Vec<f64>; 4],
    tmp: Vec<f64>,
}

impl<'a> Stepper<'a> {
    fn new(system: &'a AdmissibleSystem, lambda: f64, dt: f64) -> Self {
        let n = system.dim();
        Stepper { system, lambda, dt, k: std::array::from_fn(|_| vec![0.0; n]), tmp: vec![0.0; n] }
    }

    fn f(&self, x: &[f64], out: &mut [f64]) {
        self.system.eval_into(x, self.lambda, out).expect("dimension checked by the config");
    }

    fn euler(&mut self, x: &mut [f64]) {
        let mut k = std::mem::take(&mut self.k[0]);
        self.f(x, &mut k);
        for (xi, ki) in x.iter_mut().zip(&k) {
            *xi += self.dt * ki;
        }
        self.k[0] = k;
    }

    fn rk4(&mut self, x: &mut [f64]) {
        let dt = self.dt;
        let mut k = std::mem::take(&mut self.k);
        let mut tmp = std::mem::take(&mut self.tmp);
        self.f(x, &mut k[0]);
        for (stage, scale) in [(1, 0.5), (2, 0.5), (3, 1.0)] {
            for i in 0..x.len() {
                tmp[i] = x[i] + scale * dt * k[stage - 1][i];
            }
            self.f(&tmp, &mut k[stage]);
        }
        for i in 0..x.len() {
            x[i] += dt / 6.0 * (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i]);
        }
        self.k = k;
        self.tmp = tmp;
    }

    fn step(&mut self, integrator: Integrator, x: &mut [f64]) {
        match integrator {
            Integrator::Euler => self.euler(x),
            Integrator::Rk4 => self.rk4(x),
        }
    }
}

/// Integrates from `config.initial` for `config.steps()` steps, recording
/// every `config.stride`-th state and the final one.
pub fn integrate(system: &AdmissibleSystem, lambda: f64, config: &SimConfig) -> Result<SimulationTrace, SimError> {
    config.validate(system.dim())?;
    let steps = config.steps();
    let mut x = config.initial.clone();
    let mut trace = SimulationTrace { times: vec![0.0], states: vec![x.clone()] };
    let mut stepper = Stepper::new(system, lambda, config.dt);
    for n in 1..=steps {
        stepper.step(config.integrator, &mut x);
        if x.iter().any(|v| !v.is_finite()) {
            return Err(SimError::NonFinite { step: n, lambda });
        }
        if n % config.stride == 0 || n == steps {
            trace.times.push(n as f64 * config.dt);
            trace.states.push(x.clone());
        }
    }
    Ok(trace)
}

/// Forward Euler: `x_{n+1} = x_n + dt f(x_n, λ)`.
pub fn integrate_euler(system: &AdmissibleSystem, lambda: f64, config: &SimConfig) -> Result<SimulationTrace, SimError> {
    integrate(system, lambda, &SimConfig { integrator: Integrator::Euler, ..config.clone() })
}

/// Final state only, without recording a trace.
pub fn final_state(system: &AdmissibleSystem, lambda: f64, config: &SimConfig) -> Result<Vec<f64>, SimError> {
    config.validate(system.dim())?;
    let mut x = config.initial.clone();
    let mut stepper = Stepper::new(system, lambda, config.dt);
    for n in 1..=config.steps() {
        stepper.step(config.integrator, &mut x);
        if x.iter().any(|v| !v.is_finite()) {
            return Err(SimError::NonFinite { step: n, lambda });
        }
    }
    Ok(x)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagramRow {
    pub lambda: f64,
    pub state: Vec<f64>,
    /// `‖f(state)‖∞`; infinite when the integration failed.
    pub residual: f64,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BifurcationDiagram {
    /// State column names: vertex ids, suffixed `.c` for higher components.
    pub columns: Vec<String>,
    pub rows: Vec<DiagramRow>,
}

/// Column names for the state layout of `net`.
pub fn state_columns(net: &Hypernetwork) -> Vec<String> {
    net.vertices()
        .iter()
        .flat_map(|v| {
            (0..v.dim).map(move |c| if v.dim == 1 { v.id.clone() } else { format!("{}.{c}", v.id) })
        })
        .collect()
}

fn sweep_row(system: &AdmissibleSystem, lambda: f64, config: &SimConfig) -> DiagramRow {
    match final_state(system, lambda, config) {
        Ok(state) => {
            let f = system.eval(&state, lambda).expect("dimension checked by the config");
            let residual = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            DiagramRow { lambda, state, residual, converged: residual <= config.steady_tol }
        }
        Err(_) => DiagramRow {
            lambda,
            state: vec![f64::NAN; system.dim()],
            residual: f64::INFINITY,
            converged: false,
        },
    }
}

/// Integrates once per grid value of λ. Rows follow the grid order and do
/// not depend on `jobs`; a row whose integration blows up is flagged with
/// NaN state and infinite residual.
pub fn sweep(system: &AdmissibleSystem, config: &SimConfig, jobs: usize) -> Result<BifurcationDiagram, SimError> {
    config.validate(system.dim())?;
    let rows = if jobs <= 1 {
        config.lambdas.iter().map(|&l| sweep_row(system, l, config)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| SimError::Config(e.to_string()))?;
        pool.install(|| config.lambdas.par_iter().map(|&l| sweep_row(system, l, config)).collect())
    };
    Ok(BifurcationDiagram { columns: state_columns(system.network()), rows })
}

impl BifurcationDiagram {
    pub fn column(&self, name: &str) -> Result<usize, SimError> {
        self.columns.iter().position(|c| c == name).ok_or_else(|| SimError::UnknownColumn(name.to_string()))
    }

    /// Writes `lambda,<columns>,residual,converged`.
    pub fn write_csv<W: io::Write>(&self, w: W) -> Result<(), SimError> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["lambda".to_string()];
        header.extend(self.columns.iter().cloned());
        header.push("residual".into());
        header.push("converged".into());
        out.write_record(&header)?;
        // `{:?}` is the shortest round-tripping form and switches to
        // exponent notation for tiny values.
        for row in &self.rows {
            let mut rec = vec![format!("{:?}", row.lambda)];
            rec.extend(row.state.iter().map(|v| format!("{v:?}")));
            rec.push(format!("{:?}", row.residual));
            rec.push(row.converged.to_string());
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: io::Read>(r: R) -> Result<Self, SimError> {
        let mut reader = csv::Reader::from_reader(r);
        let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
        let n = header.len();
        if n < 3 || header[0] != "lambda" || header[n - 2] != "residual" || header[n - 1] != "converged" {
            return Err(SimError::Malformed("expected header lambda,...,residual,converged".into()));
        }
        let columns = header[1..n - 2].to_vec();
        let num = |s: &str| s.trim().parse::<f64>().map_err(|_| SimError::Malformed(format!("not a number: {s}")));
        let mut rows = Vec::new();
        for rec in reader.records() {
            let rec = rec?;
            let converged = match rec[n - 1].trim() {
                "true" => true,
                "false" => false,
                other => return Err(SimError::Malformed(format!("not a boolean: {other}"))),
            };
            rows.push(DiagramRow {
                lambda: num(&rec[0])?,
                state: (1..n - 2).map(|i| num(&rec[i])).collect::<Result<_, _>>()?,
                residual: num(&rec[n - 2])?,
                converged,
            });
        }
        Ok(BifurcationDiagram { columns, rows })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

pub const MIN_SLOPE_POINTS: usize = 5;
/// Quantities at or below this are treated as zero and skipped.
pub const SLOPE_FLOOR: f64 = 1e-14;

/// Least-squares line through `(ln x, ln y)`.
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Result<SlopeFit, SimError> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(&x, &y)| x > 0.0 && y > SLOPE_FLOOR && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < MIN_SLOPE_POINTS {
        return Err(SimError::InsufficientPoints { needed: MIN_SLOPE_POINTS, found: pts.len() });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(SimError::InsufficientPoints { needed: 2, found: 1 });
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(SlopeFit { slope, intercept, r_squared, points: pts.len() })
}

/// Log-log slope of `|a - b|` against λ over rows with λ in `[lo, hi]`.
pub fn loglog_slope(diagram: &BifurcationDiagram, a: &str, b: &str, lo: f64, hi: f64) -> Result<SlopeFit, SimError> {
    let (ia, ib) = (diagram.column(a)?, diagram.column(b)?);
    let (xs, ys): (Vec<f64>, Vec<f64>) = diagram
        .rows
        .iter()
        .filter(|r| r.lambda >= lo && r.lambda <= hi)
        .map(|r| (r.lambda, (r.state[ia] - r.state[ib]).abs()))
        .unzip();
    fit_loglog(&xs, &ys)
}
