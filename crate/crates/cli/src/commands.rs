//! Subcommand implementations. Each one reads its inputs, calls the library
//! and writes the library's results verbatim.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use qap_core::apgen::{
    ap_classify, ApClassification, ApGenerator, Mode, DEFAULT_EPSILONS, DEFAULT_TAU_RANGE,
    DEFAULT_WINDOW,
};
use qap_core::dynamics::{solve_forward, trajectory_csv, trajectory_residual, LinearSpec};
use qap_core::hopfield::{
    back_to_quantum, check_report, picard_solve, quantum_residuals, residual, CheckOptions,
    HopfieldSpec, PicardConfig,
};
use qap_core::logmap::{guard_window, lift, lower};
use qap_core::{Error, GridFunction, LogSignal};

use crate::config::{read_json, require, Direction, InputKind, RunConfig};
use crate::error::CliError;

/// Global settings after merging flags over the config file.
#[derive(Debug, Clone)]
pub struct Globals {
    pub q: Option<f64>,
    pub window: Option<(i64, i64)>,
    pub tol: Option<f64>,
    pub seed: u64,
    pub out: PathBuf,
}

pub const DEFAULT_HOPFIELD_WINDOW: (i64, i64) = (
    DEFAULT_WINDOW.0 + DEFAULT_TAU_RANGE.0,
    DEFAULT_WINDOW.1 + DEFAULT_TAU_RANGE.1,
);
pub const DEFAULT_R0: f64 = 1.0;
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;
pub const DEFAULT_PICARD_TOL: f64 = 1e-11;
pub const DEFAULT_MAX_ITER: usize = 1000;

/// Pretty JSON with a trailing newline, the format of every report file.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn write(out: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    fs::create_dir_all(out)?;
    fs::write(out.join(name), contents)?;
    Ok(())
}

pub fn translation_csv_name(k: usize) -> String {
    format!("translation_{k}.csv")
}

pub struct AnalyzeArgs {
    pub input: Option<PathBuf>,
    pub kind: Option<InputKind>,
    pub mode: Option<Mode>,
    pub epsilons: Option<Vec<f64>>,
    pub tau_range: Option<(i64, i64)>,
}

pub fn analyze(g: &Globals, cfg: &RunConfig, args: AnalyzeArgs) -> Result<(), CliError> {
    let c = &cfg.analyze;
    let input = require(args.input.or_else(|| c.input.clone()), "analyze.input")?;
    let kind = args.kind.or(c.kind).unwrap_or(InputKind::Generator);
    let mode = args.mode.or(c.mode).unwrap_or(Mode::Unweighted);
    let epsilons = args
        .epsilons
        .or_else(|| c.epsilons.clone())
        .unwrap_or_else(|| DEFAULT_EPSILONS.to_vec());
    let tau_range = args.tau_range.or(c.tau_range).unwrap_or(DEFAULT_TAU_RANGE);
    let window = g.window.unwrap_or(DEFAULT_WINDOW);
    let q = g.q.unwrap_or(2.0);
    let report = match kind {
        InputKind::Generator => {
            let f: ApGenerator = read_json(&input, "generator")?;
            ap_classify(&f, &epsilons, tau_range, window, q, mode)?
        }
        InputKind::LogSignal => {
            let f: LogSignal = read_json(&input, "log signal")?;
            ap_classify(&f, &epsilons, tau_range, window, q, mode)?
        }
        InputKind::GridFunction => {
            let f: GridFunction = read_json(&input, "grid function")?;
            ap_classify(&lift(&f), &epsilons, tau_range, window, f.lattice().q(), mode)?
        }
    };
    write_classification(&g.out, "analysis.json", &report)
}

fn write_classification(out: &Path, name: &str, report: &ApClassification) -> Result<(), CliError> {
    write(out, name, &to_json(report))?;
    for (k, e) in report.entries.iter().enumerate() {
        write(out, &translation_csv_name(k), &e.report.to_csv())?;
    }
    Ok(())
}

pub fn transform(
    g: &Globals,
    cfg: &RunConfig,
    input: Option<PathBuf>,
    direction: Option<Direction>,
) -> Result<(), CliError> {
    let input = require(input.or_else(|| cfg.transform.input.clone()), "transform.input")?;
    let direction = require(direction.or(cfg.transform.direction), "transform.direction")?;
    match direction {
        Direction::Lift => {
            let f: GridFunction = read_json(&input, "grid function")?;
            guard_window(f.lattice().n_min(), f.lattice().n_max())?;
            write(&g.out, "lifted.json", &to_json(&lift(&f)))
        }
        Direction::Lower => {
            let s: LogSignal = read_json(&input, "log signal")?;
            let q = require(g.q, "q")?;
            guard_window(s.n_min(), s.n_max())?;
            write(&g.out, "lowered.json", &to_json(&lower(&s, q)?))
        }
    }
}

/// System file for `solve`.
#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SystemFile {
    Linear(LinearSpec),
    Hopfield { spec: HopfieldSpec },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub n_start: i64,
    pub n_end: i64,
    pub max_delay: usize,
    /// `sup |Δx(n) - F(n, ...)|` re-evaluated along the trajectory.
    pub residual: f64,
    pub tol: f64,
    pub residual_ok: bool,
}

pub fn solve(
    g: &Globals,
    cfg: &RunConfig,
    system: Option<PathBuf>,
    history: Option<PathBuf>,
    n_end: Option<i64>,
) -> Result<(), CliError> {
    let c = &cfg.solve;
    let system = require(system.or_else(|| c.system.clone()), "solve.system")?;
    let history = require(history.or_else(|| c.history.clone()), "solve.history")?;
    let n_end = require(n_end.or(c.n_end).or(g.window.map(|w| w.1)), "solve.n_end")?;
    let file: SystemFile = read_json(&system, "system")?;
    let hist: LogSignal = read_json(&history, "history")?;
    let (sys, q) = match &file {
        SystemFile::Linear(spec) => (spec.system()?, spec.q),
        SystemFile::Hopfield { spec } => (spec.as_system(), Some(spec.q())),
    };
    if q.is_some() {
        guard_window(hist.n_min(), n_end)?;
    }
    let traj = solve_forward(&sys, &hist, n_end)?;
    let n_start = hist.n_max();
    let res = trajectory_residual(&sys, &traj, n_start)?;
    let scale = traj.samples().sup_norm().max(1.0);
    let tol = g.tol.unwrap_or(8.0 * f64::EPSILON) * scale;
    write(&g.out, "trajectory.csv", &trajectory_csv(traj.samples(), q))?;
    let report = SolveReport {
        n_start,
        n_end,
        max_delay: sys.max_delay(),
        residual: res,
        tol,
        residual_ok: res <= tol,
    };
    write(&g.out, "solve_report.json", &to_json(&report))
}

pub struct HopfieldArgs {
    pub spec: Option<PathBuf>,
    pub r0: Option<f64>,
    pub tail_tol: Option<f64>,
    pub max_iter: Option<usize>,
}

struct HopfieldRun {
    spec: HopfieldSpec,
    r0: f64,
    window: (i64, i64),
}

fn hopfield_inputs(g: &Globals, cfg: &RunConfig, args: &HopfieldArgs) -> Result<HopfieldRun, CliError> {
    let path = require(args.spec.clone().or_else(|| cfg.hopfield.spec.clone()), "hopfield.spec")?;
    let spec: HopfieldSpec = read_json(&path, "hopfield spec")?;
    if let Some(q) = g.q {
        if q != spec.q() {
            return Err(CliError::Input(format!(
                "--q {q} conflicts with the spec's q = {}",
                spec.q()
            )));
        }
    }
    Ok(HopfieldRun {
        spec,
        r0: args.r0.or(cfg.hopfield.r0).unwrap_or(DEFAULT_R0),
        window: g.window.unwrap_or(DEFAULT_HOPFIELD_WINDOW),
    })
}

pub fn hopfield_check(g: &Globals, cfg: &RunConfig, args: HopfieldArgs) -> Result<(), CliError> {
    let run = hopfield_inputs(g, cfg, &args)?;
    let h = &cfg.hopfield;
    let defaults = CheckOptions::default();
    let opts = CheckOptions {
        grid_points: h.grid_points.unwrap_or(defaults.grid_points),
        seed: g.seed,
        spot_samples: h.spot_samples.unwrap_or(defaults.spot_samples),
        spot_radius: h.spot_radius.unwrap_or(defaults.spot_radius),
    };
    let report = check_report(&run.spec, run.r0, run.window, &opts)?;
    write(&g.out, "certificate.json", &to_json(&report))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HopfieldSolveReport {
    pub r0: f64,
    pub window: (i64, i64),
    pub tol: f64,
    pub tail_tol: f64,
    pub residual: f64,
    pub residual_bound: f64,
    pub residual_constant: f64,
    /// Largest per-index residual of the quantum-scale network.
    pub quantum_residual: f64,
}

pub fn hopfield_solve(g: &Globals, cfg: &RunConfig, args: HopfieldArgs) -> Result<(), CliError> {
    let run = hopfield_inputs(g, cfg, &args)?;
    let h = &cfg.hopfield;
    let mut pc = PicardConfig::new(run.r0, run.window);
    pc.tol = g.tol.unwrap_or(DEFAULT_PICARD_TOL);
    pc.tail_tol = args.tail_tol.or(h.tail_tol).unwrap_or(DEFAULT_TAIL_TOL);
    pc.max_iter = args.max_iter.or(h.max_iter).unwrap_or(DEFAULT_MAX_ITER);
    let sol = match picard_solve(&run.spec, &pc) {
        Err(Error::Infeasible(cert)) => {
            write(&g.out, "certificate.json", &to_json(&*cert))?;
            return Err(Error::Infeasible(cert).into());
        }
        other => other?,
    };
    let quantum = back_to_quantum(&sol.solution, run.spec.q())?;
    write(&g.out, "solution_log.csv", &trajectory_csv(sol.solution.samples(), None))?;
    write(
        &g.out,
        "solution_quantum.csv",
        &trajectory_csv(quantum.samples(), Some(run.spec.q())),
    )?;
    write(&g.out, "convergence.json", &to_json(&sol.log))?;

    let ap_window = h.ap.window.unwrap_or(DEFAULT_WINDOW);
    let tau_range = h.ap.tau_range.unwrap_or(DEFAULT_TAU_RANGE);
    let epsilons = h.ap.epsilons.clone().unwrap_or_else(|| DEFAULT_EPSILONS.to_vec());
    let ap = ap_classify(&sol.solution, &epsilons, tau_range, ap_window, run.spec.q(), Mode::Unweighted)?;
    write(&g.out, "ap_report.json", &to_json(&ap))?;

    let res = residual(&sol.solution, &run.spec, run.window)?;
    let q_res = quantum_residuals(&quantum, &run.spec, run.window)?
        .into_iter()
        .fold(0.0, f64::max);
    let report = HopfieldSolveReport {
        r0: run.r0,
        window: run.window,
        tol: pc.tol,
        tail_tol: pc.tail_tol,
        residual: res,
        residual_bound: sol.residual_constant * (pc.tol + pc.tail_tol),
        residual_constant: sol.residual_constant,
        quantum_residual: q_res,
    };
    write(&g.out, "solve_report.json", &to_json(&report))
}
