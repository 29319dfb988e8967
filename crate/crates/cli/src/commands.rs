//! The four subcommands. Each returns the text it would print so the
//! acceptance tests can drive them without spawning processes.

use std::fmt;
use std::path::Path;

use rayon::prelude::*;
use vip_core::oracles::brute_force_vi_check_seeded;
use vip_core::problems::{linear_saddle_operator, th_operator, BenchmarkProblem};
use vip_core::{
    einexpm_solve, einexpmls_solve, natural_residual, problem_by_name, ASchedule, EInexPmConfig, Method, Point,
    SolveStatus, SolveTrace, StopRule, VipError,
};

use crate::config::RunConfig;
use crate::format::{fmt_g17, trace_csv, Csv, TABLE1_HEADER, TABLE3_HEADER};

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    Usage = 2,
    NoConvergence = 3,
    Reference = 4,
}

#[derive(Debug)]
pub struct CliError {
    pub exit: Exit,
    pub source: anyhow::Error,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.source)
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn usage(e: impl Into<anyhow::Error>) -> Self {
        CliError { exit: Exit::Usage, source: e.into() }
    }

    fn reference(e: impl Into<anyhow::Error>) -> Self {
        CliError { exit: Exit::Reference, source: e.into() }
    }

    fn from_core(e: VipError) -> Self {
        match e {
            VipError::Internal(_) => CliError::reference(e),
            _ => CliError::usage(e),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Tolerance of the natural residual reported in summaries.
pub const RESIDUAL_PROJ_TOL: f64 = 1e-12;

/// Outer tolerance for the `table1` sweep; both displacement tests use it.
pub const TABLE1_TOL: f64 = 4.5e-5;
pub const TABLE1_MAX_OUTER: usize = 10_000;

/// `(alpha, [gamma_bar])` cells of the step-size sweep.
pub const TABLE1_GRID: [(f64, &[f64]); 5] = [
    (0.01, &[0.01, 0.106, 0.49]),
    (0.11, &[0.01, 0.106, 0.394]),
    (0.21, &[0.01, 0.106, 0.394]),
    (0.31, &[0.01, 0.106, 0.298]),
    (0.41, &[0.01, 0.106]),
];

pub const TABLE3_DIMS: [usize; 19] = [5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20, 25, 50, 100];
pub const TABLE3_EXPONENTS: [f64; 2] = [10.0, 15.0];
pub const TABLE3_H: f64 = 0.2;
pub const TABLE3_ALPHA: f64 = 0.57;
pub const TABLE3_GAMMA_BAR: f64 = 0.106;
pub const TABLE3_TOL: f64 = 1e-2;
pub const TABLE3_MAX_OUTER: usize = 20_000;

fn write_out(path: Option<&Path>, csv: &Csv) -> CliResult<()> {
    if let Some(path) = path {
        std::fs::write(path, csv.as_str())
            .map_err(|e| CliError::usage(anyhow::Error::new(e).context(format!("writing {}", path.display()))))?;
    }
    Ok(())
}

/// Outcome of `solve`.
#[derive(Debug)]
pub struct SolveReport {
    pub x: Point,
    pub trace: SolveTrace,
    pub residual: f64,
    pub csv: Csv,
}

impl SolveReport {
    pub fn summary(&self) -> String {
        format!(
            "status={} outer={} fw_total={} residual={}",
            self.trace.status,
            self.trace.outer_steps,
            self.trace.fw_total(),
            fmt_g17(self.residual)
        )
    }

    pub fn exit(&self) -> Exit {
        match self.trace.status {
            SolveStatus::Converged => Exit::Ok,
            SolveStatus::MaxOuter | SolveStatus::Stalled => Exit::NoConvergence,
        }
    }
}

pub fn load_problem(name: &str) -> CliResult<BenchmarkProblem> {
    problem_by_name(name).map_err(CliError::from_core)
}

pub fn run_solver(problem: &BenchmarkProblem, cfg: &RunConfig) -> CliResult<(Point, SolveTrace)> {
    let out = match cfg.method {
        Method::EInexPm => einexpm_solve(problem, &cfg.einexpm(), &problem.x_start),
        Method::EInexPmLs => einexpmls_solve(problem, &cfg.ls(), &problem.x_start),
    };
    out.map_err(CliError::usage)
}

pub fn solve(cfg: &RunConfig) -> CliResult<SolveReport> {
    let problem = load_problem(&cfg.problem)?;
    let (x, trace) = run_solver(&problem, cfg)?;
    let residual = natural_residual(&x, problem.field.as_ref(), problem.set.as_ref(), RESIDUAL_PROJ_TOL)
        .map_err(CliError::usage)?;
    let csv = trace_csv(&trace);
    write_out(cfg.out.as_deref(), &csv)?;
    Ok(SolveReport { x, trace, residual, csv })
}

/// One cell of the step-size sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct Table1Row {
    pub alpha: f64,
    pub gamma_bar: f64,
    pub outer_steps: usize,
    pub fw_total: u64,
    pub status: SolveStatus,
}

pub fn table1_config(alpha: f64, gamma_bar: f64) -> EInexPmConfig {
    EInexPmConfig {
        alpha,
        gamma_bar,
        schedule: ASchedule::Harmonic { b_bar: 1.0 },
        stop: StopRule::Displacement { tol: TABLE1_TOL },
        max_outer: TABLE1_MAX_OUTER,
        ..EInexPmConfig::default()
    }
}

pub fn table1_rows() -> CliResult<Vec<Table1Row>> {
    let problem = linear_saddle_operator();
    let cells: Vec<(f64, f64)> =
        TABLE1_GRID.iter().flat_map(|(a, gs)| gs.iter().map(move |g| (*a, *g))).collect();
    let mut rows = cells
        .par_iter()
        .map(|&(alpha, gamma_bar)| {
            let (_, trace) = einexpm_solve(&problem, &table1_config(alpha, gamma_bar), &problem.x_start)
                .map_err(CliError::usage)?;
            Ok(Table1Row { alpha, gamma_bar, outer_steps: trace.outer_steps, fw_total: trace.fw_total(), status: trace.status })
        })
        .collect::<CliResult<Vec<_>>>()?;
    rows.sort_by(|a, b| a.alpha.total_cmp(&b.alpha).then(a.gamma_bar.total_cmp(&b.gamma_bar)));
    Ok(rows)
}

pub fn table1_csv(rows: &[Table1Row]) -> Csv {
    let mut csv = Csv::new(&TABLE1_HEADER);
    for r in rows {
        csv.push([fmt_g17(r.alpha), fmt_g17(r.gamma_bar), r.outer_steps.to_string(), r.fw_total.to_string()]);
    }
    csv
}

pub fn table1(out: Option<&Path>) -> CliResult<(Vec<Table1Row>, Csv)> {
    let rows = table1_rows()?;
    let csv = table1_csv(&rows);
    write_out(out, &csv)?;
    Ok((rows, csv))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table3Row {
    pub d: usize,
    pub p: f64,
    pub iterations: usize,
    pub status: SolveStatus,
}

pub fn table3_config() -> EInexPmConfig {
    EInexPmConfig {
        alpha: TABLE3_ALPHA,
        gamma_bar: TABLE3_GAMMA_BAR,
        stop: StopRule::NearReference { tol: TABLE3_TOL },
        max_outer: TABLE3_MAX_OUTER,
        ..EInexPmConfig::default()
    }
}

/// Iterations until `||x^k - x*|| <= 1e-2` on `T_h`, `h = 0.2`.
pub fn table3_cell(d: usize, p: f64) -> CliResult<Table3Row> {
    let problem = th_operator(d, p, TABLE3_H).map_err(|e| match e {
        VipError::Internal(_) => CliError::reference(e),
        other => CliError::usage(other),
    })?;
    let (_, trace) = einexpm_solve(&problem, &table3_config(), &problem.x_start).map_err(CliError::usage)?;
    Ok(Table3Row { d, p, iterations: trace.outer_steps, status: trace.status })
}

pub fn table3_rows(dims: &[usize], exponents: &[f64]) -> CliResult<Vec<Table3Row>> {
    let cells: Vec<(usize, f64)> = exponents.iter().flat_map(|&p| dims.iter().map(move |&d| (d, p))).collect();
    let mut rows = cells.par_iter().map(|&(d, p)| table3_cell(d, p)).collect::<CliResult<Vec<_>>>()?;
    rows.sort_by(|a, b| a.p.total_cmp(&b.p).then(a.d.cmp(&b.d)));
    Ok(rows)
}

pub fn table3_csv(rows: &[Table3Row]) -> Csv {
    let mut csv = Csv::new(&TABLE3_HEADER);
    for r in rows {
        csv.push([r.d.to_string(), fmt_g17(r.p), r.iterations.to_string()]);
    }
    csv
}

pub fn table3(dims: &[usize], exponents: &[f64], out: Option<&Path>) -> CliResult<(Vec<Table3Row>, Csv)> {
    let rows = table3_rows(dims, exponents)?;
    let csv = table3_csv(&rows);
    write_out(out, &csv)?;
    Ok((rows, csv))
}

/// Default pass thresholds of `verify`.
pub const VERIFY_VI_TOL: f64 = 1e-8;
pub const VERIFY_RESIDUAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub min_vi: f64,
    pub residual: f64,
    pub passed: bool,
}

impl VerifyReport {
    pub fn summary(&self) -> String {
        format!(
            "min_vi={} residual={} result={}",
            fmt_g17(self.min_vi),
            fmt_g17(self.residual),
            if self.passed { "pass" } else { "fail" }
        )
    }
}

/// Parses `a,b,c` (commas or whitespace), or reads the same from a file.
pub fn parse_point(spec: &str) -> CliResult<Point> {
    let text = if Path::new(spec).is_file() {
        std::fs::read_to_string(spec).map_err(CliError::usage)?
    } else {
        spec.to_string()
    };
    let text = text.trim().trim_start_matches('(').trim_end_matches(')');
    let coords = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|e| CliError::usage(anyhow::anyhow!("bad coordinate `{s}`: {e}"))))
        .collect::<CliResult<Vec<_>>>()?;
    if coords.is_empty() {
        return Err(CliError::usage(anyhow::anyhow!("empty point")));
    }
    Ok(Point::new(coords))
}

/// Samples `<F(x), y - x>` over feasible `y` and computes the natural residual.
pub fn verify(problem_name: &str, x: &Point, samples: usize, seed: u64, residual_tol: f64) -> CliResult<VerifyReport> {
    let problem = load_problem(problem_name)?;
    x.ensure_dim(problem.dim()).map_err(CliError::usage)?;
    if !problem.set.contains(x, vip_core::extragradient::ITERATE_FEASIBILITY_TOL) {
        return Err(CliError::usage(anyhow::anyhow!("point {x} is not feasible for {}", problem.name)));
    }
    let field = problem.field.as_ref();
    let set = problem.set.as_ref();
    let min_vi = brute_force_vi_check_seeded(x, field, set, samples, seed).map_err(CliError::usage)?;
    let residual = natural_residual(x, field, set, RESIDUAL_PROJ_TOL).map_err(CliError::usage)?;
    let scale = 1.0 + field.eval(x).map_err(CliError::usage)?.norm();
    let passed = min_vi >= -VERIFY_VI_TOL * scale && residual <= residual_tol;
    Ok(VerifyReport { min_vi, residual, passed })
}
