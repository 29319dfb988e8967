//! Extragradient methods with feasible inexact projections.
//!
//! * [`einexpm_solve`]: constant step `alpha`, tolerances `gamma_k` driven by a
//!   summable schedule. Needs a Lipschitz operator for its guarantees.
//! * [`einexpmls_solve`]: Armijo search along `[x^k, y^k]` followed by a
//!   projection of `x^k` onto the separating halfspace. No Lipschitz assumption.
//!
//! Both compute every projection with [`fw_project`](crate::fw::fw_project)
//! and record the quantities needed to audit the convergence inequalities
//! afterwards (see [`diagnostics`]).

pub mod diagnostics;
mod einexpm;
mod einexpmls;
mod schedule;

use std::fmt;
use std::sync::Arc;

use crate::certificate::check_certificate;
use crate::error::{Result, VipError};
use crate::fw::{fw_project, FwConfig, FwResult};
use crate::point::Point;
use crate::problem::FeasibleSet;

pub use einexpm::{einexpm_solve, einexpm_step};
pub use einexpmls::{armijo_search, einexpmls_solve, einexpmls_step, halfspace_stepsize};
pub use schedule::{gamma_schedule, ASchedule, DIV_GUARD, GAMMA_CAP_FRACTION};


/// Slack for feasibility of produced iterates.
pub const ITERATE_FEASIBILITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    EInexPm,
    EInexPmLs,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::EInexPm => "einexpm",
            Method::EInexPmLs => "einexpmls",
        })
    }
}

/// When to declare convergence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StopRule {
    /// `||x^k - y^k|| <= tol` (and, for EInexPM, `||y^k - x^{k+1}|| <= tol`).
    Displacement { tol: f64 },
    /// `||x^k - x*|| <= tol` against the problem's reference solution.
    NearReference { tol: f64 },
}

impl StopRule {
    pub fn tol(&self) -> f64 {
        match *self {
            StopRule::Displacement { tol } | StopRule::NearReference { tol } => tol,
        }
    }

    fn validate(&self) -> Result<()> {
        let tol = self.tol();
        if tol > 0.0 && tol.is_finite() {
            Ok(())
        } else {
            Err(VipError::InvalidParameter(format!("outer tolerance must be positive, got {tol}")))
        }
    }
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule::Displacement { tol: 1e-6 }
    }
}

/// Parameters of the constant-step method.
#[derive(Debug, Clone, PartialEq)]
pub struct EInexPmConfig {
    pub alpha: f64,
    /// Upper bound on the tolerances, in `(0, 1/2)`.
    pub gamma_bar: f64,
    pub schedule: ASchedule,
    pub stop: StopRule,
    pub max_outer: usize,
    /// Template for the inner solver; its `gamma` and `start` are overwritten.
    pub fw: FwConfig,
    /// Re-check every projection with an independent oracle call.
    pub verify_certificates: bool,
}

impl Default for EInexPmConfig {
    fn default() -> Self {
        EInexPmConfig {
            alpha: 0.1,
            gamma_bar: 0.1,
            schedule: ASchedule::default(),
            stop: StopRule::default(),
            max_outer: 10_000,
            fw: FwConfig::default(),
            verify_certificates: true,
        }
    }
}

impl EInexPmConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(VipError::InvalidParameter(format!("alpha must be positive, got {}", self.alpha)));
        }
        if !(self.gamma_bar > 0.0 && self.gamma_bar < 0.5) {
            return Err(VipError::InvalidParameter(format!("gamma_bar must lie in (0, 1/2), got {}", self.gamma_bar)));
        }
        if self.max_outer == 0 {
            return Err(VipError::InvalidParameter("max_outer must be positive".into()));
        }
        self.schedule.validate().map_err(VipError::InvalidParameter)?;
        self.stop.validate()?;
        self.fw.validate()
    }

    /// `eta = 1 - alpha^2 L^2 - 2 gamma_bar`.
    pub fn eta_bar(&self, lipschitz: f64) -> f64 {
        1.0 - (self.alpha * lipschitz).powi(2) - 2.0 * self.gamma_bar
    }

    /// `nu = alpha^2 (1 - gamma_bar + alpha L)^2 / (1 - gamma_bar)^4`.
    pub fn nu_bar(&self, lipschitz: f64) -> f64 {
        let g = self.gamma_bar;
        self.alpha.powi(2) * (1.0 - g + self.alpha * lipschitz).powi(2) / (1.0 - g).powi(4)
    }

    /// Whether `alpha < sqrt(1 - 2 gamma_bar) / L`, the regime with a convergence guarantee.
    pub fn step_within_guarantee(&self, lipschitz: f64) -> bool {
        self.alpha * lipschitz < (1.0 - 2.0 * self.gamma_bar).sqrt()
    }
}

/// Rule producing `beta_k`, clamped into `[beta_lo, beta_hi]`.
#[derive(Clone, Default)]
pub enum BetaRule {
    /// `beta_k = beta_hi`.
    #[default]
    Constant,
    Custom(Arc<dyn Fn(usize) -> f64 + Send + Sync>),
}

impl fmt::Debug for BetaRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BetaRule::Constant => f.write_str("Constant"),
            BetaRule::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// Parameters of the line-search method.
#[derive(Debug, Clone)]
pub struct LsConfig {
    pub beta_lo: f64,
    pub beta_hi: f64,
    pub beta_rule: BetaRule,
    /// Initial fraction of the segment tried by the line search.
    pub sigma: f64,
    /// Sufficient-decrease factor of the Armijo test.
    pub rho: f64,
    /// Backtracking factor.
    pub backtrack: f64,
    /// Must satisfy `0 < gamma_bar < min(1 - rho, 2 - sqrt(3))`.
    pub gamma_bar: f64,
    pub stop: StopRule,
    pub max_outer: usize,
    pub max_backtracks: u32,
    pub fw: FwConfig,
    pub verify_certificates: bool,
}

impl Default for LsConfig {
    fn default() -> Self {
        LsConfig {
            beta_lo: 1.0,
            beta_hi: 1.0,
            beta_rule: BetaRule::Constant,
            sigma: 0.9,
            rho: 0.5,
            backtrack: 0.5,
            gamma_bar: 0.2,
            stop: StopRule::default(),
            max_outer: 10_000,
            max_backtracks: 200,
            fw: FwConfig::default(),
            verify_certificates: true,
        }
    }
}

impl LsConfig {
    pub fn gamma_bar_limit(&self) -> f64 {
        (1.0 - self.rho).min(2.0 - 3f64.sqrt())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(VipError::InvalidParameter(msg));
        if !(self.beta_lo > 0.0 && self.beta_lo <= self.beta_hi && self.beta_hi.is_finite()) {
            return bad(format!("need 0 < beta_lo <= beta_hi, got {} and {}", self.beta_lo, self.beta_hi));
        }
        for (name, v) in [("sigma", self.sigma), ("rho", self.rho), ("backtrack", self.backtrack)] {
            if !(v > 0.0 && v < 1.0) {
                return bad(format!("{name} must lie in (0, 1), got {v}"));
            }
        }
        if !(self.gamma_bar > 0.0 && self.gamma_bar < self.gamma_bar_limit()) {
            return bad(format!(
                "gamma_bar must lie in (0, {:.6}), got {}",
                self.gamma_bar_limit(),
                self.gamma_bar
            ));
        }
        if self.max_outer == 0 || self.max_backtracks == 0 {
            return bad("max_outer and max_backtracks must be positive".into());
        }
        self.stop.validate()?;
        self.fw.validate()
    }

    pub fn beta(&self, k: usize) -> f64 {
        match &self.beta_rule {
            BetaRule::Constant => self.beta_hi,
            BetaRule::Custom(f) => f(k).clamp(self.beta_lo, self.beta_hi),
        }
    }

    /// Constant `gamma_k` used by the line-search method.
    pub fn gamma_k(&self) -> f64 {
        GAMMA_CAP_FRACTION * self.gamma_bar
    }

    /// `(gamma_bar^2 - 4 gamma_bar + 1) / (1 - gamma_bar)^2`, the decrease constant.
    pub fn fejer_constant(&self) -> f64 {
        let g = self.gamma_bar;
        (g * g - 4.0 * g + 1.0) / (1.0 - g).powi(2)
    }
}

/// Everything observed during one outer iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub k: usize,
    pub x: Point,
    pub y: Point,
    /// Line-search point (EInexPMLS only).
    pub z: Option<Point>,
    /// `x^{k+1}`; absent when the iteration stopped before computing it.
    pub x_next: Option<Point>,
    pub gamma: f64,
    /// `alpha` for EInexPM, `beta_k` for EInexPMLS.
    pub step: f64,
    pub lambda: Option<f64>,
    pub i_k: Option<u32>,
    pub fw_iters_y: u64,
    pub fw_iters_x: u64,
    pub fx: Point,
    /// `F(y^k)` (EInexPM only).
    pub fy: Option<Point>,
    /// `F(z^k)` (EInexPMLS only).
    pub fz: Option<Point>,
    pub dist_to_ref: Option<f64>,
    pub residual: Option<f64>,
}

impl IterationRecord {
    pub fn fw_iters(&self) -> u64 {
        self.fw_iters_y + self.fw_iters_x
    }

    /// `||x^k - y^k||`.
    pub fn displacement(&self) -> f64 {
        self.x.dist(&self.y)
    }

    /// `||x^{k+1} - x^k||`, when `x^{k+1}` was computed.
    pub fn step_norm(&self) -> Option<f64> {
        self.x_next.as_ref().map(|n| n.dist(&self.x))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxOuter,
    /// An inner computation failed; see [`SolveTrace::failure`].
    Stalled,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveStatus::Converged => "converged",
            SolveStatus::MaxOuter => "max_outer",
            SolveStatus::Stalled => "stalled",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveTrace {
    pub method: Method,
    pub records: Vec<IterationRecord>,
    pub status: SolveStatus,
    /// Index `k` of the iterate at which the run stopped.
    pub outer_steps: usize,
    pub failure: Option<VipError>,
}

impl SolveTrace {
    fn new(method: Method) -> Self {
        SolveTrace { method, records: Vec::new(), status: SolveStatus::MaxOuter, outer_steps: 0, failure: None }
    }

    /// Total Frank-Wolfe iterations (oracle calls) over all projections.
    pub fn fw_total(&self) -> u64 {
        self.records.iter().map(IterationRecord::fw_iters).sum()
    }
}

/// Result of one outer iteration.
#[derive(Debug, Clone)]
pub enum StepOutcome {
    /// The stopping test fired; carries the solution estimate.
    Converged(Point),
    Continue(Point),
}

/// Failure inside an iteration, with whatever was computed before it.
#[derive(Debug, Clone)]
pub struct StepError {
    pub error: VipError,
    pub partial: Option<IterationRecord>,
}

impl From<VipError> for StepError {
    fn from(error: VipError) -> Self {
        StepError { error, partial: None }
    }
}

/// One inexact projection as used by both methods.
fn project(
    u: &Point,
    v: &Point,
    set: &dyn FeasibleSet,
    gamma: f64,
    template: &FwConfig,
    verify: bool,
) -> Result<FwResult> {
    let cfg = FwConfig { gamma, start: None, ..template.clone() };
    let res = fw_project(u, v, set, &cfg)?;
    if !res.converged() {
        return Err(VipError::FwMaxIter { iterations: res.iterations, gap: res.final_gap });
    }
    if verify {
        let tol = crate::certificate::CERTIFICATE_TOL.max(template.abs_gap_floor * 2.0);
        let cert = check_certificate(&res.w, u, v, gamma, set)?;
        if !(cert.feasible && cert.worst_violation <= tol) {
            return Err(VipError::Internal(format!(
                "projection certificate failed ({}; violation {:e})",
                cert.reason().unwrap_or("?"),
                cert.worst_violation
            )));
        }
    }
    Ok(res)
}

fn ensure_start(x1: &Point, set: &dyn FeasibleSet) -> Result<()> {
    x1.ensure_dim(set.dim())?;
    x1.ensure_finite("start point")?;
    if set.contains(x1, ITERATE_FEASIBILITY_TOL) {
        Ok(())
    } else {
        Err(VipError::Infeasible(format!("start point {x1}")))
    }
}
