//! Audits of a finished [`SolveTrace`] against the inequalities the
//! convergence theory predicts for every iteration.
//!
//! Each audit returns one [`InequalityCheck`] per applicable iteration, in the
//! normalized form `lhs <= rhs`.

use super::{ASchedule, EInexPmConfig, LsConfig, SolveTrace, ITERATE_FEASIBILITY_TOL};
use crate::point::{inner, Point};
use crate::problem::FeasibleSet;

/// Absolute slack used by the audits unless stated otherwise.
pub const DEFAULT_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct InequalityCheck {
    pub name: &'static str,
    pub k: usize,
    pub lhs: f64,
    pub rhs: f64,
}

impl InequalityCheck {
    pub fn holds(&self, slack: f64) -> bool {
        self.lhs <= self.rhs + slack
    }

    pub fn margin(&self) -> f64 {
        self.rhs - self.lhs
    }
}

/// The checks failing at the given slack.
pub fn violations(checks: &[InequalityCheck], slack: f64) -> Vec<&InequalityCheck> {
    checks.iter().filter(|c| !c.holds(slack)).collect()
}

/// `||y - x|| <= s ||F(x)|| / (1 - gamma_k)` for the first projection and the
/// analogous bound for `x^{k+1}` (`alpha F(y)` or `lambda F(z)`).
pub fn step_bounds(trace: &SolveTrace) -> Vec<InequalityCheck> {
    let mut out = Vec::new();
    for r in &trace.records {
        let shrink = 1.0 - r.gamma;
        out.push(InequalityCheck {
            name: "step bound (y)",
            k: r.k,
            lhs: r.displacement(),
            rhs: r.step * r.fx.norm() / shrink,
        });
        let Some(next) = &r.x_next else { continue };
        let scaled = match (&r.fy, &r.fz, r.lambda) {
            (Some(fy), _, None) => r.step * fy.norm(),
            (_, Some(fz), Some(lambda)) => lambda * fz.norm(),
            _ => continue,
        };
        out.push(InequalityCheck {
            name: "step bound (x_next)",
            k: r.k,
            lhs: next.dist(&r.x),
            rhs: scaled / shrink,
        });
    }
    out
}

/// Largest secant ratio `||F(x^k) - F(y^k)|| / ||x^k - y^k||` along the run.
///
/// This is the only Lipschitz bound the quasi-Fejér estimate actually uses.
pub fn trajectory_lipschitz(trace: &SolveTrace) -> f64 {
    trace
        .records
        .iter()
        .filter_map(|r| {
            let fy = r.fy.as_ref()?;
            let d = r.displacement();
            (d > 0.0).then(|| r.fx.dist(fy) / d)
        })
        .fold(0.0, f64::max)
}

/// `||x^{k+1} - x*||^2 <= ||x^k - x*||^2 - eta ||x^k - y^k||^2 + nu gamma_k ||F(x^k)||^2`.
pub fn quasi_fejer(trace: &SolveTrace, x_star: &Point, cfg: &EInexPmConfig, lipschitz: f64) -> Vec<InequalityCheck> {
    let eta = cfg.eta_bar(lipschitz);
    let nu = cfg.nu_bar(lipschitz);
    trace
        .records
        .iter()
        .filter_map(|r| {
            let next = r.x_next.as_ref()?;
            Some(InequalityCheck {
                name: "quasi-Fejer",
                k: r.k,
                lhs: next.dist(x_star).powi(2),
                rhs: r.x.dist(x_star).powi(2) - eta * r.displacement().powi(2) + nu * r.gamma * r.fx.norm_sq(),
            })
        })
        .collect()
}

/// `||x^{k+1} - x*|| <= ||x^k - x*||`.
pub fn fejer_monotone(trace: &SolveTrace, x_star: &Point) -> Vec<InequalityCheck> {
    trace
        .records
        .iter()
        .filter_map(|r| {
            let next = r.x_next.as_ref()?;
            Some(InequalityCheck { name: "Fejer", k: r.k, lhs: next.dist(x_star), rhs: r.x.dist(x_star) })
        })
        .collect()
}

/// `||x^{k+1} - x*||^2 <= ||x^k - x*||^2 - c lambda_k^2 ||F(z^k)||^2` with
/// `c = (gamma_bar^2 - 4 gamma_bar + 1) / (1 - gamma_bar)^2`.
pub fn halfspace_decrease(trace: &SolveTrace, x_star: &Point, cfg: &LsConfig) -> Vec<InequalityCheck> {
    let c = cfg.fejer_constant();
    trace
        .records
        .iter()
        .filter_map(|r| {
            let next = r.x_next.as_ref()?;
            let lambda = r.lambda?;
            let fz = r.fz.as_ref()?;
            Some(InequalityCheck {
                name: "halfspace decrease",
                k: r.k,
                lhs: next.dist(x_star).powi(2),
                rhs: r.x.dist(x_star).powi(2) - c * lambda * lambda * fz.norm_sq(),
            })
        })
        .collect()
}

/// `<F(x^k), x^k - y^k> >= max(rho, sqrt(3) - 1) / beta_hi * ||y^k - x^k||^2`.
pub fn descent_lower_bound(trace: &SolveTrace, cfg: &LsConfig) -> Vec<InequalityCheck> {
    let c = cfg.rho.max(3f64.sqrt() - 1.0) / cfg.beta_hi;
    trace
        .records
        .iter()
        .map(|r| InequalityCheck {
            name: "descent lower bound",
            k: r.k,
            lhs: c * r.displacement().powi(2),
            rhs: inner(r.fx.as_slice(), (&r.x - &r.y).as_slice()),
        })
        .collect()
}

/// Separation: whenever the line-search step proceeds, `<F(z^k), x^k - z^k> > 0`
/// (written as `-<F(z), x - z> <= 0`).
pub fn separation(trace: &SolveTrace) -> Vec<InequalityCheck> {
    trace
        .records
        .iter()
        .filter_map(|r| {
            r.x_next.as_ref()?;
            let z = r.z.as_ref()?;
            let fz = r.fz.as_ref()?;
            Some(InequalityCheck {
                name: "separation",
                k: r.k,
                lhs: -inner(fz.as_slice(), (&r.x - z).as_slice()),
                rhs: 0.0,
            })
        })
        .collect()
}

/// The accepted line-search point satisfies its own acceptance test.
pub fn armijo_acceptance(trace: &SolveTrace, cfg: &LsConfig) -> Vec<InequalityCheck> {
    trace
        .records
        .iter()
        .filter_map(|r| {
            let fz = r.fz.as_ref()?;
            let dir = &r.y - &r.x;
            Some(InequalityCheck {
                name: "Armijo acceptance",
                k: r.k,
                lhs: inner(fz.as_slice(), dir.as_slice()),
                rhs: cfg.rho * inner(r.fx.as_slice(), dir.as_slice()),
            })
        })
        .collect()
}

/// `sum_k gamma_k ||F(x^k)||^2 <= sum_k a_k`.
pub fn tolerance_budget(trace: &SolveTrace, schedule: &ASchedule) -> InequalityCheck {
    let spent: f64 = trace.records.iter().map(|r| r.gamma * r.fx.norm_sq()).sum();
    let budget: f64 = trace.records.iter().map(|r| schedule.a(r.k)).sum();
    InequalityCheck { name: "tolerance budget", k: trace.outer_steps, lhs: spent, rhs: budget.min(schedule.total()) }
}

/// Iterates `x^k`, `y^k`, `z^k`, `x^{k+1}` that fail the membership test.
pub fn infeasible_iterates(trace: &SolveTrace, set: &dyn FeasibleSet) -> Vec<(usize, &'static str)> {
    let mut out = Vec::new();
    for r in &trace.records {
        let named = [("x", Some(&r.x)), ("y", Some(&r.y)), ("z", r.z.as_ref()), ("x_next", r.x_next.as_ref())];
        for (name, p) in named {
            if let Some(p) = p {
                if !set.contains(p, ITERATE_FEASIBILITY_TOL) {
                    out.push((r.k, name));
                }
            }
        }
    }
    out
}
