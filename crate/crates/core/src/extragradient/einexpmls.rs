use super::{
    ensure_start, project, IterationRecord, LsConfig, Method, SolveStatus, SolveTrace, StepError, StepOutcome,
    StopRule,
};
use crate::error::{Result, VipError};
use crate::point::{inner, Point};
use crate::problem::VectorField;
use crate::problems::BenchmarkProblem;

/// `||F(z)||` at or below this is treated as an exact zero of the operator.
pub const VANISHING_OPERATOR: f64 = 1e-300;

/// Smallest `i >= 0` with `<F(x + sigma theta^i (y - x)), y - x> <= rho <F(x), y - x>`,
/// returned with the accepted point `z`.
pub fn armijo_search(x: &Point, y: &Point, field: &dyn VectorField, cfg: &LsConfig) -> Result<(u32, Point)> {
    let fx = field.eval(x)?;
    armijo_with(x, y, &fx, field, cfg)
}

fn armijo_with(x: &Point, y: &Point, fx: &Point, field: &dyn VectorField, cfg: &LsConfig) -> Result<(u32, Point)> {
    let dir = y - x;
    if dir.norm() == 0.0 {
        return Err(VipError::InvalidParameter("line search needs y != x".into()));
    }
    let threshold = cfg.rho * inner(fx.as_slice(), dir.as_slice());
    let mut t = cfg.sigma;
    for i in 0..=cfg.max_backtracks {
        let z = x.add_scaled(t, &dir);
        let fz = field.eval(&z)?;
        if inner(fz.as_slice(), dir.as_slice()) <= threshold {
            return Ok((i, z));
        }
        t *= cfg.backtrack;
    }
    Err(VipError::LineSearchFailed { max_backtracks: cfg.max_backtracks })
}

/// `lambda = -<F(z), z - x> / ||F(z)||^2`, so that `x - lambda F(z)` is the
/// projection of `x` onto `{w : <F(z), w - z> <= 0}` when `x` lies outside it.
pub fn halfspace_stepsize(x: &Point, z: &Point, fz: &Point) -> Result<f64> {
    let n2 = fz.norm_sq();
    if n2.sqrt() <= VANISHING_OPERATOR {
        return Err(VipError::VanishingOperator);
    }
    Ok(-inner(fz.as_slice(), (z - x).as_slice()) / n2)
}

/// One EInexPMLS iteration from `x = x^k`:
///
/// ```text
/// y       in P^{gamma_k}(x, x - beta_k F(x))
/// z        = x + sigma theta^{i_k} (y - x)            (Armijo)
/// x^{k+1} in P^{gamma_k}(x, x - lambda_k F(z))
/// ```
pub fn einexpmls_step(
    problem: &BenchmarkProblem,
    cfg: &LsConfig,
    x: &Point,
    k: usize,
) -> std::result::Result<(StepOutcome, IterationRecord), StepError> {
    let field = problem.field.as_ref();
    let set = problem.set.as_ref();
    let fx = field.eval(x)?;
    fx.ensure_finite("F(x)")?;
    let beta = cfg.beta(k);
    let gamma = cfg.gamma_k();

    let y_proj = project(x, &x.add_scaled(-beta, &fx), set, gamma, &cfg.fw, cfg.verify_certificates)?;
    let mut record = IterationRecord {
        k,
        x: x.clone(),
        y: y_proj.w,
        z: None,
        x_next: None,
        gamma,
        step: beta,
        lambda: None,
        i_k: None,
        fw_iters_y: y_proj.iterations,
        fw_iters_x: 0,
        fx,
        fy: None,
        fz: None,
        dist_to_ref: None,
        residual: None,
    };
    if let StopRule::Displacement { tol } = cfg.stop {
        if record.displacement() <= tol {
            return Ok((StepOutcome::Converged(x.clone()), record));
        }
    }
    if record.displacement() == 0.0 {
        return Ok((StepOutcome::Converged(x.clone()), record));
    }
    let partial = |record: &IterationRecord, error: VipError| StepError { error, partial: Some(record.clone()) };

    let (i_k, z) = match armijo_with(x, &record.y, &record.fx, field, cfg) {
        Ok(r) => r,
        Err(e) => return Err(partial(&record, e)),
    };
    record.i_k = Some(i_k);
    let fz = match field.eval(&z) {
        Ok(f) => f,
        Err(e) => return Err(partial(&record, e)),
    };
    record.z = Some(z.clone());
    record.fz = Some(fz.clone());
    let lambda = match halfspace_stepsize(x, &z, &fz) {
        Ok(l) => l,
        // F(z) = 0 with z feasible: z solves the problem.
        Err(VipError::VanishingOperator) => return Ok((StepOutcome::Converged(z), record)),
        Err(e) => return Err(partial(&record, e)),
    };
    record.lambda = Some(lambda);
    if lambda <= 0.0 {
        // x already lies in the halfspace, which only happens at solutions.
        return Ok((StepOutcome::Converged(x.clone()), record));
    }
    let next = match project(x, &x.add_scaled(-lambda, &fz), set, gamma, &cfg.fw, cfg.verify_certificates) {
        Ok(r) => r,
        Err(e) => return Err(partial(&record, e)),
    };
    record.fw_iters_x = next.iterations;
    record.x_next = Some(next.w.clone());
    Ok((StepOutcome::Continue(next.w), record))
}

/// Runs EInexPMLS from `x1`. Failures inside an iteration end the run with
/// [`SolveStatus::Stalled`].
pub fn einexpmls_solve(problem: &BenchmarkProblem, cfg: &LsConfig, x1: &Point) -> Result<(Point, SolveTrace)> {
    cfg.validate()?;
    ensure_start(x1, problem.set.as_ref())?;
    if problem.field.dim() != problem.dim() {
        return Err(VipError::DimensionMismatch { expected: problem.dim(), found: problem.field.dim() });
    }
    let reference = problem.x_ref.as_ref();
    if matches!(cfg.stop, StopRule::NearReference { .. }) && reference.is_none() {
        return Err(VipError::InvalidParameter(format!("{} has no reference solution to stop on", problem.name)));
    }

    let mut trace = SolveTrace::new(Method::EInexPmLs);
    let mut x = x1.clone();
    for k in 1..=cfg.max_outer {
        if let (StopRule::NearReference { tol }, Some(r)) = (cfg.stop, reference) {
            if x.dist(r) <= tol {
                trace.status = SolveStatus::Converged;
                trace.outer_steps = k;
                return Ok((x, trace));
            }
        }
        match einexpmls_step(problem, cfg, &x, k) {
            Ok((outcome, mut record)) => {
                record.dist_to_ref = reference.map(|r| x.dist(r));
                trace.records.push(record);
                match outcome {
                    StepOutcome::Converged(sol) => {
                        trace.status = SolveStatus::Converged;
                        trace.outer_steps = k;
                        return Ok((sol, trace));
                    }
                    StepOutcome::Continue(next) => x = next,
                }
            }
            Err(StepError { error, partial }) => {
                if let Some(mut record) = partial {
                    record.dist_to_ref = reference.map(|r| x.dist(r));
                    trace.records.push(record);
                }
                log::warn!("EInexPMLS stalled at k = {k}: {error}");
                trace.status = SolveStatus::Stalled;
                trace.outer_steps = k;
                trace.failure = Some(error);
                return Ok((x, trace));
            }
        }
    }
    trace.status = SolveStatus::MaxOuter;
    trace.outer_steps = cfg.max_outer;
    Ok((x, trace))
}
