use super::{
    ensure_start, gamma_schedule, project, EInexPmConfig, IterationRecord, Method, SolveStatus, SolveTrace,
    StepError, StepOutcome, StopRule,
};
use crate::error::{Result, VipError};
use crate::point::Point;
use crate::problems::BenchmarkProblem;

/// One EInexPM iteration from `x = x^k`:
///
/// ```text
/// y      in P^{gamma_k}(x, x - alpha F(x))
/// x^{k+1} in P^{gamma_k}(x, x - alpha F(y))
/// ```
pub fn einexpm_step(
    problem: &BenchmarkProblem,
    cfg: &EInexPmConfig,
    x: &Point,
    k: usize,
) -> std::result::Result<(StepOutcome, IterationRecord), StepError> {
    let field = problem.field.as_ref();
    let set = problem.set.as_ref();
    let fx = field.eval(x)?;
    fx.ensure_finite("F(x)")?;
    let gamma = gamma_schedule(k, fx.norm_sq(), cfg.gamma_bar, &cfg.schedule);

    let y_proj = project(x, &x.add_scaled(-cfg.alpha, &fx), set, gamma, &cfg.fw, cfg.verify_certificates)?;
    let mut record = IterationRecord {
        k,
        x: x.clone(),
        y: y_proj.w,
        z: None,
        x_next: None,
        gamma,
        step: cfg.alpha,
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
    let partial = |record: &IterationRecord, error: VipError| StepError { error, partial: Some(record.clone()) };

    let fy = match field.eval(&record.y).and_then(|fy| fy.ensure_finite("F(y)").map(|_| fy)) {
        Ok(fy) => fy,
        Err(e) => return Err(partial(&record, e)),
    };
    let target = x.add_scaled(-cfg.alpha, &fy);
    record.fy = Some(fy);
    let next = match project(x, &target, set, gamma, &cfg.fw, cfg.verify_certificates) {
        Ok(r) => r,
        Err(e) => return Err(partial(&record, e)),
    };
    record.fw_iters_x = next.iterations;
    record.x_next = Some(next.w.clone());

    let outcome = match cfg.stop {
        StopRule::Displacement { tol } if record.displacement() <= tol => StepOutcome::Converged(x.clone()),
        StopRule::Displacement { tol } if record.y.dist(&next.w) <= tol => StepOutcome::Converged(next.w),
        _ => StepOutcome::Continue(next.w),
    };
    Ok((outcome, record))
}

/// Runs EInexPM from `x1` until the stop rule fires or `max_outer` iterations pass.
///
/// Inner failures end the run with [`SolveStatus::Stalled`] and the partial
/// trace; only invalid configurations and start points are returned as errors.
pub fn einexpm_solve(problem: &BenchmarkProblem, cfg: &EInexPmConfig, x1: &Point) -> Result<(Point, SolveTrace)> {
    cfg.validate()?;
    ensure_start(x1, problem.set.as_ref())?;
    if problem.field.dim() != problem.dim() {
        return Err(VipError::DimensionMismatch { expected: problem.dim(), found: problem.field.dim() });
    }
    if let Some(l) = problem.lipschitz {
        if l > 0.0 && !cfg.step_within_guarantee(l) {
            log::warn!(
                "alpha = {} exceeds sqrt(1 - 2 gamma_bar)/L = {:.6} for {}; convergence is not guaranteed",
                cfg.alpha,
                (1.0 - 2.0 * cfg.gamma_bar).sqrt() / l,
                problem.name
            );
        }
    }
    let reference = problem.x_ref.as_ref();
    if matches!(cfg.stop, StopRule::NearReference { .. }) && reference.is_none() {
        return Err(VipError::InvalidParameter(format!("{} has no reference solution to stop on", problem.name)));
    }

    let mut trace = SolveTrace::new(Method::EInexPm);
    let mut x = x1.clone();
    for k in 1..=cfg.max_outer {
        if let (StopRule::NearReference { tol }, Some(r)) = (cfg.stop, reference) {
            if x.dist(r) <= tol {
                trace.status = SolveStatus::Converged;
                trace.outer_steps = k;
                return Ok((x, trace));
            }
        }
        match einexpm_step(problem, cfg, &x, k) {
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
                log::warn!("EInexPM stalled at k = {k}: {error}");
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
