//! Frank-Wolfe computation of feasible inexact projections.
//!
//! Given a reference point `u` in the set `C`, a point `v` to project and a
//! forcing parameter `gamma >= 0`, [`fw_project`] returns `w` in `C` with
//!
//! ```text
//! <v - w, y - w> <= gamma * ||w - u||^2   for all y in C
//! ```
//!
//! by running conditional-gradient steps with exact line search on
//! `psi_v(y) = ||y - v||^2 / 2`. The left-hand side maximized over `C` is the
//! Frank-Wolfe gap, which the linear-minimization oracle yields for free, so
//! the stopping test certifies the output.
//!
//! With `gamma = 0` the relative test can only fire at the exact projection,
//! so an absolute floor on the gap provides a near-exact mode.

use crate::error::{Result, VipError};
use crate::point::{dist_sq, inner, Point};
use crate::problem::FeasibleSet;

/// Slack used when checking that the reference and start points are feasible.
const START_FEASIBILITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct FwConfig {
    /// Relative tolerance `gamma` of the inexact projection.
    pub gamma: f64,
    /// Absolute stop on the gap, needed when `gamma * ||w - u||^2` is zero.
    pub abs_gap_floor: f64,
    /// Cap on linear-minimization oracle calls.
    pub max_iter: u64,
    /// First iterate; defaults to the reference point `u`.
    pub start: Option<Point>,
}

impl Default for FwConfig {
    fn default() -> Self {
        FwConfig { gamma: 0.0, abs_gap_floor: 1e-12, max_iter: 10_000_000, start: None }
    }
}

impl FwConfig {
    pub fn with_gamma(gamma: f64) -> Self {
        FwConfig { gamma, ..Self::default() }
    }

    /// Near-exact projector: `gamma = 0` with the given absolute floor.
    pub fn exact(abs_gap_floor: f64) -> Self {
        FwConfig { gamma: 0.0, abs_gap_floor, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma >= 0.0) || !self.gamma.is_finite() {
            return Err(VipError::InvalidParameter(format!("FW gamma must be >= 0, got {}", self.gamma)));
        }
        if !(self.abs_gap_floor >= 0.0) || !self.abs_gap_floor.is_finite() {
            return Err(VipError::InvalidParameter(format!(
                "FW abs_gap_floor must be >= 0, got {}",
                self.abs_gap_floor
            )));
        }
        if self.max_iter == 0 {
            return Err(VipError::InvalidParameter("FW max_iter must be positive".into()));
        }
        Ok(())
    }
}

/// Which test ended the Frank-Wolfe loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FwStop {
    Relative,
    Absolute,
    MaxIter,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FwResult {
    pub w: Point,
    /// Number of oracle calls, which equals the number of line searches attempted.
    pub iterations: u64,
    /// `-s*` at exit, the Frank-Wolfe gap of the returned point.
    pub final_gap: f64,
    pub stopped_by: FwStop,
}

impl FwResult {
    pub fn converged(&self) -> bool {
        self.stopped_by != FwStop::MaxIter
    }
}

/// Oracle call at `w`: returns `z = argmin_C <w - v, y>` and `s* = <w - v, z - w>`.
pub fn lo_gap(w: &Point, v: &Point, set: &dyn FeasibleSet) -> (Point, f64) {
    let grad = w - v;
    let z = set.lo_oracle(&grad);
    let s_star = inner(grad.as_slice(), (&z - w).as_slice());
    (z, s_star)
}

/// Exact line-search step `w + a (z - w)` with `a = min(1, -s* / ||z - w||^2)`.
pub fn fw_step(w: &Point, z: &Point, s_star: f64) -> Result<Point> {
    let d2 = dist_sq(z.as_slice(), w.as_slice());
    if d2 == 0.0 {
        if s_star < 0.0 {
            return Err(VipError::FwInconsistent { gap: -s_star });
        }
        return Ok(w.clone());
    }
    let alpha = (-s_star / d2).clamp(0.0, 1.0);
    if alpha == 1.0 {
        return Ok(z.clone());
    }
    Ok(w.add_scaled(alpha, &(z - w)))
}

/// Runs Frank-Wolfe until `-s* <= max(gamma ||w - u||^2, abs_gap_floor)` or the cap.
///
/// Hitting the cap is reported through [`FwStop::MaxIter`], not as an error.
pub fn fw_project(u: &Point, v: &Point, set: &dyn FeasibleSet, cfg: &FwConfig) -> Result<FwResult> {
    cfg.validate()?;
    let d = set.dim();
    u.ensure_dim(d)?;
    v.ensure_dim(d)?;
    u.ensure_finite("FW reference point")?;
    v.ensure_finite("FW target point")?;
    if !set.contains(u, START_FEASIBILITY_TOL) {
        return Err(VipError::Infeasible("FW reference point u".into()));
    }
    let mut w = match &cfg.start {
        Some(s) => {
            s.ensure_dim(d)?;
            if !set.contains(s, START_FEASIBILITY_TOL) {
                return Err(VipError::Infeasible("FW start point".into()));
            }
            s.clone().into_vec()
        }
        None => u.as_slice().to_vec(),
    };

    let u = u.as_slice();
    let v = v.as_slice();
    let mut grad = vec![0.0; d];
    let mut z = vec![0.0; d];
    let mut iterations = 0u64;
    loop {
        for i in 0..d {
            grad[i] = w[i] - v[i];
        }
        set.lo_oracle_into(&grad, &mut z);
        iterations += 1;
        let mut s_star = 0.0;
        let mut zw2 = 0.0;
        for i in 0..d {
            let dz = z[i] - w[i];
            s_star += grad[i] * dz;
            zw2 += dz * dz;
        }
        let gap = -s_star;
        let stop = if gap <= cfg.gamma * dist_sq(&w, u) {
            Some(FwStop::Relative)
        } else if gap <= cfg.abs_gap_floor {
            Some(FwStop::Absolute)
        } else if iterations >= cfg.max_iter {
            Some(FwStop::MaxIter)
        } else {
            None
        };
        if let Some(stopped_by) = stop {
            return Ok(FwResult { w: Point::new(w), iterations, final_gap: gap, stopped_by });
        }
        if zw2 == 0.0 {
            return Err(VipError::FwInconsistent { gap });
        }
        let alpha = (gap / zw2).min(1.0);
        if alpha == 1.0 {
            w.copy_from_slice(&z);
        } else {
            for i in 0..d {
                w[i] += alpha * (z[i] - w[i]);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::PNormBall;
    use approx::assert_relative_eq;

    fn ball2() -> PNormBall {
        PNormBall::new(2, 2.0).unwrap()
    }

    #[test]
    fn lo_gap_zero_when_w_equals_v() {
        let w = Point::from([0.3, -0.2]);
        let (_, s) = lo_gap(&w, &w, &ball2());
        assert_eq!(s, 0.0);
    }

    #[test]
    fn lo_gap_on_euclidean_ball() {
        let (z, s) = lo_gap(&Point::zeros(2), &[2.0, 0.0].into(), &ball2());
        assert_relative_eq!(z[0], 1.0, epsilon = 1e-15);
        assert_relative_eq!(z[1], 0.0, epsilon = 1e-15);
        assert_relative_eq!(s, -2.0, epsilon = 1e-15);
    }

    #[test]
    fn lo_gap_on_ten_ball_uses_dual_norm_extreme_point() {
        let ball = PNormBall::new(2, 10.0).unwrap();
        let (z, s) = lo_gap(&Point::zeros(2), &[1.0, 1.0].into(), &ball);
        let q = 10.0 / 9.0;
        let dual = 2f64.powf(1.0 / q);
        let expected = 1.0 / dual.powf(q - 1.0);
        assert_relative_eq!(z[0], expected, epsilon = 1e-14);
        assert_relative_eq!(z[1], expected, epsilon = 1e-14);
        assert_relative_eq!(s, -dual, epsilon = 1e-14);
    }

    #[test]
    fn fw_step_examples() {
        let w = Point::zeros(2);
        let z = Point::from([1.0, 0.0]);
        assert_eq!(fw_step(&w, &z, -1.0).unwrap(), z);
        assert_eq!(fw_step(&w, &z, -5.0).unwrap(), z);
        assert_eq!(fw_step(&w, &z, -0.5).unwrap(), Point::from([0.5, 0.0]));
        assert!(matches!(fw_step(&w, &w, -0.5), Err(VipError::FwInconsistent { .. })));
    }

    #[test]
    fn feasible_point_projects_to_itself() {
        let v = Point::from([0.3, 0.4]);
        let cfg = FwConfig { start: Some(v.clone()), ..FwConfig::with_gamma(0.1) };
        let res = fw_project(&Point::zeros(2), &v, &ball2(), &cfg).unwrap();
        assert!(res.iterations <= 1);
        assert_eq!(res.w, v);
    }

    #[test]
    fn near_exact_mode_matches_radial_projection() {
        let res = fw_project(&[0.0, 1.0].into(), &[2.0, 0.0].into(), &ball2(), &FwConfig::exact(1e-12)).unwrap();
        assert!(res.converged());
        assert!(res.w.dist(&[1.0, 0.0].into()) < 1e-5, "{:?}", res.w);
    }

    #[test]
    fn inexact_mode_is_cheaper() {
        let u = Point::from([0.0, 1.0]);
        let v = Point::from([2.0, 0.0]);
        let exact = fw_project(&u, &v, &ball2(), &FwConfig::exact(1e-12)).unwrap();
        let loose = fw_project(&u, &v, &ball2(), &FwConfig::with_gamma(0.4)).unwrap();
        assert_eq!(loose.stopped_by, FwStop::Relative);
        assert!(loose.iterations < exact.iterations);
        let cert = crate::certificate::check_certificate(&loose.w, &u, &v, 0.4, &ball2()).unwrap();
        assert!(cert.is_valid(), "{cert:?}");
    }

    #[test]
    fn max_iter_is_reported() {
        let cfg = FwConfig { max_iter: 3, ..FwConfig::exact(0.0) };
        let res = fw_project(&[0.0, 1.0].into(), &[2.0, 0.0].into(), &ball2(), &cfg).unwrap();
        assert_eq!(res.stopped_by, FwStop::MaxIter);
        assert_eq!(res.iterations, 3);
    }

    #[test]
    fn rejects_bad_inputs() {
        let b = ball2();
        assert!(matches!(
            fw_project(&[2.0, 0.0].into(), &Point::zeros(2), &b, &FwConfig::default()),
            Err(VipError::Infeasible(_))
        ));
        assert!(matches!(
            fw_project(&Point::zeros(3), &Point::zeros(2), &b, &FwConfig::default()),
            Err(VipError::DimensionMismatch { .. })
        ));
        assert!(fw_project(&Point::zeros(2), &Point::zeros(2), &b, &FwConfig::with_gamma(-1.0)).is_err());
        assert!(fw_project(&Point::zeros(2), &[f64::NAN, 0.0].into(), &b, &FwConfig::default()).is_err());
    }
}
