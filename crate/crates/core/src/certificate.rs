//! Exact verification of feasible inexact projections, and the natural residual.

use crate::error::{Result, VipError};
use crate::fw::{fw_project, FwConfig};
use crate::point::{dist_sq, inner, Point};
use crate::problem::{FeasibleSet, VectorField};

/// Default absolute tolerance on `worst_violation`.
pub const CERTIFICATE_TOL: f64 = 1e-9;

/// Slack for the membership part of a certificate.
pub const CERTIFICATE_FEASIBILITY_TOL: f64 = 1e-12;

/// Evidence that `w` is (or is not) a `gamma`-inexact projection of `v` relative to `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionCertificate {
    pub w: Point,
    pub u: Point,
    pub v: Point,
    pub gamma: f64,
    /// `max_{y in C} <v - w, y - w> - gamma ||w - u||^2`.
    pub worst_violation: f64,
    pub feasible: bool,
    pub tolerance: f64,
}

impl ProjectionCertificate {
    pub fn is_valid(&self) -> bool {
        self.feasible && self.worst_violation <= self.tolerance
    }

    /// Why the certificate is invalid, if it is.
    pub fn reason(&self) -> Option<&'static str> {
        if !self.feasible {
            Some("infeasible")
        } else if self.worst_violation > self.tolerance {
            Some("variational inequality violated")
        } else {
            None
        }
    }

    /// Re-evaluates the same triple at another `gamma` without another oracle call.
    pub fn at_gamma(&self, gamma: f64) -> ProjectionCertificate {
        let shift = (self.gamma - gamma) * dist_sq(self.w.as_slice(), self.u.as_slice());
        ProjectionCertificate { gamma, worst_violation: self.worst_violation + shift, ..self.clone() }
    }
}

/// Checks `w` against the defining inequality with the default tolerance.
pub fn check_certificate(
    w: &Point,
    u: &Point,
    v: &Point,
    gamma: f64,
    set: &dyn FeasibleSet,
) -> Result<ProjectionCertificate> {
    check_certificate_with_tol(w, u, v, gamma, set, CERTIFICATE_TOL)
}

/// The supremum of the linear functional `y -> <v - w, y - w>` over `C` is
/// attained at `lo_oracle(w - v)`, so a single oracle call makes the check exact.
pub fn check_certificate_with_tol(
    w: &Point,
    u: &Point,
    v: &Point,
    gamma: f64,
    set: &dyn FeasibleSet,
    tolerance: f64,
) -> Result<ProjectionCertificate> {
    let d = set.dim();
    w.ensure_dim(d)?;
    u.ensure_dim(d)?;
    v.ensure_dim(d)?;
    if !(gamma >= 0.0) {
        return Err(VipError::InvalidParameter(format!("certificate gamma must be >= 0, got {gamma}")));
    }
    let residual = v - w;
    let z = set.lo_oracle(&(w - v));
    let worst = inner(residual.as_slice(), (&z - w).as_slice()) - gamma * dist_sq(w.as_slice(), u.as_slice());
    Ok(ProjectionCertificate {
        w: w.clone(),
        u: u.clone(),
        v: v.clone(),
        gamma,
        worst_violation: worst,
        feasible: set.contains(w, CERTIFICATE_FEASIBILITY_TOL),
        tolerance,
    })
}

/// `||x - P_C(x - F(x))||`, with the projection computed by near-exact Frank-Wolfe
/// (gamma = 0, absolute gap floor `proj_tol`). Vanishes exactly at solutions.
pub fn natural_residual(x: &Point, field: &dyn VectorField, set: &dyn FeasibleSet, proj_tol: f64) -> Result<f64> {
    let fx = field.eval(x)?;
    let target = x - &fx;
    let res = fw_project(x, &target, set, &FwConfig::exact(proj_tol))?;
    if !res.converged() {
        log::warn!("natural residual projection hit the FW cap (gap {:e})", res.final_gap);
    }
    Ok(x.dist(&res.w))
}
