//! The two abstractions a variational inequality `VIP(F, C)` is built from:
//! an operator `F` and a compact convex feasible set `C` reachable only
//! through a linear-minimization oracle.

use crate::error::Result;
use crate::point::Point;

/// Feasibility slack applied on top of any caller tolerance, scaled by `1 + ||x||`.
pub const FEASIBILITY_SLACK: f64 = 1e-12;

/// An operator `F: R^d -> R^d`.
///
/// Implementations must be deterministic. Evaluation may fail when the point
/// leaves the operator's domain.
pub trait VectorField: Send + Sync {
    fn dim(&self) -> usize;

    fn eval(&self, x: &Point) -> Result<Point>;
}

/// A nonempty compact convex set exposed through a linear-minimization oracle.
pub trait FeasibleSet: Send + Sync {
    fn dim(&self) -> usize;

    /// Writes a minimizer of `<cost, y>` over the set into `out`.
    ///
    /// When the minimizer is not unique because `cost` vanishes, the
    /// designated [`interior_point`](Self::interior_point) is returned.
    fn lo_oracle_into(&self, cost: &[f64], out: &mut [f64]);

    /// Membership test with absolute slack `tol` (plus [`FEASIBILITY_SLACK`]).
    fn contains(&self, x: &Point, tol: f64) -> bool;

    fn interior_point(&self) -> Point;

    fn lo_oracle(&self, cost: &Point) -> Point {
        let mut out = Point::zeros(self.dim());
        self.lo_oracle_into(cost.as_slice(), out.as_mut_slice());
        out
    }

    /// Axis-aligned bounding box `(lo, hi)`, read off the oracle answers for `±e_i`.
    fn bounding_box(&self) -> (Point, Point) {
        let d = self.dim();
        let mut lo = Point::zeros(d);
        let mut hi = Point::zeros(d);
        for i in 0..d {
            lo.as_mut_slice()[i] = self.lo_oracle(&Point::basis(d, i, 1.0))[i];
            hi.as_mut_slice()[i] = self.lo_oracle(&Point::basis(d, i, -1.0))[i];
        }
        (lo, hi)
    }
}

/// Zero operator `F ≡ 0`; every feasible point solves the VIP.
#[derive(Debug, Clone, Copy)]
pub struct ZeroField {
    pub dim: usize,
}

impl VectorField for ZeroField {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &Point) -> Result<Point> {
        x.ensure_dim(self.dim)?;
        Ok(Point::zeros(self.dim))
    }
}

/// A closure-backed operator, handy for ad-hoc problems and tests.
pub struct FnField<F> {
    dim: usize,
    f: F,
}

impl<F> FnField<F>
where
    F: Fn(&Point) -> Point + Send + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        FnField { dim, f }
    }
}

impl<F> VectorField for FnField<F>
where
    F: Fn(&Point) -> Point + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &Point) -> Result<Point> {
        x.ensure_dim(self.dim)?;
        Ok((self.f)(x))
    }
}
