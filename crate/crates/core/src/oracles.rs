//! Independent reference computations used to validate the solvers: closed-form
//! projections, a bisection projector onto p-balls, and a sampling check of
//! the variational inequality itself. They favour simplicity over speed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, VipError};
use crate::point::{inner, pnorm_slice, Point};
use crate::problem::{FeasibleSet, VectorField};

/// Seed of the sampling stream used by [`brute_force_vi_check`].
pub const DEFAULT_SAMPLING_SEED: u64 = 0x5eed_0f71;

/// Projection onto the Euclidean unit ball.
pub fn euclidean_ball_project(v: &Point) -> Point {
    let n = v.norm();
    if n <= 1.0 {
        v.clone()
    } else {
        v.scale(1.0 / n)
    }
}

/// Projection onto `{w : <normal, w - anchor> <= 0}`.
pub fn halfspace_project(x: &Point, normal: &Point, anchor: &Point) -> Result<Point> {
    x.ensure_dim(normal.dim())?;
    anchor.ensure_dim(normal.dim())?;
    let n2 = normal.norm_sq();
    if n2 == 0.0 {
        return Err(VipError::InvalidParameter("halfspace normal must be nonzero".into()));
    }
    let excess = inner(normal.as_slice(), (x - anchor).as_slice());
    if excess <= 0.0 {
        Ok(x.clone())
    } else {
        Ok(x.add_scaled(-excess / n2, normal))
    }
}

/// Minimum of `<F(x), y - x>` over sampled feasible `y` with the default seed.
pub fn brute_force_vi_check(x: &Point, field: &dyn VectorField, set: &dyn FeasibleSet, samples: usize) -> Result<f64> {
    brute_force_vi_check_seeded(x, field, set, samples, DEFAULT_SAMPLING_SEED)
}

/// Samples are drawn uniformly from the set's bounding box and kept when
/// feasible; the oracle answers for the costs `±e_i` are always included.
/// A nonnegative result is consistent with `x` solving the problem, a negative
/// one certifies that it does not.
pub fn brute_force_vi_check_seeded(
    x: &Point,
    field: &dyn VectorField,
    set: &dyn FeasibleSet,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let d = set.dim();
    x.ensure_dim(d)?;
    let fx = field.eval(x)?;
    let value = |y: &Point| inner(fx.as_slice(), (y - x).as_slice());

    let mut best = f64::INFINITY;
    for i in 0..d {
        for s in [1.0, -1.0] {
            best = best.min(value(&set.lo_oracle(&Point::basis(d, i, s))));
        }
    }
    let (lo, hi) = set.bounding_box();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut accepted = 0;
    let max_attempts = samples.saturating_mul(1000).max(1000);
    let mut y = Point::zeros(d);
    for _ in 0..max_attempts {
        if accepted == samples {
            break;
        }
        for (i, c) in y.as_mut_slice().iter_mut().enumerate() {
            *c = lo[i] + (hi[i] - lo[i]) * rng.random::<f64>();
        }
        if set.contains(&y, 0.0) {
            accepted += 1;
            best = best.min(value(&y));
        }
    }
    if accepted < samples {
        log::debug!("brute-force check accepted only {accepted} of {samples} samples");
    }
    Ok(best)
}

const BISECTION_STEPS: usize = 200;
const NORM_TOL: f64 = 1e-10;

/// Euclidean projection onto the unit `p`-ball by bisection on the multiplier `mu`
/// of `||y||_p <= 1`, each coordinate solving `y + mu p y^(p-1) = |v_i|`.
pub fn reference_pnorm_project(v: &Point, p: f64) -> Result<Point> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(VipError::InvalidParameter(format!("reference projector needs finite p > 1, got {p}")));
    }
    v.ensure_finite("point to project")?;
    if pnorm_slice(v.as_slice(), p) <= 1.0 {
        return Ok(v.clone());
    }
    let mags: Vec<f64> = v.iter().map(|c| c.abs()).collect();
    let solve = |mu: f64| -> Vec<f64> { mags.iter().map(|&a| coordinate_root(a, mu, p)).collect() };
    let norm_at = |mu: f64| pnorm_slice(&solve(mu), p);

    let mut mu_lo = 0.0;
    let mut mu_hi = 1.0;
    let mut doublings = 0;
    while norm_at(mu_hi) > 1.0 {
        mu_lo = mu_hi;
        mu_hi *= 2.0;
        doublings += 1;
        if doublings > 2000 {
            return Err(VipError::Internal("multiplier bisection failed to bracket".into()));
        }
    }
    let mut mu = mu_hi;
    for _ in 0..BISECTION_STEPS {
        mu = 0.5 * (mu_lo + mu_hi);
        let n = norm_at(mu);
        if (n - 1.0).abs() <= NORM_TOL {
            break;
        }
        if n > 1.0 {
            mu_lo = mu;
        } else {
            mu_hi = mu;
        }
    }
    let y = solve(mu);
    Ok(Point::new(v.iter().zip(y).map(|(c, yi)| c.signum() * yi).collect()))
}

/// Root in `[0, a]` of the increasing map `y -> y + mu p y^(p-1) - a`.
fn coordinate_root(a: f64, mu: f64, p: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, a);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid + mu * p * mid.powf(p - 1.0) > a {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= f64::EPSILON * a {
            break;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::ZeroField;
    use crate::problems::{linear_saddle_operator, nonlipschitz_operator};

    #[test]
    fn euclidean_ball_examples() {
        let inside = Point::from([0.3, 0.4]);
        assert_eq!(euclidean_ball_project(&inside), inside);
        assert_eq!(euclidean_ball_project(&[2.0, 0.0].into()), Point::from([1.0, 0.0]));
        let p = euclidean_ball_project(&[3.0, 4.0].into());
        assert!(p.dist(&[0.6, 0.8].into()) < 1e-15);
    }

    #[test]
    fn halfspace_examples() {
        let n = Point::from([1.0, 0.0]);
        let a = Point::zeros(2);
        let inside = Point::from([-1.0, 3.0]);
        assert_eq!(halfspace_project(&inside, &n, &a).unwrap(), inside);
        assert_eq!(halfspace_project(&[2.0, 5.0].into(), &n, &a).unwrap(), Point::from([0.0, 5.0]));
        assert!(matches!(halfspace_project(&inside, &Point::zeros(2), &a), Err(VipError::InvalidParameter(_))));
    }

    #[test]
    fn reference_projector_examples() {
        let inside = Point::from([0.5, -0.5]);
        assert_eq!(reference_pnorm_project(&inside, 10.0).unwrap(), inside);
        let diag = reference_pnorm_project(&[2.0, 2.0].into(), 10.0).unwrap();
        let c = 2f64.powf(-0.1);
        assert!((diag[0] - c).abs() < 1e-9 && (diag[1] - c).abs() < 1e-9, "{diag:?}");
        let signed = reference_pnorm_project(&[-3.0, 4.0].into(), 2.0).unwrap();
        assert!(signed.dist(&[-0.6, 0.8].into()) < 1e-9);
        assert!(reference_pnorm_project(&inside, 1.0).is_err());
    }

    #[test]
    fn brute_force_zero_operator() {
        let ball = crate::problems::PNormBall::new(3, 2.0).unwrap();
        let v = brute_force_vi_check(&[0.1, 0.2, 0.3].into(), &ZeroField { dim: 3 }, &ball, 100).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn brute_force_on_benchmarks() {
        let nl = nonlipschitz_operator();
        let v = brute_force_vi_check(nl.x_ref.as_ref().unwrap(), nl.field.as_ref(), nl.set.as_ref(), 10_000).unwrap();
        assert!(v >= -1e-6, "{v}");
        let ls = linear_saddle_operator();
        let v = brute_force_vi_check(&ls.x_start, ls.field.as_ref(), ls.set.as_ref(), 10_000).unwrap();
        assert!(v < 0.0, "{v}");
    }
}
