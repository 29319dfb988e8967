//! Benchmark instances: p-norm unit balls and the three test operators.

use std::fmt;
use std::sync::Arc;

use crate::error::{Result, VipError};
use crate::extragradient::{einexpmls_solve, LsConfig, SolveStatus, StopRule};
use crate::fw::FwConfig;
use crate::point::{pnorm_slice, Point};
use crate::problem::{FeasibleSet, VectorField, ZeroField, FEASIBILITY_SLACK};

/// The unit ball `{x : ||x||_p <= 1}` in `R^dim`, with `|x_i|^p` in the norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PNormBall {
    dim: usize,
    p: f64,
}

impl PNormBall {
    pub fn new(dim: usize, p: f64) -> Result<Self> {
        if dim == 0 {
            return Err(VipError::InvalidParameter("ball dimension must be positive".into()));
        }
        if !(p >= 1.0) || !p.is_finite() {
            return Err(VipError::InvalidParameter(format!("ball exponent must be finite and >= 1, got {p}")));
        }
        Ok(PNormBall { dim, p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Gauge of the ball, i.e. `||x||_p`.
    pub fn gauge(&self, x: &Point) -> f64 {
        pnorm_slice(x.as_slice(), self.p)
    }
}

impl FeasibleSet for PNormBall {
    fn dim(&self) -> usize {
        self.dim
    }

    fn lo_oracle_into(&self, cost: &[f64], out: &mut [f64]) {
        pnorm_ball_lo_into(cost, self.p, out);
    }

    fn contains(&self, x: &Point, tol: f64) -> bool {
        if x.dim() != self.dim || !x.is_finite() {
            return false;
        }
        self.gauge(x) <= 1.0 + tol + FEASIBILITY_SLACK * (1.0 + x.norm())
    }

    fn interior_point(&self) -> Point {
        Point::zeros(self.dim)
    }
}

/// Minimizer of `<c, y>` over the unit `p`-ball.
///
/// For `p > 1` and `c != 0` this is `y_i = -sign(c_i) |c_i|^(q-1) / ||c||_q^(q-1)`
/// with `1/p + 1/q = 1`, attaining `-||c||_q`. For `p = 1` the answer is the
/// vertex `-sign(c_j) e_j` at the smallest index maximizing `|c_j|`. A zero cost
/// returns the origin.
pub fn pnorm_ball_lo(c: &Point, p: f64) -> Result<Point> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(VipError::InvalidParameter(format!("ball exponent must be finite and >= 1, got {p}")));
    }
    let mut out = Point::zeros(c.dim());
    pnorm_ball_lo_into(c.as_slice(), p, out.as_mut_slice());
    Ok(out)
}

fn pnorm_ball_lo_into(c: &[f64], p: f64, out: &mut [f64]) {
    let (jmax, m) = c
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |(j, m), (i, x)| if x.abs() > m { (i, x.abs()) } else { (j, m) });
    out.iter_mut().for_each(|o| *o = 0.0);
    if m == 0.0 {
        return;
    }
    if p == 1.0 {
        out[jmax] = -c[jmax].signum();
        return;
    }
    if p == 2.0 {
        let n = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        for (o, x) in out.iter_mut().zip(c) {
            *o = -x / n;
        }
        return;
    }
    // Work with c / max|c_i| so the powers stay in range.
    // q - 1 = 1/(p - 1), so r^q = r^(q-1) * r and one powf per coordinate suffices.
    let expo = 1.0 / (p - 1.0);
    let mut acc = 0.0;
    for (o, x) in out.iter_mut().zip(c) {
        let r = x.abs() / m;
        let rq1 = r.powf(expo);
        acc += rq1 * r;
        *o = -x.signum() * rq1;
    }
    let denom = acc.powf(1.0 / p);
    for o in out.iter_mut() {
        *o /= denom;
    }
}

/// `T(x) = [[-1, -1], [1, -1]] x + (3/2, 1/2)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct LinearSaddleField;

impl LinearSaddleField {
    pub const MATRIX: [[f64; 2]; 2] = [[-1.0, -1.0], [1.0, -1.0]];
    pub const OFFSET: [f64; 2] = [1.5, 0.5];
}

impl VectorField for LinearSaddleField {
    fn dim(&self) -> usize {
        2
    }

    fn eval(&self, x: &Point) -> Result<Point> {
        x.ensure_dim(2)?;
        let a = Self::MATRIX;
        let b = Self::OFFSET;
        Ok(Point::from([a[0][0] * x[0] + a[0][1] * x[1] + b[0], a[1][0] * x[0] + a[1][1] * x[1] + b[1]]))
    }
}

/// `T(x1, x2) = -t/(1+t) (1, 1)` with `t = (x1 + sqrt(x1^2 + 4 x2)) / 2`.
///
/// The radicand is clamped at zero, which keeps the operator total on the
/// unit 10-ball (there `t >= -1/2`).
#[derive(Debug, Clone, Copy, Default)]
pub struct NonLipschitzField;

impl VectorField for NonLipschitzField {
    fn dim(&self) -> usize {
        2
    }

    fn eval(&self, x: &Point) -> Result<Point> {
        x.ensure_dim(2)?;
        let radicand = (x[0] * x[0] + 4.0 * x[1]).max(0.0);
        let t = 0.5 * (x[0] + radicand.sqrt());
        if 1.0 + t <= 0.0 {
            return Err(VipError::OperatorDomain(format!("1 + t vanishes at {x}")));
        }
        let s = -t / (1.0 + t);
        Ok(Point::from([s, s]))
    }
}

/// `T_i(x) = (h x_i S - (h/2) Q - 1) / S^2` with `S = sum x_j`, `Q = sum x_j^2`.
#[derive(Debug, Clone, Copy)]
pub struct ThField {
    pub dim: usize,
    pub h: f64,
}

impl ThField {
    /// `|sum x_i|` below this is treated as leaving the operator's domain.
    pub const MIN_SUM: f64 = 1e-12;

    /// Scale `a = sqrt(2 / (d h))` of the zero `a e` of the operator.
    pub fn zero_scale(&self) -> f64 {
        (2.0 / (self.dim as f64 * self.h)).sqrt()
    }
}

impl VectorField for ThField {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &Point) -> Result<Point> {
        x.ensure_dim(self.dim)?;
        let s = x.sum();
        if !(s.abs() >= Self::MIN_SUM) {
            return Err(VipError::OperatorDomain(format!("coordinate sum {s:e} too close to zero")));
        }
        let q = x.norm_sq();
        let s2 = s * s;
        let shift = 0.5 * self.h * q + 1.0;
        Ok(Point::new(x.iter().map(|xi| (self.h * xi * s - shift) / s2).collect()))
    }
}

/// Informational label; solvers never branch on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonotonicityClass {
    Monotone,
    PseudoMonotoneWrtSolutions,
    Quasimonotone,
}

/// A named problem instance with its start point and known facts.
#[derive(Clone)]
pub struct BenchmarkProblem {
    pub name: String,
    pub field: Arc<dyn VectorField>,
    pub set: Arc<dyn FeasibleSet>,
    pub x_start: Point,
    pub x_ref: Option<Point>,
    pub lipschitz: Option<f64>,
    pub monotonicity: MonotonicityClass,
}

impl fmt::Debug for BenchmarkProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BenchmarkProblem")
            .field("name", &self.name)
            .field("dim", &self.set.dim())
            .field("x_start", &self.x_start)
            .field("x_ref", &self.x_ref)
            .field("lipschitz", &self.lipschitz)
            .field("monotonicity", &self.monotonicity)
            .finish()
    }
}

impl BenchmarkProblem {
    pub fn dim(&self) -> usize {
        self.set.dim()
    }
}

/// The affine operator on the unit 10-ball in `R^2`, started from `(0, 1)`.
pub fn linear_saddle_operator() -> BenchmarkProblem {
    BenchmarkProblem {
        name: "linear-saddle".into(),
        field: Arc::new(LinearSaddleField),
        set: Arc::new(PNormBall { dim: 2, p: 10.0 }),
        x_start: Point::from([0.0, 1.0]),
        x_ref: None,
        lipschitz: Some(2f64.sqrt()),
        monotonicity: MonotonicityClass::Monotone,
    }
}

/// The non-Lipschitz operator on the unit 10-ball, with solution `(1,1)/||(1,1)||_10`.
pub fn nonlipschitz_operator() -> BenchmarkProblem {
    let c = 2f64.powf(-0.1);
    BenchmarkProblem {
        name: "non-lipschitz".into(),
        field: Arc::new(NonLipschitzField),
        set: Arc::new(PNormBall { dim: 2, p: 10.0 }),
        x_start: Point::from([0.0, 1.0]),
        x_ref: Some(Point::from([c, c])),
        lipschitz: None,
        monotonicity: MonotonicityClass::Quasimonotone,
    }
}

/// The `d`-dimensional operator `T_h` on the unit `p`-ball, started from `(0,...,0,1)`.
///
/// The reference solution is the zero `a e` of the operator when it is
/// feasible. Otherwise it is the boundary point `e / ||e||_p`, accepted only
/// if its gap function vanishes; a high-accuracy line-search run is the
/// last resort.
pub fn th_operator(d: usize, p: f64, h: f64) -> Result<BenchmarkProblem> {
    let mut problem = th_operator_without_reference(d, p, h)?;
    let field = ThField { dim: d, h };
    let zero = Point::filled(d, field.zero_scale());
    let x_ref = if problem.set.contains(&zero, 0.0) {
        zero
    } else {
        let corner = Point::filled(d, (d as f64).powf(-1.0 / p));
        if gap_function(&corner, problem.field.as_ref(), problem.set.as_ref())? <= REFERENCE_GAP_TOL {
            corner
        } else {
            high_accuracy_reference(&problem)?
        }
    };
    problem.x_ref = Some(x_ref);
    Ok(problem)
}

/// Same instance as [`th_operator`] but skipping the reference computation.
pub fn th_operator_without_reference(d: usize, p: f64, h: f64) -> Result<BenchmarkProblem> {
    if d < 2 {
        return Err(VipError::InvalidParameter(format!("T_h needs d >= 2, got {d}")));
    }
    if !(0.1..=1.6).contains(&h) {
        return Err(VipError::InvalidParameter(format!("T_h needs 0.1 <= h <= 1.6, got {h}")));
    }
    let set = PNormBall::new(d, p)?;
    Ok(BenchmarkProblem {
        name: format!("th:d={d},p={p},h={h}"),
        field: Arc::new(ThField { dim: d, h }),
        set: Arc::new(set),
        x_start: Point::basis(d, d - 1, 1.0),
        x_ref: None,
        lipschitz: None,
        monotonicity: MonotonicityClass::PseudoMonotoneWrtSolutions,
    })
}

/// `F ≡ 0` on the Euclidean unit ball in `R^d`.
pub fn zero_operator(d: usize) -> Result<BenchmarkProblem> {
    let set = PNormBall::new(d, 2.0)?;
    let mut start = Point::zeros(d);
    start.as_mut_slice()[0] = 0.5;
    Ok(BenchmarkProblem {
        name: format!("zero:d={d}"),
        field: Arc::new(ZeroField { dim: d }),
        set: Arc::new(set),
        x_start: start.clone(),
        x_ref: Some(start),
        lipschitz: Some(0.0),
        monotonicity: MonotonicityClass::Monotone,
    })
}

/// Largest gap accepted for a closed-form reference point.
pub const REFERENCE_GAP_TOL: f64 = 1e-12;

/// `max_{z in C} <F(x), x - z>`; zero exactly at solutions.
pub fn gap_function(x: &Point, field: &dyn VectorField, set: &dyn FeasibleSet) -> Result<f64> {
    let fx = field.eval(x)?;
    let z = set.lo_oracle(&fx);
    crate::point::dot(&fx, &(x - &z))
}

/// Outer tolerance of the reference run.
pub const REFERENCE_OUTER_TOL: f64 = 1e-8;

/// Solves the instance with EInexPMLS to `||x - y|| <= 1e-8` using tight projections.
pub fn high_accuracy_reference(problem: &BenchmarkProblem) -> Result<Point> {
    let cfg = LsConfig {
        gamma_bar: 1e-3,
        stop: StopRule::Displacement { tol: REFERENCE_OUTER_TOL },
        max_outer: 200_000,
        fw: FwConfig { abs_gap_floor: 1e-14, ..FwConfig::default() },
        ..LsConfig::default()
    };
    let (x, trace) = einexpmls_solve(problem, &cfg, &problem.x_start)?;
    if trace.status != SolveStatus::Converged {
        return Err(VipError::Internal(format!(
            "reference run for {} ended with status {:?} after {} iterations",
            problem.name,
            trace.status,
            trace.records.len()
        )));
    }
    Ok(x)
}

/// Looks a problem up by name: `linear-saddle`, `non-lipschitz`,
/// `th:d=<d>,p=<p>,h=<h>`, or `zero[:d=<d>]`.
pub fn problem_by_name(name: &str) -> Result<BenchmarkProblem> {
    let name = name.trim();
    match name {
        "linear-saddle" => return Ok(linear_saddle_operator()),
        "non-lipschitz" => return Ok(nonlipschitz_operator()),
        "zero" => return zero_operator(2),
        _ => {}
    }
    let unknown = || VipError::UnknownProblem(name.to_string());
    let (kind, params) = name.split_once(':').ok_or_else(unknown)?;
    let mut d = None;
    let mut p = None;
    let mut h = None;
    for kv in params.split(',') {
        let (k, v) = kv.split_once('=').ok_or_else(unknown)?;
        let v = v.trim();
        match k.trim() {
            "d" => d = Some(v.parse::<usize>().map_err(|_| unknown())?),
            "p" => p = Some(v.parse::<f64>().map_err(|_| unknown())?),
            "h" => h = Some(v.parse::<f64>().map_err(|_| unknown())?),
            _ => return Err(unknown()),
        }
    }
    match kind {
        "th" => th_operator(d.ok_or_else(unknown)?, p.ok_or_else(unknown)?, h.ok_or_else(unknown)?),
        "zero" if p.is_none() && h.is_none() => zero_operator(d.unwrap_or(2)),
        _ => Err(unknown()),
    }
}
