//! Extragradient solvers for finite-dimensional variational inequalities
//! `VIP(F, C)`: find `x*` in `C` with `<F(x*), x - x*> >= 0` for every `x` in `C`.
//!
//! Projections onto `C` are replaced by feasible inexact projections computed
//! with a Frank-Wolfe loop that only touches `C` through a linear-minimization
//! oracle. See [`extragradient`] for the two outer methods and [`fw`] for the
//! inner solver.

pub mod certificate;
pub mod error;
pub mod extragradient;
pub mod fw;
pub mod oracles;
pub mod point;
pub mod problem;
pub mod problems;

pub use certificate::{check_certificate, natural_residual, ProjectionCertificate};
pub use error::{Result, VipError};
pub use extragradient::{
    einexpm_solve, einexpmls_solve, ASchedule, EInexPmConfig, LsConfig, Method, SolveStatus, SolveTrace, StopRule,
};
pub use fw::{fw_project, FwConfig, FwResult, FwStop};
pub use point::{dot, norm, pnorm, Point};
pub use problem::{FeasibleSet, VectorField};
pub use problems::{problem_by_name, BenchmarkProblem, PNormBall};
