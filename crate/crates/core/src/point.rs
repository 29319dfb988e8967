//! Dense points of `R^d` and the handful of vector operations the solvers need.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use crate::error::{Result, VipError};

/// A point (or direction) in `R^d`.
#[derive(Clone, PartialEq, Default)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        Point(vec![0.0; dim])
    }

    pub fn filled(dim: usize, value: f64) -> Self {
        Point(vec![value; dim])
    }

    /// The all-ones vector `e`.
    pub fn ones(dim: usize) -> Self {
        Self::filled(dim, 1.0)
    }

    /// The `i`-th canonical basis vector scaled by `scale`.
    pub fn basis(dim: usize, i: usize, scale: f64) -> Self {
        let mut p = Self::zeros(dim);
        p.0[i] = scale;
        p
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    /// Fails with [`VipError::NonFinite`] if any coordinate is NaN or infinite.
    pub fn ensure_finite(&self, what: &str) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(VipError::NonFinite(what.to_string()))
        }
    }

    pub fn ensure_dim(&self, expected: usize) -> Result<()> {
        if self.dim() == expected {
            Ok(())
        } else {
            Err(VipError::DimensionMismatch { expected, found: self.dim() })
        }
    }

    pub fn norm_sq(&self) -> f64 {
        inner(&self.0, &self.0)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Euclidean distance to `other`.
    pub fn dist(&self, other: &Point) -> f64 {
        dist_sq(&self.0, &other.0).sqrt()
    }

    /// `self + scale * dir`.
    pub fn add_scaled(&self, scale: f64, dir: &Point) -> Point {
        debug_assert_eq!(self.dim(), dir.dim());
        Point(self.0.iter().zip(&dir.0).map(|(a, b)| a + scale * b).collect())
    }

    pub fn scale(&self, s: f64) -> Point {
        Point(self.0.iter().map(|a| s * a).collect())
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(v)
    }
}

impl From<&[f64]> for Point {
    fn from(v: &[f64]) -> Self {
        Point(v.to_vec())
    }
}

impl<const N: usize> From<[f64; N]> for Point {
    fn from(v: [f64; N]) -> Self {
        Point(v.to_vec())
    }
}

impl Index<usize> for Point {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl Add for &Point {
    type Output = Point;
    fn add(self, rhs: &Point) -> Point {
        debug_assert_eq!(self.dim(), rhs.dim());
        Point(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Point {
    type Output = Point;
    fn sub(self, rhs: &Point) -> Point {
        debug_assert_eq!(self.dim(), rhs.dim());
        Point(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Mul<f64> for &Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        self.scale(s)
    }
}

impl Neg for &Point {
    type Output = Point;
    fn neg(self) -> Point {
        self.scale(-1.0)
    }
}

/// Euclidean inner product; dimensions must agree.
pub fn dot(a: &Point, b: &Point) -> Result<f64> {
    b.ensure_dim(a.dim())?;
    Ok(inner(&a.0, &b.0))
}

pub fn norm(a: &Point) -> f64 {
    a.norm()
}

/// `(sum |a_i|^p)^(1/p)` for `p >= 1`.
pub fn pnorm(a: &Point, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(VipError::InvalidParameter(format!("p-norm needs p >= 1, got {p}")));
    }
    Ok(pnorm_slice(&a.0, p))
}

pub(crate) fn pnorm_slice(a: &[f64], p: f64) -> f64 {
    if p == 2.0 {
        return inner(a, a).sqrt();
    }
    if p == 1.0 {
        return a.iter().map(|x| x.abs()).sum();
    }
    if p.is_infinite() {
        return a.iter().fold(0.0, |m, x| m.max(x.abs()));
    }
    // Scale by the largest magnitude so |x_i|^p neither overflows nor underflows.
    let m = a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if m == 0.0 {
        return 0.0;
    }
    let s: f64 = a.iter().map(|x| (x.abs() / m).powf(p)).sum();
    m * s.powf(1.0 / p)
}

#[inline]
pub(crate) fn inner(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn dot_examples() {
        assert_eq!(dot(&[1.0, 0.0].into(), &[0.0, 1.0].into()).unwrap(), 0.0);
        assert_eq!(dot(&[1.0, 2.0].into(), &[3.0, 4.0].into()).unwrap(), 11.0);
        let e = Point::ones(7);
        assert_eq!(dot(&e, &e).unwrap(), 7.0);
    }

    #[test]
    fn dot_dimension_mismatch() {
        let err = dot(&Point::ones(2), &Point::ones(3)).unwrap_err();
        assert_eq!(err, VipError::DimensionMismatch { expected: 2, found: 3 });
    }

    #[test]
    fn pnorm_examples() {
        assert_relative_eq!(pnorm(&[1.0, 1.0].into(), 2.0).unwrap(), 2f64.sqrt(), epsilon = 1e-15);
        for p in [1.0, 1.5, 2.0, 3.0, 10.0, 15.0] {
            let unit = Point::basis(4, 3, 1.0);
            assert_relative_eq!(pnorm(&unit, p).unwrap(), 1.0, epsilon = 1e-15);
        }
        let x = Point::ones(5).scale((2.0f64 / 3.0).sqrt());
        let expected = (2.0f64 / 3.0).sqrt() * 5f64.powf(0.1);
        assert_relative_eq!(pnorm(&x, 10.0).unwrap(), expected, epsilon = 1e-14);
        assert!((expected - 0.9590).abs() < 1e-4);
        assert_eq!(norm(&[3.0, 4.0].into()), 5.0);
    }

    #[test]
    fn pnorm_rejects_small_p() {
        assert!(matches!(pnorm(&Point::ones(2), 0.5), Err(VipError::InvalidParameter(_))));
        assert!(pnorm(&Point::ones(2), f64::NAN).is_err());
    }

    #[test]
    fn pnorm_handles_extreme_scales() {
        let big = Point::filled(3, 1e200);
        assert_relative_eq!(pnorm(&big, 10.0).unwrap(), 1e200 * 3f64.powf(0.1), max_relative = 1e-14);
        let tiny = Point::filled(3, 1e-200);
        assert_relative_eq!(pnorm(&tiny, 10.0).unwrap(), 1e-200 * 3f64.powf(0.1), max_relative = 1e-14);
    }
}
