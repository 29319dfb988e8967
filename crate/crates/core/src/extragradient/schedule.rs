//! Summable sequences `(a_k)` controlling the EInexPM error tolerances.

/// Guard against dividing by a vanishing `||F(x^k)||^2`.
pub const DIV_GUARD: f64 = 1e-30;

/// Fraction of `gamma_bar` used as the cap, keeping `gamma_k < gamma_bar` strict.
pub const GAMMA_CAP_FRACTION: f64 = 0.999;

/// `a_k = b_{k-1} - b_k` with `b_0 = 2 b_bar`, or an explicit sequence.
#[derive(Debug, Clone, PartialEq)]
pub enum ASchedule {
    /// `b_k = b_bar / k`.
    Harmonic { b_bar: f64 },
    /// `b_k = b_bar / ln(k + 1)`.
    Log { b_bar: f64 },
    /// `a_k` given for `k = 1, 2, ...`; zero past the end.
    Custom(Vec<f64>),
}

impl Default for ASchedule {
    fn default() -> Self {
        ASchedule::Harmonic { b_bar: 1.0 }
    }
}

impl ASchedule {
    fn b(&self, k: usize) -> f64 {
        match *self {
            ASchedule::Harmonic { b_bar } | ASchedule::Log { b_bar } if k == 0 => 2.0 * b_bar,
            ASchedule::Harmonic { b_bar } => b_bar / k as f64,
            ASchedule::Log { b_bar } => b_bar / ((k + 1) as f64).ln(),
            ASchedule::Custom(_) => unreachable!("custom schedules have no b_k"),
        }
    }

    /// The `k`-th term, `k >= 1`.
    pub fn a(&self, k: usize) -> f64 {
        assert!(k >= 1, "schedule is indexed from k = 1");
        match self {
            ASchedule::Custom(v) => v.get(k - 1).copied().unwrap_or(0.0),
            _ => self.b(k - 1) - self.b(k),
        }
    }

    /// Upper bound on `sum_k a_k`.
    pub fn total(&self) -> f64 {
        match self {
            ASchedule::Custom(v) => v.iter().sum(),
            _ => self.b(0),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        match self {
            ASchedule::Harmonic { b_bar } | ASchedule::Log { b_bar } if !(*b_bar > 0.0) || !b_bar.is_finite() => {
                Err(format!("schedule b_bar must be positive, got {b_bar}"))
            }
            ASchedule::Custom(v) if v.iter().any(|a| !(*a >= 0.0) || !a.is_finite()) => {
                Err("custom schedule terms must be finite and nonnegative".into())
            }
            _ => Ok(()),
        }
    }
}

/// `gamma_k = min(0.999 gamma_bar, a_k / max(||F(x^k)||^2, 1e-30))`.
///
/// Satisfies `0 <= gamma_k ||F(x^k)||^2 <= a_k` and `0 <= gamma_k < gamma_bar`.
pub fn gamma_schedule(k: usize, f_norm_sq: f64, gamma_bar: f64, schedule: &ASchedule) -> f64 {
    let cap = GAMMA_CAP_FRACTION * gamma_bar;
    let budget = schedule.a(k) / f_norm_sq.max(DIV_GUARD);
    cap.min(budget).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn harmonic_first_term() {
        let s = ASchedule::Harmonic { b_bar: 1.0 };
        assert_eq!(s.a(1), 1.0);
        assert_relative_eq!(s.a(3), 0.5 - 1.0 / 3.0, epsilon = 1e-16);
    }

    #[test]
    fn zero_operator_hits_the_cap() {
        let s = ASchedule::default();
        assert_eq!(gamma_schedule(5, 0.0, 0.3, &s), 0.999 * 0.3);
    }

    #[test]
    fn budget_binds_when_operator_is_large() {
        let s = ASchedule::Harmonic { b_bar: 1.0 };
        let g = gamma_schedule(3, 10.0, 0.4, &s);
        assert_relative_eq!(g, 1.0 / 60.0, epsilon = 1e-16);
        let g = gamma_schedule(3, 10.0, 0.01, &s);
        assert_relative_eq!(g, 0.999 * 0.01, epsilon = 1e-16);
    }

    #[test]
    fn partial_sums_stay_below_total() {
        for s in [ASchedule::Harmonic { b_bar: 2.5 }, ASchedule::Log { b_bar: 1.0 }] {
            let mut acc = 0.0;
            for k in 1..10_000 {
                let a = s.a(k);
                assert!(a > 0.0);
                acc += a;
                // gamma_k ||F||^2 <= a_k for arbitrary operator magnitudes.
                for f2 in [1e-6, 1.0, 1e6] {
                    assert!(gamma_schedule(k, f2, 0.49, &s) * f2 <= a * (1.0 + 1e-12));
                }
            }
            assert!(acc <= s.total() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn custom_sequence_runs_out() {
        let s = ASchedule::Custom(vec![0.5, 0.25]);
        assert_eq!(s.a(2), 0.25);
        assert_eq!(s.a(3), 0.0);
        assert_eq!(s.total(), 0.75);
        assert!(ASchedule::Custom(vec![-1.0]).validate().is_err());
        assert!(ASchedule::Log { b_bar: 0.0 }.validate().is_err());
    }
}
