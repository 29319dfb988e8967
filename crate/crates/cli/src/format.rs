//! CSV plumbing. Floats are written like C's `%.17g`, which round-trips every `f64`.

use std::fmt::Write as _;

const SIG_DIGITS: i32 = 17;

/// `%.17g`: 17 significant digits, trailing zeros dropped, exponent form
/// outside `1e-4 <= |v| < 1e17`.
pub fn fmt_g17(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    // Rounding to 17 digits decides the exponent, as in C.
    let sci = format!("{:.*e}", (SIG_DIGITS - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= SIG_DIGITS {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (SIG_DIGITS - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt_f(v: Option<f64>) -> String {
    v.map(fmt_g17).unwrap_or_default()
}

/// Builds a CSV document; rows are joined with `\n` and the file ends with one.
#[derive(Debug, Default)]
pub struct Csv {
    body: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut csv = Csv::default();
        csv.push(header.iter().map(|s| s.to_string()));
        csv
    }

    pub fn push(&mut self, fields: impl IntoIterator<Item = String>) {
        let line: Vec<String> = fields.into_iter().collect();
        let _ = writeln!(self.body, "{}", line.join(","));
    }

    pub fn as_str(&self) -> &str {
        &self.body
    }
}

pub const TRACE_HEADER: [&str; 7] = ["k", "dist_ref", "step_norm", "gamma_k", "lambda_k", "i_k", "fw_iters"];
pub const TABLE1_HEADER: [&str; 4] = ["alpha", "gamma_bar", "outer_steps", "fw_total"];
pub const TABLE3_HEADER: [&str; 3] = ["d", "p", "iterations"];

/// One row per recorded iteration; missing quantities are left empty.
pub fn trace_csv(trace: &vip_core::SolveTrace) -> Csv {
    let mut csv = Csv::new(&TRACE_HEADER);
    for r in &trace.records {
        csv.push([
            r.k.to_string(),
            opt_f(r.dist_to_ref),
            opt_f(r.step_norm()),
            fmt_g17(r.gamma),
            opt_f(r.lambda),
            r.i_k.map(|i| i.to_string()).unwrap_or_default(),
            r.fw_iters().to_string(),
        ]);
    }
    csv
}

#[cfg(test)]
mod tests {
    use super::fmt_g17;

    #[test]
    fn matches_printf_g17() {
        assert_eq!(fmt_g17(0.1), "0.10000000000000001");
        assert_eq!(fmt_g17(1.0), "1");
        assert_eq!(fmt_g17(0.106), "0.106");
        assert_eq!(fmt_g17(109.0), "109");
        assert_eq!(fmt_g17(1.5e-7), "1.4999999999999999e-07");
        assert_eq!(fmt_g17(-2.5), "-2.5");
        assert_eq!(fmt_g17(1e20), "1e+20");
        assert_eq!(fmt_g17(0.0), "0");
        assert_eq!(fmt_g17(1.6432711801397482), "1.6432711801397482");
    }

    #[test]
    fn round_trips() {
        for v in [std::f64::consts::PI, 1e-300, 123456.789, 2f64.powf(-0.1), 9.999999999999999e16] {
            assert_eq!(fmt_g17(v).parse::<f64>().unwrap(), v);
        }
    }
}
