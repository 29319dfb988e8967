//! Run configuration: defaults, then a flat `key = value` file, then flags.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use vip_core::extragradient::BetaRule;
use vip_core::{ASchedule, EInexPmConfig, FwConfig, LsConfig, Method, StopRule};

/// Which quantity the outer stopping test looks at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopKind {
    Displacement,
    Reference,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleKind {
    Harmonic,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: String,
    pub method: Method,
    pub alpha: f64,
    pub gamma_bar: Option<f64>,
    pub schedule: ScheduleKind,
    pub b_bar: f64,
    pub beta: f64,
    pub beta_lo: Option<f64>,
    pub sigma: f64,
    pub rho: f64,
    pub backtrack: f64,
    pub max_backtracks: u32,
    pub stop: StopKind,
    pub tol: f64,
    pub max_outer: usize,
    pub fw_max_iter: u64,
    pub fw_floor: f64,
    pub verify_certificates: bool,
    pub out: Option<PathBuf>,
    /// Seed of the verification sampler; the solvers themselves are deterministic.
    pub seed: u64,
    pub samples: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let fw = FwConfig::default();
        let ls = LsConfig::default();
        RunConfig {
            problem: "linear-saddle".into(),
            method: Method::EInexPm,
            alpha: EInexPmConfig::default().alpha,
            gamma_bar: None,
            schedule: ScheduleKind::Harmonic,
            b_bar: 1.0,
            beta: ls.beta_hi,
            beta_lo: None,
            sigma: ls.sigma,
            rho: ls.rho,
            backtrack: ls.backtrack,
            max_backtracks: ls.max_backtracks,
            stop: StopKind::Displacement,
            tol: StopRule::default().tol(),
            max_outer: ls.max_outer,
            fw_max_iter: fw.max_iter,
            fw_floor: fw.abs_gap_floor,
            verify_certificates: true,
            out: None,
            seed: vip_core::oracles::DEFAULT_SAMPLING_SEED,
            samples: 10_000,
        }
    }
}

pub fn parse_method(s: &str) -> anyhow::Result<Method> {
    match s.trim().to_ascii_lowercase().as_str() {
        "einexpm" => Ok(Method::EInexPm),
        "einexpmls" => Ok(Method::EInexPmLs),
        other => bail!("unknown method `{other}` (expected einexpm or einexpmls)"),
    }
}

fn parse_bool(s: &str) -> anyhow::Result<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        other => bail!("not a boolean: `{other}`"),
    }
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> anyhow::Result<T>
where
    T::Err: std::fmt::Display,
{
    value.trim().parse().map_err(|e| anyhow!("bad value `{value}` for `{key}`: {e}"))
}

impl RunConfig {
    /// Applies one setting. Keys accept `-` or `_` as separator.
    pub fn set(&mut self, key: &str, value: &str) -> anyhow::Result<()> {
        let key = key.trim().replace('-', "_");
        let v = value.trim();
        match key.as_str() {
            "problem" => self.problem = v.to_string(),
            "method" => self.method = parse_method(v)?,
            "alpha" => self.alpha = num(&key, v)?,
            "gamma_bar" => self.gamma_bar = Some(num(&key, v)?),
            "schedule" => {
                self.schedule = match v {
                    "harmonic" => ScheduleKind::Harmonic,
                    "log" => ScheduleKind::Log,
                    _ => bail!("unknown schedule `{v}` (expected harmonic or log)"),
                }
            }
            "b_bar" => self.b_bar = num(&key, v)?,
            "beta" => self.beta = num(&key, v)?,
            "beta_lo" => self.beta_lo = Some(num(&key, v)?),
            "sigma" => self.sigma = num(&key, v)?,
            "rho" => self.rho = num(&key, v)?,
            "backtrack" => self.backtrack = num(&key, v)?,
            "max_backtracks" => self.max_backtracks = num(&key, v)?,
            "stop" => {
                self.stop = match v {
                    "displacement" => StopKind::Displacement,
                    "reference" => StopKind::Reference,
                    _ => bail!("unknown stop rule `{v}` (expected displacement or reference)"),
                }
            }
            "tol" | "outer_tol" => self.tol = num(&key, v)?,
            "max_outer" => self.max_outer = num(&key, v)?,
            "fw_max_iter" => self.fw_max_iter = num(&key, v)?,
            "fw_floor" => self.fw_floor = num(&key, v)?,
            "verify_certificates" => self.verify_certificates = parse_bool(v)?,
            "out" | "output" => self.out = Some(PathBuf::from(v)),
            "seed" => self.seed = num(&key, v)?,
            "samples" => self.samples = num(&key, v)?,
            _ => bail!("unknown config key `{key}`"),
        }
        Ok(())
    }

    /// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
    pub fn apply_text(&mut self, text: &str) -> anyhow::Result<()> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| anyhow!("line {}: expected `key = value`", n + 1))?;
            self.set(k, v).with_context(|| format!("line {}", n + 1))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> anyhow::Result<()> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        self.apply_text(&text).with_context(|| format!("in {}", path.display()))
    }

    fn stop_rule(&self) -> StopRule {
        match self.stop {
            StopKind::Displacement => StopRule::Displacement { tol: self.tol },
            StopKind::Reference => StopRule::NearReference { tol: self.tol },
        }
    }

    fn fw(&self) -> FwConfig {
        FwConfig { max_iter: self.fw_max_iter, abs_gap_floor: self.fw_floor, ..FwConfig::default() }
    }

    pub fn einexpm(&self) -> EInexPmConfig {
        let schedule = match self.schedule {
            ScheduleKind::Harmonic => ASchedule::Harmonic { b_bar: self.b_bar },
            ScheduleKind::Log => ASchedule::Log { b_bar: self.b_bar },
        };
        EInexPmConfig {
            alpha: self.alpha,
            gamma_bar: self.gamma_bar.unwrap_or(EInexPmConfig::default().gamma_bar),
            schedule,
            stop: self.stop_rule(),
            max_outer: self.max_outer,
            fw: self.fw(),
            verify_certificates: self.verify_certificates,
        }
    }

    pub fn ls(&self) -> LsConfig {
        LsConfig {
            beta_lo: self.beta_lo.unwrap_or(self.beta),
            beta_hi: self.beta,
            beta_rule: BetaRule::Constant,
            sigma: self.sigma,
            rho: self.rho,
            backtrack: self.backtrack,
            gamma_bar: self.gamma_bar.unwrap_or(LsConfig::default().gamma_bar),
            stop: self.stop_rule(),
            max_outer: self.max_outer,
            max_backtracks: self.max_backtracks,
            fw: self.fw(),
            verify_certificates: self.verify_certificates,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_syntax() {
        let mut c = RunConfig::default();
        c.apply_text("# sweep\nproblem = th:d=5,p=10,h=0.6\n\nmethod=einexpmls  # LS\ngamma-bar = 0.05\n").unwrap();
        assert_eq!(c.problem, "th:d=5,p=10,h=0.6");
        assert_eq!(c.method, Method::EInexPmLs);
        assert_eq!(c.gamma_bar, Some(0.05));
    }

    #[test]
    fn rejects_garbage() {
        let mut c = RunConfig::default();
        assert!(c.apply_text("alpha").is_err());
        assert!(c.apply_text("colour = blue").is_err());
        assert!(c.apply_text("alpha = fast").is_err());
        assert!(c.set("method", "newton").is_err());
    }
}
