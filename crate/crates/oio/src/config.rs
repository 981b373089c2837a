//! `key = value` experiment configuration.

use std::collections::BTreeMap;
use std::path::PathBuf;

use oio_core::rational::{self, int};
use oio_core::Rational;

use crate::error::{LabError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Option<String>,
    pub phase: Option<String>,
    pub p: Rational,
    /// Base-2 exponents of the λ ladder.
    pub lambda_lo: i32,
    pub lambda_hi: i32,
    pub steps: i32,
    pub res_cap: usize,
    pub tol: f64,
    pub assert: bool,
    pub out: Option<PathBuf>,
    pub seed: u64,
    /// Keys without a dedicated field.
    pub extras: BTreeMap<String, String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            command: None,
            phase: None,
            p: int(2),
            lambda_lo: 4,
            lambda_hi: 12,
            steps: 1,
            res_cap: 4096,
            tol: 0.05,
            assert: false,
            out: None,
            seed: 7,
            extras: BTreeMap::new(),
        }
    }
}

/// Lines of `key = value`; `#` starts a comment, blank lines are skipped.
pub fn parse_pairs(text: &str) -> Result<Vec<(usize, String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(LabError::Config { line: i + 1, message: format!("expected key = value, got {line:?}") });
        };
        let k = k.trim().replace('-', "_");
        if k.is_empty() {
            return Err(LabError::Config { line: i + 1, message: "empty key".into() });
        }
        out.push((i + 1, k, v.trim().to_string()));
    }
    Ok(out)
}

fn parse_bool(v: &str) -> Option<bool> {
    match v {
        "true" | "yes" | "1" | "on" => Some(true),
        "false" | "no" | "0" | "off" => Some(false),
        _ => None,
    }
}

impl ExperimentConfig {
    pub fn from_text(text: &str) -> Result<Self> {
        let mut c = Self::default();
        for (line, k, v) in parse_pairs(text)? {
            c.set(&k, &v).map_err(|e| LabError::Config { line, message: e.to_string() })?;
        }
        Ok(c)
    }

    /// Sets one key from its text form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| LabError::Invalid(format!("{key} = {value:?}: expected {what}"));
        match key {
            "command" => self.command = Some(value.to_string()),
            "phase" => self.phase = Some(value.to_string()),
            "p" => self.p = rational::parse(value).ok_or_else(|| bad("a rational like 3/2"))?,
            "lambda_lo" => self.lambda_lo = value.parse().map_err(|_| bad("an integer exponent"))?,
            "lambda_hi" => self.lambda_hi = value.parse().map_err(|_| bad("an integer exponent"))?,
            "steps" => self.steps = value.parse().map_err(|_| bad("a positive integer"))?,
            "res_cap" => self.res_cap = value.parse().map_err(|_| bad("a positive integer"))?,
            "tol" => self.tol = value.parse().map_err(|_| bad("a number"))?,
            "assert" => self.assert = parse_bool(value).ok_or_else(|| bad("true or false"))?,
            "out" => self.out = Some(PathBuf::from(value)),
            "seed" => self.seed = value.parse().map_err(|_| bad("an unsigned integer"))?,
            _ => {
                self.extras.insert(key.to_string(), value.to_string());
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps <= 0 {
            return Err(LabError::Invalid("steps must be positive".into()));
        }
        if self.lambda_hi < self.lambda_lo {
            return Err(LabError::Invalid("lambda_hi must not be below lambda_lo".into()));
        }
        if self.res_cap == 0 {
            return Err(LabError::Invalid("res_cap must be positive".into()));
        }
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(LabError::Invalid("tol must be a positive number".into()));
        }
        if self.p < int(1) {
            return Err(LabError::Invalid("p must be at least 1".into()));
        }
        Ok(())
    }

    pub fn extra(&self, key: &str) -> Option<&str> {
        self.extras.get(key).map(String::as_str)
    }

    pub fn extra_f64(&self, key: &str, default: f64) -> Result<f64> {
        self.extra(key).map_or(Ok(default), |v| v.parse().map_err(|_| LabError::Invalid(format!("{key} = {v:?}: expected a number"))))
    }

    pub fn extra_u32(&self, key: &str, default: u32) -> Result<u32> {
        self.extra(key).map_or(Ok(default), |v| v.parse().map_err(|_| LabError::Invalid(format!("{key} = {v:?}: expected an integer"))))
    }

    pub fn extra_bool(&self, key: &str, default: bool) -> Result<bool> {
        self.extra(key).map_or(Ok(default), |v| parse_bool(v).ok_or_else(|| LabError::Invalid(format!("{key} = {v:?}: expected true or false"))))
    }

    /// Every setting in text form, for embedding in reports.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut m = self.extras.clone();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        if let Some(c) = &self.command {
            put("command", c.clone());
        }
        if let Some(p) = &self.phase {
            put("phase", p.clone());
        }
        put("p", rational::to_text(&self.p));
        put("lambda_lo", self.lambda_lo.to_string());
        put("lambda_hi", self.lambda_hi.to_string());
        put("steps", self.steps.to_string());
        put("res_cap", self.res_cap.to_string());
        put("tol", self.tol.to_string());
        put("assert", self.assert.to_string());
        if let Some(o) = &self.out {
            put("out", o.display().to_string());
        }
        put("seed", self.seed.to_string());
        m
    }
}
