//! JSON and CSV output.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use oio_core::Rational;
use serde::{Serialize, Serializer};

use crate::error::Result;

pub fn rational_text<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&oio_core::rational::to_text(r))
}

pub fn option_rational_text<S: Serializer>(r: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => rational_text(r, s),
        None => s.serialize_none(),
    }
}

pub fn rationals_text<S: Serializer>(rs: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(rs.iter().map(oio_core::rational::to_text))
}

/// `%.12g`: twelve significant digits, trailing zeros dropped.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        let m = trim_zeros(mantissa.to_string());
        format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LadderRow {
    pub lambda: f64,
    pub norm: f64,
    pub method: String,
    pub resolution: usize,
}

pub const LADDER_HEADER: &str = "lambda,norm,method,resolution";

pub fn ladder_csv(rows: &[LadderRow]) -> String {
    let mut out = String::from(LADDER_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!("{},{},{},{}\n", sig12(r.lambda), sig12(r.norm), r.method, r.resolution));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Versions {
    pub oio: &'static str,
    pub oio_core: &'static str,
}

impl Default for Versions {
    fn default() -> Self {
        Self { oio: env!("CARGO_PKG_VERSION"), oio_core: oio_core::VERSION }
    }
}

/// Every report file: the result plus the configuration that produced it.
#[derive(Debug, Clone, Serialize)]
pub struct Envelope<T: Serialize> {
    pub command: String,
    pub config: BTreeMap<String, String>,
    pub versions: Versions,
    /// Seconds since the epoch; the only field allowed to differ between identical runs.
    pub timestamp: u64,
    pub result: T,
}

impl<T: Serialize> Envelope<T> {
    pub fn new(command: &str, config: BTreeMap<String, String>, result: T) -> Self {
        let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        Self { command: command.to_string(), config, versions: Versions::default(), timestamp, result }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// Writes through a temporary file in the target directory and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sig12(16.0), "16");
        assert_eq!(sig12(0.1), "0.1");
        assert_eq!(sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(sig12(2f64.powi(40)), "1.09951162778e+12");
        assert_eq!(sig12(-1.5e-7), "-1.5e-07");
        assert_eq!(sig12(123456.7890123456), "123456.789012");
        assert_eq!(sig12(0.0), "0");
    }

    #[test]
    fn csv_layout() {
        let rows = vec![LadderRow { lambda: 16.0, norm: 0.123456789012345, method: "singular_value".into(), resolution: 256 }];
        assert_eq!(ladder_csv(&rows), "lambda,norm,method,resolution\n16,0.123456789012,singular_value,256\n");
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested").join("r.json");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "two");
        assert_eq!(std::fs::read_dir(path.parent().unwrap()).unwrap().count(), 1);
    }
}
