use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use super::mapspec::parse_complex;
use super::CliError;

/// Keys understood in a config file; each mirrors the long flag of the
/// same name.
pub const CONFIG_KEYS: [&str; 21] = [
    "map",
    "method",
    "max-period",
    "viewport",
    "seed",
    "out",
    "format",
    "mode",
    "points",
    "center",
    "max-iter",
    "escape-radius",
    "tol",
    "depth",
    "cap",
    "palette",
    "n-max",
    "n-terms",
    "kind",
    "region",
    "target",
];

/// Flat `key = value` settings; `#` starts a comment line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Config {
                    line: k + 1,
                    message: format!("expected key=value, found '{line}'"),
                });
            };
            let key = key.trim();
            if !CONFIG_KEYS.contains(&key) {
                return Err(CliError::Config {
                    line: k + 1,
                    message: format!("unknown key '{key}'"),
                });
            }
            values.insert(key.to_string(), value.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// The flag value if given, otherwise the parsed file value.
    pub fn pick<T: FromStr>(&self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.raw(key) {
            None => Ok(None),
            Some(s) => s.parse::<T>().map(Some).map_err(|_| CliError::Usage(format!("invalid value '{s}' for {key}"))),
        }
    }
}

/// Where and how finely to sample the plane, plus the palette and the seed
/// for stochastic subsampling.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViewportConfig {
    pub center: Complex64,
    pub half_width: f64,
    pub cols: usize,
    pub rows: usize,
    pub palette: String,
    pub seed: u64,
}

pub const VIEWPORT_DEFAULT: &str = "0,0,2,512,512";

/// `cx,cy,hw,px,py`
pub fn parse_viewport(s: &str) -> Result<(Complex64, f64, usize, usize), CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || CliError::Usage(format!("viewport '{s}' must be cx,cy,hw,px,py with hw > 0 and positive pixel counts"));
    if parts.len() != 5 {
        return Err(bad());
    }
    let cx: f64 = parts[0].parse().map_err(|_| bad())?;
    let cy: f64 = parts[1].parse().map_err(|_| bad())?;
    let hw: f64 = parts[2].parse().map_err(|_| bad())?;
    let px: usize = parts[3].parse().map_err(|_| bad())?;
    let py: usize = parts[4].parse().map_err(|_| bad())?;
    if !(hw > 0.0 && hw.is_finite() && cx.is_finite() && cy.is_finite()) || px == 0 || py == 0 {
        return Err(bad());
    }
    Ok((Complex64::new(cx, cy), hw, px, py))
}

/// `cx,cy,r` describing a disk.
pub fn parse_disk(s: &str) -> Result<(Complex64, f64), CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || CliError::Usage(format!("disk '{s}' must be cx,cy,r with r > 0"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let v: Vec<f64> = parts.iter().map(|p| p.parse::<f64>().map_err(|_| bad())).collect::<Result<_, _>>()?;
    if !(v[2] > 0.0 && v.iter().all(|x| x.is_finite())) {
        return Err(bad());
    }
    Ok((Complex64::new(v[0], v[1]), v[2]))
}

/// Semicolon-separated complex literals, `inf` allowed.
pub fn parse_points(s: &str) -> Result<Vec<crate::maps::SpherePoint>, CliError> {
    s.split(';')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            if t == "inf" {
                Ok(crate::maps::SpherePoint::Infinity)
            } else {
                parse_complex(t)
                    .map(crate::maps::SpherePoint::Finite)
                    .ok_or_else(|| CliError::Usage(format!("'{t}' is not a complex number")))
            }
        })
        .collect()
}
