//! Config-file loading, flag/config merging, and boundary-data synthesis.
//!
//! Boundary circles are specified as Fourier coefficients, never as sampled
//! values, so the angular mode content of the data is exact by construction:
//! a map entry `"k" = [a, b]` contributes `a cos(k x) + b sin(k x)`. Modes
//! `|k| <= 1` are reserved by the normalized problem; they are rejected
//! unless `lower_modes_allowed` is set, in which case they are dropped with
//! a warning.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;

/// A configuration problem: bad file, bad flag value, conflicting or
/// out-of-range parameters. Mapped to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

/// One circle's boundary data: mode index (as a decimal string key, TOML
/// tables key on strings) to `[cos coefficient, sin coefficient]`.
pub type ModeMap = BTreeMap<String, [f64; 2]>;

/// Boundary sections of the config file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundarySection {
    /// Data on the `s = -l` circle of a neck.
    #[serde(default)]
    pub minus: ModeMap,
    /// Data on the `s = +l` circle of a neck.
    #[serde(default)]
    pub plus: ModeMap,
    /// Data on the unit circle for disk solves.
    #[serde(default)]
    pub disk: ModeMap,
}

/// The config file: every field optional, command-line flags take
/// precedence. Unknown keys are rejected so typos fail loudly.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub tau: Option<f64>,
    pub tau_list: Option<Vec<f64>>,
    pub delta: Option<f64>,
    pub gamma: Option<f64>,
    pub n_x: Option<usize>,
    pub n_s: Option<usize>,
    pub n_r: Option<usize>,
    pub n_theta: Option<usize>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub dtau_frac: Option<f64>,
    pub lmin: Option<f64>,
    pub lmax: Option<f64>,
    pub steps: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub lower_modes_allowed: Option<bool>,
    #[serde(default)]
    pub boundary: BoundarySection,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, ConfigError> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| ConfigError(format!("config {}: {e}", path.display())))
    }
}

/// One angular Fourier mode of a boundary circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeCoeff {
    pub k: i64,
    /// Coefficient of `cos(k x)`.
    pub cos: f64,
    /// Coefficient of `sin(k x)`.
    pub sin: f64,
}

/// Evaluate a coefficient list at angle `x`.
pub fn synthesize(coeffs: &[ModeCoeff], x: f64) -> f64 {
    coeffs
        .iter()
        .map(|c| {
            let (s, co) = (c.k as f64 * x).sin_cos();
            c.cos * co + c.sin * s
        })
        .sum()
}

/// Parse one `k:a:b` flag occurrence (sin coefficient optional: `k:a`).
pub fn parse_mode_flag(raw: &str) -> Result<(String, [f64; 2]), ConfigError> {
    let parts: Vec<&str> = raw.split(':').collect();
    if parts.len() != 2 && parts.len() != 3 {
        return config_err(format!(
            "mode flag '{raw}' must look like k:cos_coefficient[:sin_coefficient]"
        ));
    }
    let k: i64 = parts[0].trim().parse().map_err(|_| {
        ConfigError(format!(
            "mode flag '{raw}': '{}' is not an integer",
            parts[0]
        ))
    })?;
    let parse_f = |s: &str| -> Result<f64, ConfigError> {
        s.trim()
            .parse()
            .map_err(|_| ConfigError(format!("mode flag '{raw}': '{s}' is not a number")))
    };
    let a = parse_f(parts[1])?;
    let b = if parts.len() == 3 {
        parse_f(parts[2])?
    } else {
        0.0
    };
    Ok((k.to_string(), [a, b]))
}

/// Fold repeated mode flags into a map; a non-empty flag list replaces the
/// config-file map for that circle entirely.
pub fn merge_mode_map(config_map: &ModeMap, flags: &[String]) -> Result<ModeMap, ConfigError> {
    if flags.is_empty() {
        return Ok(config_map.clone());
    }
    let mut map = ModeMap::new();
    for raw in flags {
        let (k, c) = parse_mode_flag(raw)?;
        if map.insert(k.clone(), c).is_some() {
            return config_err(format!("mode {k} given more than once"));
        }
    }
    Ok(map)
}

/// Validate a mode map against the angular grid and the lower-mode policy.
///
/// Rules: keys must be non-negative integers (the cos/sin convention covers
/// both signs of `k`); `k >= n_x/2` cannot be represented on `n_x` angular
/// nodes and is rejected; `k <= 1` is rejected unless `lower_allowed`, in
/// which case the entry is dropped and a warning recorded.
pub fn validate_modes(
    map: &ModeMap,
    n_x: usize,
    lower_allowed: bool,
    label: &str,
    warnings: &mut Vec<String>,
) -> Result<Vec<ModeCoeff>, ConfigError> {
    let mut out = Vec::new();
    for (key, &[a, b]) in map {
        let k: i64 = match key.trim().parse() {
            Ok(k) => k,
            Err(_) => {
                return config_err(format!(
                    "boundary.{label}: mode key '{key}' is not an integer"
                ))
            }
        };
        if k < 0 {
            return config_err(format!(
                "boundary.{label}: mode {k} is negative; use the cos/sin convention \
                 (mode k covers both signs)"
            ));
        }
        if k as usize >= n_x / 2 {
            return config_err(format!(
                "boundary.{label}: mode {k} is not resolvable on {n_x} angular nodes \
                 (need k < n_x/2)"
            ));
        }
        if k <= 1 {
            if !lower_allowed {
                return config_err(format!(
                    "boundary.{label}: mode {k} lies in the reserved lower modes |k| <= 1; \
                     pass --lower-modes-allowed to drop it"
                ));
            }
            warnings.push(format!(
                "boundary.{label}: dropped lower mode {k} (coefficients [{a}, {b}]); \
                 the normalized problem carries no lower-mode boundary data"
            ));
            continue;
        }
        if a != 0.0 || b != 0.0 {
            out.push(ModeCoeff { k, cos: a, sin: b });
        }
    }
    Ok(out)
}

/// Echo a coefficient list into a JSON value for the report.
pub fn modes_json(coeffs: &[ModeCoeff]) -> serde_json::Value {
    serde_json::Value::Array(
        coeffs
            .iter()
            .map(|c| serde_json::json!({ "k": c.k, "cos": c.cos, "sin": c.sin }))
            .collect(),
    )
}
