//! Run configuration: a single JSON tree with polynomials written as
//! monomial-coefficient maps.
//!
//! Monomial keys are space-separated factors `z<i>` / `zb<i>` with optional
//! `^<power>`, e.g. `"z1^2 zb2"`; the empty product is written `"1"`.
//! Coefficients are `[re, im]` pairs. Unknown configuration keys are
//! rejected, and parse errors carry the path to the offending field.

use jdisc::geometry::{ComplexMatrixField, GeometryError, WedgeSpec};
use jdisc::poly::{C64, CPoly, Monomial, PolyMatrix};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error at {path}: {message}")]
    Parse { path: String, message: String },
    #[error("invalid monomial key {key:?}: {reason}")]
    Monomial { key: String, reason: String },
    #[error("structure entries must form an n×n matrix (dim = {dim})")]
    EntryShape { dim: usize },
    #[error("wedge has {got} defining functions, expected {expected}")]
    WedgeShape { got: usize, expected: usize },
    #[error("solver parameter vectors must have length {expected}")]
    ParamShape { expected: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// A polynomial as serialized in config files.
pub type PolyJson = BTreeMap<String, [f64; 2]>;

/// Parse one monomial key like `"z1^2 zb2"`; `"1"` is the empty product.
pub fn parse_monomial(key: &str, dim_n: usize) -> Result<Monomial, ConfigError> {
    let mut m = Monomial::unit(dim_n);
    let trimmed = key.trim();
    if trimmed == "1" || trimmed.is_empty() {
        return Ok(m);
    }
    for token in trimmed.split_whitespace() {
        let (name, pow) = match token.split_once('^') {
            Some((n, p)) => {
                let pow: u32 = p.parse().map_err(|_| ConfigError::Monomial {
                    key: key.into(),
                    reason: format!("bad exponent {p:?}"),
                })?;
                (n, pow)
            }
            None => (token, 1),
        };
        if pow == 0 || pow > 64 {
            return Err(ConfigError::Monomial {
                key: key.into(),
                reason: format!("exponent {pow} out of range 1..=64"),
            });
        }
        let (conjugate, idx_str) = if let Some(rest) = name.strip_prefix("zb") {
            (true, rest)
        } else if let Some(rest) = name.strip_prefix('z') {
            (false, rest)
        } else {
            return Err(ConfigError::Monomial {
                key: key.into(),
                reason: format!("factor {name:?} must start with z or zb"),
            });
        };
        let idx: usize = idx_str.parse().map_err(|_| ConfigError::Monomial {
            key: key.into(),
            reason: format!("bad variable index in {name:?}"),
        })?;
        if idx == 0 || idx > dim_n {
            return Err(ConfigError::Monomial {
                key: key.into(),
                reason: format!("variable index {idx} out of range 1..={dim_n}"),
            });
        }
        let slot = if conjugate {
            &mut m.zb[idx - 1]
        } else {
            &mut m.z[idx - 1]
        };
        *slot = slot.checked_add(pow as u8).ok_or(ConfigError::Monomial {
            key: key.into(),
            reason: "exponent overflow".into(),
        })?;
    }
    Ok(m)
}

pub fn poly_from_json(map: &PolyJson, dim_n: usize) -> Result<CPoly, ConfigError> {
    let mut p = CPoly::zero(dim_n);
    for (key, &[re, im]) in map {
        if !re.is_finite() || !im.is_finite() {
            return Err(ConfigError::Monomial {
                key: key.clone(),
                reason: "non-finite coefficient".into(),
            });
        }
        let m = parse_monomial(key, dim_n)?;
        p.add_term(m, C64::new(re, im));
    }
    Ok(p)
}

pub fn poly_to_json(p: &CPoly) -> PolyJson {
    p.terms()
        .map(|(m, c)| (m.to_string(), [c.re, c.im]))
        .collect()
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct StructureConfig {
    pub dim: usize,
    #[serde(default = "default_domain_radius")]
    pub domain_radius: f64,
    #[serde(default)]
    pub normalized: bool,
    /// Row-major n×n entries.
    pub entries: Vec<Vec<PolyJson>>,
}

fn default_domain_radius() -> f64 {
    1.0
}

impl StructureConfig {
    pub fn to_field(&self) -> Result<ComplexMatrixField, ConfigError> {
        let n = self.dim;
        if self.entries.len() != n || self.entries.iter().any(|row| row.len() != n) {
            return Err(ConfigError::EntryShape { dim: n });
        }
        let mut entries = Vec::with_capacity(n * n);
        for row in &self.entries {
            for e in row {
                entries.push(poly_from_json(e, n)?);
            }
        }
        Ok(ComplexMatrixField::new(
            n,
            PolyMatrix::from_entries(n, n, entries),
            self.domain_radius,
            self.normalized,
        )?)
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct WedgeConfig {
    pub rho: Vec<PolyJson>,
    #[serde(default)]
    pub tau: f64,
    #[serde(default)]
    pub big_c: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
}

fn default_delta() -> f64 {
    0.3
}

impl WedgeConfig {
    pub fn to_wedge(&self, dim_n: usize) -> Result<WedgeSpec, ConfigError> {
        if self.rho.len() != dim_n {
            return Err(ConfigError::WedgeShape {
                got: self.rho.len(),
                expected: dim_n,
            });
        }
        let rho = self
            .rho
            .iter()
            .map(|p| poly_from_json(p, dim_n))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(WedgeSpec::new(
            dim_n,
            rho,
            self.tau,
            self.big_c,
            self.delta,
        )?)
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default = "default_damping")]
    pub damping: f64,
    #[serde(default = "default_lambda_threshold")]
    pub lambda_threshold: f64,
    /// Disc parameters for `solve-disc` and `uniqueness-demo`.
    #[serde(default)]
    pub c: Vec<f64>,
    #[serde(default)]
    pub t: Vec<f64>,
}

fn default_tol() -> f64 {
    1e-11
}
fn default_max_iter() -> usize {
    80
}
fn default_lambda() -> f64 {
    0.05
}
fn default_damping() -> f64 {
    1.0
}
fn default_lambda_threshold() -> f64 {
    0.1
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: default_tol(),
            max_iter: default_max_iter(),
            lambda: default_lambda(),
            damping: default_damping(),
            lambda_threshold: default_lambda_threshold(),
            c: Vec::new(),
            t: Vec::new(),
        }
    }
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_n_r")]
    pub n_r: usize,
    #[serde(default = "default_n_theta")]
    pub n_theta: usize,
}

fn default_n_r() -> usize {
    32
}
fn default_n_theta() -> usize {
    128
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            n_r: default_n_r(),
            n_theta: default_n_theta(),
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub c_range: [f64; 2],
    pub t_range: [f64; 2],
    pub c_count: usize,
    pub t_count: usize,
    #[serde(default)]
    pub dump_discs: bool,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CoverConfig {
    #[serde(default = "default_sample_count")]
    pub sample_count: usize,
    #[serde(default = "default_scale")]
    pub scale: f64,
}

fn default_sample_count() -> usize {
    100
}
fn default_scale() -> f64 {
    0.1
}

impl Default for CoverConfig {
    fn default() -> Self {
        CoverConfig {
            sample_count: default_sample_count(),
            scale: default_scale(),
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PshConfig {
    /// Scalar field to certify or compose, as a polynomial.
    pub u: PolyJson,
    #[serde(default = "default_psh_radius")]
    pub radius: f64,
    #[serde(default = "default_psh_samples")]
    pub samples: usize,
    /// Dilation applied to the structure before certification (1 = none).
    #[serde(default = "default_psh_lambda")]
    pub lambda: f64,
    /// Also cross-check the form and disc Levi definitions.
    #[serde(default)]
    pub cross_check: bool,
    #[serde(default = "default_m_levels")]
    pub m_levels: Vec<f64>,
}

fn default_psh_radius() -> f64 {
    0.05
}
fn default_psh_samples() -> usize {
    20
}
fn default_psh_lambda() -> f64 {
    1.0
}
fn default_m_levels() -> Vec<f64> {
    vec![10.0, 100.0, 1000.0]
}

/// The whole run configuration.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub structure: StructureConfig,
    #[serde(default)]
    pub wedge: Option<WedgeConfig>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub cover: CoverConfig,
    #[serde(default)]
    pub psh: Option<PshConfig>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_out_dir")]
    pub out_dir: String,
}

fn default_seed() -> u64 {
    42
}
fn default_out_dir() -> String {
    "out".into()
}

impl RunConfig {
    pub fn from_json_str(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| ConfigError::Parse {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    /// Disc parameters from the solver section, defaulting to the stock
    /// `c = 0`, `t = 1` per dimension.
    pub fn disc_params(&self) -> Result<jdisc::bishop::DiscFamilyParams, ConfigError> {
        let n = self.structure.dim;
        let c = if self.solver.c.is_empty() {
            vec![0.0; n]
        } else {
            self.solver.c.clone()
        };
        let t = if self.solver.t.is_empty() {
            vec![1.0; n]
        } else {
            self.solver.t.clone()
        };
        if c.len() != n || t.len() != n {
            return Err(ConfigError::ParamShape { expected: n });
        }
        if t.iter().any(|&v| v < 0.0) {
            return Err(ConfigError::ParamShape { expected: n });
        }
        Ok(jdisc::bishop::DiscFamilyParams::new(c, t, self.solver.lambda))
    }

    pub fn solve_options(&self) -> jdisc::bishop::SolveOptions {
        jdisc::bishop::SolveOptions {
            tol: self.solver.tol,
            max_iter: self.solver.max_iter,
            damping: self.solver.damping,
            lambda_threshold: self.solver.lambda_threshold,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_round_trip() {
        let m = parse_monomial("z1^2 zb2", 2).unwrap();
        assert_eq!(m.to_string(), "z1^2 zb2");
        assert_eq!(parse_monomial("1", 3).unwrap().to_string(), "1");
        // repeated factors merge
        let m = parse_monomial("z1 z1", 1).unwrap();
        assert_eq!(m.to_string(), "z1^2");
    }

    #[test]
    fn monomial_rejects_garbage() {
        assert!(parse_monomial("w1", 2).is_err());
        assert!(parse_monomial("z0", 2).is_err());
        assert!(parse_monomial("z3", 2).is_err());
        assert!(parse_monomial("z1^0", 2).is_err());
        assert!(parse_monomial("z1^x", 2).is_err());
        assert!(parse_monomial("zb", 2).is_err());
    }

    #[test]
    fn config_parses_and_reports_paths() {
        let text = r#"{
            "structure": { "dim": 1, "domain_radius": 4.0, "normalized": true,
                           "entries": [[ {"zb1": [1.0, 0.0]} ]] },
            "seed": 7
        }"#;
        let cfg = RunConfig::from_json_str(text).unwrap();
        assert_eq!(cfg.seed, 7);
        let field = cfg.structure.to_field().unwrap();
        assert_eq!(field.dim_n(), 1);

        // unknown keys are rejected with a path
        let bad = r#"{ "structure": { "dim": 1, "entries": [[{}]], "bogus": 3 } }"#;
        match RunConfig::from_json_str(bad) {
            Err(ConfigError::Parse { path, .. }) => assert!(path.contains("structure")),
            other => panic!("expected parse error, got {:?}", other),
        }
    }

    #[test]
    fn poly_json_round_trip() {
        let mut map = PolyJson::new();
        map.insert("z1 zb1".into(), [1.0, 0.0]);
        map.insert("1".into(), [0.5, -0.25]);
        let p = poly_from_json(&map, 1).unwrap();
        let back = poly_to_json(&p);
        assert_eq!(map, back);
    }
}
