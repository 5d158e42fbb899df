//! Run configuration: a JSON file merged under explicit flags, then resolved
//! into validated per-command parameters.

use std::path::PathBuf;

use kappa_core::field::{FieldOptions, Grid1d, GridSpec, Interpolation};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::parse::{parse_mu, parse_mu_list, parse_rational, parse_z_line, to_f64, ZLine};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Invalid(String),
}

impl From<crate::parse::ParseError> for ConfigError {
    fn from(e: crate::parse::ParseError) -> Self {
        ConfigError::Invalid(e.0)
    }
}

impl From<kappa_core::Error> for ConfigError {
    fn from(e: kappa_core::Error) -> Self {
        ConfigError::Invalid(e.to_string())
    }
}

/// A number given either as JSON number or as text (`"3/10"`, `"-3lambda"`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Number(f64),
    Text(String),
}

impl Scalar {
    fn text(&self) -> String {
        match self {
            Scalar::Number(x) => format!("{x}"),
            Scalar::Text(s) => s.clone(),
        }
    }
}

/// Every field any command reads. Absent fields fall back to per-command defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub n: Option<usize>,
    pub lambda: Option<Scalar>,
    pub mu: Option<Scalar>,
    pub t: Option<f64>,
    pub omega: Option<f64>,
    pub line: Option<String>,
    pub tol: Option<f64>,
    pub d: Option<u32>,
    pub mu_scan: Option<Vec<Scalar>>,
    pub n0: Option<usize>,
    pub ns: Option<usize>,
    pub x0_half_width: Option<f64>,
    pub spatial_half_width: Option<f64>,
    pub interpolation: Option<String>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($f:ident),*) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f; } )*
    };
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// Fields set in `top` win.
    pub fn merged_under(mut self, top: RunConfig) -> Self {
        overlay!(self, top; n, lambda, mu, t, omega, line, tol, d, mu_scan, n0, ns,
            x0_half_width, spatial_half_width, interpolation, seed, out);
        self
    }

    pub fn n_or(&self, default: usize) -> Result<usize, ConfigError> {
        let n = self.n.unwrap_or(default);
        if !(2..=8).contains(&n) {
            return Err(ConfigError::Invalid(format!("n must be in 2..=8, got {n}")));
        }
        Ok(n)
    }

    /// λ as an exact rational (decimal literals are read exactly).
    pub fn lambda_exact_or(&self, default: &str) -> Result<BigRational, ConfigError> {
        let text = self.lambda.as_ref().map_or(default.to_string(), Scalar::text);
        let l = parse_rational(&text)?;
        if l < BigRational::from_integer(0.into()) {
            return Err(ConfigError::Invalid(format!("lambda must be non-negative, got {text}")));
        }
        Ok(l)
    }

    pub fn lambda_or(&self, default: &str) -> Result<f64, ConfigError> {
        Ok(to_f64(&self.lambda_exact_or(default)?))
    }

    pub fn positive_lambda_or(&self, default: &str) -> Result<f64, ConfigError> {
        let l = self.lambda_or(default)?;
        if !(l > 0.0) {
            return Err(ConfigError::Invalid(format!("lambda must be positive here, got {l}")));
        }
        Ok(l)
    }

    pub fn mu_exact_or(&self, default: &str, lambda: &BigRational) -> Result<BigRational, ConfigError> {
        let text = self.mu.as_ref().map_or(default.to_string(), Scalar::text);
        Ok(parse_mu(&text, lambda)?)
    }

    pub fn mu_or(&self, default: &str, lambda: &BigRational) -> Result<f64, ConfigError> {
        Ok(to_f64(&self.mu_exact_or(default, lambda)?))
    }

    pub fn mu_scan_exact(&self, lambda: &BigRational) -> Result<Option<Vec<BigRational>>, ConfigError> {
        let Some(list) = &self.mu_scan else {
            return Ok(None);
        };
        let joined: Vec<String> = list.iter().map(Scalar::text).collect();
        Ok(Some(parse_mu_list(&joined.join(","), lambda)?))
    }

    pub fn line_or(&self, default: &str) -> Result<ZLine, ConfigError> {
        Ok(parse_z_line(self.line.as_deref().unwrap_or(default))?)
    }

    pub fn tol_or(&self, default: f64) -> Result<f64, ConfigError> {
        let tol = self.tol.unwrap_or(default);
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(ConfigError::Invalid(format!("tol must be positive, got {tol}")));
        }
        Ok(tol)
    }

    pub fn t_or(&self, default: f64) -> Result<f64, ConfigError> {
        let t = self.t.unwrap_or(default);
        if !t.is_finite() {
            return Err(ConfigError::Invalid("t must be finite".into()));
        }
        Ok(t)
    }

    pub fn d_or(&self, default: u32) -> Result<u32, ConfigError> {
        let d = self.d.unwrap_or(default);
        if d > 12 {
            return Err(ConfigError::Invalid(format!("degree bound {d} is above the supported 12")));
        }
        Ok(d)
    }

    /// Grids default to the standard n = 2 layout and a smaller cube for n ≥ 3.
    pub fn grid(&self, n: usize) -> Result<GridSpec, ConfigError> {
        let (n0, h0, ns, hs) = if n == 2 { (256, 20.0, 128, 20.0) } else { (128, 20.0, 64, 20.0) };
        let n0 = self.n0.unwrap_or(n0);
        let ns = self.ns.unwrap_or(ns);
        let h0 = self.x0_half_width.unwrap_or(h0);
        let hs = self.spatial_half_width.unwrap_or(hs);
        if n0 > 1 << 14 || ns > 1 << 12 {
            return Err(ConfigError::Invalid("grid too large".into()));
        }
        let cells = (ns as f64).powi(n as i32 - 1) * n0 as f64;
        if cells > 5e7 {
            return Err(ConfigError::Invalid(format!("grid with {cells:e} points is too large")));
        }
        for h in [h0, hs] {
            if !(h > 0.0 && h.is_finite()) {
                return Err(ConfigError::Invalid(format!("half width must be positive, got {h}")));
            }
        }
        Ok(GridSpec {
            x0: Grid1d::centered(n0, h0),
            spatial: Grid1d::centered(ns, hs),
        })
    }

    pub fn field_options(&self) -> Result<FieldOptions, ConfigError> {
        let interpolation = match self.interpolation.as_deref() {
            None | Some("spectral") => Interpolation::Spectral,
            Some(s) => match s.strip_prefix("lagrange:").map(str::parse::<usize>) {
                Some(Ok(k)) if (2..=32).contains(&k) => Interpolation::Lagrange(k),
                _ => {
                    return Err(ConfigError::Invalid(format!(
                        "interpolation must be 'spectral' or 'lagrange:K' with 2 <= K <= 32, got '{s}'"
                    )))
                }
            },
        };
        Ok(FieldOptions {
            interpolation,
            ..FieldOptions::default()
        })
    }
}
