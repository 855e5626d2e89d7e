//! Flat JSON run configuration.
//!
//! Every key is optional; absent keys take the values of the published
//! experiments. Unknown keys and ill-typed values are rejected with the key
//! named in the error.

use std::path::Path;

use num_complex::Complex64;
use serde_json::{Map, Value};
use thiserror::Error;

use expburgers::exact::DEFAULT_TERM_CAP;
use expburgers::experiments::Band;
use expburgers::solver::InitialCondition;
use expburgers::{
    DissipationSymbol, Grid, ProductMethod, SolverConfig64, SymbolFamily, DEFAULT_PRECISION_BITS,
};

pub const KEYS: [&str; 19] = [
    "family",
    "mu",
    "sigma",
    "k_d",
    "alpha",
    "n_collocation",
    "dealias",
    "dt",
    "t_end",
    "initial_condition",
    "amplitude_re",
    "amplitude_im",
    "product",
    "precision_bits",
    "check_precision_bits",
    "term_cap",
    "k_exact_max",
    "report_k_min",
    "report_k_max",
];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("config is not a JSON object: {0}")]
    Syntax(String),
    #[error("config key `{key}`: {reason}")]
    Key { key: String, reason: String },
}

impl ConfigError {
    pub fn key(key: &str, reason: impl Into<String>) -> Self {
        ConfigError::Key {
            key: key.to_string(),
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialKind {
    MinusSine,
    SingleComplexMode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub family: Option<SymbolFamily>,
    pub mu: f64,
    pub sigma: Option<f64>,
    pub k_d: Option<f64>,
    pub alpha: f64,
    pub n_collocation: usize,
    pub dealias: (u32, u32),
    pub dt: f64,
    pub t_end: f64,
    pub initial_condition: InitialKind,
    pub amplitude: Complex64,
    pub product: ProductMethod,
    pub precision_bits: u32,
    pub check_precision_bits: u32,
    pub term_cap: usize,
    pub k_exact_max: usize,
    pub report_k_min: i64,
    pub report_k_max: Option<i64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            family: None,
            mu: 1.0,
            sigma: None,
            k_d: None,
            alpha: 1.0,
            n_collocation: 64,
            dealias: (2, 3),
            dt: 1e-3,
            t_end: 1.0,
            initial_condition: InitialKind::MinusSine,
            amplitude: Complex64::new(0.0, 1.0),
            product: ProductMethod::Padded,
            precision_bits: DEFAULT_PRECISION_BITS,
            check_precision_bits: 384,
            term_cap: DEFAULT_TERM_CAP,
            k_exact_max: 24,
            report_k_min: 1,
            report_k_max: None,
        }
    }
}

fn number(key: &str, v: &Value) -> Result<f64, ConfigError> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| ConfigError::key(key, format!("expected a finite number, got {v}")))
}

fn positive(key: &str, v: &Value) -> Result<f64, ConfigError> {
    let x = number(key, v)?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err(ConfigError::key(key, format!("must be positive, got {x}")))
    }
}

fn integer(key: &str, v: &Value) -> Result<u64, ConfigError> {
    v.as_u64()
        .ok_or_else(|| ConfigError::key(key, format!("expected a nonnegative integer, got {v}")))
}

fn text<'a>(key: &str, v: &'a Value) -> Result<&'a str, ConfigError> {
    v.as_str()
        .ok_or_else(|| ConfigError::key(key, format!("expected a string, got {v}")))
}

fn bits(key: &str, v: &Value) -> Result<u32, ConfigError> {
    let b = integer(key, v)?;
    if (16..=1 << 20).contains(&b) {
        Ok(b as u32)
    } else {
        Err(ConfigError::key(key, format!("precision must be 16..=1048576 bits, got {b}")))
    }
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let value: Value = serde_json::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
        let Value::Object(map) = value else {
            return Err(ConfigError::Syntax("top level must be an object".into()));
        };
        Self::from_map(&map)
    }

    pub fn from_map(map: &Map<String, Value>) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        for (key, v) in map {
            let key = key.as_str();
            match key {
                "family" => {
                    let name = text(key, v)?;
                    cfg.family = Some(SymbolFamily::parse(name).ok_or_else(|| {
                        ConfigError::key(
                            key,
                            format!("unknown family `{name}` (exponential, cosh, stretched_exponential, power_laplacian)"),
                        )
                    })?);
                }
                "mu" => cfg.mu = positive(key, v)?,
                "sigma" => cfg.sigma = Some(positive(key, v)?),
                "k_d" => cfg.k_d = Some(positive(key, v)?),
                "alpha" => cfg.alpha = positive(key, v)?,
                "n_collocation" => cfg.n_collocation = integer(key, v)? as usize,
                "dealias" => cfg.dealias = parse_fraction(key, text(key, v)?)?,
                "dt" => cfg.dt = positive(key, v)?,
                "t_end" => cfg.t_end = positive(key, v)?,
                "initial_condition" => {
                    cfg.initial_condition = match text(key, v)? {
                        "minus_sine" => InitialKind::MinusSine,
                        "single_complex_mode" => InitialKind::SingleComplexMode,
                        other => {
                            return Err(ConfigError::key(
                                key,
                                format!("unknown initial condition `{other}` (minus_sine, single_complex_mode)"),
                            ))
                        }
                    }
                }
                "amplitude_re" => cfg.amplitude.re = number(key, v)?,
                "amplitude_im" => cfg.amplitude.im = number(key, v)?,
                "product" => {
                    cfg.product = match text(key, v)? {
                        "padded" => ProductMethod::Padded,
                        "direct" => ProductMethod::Direct,
                        other => {
                            return Err(ConfigError::key(key, format!("unknown product `{other}` (padded, direct)")))
                        }
                    }
                }
                "precision_bits" => cfg.precision_bits = bits(key, v)?,
                "check_precision_bits" => cfg.check_precision_bits = bits(key, v)?,
                "term_cap" => cfg.term_cap = integer(key, v)? as usize,
                "k_exact_max" => {
                    let k = integer(key, v)?;
                    if k == 0 {
                        return Err(ConfigError::key(key, "must be at least 1"));
                    }
                    cfg.k_exact_max = k as usize;
                }
                "report_k_min" => cfg.report_k_min = integer(key, v)?.max(1) as i64,
                "report_k_max" => {
                    cfg.report_k_max = match v {
                        Value::Null => None,
                        _ => Some(integer(key, v)? as i64),
                    }
                }
                _ => {
                    return Err(ConfigError::key(
                        key,
                        format!("unknown key (expected one of {})", KEYS.join(", ")),
                    ))
                }
            }
        }
        cfg.grid()?;
        cfg.scale()?;
        if cfg.check_precision_bits <= cfg.precision_bits {
            return Err(ConfigError::key(
                "check_precision_bits",
                format!("must exceed precision_bits = {}", cfg.precision_bits),
            ));
        }
        Ok(cfg)
    }

    pub fn grid(&self) -> Result<Grid, ConfigError> {
        Grid::with_dealias(self.n_collocation, self.dealias.0, self.dealias.1).map_err(|e| {
            let key = match e {
                expburgers::spectral::SpectralError::BadDealiasFraction { .. } => "dealias",
                _ => "n_collocation",
            };
            ConfigError::key(key, e.to_string())
        })
    }

    fn scale(&self) -> Result<f64, ConfigError> {
        DissipationSymbol::resolve_scale(self.sigma, self.k_d).map_err(|e| symbol_error(&e))
    }

    /// Dissipation symbol, with `default_family` standing in for an absent
    /// `family` key.
    pub fn symbol(&self, default_family: SymbolFamily) -> Result<DissipationSymbol, ConfigError> {
        let family = self.family.unwrap_or(default_family);
        let sigma = self.scale()?;
        DissipationSymbol::new(family, self.mu, sigma, self.alpha).map_err(|e| symbol_error(&e))
    }

    pub fn band(&self) -> Band {
        Band {
            k_min: self.report_k_min,
            k_max: self.report_k_max,
        }
    }

    pub fn solver(&self, default_family: SymbolFamily) -> Result<SolverConfig64, ConfigError> {
        let mut cfg = SolverConfig64::new(self.grid()?, self.symbol(default_family)?);
        cfg.dt = self.dt;
        cfg.t_end = self.t_end;
        cfg.product = self.product;
        cfg.initial_condition = match self.initial_condition {
            InitialKind::MinusSine => InitialCondition::MinusSine,
            InitialKind::SingleComplexMode => InitialCondition::SingleComplexMode(self.amplitude),
        };
        cfg.n_steps().map_err(|e| {
            let key = match e {
                expburgers::solver::SolverError::BadTimeStep(_) => "dt",
                _ => "t_end",
            };
            ConfigError::key(key, e.to_string())
        })?;
        Ok(cfg)
    }
}

fn symbol_error(e: &expburgers::dissipation::DissipationError) -> ConfigError {
    use expburgers::dissipation::DissipationError as E;
    let key = match e {
        E::NonPositive { name, .. } => name,
        E::InconsistentScale { .. } => "k_d",
        E::ZeroRate { .. } => "family",
    };
    ConfigError::key(key, e.to_string())
}

fn parse_fraction(key: &str, s: &str) -> Result<(u32, u32), ConfigError> {
    let bad = || ConfigError::key(key, format!("expected a fraction such as \"2/3\", got `{s}`"));
    let (num, den) = s.split_once('/').ok_or_else(bad)?;
    let num = num.trim().parse().map_err(|_| bad())?;
    let den = den.trim().parse().map_err(|_| bad())?;
    Ok((num, den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_gives_defaults() {
        assert_eq!(RunConfig::from_json("{}").unwrap(), RunConfig::default());
    }

    #[test]
    fn errors_name_the_key() {
        for (json, key) in [
            (r#"{"mu": -1}"#, "mu"),
            (r#"{"dt": "small"}"#, "dt"),
            (r#"{"colour": 1}"#, "colour"),
            (r#"{"family": "gaussian"}"#, "family"),
            (r#"{"n_collocation": 7}"#, "n_collocation"),
            (r#"{"dealias": "3/2"}"#, "dealias"),
            (r#"{"sigma": 0.5, "k_d": 2}"#, "k_d"),
            (r#"{"precision_bits": 512}"#, "check_precision_bits"),
        ] {
            match RunConfig::from_json(json) {
                Err(ConfigError::Key { key: got, .. }) => assert_eq!(got, key, "{json}"),
                other => panic!("{json}: {other:?}"),
            }
        }
    }

    #[test]
    fn fractional_step_count_names_dt_or_t_end() {
        let cfg = RunConfig::from_json(r#"{"dt": 0.3}"#).unwrap();
        match cfg.solver(SymbolFamily::Cosh) {
            Err(ConfigError::Key { key, .. }) => assert_eq!(key, "t_end"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn scale_accepts_either_parameter() {
        let cfg = RunConfig::from_json(r#"{"family": "exponential", "k_d": 2}"#).unwrap();
        let sym = cfg.symbol(SymbolFamily::Cosh).unwrap();
        assert_eq!(sym.family, SymbolFamily::Exponential);
        assert_eq!(sym.sigma, 0.25);
    }
}
