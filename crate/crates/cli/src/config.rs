//! INI-style run configuration: `key = value` lines, `[section]` headers that
//! prefix keys with `section.`, `#` comments (and `;` at line start) and
//! comma-separated lists.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("key `{key}`: {message}")]
    Key { key: String, message: String },
    #[error("validation failed: {0}")]
    Validation(String),
}

pub type ConfigResult<T> = Result<T, ConfigError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    Error,
    Diff,
    SupError,
    Hist,
    Occupation,
    CheckTransform,
    CheckGeometry,
}

impl Experiment {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "error" => Self::Error,
            "diff" => Self::Diff,
            "sup-error" => Self::SupError,
            "hist" => Self::Hist,
            "occupation" => Self::Occupation,
            "check-transform" => Self::CheckTransform,
            "check-geometry" => Self::CheckGeometry,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Error => "error",
            Self::Diff => "diff",
            Self::SupError => "sup-error",
            Self::Hist => "hist",
            Self::Occupation => "occupation",
            Self::CheckTransform => "check-transform",
            Self::CheckGeometry => "check-geometry",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchemeKind {
    Em,
    EmTransformed,
}

impl SchemeKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Em => "em",
            Self::EmTransformed => "em-transformed",
        }
    }
}

/// Surface of a `custom` model.
#[derive(Clone, Debug, PartialEq)]
pub enum SurfaceSpec {
    Sphere { center: Vec<f64>, radius: f64 },
    Hyperplane { base: Vec<f64>, normal: Vec<f64> },
    Points1d { points: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    pub name: String,
    pub a: f64,
    pub b: f64,
    pub x0: Option<Vec<f64>>,
    pub scale: f64,
    pub mu: f64,
    pub sigma: f64,
    pub noise: f64,
    pub pieces: Vec<Vec<f64>>,
    pub surface: Option<SurfaceSpec>,
}

impl Default for ModelSpec {
    fn default() -> Self {
        Self {
            name: "example1".into(),
            a: -3.0,
            b: 1.0,
            x0: None,
            scale: 1.0,
            mu: 0.05,
            sigma: 0.2,
            noise: 1.0,
            pieces: Vec::new(),
            surface: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub model: ModelSpec,
    pub experiment: Experiment,
    pub scheme: SchemeKind,
    pub p_list: Vec<f64>,
    pub n_list: Vec<usize>,
    pub big_n: usize,
    pub m: usize,
    pub seed: u64,
    pub threads: usize,
    pub out_dir: PathBuf,
    pub exponent: f64,
    pub eps_list: Vec<f64>,
    pub samples: usize,
    pub transform_eps: Option<f64>,
    pub newton_tol: f64,
    pub fd_step: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: ModelSpec::default(),
            experiment: Experiment::Error,
            scheme: SchemeKind::Em,
            p_list: vec![1.0, 2.0, 4.0, 8.0],
            n_list: (6..=12).map(|k| 1usize << k).collect(),
            big_n: 1 << 14,
            m: 5000,
            seed: 1,
            threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
            out_dir: PathBuf::from("out"),
            exponent: 0.45,
            eps_list: vec![0.01, 0.05, 0.1, 0.2],
            samples: 10_000,
            transform_eps: None,
            newton_tol: 1e-12,
            fd_step: 1e-5,
        }
    }
}

/// Raw `key -> (value, line)` map; later assignments win.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, (String, usize)>,
}

impl RawConfig {
    pub fn parse(text: &str) -> ConfigResult<Self> {
        let mut entries = BTreeMap::new();
        let mut section = String::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() || body.starts_with(';') {
                continue;
            }
            if let Some(rest) = body.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| ConfigError::Parse {
                    line,
                    message: format!("unterminated section header `{body}`"),
                })?;
                section = name.trim().to_string();
                if section.is_empty() || section.contains(char::is_whitespace) {
                    return Err(ConfigError::Parse {
                        line,
                        message: format!("invalid section name `{name}`"),
                    });
                }
                continue;
            }
            let (key, value) = body.split_once('=').ok_or_else(|| ConfigError::Parse {
                line,
                message: format!("expected `key = value`, found `{body}`"),
            })?;
            let key = key.trim();
            if key.is_empty() {
                return Err(ConfigError::Parse {
                    line,
                    message: "empty key".into(),
                });
            }
            let full = match (section.as_str(), key) {
                ("", k) => k.to_string(),
                ("model", "name") => "model".to_string(),
                (s, k) => format!("{s}.{k}"),
            };
            entries.insert(full, (value.trim().to_string(), line));
        }
        Ok(Self { entries })
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.entries.insert(key.to_string(), (value.into(), 0));
    }
}

const KNOWN_KEYS: &[&str] = &[
    "model",
    "model.a",
    "model.b",
    "model.x0",
    "model.scale",
    "model.mu",
    "model.sigma",
    "model.noise",
    "model.pieces",
    "surface.kind",
    "surface.center",
    "surface.radius",
    "surface.base",
    "surface.normal",
    "surface.points",
    "experiment",
    "scheme",
    "p",
    "n",
    "N",
    "m",
    "seed",
    "threads",
    "out_dir",
    "exponent",
    "eps_list",
    "samples",
    "transform.eps",
    "transform.newton_tol",
    "transform.fd_step",
];

fn key_error(key: &str, line: usize, message: impl fmt::Display) -> ConfigError {
    if line > 0 {
        ConfigError::Parse {
            line,
            message: format!("key `{key}`: {message}"),
        }
    } else {
        ConfigError::Key {
            key: key.to_string(),
            message: message.to_string(),
        }
    }
}

fn scalar<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> ConfigResult<T>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e| key_error(key, line, format!("cannot parse `{value}`: {e}")))
}

fn list<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> ConfigResult<Vec<T>>
where
    T::Err: fmt::Display,
{
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| scalar(key, s, line))
        .collect()
}

/// Integers may be written as `2^k`.
fn count(key: &str, value: &str, line: usize) -> ConfigResult<usize> {
    match value.split_once('^') {
        Some((base, exp)) => {
            let b: usize = scalar(key, base.trim(), line)?;
            let e: u32 = scalar(key, exp.trim(), line)?;
            b.checked_pow(e).ok_or_else(|| key_error(key, line, "overflow"))
        }
        None => scalar(key, value, line),
    }
}

fn counts(key: &str, value: &str, line: usize) -> ConfigResult<Vec<usize>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| count(key, s, line))
        .collect()
}

impl RunConfig {
    /// Applies `raw` over the defaults and validates the result.
    pub fn from_raw(raw: &RawConfig) -> ConfigResult<Self> {
        let mut c = RunConfig::default();
        for (key, (value, line)) in &raw.entries {
            let (k, v, l) = (key.as_str(), value.as_str(), *line);
            match k {
                "model" => c.model.name = v.to_string(),
                "model.a" => c.model.a = scalar(k, v, l)?,
                "model.b" => c.model.b = scalar(k, v, l)?,
                "model.x0" => c.model.x0 = Some(list(k, v, l)?),
                "model.scale" => c.model.scale = scalar(k, v, l)?,
                "model.mu" => c.model.mu = scalar(k, v, l)?,
                "model.sigma" => c.model.sigma = scalar(k, v, l)?,
                "model.noise" => c.model.noise = scalar(k, v, l)?,
                "model.pieces" => {
                    c.model.pieces = v
                        .split(';')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(|s| list(k, s, l))
                        .collect::<ConfigResult<_>>()?
                }
                "experiment" => {
                    c.experiment =
                        Experiment::parse(v).ok_or_else(|| key_error(k, l, format!("unknown experiment `{v}`")))?
                }
                "scheme" => {
                    c.scheme = match v {
                        "em" => SchemeKind::Em,
                        "em-transformed" => SchemeKind::EmTransformed,
                        _ => return Err(key_error(k, l, format!("unknown scheme `{v}`"))),
                    }
                }
                "p" => c.p_list = list(k, v, l)?,
                "n" => c.n_list = counts(k, v, l)?,
                "N" => c.big_n = count(k, v, l)?,
                "m" => c.m = count(k, v, l)?,
                "seed" => c.seed = scalar(k, v, l)?,
                "threads" => c.threads = scalar(k, v, l)?,
                "out_dir" => c.out_dir = PathBuf::from(v),
                "exponent" => c.exponent = scalar(k, v, l)?,
                "eps_list" => c.eps_list = list(k, v, l)?,
                "samples" => c.samples = count(k, v, l)?,
                "transform.eps" => c.transform_eps = Some(scalar(k, v, l)?),
                "transform.newton_tol" => c.newton_tol = scalar(k, v, l)?,
                "transform.fd_step" => c.fd_step = scalar(k, v, l)?,
                k if k.starts_with("surface.") && KNOWN_KEYS.contains(&k) => {}
                _ => {
                    return Err(key_error(
                        k,
                        l,
                        format!("unknown key; expected one of {}", KNOWN_KEYS.join(", ")),
                    ))
                }
            }
        }
        c.model.surface = surface_spec(raw)?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> ConfigResult<()> {
        let fail = |m: String| Err(ConfigError::Validation(m));
        if self.n_list.is_empty() {
            return fail("n must contain at least one step count".into());
        }
        if let Some(n) = self.n_list.iter().find(|n| **n == 0) {
            return fail(format!("n must be positive (found {n})"));
        }
        if matches!(self.experiment, Experiment::Error | Experiment::SupError | Experiment::Occupation) {
            if let Some(n) = self.n_list.iter().find(|n| !self.big_n.is_multiple_of(**n)) {
                return fail(format!("n must divide N ({n} does not divide {})", self.big_n));
            }
        }
        if matches!(self.experiment, Experiment::Diff | Experiment::Hist) {
            let max = self.n_list.iter().copied().max().unwrap_or(1);
            if let Some(n) = self.n_list.iter().find(|n| max % **n != 0) {
                return fail(format!("n must divide N = 2 max(n) after doubling ({n} does not divide {max})"));
            }
        }
        if self.p_list.is_empty() || self.p_list.iter().any(|p| !(*p >= 1.0 && p.is_finite())) {
            return fail(format!("p entries must be >= 1 (got {:?})", self.p_list));
        }
        if self.experiment == Experiment::Hist && self.p_list.len() != 1 {
            return fail("hist takes exactly one p".into());
        }
        if self.m == 0 {
            return fail("m must be >= 1".into());
        }
        if self.threads == 0 {
            return fail("threads must be >= 1".into());
        }
        if self.samples == 0 {
            return fail("samples must be >= 1".into());
        }
        if self.eps_list.iter().any(|e| !(*e >= 0.0)) {
            return fail("eps_list entries must be >= 0".into());
        }
        if let Some(e) = self.transform_eps {
            if !(e > 0.0) {
                return fail(format!("transform.eps must be positive (got {e})"));
            }
        }
        if self.model.name == "custom" && self.model.surface.is_none() {
            return fail("model custom needs a [surface] section".into());
        }
        Ok(())
    }

    /// `key,value` pairs echoing the effective configuration.
    pub fn echo(&self) -> Vec<(String, String)> {
        let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        let mut rows = vec![
            ("experiment".into(), self.experiment.name().into()),
            ("model".into(), self.model.name.clone()),
            ("scheme".into(), self.scheme.name().into()),
            ("p".into(), join(&self.p_list)),
            (
                "n".into(),
                self.n_list.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(" "),
            ),
            ("N".into(), self.big_n.to_string()),
            ("m".into(), self.m.to_string()),
            ("seed".into(), self.seed.to_string()),
            ("threads".into(), self.threads.to_string()),
            ("out_dir".into(), self.out_dir.display().to_string()),
            ("exponent".into(), self.exponent.to_string()),
            ("eps_list".into(), join(&self.eps_list)),
            ("samples".into(), self.samples.to_string()),
            (
                "transform.eps".into(),
                self.transform_eps.map_or("default".into(), |e| e.to_string()),
            ),
            ("transform.newton_tol".into(), self.newton_tol.to_string()),
            ("transform.fd_step".into(), self.fd_step.to_string()),
        ];
        let m = &self.model;
        rows.push(("model.a".into(), m.a.to_string()));
        rows.push(("model.b".into(), m.b.to_string()));
        rows.push((
            "model.x0".into(),
            m.x0.as_ref().map_or("default".into(), |x| join(x)),
        ));
        rows.push(("model.scale".into(), m.scale.to_string()));
        rows.push(("model.mu".into(), m.mu.to_string()));
        rows.push(("model.sigma".into(), m.sigma.to_string()));
        rows.push(("model.noise".into(), m.noise.to_string()));
        rows
    }
}

fn surface_spec(raw: &RawConfig) -> ConfigResult<Option<SurfaceSpec>> {
    fn lookup<'a>(raw: &'a RawConfig, k: &'a str) -> Option<(&'a str, &'a str, usize)> {
        raw.entries.get(k).map(|(v, l)| (k, v.as_str(), *l))
    }
    let get = |k: &'static str| lookup(raw, k);
    let Some((k, kind, l)) = get("surface.kind") else {
        if let Some(key) = raw.entries.keys().find(|k| k.starts_with("surface.")) {
            return Err(key_error(key, raw.entries[key].1, "surface section needs `kind`"));
        }
        return Ok(None);
    };
    let need = |key: &'static str| get(key).ok_or_else(|| key_error(key, l, format!("required for surface kind `{kind}`")));
    let vector = |key: &'static str| -> ConfigResult<Vec<f64>> {
        let (k, v, l) = need(key)?;
        list(k, v, l)
    };
    let spec = match kind {
        "sphere" => SurfaceSpec::Sphere {
            center: vector("surface.center")?,
            radius: {
                let (k, v, l) = need("surface.radius")?;
                scalar(k, v, l)?
            },
        },
        "hyperplane" => SurfaceSpec::Hyperplane {
            base: vector("surface.base")?,
            normal: vector("surface.normal")?,
        },
        "points1d" => SurfaceSpec::Points1d {
            points: vector("surface.points")?,
        },
        other => return Err(key_error(k, l, format!("unknown surface kind `{other}`"))),
    };
    Ok(Some(spec))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_gets_defaults() {
        let raw = RawConfig::parse("model = example1\nexperiment = error\n").unwrap();
        let c = RunConfig::from_raw(&raw).unwrap();
        assert_eq!(c.model.name, "example1");
        assert_eq!(c.big_n, 1 << 14);
        assert_eq!(c.m, 5000);
        assert_eq!(c.n_list, (6..=12).map(|k| 1usize << k).collect::<Vec<_>>());
    }

    #[test]
    fn n_must_divide_big_n() {
        let raw = RawConfig::parse("model = example1\nexperiment = error\nn = 64, 100\nN = 2^14\n").unwrap();
        let err = RunConfig::from_raw(&raw).unwrap_err();
        assert!(err.to_string().contains("n must divide N"), "{err}");
    }

    #[test]
    fn sections_flatten_and_model_name_alias() {
        let text = "[model]\nname = example2\na = -2.5\nx0 = 0, 0\n[transform]\neps = 0.05\n";
        let c = RunConfig::from_raw(&RawConfig::parse(text).unwrap()).unwrap();
        assert_eq!(c.model.name, "example2");
        assert_eq!(c.model.a, -2.5);
        assert_eq!(c.model.x0, Some(vec![0.0, 0.0]));
        assert_eq!(c.transform_eps, Some(0.05));
    }

    #[test]
    fn parse_errors_carry_lines() {
        assert_eq!(
            RawConfig::parse("model = example1\nthis is wrong\n"),
            Err(ConfigError::Parse {
                line: 2,
                message: "expected `key = value`, found `this is wrong`".into()
            })
        );
        let err = RunConfig::from_raw(&RawConfig::parse("\n\nm = many\n").unwrap()).unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 3, .. }), "{err:?}");
        let err = RunConfig::from_raw(&RawConfig::parse("colour = blue\n").unwrap()).unwrap_err();
        assert!(err.to_string().contains("colour"));
    }

    #[test]
    fn overrides_win() {
        let mut raw = RawConfig::parse("seed = 7\n").unwrap();
        raw.set("seed", "42");
        assert_eq!(RunConfig::from_raw(&raw).unwrap().seed, 42);
    }

    #[test]
    fn custom_surface() {
        let text = "model = custom\nmodel.pieces = 1, 0; -1, 0\nmodel.x0 = 0.5, 0\n[surface]\nkind = hyperplane\nbase = 0, 0\nnormal = 1, 0\n";
        let c = RunConfig::from_raw(&RawConfig::parse(text).unwrap()).unwrap();
        assert_eq!(
            c.model.surface,
            Some(SurfaceSpec::Hyperplane {
                base: vec![0.0, 0.0],
                normal: vec![1.0, 0.0]
            })
        );
        assert_eq!(c.model.pieces, vec![vec![1.0, 0.0], vec![-1.0, 0.0]]);
        let missing = "model = custom\n";
        assert!(matches!(
            RunConfig::from_raw(&RawConfig::parse(missing).unwrap()),
            Err(ConfigError::Validation(_))
        ));
    }

    #[test]
    fn invalid_values_are_rejected() {
        for text in ["p = 0.5\n", "m = 0\n", "threads = 0\n", "experiment = dance\n", "scheme = rk4\n"] {
            assert!(RunConfig::from_raw(&RawConfig::parse(text).unwrap()).is_err(), "{text}");
        }
    }
}
