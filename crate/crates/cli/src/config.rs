//! Experiment configuration: a TOML file merged with command-line overrides.

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use num_rational::Ratio;
use qwalk_core::spectral::EncodingConfig;
use qwalk_core::walk::Mode;
use qwalk_core::{DecimalEncoding, ExactEncoding, ExactFrequency};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const COIN_PRESETS: [&str; 3] = ["grover", "dft", "dft-prime"];
pub const PARAM_PRESETS: [&str; 2] = ["grover", "dft"];
pub const INITIAL_PRESETS: [&str; 5] = ["symmetric", "r", "l", "u", "d"];
pub const EMIT_KINDS: [&str; 7] = ["state", "probability", "marginals", "slices", "spectrum", "moments", "coin"];
pub const DEFAULT_SEED: u64 = 0x005e_ed0f_c01d;

/// Invalid configuration. Maps to exit status 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn invalid(key: &str, msg: impl fmt::Display) -> anyhow::Error {
    ConfigError(format!("`{key}` (--{}): {msg}", key.replace('_', "-"))).into()
}

/// A number written as TOML integer, float or string.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum NumberText {
    Int(i64),
    Float(f64),
    Text(String),
}

impl NumberText {
    fn into_text(self) -> String {
        match self {
            NumberText::Int(v) => v.to_string(),
            NumberText::Float(v) => format!("{v:?}"),
            NumberText::Text(s) => s,
        }
    }
}

/// Configuration as read from a file or flags. Every field is optional.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub coin: Option<String>,
    pub coin_params: Option<String>,
    pub steps: Option<u64>,
    pub mode: Option<String>,
    pub initial: Option<String>,
    pub omega_0: Option<NumberText>,
    pub omega_x: Option<NumberText>,
    pub omega_y: Option<NumberText>,
    pub out_dir: Option<PathBuf>,
    pub emit: Option<Vec<String>>,
    pub permute_lu: Option<bool>,
    pub seed: Option<u64>,
    pub periodic: Option<usize>,
    pub verify: Option<bool>,
}

impl PartialConfig {
    pub fn from_file(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).map_err(|e| ConfigError(format!("config {}: {e}", path.display())).into())
    }

    /// `self` with every value set in `over` replaced. The two coin keys are
    /// one setting: a coin source in `over` discards both in `self`.
    pub fn overridden_by(mut self, over: PartialConfig) -> Self {
        if over.coin.is_some() || over.coin_params.is_some() {
            self.coin = over.coin;
            self.coin_params = over.coin_params;
        }
        macro_rules! take {
            ($($f:ident),*) => { $( if over.$f.is_some() { self.$f = over.$f; } )* };
        }
        take!(steps, mode, initial, omega_0, omega_x, omega_y, out_dir, emit, permute_lu, seed, periodic, verify);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CoinSource {
    Preset { name: String },
    MatrixFile { path: PathBuf, sha256: String },
    ParamsPreset { name: String },
    ParamsFile { path: PathBuf, sha256: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InitialSource {
    Preset { name: String },
    File { path: PathBuf, sha256: String },
}

/// Fully resolved run configuration. Its JSON form is hashed into the manifest.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub coin: CoinSource,
    pub permute_lu: bool,
    pub steps: u64,
    pub mode: String,
    pub initial: InitialSource,
    pub periodic: Option<usize>,
    pub omega_0: String,
    pub omega_x: String,
    pub omega_y: String,
    pub emit: Vec<String>,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub verify: bool,
}

pub fn defaults() -> RunConfig {
    RunConfig {
        coin: CoinSource::Preset { name: "grover".into() },
        permute_lu: false,
        steps: 10,
        mode: Mode::Plane.name().into(),
        initial: InitialSource::Preset { name: "symmetric".into() },
        periodic: None,
        omega_0: "0".into(),
        omega_x: "1".into(),
        omega_y: "1000000".into(),
        emit: vec!["probability".into(), "moments".into()],
        out_dir: PathBuf::from("qwalk-out"),
        seed: DEFAULT_SEED,
        verify: false,
    }
}

/// The defaults as a commented TOML document accepted by `--config`.
pub fn defaults_toml() -> String {
    let d = defaults();
    let emit: Vec<String> = d.emit.iter().map(|e| format!("{e:?}")).collect();
    format!(
        "# coin source: set exactly one of `coin` and `coin_params`\n\
         # coin = {COIN_PRESETS:?} or a path to a 4x4 matrix JSON file\n\
         coin = \"grover\"\n\
         # coin_params = {PARAM_PRESETS:?} or a path to an optical parameter file\n\
         permute_lu = {}\n\
         steps = {}\n\
         # mode = \"plane\" | \"line-two-coins\"\n\
         mode = \"{}\"\n\
         # initial = {INITIAL_PRESETS:?} or a path to a state file\n\
         initial = \"symmetric\"\n\
         # periodic = 9\n\
         # frequencies: integers or p/q are exact, anything else is a decimal\n\
         omega_0 = \"{}\"\n\
         omega_x = \"{}\"\n\
         omega_y = \"{}\"\n\
         # emit: any of {EMIT_KINDS:?}\n\
         emit = [{}]\n\
         out_dir = \"{}\"\n\
         seed = {}\n\
         verify = {}\n",
        d.permute_lu,
        d.steps,
        d.mode,
        d.omega_0,
        d.omega_x,
        d.omega_y,
        emit.join(", "),
        d.out_dir.display(),
        d.seed,
        d.verify,
    )
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn file_digest(key: &str, path: &Path) -> anyhow::Result<String> {
    let bytes = std::fs::read(path).map_err(|e| invalid(key, format!("cannot read {}: {e}", path.display())))?;
    Ok(sha256_hex(&bytes))
}

impl PartialConfig {
    pub fn resolve(self) -> anyhow::Result<RunConfig> {
        let d = defaults();
        let coin = match (self.coin, self.coin_params) {
            (Some(_), Some(_)) => {
                return Err(ConfigError("`coin` and `coin_params` are both set; give exactly one coin source".into()).into())
            }
            (Some(name), None) if COIN_PRESETS.contains(&name.as_str()) => CoinSource::Preset { name },
            (Some(path), None) => {
                let path = PathBuf::from(path);
                let sha256 = file_digest("coin", &path)?;
                CoinSource::MatrixFile { path, sha256 }
            }
            (None, Some(name)) if PARAM_PRESETS.contains(&name.as_str()) => CoinSource::ParamsPreset { name },
            (None, Some(path)) => {
                let path = PathBuf::from(path);
                let sha256 = file_digest("coin_params", &path)?;
                CoinSource::ParamsFile { path, sha256 }
            }
            (None, None) => d.coin,
        };
        let mode = match self.mode {
            Some(m) => m.parse::<Mode>().map_err(|e| invalid("mode", e))?.name().to_string(),
            None => d.mode,
        };
        let initial = match self.initial {
            Some(name) if INITIAL_PRESETS.contains(&name.as_str()) => InitialSource::Preset { name },
            Some(path) => {
                let path = PathBuf::from(path);
                let sha256 = file_digest("initial", &path)?;
                InitialSource::File { path, sha256 }
            }
            None => d.initial,
        };
        let emit = self.emit.unwrap_or(d.emit);
        for e in &emit {
            if !EMIT_KINDS.contains(&e.as_str()) {
                return Err(invalid("emit", format!("unknown output `{e}` (expected one of {})", EMIT_KINDS.join(", "))));
            }
        }
        let mut emit_sorted = emit;
        emit_sorted.sort_by_key(|e| EMIT_KINDS.iter().position(|k| k == e));
        emit_sorted.dedup();
        if let Some(side) = self.periodic {
            if side < 3 {
                return Err(invalid("periodic", format!("side {side} must be at least 3")));
            }
        }
        let cfg = RunConfig {
            coin,
            permute_lu: self.permute_lu.unwrap_or(d.permute_lu),
            steps: self.steps.unwrap_or(d.steps),
            mode,
            initial,
            periodic: self.periodic,
            omega_0: self.omega_0.map(NumberText::into_text).unwrap_or(d.omega_0),
            omega_x: self.omega_x.map(NumberText::into_text).unwrap_or(d.omega_x),
            omega_y: self.omega_y.map(NumberText::into_text).unwrap_or(d.omega_y),
            emit: emit_sorted,
            out_dir: self.out_dir.unwrap_or(d.out_dir),
            seed: self.seed.unwrap_or(d.seed),
            verify: self.verify.unwrap_or(d.verify),
        };
        cfg.encoding()?;
        Ok(cfg)
    }
}

/// Frequency encoding in exact or decimal arithmetic.
#[derive(Clone, Debug, PartialEq)]
pub enum Encoding {
    Exact(ExactEncoding),
    Decimal(DecimalEncoding),
}

fn parse_exact(text: &str) -> Option<ExactFrequency> {
    let t = text.trim();
    match t.split_once('/') {
        Some((n, d)) => {
            let (n, d) = (n.trim().parse::<i128>().ok()?, d.trim().parse::<i128>().ok()?);
            (d != 0).then(|| Ratio::new(n, d))
        }
        None => t.parse::<i128>().ok().map(Ratio::from_integer),
    }
}

fn parse_decimal(key: &str, text: &str) -> anyhow::Result<f64> {
    if let Some(q) = parse_exact(text) {
        return Ok(*q.numer() as f64 / *q.denom() as f64);
    }
    text.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| invalid(key, format!("`{text}` is not a number")))
}

impl RunConfig {
    /// Exact when all three frequencies are integers or fractions.
    pub fn encoding(&self) -> anyhow::Result<Encoding> {
        let texts = [("omega_0", &self.omega_0), ("omega_x", &self.omega_x), ("omega_y", &self.omega_y)];
        let exact: Vec<Option<ExactFrequency>> = texts.iter().map(|(_, t)| parse_exact(t)).collect();
        let [w0, wx, wy] = [0, 1, 2].map(|i| parse_decimal(texts[i].0, texts[i].1));
        let (w0, wx, wy) = (w0?, wx?, wy?);
        for (key, v) in [("omega_x", wx), ("omega_y", wy)] {
            if v <= 0.0 {
                bail!(invalid(key, format!("{v} must be positive")));
            }
        }
        let enc = match &exact[..] {
            [Some(q0), Some(qx), Some(qy)] => Encoding::Exact(EncodingConfig::new(*q0, *qx, *qy)?),
            _ => Encoding::Decimal(EncodingConfig::new(w0, wx, wy)?),
        };
        Ok(enc)
    }

    pub fn hash(&self) -> String {
        sha256_hex(serde_json::to_string(self).expect("config serializes").as_bytes())
    }
}
