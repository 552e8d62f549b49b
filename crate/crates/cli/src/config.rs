//! Flat `key = value` experiment configuration shared by files and flags.
//!
//! Lists are comma separated; a `start:stop:step` triple expands to an
//! inclusive range. `#` starts a comment. Serialization writes every key in a
//! fixed order with lists expanded, and parsing that output gives back an
//! identical config.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use dce_core::analytic::JensenVariant;
use dce_core::scalar::db_to_linear;
use dce_core::{Scheme, SystemParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format '{other}' (csv|json)")),
        }
    }
}

impl Format {
    fn as_str(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scheme: Scheme,
    pub n_t: usize,
    pub n_l: usize,
    pub n_u: usize,
    pub var_h: f64,
    pub var_hd: f64,
    pub var_hu: f64,
    pub var_g: f64,
    pub var_w: f64,
    pub var_wt: f64,
    pub var_v: f64,
    /// Training lengths; `None` means the sending terminal's antenna count.
    pub tau_r: Option<usize>,
    pub tau_0: Option<usize>,
    pub tau_2: Option<usize>,
    pub tau_3: Option<usize>,
    /// Forward lengths; more than one value switches `nmse` to the sweep
    /// at fixed energy budgets.
    pub tau_f: Vec<usize>,
    pub pbar_t_db: f64,
    pub pbar_l_db: f64,
    pub gamma: Vec<f64>,
    pub pave_db: Vec<f64>,
    /// `None` picks the command's default.
    pub trials: Option<usize>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub jensen_variant: JensenVariant,
    pub qam: usize,
    pub full_scale: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::Reciprocal,
            n_t: 4,
            n_l: 2,
            n_u: 2,
            var_h: 1.0,
            var_hd: 1.0,
            var_hu: 1.0,
            var_g: 1.0,
            var_w: 1.0,
            var_wt: 1.0,
            var_v: 1.0,
            tau_r: None,
            tau_0: None,
            tau_2: None,
            tau_3: None,
            tau_f: Vec::new(),
            pbar_t_db: 30.0,
            pbar_l_db: 20.0,
            gamma: vec![0.1, 0.03],
            pave_db: vec![10.0, 15.0, 20.0, 25.0, 30.0],
            trials: None,
            seed: 1,
            out: None,
            format: Format::Csv,
            jensen_variant: JensenVariant::Printed,
            qam: 64,
            full_scale: false,
        }
    }
}

/// Every recognised key, in serialization order.
pub const KEYS: &[&str] = &[
    "scheme",
    "n-t",
    "n-l",
    "n-u",
    "var-h",
    "var-hd",
    "var-hu",
    "var-g",
    "var-w",
    "var-wt",
    "var-v",
    "tau-r",
    "tau-0",
    "tau-2",
    "tau-3",
    "tau-f",
    "pbar-t-db",
    "pbar-l-db",
    "gamma",
    "pave-db",
    "trials",
    "seed",
    "out",
    "format",
    "jensen-variant",
    "qam",
    "full-scale",
];

fn parse<T: FromStr>(key: &str, v: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    v.trim()
        .parse()
        .map_err(|e| format!("{key}: cannot parse '{v}': {e}"))
}

fn parse_optional(key: &str, v: &str) -> Result<Option<usize>, String> {
    if v.trim() == "auto" {
        Ok(None)
    } else {
        parse(key, v).map(Some)
    }
}

/// Comma list whose items may be `start:stop:step` ranges.
pub fn parse_f64_list(key: &str, v: &str) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for item in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [x] => out.push(parse(key, x)?),
            [a, b, s] => {
                let (a, b, s): (f64, f64, f64) = (parse(key, a)?, parse(key, b)?, parse(key, s)?);
                if s.is_nan() || s <= 0.0 || b < a {
                    return Err(format!("{key}: bad range '{item}'"));
                }
                let n = ((b - a) / s + 1e-9).floor() as usize;
                out.extend((0..=n).map(|k| a + s * k as f64));
            }
            _ => return Err(format!("{key}: bad list item '{item}'")),
        }
    }
    if out.is_empty() {
        return Err(format!("{key}: empty list"));
    }
    Ok(out)
}

fn parse_usize_list(key: &str, v: &str) -> Result<Vec<usize>, String> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse(key, s))
        .collect()
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

impl ExperimentConfig {
    pub fn set(&mut self, key: &str, v: &str) -> Result<(), String> {
        match key {
            "scheme" => self.scheme = parse(key, v)?,
            "n-t" => self.n_t = parse(key, v)?,
            "n-l" => self.n_l = parse(key, v)?,
            "n-u" => self.n_u = parse(key, v)?,
            "var-h" => self.var_h = parse(key, v)?,
            "var-hd" => self.var_hd = parse(key, v)?,
            "var-hu" => self.var_hu = parse(key, v)?,
            "var-g" => self.var_g = parse(key, v)?,
            "var-w" => self.var_w = parse(key, v)?,
            "var-wt" => self.var_wt = parse(key, v)?,
            "var-v" => self.var_v = parse(key, v)?,
            "tau-r" => self.tau_r = parse_optional(key, v)?,
            "tau-0" => self.tau_0 = parse_optional(key, v)?,
            "tau-2" => self.tau_2 = parse_optional(key, v)?,
            "tau-3" => self.tau_3 = parse_optional(key, v)?,
            "tau-f" => self.tau_f = parse_usize_list(key, v)?,
            "pbar-t-db" => self.pbar_t_db = parse(key, v)?,
            "pbar-l-db" => self.pbar_l_db = parse(key, v)?,
            "gamma" => self.gamma = parse_f64_list(key, v)?,
            "pave-db" => self.pave_db = parse_f64_list(key, v)?,
            "trials" => {
                let t: usize = parse(key, v)?;
                if t == 0 {
                    return Err("trials: must be positive".into());
                }
                self.trials = Some(t);
            }
            "seed" => self.seed = parse(key, v)?,
            "out" => {
                self.out = if v.trim().is_empty() {
                    None
                } else {
                    Some(PathBuf::from(v.trim()))
                }
            }
            "format" => self.format = parse(key, v)?,
            "jensen-variant" => self.jensen_variant = parse(key, v)?,
            "qam" => self.qam = parse(key, v)?,
            "full-scale" => self.full_scale = parse(key, v)?,
            other => return Err(format!("unknown key '{other}'")),
        }
        Ok(())
    }

    pub fn parse_str(text: &str) -> Result<Self, String> {
        let mut c = Self::default();
        c.apply_str(text)?;
        Ok(c)
    }

    /// Applies `key = value` lines on top of the current values.
    pub fn apply_str(&mut self, text: &str) -> Result<(), String> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value", n + 1))?;
            self.set(k.trim(), v.trim())
                .map_err(|e| format!("line {}: {e}", n + 1))?;
        }
        Ok(())
    }

    fn value_of(&self, key: &str) -> String {
        let auto = |t: Option<usize>| t.map_or("auto".to_string(), |v| v.to_string());
        match key {
            "scheme" => self.scheme.to_string(),
            "n-t" => self.n_t.to_string(),
            "n-l" => self.n_l.to_string(),
            "n-u" => self.n_u.to_string(),
            "var-h" => self.var_h.to_string(),
            "var-hd" => self.var_hd.to_string(),
            "var-hu" => self.var_hu.to_string(),
            "var-g" => self.var_g.to_string(),
            "var-w" => self.var_w.to_string(),
            "var-wt" => self.var_wt.to_string(),
            "var-v" => self.var_v.to_string(),
            "tau-r" => auto(self.tau_r),
            "tau-0" => auto(self.tau_0),
            "tau-2" => auto(self.tau_2),
            "tau-3" => auto(self.tau_3),
            "tau-f" => join(&self.tau_f),
            "pbar-t-db" => self.pbar_t_db.to_string(),
            "pbar-l-db" => self.pbar_l_db.to_string(),
            "gamma" => join(&self.gamma),
            "pave-db" => join(&self.pave_db),
            "trials" => self.trials.map_or(String::new(), |t| t.to_string()),
            "seed" => self.seed.to_string(),
            "out" => self
                .out
                .as_ref()
                .map_or(String::new(), |p| p.display().to_string()),
            "format" => self.format.as_str().to_string(),
            "jensen-variant" => self.jensen_variant.to_string(),
            "qam" => self.qam.to_string(),
            "full-scale" => self.full_scale.to_string(),
            _ => unreachable!("key list and serializer disagree"),
        }
    }

    /// One `key = value` line per key; empty optional values are skipped.
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        for key in KEYS {
            let v = self.value_of(key);
            if !v.is_empty() {
                let _ = writeln!(s, "{key} = {v}");
            }
        }
        s
    }

    /// System parameters at average power `p_ave_db`; the forward length is
    /// the first `tau-f` value.
    pub fn params_at(&self, p_ave_db: f64) -> SystemParams<f64> {
        let mut p = SystemParams::with_antennas(self.n_t, self.n_l, self.n_u, p_ave_db);
        p.var_h = self.var_h;
        p.var_hd = self.var_hd;
        p.var_hu = self.var_hu;
        p.var_g = self.var_g;
        p.var_w = self.var_w;
        p.var_wt = self.var_wt;
        p.var_v = self.var_v;
        p.tau_r = self.tau_r.unwrap_or(self.n_l);
        p.tau_0 = self.tau_0.unwrap_or(self.n_t);
        p.tau_2 = self.tau_2.unwrap_or(self.n_l);
        p.tau_3 = self.tau_3.unwrap_or(self.n_t);
        p.tau_f = self.tau_f.first().copied().unwrap_or(self.n_t);
        p.p_bar_t = db_to_linear(self.pbar_t_db);
        p.p_bar_l = db_to_linear(self.pbar_l_db);
        p
    }

    /// Rejects what parsing alone cannot see.
    pub fn validate(&self) -> Result<(), String> {
        self.params_at(self.pave_db[0])
            .validate()
            .map_err(|e| e.to_string())?;
        if self.gamma.is_empty() || self.pave_db.is_empty() {
            return Err("gamma and pave-db need at least one value".into());
        }
        if self.tau_f.iter().any(|&t| t < self.n_t) {
            return Err(format!("tau-f values must be at least n-t = {}", self.n_t));
        }
        Ok(())
    }
}
