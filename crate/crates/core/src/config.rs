//! Flat `key = value` run configuration.
//!
//! One entry per line, `#` starts a comment. Recognized keys:
//!
//! | key | value |
//! |---|---|
//! | `model` | `two_level` or `lmg` |
//! | `n_spins`, `j0`, `hx0` | LMG parameters (`n_spins` integer) |
//! | `hx_offset`, `hx_slope`, `hz_offset`, `hz_slope` | two-level field schedules, default 0 |
//! | `lambda`, `delta_lambda` | operating point and step |
//! | `omega` | number or `auto` (default `auto`, i.e. Ω = Δmax) |
//! | `k_max` or `k` | sweep range `1..=k_max`, or a single `K` |
//! | `eta` | number, or `<f>*delta_min` |
//! | `merge` | `true` / `false` (default `false`) |
//! | `ordering` | `ascending` / `descending` (default `ascending`) |
//! | `out` | output path |

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::gates::ProductOrder;
use crate::hamiltonians::{Affine, LmgModel, Model, TwoLevelModel};
use crate::table::format_number;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelConfig {
    TwoLevel { hx: Affine, hz: Affine },
    Lmg { n_spins: usize, j0: f64, hx0: f64 },
}

impl ModelConfig {
    pub fn build(&self) -> Result<Model> {
        Ok(match *self {
            ModelConfig::TwoLevel { hx, hz } => Model::TwoLevel(TwoLevelModel::new(hx, hz)),
            ModelConfig::Lmg { n_spins, j0, hx0 } => Model::Lmg(LmgModel::new(n_spins, j0, hx0)?),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OmegaMode {
    /// Resolved at run time to Δmax of the ground-state spectral function.
    Auto,
    Explicit(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EtaMode {
    Absolute(f64),
    /// `η = f · Δmin`, resolved after spectral analysis.
    FractionOfDeltaMin(f64),
}

impl EtaMode {
    pub fn resolve(self, delta_min: f64) -> f64 {
        match self {
            EtaMode::Absolute(eta) => eta,
            EtaMode::FractionOfDeltaMin(f) => f * delta_min,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KSpec {
    Max(usize),
    Single(usize),
}

impl KSpec {
    pub fn value(self) -> usize {
        match self {
            KSpec::Max(k) | KSpec::Single(k) => k,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub lambda: f64,
    pub delta_lambda: f64,
    pub omega: OmegaMode,
    pub k: KSpec,
    pub eta: Option<EtaMode>,
    pub merge: bool,
    pub ordering: ProductOrder,
    pub out: Option<String>,
}

const LMG_KEYS: [&str; 3] = ["n_spins", "j0", "hx0"];
const TWO_LEVEL_KEYS: [&str; 4] = ["hx_offset", "hx_slope", "hz_offset", "hz_slope"];
const COMMON_KEYS: [&str; 10] = [
    "model",
    "lambda",
    "delta_lambda",
    "omega",
    "k_max",
    "k",
    "eta",
    "merge",
    "ordering",
    "out",
];

struct Entry {
    line: usize,
    value: String,
}

fn err(line: Option<usize>, key: &str, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        key: key.to_string(),
        message: message.into(),
    }
}

struct Entries(BTreeMap<String, Entry>);

impl Entries {
    fn take(&mut self, key: &str) -> Option<Entry> {
        self.0.remove(key)
    }

    fn required(&mut self, key: &str) -> Result<Entry> {
        self.take(key)
            .ok_or_else(|| err(None, key, "missing required key"))
    }

    fn f64_or(&mut self, key: &str, default: Option<f64>) -> Result<f64> {
        match (self.take(key), default) {
            (Some(e), _) => parse_f64(&e, key),
            (None, Some(d)) => Ok(d),
            (None, None) => Err(err(None, key, "missing required key")),
        }
    }
}

fn parse_f64(e: &Entry, key: &str) -> Result<f64> {
    let v: f64 = e
        .value
        .parse()
        .map_err(|_| err(Some(e.line), key, format!("expected a number, got {:?}", e.value)))?;
    if !v.is_finite() {
        return Err(err(Some(e.line), key, "value must be finite"));
    }
    Ok(v)
}

fn parse_usize(e: &Entry, key: &str) -> Result<usize> {
    e.value
        .parse()
        .map_err(|_| err(Some(e.line), key, format!("expected an integer, got {:?}", e.value)))
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| err(Some(line), content, "expected `key = value`"))?;
            let key = key.trim();
            let value = value.trim().trim_matches('"');
            let known = COMMON_KEYS.contains(&key)
                || LMG_KEYS.contains(&key)
                || TWO_LEVEL_KEYS.contains(&key);
            if !known {
                return Err(err(Some(line), key, "unknown key"));
            }
            if map.contains_key(key) {
                return Err(err(Some(line), key, "duplicate key"));
            }
            map.insert(
                key.to_string(),
                Entry {
                    line,
                    value: value.to_string(),
                },
            );
        }
        let mut entries = Entries(map);

        let model_entry = entries.required("model")?;
        let model = match model_entry.value.as_str() {
            "lmg" => {
                reject_keys(&entries, &TWO_LEVEL_KEYS, "lmg")?;
                let n = entries.required("n_spins")?;
                let n_spins = parse_usize(&n, "n_spins")?;
                if n_spins == 0 {
                    return Err(err(Some(n.line), "n_spins", "must be at least 1"));
                }
                ModelConfig::Lmg {
                    n_spins,
                    j0: entries.f64_or("j0", None)?,
                    hx0: entries.f64_or("hx0", None)?,
                }
            }
            "two_level" => {
                reject_keys(&entries, &LMG_KEYS, "two_level")?;
                ModelConfig::TwoLevel {
                    hx: Affine::new(
                        entries.f64_or("hx_offset", Some(0.0))?,
                        entries.f64_or("hx_slope", Some(0.0))?,
                    ),
                    hz: Affine::new(
                        entries.f64_or("hz_offset", Some(0.0))?,
                        entries.f64_or("hz_slope", Some(0.0))?,
                    ),
                }
            }
            other => {
                return Err(err(
                    Some(model_entry.line),
                    "model",
                    format!("expected `two_level` or `lmg`, got {other:?}"),
                ))
            }
        };

        let lambda = entries.f64_or("lambda", None)?;
        let dl_entry = entries.required("delta_lambda")?;
        let delta_lambda = parse_f64(&dl_entry, "delta_lambda")?;
        if delta_lambda == 0.0 {
            return Err(err(Some(dl_entry.line), "delta_lambda", "must be nonzero"));
        }

        let omega = match entries.take("omega") {
            None => OmegaMode::Auto,
            Some(e) if e.value == "auto" => OmegaMode::Auto,
            Some(e) => {
                let w = parse_f64(&e, "omega")?;
                if w <= 0.0 {
                    return Err(err(Some(e.line), "omega", "must be positive"));
                }
                OmegaMode::Explicit(w)
            }
        };

        let k = match (entries.take("k_max"), entries.take("k")) {
            (Some(a), Some(_)) => {
                return Err(err(Some(a.line), "k_max", "give either `k_max` or `k`, not both"))
            }
            (Some(e), None) => KSpec::Max(positive_k(&e, "k_max")?),
            (None, Some(e)) => KSpec::Single(positive_k(&e, "k")?),
            (None, None) => return Err(err(None, "k_max", "missing required key (or `k`)")),
        };

        let eta = match entries.take("eta") {
            None => None,
            Some(e) => Some(parse_eta(&e)?),
        };

        let merge = match entries.take("merge") {
            None => false,
            Some(e) => match e.value.as_str() {
                "true" => true,
                "false" => false,
                other => {
                    return Err(err(Some(e.line), "merge", format!("expected a bool, got {other:?}")))
                }
            },
        };

        let ordering = match entries.take("ordering") {
            None => ProductOrder::Ascending,
            Some(e) => ProductOrder::parse(&e.value).ok_or_else(|| {
                err(
                    Some(e.line),
                    "ordering",
                    format!("expected `ascending` or `descending`, got {:?}", e.value),
                )
            })?,
        };

        let out = entries.take("out").map(|e| e.value);
        debug_assert!(entries.0.is_empty(), "unconsumed keys");

        Ok(RunConfig {
            model,
            lambda,
            delta_lambda,
            omega,
            k,
            eta,
            merge,
            ordering,
            out,
        })
    }

    /// Canonical text form; `parse(to_text())` reproduces `self`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        match self.model {
            ModelConfig::Lmg { n_spins, j0, hx0 } => {
                kv("model", "lmg".into());
                kv("n_spins", n_spins.to_string());
                kv("j0", format_number(j0));
                kv("hx0", format_number(hx0));
            }
            ModelConfig::TwoLevel { hx, hz } => {
                kv("model", "two_level".into());
                kv("hx_offset", format_number(hx.offset));
                kv("hx_slope", format_number(hx.slope));
                kv("hz_offset", format_number(hz.offset));
                kv("hz_slope", format_number(hz.slope));
            }
        }
        kv("lambda", format_number(self.lambda));
        kv("delta_lambda", format_number(self.delta_lambda));
        kv(
            "omega",
            match self.omega {
                OmegaMode::Auto => "auto".into(),
                OmegaMode::Explicit(w) => format_number(w),
            },
        );
        match self.k {
            KSpec::Max(k) => kv("k_max", k.to_string()),
            KSpec::Single(k) => kv("k", k.to_string()),
        }
        if let Some(eta) = self.eta {
            kv(
                "eta",
                match eta {
                    EtaMode::Absolute(v) => format_number(v),
                    EtaMode::FractionOfDeltaMin(f) => format!("{}*delta_min", format_number(f)),
                },
            );
        }
        kv("merge", self.merge.to_string());
        kv("ordering", self.ordering.name().into());
        if let Some(out) = &self.out {
            kv("out", out.clone());
        }
        s
    }
}

fn reject_keys(entries: &Entries, keys: &[&str], model: &str) -> Result<()> {
    for k in keys {
        if let Some(e) = entries.0.get(*k) {
            return Err(err(Some(e.line), k, format!("not valid for model `{model}`")));
        }
    }
    Ok(())
}

fn positive_k(e: &Entry, key: &str) -> Result<usize> {
    let k = parse_usize(e, key)?;
    if k == 0 {
        return Err(err(Some(e.line), key, "must be at least 1"));
    }
    Ok(k)
}

fn parse_eta(e: &Entry) -> Result<EtaMode> {
    let v = e.value.replace(' ', "");
    let mode = if let Some(f) = v.strip_suffix("*delta_min") {
        let f: f64 = f
            .parse()
            .map_err(|_| err(Some(e.line), "eta", format!("bad fraction in {:?}", e.value)))?;
        EtaMode::FractionOfDeltaMin(f)
    } else {
        EtaMode::Absolute(parse_f64(e, "eta")?)
    };
    let raw = match mode {
        EtaMode::Absolute(x) | EtaMode::FractionOfDeltaMin(x) => x,
    };
    if !(raw >= 0.0) || !raw.is_finite() {
        return Err(err(Some(e.line), "eta", "must be non-negative"));
    }
    Ok(mode)
}
