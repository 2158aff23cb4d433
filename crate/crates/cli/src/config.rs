//! Run configuration: documented defaults, then a config file, then
//! command-line overrides.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use modeloss_core::bogoliubov::{BogoliubovChannel, Profile};
use modeloss_core::network::DatasetName;
use modeloss_core::spectral::Grid;

use crate::error::{CliError, Result};
use crate::kv;

/// Every recognised key with its default, in echo order.
pub const DEFAULTS: &[(&str, &str)] = &[
    ("grid.L", "40"),
    ("grid.N", "4096"),
    ("channel.profile", "uniform"),
    ("channel.iota", "0"),
    ("channel.kc", "2"),
    ("channel.T", "1"),
    ("sweep.levels", "0,0.25,0.5,0.75,1"),
    ("sweep.seeds", "0-9"),
    ("task.name", "xor"),
    ("out.dir", "out"),
];

pub const RESOLVED_FILE: &str = "config.resolved";

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    raw: BTreeMap<String, String>,
    pub grid: Grid,
    pub profile: String,
    /// One or more loss levels; `degrade` draws one curve per level.
    pub iota: Vec<f64>,
    pub cutoff: f64,
    pub temperature: f64,
    pub levels: Vec<f64>,
    pub seeds: Vec<u64>,
    pub task: DatasetName,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self::resolve(None, &[]).expect("defaults are valid")
    }
}

fn parse_f64(key: &str, raw: &str) -> Result<f64> {
    raw.trim()
        .parse()
        .map_err(|_| CliError::usage(format!("`{key}`: `{raw}` is not a number")))
}

fn parse_list(key: &str, raw: &str) -> Result<Vec<f64>> {
    let values = raw
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_f64(key, s))
        .collect::<Result<Vec<_>>>()?;
    if values.is_empty() {
        return Err(CliError::usage(format!("`{key}` needs at least one value")));
    }
    Ok(values)
}

/// `0-9` (inclusive range), `3` or `1,4,7`.
fn parse_seeds(raw: &str) -> Result<Vec<u64>> {
    let bad = || CliError::usage(format!("`sweep.seeds`: cannot parse `{raw}`"));
    let mut seeds = Vec::new();
    for part in raw.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if let Some((lo, hi)) = part.split_once('-') {
            let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
            let hi: u64 = hi.trim().parse().map_err(|_| bad())?;
            if hi < lo {
                return Err(bad());
            }
            seeds.extend(lo..=hi);
        } else {
            seeds.push(part.parse().map_err(|_| bad())?);
        }
    }
    if seeds.is_empty() {
        return Err(bad());
    }
    Ok(seeds)
}

impl RunConfig {
    /// Layers `file` (a `key = value` text) and then `overrides` over the
    /// defaults. Unknown keys are rejected.
    pub fn resolve(file: Option<&str>, overrides: &[(String, String)]) -> Result<Self> {
        let mut raw: BTreeMap<String, String> = DEFAULTS
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        let from_file = match file {
            Some(text) => kv::parse_pairs(text)?,
            None => Vec::new(),
        };
        for (key, value) in from_file.iter().chain(overrides) {
            if !raw.contains_key(key) {
                return Err(CliError::usage(format!("unknown config key `{key}`")));
            }
            raw.insert(key.clone(), value.clone());
        }
        Self::from_raw(raw)
    }

    pub fn load(path: Option<&Path>, overrides: &[(String, String)]) -> Result<Self> {
        let text = match path {
            Some(p) => Some(std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?),
            None => None,
        };
        Self::resolve(text.as_deref(), overrides)
    }

    fn from_raw(raw: BTreeMap<String, String>) -> Result<Self> {
        let get = |k: &str| raw[k].as_str();
        let n_points: usize = get("grid.N")
            .parse()
            .map_err(|_| CliError::usage(format!("`grid.N`: `{}` is not a size", get("grid.N"))))?;
        let grid = Grid::new(parse_f64("grid.L", get("grid.L"))?, n_points)?;
        let task: DatasetName = get("task.name").parse()?;
        Ok(Self {
            grid,
            profile: get("channel.profile").to_string(),
            iota: parse_list("channel.iota", get("channel.iota"))?,
            cutoff: parse_f64("channel.kc", get("channel.kc"))?,
            temperature: parse_f64("channel.T", get("channel.T"))?,
            levels: parse_list("sweep.levels", get("sweep.levels"))?,
            seeds: parse_seeds(get("sweep.seeds"))?,
            task,
            out_dir: PathBuf::from(get("out.dir")),
            raw,
        })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.raw.get(key).map(String::as_str)
    }

    /// A copy with further overrides applied.
    pub fn with(&self, overrides: &[(&str, &str)]) -> Result<Self> {
        let mut raw = self.raw.clone();
        for (k, v) in overrides {
            if !raw.contains_key(*k) {
                return Err(CliError::usage(format!("unknown config key `{k}`")));
            }
            raw.insert(k.to_string(), v.to_string());
        }
        Self::from_raw(raw)
    }

    /// Profiles requested by the channel keys. A uniform profile yields one
    /// entry per `channel.iota` value.
    pub fn profiles(&self) -> Result<Vec<Profile>> {
        match self.profile.as_str() {
            "uniform" => Ok(self.iota.iter().map(|&iota| Profile::Uniform { iota }).collect()),
            "lowpass" => Ok(vec![Profile::Lowpass { cutoff: self.cutoff }]),
            "thermal" => Ok(vec![Profile::Thermal { temperature: self.temperature }]),
            other => Err(CliError::usage(format!("unknown channel profile `{other}`"))),
        }
    }

    /// The single channel named by the config.
    pub fn channel(&self) -> Result<BogoliubovChannel> {
        let profiles = self.profiles()?;
        if profiles.len() != 1 {
            return Err(CliError::usage("this command takes a single `channel.iota` value"));
        }
        Ok(BogoliubovChannel::from_profile(self.grid, profiles[0])?)
    }

    /// Fully resolved `key = value` text, keys in default order.
    pub fn resolved_text(&self) -> String {
        let mut out = String::new();
        for (key, _) in DEFAULTS {
            writeln!(out, "{key} = {}", self.raw[*key]).unwrap();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.grid, Grid::default());
        assert_eq!(cfg.seeds, (0..10).collect::<Vec<_>>());
        assert_eq!(cfg.levels, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(cfg.task, DatasetName::Xor);
        assert_eq!(cfg.out_dir, PathBuf::from("out"));
    }

    #[test]
    fn overrides_beat_file_values() {
        let file = "grid.N = 1024\ntask.name = moons\n";
        let cfg = RunConfig::resolve(Some(file), &[("grid.N".into(), "2048".into())]).unwrap();
        assert_eq!(cfg.grid.len(), 2048);
        assert_eq!(cfg.task, DatasetName::Moons);
    }

    #[test]
    fn resolved_text_reparses_to_the_same_config() {
        let cfg = RunConfig::resolve(Some("channel.iota = 0.1, 0.9\nsweep.seeds = 3,5-6"), &[]).unwrap();
        assert_eq!(cfg.seeds, vec![3, 5, 6]);
        let again = RunConfig::resolve(Some(&cfg.resolved_text()), &[]).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn bad_values() {
        assert!(RunConfig::resolve(Some("colour = blue"), &[]).is_err());
        assert!(RunConfig::resolve(Some("grid.N = 1000"), &[]).is_err());
        assert!(RunConfig::resolve(Some("task.name = mnist"), &[]).is_err());
        assert!(RunConfig::resolve(Some("sweep.seeds = 9-1"), &[]).is_err());
        let cfg = RunConfig::resolve(Some("channel.profile = bandstop"), &[]).unwrap();
        assert!(cfg.channel().is_err());
    }
}
