//! Flat `key = value` text: run configs and channel descriptors.
//!
//! One pair per line; `#` starts a comment; blank lines are ignored.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use modeloss_core::bogoliubov::{compose_channels, BogoliubovChannel, Profile};
use modeloss_core::spectral::Grid;

use crate::error::{CliError, Result};

/// Parses `key = value` lines in order. Duplicate keys keep the last value.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::usage(format!("line {}: expected `key = value`, got `{raw}`", lineno + 1))
        })?;
        let key = key.trim();
        if key.is_empty() {
            return Err(CliError::usage(format!("line {}: empty key", lineno + 1)));
        }
        out.push((key.to_string(), value.trim().to_string()));
    }
    Ok(out)
}

pub fn parse_map(text: &str) -> Result<BTreeMap<String, String>> {
    Ok(parse_pairs(text)?.into_iter().collect())
}

fn profile_pairs(profile: &Profile) -> Vec<(&'static str, f64)> {
    match *profile {
        Profile::Uniform { iota } => vec![("iota", iota)],
        Profile::Lowpass { cutoff } => vec![("kc", cutoff)],
        Profile::Thermal { temperature } => vec![("T", temperature)],
        Profile::Custom => vec![],
    }
}

/// Channel descriptor: grid plus the ordered profile stages.
pub fn channel_descriptor(channel: &BogoliubovChannel) -> String {
    let grid = channel.grid();
    let mut out = String::new();
    writeln!(out, "grid.L = {:?}", grid.half_width()).unwrap();
    writeln!(out, "grid.N = {}", grid.len()).unwrap();
    writeln!(out, "stages = {}", channel.stages().len()).unwrap();
    for (i, stage) in channel.stages().iter().enumerate() {
        writeln!(out, "stage.{i}.profile = {}", stage.name()).unwrap();
        for (key, value) in profile_pairs(stage) {
            writeln!(out, "stage.{i}.{key} = {value:?}").unwrap();
        }
    }
    out
}

fn lookup<'a>(map: &'a BTreeMap<String, String>, key: &str) -> Result<&'a str> {
    map.get(key)
        .map(String::as_str)
        .ok_or_else(|| CliError::usage(format!("missing key `{key}`")))
}

fn number<T: std::str::FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<T> {
    let raw = lookup(map, key)?;
    raw.parse()
        .map_err(|_| CliError::usage(format!("`{key}`: cannot parse `{raw}`")))
}

pub fn profile_from_parts(name: &str, param: f64) -> Result<Profile> {
    match name {
        "uniform" => Ok(Profile::Uniform { iota: param }),
        "lowpass" => Ok(Profile::Lowpass { cutoff: param }),
        "thermal" => Ok(Profile::Thermal { temperature: param }),
        other => Err(CliError::usage(format!("unknown channel profile `{other}`"))),
    }
}

/// Rebuilds a channel from [`channel_descriptor`] output.
pub fn parse_channel_descriptor(text: &str) -> Result<BogoliubovChannel> {
    let map = parse_map(text)?;
    let grid = Grid::new(number(&map, "grid.L")?, number(&map, "grid.N")?)?;
    let stages: usize = number(&map, "stages")?;
    let mut channel: Option<BogoliubovChannel> = None;
    for i in 0..stages {
        let name = lookup(&map, &format!("stage.{i}.profile"))?;
        let param_key = match name {
            "uniform" => "iota",
            "lowpass" => "kc",
            "thermal" => "T",
            other => {
                return Err(CliError::usage(format!("stage {i}: cannot rebuild profile `{other}`")))
            }
        };
        let profile = profile_from_parts(name, number(&map, &format!("stage.{i}.{param_key}"))?)?;
        let stage = BogoliubovChannel::from_profile(grid, profile)?;
        channel = Some(match channel {
            None => stage,
            Some(acc) => compose_channels(&acc, &stage)?,
        });
    }
    channel.ok_or_else(|| CliError::usage("descriptor has no stages"))
}
