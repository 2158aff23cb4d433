//! CSV tables with a one-line header.
//!
//! Floats are written with Rust's shortest round-trip formatting, so every
//! table parses back to the exact values that produced it.

use std::fmt::Write as _;

use modeloss_core::bogoliubov::{BogoliubovChannel, DegradedActivation};
use modeloss_core::network::SweepRow;
use modeloss_core::spectral::{Grid, ModeSpectrum};
use modeloss_core::Complex64;

use crate::error::{CliError, Result};

pub const SPECTRUM_HEADER: &[&str] = &["k", "re", "im"];
pub const GAP_SAMPLES_HEADER: &[&str] = &["z", "g"];
pub const ORACLE_HEADER: &[&str] = &["k", "numeric", "analytic", "rel_err"];
pub const DEGRADED_HEADER: &[&str] = &["z", "f", "fprime"];
pub const CHANNEL_HEADER: &[&str] = &["k", "alpha", "beta", "eta", "occupation"];
pub const SWEEP_HEADER: &[&str] = &[
    "iota",
    "seed",
    "final_accuracy",
    "final_loss",
    "epochs_to_threshold",
    "mean_grad_norm_first100",
];

/// A value cell. Floats use `{:?}`, integers plain decimal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    U(u64),
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cell::F(x) => write!(f, "{x:?}"),
            Cell::I(x) => write!(f, "{x}"),
            Cell::U(x) => write!(f, "{x}"),
        }
    }
}

pub fn write_table<I>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = Vec<Cell>>,
{
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let mut first = true;
        for cell in row {
            if !first {
                out.push(',');
            }
            first = false;
            write!(out, "{cell}").unwrap();
        }
        out.push('\n');
    }
    out
}

fn floats(values: &[f64]) -> Vec<Cell> {
    values.iter().map(|&v| Cell::F(v)).collect()
}

/// Splits a table after checking its header; every row must have as many
/// fields as the header.
pub fn read_table<'a>(text: &'a str, header: &[&str]) -> Result<Vec<Vec<&'a str>>> {
    let mut lines = text.lines();
    let found = lines.next().unwrap_or("");
    if found != header.join(",") {
        return Err(CliError::usage(format!(
            "expected header `{}`, found `{found}`",
            header.join(",")
        )));
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != header.len() {
                return Err(CliError::usage(format!(
                    "row {}: expected {} fields, found {}",
                    i + 1,
                    header.len(),
                    fields.len()
                )));
            }
            Ok(fields)
        })
        .collect()
}

fn field<T: std::str::FromStr>(raw: &str) -> Result<T> {
    raw.parse()
        .map_err(|_| CliError::usage(format!("cannot parse CSV field `{raw}`")))
}

fn read_floats(text: &str, header: &[&str]) -> Result<Vec<Vec<f64>>> {
    read_table(text, header)?
        .into_iter()
        .map(|row| row.into_iter().map(field).collect())
        .collect()
}

pub fn spectrum_csv(spectrum: &ModeSpectrum) -> String {
    write_table(
        SPECTRUM_HEADER,
        spectrum.iter().map(|(k, a)| floats(&[k, a.re, a.im])),
    )
}

/// Reads a `k,re,im` table back onto `grid`. Each `k` must sit on the
/// lattice at its row position.
pub fn read_spectrum(text: &str, grid: Grid) -> Result<ModeSpectrum> {
    let rows = read_floats(text, SPECTRUM_HEADER)?;
    let mut amplitudes = Vec::with_capacity(rows.len());
    for (idx, row) in rows.iter().enumerate() {
        if idx >= grid.len() || grid.index_of(row[0])? != idx {
            return Err(CliError::usage(format!("row {}: k = {} is out of place", idx + 1, row[0])));
        }
        amplitudes.push(Complex64::new(row[1], row[2]));
    }
    Ok(ModeSpectrum::new(grid, amplitudes)?)
}

pub fn samples_csv(header: &[&str], grid: &Grid, samples: &[f64]) -> String {
    write_table(header, grid.points().zip(samples).map(|(z, &s)| floats(&[z, s])))
}

/// Generic float table reader for the fixed-header outputs below.
pub fn read_columns(text: &str, header: &[&str]) -> Result<Vec<Vec<f64>>> {
    read_floats(text, header)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleRow {
    pub k: f64,
    pub numeric: f64,
    pub analytic: f64,
    pub rel_err: f64,
}

pub fn oracle_csv(rows: &[OracleRow]) -> String {
    write_table(
        ORACLE_HEADER,
        rows.iter().map(|r| floats(&[r.k, r.numeric, r.analytic, r.rel_err])),
    )
}

pub fn read_oracle(text: &str) -> Result<Vec<OracleRow>> {
    Ok(read_floats(text, ORACLE_HEADER)?
        .into_iter()
        .map(|r| OracleRow {
            k: r[0],
            numeric: r[1],
            analytic: r[2],
            rel_err: r[3],
        })
        .collect())
}

pub fn degraded_csv(activation: &DegradedActivation) -> String {
    let grid = activation.grid();
    write_table(
        DEGRADED_HEADER,
        grid.points()
            .zip(activation.values().iter().zip(activation.derivatives()))
            .map(|(z, (&f, &fp))| floats(&[z, f, fp])),
    )
}

/// `(z, f, fprime)` columns of a degraded-activation table.
pub fn read_degraded(text: &str) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let rows = read_floats(text, DEGRADED_HEADER)?;
    Ok((
        rows.iter().map(|r| r[0]).collect(),
        rows.iter().map(|r| r[1]).collect(),
        rows.iter().map(|r| r[2]).collect(),
    ))
}

pub fn channel_csv(channel: &BogoliubovChannel) -> String {
    let grid = channel.grid();
    write_table(
        CHANNEL_HEADER,
        (0..grid.len()).map(|i| {
            floats(&[
                grid.wavenumber(i),
                channel.alpha(i),
                channel.beta(i),
                channel.transmissivity(i),
                channel.occupation(i),
            ])
        }),
    )
}

/// One sweep row as stored on disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRecord {
    pub iota: f64,
    pub seed: u64,
    pub final_accuracy: f64,
    pub final_loss: f64,
    pub epochs_to_threshold: Option<usize>,
    pub mean_grad_norm_first100: f64,
}

impl From<&SweepRow> for SweepRecord {
    fn from(row: &SweepRow) -> Self {
        let r = &row.report;
        Self {
            iota: row.iota,
            seed: r.seed,
            final_accuracy: r.final_accuracy,
            final_loss: r.final_loss,
            epochs_to_threshold: r.epochs_to_threshold,
            mean_grad_norm_first100: r.mean_grad_norm_first100,
        }
    }
}

/// Sweep table; a run that never met its threshold is written as `-1`.
pub fn sweep_csv(records: &[SweepRecord]) -> String {
    write_table(
        SWEEP_HEADER,
        records.iter().map(|r| {
            vec![
                Cell::F(r.iota),
                Cell::U(r.seed),
                Cell::F(r.final_accuracy),
                Cell::F(r.final_loss),
                Cell::I(r.epochs_to_threshold.map_or(-1, |e| e as i64)),
                Cell::F(r.mean_grad_norm_first100),
            ]
        }),
    )
}

pub fn read_sweep(text: &str) -> Result<Vec<SweepRecord>> {
    read_table(text, SWEEP_HEADER)?
        .into_iter()
        .map(|r| {
            let epochs: i64 = field(r[4])?;
            Ok(SweepRecord {
                iota: field(r[0])?,
                seed: field(r[1])?,
                final_accuracy: field(r[2])?,
                final_loss: field(r[3])?,
                epochs_to_threshold: match epochs {
                    -1 => None,
                    e if e > 0 => Some(e as usize),
                    _ => return Err(CliError::usage(format!("invalid epoch count `{}`", r[4]))),
                },
                mean_grad_norm_first100: field(r[5])?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use modeloss_core::bogoliubov::reconstruct;
    use modeloss_core::spectral::transform_gap;

    #[test]
    fn spectrum_round_trip() {
        let grid = Grid::new(40.0, 256).unwrap();
        let spectrum = transform_gap(&grid);
        let text = spectrum_csv(&spectrum);
        assert!(text.starts_with("k,re,im\n"));
        assert_eq!(read_spectrum(&text, grid).unwrap(), spectrum);
        assert!(read_spectrum(&text, Grid::new(20.0, 256).unwrap()).is_err());
    }

    #[test]
    fn degraded_round_trip() {
        let grid = Grid::new(40.0, 128).unwrap();
        let act = reconstruct(&BogoliubovChannel::uniform(grid, 0.3).unwrap()).unwrap();
        let (z, f, fp) = read_degraded(&degraded_csv(&act)).unwrap();
        assert_eq!(z, grid.points().collect::<Vec<_>>());
        assert_eq!(f, act.values());
        assert_eq!(fp, act.derivatives());
    }

    #[test]
    fn sweep_round_trip_encodes_never() {
        let records = vec![
            SweepRecord {
                iota: 0.25,
                seed: u64::MAX,
                final_accuracy: 1.0,
                final_loss: 1.234e-5,
                epochs_to_threshold: Some(812),
                mean_grad_norm_first100: 0.1 + 0.2,
            },
            SweepRecord {
                iota: 1.0,
                seed: 3,
                final_accuracy: 0.5,
                final_loss: std::f64::consts::LN_2,
                epochs_to_threshold: None,
                mean_grad_norm_first100: 0.0,
            },
        ];
        let text = sweep_csv(&records);
        assert!(text.lines().nth(2).unwrap().contains(",-1,"));
        assert_eq!(read_sweep(&text).unwrap(), records);
    }

    #[test]
    fn header_and_width_are_checked() {
        assert!(read_columns("a,b\n1,2\n", ORACLE_HEADER).is_err());
        assert!(read_columns("z,g\n1\n", GAP_SAMPLES_HEADER).is_err());
        assert!(read_columns("z,g\n1,x\n", GAP_SAMPLES_HEADER).is_err());
        assert!(read_sweep(&format!("{}\n0.0,1,1.0,0.1,0,0.2\n", SWEEP_HEADER.join(","))).is_err());
    }
}
