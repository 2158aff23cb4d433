//! Subcommand bodies. Each returns its files and report lines in memory;
//! nothing touches the disk until [`CommandOutput::write_to`].

use std::fs;
use std::path::Path;

use modeloss_core::activations::{sigmoid, step, ActivationKind};
use modeloss_core::bogoliubov::{commutator_residual, compose_power, reconstruct, BogoliubovChannel, Profile};
use modeloss_core::network::{make_dataset, summarize, LevelSummary, MlpConfig, SweepRow};
use modeloss_core::spectral::{
    analytic_gap_spectrum, continuous_transform_estimate, gap, parseval_check, transform_function, Grid,
};

use crate::config::{RunConfig, RESOLVED_FILE};
use crate::csv::{self, OracleRow, SweepRecord};
use crate::error::{CliError, Result};
use crate::kv;
use crate::parallel::parallel_sweep;
use crate::svg::{self, Panel, Series};

/// Wavenumber band of the oracle comparison.
pub const ORACLE_BAND: (f64, f64) = (0.1, 10.0);
/// Window of the degraded-activation plot.
pub const PLOT_WINDOW: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CommandOutput {
    /// `(file name, contents)` in write order.
    pub files: Vec<(String, String)>,
    pub lines: Vec<String>,
}

impl CommandOutput {
    fn new(config: &RunConfig) -> Self {
        let mut out = Self::default();
        out.file(RESOLVED_FILE, config.resolved_text());
        out
    }

    fn file(&mut self, name: impl Into<String>, contents: String) {
        self.files.push((name.into(), contents));
    }

    fn line(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, c)| c.as_str())
    }

    /// The CSV outputs only.
    pub fn csv_files(&self) -> impl Iterator<Item = &(String, String)> {
        self.files.iter().filter(|(n, _)| n.ends_with(".csv"))
    }

    /// Creates `dir` if needed and writes every file.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        for (name, contents) in &self.files {
            let path = dir.join(name);
            fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        }
        Ok(())
    }
}

/// Oracle rows over `ORACLE_BAND` for an arbitrary gap-like function.
pub fn oracle_rows<F: Fn(f64) -> f64>(grid: &Grid, f: F) -> Result<Vec<OracleRow>> {
    let (lo, hi) = ORACLE_BAND;
    Ok(continuous_transform_estimate(grid, f)?
        .into_iter()
        .filter(|(k, _)| (lo..=hi).contains(k))
        .map(|(k, est)| {
            let analytic = analytic_gap_spectrum(k).im;
            OracleRow {
                k,
                numeric: est.im,
                analytic,
                rel_err: (est.im - analytic).abs() / analytic.abs(),
            }
        })
        .collect())
}

pub fn max_rel_err(rows: &[OracleRow]) -> f64 {
    rows.iter().map(|r| r.rel_err).fold(0.0, f64::max)
}

pub fn spectrum(config: &RunConfig) -> Result<CommandOutput> {
    let grid = config.grid;
    let mut out = CommandOutput::new(config);
    let samples = grid.sample(gap);
    let spectrum = transform_function(&grid, gap);
    let rows = oracle_rows(&grid, gap)?;

    let (lo, hi) = ORACLE_BAND;
    let raw_err = spectrum
        .iter()
        .filter(|(k, _)| (lo..=hi).contains(k))
        .map(|(k, a)| {
            let exact = analytic_gap_spectrum(k).im;
            (a.im - exact).abs() / exact.abs()
        })
        .fold(0.0, f64::max);

    out.file("gap_samples.csv", csv::samples_csv(csv::GAP_SAMPLES_HEADER, &grid, &samples));
    out.file("gap_spectrum.csv", csv::spectrum_csv(&spectrum));
    out.file("gap_oracle.csv", csv::oracle_csv(&rows));
    let panel = Panel::new("|g(k)|", "k", "magnitude")
        .with(Series::new("numeric", rows.iter().map(|r| (r.k, r.numeric.abs())).collect()))
        .with(Series::new("analytic", rows.iter().map(|r| (r.k, r.analytic.abs())).collect()));
    out.file("gap_spectrum.svg", svg::render(&[panel]));

    out.line(format!("grid: L = {}, N = {}", grid.half_width(), grid.len()));
    out.line(format!("oracle band [{lo}, {hi}]: {} lattice points", rows.len()));
    out.line(format!("max rel_err (extrapolated): {:e}", max_rel_err(&rows)));
    out.line(format!("max rel_err (rectangle rule): {raw_err:e}"));
    out.line(format!("parseval defect: {:e}", parseval_check(&spectrum, &samples)?));
    Ok(out)
}

fn planck(k: f64, temperature: f64) -> f64 {
    if k == 0.0 {
        0.0
    } else {
        1.0 / (k.abs() / temperature).exp_m1()
    }
}

fn nearest_index(grid: &Grid, k: f64) -> usize {
    grid.index_of(k).unwrap_or_else(|_| {
        (0..grid.len())
            .min_by(|&a, &b| (grid.wavenumber(a) - k).abs().total_cmp(&(grid.wavenumber(b) - k).abs()))
            .unwrap_or(0)
    })
}

pub fn channel(config: &RunConfig, compose: usize) -> Result<CommandOutput> {
    let base = config.channel()?;
    let channel = compose_power(&base, compose);
    let mut out = CommandOutput::new(config);
    out.file("channel_modes.csv", csv::channel_csv(&channel));
    out.file("channel.kv", kv::channel_descriptor(&channel));

    out.line(format!("profile: {} (composed {compose}x)", config.profile));
    out.line(format!("commutator residual: {}", commutator_residual(&channel)));
    let idx = nearest_index(channel.grid(), 1.0);
    let k = channel.grid().wavenumber(idx);
    let mut line = format!("occupation at k = {k}: {}", channel.occupation(idx));
    if let [Profile::Thermal { temperature }] = channel.stages() {
        line.push_str(&format!(" (planck {})", planck(k, *temperature)));
    }
    out.line(line);
    Ok(out)
}

fn profile_tag(profile: &Profile) -> String {
    match profile {
        Profile::Uniform { iota } => format!("iota_{iota:?}"),
        Profile::Lowpass { cutoff } => format!("lowpass_kc_{cutoff:?}"),
        Profile::Thermal { temperature } => format!("thermal_T_{temperature:?}"),
        Profile::Custom => "custom".into(),
    }
}

pub fn degrade(config: &RunConfig) -> Result<CommandOutput> {
    let grid = config.grid;
    let mut out = CommandOutput::new(config);
    let mut values = Panel::new("degraded activation", "z", "f");
    let mut slopes = Panel::new("derivative table", "z", "f'");
    for profile in config.profiles()? {
        let tag = profile_tag(&profile);
        let act = reconstruct(&BogoliubovChannel::from_profile(grid, profile)?)?;
        out.file(format!("degraded_{tag}.csv"), csv::degraded_csv(&act));

        let zs: Vec<f64> = grid.points().collect();
        let dev_sigmoid = zs.iter().zip(act.values()).map(|(&z, f)| (f - sigmoid(z)).abs()).fold(0.0, f64::max);
        let dev_step = zs.iter().zip(act.values()).map(|(&z, f)| (f - step(z)).abs()).fold(0.0, f64::max);
        let exact_step = zs.iter().zip(act.values()).all(|(&z, &f)| f == step(z));
        out.line(format!(
            "{tag}: loss_fraction {} | max |f - sigmoid| {dev_sigmoid:e} | max |f - step| {dev_step:e} | exact step: {}",
            act.loss_fraction(),
            if exact_step { "yes" } else { "no" }
        ));

        let window = |table: &[f64]| -> Vec<(f64, f64)> {
            zs.iter()
                .zip(table)
                .filter(|(z, _)| z.abs() <= PLOT_WINDOW)
                .map(|(&z, &v)| (z, v))
                .collect()
        };
        values.series.push(Series::new(tag.clone(), window(act.values())));
        slopes.series.push(Series::new(tag, window(act.derivatives())));
    }
    out.file("degraded.svg", svg::render(&[values, slopes]));
    Ok(out)
}

/// Whether the sweep degrades monotonically: median epochs finite at the
/// lowest level, "never" at a level of 1, and non-decreasing in between.
pub fn monotone_degradation(summary: &[LevelSummary]) -> bool {
    let epochs = |s: &LevelSummary| s.median_epochs.unwrap_or(f64::INFINITY);
    let first_finite = summary.first().is_some_and(|s| s.median_epochs.is_some());
    let full_loss_never = summary.iter().filter(|s| s.iota == 1.0).all(|s| s.median_epochs.is_none());
    let ordered = summary.windows(2).all(|w| epochs(&w[0]) <= epochs(&w[1]));
    first_finite && full_loss_never && ordered
}

pub fn run_sweep(config: &RunConfig) -> Result<Vec<SweepRow>> {
    let template = MlpConfig::for_task(config.task, ActivationKind::Sigmoid);
    let dataset = make_dataset(config.task, 0);
    parallel_sweep(&template, &dataset, config.grid, &config.levels, &config.seeds)
}

fn fmt_epochs(e: Option<f64>) -> String {
    e.map_or_else(|| "never".to_string(), |v| v.to_string())
}

pub fn train_sweep(config: &RunConfig) -> Result<CommandOutput> {
    let rows = run_sweep(config)?;
    let summary = summarize(&rows);
    let mut out = CommandOutput::new(config);
    let records: Vec<SweepRecord> = rows.iter().map(SweepRecord::from).collect();
    out.file("sweep.csv", csv::sweep_csv(&records));

    let series = |label: &str, f: &dyn Fn(&LevelSummary) -> f64| {
        Series::new(label, summary.iter().map(|s| (s.iota, f(s))).collect())
    };
    let panels = [
        Panel::new("median epochs to threshold", "iota", "epochs")
            .with(series("epochs", &|s| s.median_epochs.unwrap_or(f64::INFINITY))),
        Panel::new("median gradient norm, first 100 epochs", "iota", "norm")
            .with(series("grad norm", &|s| s.median_grad_norm)),
        Panel::new("median final accuracy", "iota", "accuracy").with(series("accuracy", &|s| s.median_accuracy)),
    ];
    out.file("trainability.svg", svg::render(&panels));

    out.line(format!("task: {}, {} seeds per level", config.task.as_str(), config.seeds.len()));
    for s in &summary {
        out.line(format!(
            "iota {}: median epochs {} | converged {}/{} | median grad norm {:e} | median accuracy {}",
            s.iota,
            fmt_epochs(s.median_epochs),
            s.converged,
            s.runs,
            s.median_grad_norm,
            s.median_accuracy
        ));
    }
    let verdict = if monotone_degradation(&summary) { "PASS" } else { "FAIL" };
    out.line(format!("{verdict} monotone degradation of median epochs to threshold"));
    Ok(out)
}
