//! Acceptance checks, one per criterion, each with its measured value.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use modeloss_core::activations::{perceptron_decide, sigmoid, step, ActivationKind, PerceptronConfig};
use modeloss_core::bogoliubov::{
    commutator_residual, compose_power, make_channel, reconstruct, BogoliubovChannel,
};
use modeloss_core::network::{
    batch_gradient, gradient_discrepancy, hidden_gradient_norm, make_dataset, numerical_gradient,
    summarize, sweep_activations, DatasetName, Dense, MlpConfig, Network, SweepRow,
};
use modeloss_core::quadrature::integrate_to_infinity;
use modeloss_core::spectral::{analytic_gap_spectrum, gap, Grid};

use crate::commands::{self, max_rel_err, oracle_rows};
use crate::config::RunConfig;
use crate::error::Result;
use crate::parallel::parallel_sweep;

pub const TANH_TOLERANCE: f64 = 1e-12;
pub const ORACLE_TOLERANCE: f64 = 1e-3;
pub const QUADRATURE_TOLERANCE: f64 = 1e-10;
pub const COMPOSITION_TOLERANCE: f64 = 1e-12;
pub const RECONSTRUCTION_TOLERANCE: f64 = 1e-9;
pub const OCCUPATION_TOLERANCE: f64 = 1e-10;
pub const GRADIENT_TOLERANCE: f64 = 1e-4;
pub const GRADIENT_STEP: f64 = 1e-5;
pub const GRADIENT_CONFIGS: u64 = 100;
pub const SCALING_TOLERANCE: f64 = 1e-3;
pub const MIN_CONVERGED: usize = 8;
pub const SWEEP_LEVELS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
pub const CHANCE_BAND: (f64, f64) = (0.3, 0.7);

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub id: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub measured: String,
    pub seconds: f64,
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} [{}] {}: {} ({:.3} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.measured,
            self.seconds
        )
    }
}

fn timed(id: &'static str, name: &'static str, body: impl FnOnce() -> Result<(bool, String)>) -> Outcome {
    let start = Instant::now();
    let (passed, measured) = body().unwrap_or_else(|e| (false, format!("error: {e}")));
    Outcome {
        id,
        name,
        passed,
        measured,
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub fn tanh_identity() -> Outcome {
    timed("1", "sigmoid-tanh identity", || {
        let n = 10_000;
        let worst = (0..n)
            .map(|i| -30.0 + 60.0 * i as f64 / (n - 1) as f64)
            .map(|z| (sigmoid(z) - 0.5 * ((z / 2.0).tanh() + 1.0)).abs())
            .fold(0.0, f64::max);
        Ok((worst < TANH_TOLERANCE, format!("max error {worst:e} over {n} points")))
    })
}

pub fn perceptron_table() -> Outcome {
    timed("2", "perceptron worked example", || {
        let cfg = PerceptronConfig::new(vec![2.0, 2.0], -3.0)?;
        let expected = [([0.0, 0.0], 0), ([0.0, 1.0], 0), ([1.0, 0.0], 0), ([1.0, 1.0], 1)];
        let mut got = Vec::new();
        for (x, _) in &expected {
            got.push(perceptron_decide(&cfg, x)?);
        }
        let ok = got.iter().zip(&expected).all(|(g, (_, e))| g == e);
        Ok((ok, format!("decisions {got:?}, expected [0, 0, 0, 1]")))
    })
}

fn reference_gap_integral(k: f64) -> f64 {
    2.0 * integrate_to_infinity(|z| (k * z).sin() / (z.exp() + 1.0), 0.0, 1e-14).value
}

/// Oracle comparison for any gap-like function; a corrupted gap fails it.
pub fn gap_oracle_with(gap_fn: fn(f64) -> f64) -> Outcome {
    timed("3", "gap-spectrum oracle", || {
        let quad_err = [0.5, 1.0, 2.0, 5.0]
            .iter()
            .map(|&k| (analytic_gap_spectrum(k).im - reference_gap_integral(k)).abs())
            .fold(0.0, f64::max);
        let rows = oracle_rows(&Grid::default(), gap_fn)?;
        let worst = max_rel_err(&rows);
        let ok = quad_err < QUADRATURE_TOLERANCE && worst < ORACLE_TOLERANCE && !rows.is_empty();
        Ok((
            ok,
            format!(
                "closed form vs quadrature {quad_err:e}; max rel_err {worst:e} over {} lattice k",
                rows.len()
            ),
        ))
    })
}

pub fn gap_oracle() -> Outcome {
    gap_oracle_with(gap)
}

pub fn commutator_dichotomy() -> Outcome {
    timed("4", "commutator residual and composition", || {
        let grid = Grid::default();
        let squeezed = [
            make_channel(grid, |_| 0.0, |k| 0.5 + 0.1 * k.abs().min(10.0))?,
            BogoliubovChannel::thermal(grid, 1.0)?,
            BogoliubovChannel::identity(grid),
        ];
        let unitary_ok = squeezed.iter().all(|c| commutator_residual(c) == 0.0);

        let lossy = [
            BogoliubovChannel::uniform(grid, 0.3)?,
            BogoliubovChannel::lowpass(grid, 2.0)?,
            make_channel(grid, |k| 0.9 / (1.0 + k * k), |_| 0.2)?,
        ];
        let lossy_ok = lossy.iter().all(|c| {
            let max_iota = c.loss().iter().copied().fold(0.0, f64::max);
            commutator_residual(c) == max_iota
        });

        let iota: f64 = 0.3;
        let base = BogoliubovChannel::uniform(grid, iota)?;
        let comp_err = (1..=20)
            .map(|n| (commutator_residual(&compose_power(&base, n)) - (1.0 - (1.0 - iota).powi(n as i32))).abs())
            .fold(0.0, f64::max);
        let ok = unitary_ok && lossy_ok && comp_err <= COMPOSITION_TOLERANCE;
        Ok((
            ok,
            format!("unitary zero: {unitary_ok}; lossy = max iota: {lossy_ok}; composition error {comp_err:e}"),
        ))
    })
}

pub fn reconstruction_endpoints() -> Outcome {
    timed("5", "reconstruction endpoints", || {
        let grid = Grid::default();
        let zs: Vec<f64> = grid.points().collect();
        let max_dev = |values: &[f64], f: &dyn Fn(f64) -> f64| {
            zs.iter().zip(values).map(|(&z, v)| (v - f(z)).abs()).fold(0.0, f64::max)
        };
        let pristine = reconstruct(&BogoliubovChannel::uniform(grid, 0.0)?)?;
        let sigmoid_dev = max_dev(pristine.values(), &sigmoid);
        let frozen = reconstruct(&BogoliubovChannel::uniform(grid, 1.0)?)?;
        let exact_step = zs.iter().zip(frozen.values()).all(|(&z, &f)| f == step(z));
        let mut closed_dev: f64 = 0.0;
        for iota in [0.1, 0.25, 0.5, 0.75, 0.9] {
            let act = reconstruct(&BogoliubovChannel::uniform(grid, iota)?)?;
            let a = (1.0 - iota).sqrt();
            closed_dev = closed_dev.max(max_dev(act.values(), &|z| step(z) + a * gap(z)));
        }
        let ok = sigmoid_dev < RECONSTRUCTION_TOLERANCE && exact_step && closed_dev < RECONSTRUCTION_TOLERANCE;
        Ok((
            ok,
            format!("iota 0 vs sigmoid {sigmoid_dev:e}; iota 1 exact step: {exact_step}; closed form {closed_dev:e}"),
        ))
    })
}

pub fn thermal_occupation() -> Outcome {
    timed("6", "thermal mode occupation", || {
        let grid = Grid::default();
        let mut worst: f64 = 0.0;
        let mut points = 0;
        for temperature in [0.5, 1.0, 2.0] {
            let ch = BogoliubovChannel::thermal(grid, temperature)?;
            for n in 1..=20 {
                let idx = (grid.len() / 2) + n;
                let k = grid.wavenumber(idx);
                let planck = 1.0 / (k / temperature).exp_m1();
                worst = worst.max((ch.occupation(idx) - planck).abs());
                points += 1;
            }
        }
        Ok((worst < OCCUPATION_TOLERANCE, format!("max |N_k - planck| {worst:e} at {points} points")))
    })
}

pub fn gradient_check() -> Outcome {
    timed("7", "backprop vs central differences", || {
        let dataset = make_dataset(DatasetName::Xor, 0);
        let config = MlpConfig::xor(ActivationKind::Sigmoid);
        let all: Vec<usize> = (0..dataset.len()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut worst: f64 = 0.0;
        for _ in 0..GRADIENT_CONFIGS {
            let mut net = Network::zeros(&config.layer_sizes);
            for layer in &mut net.layers {
                for p in layer.weights.iter_mut().chain(layer.biases.iter_mut()) {
                    *p = rng.random_range(-2.0..=2.0);
                }
            }
            let (analytic, _) = batch_gradient(&config, &net, &dataset, &all)?;
            let numeric = numerical_gradient(&config, &net, &dataset, &all, GRADIENT_STEP)?;
            worst = worst.max(gradient_discrepancy(&analytic, &numeric));
        }
        Ok((
            worst < GRADIENT_TOLERANCE,
            format!("max relative discrepancy {worst:e} over {GRADIENT_CONFIGS} configurations"),
        ))
    })
}

/// The weight point for the scaling check: zero first layer, output layer
/// from the seed-0 initialization. Every hidden unit then sits at z = 0, so
/// the forward pass is the same for every loss level.
pub fn scaling_point(config: &MlpConfig) -> Network {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut net = Network::init(&config.layer_sizes, &mut rng);
    let first = &net.layers[0];
    net.layers[0] = Dense::zeros(first.inputs, first.outputs);
    net
}

/// Hidden-gradient norms at [`scaling_point`] for each level.
pub fn scaling_norms(grid: Grid, levels: &[f64]) -> Result<Vec<f64>> {
    let dataset = make_dataset(DatasetName::Xor, 0);
    let base = MlpConfig::xor(ActivationKind::Sigmoid);
    let point = scaling_point(&base);
    sweep_activations(grid, levels)?
        .into_iter()
        .map(|act| Ok(hidden_gradient_norm(&base.clone().with_activation(act), &point, &dataset)?))
        .collect()
}

/// Largest scaling defect: relative for ι < 1, absolute at ι = 1.
pub fn scaling_defect(levels: &[f64], norms: &[f64]) -> f64 {
    let reference = norms[0];
    levels
        .iter()
        .zip(norms)
        .map(|(&iota, &norm)| {
            let expected = (1.0 - iota).sqrt() * reference;
            if expected == 0.0 {
                norm.abs()
            } else {
                (norm - expected).abs() / expected
            }
        })
        .fold(0.0, f64::max)
}

pub fn xor_sweep() -> Result<Vec<SweepRow>> {
    let seeds: Vec<u64> = (0..10).collect();
    parallel_sweep(
        &MlpConfig::xor(ActivationKind::Sigmoid),
        &make_dataset(DatasetName::Xor, 0),
        Grid::default(),
        &SWEEP_LEVELS,
        &seeds,
    )
}

pub fn learning_degradation() -> Outcome {
    timed("8", "learning-capability degradation", || {
        let rows = xor_sweep()?;
        let summary = summarize(&rows);
        let first = &summary[0];
        let last = summary.last().expect("five levels");
        let converge_ok = first.converged >= MIN_CONVERGED && first.median_epochs.is_some();
        let never_ok = last.median_epochs.is_none();
        let frozen_ok = rows
            .iter()
            .filter(|r| r.iota == 1.0)
            .all(|r| r.report.mean_grad_norm_first100 == 0.0);
        let norms: Vec<f64> = summary.iter().map(|s| s.median_grad_norm).collect();
        let monotone_ok = norms.windows(2).all(|w| w[1] <= w[0]);
        let scaling = scaling_defect(&SWEEP_LEVELS, &scaling_norms(Grid::default(), &SWEEP_LEVELS)?);
        let scaling_ok = scaling <= SCALING_TOLERANCE;

        let mark = |b: bool| if b { "ok" } else { "FAIL" };
        let norms_text: Vec<String> = norms.iter().map(|n| format!("{n:.3e}")).collect();
        Ok((
            converge_ok && never_ok && frozen_ok && monotone_ok && scaling_ok,
            format!(
                "iota 0 converged {}/{} [{}]; iota 1 median never [{}]; iota 1 hidden gradients zero [{}]; \
                 median grad norms [{}] non-increasing [{}]; sqrt(1-iota) scaling defect {scaling:e} [{}]",
                first.converged,
                first.runs,
                mark(converge_ok),
                mark(never_ok),
                mark(frozen_ok),
                norms_text.join(", "),
                mark(monotone_ok),
                mark(scaling_ok),
            ),
        ))
    })
}

/// Every command's CSVs, produced twice from one resolved config.
pub fn determinism() -> Outcome {
    timed("9", "deterministic outputs", || {
        let base = RunConfig::default();
        let runs = |()| -> Result<Vec<(String, String)>> {
            let mut files = Vec::new();
            let mut take = |prefix: &str, out: commands::CommandOutput| {
                files.extend(out.csv_files().map(|(n, c)| (format!("{prefix}/{n}"), c.clone())));
            };
            take("spectrum", commands::spectrum(&base)?);
            take("channel", commands::channel(&base.with(&[("channel.profile", "thermal")])?, 2)?);
            take("degrade", commands::degrade(&base.with(&[("channel.iota", "0,0.5,1")])?)?);
            take("sweep", commands::train_sweep(&base.with(&[("sweep.levels", "0,1")])?)?);
            Ok(files)
        };
        let a = runs(())?;
        let b = runs(())?;
        let differing: Vec<&str> = a
            .iter()
            .zip(&b)
            .filter(|(x, y)| x != y)
            .map(|(x, _)| x.0.as_str())
            .collect();
        let ok = a.len() == b.len() && differing.is_empty();
        Ok((
            ok,
            if ok {
                format!("{} CSV files bit-identical across reruns", a.len())
            } else {
                format!("differing: {}", differing.join(", "))
            },
        ))
    })
}

pub fn moons_sweep() -> Result<Vec<SweepRow>> {
    let seeds: Vec<u64> = (0..10).collect();
    parallel_sweep(
        &MlpConfig::moons(ActivationKind::Sigmoid),
        &make_dataset(DatasetName::Moons, 0),
        Grid::default(),
        &SWEEP_LEVELS,
        &seeds,
    )
}

pub fn moons_chance_band() -> Outcome {
    timed("M", "moons sweep, chance band at iota 1", || {
        let rows = moons_sweep()?;
        let frozen: Vec<f64> = rows.iter().filter(|r| r.iota == 1.0).map(|r| r.report.final_accuracy).collect();
        let lo = frozen.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = frozen.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let ok = lo >= CHANCE_BAND.0 && hi <= CHANCE_BAND.1;
        let summary = summarize(&rows);
        let accs: Vec<String> = summary.iter().map(|s| format!("{}", s.median_accuracy)).collect();
        Ok((
            ok,
            format!(
                "iota 1 accuracy range [{lo}, {hi}] vs band [{}, {}]; median accuracy by level [{}]",
                CHANCE_BAND.0,
                CHANCE_BAND.1,
                accs.join(", ")
            ),
        ))
    })
}

/// Runs every criterion; `full` adds the Moons sweep.
pub fn run_all(full: bool) -> Vec<Outcome> {
    let mut out = vec![
        tanh_identity(),
        perceptron_table(),
        gap_oracle(),
        commutator_dichotomy(),
        reconstruction_endpoints(),
        thermal_occupation(),
        gradient_check(),
        learning_degradation(),
        determinism(),
    ];
    if full {
        out.push(moons_chance_band());
    }
    out
}
