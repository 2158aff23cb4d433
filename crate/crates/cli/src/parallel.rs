//! Sweep cells spread over scoped threads.

use std::num::NonZeroUsize;
use std::thread;

use modeloss_core::network::{sweep_activations, train, Dataset, MlpConfig, SweepRow};
use modeloss_core::spectral::Grid;

use crate::error::Result;

fn worker_count(cells: usize) -> usize {
    thread::available_parallelism()
        .map(NonZeroUsize::get)
        .unwrap_or(1)
        .min(cells)
        .max(1)
}

/// Same rows, in the same level-major order, as the sequential core sweep.
pub fn parallel_sweep(
    template: &MlpConfig,
    dataset: &Dataset,
    grid: Grid,
    levels: &[f64],
    seeds: &[u64],
) -> Result<Vec<SweepRow>> {
    let activations = sweep_activations(grid, levels)?;
    let cells: Vec<(f64, MlpConfig)> = levels
        .iter()
        .zip(&activations)
        .flat_map(|(&iota, act)| {
            seeds.iter().map(move |&seed| {
                let cfg = template.clone().with_activation(act.clone()).with_seed(seed);
                (iota, cfg)
            })
        })
        .collect();
    if cells.is_empty() {
        return Ok(Vec::new());
    }
    let chunk = cells.len().div_ceil(worker_count(cells.len()));
    let results: Vec<Result<Vec<SweepRow>>> = thread::scope(|scope| {
        let handles: Vec<_> = cells
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    part.iter()
                        .map(|(iota, cfg)| {
                            Ok(SweepRow {
                                iota: *iota,
                                report: train(cfg, dataset)?,
                            })
                        })
                        .collect()
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep worker panicked"))
            .collect()
    });
    let mut rows = Vec::with_capacity(cells.len());
    for part in results {
        rows.extend(part?);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use modeloss_core::activations::ActivationKind;
    use modeloss_core::network::{make_dataset, sweep, DatasetName};

    #[test]
    fn matches_sequential_sweep() {
        let template = MlpConfig::xor(ActivationKind::Sigmoid);
        let dataset = make_dataset(DatasetName::Xor, 0);
        let grid = Grid::new(40.0, 1024).unwrap();
        let levels = [0.0, 0.5, 1.0];
        let seeds = [3, 1, 4];
        let parallel = parallel_sweep(&template, &dataset, grid, &levels, &seeds).unwrap();
        assert_eq!(parallel, sweep(&template, &dataset, grid, &levels, &seeds).unwrap());
        assert!(parallel_sweep(&template, &dataset, grid, &[], &seeds).unwrap().is_empty());
    }
}
