//! Uniform grid, the sigmoid–step gap and its mode spectrum.
//!
//! Conventions: the forward transform approximates `∫ f(z) e^{−ikz} dz`
//! with no `1/2π`; the inverse carries `1/(2L)` per lattice bin. Spectra are
//! stored in ascending wavenumber order, bin `i` holding `k = π(i − N/2)/L`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::activations::{sigmoid, step};
use crate::fft::{fft_in_place, Direction};
use crate::{Error, Result};

/// Tolerance for the conjugate-symmetry precondition of [`inverse_transform`].
pub const SYMMETRY_TOLERANCE: f64 = 1e-6;

/// Sample points `z_j = −L + j·dz`, `j ∈ [0, N)`, and the conjugate lattice
/// `k_n = πn/L`, `n ∈ [−N/2, N/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    half_width: f64,
    n_points: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Self {
            half_width: 40.0,
            n_points: 4096,
        }
    }
}

impl Grid {
    pub fn new(half_width: f64, n_points: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::config("grid half-width must be positive and finite"));
        }
        if n_points < 2 || !n_points.is_power_of_two() {
            return Err(Error::config("grid size must be a power of two, at least 2"));
        }
        Ok(Self {
            half_width,
            n_points,
        })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n_points as f64
    }

    pub fn point(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.spacing()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |j| self.point(j))
    }

    pub fn sample<F: Fn(f64) -> f64>(&self, f: F) -> Vec<f64> {
        self.points().map(f).collect()
    }

    /// Mode number `n` of spectrum bin `idx`.
    pub fn mode_number(&self, idx: usize) -> i64 {
        idx as i64 - (self.n_points / 2) as i64
    }

    pub fn wavenumber(&self, idx: usize) -> f64 {
        PI * self.mode_number(idx) as f64 / self.half_width
    }

    pub fn wavenumbers(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |i| self.wavenumber(i))
    }

    /// Bin holding wavenumber `-k(idx)`; the Nyquist bin is its own mirror.
    pub fn mirror(&self, idx: usize) -> usize {
        (self.n_points - idx) % self.n_points
    }

    /// Bin index of a lattice wavenumber.
    pub fn index_of(&self, k: f64) -> Result<usize> {
        if !k.is_finite() {
            return Err(Error::OffLattice(k));
        }
        let n = libm::round(k * self.half_width / PI);
        let half = (self.n_points / 2) as f64;
        if n < -half || n >= half {
            return Err(Error::OffLattice(k));
        }
        let idx = (n + half) as usize;
        let tol = 1e-9 * k.abs().max(1.0);
        if (self.wavenumber(idx) - k).abs() > tol {
            return Err(Error::OffLattice(k));
        }
        Ok(idx)
    }

    /// The same window at half the resolution.
    pub fn coarsened(&self) -> Result<Self> {
        Self::new(self.half_width, self.n_points / 2)
    }
}

/// Complex mode amplitudes on a grid's wavenumber lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSpectrum {
    grid: Grid,
    amplitudes: Vec<Complex64>,
}

impl ModeSpectrum {
    pub fn new(grid: Grid, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != grid.len() {
            return Err(Error::Dimension {
                expected: grid.len(),
                got: amplitudes.len(),
            });
        }
        Ok(Self { grid, amplitudes })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            amplitudes: alloc::vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// `(k, amplitude)` pairs in ascending `k`.
    pub fn iter(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        self.amplitudes
            .iter()
            .enumerate()
            .map(move |(i, a)| (self.grid.wavenumber(i), *a))
    }

    pub fn at(&self, k: f64) -> Result<Complex64> {
        Ok(self.amplitudes[self.grid.index_of(k)?])
    }

    /// Per-bin rescaling by a real factor.
    pub fn scaled_by<F: Fn(usize) -> f64>(&self, factor: F) -> Self {
        Self {
            grid: self.grid,
            amplitudes: self
                .amplitudes
                .iter()
                .enumerate()
                .map(|(i, a)| a * factor(i))
                .collect(),
        }
    }

    /// `max |a(−k) − conj(a(k))|` over the lattice.
    pub fn symmetry_defect(&self) -> f64 {
        (0..self.len())
            .map(|i| (self.amplitudes[self.grid.mirror(i)] - self.amplitudes[i].conj()).norm())
            .fold(0.0, f64::max)
    }

    /// `Σ |a(k)|²`.
    pub fn power(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// `g(z) = σ(z) − θ(z)`, evaluated as `−sign(z)/(1 + e^{|z|})`.
pub fn gap(z: f64) -> f64 {
    if z == 0.0 {
        0.0
    } else {
        -libm::copysign(1.0, z) / (1.0 + libm::exp(z.abs()))
    }
}

/// Sigmoid samples assembled as step carrier plus gap.
pub fn sigmoid_from_gap(z: f64) -> f64 {
    step(z) + gap(z)
}

fn alternating(n: i64) -> f64 {
    if n.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Rectangle-rule transform `dz·Σ_j f(z_j) e^{−ik z_j}` of grid samples.
pub fn transform_samples(grid: &Grid, samples: &[f64]) -> Result<ModeSpectrum> {
    let n = grid.len();
    if samples.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: samples.len(),
        });
    }
    let mut data: Vec<Complex64> = samples.iter().map(|&s| Complex64::new(s, 0.0)).collect();
    fft_in_place(&mut data, Direction::Forward);
    let dz = grid.spacing();
    // z_j = −L + j·dz turns e^{−ik_n z_j} into (−1)^n e^{−2πi nj/N}
    let amplitudes = (0..n)
        .map(|idx| {
            let mode = grid.mode_number(idx);
            let bin = mode.rem_euclid(n as i64) as usize;
            data[bin] * (dz * alternating(mode))
        })
        .collect();
    ModeSpectrum::new(*grid, amplitudes)
}

pub fn transform_function<F: Fn(f64) -> f64>(grid: &Grid, f: F) -> ModeSpectrum {
    transform_samples(grid, &grid.sample(f)).expect("grid-sized samples")
}

/// Mode spectrum of the gap on `grid`. This is the discrete transform that
/// [`inverse_transform`] inverts exactly.
pub fn transform_gap(grid: &Grid) -> ModeSpectrum {
    transform_function(grid, gap)
}

/// Estimate of the continuous transform `∫ f(z) e^{−ikz} dz` on the lattice
/// shared by `grid` and its half-resolution companion.
///
/// The rectangle rule has an `O(dz²)` error whenever `f` jumps (the gap
/// jumps by −1 at the origin). Both grids see the same lattice `k = πn/L`,
/// so one Richardson step `(4·fine − coarse)/3` removes that term.
pub fn continuous_transform_estimate<F: Fn(f64) -> f64>(
    grid: &Grid,
    f: F,
) -> Result<Vec<(f64, Complex64)>> {
    let coarse_grid = grid.coarsened()?;
    let fine = transform_function(grid, &f);
    let coarse = transform_function(&coarse_grid, &f);
    let offset = (grid.len() - coarse_grid.len()) / 2;
    Ok(coarse
        .iter()
        .enumerate()
        .map(|(i, (k, c))| (k, (fine.amplitudes()[i + offset] * 4.0 - c) / 3.0))
        .collect())
}

pub fn continuous_gap_transform(grid: &Grid) -> Result<Vec<(f64, Complex64)>> {
    continuous_transform_estimate(grid, gap)
}

/// Closed form `i·(1/k − π/sinh(πk))` of `∫ g(z) e^{−ikz} dz`.
pub fn analytic_gap_spectrum(k: f64) -> Complex64 {
    if k == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let im = if k.abs() < 1e-4 {
        let pi2 = PI * PI;
        pi2 * k / 6.0 - 7.0 * pi2 * pi2 * k * k * k / 360.0
    } else {
        1.0 / k - PI / libm::sinh(PI * k)
    };
    Complex64::new(0.0, im)
}

/// Inverse transform returning complex samples; the imaginary part is the
/// residue that [`inverse_transform`] discards.
pub fn inverse_transform_complex(spectrum: &ModeSpectrum) -> Vec<Complex64> {
    let grid = spectrum.grid();
    let n = grid.len();
    let mut data = alloc::vec![Complex64::new(0.0, 0.0); n];
    for (idx, amp) in spectrum.amplitudes().iter().enumerate() {
        let mode = grid.mode_number(idx);
        data[mode.rem_euclid(n as i64) as usize] = amp * alternating(mode);
    }
    fft_in_place(&mut data, Direction::Inverse);
    let norm = 1.0 / (2.0 * grid.half_width());
    data.iter().map(|d| d * norm).collect()
}

/// Real samples on the grid whose [`transform_samples`] is `spectrum`.
pub fn inverse_transform(spectrum: &ModeSpectrum) -> Result<Vec<f64>> {
    let defect = spectrum.symmetry_defect();
    if defect.is_nan() || defect > SYMMETRY_TOLERANCE {
        return Err(Error::SymmetryViolation(defect));
    }
    Ok(inverse_transform_complex(spectrum)
        .iter()
        .map(|c| c.re)
        .collect())
}

/// Normalized Parseval defect
/// `|dz·Σ|f_j|² − Σ|f̂_n|²/(2L)| / (dz·Σ|f_j|²)`; zero for the zero function.
pub fn parseval_check(spectrum: &ModeSpectrum, samples: &[f64]) -> Result<f64> {
    let grid = spectrum.grid();
    if samples.len() != grid.len() {
        return Err(Error::Dimension {
            expected: grid.len(),
            got: samples.len(),
        });
    }
    let direct = grid.spacing() * samples.iter().map(|s| s * s).sum::<f64>();
    let modal = spectrum.power() / (2.0 * grid.half_width());
    if direct == 0.0 {
        return Ok(if modal == 0.0 { 0.0 } else { 1.0 });
    }
    Ok((direct - modal).abs() / direct)
}

/// Samples of `σ(z)` on the grid, as assembled from the carrier and the gap.
pub fn sigmoid_samples(grid: &Grid) -> Vec<f64> {
    grid.sample(sigmoid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate_to_infinity;

    fn max_abs(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::new(40.0, 4096).is_ok());
        assert!(Grid::new(40.0, 1000).is_err());
        assert!(Grid::new(0.0, 64).is_err());
        assert!(Grid::new(f64::INFINITY, 64).is_err());
        let g = Grid::default();
        assert_eq!(g.spacing() * g.len() as f64, 2.0 * g.half_width());
        assert_eq!(g.point(g.len() / 2), 0.0);
    }

    #[test]
    fn lattice_is_symmetric_except_nyquist() {
        let g = Grid::new(10.0, 64).unwrap();
        for i in 1..g.len() {
            assert_eq!(g.wavenumber(i), -g.wavenumber(g.mirror(i)));
        }
        assert_eq!(g.mirror(0), 0);
        assert_eq!(g.wavenumber(0), -PI * 32.0 / 10.0);
    }

    #[test]
    fn lattice_lookup() {
        let g = Grid::new(10.0 * PI, 256).unwrap();
        assert_eq!(g.index_of(1.0).unwrap(), 128 + 10);
        assert_eq!(g.index_of(0.0).unwrap(), 128);
        assert!(matches!(g.index_of(1.05), Err(Error::OffLattice(_))));
        assert!(g.index_of(1e6).is_err());
    }

    #[test]
    fn gap_values() {
        assert_eq!(gap(0.0), 0.0);
        let expected = sigmoid(2.0) - 1.0;
        assert!((gap(2.0) - expected).abs() < 1e-15);
        assert!((gap(2.0) + 0.119_202_922_022_117_6).abs() < 1e-15);
        for i in 0..1000 {
            let z = 0.037 * i as f64;
            assert_eq!(gap(-z), -gap(z));
            assert!((sigmoid_from_gap(z) - sigmoid(z)).abs() < 1e-15);
            assert!((sigmoid_from_gap(-z) - sigmoid(-z)).abs() < 1e-15);
        }
    }

    #[test]
    fn gap_spectrum_is_odd_and_conjugate_symmetric() {
        let g = Grid::default();
        let s = transform_gap(&g);
        assert!(s.symmetry_defect() < 1e-12);
        for (k, a) in s.iter() {
            if k != 0.0 {
                assert!(a.re.abs() < 1e-8, "k = {k}");
            }
        }
    }

    #[test]
    fn analytic_form_against_quadrature() {
        for k in [0.5, 1.0, 2.0, 5.0] {
            let quad = integrate_to_infinity(
                |z| libm::sin(k * z) / (libm::exp(z) + 1.0),
                0.0,
                1e-14,
            );
            let reference = 2.0 * quad.value;
            let closed = analytic_gap_spectrum(k).im;
            assert!((closed - reference).abs() < 1e-10, "k = {k}: {closed} vs {reference}");
        }
        assert!((analytic_gap_spectrum(1.0).im - 0.727_97).abs() < 1e-5);
    }

    #[test]
    fn analytic_small_k_branch() {
        assert_eq!(analytic_gap_spectrum(0.0), Complex64::new(0.0, 0.0));
        let k = 0.001;
        let taylor = PI * PI * k / 6.0 - 7.0 * PI.powi(4) * k * k * k / 360.0;
        assert!((analytic_gap_spectrum(k).im - taylor).abs() < 1e-12);
        assert!((analytic_gap_spectrum(k).im - 1.6449e-3).abs() < 1e-7);
        // the direct branch just above the switch still agrees with the series
        let k = 1.000_01e-4;
        let series = PI * PI * k / 6.0 - 7.0 * PI.powi(4) * k * k * k / 360.0;
        assert!((analytic_gap_spectrum(k).im - series).abs() < 1e-12);
        assert!(analytic_gap_spectrum(-2.0).im == -analytic_gap_spectrum(2.0).im);
    }

    #[test]
    fn round_trip_and_linearity() {
        let g = Grid::default();
        let samples = g.sample(gap);
        let spectrum = transform_gap(&g);
        let back = inverse_transform(&spectrum).unwrap();
        assert!(max_abs(&back, &samples) < 1e-9);
        let residue = inverse_transform_complex(&spectrum)
            .iter()
            .map(|c| c.im.abs())
            .fold(0.0, f64::max);
        assert!(residue < 1e-9);

        let halved = inverse_transform(&spectrum.scaled_by(|_| 0.5)).unwrap();
        let expected: Vec<f64> = samples.iter().map(|s| s / 2.0).collect();
        assert!(max_abs(&halved, &expected) < 1e-9);

        let zero = inverse_transform(&ModeSpectrum::zeros(g)).unwrap();
        assert!(zero.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn asymmetric_spectrum_is_rejected() {
        let g = Grid::new(10.0, 64).unwrap();
        let mut amps = alloc::vec![Complex64::new(0.0, 0.0); 64];
        amps[40] = Complex64::new(1.0, 0.0);
        let s = ModeSpectrum::new(g, amps).unwrap();
        assert!(matches!(inverse_transform(&s), Err(Error::SymmetryViolation(_))));
        assert!(ModeSpectrum::new(g, alloc::vec![]).is_err());
    }

    #[test]
    fn parseval() {
        let g = Grid::default();
        let samples = g.sample(gap);
        assert!(parseval_check(&transform_gap(&g), &samples).unwrap() < 1e-9);

        let zeros = alloc::vec![0.0; g.len()];
        assert_eq!(parseval_check(&ModeSpectrum::zeros(g), &zeros).unwrap(), 0.0);

        let k5 = g.wavenumber(g.len() / 2 + 5);
        let harmonic = g.sample(|z| libm::cos(k5 * z));
        let spectrum = transform_samples(&g, &harmonic).unwrap();
        assert!(parseval_check(&spectrum, &harmonic).unwrap() < 1e-12);
    }

    #[test]
    fn transform_is_linear() {
        let g = Grid::new(20.0, 512).unwrap();
        let f = |z: f64| libm::exp(-z * z);
        let h = |z: f64| z * libm::exp(-z.abs());
        let a = transform_function(&g, f);
        let b = transform_function(&g, h);
        let combo = transform_function(&g, |z| 2.0 * f(z) - 3.0 * h(z));
        for i in 0..g.len() {
            let expected = a.amplitudes()[i] * 2.0 - b.amplitudes()[i] * 3.0;
            assert!((combo.amplitudes()[i] - expected).norm() < 1e-12);
        }
    }
}
