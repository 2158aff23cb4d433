//! Mode-diagonal Bogoliubov channels and degraded activations.
//!
//! Each lattice mode gets a squeeze `r_k ≥ 0` and a loss `ι_k ∈ [0, 1]`, with
//!
//! ```text
//! α_k = √(1−ι_k)·cosh r_k      β_k = √(1−ι_k)·sinh r_k
//! η_k = α_k² − β_k² = 1 − ι_k
//! ```
//!
//! `η_k = 1` is the canonical condition `[b, b†] = 1`: the mode algebra, and
//! with it the information, survives whatever the squeeze. The mean gap
//! amplitude of a real field transforms with `α_k − β_k = √(1−ι_k)·e^{−r_k}`,
//! so a lossy channel shrinks the gap and pushes the reconstructed activation
//! from the sigmoid toward the step carrier.

use alloc::vec::Vec;

use crate::activations::{sigmoid_derivative, step};
use crate::spectral::{inverse_transform, transform_function, transform_gap, Grid, ModeSpectrum};
use crate::{Error, Result};

/// Named loss/squeeze profiles a channel can be built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    /// `ι_k = iota` everywhere, no squeeze.
    Uniform { iota: f64 },
    /// `ι_k = 0` for `|k| < cutoff`, 1 above; no squeeze.
    Lowpass { cutoff: f64 },
    /// `r_k = artanh(e^{−|k|/(2T)})`, lossless. Occupation follows the
    /// Planck factor `1/(e^{|k|/T} − 1)`. The zero mode, where that factor
    /// diverges, is left unsqueezed.
    Thermal { temperature: f64 },
    /// Built from caller-supplied profile functions.
    Custom,
}

impl Profile {
    pub fn name(&self) -> &'static str {
        match self {
            Profile::Uniform { .. } => "uniform",
            Profile::Lowpass { .. } => "lowpass",
            Profile::Thermal { .. } => "thermal",
            Profile::Custom => "custom",
        }
    }

    fn loss_at(&self, k: f64) -> f64 {
        match *self {
            Profile::Uniform { iota } => iota,
            Profile::Lowpass { cutoff } => {
                if k.abs() < cutoff {
                    0.0
                } else {
                    1.0
                }
            }
            Profile::Thermal { .. } | Profile::Custom => 0.0,
        }
    }

    fn squeeze_at(&self, k: f64) -> f64 {
        match *self {
            Profile::Thermal { temperature } if k != 0.0 => {
                libm::atanh(libm::exp(-k.abs() / (2.0 * temperature)))
            }
            _ => 0.0,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Profile::Uniform { iota } if !(0.0..=1.0).contains(&iota) => {
                Err(Error::config("uniform loss must lie in [0, 1]"))
            }
            Profile::Lowpass { cutoff } if cutoff.is_nan() || cutoff < 0.0 => {
                Err(Error::config("lowpass cutoff must be non-negative"))
            }
            Profile::Thermal { temperature }
                if !(temperature > 0.0 && temperature.is_finite()) =>
            {
                Err(Error::config("thermal temperature must be positive and finite"))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BogoliubovChannel {
    grid: Grid,
    squeeze: Vec<f64>,
    loss: Vec<f64>,
    /// Profiles applied in order; more than one after composition.
    stages: Vec<Profile>,
}

/// Builds a channel from loss and squeeze profiles sampled on the lattice.
pub fn make_channel<L, S>(grid: Grid, loss_profile: L, squeeze_profile: S) -> Result<BogoliubovChannel>
where
    L: Fn(f64) -> f64,
    S: Fn(f64) -> f64,
{
    BogoliubovChannel::build(grid, loss_profile, squeeze_profile, alloc::vec![Profile::Custom])
}

impl BogoliubovChannel {
    fn build<L, S>(grid: Grid, loss_profile: L, squeeze_profile: S, stages: Vec<Profile>) -> Result<Self>
    where
        L: Fn(f64) -> f64,
        S: Fn(f64) -> f64,
    {
        let mut loss = Vec::with_capacity(grid.len());
        let mut squeeze = Vec::with_capacity(grid.len());
        for k in grid.wavenumbers() {
            let iota = loss_profile(k);
            let r = squeeze_profile(k);
            if !(0.0..=1.0).contains(&iota) {
                return Err(Error::config(alloc::format!("loss {iota} at k = {k} outside [0, 1]")));
            }
            if !(r >= 0.0 && r.is_finite()) {
                return Err(Error::config(alloc::format!("squeeze {r} at k = {k} must be finite and >= 0")));
            }
            loss.push(iota);
            squeeze.push(r);
        }
        Ok(Self {
            grid,
            squeeze,
            loss,
            stages,
        })
    }

    pub fn from_profile(grid: Grid, profile: Profile) -> Result<Self> {
        if profile == Profile::Custom {
            return Err(Error::config("custom profiles need explicit profile functions"));
        }
        profile.validate()?;
        Self::build(
            grid,
            |k| profile.loss_at(k),
            |k| profile.squeeze_at(k),
            alloc::vec![profile],
        )
    }

    pub fn identity(grid: Grid) -> Self {
        Self::uniform(grid, 0.0).expect("zero loss is valid")
    }

    pub fn uniform(grid: Grid, iota: f64) -> Result<Self> {
        Self::from_profile(grid, Profile::Uniform { iota })
    }

    pub fn lowpass(grid: Grid, cutoff: f64) -> Result<Self> {
        Self::from_profile(grid, Profile::Lowpass { cutoff })
    }

    pub fn thermal(grid: Grid, temperature: f64) -> Result<Self> {
        Self::from_profile(grid, Profile::Thermal { temperature })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn stages(&self) -> &[Profile] {
        &self.stages
    }

    pub fn loss(&self) -> &[f64] {
        &self.loss
    }

    pub fn squeeze(&self) -> &[f64] {
        &self.squeeze
    }

    pub fn alpha(&self, idx: usize) -> f64 {
        libm::sqrt(1.0 - self.loss[idx]) * libm::cosh(self.squeeze[idx])
    }

    pub fn beta(&self, idx: usize) -> f64 {
        libm::sqrt(1.0 - self.loss[idx]) * libm::sinh(self.squeeze[idx])
    }

    /// `η_k = α_k² − β_k²`, taken from the parametrization so that lossless
    /// modes give exactly 1.
    pub fn transmissivity(&self, idx: usize) -> f64 {
        1.0 - self.loss[idx]
    }

    /// Mean-amplitude factor `α_k − β_k = √(1−ι_k)·e^{−r_k}`.
    pub fn attenuation(&self, idx: usize) -> f64 {
        libm::sqrt(1.0 - self.loss[idx]) * libm::exp(-self.squeeze[idx])
    }

    /// `⟨N⟩ = |β|²` in bin `idx`.
    pub fn occupation(&self, idx: usize) -> f64 {
        let b = self.beta(idx);
        b * b
    }

    /// Splits the power of `spectrum` into the part the channel keeps and the
    /// part it removes.
    pub fn power_budget(&self, spectrum: &ModeSpectrum) -> PowerBudget {
        let mut kept = 0.0;
        let mut lost = 0.0;
        for (idx, amp) in spectrum.amplitudes().iter().enumerate() {
            let power = amp.norm_sqr();
            let transfer = (1.0 - self.loss[idx]) * libm::exp(-2.0 * self.squeeze[idx]);
            kept += transfer * power;
            lost += (1.0 - transfer) * power;
        }
        PowerBudget {
            kept,
            lost,
            total: spectrum.power(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerBudget {
    pub kept: f64,
    pub lost: f64,
    pub total: f64,
}

/// `max_k |η_k − 1|`. Since `η_k = 1 − ι_k` this is read off as `max_k ι_k`,
/// which keeps it exact.
pub fn commutator_residual(channel: &BogoliubovChannel) -> f64 {
    channel.loss.iter().copied().fold(0.0, f64::max)
}

/// Applies `first` then `second`: transmissivities multiply, squeezes add.
pub fn compose_channels(first: &BogoliubovChannel, second: &BogoliubovChannel) -> Result<BogoliubovChannel> {
    if first.grid != second.grid {
        return Err(Error::config("cannot compose channels on different grids"));
    }
    let loss = first
        .loss
        .iter()
        .zip(&second.loss)
        .map(|(a, b)| 1.0 - (1.0 - a) * (1.0 - b))
        .collect();
    let squeeze = first
        .squeeze
        .iter()
        .zip(&second.squeeze)
        .map(|(a, b)| a + b)
        .collect();
    let mut stages = first.stages.clone();
    stages.extend_from_slice(&second.stages);
    Ok(BogoliubovChannel {
        grid: first.grid,
        squeeze,
        loss,
        stages,
    })
}

/// `n`-fold self-composition; `n = 0` gives the identity channel.
pub fn compose_power(channel: &BogoliubovChannel, n: usize) -> BogoliubovChannel {
    if n == 0 {
        return BogoliubovChannel::identity(channel.grid);
    }
    let mut acc = channel.clone();
    for _ in 1..n {
        acc = compose_channels(&acc, channel).expect("same grid");
    }
    acc
}

/// `|β_k|²` at a lattice wavenumber.
pub fn mode_occupation(channel: &BogoliubovChannel, k: f64) -> Result<f64> {
    Ok(channel.occupation(channel.grid.index_of(k)?))
}

/// Mean-field action on a spectrum: `ĝ'(k) = √(1−ι_k)·e^{−r_k}·ĝ(k)`.
pub fn apply_channel(channel: &BogoliubovChannel, spectrum: &ModeSpectrum) -> Result<ModeSpectrum> {
    if channel.grid != *spectrum.grid() {
        return Err(Error::config("channel and spectrum live on different grids"));
    }
    Ok(spectrum.scaled_by(|i| channel.attenuation(i)))
}

/// Step carrier plus channel-attenuated gap, tabulated on the grid together
/// with its derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct DegradedActivation {
    grid: Grid,
    values: Vec<f64>,
    derivatives: Vec<f64>,
    channel: BogoliubovChannel,
    loss_fraction: f64,
}

/// Rebuilds the activation seen behind `channel`.
///
/// `f(z_j) = θ(z_j) + IFT[a_k·ĝ_k](z_j)` with `a_k` the channel attenuation.
///
/// The gap jumps by −1 at the origin and that jump belongs with the carrier,
/// so the derivative table differentiates only the smooth part: away from
/// the origin `g' = σ'`, and the attenuated jump leaves the kernel
/// `IFT[a_k − a_∞]` (zero for flat profiles). `a_∞` is taken at the Nyquist
/// bin. What remains at the origin is a point mass and is dropped.
pub fn reconstruct(channel: &BogoliubovChannel) -> Result<DegradedActivation> {
    let grid = channel.grid;
    let gap_spectrum = transform_gap(&grid);
    let kept = apply_channel(channel, &gap_spectrum)?;
    let surviving_gap = inverse_transform(&kept)?;
    let values = grid
        .points()
        .zip(&surviving_gap)
        .map(|(z, g)| step(z) + g)
        .collect();

    let slope_spectrum = transform_function(&grid, sigmoid_derivative);
    let far = channel.attenuation(0);
    let derivative_spectrum = ModeSpectrum::new(
        grid,
        slope_spectrum
            .amplitudes()
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let a = channel.attenuation(i);
                s * a - (a - far)
            })
            .collect(),
    )?;
    let derivatives = inverse_transform(&derivative_spectrum)?;

    let total = gap_spectrum.power();
    let lost: f64 = gap_spectrum
        .amplitudes()
        .iter()
        .zip(&channel.loss)
        .map(|(a, iota)| iota * a.norm_sqr())
        .sum();
    let loss_fraction = if total > 0.0 { lost / total } else { 0.0 };

    Ok(DegradedActivation {
        grid,
        values,
        derivatives,
        channel: channel.clone(),
        loss_fraction,
    })
}

impl DegradedActivation {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn derivatives(&self) -> &[f64] {
        &self.derivatives
    }

    pub fn channel(&self) -> &BogoliubovChannel {
        &self.channel
    }

    /// `Σ ι_k|ĝ_k|² / Σ |ĝ_k|²`.
    pub fn loss_fraction(&self) -> f64 {
        self.loss_fraction
    }

    /// False in the perceptron limit, where every gap mode is lost.
    pub fn is_differentiable(&self) -> bool {
        self.loss_fraction < 1.0
    }

    fn interpolate(&self, table: &[f64], z: f64, below: f64, above: f64) -> f64 {
        let l = self.grid.half_width();
        if z < -l {
            return below;
        }
        if z >= l {
            return above;
        }
        let t = (z + l) / self.grid.spacing();
        let j = (libm::floor(t) as usize).min(table.len() - 1);
        let frac = t - j as f64;
        let left = table[j];
        let right = table.get(j + 1).copied().unwrap_or(above);
        left + frac * (right - left)
    }

    /// Linear interpolation of the value table; 0 below `−L`, 1 from `L` on.
    pub fn evaluate(&self, z: f64) -> f64 {
        self.interpolate(&self.values, z, 0.0, 1.0)
    }

    /// Linear interpolation of the derivative table; 0 outside the window.
    pub fn evaluate_derivative(&self, z: f64) -> f64 {
        self.interpolate(&self.derivatives, z, 0.0, 0.0)
    }
}
