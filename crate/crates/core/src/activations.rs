//! Sigmoid and step activations, the perceptron decision rule and the
//! first-order sensitivity of a single neuron.
//!
//! Two step conventions coexist. As a field sample [`step`] takes the value
//! ½ at the origin, which makes the gap `σ − θ` odd. The decision rule
//! [`perceptron_decide`] keeps the strict rule: a zero pre-activation fires 0.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::bogoliubov::DegradedActivation;
use crate::{Error, Result};

/// Logistic sigmoid `1 / (1 + e^(−z))`.
///
/// Evaluated on the branch that only ever exponentiates a non-positive
/// number, so large `|z|` neither overflows nor produces NaN.
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + libm::exp(-z))
    } else {
        let e = libm::exp(z);
        e / (1.0 + e)
    }
}

/// `σ'(z) = σ(z)(1 − σ(z))`.
pub fn sigmoid_derivative(z: f64) -> f64 {
    let s = sigmoid(z);
    s * (1.0 - s)
}

/// Heaviside step with `θ(0) = ½`.
pub fn step(z: f64) -> f64 {
    if z > 0.0 {
        1.0
    } else if z < 0.0 {
        0.0
    } else {
        0.5
    }
}

/// Weights and bias of a single perceptron.
#[derive(Debug, Clone, PartialEq)]
pub struct PerceptronConfig {
    weights: Vec<f64>,
    bias: f64,
}

impl PerceptronConfig {
    pub fn new(weights: Vec<f64>, bias: f64) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::config("perceptron needs at least one weight"));
        }
        if !weights.iter().all(|w| w.is_finite()) || !bias.is_finite() {
            return Err(Error::config("perceptron weights and bias must be finite"));
        }
        Ok(Self { weights, bias })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    /// `Σ ω_j x_j + b`.
    pub fn pre_activation(&self, inputs: &[f64]) -> Result<f64> {
        if inputs.len() != self.weights.len() {
            return Err(Error::Dimension {
                expected: self.weights.len(),
                got: inputs.len(),
            });
        }
        let dot: f64 = self.weights.iter().zip(inputs).map(|(w, x)| w * x).sum();
        Ok(dot + self.bias)
    }

    /// Jointly rescales weights and bias.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.weights.iter().map(|w| w * factor).collect(),
            self.bias * factor,
        )
    }
}

/// Fires 1 when `Σ ω_j x_j + b > 0`, otherwise 0 (ties fire 0).
pub fn perceptron_decide(cfg: &PerceptronConfig, inputs: &[f64]) -> Result<u8> {
    Ok(u8::from(cfg.pre_activation(inputs)? > 0.0))
}

/// Which response function a neuron uses.
#[derive(Debug, Clone)]
pub enum ActivationKind {
    Sigmoid,
    Step,
    Degraded(Arc<DegradedActivation>),
}

impl ActivationKind {
    pub fn evaluate(&self, z: f64) -> f64 {
        match self {
            ActivationKind::Sigmoid => sigmoid(z),
            ActivationKind::Step => step(z),
            ActivationKind::Degraded(act) => act.evaluate(z),
        }
    }

    /// Derivative, failing where the activation has no usable slope.
    pub fn derivative(&self, z: f64) -> Result<f64> {
        match self {
            ActivationKind::Sigmoid => Ok(sigmoid_derivative(z)),
            ActivationKind::Step => Err(Error::NonDifferentiable(
                "step activation has zero slope almost everywhere and a jump at the origin",
            )),
            ActivationKind::Degraded(act) if !act.is_differentiable() => Err(
                Error::NonDifferentiable("degraded activation is in the perceptron limit"),
            ),
            ActivationKind::Degraded(act) => Ok(act.evaluate_derivative(z)),
        }
    }

    /// Derivative almost everywhere, as used by backpropagation: the step
    /// contributes zero.
    pub fn derivative_ae(&self, z: f64) -> f64 {
        match self {
            ActivationKind::Sigmoid => sigmoid_derivative(z),
            ActivationKind::Step => 0.0,
            ActivationKind::Degraded(act) => act.evaluate_derivative(z),
        }
    }

    /// Fraction of gap power removed by the channel behind this activation.
    pub fn loss_fraction(&self) -> f64 {
        match self {
            ActivationKind::Sigmoid => 0.0,
            ActivationKind::Step => 1.0,
            ActivationKind::Degraded(act) => act.loss_fraction(),
        }
    }
}

/// First-order prediction of the output change of `m = f(Σ ω_j x_j + b)`
/// under the perturbation `(Δω, Δb)`.
pub fn sensitivity_predict(
    activation: &ActivationKind,
    cfg: &PerceptronConfig,
    inputs: &[f64],
    deltas_w: &[f64],
    delta_b: f64,
) -> Result<f64> {
    if deltas_w.len() != cfg.weights.len() {
        return Err(Error::Dimension {
            expected: cfg.weights.len(),
            got: deltas_w.len(),
        });
    }
    let z = cfg.pre_activation(inputs)?;
    let slope = activation.derivative(z)?;
    // ∂m/∂ω_j = f'(z)·x_j and ∂m/∂b = f'(z)
    let dz: f64 = inputs.iter().zip(deltas_w).map(|(x, dw)| x * dw).sum::<f64>() + delta_b;
    Ok(slope * dz)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn sigmoid_symmetry_point_and_tails() {
        assert_eq!(sigmoid(0.0), 0.5);
        let tiny = sigmoid(-500.0);
        assert!(tiny > 0.0 && tiny.is_finite());
        assert_eq!(sigmoid(700.0), 1.0);
        assert!(sigmoid(-700.0) > 0.0);
    }

    #[test]
    fn sigmoid_matches_tanh_form() {
        for i in 0..=2000 {
            let z = -30.0 + 0.03 * i as f64;
            let tanh_form = 0.5 * (libm::tanh(z / 2.0) + 1.0);
            assert!((sigmoid(z) - tanh_form).abs() < 1e-12, "z = {z}");
        }
    }

    #[test]
    fn step_values() {
        assert_eq!(step(-3.2), 0.0);
        assert_eq!(step(0.0), 0.5);
        assert_eq!(step(7.0), 1.0);
    }

    #[test]
    fn clothes_color_example() {
        let cfg = PerceptronConfig::new(vec![2.0, 2.0], -3.0).unwrap();
        assert_eq!(perceptron_decide(&cfg, &[1.0, 1.0]).unwrap(), 1);
        assert_eq!(perceptron_decide(&cfg, &[1.0, 0.0]).unwrap(), 0);
        assert_eq!(perceptron_decide(&cfg, &[0.0, 1.0]).unwrap(), 0);
        assert_eq!(perceptron_decide(&cfg, &[0.0, 0.0]).unwrap(), 0);
    }

    #[test]
    fn tie_fires_zero() {
        let cfg = PerceptronConfig::new(vec![1.0], -1.0).unwrap();
        assert_eq!(perceptron_decide(&cfg, &[1.0]).unwrap(), 0);
    }

    #[test]
    fn dimension_errors() {
        let cfg = PerceptronConfig::new(vec![2.0, 2.0], -3.0).unwrap();
        assert_eq!(
            perceptron_decide(&cfg, &[1.0]),
            Err(Error::Dimension { expected: 2, got: 1 })
        );
        let err = sensitivity_predict(&ActivationKind::Sigmoid, &cfg, &[1.0, 1.0], &[0.1], 0.0);
        assert!(matches!(err, Err(Error::Dimension { .. })));
        assert!(PerceptronConfig::new(vec![], 0.0).is_err());
        assert!(PerceptronConfig::new(vec![f64::NAN], 0.0).is_err());
    }

    #[test]
    fn sensitivity_examples() {
        let cfg = PerceptronConfig::new(vec![1.0], 0.0).unwrap();
        let zero_input =
            sensitivity_predict(&ActivationKind::Sigmoid, &cfg, &[0.0], &[0.01], 0.0).unwrap();
        assert_eq!(zero_input, 0.0);
        // z = 1 here, so the slope is σ'(1), not σ'(0)
        let unit_input =
            sensitivity_predict(&ActivationKind::Sigmoid, &cfg, &[1.0], &[0.01], 0.0).unwrap();
        assert!((unit_input - 0.01 * sigmoid_derivative(1.0)).abs() < 1e-17);
        let at_origin = PerceptronConfig::new(vec![0.0], 0.0).unwrap();
        let quarter =
            sensitivity_predict(&ActivationKind::Sigmoid, &at_origin, &[1.0], &[0.01], 0.0).unwrap();
        assert!((quarter - 0.0025).abs() < 1e-17);
    }

    #[test]
    fn step_is_not_differentiable() {
        let cfg = PerceptronConfig::new(vec![1.0], 0.0).unwrap();
        let err = sensitivity_predict(&ActivationKind::Step, &cfg, &[1.0], &[0.01], 0.0);
        assert!(matches!(err, Err(Error::NonDifferentiable(_))));
    }

    #[test]
    fn sensitivity_error_is_second_order() {
        // finite-difference oracle: true change vs. linear prediction at Δ and Δ/2
        let cfg = PerceptronConfig::new(vec![0.7, -1.3], 0.4).unwrap();
        let x = [0.9, 0.35];
        let direction = ([0.3, -0.2], 0.5);
        let error_at = |h: f64| {
            let dw = [direction.0[0] * h, direction.0[1] * h];
            let db = direction.1 * h;
            let moved = PerceptronConfig::new(
                vec![cfg.weights()[0] + dw[0], cfg.weights()[1] + dw[1]],
                cfg.bias() + db,
            )
            .unwrap();
            let truth = sigmoid(moved.pre_activation(&x).unwrap())
                - sigmoid(cfg.pre_activation(&x).unwrap());
            let pred = sensitivity_predict(&ActivationKind::Sigmoid, &cfg, &x, &dw, db).unwrap();
            (truth - pred).abs()
        };
        let mut h = 0.1;
        let mut prev_c: Option<f64> = None;
        for _ in 0..5 {
            let ratio = error_at(h) / error_at(h / 2.0);
            assert!((ratio - 4.0).abs() < 0.1, "ratio {ratio} at h = {h}");
            let c = error_at(h) / (h * h);
            if let Some(p) = prev_c {
                assert!((c / p - 1.0f64).abs() < 0.1);
            }
            prev_c = Some(c);
            h /= 2.0;
        }
    }
}
