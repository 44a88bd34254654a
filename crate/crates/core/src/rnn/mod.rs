//! Williams–Zipser recurrent network trained by real-time recurrent learning.
//!
//! Every neuron sees the input vector `u = [s(k-1) .. s(k-p), 1, y_1(k-1) ..
//! y_N(k-1)]`; neuron 0 is the output whose error drives learning. A
//! structural mask can freeze weights at zero, which is how layered
//! topologies are expressed without a second training algorithm.

mod checkpoint;
mod state;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use checkpoint::{read_checkpoint, write_checkpoint};
pub use state::{build_input, train_series, RnnState};

#[derive(Debug, Error)]
pub enum RnnError {
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("non-finite activation at step {step}")]
    NonFiniteActivation { step: u64 },
    #[error("training diverged in epoch {epoch}")]
    Diverged { epoch: usize },
    #[error("bad configuration: {0}")]
    BadConfig(String),
    #[error("bad checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, RnnError>;

/// Spread of the base bump `exp(-(γx)²)`: `γ² = ln 100`, so the bump has
/// fallen to 0.01 at `x = ±1`.
pub const RBF_GAMMA_SQ: f64 = std::f64::consts::LN_10 * 2.0;

fn rbf(t: f64) -> f64 {
    (-RBF_GAMMA_SQ * t * t).exp()
}

/// Wavelet built from two opposite Gaussian bumps: `f(2x+1)` on `[-1, 0]`,
/// `-f(2x-1)` on `[0, 1]`, extended with period 2. Odd, zero mean over
/// every period, and pinned to 0 where the branches meet.
pub fn rbf_wavelet(x: f64) -> f64 {
    let r = (x + 1.0).rem_euclid(2.0) - 1.0;
    if r == 0.0 || r == -1.0 {
        0.0
    } else if r < 0.0 {
        rbf(2.0 * r + 1.0)
    } else {
        -rbf(2.0 * r - 1.0)
    }
}

pub fn rbf_wavelet_derivative(x: f64) -> f64 {
    let r = (x + 1.0).rem_euclid(2.0) - 1.0;
    // d/dx f(2x ± 1) = 2 f'(t), f'(t) = -2γ² t f(t)
    let df = |t: f64| -2.0 * RBF_GAMMA_SQ * t * rbf(t);
    if r <= 0.0 {
        2.0 * df(2.0 * r + 1.0)
    } else {
        -2.0 * df(2.0 * r - 1.0)
    }
}

pub fn logistic(v: f64, beta: f64) -> f64 {
    1.0 / (1.0 + (-beta * v).exp())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum ActivationKind {
    #[default]
    Logistic,
    RbfWavelet,
    Linear,
}

impl ActivationKind {
    pub fn name(self) -> &'static str {
        match self {
            ActivationKind::Logistic => "logistic",
            ActivationKind::RbfWavelet => "rbf_wavelet",
            ActivationKind::Linear => "linear",
        }
    }
}

impl fmt::Display for ActivationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ActivationKind {
    type Err = RnnError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "logistic" => Ok(ActivationKind::Logistic),
            "rbf_wavelet" => Ok(ActivationKind::RbfWavelet),
            "linear" => Ok(ActivationKind::Linear),
            other => Err(RnnError::BadConfig(format!("unknown activation `{other}`"))),
        }
    }
}

/// Activation function; `beta` is the logistic slope and ignored otherwise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Activation {
    pub kind: ActivationKind,
    pub beta: f64,
}

impl Activation {
    pub fn new(kind: ActivationKind, beta: f64) -> Self {
        Self { kind, beta }
    }

    pub fn logistic(beta: f64) -> Self {
        Self::new(ActivationKind::Logistic, beta)
    }

    pub fn linear() -> Self {
        Self::new(ActivationKind::Linear, 1.0)
    }

    pub fn rbf_wavelet() -> Self {
        Self::new(ActivationKind::RbfWavelet, 1.0)
    }

    #[inline]
    pub fn eval(&self, v: f64) -> f64 {
        match self.kind {
            ActivationKind::Logistic => logistic(v, self.beta),
            ActivationKind::RbfWavelet => rbf_wavelet(v),
            ActivationKind::Linear => v,
        }
    }

    /// Derivative at `v`, given `y = eval(v)`.
    #[inline]
    pub fn derivative(&self, v: f64, y: f64) -> f64 {
        match self.kind {
            ActivationKind::Logistic => self.beta * y * (1.0 - y),
            ActivationKind::RbfWavelet => rbf_wavelet_derivative(v),
            ActivationKind::Linear => 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RnnConfig {
    /// External inputs `p`.
    pub inputs: usize,
    /// Neurons `N`; all of them feed back.
    pub neurons: usize,
    /// Logistic slope.
    pub beta: f64,
    /// Learning rate.
    pub eta: f64,
    /// Activation of every neuron unless the state overrides it.
    pub activation: ActivationKind,
    /// Largest allowed `|Δw|` per step; the whole update is rescaled.
    pub clip: Option<f64>,
}

impl RnnConfig {
    pub fn new(inputs: usize, neurons: usize) -> Self {
        Self {
            inputs,
            neurons,
            beta: 1.0,
            eta: 0.01,
            activation: ActivationKind::Logistic,
            clip: Some(1.0),
        }
    }

    /// Weights per neuron, `p + N + 1`.
    pub fn width(&self) -> usize {
        self.inputs + self.neurons + 1
    }

    pub fn activation_fn(&self) -> Activation {
        Activation::new(self.activation, self.beta)
    }

    pub fn validate(&self) -> Result<()> {
        if self.neurons == 0 {
            return Err(RnnError::BadConfig("need at least one neuron".into()));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(RnnError::BadConfig(format!("beta must be > 0, got {}", self.beta)));
        }
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return Err(RnnError::BadConfig(format!("eta must be >= 0, got {}", self.eta)));
        }
        if let Some(c) = self.clip {
            if c.is_nan() || c <= 0.0 {
                return Err(RnnError::BadConfig(format!("clip must be > 0, got {c}")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn logistic_basics() {
        assert_eq!(logistic(0.0, 1.0), 0.5);
        assert_eq!(logistic(0.0, 3.0), 0.5);
        let mut prev = 0.0;
        for i in -50..=50 {
            let y = logistic(i as f64 * 0.2, 1.5);
            assert!(y > prev && y > 0.0 && y < 1.0);
            prev = y;
        }
    }

    #[test]
    fn rbf_wavelet_shape() {
        assert_eq!(rbf_wavelet(0.0), 0.0);
        assert_eq!(rbf_wavelet(1.0), 0.0);
        assert_eq!(rbf_wavelet(-1.0), 0.0);
        assert!((rbf_wavelet(-0.5) - 1.0).abs() < 1e-15);
        assert!((rbf_wavelet(0.5) + 1.0).abs() < 1e-15);
        assert!((rbf((1.0f64).sqrt()) - 0.01).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let x: f64 = rng.random_range(-5.0..5.0);
            assert!((rbf_wavelet(-x) + rbf_wavelet(x)).abs() < 1e-12);
            assert!((rbf_wavelet(x + 2.0) - rbf_wavelet(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn rbf_wavelet_zero_mean_over_periods() {
        let integral = |a: f64, b: f64, n: usize| {
            let h = (b - a) / n as f64;
            (0..n).map(|i| rbf_wavelet(a + (i as f64 + 0.5) * h)).sum::<f64>() * h
        };
        assert!(integral(-1.0, 1.0, 10_000).abs() < 1e-9);
        assert!(integral(-3.0, 5.0, 40_000).abs() < 1e-9);
        assert!(integral(1.0, 3.0, 10_000).abs() < 1e-9);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-6;
        for a in [Activation::logistic(1.7), Activation::rbf_wavelet(), Activation::linear()] {
            for x in [-0.83, -0.31, 0.07, 0.42, 0.9, 2.6] {
                let fd = (a.eval(x + h) - a.eval(x - h)) / (2.0 * h);
                let d = a.derivative(x, a.eval(x));
                assert!((fd - d).abs() < 1e-6 * d.abs().max(1.0), "{a:?} at {x}");
            }
        }
    }

    #[test]
    fn config_validation() {
        assert!(RnnConfig::new(1, 1).validate().is_ok());
        let mut c = RnnConfig::new(1, 0);
        assert!(c.validate().is_err());
        c.neurons = 2;
        c.beta = 0.0;
        assert!(c.validate().is_err());
        assert_eq!(RnnConfig::new(3, 4).width(), 8);
        assert_eq!("rbf_wavelet".parse::<ActivationKind>().unwrap(), ActivationKind::RbfWavelet);
    }
}
