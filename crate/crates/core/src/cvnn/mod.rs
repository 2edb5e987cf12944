//! A small complex-valued layered network with exact and relaxed gates.
//!
//! Each neuron computes `σ(Σ W h + b)`. Hard mode evaluates the gates
//! exactly; relaxed mode replaces every indicator with a logistic ramp of
//! temperature `τ` so the network can be trained by gradient descent.

mod checkpoint;
mod layer;
mod network;

pub use checkpoint::{parse_checkpoint, write_checkpoint};
pub use layer::LayerSpec;
pub use network::{
    backward, finite_diff_check, forward, forward_output, forward_range, Binding, FdReport, ForwardTrace,
    NetworkSpec, Slot,
};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Per-neuron nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ActivationKind {
    /// Passes `x` when `Re(x) ≥ θ` and `Re(x) > 0`, otherwise outputs zero.
    ThresholdGate(f64),
    /// Outputs `(Im(x), Re(x))` when `Im(x) ≥ 0`, otherwise zero.
    CompareGate,
    Identity,
    /// Outputs `(1, 0)` when `Im(x) ≥ k`, otherwise zero.
    IndexGate(i64),
    /// Outputs `(1, 0)` when `Re(x) > l`, otherwise zero.
    OneHotGate(i64),
}

/// Forward evaluation mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    Hard,
    Relaxed { tau: f64 },
}

impl Mode {
    pub fn relaxed(tau: f64) -> Result<Self> {
        if tau.is_finite() && tau > 0.0 {
            Ok(Mode::Relaxed { tau })
        } else {
            Err(Error::Config(format!("temperature {tau} must be positive")))
        }
    }
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

impl ActivationKind {
    pub fn hard(self, z: Complex64) -> Complex64 {
        match self {
            ActivationKind::ThresholdGate(theta) => {
                if z.re >= theta && z.re > 0.0 {
                    z
                } else {
                    ZERO
                }
            }
            ActivationKind::CompareGate => {
                if z.im >= 0.0 {
                    Complex64::new(z.im, z.re)
                } else {
                    ZERO
                }
            }
            ActivationKind::Identity => z,
            ActivationKind::IndexGate(k) => {
                if z.im >= k as f64 {
                    ONE
                } else {
                    ZERO
                }
            }
            ActivationKind::OneHotGate(l) => {
                if z.re > l as f64 {
                    ONE
                } else {
                    ZERO
                }
            }
        }
    }

    pub fn relaxed(self, z: Complex64, tau: f64) -> Complex64 {
        match self {
            ActivationKind::ThresholdGate(theta) => z * sigmoid(tau * (z.re - theta)),
            ActivationKind::CompareGate => Complex64::new(z.im, z.re) * sigmoid(tau * z.im),
            ActivationKind::Identity => z,
            ActivationKind::IndexGate(k) => Complex64::new(sigmoid(tau * (z.im - k as f64)), 0.0),
            ActivationKind::OneHotGate(l) => Complex64::new(sigmoid(tau * (z.re - l as f64)), 0.0),
        }
    }

    pub fn apply(self, z: Complex64, mode: Mode) -> Complex64 {
        match mode {
            Mode::Hard => self.hard(z),
            Mode::Relaxed { tau } => self.relaxed(z, tau),
        }
    }

    /// Pulls the output cotangent `gy` back through the relaxed gate at `z`.
    /// Both are packed as `(∂/∂re, ∂/∂im)`.
    pub(crate) fn relaxed_vjp(self, z: Complex64, gy: Complex64, tau: f64) -> Complex64 {
        match self {
            ActivationKind::ThresholdGate(theta) => {
                let s = sigmoid(tau * (z.re - theta));
                let ds = tau * s * (1.0 - s);
                Complex64::new(
                    gy.re * (s + z.re * ds) + gy.im * z.im * ds,
                    gy.im * s,
                )
            }
            ActivationKind::CompareGate => {
                let s = sigmoid(tau * z.im);
                let ds = tau * s * (1.0 - s);
                Complex64::new(gy.im * s, gy.re * (s + z.im * ds) + gy.im * z.re * ds)
            }
            ActivationKind::Identity => gy,
            ActivationKind::IndexGate(k) => {
                let s = sigmoid(tau * (z.im - k as f64));
                Complex64::new(0.0, gy.re * tau * s * (1.0 - s))
            }
            ActivationKind::OneHotGate(l) => {
                let s = sigmoid(tau * (z.re - l as f64));
                Complex64::new(gy.re * tau * s * (1.0 - s), 0.0)
            }
        }
    }

    /// Derivative of the loss with respect to a threshold gate's `θ`.
    pub(crate) fn threshold_grad(self, z: Complex64, gy: Complex64, tau: f64) -> f64 {
        match self {
            ActivationKind::ThresholdGate(theta) => {
                let s = sigmoid(tau * (z.re - theta));
                -tau * s * (1.0 - s) * (gy.re * z.re + gy.im * z.im)
            }
            _ => 0.0,
        }
    }

    pub fn is_finite(self) -> bool {
        match self {
            ActivationKind::ThresholdGate(t) => t.is_finite(),
            _ => true,
        }
    }
}
