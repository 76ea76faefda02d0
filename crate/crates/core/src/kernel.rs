//! High-dimensional probability kernels.
//!
//! A kernel maps a shifted distance `x = max(d(X_i, X_j) - ρ_i, 0)` and a
//! local scale `y = σ_i` to a degree of belief in the edge `i → j`. Every
//! kernel returns exactly 1 when `x = 0` or `y = 0`, and its output is
//! clamped into `[0, 1]` so it can be read as a Bernoulli parameter. The
//! clamp only bites for the harmonic kernel (which grows without bound) and
//! the Morse kernel (whose value near `x = 0` is `y`).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The closed set of supported kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelId {
    /// `exp(-x / y)`, the classic membership strength.
    Membership,
    /// `exp(-x² / 2y²)`.
    Gaussian,
    /// `1 - x² / (x² + y²)`.
    Quadratic,
    /// `y - y (1 - exp(-x))²`.
    Morse,
    /// `1 + (y / 2) x²`; saturates at 1 after clamping.
    Harmonic,
    /// `1`.
    Constant,
}

impl KernelId {
    pub const ALL: [KernelId; 6] = [
        KernelId::Membership,
        KernelId::Gaussian,
        KernelId::Quadratic,
        KernelId::Morse,
        KernelId::Harmonic,
        KernelId::Constant,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KernelId::Membership => "membership",
            KernelId::Gaussian => "gaussian",
            KernelId::Quadratic => "quadratic",
            KernelId::Morse => "morse",
            KernelId::Harmonic => "harmonic",
            KernelId::Constant => "constant",
        }
    }

    /// Raw kernel value for `x > 0, y > 0`, before clamping.
    pub fn raw(self, x: f64, y: f64) -> f64 {
        match self {
            KernelId::Membership => (-x / y).exp(),
            KernelId::Gaussian => (-(x * x) / (2.0 * y * y)).exp(),
            KernelId::Quadratic => 1.0 - (x * x) / (x * x + y * y),
            KernelId::Morse => {
                let t = 1.0 - (-x).exp();
                y - y * t * t
            }
            KernelId::Harmonic => 1.0 + 0.5 * y * x * x,
            KernelId::Constant => 1.0,
        }
    }

    /// Whether the kernel's output can depend on the local scale at all.
    pub fn depends_on_scale(self) -> bool {
        !matches!(self, KernelId::Constant)
    }
}

impl fmt::Display for KernelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        KernelId::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| {
            Error::usage(format!(
                "unknown kernel {s:?}; expected one of membership, gaussian, quadratic, morse, harmonic, constant"
            ))
        })
    }
}

/// Evaluates `kernel` at shifted distance `x` and scale `y`, clamped to `[0, 1]`.
pub fn kernel_eval(kernel: KernelId, x: f64, y: f64) -> Result<f64> {
    if !(x >= 0.0) || !(y >= 0.0) {
        return Err(Error::usage(format!(
            "kernel arguments must be non-negative (x = {x}, y = {y})"
        )));
    }
    Ok(eval_unchecked(kernel, x, y))
}

#[inline]
pub(crate) fn eval_unchecked(kernel: KernelId, x: f64, y: f64) -> f64 {
    if x == 0.0 || y == 0.0 {
        return 1.0;
    }
    let v = kernel.raw(x, y);
    if v.is_nan() {
        0.0
    } else {
        v.clamp(0.0, 1.0)
    }
}
