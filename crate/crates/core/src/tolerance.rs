//! Process-wide comparison tolerance.
//!
//! Every "is this zero / tight / inside" decision in the crate goes through [`Tol`].
//! The default `tau` is `1e-9`; the `POLYLIP_TOL` environment variable overrides it,
//! and [`set_tau`] overrides both (the CLI uses this for `--tol`).

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::OnceLock;

use crate::scalar::Scalar;

pub const DEFAULT_TAU: f64 = 1e-9;
pub const ENV_VAR: &str = "POLYLIP_TOL";

static OVERRIDE: AtomicU64 = AtomicU64::new(0);
static FROM_ENV: OnceLock<f64> = OnceLock::new();

fn env_tau() -> f64 {
    *FROM_ENV.get_or_init(|| {
        std::env::var(ENV_VAR)
            .ok()
            .and_then(|s| s.trim().parse::<f64>().ok())
            .filter(|t| t.is_finite() && *t > 0.0)
            .unwrap_or(DEFAULT_TAU)
    })
}

/// Overrides the tolerance for the rest of the process. Non-positive values reset it.
pub fn set_tau(tau: f64) {
    let bits = if tau.is_finite() && tau > 0.0 { tau.to_bits() } else { 0 };
    OVERRIDE.store(bits, Ordering::SeqCst);
}

/// The active tolerance as `f64`, before clamping to a scalar's floor.
pub fn tau_f64() -> f64 {
    match OVERRIDE.load(Ordering::SeqCst) {
        0 => env_tau(),
        bits => f64::from_bits(bits),
    }
}

/// Comparison helper carrying the active tolerance at scalar precision.
#[derive(Clone, Copy, Debug)]
pub struct Tol<T> {
    pub tau: T,
}

impl<T: Scalar> Tol<T> {
    pub fn current() -> Self {
        Tol {
            tau: T::of(tau_f64().max(T::TOL_FLOOR)),
        }
    }

    pub fn with(tau: T) -> Self {
        Tol { tau }
    }

    /// Tolerance scaled by `max(1, |scale|)`.
    pub fn rel(&self, scale: T) -> T {
        self.tau * scale.abs().max(T::one())
    }

    pub fn zero(&self, v: T) -> bool {
        v.abs() <= self.tau
    }

    pub fn le(&self, a: T, b: T) -> bool {
        a <= b + self.tau
    }

    pub fn lt(&self, a: T, b: T) -> bool {
        a < b - self.tau
    }

    pub fn eq(&self, a: T, b: T) -> bool {
        (a - b).abs() <= self.tau
    }

    pub fn pos(&self, v: T) -> bool {
        v > self.tau
    }

    pub fn neg(&self, v: T) -> bool {
        v < -self.tau
    }
}
