use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rotation angle `alpha` (so `omega = e^{i alpha}`) together with the
/// unimodular phase factor `k = e^{i phi}` of the generalized functional
/// equation `k f(omega^2 x) + k^{-1} f(omega^{-2} x) = C(x) f(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationParams {
    alpha: f64,
    phase_offset: f64,
}

impl RotationParams {
    pub fn new(alpha: f64, phase_offset: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < FRAC_PI_2) {
            return Err(Error::Domain(format!(
                "alpha = {alpha} must lie strictly inside (0, pi/2)"
            )));
        }
        if !phase_offset.is_finite() {
            return Err(Error::Domain("phase offset must be finite".into()));
        }
        Ok(Self {
            alpha,
            phase_offset,
        })
    }

    /// `k = 1`.
    pub fn pure(alpha: f64) -> Result<Self> {
        Self::new(alpha, 0.0)
    }

    /// Parameters matching the monomial oscillator with exponent `m`:
    /// `alpha = 2 pi / (m + 2)` and `k = omega^{1/2}`.
    pub fn for_exponent(m: f64) -> Result<Self> {
        let alpha = 2.0 * PI / (m + 2.0);
        Self::new(alpha, 0.5 * alpha)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn phase_offset(&self) -> f64 {
        self.phase_offset
    }

    pub fn omega(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.alpha)
    }

    /// `omega^n`, computed from the angle to keep it exactly unimodular.
    pub fn omega_pow(&self, n: f64) -> Complex64 {
        Complex64::from_polar(1.0, n * self.alpha)
    }

    pub fn phase_factor(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.phase_offset)
    }

    /// `k^n` with the branch fixed by `phi`.
    pub fn phase_factor_pow(&self, n: f64) -> Complex64 {
        Complex64::from_polar(1.0, n * self.phase_offset)
    }

    pub fn theta(&self) -> f64 {
        PI - 2.0 * self.alpha
    }

    /// The exponent `m = 2 pi / alpha - 2` of the oscillator with this angle.
    pub fn equivalent_exponent(&self) -> f64 {
        2.0 * PI / self.alpha - 2.0
    }

    /// `C(0) = k + k^{-1}`.
    pub fn c_at_origin(&self) -> f64 {
        2.0 * self.phase_offset.cos()
    }
}
