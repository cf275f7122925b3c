//! Detector spectral bandwidth and its equivalent efficiency.
//!
//! A photo-detector that only responds to spectral components within a
//! window `±Ω` (in units of the photon bandwidth, Gaussian transform-limited
//! wave-packets) behaves exactly like an ideal detector preceded by a loss
//! of `η = 1 − erf(Ω/√2)`. All loss results therefore apply verbatim with
//! this mapping.

use serde::{Deserialize, Serialize};

use crate::error::{check_positive, Error, Result};
use crate::special::erfc;

/// A detector characterized either by its spectral bandwidth or directly by
/// the equivalent intensity loss. The two parameterizations are related
/// bijectively on (0, ∞) ↔ (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DetectorModel {
    Bandwidth { omega: f64 },
    Efficiency { effective_eta: f64 },
}

impl DetectorModel {
    pub fn from_omega(omega: f64) -> Result<Self> {
        check_positive("omega", omega)?;
        Ok(Self::Bandwidth { omega })
    }

    pub fn from_eta(effective_eta: f64) -> Result<Self> {
        if !(effective_eta.is_finite() && 0.0 < effective_eta && effective_eta < 1.0) {
            return Err(Error::EfficiencyOutOfRange(effective_eta));
        }
        Ok(Self::Efficiency { effective_eta })
    }

    /// Equivalent intensity loss of this detector.
    pub fn eta(&self) -> Result<f64> {
        match *self {
            Self::Bandwidth { omega } => bandwidth_to_efficiency(omega),
            Self::Efficiency { effective_eta } => Ok(effective_eta),
        }
    }

    /// Spectral bandwidth of this detector.
    pub fn omega(&self) -> Result<f64> {
        match *self {
            Self::Bandwidth { omega } => Ok(omega),
            Self::Efficiency { effective_eta } => efficiency_to_bandwidth(effective_eta),
        }
    }
}

/// η = 1 − erf(Ω/√2), evaluated as erfc to keep tiny tails exact.
/// Strictly decreasing in Ω with limit 0 as Ω → ∞.
pub fn bandwidth_to_efficiency(omega: f64) -> Result<f64> {
    check_positive("omega", omega)?;
    Ok(erfc(omega / std::f64::consts::SQRT_2))
}

/// Inverse of [`bandwidth_to_efficiency`] by bisection, accurate to well
/// within 1e-10. Defined only for η strictly inside (0, 1).
pub fn efficiency_to_bandwidth(eta: f64) -> Result<f64> {
    if !(eta.is_finite() && 0.0 < eta && eta < 1.0) {
        return Err(Error::EfficiencyOutOfRange(eta));
    }
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    while bandwidth_to_efficiency(hi)? > eta {
        hi *= 2.0;
        if hi > 1e3 {
            break;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if bandwidth_to_efficiency(mid.max(f64::MIN_POSITIVE))? > eta {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi.max(1.0) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}
