//! Temporal wave-packet overlaps and their orthonormalization.
//!
//! Photons are Gaussian transform-limited wave-packets of amplitude width
//! `sigma`; a relative delay `τ` between two packets leaves the amplitude
//! overlap `exp(−τ²/(8σ²))` and a two-photon HOM visibility equal to its
//! square. The width convention is fixed by calibrating against a known
//! (delay, visibility) anchor.

use serde::{Deserialize, Serialize};

use crate::error::{check_positive, Error, Result};

/// Gaussian amplitude width of the photon wave-packets, in units of the
/// photon temporal bandwidth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WavePacketConvention {
    sigma: f64,
}

/// Delay of the default calibration anchor.
pub const DEFAULT_ANCHOR_TAU: f64 = 0.4;
/// HOM visibility of the default calibration anchor.
pub const DEFAULT_ANCHOR_VISIBILITY: f64 = 0.74;

impl WavePacketConvention {
    pub fn new(sigma: f64) -> Result<Self> {
        check_positive("sigma", sigma)?;
        Ok(Self { sigma })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

impl Default for WavePacketConvention {
    /// Width calibrated so that a delay of 0.4 yields a HOM visibility
    /// of 0.74.
    fn default() -> Self {
        calibrate_sigma(DEFAULT_ANCHOR_TAU, DEFAULT_ANCHOR_VISIBILITY)
            .expect("default anchor is valid")
    }
}

/// Amplitude overlap of two wave-packets centered at `tau_a` and `tau_b`.
/// Symmetric, shift-invariant, equal to 1 exactly when the delays coincide.
pub fn overlap(tau_a: f64, tau_b: f64, conv: &WavePacketConvention) -> f64 {
    let d = tau_a - tau_b;
    (-d * d / (8.0 * conv.sigma * conv.sigma)).exp()
}

/// Two-photon Hong-Ou-Mandel visibility for a relative delay `tau`:
/// the squared amplitude overlap.
pub fn hom_visibility(tau: f64, conv: &WavePacketConvention) -> f64 {
    let s = overlap(0.0, tau, conv);
    s * s
}

/// Solve for the width that makes `hom_visibility(anchor_tau)` equal
/// `anchor_visibility`: σ² = τ² / (−4 ln V).
pub fn calibrate_sigma(anchor_tau: f64, anchor_visibility: f64) -> Result<WavePacketConvention> {
    if anchor_tau == 0.0 || !anchor_tau.is_finite() {
        return Err(Error::AnchorDelayZero);
    }
    if !(anchor_visibility.is_finite() && 0.0 < anchor_visibility && anchor_visibility < 1.0) {
        return Err(Error::AnchorVisibilityOutOfRange(anchor_visibility));
    }
    let sigma_sq = anchor_tau * anchor_tau / (-4.0 * anchor_visibility.ln());
    WavePacketConvention::new(sigma_sq.sqrt())
}

/// Rank-collapse tolerance on the Gram-Schmidt residual norm.
const RANK_TOLERANCE: f64 = 1e-9;

/// A set of wave-packet delays with their Gram matrix and the expansion of
/// each packet over the orthonormal basis produced by Gram-Schmidt (first
/// packet kept as-is). Coinciding delays collapse the rank instead of
/// producing a near-singular basis; the dropped coefficient is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalBasis {
    delays: Vec<f64>,
    gram: Vec<Vec<f64>>,
    coeffs: Vec<Vec<f64>>,
    rank: usize,
}

impl TemporalBasis {
    pub fn delays(&self) -> &[f64] {
        &self.delays
    }

    pub fn gram(&self) -> &[Vec<f64>] {
        &self.gram
    }

    /// Lower-triangular expansion coefficients: row `j` holds the
    /// components of packet `j` over orthonormal modes `0..rank`.
    pub fn coeffs(&self) -> &[Vec<f64>] {
        &self.coeffs
    }

    pub fn rank(&self) -> usize {
        self.rank
    }
}

/// Build the Gram matrix from [`overlap`] and orthonormalize.
pub fn build_temporal_basis(delays: &[f64], conv: &WavePacketConvention) -> TemporalBasis {
    let n = delays.len();
    let mut gram = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            gram[i][j] = overlap(delays[i], delays[j], conv);
        }
    }

    let mut coeffs: Vec<Vec<f64>> = Vec::with_capacity(n);
    // mode_source[i] = index of the packet whose residual defined mode i
    let mut mode_source: Vec<usize> = Vec::new();
    for j in 0..n {
        let mut row = vec![0.0; n];
        for i in 0..mode_source.len() {
            // <e_i|psi_j> recovered from the Gram entry against the packet
            // that defined mode i and the components already known.
            let src = mode_source[i];
            let mut c = gram[j][src];
            for k in 0..i {
                c -= row[k] * coeffs[src][k];
            }
            row[i] = c / coeffs[src][i];
        }
        let mut residual_sq = gram[j][j];
        for k in 0..mode_source.len() {
            residual_sq -= row[k] * row[k];
        }
        let residual = residual_sq.max(0.0).sqrt();
        if residual > RANK_TOLERANCE {
            row[mode_source.len()] = residual;
            mode_source.push(j);
        }
        coeffs.push(row);
    }
    let rank = mode_source.len();
    for row in &mut coeffs {
        row.truncate(rank.max(1));
    }

    TemporalBasis { delays: delays.to_vec(), gram, coeffs, rank }
}
