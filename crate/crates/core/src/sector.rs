//! Photon-number-sector propagation of the purification protocol.
//!
//! A pair of photons distributed over a lossy channel is classified by how
//! many of its photons survive: the two-photon sector carries the usable
//! polarization state (with fidelity `F`), the one- and zero-photon sectors
//! are bookkeeping for heralded-but-deficient events. One merge of two
//! identical pairs maps the sector weights through a quadratic recursion and
//! the fidelity through `F ↦ F²/(F² + (1−F)²)`; a lossy arm redistributes
//! the sectors binomially. Cascading rounds multiplies these maps.

use serde::{Deserialize, Serialize};

use crate::error::{check_unit, Error, Result};

/// Sector masses below this are clamped to zero to keep long cascades free
/// of denormal noise; the clamp is reported on the trace.
pub const UNDERFLOW_FLOOR: f64 = 1e-300;

/// Unnormalized probabilities for a pair containing 0, 1 or 2 photons.
/// The total may be below one; it equals the cumulative success probability
/// of whatever heralding produced the pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorDistribution {
    pub p0: f64,
    pub p1: f64,
    pub p2: f64,
}

impl SectorDistribution {
    pub fn new(p0: f64, p1: f64, p2: f64) -> Result<Self> {
        let ok = p0 >= 0.0 && p1 >= 0.0 && p2 >= 0.0;
        let total = p0 + p1 + p2;
        if !ok || !total.is_finite() || total > 1.0 + 1e-12 {
            return Err(Error::InvalidSectors { p0, p1, p2 });
        }
        Ok(Self { p0, p1, p2 })
    }

    /// A fresh pair that certainly contains both photons.
    pub fn all_two_photon() -> Self {
        Self { p0: 0.0, p1: 0.0, p2: 1.0 }
    }

    pub fn total(&self) -> f64 {
        self.p0 + self.p1 + self.p2
    }
}

/// A sector distribution together with the two-photon-sector fidelity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairEnsemble {
    #[serde(flatten)]
    pub sectors: SectorDistribution,
    pub fidelity: f64,
}

impl PairEnsemble {
    pub fn new(sectors: SectorDistribution, fidelity: f64) -> Result<Self> {
        check_unit("fidelity", fidelity)?;
        Ok(Self { sectors, fidelity })
    }
}

/// Intensity loss per output arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossChannel {
    pub eta: f64,
}

impl LossChannel {
    pub fn new(eta: f64) -> Result<Self> {
        check_unit("eta", eta)?;
        Ok(Self { eta })
    }

    pub fn apply(&self, sectors: &SectorDistribution) -> SectorDistribution {
        apply_loss(sectors, self.eta).expect("eta validated at construction")
    }
}

/// Where the lossy channel acts relative to each merge round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LossPlacement {
    #[serde(rename = "before")]
    BeforeRound,
    #[serde(rename = "after")]
    AfterRound,
}

/// Full description of a cascaded run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CascadeConfig {
    pub rounds: u32,
    pub eta: f64,
    pub loss_placement: LossPlacement,
    #[serde(flatten)]
    pub initial: PairEnsemble,
}

impl CascadeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rounds == 0 {
            return Err(Error::NoRounds);
        }
        check_unit("eta", self.eta)?;
        check_unit("fidelity", self.initial.fidelity)?;
        SectorDistribution::new(
            self.initial.sectors.p0,
            self.initial.sectors.p1,
            self.initial.sectors.p2,
        )?;
        Ok(())
    }
}

/// State recorded after each round of a cascade.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundRecord {
    /// Unnormalized sector masses after this round.
    pub sectors: SectorDistribution,
    /// Two-photon-sector fidelity after this round.
    pub fidelity: f64,
    /// `p2 / (p0 + p1 + p2)`, or `None` once the total mass has vanished.
    pub p2_norm: Option<f64>,
}

/// Per-round history of a cascade run.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadeTrace {
    pub config: CascadeConfig,
    pub rounds: Vec<RoundRecord>,
    /// Set when any sector mass was clamped to zero at [`UNDERFLOW_FLOOR`].
    pub underflow_clamped: bool,
}

fn purify_raw(f: f64) -> f64 {
    let num = f * f;
    let den = num + (1.0 - f) * (1.0 - f);
    num / den
}

/// One application of the fidelity map `F ↦ F²/(F² + (1−F)²)`.
///
/// Fixed points at 0.5 and 1; improves the fidelity exactly when `F > 1/2`.
pub fn purify_fidelity(f: f64) -> Result<f64> {
    check_unit("fidelity", f)?;
    Ok(purify_raw(f))
}

/// `n`-fold composition of [`purify_fidelity`]; `n = 0` returns `f`.
pub fn iterate_fidelity(f: f64, n: u32) -> Result<f64> {
    check_unit("fidelity", f)?;
    let mut out = f;
    for _ in 0..n {
        out = purify_raw(out);
    }
    Ok(out)
}

/// Merge two identical copies of `input` through one parity-check round.
///
/// The output is unnormalized: its total equals the round's heralding
/// probability given the input masses. Sector weights follow
/// `P2' = P2²/4`, `P1' = P1·P2/2`, `P0' = P1²/8 + P2·P0/2`.
pub fn merge_round(input: &PairEnsemble) -> PairEnsemble {
    let s = &input.sectors;
    let p2 = 0.25 * s.p2 * s.p2;
    let p1 = 0.5 * s.p1 * s.p2;
    let p0 = 0.125 * s.p1 * s.p1 + 0.5 * s.p2 * s.p0;
    PairEnsemble {
        sectors: SectorDistribution { p0, p1, p2 },
        fidelity: purify_raw(input.fidelity),
    }
}

/// Binomial redistribution of sector masses under intensity loss `eta`
/// on each of the two arms. Total mass is preserved exactly.
pub fn apply_loss(sectors: &SectorDistribution, eta: f64) -> Result<SectorDistribution> {
    check_unit("eta", eta)?;
    if eta == 0.0 {
        return Ok(*sectors);
    }
    if eta == 1.0 {
        return Ok(SectorDistribution { p0: sectors.total(), p1: 0.0, p2: 0.0 });
    }
    let t = 1.0 - eta;
    Ok(SectorDistribution {
        p2: sectors.p2 * t * t,
        p1: sectors.p2 * 2.0 * eta * t + sectors.p1 * t,
        p0: sectors.p0 + sectors.p1 * eta + sectors.p2 * eta * eta,
    })
}

fn clamp_underflow(s: &mut SectorDistribution) -> bool {
    let mut clamped = false;
    for p in [&mut s.p0, &mut s.p1, &mut s.p2] {
        if *p != 0.0 && p.abs() < UNDERFLOW_FLOOR {
            *p = 0.0;
            clamped = true;
        }
    }
    clamped
}

/// Run a full cascade, recording the unnormalized sectors, the iterated
/// fidelity and the normalized two-photon probability after every round.
pub fn cascade(config: &CascadeConfig) -> Result<CascadeTrace> {
    config.validate()?;
    let mut sectors = config.initial.sectors;
    let mut fidelity = config.initial.fidelity;
    let mut rounds = Vec::with_capacity(config.rounds as usize);
    let mut underflow_clamped = false;

    for _ in 0..config.rounds {
        let merged = match config.loss_placement {
            LossPlacement::BeforeRound => {
                let lossy = apply_loss(&sectors, config.eta)?;
                merge_round(&PairEnsemble { sectors: lossy, fidelity })
            }
            LossPlacement::AfterRound => {
                let merged = merge_round(&PairEnsemble { sectors, fidelity });
                PairEnsemble {
                    sectors: apply_loss(&merged.sectors, config.eta)?,
                    fidelity: merged.fidelity,
                }
            }
        };
        sectors = merged.sectors;
        fidelity = merged.fidelity;
        underflow_clamped |= clamp_underflow(&mut sectors);

        let total = sectors.total();
        let p2_norm = if total == 0.0 {
            None
        } else if sectors.p0 + sectors.p1 == 0.0 {
            Some(1.0)
        } else {
            Some(sectors.p2 / total)
        };
        rounds.push(RoundRecord { sectors, fidelity, p2_norm });
    }

    Ok(CascadeTrace { config: *config, rounds, underflow_clamped })
}

/// Closed form `[ (1−η)²/4 ]^(2ⁿ − 1)` for the final two-photon mass of an
/// `n`-round cascade with loss after each merge and an all-two-photon start.
pub fn closed_form_p2(n: u32, eta: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::NoRounds);
    }
    check_unit("eta", eta)?;
    let q = 0.25 * (1.0 - eta) * (1.0 - eta);
    let exponent = 2f64.powi(n as i32) - 1.0;
    Ok(q.powf(exponent))
}

/// Final-round `P2 / (P0 + P1 + P2)`.
pub fn normalized_two_photon_prob(trace: &CascadeTrace) -> Result<f64> {
    let last = trace.rounds.last().ok_or(Error::NoRounds)?;
    last.p2_norm.ok_or(Error::MassVanished)
}

/// Fidelity discounted by the chance that a heralded event actually holds
/// two photons: `iterate_fidelity(F0, n) × p2_norm`.
pub fn effective_fidelity(trace: &CascadeTrace) -> Result<f64> {
    let last = trace.rounds.last().ok_or(Error::NoRounds)?;
    Ok(last.fidelity * normalized_two_photon_prob(trace)?)
}

/// Noise model assumed when counting resource pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseModel {
    /// Bit-flip errors only: one merge per round, 2ⁿ pairs.
    BitFlipOnly,
    /// Full depolarizing noise: purification in two bases, 4ⁿ pairs.
    Depolarizing,
}

/// Number of resource pairs consumed by `n` nested rounds.
pub fn resource_count(n: u32, noise: NoiseModel) -> Result<u64> {
    let base: u64 = match noise {
        NoiseModel::BitFlipOnly => 2,
        NoiseModel::Depolarizing => 4,
    };
    base.checked_pow(n)
        .ok_or(Error::ResourceOverflow { base, exponent: n })
}
