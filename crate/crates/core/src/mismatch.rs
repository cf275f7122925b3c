//! One full purification round under temporal mode-mismatch, plus the
//! worst-case search over the mismatch parameters.
//!
//! Each branch combination of the two resource pairs is a product of four
//! photons with definite polarizations and wavepacket labels, so a round is
//! enumerated exactly: route every term through both beamsplitters, keep
//! the ones heralding one photon per detect port, and reduce the kept pair
//! to a polarization density matrix. Detectors herald photon number and
//! polarization only; the arrival-time wavepacket of a detected photon is
//! not read out and contributes no distinguishing information. Mismatch
//! degrades the output through the temporal trace of the kept photons,
//! whose wavepacket overlaps enter via the Gram matrix.

use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_unit, Error, Result};
use crate::fock::{
    apply_correction, BranchLabel, DetectionOutcome, PolDensity, Polarization, Sign, ALL_OUTCOMES,
};
use crate::temporal::{overlap, WavePacketConvention};

/// Which heralding outcomes the protocol accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AcceptancePolicy {
    /// Keep only the (+,+) and (−,−) outcomes; no correction needed.
    Strict,
    /// Keep all four outcomes, applying the outcome-dependent phase flip.
    #[serde(rename = "feedforward")]
    FeedForward,
}

/// Output fidelity and heralding probability of one round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MismatchResult {
    pub f_prime: f64,
    pub p_success: f64,
}

/// Per-outcome conditional states of a single branch combination.
#[derive(Debug, Clone)]
pub struct BranchRound {
    /// `(density matrix, probability)` aligned with [`ALL_OUTCOMES`].
    pub outcomes: [(PolDensity, f64); 4],
    /// Mass of the non-heralding component.
    pub rejected: f64,
}

struct RoutedParty {
    kept_pol: Polarization,
    kept_packet: u8,
    det_pol: Polarization,
    reflections: u32,
}

/// Route one party's two photons (`In1` carries wavepacket 0, `In2`
/// wavepacket 1) through its PBS; `None` when both land in one port.
/// The detected photon's wavepacket label is dropped here: the detector
/// never reads it out.
fn route_party(p1: Polarization, p2: Polarization) -> Option<RoutedParty> {
    match (p1, p2) {
        (Polarization::H, Polarization::H) => Some(RoutedParty {
            kept_pol: Polarization::H,
            kept_packet: 0,
            det_pol: Polarization::H,
            reflections: 0,
        }),
        (Polarization::V, Polarization::V) => Some(RoutedParty {
            kept_pol: Polarization::V,
            kept_packet: 1,
            det_pol: Polarization::V,
            reflections: 2,
        }),
        // H,V: both transmitted/reflected into the keep port; V,H: both
        // into the detect port. Either way the parity check fails.
        _ => None,
    }
}

struct AcceptedTerm {
    amp: Complex64,
    kept: (Polarization, u8, Polarization, u8),
    det: (Polarization, Polarization),
}

/// Exact one-branch simulation of the round at mismatch (`tau1`, `tau2`).
pub fn branch_round(
    b1: BranchLabel,
    b2: BranchLabel,
    tau1: f64,
    tau2: f64,
    conv: &WavePacketConvention,
) -> BranchRound {
    branch_round_with_phase(b1, b2, tau1, tau2, conv, Complex64::I)
}

/// Same with an explicit PBS reflection phase.
pub fn branch_round_with_phase(
    b1: BranchLabel,
    b2: BranchLabel,
    tau1: f64,
    tau2: f64,
    conv: &WavePacketConvention,
    reflection_phase: Complex64,
) -> BranchRound {
    let s_a = overlap(0.0, tau1, conv);
    let s_b = overlap(0.0, tau2, conv);
    let packet_overlap = |s: f64, w: u8, w_other: u8| if w == w_other { 1.0 } else { s };

    let mut accepted: Vec<AcceptedTerm> = Vec::with_capacity(4);
    let mut rejected = 0.0;
    for &(p1a, p1b) in &b1.patterns() {
        for &(p2a, p2b) in &b2.patterns() {
            let amp = Complex64::new(0.5, 0.0);
            match (route_party(p1a, p2a), route_party(p1b, p2b)) {
                (Some(ra), Some(rb)) => {
                    let phase = reflection_phase.powu(ra.reflections + rb.reflections);
                    accepted.push(AcceptedTerm {
                        amp: amp * phase,
                        kept: (ra.kept_pol, ra.kept_packet, rb.kept_pol, rb.kept_packet),
                        det: (ra.det_pol, rb.det_pol),
                    });
                }
                _ => rejected += amp.norm_sqr(),
            }
        }
    }

    let outcomes = ALL_OUTCOMES.map(|outcome| {
        let mut rho = PolDensity::zero();
        for t_i in &accepted {
            let amp_i = t_i.amp * detector_weight(outcome, t_i.det);
            for t_j in &accepted {
                let amp_j = t_j.amp * detector_weight(outcome, t_j.det);
                let gram = packet_overlap(s_a, t_i.kept.1, t_j.kept.1)
                    * packet_overlap(s_b, t_i.kept.3, t_j.kept.3);
                rho.0[pol_pair(t_i.kept.0, t_i.kept.2)][pol_pair(t_j.kept.0, t_j.kept.2)] +=
                    amp_i * amp_j.conj() * gram;
            }
        }
        let p = rho.trace();
        (rho, p)
    });

    BranchRound { outcomes, rejected }
}

fn pol_pair(a: Polarization, b: Polarization) -> usize {
    let ai = if a == Polarization::H { 0 } else { 1 };
    let bi = if b == Polarization::H { 0 } else { 1 };
    ai * 2 + bi
}

/// Combined amplitude of both diagonal-basis detections; the two 1/sqrt(2)
/// factors are folded into one exact 1/2.
fn detector_weight(outcome: DetectionOutcome, det: (Polarization, Polarization)) -> f64 {
    let sign = |s: Sign, pol: Polarization| -> f64 {
        match (s, pol) {
            (Sign::Minus, Polarization::V) => -1.0,
            _ => 1.0,
        }
    };
    0.5 * sign(outcome.0, det.0) * sign(outcome.1, det.1)
}

const BRANCH_COMBOS: [(BranchLabel, BranchLabel); 4] = [
    (BranchLabel::PhiPlus, BranchLabel::PhiPlus),
    (BranchLabel::PhiPlus, BranchLabel::PsiPlus),
    (BranchLabel::PsiPlus, BranchLabel::PhiPlus),
    (BranchLabel::PsiPlus, BranchLabel::PsiPlus),
];

/// One purification round on two copies of the `F`-mixture with temporal
/// mismatch `tau1` (party A) and `tau2` (party B). Branch combinations mix
/// classically with weights F², F(1−F), F(1−F), (1−F)².
pub fn purified_pair(
    f: f64,
    tau1: f64,
    tau2: f64,
    policy: AcceptancePolicy,
    conv: &WavePacketConvention,
) -> Result<MismatchResult> {
    purified_pair_with_phase(f, tau1, tau2, policy, conv, Complex64::I)
}

/// Same with an explicit PBS reflection phase; the result must agree with
/// the standard convention to numerical precision.
pub fn purified_pair_with_phase(
    f: f64,
    tau1: f64,
    tau2: f64,
    policy: AcceptancePolicy,
    conv: &WavePacketConvention,
    reflection_phase: Complex64,
) -> Result<MismatchResult> {
    check_unit("fidelity", f)?;
    let weights = [f * f, f * (1.0 - f), f * (1.0 - f), (1.0 - f) * (1.0 - f)];

    let mut rho_total = PolDensity::zero();
    let mut p_total = 0.0;
    for ((b1, b2), weight) in BRANCH_COMBOS.into_iter().zip(weights) {
        if weight == 0.0 {
            continue;
        }
        let round = branch_round_with_phase(b1, b2, tau1, tau2, conv, reflection_phase);
        for (outcome, (rho, p)) in ALL_OUTCOMES.into_iter().zip(&round.outcomes) {
            let keep = match policy {
                AcceptancePolicy::Strict => matches!(
                    outcome,
                    (Sign::Plus, Sign::Plus) | (Sign::Minus, Sign::Minus)
                ),
                AcceptancePolicy::FeedForward => true,
            };
            if !keep {
                continue;
            }
            rho_total.add_scaled(&apply_correction(rho, outcome), weight);
            p_total += weight * p;
        }
    }

    if p_total <= 0.0 {
        return Err(Error::NoSuccessMass);
    }
    Ok(MismatchResult { f_prime: rho_total.fidelity_phi_plus() / p_total, p_success: p_total })
}

/// How the mismatch plane is explored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    /// Independent uniform draws on \[−τ, τ\]²; sample `i` comes from a
    /// dedicated counter-based stream so results are order-independent.
    MonteCarlo,
    /// k×k uniform lattice including the corners.
    Grid(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    pub tau_bound: f64,
    /// Number of Monte-Carlo draws (ignored in grid mode).
    pub samples: u64,
    pub seed: u64,
    pub mode: SearchMode,
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau_bound.is_finite() && self.tau_bound >= 0.0) {
            return Err(Error::NotPositive { name: "tau_bound", value: self.tau_bound });
        }
        let effective = match self.mode {
            SearchMode::MonteCarlo => self.samples,
            SearchMode::Grid(k) => k as u64,
        };
        if effective == 0 {
            return Err(Error::NoSamples);
        }
        Ok(())
    }
}

/// Result of a worst-case search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorstCase {
    pub min_f_prime: f64,
    pub argmin: (f64, f64),
    /// Samples dropped because the round had no heralding mass there.
    pub skipped: usize,
}

fn unit_from_bits(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn monte_carlo_point(seed: u64, index: u64, bound: f64) -> (f64, f64) {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let t1 = bound * (2.0 * unit_from_bits(rng.next_u64()) - 1.0);
    let t2 = bound * (2.0 * unit_from_bits(rng.next_u64()) - 1.0);
    (t1, t2)
}

fn search_points(search: &SearchConfig) -> Vec<(f64, f64)> {
    let mut points = match search.mode {
        SearchMode::MonteCarlo => (0..search.samples)
            .map(|i| monte_carlo_point(search.seed, i, search.tau_bound))
            .collect::<Vec<_>>(),
        SearchMode::Grid(k) => {
            if k == 1 {
                vec![(0.0, 0.0)]
            } else {
                let axis: Vec<f64> = (0..k)
                    .map(|j| {
                        -search.tau_bound
                            + 2.0 * search.tau_bound * j as f64 / (k - 1) as f64
                    })
                    .collect();
                let mut grid = Vec::with_capacity(k * k);
                for &t1 in &axis {
                    for &t2 in &axis {
                        grid.push((t1, t2));
                    }
                }
                grid
            }
        }
    };
    // mandatory probe: the reported minimum may never exceed the ideal value
    points.push((0.0, 0.0));
    points
}

/// Minimize the output fidelity over the mismatch plane \[−τ, τ\]².
///
/// Samples are evaluated independently (possibly in parallel) and reduced
/// in input order with a lexicographic `(f_prime, tau1, tau2)` tie-break,
/// so the result is identical for any thread count.
pub fn worst_case_fidelity(
    f: f64,
    search: &SearchConfig,
    policy: AcceptancePolicy,
    conv: &WavePacketConvention,
) -> Result<WorstCase> {
    check_unit("fidelity", f)?;
    search.validate()?;

    let points = search_points(search);
    let evaluated: Vec<Option<(f64, f64, f64)>> = points
        .par_iter()
        .map(|&(t1, t2)| {
            purified_pair(f, t1, t2, policy, conv)
                .ok()
                .map(|r| (r.f_prime, t1, t2))
        })
        .collect();

    let mut skipped = 0usize;
    let mut best: Option<(f64, f64, f64)> = None;
    for entry in evaluated {
        match entry {
            None => skipped += 1,
            Some(candidate) => {
                let better = match best {
                    None => true,
                    Some(current) => lexicographic_less(candidate, current),
                };
                if better {
                    best = Some(candidate);
                }
            }
        }
    }
    let (min_f_prime, t1, t2) = best.ok_or(Error::AllSamplesSkipped)?;
    Ok(WorstCase { min_f_prime, argmin: (t1, t2), skipped })
}

fn lexicographic_less(a: (f64, f64, f64), b: (f64, f64, f64)) -> bool {
    if a.0 != b.0 {
        return a.0 < b.0;
    }
    if a.1 != b.1 {
        return a.1 < b.1;
    }
    a.2 < b.2
}

/// One row of a worst-case sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub tau_bound: f64,
    pub f: f64,
    pub min_f_prime: f64,
    pub argmin: (f64, f64),
}

/// Worst-case fidelity over the Cartesian product of mismatch bounds and
/// input fidelities, in input order.
pub fn fig4_curve(
    f_grid: &[f64],
    tau_bounds: &[f64],
    search: &SearchConfig,
    policy: AcceptancePolicy,
    conv: &WavePacketConvention,
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(f_grid.len() * tau_bounds.len());
    for &tau_bound in tau_bounds {
        let cell_search = SearchConfig { tau_bound, ..*search };
        for &f in f_grid {
            let worst = worst_case_fidelity(f, &cell_search, policy, conv)?;
            rows.push(SweepRow { tau_bound, f, min_f_prime: worst.min_f_prime, argmin: worst.argmin });
        }
    }
    Ok(rows)
}
