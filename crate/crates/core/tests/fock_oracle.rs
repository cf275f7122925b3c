//! Independent zero-delay oracle for the Fock engine.
//!
//! With no temporal mismatch the whole round lives in a 16-dimensional
//! polarization space (four photons, two polarizations each). This file
//! enumerates that space by hand — its own Bell expansion, its own PBS
//! routing table, its own diagonal-basis projection — and demands exact
//! agreement from both the sparse Fock pipeline and the branch-level
//! round: every amplitude involved is a dyadic rational times a power
//! of i, so not even one bit may differ.

use num_complex::Complex64;

use purify_core::fock::{
    apply_pbs, prepare_branch_state, project_detection, BranchLabel, PolDensity, Sign,
    ALL_OUTCOMES,
};
use purify_core::mismatch::branch_round;
use purify_core::{Party, WavePacketConvention};

const H: usize = 0;
const V: usize = 1;

/// Index into the 16-dimensional joint polarization basis.
fn idx(a1: usize, b1: usize, a2: usize, b2: usize) -> usize {
    a1 * 8 + b1 * 4 + a2 * 2 + b2
}

/// Bell-state polarization pairs with unit relative amplitude.
fn bell_pairs(label: BranchLabel) -> [(usize, usize); 2] {
    match label {
        BranchLabel::PhiPlus => [(H, H), (V, V)],
        BranchLabel::PsiPlus => [(H, V), (V, H)],
    }
}

/// Joint input amplitudes: 1/2 on each of the four pattern combinations.
fn joint_state(b1: BranchLabel, b2: BranchLabel) -> [Complex64; 16] {
    let mut amps = [Complex64::ZERO; 16];
    for &(a1, b1p) in &bell_pairs(b1) {
        for &(a2, b2p) in &bell_pairs(b2) {
            amps[idx(a1, b1p, a2, b2p)] = Complex64::new(0.5, 0.0);
        }
    }
    amps
}

/// One party's PBS: photon 1 from the first pair, photon 2 from the second.
/// Returns (kept polarization, detected polarization, phase) or None when
/// both photons bunch into a single port.
fn route(p1: usize, p2: usize) -> Option<(usize, usize, Complex64)> {
    match (p1, p2) {
        (H, H) => Some((H, H, Complex64::new(1.0, 0.0))),
        (V, V) => Some((V, V, Complex64::new(-1.0, 0.0))), // i * i
        _ => None,
    }
}

fn detector_sign(s: Sign, pol: usize) -> f64 {
    match (s, pol) {
        (Sign::Minus, V) => -1.0,
        _ => 1.0,
    }
}

/// Conditional polarization density matrix and probability for one
/// heralding outcome, enumerated over the 16 joint basis states.
fn oracle_detection(b1: BranchLabel, b2: BranchLabel, outcome: (Sign, Sign)) -> ([[Complex64; 4]; 4], f64) {
    let amps = joint_state(b1, b2);
    // amplitude for the kept pair (keptA, keptB)
    let mut kept = [[Complex64::ZERO; 2]; 2];
    for a1 in [H, V] {
        for b1p in [H, V] {
            for a2 in [H, V] {
                for b2p in [H, V] {
                    let amp = amps[idx(a1, b1p, a2, b2p)];
                    if amp == Complex64::ZERO {
                        continue;
                    }
                    let (Some((ka, da, phase_a)), Some((kb, db, phase_b))) =
                        (route(a1, a2), route(b1p, b2p))
                    else {
                        continue;
                    };
                    let weight = 0.5 * detector_sign(outcome.0, da) * detector_sign(outcome.1, db);
                    kept[ka][kb] += amp * phase_a * phase_b * weight;
                }
            }
        }
    }
    let mut rho = [[Complex64::ZERO; 4]; 4];
    let mut probability = 0.0;
    for r in 0..4 {
        for c in 0..4 {
            rho[r][c] = kept[r / 2][r % 2] * kept[c / 2][c % 2].conj();
        }
        probability += rho[r][r].re;
    }
    (rho, probability)
}

fn assert_exactly_equal(engine: &PolDensity, oracle: &[[Complex64; 4]; 4], context: &str) {
    for r in 0..4 {
        for c in 0..4 {
            assert_eq!(
                engine.0[r][c], oracle[r][c],
                "{context}: element ({r},{c}) differs"
            );
        }
    }
}

const COMBOS: [(BranchLabel, BranchLabel); 4] = [
    (BranchLabel::PhiPlus, BranchLabel::PhiPlus),
    (BranchLabel::PhiPlus, BranchLabel::PsiPlus),
    (BranchLabel::PsiPlus, BranchLabel::PhiPlus),
    (BranchLabel::PsiPlus, BranchLabel::PsiPlus),
];

#[test]
fn sparse_pipeline_matches_enumeration_exactly() {
    let conv = WavePacketConvention::default();
    for (b1, b2) in COMBOS {
        let state = prepare_branch_state(b1, b2, 0.0, 0.0, &conv);
        let routed = apply_pbs(&apply_pbs(&state, Party::A), Party::B);
        for outcome in ALL_OUTCOMES {
            let (rho, p) = project_detection(&routed, outcome).unwrap();
            let (oracle_rho, oracle_p) = oracle_detection(b1, b2, outcome);
            assert_eq!(p, oracle_p, "{b1:?}x{b2:?} {outcome:?}: probability");
            assert_exactly_equal(&rho, &oracle_rho, &format!("{b1:?}x{b2:?} {outcome:?}"));
        }
    }
}

#[test]
fn branch_round_matches_enumeration_exactly() {
    let conv = WavePacketConvention::default();
    for (b1, b2) in COMBOS {
        let round = branch_round(b1, b2, 0.0, 0.0, &conv);
        for (outcome, (rho, p)) in ALL_OUTCOMES.into_iter().zip(&round.outcomes) {
            let (oracle_rho, oracle_p) = oracle_detection(b1, b2, outcome);
            assert_eq!(*p, oracle_p, "{b1:?}x{b2:?} {outcome:?}: probability");
            assert_exactly_equal(rho, &oracle_rho, &format!("{b1:?}x{b2:?} {outcome:?}"));
        }
    }
}

#[test]
fn oracle_sanity() {
    // the enumeration itself reproduces the textbook numbers
    let (_, p) = oracle_detection(BranchLabel::PhiPlus, BranchLabel::PhiPlus, (Sign::Plus, Sign::Plus));
    assert_eq!(p, 0.125);
    let (rho, p) = oracle_detection(BranchLabel::PhiPlus, BranchLabel::PhiPlus, (Sign::Plus, Sign::Minus));
    assert_eq!(p, 0.125);
    // |Phi-|: negative HH/VV coherence before correction
    assert_eq!(rho[0][3].re, -0.0625);
    for (b1, b2) in [(BranchLabel::PhiPlus, BranchLabel::PsiPlus), (BranchLabel::PsiPlus, BranchLabel::PhiPlus)] {
        for outcome in ALL_OUTCOMES {
            assert_eq!(oracle_detection(b1, b2, outcome).1, 0.0);
        }
    }
}
