//! Sparse second-quantized engine for one purification round.
//!
//! Modes are labeled by party, path slot, polarization and an orthonormal
//! temporal index; a state is a sparse map from occupation tuples to
//! complex amplitudes. Four-photon pure states cover everything the
//! protocol needs: two resource pairs entering the two polarizing
//! beamsplitters.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::temporal::{build_temporal_basis, TemporalBasis, WavePacketConvention};

pub const MODE_COUNT: usize = 32;

/// Occupation numbers for all 32 modes, indexed by [`ModeIndex::flat`].
pub type Occupation = [u8; MODE_COUNT];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Party {
    A,
    B,
}

impl Party {
    pub const BOTH: [Party; 2] = [Party::A, Party::B];

    fn index(self) -> usize {
        match self {
            Party::A => 0,
            Party::B => 1,
        }
    }
}

/// Path slots around one party's polarizing beamsplitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PathSlot {
    In1,
    In2,
    OutKeep,
    OutDetect,
}

impl PathSlot {
    fn index(self) -> usize {
        match self {
            PathSlot::In1 => 0,
            PathSlot::In2 => 1,
            PathSlot::OutKeep => 2,
            PathSlot::OutDetect => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    fn index(self) -> usize {
        match self {
            Polarization::H => 0,
            Polarization::V => 1,
        }
    }
}

/// One photonic mode: party x path x polarization x temporal index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModeIndex {
    pub party: Party,
    pub path: PathSlot,
    pub pol: Polarization,
    pub temporal: u8,
}

impl ModeIndex {
    pub fn new(party: Party, path: PathSlot, pol: Polarization, temporal: u8) -> Self {
        debug_assert!(temporal < 2, "at most two temporal modes per party");
        Self { party, path, pol, temporal }
    }

    pub fn flat(self) -> usize {
        ((self.party.index() * 4 + self.path.index()) * 2 + self.pol.index()) * 2
            + self.temporal as usize
    }

    pub fn from_flat(flat: usize) -> Self {
        debug_assert!(flat < MODE_COUNT);
        let temporal = (flat % 2) as u8;
        let pol = if (flat / 2) % 2 == 0 { Polarization::H } else { Polarization::V };
        let path = match (flat / 4) % 4 {
            0 => PathSlot::In1,
            1 => PathSlot::In2,
            2 => PathSlot::OutKeep,
            _ => PathSlot::OutDetect,
        };
        let party = if flat / 16 == 0 { Party::A } else { Party::B };
        Self { party, path, pol, temporal }
    }
}

/// Sparse photon-number state: occupation tuples with complex amplitudes.
/// All nonzero terms of a valid state share one total photon number.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FockVector {
    amps: BTreeMap<Occupation, Complex64>,
}

impl FockVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_term(&mut self, occ: Occupation, amp: Complex64) {
        if amp == Complex64::ZERO {
            return;
        }
        let entry = self.amps.entry(occ).or_insert(Complex64::ZERO);
        *entry += amp;
        if entry.norm_sqr() == 0.0 {
            self.amps.remove(&occ);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Occupation, &Complex64)> {
        self.amps.iter()
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amplitude(&self, occ: &Occupation) -> Complex64 {
        self.amps.get(occ).copied().unwrap_or(Complex64::ZERO)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    /// Common total photon number, or an error for mixed-number states.
    pub fn photon_number(&self) -> Result<u32> {
        let mut n = None;
        for occ in self.amps.keys() {
            let total: u32 = occ.iter().map(|&c| c as u32).sum();
            match n {
                None => n = Some(total),
                Some(prev) if prev != total => return Err(Error::MixedPhotonNumber),
                _ => {}
            }
        }
        Ok(n.unwrap_or(0))
    }
}

/// Which Bell state a resource pair carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchLabel {
    PhiPlus,
    PsiPlus,
}

impl BranchLabel {
    /// Polarization patterns (party A, party B) of the two Bell-state
    /// terms; each enters with amplitude 1/sqrt(2).
    pub fn patterns(self) -> [(Polarization, Polarization); 2] {
        match self {
            BranchLabel::PhiPlus => {
                [(Polarization::H, Polarization::H), (Polarization::V, Polarization::V)]
            }
            BranchLabel::PsiPlus => {
                [(Polarization::H, Polarization::V), (Polarization::V, Polarization::H)]
            }
        }
    }
}

/// Detector outcome in the diagonal/anti-diagonal basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// Sign of <outcome|pol> (the shared 1/sqrt(2) factors are handled
    /// pairwise so post-selected quantities stay exact dyadics).
    fn pol_sign(self, pol: Polarization) -> f64 {
        match (self, pol) {
            (Sign::Minus, Polarization::V) => -1.0,
            _ => 1.0,
        }
    }
}

pub type DetectionOutcome = (Sign, Sign);

pub const ALL_OUTCOMES: [DetectionOutcome; 4] = [
    (Sign::Plus, Sign::Plus),
    (Sign::Plus, Sign::Minus),
    (Sign::Minus, Sign::Plus),
    (Sign::Minus, Sign::Minus),
];

/// Joint input state for one branch combination: pair 1 at delay zero on
/// the `In1` slots, pair 2 delayed by `tau1` (party A) and `tau2` (party B)
/// on the `In2` slots. Each delayed photon is expanded over that party's
/// orthonormal temporal basis.
pub fn prepare_branch_state(
    b1: BranchLabel,
    b2: BranchLabel,
    tau1: f64,
    tau2: f64,
    conv: &WavePacketConvention,
) -> FockVector {
    let basis_a = build_temporal_basis(&[0.0, tau1], conv);
    let basis_b = build_temporal_basis(&[0.0, tau2], conv);
    let comp_a = delayed_components(&basis_a);
    let comp_b = delayed_components(&basis_b);

    let mut state = FockVector::new();
    for &(pa1, pb1) in &b1.patterns() {
        for &(pa2, pb2) in &b2.patterns() {
            for (ka, &ca) in comp_a.iter().enumerate() {
                if ca == 0.0 {
                    continue;
                }
                for (kb, &cb) in comp_b.iter().enumerate() {
                    if cb == 0.0 {
                        continue;
                    }
                    let mut occ = [0u8; MODE_COUNT];
                    occ[ModeIndex::new(Party::A, PathSlot::In1, pa1, 0).flat()] += 1;
                    occ[ModeIndex::new(Party::B, PathSlot::In1, pb1, 0).flat()] += 1;
                    occ[ModeIndex::new(Party::A, PathSlot::In2, pa2, ka as u8).flat()] += 1;
                    occ[ModeIndex::new(Party::B, PathSlot::In2, pb2, kb as u8).flat()] += 1;
                    state.add_term(occ, Complex64::new(0.5 * ca * cb, 0.0));
                }
            }
        }
    }
    state
}

fn delayed_components(basis: &TemporalBasis) -> Vec<f64> {
    basis.coeffs()[1].clone()
}

/// Route one party's photons through its polarizing beamsplitter with the
/// standard convention: H transmitted, V reflected with phase i.
pub fn apply_pbs(state: &FockVector, party: Party) -> FockVector {
    apply_pbs_with_phase(state, party, Complex64::I)
}

/// Same as [`apply_pbs`] with an explicit reflection phase; post-selected
/// quantities must not depend on it.
pub fn apply_pbs_with_phase(
    state: &FockVector,
    party: Party,
    reflection_phase: Complex64,
) -> FockVector {
    let mut out = FockVector::new();
    for (occ, &amp) in state.terms() {
        let mut new_occ = [0u8; MODE_COUNT];
        let mut reflections = 0u32;
        for (flat, &count) in occ.iter().enumerate() {
            if count == 0 {
                continue;
            }
            let mode = ModeIndex::from_flat(flat);
            let target = if mode.party == party {
                match (mode.path, mode.pol) {
                    (PathSlot::In1, Polarization::H) => {
                        ModeIndex::new(party, PathSlot::OutKeep, Polarization::H, mode.temporal)
                    }
                    (PathSlot::In2, Polarization::H) => {
                        ModeIndex::new(party, PathSlot::OutDetect, Polarization::H, mode.temporal)
                    }
                    (PathSlot::In1, Polarization::V) => {
                        reflections += count as u32;
                        ModeIndex::new(party, PathSlot::OutDetect, Polarization::V, mode.temporal)
                    }
                    (PathSlot::In2, Polarization::V) => {
                        reflections += count as u32;
                        ModeIndex::new(party, PathSlot::OutKeep, Polarization::V, mode.temporal)
                    }
                    _ => mode,
                }
            } else {
                mode
            };
            new_occ[target.flat()] += count;
        }
        out.add_term(new_occ, amp * reflection_phase.powu(reflections));
    }
    out
}

/// Two-qubit polarization density matrix over the kept modes, in the basis
/// {HH, HV, VH, VV} with party A's polarization first. Generally
/// unnormalized: the trace is the probability of the conditioning event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolDensity(pub [[Complex64; 4]; 4]);

impl PolDensity {
    pub fn zero() -> Self {
        Self([[Complex64::ZERO; 4]; 4])
    }

    pub fn trace(&self) -> f64 {
        (0..4).map(|i| self.0[i][i].re).sum()
    }

    /// Overlap with the target Bell state (|HH> + |VV>)/sqrt(2).
    pub fn fidelity_phi_plus(&self) -> f64 {
        0.5 * (self.0[0][0] + self.0[3][3] + self.0[0][3] + self.0[3][0]).re
    }

    pub fn add_scaled(&mut self, other: &PolDensity, weight: f64) {
        for r in 0..4 {
            for c in 0..4 {
                self.0[r][c] += weight * other.0[r][c];
            }
        }
    }

    /// Conjugation by a phase flip on party A's kept qubit.
    pub fn phase_flip_a(&self) -> Self {
        const Z: [f64; 4] = [1.0, 1.0, -1.0, -1.0];
        let mut out = Self::zero();
        for (r, &zr) in Z.iter().enumerate() {
            for (c, &zc) in Z.iter().enumerate() {
                out.0[r][c] = zr * zc * self.0[r][c];
            }
        }
        out
    }

    pub fn max_hermiticity_violation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..4 {
            for c in 0..4 {
                worst = worst.max((self.0[r][c] - self.0[c][r].conj()).norm());
            }
        }
        worst
    }
}

fn pol_pair_index(a: Polarization, b: Polarization) -> usize {
    a.index() * 2 + b.index()
}

fn detect_photon(occ: &Occupation, party: Party) -> Option<(Polarization, u8)> {
    let mut found = None;
    let mut count = 0u32;
    for pol in [Polarization::H, Polarization::V] {
        for temporal in 0..2u8 {
            let c = occ[ModeIndex::new(party, PathSlot::OutDetect, pol, temporal).flat()];
            if c > 0 {
                count += c as u32;
                found = Some((pol, temporal));
            }
        }
    }
    if count == 1 {
        found
    } else {
        None
    }
}

fn kept_photons(occ: &Occupation) -> Result<(Polarization, u8, Polarization, u8)> {
    let mut kept_a = None;
    let mut kept_b = None;
    for (flat, &count) in occ.iter().enumerate() {
        if count == 0 {
            continue;
        }
        let mode = ModeIndex::from_flat(flat);
        if mode.path != PathSlot::OutKeep || count != 1 {
            return Err(Error::InvalidKeptStructure);
        }
        let slot = match mode.party {
            Party::A => &mut kept_a,
            Party::B => &mut kept_b,
        };
        if slot.is_some() {
            return Err(Error::InvalidKeptStructure);
        }
        *slot = Some((mode.pol, mode.temporal));
    }
    match (kept_a, kept_b) {
        (Some((pa, ma)), Some((pb, nb))) => Ok((pa, ma, pb, nb)),
        _ => Err(Error::InvalidKeptStructure),
    }
}

/// Mass of the state's non-heralding component: terms without exactly one
/// photon in each detect port.
pub fn herald_rejected_mass(state: &FockVector) -> f64 {
    state
        .terms()
        .filter(|(occ, _)| {
            detect_photon(occ, Party::A).is_none() || detect_photon(occ, Party::B).is_none()
        })
        .map(|(_, amp)| amp.norm_sqr())
        .sum()
}

/// Condition on one photon in each detect port with the given diagonal-basis
/// polarizations. Detectors resolve photon number and polarization but not
/// arrival time, so the temporal index of each detected photon is summed
/// incoherently; the kept photons are reduced to a polarization density
/// matrix by tracing their temporal indices. The returned probability is
/// the matrix trace.
pub fn project_detection(
    state: &FockVector,
    outcome: DetectionOutcome,
) -> Result<(PolDensity, f64)> {
    let photons = state.photon_number()?;
    if photons != 4 {
        return Err(Error::NotFourPhotons(photons));
    }

    // Group heralded terms by the temporal indices seen by the detectors;
    // each group is one Kraus branch.
    struct KeptTerm {
        pol_a: Polarization,
        temporal_a: u8,
        pol_b: Polarization,
        temporal_b: u8,
        amp: Complex64,
    }
    let mut groups: BTreeMap<(u8, u8), Vec<KeptTerm>> = BTreeMap::new();
    for (occ, &amp) in state.terms() {
        let Some((pol_a, ka)) = detect_photon(occ, Party::A) else { continue };
        let Some((pol_b, kb)) = detect_photon(occ, Party::B) else { continue };

        let mut kept = *occ;
        kept[ModeIndex::new(Party::A, PathSlot::OutDetect, pol_a, ka).flat()] -= 1;
        kept[ModeIndex::new(Party::B, PathSlot::OutDetect, pol_b, kb).flat()] -= 1;
        let (pa, ma, pb, nb) = kept_photons(&kept)?;

        let weight = 0.5 * outcome.0.pol_sign(pol_a) * outcome.1.pol_sign(pol_b);
        groups.entry((ka, kb)).or_default().push(KeptTerm {
            pol_a: pa,
            temporal_a: ma,
            pol_b: pb,
            temporal_b: nb,
            amp: amp * weight,
        });
    }

    let mut rho = PolDensity::zero();
    for entries in groups.values() {
        for t_i in entries {
            for t_j in entries {
                if t_i.temporal_a == t_j.temporal_a && t_i.temporal_b == t_j.temporal_b {
                    rho.0[pol_pair_index(t_i.pol_a, t_i.pol_b)]
                        [pol_pair_index(t_j.pol_a, t_j.pol_b)] += t_i.amp * t_j.amp.conj();
                }
            }
        }
    }
    let probability = rho.trace();
    Ok((rho, probability))
}

/// Outcome-dependent local correction: the anti-correlated outcomes need a
/// phase flip on party A's kept qubit, the correlated ones nothing.
pub fn apply_correction(rho: &PolDensity, outcome: DetectionOutcome) -> PolDensity {
    match outcome {
        (Sign::Plus, Sign::Plus) | (Sign::Minus, Sign::Minus) => *rho,
        _ => rho.phase_flip_a(),
    }
}
