//! Simulation toolkit for a PBS-based optical entanglement purification
//! protocol under realistic imperfections.
//!
//! Three layers cover the protocol's behavior:
//!
//! - [`sector`]: the analytic photon-number-sector recursion — fidelity map,
//!   merge rounds, lossy channels, cascades and their closed form.
//! - [`detector`]: finite detector spectral bandwidth mapped to an
//!   equivalent efficiency through the error function ([`special`]).
//! - [`temporal`] and [`fock`]: an exact second-quantized simulation of one
//!   round with temporal mode-mismatch at the beamsplitter inputs, driven by
//!   [`mismatch`] for full rounds and worst-case searches.
//!
//! Everything is a pure function of its inputs; values are immutable after
//! construction and safe to share across threads, and randomized searches
//! use counter-based streams so parallel runs reproduce serial ones bit for
//! bit.

pub mod detector;
pub mod error;
pub mod fock;
pub mod mismatch;
pub mod sector;
pub mod special;
pub mod temporal;

pub use detector::{bandwidth_to_efficiency, efficiency_to_bandwidth, DetectorModel};
pub use error::{Error, Result};
pub use fock::{
    apply_correction, apply_pbs, prepare_branch_state, project_detection, BranchLabel,
    DetectionOutcome, FockVector, ModeIndex, Party, PathSlot, PolDensity, Polarization, Sign,
};
pub use mismatch::{
    branch_round, fig4_curve, purified_pair, worst_case_fidelity, AcceptancePolicy,
    MismatchResult, SearchConfig, SearchMode, SweepRow, WorstCase,
};
pub use sector::{
    apply_loss, cascade, closed_form_p2, effective_fidelity, iterate_fidelity, merge_round,
    normalized_two_photon_prob, purify_fidelity, resource_count, CascadeConfig, CascadeTrace,
    LossChannel, LossPlacement, NoiseModel, PairEnsemble, SectorDistribution,
};
pub use temporal::{
    build_temporal_basis, calibrate_sigma, hom_visibility, overlap, TemporalBasis,
    WavePacketConvention,
};
