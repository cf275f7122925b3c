use thiserror::Error;

/// Errors shared across the simulation toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} must lie in [0, 1], got {value}")]
    UnitInterval { name: &'static str, value: f64 },

    #[error("{name} must be a positive finite number, got {value}")]
    NotPositive { name: &'static str, value: f64 },

    #[error("sector probabilities must be non-negative with total at most 1, got ({p0}, {p1}, {p2})")]
    InvalidSectors { p0: f64, p1: f64, p2: f64 },

    #[error("cascade requires at least one round")]
    NoRounds,

    #[error("total sector mass vanished; no heralded events remain")]
    MassVanished,

    #[error("{base}^{exponent} overflows the resource counter")]
    ResourceOverflow { base: u64, exponent: u32 },

    #[error("efficiency must lie strictly inside (0, 1), got {0}")]
    EfficiencyOutOfRange(f64),

    #[error("visibility anchor must lie strictly inside (0, 1), got {0}")]
    AnchorVisibilityOutOfRange(f64),

    #[error("anchor delay must be nonzero")]
    AnchorDelayZero,

    #[error("state must contain exactly four photons; found a term with {0}")]
    NotFourPhotons(u32),

    #[error("state mixes terms with different total photon numbers")]
    MixedPhotonNumber,

    #[error("heralded term does not leave one photon in each keep port")]
    InvalidKeptStructure,

    #[error("no heralding outcome has nonzero probability")]
    NoSuccessMass,

    #[error("search requires at least one sample")]
    NoSamples,

    #[error("every mode-mismatch sample was skipped")]
    AllSamplesSkipped,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_unit(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::UnitInterval { name, value })
    }
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::NotPositive { name, value })
    }
}
