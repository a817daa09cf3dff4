use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

/// Errors raised by the physics kernels, the search and the integrator.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A wavenumber of zero was supplied.
    ZeroWaveNumber,
    /// A strictly positive wavenumber was required.
    NonPositiveWaveNumber(i64),
    /// Surface tension over density must be positive and finite.
    InvalidSigma(f64),
    /// The spectral domain is empty (`kmax = 0`).
    EmptyDomain,
    /// `k3 != k1 + k2`.
    NotATriad { k1: i64, k2: i64, k3: i64 },
    /// Every width in the scanned domain is an exact resonance.
    NoPositiveWidth,
    /// Resonance widths are non-negative by definition.
    NegativeWidth(f64),
    /// `0 <= r <= r_max` was violated.
    InvalidBand { r: f64, r_max: f64 },
    /// The shared wavenumber is not part of the triad.
    ModeNotInTriad { k: i64 },
    /// The accuracy must lie strictly between zero and one.
    InvalidEpsilon(f64),
    /// A cluster must contain at least one triad and be connected.
    DisconnectedCluster,
    /// `2N - n < 1`.
    OverConnected {
        triads: usize,
        identifications: usize,
    },
    /// One wavenumber would map onto two distinct mode slots.
    AmbiguousSharedMode { k: i64 },
    /// A state vector does not match the system size.
    DimensionMismatch { expected: usize, found: usize },
    /// The elliptic modulus is outside its admissible range.
    InvalidModulus(f64),
    /// Triad invariants without a real bounded orbit.
    UnphysicalInvariants,
    /// The closed-form phase is undefined for a vanishing Hamiltonian.
    ZeroHamiltonian,
    /// `z * b_char` vanished in the regime classification.
    ZeroNonlinearRate,
    /// Integration interval or tolerance out of range.
    InvalidIntegration(&'static str),
    /// The adaptive step collapsed; carries the last accepted state.
    StepSizeUnderflow { t: f64, state: Vec<Complex64> },
    /// The step budget was exhausted; carries the last accepted state.
    TooManySteps { t: f64, state: Vec<Complex64> },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ZeroWaveNumber => write!(f, "wavenumber must be non-zero"),
            Error::NonPositiveWaveNumber(k) => write!(f, "wavenumber {k} must be positive"),
            Error::InvalidSigma(s) => write!(f, "sigma must be positive and finite, got {s}"),
            Error::EmptyDomain => write!(f, "spectral domain is empty (kmax must be at least 1)"),
            Error::NotATriad { k1, k2, k3 } => {
                write!(f, "({k1}, {k2}, {k3}) violates k3 = k1 + k2")
            }
            Error::NoPositiveWidth => write!(f, "no positive width in domain"),
            Error::NegativeWidth(d) => write!(f, "resonance width {d} is negative"),
            Error::InvalidBand { r, r_max } => {
                write!(f, "resonance band requires 0 <= r <= r_max, got r={r}, r_max={r_max}")
            }
            Error::ModeNotInTriad { k } => write!(f, "wavenumber {k} does not occur in both triads"),
            Error::InvalidEpsilon(e) => write!(f, "epsilon must lie in (0, 1), got {e}"),
            Error::DisconnectedCluster => write!(f, "cluster is empty or not connected"),
            Error::OverConnected { triads, identifications } => write!(
                f,
                "over-connected cluster: {triads} triads with {identifications} mode identifications"
            ),
            Error::AmbiguousSharedMode { k } => {
                write!(f, "wavenumber {k} maps onto two mode slots of one triad and is shared")
            }
            Error::DimensionMismatch { expected, found } => {
                write!(f, "state has {found} modes, system has {expected}")
            }
            Error::InvalidModulus(m) => write!(f, "elliptic modulus {m} out of range"),
            Error::UnphysicalInvariants => write!(f, "invariants admit no real bounded orbit"),
            Error::ZeroHamiltonian => write!(f, "phase formula undefined for zero Hamiltonian"),
            Error::ZeroNonlinearRate => write!(f, "nonlinear rate |z * b| vanishes"),
            Error::InvalidIntegration(why) => write!(f, "invalid integration request: {why}"),
            Error::StepSizeUnderflow { t, .. } => write!(f, "step size underflow at t = {t}"),
            Error::TooManySteps { t, .. } => write!(f, "step budget exhausted at t = {t}"),
        }
    }
}

impl core::error::Error for Error {}
