//! Exact resonant triads on an integer spectral domain and resonance widths.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::dispersion::{
    angular_frequency, reduced_vorticity, resonant_coupling, FluidParams, Vorticity, WaveNumber,
    EXACTNESS_TOL,
};
use crate::{Error, Result};

/// Role of a wavenumber inside a triad.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    /// Active, high-frequency mode `k3`.
    Active,
    /// Passive mode `k1` or `k2`.
    Passive,
}

/// Exact resonance `(k1, k2, k1 + k2)` with `k1 <= k2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triad {
    pub k1: i64,
    pub k2: i64,
    pub k3: i64,
    /// Generating vorticity magnitude.
    pub omega_gen: Vorticity,
    /// Coupling coefficient on the resonant manifold.
    pub z: f64,
    reduced: f64,
}

impl Triad {
    pub fn new(k1: i64, k2: i64, params: FluidParams) -> Result<Self> {
        let (a, b) = if k1 <= k2 { (k1, k2) } else { (k2, k1) };
        let wa = WaveNumber::positive(a)?;
        let wb = WaveNumber::positive(b)?;
        let reduced = reduced_vorticity(a as u64, b as u64);
        Ok(Self {
            k1: a,
            k2: b,
            k3: a + b,
            omega_gen: Vorticity(libm::sqrt(params.sigma()) * reduced),
            z: resonant_coupling(wa, wb, params)?,
            reduced,
        })
    }

    /// σ-free vorticity; `omega_gen = sqrt(σ) · reduced_vorticity()`.
    pub fn reduced_vorticity(&self) -> f64 {
        self.reduced
    }

    /// The vorticity at which the dispersion relation closes this triad.
    pub fn signed_vorticity(&self) -> Vorticity {
        Vorticity(-self.omega_gen.0)
    }

    pub fn modes(&self) -> [i64; 3] {
        [self.k1, self.k2, self.k3]
    }

    pub fn contains(&self, k: i64) -> bool {
        self.k1 == k || self.k2 == k || self.k3 == k
    }

    pub fn role(&self, k: i64) -> Option<Role> {
        if k == self.k3 {
            Some(Role::Active)
        } else if k == self.k1 || k == self.k2 {
            Some(Role::Passive)
        } else {
            None
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.k1 == self.k2
    }

    /// `|ω(k3) − ω(k1) − ω(k2)| / ω(k3)` at the signed vorticity.
    pub fn relative_residual(&self, params: FluidParams) -> f64 {
        let w = self.signed_vorticity();
        let w3 = angular_frequency(WaveNumber::new(self.k3).unwrap(), w, params);
        let d = resonance_width_raw(self.k1, self.k2, w, params);
        d / libm::fabs(w3)
    }
}

fn triad_order(a: &Triad, b: &Triad) -> Ordering {
    a.reduced
        .total_cmp(&b.reduced)
        .then(a.k1.cmp(&b.k1))
        .then(a.k2.cmp(&b.k2))
}

/// All exact triads with `1 <= k1 <= k2 <= kmax`, ascending in generating vorticity.
/// `k3` may exceed `kmax`.
pub fn enumerate_triads(kmax: u32, params: FluidParams) -> Result<Vec<Triad>> {
    if kmax == 0 {
        return Err(Error::EmptyDomain);
    }
    let kmax = i64::from(kmax);
    let mut out = Vec::with_capacity((kmax * (kmax + 1) / 2) as usize);
    for k1 in 1..=kmax {
        for k2 in k1..=kmax {
            out.push(Triad::new(k1, k2, params)?);
        }
    }
    out.sort_by(triad_order);
    Ok(out)
}

fn resonance_width_raw(k1: i64, k2: i64, omega_cap: Vorticity, params: FluidParams) -> f64 {
    let w = |k| angular_frequency(WaveNumber::new(k).unwrap(), omega_cap, params);
    libm::fabs(w(k1) + w(k2) - w(k1 + k2))
}

/// `δ = |ω(k1) + ω(k2) − ω(k1 + k2)|`.
pub fn resonance_width(
    k1: WaveNumber,
    k2: WaveNumber,
    omega_cap: Vorticity,
    params: FluidParams,
) -> Result<f64> {
    let a = WaveNumber::positive(k1.get())?.get();
    let b = WaveNumber::positive(k2.get())?.get();
    Ok(resonance_width_raw(a, b, omega_cap, params))
}

/// Smallest width on the domain that is not an exact resonance, the estimate of 𝓡(ω).
pub fn min_positive_width(kmax: u32, omega_cap: Vorticity, params: FluidParams) -> Result<f64> {
    if kmax == 0 {
        return Err(Error::EmptyDomain);
    }
    let kmax = i64::from(kmax);
    let mut best = f64::INFINITY;
    for k1 in 1..=kmax {
        for k2 in k1..=kmax {
            let d = resonance_width_raw(k1, k2, omega_cap, params);
            let scale = libm::fabs(angular_frequency(
                WaveNumber::new(k1 + k2).unwrap(),
                omega_cap,
                params,
            ));
            if d > EXACTNESS_TOL * scale && d < best {
                best = d;
            }
        }
    }
    if best.is_finite() {
        Ok(best)
    } else {
        Err(Error::NoPositiveWidth)
    }
}

/// Width of `(k1, k2)` at the exact-resonance vorticity of the domain nearest to
/// `omega_cap`, excluding resonances at `omega_cap` itself: the estimate of 𝓡_max(ω).
pub fn max_width_estimate(
    k1: WaveNumber,
    k2: WaveNumber,
    omega_cap: Vorticity,
    kmax: u32,
    params: FluidParams,
) -> Result<f64> {
    let triads = enumerate_triads(kmax, params)?;
    let w = omega_cap.0;
    let scale = libm::fabs(w).max(f64::MIN_POSITIVE);
    let nearest = triads
        .iter()
        .map(|t| {
            if w > 0.0 {
                t.omega_gen.0
            } else {
                t.signed_vorticity().0
            }
        })
        .filter(|v| libm::fabs(v - w) > EXACTNESS_TOL * scale)
        .min_by(|a, b| libm::fabs(a - w).total_cmp(&libm::fabs(b - w)))
        .ok_or(Error::NoPositiveWidth)?;
    resonance_width(k1, k2, Vorticity(nearest), params)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InteractionKind {
    Exact,
    Quasi,
    Approximate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionClass {
    pub kind: InteractionKind,
    pub delta: f64,
}

/// Exact if `delta` vanishes to tolerance (relative to `r_max`), quasi if `delta < r`,
/// approximate otherwise. Widths beyond `r_max` are approximate and logged.
pub fn classify_interaction(delta: f64, r: f64, r_max: f64) -> Result<InteractionClass> {
    if !(delta >= 0.0) {
        return Err(Error::NegativeWidth(delta));
    }
    if !(r >= 0.0 && r <= r_max) {
        return Err(Error::InvalidBand { r, r_max });
    }
    let kind = if delta <= EXACTNESS_TOL * r_max {
        InteractionKind::Exact
    } else if delta < r {
        InteractionKind::Quasi
    } else {
        if delta >= r_max {
            log::warn!("width {delta} is not below r_max = {r_max}; reported as approximate");
        }
        InteractionKind::Approximate
    };
    Ok(InteractionClass { kind, delta })
}
