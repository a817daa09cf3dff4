//! Dispersion of 2π-periodic capillary waves on a flow of constant vorticity.
//!
//! All quantities are in SI units. `σ` is surface tension over density.

use core::f64::consts::PI;
use core::fmt;

use crate::{Error, Result};

/// Water at 25 °C.
pub const SIGMA_WATER_25C: f64 = 7.23e-5;
/// Water at 5 °C.
pub const SIGMA_WATER_5C: f64 = 7.52e-5;

/// Relative tolerance separating exact resonances from rounding noise.
pub const EXACTNESS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluidParams {
    sigma: f64,
}

impl FluidParams {
    pub fn new(sigma: f64) -> Result<Self> {
        if sigma.is_finite() && sigma > 0.0 {
            Ok(Self { sigma })
        } else {
            Err(Error::InvalidSigma(sigma))
        }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

impl Default for FluidParams {
    fn default() -> Self {
        Self {
            sigma: SIGMA_WATER_25C,
        }
    }
}

/// Constant vorticity Ω of the underlying flow, in 1/s.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Vorticity(pub f64);

impl Vorticity {
    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Vorticity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Non-zero integer Fourier index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WaveNumber(i64);

impl WaveNumber {
    pub fn new(k: i64) -> Result<Self> {
        if k == 0 {
            Err(Error::ZeroWaveNumber)
        } else {
            Ok(Self(k))
        }
    }

    /// Strictly positive wavenumber, as used by the triad search.
    pub fn positive(k: i64) -> Result<Self> {
        if k > 0 {
            Ok(Self(k))
        } else {
            Err(Error::NonPositiveWaveNumber(k))
        }
    }

    pub fn get(self) -> i64 {
        self.0
    }

    fn abs_f64(self) -> f64 {
        self.0.unsigned_abs() as f64
    }
}

impl TryFrom<i64> for WaveNumber {
    type Error = Error;

    fn try_from(k: i64) -> Result<Self> {
        Self::new(k)
    }
}

impl fmt::Display for WaveNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// ω̃(k) = sqrt(σ|k|³ + Ω²/4).
pub fn tilde_frequency(k: WaveNumber, omega_cap: Vorticity, params: FluidParams) -> f64 {
    let a = k.abs_f64();
    let w = omega_cap.0;
    libm::sqrt(params.sigma * a * a * a + 0.25 * w * w)
}

/// ω(k) = −(Ω/2) sgn k + ω̃(k).
pub fn angular_frequency(k: WaveNumber, omega_cap: Vorticity, params: FluidParams) -> f64 {
    let sgn = if k.0 > 0 { 1.0 } else { -1.0 };
    -0.5 * omega_cap.0 * sgn + tilde_frequency(k, omega_cap, params)
}

/// σ-free resonant vorticity, `Ω(k1, k2; σ) = sqrt(σ) · reduced_vorticity(k1, k2)`.
pub fn reduced_vorticity(k1: u64, k2: u64) -> f64 {
    let a = k1 as f64;
    let b = k2 as f64;
    let num = a * b * (9.0 * a * a + 9.0 * b * b + 14.0 * a * b);
    let a2 = a * a;
    let b2 = b * b;
    let quartic =
        6.0 * a2 * a2 + 15.0 * a2 * a * b + 22.0 * a2 * b2 + 15.0 * a * b2 * b + 6.0 * b2 * b2;
    num / (libm::sqrt(6.0) * libm::sqrt(a + b) * libm::sqrt(quartic))
}

fn positive_pair(k1: WaveNumber, k2: WaveNumber) -> Result<(u64, u64)> {
    if k1.0 <= 0 {
        return Err(Error::NonPositiveWaveNumber(k1.0));
    }
    if k2.0 <= 0 {
        return Err(Error::NonPositiveWaveNumber(k2.0));
    }
    Ok((k1.0 as u64, k2.0 as u64))
}

/// Magnitude of the vorticity generating the resonance `(k1, k2, k1 + k2)`.
pub fn resonant_vorticity(
    k1: WaveNumber,
    k2: WaveNumber,
    params: FluidParams,
) -> Result<Vorticity> {
    let (a, b) = positive_pair(k1, k2)?;
    Ok(Vorticity(
        libm::sqrt(params.sigma) * reduced_vorticity(a, b),
    ))
}

/// The vorticity at which the dispersion relation above closes the
/// resonance for positive wavenumbers: `−resonant_vorticity(k1, k2)`.
pub fn signed_resonant_vorticity(
    k1: WaveNumber,
    k2: WaveNumber,
    params: FluidParams,
) -> Result<Vorticity> {
    resonant_vorticity(k1, k2, params).map(|w| Vorticity(-w.0))
}

/// Ω_min = 2 sqrt(σ/3).
pub fn min_resonant_vorticity(params: FluidParams) -> Vorticity {
    Vorticity(2.0 * libm::sqrt(params.sigma / 3.0))
}

/// Coupling coefficient
/// `Z = sqrt(k1 k2 k3 / (π ω̃1 ω̃2 ω̃3)) · (−ω̃1 ω̃2 / 2 + (Ω/4) ω̃3)`.
///
/// Off the resonant manifold the value is still returned and a warning is logged.
pub fn coupling_coefficient(
    k1: WaveNumber,
    k2: WaveNumber,
    k3: WaveNumber,
    omega_cap: Vorticity,
    params: FluidParams,
) -> Result<f64> {
    if k1.0.checked_add(k2.0) != Some(k3.0) {
        return Err(Error::NotATriad {
            k1: k1.0,
            k2: k2.0,
            k3: k3.0,
        });
    }
    if let Ok(res) = signed_resonant_vorticity(k1, k2, params) {
        if libm::fabs(omega_cap.0 - res.0) > EXACTNESS_TOL * libm::fabs(res.0) {
            log::warn!(
                "coupling coefficient for ({}, {}, {}) evaluated off resonance: omega = {}, resonant = {}",
                k1,
                k2,
                k3,
                omega_cap.0,
                res.0
            );
        }
    } else {
        log::warn!(
            "coupling coefficient for ({k1}, {k2}, {k3}) evaluated off the positive quadrant"
        );
    }
    let w1 = tilde_frequency(k1, omega_cap, params);
    let w2 = tilde_frequency(k2, omega_cap, params);
    let w3 = tilde_frequency(k3, omega_cap, params);
    let kk = (k1.0 as f64) * (k2.0 as f64) * (k3.0 as f64);
    let pref = libm::sqrt(kk / (PI * w1 * w2 * w3));
    Ok(pref * (-0.5 * w1 * w2 + 0.25 * omega_cap.0 * w3))
}

/// Coupling coefficient on the resonant manifold of `(k1, k2, k1 + k2)`.
pub fn resonant_coupling(k1: WaveNumber, k2: WaveNumber, params: FluidParams) -> Result<f64> {
    let w = signed_resonant_vorticity(k1, k2, params)?;
    let k3 = WaveNumber(k1.0 + k2.0);
    coupling_coefficient(k1, k2, k3, w, params)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wn(k: i64) -> WaveNumber {
        WaveNumber::new(k).unwrap()
    }

    fn unit() -> FluidParams {
        FluidParams::new(1.0).unwrap()
    }

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs())
    }

    #[test]
    fn tilde_frequency_examples() {
        assert!(close(
            tilde_frequency(wn(4), Vorticity(0.0), unit()),
            8.0,
            1e-15
        ));
        assert!(close(
            tilde_frequency(wn(1), Vorticity(2.0), unit()),
            2f64.sqrt(),
            1e-15
        ));
        assert!(close(
            tilde_frequency(wn(-4), Vorticity(0.0), unit()),
            8.0,
            1e-15
        ));
    }

    #[test]
    fn angular_frequency_examples() {
        assert!(close(
            angular_frequency(wn(4), Vorticity(0.0), unit()),
            8.0,
            1e-15
        ));
        assert!(close(
            angular_frequency(wn(1), Vorticity(2.0), unit()),
            2f64.sqrt() - 1.0,
            1e-14
        ));
        assert!(close(
            angular_frequency(wn(-1), Vorticity(2.0), unit()),
            2f64.sqrt() + 1.0,
            1e-15
        ));
    }

    #[test]
    fn zero_wavenumber_rejected() {
        assert_eq!(WaveNumber::new(0), Err(Error::ZeroWaveNumber));
        assert!(resonant_vorticity(wn(-1), wn(2), unit()).is_err());
        assert!(FluidParams::new(0.0).is_err());
        assert!(FluidParams::new(f64::NAN).is_err());
    }

    #[test]
    fn min_vorticity_values() {
        assert!(close(
            min_resonant_vorticity(unit()).0,
            2.0 / 3f64.sqrt(),
            1e-15
        ));
        let p3 = FluidParams::new(3.0).unwrap();
        assert!(close(min_resonant_vorticity(p3).0, 2.0, 1e-15));
    }

    #[test]
    fn equal_arguments_collapse() {
        // k1 = k2 = k: numerator 32 k⁴, quartic 64 k⁴, so Ω = 2 sqrt(σ/3) k^{3/2}.
        for sigma in [1.0, 7.23e-5, 0.37] {
            let p = FluidParams::new(sigma).unwrap();
            for k in [1i64, 2, 7, 50, 100] {
                let expect = 2.0 * (sigma / 3.0).sqrt() * (k as f64).powf(1.5);
                let got = resonant_vorticity(wn(k), wn(k), p).unwrap().0;
                assert!(close(got, expect, 1e-14), "k={k}: {got} vs {expect}");
            }
        }
    }

    #[test]
    fn grid_minimum_is_unit_pair() {
        let p = FluidParams::default();
        let wmin = min_resonant_vorticity(p).0;
        let mut best = (f64::INFINITY, 0, 0);
        for a in 1..=100 {
            for b in 1..=100 {
                let w = resonant_vorticity(wn(a), wn(b), p).unwrap().0;
                assert!(w >= wmin * (1.0 - 1e-15));
                if w < best.0 {
                    best = (w, a, b);
                }
            }
        }
        assert_eq!((best.1, best.2), (1, 1));
        assert!(close(best.0, wmin, 1e-15));
    }

    #[test]
    fn clustered_pair_is_close() {
        let p = FluidParams::default();
        let a = resonant_vorticity(wn(20), wn(94), p).unwrap().0;
        let b = resonant_vorticity(wn(24), wn(70), p).unwrap().0;
        assert!((a - b).abs() / a.max(b) < 1e-4);
    }

    #[test]
    fn resonance_closes_at_signed_vorticity() {
        let p = FluidParams::default();
        for (a, b) in [(1, 1), (3, 8), (50, 50), (20, 94), (99, 100)] {
            let w = signed_resonant_vorticity(wn(a), wn(b), p).unwrap();
            let w3 = angular_frequency(wn(a + b), w, p);
            let r = w3 - angular_frequency(wn(a), w, p) - angular_frequency(wn(b), w, p);
            assert!(r.abs() < 1e-9 * w3, "({a},{b}) residual {r}");
        }
    }

    #[test]
    fn coupling_checks() {
        let p = unit();
        assert_eq!(
            coupling_coefficient(wn(1), wn(2), wn(4), Vorticity(0.0), p),
            Err(Error::NotATriad {
                k1: 1,
                k2: 2,
                k3: 4
            })
        );
        let z = resonant_coupling(wn(50), wn(50), p).unwrap();
        assert!(z.is_finite() && z != 0.0);
        let za = resonant_coupling(wn(3), wn(11), p).unwrap();
        let zb = resonant_coupling(wn(11), wn(3), p).unwrap();
        assert!(close(za, zb, 1e-14));
    }

    #[test]
    fn coupling_regression_50_50() {
        // Independent evaluation at σ = 1 in closed form:
        // Ω = −2 k^{3/2}/√3, ω̃(k)² = k³ + k³/3, ω̃(2k)² = 8k³ + k³/3.
        let k = 50.0f64;
        let w = -2.0 * k.powf(1.5) / 3f64.sqrt();
        let w1 = (4.0 * k.powi(3) / 3.0).sqrt();
        let w3 = (25.0 * k.powi(3) / 3.0).sqrt();
        let expect =
            (k * k * 2.0 * k / (PI * w1 * w1 * w3)).sqrt() * (-0.5 * w1 * w1 + 0.25 * w * w3);
        let got = resonant_coupling(wn(50), wn(50), unit()).unwrap();
        assert!(close(got, expect, 1e-13), "{got} vs {expect}");
    }

    #[test]
    fn sigma_scaling() {
        for sigma in [1e-5, 7.23e-5, 1.0, 42.0] {
            let p = FluidParams::new(sigma).unwrap();
            for (a, b) in [(1, 1), (5, 9), (48, 48), (77, 82)] {
                let r = resonant_vorticity(wn(a), wn(b), p).unwrap().0
                    / resonant_vorticity(wn(a), wn(b), unit()).unwrap().0;
                assert!(close(r, sigma.sqrt(), 1e-12));
                let r = resonant_coupling(wn(a), wn(b), p).unwrap()
                    / resonant_coupling(wn(a), wn(b), unit()).unwrap();
                assert!(close(r, sigma.powf(0.25), 1e-12));
            }
        }
    }

    #[test]
    fn tilde_frequency_increases_with_k() {
        let p = FluidParams::default();
        let w = Vorticity(0.3);
        let mut prev = 0.0;
        for k in 1..200 {
            let v = tilde_frequency(wn(k), w, p);
            assert!(v > prev);
            prev = v;
        }
    }
}
