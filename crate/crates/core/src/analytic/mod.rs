//! Closed-form solution of an isolated triad.
//!
//! With `ρ_j = |B_j|²`, the invariants `I13 = ρ1 + ρ3`, `I23 = ρ2 + ρ3` and
//! `H = Z Im(B1 B2 B3*)` reduce the triad to
//!
//! ```text
//! (dρ3/dt)² = 4 Z² P(ρ3),   P(ρ) = ρ (I13 − ρ)(I23 − ρ) − (H/Z)²
//! ```
//!
//! so `ρ3` oscillates between the two smallest roots of `P` as a squared
//! Jacobi `dn`.

mod elliptic;

use num_complex::Complex64;

use crate::{Error, Result};

pub use elliptic::{carlson_rf, complete_elliptic_k, incomplete_elliptic_f, jacobi_elliptic};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriadInvariants {
    pub i13: f64,
    pub i23: f64,
    /// Z-weighted Hamiltonian.
    pub h: f64,
    pub z: f64,
}

impl TriadInvariants {
    pub fn from_state(z: f64, b: [Complex64; 3]) -> Self {
        let (r1, r2, r3) = (b[0].norm_sqr(), b[1].norm_sqr(), b[2].norm_sqr());
        Self {
            i13: r1 + r3,
            i23: r2 + r3,
            h: z * (b[0] * b[1] * b[2].conj()).im,
            z,
        }
    }

    /// Hamiltonian without the coupling factor.
    pub fn reduced_hamiltonian(&self) -> f64 {
        self.h / self.z
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticParams {
    pub rho_a: f64,
    pub rho_b: f64,
    pub rho_c: f64,
    pub mu: f64,
    /// `K(μ)`; infinite on the separatrix `μ = 1`.
    pub k: f64,
    /// `|z| sqrt(ρc − ρa)`.
    pub lambda: f64,
    /// Period of `ρ3`, `2K / λ`.
    pub tau: f64,
}

/// `offset + scale · dn²(rate · (t − t0) | modulus)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DnTemplate {
    pub offset: f64,
    pub scale: f64,
    pub rate: f64,
    pub modulus: f64,
}

impl DnTemplate {
    pub fn eval(&self, t: f64) -> f64 {
        let (_, _, dn) = jacobi_elliptic(self.rate * t, self.modulus).unwrap_or((0.0, 1.0, 1.0));
        self.offset + self.scale * dn * dn
    }
}

fn monic_cubic_real_roots(a: f64, b: f64, c: f64) -> Option<[f64; 3]> {
    // x³ + a x² + b x + c
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let shift = -a / 3.0;
    let mut r = if p >= 0.0 {
        if p.abs() > 1e-14 * (1.0 + b.abs()) || q.abs() > 1e-14 * (1.0 + c.abs()) {
            return None;
        }
        [shift; 3]
    } else {
        let m = 2.0 * libm::sqrt(-p / 3.0);
        let arg = 3.0 * q / (p * m);
        if arg.abs() > 1.0 + 1e-9 {
            return None;
        }
        let th = libm::acos(arg.clamp(-1.0, 1.0)) / 3.0;
        let tp = 2.0 * core::f64::consts::PI / 3.0;
        [
            m * libm::cos(th) + shift,
            m * libm::cos(th - tp) + shift,
            m * libm::cos(th - 2.0 * tp) + shift,
        ]
    };
    for x in r.iter_mut() {
        for _ in 0..3 {
            let f = ((*x + a) * *x + b) * *x + c;
            let d = (3.0 * *x + 2.0 * a) * *x + b;
            if d == 0.0 {
                break;
            }
            let step = f / d;
            if !step.is_finite() || step.abs() > 1e-6 * (1.0 + x.abs()) {
                break;
            }
            *x -= step;
        }
    }
    r.sort_by(f64::total_cmp);
    Some(r)
}

/// Roots, modulus and period of the invariant cubic.
pub fn triad_elliptic_params(inv: &TriadInvariants) -> Result<EllipticParams> {
    let TriadInvariants { i13, i23, h, z } = *inv;
    if !(i13 >= 0.0 && i23 >= 0.0) || !i13.is_finite() || !i23.is_finite() || !h.is_finite() {
        return Err(Error::UnphysicalInvariants);
    }
    if z == 0.0 || !z.is_finite() {
        return Err(Error::ZeroNonlinearRate);
    }
    let ht = h / z;
    let [ra, rb, rc] = if ht == 0.0 {
        let mut r = [0.0, i13, i23];
        r.sort_by(f64::total_cmp);
        r
    } else {
        monic_cubic_real_roots(-(i13 + i23), i13 * i23, -ht * ht)
            .ok_or(Error::UnphysicalInvariants)?
    };
    let scale = i13.max(i23).max(f64::MIN_POSITIVE);
    if ra < -1e-12 * scale || rb > i13.min(i23) + 1e-12 * scale {
        return Err(Error::UnphysicalInvariants);
    }
    let ra = ra.max(0.0);
    let span = rc - ra;
    let mu = if span > 0.0 {
        libm::sqrt(((rb - ra) / span).clamp(0.0, 1.0))
    } else {
        0.0
    };
    let lambda = libm::fabs(z) * libm::sqrt(span.max(0.0));
    let k = if mu >= 1.0 {
        f64::INFINITY
    } else {
        complete_elliptic_k(mu)?
    };
    let tau = if lambda > 0.0 {
        2.0 * k / lambda
    } else {
        f64::INFINITY
    };
    Ok(EllipticParams {
        rho_a: ra,
        rho_b: rb,
        rho_c: rc,
        mu,
        k,
        lambda,
        tau,
    })
}

impl EllipticParams {
    /// `dn²` templates of `(ρ1, ρ2, ρ3)` in `t − t0`.
    pub fn templates(&self, inv: &TriadInvariants) -> [DnTemplate; 3] {
        let amp = self.rho_c - self.rho_a;
        let mk = |offset, scale| DnTemplate {
            offset,
            scale,
            rate: self.lambda,
            modulus: self.mu,
        };
        [
            mk(inv.i13 - self.rho_c, amp),
            mk(inv.i23 - self.rho_c, amp),
            mk(self.rho_c, -amp),
        ]
    }
}

/// `(C1², C2², C3²)` at `t`; `ρ3` is at its minimum `ρa` when `t = t0`.
pub fn closed_form_amplitudes(
    params: &EllipticParams,
    inv: &TriadInvariants,
    t: f64,
    t0: f64,
) -> (f64, f64, f64) {
    let [a, b, c] = params.templates(inv);
    let s = t - t0;
    (a.eval(s), b.eval(s), c.eval(s))
}

/// Time of the `ρ3` minimum nearest to `t = 0` for the initial state `b`.
pub fn align_time_origin(
    params: &EllipticParams,
    inv: &TriadInvariants,
    b: [Complex64; 3],
) -> Result<f64> {
    let width = params.rho_b - params.rho_a;
    if !(width > 0.0) || !(params.lambda > 0.0) {
        return Ok(0.0);
    }
    let s0 = ((b[2].norm_sqr() - params.rho_a) / width).clamp(0.0, 1.0);
    let u0 = incomplete_elliptic_f(libm::asin(libm::sqrt(s0)), params.mu)?;
    let rising = -2.0 * inv.z * (b[0] * b[1] * b[2].conj()).re >= 0.0;
    Ok(if rising {
        -u0 / params.lambda
    } else {
        u0 / params.lambda
    })
}

/// Dynamical phase `φ(t) = sign(φ0) · arccot(k1 · (sn cn dn)(k2 (t − t0) | μ))`
/// with `k1 = −(μ²/|H_T|)(2K/(Z τ))³`, `k2 = 2K/τ` and `H_T = h/z`.
pub fn closed_form_phase(
    params: &EllipticParams,
    inv: &TriadInvariants,
    phi0: f64,
    t: f64,
    t0: f64,
) -> Result<f64> {
    if inv.h == 0.0 {
        return Err(Error::ZeroHamiltonian);
    }
    let ht = libm::fabs(inv.h / inv.z);
    let k2 = 2.0 * params.k / params.tau;
    let r = k2 / inv.z;
    let k1 = -(params.mu * params.mu / ht) * r * r * r;
    let (sn, cn, dn) = jacobi_elliptic(k2 * (t - t0), params.mu)?;
    let x = k1 * sn * cn * dn;
    let sign = if phi0 < 0.0 { -1.0 } else { 1.0 };
    Ok(sign * libm::atan2(1.0, x))
}
