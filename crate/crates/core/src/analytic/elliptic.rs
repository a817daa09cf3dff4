//! Jacobi elliptic functions and elliptic integrals of the first kind.
//!
//! Moduli are `μ` with parameter `m = μ²`.

use core::f64::consts::PI;

use crate::{Error, Result};

const AGM_MAX: usize = 40;

fn check_modulus(mu: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&mu) {
        Ok(mu * mu)
    } else {
        Err(Error::InvalidModulus(mu))
    }
}

/// Complete elliptic integral of the first kind, by the arithmetic-geometric mean.
pub fn complete_elliptic_k(mu: f64) -> Result<f64> {
    let m = check_modulus(mu)?;
    let b = libm::sqrt(1.0 - m);
    if mu >= 1.0 || b == 0.0 {
        return Err(Error::InvalidModulus(mu));
    }
    let (mut a, mut b) = (1.0f64, b);
    for _ in 0..AGM_MAX {
        if libm::fabs(a - b) <= 1e-16 * a {
            break;
        }
        (a, b) = (0.5 * (a + b), libm::sqrt(a * b));
    }
    Ok(PI / (a + b))
}

/// `(sn, cn, dn)(x | μ)` by descending Landen transformation.
pub fn jacobi_elliptic(x: f64, mu: f64) -> Result<(f64, f64, f64)> {
    let m = check_modulus(mu)?;
    if m == 0.0 {
        return Ok((libm::sin(x), libm::cos(x), 1.0));
    }
    if m == 1.0 {
        let s = 1.0 / libm::cosh(x);
        return Ok((libm::tanh(x), s, s));
    }
    let mut a = [0.0f64; AGM_MAX + 1];
    let mut c = [0.0f64; AGM_MAX + 1];
    a[0] = 1.0;
    let mut b = libm::sqrt(1.0 - m);
    c[0] = libm::sqrt(m);
    let mut n = 0;
    while libm::fabs(c[n]) > 1e-16 * a[n] && n < AGM_MAX {
        a[n + 1] = 0.5 * (a[n] + b);
        c[n + 1] = 0.5 * (a[n] - b);
        b = libm::sqrt(a[n] * b);
        n += 1;
    }
    // Reduce x modulo the real period 4K = 2π / a_n.
    let period = 2.0 * PI / a[n];
    let x = x - period * libm::round(x / period);
    let mut phi = libm::ldexp(a[n] * x, n as i32);
    for j in (1..=n).rev() {
        phi = 0.5 * (phi + libm::asin(c[j] * libm::sin(phi) / a[j]));
    }
    let sn = libm::sin(phi);
    let cn = libm::cos(phi);
    let dn = libm::sqrt((1.0 - m * sn * sn).max(0.0));
    Ok((sn, cn, dn))
}

/// Carlson's symmetric integral `R_F(x, y, z)`.
pub fn carlson_rf(x: f64, y: f64, z: f64) -> f64 {
    let (mut x, mut y, mut z) = (x, y, z);
    for _ in 0..100 {
        let mu = (x + y + z) / 3.0;
        let dx = 1.0 - x / mu;
        let dy = 1.0 - y / mu;
        let dz = 1.0 - z / mu;
        if dx.abs().max(dy.abs()).max(dz.abs()) < 1e-4 {
            let e2 = dx * dy - dz * dz;
            let e3 = dx * dy * dz;
            return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0)
                / libm::sqrt(mu);
        }
        let (sx, sy, sz) = (libm::sqrt(x), libm::sqrt(y), libm::sqrt(z));
        let l = sx * (sy + sz) + sy * sz;
        x = 0.25 * (x + l);
        y = 0.25 * (y + l);
        z = 0.25 * (z + l);
    }
    1.0 / libm::sqrt((x + y + z) / 3.0)
}

/// Incomplete elliptic integral of the first kind for `|φ| <= π/2`.
pub fn incomplete_elliptic_f(phi: f64, mu: f64) -> Result<f64> {
    let m = check_modulus(mu)?;
    let s = libm::sin(phi);
    let c = libm::cos(phi);
    let d = 1.0 - m * s * s;
    if d <= 0.0 {
        return if s == 0.0 {
            Ok(0.0)
        } else {
            Ok(f64::INFINITY.copysign(s))
        };
    }
    Ok(s * carlson_rf(c * c, d, 1.0))
}
