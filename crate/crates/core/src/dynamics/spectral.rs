//! Small spectral helpers for uniformly sampled real series.

use alloc::vec::Vec;
use core::f64::consts::PI;

/// One-sided power spectrum of the Hann-windowed, mean-removed series.
/// Bin `i` has frequency `i / (n dt)`.
pub fn power_spectrum(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n < 2 {
        return Vec::new();
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    let w: Vec<f64> = x
        .iter()
        .enumerate()
        .map(|(i, v)| (v - mean) * (0.5 - 0.5 * libm::cos(2.0 * PI * i as f64 / (n - 1) as f64)))
        .collect();
    (0..=n / 2)
        .map(|k| {
            let (mut re, mut im) = (0.0, 0.0);
            for (i, v) in w.iter().enumerate() {
                let a = -2.0 * PI * (k * i % n) as f64 / n as f64;
                re += v * libm::cos(a);
                im += v * libm::sin(a);
            }
            re * re + im * im
        })
        .collect()
}

/// Frequency of the strongest non-zero bin.
pub fn dominant_frequency(x: &[f64], dt: f64) -> f64 {
    let p = power_spectrum(x);
    let k = (1..p.len())
        .max_by(|&a, &b| p[a].total_cmp(&p[b]))
        .unwrap_or(0);
    k as f64 / (x.len() as f64 * dt)
}

/// Share of the spectral power (DC excluded) carried by `0 < f < f_cut`,
/// leaving out the two bins nearest DC that the window leaks the mean into.
pub fn low_band_fraction(x: &[f64], dt: f64, f_cut: f64) -> f64 {
    let p = power_spectrum(x);
    let df = 1.0 / (x.len() as f64 * dt);
    let total: f64 = p.iter().skip(1).sum();
    if total == 0.0 {
        return 0.0;
    }
    let low: f64 = p
        .iter()
        .enumerate()
        .skip(2)
        .filter(|(k, _)| (*k as f64) * df < f_cut)
        .map(|(_, v)| v)
        .sum();
    low / total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_tone() {
        let dt = 0.01;
        let x: Vec<f64> = (0..1000)
            .map(|i| (2.0 * PI * 5.0 * i as f64 * dt).sin())
            .collect();
        assert!((dominant_frequency(&x, dt) - 5.0).abs() < 0.11);
        assert!(low_band_fraction(&x, dt, 3.0) < 1e-3);
    }

    #[test]
    fn beating_has_low_content() {
        let dt = 0.01;
        let x: Vec<f64> = (0..2000)
            .map(|i| {
                let t = i as f64 * dt;
                (2.0 * PI * 5.0 * t).sin() + 0.8 * (2.0 * PI * 0.7 * t).sin()
            })
            .collect();
        assert!(low_band_fraction(&x, dt, 3.0) > 0.2);
    }
}
