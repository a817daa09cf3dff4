use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use super::{quadratic_value, wrap_pi, ClusterSystem};
use crate::ode::{self, DenseStep, Options, Stats};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrateOptions {
    pub tol: f64,
    /// Output points on a uniform grid over `[0, t_end]`, both ends included.
    pub samples: usize,
    pub max_steps: usize,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            samples: 1000,
            max_steps: 50_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub state: Vec<Complex64>,
    pub hamiltonian: f64,
    pub invariants: Vec<f64>,
    /// Dynamical phase per triad, continued along the trajectory; `None` where undefined.
    pub phases: Vec<Option<f64>>,
}

/// Largest relative deviation from the initial value, over every accepted
/// step and every sample.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Drift {
    pub hamiltonian: f64,
    pub invariants: Vec<f64>,
}

impl Drift {
    pub fn max(&self) -> f64 {
        self.invariants
            .iter()
            .fold(self.hamiltonian, |a, &b| a.max(b))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    pub basis: Vec<Vec<i64>>,
    pub drift: Drift,
    pub stats: Stats,
}

/// Continues each triad's dynamical phase modulo π between successive
/// evaluations: a real amplitude crossing zero flips sign, not phase.
/// [`PhaseTracker::advance`] bisects on the dense output until consecutive
/// values of `B1 B2 B3*` differ by less than half their size.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseTracker {
    prev: Vec<Option<f64>>,
    last: Vec<Complex64>,
}

const REFINE_DEPTH: u32 = 48;

impl PhaseTracker {
    pub fn new(triads: usize) -> Self {
        Self {
            prev: vec![None; triads],
            last: vec![Complex64::new(0.0, 0.0); triads],
        }
    }

    fn push(&mut self, j: usize, p: Complex64) -> Option<f64> {
        self.last[j] = p;
        if p.norm_sqr() == 0.0 {
            return None;
        }
        let raw = p.arg();
        let next = match self.prev[j] {
            None => raw,
            Some(q) => raw + PI * libm::round((q - raw) / PI),
        };
        self.prev[j] = Some(next);
        Some(wrap_pi(next))
    }

    /// Pointwise update with no information between evaluations.
    pub fn update(&mut self, system: &ClusterSystem, state: &[Complex64]) -> Vec<Option<f64>> {
        (0..self.prev.len())
            .map(|j| match system.phase_unchecked(j, state) {
                Some(_) => self.push(j, system.triad_product(j, state)),
                None => self.push(j, Complex64::new(0.0, 0.0)),
            })
            .collect()
    }

    /// Update from the last evaluation at `t_from` to `t_to` inside `step`.
    pub fn advance(
        &mut self,
        system: &ClusterSystem,
        step: &DenseStep<'_>,
        t_from: f64,
        t_to: f64,
        state_to: &[Complex64],
    ) -> Vec<Option<f64>> {
        let mut buf = vec![Complex64::new(0.0, 0.0); state_to.len()];
        (0..self.prev.len())
            .map(|j| {
                let pa = self.last[j];
                let pb = system.triad_product(j, state_to);
                self.refine(system, step, j, (t_from, pa), (t_to, pb), 0, &mut buf);
                if system.phase_unchecked(j, state_to).is_none() {
                    self.last[j] = Complex64::new(0.0, 0.0);
                    return None;
                }
                self.prev[j].map(wrap_pi)
            })
            .collect()
    }

    #[allow(clippy::too_many_arguments)]
    fn refine(
        &mut self,
        system: &ClusterSystem,
        step: &DenseStep<'_>,
        j: usize,
        a: (f64, Complex64),
        b: (f64, Complex64),
        depth: u32,
        buf: &mut [Complex64],
    ) {
        let (na, nb) = (a.1.norm(), b.1.norm());
        let far = (a.1 - b.1).norm() > 0.5 * na.min(nb);
        if depth < REFINE_DEPTH && far && na.max(nb) > 0.0 {
            let tm = 0.5 * (a.0 + b.0);
            step.interpolate_into(tm, buf);
            let pm = system.triad_product(j, buf);
            self.refine(system, step, j, a, (tm, pm), depth + 1, buf);
            self.refine(system, step, j, (tm, pm), b, depth + 1, buf);
        } else {
            self.push(j, b.1);
        }
    }
}

struct Monitor<'a> {
    system: &'a ClusterSystem,
    basis: &'a [Vec<i64>],
    h0: f64,
    h_scale: f64,
    q0: Vec<f64>,
    q_scale: Vec<f64>,
    drift: Drift,
}

impl<'a> Monitor<'a> {
    fn new(system: &'a ClusterSystem, basis: &'a [Vec<i64>], b0: &[Complex64]) -> Self {
        let bmax = b0.iter().map(|b| b.norm()).fold(0.0, f64::max);
        let mut h_scale: f64 = system
            .terms
            .iter()
            .map(|t| libm::fabs(t.z) * b0[t.m[0]].norm() * b0[t.m[1]].norm() * b0[t.m[2]].norm())
            .sum();
        if h_scale == 0.0 {
            h_scale =
                system.terms.iter().map(|t| libm::fabs(t.z)).sum::<f64>() * bmax * bmax * bmax;
        }
        let q_scale = basis
            .iter()
            .map(|c| {
                let s: f64 = c
                    .iter()
                    .zip(b0)
                    .map(|(&c, b)| (c.unsigned_abs() as f64) * b.norm_sqr())
                    .sum();
                if s > 0.0 {
                    s
                } else {
                    c.iter().map(|c| c.unsigned_abs() as f64).sum::<f64>() * bmax * bmax
                }
            })
            .collect();
        Self {
            system,
            basis,
            h0: system.hamiltonian_unchecked(b0),
            h_scale,
            q0: basis.iter().map(|c| quadratic_value(c, b0)).collect(),
            q_scale,
            drift: Drift {
                hamiltonian: 0.0,
                invariants: vec![0.0; basis.len()],
            },
        }
    }

    fn observe(&mut self, b: &[Complex64]) -> (f64, Vec<f64>) {
        let h = self.system.hamiltonian_unchecked(b);
        if self.h_scale > 0.0 {
            self.drift.hamiltonian = self
                .drift
                .hamiltonian
                .max(libm::fabs(h - self.h0) / self.h_scale);
        }
        let q: Vec<f64> = self.basis.iter().map(|c| quadratic_value(c, b)).collect();
        for (i, v) in q.iter().enumerate() {
            if self.q_scale[i] > 0.0 {
                let d = libm::fabs(v - self.q0[i]) / self.q_scale[i];
                self.drift.invariants[i] = self.drift.invariants[i].max(d);
            }
        }
        (h, q)
    }
}

/// Integrate the cluster equations from `initial` over `[0, t_end]`.
pub fn integrate(
    system: &ClusterSystem,
    initial: &[Complex64],
    t_end: f64,
    tol: f64,
) -> Result<Trajectory> {
    let opts = IntegrateOptions {
        tol,
        ..IntegrateOptions::default()
    };
    integrate_opts(system, initial, t_end, &opts)
}

pub fn integrate_opts(
    system: &ClusterSystem,
    initial: &[Complex64],
    t_end: f64,
    opts: &IntegrateOptions,
) -> Result<Trajectory> {
    integrate_with(system, initial, t_end, opts, |b, d| system.rhs(b, d))
}

/// As [`integrate`], with a caller-supplied vector field in place of the
/// cluster equations. Monitoring still uses the cluster's H and invariants.
pub fn integrate_with<F>(
    system: &ClusterSystem,
    initial: &[Complex64],
    t_end: f64,
    opts: &IntegrateOptions,
    mut field: F,
) -> Result<Trajectory>
where
    F: FnMut(&[Complex64], &mut [Complex64]),
{
    system.check(initial)?;
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidIntegration("t_end must be positive"));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidIntegration("tol must be positive"));
    }
    if opts.samples < 2 {
        return Err(Error::InvalidIntegration(
            "at least two samples are required",
        ));
    }
    let basis = system.conserved_quadratics();
    let mut mon = Monitor::new(system, &basis, initial);
    let mut tracker = PhaseTracker::new(system.triad_count());
    let grid = |i: usize| t_end * i as f64 / (opts.samples - 1) as f64;

    let mut samples = Vec::with_capacity(opts.samples);
    let (h, q) = mon.observe(initial);
    samples.push(TrajectorySample {
        t: 0.0,
        state: initial.to_vec(),
        hamiltonian: h,
        invariants: q,
        phases: tracker.update(system, initial),
    });
    let mut next = 1;
    let mut buf = vec![Complex64::new(0.0, 0.0); initial.len()];

    let stats = if initial.iter().all(|b| b.norm_sqr() == 0.0) {
        Stats::default()
    } else {
        let o = Options::with_tol(opts.tol);
        let o = Options {
            max_steps: opts.max_steps,
            ..o
        };
        ode::integrate(
            |_, b, d| field(b, d),
            0.0,
            initial,
            t_end,
            &o,
            |step: &DenseStep<'_>| {
                let mut t_from = step.t_old;
                while next < opts.samples && grid(next) <= step.t {
                    let tg = grid(next);
                    if next == opts.samples - 1 {
                        buf.copy_from_slice(step.y);
                    } else {
                        step.interpolate_into(tg, &mut buf);
                    }
                    let (h, q) = mon.observe(&buf);
                    let phases = tracker.advance(system, step, t_from, tg, &buf);
                    t_from = tg;
                    samples.push(TrajectorySample {
                        t: tg,
                        state: buf.clone(),
                        hamiltonian: h,
                        invariants: q,
                        phases,
                    });
                    next += 1;
                }
                mon.observe(step.y);
                if t_from < step.t {
                    tracker.advance(system, step, t_from, step.t, step.y);
                }
                true
            },
        )?
    };
    // The zero state is a fixed point.
    while next < opts.samples {
        let (h, q) = mon.observe(initial);
        samples.push(TrajectorySample {
            t: grid(next),
            state: initial.to_vec(),
            hamiltonian: h,
            invariants: q,
            phases: tracker.update(system, initial),
        });
        next += 1;
    }
    let drift = mon.drift;
    Ok(Trajectory {
        samples,
        basis,
        drift,
        stats,
    })
}

/// Mean period of triad `j`, from the times where `Re(B1 B2 B3*)` changes sign
/// from negative to positive, located on the dense output to near tolerance.
pub fn measure_period(
    system: &ClusterSystem,
    j: usize,
    initial: &[Complex64],
    t_end: f64,
    tol: f64,
) -> Result<Option<f64>> {
    system.check(initial)?;
    let g = |b: &[Complex64]| system.triad_product(j, b).re;
    let mut crossings: Vec<f64> = Vec::new();
    let mut prev_t = 0.0;
    let mut prev_g = g(initial);
    let mut buf = vec![Complex64::new(0.0, 0.0); initial.len()];
    ode::integrate(
        |_, b, d| system.rhs(b, d),
        0.0,
        initial,
        t_end,
        &Options::with_tol(tol),
        |step| {
            let gn = g(step.y);
            if prev_g < 0.0 && gn >= 0.0 {
                let (mut lo, mut hi) = (prev_t, step.t);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    step.interpolate_into(mid, &mut buf);
                    if g(&buf) < 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                crossings.push(0.5 * (lo + hi));
            }
            prev_t = step.t;
            prev_g = gn;
            true
        },
    )?;
    if crossings.len() < 2 {
        return Ok(None);
    }
    let n = crossings.len() - 1;
    Ok(Some((crossings[n] - crossings[0]) / n as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::ClusterGraph;
    use crate::dispersion::FluidParams;
    use crate::dynamics::{build_system, from_polar};
    use crate::search::Triad;

    fn sys(pairs: &[(i64, i64)]) -> ClusterSystem {
        let p = FluidParams::new(1.0).unwrap();
        let ts: Vec<Triad> = pairs
            .iter()
            .map(|&(a, b)| Triad::new(a, b, p).unwrap())
            .collect();
        build_system(&ClusterGraph::from_triads(&ts).unwrap()).unwrap()
    }

    #[test]
    fn fixed_point_stays() {
        let s = sys(&[(3, 5)]);
        let b0 = [
            Complex64::new(0.7, 0.2),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ];
        let tr = integrate(&s, &b0, 10.0, 1e-10).unwrap();
        assert_eq!(tr.samples.len(), 1000);
        for smp in &tr.samples {
            assert_eq!(smp.state, b0.to_vec());
        }
    }

    #[test]
    fn triad_conserves_and_stays_bounded() {
        let s = sys(&[(3, 5)]);
        let z = s.terms()[0].z.abs();
        let b0 = [
            from_polar(0.8, 0.3),
            from_polar(0.5, -1.1),
            from_polar(0.3, 2.0),
        ];
        let tc = 1.0 / (z * 0.8);
        let tr = integrate(&s, &b0, 50.0 * tc, 1e-10).unwrap();
        assert!(tr.drift.max() < 1e-8, "{:?}", tr.drift);
        let i13 = b0[0].norm_sqr() + b0[2].norm_sqr();
        let i23 = b0[1].norm_sqr() + b0[2].norm_sqr();
        for smp in &tr.samples {
            for b in &smp.state {
                assert!(b.norm_sqr() <= i13.max(i23) * (1.0 + 1e-9));
            }
        }
        assert_eq!(tr.samples.last().unwrap().t, 50.0 * tc);
    }

    #[test]
    fn zero_phase_stays_zero() {
        let s = sys(&[(3, 5)]);
        let z = s.terms()[0].z.abs();
        let b0 = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.6, 0.0),
            Complex64::new(0.2, 0.0),
        ];
        let tr = integrate(&s, &b0, 50.0 / z, 1e-10).unwrap();
        for smp in &tr.samples {
            assert!(smp.phases[0].unwrap().abs() < 1e-6);
        }
    }

    #[test]
    fn derivative_matches_central_difference() {
        let s = sys(&[(10, 47), (3, 10)]);
        let b0: Vec<Complex64> = (0..5)
            .map(|i| from_polar(0.3 + 0.1 * i as f64, 0.7 * i as f64))
            .collect();
        let opts = IntegrateOptions {
            tol: 1e-13,
            samples: 3,
            ..Default::default()
        };
        let rate = s
            .time_derivative(&b0)
            .unwrap()
            .iter()
            .map(|d| d.norm())
            .fold(0.0, f64::max);
        let mut errs = Vec::new();
        for h in [2e-2 / rate, 1e-2 / rate] {
            let tr = integrate_with(&s, &b0, 2.0 * h, &opts, |b, d| s.rhs(b, d)).unwrap();
            let mid = &tr.samples[1].state;
            let d = s.time_derivative(mid).unwrap();
            let e = (0..5)
                .map(|m| {
                    ((tr.samples[2].state[m] - tr.samples[0].state[m]) / (2.0 * h) - d[m]).norm()
                })
                .fold(0.0, f64::max);
            errs.push(e);
        }
        let order = (errs[0] / errs[1]).log2();
        assert!(order > 1.7 && order < 2.3, "{errs:?}");
    }

    #[test]
    fn phase_tracker_follows_sign_flip() {
        let s = sys(&[(3, 5)]);
        let mut tr = PhaseTracker::new(1);
        let one = Complex64::new(1.0, 0.0);
        assert_eq!(tr.update(&s, &[one, one, one]), vec![Some(0.0)]);
        assert_eq!(tr.update(&s, &[-one, one, one]), vec![Some(0.0)]);
        let p = tr.update(&s, &[from_polar(1.0, 0.1), one, one])[0].unwrap();
        assert!((p - 0.1).abs() < 1e-15);
    }
}
