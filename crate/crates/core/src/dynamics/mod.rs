//! Coupled three-wave amplitude equations for a resonance cluster.
//!
//! For every triad `(m1, m2, m3)` with coupling `Z`:
//!
//! ```text
//! dB1/dt += Z B2* B3,   dB2/dt += Z B1* B3,   dB3/dt -= Z B1 B2
//! ```
//!
//! The system is Hamiltonian with `H = Σ Z Im(B1 B2 B3*)`.

mod integrate;
pub mod spectral;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_rational::Ratio;

use crate::clustering::ClusterGraph;
use crate::{Error, Result};

pub use integrate::{
    integrate, integrate_opts, integrate_with, measure_period, Drift, IntegrateOptions,
    PhaseTracker, Trajectory, TrajectorySample,
};

/// Complex amplitude per mode slot.
pub type ModeState = Vec<Complex64>;

/// `C e^{iθ}`.
pub fn from_polar(amplitude: f64, theta: f64) -> Complex64 {
    Complex64::from_polar(amplitude, theta)
}

/// One triad of the system: mode slots `m = [p1, p2, a]` and coupling `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub m: [usize; 3],
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSystem {
    modes: Vec<i64>,
    terms: Vec<Term>,
    identifications: usize,
}

impl ClusterSystem {
    /// System from explicit terms over `modes` (wavenumber labels per slot).
    pub fn from_terms(modes: Vec<i64>, terms: Vec<Term>) -> Result<Self> {
        for t in &terms {
            let [a, b, c] = t.m;
            if a.max(b).max(c) >= modes.len() {
                return Err(Error::DimensionMismatch {
                    expected: modes.len(),
                    found: a.max(b).max(c) + 1,
                });
            }
            if a == b || b == c || a == c {
                return Err(Error::AmbiguousSharedMode { k: modes[a] });
            }
        }
        let identifications = 3 * terms.len() - modes.len().min(3 * terms.len());
        Ok(Self {
            modes,
            terms,
            identifications,
        })
    }

    /// Wavenumber label of every mode slot.
    pub fn modes(&self) -> &[i64] {
        &self.modes
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    pub fn triad_count(&self) -> usize {
        self.terms.len()
    }

    /// `2N − n`.
    pub fn expected_invariants(&self) -> usize {
        (2 * self.terms.len()).saturating_sub(self.identifications)
    }

    /// Slot of wavenumber `k`, if unique.
    pub fn slot_of(&self, k: i64) -> Option<usize> {
        let mut it = self.modes.iter().enumerate().filter(|(_, &m)| m == k);
        let first = it.next()?.0;
        if it.next().is_some() {
            None
        } else {
            Some(first)
        }
    }

    /// Signed mode × triad incidence: +1 passive, −1 active.
    pub fn incidence(&self) -> Vec<Vec<i8>> {
        let mut s = vec![vec![0i8; self.terms.len()]; self.modes.len()];
        for (j, t) in self.terms.iter().enumerate() {
            s[t.m[0]][j] = 1;
            s[t.m[1]][j] = 1;
            s[t.m[2]][j] = -1;
        }
        s
    }

    fn check(&self, state: &[Complex64]) -> Result<()> {
        if state.len() == self.modes.len() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.modes.len(),
                found: state.len(),
            })
        }
    }

    pub(crate) fn rhs(&self, b: &[Complex64], out: &mut [Complex64]) {
        for o in out.iter_mut() {
            *o = Complex64::new(0.0, 0.0);
        }
        for t in &self.terms {
            let [p, q, a] = t.m;
            out[p] += b[q].conj() * b[a] * t.z;
            out[q] += b[p].conj() * b[a] * t.z;
            out[a] -= b[p] * b[q] * t.z;
        }
    }

    pub fn time_derivative(&self, state: &[Complex64]) -> Result<ModeState> {
        self.check(state)?;
        let mut out = vec![Complex64::new(0.0, 0.0); state.len()];
        self.rhs(state, &mut out);
        Ok(out)
    }

    pub fn hamiltonian(&self, state: &[Complex64]) -> Result<f64> {
        self.check(state)?;
        Ok(self.hamiltonian_unchecked(state))
    }

    /// `1 / (max|Z| · max|B|)`, the natural time unit for run lengths.
    pub fn characteristic_time(&self, state: &[Complex64]) -> Result<f64> {
        self.check(state)?;
        let z = self
            .terms
            .iter()
            .fold(0.0f64, |a, t| a.max(libm::fabs(t.z)));
        let b = state.iter().fold(0.0f64, |a, x| a.max(x.norm()));
        let rate = z * b;
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(Error::ZeroNonlinearRate);
        }
        Ok(1.0 / rate)
    }

    pub(crate) fn hamiltonian_unchecked(&self, b: &[Complex64]) -> f64 {
        self.terms
            .iter()
            .map(|t| t.z * (b[t.m[0]] * b[t.m[1]] * b[t.m[2]].conj()).im)
            .sum()
    }

    /// `B1 B2 B3*` of triad `j`; `d|B3|²/dt = −2 Z Re(B1 B2 B3*)` for an isolated triad.
    pub fn triad_product(&self, j: usize, b: &[Complex64]) -> Complex64 {
        let t = &self.terms[j];
        b[t.m[0]] * b[t.m[1]] * b[t.m[2]].conj()
    }

    /// Integer basis of the quadratic invariants `Σ c_m |B_m|²`:
    /// the null space of the transposed incidence matrix.
    pub fn conserved_quadratics(&self) -> Vec<Vec<i64>> {
        let basis = null_space_transposed(&self.incidence());
        if basis.len() != self.expected_invariants() {
            log::warn!(
                "incidence rank deficient: {} invariants, 2N - n = {}",
                basis.len(),
                self.expected_invariants()
            );
        }
        basis
    }

    /// `φ_j = θ_{m1} + θ_{m2} − θ_{m3}` in (−π, π], `None` where an amplitude vanishes.
    pub fn dynamical_phases(&self, state: &[Complex64]) -> Result<Vec<Option<f64>>> {
        self.check(state)?;
        Ok((0..self.terms.len())
            .map(|j| self.phase_unchecked(j, state))
            .collect())
    }

    pub(crate) fn phase_unchecked(&self, j: usize, b: &[Complex64]) -> Option<f64> {
        let t = &self.terms[j];
        if t.m.iter().any(|&m| b[m].norm_sqr() == 0.0) {
            return None;
        }
        let th: f64 = b[t.m[0]].arg() + b[t.m[1]].arg() - b[t.m[2]].arg();
        Some(wrap_pi(th))
    }
}

/// Wrap an angle to (−π, π].
pub fn wrap_pi(x: f64) -> f64 {
    use core::f64::consts::PI;
    let mut y = libm::remainder(x, 2.0 * PI);
    if y <= -PI {
        y += 2.0 * PI;
    }
    y
}

/// Evaluate `Σ c_m |B_m|²`.
pub fn quadratic_value(c: &[i64], state: &[Complex64]) -> f64 {
    c.iter()
        .zip(state)
        .map(|(&c, b)| c as f64 * b.norm_sqr())
        .sum()
}

/// Couple the triads of a cluster by identifying shared wavenumbers.
pub fn build_system(cluster: &ClusterGraph) -> Result<ClusterSystem> {
    let mut degenerate = BTreeSet::new();
    let mut count: BTreeMap<i64, usize> = BTreeMap::new();
    for t in &cluster.triads {
        if t.is_degenerate() {
            degenerate.insert(t.k1);
        }
        for k in [t.k1, t.k3] {
            *count.entry(k).or_default() += 1;
        }
        if !t.is_degenerate() {
            *count.entry(t.k2).or_default() += 1;
        }
    }
    if let Some(&k) = degenerate.iter().find(|k| count[k] > 1) {
        return Err(Error::AmbiguousSharedMode { k });
    }
    let mut modes = Vec::new();
    let mut slot: BTreeMap<i64, usize> = BTreeMap::new();
    let mut terms = Vec::with_capacity(cluster.triads.len());
    for t in &cluster.triads {
        let mut get = |k: i64, fresh: bool| -> usize {
            if fresh {
                modes.push(k);
                return modes.len() - 1;
            }
            *slot.entry(k).or_insert_with(|| {
                modes.push(k);
                modes.len() - 1
            })
        };
        let d = t.is_degenerate();
        let p1 = get(t.k1, d);
        let p2 = get(t.k2, d);
        let a = get(t.k3, false);
        terms.push(Term {
            m: [p1, p2, a],
            z: t.z,
        });
    }
    let sys = ClusterSystem {
        modes,
        terms,
        identifications: cluster.identifications(),
    };
    debug_assert_eq!(sys.modes.len(), cluster.mode_count());
    Ok(sys)
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Null space of `Sᵀ` (S is modes × triads) over the rationals, as primitive
/// integer vectors with each free variable set to one in turn.
fn null_space_transposed(s: &[Vec<i8>]) -> Vec<Vec<i64>> {
    let m = s.len();
    let n = s.first().map_or(0, |r| r.len());
    let mut a: Vec<Vec<Ratio<i64>>> = (0..n)
        .map(|j| {
            (0..m)
                .map(|i| Ratio::from_integer(i64::from(s[i][j])))
                .collect()
        })
        .collect();
    let zero = Ratio::from_integer(0);
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..m {
        let Some(p) = (row..n).find(|&r| a[r][col] != zero) else {
            continue;
        };
        a.swap(row, p);
        let inv = Ratio::from_integer(1) / a[row][col];
        for x in a[row].iter_mut() {
            *x *= inv;
        }
        for r in 0..n {
            if r != row && a[r][col] != zero {
                let f = a[r][col];
                let pivot = a[row].clone();
                for (x, v) in a[r].iter_mut().zip(&pivot) {
                    *x -= f * v;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == n {
            break;
        }
    }
    let mut basis = Vec::new();
    for free in (0..m).filter(|c| !pivots.contains(c)) {
        let mut v = vec![zero; m];
        v[free] = Ratio::from_integer(1);
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -a[r][free];
        }
        let l = v
            .iter()
            .fold(1i64, |l, x| l / gcd(l, *x.denom()) * *x.denom());
        let ints: Vec<i64> = v.iter().map(|x| *x.numer() * (l / *x.denom())).collect();
        let g = ints.iter().fold(0, |g, &x| gcd(g, x));
        basis.push(ints.into_iter().map(|x| x / g.max(1)).collect());
    }
    basis
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Discrete,
    Mesoscopic,
    Kinetic,
}

/// Compare the resonance broadening with the inverse nonlinear time `|z b|`.
pub fn classify_regime(broadening: f64, z: f64, b_char: f64) -> Result<Regime> {
    let rate = libm::fabs(z * b_char);
    if !(rate > 0.0) || !rate.is_finite() {
        return Err(Error::ZeroNonlinearRate);
    }
    if !(broadening >= 0.0) {
        return Err(Error::NegativeWidth(broadening));
    }
    let ratio = broadening / rate;
    Ok(if ratio < 0.1 {
        Regime::Discrete
    } else if ratio > 10.0 {
        Regime::Kinetic
    } else {
        Regime::Mesoscopic
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::FluidParams;
    use crate::search::Triad;
    use core::f64::consts::PI;

    fn t(a: i64, b: i64) -> Triad {
        Triad::new(a, b, FluidParams::default()).unwrap()
    }

    fn sys(ts: &[Triad]) -> ClusterSystem {
        build_system(&ClusterGraph::from_triads(ts).unwrap()).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn isolated_triad_shape() {
        let s = sys(&[t(3, 5)]);
        assert_eq!(s.modes(), &[3, 5, 8]);
        assert_eq!(s.terms().len(), 1);
        assert_eq!(s.incidence(), vec![vec![1], vec![1], vec![-1]]);
        assert_eq!(
            s.conserved_quadratics(),
            vec![vec![-1, 1, 0], vec![1, 0, 1]]
        );
        let z = s.terms()[0].z;
        let b = [c(0.3, 0.1), c(-0.2, 0.5), c(0.7, -0.4)];
        let d = s.time_derivative(&b).unwrap();
        assert!((d[0] - b[1].conj() * b[2] * z).norm() < 1e-15);
        assert!((d[1] - b[0].conj() * b[2] * z).norm() < 1e-15);
        assert!((d[2] + b[0] * b[1] * z).norm() < 1e-15);
        assert!(s.time_derivative(&b[..2]).is_err());
    }

    #[test]
    fn fixed_point_and_real_state() {
        let s = sys(&[t(3, 5)]);
        let d = s
            .time_derivative(&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
            .unwrap();
        assert!(d.iter().all(|x| x.norm() == 0.0));
        assert_eq!(
            s.hamiltonian(&[c(1.0, 0.0), c(2.0, 0.0), c(-3.0, 0.0)])
                .unwrap(),
            0.0
        );
        // amplitude-phase form with cos φ = 1: Ċ1 = Z C2 C3, Ċ2 = Z C1 C3, Ċ3 = −Z C1 C2
        let z = s.terms()[0].z;
        let (c1, c2, c3) = (0.4, 0.9, 1.3);
        let d = s
            .time_derivative(&[c(c1, 0.0), c(c2, 0.0), c(c3, 0.0)])
            .unwrap();
        assert!((d[0].re - z * c2 * c3).abs() < 1e-15);
        assert!((d[1].re - z * c1 * c3).abs() < 1e-15);
        assert!((d[2].re + z * c1 * c2).abs() < 1e-15);
    }

    #[test]
    fn hamiltonian_sin_phi() {
        let s = sys(&[t(3, 5)]);
        let z = s.terms()[0].z;
        // θ = (π/2, 0, 0): φ = π/2
        let h = s
            .hamiltonian(&[from_polar(1.0, PI / 2.0), c(1.0, 0.0), c(1.0, 0.0)])
            .unwrap();
        assert!((h - z).abs() < 1e-15);
    }

    #[test]
    fn butterflies_and_stars() {
        let pp = sys(&[t(10, 47), t(3, 10)]);
        assert_eq!(pp.mode_count(), 5);
        assert_eq!(pp.conserved_quadratics().len(), 3);
        let shared = pp.slot_of(10).unwrap();
        assert!(pp.terms().iter().all(|x| x.m[..2].contains(&shared)));

        let aa = sys(&[t(50, 50 + 1), t(49, 52)]);
        assert_eq!(aa.mode_count(), 5);
        let a = aa.slot_of(101).unwrap();
        let b: Vec<Complex64> = (0..5)
            .map(|i| c(0.1 * i as f64 + 0.2, 0.3 - 0.05 * i as f64))
            .collect();
        let d = aa.time_derivative(&b).unwrap();
        let mut expect = c(0.0, 0.0);
        for x in aa.terms() {
            expect -= b[x.m[0]] * b[x.m[1]] * x.z;
        }
        assert!((d[a] - expect).norm() < 1e-15);

        let star = sys(&[t(79, 80), t(78, 81), t(77, 82)]);
        assert_eq!(star.mode_count(), 7);
        assert_eq!(star.conserved_quadratics().len(), 4);
        assert_eq!(star.expected_invariants(), 4);
    }

    #[test]
    fn four_star_and_degenerate_rule() {
        let s = sys(&[t(48, 48), t(47, 49), t(28, 96), t(46, 50)]);
        assert_eq!(s.mode_count(), 9);
        assert_eq!(s.conserved_quadratics().len(), 5);
        let g = ClusterGraph::from_triads(&[t(48, 48), t(48, 50)]).unwrap();
        assert_eq!(build_system(&g), Err(Error::AmbiguousSharedMode { k: 48 }));
    }

    #[test]
    fn invariants_are_annihilated() {
        let s = sys(&[t(48, 48), t(47, 49), t(28, 96), t(46, 50)]);
        let inc = s.incidence();
        for v in s.conserved_quadratics() {
            let dot = |j: usize| -> i64 {
                v.iter()
                    .zip(&inc)
                    .map(|(c, row)| c * i64::from(row[j]))
                    .sum()
            };
            assert!((0..s.triad_count()).all(|j| dot(j) == 0));
        }
    }

    #[test]
    fn phases() {
        let s = sys(&[t(3, 5)]);
        let p = s
            .dynamical_phases(&[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)])
            .unwrap();
        assert_eq!(p, vec![Some(0.0)]);
        let b = [
            from_polar(1.0, PI / 4.0),
            from_polar(1.0, PI / 4.0),
            from_polar(2.0, PI / 2.0),
        ];
        assert!(s.dynamical_phases(&b).unwrap()[0].unwrap().abs() < 1e-15);
        let b = [c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)];
        assert_eq!(s.dynamical_phases(&b).unwrap(), vec![None]);
        assert!((wrap_pi(-PI) - PI).abs() < 1e-15);
        assert!((wrap_pi(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn characteristic_time_uses_largest_coupling_and_amplitude() {
        let s = sys(&[t(10, 47), t(3, 10)]);
        let zmax = s.terms().iter().map(|x| x.z.abs()).fold(0.0, f64::max);
        let b: Vec<Complex64> = (0..5).map(|i| c(0.1 * i as f64, 0.0)).collect();
        let tc = s.characteristic_time(&b).unwrap();
        assert!((tc * zmax * 0.4 - 1.0).abs() < 1e-15);
        assert_eq!(
            s.characteristic_time(&[c(0.0, 0.0); 5]),
            Err(Error::ZeroNonlinearRate)
        );
    }

    #[test]
    fn regimes() {
        assert_eq!(classify_regime(0.0, 2.0, 1.0), Ok(Regime::Discrete));
        assert_eq!(classify_regime(2.0, 2.0, 1.0), Ok(Regime::Mesoscopic));
        assert_eq!(classify_regime(200.0, -2.0, 1.0), Ok(Regime::Kinetic));
        assert_eq!(
            classify_regime(1.0, 0.0, 1.0),
            Err(Error::ZeroNonlinearRate)
        );
    }
}
