//! Exact law of the count vector at small horizons.
//!
//! Because the one-step kernel depends on the past only through the counts,
//! the counts form a Markov chain on compositions of `n` into six parts
//! (`C(n+5, 5)` states). We push mass forward level by level, visiting
//! source states in lexicographic order so every run sums in the same order.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, ToPrimitive, Zero};

use crate::counts::{CountVector, CountVector3, CountVector6};
use crate::error::{check_memory, Error, Result};
use crate::lattice::position_from_counts;
use crate::urn::urn_kernel;
use crate::walk::kernel;

/// Default horizon cap for the float oracle.
pub const DEFAULT_CAP: u64 = 30;

/// Horizon cap for the exact-rational cross-check.
pub const RATIONAL_CAP: u64 = 10;

const PACK_BITS_6: u32 = 10;
const PACK_BITS_3: u32 = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleMode {
    Float,
    Rational,
}

impl fmt::Display for OracleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OracleMode::Float => "float",
            OracleMode::Rational => "rational",
        })
    }
}

/// Forward dynamic programme over `K`-slot count vectors.
///
/// Zero-mass transitions are never materialised, so the support stays sparse
/// for degenerate kernels (e.g. `p = 1`).
pub(crate) fn forward_levels<const K: usize, T, F>(
    n: u64,
    bits: u32,
    kernel: F,
    mut on_level: impl FnMut(u64, &BTreeMap<u64, T>),
) -> BTreeMap<u64, T>
where
    T: Clone + Zero + One + Add<Output = T> + Mul<Output = T>,
    F: Fn(&CountVector<K>) -> [T; K],
{
    let mut level: BTreeMap<u64, T> = BTreeMap::new();
    level.insert(CountVector::<K>::zero().pack(bits), T::one());
    on_level(0, &level);
    for m in 1..=n {
        let mut next: BTreeMap<u64, T> = BTreeMap::new();
        for (&key, mass) in &level {
            let c = CountVector::<K>::unpack(key, bits);
            let q = kernel(&c);
            for (slot, qs) in q.into_iter().enumerate() {
                if qs.is_zero() {
                    continue;
                }
                let contribution = mass.clone() * qs;
                let target = c.incremented(slot).pack(bits);
                match next.get_mut(&target) {
                    Some(acc) => *acc = acc.clone() + contribution,
                    None => {
                        next.insert(target, contribution);
                    }
                }
            }
        }
        level = next;
        on_level(m, &level);
    }
    level
}

fn check_horizon(n: u64, cap: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::EmptyHorizon);
    }
    if n > cap {
        return Err(Error::HorizonTooLarge { n, cap });
    }
    Ok(())
}

/// Exact probability mass over count vectors at horizon `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct CountDistribution<const K: usize = 6> {
    n: u64,
    p: f64,
    mode: OracleMode,
    mass: BTreeMap<CountVector<K>, f64>,
}

/// Exact law of the axis counts `(C¹, C², C³)`.
pub type AxisCountDistribution = CountDistribution<3>;

impl<const K: usize> CountDistribution<K> {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn mode(&self) -> OracleMode {
        self.mode
    }

    /// Number of support states with positive mass.
    pub fn state_count(&self) -> usize {
        self.mass.len()
    }

    /// Probability of `c`; zero off the support.
    pub fn prob(&self, c: &CountVector<K>) -> f64 {
        self.mass.get(c).copied().unwrap_or(0.0)
    }

    /// Support states in lexicographic order with their masses.
    pub fn iter(&self) -> impl Iterator<Item = (&CountVector<K>, f64)> + '_ {
        self.mass.iter().map(|(c, &m)| (c, m))
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.values().sum()
    }

    /// Every composition of `n` into `K` parts in lexicographic order,
    /// including those with zero mass.
    pub fn all_states(&self) -> Vec<CountVector<K>> {
        compositions::<K>(self.n)
    }

    fn from_packed(
        n: u64,
        p: f64,
        mode: OracleMode,
        bits: u32,
        packed: BTreeMap<u64, f64>,
    ) -> Self {
        let mass = packed
            .into_iter()
            .map(|(k, m)| (CountVector::<K>::unpack(k, bits), m))
            .collect();
        CountDistribution { n, p, mode, mass }
    }
}

impl CountDistribution<6> {
    /// One further step computed by pulling mass into each target state,
    /// an independent route from the forward push used to build levels.
    pub fn pull_step(&self) -> CountDistribution<6> {
        let mut targets: Vec<CountVector6> = self
            .mass
            .keys()
            .flat_map(|c| (0..6).map(move |d| c.incremented(d)))
            .collect();
        targets.sort();
        targets.dedup();
        let mut mass = BTreeMap::new();
        for t in targets {
            let mut acc = 0.0;
            for d in 0..6 {
                if let Some(src) = t.decremented(d) {
                    let m = self.prob(&src);
                    if m > 0.0 {
                        acc += m * kernel(&src, self.p)[d];
                    }
                }
            }
            if acc > 0.0 {
                mass.insert(t, acc);
            }
        }
        CountDistribution {
            n: self.n + 1,
            p: self.p,
            mode: self.mode,
            mass,
        }
    }

    /// Exact moments of the position `S_n` in Cartesian coordinates.
    pub fn moments(&self) -> MomentReport {
        let (mut ex, mut ey, mut exx, mut eyy, mut exy) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (c, m) in self.iter() {
            let (x, y) = position_from_counts(c).to_cartesian();
            ex += m * x;
            ey += m * y;
            exx += m * x * x;
            eyy += m * y * y;
            exy += m * x * y;
        }
        MomentReport {
            mean: (ex, ey),
            second_moment_radius: exx + eyy,
            component_variances: (exx - ex * ex, eyy - ey * ey),
            component_covariance: exy - ex * ey,
        }
    }
}

/// Compositions of `n` into `K` non-negative parts, lexicographically.
pub fn compositions<const K: usize>(n: u64) -> Vec<CountVector<K>> {
    fn rec<const K: usize>(
        slot: usize,
        left: u64,
        cur: &mut [u64; K],
        out: &mut Vec<CountVector<K>>,
    ) {
        if slot == K - 1 {
            cur[slot] = left;
            out.push(CountVector::new(*cur));
            return;
        }
        for v in 0..=left {
            cur[slot] = v;
            rec(slot + 1, left - v, cur, out);
        }
    }
    let mut out = Vec::new();
    rec(0, n, &mut [0; K], &mut out);
    out
}

/// Finite-horizon moments of `S_n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentReport {
    pub mean: (f64, f64),
    /// `E|S_n|²`.
    pub second_moment_radius: f64,
    pub component_variances: (f64, f64),
    pub component_covariance: f64,
}

/// Exact law of the six-direction counts after `n` steps.
pub fn exact_count_distribution(n: u64, p: f64) -> Result<CountDistribution> {
    exact_count_distribution_capped(n, p, DEFAULT_CAP)
}

/// As [`exact_count_distribution`] with a caller-chosen memory guard.
pub fn exact_count_distribution_capped(n: u64, p: f64, cap: u64) -> Result<CountDistribution> {
    let mut out = None;
    exact_count_levels(n, p, cap, |d| {
        if d.n() == n {
            out = Some(d.clone());
        }
    })?;
    Ok(out.expect("final level is always reported"))
}

/// Runs the oracle up to `n`, handing every level `1..=n` to `on_level`.
pub fn exact_count_levels(
    n: u64,
    p: f64,
    cap: u64,
    mut on_level: impl FnMut(&CountDistribution),
) -> Result<()> {
    check_memory(p)?;
    check_horizon(n, cap.min((1 << PACK_BITS_6) - 1))?;
    forward_levels::<6, f64, _>(
        n,
        PACK_BITS_6,
        |c| kernel(c, p),
        |m, level| {
            if m > 0 {
                on_level(&CountDistribution::from_packed(
                    m,
                    p,
                    OracleMode::Float,
                    PACK_BITS_6,
                    level.clone(),
                ));
            }
        },
    );
    Ok(())
}

/// Exact-rational version of the oracle, for `n ≤ RATIONAL_CAP`.
///
/// `p` is taken as the exact binary fraction it is stored as.
pub fn exact_count_distribution_rational(
    n: u64,
    p: f64,
) -> Result<BTreeMap<CountVector6, BigRational>> {
    check_memory(p)?;
    check_horizon(n, RATIONAL_CAP)?;
    let pr = BigRational::from_f64(p).ok_or(Error::InvalidMemory(p))?;
    let sixth = BigRational::new(BigInt::one(), BigInt::from(6));
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let base = (BigRational::one() - pr.clone()) * sixth.clone();
    let rational_kernel = |c: &CountVector6| -> [BigRational; 6] {
        let m = c.total();
        if m == 0 {
            return std::array::from_fn(|_| sixth.clone());
        }
        let scale = pr.clone() * half.clone() / BigRational::from_integer(BigInt::from(m));
        std::array::from_fn(|d| {
            base.clone()
                + scale.clone() * BigRational::from_integer(BigInt::from(c[d] + c[(d + 3) % 6]))
        })
    };
    let level = forward_levels::<6, BigRational, _>(n, PACK_BITS_6, rational_kernel, |_, _| {});
    Ok(level
        .into_iter()
        .map(|(k, m)| (CountVector6::unpack(k, PACK_BITS_6), m))
        .collect())
}

/// Rational oracle rounded to doubles, tagged with [`OracleMode::Rational`].
pub fn exact_count_distribution_rational_f64(n: u64, p: f64) -> Result<CountDistribution> {
    let exact = exact_count_distribution_rational(n, p)?;
    let mass = exact
        .into_iter()
        .map(|(c, m)| (c, m.to_f64().unwrap_or(f64::NAN)))
        .collect();
    Ok(CountDistribution {
        n,
        p,
        mode: OracleMode::Rational,
        mass,
    })
}

/// Exact moments of `S_n` from the float oracle.
pub fn exact_moments(n: u64, p: f64) -> Result<MomentReport> {
    Ok(exact_count_distribution(n, p)?.moments())
}

/// Exact law of the axis counts of the three-colour urn after `n` draws,
/// using the same forward machinery with a three-slot state.
pub fn exact_axis_distribution(n: u64, p: f64) -> Result<AxisCountDistribution> {
    check_memory(p)?;
    check_horizon(n, DEFAULT_CAP.max(64))?;
    let level = forward_levels::<3, f64, _>(
        n,
        PACK_BITS_3,
        |c: &CountVector3| urn_kernel(c, p),
        |_, _| {},
    );
    Ok(CountDistribution::from_packed(
        n,
        p,
        OracleMode::Float,
        PACK_BITS_3,
        level,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Walks every branch of the step rule (past index, copy/reverse coin,
    /// innovation value) and accumulates the probability of each final
    /// count vector. Exponential; only for tiny `n`.
    fn brute_force(n: usize, p: f64) -> BTreeMap<CountVector6, f64> {
        fn rec(
            hist: &mut Vec<usize>,
            prob: f64,
            n: usize,
            p: f64,
            out: &mut BTreeMap<CountVector6, f64>,
        ) {
            if hist.len() == n {
                let mut c = CountVector6::zero();
                for &d in hist.iter() {
                    c.increment(d);
                }
                *out.entry(c).or_insert(0.0) += prob;
                return;
            }
            if hist.is_empty() {
                for d in 0..6 {
                    hist.push(d);
                    rec(hist, prob / 6.0, n, p, out);
                    hist.pop();
                }
                return;
            }
            let m = hist.len() as f64;
            for t in 0..hist.len() {
                let past = hist[t];
                for (next, w) in [(past, p / 2.0), ((past + 3) % 6, p / 2.0)] {
                    if w > 0.0 {
                        hist.push(next);
                        rec(hist, prob * w / m, n, p, out);
                        hist.pop();
                    }
                }
                if p < 1.0 {
                    for xi in 0..6 {
                        hist.push(xi);
                        rec(hist, prob * (1.0 - p) / 6.0 / m, n, p, out);
                        hist.pop();
                    }
                }
            }
        }
        let mut out = BTreeMap::new();
        rec(&mut Vec::new(), 1.0, n, p, &mut out);
        out
    }

    #[test]
    fn single_step_is_uniform() {
        let d = exact_count_distribution(1, 0.7).unwrap();
        assert_eq!(d.state_count(), 6);
        for (_, m) in d.iter() {
            assert!((m - 1.0 / 6.0).abs() < 1e-15);
        }
    }

    #[test]
    fn two_steps_full_memory() {
        // Twelve equally likely ordered outcomes; the antipodal pairs
        // {k, k+3} arise from two orders each.
        let d = exact_count_distribution(2, 1.0).unwrap();
        assert_eq!(d.state_count(), 9);
        for k in 0..6 {
            let double = CountVector6::zero().incremented(k).incremented(k);
            assert!((d.prob(&double) - 1.0 / 12.0).abs() < 1e-15);
        }
        for k in 0..3 {
            let pair = CountVector6::zero().incremented(k).incremented(k + 3);
            assert!((d.prob(&pair) - 1.0 / 6.0).abs() < 1e-15);
        }
        assert_eq!(d.prob(&CountVector6::new([1, 1, 0, 0, 0, 0])), 0.0);
    }

    #[test]
    fn matches_brute_force_enumeration() {
        for n in 1..=4 {
            for p in [0.0, 0.3, 0.5, 1.0] {
                let dp = exact_count_distribution(n as u64, p).unwrap();
                let bf = brute_force(n, p);
                let bf_support = bf.values().filter(|&&m| m > 0.0).count();
                assert_eq!(dp.state_count(), bf_support, "n={n} p={p}");
                for (c, m) in &bf {
                    assert!((dp.prob(c) - m).abs() < 1e-12, "n={n} p={p} {c:?}");
                }
            }
        }
    }

    #[test]
    fn rational_mode_agrees_with_float() {
        for p in [0.0, 0.3, 0.9, 1.0] {
            let f = exact_count_distribution(8, p).unwrap();
            let r = exact_count_distribution_rational_f64(8, p).unwrap();
            assert_eq!(r.mode(), OracleMode::Rational);
            assert_eq!(f.state_count(), r.state_count());
            for (c, m) in f.iter() {
                assert!((m - r.prob(c)).abs() < 1e-14);
            }
        }
        let exact = exact_count_distribution_rational(5, 0.5).unwrap();
        let total = exact.values().fold(BigRational::zero(), |a, b| a + b);
        assert!(total.is_one());
    }

    #[test]
    fn pull_step_reproduces_push() {
        let p = 0.3;
        let mut prev: Option<CountDistribution> = None;
        exact_count_levels(12, p, DEFAULT_CAP, |d| {
            if let Some(prev) = &prev {
                let pulled = prev.pull_step();
                assert_eq!(pulled.state_count(), d.state_count());
                for (c, m) in d.iter() {
                    assert!((pulled.prob(c) - m).abs() < 1e-12);
                }
            }
            prev = Some(d.clone());
        })
        .unwrap();
    }

    #[test]
    fn state_count_at_cap_size() {
        // Only the count of compositions; running n = 30 lives in the
        // acceptance suite.
        assert_eq!(compositions::<6>(30).len(), 324_632);
        assert_eq!(compositions::<6>(6).len(), 462);
        assert_eq!(exact_count_distribution(6, 0.5).unwrap().state_count(), 462);
    }

    #[test]
    fn rejects_horizon_beyond_cap() {
        assert!(matches!(
            exact_count_distribution(31, 0.5),
            Err(Error::HorizonTooLarge { n: 31, cap: 30 })
        ));
        assert!(exact_count_distribution_capped(3, 0.5, 2).is_err());
        assert!(matches!(
            exact_count_distribution(0, 0.5),
            Err(Error::EmptyHorizon)
        ));
        assert!(exact_count_distribution_rational(11, 0.5).is_err());
        assert!(exact_count_distribution(3, 1.5).is_err());
    }

    #[test]
    fn two_step_full_memory_second_moment() {
        let m = exact_moments(2, 1.0).unwrap();
        assert!((m.second_moment_radius - 2.0).abs() < 1e-12);
    }

    #[test]
    fn moments_are_isotropic_and_p_free() {
        for n in [1, 5, 13] {
            for p in [0.0, 0.3, 0.9, 1.0] {
                let m = exact_moments(n, p).unwrap();
                let nf = n as f64;
                assert!(m.mean.0.abs() < 1e-10 && m.mean.1.abs() < 1e-10);
                assert!((m.second_moment_radius - nf).abs() < 1e-9);
                assert!((m.component_variances.0 - nf / 2.0).abs() < 1e-9);
                assert!((m.component_variances.1 - nf / 2.0).abs() < 1e-9);
                assert!(m.component_covariance.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn axis_oracle_is_symmetric_and_normalised() {
        let d = exact_axis_distribution(7, 0.6).unwrap();
        assert!((d.total_mass() - 1.0).abs() < 1e-12);
        for (c, m) in d.iter() {
            assert!((d.prob(&c.rotated(1)) - m).abs() < 1e-12);
        }
        let full = exact_axis_distribution(5, 1.0).unwrap();
        assert_eq!(full.state_count(), 3);
    }
}
