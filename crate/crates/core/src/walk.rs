//! Direct samplers for the walk.
//!
//! At step `m + 1` the walk picks a past step uniformly at random and copies
//! it with probability `p/2`, reverses it with probability `p/2`, or draws a
//! fresh uniform direction with probability `1 - p`. The first step is
//! uniform.
//!
//! [`simulate_history`] does exactly that with the full step history.
//! [`simulate_counts`] integrates the past-step choice out: only the six
//! counts matter, giving the closed-form kernel of [`step_distribution`].

use rand::Rng;

use crate::counts::CountVector6;
use crate::error::{check_memory, Error, Result};
use crate::lattice::{Direction, LatticePoint};
use crate::rng::stream_rng;

/// Longest trajectory the history sampler will store.
pub const HISTORY_CAP: u64 = 1 << 31;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WalkParams {
    p: f64,
    n: u64,
    seed: u64,
}

impl WalkParams {
    pub fn new(p: f64, n: u64, seed: u64) -> Result<Self> {
        check_memory(p)?;
        if n == 0 {
            return Err(Error::EmptyHorizon);
        }
        Ok(WalkParams { p, n, seed })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// A realised sequence of steps `X_1..X_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trajectory {
    steps: Vec<Direction>,
}

impl Trajectory {
    pub fn from_steps(steps: Vec<Direction>) -> Self {
        Trajectory { steps }
    }

    pub fn steps(&self) -> &[Direction] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Prefix sums `S_1..S_n`.
    pub fn positions(&self) -> impl Iterator<Item = LatticePoint> + '_ {
        self.steps.iter().scan(LatticePoint::ORIGIN, |pos, d| {
            *pos += d.step();
            Some(*pos)
        })
    }

    pub fn counts(&self) -> CountVector6 {
        let mut c = CountVector6::zero();
        for d in &self.steps {
            c.increment(d.index());
        }
        c
    }

    pub fn final_position(&self) -> LatticePoint {
        self.steps.iter().map(|d| d.step()).sum()
    }
}

/// Law of the next step given the current counts.
///
/// `q_d = (1 - p)/6 + (p/2)(c_d + c_{d+3})/n`, uniform when `n = 0`.
pub fn step_distribution(c: &CountVector6, p: f64) -> Result<[f64; 6]> {
    check_memory(p)?;
    Ok(kernel(c, p))
}

#[inline]
pub(crate) fn kernel(c: &CountVector6, p: f64) -> [f64; 6] {
    let n = c.total();
    if n == 0 {
        return [1.0 / 6.0; 6];
    }
    let base = (1.0 - p) / 6.0;
    let scale = 0.5 * p / n as f64;
    let c = c.as_array();
    std::array::from_fn(|d| base + scale * (c[d] + c[(d + 3) % 6]) as f64)
}

/// Inverse-CDF draw over slots in index order. Rounding spill goes to the
/// last slot with positive mass.
#[inline]
pub(crate) fn inverse_cdf<const K: usize>(probs: &[f64; K], u: f64) -> usize {
    let mut acc = 0.0;
    let mut last = 0;
    for (slot, &q) in probs.iter().enumerate() {
        if q > 0.0 {
            acc += q;
            last = slot;
            if u < acc {
                return slot;
            }
        }
    }
    last
}

#[inline]
pub(crate) fn uniform_direction<R: Rng + ?Sized>(rng: &mut R) -> Direction {
    Direction::from_index(rng.gen_range(0..6u32) as usize)
}

/// The literal full-history sampler on a caller-supplied stream.
pub fn simulate_history_with<R: Rng + ?Sized>(p: f64, n: u64, rng: &mut R) -> Result<Trajectory> {
    check_memory(p)?;
    if n == 0 {
        return Err(Error::EmptyHorizon);
    }
    if n > HISTORY_CAP {
        return Err(Error::HorizonTooLarge {
            n,
            cap: HISTORY_CAP,
        });
    }
    let mut steps = Vec::with_capacity(n as usize);
    steps.push(uniform_direction(rng));
    for m in 1..n {
        let t = rng.gen_range(0..m) as usize;
        let coin: f64 = rng.gen();
        let next = if coin < 0.5 * p {
            steps[t]
        } else if coin < p {
            steps[t].negate()
        } else {
            uniform_direction(rng)
        };
        steps.push(next);
    }
    Ok(Trajectory { steps })
}

/// Full-history sampler on stream 0 of `params.seed`.
pub fn simulate_history(params: &WalkParams) -> Result<Trajectory> {
    simulate_history_with(params.p, params.n, &mut stream_rng(params.seed, 0))
}

/// Constant-memory sampler on a caller-supplied stream.
pub fn simulate_counts_with<R: Rng + ?Sized>(p: f64, n: u64, rng: &mut R) -> Result<CountVector6> {
    check_memory(p)?;
    if n == 0 {
        return Err(Error::EmptyHorizon);
    }
    Ok(counts_kernel_loop(p, n, rng))
}

#[inline]
fn counts_kernel_loop<R: Rng + ?Sized>(p: f64, n: u64, rng: &mut R) -> CountVector6 {
    let mut c = CountVector6::zero();
    for _ in 0..n {
        let q = kernel(&c, p);
        let u: f64 = rng.gen();
        c.increment(inverse_cdf(&q, u));
    }
    c
}

/// The constant-memory sampler's step sequence, for trajectory dumps.
/// Consumes the stream exactly as [`simulate_counts_with`] does.
pub fn simulate_kernel_trajectory_with<R: Rng + ?Sized>(
    p: f64,
    n: u64,
    rng: &mut R,
) -> Result<Trajectory> {
    check_memory(p)?;
    if n == 0 {
        return Err(Error::EmptyHorizon);
    }
    if n > HISTORY_CAP {
        return Err(Error::HorizonTooLarge {
            n,
            cap: HISTORY_CAP,
        });
    }
    let mut c = CountVector6::zero();
    let mut steps = Vec::with_capacity(n as usize);
    for _ in 0..n {
        let q = kernel(&c, p);
        let d = inverse_cdf(&q, rng.gen());
        c.increment(d);
        steps.push(Direction::from_index(d));
    }
    Ok(Trajectory { steps })
}

/// Constant-memory sampler on stream 0 of `params.seed`.
pub fn simulate_counts(params: &WalkParams) -> Result<CountVector6> {
    simulate_counts_with(params.p, params.n, &mut stream_rng(params.seed, 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    /// Averages the copy/reverse/innovate rule over every past index, coin
    /// branch and innovation value for one history realising `c`.
    fn brute_force(c: &CountVector6, p: f64) -> [f64; 6] {
        let history: Vec<usize> = (0..6)
            .flat_map(|k| std::iter::repeat_n(k, c[k] as usize))
            .collect();
        let mut q = [0.0; 6];
        if history.is_empty() {
            return [1.0 / 6.0; 6];
        }
        let pt = 1.0 / history.len() as f64;
        for &past in &history {
            q[past] += pt * p / 2.0;
            q[(past + 3) % 6] += pt * p / 2.0;
            for xi in 0..6 {
                q[xi] += pt * (1.0 - p) / 6.0;
            }
        }
        q
    }

    #[test]
    fn kernel_examples() {
        let q = step_distribution(&CountVector6::new([1, 0, 0, 0, 0, 0]), 1.0).unwrap();
        assert!(close(&q, &[0.5, 0.0, 0.0, 0.5, 0.0, 0.0]));

        let q = step_distribution(&CountVector6::new([4, 0, 2, 9, 1, 0]), 0.0).unwrap();
        assert!(close(&q, &[1.0 / 6.0; 6]));

        let q = step_distribution(&CountVector6::new([2, 1, 0, 0, 0, 0]), 0.6).unwrap();
        let want = [
            4.0 / 15.0,
            1.0 / 6.0,
            1.0 / 15.0,
            4.0 / 15.0,
            1.0 / 6.0,
            1.0 / 15.0,
        ];
        assert!(close(&q, &want));
        assert!(close(
            &q,
            &brute_force(&CountVector6::new([2, 1, 0, 0, 0, 0]), 0.6)
        ));
    }

    #[test]
    fn empty_history_is_uniform() {
        let q = step_distribution(&CountVector6::zero(), 0.8).unwrap();
        assert!(close(&q, &[1.0 / 6.0; 6]));
    }

    #[test]
    fn rejects_out_of_range_memory() {
        assert!(matches!(
            step_distribution(&CountVector6::zero(), 1.01),
            Err(Error::InvalidMemory(_))
        ));
        assert!(step_distribution(&CountVector6::zero(), f64::NAN).is_err());
        assert!(WalkParams::new(-0.1, 10, 0).is_err());
        assert!(matches!(
            WalkParams::new(0.5, 0, 0),
            Err(Error::EmptyHorizon)
        ));
    }

    #[test]
    fn rotation_by_two_commutes_with_kernel() {
        let c = CountVector6::new([3, 1, 4, 1, 5, 9]);
        for p in [0.0, 0.3, 0.77, 1.0] {
            let q = kernel(&c, p);
            let qr = kernel(&c.rotated(2), p);
            for d in 0..6 {
                assert!((qr[(d + 2) % 6] - q[d]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn inverse_cdf_skips_zero_mass() {
        let q = [0.5, 0.0, 0.0, 0.5, 0.0, 0.0];
        assert_eq!(inverse_cdf(&q, 0.0), 0);
        assert_eq!(inverse_cdf(&q, 0.49), 0);
        assert_eq!(inverse_cdf(&q, 0.5), 3);
        assert_eq!(inverse_cdf(&q, 1.0 - f64::EPSILON), 3);
        assert_eq!(inverse_cdf(&q, 1.0), 3);
    }

    #[test]
    fn history_sampler_is_deterministic() {
        let params = WalkParams::new(0.5, 6, 42).unwrap();
        assert_eq!(
            simulate_history(&params).unwrap(),
            simulate_history(&params).unwrap()
        );
        let params = WalkParams::new(0.5, 500, 42).unwrap();
        assert_eq!(
            simulate_counts(&params).unwrap(),
            simulate_counts(&params).unwrap()
        );
    }

    #[test]
    fn full_memory_two_steps_copy_or_reverse() {
        let mut same = 0;
        for seed in 0..2000 {
            let t = simulate_history(&WalkParams::new(1.0, 2, seed).unwrap()).unwrap();
            let (a, b) = (t.steps()[0], t.steps()[1]);
            assert!(b == a || b == a.negate());
            same += usize::from(a == b);
        }
        // Binomial(2000, 1/2): 4 sigma is about 89.
        assert!((same as i64 - 1000).abs() < 90, "copies = {same}");
    }

    #[test]
    fn full_memory_counts_stay_on_one_axis() {
        for seed in 0..200 {
            let c = simulate_counts(&WalkParams::new(1.0, 3, seed).unwrap()).unwrap();
            let pairs: Vec<u64> = (0..3).map(|d| c[d] + c[d + 3]).collect();
            assert_eq!(pairs.iter().filter(|&&x| x == 3).count(), 1, "{c:?}");
        }
    }

    #[test]
    fn single_step_is_a_unit_count() {
        for seed in 0..50 {
            let c = simulate_counts(&WalkParams::new(0.3, 1, seed).unwrap()).unwrap();
            assert_eq!(c.total(), 1);
        }
    }

    #[test]
    fn kernel_trajectory_consumes_stream_like_counts() {
        for seed in 0..10 {
            let a = simulate_kernel_trajectory_with(0.4, 300, &mut stream_rng(seed, 2)).unwrap();
            let b = simulate_counts_with(0.4, 300, &mut stream_rng(seed, 2)).unwrap();
            assert_eq!(a.counts(), b);
        }
    }

    #[test]
    fn trajectory_positions_match_counts() {
        let t = simulate_history(&WalkParams::new(0.7, 300, 9).unwrap()).unwrap();
        let mut prefix = CountVector6::zero();
        for (step, pos) in t.steps().iter().zip(t.positions()) {
            prefix.increment(step.index());
            assert_eq!(pos, crate::lattice::position_from_counts(&prefix));
        }
        assert_eq!(
            t.final_position(),
            crate::lattice::position_from_counts(&t.counts())
        );
    }
}
