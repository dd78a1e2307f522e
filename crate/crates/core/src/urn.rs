//! Sign/axis factorisation and the three-colour urn view of the walk.
//!
//! Each step factors as `X_m = Y_m · Z_m` with a sign `Y_m = ±1` and an axis
//! `Z_m ∈ {ω, ω², 1}`. The axis process is itself an elephant walk that
//! keeps the axis of a uniformly chosen past step with probability `p` and
//! otherwise draws a fresh uniform axis, so its counts evolve like a
//! three-colour urn whose mean replacement matrix is `p·I + (1-p)/3·J`.
//! The signs are i.i.d. fair coins independent of the axes, which gives
//! [`simulate_decomposed_walk`]: an axis urn plus one fair bit per step.

use rand::Rng;

use crate::counts::{CountVector3, CountVector6};
use crate::error::{check_memory, Error, Result};
use crate::lattice::{Axis, Direction, Sign};
use crate::rng::stream_rng;
use crate::walk::{inverse_cdf, Trajectory, WalkParams};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SignSequence(pub Vec<Sign>);

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AxisSequence(pub Vec<Axis>);

/// For each axis, the 1-based step indices at which it occurs, increasing.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StoppingTimes {
    times: [Vec<u64>; 3],
}

impl StoppingTimes {
    /// `τ_1, τ_2, ...` for `axis`.
    pub fn for_axis(&self, axis: Axis) -> &[u64] {
        &self.times[axis.slot()]
    }

    /// Final axis counts `(C¹, C², C³)`.
    pub fn counts(&self) -> CountVector3 {
        CountVector3::new(self.times.each_ref().map(|t| t.len() as u64))
    }
}

/// Splits a trajectory into signs, axes and per-axis visit times.
pub fn decompose_trajectory(t: &Trajectory) -> (SignSequence, AxisSequence, StoppingTimes) {
    let mut signs = Vec::with_capacity(t.len());
    let mut axes = Vec::with_capacity(t.len());
    let mut times = StoppingTimes::default();
    for (i, d) in t.steps().iter().enumerate() {
        let (s, a) = d.axis_sign_decompose();
        signs.push(s);
        axes.push(a);
        times.times[a.slot()].push(i as u64 + 1);
    }
    (SignSequence(signs), AxisSequence(axes), times)
}

/// Inverse of [`decompose_trajectory`] on the sign and axis sequences.
///
/// Panics if the sequences differ in length.
pub fn recompose(signs: &SignSequence, axes: &AxisSequence) -> Trajectory {
    assert_eq!(
        signs.0.len(),
        axes.0.len(),
        "sign and axis sequences differ in length"
    );
    Trajectory::from_steps(
        signs
            .0
            .iter()
            .zip(&axes.0)
            .map(|(&s, &a)| Direction::recompose(s, a))
            .collect(),
    )
}

/// The walk's position rebuilt from the per-axis sign streams:
/// `S_n = Σ_i ω^i Σ_{m ≤ C_n^i} Y_{τ_m^i}`.
pub fn reconstruct_position(
    signs: &SignSequence,
    times: &StoppingTimes,
) -> crate::lattice::LatticePoint {
    Axis::ALL
        .iter()
        .map(|&axis| {
            let walk: i64 = times
                .for_axis(axis)
                .iter()
                .map(|&tau| signs.0[tau as usize - 1].value() as i64)
                .sum();
            axis.direction().step().scale(walk)
        })
        .sum()
}

/// Probability that the next ball has colour `e_1, e_2, e_3`.
pub fn urn_transition_probs(c: &CountVector3, p: f64) -> Result<[f64; 3]> {
    check_memory(p)?;
    if c.total() == 0 {
        return Err(Error::EmptyUrn);
    }
    Ok(urn_kernel(c, p))
}

/// Urn kernel with the uniform first draw at `n = 0`.
#[inline]
pub(crate) fn urn_kernel(c: &CountVector3, p: f64) -> [f64; 3] {
    let n = c.total();
    if n == 0 {
        return [1.0 / 3.0; 3];
    }
    let base = (1.0 - p) / 3.0;
    let scale = p / n as f64;
    c.as_array().map(|ci| base + scale * ci as f64)
}

/// Mean replacement matrix of the axis urn.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanReplacementMatrix(pub [[f64; 3]; 3]);

impl MeanReplacementMatrix {
    pub fn row_sums(&self) -> [f64; 3] {
        self.0.map(|row| row.iter().sum())
    }

    pub fn column_sums(&self) -> [f64; 3] {
        std::array::from_fn(|j| self.0.iter().map(|row| row[j]).sum())
    }

    pub fn apply(&self, v: [f64; 3]) -> [f64; 3] {
        self.0
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
    }
}

/// `p + (1-p)/3` on the diagonal, `(1-p)/3` elsewhere.
pub fn mean_replacement_matrix(p: f64) -> Result<MeanReplacementMatrix> {
    check_memory(p)?;
    let off = (1.0 - p) / 3.0;
    Ok(MeanReplacementMatrix(std::array::from_fn(|i| {
        std::array::from_fn(|j| if i == j { p + off } else { off })
    })))
}

#[inline]
fn draw_axis<R: Rng + ?Sized>(c: &CountVector3, p: f64, rng: &mut R) -> Axis {
    let q = urn_kernel(c, p);
    Axis::from_slot(inverse_cdf(&q, rng.gen()))
}

/// Decomposed sampler on a caller-supplied stream: axis urn plus an
/// independent fair sign per step.
pub fn simulate_decomposed_walk_with<R: Rng + ?Sized>(
    p: f64,
    n: u64,
    rng: &mut R,
) -> Result<Trajectory> {
    let params = WalkParams::new(p, n, 0)?;
    let mut steps = Vec::with_capacity(params.n() as usize);
    let mut c = CountVector3::zero();
    for _ in 0..n {
        let axis = draw_axis(&c, p, rng);
        c.increment(axis.slot());
        let sign = Sign::from_bit(rng.gen());
        steps.push(Direction::recompose(sign, axis));
    }
    Ok(Trajectory::from_steps(steps))
}

/// Decomposed sampler on stream 0 of `params.seed`.
pub fn simulate_decomposed_walk(params: &WalkParams) -> Result<Trajectory> {
    simulate_decomposed_walk_with(params.p(), params.n(), &mut stream_rng(params.seed(), 0))
}

/// Final direction counts of the decomposed sampler without storing steps.
/// Consumes the stream exactly as [`simulate_decomposed_walk_with`] does.
pub fn simulate_decomposed_counts_with<R: Rng + ?Sized>(
    p: f64,
    n: u64,
    rng: &mut R,
) -> Result<CountVector6> {
    WalkParams::new(p, n, 0)?;
    let mut axes = CountVector3::zero();
    let mut dirs = CountVector6::zero();
    for _ in 0..n {
        let axis = draw_axis(&axes, p, rng);
        axes.increment(axis.slot());
        let sign = Sign::from_bit(rng.gen());
        dirs.increment(Direction::recompose(sign, axis).index());
    }
    Ok(dirs)
}

/// Axis-count path `C_1, ..., C_n` of the urn on a caller-supplied stream.
pub fn simulate_urn_counts_with<R: Rng + ?Sized>(
    n: u64,
    p: f64,
    rng: &mut R,
) -> Result<Vec<CountVector3>> {
    WalkParams::new(p, n, 0)?;
    let mut c = CountVector3::zero();
    let mut path = Vec::with_capacity(n as usize);
    for _ in 0..n {
        let axis = draw_axis(&c, p, rng);
        c.increment(axis.slot());
        path.push(c);
    }
    Ok(path)
}

/// Final urn counts without keeping the path.
pub fn simulate_urn_final_with<R: Rng + ?Sized>(
    n: u64,
    p: f64,
    rng: &mut R,
) -> Result<CountVector3> {
    WalkParams::new(p, n, 0)?;
    let mut c = CountVector3::zero();
    for _ in 0..n {
        let axis = draw_axis(&c, p, rng);
        c.increment(axis.slot());
    }
    Ok(c)
}

/// Urn path on stream 0 of `seed`.
pub fn simulate_urn_counts(n: u64, p: f64, seed: u64) -> Result<Vec<CountVector3>> {
    simulate_urn_counts_with(n, p, &mut stream_rng(seed, 0))
}
