//! Directions, axes, signs and exact positions on the triangular lattice.
//!
//! The six unit steps are the sixth roots of unity `ζ^k`, `ζ = e^{iπ/3}`,
//! `k = 0..6`. With `ω = ζ²` this is the set `{±1, ±ω, ±ω²}`:
//!
//! ```text
//!   k :   0     1     2     3     4     5
//!  ζ^k:   1   -ω²     ω    -1    ω²    -ω
//! ```
//!
//! Positions are Eisenstein integers `u + vω` held as integer pairs; floats
//! only appear in [`LatticePoint::to_cartesian`].

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Neg, Sub};

use crate::counts::CountVector6;

const SQRT3_OVER_2: f64 = 0.866_025_403_784_438_6;

/// One of the six unit steps, `ζ^k`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Direction(u8);

impl Direction {
    pub const ALL: [Direction; 6] = [
        Direction(0),
        Direction(1),
        Direction(2),
        Direction(3),
        Direction(4),
        Direction(5),
    ];

    /// Returns `None` unless `k < 6`.
    pub const fn new(k: u8) -> Option<Direction> {
        if k < 6 {
            Some(Direction(k))
        } else {
            None
        }
    }

    /// Panics if `k >= 6`.
    pub const fn from_index(k: usize) -> Direction {
        assert!(k < 6, "direction index out of range");
        Direction(k as u8)
    }

    pub const fn index(self) -> usize {
        self.0 as usize
    }

    /// `-ζ^k = ζ^{k+3}`.
    pub const fn negate(self) -> Direction {
        Direction((self.0 + 3) % 6)
    }

    /// Rotates by `ζ^shift`.
    pub const fn rotate(self, shift: u8) -> Direction {
        Direction((self.0 + shift % 6) % 6)
    }

    /// Splits `ζ^k` into `s·ω^j` with `s = +1` exactly for even `k`.
    pub const fn axis_sign_decompose(self) -> (Sign, Axis) {
        let sign = if self.0.is_multiple_of(2) {
            Sign::Plus
        } else {
            Sign::Minus
        };
        // The even representative ζ^{2j} = ω^j of the axis.
        let even = if self.0.is_multiple_of(2) {
            self.0
        } else {
            (self.0 + 3) % 6
        };
        let axis = match even {
            2 => Axis::Omega1,
            4 => Axis::Omega2,
            _ => Axis::Omega3,
        };
        (sign, axis)
    }

    /// Inverse of [`Direction::axis_sign_decompose`].
    pub const fn recompose(sign: Sign, axis: Axis) -> Direction {
        let even = axis.direction();
        match sign {
            Sign::Plus => even,
            Sign::Minus => even.negate(),
        }
    }

    /// The step as an Eisenstein integer.
    pub const fn step(self) -> LatticePoint {
        const STEPS: [(i64, i64); 6] = [(1, 0), (1, 1), (0, 1), (-1, 0), (-1, -1), (0, -1)];
        let (u, v) = STEPS[self.0 as usize];
        LatticePoint { u, v }
    }
}

impl fmt::Debug for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ζ^{}", self.0)
    }
}

/// Free-function form of [`Direction::negate`].
pub fn negate(d: Direction) -> Direction {
    d.negate()
}

/// Free-function form of [`Direction::axis_sign_decompose`].
pub fn axis_sign_decompose(d: Direction) -> (Sign, Axis) {
    d.axis_sign_decompose()
}

/// The sign `Y` in `X = Y·Z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub const fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub const fn from_bit(bit: bool) -> Sign {
        if bit {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

/// An axis `ω^j`, `j ∈ {1, 2, 3}`, with `ω³ = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    Omega1,
    Omega2,
    Omega3,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::Omega1, Axis::Omega2, Axis::Omega3];

    /// The exponent `j` in `ω^j`.
    pub const fn exponent(self) -> u8 {
        match self {
            Axis::Omega1 => 1,
            Axis::Omega2 => 2,
            Axis::Omega3 => 3,
        }
    }

    pub const fn from_exponent(j: u8) -> Option<Axis> {
        match j {
            1 => Some(Axis::Omega1),
            2 => Some(Axis::Omega2),
            3 => Some(Axis::Omega3),
            _ => None,
        }
    }

    /// Zero-based slot used by three-slot count vectors (`j - 1`).
    pub const fn slot(self) -> usize {
        self.exponent() as usize - 1
    }

    pub const fn from_slot(slot: usize) -> Axis {
        match slot {
            0 => Axis::Omega1,
            1 => Axis::Omega2,
            2 => Axis::Omega3,
            _ => panic!("axis slot out of range"),
        }
    }

    /// `ω^j` as a direction (`ζ^{2j mod 6}`).
    pub const fn direction(self) -> Direction {
        Direction((2 * self.exponent()) % 6)
    }
}

/// Exact lattice point `u + vω`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct LatticePoint {
    pub u: i64,
    pub v: i64,
}

impl LatticePoint {
    pub const ORIGIN: LatticePoint = LatticePoint { u: 0, v: 0 };

    pub const fn new(u: i64, v: i64) -> Self {
        LatticePoint { u, v }
    }

    /// `(u - v/2, v·√3/2)`: x east, y north, unit step length.
    pub fn to_cartesian(self) -> (f64, f64) {
        let (u, v) = (self.u as f64, self.v as f64);
        (u - 0.5 * v, v * SQRT3_OVER_2)
    }

    /// `|u + vω|² = u² - uv + v²`, exact.
    pub const fn norm_squared(self) -> i64 {
        self.u * self.u - self.u * self.v + self.v * self.v
    }

    /// `ω^j · self`, using `ω·(u + vω) = -v + (u - v)ω`.
    pub fn mul_axis(self, axis: Axis) -> LatticePoint {
        let mut p = self;
        for _ in 0..axis.exponent() % 3 {
            p = LatticePoint::new(-p.v, p.u - p.v);
        }
        p
    }

    pub fn scale(self, k: i64) -> LatticePoint {
        LatticePoint::new(self.u * k, self.v * k)
    }
}

/// Free-function form of [`LatticePoint::to_cartesian`].
pub fn to_cartesian(pt: LatticePoint) -> (f64, f64) {
    pt.to_cartesian()
}

impl Add for LatticePoint {
    type Output = LatticePoint;

    fn add(self, rhs: LatticePoint) -> LatticePoint {
        LatticePoint::new(self.u + rhs.u, self.v + rhs.v)
    }
}

impl AddAssign for LatticePoint {
    fn add_assign(&mut self, rhs: LatticePoint) {
        self.u += rhs.u;
        self.v += rhs.v;
    }
}

impl Sub for LatticePoint {
    type Output = LatticePoint;

    fn sub(self, rhs: LatticePoint) -> LatticePoint {
        LatticePoint::new(self.u - rhs.u, self.v - rhs.v)
    }
}

impl Neg for LatticePoint {
    type Output = LatticePoint;

    fn neg(self) -> LatticePoint {
        LatticePoint::new(-self.u, -self.v)
    }
}

impl Sum for LatticePoint {
    fn sum<I: Iterator<Item = LatticePoint>>(iter: I) -> LatticePoint {
        iter.fold(LatticePoint::ORIGIN, Add::add)
    }
}

/// `Σ_k c_k · ζ^k`.
pub fn position_from_counts(c: &CountVector6) -> LatticePoint {
    let c = c.as_array().map(|x| x as i64);
    LatticePoint::new(c[0] + c[1] - c[3] - c[4], c[1] + c[2] - c[4] - c[5])
}

/// The count vector of the negated walk: slot `k` receives `c_{k+3}`.
pub fn negate_counts(c: &CountVector6) -> CountVector6 {
    c.rotated(3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dir(k: usize) -> Direction {
        Direction::from_index(k)
    }

    #[test]
    fn negate_examples() {
        assert_eq!(negate(dir(0)), dir(3));
        assert_eq!(negate(dir(2)), dir(5));
        assert_eq!(negate(negate(dir(4))), dir(4));
        assert!(Direction::new(6).is_none());
    }

    #[test]
    fn decompose_examples() {
        assert_eq!(axis_sign_decompose(dir(0)), (Sign::Plus, Axis::Omega3));
        assert_eq!(axis_sign_decompose(dir(3)), (Sign::Minus, Axis::Omega3));
        // ζ¹ = -ω²
        assert_eq!(axis_sign_decompose(dir(1)), (Sign::Minus, Axis::Omega2));
        assert_eq!(axis_sign_decompose(dir(2)), (Sign::Plus, Axis::Omega1));
        assert_eq!(axis_sign_decompose(dir(4)), (Sign::Plus, Axis::Omega2));
        assert_eq!(axis_sign_decompose(dir(5)), (Sign::Minus, Axis::Omega1));
    }

    #[test]
    fn decomposition_is_a_bijection() {
        let mut seen = std::collections::HashSet::new();
        for d in Direction::ALL {
            let (s, a) = d.axis_sign_decompose();
            assert!(seen.insert((s, a)));
            assert_eq!(Direction::recompose(s, a), d);
            // s·ω^j as a lattice point equals the step itself.
            let unit = LatticePoint::new(1, 0).mul_axis(a).scale(s.value() as i64);
            assert_eq!(unit, d.step());
        }
        assert_eq!(seen.len(), 6);
    }

    #[test]
    fn axes_are_even_directions() {
        let mut ks: Vec<usize> = Axis::ALL.iter().map(|a| a.direction().index()).collect();
        ks.sort();
        assert_eq!(ks, vec![0, 2, 4]);
    }

    #[test]
    fn step_table() {
        let expected = [(1, 0), (1, 1), (0, 1), (-1, 0), (-1, -1), (0, -1)];
        for (d, (u, v)) in Direction::ALL.iter().zip(expected) {
            assert_eq!(d.step(), LatticePoint::new(u, v));
        }
    }

    #[test]
    fn positions_from_counts() {
        assert_eq!(
            position_from_counts(&CountVector6::new([1, 0, 0, 0, 0, 0])),
            LatticePoint::new(1, 0)
        );
        assert_eq!(
            position_from_counts(&CountVector6::new([1; 6])),
            LatticePoint::ORIGIN
        );
        assert_eq!(
            position_from_counts(&CountVector6::new([2, 1, 0, 0, 0, 0])),
            LatticePoint::new(3, 1)
        );
    }

    #[test]
    fn cartesian_examples() {
        let close =
            |a: (f64, f64), b: (f64, f64)| (a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12;
        let r3 = 3f64.sqrt() / 2.0;
        assert!(close(to_cartesian(LatticePoint::new(1, 0)), (1.0, 0.0)));
        assert!(close(to_cartesian(LatticePoint::new(0, 1)), (-0.5, r3)));
        assert!(close(to_cartesian(LatticePoint::new(1, 1)), (0.5, r3)));
    }

    #[test]
    fn unit_steps_have_unit_norm() {
        for d in Direction::ALL {
            let (x, y) = d.step().to_cartesian();
            assert!((x.hypot(y) - 1.0).abs() < 1e-12);
            assert_eq!(d.step().norm_squared(), 1);
        }
    }

    #[test]
    fn norm_squared_matches_cartesian() {
        let p = LatticePoint::new(7, -3);
        let (x, y) = p.to_cartesian();
        assert!((x * x + y * y - p.norm_squared() as f64).abs() < 1e-9);
    }

    fn counts() -> impl Strategy<Value = CountVector6> {
        prop::array::uniform6(0u64..1000).prop_map(CountVector6::new)
    }

    proptest! {
        #[test]
        fn position_is_additive(a in counts(), b in counts()) {
            prop_assert_eq!(
                position_from_counts(&a) + position_from_counts(&b),
                position_from_counts(&(a + b))
            );
        }

        #[test]
        fn negation_symmetry(c in counts()) {
            prop_assert_eq!(position_from_counts(&negate_counts(&c)), -position_from_counts(&c));
        }

        #[test]
        fn position_matches_step_sum(c in counts()) {
            let direct: LatticePoint = Direction::ALL
                .iter()
                .map(|d| d.step().scale(c[d.index()] as i64))
                .sum();
            prop_assert_eq!(direct, position_from_counts(&c));
        }
    }
}
