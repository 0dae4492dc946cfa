//! Scalar abstraction shared by every module.
//!
//! Geometry, preferences, committees and the voting rules are written once
//! against [`Scalar`], which `f32`, `f64` and [`Rational64`] implement. Code
//! that needs transcendental functions (root finding, angular sweeps) asks for
//! [`Real`] instead.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use num_rational::Rational64;
use num_traits::{Float, FromPrimitive, Num, Signed, ToPrimitive};

/// Numeric type the committee machinery is generic over.
pub trait Scalar:
    Copy
    + PartialOrd
    + Num
    + Signed
    + FromPrimitive
    + ToPrimitive
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
{
    /// Absolute slack for tolerant comparisons. Zero for exact types.
    fn tolerance() -> Self;

    /// `(sum |x_i|^p)^(1/p)` over already non-negative entries, finite `p >= 1`.
    fn lp_magnitude(abs_coords: &[Self], p: f64) -> Self;

    /// Whether arithmetic on this type is exact.
    fn is_exact() -> bool {
        false
    }

    fn from_f64_lossy(x: f64) -> Self {
        Self::from_f64(x).expect("value not representable in scalar type")
    }

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count not representable in scalar type")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn half() -> Self {
        Self::one() / (Self::one() + Self::one())
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    /// `self <= other` up to [`Scalar::tolerance`].
    fn approx_le(self, other: Self) -> bool {
        self <= other + Self::tolerance()
    }

    fn approx_eq(self, other: Self) -> bool {
        (self - other).abs() <= Self::tolerance()
    }
}

fn float_lp<F: Float>(abs_coords: &[F], p: f64) -> F {
    if p == 1.0 {
        abs_coords.iter().fold(F::zero(), |acc, &x| acc + x)
    } else if p == 2.0 {
        abs_coords
            .iter()
            .fold(F::zero(), |acc, &x| acc + x * x)
            .sqrt()
    } else {
        let big = abs_coords.iter().fold(F::zero(), |acc, &x| acc.max(x));
        if big == F::zero() {
            return F::zero();
        }
        let pf = F::from(p).unwrap();
        let sum = abs_coords
            .iter()
            .fold(F::zero(), |acc, &x| acc + (x / big).powf(pf));
        big * sum.powf(pf.recip())
    }
}

impl Scalar for f64 {
    fn tolerance() -> Self {
        1e-9
    }

    fn lp_magnitude(abs_coords: &[Self], p: f64) -> Self {
        float_lp(abs_coords, p)
    }
}

impl Scalar for f32 {
    fn tolerance() -> Self {
        1e-5
    }

    fn lp_magnitude(abs_coords: &[Self], p: f64) -> Self {
        float_lp(abs_coords, p)
    }
}

impl Scalar for Rational64 {
    fn tolerance() -> Self {
        Rational64::from_integer(0)
    }

    // Exact for p = 1 and for a single non-zero coordinate; other cases go
    // through f64 and are only as exact as the round trip.
    fn lp_magnitude(abs_coords: &[Self], p: f64) -> Self {
        let zero = Rational64::from_integer(0);
        let nonzero: Vec<_> = abs_coords.iter().filter(|&&x| x != zero).collect();
        if p == 1.0 {
            return abs_coords.iter().fold(zero, |acc, &x| acc + x);
        }
        match nonzero.len() {
            0 => zero,
            1 => *nonzero[0],
            _ => {
                let approx: Vec<f64> = abs_coords.iter().map(|x| x.to_f64_lossy()).collect();
                Rational64::from_f64_lossy(float_lp(&approx, p))
            }
        }
    }

    fn is_exact() -> bool {
        true
    }
}

/// Scalars with a full floating-point toolbox.
pub trait Real: Scalar + Float {}

impl<T: Scalar + Float> Real for T {}

/// A scalar extended with `+inf`, the value of an absent edge or an
/// unreachable vertex.
///
/// Addition saturates at infinity; two infinities are never subtracted.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub enum ExtReal<S> {
    Finite(S),
    PosInfinity,
}

impl<S: Scalar> ExtReal<S> {
    pub fn zero() -> Self {
        ExtReal::Finite(S::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn finite(self) -> Option<S> {
        match self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::PosInfinity => None,
        }
    }

    /// Lossy conversion for reporting; `+inf` maps to `f64::INFINITY`.
    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::Finite(v) => v.to_f64_lossy(),
            ExtReal::PosInfinity => f64::INFINITY,
        }
    }

    pub fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Total order for finite values compared with `partial_cmp`; NaN never
    /// appears in constructed inputs and is treated as equal.
    pub fn cmp_total(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).unwrap_or(Ordering::Equal)
    }
}

impl<S: Scalar> Add for ExtReal<S> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a + b),
            _ => ExtReal::PosInfinity,
        }
    }
}

impl<S: Scalar> From<S> for ExtReal<S> {
    fn from(v: S) -> Self {
        ExtReal::Finite(v)
    }
}

impl<S: Scalar> fmt::Display for ExtReal<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::PosInfinity => write!(f, "inf"),
        }
    }
}
