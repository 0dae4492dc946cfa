//! Normed-space primitives: points, ℓp norms, convex domains, covers and
//! packings, and the ray/sphere root finder used by the adversary.

mod cover;
mod root;

pub use cover::{
    cover_verify, greedy_packing, greedy_packing_with_resolution, grid_cover, Cover, Packing,
};
pub use root::{ray_sphere_root, RayRoot};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

/// Default number of dense samples used by verification helpers.
pub const DEFAULT_SAMPLES: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("invalid norm exponent p = {0} (need p >= 1)")]
    InvalidExponent(f64),
    #[error("segment parameter {0} outside [0, 1]")]
    ParameterOutOfRange(f64),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("no root bracket found for ray/sphere intersection")]
    NoBracket,
}

/// A location in `R^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct Point<S>(Vec<S>);

impl<S: Scalar> Point<S> {
    pub fn new(coords: Vec<S>) -> Self {
        Point(coords)
    }

    pub fn try_new(coords: Vec<S>) -> Result<Self, GeometryError> {
        if coords
            .iter()
            .any(|c| c.to_f64().is_none_or(|v| !v.is_finite()))
        {
            return Err(GeometryError::NonFinite);
        }
        Ok(Point(coords))
    }

    pub fn zeros(dim: usize) -> Self {
        Point(vec![S::zero(); dim])
    }

    pub fn from_f64(coords: &[f64]) -> Self {
        Point(coords.iter().map(|&c| S::from_f64_lossy(c)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[S] {
        &self.0
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.0.iter().map(|c| c.to_f64_lossy()).collect()
    }

    pub fn sub(&self, other: &Self) -> Self {
        Point(self.0.iter().zip(&other.0).map(|(&a, &b)| a - b).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        Point(self.0.iter().zip(&other.0).map(|(&a, &b)| a + b).collect())
    }

    pub fn scale(&self, t: S) -> Self {
        Point(self.0.iter().map(|&a| a * t).collect())
    }

    /// `self + t (dir)`.
    pub fn offset(&self, dir: &Self, t: S) -> Self {
        Point(
            self.0
                .iter()
                .zip(&dir.0)
                .map(|(&a, &d)| a + t * d)
                .collect(),
        )
    }

    fn lex_cmp(&self, other: &Self) -> std::cmp::Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.partial_cmp(b) {
                Some(std::cmp::Ordering::Equal) | None => continue,
                Some(o) => return o,
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

/// Drops exact duplicates, keeping the first occurrence and the original
/// order of what remains.
pub fn dedup_points<S: Scalar>(points: Vec<Point<S>>) -> Vec<Point<S>> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a].lex_cmp(&points[b]).then(a.cmp(&b)));
    let mut keep = vec![true; points.len()];
    for w in order.windows(2) {
        if points[w[0]] == points[w[1]] {
            keep[w[1]] = false;
        }
    }
    points
        .into_iter()
        .zip(keep)
        .filter_map(|(p, k)| k.then_some(p))
        .collect()
}

/// An ℓp norm on `R^d`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Norm {
    Lp(f64),
    LInfinity,
}

impl Norm {
    pub const L1: Norm = Norm::Lp(1.0);
    pub const L2: Norm = Norm::Lp(2.0);

    pub fn lp(p: f64) -> Result<Self, GeometryError> {
        if p.is_infinite() && p > 0.0 {
            return Ok(Norm::LInfinity);
        }
        if p.is_nan() || p < 1.0 {
            return Err(GeometryError::InvalidExponent(p));
        }
        Ok(Norm::Lp(p))
    }

    /// The exponent, `f64::INFINITY` for ℓ∞.
    pub fn exponent(&self) -> f64 {
        match self {
            Norm::Lp(p) => *p,
            Norm::LInfinity => f64::INFINITY,
        }
    }

    /// Magnitude of a coordinate vector.
    pub fn magnitude<S: Scalar>(&self, v: &[S]) -> S {
        match self {
            Norm::LInfinity => v.iter().fold(S::zero(), |acc, x| acc.max_of(x.abs())),
            Norm::Lp(p) => {
                let abs: Vec<S> = v.iter().map(|x| x.abs()).collect();
                S::lp_magnitude(&abs, *p)
            }
        }
    }

    /// Distance between two equal-length coordinate slices.
    pub fn dist<S: Scalar>(&self, a: &[S], b: &[S]) -> S {
        debug_assert_eq!(a.len(), b.len());
        match self {
            Norm::LInfinity => a
                .iter()
                .zip(b)
                .fold(S::zero(), |acc, (&x, &y)| acc.max_of((x - y).abs())),
            Norm::Lp(p) => {
                let abs: Vec<S> = a.iter().zip(b).map(|(&x, &y)| (x - y).abs()).collect();
                S::lp_magnitude(&abs, *p)
            }
        }
    }

    pub fn distance<S: Scalar>(&self, x: &Point<S>, y: &Point<S>) -> Result<S, GeometryError> {
        norm_distance(*self, x, y)
    }

    /// `d^(1/p)`: the norm of the all-ones vector, which scales grid spacing.
    pub(crate) fn ones_norm(&self, dim: usize) -> f64 {
        match self {
            Norm::LInfinity => 1.0,
            Norm::Lp(p) => (dim as f64).powf(1.0 / p),
        }
    }
}

/// ℓp distance between two points of the same dimension.
pub fn norm_distance<S: Scalar>(
    norm: Norm,
    x: &Point<S>,
    y: &Point<S>,
) -> Result<S, GeometryError> {
    if x.dim() != y.dim() {
        return Err(GeometryError::DimensionMismatch(x.dim(), y.dim()));
    }
    Ok(norm.dist(x.coords(), y.coords()))
}

/// `x + t (y - x)` for `t` in `[0, 1]`.
pub fn segment_point<S: Scalar>(
    x: &Point<S>,
    y: &Point<S>,
    t: S,
) -> Result<Point<S>, GeometryError> {
    if x.dim() != y.dim() {
        return Err(GeometryError::DimensionMismatch(x.dim(), y.dim()));
    }
    if t < S::zero() || t > S::one() {
        return Err(GeometryError::ParameterOutOfRange(t.to_f64_lossy()));
    }
    Ok(x.offset(&y.sub(x), t))
}

/// A convex region of `R^d`. Balls are measured in whatever norm the caller
/// passes alongside.
#[derive(Clone, Debug, PartialEq)]
pub enum Domain<S> {
    Box { low: Point<S>, high: Point<S> },
    Ball { center: Point<S>, radius: S },
}

impl<S: Scalar> Domain<S> {
    pub fn new_box(low: Point<S>, high: Point<S>) -> Result<Self, GeometryError> {
        if low.dim() != high.dim() {
            return Err(GeometryError::DimensionMismatch(low.dim(), high.dim()));
        }
        if low.dim() == 0 {
            return Err(GeometryError::InvalidDomain(
                "dimension must be at least 1".into(),
            ));
        }
        if low.coords().iter().zip(high.coords()).any(|(l, h)| l > h) {
            return Err(GeometryError::InvalidDomain("box low exceeds high".into()));
        }
        Ok(Domain::Box { low, high })
    }

    pub fn new_ball(center: Point<S>, radius: S) -> Result<Self, GeometryError> {
        if center.dim() == 0 {
            return Err(GeometryError::InvalidDomain(
                "dimension must be at least 1".into(),
            ));
        }
        if radius <= S::zero() {
            return Err(GeometryError::InvalidDomain(
                "ball radius must be positive".into(),
            ));
        }
        Ok(Domain::Ball { center, radius })
    }

    /// `[0, 1]^dim`.
    pub fn unit_box(dim: usize) -> Self {
        Domain::Box {
            low: Point::zeros(dim),
            high: Point::new(vec![S::one(); dim]),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Box { low, .. } => low.dim(),
            Domain::Ball { center, .. } => center.dim(),
        }
    }

    pub fn contains(&self, x: &Point<S>, norm: Norm) -> bool {
        self.contains_within(x, norm, S::zero())
    }

    /// Membership with an absolute slack, for points produced by rounding
    /// arithmetic.
    pub fn contains_tol(&self, x: &Point<S>, norm: Norm) -> bool {
        self.contains_within(x, norm, S::tolerance())
    }

    fn contains_within(&self, x: &Point<S>, norm: Norm, slack: S) -> bool {
        if x.dim() != self.dim() {
            return false;
        }
        match self {
            Domain::Box { low, high } => x
                .coords()
                .iter()
                .zip(low.coords().iter().zip(high.coords()))
                .all(|(&c, (&l, &h))| c >= l - slack && c <= h + slack),
            Domain::Ball { center, radius } => {
                norm.dist(x.coords(), center.coords()) <= *radius + slack
            }
        }
    }

    /// Axis-aligned bounding box `(low, high)`.
    pub fn bounding_box(&self) -> (Point<S>, Point<S>) {
        match self {
            Domain::Box { low, high } => (low.clone(), high.clone()),
            Domain::Ball { center, radius } => (
                Point::new(center.coords().iter().map(|&c| c - *radius).collect()),
                Point::new(center.coords().iter().map(|&c| c + *radius).collect()),
            ),
        }
    }

    pub fn diameter(&self, norm: Norm) -> S {
        match self {
            Domain::Box { low, high } => norm.dist(low.coords(), high.coords()),
            Domain::Ball { radius, .. } => *radius + *radius,
        }
    }

    /// Lebesgue volume, given the unit-ball volume of `norm` for balls.
    pub fn volume(&self, unit_ball_volume: f64) -> f64 {
        match self {
            Domain::Box { low, high } => low
                .coords()
                .iter()
                .zip(high.coords())
                .map(|(l, h)| (*h - *l).to_f64_lossy())
                .product(),
            Domain::Ball { radius, .. } => {
                radius.to_f64_lossy().powi(self.dim() as i32) * unit_ball_volume
            }
        }
    }

    /// The same region moved by `-origin`, so that `origin` becomes `0`.
    pub fn recentered(&self, origin: &Point<S>) -> Self {
        match self {
            Domain::Box { low, high } => Domain::Box {
                low: low.sub(origin),
                high: high.sub(origin),
            },
            Domain::Ball { center, radius } => Domain::Ball {
                center: center.sub(origin),
                radius: *radius,
            },
        }
    }

    /// A ball that is also an axis box under this norm (any 1-D ball, or any
    /// ℓ∞ ball) is rewritten as that box.
    pub(crate) fn as_box(&self, norm: Norm) -> Option<(Point<S>, Point<S>)> {
        match self {
            Domain::Box { low, high } => Some((low.clone(), high.clone())),
            Domain::Ball { .. } if self.dim() == 1 || norm == Norm::LInfinity => {
                Some(self.bounding_box())
            }
            Domain::Ball { .. } => None,
        }
    }

    /// Exit parameter of the ray `origin + t dir` (`t >= 0`) from the domain;
    /// `origin` must lie inside. Only available for float scalars.
    pub fn ray_exit(&self, origin: &Point<S>, dir: &Point<S>, norm: Norm) -> S
    where
        S: crate::scalar::Real,
    {
        match self {
            Domain::Box { low, high } => {
                let mut t_max = S::infinity();
                for ((&o, &d), (&l, &h)) in origin
                    .coords()
                    .iter()
                    .zip(dir.coords())
                    .zip(low.coords().iter().zip(high.coords()))
                {
                    if d > S::zero() {
                        t_max = t_max.min((h - o) / d);
                    } else if d < S::zero() {
                        t_max = t_max.min((l - o) / d);
                    }
                }
                t_max.max(S::zero())
            }
            Domain::Ball { center, radius } => {
                // ‖origin - center + t dir‖ is convex in t and starts <= radius.
                let rel = origin.sub(center);
                match ray_sphere_root(&rel, &rel.add(dir), *radius, norm) {
                    Ok(r) => r.lambda,
                    Err(_) => S::zero(),
                }
            }
        }
    }

    /// Deterministic dense sample: a regular lattice including the faces of
    /// the bounding box with about `samples` points in total. For balls the
    /// lattice is filtered to the ball and outside lattice points are pulled
    /// radially onto the sphere so the boundary is sampled too.
    pub fn sample_grid(&self, norm: Norm, samples: usize) -> Vec<Point<S>> {
        let dim = self.dim();
        let per_axis = per_axis_count(samples, dim);
        let (low, high) = self.bounding_box();
        let lattice = lattice_points(&low, &high, per_axis, |l, h, i, n| {
            if n == 1 {
                l
            } else {
                l + (h - l) * S::from_count(i) / S::from_count(n - 1)
            }
        });
        match self {
            Domain::Box { .. } => lattice,
            Domain::Ball { center, radius } => {
                let mut out = Vec::with_capacity(lattice.len());
                for p in lattice {
                    let r = norm.dist(p.coords(), center.coords());
                    if r <= *radius {
                        out.push(p);
                    } else {
                        let dir = p.sub(center);
                        out.push(center.offset(&dir, *radius / r));
                    }
                }
                out.push(center.clone());
                dedup_points(out)
            }
        }
    }
}

/// Points per axis for a lattice of roughly `samples` points in `dim`
/// dimensions, never fewer than two.
pub(crate) fn per_axis_count(samples: usize, dim: usize) -> usize {
    let raw = (samples.max(1) as f64).powf(1.0 / dim as f64);
    // Guard against 10000^(1/2) = 99.99999...
    ((raw - 1e-9).ceil() as usize).max(2) + usize::from(dim == 1)
}

/// Cartesian lattice; `coord(l, h, i, n)` yields the `i`-th of `n` values on
/// an axis spanning `[l, h]`. Degenerate axes get a single value.
pub(crate) fn lattice_points<S: Scalar>(
    low: &Point<S>,
    high: &Point<S>,
    per_axis: usize,
    coord: impl Fn(S, S, usize, usize) -> S,
) -> Vec<Point<S>> {
    let counts: Vec<usize> = low
        .coords()
        .iter()
        .zip(high.coords())
        .map(|(l, h)| if h > l { per_axis } else { 1 })
        .collect();
    lattice_with_counts(low, high, &counts, coord)
}

pub(crate) fn lattice_with_counts<S: Scalar>(
    low: &Point<S>,
    high: &Point<S>,
    counts: &[usize],
    coord: impl Fn(S, S, usize, usize) -> S,
) -> Vec<Point<S>> {
    let axes: Vec<Vec<S>> = low
        .coords()
        .iter()
        .zip(high.coords())
        .zip(counts)
        .map(|((&l, &h), &n)| (0..n).map(|i| coord(l, h, i, n)).collect())
        .collect();
    let total: usize = axes.iter().map(Vec::len).product();
    let mut out = Vec::with_capacity(total);
    let mut idx = vec![0usize; axes.len()];
    for _ in 0..total {
        out.push(Point::new(
            idx.iter().zip(&axes).map(|(&i, ax)| ax[i]).collect(),
        ));
        // Odometer; the last axis varies fastest.
        for a in (0..axes.len()).rev() {
            idx[a] += 1;
            if idx[a] < axes[a].len() {
                break;
            }
            idx[a] = 0;
        }
    }
    out
}
