use super::{GeometryError, Norm, Point};
use crate::scalar::Real;

/// Intersection of a ray with a sphere centered at the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct RayRoot<S> {
    pub lambda: S,
    pub point: Point<S>,
}

const MAX_DOUBLINGS: usize = 200;

/// Finds `lambda >= 0` with `‖x + lambda (w - x)‖ = radius`, for `x` inside
/// the closed ball. The norm is convex along the ray, so after bracketing by
/// doubling the crossing is unique and bisection converges to it.
pub fn ray_sphere_root<S: Real>(
    x: &Point<S>,
    w: &Point<S>,
    radius: S,
    norm: Norm,
) -> Result<RayRoot<S>, GeometryError> {
    if x.dim() != w.dim() {
        return Err(GeometryError::DimensionMismatch(x.dim(), w.dim()));
    }
    let dir = w.sub(x);
    let f = |t: S| norm.magnitude(x.offset(&dir, t).coords()) - radius;
    if f(S::zero()) > S::tolerance() {
        return Err(GeometryError::NoBracket);
    }
    let two = S::one() + S::one();
    let mut lo = S::zero();
    let mut hi = S::one();
    let mut found = false;
    for _ in 0..MAX_DOUBLINGS {
        if f(hi) >= S::zero() {
            found = true;
            break;
        }
        lo = hi;
        hi = hi * two;
    }
    if !found {
        return Err(GeometryError::NoBracket);
    }
    let rel = S::from_f64_lossy(1e-12);
    while hi - lo > rel * hi.max(S::one()) {
        let mid = (lo + hi) / two;
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) >= S::zero() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(RayRoot {
        lambda: hi,
        point: x.offset(&dir, hi),
    })
}
