use super::{dedup_points, lattice_with_counts, Domain, Norm, Point, DEFAULT_SAMPLES};
use crate::scalar::Scalar;

/// Internal cover: every point of the domain lies within `radius` of some
/// element of `points`, and every element lies in the domain.
#[derive(Clone, Debug, PartialEq)]
pub struct Cover<S> {
    pub radius: S,
    pub points: Vec<Point<S>>,
}

impl<S> Cover<S> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Points pairwise at least `separation` apart.
#[derive(Clone, Debug, PartialEq)]
pub struct Packing<S> {
    pub separation: S,
    pub points: Vec<Point<S>>,
}

impl<S> Packing<S> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn cells_for(length: f64, spacing: f64) -> usize {
    if length <= 0.0 {
        1
    } else {
        ((length / spacing - 1e-9).ceil() as usize).max(1)
    }
}

fn cell_center<S: Scalar>(l: S, h: S, i: usize, n: usize) -> S {
    l + (h - l) * S::from_count(2 * i + 1) / S::from_count(2 * n)
}

/// Regular-grid `r`-cover.
///
/// Boxes are split into equal cells no wider than `2r / d^(1/p)` per axis so
/// every cell's circumradius is at most `r`; the cover is the set of cell
/// centers. Balls use cells of half that width: centers inside the ball are
/// kept, centers of cells that touch the ball from outside are replaced by
/// their radial projection onto the sphere (the nearest ball point in the
/// ball's own norm), and the ball center is always included.
pub fn grid_cover<S: Scalar>(domain: &Domain<S>, norm: Norm, r: S) -> Cover<S> {
    assert!(r > S::zero(), "cover radius must be positive");
    let dim = domain.dim();
    let rf = r.to_f64_lossy();
    if let Some((low, high)) = domain.as_box(norm) {
        let spacing = 2.0 * rf / norm.ones_norm(dim);
        let counts: Vec<usize> = low
            .coords()
            .iter()
            .zip(high.coords())
            .map(|(&l, &h)| cells_for((h - l).to_f64_lossy(), spacing))
            .collect();
        let points = lattice_with_counts(&low, &high, &counts, cell_center);
        return Cover { radius: r, points };
    }
    let Domain::Ball { center, radius } = domain else {
        unreachable!("boxes handled above")
    };
    let (low, high) = domain.bounding_box();
    let spacing = rf / norm.ones_norm(dim);
    let counts: Vec<usize> = low
        .coords()
        .iter()
        .zip(high.coords())
        .map(|(&l, &h)| cells_for((h - l).to_f64_lossy(), spacing))
        .collect();
    let half_r = r * S::half();
    let mut points = Vec::new();
    for c in lattice_with_counts(&low, &high, &counts, cell_center) {
        let dist = norm.dist(c.coords(), center.coords());
        if dist <= *radius {
            points.push(c);
        } else if dist - *radius <= half_r + S::tolerance() {
            let dir = c.sub(center);
            points.push(center.offset(&dir, *radius / dist));
        }
    }
    points.push(center.clone());
    Cover {
        radius: r,
        points: dedup_points(points),
    }
}

/// Greedy farthest-point `sep`-packing over the default dense lattice.
pub fn greedy_packing<S: Scalar>(domain: &Domain<S>, norm: Norm, sep: S) -> Packing<S> {
    greedy_packing_with_resolution(domain, norm, sep, DEFAULT_SAMPLES)
}

/// Greedy farthest-point insertion over `domain.sample_grid(norm, samples)`:
/// start at the first lattice point, then repeatedly add the lattice point
/// farthest from the chosen set while that distance is at least `sep`. The
/// result is maximal with respect to the lattice.
pub fn greedy_packing_with_resolution<S: Scalar>(
    domain: &Domain<S>,
    norm: Norm,
    sep: S,
    samples: usize,
) -> Packing<S> {
    assert!(sep > S::zero(), "packing separation must be positive");
    let grid = domain.sample_grid(norm, samples);
    let mut chosen = vec![0usize];
    let mut nearest: Vec<S> = grid
        .iter()
        .map(|p| norm.dist(p.coords(), grid[0].coords()))
        .collect();
    loop {
        let mut best = None;
        for (i, &d) in nearest.iter().enumerate() {
            if best.is_none_or(|(_, bd)| d > bd) {
                best = Some((i, d));
            }
        }
        let Some((i, d)) = best else { break };
        if d < sep {
            break;
        }
        chosen.push(i);
        for (j, p) in grid.iter().enumerate() {
            let dj = norm.dist(p.coords(), grid[i].coords());
            if dj < nearest[j] {
                nearest[j] = dj;
            }
        }
    }
    Packing {
        separation: sep,
        points: chosen.into_iter().map(|i| grid[i].clone()).collect(),
    }
}

/// Dense-sampling check that `points` is an `r`-cover of `domain`, with the
/// scalar's absolute tolerance on the radius.
pub fn cover_verify<S: Scalar>(
    domain: &Domain<S>,
    norm: Norm,
    points: &[Point<S>],
    r: S,
    samples: usize,
) -> bool {
    if points.is_empty() {
        return false;
    }
    let limit = r + S::tolerance();
    domain.sample_grid(norm, samples).iter().all(|s| {
        points
            .iter()
            .any(|c| norm.dist(s.coords(), c.coords()) <= limit)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(c: &[&[f64]]) -> Vec<Point<f64>> {
        c.iter().map(|x| Point::new(x.to_vec())).collect()
    }

    #[test]
    fn unit_interval_cover() {
        let d = Domain::unit_box(1);
        let c = grid_cover(&d, Norm::L2, 0.25);
        assert_eq!(c.points, pts(&[&[0.25], &[0.75]]));
        assert!(cover_verify(&d, Norm::L2, &c.points, 0.25, 10_000));
    }

    #[test]
    fn unit_square_linf_cover() {
        let d = Domain::unit_box(2);
        let c = grid_cover(&d, Norm::LInfinity, 0.25);
        assert_eq!(
            c.points,
            pts(&[&[0.25, 0.25], &[0.25, 0.75], &[0.75, 0.25], &[0.75, 0.75]])
        );
        assert!(cover_verify(&d, Norm::LInfinity, &c.points, 0.25, 10_000));
    }

    #[test]
    fn large_radius_gives_single_point() {
        for norm in [Norm::L1, Norm::L2, Norm::LInfinity] {
            let c = grid_cover(&Domain::unit_box(1), norm, 1.0);
            assert_eq!(c.points, pts(&[&[0.5]]));
        }
    }

    #[test]
    fn degenerate_box_yields_single_point() {
        let d = Domain::new_box(Point::new(vec![0.3, 0.0]), Point::new(vec![0.3, 0.0])).unwrap();
        assert_eq!(grid_cover(&d, Norm::L2, 0.1).points, pts(&[&[0.3, 0.0]]));
    }

    #[test]
    fn verify_rejects_gaps_and_empty_covers() {
        let d = Domain::unit_box(1);
        assert!(!cover_verify(&d, Norm::L2, &pts(&[&[0.25]]), 0.25, 10_000));
        assert!(!cover_verify(&d, Norm::L2, &[], 10.0, 100));
    }

    #[test]
    fn ball_covers_are_valid_and_internal() {
        for norm in [Norm::L1, Norm::L2, Norm::Lp(3.0)] {
            let ball = Domain::new_ball(Point::new(vec![0.0, 0.0]), 1.0).unwrap();
            let c = grid_cover(&ball, norm, 0.25);
            assert!(c.points.iter().all(|p| ball.contains_tol(p, norm)));
            assert!(
                cover_verify(&ball, norm, &c.points, 0.25, 10_000),
                "{norm:?}"
            );
        }
    }

    #[test]
    fn packing_examples() {
        let line = Domain::unit_box(1);
        let pk = greedy_packing(&line, Norm::L1, 1.0);
        assert_eq!(pk.points, pts(&[&[0.0], &[1.0]]));
        assert_eq!(greedy_packing(&line, Norm::L1, 1.5).len(), 1);
        let sq = Domain::unit_box(2);
        assert_eq!(greedy_packing(&sq, Norm::LInfinity, 1.0).len(), 4);
    }

    #[test]
    fn packing_matches_brute_force_maximum_on_small_lattices() {
        // Exhaustive search over subsets of the 1-D lattice {0, 1/4, ..., 1}
        // and the 3x3 lattice of the unit square.
        fn best_subset(grid: &[Point<f64>], norm: Norm, sep: f64) -> usize {
            let n = grid.len();
            (0u32..1 << n)
                .filter(|mask| {
                    (0..n).all(|i| {
                        (i + 1..n).all(|j| {
                            mask & (1 << i) == 0
                                || mask & (1 << j) == 0
                                || norm.dist(grid[i].coords(), grid[j].coords()) >= sep
                        })
                    })
                })
                .map(|m| m.count_ones() as usize)
                .max()
                .unwrap()
        }
        let line = Domain::unit_box(1);
        let grid1 = line.sample_grid(Norm::L1, 4);
        assert_eq!(grid1.len(), 5);
        assert_eq!(best_subset(&grid1, Norm::L1, 1.0), 2);
        assert_eq!(
            greedy_packing_with_resolution(&line, Norm::L1, 1.0, 4).len(),
            2
        );

        let sq = Domain::unit_box(2);
        let grid2 = sq.sample_grid(Norm::LInfinity, 9);
        assert_eq!(grid2.len(), 9);
        assert_eq!(best_subset(&grid2, Norm::LInfinity, 1.0), 4);
        assert_eq!(
            greedy_packing_with_resolution(&sq, Norm::LInfinity, 1.0, 9).len(),
            4
        );
    }
}
