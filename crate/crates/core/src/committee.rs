//! Universal committees: experts placed along a spanning tree of a grid cover.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::geometry::{dedup_points, grid_cover, Cover, Domain, Norm, Point};
use crate::instance::{experts_from, Expert};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CommitteeError {
    #[error("invalid committee parameters: {0}")]
    InvalidParameters(String),
    #[error(
        "neighbor graph is disconnected ({components} components); the cover or domain is invalid"
    )]
    Disconnected { components: usize },
}

/// Which construction produced a committee, with the parameters it used.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommitteeKind {
    Universal { m: usize, k: usize },
    Multiwinner { m: usize, k: usize, ell: usize },
    Screening,
}

/// Committee plus how it was built.
#[derive(Clone, Debug, PartialEq)]
pub struct CommitteeBlueprint<S> {
    pub cover: Cover<S>,
    pub tree_edges: Vec<(usize, usize)>,
    pub subdivisions_per_edge: usize,
    pub experts: Vec<Expert<S>>,
    pub epsilon: S,
    pub kind: CommitteeKind,
}

impl<S: Scalar> CommitteeBlueprint<S> {
    pub fn len(&self) -> usize {
        self.experts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.experts.is_empty()
    }

    pub fn locations(&self) -> Vec<Point<S>> {
        self.experts.iter().map(|e| e.location.clone()).collect()
    }

    /// `(n_e + 1)(|X| - 1)` counted per edge before deduplication; a single
    /// cover point gives one expert.
    pub fn size_bound(&self) -> usize {
        match self.cover.len() {
            0 | 1 => self.cover.len(),
            n => (self.subdivisions_per_edge + 1) * (n - 1),
        }
    }
}

/// Undirected graph on cover indices; edges stored once with `i < j`.
#[derive(Clone, Debug, PartialEq)]
pub struct NeighborGraph<S> {
    pub nodes: usize,
    pub edges: Vec<(usize, usize, S)>,
}

/// Joins cover points at distance in `(0, 2 * radius]`.
pub fn build_neighbor_graph<S: Scalar>(cover: &Cover<S>, norm: Norm) -> NeighborGraph<S> {
    let limit = cover.radius + cover.radius + S::tolerance();
    let pts = &cover.points;
    let mut edges = Vec::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let d = norm.dist(pts[i].coords(), pts[j].coords());
            if d > S::zero() && d <= limit {
                edges.push((i, j, d));
            }
        }
    }
    NeighborGraph {
        nodes: pts.len(),
        edges,
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Kruskal minimum spanning tree; equal lengths are taken in lexicographic
/// `(i, j)` order.
pub fn build_spanning_tree<S: Scalar>(
    graph: &NeighborGraph<S>,
) -> Result<Vec<(usize, usize)>, CommitteeError> {
    let mut order: Vec<&(usize, usize, S)> = graph.edges.iter().collect();
    order.sort_by(|a, b| {
        a.2.partial_cmp(&b.2)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then((a.0, a.1).cmp(&(b.0, b.1)))
    });
    let mut parent: Vec<usize> = (0..graph.nodes).collect();
    let mut tree = Vec::with_capacity(graph.nodes.saturating_sub(1));
    for &&(i, j, _) in &order {
        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
        if ri != rj {
            parent[ri] = rj;
            tree.push((i, j));
        }
    }
    let components = graph.nodes - tree.len();
    if graph.nodes > 0 && components != 1 {
        return Err(CommitteeError::Disconnected { components });
    }
    Ok(tree)
}

fn subdivide<S: Scalar>(cover: &Cover<S>, tree: &[(usize, usize)], n_e: usize) -> Vec<Expert<S>> {
    let mut locs = cover.points.clone();
    let n = S::from_count(n_e);
    for &(a, b) in tree {
        let (x, y) = (&cover.points[a], &cover.points[b]);
        let dir = y.sub(x);
        for t in 1..n_e {
            locs.push(x.offset(&dir, S::from_count(t) / n));
        }
    }
    experts_from(dedup_points(locs))
}

fn tree_committee<S: Scalar>(
    domain: &Domain<S>,
    norm: Norm,
    radius: S,
    n_e: usize,
    epsilon: S,
    kind: CommitteeKind,
) -> Result<CommitteeBlueprint<S>, CommitteeError> {
    let cover = grid_cover(domain, norm, radius);
    let tree = build_spanning_tree(&build_neighbor_graph(&cover, norm))?;
    let experts = subdivide(&cover, &tree, n_e);
    Ok(CommitteeBlueprint {
        cover,
        tree_edges: tree,
        subdivisions_per_edge: n_e,
        experts,
        epsilon,
        kind,
    })
}

fn check_epsilon<S: Scalar>(epsilon: S) -> Result<(), CommitteeError> {
    if epsilon > S::zero() {
        Ok(())
    } else {
        Err(CommitteeError::InvalidParameters(format!(
            "epsilon must be positive, got {epsilon}"
        )))
    }
}

/// Subdivisions per tree edge for the single-winner committee,
/// `ceil(8(m - 1) / k)`.
pub fn universal_subdivisions(m: usize, k: usize) -> usize {
    (8 * (m - 1)).div_ceil(k)
}

/// `H_k - H_{k-ell}`, exactly.
pub fn harmonic_gap(k: usize, ell: usize) -> BigRational {
    (k - ell + 1..=k).fold(BigRational::zero(), |acc, t| {
        acc + BigRational::new(BigInt::one(), BigInt::from(t))
    })
}

/// Subdivisions per tree edge for the multi-winner committee,
/// `ceil(8 m (H_k - H_{k-ell}) / ell)`, computed in exact arithmetic.
pub fn multiwinner_subdivisions(m: usize, k: usize, ell: usize) -> usize {
    let v = harmonic_gap(k, ell) * BigRational::from_integer(BigInt::from(8 * m))
        / BigRational::from_integer(BigInt::from(ell));
    v.ceil()
        .to_integer()
        .to_usize()
        .expect("subdivision count fits usize")
}

/// Single-winner universal committee with regret at most `epsilon` for any
/// `m` candidates and top-`k` rankings.
pub fn construct_universal<S: Scalar>(
    domain: &Domain<S>,
    norm: Norm,
    epsilon: S,
    m: usize,
    k: usize,
) -> Result<CommitteeBlueprint<S>, CommitteeError> {
    check_epsilon(epsilon)?;
    if m < 2 || k < 1 || k > m {
        return Err(CommitteeError::InvalidParameters(format!(
            "need m >= 2 and 1 <= k <= m, got m={m}, k={k}"
        )));
    }
    let radius = epsilon * S::half();
    tree_committee(
        domain,
        norm,
        radius,
        universal_subdivisions(m, k),
        epsilon,
        CommitteeKind::Universal { m, k },
    )
}

/// Committee for choosing `ell` winners with cumulative regret at most
/// `epsilon`.
pub fn construct_multiwinner<S: Scalar>(
    domain: &Domain<S>,
    norm: Norm,
    epsilon: S,
    m: usize,
    k: usize,
    ell: usize,
) -> Result<CommitteeBlueprint<S>, CommitteeError> {
    check_epsilon(epsilon)?;
    if ell < 1 || ell > k || k > m {
        return Err(CommitteeError::InvalidParameters(format!(
            "need 1 <= ell <= k <= m, got m={m}, k={k}, ell={ell}"
        )));
    }
    let radius = epsilon * S::half() / S::from_count(ell);
    tree_committee(
        domain,
        norm,
        radius,
        multiwinner_subdivisions(m, k, ell),
        epsilon,
        CommitteeKind::Multiwinner { m, k, ell },
    )
}

/// First-round committee of the two-round protocol: one expert per point
/// of an `epsilon / 2` grid cover.
pub fn construct_screening<S: Scalar>(
    domain: &Domain<S>,
    norm: Norm,
    epsilon: S,
) -> Result<CommitteeBlueprint<S>, CommitteeError> {
    check_epsilon(epsilon)?;
    let cover = grid_cover(domain, norm, epsilon * S::half());
    let experts = experts_from(cover.points.clone());
    Ok(CommitteeBlueprint {
        cover,
        tree_edges: Vec::new(),
        subdivisions_per_edge: 0,
        experts,
        epsilon,
        kind: CommitteeKind::Screening,
    })
}

/// Screening committee for `epsilon` and the matching selection committee:
/// a single-winner universal committee for `epsilon / 2`, sized for as many
/// candidates as there are screening experts (at least two), with top-1
/// ballots.
pub fn construct_two_round<S: Scalar>(
    domain: &Domain<S>,
    norm: Norm,
    epsilon: S,
) -> Result<(CommitteeBlueprint<S>, CommitteeBlueprint<S>), CommitteeError> {
    let screening = construct_screening(domain, norm, epsilon)?;
    let selection =
        construct_universal(domain, norm, epsilon * S::half(), screening.len().max(2), 1)?;
    Ok((screening, selection))
}
