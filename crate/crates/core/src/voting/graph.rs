use super::VotingError;
use crate::geometry::Norm;
use crate::instance::{Candidate, Expert, RankingProfile};
use crate::scalar::{ExtReal, Scalar};

/// Weighted digraph on candidates. The edge `a -> b` carries the smallest
/// `d(e_i, c_b) - d(e_i, c_a)` over experts `i` that rank `a` and place `b`
/// below it or leave `b` unranked; absent edges are `+inf`.
#[derive(Clone, Debug, PartialEq)]
pub struct PrefGraph<S> {
    m: usize,
    weight: Vec<ExtReal<S>>,
    witness: Vec<Option<usize>>,
}

impl<S: Scalar> PrefGraph<S> {
    /// Graph with no edges.
    pub fn empty(m: usize) -> Self {
        let mut weight = vec![ExtReal::PosInfinity; m * m];
        for j in 0..m {
            weight[j * m + j] = ExtReal::zero();
        }
        PrefGraph {
            m,
            weight,
            witness: vec![None; m * m],
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn weight(&self, a: usize, b: usize) -> ExtReal<S> {
        self.weight[a * self.m + b]
    }

    /// Index of the expert attaining the edge weight, if the edge exists.
    pub fn witness(&self, a: usize, b: usize) -> Option<usize> {
        self.witness[a * self.m + b]
    }

    /// Lowers `a -> b` to `w` if that is an improvement.
    pub fn relax_edge(&mut self, a: usize, b: usize, w: S, expert: usize) {
        if a == b {
            return;
        }
        let idx = a * self.m + b;
        if ExtReal::Finite(w) < self.weight[idx] {
            self.weight[idx] = ExtReal::Finite(w);
            self.witness[idx] = Some(expert);
        }
    }

    /// Finite off-diagonal edges `(a, b, w)` in row-major order.
    pub fn edges(&self) -> Vec<(usize, usize, S)> {
        let mut out = Vec::new();
        for a in 0..self.m {
            for b in 0..self.m {
                if a != b {
                    if let ExtReal::Finite(w) = self.weight(a, b) {
                        out.push((a, b, w));
                    }
                }
            }
        }
        out
    }

    /// Subgraph induced by `keep`, reindexed in the order given.
    pub fn induced(&self, keep: &[usize]) -> PrefGraph<S> {
        let n = keep.len();
        let mut g = PrefGraph::empty(n);
        for (x, &a) in keep.iter().enumerate() {
            for (y, &b) in keep.iter().enumerate() {
                if x != y {
                    g.weight[x * n + y] = self.weight(a, b);
                    g.witness[x * n + y] = self.witness(a, b);
                }
            }
        }
        g
    }
}

/// Builds the preference graph from the experts' reported rankings.
pub fn build_pref_graph<S: Scalar>(
    candidates: &[Candidate<S>],
    experts: &[Expert<S>],
    profile: &RankingProfile,
    norm: Norm,
) -> PrefGraph<S> {
    let m = candidates.len();
    let mut g = PrefGraph::empty(m);
    for (i, (ranking, expert)) in profile.rankings.iter().zip(experts).enumerate() {
        let dist: Vec<S> = candidates
            .iter()
            .map(|c| norm.dist(expert.location.coords(), c.location.coords()))
            .collect();
        let mut above = vec![false; m];
        for &a in &ranking.ranked {
            above[a] = true;
            for b in 0..m {
                if !above[b] {
                    g.relax_edge(a, b, dist[b] - dist[a], i);
                }
            }
        }
    }
    g
}

/// All-pairs shortest-path distances with successor pointers for path
/// recovery.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix<S> {
    m: usize,
    dist: Vec<ExtReal<S>>,
    next: Vec<Option<usize>>,
}

impl<S: Scalar> DistanceMatrix<S> {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, a: usize, b: usize) -> ExtReal<S> {
        self.dist[a * self.m + b]
    }

    /// Shortest `a -> b` path as a vertex list, `None` when unreachable.
    pub fn path(&self, a: usize, b: usize) -> Option<Vec<usize>> {
        if a == b {
            return Some(vec![a]);
        }
        let mut path = vec![a];
        let mut cur = a;
        while cur != b {
            cur = self.next[cur * self.m + b]?;
            path.push(cur);
            if path.len() > self.m {
                return None;
            }
        }
        Some(path)
    }

    /// `max_{j != a} d(a, j)`, zero for a single vertex.
    pub fn eccentricity(&self, a: usize) -> ExtReal<S> {
        (0..self.m)
            .filter(|&j| j != a)
            .map(|j| self.get(a, j))
            .fold(ExtReal::zero(), ExtReal::max_of)
    }

    /// Vertex of least eccentricity, lowest index among ties.
    pub fn center(&self) -> Option<usize> {
        let mut best: Option<(usize, ExtReal<S>)> = None;
        for a in 0..self.m {
            let e = self.eccentricity(a);
            if best.is_none_or(|(_, b)| e < b) {
                best = Some((a, e));
            }
        }
        best.map(|(a, _)| a)
    }
}

fn negative_cycle_limit<S: Scalar>() -> S {
    S::from_f64_lossy(-1e-9)
}

/// Floyd-Warshall over `+inf`-extended scalars.
pub fn apsp<S: Scalar>(g: &PrefGraph<S>) -> Result<DistanceMatrix<S>, VotingError> {
    let m = g.m;
    let mut dist = g.weight.clone();
    let mut next: Vec<Option<usize>> = (0..m * m)
        .map(|idx| dist[idx].is_finite().then_some(idx % m))
        .collect();
    for k in 0..m {
        for i in 0..m {
            let ExtReal::Finite(dik) = dist[i * m + k] else {
                continue;
            };
            for j in 0..m {
                let ExtReal::Finite(dkj) = dist[k * m + j] else {
                    continue;
                };
                let cand = ExtReal::Finite(dik + dkj);
                if cand < dist[i * m + j] {
                    dist[i * m + j] = cand;
                    next[i * m + j] = next[i * m + k];
                }
            }
        }
    }
    let limit = negative_cycle_limit::<S>();
    for j in 0..m {
        if let ExtReal::Finite(v) = dist[j * m + j] {
            if v < limit {
                return Err(VotingError::NegativeCycle {
                    vertex: j,
                    value: v.to_f64_lossy(),
                });
            }
        }
    }
    Ok(DistanceMatrix { m, dist, next })
}

/// Shortest distances from a single source, with predecessor links.
#[derive(Clone, Debug, PartialEq)]
pub struct SingleSourcePaths<S> {
    pub source: usize,
    pub dist: Vec<ExtReal<S>>,
    pub pred: Vec<Option<usize>>,
}

impl<S: Scalar> SingleSourcePaths<S> {
    pub fn path_to(&self, target: usize) -> Option<Vec<usize>> {
        if !self.dist[target].is_finite() {
            return None;
        }
        let mut path = vec![target];
        let mut cur = target;
        while cur != self.source {
            cur = self.pred[cur]?;
            path.push(cur);
            if path.len() > self.dist.len() {
                return None;
            }
        }
        path.reverse();
        Some(path)
    }
}

/// Bellman-Ford from `source`; negative edges are allowed.
pub fn single_source<S: Scalar>(
    g: &PrefGraph<S>,
    source: usize,
) -> Result<SingleSourcePaths<S>, VotingError> {
    let m = g.m;
    let edges = g.edges();
    let mut dist: Vec<ExtReal<S>> = vec![ExtReal::PosInfinity; m];
    let mut pred = vec![None; m];
    dist[source] = ExtReal::zero();
    for _ in 1..m.max(1) {
        let mut changed = false;
        for &(a, b, w) in &edges {
            if let ExtReal::Finite(da) = dist[a] {
                let cand = ExtReal::Finite(da + w);
                if cand < dist[b] {
                    dist[b] = cand;
                    pred[b] = Some(a);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let slack = -negative_cycle_limit::<S>();
    for &(a, b, w) in &edges {
        if let (ExtReal::Finite(da), ExtReal::Finite(db)) = (dist[a], dist[b]) {
            if da + w < db - slack {
                return Err(VotingError::NegativeCycle {
                    vertex: b,
                    value: (da + w - db).to_f64_lossy(),
                });
            }
        }
    }
    if let ExtReal::Finite(v) = dist[source] {
        if v < negative_cycle_limit() {
            return Err(VotingError::NegativeCycle {
                vertex: source,
                value: v.to_f64_lossy(),
            });
        }
    }
    Ok(SingleSourcePaths { source, dist, pred })
}
