//! Certificates for the worst-case quality gap between two candidates, and
//! regret under known qualities.
//!
//! For a profile, the largest `q_h - q_g` over quality vectors consistent
//! with it equals the shortest-path distance `d(g, h)` in the preference
//! graph. Both sides are certified constructively: a shortest path with its
//! witnessing experts bounds the gap from above, and an explicit consistent
//! quality vector attains it.

use thiserror::Error;

use crate::geometry::Norm;
use crate::instance::{is_consistent, Candidate, Expert, RankingProfile};
use crate::scalar::{ExtReal, Scalar};
use crate::voting::{apsp, build_pref_graph, DistanceMatrix, PrefGraph, VotingError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("candidate {0} is ranked by no expert")]
    SourceUnranked(usize),
    #[error(transparent)]
    Voting(#[from] VotingError),
}

/// A quality vector consistent with the profile, anchored at `source`.
#[derive(Clone, Debug, PartialEq)]
pub struct QualityCertificate<S> {
    pub qhat: Vec<S>,
    pub alpha: S,
    pub source: usize,
    /// Membership in the set of candidates reachable from `source`.
    pub reachable: Vec<bool>,
}

/// A shortest path with, for each edge, the expert whose ranking gives the
/// edge its weight.
#[derive(Clone, Debug, PartialEq)]
pub struct DualPathCertificate<S> {
    pub path: Vec<usize>,
    pub value: S,
    pub witnesses: Vec<usize>,
}

fn ranks(profile: &RankingProfile, g: usize) -> bool {
    profile.rankings.iter().any(|r| r.ranked.contains(&g))
}

/// Sets `qhat_j = d(g, j)` on candidates reachable from `g` and
/// `alpha - d(j, g)` elsewhere, with the least `alpha >= 0` that satisfies
/// every ranking constraint crossing between the two groups.
pub fn primal_certificate<S: Scalar>(
    g: usize,
    dist: &DistanceMatrix<S>,
    profile: &RankingProfile,
) -> Result<QualityCertificate<S>, OracleError> {
    let m = dist.m();
    if !ranks(profile, g) {
        return Err(OracleError::SourceUnranked(g));
    }
    let reachable: Vec<bool> = (0..m).map(|j| dist.get(g, j).is_finite()).collect();
    let finite = |v: ExtReal<S>| v.finite().expect("finite by the ranking of g");
    let mut alpha = S::zero();
    for ranking in &profile.rankings {
        let mut above = vec![false; m];
        for &j in &ranking.ranked {
            above[j] = true;
            if reachable[j] {
                continue;
            }
            for jp in (0..m).filter(|&jp| !above[jp] && reachable[jp]) {
                let need =
                    finite(dist.get(j, g)) + finite(dist.get(g, jp)) - finite(dist.get(j, jp));
                alpha = alpha.max_of(need);
            }
        }
    }
    let qhat = (0..m)
        .map(|j| {
            if j == g {
                S::zero()
            } else if reachable[j] {
                finite(dist.get(g, j))
            } else {
                alpha - finite(dist.get(j, g))
            }
        })
        .collect();
    Ok(QualityCertificate {
        qhat,
        alpha,
        source: g,
        reachable,
    })
}

/// Recovers the shortest `g -> h` path and its witnesses; `None` when `h`
/// is unreachable.
pub fn dual_path_certificate<S: Scalar>(
    graph: &PrefGraph<S>,
    dist: &DistanceMatrix<S>,
    g: usize,
    h: usize,
) -> Option<DualPathCertificate<S>> {
    let path = dist.path(g, h)?;
    let mut value = S::zero();
    let mut witnesses = Vec::with_capacity(path.len().saturating_sub(1));
    for w in path.windows(2) {
        value = value + graph.weight(w[0], w[1]).finite()?;
        witnesses.push(graph.witness(w[0], w[1])?);
    }
    Some(DualPathCertificate {
        path,
        value,
        witnesses,
    })
}

/// Checks that `cert` is a valid path in `graph` whose witnesses really rank
/// each tail above each head.
pub fn check_path_certificate<S: Scalar>(
    cert: &DualPathCertificate<S>,
    graph: &PrefGraph<S>,
    profile: &RankingProfile,
    candidates: &[Candidate<S>],
    experts: &[Expert<S>],
    norm: Norm,
) -> bool {
    let mut total = S::zero();
    for (w, &i) in cert.path.windows(2).zip(&cert.witnesses) {
        let (a, b) = (w[0], w[1]);
        let Some(ranking) = profile.rankings.get(i) else {
            return false;
        };
        let Some(pa) = ranking.position(a) else {
            return false;
        };
        if ranking.position(b).is_some_and(|pb| pb < pa) {
            return false;
        }
        let e = experts[i].location.coords();
        let weight = norm.dist(e, candidates[b].location.coords())
            - norm.dist(e, candidates[a].location.coords());
        if graph.weight(a, b) != ExtReal::Finite(weight) {
            return false;
        }
        total = total + weight;
    }
    cert.witnesses.len() + 1 == cert.path.len() && total == cert.value
}

fn close<S: Scalar>(a: S, b: S) -> bool {
    (a - b).abs() <= S::from_f64_lossy(1e-9)
}

/// Shift amounts tried when the gap is unbounded.
pub const SHIFTS: [f64; 3] = [1.0, 10.0, 100.0];

/// Certifies one ordered pair against a precomputed graph and distances.
#[allow(clippy::too_many_arguments)]
pub fn certify_pair<S: Scalar>(
    graph: &PrefGraph<S>,
    dist: &DistanceMatrix<S>,
    profile: &RankingProfile,
    candidates: &[Candidate<S>],
    experts: &[Expert<S>],
    norm: Norm,
    g: usize,
    h: usize,
) -> bool {
    match dist.get(g, h) {
        ExtReal::Finite(d) if g == h => close(d, S::zero()),
        ExtReal::Finite(d) => {
            let Some(path) = dual_path_certificate(graph, dist, g, h) else {
                return false;
            };
            if !check_path_certificate(&path, graph, profile, candidates, experts, norm)
                || !close(path.value, d)
            {
                return false;
            }
            let Ok(primal) = primal_certificate(g, dist, profile) else {
                return false;
            };
            is_consistent(&primal.qhat, profile, candidates, experts, norm)
                && close(primal.qhat[h] - primal.qhat[g], d)
        }
        ExtReal::PosInfinity => {
            let base = match profile.rankings.first().and_then(|r| r.favorite()) {
                Some(v) => match primal_certificate(v, dist, profile) {
                    Ok(c) => c.qhat,
                    Err(_) => return false,
                },
                None => vec![S::zero(); candidates.len()],
            };
            let reach: Vec<bool> = (0..candidates.len())
                .map(|j| dist.get(g, j).is_finite())
                .collect();
            if reach[h] || !is_consistent(&base, profile, candidates, experts, norm) {
                return false;
            }
            SHIFTS.iter().all(|&a| {
                let a = S::from_f64_lossy(a);
                let shifted: Vec<S> = base
                    .iter()
                    .zip(&reach)
                    .map(|(&q, &r)| if r { q - a } else { q })
                    .collect();
                let gain = (shifted[h] - shifted[g]) - (base[h] - base[g]);
                is_consistent(&shifted, profile, candidates, experts, norm) && close(gain, a)
            })
        }
    }
}

/// Certifies the gap bound for one ordered pair.
pub fn certify_lp_duality<S: Scalar>(
    candidates: &[Candidate<S>],
    experts: &[Expert<S>],
    profile: &RankingProfile,
    g: usize,
    h: usize,
    norm: Norm,
) -> Result<bool, VotingError> {
    let graph = build_pref_graph(candidates, experts, profile, norm);
    let dist = apsp(&graph)?;
    Ok(certify_pair(
        &graph, &dist, profile, candidates, experts, norm, g, h,
    ))
}

/// Outcome of certifying every ordered pair of one profile.
#[derive(Clone, Debug, PartialEq)]
pub struct CertificationReport {
    pub pairs: usize,
    pub failures: Vec<(usize, usize)>,
}

impl CertificationReport {
    pub fn all_certified(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn certify_all_pairs<S: Scalar>(
    candidates: &[Candidate<S>],
    experts: &[Expert<S>],
    profile: &RankingProfile,
    norm: Norm,
) -> Result<CertificationReport, VotingError> {
    let graph = build_pref_graph(candidates, experts, profile, norm);
    let dist = apsp(&graph)?;
    let m = candidates.len();
    let mut failures = Vec::new();
    for g in 0..m {
        for h in 0..m {
            if !certify_pair(&graph, &dist, profile, candidates, experts, norm, g, h) {
                failures.push((g, h));
            }
        }
    }
    Ok(CertificationReport {
        pairs: m * m,
        failures,
    })
}

/// `max_j q_j - q_chosen`.
pub fn true_regret<S: Scalar>(q: &[S], chosen: usize) -> S {
    let best = q
        .iter()
        .copied()
        .reduce(S::max_of)
        .expect("non-empty quality vector");
    best - q[chosen]
}

/// Best possible sum over `|chosen|` candidates minus the chosen sum.
pub fn cumulative_regret<S: Scalar>(q: &[S], chosen: &[usize]) -> S {
    let mut sorted = q.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let best = sorted
        .iter()
        .take(chosen.len())
        .fold(S::zero(), |acc, &x| acc + x);
    let got = chosen.iter().fold(S::zero(), |acc, &j| acc + q[j]);
    best - got
}

/// Largest gap any consistent quality vector can open above `jstar`.
pub fn regret_bound<S: Scalar>(dist: &DistanceMatrix<S>, jstar: usize) -> ExtReal<S> {
    dist.eccentricity(jstar)
}
