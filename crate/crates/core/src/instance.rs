//! Candidates, experts and the rankings experts report.

use std::collections::BTreeSet;

use crate::geometry::{Domain, Norm, Point};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Candidate<S> {
    pub id: usize,
    pub location: Point<S>,
    pub quality: S,
}

impl<S: Scalar> Candidate<S> {
    pub fn new(id: usize, location: Point<S>, quality: S) -> Self {
        Candidate {
            id,
            location,
            quality,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expert<S> {
    pub id: usize,
    pub location: Point<S>,
}

impl<S: Scalar> Expert<S> {
    pub fn new(id: usize, location: Point<S>) -> Self {
        Expert { id, location }
    }
}

/// Numbers candidates `0..` in order.
pub fn candidates_from<S: Scalar>(locations: Vec<Point<S>>, qualities: &[S]) -> Vec<Candidate<S>> {
    assert_eq!(locations.len(), qualities.len());
    locations
        .into_iter()
        .zip(qualities)
        .enumerate()
        .map(|(id, (loc, &q))| Candidate::new(id, loc, q))
        .collect()
}

/// Numbers experts `0..` in order.
pub fn experts_from<S: Scalar>(locations: Vec<Point<S>>) -> Vec<Expert<S>> {
    locations
        .into_iter()
        .enumerate()
        .map(|(id, loc)| Expert::new(id, loc))
        .collect()
}

/// An expert's top-k list, best first. Entries are candidate indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ranking {
    pub expert_id: usize,
    pub ranked: Vec<usize>,
}

impl Ranking {
    pub fn favorite(&self) -> Option<usize> {
        self.ranked.first().copied()
    }

    pub fn position(&self, candidate: usize) -> Option<usize> {
        self.ranked.iter().position(|&c| c == candidate)
    }
}

/// One ranking per expert, in expert order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankingProfile {
    pub k: usize,
    pub rankings: Vec<Ranking>,
}

impl RankingProfile {
    /// Distinct first choices, in increasing id order.
    pub fn favorites(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.rankings.iter().filter_map(Ranking::favorite).collect();
        set.into_iter().collect()
    }

    pub fn len(&self) -> usize {
        self.rankings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rankings.is_empty()
    }
}

/// A complete world: where everything sits, the hidden qualities, and the
/// ranking length experts report.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance<S> {
    pub domain: Domain<S>,
    pub norm: Norm,
    pub k: usize,
    pub candidates: Vec<Candidate<S>>,
    pub experts: Vec<Expert<S>>,
}

impl<S: Scalar> Instance<S> {
    pub fn qualities(&self) -> Vec<S> {
        self.candidates.iter().map(|c| c.quality).collect()
    }

    pub fn profile(&self) -> RankingProfile {
        profile(&self.candidates, &self.experts, self.k, self.norm)
    }
}

pub fn perceived_quality<S: Scalar>(expert: &Expert<S>, candidate: &Candidate<S>, norm: Norm) -> S {
    candidate.quality - norm.dist(expert.location.coords(), candidate.location.coords())
}

/// Top-`k` list by perceived quality. Perceived qualities within the scalar
/// tolerance of the best count as tied; ties go to the closer candidate, then
/// to the lower index.
pub fn top_k_ranking<S: Scalar>(
    expert: &Expert<S>,
    candidates: &[Candidate<S>],
    k: usize,
    norm: Norm,
) -> Ranking {
    let tol = S::tolerance();
    let dist: Vec<S> = candidates
        .iter()
        .map(|c| norm.dist(expert.location.coords(), c.location.coords()))
        .collect();
    let pq: Vec<S> = candidates
        .iter()
        .zip(&dist)
        .map(|(c, &d)| c.quality - d)
        .collect();
    let mut taken = vec![false; candidates.len()];
    let mut ranked = Vec::with_capacity(k.min(candidates.len()));
    for _ in 0..k.min(candidates.len()) {
        let best = (0..candidates.len())
            .filter(|&j| !taken[j])
            .map(|j| pq[j])
            .reduce(S::max_of)
            .expect("a candidate remains");
        let tied: Vec<usize> = (0..candidates.len())
            .filter(|&j| !taken[j] && pq[j] >= best - tol)
            .collect();
        let closest = tied
            .iter()
            .map(|&j| dist[j])
            .reduce(S::min_of)
            .expect("non-empty tie set");
        let pick = tied
            .into_iter()
            .find(|&j| dist[j] <= closest + tol)
            .expect("closest candidate exists");
        taken[pick] = true;
        ranked.push(pick);
    }
    Ranking {
        expert_id: expert.id,
        ranked,
    }
}

pub fn profile<S: Scalar>(
    candidates: &[Candidate<S>],
    experts: &[Expert<S>],
    k: usize,
    norm: Norm,
) -> RankingProfile {
    RankingProfile {
        k,
        rankings: experts
            .iter()
            .map(|e| top_k_ranking(e, candidates, k, norm))
            .collect(),
    }
}

/// The unordered top-k set.
pub fn approval_ballot<S: Scalar>(
    expert: &Expert<S>,
    candidates: &[Candidate<S>],
    k: usize,
    norm: Norm,
) -> BTreeSet<usize> {
    top_k_ranking(expert, candidates, k, norm)
        .ranked
        .into_iter()
        .collect()
}

/// Whether `qhat` could have produced `profile`: each ranked candidate must
/// look at least as good (up to tolerance) as everything ranked below it and
/// everything unranked, from the ranking expert's location.
pub fn is_consistent<S: Scalar>(
    qhat: &[S],
    profile: &RankingProfile,
    candidates: &[Candidate<S>],
    experts: &[Expert<S>],
    norm: Norm,
) -> bool {
    assert_eq!(
        qhat.len(),
        candidates.len(),
        "qhat length must match candidate count"
    );
    let tol = S::tolerance();
    profile
        .rankings
        .iter()
        .zip(experts)
        .all(|(ranking, expert)| {
            let pq: Vec<S> = candidates
                .iter()
                .zip(qhat)
                .map(|(c, &q)| q - norm.dist(expert.location.coords(), c.location.coords()))
                .collect();
            let mut above = vec![false; candidates.len()];
            ranking.ranked.iter().all(|&j| {
                above[j] = true;
                (0..candidates.len()).all(|jp| above[jp] || pq[j] >= pq[jp] - tol)
            })
        })
}
