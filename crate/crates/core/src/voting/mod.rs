//! Preference graphs, shortest paths, and the voting rules built on them.

mod graph;

pub use graph::{
    apsp, build_pref_graph, single_source, DistanceMatrix, PrefGraph, SingleSourcePaths,
};

use thiserror::Error;

use crate::committee::{CommitteeBlueprint, CommitteeKind};
use crate::geometry::Norm;
use crate::instance::{profile, Candidate, Expert, RankingProfile};
use crate::scalar::{ExtReal, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VotingError {
    #[error(
        "negative cycle through candidate {vertex} (value {value}); the profile is not inducible"
    )]
    NegativeCycle { vertex: usize, value: f64 },
    #[error("no candidates")]
    NoCandidates,
    #[error("no votes to pick a source from")]
    NoVotes,
    #[error("cannot pick {ell} winners from {m} candidates")]
    TooManyWinners { ell: usize, m: usize },
}

/// A winner together with the certified regret bound (its eccentricity in
/// the preference graph).
#[derive(Clone, Debug, PartialEq)]
pub struct Choice<S> {
    pub candidate: usize,
    pub bound: ExtReal<S>,
}

/// Graph center of the preference graph.
pub fn minimal_regret_rule<S: Scalar>(
    candidates: &[Candidate<S>],
    experts: &[Expert<S>],
    profile: &RankingProfile,
    norm: Norm,
) -> Result<Choice<S>, VotingError> {
    if candidates.is_empty() {
        return Err(VotingError::NoCandidates);
    }
    let dist = apsp(&build_pref_graph(candidates, experts, profile, norm))?;
    let candidate = dist.center().expect("at least one candidate");
    Ok(Choice {
        candidate,
        bound: dist.eccentricity(candidate),
    })
}

/// Single-source variant for tree committees: run shortest paths from the
/// first expert's favorite and return the first choice farthest from it.
pub fn alternative_rule<S: Scalar>(
    candidates: &[Candidate<S>],
    experts: &[Expert<S>],
    profile: &RankingProfile,
    norm: Norm,
) -> Result<usize, VotingError> {
    match candidates.len() {
        0 => return Err(VotingError::NoCandidates),
        1 => return Ok(0),
        _ => {}
    }
    let source = profile
        .rankings
        .first()
        .and_then(|r| r.favorite())
        .ok_or(VotingError::NoVotes)?;
    let paths = single_source(
        &build_pref_graph(candidates, experts, profile, norm),
        source,
    )?;
    let mut best: Option<(usize, ExtReal<S>)> = None;
    for j in profile.favorites() {
        let d = paths.dist[j];
        if best.is_none_or(|(_, b)| d > b) {
            best = Some((j, d));
        }
    }
    Ok(best.map(|(j, _)| j).unwrap_or(source))
}

/// Winners in selection order with the eccentricity each had when chosen.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiwinnerOutcome<S> {
    pub winners: Vec<usize>,
    pub eccentricities: Vec<ExtReal<S>>,
}

/// Repeatedly takes the graph center and deletes it, recomputing shortest
/// paths on the remaining candidates each time.
pub fn multiwinner_rule<S: Scalar>(
    candidates: &[Candidate<S>],
    experts: &[Expert<S>],
    profile: &RankingProfile,
    norm: Norm,
    ell: usize,
) -> Result<MultiwinnerOutcome<S>, VotingError> {
    let m = candidates.len();
    if ell > m {
        return Err(VotingError::TooManyWinners { ell, m });
    }
    let full = build_pref_graph(candidates, experts, profile, norm);
    let mut active: Vec<usize> = (0..m).collect();
    let mut out = MultiwinnerOutcome {
        winners: Vec::with_capacity(ell),
        eccentricities: Vec::with_capacity(ell),
    };
    for _ in 0..ell {
        let dist = apsp(&full.induced(&active))?;
        let c = dist.center().expect("active set is non-empty");
        out.winners.push(active[c]);
        out.eccentricities.push(dist.eccentricity(c));
        active.remove(c);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwoRoundOutcome<S> {
    pub winner: usize,
    /// Candidates that were some screening expert's favorite, in id order.
    pub survivors: Vec<usize>,
    /// Selection-round eccentricity plus half the screening epsilon.
    pub bound: ExtReal<S>,
}

/// Screening round of top-1 votes, then the minimal regret rule over the
/// survivors with the selection committee.
pub fn two_round_protocol<S: Scalar>(
    screening: &CommitteeBlueprint<S>,
    selection: &CommitteeBlueprint<S>,
    candidates: &[Candidate<S>],
    norm: Norm,
) -> Result<TwoRoundOutcome<S>, VotingError> {
    if candidates.is_empty() {
        return Err(VotingError::NoCandidates);
    }
    let first = profile(candidates, &screening.experts, 1, norm);
    let survivors = first.favorites();
    if survivors.is_empty() {
        return Err(VotingError::NoVotes);
    }
    let pool: Vec<Candidate<S>> = survivors
        .iter()
        .enumerate()
        .map(|(id, &j)| Candidate::new(id, candidates[j].location.clone(), candidates[j].quality))
        .collect();
    let k = match selection.kind {
        CommitteeKind::Universal { k, .. } | CommitteeKind::Multiwinner { k, .. } => k,
        CommitteeKind::Screening => 1,
    };
    let second = profile(&pool, &selection.experts, k, norm);
    let choice = minimal_regret_rule(&pool, &selection.experts, &second, norm)?;
    Ok(TwoRoundOutcome {
        winner: survivors[choice.candidate],
        survivors,
        bound: choice.bound + ExtReal::Finite(screening.epsilon * S::half()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::committee::{construct_screening, construct_two_round, construct_universal};
    use crate::geometry::{Domain, Point};
    use crate::instance::{candidates_from, experts_from};

    fn line(xs: &[f64]) -> Vec<Point<f64>> {
        xs.iter().map(|&x| Point::new(vec![x])).collect()
    }

    #[test]
    fn single_candidate() {
        let cands = candidates_from(line(&[0.3]), &[1.0]);
        let experts = experts_from(line(&[0.0]));
        let prof = profile(&cands, &experts, 1, Norm::L1);
        let c = minimal_regret_rule(&cands, &experts, &prof, Norm::L1).unwrap();
        assert_eq!((c.candidate, c.bound), (0, ExtReal::Finite(0.0)));
        assert_eq!(
            alternative_rule(&cands, &experts, &prof, Norm::L1).unwrap(),
            0
        );
    }

    #[test]
    fn symmetric_pair_picks_lowest_id() {
        let cands = candidates_from(line(&[0.0, 1.0]), &[0.0, 0.0]);
        let experts = experts_from(line(&[0.0, 1.0]));
        let prof = profile(&cands, &experts, 1, Norm::L1);
        let c = minimal_regret_rule(&cands, &experts, &prof, Norm::L1).unwrap();
        assert_eq!((c.candidate, c.bound), (0, ExtReal::Finite(1.0)));
    }

    #[test]
    fn colocated_candidates_reveal_the_best() {
        let cands = candidates_from(line(&[0.5, 0.5, 0.5]), &[0.2, 0.9, 0.4]);
        let experts = experts_from(line(&[0.1, 0.7]));
        let prof = profile(&cands, &experts, 3, Norm::L1);
        assert_eq!(
            alternative_rule(&cands, &experts, &prof, Norm::L1).unwrap(),
            1
        );
        assert_eq!(
            minimal_regret_rule(&cands, &experts, &prof, Norm::L1)
                .unwrap()
                .candidate,
            1
        );
    }

    #[test]
    fn multiwinner_edge_cases() {
        let cands = candidates_from(line(&[0.0, 0.4, 1.0]), &[0.3, 0.1, 0.6]);
        let experts = experts_from(line(&[0.0, 0.5, 1.0]));
        let prof = profile(&cands, &experts, 2, Norm::L1);
        let all = multiwinner_rule(&cands, &experts, &prof, Norm::L1, 3).unwrap();
        let mut w = all.winners.clone();
        w.sort();
        assert_eq!(w, vec![0, 1, 2]);
        let one = multiwinner_rule(&cands, &experts, &prof, Norm::L1, 1).unwrap();
        let single = minimal_regret_rule(&cands, &experts, &prof, Norm::L1).unwrap();
        assert_eq!(one.winners, vec![single.candidate]);
        assert!(multiwinner_rule(&cands, &experts, &prof, Norm::L1, 4).is_err());
    }

    #[test]
    fn universal_committee_small_instance() {
        let domain = Domain::unit_box(1);
        let committee = construct_universal(&domain, Norm::L1, 0.5, 3, 1).unwrap();
        let cands = candidates_from(line(&[0.1, 0.55, 0.9]), &[0.2, 0.8, 0.5]);
        let prof = profile(&cands, &committee.experts, 1, Norm::L1);
        let c = minimal_regret_rule(&cands, &committee.experts, &prof, Norm::L1).unwrap();
        assert!(0.8 - cands[c.candidate].quality <= 0.5 + 1e-9);
        let a = alternative_rule(&cands, &committee.experts, &prof, Norm::L1).unwrap();
        assert!(0.8 - cands[a].quality <= 0.5 + 1e-9);
    }

    #[test]
    fn two_round_dominant_candidate_wins() {
        let domain = Domain::unit_box(1);
        let (screening, selection) = construct_two_round(&domain, Norm::L2, 0.5).unwrap();
        let cands = candidates_from(line(&[0.1, 0.3, 0.6, 0.95]), &[0.2, 5.0, 0.1, 0.4]);
        let out = two_round_protocol(&screening, &selection, &cands, Norm::L2).unwrap();
        assert_eq!(out.survivors, vec![1]);
        assert_eq!(out.winner, 1);
    }

    #[test]
    fn two_round_without_pruning_matches_direct_rule() {
        let domain = Domain::unit_box(1);
        let screening = construct_screening(&domain, Norm::L2, 0.5).unwrap();
        let selection = construct_universal(&domain, Norm::L2, 0.25, 2, 1).unwrap();
        // Each screening expert sits on top of a different candidate.
        let cands = candidates_from(line(&[0.25, 0.75]), &[0.3, 0.31]);
        let out = two_round_protocol(&screening, &selection, &cands, Norm::L2).unwrap();
        assert_eq!(out.survivors, vec![0, 1]);
        let prof = profile(&cands, &selection.experts, 1, Norm::L2);
        let direct = minimal_regret_rule(&cands, &selection.experts, &prof, Norm::L2).unwrap();
        assert_eq!(out.winner, direct.candidate);
    }
}
