//! Seeded end-to-end trials and the reports behind the command line.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::adversary::{
    build_adversarial, check_self_vote_inequalities, find_deficient_ball, regret_floor,
    unit_ball_cover_size, verify_indistinguishable, verify_regret_gap, AdversaryError,
};
use crate::bounds::{bounds_report, BoundsReport};
use crate::committee::{
    construct_multiwinner, construct_two_round, construct_universal, CommitteeBlueprint,
};
use crate::geometry::{Domain, Norm, Point};
use crate::instance::{candidates_from, profile, Candidate, Expert, Instance};
use crate::oracle::{certify_all_pairs, cumulative_regret, regret_bound, true_regret};
use crate::scalar::ExtReal;
use crate::voting::{
    alternative_rule, apsp, build_pref_graph, minimal_regret_rule, multiwinner_rule,
    two_round_protocol,
};
use crate::Error;

/// Slack on every regret comparison.
pub const REGRET_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    MinimalRegret,
    Alternative,
    Multiwinner,
    TwoRound,
}

impl Rule {
    pub fn as_str(&self) -> &'static str {
        match self {
            Rule::MinimalRegret => "minimal_regret",
            Rule::Alternative => "alternative",
            Rule::Multiwinner => "multiwinner",
            Rule::TwoRound => "two_round",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.replace('-', "_").as_str() {
            "minimal_regret" => Ok(Rule::MinimalRegret),
            "alternative" => Ok(Rule::Alternative),
            "multiwinner" => Ok(Rule::Multiwinner),
            "two_round" => Ok(Rule::TwoRound),
            _ => Err(Error::Config(format!("unknown rule {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DomainKind {
    /// `[0, 1]^d`.
    Box,
    /// The ball of radius `1/2` about the center of the unit box.
    Ball,
}

impl DomainKind {
    pub fn build(&self, dim: usize) -> Result<Domain<f64>, Error> {
        if dim == 0 {
            return Err(Error::Config("dimension must be at least 1".into()));
        }
        Ok(match self {
            DomainKind::Box => Domain::unit_box(dim),
            DomainKind::Ball => Domain::new_ball(Point::new(vec![0.5; dim]), 0.5)?,
        })
    }
}

impl FromStr for DomainKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "box" => Ok(DomainKind::Box),
            "ball" => Ok(DomainKind::Ball),
            _ => Err(Error::Config(format!("unknown domain {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub trials: usize,
    pub dim: usize,
    pub norm: Norm,
    pub epsilon: f64,
    pub m: usize,
    pub k: usize,
    pub ell: usize,
    pub rule: Rule,
    pub domain: DomainKind,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 0,
            trials: 100,
            dim: 1,
            norm: Norm::L2,
            epsilon: 0.25,
            m: 5,
            k: 1,
            ell: 1,
            rule: Rule::MinimalRegret,
            domain: DomainKind::Box,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialRow {
    pub trial: usize,
    pub chosen: Vec<usize>,
    pub true_regret: f64,
    pub bound: ExtReal<f64>,
    pub epsilon: f64,
    pub pass: bool,
}

impl TrialRow {
    pub const CSV_HEADER: &'static str = "trial,chosen,true_regret,bound,epsilon,pass";

    pub fn csv_row(&self) -> String {
        let chosen: Vec<String> = self.chosen.iter().map(|c| c.to_string()).collect();
        format!(
            "{},{},{},{},{},{}",
            self.trial,
            chosen.join(";"),
            self.true_regret,
            self.bound,
            self.epsilon,
            self.pass
        )
    }
}

pub fn rows_to_csv(rows: &[TrialRow]) -> String {
    let mut out = String::from(TrialRow::CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

/// Uniform point of `domain`; balls use rejection from the bounding box.
pub fn sample_point(domain: &Domain<f64>, norm: Norm, rng: &mut ChaCha8Rng) -> Point<f64> {
    let (low, high) = domain.bounding_box();
    loop {
        let coords: Vec<f64> = low
            .coords()
            .iter()
            .zip(high.coords())
            .map(|(&l, &h)| if h > l { rng.random_range(l..h) } else { l })
            .collect();
        let p = Point::new(coords);
        if domain.contains(&p, norm) {
            return p;
        }
    }
}

/// `m` candidates uniform in `domain` with qualities uniform in
/// `[0, diameter]`.
pub fn sample_candidates(
    domain: &Domain<f64>,
    norm: Norm,
    m: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Candidate<f64>> {
    let diam = domain.diameter(norm);
    let locs: Vec<Point<f64>> = (0..m).map(|_| sample_point(domain, norm, rng)).collect();
    let qs: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..=diam)).collect();
    candidates_from(locs, &qs)
}

/// Generator for trial `trial`: one stream per trial so results do not depend
/// on scheduling.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

enum Committees {
    Single(CommitteeBlueprint<f64>),
    Pair(CommitteeBlueprint<f64>, CommitteeBlueprint<f64>),
}

fn committees_for(cfg: &ExperimentConfig, domain: &Domain<f64>) -> Result<Committees, Error> {
    Ok(match cfg.rule {
        Rule::MinimalRegret | Rule::Alternative => Committees::Single(construct_universal(
            domain,
            cfg.norm,
            cfg.epsilon,
            cfg.m,
            cfg.k,
        )?),
        Rule::Multiwinner => Committees::Single(construct_multiwinner(
            domain,
            cfg.norm,
            cfg.epsilon,
            cfg.m,
            cfg.k,
            cfg.ell,
        )?),
        Rule::TwoRound => {
            let (s, t) = construct_two_round(domain, cfg.norm, cfg.epsilon)?;
            Committees::Pair(s, t)
        }
    })
}

fn run_trial(
    cfg: &ExperimentConfig,
    domain: &Domain<f64>,
    committees: &Committees,
    trial: usize,
) -> Result<TrialRow, Error> {
    let mut rng = trial_rng(cfg.seed, trial);
    let cands = sample_candidates(domain, cfg.norm, cfg.m, &mut rng);
    let q: Vec<f64> = cands.iter().map(|c| c.quality).collect();
    let (chosen, regret, bound) = match (cfg.rule, committees) {
        (Rule::TwoRound, Committees::Pair(screening, selection)) => {
            let out = two_round_protocol(screening, selection, &cands, cfg.norm)?;
            (vec![out.winner], true_regret(&q, out.winner), out.bound)
        }
        (rule, Committees::Single(bp)) => {
            let prof = profile(&cands, &bp.experts, cfg.k, cfg.norm);
            match rule {
                Rule::MinimalRegret => {
                    let c = minimal_regret_rule(&cands, &bp.experts, &prof, cfg.norm)?;
                    (vec![c.candidate], true_regret(&q, c.candidate), c.bound)
                }
                Rule::Alternative => {
                    let c = alternative_rule(&cands, &bp.experts, &prof, cfg.norm)?;
                    let dist = apsp(&build_pref_graph(&cands, &bp.experts, &prof, cfg.norm))?;
                    (vec![c], true_regret(&q, c), regret_bound(&dist, c))
                }
                _ => {
                    let out = multiwinner_rule(&cands, &bp.experts, &prof, cfg.norm, cfg.ell)?;
                    let bound = out
                        .eccentricities
                        .iter()
                        .fold(ExtReal::zero(), |acc, &e| acc + e);
                    (
                        out.winners.clone(),
                        cumulative_regret(&q, &out.winners),
                        bound,
                    )
                }
            }
        }
        _ => unreachable!("committee shape follows the rule"),
    };
    let within_bound = match (cfg.rule, bound) {
        (Rule::Multiwinner, _) | (_, ExtReal::PosInfinity) => true,
        (_, ExtReal::Finite(b)) => regret <= b + REGRET_TOL,
    };
    Ok(TrialRow {
        trial,
        chosen,
        true_regret: regret,
        bound,
        epsilon: cfg.epsilon,
        pass: regret <= cfg.epsilon + REGRET_TOL && within_bound,
    })
}

/// Runs every trial; rows come back in trial order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<TrialRow>, Error> {
    if cfg.m < 2 {
        return Err(Error::Config("m must be at least 2".into()));
    }
    let domain = cfg.domain.build(cfg.dim)?;
    let committees = committees_for(cfg, &domain)?;
    (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial(cfg, &domain, &committees, t))
        .collect()
}

/// One bounds row per dimension in `dims`.
pub fn bounds_table(
    dims: &[usize],
    norm: Norm,
    epsilon: f64,
    m: usize,
    k: usize,
) -> Result<Vec<BoundsReport>, Error> {
    dims.iter()
        .map(|&d| Ok(bounds_report(d, norm, epsilon, m, k)?))
        .collect()
}

pub fn bounds_csv(rows: &[BoundsReport]) -> String {
    let mut out = String::from(BoundsReport::CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdversaryReport {
    pub deficient_ball_found: bool,
    pub center: Option<Vec<f64>>,
    pub candidate_count: usize,
    pub m: usize,
    pub indistinguishable: bool,
    pub witness_expert: Option<usize>,
    pub regret_gap_minimal_regret: Option<f64>,
    pub regret_gap_alternative: Option<f64>,
    pub regret_floor: Option<f64>,
    pub self_vote_inequalities: bool,
    pub epsilon: f64,
    pub message: String,
}

/// Searches `experts` for a deficient ball and, if one exists, runs the
/// construction and both verifications there.
pub fn adversary_report(
    experts: &[Expert<f64>],
    domain: &Domain<f64>,
    norm: Norm,
    epsilon: f64,
    m: usize,
    k: usize,
) -> Result<AdversaryReport, Error> {
    let nb = unit_ball_cover_size(domain.dim(), norm);
    let mut report = AdversaryReport {
        deficient_ball_found: false,
        center: None,
        candidate_count: 0,
        m,
        indistinguishable: false,
        witness_expert: None,
        regret_gap_minimal_regret: None,
        regret_gap_alternative: None,
        regret_floor: None,
        self_vote_inequalities: false,
        epsilon,
        message: String::new(),
    };
    let Some(center) = find_deficient_ball(experts, domain, norm, epsilon, m, k, nb)? else {
        report.message = "no deficient ball found".into();
        return Ok(report);
    };
    report.deficient_ball_found = true;
    report.center = Some(center.to_f64_vec());
    let adv = match build_adversarial(experts, domain, norm, epsilon, m, k, &center) {
        Ok(adv) => adv,
        Err(e @ (AdversaryError::CountOverflow { .. } | AdversaryError::NoFarRegion)) => {
            report.message = e.to_string();
            return Ok(report);
        }
        Err(e) => return Err(e.into()),
    };
    report.candidate_count = adv.len();
    let v = verify_indistinguishable(&adv, experts, k, norm);
    report.indistinguishable = v.identical;
    report.witness_expert = v.witness;
    if v.identical {
        let (_, g1) = verify_regret_gap(&adv, experts, k, norm, |c, e, p, n| {
            minimal_regret_rule(c, e, p, n).map(|ch| ch.candidate)
        })?;
        let (_, g2) = verify_regret_gap(&adv, experts, k, norm, alternative_rule)?;
        report.regret_gap_minimal_regret = Some(g1);
        report.regret_gap_alternative = Some(g2);
    }
    report.regret_floor = Some(regret_floor(&adv));
    report.self_vote_inequalities = check_self_vote_inequalities(&adv, norm);
    report.message = if v.identical
        && report
            .regret_floor
            .is_some_and(|f| f >= epsilon - REGRET_TOL)
    {
        "regret gap at least epsilon".into()
    } else {
        "construction did not separate the worlds".into()
    };
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub candidates: usize,
    pub experts: usize,
    pub chosen: usize,
    pub bound: Option<f64>,
    pub true_regret: f64,
    pub sound: bool,
    pub pairs_certified: usize,
    pub certification_failures: Vec<(usize, usize)>,
}

/// Runs the minimal regret rule on a stored instance and certifies every
/// pairwise distance in its preference graph.
pub fn verify_instance(inst: &Instance<f64>) -> Result<VerifyReport, Error> {
    let prof = inst.profile();
    let choice = minimal_regret_rule(&inst.candidates, &inst.experts, &prof, inst.norm)?;
    let q = inst.qualities();
    let regret = true_regret(&q, choice.candidate);
    let cert = certify_all_pairs(&inst.candidates, &inst.experts, &prof, inst.norm)?;
    let bound = choice.bound.finite();
    Ok(VerifyReport {
        candidates: inst.candidates.len(),
        experts: inst.experts.len(),
        chosen: choice.candidate,
        bound,
        true_regret: regret,
        sound: bound.is_none_or(|b| regret <= b + REGRET_TOL),
        pairs_certified: cert.pairs - cert.failures.len(),
        certification_failures: cert.failures,
    })
}
