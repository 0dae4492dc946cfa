//! End-to-end acceptance checks. Runs without the libtest harness so every
//! criterion prints exactly one PASS/FAIL line; exits non-zero on any FAIL.

use std::sync::OnceLock;
use std::time::Instant;

use itertools::Itertools;
use num_rational::Rational64;
use rand::Rng;
use rayon::prelude::*;
use statrs::function::gamma::ln_gamma;

use universal_committee::adversary::{
    build_adversarial, check_self_vote_inequalities, check_shielding, find_deficient_ball,
    kapproval_counterexample, regret_floor, unit_ball_cover_size, verify_indistinguishable,
    verify_regret_gap, SiteLabel,
};
use universal_committee::bounds::{
    committee_size_window, covering_volume_window, gamma_sandwich, unit_ball_volume,
};
use universal_committee::committee::{
    construct_multiwinner, construct_two_round, construct_universal,
};
use universal_committee::experiment::{
    rows_to_csv, run_experiment, sample_candidates, trial_rng, DomainKind, ExperimentConfig, Rule,
};
use universal_committee::geometry::{grid_cover, Domain, Norm, Point};
use universal_committee::instance::{experts_from, profile, Candidate, Expert};
use universal_committee::oracle::certify_all_pairs;
use universal_committee::voting::{
    alternative_rule, apsp, build_pref_graph, minimal_regret_rule, multiwinner_rule,
    two_round_protocol, VotingError,
};
use universal_committee::ExtReal;

const TOL: f64 = 1e-9;
const NORMS: [Norm; 3] = [Norm::L1, Norm::L2, Norm::LInfinity];
const SWEEP_EPS: [f64; 3] = [0.1, 0.25, 0.5];
const SWEEP_TRIALS: usize = 200;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

#[derive(Clone, Copy)]
struct SweepPoint {
    dim: usize,
    norm: Norm,
    epsilon: f64,
    m: usize,
    k: usize,
    seed: u64,
}

fn sweep_points() -> Vec<SweepPoint> {
    let mut out = Vec::new();
    for dim in [1, 2] {
        for norm in NORMS {
            for epsilon in SWEEP_EPS {
                for m in 3..=12 {
                    for k in 1..=3 {
                        let seed = 10_000 + out.len() as u64;
                        out.push(SweepPoint {
                            dim,
                            norm,
                            epsilon,
                            m,
                            k,
                            seed,
                        });
                    }
                }
            }
        }
    }
    out
}

fn config(p: &SweepPoint, rule: Rule) -> ExperimentConfig {
    ExperimentConfig {
        seed: p.seed,
        trials: SWEEP_TRIALS,
        dim: p.dim,
        norm: p.norm,
        epsilon: p.epsilon,
        m: p.m,
        k: p.k,
        ell: 1,
        rule,
        domain: DomainKind::Box,
    }
}

struct SweepResult {
    csv: Vec<String>,
    trials: usize,
    failures: usize,
    max_excess: f64,
    /// Wall time for d=1 and d=2.
    seconds: Vec<f64>,
}

/// Runs the sweep for `rule` and re-derives every row's regret from the
/// regenerated candidates.
fn run_sweep(rule: Rule) -> SweepResult {
    let mut per_point: Vec<(String, usize, usize, f64)> = Vec::new();
    let mut seconds = Vec::new();
    for dim in [1, 2] {
        let start = Instant::now();
        let points: Vec<SweepPoint> = sweep_points()
            .into_iter()
            .filter(|p| p.dim == dim)
            .collect();
        per_point.extend(sweep_part(&points, rule));
        seconds.push(start.elapsed().as_secs_f64());
    }
    SweepResult {
        trials: per_point.iter().map(|r| r.1).sum(),
        failures: per_point.iter().map(|r| r.2).sum(),
        max_excess: per_point
            .iter()
            .map(|r| r.3)
            .fold(f64::NEG_INFINITY, f64::max),
        csv: per_point.into_iter().map(|r| r.0).collect(),
        seconds,
    }
}

fn sweep_part(points: &[SweepPoint], rule: Rule) -> Vec<(String, usize, usize, f64)> {
    points
        .par_iter()
        .map(|p| {
            let cfg = config(p, rule);
            let rows = run_experiment(&cfg).expect("sweep point runs");
            let domain = Domain::unit_box(p.dim);
            let mut failures = 0;
            let mut max_excess = f64::NEG_INFINITY;
            for row in &rows {
                let mut rng = trial_rng(cfg.seed, row.trial);
                let cands = sample_candidates(&domain, p.norm, p.m, &mut rng);
                let best = cands
                    .iter()
                    .map(|c| c.quality)
                    .fold(f64::NEG_INFINITY, f64::max);
                let regret = best - cands[row.chosen[0]].quality;
                let bound_ok = match row.bound {
                    ExtReal::Finite(b) => regret <= b + TOL,
                    ExtReal::PosInfinity => true,
                };
                max_excess = max_excess.max(regret - p.epsilon);
                if regret > p.epsilon + TOL || !bound_ok || !row.pass {
                    failures += 1;
                }
            }
            (rows_to_csv(&rows), rows.len(), failures, max_excess)
        })
        .collect()
}

static MINIMAL_SWEEP: OnceLock<SweepResult> = OnceLock::new();

fn minimal_sweep() -> &'static SweepResult {
    MINIMAL_SWEEP.get_or_init(|| run_sweep(Rule::MinimalRegret))
}

fn criterion_1() -> Outcome {
    let r = minimal_sweep();
    outcome(
        r.failures == 0,
        format!(
            "{} trials over {} sweep points, {} failures, max regret - eps = {:.3e}, d=1 {:.1}s, d=2 {:.1}s",
            r.trials,
            sweep_points().len(),
            r.failures,
            r.max_excess,
            r.seconds[0],
            r.seconds[1]
        ),
    )
}

fn criterion_2() -> Outcome {
    let domain = Domain::<f64>::unit_box(1);
    let bp = construct_universal(&domain, Norm::L2, 0.5, 9, 1).unwrap();
    let anchor =
        bp.len() == 65 && bp.len() == (8 * 8 + 1) * (bp.cover.len() - 1) && bp.cover.len() == 2;
    let mut checked = 0;
    let mut bad = Vec::new();
    for SweepPoint {
        dim,
        norm,
        epsilon: eps,
        m,
        k,
        ..
    } in sweep_points()
    {
        let bp = construct_universal(&Domain::<f64>::unit_box(dim), norm, eps, m, k).unwrap();
        let n_e = (8 * (m - 1)).div_ceil(k);
        let x = bp.cover.len();
        let bound = if x <= 1 { x } else { (n_e + 1) * (x - 1) };
        checked += 1;
        if bp.len() > bound {
            bad.push((dim, norm, eps, m, k, bp.len(), bound));
        }
    }
    outcome(
        anchor && bad.is_empty(),
        format!("anchor committee has {} experts; {checked} sweep committees within size bound, {} over", bp.len(), bad.len()),
    )
}

/// Shortest-path matrix computed directly from the rankings, independent of
/// the library's preference graph.
fn reference_distances(
    cands: &[Candidate<f64>],
    experts: &[Expert<f64>],
    k: usize,
    norm: Norm,
) -> Vec<Vec<f64>> {
    let m = cands.len();
    let prof = profile(cands, experts, k, norm);
    let mut d = vec![vec![f64::INFINITY; m]; m];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for (ranking, e) in prof.rankings.iter().zip(experts) {
        let de: Vec<f64> = cands
            .iter()
            .map(|c| norm.dist(e.location.coords(), c.location.coords()))
            .collect();
        for (pos, &a) in ranking.ranked.iter().enumerate() {
            for b in 0..m {
                let above = ranking.ranked[..=pos].contains(&b);
                if !above {
                    d[a][b] = d[a][b].min(de[b] - de[a]);
                }
            }
        }
    }
    for via in 0..m {
        for i in 0..m {
            for j in 0..m {
                if d[i][via] + d[via][j] < d[i][j] {
                    d[i][j] = d[i][via] + d[via][j];
                }
            }
        }
    }
    d
}

fn criterion_3() -> Outcome {
    let results: Vec<(bool, bool, bool)> = (0..1000u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(77, i as usize);
            let dim = 1 + (i % 2) as usize;
            let norm = NORMS[(i / 2 % 3) as usize];
            let m = rng.random_range(2..=8);
            let k = rng.random_range(1..=m.min(3));
            let domain = Domain::unit_box(dim);
            let cands = sample_candidates(&domain, norm, m, &mut rng);
            let n = rng.random_range(1..=8);
            let experts = experts_from(
                (0..n)
                    .map(|_| universal_committee::experiment::sample_point(&domain, norm, &mut rng))
                    .collect(),
            );
            let prof = profile(&cands, &experts, k, norm);
            match certify_all_pairs(&cands, &experts, &prof, norm) {
                Err(VotingError::NegativeCycle { .. }) => (false, true, false),
                Err(_) => (false, false, false),
                Ok(report) => {
                    let dist = apsp(&build_pref_graph(&cands, &experts, &prof, norm)).unwrap();
                    let reference = reference_distances(&cands, &experts, k, norm);
                    let agree = (0..m).all(|g| {
                        (0..m).all(|h| match dist.get(g, h) {
                            ExtReal::Finite(v) => (v - reference[g][h]).abs() <= TOL,
                            ExtReal::PosInfinity => reference[g][h].is_infinite(),
                        })
                    });
                    (report.all_certified(), false, agree)
                }
            }
        })
        .collect();
    let certified = results.iter().filter(|r| r.0).count();
    let cycles = results.iter().filter(|r| r.1).count();
    let agree = results.iter().filter(|r| r.2).count();
    outcome(
        certified == 1000 && cycles == 0 && agree == 1000,
        format!("{certified}/1000 instances fully certified, {cycles} negative cycles, {agree}/1000 match reference distances"),
    )
}

fn criterion_4() -> Outcome {
    let alt = run_sweep(Rule::Alternative);
    outcome(
        alt.failures == 0,
        format!(
            "{} trials, {} failures, max regret - eps = {:.3e}, d=1 {:.1}s, d=2 {:.1}s",
            alt.trials, alt.failures, alt.max_excess, alt.seconds[0], alt.seconds[1]
        ),
    )
}

/// Keeps every committee expert outside the `12 eps` ball about `center`
/// plus the listed replacements inside it.
fn emptied(
    experts: &[Expert<f64>],
    center: &Point<f64>,
    radius: f64,
    norm: Norm,
    keep: &[Point<f64>],
) -> Vec<Expert<f64>> {
    let mut locs: Vec<Point<f64>> = experts
        .iter()
        .map(|e| e.location.clone())
        .filter(|p| norm.dist(p.coords(), center.coords()) > radius)
        .collect();
    locs.extend(keep.iter().cloned());
    experts_from(locs)
}

struct AdversaryCheck {
    ok: bool,
    detail: String,
}

fn adversary_case(
    domain: &Domain<f64>,
    norm: Norm,
    eps: f64,
    m: usize,
    k: usize,
    experts: &[Expert<f64>],
    expect_center: &Point<f64>,
) -> AdversaryCheck {
    let nb = unit_ball_cover_size(domain.dim(), norm);
    let Some(center) = find_deficient_ball(experts, domain, norm, eps, m, k, nb).unwrap() else {
        return AdversaryCheck {
            ok: false,
            detail: "no deficient ball".into(),
        };
    };
    if &center != expect_center {
        return AdversaryCheck {
            ok: false,
            detail: format!("deficient ball at {:?}", center.coords()),
        };
    }
    let adv = match build_adversarial(experts, domain, norm, eps, m, k, &center) {
        Ok(a) => a,
        Err(e) => {
            return AdversaryCheck {
                ok: false,
                detail: e.to_string(),
            }
        }
    };
    let same = verify_indistinguishable(&adv, experts, k, norm).identical;
    let (_, g_min) = verify_regret_gap(&adv, experts, k, norm, |c, e, p, n| {
        minimal_regret_rule(c, e, p, n).map(|x| x.candidate)
    })
    .unwrap();
    let (_, g_alt) = verify_regret_gap(&adv, experts, k, norm, alternative_rule).unwrap();
    let closing = adv
        .candidates
        .iter()
        .zip(&adv.labels)
        .filter(|(_, l)| matches!(l, SiteLabel::Center | SiteLabel::InteriorExpert))
        .all(|(c, _)| {
            let r = norm.dist(c.location.coords(), center.coords());
            (0.5 * r).max(2.0 * eps - 0.5 * r) >= eps - TOL
        });
    let floor = regret_floor(&adv);
    let ineq = check_self_vote_inequalities(&adv, norm);
    let shield = check_shielding(&adv, domain, norm, 2500);
    let ok = same
        && adv.len() < m
        && g_min >= eps - TOL
        && g_alt >= eps - TOL
        && closing
        && floor >= eps - TOL
        && ineq
        && shield;
    AdversaryCheck {
        ok,
        detail: format!(
            "{} candidates < m={m}, indistinguishable={same}, gaps {:.4}/{:.4} vs eps {:.4}, floor {:.4}, shielding={shield}",
            adv.len(),
            g_min,
            g_alt,
            eps,
            floor
        ),
    }
}

fn criterion_5() -> Outcome {
    let line = |x: f64| Point::new(vec![x]);
    let eps1 = 1.0 / 48.0;
    let d1 = Domain::unit_box(1);
    let full1 = construct_universal(&d1, Norm::L2, eps1, 3, 2).unwrap();
    let origin1 = line(0.0);
    let sparse1 = emptied(
        &full1.experts,
        &origin1,
        12.0 * eps1,
        Norm::L2,
        &[line(0.02), line(0.05), line(0.1), line(0.2)],
    );
    let one = adversary_case(&d1, Norm::L2, eps1, 200, 2, &sparse1, &origin1);

    let eps2 = 0.04;
    let d2 = Domain::unit_box(2);
    let full2 = construct_universal(&d2, Norm::L2, eps2, 3, 1).unwrap();
    let origin2 = Point::new(vec![0.0, 0.0]);
    let keep = [
        Point::new(vec![0.05, 0.03]),
        Point::new(vec![0.1, 0.02]),
        Point::new(vec![0.2, 0.1]),
        Point::new(vec![0.3, 0.3]),
    ];
    let sparse2 = emptied(&full2.experts, &origin2, 12.0 * eps2, Norm::L2, &keep);
    let two = adversary_case(&d2, Norm::L2, eps2, 2000, 1, &sparse2, &origin2);
    outcome(
        one.ok && two.ok,
        format!("d=1: {}; d=2: {}", one.detail, two.detail),
    )
}

fn criterion_6() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    let half = Rational64::new(1, 2);
    for k in [2usize, 3, 4] {
        let c = kapproval_counterexample::<Rational64>(k, 1).unwrap();
        let same = (0..1000).all(|i| {
            let (a, b) = c.ballots_at(Rational64::new(i, 999));
            a == b
        });
        let worst = |j: usize| {
            let best1 = *c.q1.iter().max().unwrap();
            let best2 = *c.q2.iter().max().unwrap();
            (best1 - c.q1[j]).max(best2 - c.q2[j])
        };
        let floor = (0..c.locations.len()).map(worst).min().unwrap();
        ok &= same && floor == half;
        lines.push(format!(
            "k={k}: ballots identical={same}, forced regret {floor}"
        ));
    }
    outcome(ok, lines.join("; "))
}

fn criterion_7() -> Outcome {
    let eps = 0.25;
    let domain = Domain::unit_box(1);
    let mut parts = Vec::new();
    let mut ok = true;
    for (k, ell) in [(2usize, 2usize), (3, 2), (4, 3)] {
        for m in [6usize, 8, 10] {
            let bp = construct_multiwinner(&domain, Norm::L2, eps, m, k, ell).unwrap();
            let worst = (0..200usize)
                .into_par_iter()
                .map(|t| {
                    let mut rng = trial_rng(500 + (k * 100 + ell * 10 + m) as u64, t);
                    let cands = sample_candidates(&domain, Norm::L2, m, &mut rng);
                    let prof = profile(&cands, &bp.experts, k, Norm::L2);
                    let out = multiwinner_rule(&cands, &bp.experts, &prof, Norm::L2, ell).unwrap();
                    let best = (0..m)
                        .combinations(ell)
                        .map(|s| s.iter().map(|&j| cands[j].quality).sum::<f64>())
                        .fold(f64::NEG_INFINITY, f64::max);
                    best - out.winners.iter().map(|&j| cands[j].quality).sum::<f64>()
                })
                .reduce(|| f64::NEG_INFINITY, f64::max);
            ok &= worst <= eps + TOL;
            parts.push(format!("({k},{ell},m={m}) max {worst:.4}"));
        }
    }
    outcome(ok, format!("eps={eps}; {}", parts.join(" ")))
}

fn criterion_8() -> Outcome {
    let eps = 0.5;
    let domain = Domain::unit_box(1);
    let (screening, selection) = construct_two_round(&domain, Norm::L2, eps).unwrap();
    let n = screening.len();
    let total = n + selection.len();
    let mut ok = n == 2 && total <= n + 8 * n * n;
    let mut parts = vec![format!(
        "screening {n}, selection {}, total {total} <= {}",
        selection.len(),
        n + 8 * n * n
    )];
    for m in [50usize, 100, 500] {
        let stats: Vec<(usize, f64)> = (0..200usize)
            .into_par_iter()
            .map(|t| {
                let mut rng = trial_rng(900 + m as u64, t);
                let cands = sample_candidates(&domain, Norm::L2, m, &mut rng);
                let out = two_round_protocol(&screening, &selection, &cands, Norm::L2).unwrap();
                let best = cands
                    .iter()
                    .map(|c| c.quality)
                    .fold(f64::NEG_INFINITY, f64::max);
                (out.survivors.len(), best - cands[out.winner].quality)
            })
            .collect();
        let max_surv = stats.iter().map(|s| s.0).max().unwrap();
        let max_regret = stats.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
        ok &= max_surv <= 2 && max_regret <= eps + TOL;
        parts.push(format!(
            "m={m}: survivors <= {max_surv}, max regret {max_regret:.4}"
        ));
    }
    outcome(ok, parts.join("; "))
}

fn criterion_9() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    let gamma_ok = [0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0].iter().all(|&x| {
        let (lo, hi) = gamma_sandwich(x).unwrap();
        let lg = ln_gamma(x);
        lo.ln() < lg && lg < hi.ln()
    });
    ok &= gamma_ok;
    detail.push(format!("gamma brackets 7/7={gamma_ok}"));

    let mut cover_in = 0;
    let mut cover_total = 0;
    for d in 1..=3usize {
        for norm in [Norm::LInfinity, Norm::L2] {
            for eps in [0.1, 0.2, 0.25] {
                let domain = Domain::<f64>::unit_box(d);
                let (lo, hi) = covering_volume_window(1.0, d, norm, eps).unwrap();
                let size = grid_cover(&domain, norm, eps).len() as f64;
                cover_total += 1;
                if lo <= size && size <= hi {
                    cover_in += 1;
                }
            }
        }
    }
    ok &= cover_in == cover_total;
    detail.push(format!(
        "grid covers in volume window {cover_in}/{cover_total}"
    ));

    let mut within = 0;
    let mut total = 0;
    for d in [1usize, 2] {
        for norm in NORMS {
            for eps in [0.1, 0.25] {
                let bp =
                    construct_universal(&Domain::<f64>::unit_box(d), norm, eps, 10, 2).unwrap();
                let (lower, upper) = committee_size_window(1.0, d, norm, eps, 10, 2).unwrap();
                total += 1;
                if (bp.len() as f64) <= upper && lower <= upper {
                    within += 1;
                }
            }
        }
    }
    ok &= within == total;
    detail.push(format!(
        "committee sizes under explicit upper {within}/{total}"
    ));
    let disk = (unit_ball_volume(2, Norm::L2).unwrap() - std::f64::consts::PI).abs() < 1e-12;
    ok &= disk;
    outcome(ok, detail.join("; "))
}

fn criterion_10() -> Outcome {
    let first = minimal_sweep();
    let second = run_sweep(Rule::MinimalRegret);
    let same = first.csv == second.csv;
    let bytes: usize = first.csv.iter().map(|c| c.len()).sum();
    outcome(
        same,
        format!(
            "{} CSV files, {bytes} bytes, identical={same}",
            first.csv.len()
        ),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("universal committee, minimal regret rule", criterion_1),
        ("committee size", criterion_2),
        ("duality certificates", criterion_3),
        ("universal committee, single-source rule", criterion_4),
        ("lower-bound adversary", criterion_5),
        ("approval ballots are insufficient", criterion_6),
        ("multiwinner cumulative regret", criterion_7),
        ("two-round protocol", criterion_8),
        ("explicit bounds", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = f();
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} [{}] {name}: {} ({:.1}s)",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
