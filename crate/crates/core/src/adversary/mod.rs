//! Lower-bound machinery: locate a sparsely staffed region of a committee
//! and place candidates there so two quality vectors produce identical
//! rankings while forcing regret at least `epsilon` in one of them.
//!
//! The construction works in coordinates centered at the sparse ball. Sites
//! strictly inside radius `4 eps` (the center and each interior expert)
//! get candidates whose quality trades off between the two worlds; rays from
//! each such site toward the far part of the domain are blocked by boundary
//! candidates on the `4 eps` sphere, so far experts never rank an inner
//! candidate.

mod kapproval;

pub use kapproval::kapproval_counterexample;

use std::f64::consts::PI;

use thiserror::Error;

use crate::geometry::{
    dedup_points, greedy_packing, grid_cover, ray_sphere_root, Domain, GeometryError, Norm, Point,
};
use crate::instance::{profile, Candidate, Expert, RankingProfile};
use crate::oracle::true_regret;
use crate::scalar::{Real, Scalar};
use crate::voting::VotingError;

/// Directions sampled on a circle in two dimensions.
pub const ANGULAR_DIRECTIONS: usize = 2048;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AdversaryError {
    #[error("adversary supports dimension 1 or 2, got {0}")]
    UnsupportedDimension(usize),
    #[error("domain diameter {diameter} is below 12 * epsilon = {needed}")]
    DomainTooSmall { diameter: f64, needed: f64 },
    #[error(
        "no part of the domain lies beyond 12 * epsilon from the center; nothing to shield against"
    )]
    NoFarRegion,
    #[error("construction placed {count} candidates, need fewer than m = {m}")]
    CountOverflow { count: usize, m: usize },
    #[error("invalid adversary parameters: {0}")]
    InvalidParameters(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Role of a candidate site in the construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SiteLabel {
    Center,
    Boundary,
    InteriorExpert,
    AnnulusExpert,
}

impl SiteLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            SiteLabel::Center => "center",
            SiteLabel::Boundary => "boundary",
            SiteLabel::InteriorExpert => "interior-expert",
            SiteLabel::AnnulusExpert => "annulus-expert",
        }
    }
}

/// Boundary candidates guarding one inner site.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryCover<S> {
    /// The guarded site, in original coordinates.
    pub origin: Point<S>,
    pub sphere_radius: S,
    pub cover_radius: S,
    /// Cover points on the sphere around `origin`, original coordinates.
    pub w_points: Vec<Point<S>>,
    pub lambdas: Vec<S>,
    /// `origin + lambda (w - origin)`, on the `4 eps` sphere about the center.
    pub sites: Vec<Point<S>>,
    /// Ids of the candidates at `origin`.
    pub guarded: Vec<usize>,
    /// Ids of the candidates placed at `sites`, `k` per site.
    pub guards: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdversarialInstance<S> {
    pub center: Point<S>,
    pub epsilon: S,
    pub k: usize,
    /// Candidate locations in original coordinates; `quality` holds `q1`.
    pub candidates: Vec<Candidate<S>>,
    pub q1: Vec<S>,
    pub q2: Vec<S>,
    pub labels: Vec<SiteLabel>,
    pub boundary_covers: Vec<BoundaryCover<S>>,
}

impl<S: Scalar> AdversarialInstance<S> {
    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    /// Candidates carrying the given quality vector.
    pub fn world(&self, q: &[S]) -> Vec<Candidate<S>> {
        self.candidates
            .iter()
            .zip(q)
            .map(|(c, &qj)| Candidate::new(c.id, c.location.clone(), qj))
            .collect()
    }
}

/// Size of the constructed `1/4`-cover of the unit ball, standing in for the
/// covering number in the deficiency threshold.
pub fn unit_ball_cover_size(dim: usize, norm: Norm) -> usize {
    let ball = Domain::new_ball(Point::<f64>::zeros(dim), 1.0).expect("unit ball is valid");
    grid_cover(&ball, norm, 0.25).len()
}

/// `m / (k (nb + 1)) - 1`: a packing ball with fewer experts than this is
/// deficient.
pub fn deficiency_threshold(m: usize, k: usize, nb_cover_size: usize) -> f64 {
    m as f64 / (k as f64 * (nb_cover_size as f64 + 1.0)) - 1.0
}

/// First point of a greedy `24 eps`-packing whose closed `12 eps` ball holds
/// fewer experts than the deficiency threshold.
pub fn find_deficient_ball<S: Scalar>(
    experts: &[Expert<S>],
    domain: &Domain<S>,
    norm: Norm,
    epsilon: S,
    m: usize,
    k: usize,
    nb_cover_size: usize,
) -> Result<Option<Point<S>>, AdversaryError> {
    if epsilon <= S::zero() || k == 0 {
        return Err(AdversaryError::InvalidParameters(format!(
            "epsilon={epsilon}, k={k}"
        )));
    }
    let twelve = S::from_count(12) * epsilon;
    let diameter = domain.diameter(norm);
    if diameter < twelve {
        return Err(AdversaryError::DomainTooSmall {
            diameter: diameter.to_f64_lossy(),
            needed: twelve.to_f64_lossy(),
        });
    }
    let threshold = deficiency_threshold(m, k, nb_cover_size);
    let packing = greedy_packing(domain, norm, twelve + twelve);
    Ok(packing.points.into_iter().find(|x| {
        let inside = experts
            .iter()
            .filter(|e| norm.dist(e.location.coords(), x.coords()) <= twelve + S::tolerance())
            .count();
        (inside as f64) < threshold
    }))
}

/// Unit-norm directions: `±1` on the line, an angular fan in the plane.
fn directions<S: Real>(dim: usize, norm: Norm) -> Vec<Point<S>> {
    match dim {
        1 => vec![Point::new(vec![S::one()]), Point::new(vec![-S::one()])],
        _ => (0..ANGULAR_DIRECTIONS)
            .map(|t| {
                let theta = 2.0 * PI * t as f64 / ANGULAR_DIRECTIONS as f64;
                let raw = [
                    S::from_f64_lossy(theta.cos()),
                    S::from_f64_lossy(theta.sin()),
                ];
                let len = norm.magnitude(&raw);
                Point::new(vec![raw[0] / len, raw[1] / len])
            })
            .collect(),
    }
}

/// Points `origin + r u` for directions `u` whose ray from `origin` reaches
/// beyond `far` (in norm about `0`) before leaving `domain`, thinned greedily
/// so that every admissible point is within `cover_radius` of a chosen one.
/// In the plane the greedy radius is reduced by the largest gap between
/// neighboring samples so the bound also holds between samples.
fn boundary_cover<S: Real>(
    domain: &Domain<S>,
    norm: Norm,
    origin: &Point<S>,
    r: S,
    cover_radius: S,
    far: S,
) -> Vec<Point<S>> {
    let dirs = directions::<S>(domain.dim(), norm);
    let ring: Vec<Point<S>> = dirs.iter().map(|u| origin.offset(u, r)).collect();
    let gap = if dirs.len() > 2 {
        (0..ring.len())
            .map(|t| norm.dist(ring[t].coords(), ring[(t + 1) % ring.len()].coords()))
            .fold(S::zero(), S::max_of)
    } else {
        S::zero()
    };
    let admissible: Vec<Point<S>> = dirs
        .iter()
        .zip(&ring)
        .filter(|(u, _)| {
            let exit = domain.ray_exit(origin, u, norm);
            norm.magnitude(origin.offset(u, exit).coords()) > far
        })
        .map(|(_, p)| p.clone())
        .collect();
    let reach = cover_radius - gap;
    let mut covered = vec![false; admissible.len()];
    let mut chosen = Vec::new();
    for i in 0..admissible.len() {
        if covered[i] {
            continue;
        }
        chosen.push(admissible[i].clone());
        for j in i..admissible.len() {
            if norm.dist(admissible[i].coords(), admissible[j].coords()) <= reach {
                covered[j] = true;
            }
        }
    }
    chosen
}

/// Runs the four-step construction around `center`.
pub fn build_adversarial<S: Real>(
    experts: &[Expert<S>],
    domain: &Domain<S>,
    norm: Norm,
    epsilon: S,
    m: usize,
    k: usize,
    center: &Point<S>,
) -> Result<AdversarialInstance<S>, AdversaryError> {
    let dim = domain.dim();
    if dim == 0 || dim > 2 {
        return Err(AdversaryError::UnsupportedDimension(dim));
    }
    if epsilon <= S::zero() || k == 0 {
        return Err(AdversaryError::InvalidParameters(format!(
            "epsilon={epsilon}, k={k}"
        )));
    }
    let two = S::from_count(2) * epsilon;
    let four = S::from_count(4) * epsilon;
    let twelve = S::from_count(12) * epsilon;
    let delta = S::from_f64_lossy(1e-6) * epsilon;
    let half = S::half();
    let local = domain.recentered(center);
    let zero = Point::zeros(dim);

    let mut sites: Vec<(Point<S>, S, S, SiteLabel)> =
        vec![(zero.clone(), two, S::zero(), SiteLabel::Center)];
    // (index of guarded site, sphere radius, cover radius, w points, lambdas, guard sites)
    let mut covers = Vec::new();

    let w0 = boundary_cover(&local, norm, &zero, four, two - delta, twelve);
    if w0.is_empty() {
        return Err(AdversaryError::NoFarRegion);
    }
    let lambdas0 = vec![S::one(); w0.len()];
    covers.push((0usize, four, two - delta, w0.clone(), lambdas0, w0.clone()));
    for w in &w0 {
        sites.push((w.clone(), S::zero(), two, SiteLabel::Boundary));
    }

    let rel: Vec<Point<S>> = dedup_points(experts.iter().map(|e| e.location.sub(center)).collect());
    for e in rel.iter() {
        let r = norm.magnitude(e.coords());
        if r == S::zero() || r >= four {
            continue;
        }
        let site = sites.len();
        sites.push((
            e.clone(),
            two - half * r,
            half * r,
            SiteLabel::InteriorExpert,
        ));
        let sphere = four - r;
        let cover_radius = half * sphere - delta;
        let w = boundary_cover(&local, norm, e, sphere, cover_radius, twelve);
        let mut lambdas = Vec::with_capacity(w.len());
        let mut guards = Vec::with_capacity(w.len());
        for wp in &w {
            let root = ray_sphere_root(e, wp, four, norm)?;
            lambdas.push(root.lambda);
            guards.push(root.point.clone());
            sites.push((root.point, S::zero(), two, SiteLabel::Boundary));
        }
        covers.push((site, sphere, cover_radius, w, lambdas, guards));
    }
    for e in rel.iter() {
        let r = norm.magnitude(e.coords());
        if r >= four && r <= twelve {
            sites.push((e.clone(), S::zero(), two, SiteLabel::AnnulusExpert));
        }
    }

    let count = sites.len() * k;
    if count >= m {
        return Err(AdversaryError::CountOverflow { count, m });
    }

    let mut candidates = Vec::with_capacity(count);
    let (mut q1, mut q2, mut labels) = (Vec::new(), Vec::new(), Vec::new());
    let mut site_ids: Vec<Vec<usize>> = Vec::with_capacity(sites.len());
    for (loc, a, b, label) in &sites {
        let mut ids = Vec::with_capacity(k);
        for _ in 0..k {
            let id = candidates.len();
            candidates.push(Candidate::new(id, loc.add(center), *a));
            q1.push(*a);
            q2.push(*b);
            labels.push(*label);
            ids.push(id);
        }
        site_ids.push(ids);
    }
    // Guard sites are pushed right after the site they guard.
    let boundary_covers = covers
        .into_iter()
        .map(|(site, sphere_radius, cover_radius, w, lambdas, guards)| {
            let guard_ids = (site + 1..site + 1 + guards.len())
                .flat_map(|s| site_ids[s].iter().copied())
                .collect();
            BoundaryCover {
                origin: sites[site].0.add(center),
                sphere_radius,
                cover_radius,
                w_points: w.iter().map(|p| p.add(center)).collect(),
                lambdas,
                sites: guards.iter().map(|p| p.add(center)).collect(),
                guarded: site_ids[site].clone(),
                guards: guard_ids,
            }
        })
        .collect();

    Ok(AdversarialInstance {
        center: center.clone(),
        epsilon,
        k,
        candidates,
        q1,
        q2,
        labels,
        boundary_covers,
    })
}

/// Whether the committee ranks identically under both quality vectors, with
/// the first expert whose ranking differs.
#[derive(Clone, Debug, PartialEq)]
pub struct Indistinguishability {
    pub identical: bool,
    pub witness: Option<usize>,
}

pub fn verify_indistinguishable<S: Scalar>(
    adv: &AdversarialInstance<S>,
    experts: &[Expert<S>],
    k: usize,
    norm: Norm,
) -> Indistinguishability {
    let p1 = profile(&adv.world(&adv.q1), experts, k, norm);
    let p2 = profile(&adv.world(&adv.q2), experts, k, norm);
    let witness = p1
        .rankings
        .iter()
        .zip(&p2.rankings)
        .position(|(a, b)| a.ranked != b.ranked);
    Indistinguishability {
        identical: witness.is_none(),
        witness,
    }
}

/// Largest of the two regrets of one candidate.
pub fn worst_world_regret<S: Scalar>(adv: &AdversarialInstance<S>, chosen: usize) -> S {
    true_regret(&adv.q1, chosen).max_of(true_regret(&adv.q2, chosen))
}

/// Runs `rule` once on quality-blind candidates with the shared profile and
/// returns the chosen candidate and its worse regret over the two worlds.
pub fn verify_regret_gap<S, F>(
    adv: &AdversarialInstance<S>,
    experts: &[Expert<S>],
    k: usize,
    norm: Norm,
    rule: F,
) -> Result<(usize, S), VotingError>
where
    S: Scalar,
    F: Fn(&[Candidate<S>], &[Expert<S>], &RankingProfile, Norm) -> Result<usize, VotingError>,
{
    let prof = profile(&adv.world(&adv.q1), experts, k, norm);
    let blind = adv.world(&vec![S::zero(); adv.len()]);
    let chosen = rule(&blind, experts, &prof, norm)?;
    Ok((chosen, worst_world_regret(adv, chosen)))
}

/// Smallest worst-world regret over every candidate: what any deterministic
/// rule is forced to pay.
pub fn regret_floor<S: Scalar>(adv: &AdversarialInstance<S>) -> S {
    (0..adv.len())
        .map(|j| worst_world_regret(adv, j))
        .reduce(S::min_of)
        .unwrap_or(S::zero())
}

/// The strict inequalities that keep every expert within `12 eps` voting for
/// the candidates at its own location, checked on every pair of sites.
pub fn check_self_vote_inequalities<S: Scalar>(adv: &AdversarialInstance<S>, norm: Norm) -> bool {
    let eps = adv.epsilon;
    let two = S::from_count(2) * eps;
    let twelve = S::from_count(12) * eps;
    let half = S::half();
    let rel = |j: usize| adv.candidates[j].location.sub(&adv.center);
    let mut inner = Vec::new();
    let mut outer = Vec::new();
    for j in (0..adv.len()).step_by(adv.k.max(1)) {
        match adv.labels[j] {
            SiteLabel::Center | SiteLabel::InteriorExpert => inner.push(rel(j)),
            SiteLabel::Boundary | SiteLabel::AnnulusExpert => outer.push(rel(j)),
        }
    }
    let n = |p: &Point<S>| norm.magnitude(p.coords());
    let d = |a: &Point<S>, b: &Point<S>| norm.dist(a.coords(), b.coords());
    let inner_vs_outer = inner.iter().all(|x| {
        outer.iter().all(|y| {
            let nx = n(x);
            let dxy = d(x, y);
            let inner_keeps_own = two - half * nx > -dxy && half * nx > two - dxy;
            let outer_keeps_own =
                n(y) > twelve || (S::zero() > two - half * nx - dxy && two > half * nx - dxy);
            inner_keeps_own && outer_keeps_own
        })
    });
    let inner_pairs = inner.iter().enumerate().all(|(a, x)| {
        inner.iter().enumerate().all(|(b, xp)| {
            a == b || {
                let dd = d(x, xp);
                half * n(x) > half * n(xp) - dd && two - half * n(x) > two - half * n(xp) - dd
            }
        })
    });
    inner_vs_outer && inner_pairs
}

/// For every far sample point `y` and every guarded site, some guard
/// candidate looks strictly better than the guarded one from `y` in both
/// worlds.
pub fn check_shielding<S: Scalar>(
    adv: &AdversarialInstance<S>,
    domain: &Domain<S>,
    norm: Norm,
    samples: usize,
) -> bool {
    let twelve = S::from_count(12) * adv.epsilon;
    let far: Vec<Point<S>> = domain
        .sample_grid(norm, samples)
        .into_iter()
        .filter(|y| norm.dist(y.coords(), adv.center.coords()) > twelve)
        .collect();
    far.iter().all(|y| {
        adv.boundary_covers.iter().all(|bc| {
            let x = bc.guarded[0];
            let dx = norm.dist(y.coords(), adv.candidates[x].location.coords());
            bc.guards.iter().any(|&g| {
                let dg = norm.dist(y.coords(), adv.candidates[g].location.coords());
                adv.q1[g] - dg > adv.q1[x] - dx && adv.q2[g] - dg > adv.q2[x] - dx
            })
        })
    })
}

/// Dense-sampling check that `bc.w_points` covers the admissible part of the
/// sphere around `bc.origin` within `bc.cover_radius`.
pub fn check_boundary_cover<S: Real>(
    bc: &BoundaryCover<S>,
    domain: &Domain<S>,
    norm: Norm,
    center: &Point<S>,
    far: S,
    directions_sampled: usize,
) -> bool {
    let local = domain.recentered(center);
    let origin = bc.origin.sub(center);
    let w: Vec<Point<S>> = bc.w_points.iter().map(|p| p.sub(center)).collect();
    let dirs: Vec<Point<S>> = if domain.dim() == 1 {
        directions(1, norm)
    } else {
        (0..directions_sampled)
            .map(|t| {
                let theta = 2.0 * PI * (t as f64 + 0.5) / directions_sampled as f64;
                let raw = [
                    S::from_f64_lossy(theta.cos()),
                    S::from_f64_lossy(theta.sin()),
                ];
                let len = norm.magnitude(&raw);
                Point::new(vec![raw[0] / len, raw[1] / len])
            })
            .collect()
    };
    dirs.iter().all(|u| {
        let exit = local.ray_exit(&origin, u, norm);
        if norm.magnitude(origin.offset(u, exit).coords()) <= far {
            return true;
        }
        let p = origin.offset(u, bc.sphere_radius);
        w.iter().any(|c| {
            norm.dist(p.coords(), c.coords()) <= bc.cover_radius + S::from_f64_lossy(1e-12)
        })
    })
}
