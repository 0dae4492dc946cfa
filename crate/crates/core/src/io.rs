//! JSON shapes for instances and committees (f64 only).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::committee::CommitteeBlueprint;
use crate::geometry::{Domain, GeometryError, Norm, Point};
use crate::instance::{Candidate, Expert, Instance};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid document: {0}")]
    Invalid(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Exponent {
    Finite(f64),
    Named(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormDoc {
    pub p: Exponent,
}

impl NormDoc {
    pub fn from_norm(norm: Norm) -> Self {
        match norm {
            Norm::LInfinity => NormDoc {
                p: Exponent::Named("inf".into()),
            },
            Norm::Lp(p) => NormDoc {
                p: Exponent::Finite(p),
            },
        }
    }

    pub fn to_norm(&self) -> Result<Norm, IoError> {
        match &self.p {
            Exponent::Finite(p) => Ok(Norm::lp(*p)?),
            Exponent::Named(s) if s.eq_ignore_ascii_case("inf") => Ok(Norm::LInfinity),
            Exponent::Named(s) => Err(IoError::Invalid(format!("norm exponent {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainDoc {
    Box { low: Vec<f64>, high: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
}

impl DomainDoc {
    pub fn from_domain(domain: &Domain<f64>) -> Self {
        match domain {
            Domain::Box { low, high } => DomainDoc::Box {
                low: low.to_f64_vec(),
                high: high.to_f64_vec(),
            },
            Domain::Ball { center, radius } => DomainDoc::Ball {
                center: center.to_f64_vec(),
                radius: *radius,
            },
        }
    }

    pub fn to_domain(&self) -> Result<Domain<f64>, IoError> {
        Ok(match self {
            DomainDoc::Box { low, high } => {
                Domain::new_box(Point::try_new(low.clone())?, Point::try_new(high.clone())?)?
            }
            DomainDoc::Ball { center, radius } => {
                Domain::new_ball(Point::try_new(center.clone())?, *radius)?
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateDoc {
    pub loc: Vec<f64>,
    pub q: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceDoc {
    pub dim: usize,
    pub norm: NormDoc,
    pub domain: DomainDoc,
    pub k: usize,
    pub candidates: Vec<CandidateDoc>,
    pub experts: Vec<Vec<f64>>,
}

fn point(coords: &[f64], dim: usize) -> Result<Point<f64>, IoError> {
    if coords.len() != dim {
        return Err(IoError::Invalid(format!(
            "point {coords:?} is not {dim}-dimensional"
        )));
    }
    Ok(Point::try_new(coords.to_vec())?)
}

impl InstanceDoc {
    pub fn from_instance(inst: &Instance<f64>) -> Self {
        InstanceDoc {
            dim: inst.domain.dim(),
            norm: NormDoc::from_norm(inst.norm),
            domain: DomainDoc::from_domain(&inst.domain),
            k: inst.k,
            candidates: inst
                .candidates
                .iter()
                .map(|c| CandidateDoc {
                    loc: c.location.to_f64_vec(),
                    q: c.quality,
                })
                .collect(),
            experts: inst
                .experts
                .iter()
                .map(|e| e.location.to_f64_vec())
                .collect(),
        }
    }

    pub fn to_instance(&self) -> Result<Instance<f64>, IoError> {
        let domain = self.domain.to_domain()?;
        if domain.dim() != self.dim {
            return Err(IoError::Invalid(format!(
                "domain dimension {} != {}",
                domain.dim(),
                self.dim
            )));
        }
        if self.k == 0 {
            return Err(IoError::Invalid("k must be positive".into()));
        }
        let candidates = self
            .candidates
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if !c.q.is_finite() {
                    return Err(IoError::Invalid(format!("candidate {i} quality {}", c.q)));
                }
                Ok(Candidate::new(i, point(&c.loc, self.dim)?, c.q))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let experts = self
            .experts
            .iter()
            .enumerate()
            .map(|(i, e)| Ok(Expert::new(i, point(e, self.dim)?)))
            .collect::<Result<Vec<_>, IoError>>()?;
        Ok(Instance {
            domain,
            norm: self.norm.to_norm()?,
            k: self.k,
            candidates,
            experts,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommitteeDoc {
    pub experts: Vec<Vec<f64>>,
    #[serde(default)]
    pub cover: Vec<Vec<f64>>,
    #[serde(default)]
    pub tree: Vec<(usize, usize)>,
    #[serde(default)]
    pub n_e: usize,
}

impl CommitteeDoc {
    pub fn from_blueprint(bp: &CommitteeBlueprint<f64>) -> Self {
        CommitteeDoc {
            experts: bp.experts.iter().map(|e| e.location.to_f64_vec()).collect(),
            cover: bp.cover.points.iter().map(|p| p.to_f64_vec()).collect(),
            tree: bp.tree_edges.clone(),
            n_e: bp.subdivisions_per_edge,
        }
    }

    pub fn experts(&self, dim: usize) -> Result<Vec<Expert<f64>>, IoError> {
        self.experts
            .iter()
            .enumerate()
            .map(|(i, e)| Ok(Expert::new(i, point(e, dim)?)))
            .collect()
    }
}

pub fn parse_instance(text: &str) -> Result<Instance<f64>, IoError> {
    serde_json::from_str::<InstanceDoc>(text)?.to_instance()
}

pub fn parse_committee(text: &str) -> Result<CommitteeDoc, IoError> {
    Ok(serde_json::from_str(text)?)
}
