//! Universal expert committees for metric voting: committee construction,
//! regret-minimizing rules over top-k rankings, duality certificates,
//! lower-bound adversaries and explicit size windows.

pub mod adversary;
pub mod bounds;
pub mod committee;
pub mod experiment;
pub mod geometry;
pub mod instance;
pub mod io;
pub mod oracle;
pub mod scalar;
pub mod voting;

use num_rational::Rational64;
use thiserror::Error;

pub use scalar::{ExtReal, Real, Scalar};

pub type Point64 = geometry::Point<f64>;
pub type Point32 = geometry::Point<f32>;
pub type PointQ = geometry::Point<Rational64>;
pub type Domain64 = geometry::Domain<f64>;
pub type Candidate64 = instance::Candidate<f64>;
pub type CandidateQ = instance::Candidate<Rational64>;
pub type Expert64 = instance::Expert<f64>;
pub type ExpertQ = instance::Expert<Rational64>;
pub type Instance64 = instance::Instance<f64>;
pub type Committee64 = committee::CommitteeBlueprint<f64>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Geometry(#[from] geometry::GeometryError),
    #[error(transparent)]
    Committee(#[from] committee::CommitteeError),
    #[error(transparent)]
    Voting(#[from] voting::VotingError),
    #[error(transparent)]
    Oracle(#[from] oracle::OracleError),
    #[error(transparent)]
    Adversary(#[from] adversary::AdversaryError),
    #[error(transparent)]
    Bounds(#[from] bounds::BoundsError),
    #[error(transparent)]
    Io(#[from] io::IoError),
    #[error("invalid configuration: {0}")]
    Config(String),
}
