use crate::geometry::{Norm, Point};
use crate::instance::{approval_ballot, candidates_from, Candidate, Expert};
use crate::scalar::Scalar;

/// Candidates on `[0, 1]` for which unranked approval ballots of size `k`
/// cannot separate two quality vectors, while any `ell` winners lose at
/// least `1/2` in one of them.
#[derive(Clone, Debug, PartialEq)]
pub struct KApprovalCounterexample<S> {
    pub k: usize,
    pub ell: usize,
    pub locations: Vec<Point<S>>,
    pub q1: Vec<S>,
    pub q2: Vec<S>,
}

impl<S: Scalar> KApprovalCounterexample<S> {
    pub fn world(&self, q: &[S]) -> Vec<Candidate<S>> {
        candidates_from(self.locations.clone(), q)
    }

    /// Approval ballot of an expert at `x` under each world.
    pub fn ballots_at(&self, x: S) -> (Vec<usize>, Vec<usize>) {
        let e = Expert::new(0, Point::new(vec![x]));
        let b1 = approval_ballot(&e, &self.world(&self.q1), self.k, Norm::L1);
        let b2 = approval_ballot(&e, &self.world(&self.q2), self.k, Norm::L1);
        (b1.into_iter().collect(), b2.into_iter().collect())
    }
}

/// Layout: one candidate at `0`, one at `1`, a block at `1/2`, and `ell - 2`
/// dominant candidates (quality 10 in both worlds) also at `1/2`. World one
/// gives the two ends quality `1/2` and the block `0`; world two swaps them.
pub fn kapproval_counterexample<S: Scalar>(
    k: usize,
    ell: usize,
) -> Option<KApprovalCounterexample<S>> {
    if k < 2 || ell == 0 || ell > k {
        return None;
    }
    let half = S::half();
    let block = if ell == 1 { k - 1 } else { k - ell + 1 };
    let mut locations = vec![Point::new(vec![S::zero()]), Point::new(vec![S::one()])];
    let mut q1 = vec![half, half];
    let mut q2 = vec![S::zero(), S::zero()];
    for _ in 0..block {
        locations.push(Point::new(vec![half]));
        q1.push(S::zero());
        q2.push(half);
    }
    let ten = S::from_count(10);
    for _ in 0..ell.saturating_sub(2) {
        locations.push(Point::new(vec![half]));
        q1.push(ten);
        q2.push(ten);
    }
    Some(KApprovalCounterexample {
        k,
        ell,
        locations,
        q1,
        q2,
    })
}
