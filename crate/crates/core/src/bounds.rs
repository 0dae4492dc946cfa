//! Explicit-constant evaluation of the volume and committee-size windows.

use std::f64::consts::{E, PI};

use statrs::function::gamma::ln_gamma;
use thiserror::Error;

use crate::geometry::Norm;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("invalid bounds parameter: {0}")]
    InvalidParameter(String),
}

/// Largest epsilon for which the hypercube window is claimed.
pub const HYPERCUBE_EPSILON_LIMIT: f64 = 1.0 / 48.0;

/// `(lo, hi)` with `lo < Gamma(x) < hi` for `x > 0`.
pub fn gamma_sandwich(x: f64) -> Result<(f64, f64), BoundsError> {
    if !(x.is_finite() && x > 0.0) {
        return Err(BoundsError::InvalidParameter(format!("gamma argument {x}")));
    }
    let lo = (2.0 * PI / x).sqrt() * (x / E).powf(x);
    Ok((lo, lo * (1.0 / (12.0 * x)).exp()))
}

/// Lebesgue volume of the unit ball of `norm` in `R^d`.
pub fn unit_ball_volume(d: usize, norm: Norm) -> Result<f64, BoundsError> {
    if d == 0 {
        return Err(BoundsError::InvalidParameter("dimension 0".into()));
    }
    match norm {
        Norm::LInfinity => Ok(2f64.powi(d as i32)),
        Norm::Lp(p) if p >= 1.0 && p.is_finite() => {
            let d = d as f64;
            Ok((d * (2f64.ln() + ln_gamma(1.0 / p + 1.0)) - ln_gamma(d / p + 1.0)).exp())
        }
        Norm::Lp(p) => Err(BoundsError::InvalidParameter(format!("exponent {p}"))),
    }
}

fn d_over_p(d: usize, norm: Norm) -> f64 {
    match norm {
        Norm::LInfinity => 0.0,
        Norm::Lp(p) => d as f64 / p,
    }
}

fn check_eps(epsilon: f64) -> Result<(), BoundsError> {
    if epsilon > 0.0 && epsilon.is_finite() {
        Ok(())
    } else {
        Err(BoundsError::InvalidParameter(format!("epsilon {epsilon}")))
    }
}

/// Covering-number window `((1/eps)^d, (3/eps)^d) * vol / vol(B)`, valid when
/// the domain contains an `eps`-ball.
pub fn covering_volume_window(
    vol_theta: f64,
    d: usize,
    norm: Norm,
    epsilon: f64,
) -> Result<(f64, f64), BoundsError> {
    check_eps(epsilon)?;
    let ratio = vol_theta / unit_ball_volume(d, norm)?;
    let d = d as i32;
    Ok((
        (1.0 / epsilon).powi(d) * ratio,
        (3.0 / epsilon).powi(d) * ratio,
    ))
}

/// Lower and upper committee-size expressions with their printed constants.
/// The lower value may be negative when `m` is small; such rows are flagged
/// by [`bounds_report`].
pub fn committee_size_window(
    vol_theta: f64,
    d: usize,
    norm: Norm,
    epsilon: f64,
    m: usize,
    k: usize,
) -> Result<(f64, f64), BoundsError> {
    check_eps(epsilon)?;
    if m < 2 || k == 0 || k > m {
        return Err(BoundsError::InvalidParameter(format!("m={m}, k={k}")));
    }
    let ratio = vol_theta / unit_ball_volume(d, norm)?;
    let di = d as i32;
    let (m, k) = (m as f64, k as f64);
    let nb = 12f64.powi(di);
    let lower = (1.0 / (24.0 * epsilon)).powi(di) * ratio * (m / (k * (nb + 1.0)) - 1.0);
    let upper = (8.0 * (m - 1.0) / k + 1.0) * (6.0 / epsilon).powi(di) * ratio;
    Ok((lower, upper))
}

/// Window for `1 / vol(B)` from the Gamma sandwiches.
pub fn inverse_volume_window(d: usize, norm: Norm) -> Result<(f64, f64), BoundsError> {
    if d == 0 {
        return Err(BoundsError::InvalidParameter("dimension 0".into()));
    }
    let dp = d_over_p(d, norm);
    let di = d as i32;
    let common = (2.0 * PI * (dp + 1.0)).sqrt() * (d as f64).powf(dp);
    let lo = common / E * (1.0 / (4.0 * (1.0f64 / 12.0).exp() * PI.sqrt())).powi(di);
    let hi = common * (1.0f64 / 12.0).exp() * (E / (2.0 * (2.0 * PI).sqrt())).powi(di);
    Ok((lo, hi))
}

/// Committee-size window on the unit hypercube with constants as printed.
pub fn hypercube_window(
    d: usize,
    norm: Norm,
    epsilon: f64,
    m: usize,
) -> Result<(f64, f64), BoundsError> {
    check_eps(epsilon)?;
    if d == 0 {
        return Err(BoundsError::InvalidParameter("dimension 0".into()));
    }
    let dp = d_over_p(d, norm);
    let di = d as i32;
    let tail = (d as f64).powf(dp) * (dp + 1.0).sqrt();
    let m = m as f64;
    let lower = m * (1.0 / (1152.0 * (1.0f64 / 12.0).exp() * epsilon * PI.sqrt())).powi(di) * tail;
    let upper = m * (3.0 * E / (epsilon * (2.0 * PI).sqrt())).powi(di) * tail;
    Ok((lower, upper))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundsReport {
    pub d: usize,
    pub norm: Norm,
    pub epsilon: f64,
    pub m: usize,
    pub k: usize,
    pub vol_theta: f64,
    pub vol_ball_inv_window: (f64, f64),
    pub cover_window: (f64, f64),
    pub committee_window: (f64, f64),
    pub hypercube_window: (f64, f64),
    /// Set when `epsilon >= 1/48` or `m < 12^d + 1`.
    pub out_of_range: bool,
}

impl BoundsReport {
    pub const CSV_HEADER: &'static str = "d,p,epsilon,m,k,vol_theta,vol_ball_inv_lo,vol_ball_inv_hi,cover_lo,cover_hi,committee_lower,committee_upper,hypercube_lower,hypercube_upper,out_of_range";

    pub fn csv_row(&self) -> String {
        let p = match self.norm {
            Norm::LInfinity => "inf".to_string(),
            Norm::Lp(p) => p.to_string(),
        };
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.d,
            p,
            self.epsilon,
            self.m,
            self.k,
            self.vol_theta,
            self.vol_ball_inv_window.0,
            self.vol_ball_inv_window.1,
            self.cover_window.0,
            self.cover_window.1,
            self.committee_window.0,
            self.committee_window.1,
            self.hypercube_window.0,
            self.hypercube_window.1,
            self.out_of_range
        )
    }
}

/// All windows for the unit hypercube `[0, 1]^d`.
pub fn bounds_report(
    d: usize,
    norm: Norm,
    epsilon: f64,
    m: usize,
    k: usize,
) -> Result<BoundsReport, BoundsError> {
    let vol_theta = 1.0;
    Ok(BoundsReport {
        d,
        norm,
        epsilon,
        m,
        k,
        vol_theta,
        vol_ball_inv_window: inverse_volume_window(d, norm)?,
        cover_window: covering_volume_window(vol_theta, d, norm, epsilon)?,
        committee_window: committee_size_window(vol_theta, d, norm, epsilon, m, k)?,
        hypercube_window: hypercube_window(d, norm, epsilon, m)?,
        out_of_range: epsilon >= HYPERCUBE_EPSILON_LIMIT || (m as f64) < 12f64.powi(d as i32) + 1.0,
    })
}
