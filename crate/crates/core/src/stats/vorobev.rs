use serde::Serialize;

use super::{check_level, quantile_at_rank, quantile_front, quantile_rank, FrontEnsemble};
use crate::error::{invalid, Result};
use crate::numeric::compensated_mean;
use crate::ops::{hypervolume_distance, hypervolume_of_front};
use crate::polar::GridFront;

/// Vorob'ev alpha-quantile: the boundary of the set of points dominated with
/// probability at least alpha, i.e. the `(1 - alpha)`-quantile front.
pub fn vorobev_quantile_front(e: &FrontEnsemble, alpha: f64) -> Result<GridFront> {
    check_level(alpha)?;
    quantile_front(e, 1.0 - alpha)
}

/// Outcome of the Vorob'ev mean bisection.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VorobevMean {
    pub front: GridFront,
    pub alpha_star: f64,
    /// `(lo, hi)` with `HV(Q_lo) >= target >= HV(Q_hi)`, strict on the right
    /// unless every level reaches the target.
    pub bracket: (f64, f64),
    /// Expected hypervolume of the random front.
    pub target_hv: f64,
    pub front_hv: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Bisection for the Vorob'ev mean: the largest level alpha whose Vorob'ev
/// quantile still has hypervolume at least the expected hypervolume.
///
/// Stops when the hypervolume at the lower bracket end is within `hv_tol`
/// (relative) of the target, or when the bracket ends fall on adjacent
/// order-statistic ranks. Otherwise returns the best bracket after
/// `max_iters` steps with `converged = false`.
pub fn vorobev_mean_front(e: &FrontEnsemble, hv_tol: f64, max_iters: usize) -> Result<VorobevMean> {
    if !(hv_tol.is_finite() && hv_tol >= 0.0) {
        return invalid(format!(
            "hv_tol must be finite and non-negative, got {hv_tol}"
        ));
    }
    let n = e.n_samples();
    let target = compensated_mean(e.rows().map(|r| hypervolume_of_front(&r)));
    let rank = |alpha: f64| quantile_rank(1.0 - alpha, n);
    let hv = |alpha: f64| hypervolume_of_front(&quantile_at_rank(e, rank(alpha)));
    let within = |h: f64| (h - target).abs() <= hv_tol * target.abs();

    let half = 0.5 / n as f64;
    let (mut lo, mut hi) = (half, 1.0 - half);
    let (mut h_lo, h_hi) = (hv(lo), hv(hi));
    let finish = |lo: f64, hi: f64, h_lo: f64, converged: bool, iterations: usize| VorobevMean {
        front: quantile_at_rank(e, rank(lo)),
        alpha_star: lo,
        bracket: (lo, hi),
        target_hv: target,
        front_hv: h_lo,
        converged,
        iterations,
    };
    if h_hi >= target {
        // Every level reaches the target; the smallest quantile front suffices.
        return Ok(finish(hi, hi, h_hi, true, 0));
    }
    for it in 0..max_iters {
        if within(h_lo) || rank(lo) <= rank(hi) + 1 {
            return Ok(finish(lo, hi, h_lo, true, it));
        }
        let mid = 0.5 * (lo + hi);
        let h_mid = hv(mid);
        if h_mid >= target {
            lo = mid;
            h_lo = h_mid;
        } else {
            hi = mid;
        }
    }
    let done = within(h_lo) || rank(lo) <= rank(hi) + 1;
    Ok(finish(lo, hi, h_lo, done, max_iters))
}

/// Expected hypervolume of the symmetric difference between `a` and a
/// sampled front.
pub fn vorobev_deviation(e: &FrontEnsemble, a: &GridFront) -> Result<f64> {
    e.check_compatible(a)?;
    let d: Result<Vec<f64>> = e.rows().map(|r| hypervolume_distance(a, &r)).collect();
    Ok(compensated_mean(d?))
}
