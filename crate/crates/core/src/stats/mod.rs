//! Statistics of random fronts represented as ensembles of length fields:
//! location, spread, quantiles, coverage probabilities and Vorob'ev
//! statistics.

mod ensemble;
mod vorobev;

use ndarray::Array2;
use rand::Rng;
use rand_distr::Exp1;

pub use ensemble::{ensemble_from_objective_table, FrontEnsemble, LengthsAt, ObjectiveTable};
pub use vorobev::{vorobev_deviation, vorobev_mean_front, vorobev_quantile_front, VorobevMean};

use crate::error::{invalid, Error, Result};
use crate::numeric::{compensated_mean, compensated_sum, rng_from_seed};
use crate::ops::ScoringSpec;
use crate::polar::{check_truncated, to_polar, GridFront, BOUNDARY_TOL};

/// Per-direction sample mean of the lengths.
pub fn mean_front(e: &FrontEnsemble) -> GridFront {
    let lengths = (0..e.n_directions())
        .map(|k| compensated_mean(e.column(k).iter().copied()))
        .collect();
    e.front_with(lengths)
}

/// Bayesian bootstrap: each round averages the rows with Dirichlet(1, .., 1)
/// weights built from normalised standard exponentials.
pub fn bayesian_bootstrap_front(
    e: &FrontEnsemble,
    rounds: usize,
    seed: u64,
) -> Result<Vec<GridFront>> {
    if rounds == 0 {
        return invalid("bootstrap needs at least one round");
    }
    let mut rng = rng_from_seed(seed);
    let n = e.n_samples();
    Ok((0..rounds)
        .map(|_| {
            let raw: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
            let total = compensated_sum(raw.iter().copied());
            let w: Vec<f64> = raw.iter().map(|x| x / total).collect();
            weighted_front(e, &w)
        })
        .collect())
}

/// Per-direction weighted average of the rows.
pub fn weighted_front(e: &FrontEnsemble, weights: &[f64]) -> GridFront {
    let lengths = (0..e.n_directions())
        .map(|k| compensated_sum(e.column(k).iter().zip(weights).map(|(l, w)| l * w)))
        .collect();
    e.front_with(lengths)
}

fn require_two(e: &FrontEnsemble) -> Result<()> {
    if e.n_samples() < 2 {
        return Err(Error::InsufficientData(format!(
            "need at least two samples for second moments, got {}",
            e.n_samples()
        )));
    }
    Ok(())
}

fn check_index(e: &FrontEnsemble, k: usize) -> Result<()> {
    if k >= e.n_directions() {
        return invalid(format!(
            "direction index {k} out of range for {} directions",
            e.n_directions()
        ));
    }
    Ok(())
}

/// Unbiased sample covariance between the lengths along grid directions `i`
/// and `j`.
pub fn length_covariance(e: &FrontEnsemble, i: usize, j: usize) -> Result<f64> {
    require_two(e)?;
    check_index(e, i)?;
    check_index(e, j)?;
    let (ci, cj) = (e.column(i), e.column(j));
    let (mi, mj) = (
        compensated_mean(ci.iter().copied()),
        compensated_mean(cj.iter().copied()),
    );
    let s = compensated_sum(ci.iter().zip(cj.iter()).map(|(a, b)| (a - mi) * (b - mj)));
    Ok(s / (e.n_samples() - 1) as f64)
}

/// Covariance between the boundary points along directions `i` and `j`:
/// `lambda_i lambda_j^T` times the scalar length covariance.
pub fn covariance_matrix_pair(e: &FrontEnsemble, i: usize, j: usize) -> Result<Array2<f64>> {
    let c = length_covariance(e, i, j)?;
    let (li, lj) = (e.grid().get(i).components(), e.grid().get(j).components());
    Ok(Array2::from_shape_fn((li.len(), lj.len()), |(a, b)| {
        li[a] * lj[b] * c
    }))
}

/// Per-direction sample standard deviation (N - 1 denominator).
fn column_std(e: &FrontEnsemble, k: usize) -> f64 {
    let col = e.column(k);
    let m = compensated_mean(col.iter().copied());
    (compensated_sum(col.iter().map(|x| (x - m) * (x - m))) / (e.n_samples() - 1) as f64).sqrt()
}

/// Upper and lower deviation surfaces `(mu +- beta sigma)_+`. These are polar
/// surfaces but need not be Pareto front surfaces.
pub fn deviation_surfaces(e: &FrontEnsemble, beta: f64) -> Result<(GridFront, GridFront)> {
    require_two(e)?;
    if !(beta.is_finite() && beta >= 0.0) {
        return invalid(format!("beta must be finite and non-negative, got {beta}"));
    }
    let mean = mean_front(e);
    let (mut up, mut lo) = (
        Vec::with_capacity(e.n_directions()),
        Vec::with_capacity(e.n_directions()),
    );
    for (k, mu) in mean.lengths().iter().enumerate() {
        let sd = column_std(e, k);
        up.push((mu + beta * sd).max(0.0));
        lo.push((mu - beta * sd).max(0.0));
    }
    Ok((e.front_with(up), e.front_with(lo)))
}

/// One-based rank `ceil(alpha N)`, clamped to `[1, N]`.
pub(crate) fn quantile_rank(alpha: f64, n: usize) -> usize {
    let r = (alpha * n as f64 - 1e-9).ceil();
    (r.max(1.0) as usize).min(n)
}

pub(crate) fn check_level(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return invalid(format!("quantile level must lie in (0, 1), got {alpha}"));
    }
    Ok(())
}

/// Lower empirical quantile of a slice (rank `ceil(alpha N)`).
pub fn lower_quantile(values: &[f64], alpha: f64) -> Result<f64> {
    check_level(alpha)?;
    if values.is_empty() {
        return Err(Error::InsufficientData(
            "quantile of an empty sample".into(),
        ));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v[quantile_rank(alpha, v.len()) - 1])
}

pub(crate) fn quantile_at_rank(e: &FrontEnsemble, rank: usize) -> GridFront {
    let lengths = (0..e.n_directions())
        .map(|k| {
            let mut col = e.column(k).to_vec();
            col.sort_by(f64::total_cmp);
            col[rank - 1]
        })
        .collect();
    e.front_with(lengths)
}

/// Per-direction lower empirical alpha-quantile of the lengths.
pub fn quantile_front(e: &FrontEnsemble, alpha: f64) -> Result<GridFront> {
    check_level(alpha)?;
    Ok(quantile_at_rank(e, quantile_rank(alpha, e.n_samples())))
}

/// Fraction of sampled fronts whose closed domination region contains `y`.
pub fn domination_probability(e: &FrontEnsemble, y: &[f64]) -> Result<f64> {
    let (lam, r) = to_polar(y, e.reference())?;
    let at = e.lengths_at(&lam)?;
    let hits = at
        .lengths
        .iter()
        .filter(|&&l| l >= r - BOUNDARY_TOL)
        .count();
    Ok(hits as f64 / at.lengths.len() as f64)
}

/// Fraction of paired samples in which `y` lies strictly between the two
/// random fronts along its optimal direction.
pub fn deviation_probability(a: &FrontEnsemble, b: &FrontEnsemble, y: &[f64]) -> Result<f64> {
    if a.reference() != b.reference() {
        return invalid("ensembles have different reference vectors");
    }
    if a.n_samples() != b.n_samples() {
        return invalid(format!(
            "ensembles are not paired: {} vs {} samples",
            a.n_samples(),
            b.n_samples()
        ));
    }
    check_truncated(y, a.reference())?;
    let (lam, r) = to_polar(y, a.reference())?;
    let (la, lb) = (a.lengths_at(&lam)?, b.lengths_at(&lam)?);
    let hits = la
        .lengths
        .iter()
        .zip(&lb.lengths)
        .filter(|(x, z)| (*x / r - 1.0) * (*z / r - 1.0) < 0.0)
        .count();
    Ok(hits as f64 / la.lengths.len() as f64)
}

/// Mean and lower empirical quantiles of the sampled lengths along one
/// direction.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct LengthSummary {
    pub mean: f64,
    /// `(alpha, quantile)` pairs in the order requested.
    pub quantiles: Vec<(f64, f64)>,
    /// `None` when exact, otherwise the angle to the grid direction used.
    pub angular_error: Option<f64>,
}

/// Summarises the ensemble's lengths along `lam` (exact when the objective
/// table is retained).
pub fn length_summary(
    e: &FrontEnsemble,
    lam: &crate::polar::Direction,
    levels: &[f64],
) -> Result<LengthSummary> {
    let at = e.lengths_at(lam)?;
    summarise(at.lengths, levels, at.angular_error)
}

pub(crate) fn summarise(
    mut lengths: Vec<f64>,
    levels: &[f64],
    angular_error: Option<f64>,
) -> Result<LengthSummary> {
    for &a in levels {
        check_level(a)?;
    }
    let mean = compensated_mean(lengths.iter().copied());
    lengths.sort_by(f64::total_cmp);
    let n = lengths.len();
    let quantiles = levels
        .iter()
        .map(|&a| (a, lengths[quantile_rank(a, n) - 1]))
        .collect();
    Ok(LengthSummary {
        mean,
        quantiles,
        angular_error,
    })
}

/// Per-direction minimiser of the empirical expected score.
pub fn functional_front(e: &FrontEnsemble, scoring: &ScoringSpec) -> Result<GridFront> {
    scoring.validate()?;
    match scoring {
        ScoringSpec::Squared => Ok(mean_front(e)),
        ScoringSpec::Pinball { alpha } => quantile_front(e, *alpha),
        ScoringSpec::HvAbsolute => {
            invalid("no per-direction minimiser is implemented for hv-absolute scoring")
        }
    }
}
