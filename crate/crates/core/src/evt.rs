//! Extreme-value tools for projected lengths: the Gumbel limit of maxima of
//! Weibull objectives, GEV/GPD distribution functions, threshold surfaces and
//! conditional excess probabilities.

use rand::Rng;
use rand_distr::{Distribution, Weibull as WeibullDist};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numeric::rng_from_seed;
use crate::polar::{check_finite, optimal_direction, scalarise, to_polar, Direction, GridFront};
use crate::stats::{quantile_front, FrontEnsemble};

/// Below this `|xi|` the GEV and GPD use their exact `xi = 0` forms.
pub const XI_ZERO_TOL: f64 = 1e-8;

/// Independent Weibull objectives with common shape `alpha` and per-objective
/// rates `beta`: `P[Y_m > y] = exp(-(beta_m y)^alpha)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeibullSpec {
    pub shape: f64,
    pub rates: Vec<f64>,
}

impl WeibullSpec {
    pub fn new(shape: f64, rates: Vec<f64>) -> Result<Self> {
        let s = Self { shape, rates };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.shape.is_finite() && self.shape > 0.0) {
            return invalid(format!(
                "Weibull shape must be positive, got {}",
                self.shape
            ));
        }
        if self.rates.is_empty() || self.rates.iter().any(|b| !(b.is_finite() && *b > 0.0)) {
            return invalid("Weibull rates must be a non-empty list of positive values");
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.rates.len()
    }

    /// `k = (sum_m (beta_m lam_m)^alpha)^(1/alpha)`.
    pub fn length_rate(&self, lam: &Direction) -> Result<f64> {
        self.validate()?;
        if lam.dim() != self.dim() {
            return invalid(format!(
                "direction has dimension {}, spec has {}",
                lam.dim(),
                self.dim()
            ));
        }
        let a = self.shape;
        let s: f64 = self
            .rates
            .iter()
            .zip(lam.components())
            .map(|(b, l)| (b * l).powf(a))
            .sum();
        Ok(s.powf(1.0 / a))
    }

    /// Draws one objective vector.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.rates
            .iter()
            .map(|b| {
                WeibullDist::new(1.0 / b, self.shape)
                    .expect("validated parameters")
                    .sample(rng)
            })
            .collect()
    }
}

/// Weibull law `P[X <= x] = 1 - exp(-(rate x)^shape)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Weibull {
    pub shape: f64,
    pub rate: f64,
}

impl Weibull {
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            -(-(self.rate * x).powf(self.shape)).exp_m1()
        }
    }
}

/// Normalising constants for the maximum of `n` scalarised lengths:
/// `(max - b) / a` tends to the standard Gumbel law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GumbelNorm {
    pub a: f64,
    pub b: f64,
    pub k: f64,
}

impl GumbelNorm {
    pub fn normalize(&self, x: f64) -> f64 {
        (x - self.b) / self.a
    }
}

pub fn weibull_norm_constants(spec: &WeibullSpec, lam: &Direction, n: usize) -> Result<GumbelNorm> {
    if n < 2 {
        return invalid(format!("need at least two samples per maximum, got {n}"));
    }
    let k = spec.length_rate(lam)?;
    let ln_n = (n as f64).ln();
    let alpha = spec.shape;
    Ok(GumbelNorm {
        a: ln_n.powf(1.0 / alpha - 1.0) / (alpha * k),
        b: ln_n.powf(1.0 / alpha) / k,
        k,
    })
}

/// Law of the scalarised length `s(Y)` along `lam` with reference at the
/// origin: Weibull with the same shape and rate `k`.
pub fn scalarised_length_distribution(spec: &WeibullSpec, lam: &Direction) -> Result<Weibull> {
    Ok(Weibull {
        shape: spec.shape,
        rate: spec.length_rate(lam)?,
    })
}

pub fn gumbel_cdf(x: f64) -> f64 {
    (-(-x).exp()).exp()
}

/// Generalised extreme value distribution function.
pub fn gev_cdf(x: f64, xi: f64, mu: f64, sigma: f64) -> Result<f64> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return invalid(format!("GEV scale must be positive, got {sigma}"));
    }
    let z = (x - mu) / sigma;
    if xi.abs() < XI_ZERO_TOL {
        return Ok(gumbel_cdf(z));
    }
    let t = xi * z;
    if t <= -1.0 {
        // Outside the support: below the lower end point for xi > 0, above
        // the upper end point for xi < 0.
        return Ok(if xi > 0.0 { 0.0 } else { 1.0 });
    }
    Ok((-(-t.ln_1p() / xi).exp()).exp())
}

/// Generalised Pareto distribution function for excesses `x >= 0`.
pub fn gpd_cdf(x: f64, xi: f64, beta: f64) -> Result<f64> {
    if !(beta.is_finite() && beta > 0.0) {
        return invalid(format!("GPD scale must be positive, got {beta}"));
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    if xi.abs() < XI_ZERO_TOL {
        return Ok(-(-x / beta).exp_m1());
    }
    let t = xi * x / beta;
    if t <= -1.0 {
        return Ok(1.0);
    }
    Ok(-(-t.ln_1p() / xi).exp_m1())
}

/// GPD scale for excesses over `u` implied by GEV parameters:
/// `sigma + xi (u - mu)`.
pub fn gpd_scale_for_threshold(sigma: f64, xi: f64, mu: f64, u: f64) -> Result<f64> {
    let b = sigma + xi * (u - mu);
    if !(b.is_finite() && b > 0.0) {
        return invalid(format!("threshold {u} gives non-positive scale {b}"));
    }
    Ok(b)
}

/// A polar surface of threshold lengths.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdSurface(GridFront);

impl ThresholdSurface {
    pub fn new(front: GridFront) -> Self {
        Self(front)
    }

    pub fn front(&self) -> &GridFront {
        &self.0
    }

    pub fn reference(&self) -> &[f64] {
        self.0.reference()
    }
}

/// Threshold surface at the per-direction alpha-quantile of an ensemble.
pub fn excess_threshold_from_quantile(e: &FrontEnsemble, alpha: f64) -> Result<ThresholdSurface> {
    Ok(ThresholdSurface(quantile_front(e, alpha)?))
}

/// Empirical conditional excess probability with the number of exceedances
/// it is based on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExcessProbability {
    pub probability: f64,
    pub exceedances: usize,
    pub threshold: f64,
    /// Angle between the optimal direction of `z` and the threshold grid
    /// direction used; zero when the threshold was supplied exactly.
    pub angular_error: f64,
}

/// `P[s(Y) - u <= s(z) - u | s(Y) > u]` along the optimal direction of `z`,
/// with `u` read from the threshold surface at the nearest grid direction.
pub fn conditional_excess_probability(
    samples: &[Vec<f64>],
    threshold: &ThresholdSurface,
    z: &[f64],
) -> Result<ExcessProbability> {
    let lam = optimal_direction(z, threshold.reference())?;
    let hit = threshold.front().nearest(&lam);
    let mut p = conditional_excess_probability_at(samples, threshold.reference(), hit.length, z)?;
    p.angular_error = hit.angular_error;
    Ok(p)
}

/// As [`conditional_excess_probability`] with an explicit threshold length.
pub fn conditional_excess_probability_at(
    samples: &[Vec<f64>],
    eta: &[f64],
    u: f64,
    z: &[f64],
) -> Result<ExcessProbability> {
    if !(u.is_finite() && u >= 0.0) {
        return invalid(format!(
            "threshold length must be finite and non-negative, got {u}"
        ));
    }
    let (lam, sz) = to_polar(z, eta)?;
    let mut exceed = 0usize;
    let mut below = 0usize;
    for y in samples {
        if y.len() != eta.len() {
            return invalid("sample dimension does not match the reference vector");
        }
        check_finite("sample", y)?;
        let s = scalarise(y, eta, lam.components());
        if s > u {
            exceed += 1;
            if s <= sz {
                below += 1;
            }
        }
    }
    if exceed == 0 {
        return Err(Error::InsufficientData(format!(
            "no sample exceeds the threshold length {u}"
        )));
    }
    Ok(ExcessProbability {
        probability: below as f64 / exceed as f64,
        exceedances: exceed,
        threshold: u,
        angular_error: 0.0,
    })
}

/// Kolmogorov-Smirnov distance between the empirical law of `samples` and a
/// continuous distribution function.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Normalised maxima of `n` scalarised Weibull lengths along `lam`, one per
/// replication, reference at the origin.
pub fn simulate_normalized_maxima(
    spec: &WeibullSpec,
    lam: &Direction,
    n: usize,
    replications: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let norm = weibull_norm_constants(spec, lam, n)?;
    let dists: Vec<WeibullDist<f64>> = spec
        .rates
        .iter()
        .map(|b| {
            WeibullDist::new(1.0 / b, spec.shape).map_err(|e| Error::InvalidArgument(e.to_string()))
        })
        .collect::<Result<_>>()?;
    let mut rng = rng_from_seed(seed);
    let lc = lam.components();
    Ok((0..replications)
        .map(|_| {
            let mut best = 0.0f64;
            for _ in 0..n {
                let s = dists
                    .iter()
                    .zip(lc)
                    .map(|(d, l)| d.sample(&mut rng) / l)
                    .fold(f64::INFINITY, f64::min);
                best = best.max(s);
            }
            norm.normalize(best)
        })
        .collect())
}
