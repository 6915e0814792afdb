//! End-to-end pipelines: daily-maximum series, day-bootstrap front
//! distributions with pairwise domination maps, input selection against a
//! target vector, and the affine objective normaliser.

mod pollution;
mod series;

use serde::{Deserialize, Serialize};

pub use pollution::{
    ensemble_from_resamples, pairwise_domination_map, period_front_ensemble,
    period_front_ensemble_partial, signed_yearly_changes, DominationMap, EvaluationLattice,
    PeriodEnsemble, SignedChanges,
};
pub use series::{daily_max, group_by_year, DailyMax, SeriesDataset};

use crate::error::{invalid, Error, Result};
use crate::numeric::compensated_mean;
use crate::ops::ScoringSpec;
use crate::polar::{check_finite, scalarise, to_polar};
use crate::stats::ObjectiveTable;

/// Chosen input and the expected loss of every candidate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decision {
    pub input: String,
    pub index: usize,
    pub loss: f64,
    pub losses: Vec<f64>,
}

/// Input minimising the expected score between its scalarised outcomes along
/// the target's optimal direction and the target's distance from `eta`.
/// Ties go to the earliest input.
pub fn select_best_input(
    table: &ObjectiveTable,
    target: &[f64],
    eta: &[f64],
    scoring: &ScoringSpec,
) -> Result<Decision> {
    scoring.validate()?;
    if target.len() != table.dim() {
        return invalid(format!(
            "target has dimension {}, table has {}",
            target.len(),
            table.dim()
        ));
    }
    let (lam, r) = to_polar(target, eta)?;
    let m = table.dim();
    let losses: Vec<f64> = (0..table.n_inputs())
        .map(|x| {
            compensated_mean(
                table
                    .outcomes_of(x)
                    .map(|y| scoring.score(scalarise(y, eta, lam.components()), r, m)),
            )
        })
        .collect();
    let mut best = 0;
    for (x, &l) in losses.iter().enumerate() {
        if l < losses[best] {
            best = x;
        }
    }
    Ok(Decision {
        input: table.inputs()[best].clone(),
        index: best,
        loss: losses[best],
        losses,
    })
}

/// Componentwise affine map `(y - l) / (u - l)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineNormalizer {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

/// Offset of the default reference below the lower bounds, as a fraction of
/// the range.
pub const DEFAULT_REFERENCE_MARGIN: f64 = 0.2;

impl AffineNormalizer {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        check_finite("lower bounds", &lower)?;
        check_finite("upper bounds", &upper)?;
        if lower.len() != upper.len() || lower.is_empty() {
            return invalid("bounds must be non-empty and of equal length");
        }
        if lower.iter().zip(&upper).any(|(l, u)| u <= l) {
            return invalid("every upper bound must exceed its lower bound");
        }
        Ok(Self { lower, upper })
    }

    /// Componentwise minimum and maximum of `points`.
    pub fn from_extent<'a, I>(points: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        let mut it = points.into_iter();
        let first = it
            .next()
            .ok_or_else(|| Error::Data("no points to take bounds from".into()))?;
        let (mut lower, mut upper) = (first.to_vec(), first.to_vec());
        for p in it {
            if p.len() != lower.len() {
                return invalid("points mix dimensions");
            }
            for (c, x) in p.iter().enumerate() {
                lower[c] = lower[c].min(*x);
                upper[c] = upper[c].max(*x);
            }
        }
        if let Some(c) = (0..lower.len()).find(|&c| upper[c] <= lower[c]) {
            return Err(Error::Data(format!(
                "objective {c} is constant over the data; bounds must be given"
            )));
        }
        Self::new(lower, upper)
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn ranges(&self) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| u - l)
            .collect()
    }

    pub fn forward(&self, y: &[f64]) -> Vec<f64> {
        y.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(v, (l, u))| (v - l) / (u - l))
            .collect()
    }

    pub fn inverse(&self, z: &[f64]) -> Vec<f64> {
        z.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(v, (l, u))| l + v * (u - l))
            .collect()
    }

    /// `l - 0.2 (u - l)`, in original units.
    pub fn default_reference(&self) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| l - DEFAULT_REFERENCE_MARGIN * (u - l))
            .collect()
    }
}

/// Normalises points to the unit box of the bounds and returns the default
/// reference vector in original units.
pub fn normalize_objectives(
    points: &[Vec<f64>],
    lower: Vec<f64>,
    upper: Vec<f64>,
) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let n = AffineNormalizer::new(lower, upper)?;
    if points.iter().any(|p| p.len() != n.lower.len()) {
        return invalid("point dimension does not match the bounds");
    }
    Ok((
        points.iter().map(|p| n.forward(p)).collect(),
        n.default_reference(),
    ))
}
