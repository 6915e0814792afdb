use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{
    check_finite, check_same_dim, check_truncated, scalarise, Direction, DirectionGrid,
    BOUNDARY_TOL,
};
use crate::error::{invalid, Error, Result};
use crate::numeric::l2_norm;

/// Anything that can report the projected length of a front along an
/// arbitrary positive direction.
pub trait LengthField {
    /// Reference vector the lengths are measured from.
    fn reference(&self) -> &[f64];

    /// Projected length along `lam`.
    fn length_along(&self, lam: &Direction) -> f64;

    /// `true` when [`LengthField::length_along`] is exact at every direction,
    /// `false` when it interpolates from a finite grid.
    fn is_exact(&self) -> bool;

    fn dim(&self) -> usize {
        self.reference().len()
    }
}

/// Result of a nearest-direction lookup on a grid front.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NearestLookup {
    pub length: f64,
    pub index: usize,
    /// Angle in radians between the query and the grid direction used.
    pub angular_error: f64,
}

/// A polar surface sampled on a direction grid: a reference vector plus one
/// non-negative projected length per grid direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGridFront")]
pub struct GridFront {
    reference: Vec<f64>,
    grid: Arc<DirectionGrid>,
    lengths: Vec<f64>,
}

#[derive(Deserialize)]
struct RawGridFront {
    reference: Vec<f64>,
    grid: Arc<DirectionGrid>,
    lengths: Vec<f64>,
}

impl TryFrom<RawGridFront> for GridFront {
    type Error = Error;

    fn try_from(raw: RawGridFront) -> Result<Self> {
        GridFront::new(raw.reference, raw.grid, raw.lengths)
    }
}

impl GridFront {
    pub fn new(reference: Vec<f64>, grid: Arc<DirectionGrid>, lengths: Vec<f64>) -> Result<Self> {
        check_finite("reference", &reference)?;
        if reference.len() != grid.dim() {
            return invalid(format!(
                "reference has dimension {} but grid directions have {}",
                reference.len(),
                grid.dim()
            ));
        }
        if lengths.len() != grid.len() {
            return invalid(format!(
                "expected {} lengths, got {}",
                grid.len(),
                lengths.len()
            ));
        }
        if let Some(l) = lengths.iter().find(|l| !(l.is_finite() && **l >= 0.0)) {
            return invalid(format!("lengths must be finite and non-negative, got {l}"));
        }
        Ok(Self {
            reference,
            grid,
            lengths,
        })
    }

    /// Same grid and reference, new lengths. Used by front algebra where the
    /// inputs were already validated.
    pub(crate) fn with_lengths(&self, lengths: Vec<f64>) -> Self {
        debug_assert_eq!(lengths.len(), self.lengths.len());
        Self {
            reference: self.reference.clone(),
            grid: Arc::clone(&self.grid),
            lengths,
        }
    }

    pub(crate) fn from_parts_unchecked(
        reference: Vec<f64>,
        grid: Arc<DirectionGrid>,
        lengths: Vec<f64>,
    ) -> Self {
        Self {
            reference,
            grid,
            lengths,
        }
    }

    /// Constant-length front, e.g. the positive unit sphere for `length = 1`.
    pub fn constant(reference: Vec<f64>, grid: Arc<DirectionGrid>, length: f64) -> Result<Self> {
        let k = grid.len();
        Self::new(reference, grid, vec![length; k])
    }

    pub fn reference(&self) -> &[f64] {
        &self.reference
    }

    pub fn grid(&self) -> &Arc<DirectionGrid> {
        &self.grid
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn dim(&self) -> usize {
        self.reference.len()
    }

    /// The singleton front `{eta}`: every projected length is zero.
    pub fn is_degenerate(&self) -> bool {
        self.lengths.iter().all(|&l| l == 0.0)
    }

    /// Length at the grid direction nearest in angle to `lam`.
    pub fn nearest(&self, lam: &Direction) -> NearestLookup {
        let (index, angular_error) = self.grid.nearest(lam);
        NearestLookup {
            length: self.lengths[index],
            index,
            angular_error,
        }
    }

    /// Boundary points `eta + l_k lam_k`, one per grid direction.
    pub fn points(&self) -> Vec<Vec<f64>> {
        self.grid
            .iter()
            .zip(&self.lengths)
            .map(|(lam, l)| {
                self.reference
                    .iter()
                    .zip(lam.components())
                    .map(|(e, d)| e + l * d)
                    .collect()
            })
            .collect()
    }

    /// Errors unless both fronts share the grid and reference vector.
    pub fn check_compatible(&self, other: &GridFront) -> Result<()> {
        if self.reference != other.reference {
            return invalid("fronts have different reference vectors");
        }
        if !Arc::ptr_eq(&self.grid, &other.grid) && self.grid != other.grid {
            return invalid("fronts are defined on different direction grids");
        }
        Ok(())
    }
}

impl LengthField for GridFront {
    fn reference(&self) -> &[f64] {
        &self.reference
    }

    fn length_along(&self, lam: &Direction) -> f64 {
        self.nearest(lam).length
    }

    fn is_exact(&self) -> bool {
        false
    }
}

/// A finite point set with a reference vector. Projected lengths are exact at
/// any direction: the maximum scalarised length over the points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointFront {
    reference: Vec<f64>,
    points: Vec<Vec<f64>>,
}

impl PointFront {
    pub fn new(reference: Vec<f64>, points: Vec<Vec<f64>>) -> Result<Self> {
        check_finite("reference", &reference)?;
        if reference.is_empty() {
            return invalid("reference vector is empty");
        }
        if points.is_empty() {
            return invalid("a point front needs at least one point");
        }
        for p in &points {
            check_same_dim(p, &reference)?;
            check_finite("point", p)?;
        }
        Ok(Self { reference, points })
    }

    pub fn reference(&self) -> &[f64] {
        &self.reference
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn dim(&self) -> usize {
        self.reference.len()
    }

    /// Same reference with one more point.
    pub fn with_point(&self, p: Vec<f64>) -> Result<Self> {
        let mut points = self.points.clone();
        points.push(p);
        Self::new(self.reference.clone(), points)
    }
}

impl LengthField for PointFront {
    fn reference(&self) -> &[f64] {
        &self.reference
    }

    fn length_along(&self, lam: &Direction) -> f64 {
        max_scalarised(&self.points, &self.reference, lam.components())
    }

    fn is_exact(&self) -> bool {
        true
    }
}

pub(crate) fn max_scalarised(points: &[Vec<f64>], eta: &[f64], lam: &[f64]) -> f64 {
    points
        .iter()
        .map(|p| scalarise(p, eta, lam))
        .fold(0.0, f64::max)
}

/// Outcome of checking the positive-length and maximum-ratio conditions on a
/// grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum ParetoCheck {
    Valid,
    /// Some length is not strictly positive.
    FailsPositiveLengths {
        index: usize,
    },
    /// The point along `upsilon` strongly dominates the point along `lambda`.
    FailsMaxRatio {
        lambda: usize,
        upsilon: usize,
    },
}

impl ParetoCheck {
    pub fn is_valid(&self) -> bool {
        matches!(self, ParetoCheck::Valid)
    }
}

/// Checks that a grid front is a Pareto front surface on its grid:
/// every length exceeds `tol`, and for every ordered pair of directions
/// `max_m (l_a a_m) / (l_b b_m) >= 1 - tol`.
pub fn check_pareto_conditions(front: &GridFront, tol: f64) -> ParetoCheck {
    if let Some(index) = front.lengths.iter().position(|&l| l <= tol) {
        return ParetoCheck::FailsPositiveLengths { index };
    }
    // Boundary points relative to the reference: p_k = l_k lam_k.
    let rel: Vec<Vec<f64>> = front
        .grid
        .iter()
        .zip(&front.lengths)
        .map(|(lam, l)| lam.components().iter().map(|d| l * d).collect())
        .collect();
    let threshold = 1.0 - tol;
    for (a, pa) in rel.iter().enumerate() {
        for (b, pb) in rel.iter().enumerate() {
            if a == b {
                continue;
            }
            let ratio = pa
                .iter()
                .zip(pb)
                .map(|(x, y)| x / y)
                .fold(f64::NEG_INFINITY, f64::max);
            if ratio < threshold {
                return ParetoCheck::FailsMaxRatio {
                    lambda: a,
                    upsilon: b,
                };
            }
        }
    }
    ParetoCheck::Valid
}

/// Where a vector sits relative to a front, compared along its own optimal
/// direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrontPosition {
    /// Strongly dominated by the front (radius below the front length).
    StrictlyBelow,
    /// On the front boundary, within [`BOUNDARY_TOL`]. Weakly dominated.
    DominatedWeak,
    /// Strongly dominates the front point along its direction.
    StrictlyAbove,
}

impl FrontPosition {
    /// In the closed truncated domination region of the front.
    pub fn is_weakly_dominated(self) -> bool {
        matches!(
            self,
            FrontPosition::StrictlyBelow | FrontPosition::DominatedWeak
        )
    }

    pub fn is_strongly_dominated(self) -> bool {
        matches!(self, FrontPosition::StrictlyBelow)
    }

    /// Weakly dominates the front point along its direction.
    pub fn is_on_or_above(self) -> bool {
        matches!(
            self,
            FrontPosition::DominatedWeak | FrontPosition::StrictlyAbove
        )
    }
}

/// Classifies `y` against a front by comparing `|y - eta|` with the front's
/// length along the optimal direction of `y`. Grid fronts use the nearest
/// grid direction, so the answer is exact only when that direction is on the
/// grid.
pub fn front_domination_query<F: LengthField + ?Sized>(
    y: &[f64],
    front: &F,
) -> Result<FrontPosition> {
    let eta = front.reference();
    check_truncated(y, eta)?;
    let diff: Vec<f64> = y.iter().zip(eta).map(|(a, b)| a - b).collect();
    let radius = l2_norm(&diff);
    let lam = Direction::normalized(diff)?;
    let length = front.length_along(&lam);
    Ok(if (radius - length).abs() <= BOUNDARY_TOL {
        FrontPosition::DominatedWeak
    } else if radius < length {
        FrontPosition::StrictlyBelow
    } else {
        FrontPosition::StrictlyAbove
    })
}
