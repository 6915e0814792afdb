//! Reference-anchored polar coordinates: the length scalarisation, optimal
//! directions, Pareto domination predicates, and direction grids.

mod direction;
mod front;

pub use direction::{
    equi_angular_grid_2d, sample_directions, Direction, DirectionGrid, GridScheme,
    POSITIVITY_FLOOR, UNIT_NORM_TOL,
};
pub use front::{
    check_pareto_conditions, front_domination_query, FrontPosition, GridFront, LengthField,
    NearestLookup, ParetoCheck, PointFront,
};

pub(crate) use front::max_scalarised;

use crate::error::{domain, invalid, Result};
use crate::numeric::l2_norm;

/// Absolute tolerance used when comparing a radial distance to a front length.
/// Ties count as weakly dominated (closed domination region).
pub const BOUNDARY_TOL: f64 = 1e-9;

/// `min_m max(y_m - eta_m, 0) / lam_m` with no argument checks.
#[inline]
pub(crate) fn scalarise(y: &[f64], eta: &[f64], lam: &[f64]) -> f64 {
    let mut s = f64::INFINITY;
    for ((yi, ei), li) in y.iter().zip(eta).zip(lam) {
        let v = (yi - ei).max(0.0) / li;
        if v < s {
            s = v;
        }
    }
    s
}

pub(crate) fn check_finite(name: &str, v: &[f64]) -> Result<()> {
    if v.iter().any(|x| !x.is_finite()) {
        return invalid(format!("{name} has non-finite components"));
    }
    Ok(())
}

pub(crate) fn check_same_dim(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return invalid(format!("dimension mismatch: {} vs {}", a.len(), b.len()));
    }
    Ok(())
}

/// Length of the segment of the ray `eta + t lam` inside the open box
/// `(eta, y)`. Zero whenever `y` does not strongly dominate `eta`.
pub fn length_scalarisation(y: &[f64], eta: &[f64], lam: &Direction) -> Result<f64> {
    check_finite("y", y)?;
    check_finite("eta", eta)?;
    check_same_dim(y, eta)?;
    check_same_dim(y, lam.components())?;
    Ok(scalarise(y, eta, lam.components()))
}

pub(crate) fn check_truncated(y: &[f64], eta: &[f64]) -> Result<()> {
    check_finite("y", y)?;
    check_finite("eta", eta)?;
    check_same_dim(y, eta)?;
    if y.iter().zip(eta).any(|(a, b)| a <= b) {
        return domain("vector does not strongly dominate the reference vector");
    }
    Ok(())
}

/// The direction `(y - eta) / |y - eta|` that maximises the scalarised length.
pub fn optimal_direction(y: &[f64], eta: &[f64]) -> Result<Direction> {
    check_truncated(y, eta)?;
    let diff: Vec<f64> = y.iter().zip(eta).map(|(a, b)| a - b).collect();
    Direction::normalized(diff)
}

/// Polar coordinates of `y` about `eta`: the optimal direction and the radius.
pub fn to_polar(y: &[f64], eta: &[f64]) -> Result<(Direction, f64)> {
    check_truncated(y, eta)?;
    let diff: Vec<f64> = y.iter().zip(eta).map(|(a, b)| a - b).collect();
    let r = l2_norm(&diff);
    Ok((Direction::normalized(diff)?, r))
}

/// Inverse of [`to_polar`]: `eta + l lam`.
pub fn from_polar(eta: &[f64], lam: &Direction, l: f64) -> Result<Vec<f64>> {
    check_finite("eta", eta)?;
    check_same_dim(eta, lam.components())?;
    if !(l.is_finite() && l > 0.0) {
        return domain(format!("polar length must be finite and > 0, got {l}"));
    }
    Ok(eta
        .iter()
        .zip(lam.components())
        .map(|(e, d)| e + l * d)
        .collect())
}

/// Pareto domination relations (maximisation convention).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// `a - b` is componentwise non-negative.
    Weak,
    /// Weak and `a != b`.
    Strict,
    /// Every component of `a` strictly greater.
    Strong,
}

pub fn dominates(a: &[f64], b: &[f64], relation: Relation) -> Result<bool> {
    check_same_dim(a, b)?;
    let weak = a.iter().zip(b).all(|(x, y)| x >= y);
    Ok(match relation {
        Relation::Weak => weak,
        Relation::Strict => weak && a.iter().zip(b).any(|(x, y)| x > y),
        Relation::Strong => a.iter().zip(b).all(|(x, y)| x > y),
    })
}
