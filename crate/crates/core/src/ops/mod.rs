//! Front construction from point sets, order-preserving front algebra,
//! length-based R2 utilities, hypervolume and frontier losses.

mod hypervolume;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use hypervolume::{
    hv_constant, hypervolume_exact_small, hypervolume_mc, hypervolume_of_front, EXACT_MAX_POINTS,
};

use crate::error::{invalid, Result};
use crate::numeric::compensated_mean;
use crate::polar::{DirectionGrid, GridFront, PointFront};

pub(crate) use hypervolume::ln_hv_constant;

/// Projected lengths of a point set on `grid`: for each direction, the largest
/// scalarised length over the points.
pub fn front_from_points(pf: &PointFront, grid: &Arc<DirectionGrid>) -> Result<GridFront> {
    let lengths = front_from_points_on(pf, grid)?;
    Ok(GridFront::from_parts_unchecked(
        pf.reference().to_vec(),
        Arc::clone(grid),
        lengths,
    ))
}

pub(crate) fn front_from_points_on(pf: &PointFront, grid: &DirectionGrid) -> Result<Vec<f64>> {
    if grid.dim() != pf.dim() {
        return invalid(format!(
            "grid has dimension {} but points have {}",
            grid.dim(),
            pf.dim()
        ));
    }
    Ok(lengths_of_points(pf.points(), pf.reference(), grid))
}

pub(crate) fn lengths_of_points(
    points: &[Vec<f64>],
    eta: &[f64],
    grid: &DirectionGrid,
) -> Vec<f64> {
    grid.iter()
        .map(|lam| crate::polar::max_scalarised(points, eta, lam.components()))
        .collect()
}

/// Union of the domination regions: pointwise maximum of lengths.
pub fn union_fronts(a: &GridFront, b: &GridFront) -> Result<GridFront> {
    a.check_compatible(b)?;
    Ok(a.with_lengths(
        a.lengths()
            .iter()
            .zip(b.lengths())
            .map(|(x, y)| x.max(*y))
            .collect(),
    ))
}

/// Minkowski-style sum: pointwise sum of lengths.
pub fn add_fronts(a: &GridFront, b: &GridFront) -> Result<GridFront> {
    a.check_compatible(b)?;
    Ok(a.with_lengths(
        a.lengths()
            .iter()
            .zip(b.lengths())
            .map(|(x, y)| x + y)
            .collect(),
    ))
}

/// Radial scaling about the reference vector.
pub fn scale_front(a: &GridFront, eps: f64) -> Result<GridFront> {
    if !(eps.is_finite() && eps > 0.0) {
        return invalid(format!(
            "scale factor must be finite and positive, got {eps}"
        ));
    }
    Ok(a.with_lengths(a.lengths().iter().map(|l| l * eps).collect()))
}

/// Strictly increasing transformation applied to scalarised lengths.
#[derive(Clone)]
pub enum Transform {
    Identity,
    /// `c_M x^M`, turning the R2 utility into the hypervolume.
    Hypervolume {
        dim: usize,
    },
    /// Caller-supplied; must be strictly increasing on the non-negative reals.
    Custom {
        name: String,
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl fmt::Debug for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Transform::Identity => write!(f, "Identity"),
            Transform::Hypervolume { dim } => write!(f, "Hypervolume {{ dim: {dim} }}"),
            Transform::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

impl Transform {
    pub fn apply(&self, x: f64) -> f64 {
        match self {
            Transform::Identity => x,
            Transform::Hypervolume { dim } => {
                if x <= 0.0 {
                    0.0
                } else if *dim >= 8 {
                    (ln_hv_constant(*dim) + *dim as f64 * x.ln()).exp()
                } else {
                    ln_hv_constant(*dim).exp() * x.powi(*dim as i32)
                }
            }
            Transform::Custom { f, .. } => f(x),
        }
    }
}

/// Length-based R2 utility of a point set: the grid mean of `tau(s_max)`.
pub fn r2_utility(pf: &PointFront, grid: &DirectionGrid, transform: &Transform) -> Result<f64> {
    let lengths = front_from_points_on(pf, grid)?;
    Ok(compensated_mean(
        lengths.iter().map(|&l| transform.apply(l)),
    ))
}

/// Scoring function `S(x, y)` comparing a candidate length `x` with a
/// reference length `y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ScoringSpec {
    Squared,
    /// Check loss `(1[y <= x] - alpha)(x - y)`, minimised at the alpha-quantile.
    Pinball {
        alpha: f64,
    },
    /// `|c_M x^M - c_M y^M|`.
    HvAbsolute,
}

impl ScoringSpec {
    pub fn pinball(alpha: f64) -> Result<Self> {
        let s = ScoringSpec::Pinball { alpha };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if let ScoringSpec::Pinball { alpha } = self {
            if !(*alpha > 0.0 && *alpha < 1.0) {
                return invalid(format!("pinball level must lie in (0, 1), got {alpha}"));
            }
        }
        Ok(())
    }

    /// Score of candidate `x` against `y` for `dim`-dimensional fronts.
    pub fn score(&self, x: f64, y: f64, dim: usize) -> f64 {
        match *self {
            ScoringSpec::Squared => (x - y) * (x - y),
            ScoringSpec::Pinball { alpha } => {
                let ind = if y <= x { 1.0 } else { 0.0 };
                (ind - alpha) * (x - y)
            }
            ScoringSpec::HvAbsolute => {
                let t = Transform::Hypervolume { dim };
                (t.apply(x) - t.apply(y)).abs()
            }
        }
    }
}

/// Average score between two length fields over the shared grid.
pub fn frontier_loss(a: &GridFront, b: &GridFront, scoring: &ScoringSpec) -> Result<f64> {
    a.check_compatible(b)?;
    scoring.validate()?;
    let m = a.dim();
    Ok(compensated_mean(
        a.lengths()
            .iter()
            .zip(b.lengths())
            .map(|(&x, &y)| scoring.score(x, y, m)),
    ))
}

/// Grid estimate of the volume of the symmetric difference of the two
/// domination regions: `2 U[a ∪ b] - U[a] - U[b]`.
pub fn hypervolume_distance(a: &GridFront, b: &GridFront) -> Result<f64> {
    a.check_compatible(b)?;
    let t = Transform::Hypervolume { dim: a.dim() };
    Ok(compensated_mean(a.lengths().iter().zip(b.lengths()).map(
        |(&x, &y)| {
            let (tx, ty) = (t.apply(x), t.apply(y));
            2.0 * tx.max(ty) - tx - ty
        },
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polar::{
        check_pareto_conditions, equi_angular_grid_2d, sample_directions, Direction,
    };
    use std::f64::consts::FRAC_1_SQRT_2;

    fn two_point_front(grid: &Arc<DirectionGrid>) -> GridFront {
        let pf = PointFront::new(vec![0.0, 0.0], vec![vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        front_from_points(&pf, grid).unwrap()
    }

    #[test]
    fn two_point_lengths() {
        let grid = Arc::new(
            DirectionGrid::user_supplied(vec![
                Direction::new(vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap(),
                Direction::new(vec![0.6, 0.8]).unwrap(),
            ])
            .unwrap(),
        );
        let f = two_point_front(&grid);
        assert!((f.lengths()[0] - 2f64.sqrt()).abs() < 1e-12);
        assert!((f.lengths()[1] - 5.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn dominated_singleton_is_degenerate() {
        let grid = Arc::new(equi_angular_grid_2d(16).unwrap());
        let pf = PointFront::new(vec![2.0, 2.0], vec![vec![1.0, 1.0]]).unwrap();
        assert!(front_from_points(&pf, &grid).unwrap().is_degenerate());
    }

    #[test]
    fn algebra_identities() {
        let grid = Arc::new(equi_angular_grid_2d(32).unwrap());
        let f = two_point_front(&grid);
        let zero = GridFront::constant(vec![0.0, 0.0], grid.clone(), 0.0).unwrap();
        assert_eq!(scale_front(&f, 1.0).unwrap(), f);
        assert_eq!(add_fronts(&f, &zero).unwrap(), f);
        assert_eq!(union_fronts(&f, &f).unwrap(), f);
        let two = GridFront::constant(vec![0.0, 0.0], grid.clone(), 2.0).unwrap();
        let three = GridFront::constant(vec![0.0, 0.0], grid.clone(), 3.0).unwrap();
        assert_eq!(union_fronts(&two, &three).unwrap(), three);
        assert!(scale_front(&f, 0.0).is_err());
        assert!(scale_front(&f, -1.0).is_err());
    }

    #[test]
    fn scaled_sphere_is_valid() {
        let grid = Arc::new(sample_directions(3, 128, 5).unwrap());
        let s = GridFront::constant(vec![0.0; 3], grid, 1.0).unwrap();
        let t = scale_front(&s, 0.8).unwrap();
        assert!(t.lengths().iter().all(|&l| l == 0.8));
        assert!(check_pareto_conditions(&t, 1e-9).is_valid());
    }

    #[test]
    fn algebra_rejects_mismatched_fronts() {
        let g1 = Arc::new(equi_angular_grid_2d(8).unwrap());
        let g2 = Arc::new(equi_angular_grid_2d(9).unwrap());
        let a = GridFront::constant(vec![0.0, 0.0], g1.clone(), 1.0).unwrap();
        let b = GridFront::constant(vec![0.0, 0.0], g2, 1.0).unwrap();
        let c = GridFront::constant(vec![0.0, 1.0], g1, 1.0).unwrap();
        assert!(union_fronts(&a, &b).is_err());
        assert!(add_fronts(&a, &c).is_err());
        assert!(frontier_loss(&a, &c, &ScoringSpec::Squared).is_err());
    }

    #[test]
    fn losses_on_constant_fronts() {
        let grid = Arc::new(equi_angular_grid_2d(64).unwrap());
        let two = GridFront::constant(vec![0.0, 0.0], grid.clone(), 2.0).unwrap();
        let three = GridFront::constant(vec![0.0, 0.0], grid.clone(), 3.0).unwrap();
        for s in [
            ScoringSpec::Squared,
            ScoringSpec::Pinball { alpha: 0.3 },
            ScoringSpec::HvAbsolute,
        ] {
            assert_eq!(frontier_loss(&two, &two, &s).unwrap(), 0.0);
        }
        assert_eq!(
            frontier_loss(&two, &three, &ScoringSpec::Squared).unwrap(),
            1.0
        );
        assert_eq!(hypervolume_distance(&two, &two).unwrap(), 0.0);
        // Nested fronts: the symmetric difference is the shell between them.
        let d = hypervolume_distance(&two, &three).unwrap();
        let shell = hypervolume_of_front(&three) - hypervolume_of_front(&two);
        assert!((d - shell).abs() < 1e-12);
        assert!((d - std::f64::consts::FRAC_PI_4 * 5.0).abs() < 1e-12);
    }

    #[test]
    fn pinball_is_non_negative_and_validated() {
        let s = ScoringSpec::pinball(0.2).unwrap();
        for (x, y) in [(1.0, 2.0), (2.0, 1.0), (1.5, 1.5)] {
            assert!(s.score(x, y, 2) >= 0.0);
        }
        assert_eq!(s.score(1.0, 2.0, 2), 0.2);
        assert!((s.score(2.0, 1.0, 2) - 0.8).abs() < 1e-15);
        assert!(ScoringSpec::pinball(0.0).is_err());
        assert!(ScoringSpec::pinball(1.0).is_err());
    }

    #[test]
    fn scoring_json_shape() {
        let s: ScoringSpec = serde_json::from_str(r#"{"kind":"pinball","alpha":0.25}"#).unwrap();
        assert_eq!(s, ScoringSpec::Pinball { alpha: 0.25 });
        assert_eq!(
            serde_json::to_string(&ScoringSpec::HvAbsolute).unwrap(),
            r#"{"kind":"hv-absolute"}"#
        );
    }

    #[test]
    fn power_transform_is_stable_in_high_dimension() {
        let t = Transform::Hypervolume { dim: 400 };
        let v = t.apply(3.0);
        assert!(v.is_finite() && v > 0.0);
        // Low-dimension direct path and log path agree.
        let direct = Transform::Hypervolume { dim: 7 }.apply(1.7);
        let logp = (ln_hv_constant(7) + 7.0 * 1.7f64.ln()).exp();
        assert!((direct - logp).abs() < 1e-12 * direct);
    }

    #[test]
    fn r2_with_power_transform_is_grid_hypervolume() {
        let grid = equi_angular_grid_2d(257).unwrap();
        let pf = PointFront::new(vec![0.0, 0.0], vec![vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        let r2 = r2_utility(&pf, &grid, &Transform::Hypervolume { dim: 2 }).unwrap();
        assert_eq!(r2, hypervolume_mc(&pf, &grid).unwrap());
    }
}
