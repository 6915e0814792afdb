//! Lower-dimensional slices of fronts. A slice keeps the objectives in
//! `kept`, fixes the remaining direction components to `v`, and rescales the
//! lengths by `sqrt(1 - |v|^2)` so the result is again a front.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::numeric::l2_norm;
use crate::polar::{Direction, DirectionGrid, GridFront, LengthField};
use crate::stats::{summarise, FrontEnsemble};

/// Kept objective indices (zero-based, strictly increasing) and the fixed
/// components for the others.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceSpec {
    pub kept: Vec<usize>,
    pub v: Vec<f64>,
}

impl SliceSpec {
    pub fn new(kept: Vec<usize>, v: Vec<f64>) -> Result<Self> {
        let s = Self { kept, v };
        s.validate()?;
        Ok(s)
    }

    /// Total objective dimension `M = P + |v|`.
    pub fn dim(&self) -> usize {
        self.kept.len() + self.v.len()
    }

    pub fn kept_dim(&self) -> usize {
        self.kept.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.kept.is_empty() {
            return invalid("a slice must keep at least one objective");
        }
        if self.kept.windows(2).any(|w| w[0] >= w[1]) {
            return invalid("kept indices must be strictly increasing");
        }
        let m = self.dim();
        if self.kept.iter().any(|&i| i >= m) {
            return invalid(format!("kept index out of range for dimension {m}"));
        }
        if self.v.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return invalid("fixed components must be finite and positive");
        }
        if l2_norm(&self.v) >= 1.0 {
            return invalid("fixed components must have norm below 1");
        }
        Ok(())
    }

    /// Indices not in `kept`, ascending.
    pub fn complement(&self) -> Vec<usize> {
        (0..self.dim()).filter(|i| !self.kept.contains(i)).collect()
    }

    /// `sqrt(1 - |v|^2)`.
    pub fn scale(&self) -> f64 {
        let n = l2_norm(&self.v);
        (1.0 - n * n).sqrt()
    }

    fn check_against(&self, m: usize) -> Result<()> {
        self.validate()?;
        if self.dim() != m {
            return invalid(format!(
                "slice describes dimension {} but the front has {m}",
                self.dim()
            ));
        }
        Ok(())
    }
}

/// Full direction with kept components `sqrt(1 - |v|^2) lam` and the
/// remaining components equal to `v`.
pub fn reconstruct_direction(spec: &SliceSpec, lam: &Direction) -> Result<Direction> {
    spec.validate()?;
    if lam.dim() != spec.kept_dim() {
        return invalid(format!(
            "direction has dimension {}, slice keeps {}",
            lam.dim(),
            spec.kept_dim()
        ));
    }
    let scale = spec.scale();
    let mut out = vec![0.0; spec.dim()];
    for (&i, &c) in spec.kept.iter().zip(lam.components()) {
        out[i] = scale * c;
    }
    for (i, &c) in spec.complement().into_iter().zip(&spec.v) {
        out[i] = c;
    }
    Direction::new(out)
}

fn restrict(values: &[f64], idx: &[usize]) -> Vec<f64> {
    idx.iter().map(|&i| values[i]).collect()
}

fn check_sub_grid(spec: &SliceSpec, sub_grid: &DirectionGrid) -> Result<()> {
    if sub_grid.dim() != spec.kept_dim() {
        return invalid(format!(
            "sub-grid has dimension {}, slice keeps {}",
            sub_grid.dim(),
            spec.kept_dim()
        ));
    }
    Ok(())
}

/// Projected front on the kept objectives, with reference `eta` restricted to
/// them. Point fronts are evaluated exactly; grid fronts use nearest-direction
/// lookup.
pub fn project_front<F: LengthField + ?Sized>(
    front: &F,
    spec: &SliceSpec,
    sub_grid: &Arc<DirectionGrid>,
) -> Result<GridFront> {
    spec.check_against(front.dim())?;
    check_sub_grid(spec, sub_grid)?;
    let scale = spec.scale();
    let lengths = sub_grid
        .iter()
        .map(|lam| Ok(front.length_along(&reconstruct_direction(spec, lam)?) * scale))
        .collect::<Result<Vec<f64>>>()?;
    GridFront::new(
        restrict(front.reference(), &spec.kept),
        Arc::clone(sub_grid),
        lengths,
    )
}

/// Values of the fixed objectives along the slice: `eta_J + l v` per sub-grid
/// direction, where `l` is the unscaled front length.
pub fn fixed_component_trace<F: LengthField + ?Sized>(
    front: &F,
    spec: &SliceSpec,
    sub_grid: &DirectionGrid,
) -> Result<Vec<Vec<f64>>> {
    spec.check_against(front.dim())?;
    check_sub_grid(spec, sub_grid)?;
    let eta_j = restrict(front.reference(), &spec.complement());
    sub_grid
        .iter()
        .map(|lam| {
            let l = front.length_along(&reconstruct_direction(spec, lam)?);
            Ok(eta_j.iter().zip(&spec.v).map(|(e, v)| e + l * v).collect())
        })
        .collect()
}

/// A statistic of the projected lengths over the slice sub-grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SliceCurve {
    /// `None` for the mean, the level for a quantile.
    pub alpha: Option<f64>,
    pub lengths: Vec<f64>,
}

/// Per-direction statistics of the projected ensemble.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SliceStatistics {
    pub reference: Vec<f64>,
    pub mean: SliceCurve,
    pub quantiles: Vec<SliceCurve>,
    /// Fixed-objective trace of the mean slice.
    pub mean_trace: Vec<Vec<f64>>,
    /// Largest angle between a reconstructed direction and the grid direction
    /// used; `None` when every length was evaluated exactly.
    pub max_angular_error: Option<f64>,
}

/// Projects every ensemble row onto the slice and summarises per sub-grid
/// direction: the mean and the lower empirical quantile at each level.
pub fn slice_statistics(
    e: &FrontEnsemble,
    spec: &SliceSpec,
    sub_grid: &DirectionGrid,
    levels: &[f64],
) -> Result<SliceStatistics> {
    spec.check_against(e.dim())?;
    check_sub_grid(spec, sub_grid)?;
    let scale = spec.scale();
    let eta_j = restrict(e.reference(), &spec.complement());
    let mut mean = Vec::with_capacity(sub_grid.len());
    let mut quantiles: Vec<Vec<f64>> = vec![Vec::with_capacity(sub_grid.len()); levels.len()];
    let mut mean_trace = Vec::with_capacity(sub_grid.len());
    let mut max_err: Option<f64> = None;
    for lam in sub_grid.iter() {
        let at = e.lengths_at(&reconstruct_direction(spec, lam)?)?;
        if let Some(a) = at.angular_error {
            max_err = Some(max_err.map_or(a, |m| m.max(a)));
        }
        let full = summarise(at.lengths, levels, None)?;
        mean.push(full.mean * scale);
        mean_trace.push(
            eta_j
                .iter()
                .zip(&spec.v)
                .map(|(eta, v)| eta + full.mean * v)
                .collect(),
        );
        for (q, (_, val)) in quantiles.iter_mut().zip(&full.quantiles) {
            q.push(val * scale);
        }
    }
    Ok(SliceStatistics {
        reference: restrict(e.reference(), &spec.kept),
        mean: SliceCurve {
            alpha: None,
            lengths: mean,
        },
        quantiles: levels
            .iter()
            .zip(quantiles)
            .map(|(&a, l)| SliceCurve {
                alpha: Some(a),
                lengths: l,
            })
            .collect(),
        mean_trace,
        max_angular_error: max_err,
    })
}
