use std::path::Path;
use std::sync::Arc;

use polarfront_core::io::read_json;
use polarfront_core::polar::{equi_angular_grid_2d, sample_directions, DirectionGrid};
use polarfront_core::stats::{ensemble_from_objective_table, FrontEnsemble, ObjectiveTable};
use polarfront_core::workflows::AffineNormalizer;
use polarfront_core::{Error, Result};
use serde::Deserialize;
use serde_json::Value;

use crate::args::{GridArgs, Scheme};

fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}

pub fn build_grid(args: &GridArgs, m: usize) -> Result<Arc<DirectionGrid>> {
    let grid = match (&args.grid, args.grid_scheme) {
        (Some(path), _) => read_json::<DirectionGrid>(path)?,
        (None, Scheme::EquiAngular) if m != 2 => {
            return invalid("the equi-angular scheme needs exactly two objectives")
        }
        (None, Scheme::EquiAngular) => equi_angular_grid_2d(args.grid_k)?,
        (None, Scheme::Auto) if m == 2 => equi_angular_grid_2d(args.grid_k)?,
        (None, _) => sample_directions(m, args.grid_k, args.grid_seed)?,
    };
    if grid.dim() != m {
        return invalid(format!("grid has dimension {}, data has {m}", grid.dim()));
    }
    Ok(Arc::new(grid))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PointsFile {
    Bare(Vec<Vec<f64>>),
    Wrapped {
        points: Vec<Vec<f64>>,
        #[serde(default)]
        reference: Option<Vec<f64>>,
    },
}

type Points = Vec<Vec<f64>>;

/// Points and the reference stored alongside them, if any.
pub fn read_points(path: &Path) -> Result<(Points, Option<Vec<f64>>)> {
    let (points, reference) = match read_json::<PointsFile>(path)? {
        PointsFile::Bare(p) => (p, None),
        PointsFile::Wrapped { points, reference } => (points, reference),
    };
    if points.is_empty() {
        return Err(Error::Data(format!(
            "{} contains no points",
            path.display()
        )));
    }
    Ok((points, reference))
}

/// `l - 0.2 (u - l)` over the componentwise extent of `points`.
pub fn default_reference<'a>(points: impl IntoIterator<Item = &'a [f64]>) -> Result<Vec<f64>> {
    Ok(AffineNormalizer::from_extent(points)?.default_reference())
}

/// Flag value first, then a stored value, then the bounds rule.
pub fn resolve_reference<'a>(
    flag: Option<&Vec<f64>>,
    stored: Option<Vec<f64>>,
    points: impl IntoIterator<Item = &'a [f64]>,
) -> Result<Vec<f64>> {
    match (flag, stored) {
        (Some(f), _) => Ok(f.clone()),
        (None, Some(s)) => Ok(s),
        (None, None) => default_reference(points),
    }
}

pub enum Source {
    Ensemble(FrontEnsemble),
    Table(ObjectiveTable),
}

pub fn read_source(path: &Path) -> Result<Source> {
    let mut value: Value = read_json(path)?;
    if let Some(t) = value.get_mut("table") {
        return Ok(Source::Table(serde_json::from_value(t.take())?));
    }
    if value.get("samples").is_some() {
        return Ok(Source::Table(serde_json::from_value(value)?));
    }
    if value.get("lengths").is_some() {
        return Ok(Source::Ensemble(serde_json::from_value(value)?));
    }
    Err(Error::Data(format!(
        "{} is neither an ensemble nor an objective table",
        path.display()
    )))
}

pub fn read_table(path: &Path) -> Result<ObjectiveTable> {
    match read_source(path)? {
        Source::Table(t) => Ok(t),
        Source::Ensemble(_) => {
            invalid(format!("{} holds an ensemble, not a table", path.display()))
        }
    }
}

/// Ensemble from either source. A grid ensemble keeps its own grid and
/// reference; `eta` must agree with it when given.
pub fn load_ensemble(
    path: &Path,
    eta: Option<&Vec<f64>>,
    grid: &GridArgs,
) -> Result<FrontEnsemble> {
    match read_source(path)? {
        Source::Ensemble(e) => {
            if eta.is_some_and(|x| x.as_slice() != e.reference()) {
                return invalid("--eta differs from the ensemble's reference vector");
            }
            Ok(e)
        }
        Source::Table(t) => {
            let eta =
                resolve_reference(eta, None, t.samples().iter().flatten().map(Vec::as_slice))?;
            let grid = build_grid(grid, t.dim())?;
            ensemble_from_objective_table(Arc::new(t), eta, grid)
        }
    }
}
