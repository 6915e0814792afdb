//! Loaded ensemble plus the computations behind each endpoint.

use std::path::Path;
use std::sync::Arc;

use polarfront_core::numeric::l2_norm;
use polarfront_core::ops::ScoringSpec;
use polarfront_core::polar::{equi_angular_grid_2d, sample_directions, Direction, DirectionGrid};
use polarfront_core::projection::{slice_statistics, SliceSpec};
use polarfront_core::stats::{
    domination_probability, ensemble_from_objective_table, length_summary, FrontEnsemble,
    ObjectiveTable,
};
use polarfront_core::workflows::{select_best_input, AffineNormalizer};
use polarfront_core::{Error, Result};
use serde::{Deserialize, Serialize};

/// Largest norm the fixed slice components may reach.
pub const MAX_FIXED_NORM: f64 = 0.99;
pub const DEFAULT_SLICE_ANGLES: usize = 181;
pub const DEFAULT_LEVELS: [f64; 2] = [0.05, 0.95];

/// Grid used when a table source does not carry its own.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridDefaults {
    pub k: usize,
    pub seed: u64,
}

impl Default for GridDefaults {
    fn default() -> Self {
        Self { k: 1024, seed: 0 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TableSource {
    table: ObjectiveTable,
    #[serde(default)]
    labels: Option<Vec<String>>,
    #[serde(default)]
    bounds: Option<Bounds>,
    #[serde(default)]
    grid: Option<DirectionGrid>,
}

#[derive(Deserialize)]
struct EnsembleSource {
    #[serde(flatten)]
    ensemble: FrontEnsemble,
    #[serde(default)]
    labels: Option<Vec<String>>,
    #[serde(default)]
    bounds: Option<Bounds>,
}

/// Immutable state served by every endpoint.
#[derive(Debug)]
pub struct Session {
    labels: Vec<String>,
    normalizer: AffineNormalizer,
    ensemble: FrontEnsemble,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsOut {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Meta {
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub labels: Vec<String>,
    pub bounds: BoundsOut,
    pub eta: Vec<f64>,
    /// Input names when an objective table is loaded.
    pub inputs: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatPoint {
    /// `None` for the mean.
    pub alpha: Option<f64>,
    pub length: f64,
    pub point: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Marginal {
    pub weights: Vec<f64>,
    pub direction: Vec<f64>,
    pub mean: StatPoint,
    pub quantiles: Vec<StatPoint>,
    /// `None` when lengths were evaluated exactly at `direction`.
    pub angular_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Polyline {
    pub alpha: Option<f64>,
    pub lengths: Vec<f64>,
    /// `[x_i, x_j]` per sub-grid angle.
    pub points: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trace {
    pub indices: Vec<usize>,
    pub values: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Slice {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub v: Vec<f64>,
    pub scale: f64,
    pub reference: [f64; 2],
    pub mean: Polyline,
    pub quantiles: Vec<Polyline>,
    pub trace: Trace,
    pub max_angular_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Domination {
    pub y: Vec<f64>,
    pub probability: f64,
    pub exact: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecideRequest {
    pub target: Vec<f64>,
    #[serde(default)]
    pub scoring: Option<ScoringSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecideResponse {
    pub input: String,
    pub index: usize,
    pub loss: f64,
    pub losses: Vec<f64>,
    /// Sampled objective vectors of the chosen input.
    pub outcomes: Vec<Vec<f64>>,
}

fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}

fn default_grid(m: usize, d: GridDefaults) -> Result<DirectionGrid> {
    if m == 2 {
        equi_angular_grid_2d(d.k)
    } else {
        sample_directions(m, d.k, d.seed)
    }
}

fn default_labels(m: usize) -> Vec<String> {
    (1..=m).map(|i| format!("y{i}")).collect()
}

fn check_labels(labels: Option<Vec<String>>, m: usize) -> Result<Vec<String>> {
    match labels {
        Some(l) if l.len() != m => invalid(format!("{} labels for {m} objectives", l.len())),
        Some(l) => Ok(l),
        None => Ok(default_labels(m)),
    }
}

fn normalizer(b: Bounds) -> Result<AffineNormalizer> {
    AffineNormalizer::new(b.lower, b.upper)
}

/// Bounds whose default reference is `eta`, with `upper` the componentwise
/// maximum over every sampled boundary point.
fn bounds_around(e: &FrontEnsemble) -> Result<AffineNormalizer> {
    let eta = e.reference();
    let mut upper = eta.to_vec();
    for row in e.lengths().rows() {
        for (l, lam) in row.iter().zip(e.grid().iter()) {
            for ((u, x), d) in upper.iter_mut().zip(eta).zip(lam.components()) {
                *u = u.max(x + l * d);
            }
        }
    }
    let lower: Vec<f64> = eta
        .iter()
        .zip(&upper)
        .map(|(x, u)| (x + 0.2 * u) / 1.2)
        .collect();
    AffineNormalizer::new(lower, upper)
        .map_err(|_| Error::Data("ensemble has zero extent along some objective".into()))
}

impl Session {
    /// Objective-table source: the reference is derived from the bounds
    /// (observed ranges when absent) and lengths are exact off-grid.
    pub fn from_table(
        table: ObjectiveTable,
        labels: Option<Vec<String>>,
        bounds: Option<AffineNormalizer>,
        grid: Option<DirectionGrid>,
        defaults: GridDefaults,
    ) -> Result<Self> {
        let m = table.dim();
        let normalizer = match bounds {
            Some(b) => b,
            None => {
                AffineNormalizer::from_extent(table.samples().iter().flatten().map(Vec::as_slice))?
            }
        };
        if normalizer.lower().len() != m {
            return invalid("bounds dimension does not match the table");
        }
        let grid = match grid {
            Some(g) => g,
            None => default_grid(m, defaults)?,
        };
        let ensemble = ensemble_from_objective_table(
            Arc::new(table),
            normalizer.default_reference(),
            Arc::new(grid),
        )?;
        Ok(Self {
            labels: check_labels(labels, m)?,
            normalizer,
            ensemble,
        })
    }

    /// Grid-ensemble source: bounds must reproduce the ensemble's reference;
    /// when absent they are derived from it.
    pub fn from_ensemble(
        ensemble: FrontEnsemble,
        labels: Option<Vec<String>>,
        bounds: Option<AffineNormalizer>,
    ) -> Result<Self> {
        let m = ensemble.dim();
        let normalizer = match bounds {
            Some(b) => b,
            None => bounds_around(&ensemble)?,
        };
        if normalizer.lower().len() != m {
            return invalid("bounds dimension does not match the ensemble");
        }
        let rule = normalizer.default_reference();
        let scale = normalizer.ranges().iter().fold(1.0f64, |a, r| a.max(*r));
        if rule
            .iter()
            .zip(ensemble.reference())
            .any(|(a, b)| (a - b).abs() > 1e-9 * scale)
        {
            return invalid("bounds imply a reference different from the ensemble's");
        }
        Ok(Self {
            labels: check_labels(labels, m)?,
            normalizer,
            ensemble,
        })
    }

    /// Parses either source layout; a top-level `table` key selects the
    /// objective-table form.
    pub fn from_json(value: serde_json::Value, defaults: GridDefaults) -> Result<Self> {
        if value.get("table").is_some() {
            let s: TableSource = serde_json::from_value(value)?;
            let bounds = s.bounds.map(normalizer).transpose()?;
            Self::from_table(s.table, s.labels, bounds, s.grid, defaults)
        } else {
            let s: EnsembleSource = serde_json::from_value(value)?;
            let bounds = s.bounds.map(normalizer).transpose()?;
            Self::from_ensemble(s.ensemble, s.labels, bounds)
        }
    }

    pub fn from_path(path: impl AsRef<Path>, defaults: GridDefaults) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(serde_json::from_str(&text)?, defaults)
    }

    pub fn ensemble(&self) -> &FrontEnsemble {
        &self.ensemble
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn normalizer(&self) -> &AffineNormalizer {
        &self.normalizer
    }

    pub fn meta(&self) -> Meta {
        let e = &self.ensemble;
        Meta {
            m: e.dim(),
            n: e.n_samples(),
            k: e.n_directions(),
            labels: self.labels.clone(),
            bounds: BoundsOut {
                lower: self.normalizer.lower().to_vec(),
                upper: self.normalizer.upper().to_vec(),
            },
            eta: e.reference().to_vec(),
            inputs: e.source().map(|t| t.inputs().to_vec()),
        }
    }

    fn check_weights(&self, w: &[f64]) -> Result<()> {
        let m = self.ensemble.dim();
        if w.len() != m {
            return invalid(format!("expected {m} weights, got {}", w.len()));
        }
        if w.iter().any(|x| !(x.is_finite() && *x > 0.0 && *x <= 1.0)) {
            return invalid("weights must lie in (0, 1]");
        }
        Ok(())
    }

    /// Weights scaled by the objective ranges relative to the widest one.
    fn reweight(&self, w: &[f64]) -> Vec<f64> {
        let ranges = self.normalizer.ranges();
        let widest = ranges.iter().fold(0.0f64, |a, r| a.max(*r));
        w.iter().zip(&ranges).map(|(x, r)| x * r / widest).collect()
    }

    /// Direction `r` proportional to `(u - l) * w / |w|`.
    pub fn marginal_direction(&self, w: &[f64]) -> Result<Direction> {
        self.check_weights(w)?;
        Direction::normalized(self.reweight(w))
    }

    pub fn marginal(&self, w: &[f64], levels: &[f64]) -> Result<Marginal> {
        let r = self.marginal_direction(w)?;
        let s = length_summary(&self.ensemble, &r, levels)?;
        let eta = self.ensemble.reference();
        let at = |alpha: Option<f64>, length: f64| StatPoint {
            alpha,
            length,
            point: eta
                .iter()
                .zip(r.components())
                .map(|(e, d)| e + length * d)
                .collect(),
        };
        Ok(Marginal {
            weights: w.to_vec(),
            direction: r.components().to_vec(),
            mean: at(None, s.mean),
            quantiles: s.quantiles.iter().map(|&(a, q)| at(Some(a), q)).collect(),
            angular_error: s.angular_error,
        })
    }

    /// Fixed slice components for the objectives other than `i` and `j`:
    /// reweighted slider values, shrunk onto the ball of radius 0.99 when
    /// they leave it.
    pub fn slider_components(&self, i: usize, j: usize, w: &[f64]) -> Result<Vec<f64>> {
        self.check_weights(w)?;
        let m = self.ensemble.dim();
        if i >= m || j >= m || i == j {
            return invalid(format!(
                "need two distinct indices below {m}, got {i} and {j}"
            ));
        }
        let rw = self.reweight(w);
        let wc: Vec<f64> = (0..m)
            .filter(|c| *c != i && *c != j)
            .map(|c| rw[c])
            .collect();
        let shrink = (l2_norm(&wc) / MAX_FIXED_NORM).max(1.0);
        Ok(wc.iter().map(|x| x / shrink).collect())
    }

    pub fn slice(&self, i: usize, j: usize, w: &[f64], k: usize, levels: &[f64]) -> Result<Slice> {
        if !(2..=20_000).contains(&k) {
            return invalid("slice resolution must be between 2 and 20000 angles");
        }
        let v = self.slider_components(i, j, w)?;
        let (a, b) = (i.min(j), i.max(j));
        let spec = SliceSpec::new(vec![a, b], v.clone())?;
        let sub = equi_angular_grid_2d(k)?;
        let st = slice_statistics(&self.ensemble, &spec, &sub, levels)?;
        let swap = i > j;
        let eta = self.ensemble.reference();
        let reference = [eta[i], eta[j]];
        let polyline = |alpha: Option<f64>, lengths: &[f64]| Polyline {
            alpha,
            lengths: lengths.to_vec(),
            points: lengths
                .iter()
                .zip(sub.iter())
                .map(|(l, lam)| {
                    let c = lam.components();
                    let (x, y) = if swap { (c[1], c[0]) } else { (c[0], c[1]) };
                    [reference[0] + l * x, reference[1] + l * y]
                })
                .collect(),
        };
        Ok(Slice {
            i,
            j,
            k,
            scale: spec.scale(),
            v,
            reference,
            mean: polyline(None, &st.mean.lengths),
            quantiles: st
                .quantiles
                .iter()
                .map(|q| polyline(q.alpha, &q.lengths))
                .collect(),
            trace: Trace {
                indices: spec.complement(),
                values: st.mean_trace,
            },
            max_angular_error: st.max_angular_error,
        })
    }

    pub fn domination(&self, y: &[f64]) -> Result<Domination> {
        if y.len() != self.ensemble.dim() {
            return invalid(format!(
                "point has dimension {}, ensemble has {}",
                y.len(),
                self.ensemble.dim()
            ));
        }
        Ok(Domination {
            y: y.to_vec(),
            probability: domination_probability(&self.ensemble, y)?,
            exact: self.ensemble.source().is_some(),
        })
    }

    /// `Ok(None)` when no objective table is loaded.
    pub fn decide(&self, req: &DecideRequest) -> Result<Option<DecideResponse>> {
        let Some(table) = self.ensemble.source() else {
            return Ok(None);
        };
        let scoring = req.scoring.unwrap_or(ScoringSpec::Squared);
        let d = select_best_input(table, &req.target, self.ensemble.reference(), &scoring)?;
        Ok(Some(DecideResponse {
            outcomes: table.outcomes_of(d.index).map(<[f64]>::to_vec).collect(),
            input: d.input,
            index: d.index,
            loss: d.loss,
            losses: d.losses,
        }))
    }
}
