use std::sync::Arc;

use ndarray::{Array2, ArrayView1, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::polar::{check_finite, max_scalarised, Direction, DirectionGrid, GridFront};

/// Sampled objective vectors over a finite input set: `samples[n][x]` is the
/// objective vector of input `x` under sample `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTable")]
pub struct ObjectiveTable {
    inputs: Vec<String>,
    samples: Vec<Vec<Vec<f64>>>,
}

#[derive(Deserialize)]
struct RawTable {
    inputs: Vec<String>,
    samples: Vec<Vec<Vec<f64>>>,
}

impl TryFrom<RawTable> for ObjectiveTable {
    type Error = Error;

    fn try_from(raw: RawTable) -> Result<Self> {
        ObjectiveTable::new(raw.inputs, raw.samples)
    }
}

impl ObjectiveTable {
    pub fn new(inputs: Vec<String>, samples: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        if inputs.is_empty() || samples.is_empty() {
            return invalid("objective table needs at least one input and one sample");
        }
        let m = samples[0].first().map_or(0, Vec::len);
        if m == 0 {
            return invalid("objective vectors are empty");
        }
        for (n, row) in samples.iter().enumerate() {
            if row.len() != inputs.len() {
                return invalid(format!(
                    "sample {n} has {} inputs, expected {}",
                    row.len(),
                    inputs.len()
                ));
            }
            for y in row {
                if y.len() != m {
                    return invalid(format!(
                        "sample {n} mixes objective dimensions {m} and {}",
                        y.len()
                    ));
                }
                check_finite("objective vector", y)?;
            }
        }
        Ok(Self { inputs, samples })
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn samples(&self) -> &[Vec<Vec<f64>>] {
        &self.samples
    }

    pub fn n_samples(&self) -> usize {
        self.samples.len()
    }

    pub fn n_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn dim(&self) -> usize {
        self.samples[0][0].len()
    }

    /// Objective vectors of one input across all samples.
    pub fn outcomes_of(&self, x: usize) -> impl Iterator<Item = &[f64]> + '_ {
        self.samples.iter().map(move |row| row[x].as_slice())
    }
}

/// `N` sampled fronts sharing one reference vector and one direction grid,
/// stored as an `N x K` length matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontEnsemble {
    reference: Vec<f64>,
    grid: Arc<DirectionGrid>,
    lengths: Array2<f64>,
    source: Option<Arc<ObjectiveTable>>,
}

/// Row lengths evaluated at one direction.
#[derive(Debug, Clone, PartialEq)]
pub struct LengthsAt {
    pub lengths: Vec<f64>,
    /// `None` when evaluated exactly from the objective table, otherwise the
    /// angle to the grid direction used.
    pub angular_error: Option<f64>,
}

impl FrontEnsemble {
    pub fn new(
        reference: Vec<f64>,
        grid: Arc<DirectionGrid>,
        lengths: Array2<f64>,
    ) -> Result<Self> {
        check_finite("reference", &reference)?;
        if reference.len() != grid.dim() {
            return invalid(format!(
                "reference has dimension {} but the grid has {}",
                reference.len(),
                grid.dim()
            ));
        }
        let (n, k) = lengths.dim();
        if n == 0 {
            return invalid("an ensemble needs at least one sample");
        }
        if k != grid.len() {
            return invalid(format!(
                "length matrix has {k} columns, grid has {} directions",
                grid.len()
            ));
        }
        if lengths.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
            return invalid("ensemble lengths must be finite and non-negative");
        }
        Ok(Self {
            reference,
            grid,
            lengths,
            source: None,
        })
    }

    /// Builds an ensemble whose rows are the given fronts.
    pub fn from_fronts(fronts: &[GridFront]) -> Result<Self> {
        let first = fronts
            .first()
            .ok_or_else(|| Error::InvalidArgument("no fronts supplied".into()))?;
        for f in &fronts[1..] {
            first.check_compatible(f)?;
        }
        let k = first.lengths().len();
        let mut lengths = Array2::zeros((fronts.len(), k));
        for (mut row, f) in lengths.rows_mut().into_iter().zip(fronts) {
            row.assign(&ArrayView1::from(f.lengths()));
        }
        Ok(Self {
            reference: first.reference().to_vec(),
            grid: Arc::clone(first.grid()),
            lengths,
            source: None,
        })
    }

    /// Builds an ensemble from one length vector per sample.
    pub fn from_rows(
        reference: Vec<f64>,
        grid: Arc<DirectionGrid>,
        rows: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let n = rows.len();
        let k = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != k) {
            return invalid("ragged length matrix");
        }
        let flat: Vec<f64> = rows.into_iter().flatten().collect();
        let lengths = Array2::from_shape_vec((n, k), flat)
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        Self::new(reference, grid, lengths)
    }

    pub fn reference(&self) -> &[f64] {
        &self.reference
    }

    pub fn grid(&self) -> &Arc<DirectionGrid> {
        &self.grid
    }

    pub fn lengths(&self) -> &Array2<f64> {
        &self.lengths
    }

    pub fn source(&self) -> Option<&ObjectiveTable> {
        self.source.as_deref()
    }

    pub fn n_samples(&self) -> usize {
        self.lengths.nrows()
    }

    pub fn n_directions(&self) -> usize {
        self.lengths.ncols()
    }

    pub fn dim(&self) -> usize {
        self.reference.len()
    }

    /// Row `n` as a front.
    pub fn row(&self, n: usize) -> GridFront {
        GridFront::from_parts_unchecked(
            self.reference.clone(),
            Arc::clone(&self.grid),
            self.lengths.row(n).to_vec(),
        )
    }

    pub fn rows(&self) -> impl Iterator<Item = GridFront> + '_ {
        (0..self.n_samples()).map(|n| self.row(n))
    }

    pub(crate) fn column(&self, k: usize) -> ArrayView1<'_, f64> {
        self.lengths.index_axis(Axis(1), k)
    }

    pub(crate) fn front_with(&self, lengths: Vec<f64>) -> GridFront {
        GridFront::from_parts_unchecked(self.reference.clone(), Arc::clone(&self.grid), lengths)
    }

    pub fn check_compatible(&self, front: &GridFront) -> Result<()> {
        if front.reference() != self.reference.as_slice() {
            return invalid("front and ensemble have different reference vectors");
        }
        if !Arc::ptr_eq(front.grid(), &self.grid) && **front.grid() != *self.grid {
            return invalid("front and ensemble use different direction grids");
        }
        Ok(())
    }

    /// Every row's length along `lam`: exact when the objective table is
    /// retained, nearest grid direction otherwise.
    pub fn lengths_at(&self, lam: &Direction) -> Result<LengthsAt> {
        if lam.dim() != self.dim() {
            return invalid(format!(
                "direction has dimension {}, ensemble has {}",
                lam.dim(),
                self.dim()
            ));
        }
        Ok(match &self.source {
            Some(table) => LengthsAt {
                lengths: table
                    .samples()
                    .iter()
                    .map(|row| max_scalarised(row, &self.reference, lam.components()))
                    .collect(),
                angular_error: None,
            },
            None => {
                let (k, angle) = self.grid.nearest(lam);
                LengthsAt {
                    lengths: self.column(k).to_vec(),
                    angular_error: Some(angle),
                }
            }
        })
    }
}

/// Ensemble whose row `n` is the front of the objective vectors in sample `n`.
/// The table is retained so probabilities can be evaluated off-grid exactly.
pub fn ensemble_from_objective_table(
    table: Arc<ObjectiveTable>,
    eta: Vec<f64>,
    grid: Arc<DirectionGrid>,
) -> Result<FrontEnsemble> {
    check_finite("reference", &eta)?;
    if eta.len() != table.dim() || grid.dim() != table.dim() {
        return invalid(format!(
            "objective dimension {} does not match reference ({}) or grid ({})",
            table.dim(),
            eta.len(),
            grid.dim()
        ));
    }
    let (n, k) = (table.n_samples(), grid.len());
    let mut lengths = Array2::zeros((n, k));
    for (mut row, sample) in lengths.rows_mut().into_iter().zip(table.samples()) {
        for (cell, lam) in row.iter_mut().zip(grid.iter()) {
            *cell = max_scalarised(sample, &eta, lam.components());
        }
    }
    Ok(FrontEnsemble {
        reference: eta,
        grid,
        lengths,
        source: Some(table),
    })
}

#[derive(Serialize)]
struct EnsembleJsonOut<'a> {
    reference: &'a [f64],
    grid: &'a DirectionGrid,
    lengths: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct EnsembleJsonIn {
    reference: Vec<f64>,
    grid: Arc<DirectionGrid>,
    lengths: Vec<Vec<f64>>,
}

impl Serialize for FrontEnsemble {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        EnsembleJsonOut {
            reference: &self.reference,
            grid: &self.grid,
            lengths: self
                .lengths
                .rows()
                .into_iter()
                .map(|r| r.to_vec())
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FrontEnsemble {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = EnsembleJsonIn::deserialize(d)?;
        FrontEnsemble::from_rows(raw.reference, raw.grid, raw.lengths)
            .map_err(serde::de::Error::custom)
    }
}
