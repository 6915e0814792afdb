use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::numeric::{compensated_mean, labelled_rng};
use crate::ops::lengths_of_points;
use crate::polar::{check_finite, max_scalarised, DirectionGrid, BOUNDARY_TOL};
use crate::stats::FrontEnsemble;

/// Bootstrap front distribution for one period: each row is the front of a
/// same-size resample (with replacement) of the period's days.
#[derive(Debug, Clone)]
pub struct PeriodEnsemble {
    pub label: String,
    /// Daily vectors of the period; `None` marks an unobserved component.
    pub days: Vec<Vec<Option<f64>>>,
    /// Day indices of each resample.
    pub resamples: Vec<Vec<usize>>,
    /// Fronts over all objectives, built from resampled days that observe
    /// every objective.
    pub ensemble: FrontEnsemble,
}

impl PeriodEnsemble {
    /// Points of resample `b` restricted to `indices`, skipping days that miss
    /// any of them.
    pub fn resample_points(&self, b: usize, indices: &[usize]) -> Vec<Vec<f64>> {
        observed_points(&self.days, &self.resamples[b], indices)
    }
}

fn observed_points(
    days: &[Vec<Option<f64>>],
    resample: &[usize],
    indices: &[usize],
) -> Vec<Vec<f64>> {
    resample
        .iter()
        .filter_map(|&d| {
            indices
                .iter()
                .map(|&i| days[d][i])
                .collect::<Option<Vec<f64>>>()
        })
        .collect()
}

/// Day-bootstrap ensemble of `rounds` resamples. The resampling stream is
/// derived from `seed` and `label`.
pub fn period_front_ensemble(
    label: &str,
    days: Vec<Vec<f64>>,
    eta: Vec<f64>,
    grid: Arc<DirectionGrid>,
    rounds: usize,
    seed: u64,
) -> Result<PeriodEnsemble> {
    let partial = days
        .into_iter()
        .map(|d| d.into_iter().map(Some).collect())
        .collect();
    period_front_ensemble_partial(label, partial, eta, grid, rounds, seed)
}

/// As [`period_front_ensemble`] for days with unobserved components.
pub fn period_front_ensemble_partial(
    label: &str,
    days: Vec<Vec<Option<f64>>>,
    eta: Vec<f64>,
    grid: Arc<DirectionGrid>,
    rounds: usize,
    seed: u64,
) -> Result<PeriodEnsemble> {
    if rounds == 0 {
        return invalid("bootstrap needs at least one round");
    }
    if days.is_empty() {
        return invalid(format!("period {label:?} has no days"));
    }
    let mut rng = labelled_rng(seed, &format!("period-bootstrap/{label}"));
    let n = days.len();
    let resamples = (0..rounds)
        .map(|_| (0..n).map(|_| rng.random_range(0..n)).collect())
        .collect();
    ensemble_from_resamples(label, days, eta, grid, resamples)
}

/// Builds a period ensemble from explicit resample indices.
pub fn ensemble_from_resamples(
    label: &str,
    days: Vec<Vec<Option<f64>>>,
    eta: Vec<f64>,
    grid: Arc<DirectionGrid>,
    resamples: Vec<Vec<usize>>,
) -> Result<PeriodEnsemble> {
    let m = eta.len();
    check_finite("reference", &eta)?;
    if grid.dim() != m {
        return invalid(format!(
            "grid has dimension {} but the reference has {m}",
            grid.dim()
        ));
    }
    if days.iter().any(|d| d.len() != m) {
        return invalid("daily vectors do not match the reference dimension");
    }
    if resamples.is_empty() || resamples.iter().flatten().any(|&i| i >= days.len()) {
        return invalid("resample indices are empty or out of range");
    }
    let all: Vec<usize> = (0..m).collect();
    let rows = resamples
        .iter()
        .map(|r| lengths_of_points(&observed_points(&days, r, &all), &eta, &grid))
        .collect();
    let ensemble = FrontEnsemble::from_rows(eta, grid, rows)?;
    Ok(PeriodEnsemble {
        label: label.to_string(),
        days,
        resamples,
        ensemble,
    })
}

/// Polar evaluation lattice: every direction paired with every radius.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationLattice {
    pub directions: Vec<Vec<f64>>,
    pub radii: Vec<f64>,
}

impl EvaluationLattice {
    pub fn new(grid: &DirectionGrid, radii: Vec<f64>) -> Result<Self> {
        if radii.is_empty() || radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return invalid("radii must be a non-empty list of positive values");
        }
        Ok(Self {
            directions: grid.iter().map(|d| d.components().to_vec()).collect(),
            radii,
        })
    }

    /// Radii at the given fractions of `max_length`.
    pub fn from_fractions(
        grid: &DirectionGrid,
        max_length: f64,
        fractions: &[f64],
    ) -> Result<Self> {
        Self::new(grid, fractions.iter().map(|f| f * max_length).collect())
    }

    /// The lattice point `eta + r lam`.
    pub fn point(&self, eta: &[f64], k: usize, r: usize) -> Vec<f64> {
        eta.iter()
            .zip(&self.directions[k])
            .map(|(e, d)| e + self.radii[r] * d)
            .collect()
    }
}

/// Domination probabilities of a pair of objectives on a polar lattice.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominationMap {
    pub pair: (usize, usize),
    pub reference: Vec<f64>,
    pub lattice: EvaluationLattice,
    /// `values[k][r]` at direction `k` and radius `r`.
    pub values: Vec<Vec<f64>>,
}

/// Probability that each lattice point is dominated by the two-objective front
/// of a resample, using only days that observe both objectives. Lattice points
/// lie on their own optimal direction, so lengths are exact.
pub fn pairwise_domination_map(
    pe: &PeriodEnsemble,
    pair: (usize, usize),
    lattice: &EvaluationLattice,
) -> Result<DominationMap> {
    let m = pe.ensemble.dim();
    let (i, j) = pair;
    if i == j || i >= m || j >= m {
        return invalid(format!(
            "invalid objective pair ({i}, {j}) for dimension {m}"
        ));
    }
    if lattice.directions.iter().any(|d| d.len() != 2) {
        return invalid("the evaluation lattice must use two-dimensional directions");
    }
    let eta = vec![pe.ensemble.reference()[i], pe.ensemble.reference()[j]];
    let rows: Vec<Vec<Vec<f64>>> = (0..pe.resamples.len())
        .map(|b| pe.resample_points(b, &[i, j]))
        .collect();
    let values = lattice
        .directions
        .iter()
        .map(|lam| {
            let lengths: Vec<f64> = rows
                .iter()
                .map(|pts| max_scalarised(pts, &eta, lam))
                .collect();
            lattice
                .radii
                .iter()
                .map(|&r| {
                    lengths.iter().filter(|&&l| l >= r - BOUNDARY_TOL).count() as f64
                        / lengths.len() as f64
                })
                .collect()
        })
        .collect();
    Ok(DominationMap {
        pair,
        reference: eta,
        lattice: lattice.clone(),
        values,
    })
}

/// Pointwise change between two maps on the same lattice, split into the
/// averages of its negative and positive parts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignedChanges {
    pub mean_negative: f64,
    pub mean_positive: f64,
    /// `|mean_negative| + mean_positive`.
    pub mean_absolute: f64,
    /// `after - before`, indexed like the map values.
    pub field: Vec<Vec<f64>>,
}

pub fn signed_yearly_changes(
    before: &DominationMap,
    after: &DominationMap,
) -> Result<SignedChanges> {
    if before.lattice != after.lattice
        || before.reference != after.reference
        || before.pair != after.pair
    {
        return invalid("maps are evaluated on different lattices");
    }
    let field: Vec<Vec<f64>> = before
        .values
        .iter()
        .zip(&after.values)
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| y - x).collect())
        .collect();
    let flat = || field.iter().flatten().copied();
    let mean_negative = compensated_mean(flat().map(|d| d.min(0.0)));
    let mean_positive = compensated_mean(flat().map(|d| d.max(0.0)));
    Ok(SignedChanges {
        mean_negative,
        mean_positive,
        mean_absolute: mean_positive - mean_negative,
        field,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::front_from_points;
    use crate::polar::{equi_angular_grid_2d, sample_directions, PointFront};

    fn days() -> Vec<Vec<f64>> {
        vec![
            vec![1.0, 3.0, 2.0],
            vec![2.0, 2.0, 2.5],
            vec![3.0, 1.0, 1.0],
            vec![1.5, 1.5, 3.0],
        ]
    }

    #[test]
    fn identity_resample_reproduces_full_front() {
        let grid = Arc::new(sample_directions(3, 64, 3).unwrap());
        let partial = days()
            .into_iter()
            .map(|d| d.into_iter().map(Some).collect())
            .collect();
        let pe = ensemble_from_resamples(
            "p",
            partial,
            vec![0.0; 3],
            grid.clone(),
            vec![vec![0, 1, 2, 3]],
        )
        .unwrap();
        let pf = PointFront::new(vec![0.0; 3], days()).unwrap();
        assert_eq!(pe.ensemble.row(0), front_from_points(&pf, &grid).unwrap());
    }

    #[test]
    fn rows_never_exceed_full_front() {
        let grid = Arc::new(sample_directions(3, 64, 3).unwrap());
        let pe = period_front_ensemble("2020", days(), vec![0.0; 3], grid.clone(), 30, 11).unwrap();
        let full =
            front_from_points(&PointFront::new(vec![0.0; 3], days()).unwrap(), &grid).unwrap();
        for row in pe.ensemble.rows() {
            assert!(row
                .lengths()
                .iter()
                .zip(full.lengths())
                .all(|(a, b)| a <= b));
        }
        let one = period_front_ensemble(
            "x",
            vec![days()[0].clone()],
            vec![0.0; 3],
            grid.clone(),
            5,
            1,
        )
        .unwrap();
        let single = front_from_points(
            &PointFront::new(vec![0.0; 3], vec![days()[0].clone()]).unwrap(),
            &grid,
        )
        .unwrap();
        assert!(one.ensemble.rows().all(|r| r == single));
        assert!(period_front_ensemble("x", days(), vec![0.0; 3], grid, 0, 1).is_err());
    }

    #[test]
    fn bootstrap_depends_on_label_and_seed_only() {
        let grid = Arc::new(sample_directions(3, 8, 3).unwrap());
        let a = period_front_ensemble("2020", days(), vec![0.0; 3], grid.clone(), 10, 5).unwrap();
        let b = period_front_ensemble("2020", days(), vec![0.0; 3], grid.clone(), 10, 5).unwrap();
        let c = period_front_ensemble("2021", days(), vec![0.0; 3], grid, 10, 5).unwrap();
        assert_eq!(a.resamples, b.resamples);
        assert_ne!(a.resamples, c.resamples);
    }

    #[test]
    fn maps_are_bounded_and_monotone() {
        let grid = Arc::new(sample_directions(3, 16, 3).unwrap());
        let pe = period_front_ensemble("p", days(), vec![0.0; 3], grid, 40, 2).unwrap();
        let lat = EvaluationLattice::from_fractions(
            &equi_angular_grid_2d(9).unwrap(),
            4.0,
            &[0.05, 0.25, 0.5, 0.75, 1.0],
        )
        .unwrap();
        let map = pairwise_domination_map(&pe, (0, 2), &lat).unwrap();
        for ray in &map.values {
            assert_eq!(ray[0], 1.0);
            assert!(ray.windows(2).all(|w| w[0] >= w[1]));
            assert!(ray.iter().all(|p| (0.0..=1.0).contains(p)));
        }
        assert!(pairwise_domination_map(&pe, (1, 1), &lat).is_err());
        assert!(pairwise_domination_map(&pe, (0, 3), &lat).is_err());
    }

    #[test]
    fn partial_days_are_dropped_per_pair() {
        let grid = Arc::new(equi_angular_grid_2d(4).unwrap());
        let grid3 = Arc::new(sample_directions(3, 4, 1).unwrap());
        let days = vec![
            vec![Some(1.0), Some(1.0), None],
            vec![Some(5.0), Some(5.0), Some(5.0)],
        ];
        let pe = ensemble_from_resamples("p", days, vec![0.0; 3], grid3, vec![vec![0, 0]]).unwrap();
        // The only resampled day misses objective 2: the full front is degenerate
        // but the (0, 1) pair still sees it.
        assert!(pe.ensemble.row(0).is_degenerate());
        let lat = EvaluationLattice::new(&grid, vec![1.0]).unwrap();
        let map = pairwise_domination_map(&pe, (0, 1), &lat).unwrap();
        assert!(map.values.iter().all(|v| v[0] == 1.0));
    }

    #[test]
    fn signed_change_fixtures() {
        let lat =
            EvaluationLattice::new(&equi_angular_grid_2d(3).unwrap(), vec![1.0, 2.0]).unwrap();
        let a = DominationMap {
            pair: (0, 1),
            reference: vec![0.0, 0.0],
            lattice: lat.clone(),
            values: vec![vec![0.5, 0.3]; 3],
        };
        let same = signed_yearly_changes(&a, &a).unwrap();
        assert_eq!((same.mean_negative, same.mean_positive), (0.0, 0.0));
        let mut b = a.clone();
        b.values = vec![vec![0.4, 0.2]; 3];
        let s = signed_yearly_changes(&a, &b).unwrap();
        assert!((s.mean_negative + 0.1).abs() < 1e-12 && s.mean_positive == 0.0);
        let mut c = a.clone();
        c.values = vec![vec![0.9, 0.1]; 3];
        let s = signed_yearly_changes(&a, &c).unwrap();
        let mean_abs: f64 = s.field.iter().flatten().map(|d| d.abs()).sum::<f64>() / 6.0;
        assert!((s.mean_absolute - mean_abs).abs() < 1e-12);
        let mut d = a.clone();
        d.lattice.radii = vec![1.0, 3.0];
        assert!(signed_yearly_changes(&a, &d).is_err());
    }
}
