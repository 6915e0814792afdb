//! Random fixtures and brute-force oracles used by the acceptance suite.

use std::sync::Arc;

use polarfront_core::ops::front_from_points;
use polarfront_core::polar::{DirectionGrid, GridFront, PointFront};
use rand::Rng;

pub fn random_points<R: Rng>(rng: &mut R, m: usize, n: usize, lo: f64, hi: f64) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..m).map(|_| rng.random_range(lo..hi)).collect())
        .collect()
}

/// Front of 1..=8 random points that all strongly dominate the origin.
pub fn random_valid_front<R: Rng>(rng: &mut R, grid: &Arc<DirectionGrid>) -> GridFront {
    let m = grid.dim();
    let n = rng.random_range(1..=8);
    let pf = PointFront::new(vec![0.0; m], random_points(rng, m, n, 0.1, 3.0)).unwrap();
    front_from_points(&pf, grid).unwrap()
}

/// Exact dominated volume by coordinate compression: sums the cells of the
/// grid spanned by all point coordinates that lie below some point.
pub fn hypervolume_by_cells(points: &[Vec<f64>], eta: &[f64]) -> f64 {
    let m = eta.len();
    let pts: Vec<&Vec<f64>> = points
        .iter()
        .filter(|p| p.iter().zip(eta).all(|(a, e)| a > e))
        .collect();
    if pts.is_empty() {
        return 0.0;
    }
    let axes: Vec<Vec<f64>> = (0..m)
        .map(|d| {
            let mut v: Vec<f64> = pts.iter().map(|p| p[d]).collect();
            v.push(eta[d]);
            v.sort_by(f64::total_cmp);
            v.dedup();
            v
        })
        .collect();
    let dims: Vec<usize> = axes.iter().map(|a| a.len() - 1).collect();
    let total: usize = dims.iter().product();
    let mut vol = 0.0;
    let mut idx = vec![0usize; m];
    for _ in 0..total {
        // Cell upper corner is dominated iff some point weakly dominates it.
        let upper: Vec<f64> = (0..m).map(|d| axes[d][idx[d] + 1]).collect();
        if pts
            .iter()
            .any(|p| p.iter().zip(&upper).all(|(a, u)| a >= u))
        {
            vol += (0..m)
                .map(|d| axes[d][idx[d] + 1] - axes[d][idx[d]])
                .product::<f64>();
        }
        for d in 0..m {
            idx[d] += 1;
            if idx[d] < dims[d] {
                break;
            }
            idx[d] = 0;
        }
    }
    vol
}
