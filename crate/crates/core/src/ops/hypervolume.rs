use crate::error::{Error, Result};
use crate::numeric::{compensated_mean, compensated_sum};
use crate::polar::{GridFront, PointFront};

use super::{front_from_points_on, Transform};
use crate::polar::DirectionGrid;

/// Largest point count accepted by the inclusion-exclusion oracle.
pub const EXACT_MAX_POINTS: usize = 12;

/// `ln Gamma(m/2 + 1)` for integer `m >= 0`, via the factorial and
/// half-integer product forms.
fn ln_gamma_half_plus_one(m: usize) -> f64 {
    if m.is_multiple_of(2) {
        // Gamma(n + 1) = n!
        (1..=m / 2).map(|i| (i as f64).ln()).sum()
    } else {
        // Gamma(k + 1/2) = sqrt(pi) * prod_{i=0}^{k-1} (i + 1/2), k = (m + 1) / 2
        let k = m.div_ceil(2);
        0.5 * std::f64::consts::PI.ln() + (0..k).map(|i| (i as f64 + 0.5).ln()).sum::<f64>()
    }
}

/// `ln c_M` where `c_M = pi^{M/2} 2^{-M} / Gamma(M/2 + 1)`.
pub(crate) fn ln_hv_constant(m: usize) -> f64 {
    let mf = m as f64;
    0.5 * mf * std::f64::consts::PI.ln() - mf * std::f64::consts::LN_2 - ln_gamma_half_plus_one(m)
}

/// Volume of the positive orthant of the unit ball in `m` dimensions.
pub fn hv_constant(m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidArgument(
            "dimension must be at least 1".into(),
        ));
    }
    Ok(ln_hv_constant(m).exp())
}

/// Grid estimate of the hypervolume dominated by `points` above the
/// reference vector: the mean over directions of `c_M s_max^M`.
pub fn hypervolume_mc(pf: &PointFront, grid: &DirectionGrid) -> Result<f64> {
    let lengths = front_from_points_on(pf, grid)?;
    Ok(mean_hv_terms(&lengths, pf.dim()))
}

/// Grid hypervolume of a polar surface.
pub fn hypervolume_of_front(front: &GridFront) -> f64 {
    mean_hv_terms(front.lengths(), front.dim())
}

pub(crate) fn mean_hv_terms(lengths: &[f64], m: usize) -> f64 {
    let t = Transform::Hypervolume { dim: m };
    compensated_mean(lengths.iter().map(|&l| t.apply(l)))
}

/// Exact hypervolume of a small point set. Two objectives use a sweep; three
/// or more use inclusion-exclusion over at most [`EXACT_MAX_POINTS`]
/// non-dominated points.
pub fn hypervolume_exact_small(pf: &PointFront) -> Result<f64> {
    let eta = pf.reference();
    // Shift to the reference and keep only points with positive volume.
    let shifted: Vec<Vec<f64>> = pf
        .points()
        .iter()
        .map(|p| p.iter().zip(eta).map(|(a, e)| a - e).collect::<Vec<f64>>())
        .filter(|p| p.iter().all(|&x| x > 0.0))
        .collect();
    let front = non_dominated(shifted);
    match eta.len() {
        1 => Ok(front.iter().map(|p| p[0]).fold(0.0, f64::max)),
        2 => Ok(sweep_2d(front)),
        _ => {
            if front.len() > EXACT_MAX_POINTS {
                return Err(Error::Unsupported(format!(
                    "exact hypervolume needs at most {EXACT_MAX_POINTS} non-dominated points in three or more \
                     dimensions, got {}",
                    front.len()
                )));
            }
            Ok(inclusion_exclusion(&front))
        }
    }
}

/// Removes points weakly dominated by another point and exact duplicates.
fn non_dominated(mut pts: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    pts.sort_by(|a, b| b.partial_cmp(a).unwrap());
    pts.dedup();
    let mut keep: Vec<Vec<f64>> = Vec::with_capacity(pts.len());
    for p in pts {
        if !keep.iter().any(|q| q.iter().zip(&p).all(|(a, b)| a >= b)) {
            keep.retain(|q| !p.iter().zip(q).all(|(a, b)| a >= b));
            keep.push(p);
        }
    }
    keep
}

fn sweep_2d(mut front: Vec<Vec<f64>>) -> f64 {
    // Non-dominated in 2-D: sorting by x descending gives y ascending.
    front.sort_by(|a, b| b[0].partial_cmp(&a[0]).unwrap());
    let mut prev_y = 0.0;
    compensated_sum(front.iter().map(|p| {
        let area = p[0] * (p[1] - prev_y);
        prev_y = p[1];
        area
    }))
}

fn inclusion_exclusion(front: &[Vec<f64>]) -> f64 {
    let n = front.len();
    let m = front.first().map_or(0, Vec::len);
    let mut terms = Vec::with_capacity((1usize << n).saturating_sub(1));
    for mask in 1u32..(1u32 << n) {
        let mut corner = vec![f64::INFINITY; m];
        for (i, p) in front.iter().enumerate() {
            if mask & (1 << i) != 0 {
                for (c, x) in corner.iter_mut().zip(p) {
                    *c = c.min(*x);
                }
            }
        }
        let vol: f64 = corner.iter().product();
        terms.push(if mask.count_ones() % 2 == 1 {
            vol
        } else {
            -vol
        });
    }
    compensated_sum(terms)
}
