use std::f64::consts::FRAC_PI_2;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{invalid, Error, Result};
use crate::numeric::{l2_norm, rng_from_seed};

/// Tolerance on the Euclidean norm of a direction.
pub const UNIT_NORM_TOL: f64 = 1e-12;

/// Smallest component accepted when sampling directions. Scalarisation
/// divides by each component, so near-zero components are redrawn.
pub const POSITIVITY_FLOOR: f64 = 1e-9;

/// A positive unit vector: every component strictly positive, unit L2 norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Direction(Vec<f64>);

impl Direction {
    /// Wraps components that already form a positive unit vector.
    pub fn new(components: Vec<f64>) -> Result<Self> {
        check_positive(&components)?;
        let norm = l2_norm(&components);
        if (norm - 1.0).abs() > UNIT_NORM_TOL {
            return invalid(format!(
                "direction norm {norm} is not 1 within {UNIT_NORM_TOL}"
            ));
        }
        Ok(Self(components))
    }

    /// Normalises a strictly positive vector onto the unit sphere.
    pub fn normalized(v: Vec<f64>) -> Result<Self> {
        check_positive(&v)?;
        let norm = l2_norm(&v);
        Ok(Self(v.into_iter().map(|x| x / norm).collect()))
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn dot(&self, other: &Direction) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    /// Angle in radians between two directions.
    pub fn angle_to(&self, other: &Direction) -> f64 {
        self.dot(other).clamp(-1.0, 1.0).acos()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl TryFrom<Vec<f64>> for Direction {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Direction::new(v)
    }
}

impl From<Direction> for Vec<f64> {
    fn from(d: Direction) -> Self {
        d.0
    }
}

impl AsRef<[f64]> for Direction {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

fn check_positive(v: &[f64]) -> Result<()> {
    if v.is_empty() {
        return invalid("direction must have at least one component");
    }
    if let Some(x) = v.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
        return invalid(format!(
            "direction components must be finite and > 0, got {x}"
        ));
    }
    Ok(())
}

/// How a direction grid was generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridScheme {
    /// Midpoint rule in angle over the positive quarter circle.
    #[serde(rename = "equi-angular-2d")]
    EquiAngular2d,
    /// Absolute values of normalised Gaussian draws.
    GaussianAbsMc,
    UserSupplied,
}

/// An ordered, finite set of positive unit vectors shared by fronts and
/// ensembles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid")]
pub struct DirectionGrid {
    scheme: GridScheme,
    seed: Option<u64>,
    directions: Vec<Direction>,
}

#[derive(Deserialize)]
struct RawGrid {
    scheme: GridScheme,
    #[serde(default)]
    seed: Option<u64>,
    directions: Vec<Direction>,
}

impl TryFrom<RawGrid> for DirectionGrid {
    type Error = Error;

    fn try_from(raw: RawGrid) -> Result<Self> {
        DirectionGrid::from_parts(raw.scheme, raw.seed, raw.directions)
    }
}

impl DirectionGrid {
    fn from_parts(
        scheme: GridScheme,
        seed: Option<u64>,
        directions: Vec<Direction>,
    ) -> Result<Self> {
        let Some(first) = directions.first() else {
            return invalid("a direction grid needs at least one direction");
        };
        let m = first.dim();
        if directions.iter().any(|d| d.dim() != m) {
            return invalid("all grid directions must share one dimension");
        }
        Ok(Self {
            scheme,
            seed,
            directions,
        })
    }

    /// A grid from caller-provided directions, kept in the given order.
    pub fn user_supplied(directions: Vec<Direction>) -> Result<Self> {
        Self::from_parts(GridScheme::UserSupplied, None, directions)
    }

    /// The single-direction grid of the one-dimensional sphere `{(1)}`.
    pub fn unit_1d() -> Self {
        Self {
            scheme: GridScheme::UserSupplied,
            seed: None,
            directions: vec![Direction(vec![1.0])],
        }
    }

    pub fn scheme(&self) -> GridScheme {
        self.scheme
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn directions(&self) -> &[Direction] {
        &self.directions
    }

    pub fn get(&self, k: usize) -> &Direction {
        &self.directions[k]
    }

    /// Number of directions K.
    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    /// Dimension M of the objective space.
    pub fn dim(&self) -> usize {
        self.directions[0].dim()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Direction> {
        self.directions.iter()
    }

    /// Index of the grid direction closest in angle to `lam`, with the angle.
    pub fn nearest(&self, lam: &Direction) -> (usize, f64) {
        let (idx, dot) = self
            .directions
            .iter()
            .enumerate()
            .map(|(k, d)| (k, d.dot(lam)))
            .fold((0, f64::NEG_INFINITY), |best, cur| {
                if cur.1 > best.1 {
                    cur
                } else {
                    best
                }
            });
        (idx, dot.clamp(-1.0, 1.0).acos())
    }

    /// Hex SHA-256 of the canonical JSON encoding; identifies a grid in
    /// ensemble CSV headers.
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_vec(self).expect("grid serialises");
        let digest = Sha256::digest(&json);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Monte-Carlo grid: uniform on the positive orthant of the sphere, obtained
/// from absolute values of normalised standard-normal draws. Draws with any
/// component below [`POSITIVITY_FLOOR`] are rejected.
pub fn sample_directions(m: usize, k: usize, seed: u64) -> Result<DirectionGrid> {
    if m < 2 {
        return invalid(format!("sample_directions needs M >= 2, got {m}"));
    }
    if k < 1 {
        return invalid("sample_directions needs K >= 1");
    }
    let mut rng = rng_from_seed(seed);
    let mut directions = Vec::with_capacity(k);
    let mut buf = vec![0.0; m];
    while directions.len() < k {
        for x in buf.iter_mut() {
            let z: f64 = StandardNormal.sample(&mut rng);
            *x = z.abs();
        }
        let norm = l2_norm(&buf);
        if norm == 0.0 {
            continue;
        }
        let unit: Vec<f64> = buf.iter().map(|x| x / norm).collect();
        if unit.iter().any(|&x| x < POSITIVITY_FLOOR) {
            continue;
        }
        directions.push(Direction(unit));
    }
    Ok(DirectionGrid {
        scheme: GridScheme::GaussianAbsMc,
        seed: Some(seed),
        directions,
    })
}

/// Two-dimensional grid with angles `(k - 1/2) (pi/2) / K`, k = 1..K.
pub fn equi_angular_grid_2d(k: usize) -> Result<DirectionGrid> {
    if k < 1 {
        return invalid("equi_angular_grid_2d needs K >= 1");
    }
    let step = FRAC_PI_2 / k as f64;
    let directions = (0..k)
        .map(|i| {
            let theta = (i as f64 + 0.5) * step;
            Direction(vec![theta.cos(), theta.sin()])
        })
        .collect();
    Ok(DirectionGrid {
        scheme: GridScheme::EquiAngular2d,
        seed: None,
        directions,
    })
}
