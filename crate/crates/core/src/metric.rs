//! Finite metric instances, balls and the three clustering objectives.

use crate::rat::{self, Rat};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

pub type PointId = usize;
pub type PointSet = BTreeSet<PointId>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("distance matrix is empty")]
    Empty,
    #[error("distance matrix is not square (row {row} has {len} entries, expected {expected})")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("budget k must be at least 1")]
    ZeroBudget,
    #[error("d({i},{i}) must be 0")]
    NonzeroDiagonal { i: usize },
    #[error("d({i},{j}) is negative")]
    NegativeDistance { i: usize, j: usize },
    #[error("matrix is not symmetric at ({i},{j})")]
    AsymmetricMatrix { i: usize, j: usize },
    #[error("triangle inequality violated: d({from},{to}) > d({from},{via}) + d({via},{to})")]
    TriangleViolation { from: usize, via: usize, to: usize },
    #[error(
        "triangle inequality violated after rounding at ({from},{via},{to}); \
         use a larger denominator or supply an explicit distance matrix"
    )]
    TriangleViolationAfterRounding { from: usize, via: usize, to: usize },
    #[error("coordinates have inconsistent dimensions")]
    RaggedCoordinates,
    #[error("denominator must be at least 1")]
    ZeroDenominator,
    #[error("diameter of an empty subset")]
    EmptySubset,
}

/// Which power of the radius a ball contributes to the objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CostPower {
    Linear,
    Squared,
}

impl CostPower {
    pub fn apply(self, r: &Rat) -> Rat {
        match self {
            CostPower::Linear => r.clone(),
            CostPower::Squared => r * r,
        }
    }

    pub fn exponent(self) -> u32 {
        match self {
            CostPower::Linear => 1,
            CostPower::Squared => 2,
        }
    }
}

/// The three clustering objectives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Msr,
    Msd,
    Mssr,
}

impl Objective {
    pub const ALL: [Objective; 3] = [Objective::Msr, Objective::Msd, Objective::Mssr];

    /// Cost power used inside the Lagrangian LP.
    pub fn power(self) -> CostPower {
        match self {
            Objective::Msr | Objective::Msd => CostPower::Linear,
            Objective::Mssr => CostPower::Squared,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Objective::Msr => "msr",
            Objective::Msd => "msd",
            Objective::Mssr => "mssr",
        }
    }
}

impl std::str::FromStr for Objective {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "msr" => Ok(Objective::Msr),
            "msd" => Ok(Objective::Msd),
            "mssr" => Ok(Objective::Mssr),
            other => Err(format!("unknown objective `{other}` (expected msr, msd or mssr)")),
        }
    }
}

impl std::fmt::Display for Objective {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A closed ball `B(center, radius)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Ball {
    pub center: PointId,
    #[serde(with = "rat::serde_rat")]
    pub radius: Rat,
}

impl Ball {
    pub fn new(center: PointId, radius: Rat) -> Self {
        debug_assert!(!radius.is_negative());
        Ball { center, radius }
    }

    pub fn scaled(&self, factor: i64) -> Ball {
        Ball::new(self.center, &self.radius * rat::int(factor))
    }
}

/// A validated metric with dense exact distances and a cluster budget.
///
/// Colocated input points are collapsed to one representative; `origin`
/// records which input indices each point stands for.
#[derive(Debug, Clone)]
pub struct Instance {
    dist: Vec<Vec<Rat>>,
    k: usize,
    origin: Vec<Vec<usize>>,
}

/// First violated triple `(from, via, to)` with `d(from,to) > d(from,via) + d(via,to)`.
fn find_triangle_violation(m: &[Vec<Rat>]) -> Option<(usize, usize, usize)> {
    let n = m.len();
    for from in 0..n {
        for via in 0..n {
            for to in 0..n {
                if m[from][to] > &m[from][via] + &m[via][to] {
                    return Some((from, via, to));
                }
            }
        }
    }
    None
}

fn check_shape_and_signs(raw: &[Vec<Rat>]) -> Result<(), MetricError> {
    let n = raw.len();
    if n == 0 {
        return Err(MetricError::Empty);
    }
    for (row, r) in raw.iter().enumerate() {
        if r.len() != n {
            return Err(MetricError::NotSquare { row, len: r.len(), expected: n });
        }
    }
    for i in 0..n {
        if !raw[i][i].is_zero() {
            return Err(MetricError::NonzeroDiagonal { i });
        }
        for j in 0..n {
            if raw[i][j].is_negative() {
                return Err(MetricError::NegativeDistance { i, j });
            }
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if raw[i][j] != raw[j][i] {
                return Err(MetricError::AsymmetricMatrix { i, j });
            }
        }
    }
    Ok(())
}

/// Checks every metric axiom exactly and collapses colocated points.
pub fn validate_instance(raw: Vec<Vec<Rat>>, k: usize) -> Result<Instance, MetricError> {
    if k == 0 {
        return Err(MetricError::ZeroBudget);
    }
    check_shape_and_signs(&raw)?;
    if let Some((from, via, to)) = find_triangle_violation(&raw) {
        return Err(MetricError::TriangleViolation { from, via, to });
    }
    let n = raw.len();
    let mut rep: Vec<Option<usize>> = vec![None; n];
    let mut origin: Vec<Vec<usize>> = Vec::new();
    let mut keep = Vec::new();
    for i in 0..n {
        if rep[i].is_some() {
            continue;
        }
        let id = origin.len();
        let mut group = vec![i];
        rep[i] = Some(id);
        for j in (i + 1)..n {
            if rep[j].is_none() && raw[i][j].is_zero() {
                rep[j] = Some(id);
                group.push(j);
            }
        }
        origin.push(group);
        keep.push(i);
    }
    let dist = keep
        .iter()
        .map(|&i| keep.iter().map(|&j| raw[i][j].clone()).collect())
        .collect();
    Ok(Instance { dist, k, origin })
}

impl Instance {
    pub fn n(&self) -> usize {
        self.dist.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Same metric with a different budget.
    pub fn with_k(&self, k: usize) -> Instance {
        assert!(k >= 1);
        Instance { k, ..self.clone() }
    }

    /// Sub-metric on `subset` (ascending ids) with budget `k`, plus the map
    /// back to ids of `self`.
    pub fn restrict(&self, subset: &PointSet, k: usize) -> (Instance, Vec<PointId>) {
        assert!(!subset.is_empty() && k >= 1);
        let ids: Vec<PointId> = subset.iter().copied().collect();
        let dist = ids.iter().map(|&i| ids.iter().map(|&j| self.dist[i][j].clone()).collect()).collect();
        let origin = ids.iter().map(|&i| self.origin[i].clone()).collect();
        (Instance { dist, k, origin }, ids)
    }

    pub fn d(&self, i: PointId, j: PointId) -> &Rat {
        &self.dist[i][j]
    }

    pub fn matrix(&self) -> &[Vec<Rat>] {
        &self.dist
    }

    /// Input indices collapsed into point `i`.
    pub fn origin(&self, i: PointId) -> &[usize] {
        &self.origin[i]
    }

    /// Number of points before colocated points were merged.
    pub fn input_len(&self) -> usize {
        self.origin.iter().map(Vec::len).sum()
    }

    pub fn all_points(&self) -> PointSet {
        (0..self.n()).collect()
    }

    /// Distinct distance values of the whole metric, ascending (0 included).
    pub fn distinct_distances(&self) -> Vec<Rat> {
        let mut v: Vec<Rat> = self
            .dist
            .iter()
            .flat_map(|row| row.iter().cloned())
            .collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn contains(&self, b: &Ball, j: PointId) -> bool {
        self.dist[b.center][j] <= b.radius
    }

    /// Points of `within` lying in the closed ball.
    pub fn members_in(&self, b: &Ball, within: &PointSet) -> PointSet {
        within.iter().copied().filter(|&j| self.contains(b, j)).collect()
    }

    /// Whether two balls share a point of `within`.
    pub fn intersect_in(&self, a: &Ball, b: &Ball, within: &PointSet) -> bool {
        within.iter().any(|&j| self.contains(a, j) && self.contains(b, j))
    }
}

/// All points within `b.radius` of `b.center`.
pub fn ball_members(inst: &Instance, b: &Ball) -> PointSet {
    (0..inst.n()).filter(|&j| inst.contains(b, j)).collect()
}

/// `Σ rᵖ` over a ball list.
pub fn cost(balls: &[Ball], power: CostPower) -> Rat {
    balls
        .iter()
        .fold(Rat::zero(), |acc, b| acc + power.apply(&b.radius))
}

pub fn diameter(inst: &Instance, subset: &PointSet) -> Result<Rat, MetricError> {
    if subset.is_empty() {
        return Err(MetricError::EmptySubset);
    }
    let mut best = Rat::zero();
    for &a in subset {
        for &b in subset.range(a..) {
            if inst.d(a, b) > &best {
                best = inst.d(a, b).clone();
            }
        }
    }
    Ok(best)
}

pub fn covers(inst: &Instance, balls: &[Ball]) -> bool {
    (0..inst.n()).all(|j| balls.iter().any(|b| inst.contains(b, j)))
}

/// Canonical ball order: radius descending, then center ascending.
pub fn canonical_order(a: &Ball, b: &Ball) -> std::cmp::Ordering {
    b.radius.cmp(&a.radius).then(a.center.cmp(&b.center))
}

/// Every ball centered in `restrict` whose radius is 0 or a distance to
/// another point of `restrict`, capped at `cap`, in canonical order.
pub fn candidate_balls(inst: &Instance, restrict: &PointSet, cap: &Rat) -> Vec<Ball> {
    let mut out = Vec::new();
    for &i in restrict {
        let mut radii: Vec<Rat> = restrict
            .iter()
            .map(|&j| inst.d(i, j).clone())
            .filter(|r| r <= cap)
            .collect();
        radii.sort();
        radii.dedup();
        out.extend(radii.into_iter().map(|r| Ball::new(i, r)));
    }
    out.sort_by(canonical_order);
    out
}

/// Pairwise Euclidean distances rounded to the nearest multiple of `1/denom`.
///
/// The rounded matrix is re-checked; rounding can break the triangle
/// inequality for nearly-collinear triples.
pub fn rationalize_euclidean(coords: &[Vec<f64>], denom: u64) -> Result<Vec<Vec<Rat>>, MetricError> {
    if denom == 0 {
        return Err(MetricError::ZeroDenominator);
    }
    if coords.is_empty() {
        return Err(MetricError::Empty);
    }
    let dim = coords[0].len();
    if coords.iter().any(|c| c.len() != dim) {
        return Err(MetricError::RaggedCoordinates);
    }
    let n = coords.len();
    let den = num_bigint::BigInt::from(denom);
    let mut m = vec![vec![Rat::zero(); n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d2: f64 = coords[i]
                .iter()
                .zip(&coords[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            let scaled = (d2.sqrt() * denom as f64).round();
            let num = num_bigint::BigInt::from(scaled as i128);
            let r = Rat::new(num, den.clone());
            m[i][j] = r.clone();
            m[j][i] = r;
        }
    }
    if let Some((from, via, to)) = find_triangle_violation(&m) {
        return Err(MetricError::TriangleViolationAfterRounding { from, via, to });
    }
    Ok(m)
}

/// Integer line metric `d(i,j) = |cᵢ − cⱼ|`.
pub fn line_metric(coords: &[i64]) -> Vec<Vec<Rat>> {
    coords
        .iter()
        .map(|a| coords.iter().map(|b| rat::int((a - b).abs())).collect())
        .collect()
}
