//! Exact brute-force optima by dynamic programming over point subsets.
//!
//! Distances are scaled to integers by the common denominator when they
//! fit comfortably in `u128`, otherwise the same recurrences run on exact
//! rationals.

use crate::metric::{Ball, CostPower, Instance, PointId, PointSet};
use crate::rat::Rat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use std::ops::Add;
use thiserror::Error;

pub const MAX_COVER_POINTS: usize = 16;
pub const MAX_PARTITION_POINTS: usize = 14;
pub const MAX_KCENTER_POINTS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance has {n} points, oracle limit is {limit}")]
    InstanceTooLarge { n: usize, limit: usize },
}

#[derive(Debug, Clone)]
pub struct BallCover {
    pub value: Rat,
    pub balls: Vec<Ball>,
}

#[derive(Debug, Clone)]
pub struct PartitionOpt {
    pub value: Rat,
    pub clusters: Vec<PointSet>,
}

trait DpCost: Clone + Ord + Add<Output = Self> {
    fn zero() -> Self;
}

impl DpCost for u128 {
    fn zero() -> Self {
        0
    }
}

impl DpCost for Rat {
    fn zero() -> Self {
        <Rat as Zero>::zero()
    }
}

/// Integer image of the metric: `d · scale` for every pair.
struct Scaled {
    scale: BigInt,
    d: Vec<Vec<u128>>,
}

const SCALED_LIMIT: u128 = 1 << 40;

fn scaled(inst: &Instance) -> Option<Scaled> {
    let n = inst.n();
    let mut scale = BigInt::one();
    for i in 0..n {
        for j in 0..n {
            scale = scale.lcm(inst.d(i, j).denom());
        }
    }
    let mut d = vec![vec![0u128; n]; n];
    for i in 0..n {
        for j in 0..n {
            let v = inst.d(i, j).numer() * (&scale / inst.d(i, j).denom());
            let v = v.to_u128()?;
            if v > SCALED_LIMIT {
                return None;
            }
            d[i][j] = v;
        }
    }
    Some(Scaled { scale, d })
}

fn unscale(v: u128, scale: &BigInt, power: u32) -> Rat {
    Rat::new(BigInt::from(v), num_traits::pow(scale.clone(), power as usize))
}

fn mask_of(set: impl IntoIterator<Item = usize>) -> usize {
    set.into_iter().fold(0, |m, i| m | 1 << i)
}

/// Candidate balls `(i, d(i,j))`, one per distinct radius, with member masks.
fn cover_balls(inst: &Instance) -> Vec<(Ball, usize)> {
    let n = inst.n();
    let mut out = Vec::new();
    for i in 0..n {
        let mut radii: Vec<Rat> = (0..n).map(|j| inst.d(i, j).clone()).collect();
        radii.sort();
        radii.dedup();
        for r in radii {
            let m = mask_of((0..n).filter(|&j| inst.d(i, j) <= &r));
            out.push((Ball::new(i, r), m));
        }
    }
    out
}

/// `f[t][S]`: cheapest cover of ⊇ S with at most `t` balls. Returns the
/// optimum over `t ≤ k` and the chosen ball indices using the fewest balls.
fn cover_dp<T: DpCost>(n: usize, masks: &[usize], costs: &[T], k: usize) -> (T, Vec<usize>) {
    let full = (1usize << n) - 1;
    let size = 1usize << n;
    const INHERIT: u32 = u32::MAX;
    let mut f: Vec<Vec<Option<T>>> = vec![vec![None; size]];
    f[0][0] = Some(T::zero());
    let mut choice: Vec<Vec<u32>> = vec![vec![INHERIT; size]];
    let mut by_low: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (b, &m) in masks.iter().enumerate() {
        for (p, list) in by_low.iter_mut().enumerate() {
            if m >> p & 1 == 1 {
                list.push(b);
            }
        }
    }
    let tmax = k.min(n);
    for t in 1..=tmax {
        let prev = &f[t - 1];
        let mut cur: Vec<Option<T>> = prev.clone();
        let mut ch = vec![INHERIT; size];
        for s in 1..size {
            let low = s.trailing_zeros() as usize;
            for &b in &by_low[low] {
                let rest = s & !masks[b];
                if let Some(base) = &prev[rest] {
                    let cand = base.clone() + costs[b].clone();
                    if cur[s].as_ref().is_none_or(|c| cand < *c) {
                        cur[s] = Some(cand);
                        ch[s] = b as u32;
                    }
                }
            }
        }
        f.push(cur);
        choice.push(ch);
    }
    let best = f[tmax][full].clone().expect("singleton balls always cover");
    let t_star = (0..=tmax).find(|&t| f[t][full].as_ref() == Some(&best)).unwrap();
    let mut picked = Vec::new();
    let (mut t, mut s) = (t_star, full);
    while s != 0 {
        let c = choice[t][s];
        if c != INHERIT {
            picked.push(c as usize);
            s &= !masks[c as usize];
        }
        t -= 1;
    }
    (best, picked)
}

/// Exact minimum of `Σ rᵖ` over covers of X by at most `k` balls. Among
/// optimal covers the returned witness uses the fewest balls.
pub fn opt_ball_cover(inst: &Instance, k: usize, power: CostPower) -> Result<BallCover, OracleError> {
    let n = inst.n();
    if n > MAX_COVER_POINTS {
        return Err(OracleError::InstanceTooLarge { n, limit: MAX_COVER_POINTS });
    }
    let balls = cover_balls(inst);
    let masks: Vec<usize> = balls.iter().map(|(_, m)| *m).collect();
    let (value, picked) = match scaled(inst) {
        Some(sc) => {
            let costs: Vec<u128> = balls
                .iter()
                .map(|(b, _)| {
                    let j = (0..n).find(|&j| inst.d(b.center, j) == &b.radius).unwrap();
                    let v = sc.d[b.center][j];
                    match power {
                        CostPower::Linear => v,
                        CostPower::Squared => v * v,
                    }
                })
                .collect();
            let (v, p) = cover_dp(n, &masks, &costs, k);
            (unscale(v, &sc.scale, power.exponent()), p)
        }
        None => {
            let costs: Vec<Rat> = balls.iter().map(|(b, _)| power.apply(&b.radius)).collect();
            cover_dp(n, &masks, &costs, k)
        }
    };
    let mut out: Vec<Ball> = picked.into_iter().map(|b| balls[b].0.clone()).collect();
    out.sort_by(crate::metric::canonical_order);
    Ok(BallCover { value, balls: out })
}

fn partition_dp<T: DpCost>(n: usize, diam: &[T], k: usize) -> (T, Vec<usize>) {
    let size = 1usize << n;
    let full = size - 1;
    let mut h: Vec<Vec<Option<T>>> = vec![vec![None; size]];
    h[0][0] = Some(T::zero());
    let mut choice: Vec<Vec<usize>> = vec![vec![0; size]];
    let tmax = k.min(n);
    for t in 1..=tmax {
        let prev = &h[t - 1];
        let mut cur = prev.clone();
        let mut ch = vec![0usize; size];
        for s in 1..size {
            let lowbit = s & s.wrapping_neg();
            let rest = s & !lowbit;
            let mut sub = rest;
            loop {
                let part = sub | lowbit;
                if let Some(base) = &prev[s & !part] {
                    let cand = base.clone() + diam[part].clone();
                    if cur[s].as_ref().is_none_or(|c| cand < *c) {
                        cur[s] = Some(cand);
                        ch[s] = part;
                    }
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
        }
        h.push(cur);
        choice.push(ch);
    }
    let best = h[tmax][full].clone().expect("singletons always partition");
    let t_star = (0..=tmax).find(|&t| h[t][full].as_ref() == Some(&best)).unwrap();
    let mut parts = Vec::new();
    let (mut t, mut s) = (t_star, full);
    while s != 0 {
        let p = choice[t][s];
        if p != 0 {
            parts.push(p);
            s &= !p;
        }
        t -= 1;
    }
    (best, parts)
}

fn subset_diameters<T: DpCost>(n: usize, d: impl Fn(usize, usize) -> T) -> Vec<T> {
    let size = 1usize << n;
    let mut diam = vec![T::zero(); size];
    for s in 1..size {
        let low = s.trailing_zeros() as usize;
        let rest = s & (s - 1);
        let mut best = diam[rest].clone();
        let mut r = rest;
        while r != 0 {
            let j = r.trailing_zeros() as usize;
            let v = d(low, j);
            if v > best {
                best = v;
            }
            r &= r - 1;
        }
        diam[s] = best;
    }
    diam
}

/// Exact minimum total diameter over partitions of X into at most `k` parts.
pub fn opt_partition_msd(inst: &Instance, k: usize) -> Result<PartitionOpt, OracleError> {
    let n = inst.n();
    if n > MAX_PARTITION_POINTS {
        return Err(OracleError::InstanceTooLarge { n, limit: MAX_PARTITION_POINTS });
    }
    let (value, parts) = match scaled(inst) {
        Some(sc) => {
            let diam = subset_diameters(n, |a, b| sc.d[a][b]);
            let (v, p) = partition_dp(n, &diam, k);
            (unscale(v, &sc.scale, 1), p)
        }
        None => {
            let diam = subset_diameters(n, |a, b| inst.d(a, b).clone());
            partition_dp(n, &diam, k)
        }
    };
    let mut clusters: Vec<PointSet> = parts
        .into_iter()
        .map(|m| (0..n).filter(|&i| m >> i & 1 == 1).collect())
        .collect();
    clusters.sort();
    Ok(PartitionOpt { value, clusters })
}

/// Minimum number of balls of radius `r` centered in `pts` covering `pts`.
fn min_centers(inst: &Instance, pts: &[PointId], r: &Rat) -> usize {
    let m = pts.len();
    let masks: Vec<usize> = pts
        .iter()
        .map(|&c| mask_of((0..m).filter(|&j| inst.d(c, pts[j]) <= r)))
        .collect();
    let size = 1usize << m;
    let mut g = vec![usize::MAX; size];
    g[0] = 0;
    for s in 1..size {
        let low = s.trailing_zeros() as usize;
        for mk in &masks {
            if mk >> low & 1 == 1 {
                let prev = g[s & !mk];
                if prev != usize::MAX && prev + 1 < g[s] {
                    g[s] = prev + 1;
                }
            }
        }
    }
    g[size - 1]
}

/// Exact k-center radius on `subset` with centers drawn from `subset`.
pub fn opt_kcenter(inst: &Instance, subset: &PointSet, k: usize) -> Result<Rat, OracleError> {
    let m = subset.len();
    if m > MAX_KCENTER_POINTS {
        return Err(OracleError::InstanceTooLarge { n: m, limit: MAX_KCENTER_POINTS });
    }
    if m == 0 || k >= m {
        return Ok(<Rat as Zero>::zero());
    }
    let pts: Vec<PointId> = subset.iter().copied().collect();
    let mut radii: Vec<Rat> = pts
        .iter()
        .flat_map(|&a| pts.iter().map(move |&b| (a, b)))
        .map(|(a, b)| inst.d(a, b).clone())
        .collect();
    radii.sort();
    radii.dedup();
    let (mut lo, mut hi) = (0usize, radii.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if min_centers(inst, &pts, &radii[mid]) <= k {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(radii[lo].clone())
}
