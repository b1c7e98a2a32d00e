//! Exhaustive reference solvers and the seeded instance suite.
#![allow(dead_code)]

use itertools::Itertools;
use sumradii::gen::{generate, Space};
use sumradii::metric::{CostPower, Instance};
use sumradii::rat::Rat;

pub fn suite_instance(idx: usize) -> (String, Instance) {
    let space = if idx % 2 == 0 { Space::RandomMetric } else { Space::Euclidean2d };
    let n = 6 + idx % 7;
    let k = 2 + (idx / 7) % 3;
    let seed = 1000 + idx as u64;
    let inst = generate(space, n, k, seed).load(None).unwrap().instance;
    (format!("{space}-n{n}-k{k}-s{seed}"), inst)
}

pub fn small_instance(idx: usize) -> Instance {
    let space = if idx % 2 == 0 { Space::RandomMetric } else { Space::Euclidean2d };
    let n = 3 + idx % 6;
    let k = 1 + (idx / 6) % 4;
    generate(space, n, k, 5000 + idx as u64).load(None).unwrap().instance
}

fn ball_masks(inst: &Instance) -> Vec<(Rat, u32)> {
    let n = inst.n();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let r = inst.d(i, j).clone();
            let mask = (0..n).filter(|&t| inst.d(i, t) <= &r).fold(0u32, |m, t| m | 1 << t);
            out.push((r, mask));
        }
    }
    out
}

/// Minimum `Σ rᵖ` over every set of at most `k` balls covering X.
pub fn naive_ball_cover(inst: &Instance, k: usize, power: CostPower) -> Rat {
    let full = (1u32 << inst.n()) - 1;
    let balls = ball_masks(inst);
    let mut best: Option<Rat> = None;
    for t in 1..=k.min(inst.n()) {
        for pick in (0..balls.len()).combinations(t) {
            if pick.iter().fold(0, |m, &b| m | balls[b].1) != full {
                continue;
            }
            let c = pick.iter().fold(Rat::default(), |a, &b| a + power.apply(&balls[b].0));
            if best.as_ref().is_none_or(|v| c < *v) {
                best = Some(c);
            }
        }
    }
    best.expect("n balls of radius 0 always cover")
}

/// Minimum total diameter over every labelling of points with `k` labels.
pub fn naive_partition(inst: &Instance, k: usize) -> Rat {
    let n = inst.n();
    let k = k.min(n);
    let mut best: Option<Rat> = None;
    let mut labels = vec![0usize; n];
    loop {
        let mut total = Rat::default();
        for l in 0..k {
            let mut d = Rat::default();
            for i in 0..n {
                for j in i + 1..n {
                    if labels[i] == l && labels[j] == l && inst.d(i, j) > &d {
                        d = inst.d(i, j).clone();
                    }
                }
            }
            total += d;
        }
        if best.as_ref().is_none_or(|v| total < *v) {
            best = Some(total);
        }
        let mut p = 0;
        while p < n {
            labels[p] += 1;
            if labels[p] < k {
                break;
            }
            labels[p] = 0;
            p += 1;
        }
        if p == n {
            break;
        }
    }
    best.unwrap()
}

/// Minimum over center sets of size at most `k` of the covering radius.
pub fn naive_kcenter(inst: &Instance, k: usize) -> Rat {
    let n = inst.n();
    let mut best: Option<Rat> = None;
    for t in 1..=k.min(n) {
        for centers in (0..n).combinations(t) {
            let r = (0..n)
                .map(|j| centers.iter().map(|&c| inst.d(c, j).clone()).min().unwrap())
                .max()
                .unwrap();
            if best.as_ref().is_none_or(|v| r < *v) {
                best = Some(r);
            }
        }
    }
    best.unwrap()
}
