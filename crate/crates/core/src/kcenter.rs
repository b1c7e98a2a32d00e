//! Farthest-first traversal: a 2-approximation for k-center.

use crate::metric::{Instance, PointId, PointSet};
use crate::rat::Rat;
use num_traits::Zero;

/// Greedy k-center on `restrict`.
///
/// Starts at the lowest id and repeatedly adds the point farthest from the
/// chosen centers (ties to the lowest id). Stops early once every point is
/// a center. Returns the centers in pick order and the covering radius.
pub fn farthest_first(inst: &Instance, restrict: &PointSet, k: usize) -> (Vec<PointId>, Rat) {
    assert!(!restrict.is_empty(), "farthest_first on an empty set");
    assert!(k >= 1);
    let first = *restrict.iter().next().unwrap();
    let mut centers = vec![first];
    let mut near: Vec<(PointId, Rat)> = restrict
        .iter()
        .map(|&j| (j, inst.d(first, j).clone()))
        .collect();
    loop {
        let (far, radius) = near
            .iter()
            .fold(None::<&(PointId, Rat)>, |best, cand| match best {
                Some(b) if b.1 >= cand.1 => Some(b),
                _ => Some(cand),
            })
            .map(|(j, r)| (*j, r.clone()))
            .unwrap();
        if centers.len() == k || radius.is_zero() {
            return (centers, radius);
        }
        centers.push(far);
        for (j, r) in near.iter_mut() {
            let d = inst.d(far, *j);
            if d < r {
                *r = d.clone();
            }
        }
    }
}
