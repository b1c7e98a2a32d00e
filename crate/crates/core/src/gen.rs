//! Seeded random instance generators.

use crate::io::InstanceDoc;
use crate::metric::rationalize_euclidean;
use crate::rat::{int, Rat};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Space {
    #[serde(rename = "euclidean2d")]
    Euclidean2d,
    #[serde(rename = "random-metric")]
    RandomMetric,
}

impl Space {
    pub const ALL: [Space; 2] = [Space::Euclidean2d, Space::RandomMetric];

    pub fn name(self) -> &'static str {
        match self {
            Space::Euclidean2d => "euclidean2d",
            Space::RandomMetric => "random-metric",
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Space {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "euclidean2d" => Ok(Space::Euclidean2d),
            "random-metric" => Ok(Space::RandomMetric),
            _ => Err(format!("unknown space `{s}` (expected euclidean2d or random-metric)")),
        }
    }
}

pub const GRID: u32 = 20;
pub const EUCLID_DENOM: u64 = 100;
pub const MAX_WEIGHT: i64 = 20;

/// Shortest-path closure of a complete graph with integer weights in
/// `1..=MAX_WEIGHT`; always a metric with positive off-diagonal entries.
pub fn random_metric(rng: &mut impl Rng, n: usize) -> Vec<Vec<Rat>> {
    let mut d = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let w = rng.gen_range(1..=MAX_WEIGHT);
            d[i][j] = w;
            d[j][i] = w;
        }
    }
    for via in 0..n {
        for i in 0..n {
            for j in 0..n {
                let alt = d[i][via] + d[via][j];
                if alt < d[i][j] {
                    d[i][j] = alt;
                }
            }
        }
    }
    d.into_iter().map(|row| row.into_iter().map(int).collect()).collect()
}

/// Distinct integer grid points in `[0, GRID]²`, resampled until the
/// rounded distances form a metric.
pub fn euclidean2d(rng: &mut impl Rng, n: usize) -> Vec<Vec<f64>> {
    let side = (GRID + 1) as usize;
    assert!(n <= side * side, "grid too small for {n} points");
    loop {
        let coords: Vec<Vec<f64>> = sample(rng, side * side, n)
            .into_iter()
            .map(|c| vec![(c % side) as f64, (c / side) as f64])
            .collect();
        if rationalize_euclidean(&coords, EUCLID_DENOM).is_ok() {
            return coords;
        }
    }
}

pub fn generate(space: Space, n: usize, k: usize, seed: u64) -> InstanceDoc {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match space {
        Space::RandomMetric => InstanceDoc::from_matrix(k, random_metric(&mut rng, n)),
        Space::Euclidean2d => InstanceDoc::from_coords(k, euclidean2d(&mut rng, n), EUCLID_DENOM),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn deterministic_per_seed() {
        for space in Space::ALL {
            let a = generate(space, 8, 3, 42).to_json();
            let b = generate(space, 8, 3, 42).to_json();
            assert_eq!(a, b);
            assert_ne!(a, generate(space, 8, 3, 43).to_json());
        }
    }

    #[test]
    fn names_parse_back() {
        for space in Space::ALL {
            assert_eq!(space.name().parse::<Space>().unwrap(), space);
        }
        assert!("plane".parse::<Space>().is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn generated_instances_validate(seed in any::<u64>(), n in 2usize..14, rm in any::<bool>()) {
            let space = if rm { Space::RandomMetric } else { Space::Euclidean2d };
            let doc = generate(space, n, 2, seed);
            let loaded = doc.load(None).unwrap();
            prop_assert_eq!(loaded.instance.n(), n);
        }
    }
}
