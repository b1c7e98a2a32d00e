//! Instance files: either an explicit distance matrix or 2D/ND coordinates
//! rounded to a rational grid.

use crate::metric::{rationalize_euclidean, validate_instance, Instance, MetricError};
use crate::rat::{serde_rat_matrix, Rat};
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("malformed instance JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("instance must give exactly one of `dist` or `coords` + `denom`")]
    Shape,
    #[error(transparent)]
    Metric(#[from] MetricError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Matrix(#[serde(with = "serde_rat_matrix")] pub Vec<Vec<Rat>>);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dist: Option<Matrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub denom: Option<u64>,
}

/// A validated instance plus the raw coordinates when it came from them.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub instance: Instance,
    pub coords: Option<Vec<Vec<f64>>>,
}

impl InstanceDoc {
    pub fn from_matrix(k: usize, dist: Vec<Vec<Rat>>) -> Self {
        InstanceDoc { k, dist: Some(Matrix(dist)), coords: None, denom: None }
    }

    pub fn from_coords(k: usize, coords: Vec<Vec<f64>>, denom: u64) -> Self {
        InstanceDoc { k, dist: None, coords: Some(coords), denom: Some(denom) }
    }

    pub fn parse(text: &str) -> Result<Self, IoError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance serializes")
    }

    /// Validates with the stored budget, or `k` when given.
    pub fn load(&self, k: Option<usize>) -> Result<Loaded, IoError> {
        let k = k.unwrap_or(self.k);
        match (&self.dist, &self.coords, self.denom) {
            (Some(m), None, None) => Ok(Loaded { instance: validate_instance(m.0.clone(), k)?, coords: None }),
            (None, Some(c), Some(d)) => {
                let m = rationalize_euclidean(c, d)?;
                Ok(Loaded { instance: validate_instance(m, k)?, coords: Some(c.clone()) })
            }
            _ => Err(IoError::Shape),
        }
    }
}

pub fn read_doc(path: &Path) -> Result<InstanceDoc, IoError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| IoError::Read { path: path.display().to_string(), source })?;
    InstanceDoc::parse(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::line_metric;
    use crate::rat::frac;

    #[test]
    fn matrix_round_trip() {
        let doc = InstanceDoc::from_matrix(2, line_metric(&[0, 1, 2, 10, 11]));
        let back = InstanceDoc::parse(&doc.to_json()).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.load(None).unwrap().instance.n(), 5);
    }

    #[test]
    fn mixed_cells_and_coords() {
        let doc = InstanceDoc::parse(r#"{"k":1,"dist":[[0,"1/2"],["1/2",0]]}"#).unwrap();
        let inst = doc.load(None).unwrap().instance;
        assert_eq!(inst.d(0, 1), &frac(1, 2));
        let sq = InstanceDoc::parse(r#"{"k":2,"coords":[[0,0],[1,0],[0,1],[1,1]],"denom":1000}"#).unwrap();
        let l = sq.load(Some(3)).unwrap();
        assert_eq!(l.instance.d(0, 3), &frac(1414, 1000));
        assert_eq!(l.instance.k(), 3);
        assert!(l.coords.is_some());
    }

    #[test]
    fn shape_errors() {
        assert!(matches!(
            InstanceDoc::parse(r#"{"k":1}"#).unwrap().load(None),
            Err(IoError::Shape)
        ));
        assert!(matches!(InstanceDoc::parse("{"), Err(IoError::Json(_))));
        let bad = InstanceDoc::parse(r#"{"k":1,"dist":[[0,1,5],[1,0,1],[5,1,0]]}"#).unwrap();
        assert!(matches!(
            bad.load(None),
            Err(IoError::Metric(MetricError::TriangleViolation { .. }))
        ));
    }
}
