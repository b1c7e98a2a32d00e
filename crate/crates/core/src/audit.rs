//! Exact inequality bookkeeping shared by every stage of the pipeline.

use crate::rat::{self, Rat};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = "holds")]
    Holds,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub lhs: String,
    pub rhs: String,
    pub relation: Relation,
    pub pass: bool,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Audit {
    pub checks: Vec<Check>,
}

impl Audit {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records `lhs ≤ rhs` and returns whether it held.
    pub fn le(&mut self, name: &str, lhs: &Rat, rhs: &Rat) -> bool {
        let pass = lhs <= rhs;
        self.push(name, rat::to_string(lhs), rat::to_string(rhs), Relation::Le, pass)
    }

    pub fn eq(&mut self, name: &str, lhs: &Rat, rhs: &Rat) -> bool {
        let pass = lhs == rhs;
        self.push(name, rat::to_string(lhs), rat::to_string(rhs), Relation::Eq, pass)
    }

    pub fn le_count(&mut self, name: &str, lhs: usize, rhs: usize) -> bool {
        self.push(name, lhs.to_string(), rhs.to_string(), Relation::Le, lhs <= rhs)
    }

    pub fn eq_count(&mut self, name: &str, lhs: usize, rhs: usize) -> bool {
        self.push(name, lhs.to_string(), rhs.to_string(), Relation::Eq, lhs == rhs)
    }

    pub fn holds(&mut self, name: &str, cond: bool) -> bool {
        self.push(name, String::new(), String::new(), Relation::Holds, cond)
    }

    fn push(&mut self, name: &str, lhs: String, rhs: String, relation: Relation, pass: bool) -> bool {
        if !pass {
            log::warn!("audit check {name} failed: {lhs} {relation:?} {rhs}");
        }
        self.checks.push(Check { name: name.to_string(), lhs, rhs, relation, pass });
        pass
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    /// `(total, failed)` for checks carrying this name.
    pub fn tally(&self, name: &str) -> (usize, usize) {
        self.checks
            .iter()
            .filter(|c| c.name == name)
            .fold((0, 0), |(t, f), c| (t + 1, f + usize::from(!c.pass)))
    }

    pub fn extend(&mut self, other: Audit) {
        self.checks.extend(other.checks);
    }
}
