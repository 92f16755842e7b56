use serde::Serialize;

use crate::map::MultilinearMap;
use crate::space::BasisKey;

/// Outcome of one identity at one arity. `witness` is the first input tuple with a nonzero residual.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub arity: usize,
    pub passed: bool,
    pub witness: Option<Vec<BasisKey>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new() -> Report {
        Report::default()
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Records a residual that must vanish.
    pub fn residual(&mut self, name: &str, arity: usize, residual: &MultilinearMap) {
        self.checks.push(Check {
            name: name.to_string(),
            arity,
            passed: residual.is_zero(),
            witness: residual.first_support(),
        });
    }

    pub fn flag(&mut self, name: &str, arity: usize, passed: bool) {
        self.checks.push(Check { name: name.to_string(), arity, passed, witness: None });
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    /// Verdict per arity, for cross-checking two reports.
    pub fn verdicts(&self) -> Vec<(usize, bool)> {
        self.checks.iter().map(|c| (c.arity, c.passed)).collect()
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }
}
