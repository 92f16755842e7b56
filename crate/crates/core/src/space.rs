use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A basis element addressed by degree and position within that degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasisKey {
    pub deg: i32,
    pub idx: u32,
}

impl fmt::Display for BasisKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.deg, self.idx)
    }
}

/// Finite-dimensional graded vector space. Basis elements are also numbered
/// globally in (degree, index) order; maps use the global numbering.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSpace {
    dims: BTreeMap<i32, usize>,
    labels: BTreeMap<i32, Vec<String>>,
    degs: Vec<i32>,
    offsets: BTreeMap<i32, u32>,
}

impl GradedSpace {
    pub fn new(dims: BTreeMap<i32, usize>) -> GradedSpace {
        let labels = dims
            .iter()
            .map(|(&d, &n)| (d, (0..n).map(|i| format!("e{d}_{i}")).collect()))
            .collect();
        GradedSpace::with_labels(dims, labels).expect("default labels are consistent")
    }

    pub fn with_labels(
        dims: BTreeMap<i32, usize>,
        labels: BTreeMap<i32, Vec<String>>,
    ) -> Result<GradedSpace> {
        let dims: BTreeMap<i32, usize> = dims.into_iter().filter(|&(_, n)| n > 0).collect();
        let mut full = BTreeMap::new();
        for (&d, &n) in &dims {
            let ls = match labels.get(&d) {
                Some(ls) if ls.len() == n => ls.clone(),
                Some(ls) => {
                    return Err(Error::Input(format!(
                        "degree {d} has {n} basis elements but {} labels",
                        ls.len()
                    )))
                }
                None => (0..n).map(|i| format!("e{d}_{i}")).collect(),
            };
            full.insert(d, ls);
        }
        if let Some(d) = labels.keys().find(|d| !dims.contains_key(d)) {
            if !labels[d].is_empty() {
                return Err(Error::Input(format!("labels given for empty degree {d}")));
            }
        }
        let mut degs = Vec::new();
        let mut offsets = BTreeMap::new();
        for (&d, &n) in &dims {
            offsets.insert(d, degs.len() as u32);
            degs.extend(std::iter::repeat_n(d, n));
        }
        Ok(GradedSpace { dims, labels: full, degs, offsets })
    }

    pub fn from_degrees(degs: &[i32]) -> GradedSpace {
        let mut dims = BTreeMap::new();
        for &d in degs {
            *dims.entry(d).or_insert(0) += 1;
        }
        GradedSpace::new(dims)
    }

    pub fn zero() -> GradedSpace {
        GradedSpace::new(BTreeMap::new())
    }

    pub fn into_arc(self) -> Arc<GradedSpace> {
        Arc::new(self)
    }

    pub fn dim(&self) -> usize {
        self.degs.len()
    }

    pub fn dims(&self) -> &BTreeMap<i32, usize> {
        &self.dims
    }

    pub fn labels(&self) -> &BTreeMap<i32, Vec<String>> {
        &self.labels
    }

    pub fn dim_in(&self, deg: i32) -> usize {
        self.dims.get(&deg).copied().unwrap_or(0)
    }

    /// Global indices of the basis in degree `deg`.
    pub fn basis_in(&self, deg: i32) -> std::ops::Range<u32> {
        match self.offsets.get(&deg) {
            Some(&o) => o..o + self.dims[&deg] as u32,
            None => 0..0,
        }
    }

    pub fn degree(&self, g: u32) -> i32 {
        self.degs[g as usize]
    }

    pub fn degrees(&self) -> &[i32] {
        &self.degs
    }

    pub fn key(&self, g: u32) -> BasisKey {
        let deg = self.degs[g as usize];
        BasisKey { deg, idx: g - self.offsets[&deg] }
    }

    pub fn index(&self, key: BasisKey) -> Option<u32> {
        let o = *self.offsets.get(&key.deg)?;
        ((key.idx as usize) < self.dims[&key.deg]).then_some(o + key.idx)
    }

    pub fn label(&self, g: u32) -> &str {
        let k = self.key(g);
        &self.labels[&k.deg][k.idx as usize]
    }

    pub fn find_label(&self, label: &str) -> Option<u32> {
        (0..self.dim() as u32).find(|&g| self.label(g) == label)
    }

    /// Same dimensions in every degree (labels are ignored).
    pub fn same_shape(&self, o: &GradedSpace) -> bool {
        self.dims == o.dims
    }

    /// The space with every degree raised by `k`.
    pub fn shifted(&self, k: i32) -> GradedSpace {
        let dims = self.dims.iter().map(|(&d, &n)| (d + k, n)).collect();
        let labels = self.labels.iter().map(|(&d, l)| (d + k, l.clone())).collect();
        GradedSpace::with_labels(dims, labels).expect("shift preserves consistency")
    }
}
