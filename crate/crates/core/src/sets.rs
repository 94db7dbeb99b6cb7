use serde::{Deserialize, Serialize};

use crate::grid::GridFunction;

/// A subset of the vertices of one graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VertexSet {
    mask: Vec<bool>,
}

impl VertexSet {
    pub fn empty(n: usize) -> Self {
        VertexSet { mask: vec![false; n] }
    }

    pub fn full(n: usize) -> Self {
        VertexSet { mask: vec![true; n] }
    }

    pub fn from_indices(n: usize, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(n);
        for i in idx {
            s.insert(i);
        }
        s
    }

    pub fn from_mask(mask: Vec<bool>) -> Self {
        VertexSet { mask }
    }

    /// Size of the ambient vertex set.
    pub fn universe(&self) -> usize {
        self.mask.len()
    }

    pub fn insert(&mut self, i: usize) {
        self.mask[i] = true;
    }

    pub fn contains(&self, i: usize) -> bool {
        self.mask[i]
    }

    pub fn len(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&b| b)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn complement(&self) -> Self {
        VertexSet { mask: self.mask.iter().map(|&b| !b).collect() }
    }

    pub fn union(&self, other: &Self) -> Self {
        VertexSet { mask: self.mask.iter().zip(&other.mask).map(|(&a, &b)| a || b).collect() }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        VertexSet { mask: self.mask.iter().zip(&other.mask).map(|(&a, &b)| a && b).collect() }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.mask.iter().zip(&other.mask).all(|(&a, &b)| !a || b)
    }

    pub fn measure(&self, mu: &[f64]) -> f64 {
        self.iter().map(|i| mu[i]).sum()
    }

    pub fn indicator(&self) -> GridFunction {
        GridFunction::new(self.mask.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect())
    }
}
