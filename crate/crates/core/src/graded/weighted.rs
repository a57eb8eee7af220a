use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Dimensions of the graded pieces `gr^W_weight H^n`, keyed by `(n, weight)`.
/// Only nonzero entries are stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WeightedGradedVectorSpace {
    dims: BTreeMap<(usize, usize), usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedEntry {
    pub n: usize,
    pub weight: usize,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedJson {
    pub entries: Vec<WeightedEntry>,
}

impl WeightedGradedVectorSpace {
    pub fn new() -> Self {
        Self::default()
    }

    /// A pure space: degree `k` sits in weight `k`.
    pub fn pure_from_series(series: &[usize]) -> Self {
        let mut w = Self::new();
        for (k, &d) in series.iter().enumerate() {
            w.add(k, k, d);
        }
        w
    }

    pub fn add(&mut self, n: usize, weight: usize, dim: usize) {
        if dim == 0 {
            return;
        }
        *self.dims.entry((n, weight)).or_insert(0) += dim;
    }

    pub fn dim(&self, n: usize, weight: usize) -> usize {
        self.dims.get(&(n, weight)).copied().unwrap_or(0)
    }

    /// `dim H^n`, summed over weights.
    pub fn total(&self, n: usize) -> usize {
        self.dims.range((n, 0)..=(n, usize::MAX)).map(|(_, d)| d).sum()
    }

    /// `dim W_nu H^n`.
    pub fn filtered_dim(&self, n: usize, nu: usize) -> usize {
        self.dims.range((n, 0)..=(n, nu)).map(|(_, d)| d).sum()
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.dims.keys().map(|k| k.0).max()
    }

    /// Betti numbers `b_0..=b_top`.
    pub fn betti(&self, top: usize) -> Vec<usize> {
        (0..=top).map(|n| self.total(n)).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = WeightedEntry> + '_ {
        self.dims.iter().map(|(&(n, weight), &dim)| WeightedEntry { n, weight, dim })
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    /// The first `(n, weight)` with a nonzero piece off the diagonal, if any.
    pub fn purity_violation(&self) -> Option<(usize, usize)> {
        self.dims.keys().copied().find(|&(n, w)| n != w)
    }

    pub fn is_pure(&self) -> bool {
        self.purity_violation().is_none()
    }

    /// The first nonzero piece with weight outside `[n, 2n]`.
    pub fn weight_bound_violation(&self) -> Option<(usize, usize)> {
        self.dims.keys().copied().find(|&(n, w)| w < n || w > 2 * n)
    }

    /// Drops everything in degree above `top`.
    pub fn truncate(&self, top: usize) -> Self {
        WeightedGradedVectorSpace { dims: self.dims.range(..(top + 1, 0)).map(|(k, v)| (*k, *v)).collect() }
    }

    pub fn to_json(&self) -> WeightedJson {
        WeightedJson { entries: self.entries().collect() }
    }

    pub fn from_json(j: &WeightedJson) -> Self {
        let mut w = Self::new();
        for e in &j.entries {
            w.add(e.n, e.weight, e.dim);
        }
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn purity_and_bounds() {
        let mut w = WeightedGradedVectorSpace::new();
        assert!(w.is_pure());
        w.add(0, 0, 1);
        w.add(1, 2, 1);
        assert_eq!(w.purity_violation(), Some((1, 2)));
        assert_eq!(w.weight_bound_violation(), None);
        w.add(1, 3, 1);
        assert_eq!(w.weight_bound_violation(), Some((1, 3)));
        assert_eq!(w.total(1), 2);
        assert_eq!(w.filtered_dim(1, 2), 1);
    }

    #[test]
    fn json_roundtrip() {
        let w = WeightedGradedVectorSpace::pure_from_series(&[1, 0, 2, 0, 1]);
        let j = serde_json::to_string(&w.to_json()).unwrap();
        let back: WeightedJson = serde_json::from_str(&j).unwrap();
        assert_eq!(WeightedGradedVectorSpace::from_json(&back), w);
        assert_eq!(w.truncate(2).betti(4), vec![1, 0, 2, 0, 0]);
    }
}
