//! Graded vector spaces, polynomial rings on even generators, truncated
//! modules over them, and weight-bigraded vector spaces.

mod algebra;
mod module;
mod weighted;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::LinalgError;

pub use algebra::{AlgebraModule, GradedAlgebra};
pub use module::{GradedModule, ModuleJson, MonomialActions, ValidationReport, Violation};
pub use weighted::{WeightedEntry, WeightedGradedVectorSpace, WeightedJson};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GradedError {
    #[error("degree {requested} exceeds truncation degree {truncation}")]
    TruncationExceeded { requested: usize, truncation: usize },
    #[error("invalid polynomial ring: {0}")]
    InvalidRing(String),
    #[error("invalid module data: {0}")]
    InvalidModule(String),
    #[error("invalid algebra data: {0}")]
    InvalidAlgebra(String),
    #[error("ring mismatch: {0}")]
    RingMismatch(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A finite-dimensional graded vector space known up to a truncation degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedVectorSpace {
    dims: Vec<usize>,
}

impl GradedVectorSpace {
    /// `dims[k]` is the dimension in degree `k`; the truncation is `dims.len() - 1`.
    pub fn new(dims: Vec<usize>) -> Self {
        assert!(!dims.is_empty(), "a graded space needs at least degree 0");
        GradedVectorSpace { dims }
    }

    pub fn zero(truncation: usize) -> Self {
        Self::new(vec![0; truncation + 1])
    }

    pub fn truncation(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn dim(&self, degree: usize) -> usize {
        self.dims.get(degree).copied().unwrap_or(0)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn poincare_series(&self, up_to: usize) -> Result<Vec<usize>, GradedError> {
        if up_to > self.truncation() {
            return Err(GradedError::TruncationExceeded { requested: up_to, truncation: self.truncation() });
        }
        Ok(self.dims[..=up_to].to_vec())
    }
}

/// Exponent vector of a monomial.
pub type Exponent = Vec<u32>;

/// `H^*(BG)`: a polynomial ring on generators of even positive degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PolynomialRing {
    generator_degrees: Vec<usize>,
}

impl PolynomialRing {
    pub fn new(generator_degrees: Vec<usize>) -> Result<Self, GradedError> {
        if let Some(d) = generator_degrees.iter().find(|&&d| d < 2 || d % 2 != 0) {
            return Err(GradedError::InvalidRing(format!(
                "generator degree {d} is not an even integer >= 2"
            )));
        }
        Ok(PolynomialRing { generator_degrees })
    }

    /// `n` generators of degree 2: the cohomology of `BT` for a rank-`n` torus.
    pub fn torus(n: usize) -> Self {
        PolynomialRing { generator_degrees: vec![2; n] }
    }

    pub fn generator_degrees(&self) -> &[usize] {
        &self.generator_degrees
    }

    pub fn num_generators(&self) -> usize {
        self.generator_degrees.len()
    }

    pub fn max_generator_degree(&self) -> usize {
        self.generator_degrees.iter().copied().max().unwrap_or(0)
    }

    pub fn monomial_degree(&self, e: &[u32]) -> usize {
        e.iter().zip(&self.generator_degrees).map(|(&a, &d)| a as usize * d).sum()
    }

    pub fn monomial_basis(&self, truncation: usize) -> MonomialBasis {
        MonomialBasis::new(self, truncation)
    }

    pub fn dims(&self, truncation: usize) -> GradedVectorSpace {
        let mut dims = vec![0usize; truncation + 1];
        dims[0] = 1;
        for &d in &self.generator_degrees {
            for k in d..=truncation {
                dims[k] += dims[k - d];
            }
        }
        GradedVectorSpace::new(dims)
    }
}

/// Monomials of a polynomial ring grouped by degree, in a fixed order.
#[derive(Clone, Debug)]
pub struct MonomialBasis {
    by_degree: Vec<Vec<Exponent>>,
    index: HashMap<Exponent, usize>,
}

impl MonomialBasis {
    fn new(ring: &PolynomialRing, truncation: usize) -> Self {
        let mut by_degree: Vec<Vec<Exponent>> = vec![Vec::new(); truncation + 1];
        let r = ring.num_generators();
        let mut current = vec![0u32; r];
        fn recurse(
            ring: &PolynomialRing,
            var: usize,
            degree: usize,
            truncation: usize,
            current: &mut Vec<u32>,
            out: &mut Vec<Vec<Exponent>>,
        ) {
            if var == current.len() {
                out[degree].push(current.clone());
                return;
            }
            let d = ring.generator_degrees[var];
            let mut deg = degree;
            let mut a = 0;
            loop {
                current[var] = a;
                recurse(ring, var + 1, deg, truncation, current, out);
                deg += d;
                a += 1;
                if deg > truncation {
                    break;
                }
            }
            current[var] = 0;
        }
        recurse(ring, 0, 0, truncation, &mut current, &mut by_degree);
        for v in &mut by_degree {
            v.sort_by(|a, b| b.cmp(a));
        }
        let mut index = HashMap::new();
        for v in &by_degree {
            for (i, e) in v.iter().enumerate() {
                index.insert(e.clone(), i);
            }
        }
        MonomialBasis { by_degree, index }
    }

    pub fn truncation(&self) -> usize {
        self.by_degree.len() - 1
    }

    pub fn in_degree(&self, degree: usize) -> &[Exponent] {
        self.by_degree.get(degree).map_or(&[], Vec::as_slice)
    }

    pub fn index_of(&self, e: &[u32]) -> Option<usize> {
        self.index.get(e).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_rejects_odd_or_small_degrees() {
        assert!(PolynomialRing::new(vec![2, 3]).is_err());
        assert!(PolynomialRing::new(vec![0]).is_err());
        assert!(PolynomialRing::new(vec![4, 6]).is_ok());
        assert!(PolynomialRing::new(vec![]).is_ok());
    }

    #[test]
    fn polynomial_series_one_generator() {
        let ring = PolynomialRing::torus(1);
        assert_eq!(ring.dims(6).poincare_series(6).unwrap(), vec![1, 0, 1, 0, 1, 0, 1]);
        assert!(matches!(
            ring.dims(6).poincare_series(7),
            Err(GradedError::TruncationExceeded { requested: 7, truncation: 6 })
        ));
    }

    #[test]
    fn zero_space_series() {
        assert_eq!(GradedVectorSpace::zero(4).poincare_series(4).unwrap(), vec![0; 5]);
    }

    #[test]
    fn monomial_basis_counts_match_dims() {
        let ring = PolynomialRing::new(vec![2, 4, 4]).unwrap();
        let basis = ring.monomial_basis(12);
        let dims = ring.dims(12);
        for k in 0..=12 {
            assert_eq!(basis.in_degree(k).len(), dims.dim(k), "degree {k}");
            for (i, e) in basis.in_degree(k).iter().enumerate() {
                assert_eq!(ring.monomial_degree(e), k);
                assert_eq!(basis.index_of(e), Some(i));
            }
        }
    }
}
