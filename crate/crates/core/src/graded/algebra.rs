use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::{Exponent, GradedError, GradedModule, MonomialActions, PolynomialRing};
use crate::linalg::{RatMatrix, Rational};

/// A connected graded-commutative algebra known up to a truncation degree.
///
/// `mult[(a, b)]` has shape `dims[a + b] x (dims[a] * dims[b])`; the column
/// of the basis pair `(i, j)` is `i * dims[b] + j`. Degree 0 is spanned by
/// the unit, basis vector 0.
#[derive(Clone, Debug)]
pub struct GradedAlgebra {
    dims: Vec<usize>,
    mult: BTreeMap<(usize, usize), RatMatrix>,
    ring: Option<PolynomialRing>,
    labels: Option<Vec<Vec<Exponent>>>,
}

impl GradedAlgebra {
    pub fn new(dims: Vec<usize>, mult: BTreeMap<(usize, usize), RatMatrix>) -> Result<Self, GradedError> {
        let a = GradedAlgebra { dims, mult, ring: None, labels: None };
        a.validate()?;
        Ok(a)
    }

    /// The polynomial ring itself with its monomial basis.
    pub fn polynomial(ring: &PolynomialRing, truncation: usize) -> Self {
        let basis = ring.monomial_basis(truncation);
        let labels: Vec<Vec<Exponent>> = (0..=truncation).map(|k| basis.in_degree(k).to_vec()).collect();
        let dims: Vec<usize> = labels.iter().map(Vec::len).collect();
        let mut mult = BTreeMap::new();
        for a in 0..=truncation {
            for b in 0..=truncation - a {
                let mut m = RatMatrix::zeros(dims[a + b], dims[a] * dims[b]);
                for (i, ea) in labels[a].iter().enumerate() {
                    for (j, eb) in labels[b].iter().enumerate() {
                        let sum: Exponent = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                        let row = basis.index_of(&sum).expect("product degree within truncation");
                        m.set(row, i * dims[b] + j, Rational::one());
                    }
                }
                mult.insert((a, b), m);
            }
        }
        GradedAlgebra { dims, mult, ring: Some(ring.clone()), labels: Some(labels) }
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

    pub fn ring(&self) -> Option<&PolynomialRing> {
        self.ring.as_ref()
    }

    pub fn mult(&self, a: usize, b: usize) -> Option<&RatMatrix> {
        self.mult.get(&(a, b))
    }

    /// Dimension of the augmentation ideal in each degree.
    pub fn reduced_dims(&self) -> Vec<usize> {
        let mut d = self.dims.clone();
        d[0] = 0;
        d
    }

    pub fn is_evenly_graded(&self) -> bool {
        self.dims.iter().enumerate().all(|(k, &d)| k % 2 == 0 || d == 0)
    }

    /// Checks shapes, the unit law, associativity and graded commutativity.
    pub fn validate(&self) -> Result<(), GradedError> {
        let err = |s: String| Err(GradedError::InvalidAlgebra(s));
        let top = self.truncation();
        if self.dims.first() != Some(&1) {
            return err("degree 0 must be one-dimensional".into());
        }
        for a in 0..=top {
            for b in 0..=top - a {
                let Some(m) = self.mult.get(&(a, b)) else {
                    return err(format!("missing multiplication for degrees ({a}, {b})"));
                };
                if m.shape() != (self.dims[a + b], self.dims[a] * self.dims[b]) {
                    return err(format!("multiplication ({a}, {b}) has wrong shape"));
                }
            }
        }
        for b in 0..=top {
            if self.mult[&(0, b)] != RatMatrix::identity(self.dims[b]) {
                return err(format!("unit law fails in degree {b}"));
            }
        }
        for a in 1..=top {
            for b in 1..=top - a {
                let (da, db) = (self.dims[a], self.dims[b]);
                let sign = if a % 2 == 1 && b % 2 == 1 { -Rational::one() } else { Rational::one() };
                let ab = &self.mult[&(a, b)];
                let ba = &self.mult[&(b, a)];
                for i in 0..da {
                    for j in 0..db {
                        for r in 0..self.dims[a + b] {
                            if ab.get(r, i * db + j) != &sign * ba.get(r, j * da + i) {
                                return err(format!("graded commutativity fails in degrees ({a}, {b})"));
                            }
                        }
                    }
                }
                for c in 1..=top.saturating_sub(a + b) {
                    if a + b + c > top {
                        continue;
                    }
                    let dc = self.dims[c];
                    for i in 0..da {
                        for j in 0..db {
                            for k in 0..dc {
                                let ei = unit_vector(da, i);
                                let ek = unit_vector(dc, k);
                                let left = self.mul_vec(a + b, &self.product_basis(a, i, b, j), c, &ek);
                                let right = self.mul_vec(a, &ei, b + c, &self.product_basis(b, j, c, k));
                                if left != right {
                                    return err(format!("associativity fails in degrees ({a}, {b}, {c})"));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn product_basis(&self, a: usize, i: usize, b: usize, j: usize) -> Vec<Rational> {
        self.mult[&(a, b)].column(i * self.dims[b] + j)
    }

    /// Product of `x` (degree `a`) and `y` (degree `b`).
    pub fn mul_vec(&self, a: usize, x: &[Rational], b: usize, y: &[Rational]) -> Vec<Rational> {
        let m = &self.mult[&(a, b)];
        let db = self.dims[b];
        let mut pair = vec![Rational::zero(); self.dims[a] * db];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if !yj.is_zero() {
                    pair[i * db + j] = xi * yj;
                }
            }
        }
        m.apply(&pair)
    }
}

fn unit_vector(n: usize, i: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); n];
    v[i] = Rational::one();
    v
}

/// A module over a [`GradedAlgebra`]: `act[(a, k)]` has shape
/// `dims[k + a] x (alg_dims[a] * dims[k])`, with the pair (algebra basis `i`,
/// module basis `j`) in column `i * dims[k] + j`.
#[derive(Clone, Debug)]
pub struct AlgebraModule {
    dims: Vec<usize>,
    act: BTreeMap<(usize, usize), RatMatrix>,
}

impl AlgebraModule {
    /// Views a module over a polynomial ring as a module over that ring's
    /// monomial algebra.
    pub fn from_graded_module(m: &GradedModule, alg: &GradedAlgebra) -> Result<Self, GradedError> {
        let (Some(ring), Some(labels)) = (alg.ring.as_ref(), alg.labels.as_ref()) else {
            return Err(GradedError::RingMismatch("algebra has no polynomial presentation".into()));
        };
        if ring != m.ring() {
            return Err(GradedError::RingMismatch("module and algebra use different rings".into()));
        }
        let top = m.truncation().min(alg.truncation());
        let basis = ring.monomial_basis(top);
        let module = m.truncate(top)?;
        let table = MonomialActions::new(&module, &basis);
        let mut act = BTreeMap::new();
        for a in 0..=top {
            for k in 0..=top - a {
                let dk = module.dim(k);
                let mut mat = RatMatrix::zeros(module.dim(k + a), alg.dim(a) * dk);
                for (i, e) in labels[a].iter().enumerate() {
                    let idx = basis.index_of(e).expect("same monomial order");
                    let mono = table.get(a, k, idx);
                    for r in 0..mono.rows() {
                        for (j, v) in mono.row_entries(r) {
                            mat.set(r, i * dk + j, v.clone());
                        }
                    }
                }
                act.insert((a, k), mat);
            }
        }
        Ok(AlgebraModule { dims: module.dims().to_vec(), act })
    }

    pub fn new(dims: Vec<usize>, act: BTreeMap<(usize, usize), RatMatrix>) -> Self {
        AlgebraModule { dims, act }
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

    pub fn act(&self, a: usize, k: usize) -> Option<&RatMatrix> {
        self.act.get(&(a, k))
    }
}
