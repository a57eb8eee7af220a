use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{Exponent, GradedError, GradedVectorSpace, MonomialBasis, PolynomialRing};
use crate::linalg::{self, json::MatrixJson, RatMatrix, Rational};

/// A graded module over a [`PolynomialRing`], stored degree by degree up to a
/// truncation degree `D`.
///
/// `actions[i][k]` is the matrix of multiplication by the `i`-th ring
/// generator from degree `k` to degree `k + d_i`; it has shape
/// `dims[k + d_i] x dims[k]` and exists for every `k <= D - d_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedModule {
    ring: PolynomialRing,
    dims: Vec<usize>,
    actions: Vec<Vec<RatMatrix>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    MissingAction { generator: usize, degree: usize },
    Shape { generator: usize, degree: usize, expected: (usize, usize), found: (usize, usize) },
    NonCommuting { generators: (usize, usize), degree: usize },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::MissingAction { generator, degree } => {
                write!(f, "missing action matrix for generator {generator} in degree {degree}")
            }
            Violation::Shape { generator, degree, expected, found } => write!(
                f,
                "action of generator {generator} on degree {degree} has shape {}x{}, expected {}x{}",
                found.0, found.1, expected.0, expected.1
            ),
            Violation::NonCommuting { generators, degree } => write!(
                f,
                "actions of generators {} and {} do not commute on degree {degree}",
                generators.0, generators.1
            ),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn first(&self) -> Option<&Violation> {
        self.violations.first()
    }
}

impl GradedModule {
    /// Builds a module and validates it; any violation is returned as an error.
    pub fn new(ring: PolynomialRing, dims: Vec<usize>, actions: Vec<Vec<RatMatrix>>) -> Result<Self, GradedError> {
        let m = Self::new_unchecked(ring, dims, actions)?;
        let report = m.validate();
        match report.first() {
            None => Ok(m),
            Some(v) => Err(GradedError::InvalidModule(v.to_string())),
        }
    }

    /// Builds a module without checking shapes or commutativity. Use
    /// [`GradedModule::validate`] to inspect such a module.
    pub fn new_unchecked(
        ring: PolynomialRing,
        dims: Vec<usize>,
        actions: Vec<Vec<RatMatrix>>,
    ) -> Result<Self, GradedError> {
        if dims.is_empty() {
            return Err(GradedError::InvalidModule("dims must cover at least degree 0".into()));
        }
        if actions.len() != ring.num_generators() {
            return Err(GradedError::InvalidModule(format!(
                "{} action families for {} ring generators",
                actions.len(),
                ring.num_generators()
            )));
        }
        Ok(GradedModule { ring, dims, actions })
    }

    pub fn ring(&self) -> &PolynomialRing {
        &self.ring
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

    pub fn vector_space(&self) -> GradedVectorSpace {
        GradedVectorSpace::new(self.dims.clone())
    }

    pub fn poincare_series(&self, up_to: usize) -> Result<Vec<usize>, GradedError> {
        self.vector_space().poincare_series(up_to)
    }

    /// Multiplication by generator `i` from degree `k`; `None` past the truncation.
    pub fn action(&self, i: usize, k: usize) -> Option<&RatMatrix> {
        self.actions.get(i).and_then(|a| a.get(k))
    }

    pub fn actions(&self) -> &[Vec<RatMatrix>] {
        &self.actions
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let top = self.truncation();
        let degs = self.ring.generator_degrees();
        for (i, &d) in degs.iter().enumerate() {
            let expected_len = if d <= top { top - d + 1 } else { 0 };
            for k in 0..expected_len {
                match self.actions[i].get(k) {
                    None => violations.push(Violation::MissingAction { generator: i, degree: k }),
                    Some(m) => {
                        let expected = (self.dims[k + d], self.dims[k]);
                        if m.shape() != expected {
                            violations.push(Violation::Shape { generator: i, degree: k, expected, found: m.shape() });
                        }
                    }
                }
            }
        }
        if !violations.is_empty() {
            return ValidationReport { violations };
        }
        for k in 0..=top {
            for i in 0..degs.len() {
                for j in i + 1..degs.len() {
                    if k + degs[i] + degs[j] > top {
                        continue;
                    }
                    let ij = self.actions[j][k + degs[i]].mul(&self.actions[i][k]).expect("shapes checked");
                    let ji = self.actions[i][k + degs[j]].mul(&self.actions[j][k]).expect("shapes checked");
                    if ij != ji {
                        violations.push(Violation::NonCommuting { generators: (i, j), degree: k });
                    }
                }
            }
        }
        ValidationReport { violations }
    }

    /// Free module on generators of the given degrees, truncated at `truncation`.
    ///
    /// The degree-`k` basis lists pairs (generator, monomial) generator by
    /// generator, monomials in [`MonomialBasis`] order.
    pub fn free(ring: &PolynomialRing, generator_degrees: &[usize], truncation: usize) -> Self {
        let basis = ring.monomial_basis(truncation);
        let labels = free_labels(&basis, generator_degrees, truncation);
        let dims: Vec<usize> = labels.iter().map(Vec::len).collect();
        let index: Vec<BTreeMap<(usize, &Exponent), usize>> = labels
            .iter()
            .map(|ls| ls.iter().enumerate().map(|(n, (g, e))| ((*g, e), n)).collect())
            .collect();
        let actions = ring
            .generator_degrees()
            .iter()
            .enumerate()
            .map(|(i, &d)| {
                (0..=truncation.saturating_sub(d))
                    .take_while(|&k| k + d <= truncation)
                    .map(|k| {
                        let mut m = RatMatrix::zeros(dims[k + d], dims[k]);
                        for (col, (g, e)) in labels[k].iter().enumerate() {
                            let mut f = e.clone();
                            f[i] += 1;
                            let row = index[k + d][&(*g, &f)];
                            m.set(row, col, Rational::one());
                        }
                        m
                    })
                    .collect()
            })
            .collect();
        GradedModule { ring: ring.clone(), dims, actions }
    }

    /// The residue field `Q`, concentrated in degree 0 with every generator acting by zero.
    pub fn trivial(ring: &PolynomialRing, truncation: usize) -> Self {
        let mut dims = vec![0; truncation + 1];
        dims[0] = 1;
        Self::zero_actions(ring, dims)
    }

    /// A module with the given dimensions and all actions zero.
    pub fn zero_actions(ring: &PolynomialRing, dims: Vec<usize>) -> Self {
        let top = dims.len() - 1;
        let actions = ring
            .generator_degrees()
            .iter()
            .map(|&d| {
                if d > top {
                    Vec::new()
                } else {
                    (0..=top - d).map(|k| RatMatrix::zeros(dims[k + d], dims[k])).collect()
                }
            })
            .collect();
        GradedModule { ring: ring.clone(), dims, actions }
    }

    /// Drops every degree above `new_truncation`.
    pub fn truncate(&self, new_truncation: usize) -> Result<Self, GradedError> {
        if new_truncation > self.truncation() {
            return Err(GradedError::TruncationExceeded { requested: new_truncation, truncation: self.truncation() });
        }
        let dims = self.dims[..=new_truncation].to_vec();
        let actions = self
            .ring
            .generator_degrees()
            .iter()
            .zip(&self.actions)
            .map(|(&d, acts)| {
                if d > new_truncation {
                    Vec::new()
                } else {
                    acts[..=new_truncation - d].to_vec()
                }
            })
            .collect();
        Ok(GradedModule { ring: self.ring.clone(), dims, actions })
    }

    pub fn direct_sum(&self, other: &GradedModule) -> Result<Self, GradedError> {
        if self.ring != other.ring {
            return Err(GradedError::RingMismatch("direct sum of modules over different rings".into()));
        }
        let top = self.truncation().min(other.truncation());
        let a = self.truncate(top)?;
        let b = other.truncate(top)?;
        let dims = a.dims.iter().zip(&b.dims).map(|(x, y)| x + y).collect();
        let actions = a
            .actions
            .iter()
            .zip(&b.actions)
            .map(|(xa, ya)| xa.iter().zip(ya).map(|(x, y)| x.direct_sum(y)).collect())
            .collect();
        Ok(GradedModule { ring: self.ring.clone(), dims, actions })
    }

    /// Shifts every degree up by `s`; degrees pushed past the truncation are dropped.
    pub fn shift(&self, s: usize) -> Self {
        let top = self.truncation();
        let mut dims = vec![0; top + 1];
        for k in 0..=top.saturating_sub(s) {
            if k + s <= top {
                dims[k + s] = self.dims[k];
            }
        }
        let actions = self
            .ring
            .generator_degrees()
            .iter()
            .zip(&self.actions)
            .map(|(&d, acts)| {
                if d > top {
                    return Vec::new();
                }
                (0..=top - d)
                    .map(|k| if k >= s { acts[k - s].clone() } else { RatMatrix::zeros(dims[k + d], dims[k]) })
                    .collect()
            })
            .collect();
        GradedModule { ring: self.ring.clone(), dims, actions }
    }

    /// Conjugates by invertible `p[k]` in each degree: the new action is `p[k+d] * a * p[k]^-1`.
    pub fn change_basis(&self, p: &[RatMatrix]) -> Result<Self, GradedError> {
        let inv: Vec<RatMatrix> = p
            .iter()
            .map(|m| linalg::inverse(m).ok_or_else(|| GradedError::InvalidModule("basis change is singular".into())))
            .collect::<Result<_, _>>()?;
        let actions = self
            .ring
            .generator_degrees()
            .iter()
            .zip(&self.actions)
            .map(|(&d, acts)| {
                acts.iter()
                    .enumerate()
                    .map(|(k, a)| p[k + d].mul(a).and_then(|x| x.mul(&inv[k])))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(GradedModule { ring: self.ring.clone(), dims: self.dims.clone(), actions })
    }

    /// `M / N`, where `N` is the submodule generated by the homogeneous
    /// elements `(degree, vector)`. Each quotient basis is the set of standard
    /// basis vectors outside the pivots of `N` in that degree.
    pub fn quotient(&self, generators: &[(usize, Vec<Rational>)]) -> Result<Self, GradedError> {
        let top = self.truncation();
        let basis = self.ring.monomial_basis(top);
        let mut spans: Vec<Vec<Vec<Rational>>> = vec![Vec::new(); top + 1];
        for (k, v) in generators {
            if *k > top || v.len() != self.dim(*k) {
                return Err(GradedError::InvalidModule(format!("quotient generator of degree {k} has the wrong shape")));
            }
            for (deg, images) in self.monomial_images(&basis, *k, v, top).into_iter().enumerate() {
                spans[k + deg].extend(images);
            }
        }
        let rrefs: Vec<linalg::Rref> = spans
            .iter()
            .enumerate()
            .map(|(k, vs)| linalg::Rref::new(&RatMatrix::from_columns(self.dim(k), vs).transpose()))
            .collect();
        let keep: Vec<Vec<usize>> = rrefs.iter().map(linalg::Rref::non_pivot_columns).collect();
        let dims: Vec<usize> = keep.iter().map(Vec::len).collect();
        let actions = self
            .ring
            .generator_degrees()
            .iter()
            .zip(&self.actions)
            .map(|(&d, acts)| {
                acts.iter()
                    .enumerate()
                    .map(|(k, a)| {
                        let mut m = RatMatrix::zeros(dims[k + d], dims[k]);
                        let position: BTreeMap<usize, usize> =
                            keep[k + d].iter().enumerate().map(|(i, &c)| (c, i)).collect();
                        for (col, &c) in keep[k].iter().enumerate() {
                            let image = rrefs[k + d].reduce(&a.column(c));
                            for (row, v) in image.iter().enumerate() {
                                if !v.is_zero() {
                                    m.set(position[&row], col, v.clone());
                                }
                            }
                        }
                        m
                    })
                    .collect()
            })
            .collect();
        Ok(GradedModule { ring: self.ring.clone(), dims, actions })
    }

    /// Dimension of `(M / H^+ M)` in degree `q`, i.e. of `M (x)_H Q`.
    pub fn indecomposables_dim(&self, q: usize) -> usize {
        let mut image = RatMatrix::zeros(self.dim(q), 0);
        for (i, &d) in self.ring.generator_degrees().iter().enumerate() {
            if q >= d {
                if let Some(a) = self.action(i, q - d) {
                    image = image.hstack(a).expect("row counts agree");
                }
            }
        }
        self.dim(q) - linalg::rank(&image)
    }

    /// Images of `v` (in degree `k`) under every monomial of degree `<= up_to - k`,
    /// indexed by `basis.in_degree(deg)` position. Entry `[deg][idx]` is `x^e v`.
    pub fn monomial_images(
        &self,
        basis: &MonomialBasis,
        k: usize,
        v: &[Rational],
        up_to: usize,
    ) -> Vec<Vec<Vec<Rational>>> {
        let top = up_to.min(self.truncation()).min(basis.truncation() + k);
        let mut out: Vec<Vec<Vec<Rational>>> = Vec::with_capacity(top.saturating_sub(k) + 1);
        for deg in 0..=top.saturating_sub(k) {
            if k + deg > top {
                break;
            }
            let mut images = Vec::with_capacity(basis.in_degree(deg).len());
            for e in basis.in_degree(deg) {
                let img = match e.iter().position(|&a| a > 0) {
                    None => v.to_vec(),
                    Some(i) => {
                        let mut prev = e.clone();
                        prev[i] -= 1;
                        let d = self.ring.generator_degrees()[i];
                        let pidx = basis.index_of(&prev).expect("monomial below is enumerated");
                        let w: &Vec<Rational> = &out[deg - d][pidx];
                        self.actions[i][k + deg - d].apply(w)
                    }
                };
                images.push(img);
            }
            out.push(images);
        }
        out
    }

    /// Matrix of multiplication by the monomial `x^e` from degree `k`.
    pub fn monomial_action(&self, e: &[u32], k: usize) -> Result<RatMatrix, GradedError> {
        let deg = self.ring.monomial_degree(e);
        if k + deg > self.truncation() {
            return Err(GradedError::TruncationExceeded { requested: k + deg, truncation: self.truncation() });
        }
        let mut m = RatMatrix::identity(self.dim(k));
        let mut cur = k;
        for (i, &a) in e.iter().enumerate() {
            let d = self.ring.generator_degrees()[i];
            for _ in 0..a {
                m = self.actions[i][cur].mul(&m)?;
                cur += d;
            }
        }
        Ok(m)
    }

    pub fn to_json(&self) -> ModuleJson {
        ModuleJson {
            ring: RingJson { generator_degrees: self.ring.generator_degrees().to_vec() },
            truncation: self.truncation(),
            dims: self.dims.iter().enumerate().map(|(k, &d)| (k.to_string(), d)).collect(),
            actions: self.actions.iter().map(|a| a.iter().map(MatrixJson::from).collect()).collect(),
        }
    }

    /// Parses the JSON form. Shapes and commutativity are not checked here;
    /// call [`GradedModule::validate`] on the result.
    pub fn from_json(j: &ModuleJson) -> Result<Self, GradedError> {
        let ring = PolynomialRing::new(j.ring.generator_degrees.clone())?;
        let mut dims = vec![0usize; j.truncation + 1];
        for (key, &d) in &j.dims {
            let k: usize = key
                .parse()
                .map_err(|_| GradedError::InvalidModule(format!("dims key {key:?} is not a degree")))?;
            if k > j.truncation {
                return Err(GradedError::InvalidModule(format!("dims lists degree {k} above truncation {}", j.truncation)));
            }
            dims[k] = d;
        }
        let actions = j
            .actions
            .iter()
            .map(|a| a.iter().map(RatMatrix::try_from).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Self::new_unchecked(ring, dims, actions)
    }
}

pub(crate) fn free_labels(
    basis: &MonomialBasis,
    generator_degrees: &[usize],
    truncation: usize,
) -> Vec<Vec<(usize, Exponent)>> {
    let mut labels: Vec<Vec<(usize, Exponent)>> = vec![Vec::new(); truncation + 1];
    for (g, &gd) in generator_degrees.iter().enumerate() {
        for (k, slot) in labels.iter_mut().enumerate().skip(gd) {
            for e in basis.in_degree(k - gd) {
                slot.push((g, e.clone()));
            }
        }
    }
    labels
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RingJson {
    pub generator_degrees: Vec<usize>,
}

/// On-disk form of a [`GradedModule`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModuleJson {
    pub ring: RingJson,
    pub truncation: usize,
    pub dims: BTreeMap<String, usize>,
    pub actions: Vec<Vec<MatrixJson>>,
}

/// Per-degree monomial action matrices, cached for repeated use.
#[derive(Clone, Debug)]
pub struct MonomialActions {
    /// `table[a][k][idx]`: the monomial `basis.in_degree(a)[idx]` acting from degree `k`.
    table: Vec<Vec<Vec<RatMatrix>>>,
}

impl MonomialActions {
    pub fn new(module: &GradedModule, basis: &MonomialBasis) -> Self {
        let top = module.truncation().min(basis.truncation());
        let mut table: Vec<Vec<Vec<RatMatrix>>> = Vec::with_capacity(top + 1);
        for a in 0..=top {
            let mut per_k = Vec::with_capacity(top - a + 1);
            for k in 0..=module.truncation() - a {
                let mats = basis
                    .in_degree(a)
                    .iter()
                    .map(|e| match e.iter().position(|&x| x > 0) {
                        None => RatMatrix::identity(module.dim(k)),
                        Some(i) => {
                            let d = module.ring().generator_degrees()[i];
                            let mut prev = e.clone();
                            prev[i] -= 1;
                            let pidx = basis.index_of(&prev).expect("enumerated");
                            module.actions[i][k + a - d].mul(&table[a - d][k][pidx]).expect("shapes agree")
                        }
                    })
                    .collect();
                per_k.push(mats);
            }
            table.push(per_k);
        }
        MonomialActions { table }
    }

    /// The monomial with index `idx` in degree `a`, acting on degree `k`.
    pub fn get(&self, a: usize, k: usize, idx: usize) -> &RatMatrix {
        &self.table[a][k][idx]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    #[test]
    fn free_rank_one_is_the_ring() {
        let ring = PolynomialRing::torus(1);
        let m = GradedModule::free(&ring, &[0], 4);
        assert_eq!(m.dims(), &[1, 0, 1, 0, 1]);
        assert!(m.validate().is_valid());
    }

    #[test]
    fn free_series_is_sum_of_shifts() {
        let ring = PolynomialRing::torus(1);
        let m = GradedModule::free(&ring, &[0, 3], 9);
        // (1 + t^3)(1 + t^2 + t^4 + ...)
        assert_eq!(m.dims(), &[1, 0, 1, 1, 1, 1, 1, 1, 1, 1]);
    }

    #[test]
    fn free_over_bsl2() {
        let ring = PolynomialRing::new(vec![4]).unwrap();
        let m = GradedModule::free(&ring, &[0], 8);
        assert_eq!(m.dims(), &[1, 0, 0, 0, 1, 0, 0, 0, 1]);
    }

    #[test]
    fn free_actions_injective() {
        let ring = PolynomialRing::new(vec![2, 2, 4]).unwrap();
        let m = GradedModule::free(&ring, &[0, 2], 10);
        assert!(m.validate().is_valid());
        for (i, acts) in m.actions().iter().enumerate() {
            for (k, a) in acts.iter().enumerate() {
                assert_eq!(linalg::rank(a), a.cols(), "generator {i} degree {k}");
            }
        }
    }

    #[test]
    fn trivial_module_shape() {
        let ring = PolynomialRing::new(vec![2, 4]).unwrap();
        let m = GradedModule::trivial(&ring, 6);
        assert_eq!(m.dims(), &[1, 0, 0, 0, 0, 0, 0]);
        assert_eq!(m.action(0, 0).unwrap().shape(), (0, 1));
        assert_eq!(m.action(1, 2).unwrap().shape(), (0, 0));
        assert!(m.validate().is_valid());
    }

    #[test]
    fn non_commuting_actions_are_reported() {
        let ring = PolynomialRing::torus(2);
        // dims 1,0,2,0,1: t1, t2 send the degree-0 generator to independent
        // vectors, but t1*t2 and t2*t1 land differently in degree 4.
        let dims = vec![1, 0, 2, 0, 1];
        let a1 = vec![
            RatMatrix::from_i64(&[&[1], &[0]]),
            RatMatrix::zeros(0, 0),
            RatMatrix::from_i64(&[&[1, 0]]),
        ];
        let a2 = vec![
            RatMatrix::from_i64(&[&[0], &[1]]),
            RatMatrix::zeros(0, 0),
            RatMatrix::from_i64(&[&[1, 0]]),
        ];
        let m = GradedModule::new_unchecked(ring, dims, vec![a1, a2]).unwrap();
        let report = m.validate();
        assert_eq!(report.first(), Some(&Violation::NonCommuting { generators: (0, 1), degree: 0 }));
    }

    #[test]
    fn shape_violation_reported() {
        let ring = PolynomialRing::torus(1);
        let m = GradedModule::new_unchecked(ring, vec![1, 0, 1], vec![vec![RatMatrix::zeros(2, 1)]]).unwrap();
        assert!(matches!(m.validate().first(), Some(Violation::Shape { .. })));
    }

    #[test]
    fn monomial_action_matches_table() {
        let ring = PolynomialRing::torus(2);
        let m = GradedModule::free(&ring, &[0], 6);
        let basis = ring.monomial_basis(6);
        let table = MonomialActions::new(&m, &basis);
        for a in 0..=6 {
            for (idx, e) in basis.in_degree(a).iter().enumerate() {
                for k in 0..=6 - a {
                    assert_eq!(table.get(a, k, idx), &m.monomial_action(e, k).unwrap());
                }
            }
        }
        let imgs = m.monomial_images(&basis, 0, &[rat(1)], 4);
        assert_eq!(imgs[4].len(), 3);
    }

    #[test]
    fn indecomposables_of_free_module() {
        let ring = PolynomialRing::torus(2);
        let m = GradedModule::free(&ring, &[0, 2], 8);
        let gens: Vec<usize> = (0..=8).map(|q| m.indecomposables_dim(q)).collect();
        assert_eq!(gens, vec![1, 0, 1, 0, 0, 0, 0, 0, 0]);
    }

    #[test]
    fn json_roundtrip() {
        let ring = PolynomialRing::new(vec![2, 4]).unwrap();
        let m = GradedModule::free(&ring, &[0, 1], 7);
        let text = serde_json::to_string(&m.to_json()).unwrap();
        let back: ModuleJson = serde_json::from_str(&text).unwrap();
        assert_eq!(GradedModule::from_json(&back).unwrap(), m);
    }

    #[test]
    fn truncation_and_shift() {
        let ring = PolynomialRing::torus(1);
        let m = GradedModule::free(&ring, &[0], 8);
        let t = m.truncate(4).unwrap();
        assert_eq!(t.dims(), &[1, 0, 1, 0, 1]);
        assert!(t.validate().is_valid());
        let s = m.shift(3);
        assert_eq!(s.dims(), &[0, 0, 0, 1, 0, 1, 0, 1, 0]);
        assert!(s.validate().is_valid());
        assert!(m.truncate(9).is_err());
    }
}
