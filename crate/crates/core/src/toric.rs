//! Simplicial fans, their Stanley–Reisner modules over `H^*(BT)`, and the
//! cohomology of the toric variety read off from `Tor`.

use std::collections::{BTreeSet, HashMap};

use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graded::{GradedError, GradedModule, PolynomialRing, WeightedGradedVectorSpace};
use crate::linalg::{self, rat, RatMatrix, Rational};
use crate::tor::{assemble_cohomology, koszul_tor, BigradedTor, TorError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FanError {
    #[error("ray {index} has {len} coordinates, expected {rank}")]
    RayDimension { index: usize, len: usize, rank: usize },
    #[error("ray {0} is not primitive")]
    NotPrimitive(usize),
    #[error("rays {0} and {1} coincide")]
    DuplicateRay(usize, usize),
    #[error("cone {cone} refers to ray {ray}, but there are only {count} rays")]
    BadIndex { cone: usize, ray: usize, count: usize },
    #[error("cone {0} repeats a ray")]
    RepeatedRay(usize),
    #[error("cone {0} is not simplicial: its rays are linearly dependent")]
    NonSimplicial(usize),
    #[error("cones {0} and {1} meet outside their common face")]
    BadIntersection(usize, usize),
    #[error("unknown fan family {0:?}")]
    UnknownFamily(String),
    #[error("invalid fan file: {0}")]
    Json(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ToricError {
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error(transparent)]
    Tor(#[from] TorError),
}

/// A simplicial fan in `Z^n`, given by its rays and its maximal cones
/// (as sets of ray indices). An empty cone list means only the zero cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fan {
    pub rank: usize,
    pub rays: Vec<Vec<i64>>,
    pub max_cones: Vec<Vec<usize>>,
}

fn to_rational(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| rat(x)).collect()
}

/// Determinant of a small integer matrix by fraction-free elimination.
fn det(mut m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        let Some(piv) = (k..n).find(|&i| m[i][k] != 0) else { return 0 };
        if piv != k {
            m.swap(piv, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u64..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
        .collect()
}

/// Whether some nonzero nonnegative combination of `a` equals a nonnegative
/// combination of `b`, after both are projected away from `common`.
///
/// The solution set is a pointed cone in the nonnegative orthant, so it is
/// nonzero iff it has an extreme ray, and extreme rays are sign-constant
/// circuits of `[A | -B]`; circuits are found by checking every support.
fn cones_overlap(rank: usize, a: &[Vec<Rational>], b: &[Vec<Rational>], common: &[Vec<Rational>]) -> bool {
    let project = |v: &Vec<Rational>| -> Vec<Rational> {
        if common.is_empty() {
            return v.clone();
        }
        linalg::Rref::new(&RatMatrix::from_columns(rank, common).transpose()).reduce(v)
    };
    let mut cols: Vec<Vec<Rational>> = a.iter().map(project).collect();
    let na = cols.len();
    cols.extend(b.iter().map(|v| project(v).iter().map(|x| -x).collect::<Vec<_>>()));
    let total = cols.len();
    for mask in 1u64..1 << total {
        if mask & ((1 << na) - 1) == 0 {
            continue;
        }
        let support: Vec<usize> = (0..total).filter(|i| mask >> i & 1 == 1).collect();
        let sub: Vec<Vec<Rational>> = support.iter().map(|&i| cols[i].clone()).collect();
        let ker = linalg::kernel(&RatMatrix::from_columns(rank, &sub));
        if ker.dim() != 1 {
            continue;
        }
        let v = &ker.basis[0];
        if v.iter().any(Zero::is_zero) {
            continue;
        }
        let pos = v.iter().all(|x| x > &Rational::zero());
        let neg = v.iter().all(|x| x < &Rational::zero());
        if pos || neg {
            return true;
        }
    }
    false
}

impl Fan {
    pub fn new(rank: usize, rays: Vec<Vec<i64>>, max_cones: Vec<Vec<usize>>) -> Result<Self, FanError> {
        let mut cones = max_cones;
        for c in &mut cones {
            c.sort_unstable();
        }
        let fan = Fan { rank, rays, max_cones: cones };
        fan.validate()?;
        Ok(fan)
    }

    fn validate(&self) -> Result<(), FanError> {
        for (i, r) in self.rays.iter().enumerate() {
            if r.len() != self.rank {
                return Err(FanError::RayDimension { index: i, len: r.len(), rank: self.rank });
            }
            let g = r.iter().fold(0i64, |g, &x| g.gcd(&x));
            if g != 1 {
                return Err(FanError::NotPrimitive(i));
            }
            if let Some(j) = self.rays[..i].iter().position(|s| s == r) {
                return Err(FanError::DuplicateRay(j, i));
            }
        }
        for (ci, c) in self.max_cones.iter().enumerate() {
            if let Some(&ray) = c.iter().find(|&&r| r >= self.rays.len()) {
                return Err(FanError::BadIndex { cone: ci, ray, count: self.rays.len() });
            }
            if c.windows(2).any(|w| w[0] == w[1]) {
                return Err(FanError::RepeatedRay(ci));
            }
            let vecs: Vec<Vec<Rational>> = c.iter().map(|&i| to_rational(&self.rays[i])).collect();
            if linalg::span_dim(self.rank, &vecs) != c.len() {
                return Err(FanError::NonSimplicial(ci));
            }
        }
        for i in 0..self.max_cones.len() {
            for j in i + 1..self.max_cones.len() {
                let (s, t) = (&self.max_cones[i], &self.max_cones[j]);
                let common: Vec<usize> = s.iter().copied().filter(|x| t.contains(x)).collect();
                let only_s: Vec<usize> = s.iter().copied().filter(|x| !t.contains(x)).collect();
                let only_t: Vec<usize> = t.iter().copied().filter(|x| !s.contains(x)).collect();
                let vecs = |ix: &[usize]| ix.iter().map(|&k| to_rational(&self.rays[k])).collect::<Vec<_>>();
                if cones_overlap(self.rank, &vecs(&only_s), &vecs(&only_t), &vecs(&common)) {
                    return Err(FanError::BadIntersection(i, j));
                }
            }
        }
        Ok(())
    }

    pub fn num_rays(&self) -> usize {
        self.rays.len()
    }

    /// Every cone of the fan (faces of maximal cones, including the zero cone), as sorted ray sets.
    pub fn cones(&self) -> BTreeSet<Vec<usize>> {
        let mut out = BTreeSet::new();
        out.insert(Vec::new());
        for c in &self.max_cones {
            for mask in 0u64..1 << c.len() {
                out.insert((0..c.len()).filter(|i| mask >> i & 1 == 1).map(|i| c[i]).collect());
            }
        }
        out
    }

    /// Cones not contained in a larger cone.
    pub fn maximal_cones(&self) -> Vec<Vec<usize>> {
        let cones = self.cones();
        cones
            .iter()
            .filter(|c| !cones.iter().any(|d| d.len() > c.len() && c.iter().all(|x| d.contains(x))))
            .cloned()
            .collect()
    }

    /// `f[k]` = number of cones with `k` rays, `k = 0..=rank`.
    pub fn f_vector(&self) -> Vec<usize> {
        let mut f = vec![0; self.rank + 1];
        for c in self.cones() {
            f[c.len()] += 1;
        }
        f
    }

    /// Every maximal cone's rays extend to a lattice basis: the `k x k` minors
    /// of its ray matrix have gcd 1.
    pub fn is_smooth(&self) -> bool {
        self.max_cones.iter().all(|c| {
            let k = c.len();
            if k == 0 {
                return true;
            }
            let g = combinations(self.rank, k).into_iter().fold(0i128, |g, cols| {
                let m: Vec<Vec<i128>> =
                    c.iter().map(|&r| cols.iter().map(|&j| self.rays[r][j] as i128).collect()).collect();
                g.gcd(&det(m))
            });
            g == 1
        })
    }

    /// Maximal cones full-dimensional, each facet in exactly two of them,
    /// and connected through shared facets.
    pub fn is_complete(&self) -> bool {
        let maximal = self.maximal_cones();
        if self.rank == 0 {
            return true;
        }
        if maximal.iter().any(|c| c.len() != self.rank) {
            return false;
        }
        let mut facets: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
        for (i, c) in maximal.iter().enumerate() {
            for skip in 0..c.len() {
                let f: Vec<usize> = c.iter().enumerate().filter(|&(j, _)| j != skip).map(|(_, &x)| x).collect();
                facets.entry(f).or_default().push(i);
            }
        }
        if facets.values().any(|v| v.len() != 2) {
            return false;
        }
        let mut seen = vec![false; maximal.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for v in facets.values().filter(|v| v.contains(&i)) {
                for &j in v {
                    if !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// `sum_k h_k t^{n-k} = sum_k f_{k-1} (t-1)^{n-k}`, where `f_{k-1}` counts
    /// `k`-dimensional cones. Equal to the even Betti numbers when the fan is
    /// smooth and complete.
    pub fn h_vector(&self) -> Vec<i64> {
        let n = self.rank;
        let f = self.f_vector();
        // coefficient of t^{n-k} in the result
        let mut h = vec![0i64; n + 1];
        for (k, &fk) in f.iter().enumerate() {
            let e = n - k;
            // (t-1)^e = sum_i C(e,i) t^i (-1)^{e-i}
            let mut binom = 1i64;
            for i in 0..=e {
                let sign = if (e - i).is_multiple_of(2) { 1 } else { -1 };
                h[n - i] += fk as i64 * binom * sign;
                binom = binom * (e - i) as i64 / (i + 1) as i64;
            }
        }
        h
    }

    pub fn ring(&self) -> PolynomialRing {
        PolynomialRing::torus(self.rank)
    }

    /// Monomials in the ray variables (each of degree 2) supported on a cone,
    /// in degree `2k`, grouped by support.
    fn face_monomials(&self, k: usize) -> Vec<Vec<u32>> {
        let m = self.num_rays();
        let mut out = Vec::new();
        for cone in self.cones() {
            if cone.len() > k || (cone.is_empty() && k > 0) {
                continue;
            }
            // compositions of k into cone.len() positive parts
            let mut parts = Vec::new();
            compositions(k, cone.len(), &mut Vec::new(), &mut parts);
            for p in parts {
                let mut e = vec![0u32; m];
                for (&i, &x) in cone.iter().zip(&p) {
                    e[i] = x as u32;
                }
                out.push(e);
            }
        }
        out.sort_unstable_by(|a, b| b.cmp(a));
        out
    }

    /// The Stanley–Reisner ring as a module over `Q[t_1..t_n]`, with
    /// `t_j` acting by `sum_i (v_i)_j x_i` and non-face monomials set to zero.
    pub fn stanley_reisner_module(&self, truncation: usize) -> Result<GradedModule, ToricError> {
        let bases: Vec<Vec<Vec<u32>>> =
            (0..=truncation).map(|d| if d % 2 == 0 { self.face_monomials(d / 2) } else { Vec::new() }).collect();
        let index: Vec<HashMap<&Vec<u32>, usize>> =
            bases.iter().map(|b| b.iter().enumerate().map(|(i, e)| (e, i)).collect()).collect();
        let dims: Vec<usize> = bases.iter().map(Vec::len).collect();
        let actions = (0..self.rank)
            .map(|j| {
                (0..=truncation.saturating_sub(2))
                    .map(|k| {
                        let mut a = RatMatrix::zeros(dims[k + 2], dims[k]);
                        for (col, e) in bases[k].iter().enumerate() {
                            for (i, ray) in self.rays.iter().enumerate() {
                                if ray[j] == 0 {
                                    continue;
                                }
                                let mut f = e.clone();
                                f[i] += 1;
                                if let Some(&row) = index[k + 2].get(&f) {
                                    a.add_to(row, col, &rat(ray[j]));
                                }
                            }
                        }
                        a
                    })
                    .collect()
            })
            .collect::<Vec<Vec<RatMatrix>>>();
        let actions = if truncation < 2 { vec![Vec::new(); self.rank] } else { actions };
        Ok(GradedModule::new(self.ring(), dims, actions)?)
    }

    /// Rays permuted: `perm[i]` is the new index of ray `i`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Fan, FanError> {
        let mut rays = vec![Vec::new(); self.rays.len()];
        for (i, r) in self.rays.iter().enumerate() {
            rays[perm[i]] = r.clone();
        }
        let cones = self.max_cones.iter().map(|c| c.iter().map(|&i| perm[i]).collect()).collect();
        Fan::new(self.rank, rays, cones)
    }

    /// Image under an integer matrix `g` (rows act on ray coordinates); `g`
    /// should be unimodular for the result to be isomorphic.
    pub fn transform(&self, g: &[Vec<i64>]) -> Result<Fan, FanError> {
        let rays = self
            .rays
            .iter()
            .map(|r| g.iter().map(|row| row.iter().zip(r).map(|(a, b)| a * b).sum()).collect())
            .collect();
        Fan::new(self.rank, rays, self.max_cones.clone())
    }

    /// `X_Sigma x X_Sigma'`: rays placed in complementary coordinates, cones paired.
    pub fn product(&self, other: &Fan) -> Result<Fan, FanError> {
        let rank = self.rank + other.rank;
        let mut rays: Vec<Vec<i64>> = self
            .rays
            .iter()
            .map(|r| r.iter().copied().chain(std::iter::repeat_n(0, other.rank)).collect())
            .collect();
        rays.extend(other.rays.iter().map(|r| std::iter::repeat_n(0, self.rank).chain(r.iter().copied()).collect()));
        let offset = self.rays.len();
        let left = if self.max_cones.is_empty() { vec![Vec::new()] } else { self.max_cones.clone() };
        let right = if other.max_cones.is_empty() { vec![Vec::new()] } else { other.max_cones.clone() };
        let mut cones = Vec::new();
        for a in &left {
            for b in &right {
                let mut c = a.clone();
                c.extend(b.iter().map(|i| i + offset));
                cones.push(c);
            }
        }
        Fan::new(rank, rays, cones)
    }

    pub fn to_json(&self) -> FanJson {
        FanJson { rank: self.rank, rays: self.rays.clone(), max_cones: self.max_cones.clone() }
    }
}

fn compositions(k: usize, parts: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if parts == 0 {
        if k == 0 {
            out.push(prefix.clone());
        }
        return;
    }
    let min_rest = parts - 1;
    if k < parts {
        return;
    }
    for x in 1..=k - min_rest {
        prefix.push(x);
        compositions(k - x, parts - 1, prefix, out);
        prefix.pop();
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanJson {
    pub rank: usize,
    pub rays: Vec<Vec<i64>>,
    pub max_cones: Vec<Vec<usize>>,
}

impl TryFrom<FanJson> for Fan {
    type Error = FanError;

    fn try_from(j: FanJson) -> Result<Self, FanError> {
        Fan::new(j.rank, j.rays, j.max_cones)
    }
}

/// `Tor^{H^*(BT)}(SR, Q)` up to internal degree `truncation`.
pub fn toric_tor(fan: &Fan, truncation: usize) -> Result<BigradedTor, ToricError> {
    let m = fan.stanley_reisner_module(truncation)?;
    Ok(koszul_tor(&m, truncation)?)
}

/// Weight-graded cohomology of the toric variety, over the trusted range of the
/// Koszul computation. Meaningful for smooth fans.
pub fn toric_cohomology(fan: &Fan, truncation: usize) -> Result<WeightedGradedVectorSpace, ToricError> {
    Ok(assemble_cohomology(&toric_tor(fan, truncation)?))
}

pub mod families {
    //! Standard fans by name.

    use super::{Fan, FanError};

    pub fn projective_space(n: usize) -> Fan {
        let mut rays: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        rays.push(vec![-1; n]);
        let cones = (0..=n).map(|skip| (0..=n).filter(|&i| i != skip).collect()).collect();
        Fan::new(n, rays, cones).expect("projective fan is valid")
    }

    /// `C^n`: the positive orthant.
    pub fn affine_space(n: usize) -> Fan {
        let rays = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        Fan::new(n, rays, vec![(0..n).collect()]).expect("orthant is valid")
    }

    /// `C^n - {0}`: all proper faces of the positive orthant.
    pub fn punctured_affine_space(n: usize) -> Fan {
        if n <= 1 {
            return torus(n);
        }
        let rays = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        let cones = (0..n).map(|skip| (0..n).filter(|&i| i != skip).collect()).collect();
        Fan::new(n, rays, cones).expect("boundary of the orthant is valid")
    }

    /// `(C^*)^n`: the zero cone in `Z^n`.
    pub fn torus(n: usize) -> Fan {
        Fan::new(n, Vec::new(), Vec::new()).expect("zero fan is valid")
    }

    /// Hirzebruch surface `F_a`.
    pub fn hirzebruch(a: i64) -> Fan {
        let rays = vec![vec![1, 0], vec![0, 1], vec![-1, a], vec![0, -1]];
        Fan::new(2, rays, vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]]).expect("Hirzebruch fan is valid")
    }

    /// `P^2` blown up at a torus-fixed point.
    pub fn blowup_p2() -> Fan {
        let rays = vec![vec![1, 0], vec![1, 1], vec![0, 1], vec![-1, -1]];
        Fan::new(2, rays, vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]]).expect("blow-up fan is valid")
    }

    pub fn by_name(name: &str, param: i64) -> Result<Fan, FanError> {
        let n = usize::try_from(param).map_err(|_| FanError::UnknownFamily(format!("{name} with parameter {param}")));
        Ok(match name {
            "projective" => projective_space(n?),
            "affine" => affine_space(n?),
            "punctured_affine" | "cn_minus_origin" => punctured_affine_space(n?),
            "torus" | "cstar_n" => torus(n?),
            "hirzebruch" => hirzebruch(param),
            "blowup_p2" => blowup_p2(),
            other => return Err(FanError::UnknownFamily(other.into())),
        })
    }
}

/// A fan file: either one fan or a family over a list of parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FanFile {
    Single(FanJson),
    Family { family: String, #[serde(alias = "a", alias = "n")] params: Vec<i64> },
}

impl FanFile {
    pub fn parse(text: &str) -> Result<Self, FanError> {
        serde_json::from_str(text).map_err(|e| FanError::Json(e.to_string()))
    }

    /// Named fans described by the file; `stem` names a single fan.
    pub fn fans(&self, stem: &str) -> Result<Vec<(String, Fan)>, FanError> {
        match self {
            FanFile::Single(j) => Ok(vec![(stem.to_string(), Fan::try_from(j.clone())?)]),
            FanFile::Family { family, params } => params
                .iter()
                .map(|&a| Ok((format!("{family}_{a}"), families::by_name(family, a)?)))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::families::*;
    use super::*;

    #[test]
    fn smoothness() {
        assert!(projective_space(2).is_smooth());
        let singular = Fan::new(2, vec![vec![1, 0], vec![1, 2]], vec![vec![0, 1]]).unwrap();
        assert!(!singular.is_smooth());
        assert!(torus(2).is_smooth());
        assert!(hirzebruch(3).is_smooth());
    }

    #[test]
    fn completeness() {
        assert!(projective_space(2).is_complete());
        assert!(!affine_space(2).is_complete());
        assert!(projective_space(1).product(&projective_space(1)).unwrap().is_complete());
        assert!(!punctured_affine_space(2).is_complete());
        assert!(!torus(1).is_complete());
        assert!(blowup_p2().is_complete());
    }

    #[test]
    fn invalid_fans_are_rejected() {
        assert_eq!(Fan::new(1, vec![vec![2]], vec![]), Err(FanError::NotPrimitive(0)));
        assert_eq!(Fan::new(1, vec![vec![1], vec![1]], vec![]), Err(FanError::DuplicateRay(0, 1)));
        assert_eq!(
            Fan::new(2, vec![vec![1, 0], vec![0, 1], vec![1, 1]], vec![vec![0, 1, 2]]),
            Err(FanError::NonSimplicial(0))
        );
        // two overlapping 2-cones
        assert_eq!(
            Fan::new(2, vec![vec![1, 0], vec![0, 1], vec![1, 1], vec![-1, 2]], vec![vec![0, 1], vec![2, 3]]),
            Err(FanError::BadIntersection(0, 1))
        );
        // a ray lying inside another cone
        assert_eq!(
            Fan::new(2, vec![vec![1, 0], vec![0, 1], vec![1, 1]], vec![vec![0, 1], vec![2]]),
            Err(FanError::BadIntersection(0, 1))
        );
        assert!(matches!(Fan::new(2, vec![vec![1, 0]], vec![vec![3]]), Err(FanError::BadIndex { .. })));
    }

    #[test]
    fn h_vectors() {
        assert_eq!(projective_space(2).h_vector(), vec![1, 1, 1]);
        assert_eq!(projective_space(1).product(&projective_space(1)).unwrap().h_vector(), vec![1, 2, 1]);
        assert_eq!(projective_space(3).h_vector(), vec![1, 1, 1, 1]);
        // C^2: f = (1, 2, 1), (t-1)^2 + 2(t-1) + 1 = t^2
        assert_eq!(affine_space(2).h_vector(), vec![1, 0, 0]);
    }

    #[test]
    fn stanley_reisner_dimensions() {
        let m = projective_space(2).stanley_reisner_module(4).unwrap();
        assert_eq!(m.dims(), &[1, 0, 3, 0, 6]);
        let m = projective_space(2).stanley_reisner_module(6).unwrap();
        assert_eq!(m.dim(6), 9);
        let m = punctured_affine_space(2).stanley_reisner_module(8).unwrap();
        assert_eq!(m.dims(), &[1, 0, 2, 0, 2, 0, 2, 0, 2]);
        let m = torus(1).stanley_reisner_module(6).unwrap();
        assert_eq!(m.dims(), &[1, 0, 0, 0, 0, 0, 0]);
    }

    #[test]
    fn cohomology_examples() {
        let w = toric_cohomology(&projective_space(2), 8).unwrap();
        assert_eq!(w.betti(4), vec![1, 0, 1, 0, 1]);
        assert!(w.is_pure());
        let w = toric_cohomology(&punctured_affine_space(2), 8).unwrap();
        assert_eq!(w.entries().map(|e| (e.n, e.weight, e.dim)).collect::<Vec<_>>(), vec![(0, 0, 1), (3, 4, 1)]);
        let w = toric_cohomology(&torus(2), 8).unwrap();
        assert_eq!(
            w.entries().map(|e| (e.n, e.weight, e.dim)).collect::<Vec<_>>(),
            vec![(0, 0, 1), (1, 2, 2), (2, 4, 1)]
        );
    }

    #[test]
    fn relabelling_and_lattice_changes_do_not_matter() {
        let f = hirzebruch(2);
        let base = toric_tor(&f, 10).unwrap();
        assert_eq!(toric_tor(&f.relabel(&[2, 0, 3, 1]).unwrap(), 10).unwrap(), base);
        let g = vec![vec![1, 1], vec![0, 1]];
        assert_eq!(toric_tor(&f.transform(&g).unwrap(), 10).unwrap(), base);
    }

    #[test]
    fn family_files() {
        let f = FanFile::parse(r#"{"family": "hirzebruch", "a": [0, 1, 2, 3]}"#).unwrap();
        let fans = f.fans("hirzebruch_a").unwrap();
        assert_eq!(fans.len(), 4);
        assert_eq!(fans[3].0, "hirzebruch_3");
        let single = FanFile::parse(r#"{"rank": 1, "rays": [[1], [-1]], "max_cones": [[0], [1]]}"#).unwrap();
        assert!(single.fans("p1").unwrap()[0].1.is_complete());
        assert!(FanFile::parse(r#"{"family": "nonsense", "n": [1]}"#).unwrap().fans("x").is_err());
    }
}
