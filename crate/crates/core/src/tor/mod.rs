//! Bigraded `Tor^{q,H}_p` over a polynomial ring `H`, computed three
//! independent ways, and its reassembly into weight-filtered cohomology.
//!
//! Every table satisfies `dim Tor_p^q = 0` for `q < 2p`: each homological
//! step costs at least two internal degrees because the ring generators sit
//! in even degree `>= 2`.
//!
//! Trusted range: a table computed up to internal degree `bound` reports
//! `trusted_q = bound - max generator degree`. Each internal-degree slice of
//! the Koszul, bar and resolution complexes only involves module degrees
//! `<= q`, so the slack is conservative; all three methods use the same rule
//! so their tables can be compared entry by entry.

mod bar;
mod koszul;
mod smith;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graded::{GradedError, GradedModule, WeightedGradedVectorSpace};
use crate::linalg::{self, LinalgError, RatMatrix};

pub use bar::{bar_complex, bar_tor, bar_tor_modules};
pub use koszul::{koszul_complex, koszul_tor};
pub use smith::{smith_resolution, smith_tor, tor_from_resolution, ResolutionLevel, SmithResolution};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TorError {
    #[error("degree {requested} exceeds truncation degree {truncation}")]
    TruncationExceeded { requested: usize, truncation: usize },
    #[error("base algebra has classes in degree 1 (base is not simply connected)")]
    NonSimplyConnectedBase,
    #[error("base algebra has classes in odd degree {0}; only evenly graded algebras are supported")]
    OddDegreeAlgebra(usize),
    #[error("ring mismatch: {0}")]
    RingMismatch(String),
    #[error("vanishing bound violated: Tor_{p} is nonzero in internal degree {q} < 2p")]
    VanishingViolated { p: usize, q: usize },
    #[error("resolution step {p} is nonzero in degree {degree} < 2p")]
    ConnectivityViolated { p: usize, degree: usize },
    #[error("resolution too short: kernel after step {steps} is nonzero in degree {degree}")]
    IncompleteResolution { steps: usize, degree: usize },
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// `dim Tor_p^{q}` for `q` up to a computed bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigradedTor {
    dims: BTreeMap<(usize, usize), usize>,
    computed_q: usize,
    trusted_q: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorEntry {
    pub p: usize,
    pub q: usize,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorJson {
    pub trusted_q: usize,
    pub entries: Vec<TorEntry>,
}

impl BigradedTor {
    /// Builds a table from per-`q` homology vectors (`by_q[q][p]`) and checks
    /// the vanishing bound.
    pub(crate) fn from_slices(by_q: Vec<Vec<usize>>, trusted_q: usize) -> Result<Self, TorError> {
        let computed_q = by_q.len().saturating_sub(1);
        let mut dims = BTreeMap::new();
        for (q, row) in by_q.into_iter().enumerate() {
            for (p, d) in row.into_iter().enumerate() {
                if d > 0 {
                    dims.insert((p, q), d);
                }
            }
        }
        let t = BigradedTor { dims, computed_q, trusted_q: trusted_q.min(computed_q) };
        t.check_vanishing()?;
        Ok(t)
    }

    pub fn from_entries(entries: &[TorEntry], trusted_q: usize) -> Self {
        let dims: BTreeMap<_, _> = entries.iter().filter(|e| e.dim > 0).map(|e| ((e.p, e.q), e.dim)).collect();
        let computed_q = dims.keys().map(|k| k.1).max().unwrap_or(0).max(trusted_q);
        BigradedTor { dims, computed_q, trusted_q }
    }

    pub fn dim(&self, p: usize, q: usize) -> usize {
        self.dims.get(&(p, q)).copied().unwrap_or(0)
    }

    pub fn trusted_q(&self) -> usize {
        self.trusted_q
    }

    pub fn computed_q(&self) -> usize {
        self.computed_q
    }

    pub fn entries(&self) -> impl Iterator<Item = TorEntry> + '_ {
        self.dims.iter().map(|(&(p, q), &dim)| TorEntry { p, q, dim })
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn max_p(&self) -> usize {
        self.dims.keys().map(|k| k.0).max().unwrap_or(0)
    }

    /// The entries with `q <= bound`.
    pub fn restrict(&self, bound: usize) -> BigradedTor {
        let dims = self.dims.iter().filter(|((_, q), _)| *q <= bound).map(|(k, v)| (*k, *v)).collect();
        BigradedTor { dims, computed_q: self.computed_q.min(bound), trusted_q: self.trusted_q.min(bound) }
    }

    /// The trusted part of the table.
    pub fn trusted(&self) -> BigradedTor {
        self.restrict(self.trusted_q)
    }

    /// The first `(p, q)` with a nonzero entry and `q < 2p`.
    pub fn vanishing_violation(&self) -> Option<(usize, usize)> {
        self.dims.keys().copied().find(|&(p, q)| q < 2 * p)
    }

    fn check_vanishing(&self) -> Result<(), TorError> {
        match self.vanishing_violation() {
            Some((p, q)) => Err(TorError::VanishingViolated { p, q }),
            None => Ok(()),
        }
    }

    /// Entries that differ between two tables on the common trusted range.
    pub fn diff_trusted(&self, other: &BigradedTor) -> Vec<(usize, usize, usize, usize)> {
        let bound = self.trusted_q.min(other.trusted_q);
        let a = self.restrict(bound);
        let b = other.restrict(bound);
        let mut keys: Vec<_> = a.dims.keys().chain(b.dims.keys()).copied().collect();
        keys.sort_unstable();
        keys.dedup();
        keys.into_iter()
            .filter(|&(p, q)| a.dim(p, q) != b.dim(p, q))
            .map(|(p, q)| (p, q, a.dim(p, q), b.dim(p, q)))
            .collect()
    }

    pub fn to_json(&self) -> TorJson {
        TorJson { trusted_q: self.trusted_q, entries: self.entries().collect() }
    }

    pub fn from_json(j: &TorJson) -> Result<Self, TorError> {
        let t = Self::from_entries(&j.entries, j.trusted_q);
        t.check_vanishing()?;
        Ok(t)
    }
}

/// One chain complex of rational vector spaces, indexed by homological degree.
///
/// `differentials[p]` maps `C_p -> C_{p-1}` for `p >= 1`; index 0 holds the
/// zero map out of `C_0`.
#[derive(Clone, Debug)]
pub struct ChainComplex {
    pub dims: Vec<usize>,
    pub differentials: Vec<RatMatrix>,
}

impl ChainComplex {
    pub fn new(dims: Vec<usize>, mut higher: Vec<RatMatrix>) -> Self {
        let d0 = RatMatrix::zeros(0, dims.first().copied().unwrap_or(0));
        higher.insert(0, d0);
        ChainComplex { dims, differentials: higher }
    }

    fn incoming(&self, p: usize) -> RatMatrix {
        self.differentials
            .get(p + 1)
            .cloned()
            .unwrap_or_else(|| RatMatrix::zeros(self.dims[p], 0))
    }

    /// Homology dimensions `H_p` for every `p`, checking `d o d = 0`.
    pub fn homology(&self) -> Result<Vec<usize>, LinalgError> {
        (0..self.dims.len())
            .map(|p| linalg::homology_dim(&self.incoming(p), &self.differentials[p]))
            .collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims.iter().enumerate().map(|(p, &d)| if p % 2 == 0 { d as i64 } else { -(d as i64) }).sum()
    }
}

/// One chain complex per internal degree `q = 0..=bound`.
#[derive(Clone, Debug)]
pub struct ChainComplexBundle {
    pub slices: Vec<ChainComplex>,
}

impl ChainComplexBundle {
    pub fn homology(&self) -> Result<Vec<Vec<usize>>, LinalgError> {
        use rayon::prelude::*;
        self.slices.par_iter().map(ChainComplex::homology).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Koszul,
    Bar,
    Smith,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Koszul, Method::Bar, Method::Smith];

    pub fn name(self) -> &'static str {
        match self {
            Method::Koszul => "koszul",
            Method::Bar => "bar",
            Method::Smith => "smith",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "koszul" => Ok(Method::Koszul),
            "bar" => Ok(Method::Bar),
            "smith" => Ok(Method::Smith),
            other => Err(format!("unknown method {other:?}")),
        }
    }
}

/// `Tor^{H}(m, Q)` by the chosen method, up to internal degree `bound`.
pub fn tor_with_residue_field(method: Method, m: &GradedModule, bound: usize) -> Result<BigradedTor, TorError> {
    match method {
        Method::Koszul => koszul_tor(m, bound),
        Method::Bar => {
            let n = GradedModule::trivial(m.ring(), m.truncation());
            bar_tor_modules(m, &n, bound)
        }
        Method::Smith => {
            let n = GradedModule::trivial(m.ring(), m.truncation());
            smith_tor(m, &n, bound)
        }
    }
}

pub(crate) fn trusted_bound(m: &GradedModule, bound: usize) -> usize {
    bound.saturating_sub(m.ring().max_generator_degree())
}

/// `dim gr^W_nu H^n = dim Tor_{nu - n}^{nu}`, over the trusted range.
///
/// `H^n` is complete for `2n <= trusted_q`, since its weights run from `n` to `2n`.
pub fn assemble_cohomology(t: &BigradedTor) -> WeightedGradedVectorSpace {
    let mut w = WeightedGradedVectorSpace::new();
    for e in t.trusted().entries() {
        w.add(e.q - e.p, e.q, e.dim);
    }
    w
}

/// Whether every nonzero piece has weight equal to its degree; otherwise
/// the first offending `(n, weight)`.
pub fn purity_check(w: &WeightedGradedVectorSpace) -> (bool, Option<(usize, usize)>) {
    let v = w.purity_violation();
    (v.is_none(), v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::PolynomialRing;

    #[test]
    fn assemble_cstar_table() {
        let t = BigradedTor::from_entries(
            &[TorEntry { p: 0, q: 0, dim: 1 }, TorEntry { p: 1, q: 2, dim: 1 }],
            6,
        );
        let w = assemble_cohomology(&t);
        assert_eq!(w.dim(0, 0), 1);
        assert_eq!(w.dim(1, 2), 1);
        assert_eq!(purity_check(&w), (false, Some((1, 2))));
        assert_eq!(purity_check(&WeightedGradedVectorSpace::new()), (true, None));
    }

    #[test]
    fn vanishing_bound_is_enforced_on_json_input() {
        let j = TorJson { trusted_q: 4, entries: vec![TorEntry { p: 2, q: 3, dim: 1 }] };
        assert_eq!(BigradedTor::from_json(&j), Err(TorError::VanishingViolated { p: 2, q: 3 }));
    }

    #[test]
    fn chain_complex_guards_d_squared() {
        let c = ChainComplex::new(vec![1, 1, 1], vec![RatMatrix::identity(1), RatMatrix::identity(1)]);
        assert!(matches!(c.homology(), Err(LinalgError::CompositionNotZero { .. })));
    }

    #[test]
    fn methods_dispatch() {
        let ring = PolynomialRing::torus(1);
        let m = GradedModule::trivial(&ring, 6);
        let tables: Vec<_> = Method::ALL.iter().map(|&k| tor_with_residue_field(k, &m, 6).unwrap()).collect();
        assert_eq!(tables[0], tables[1]);
        assert_eq!(tables[0], tables[2]);
        assert_eq!("bar".parse::<Method>(), Ok(Method::Bar));
    }
}
