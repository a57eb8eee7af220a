//! Connected linear algebraic groups as cohomology data: the pure polynomial
//! ring `H^*(BG)` and the weighted exterior algebra `H^*(G)`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::graded::{PolynomialRing, WeightedGradedVectorSpace};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("unknown group {0:?}; expected torus:<n>, SL:<n>, GL:<n>, Sp:<2n> or custom:[d1,...]")]
    UnknownGroup(String),
    #[error("invalid group parameter in {0:?}: {1}")]
    InvalidParameter(String, String),
}

/// A connected group described by the degrees `2d_1, ..., 2d_r` of the
/// polynomial generators of `H^*(BG)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupData {
    pub name: String,
    bg_generator_degrees: Vec<usize>,
}

impl GroupData {
    pub fn custom(name: impl Into<String>, degrees: Vec<usize>) -> Result<Self, GroupError> {
        let name = name.into();
        if let Some(d) = degrees.iter().find(|&&d| d < 2 || d % 2 != 0) {
            return Err(GroupError::InvalidParameter(name, format!("degree {d} is not even and >= 2")));
        }
        Ok(GroupData { name, bg_generator_degrees: degrees })
    }

    pub fn torus(n: usize) -> Self {
        GroupData { name: format!("torus:{n}"), bg_generator_degrees: vec![2; n] }
    }

    pub fn bg_generator_degrees(&self) -> &[usize] {
        &self.bg_generator_degrees
    }

    pub fn rank(&self) -> usize {
        self.bg_generator_degrees.len()
    }

    pub fn classifying_ring(&self) -> PolynomialRing {
        PolynomialRing::new(self.bg_generator_degrees.clone()).expect("degrees validated at construction")
    }

    /// `H^*(BG)` up to `truncation`, every class of weight equal to its degree.
    pub fn classifying_series(&self, truncation: usize) -> WeightedGradedVectorSpace {
        WeightedGradedVectorSpace::pure_from_series(self.classifying_ring().dims(truncation).dims())
    }

    pub fn group_cohomology(&self) -> WeightedExteriorAlgebra {
        let degrees: Vec<usize> = self.bg_generator_degrees.iter().map(|d| d - 1).collect();
        let weights = self.bg_generator_degrees.clone();
        WeightedExteriorAlgebra { generator_degrees: degrees, generator_weights: weights }
    }

    /// `dim (Lambda^{<=a} P) cap H^k(G)`, which is `dim W_{a+k} H^k(G)`.
    pub fn complexity_filtration(&self, k: usize, a: usize) -> usize {
        let ext = self.group_cohomology();
        ext.subsets()
            .filter(|(deg, _, size)| *deg == k && *size <= a)
            .count()
    }
}

impl fmt::Display for GroupData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

/// Exterior algebra on primitive generators of odd degree `k` and weight `k + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedExteriorAlgebra {
    pub generator_degrees: Vec<usize>,
    pub generator_weights: Vec<usize>,
}

impl WeightedExteriorAlgebra {
    /// (degree, weight, number of factors) of every exterior monomial.
    fn subsets(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let r = self.generator_degrees.len();
        (0u64..1 << r).map(move |mask| {
            let mut deg = 0;
            let mut weight = 0;
            for i in 0..r {
                if mask >> i & 1 == 1 {
                    deg += self.generator_degrees[i];
                    weight += self.generator_weights[i];
                }
            }
            (deg, weight, mask.count_ones() as usize)
        })
    }

    pub fn to_weighted(&self) -> WeightedGradedVectorSpace {
        let mut w = WeightedGradedVectorSpace::new();
        for (deg, weight, _) in self.subsets() {
            w.add(deg, weight, 1);
        }
        w
    }
}

impl FromStr for GroupData {
    type Err = GroupError;

    fn from_str(spec: &str) -> Result<Self, Self::Err> {
        catalog_lookup(spec)
    }
}

/// Parses `torus:<n>`, `SL:<n>`, `GL:<n>`, `Sp:<2n>` or `custom:[d1,d2,...]`.
pub fn catalog_lookup(spec: &str) -> Result<GroupData, GroupError> {
    let spec = spec.trim();
    let (family, arg) = spec.split_once(':').ok_or_else(|| GroupError::UnknownGroup(spec.into()))?;
    let bad = |msg: &str| GroupError::InvalidParameter(spec.into(), msg.into());
    if family == "custom" {
        let inner = arg
            .trim()
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| bad("expected a bracketed list"))?;
        let degrees = inner
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<usize>().map_err(|_| bad("degrees must be nonnegative integers")))
            .collect::<Result<Vec<_>, _>>()?;
        return GroupData::custom(spec, degrees);
    }
    let n: usize = arg.trim().parse().map_err(|_| bad("expected a nonnegative integer"))?;
    let degrees = match family {
        "torus" | "T" => vec![2; n],
        "SL" => {
            if n == 0 {
                return Err(bad("SL needs n >= 1"));
            }
            (2..=n).map(|i| 2 * i).collect()
        }
        "GL" => (1..=n).map(|i| 2 * i).collect(),
        "Sp" => {
            if !n.is_multiple_of(2) {
                return Err(bad("Sp takes an even matrix size 2n"));
            }
            (1..=n / 2).map(|i| 4 * i).collect()
        }
        _ => return Err(GroupError::UnknownGroup(spec.into())),
    };
    Ok(GroupData { name: spec.to_string(), bg_generator_degrees: degrees })
}
