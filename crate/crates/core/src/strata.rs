//! Equivariant cohomology from a finite orbit decomposition: each orbit of
//! codimension `c` with stabilizer `H` contributes `H^{*-2c}(BH)`, shifted in
//! degree and weight alike, so the sum stays pure.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graded::{GradedModule, WeightedGradedVectorSpace, WeightedJson};
use crate::groups::{catalog_lookup, GroupData, GroupError};
use crate::spectral::{degeneration_certificate, DegenerationCertificate, PurityFlags, SpectralError};
use crate::tor::{assemble_cohomology, koszul_tor, BigradedTor, TorError};
use crate::toric::Fan;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StrataError {
    #[error("no orbit of codimension 0")]
    NoOpenOrbit,
    #[error("stabilizer series of orbit {0:?} is not pure")]
    ImpureStabilizer(String),
    #[error("input series is not pure: {0}")]
    ImpureInput(String),
    #[error("module series differs from the orbit series in degree {degree}: module {module}, orbits {orbits}")]
    SeriesModuleMismatch { degree: usize, module: usize, orbits: usize },
    #[error("module is over a different ring than H^*(B{0})")]
    RingMismatch(String),
    #[error("invalid stratification file: {0}")]
    Json(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Tor(#[from] TorError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// `H^*(BH)` for a stabilizer: a catalog group, or an explicit pure series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stabilizer {
    Group(GroupData),
    Series(WeightedGradedVectorSpace),
}

impl Stabilizer {
    fn series(&self, truncation: usize) -> WeightedGradedVectorSpace {
        match self {
            Stabilizer::Group(g) => g.classifying_series(truncation),
            Stabilizer::Series(s) => s.truncate(truncation),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orbit {
    pub label: String,
    pub codim: usize,
    pub stabilizer: Stabilizer,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitStratification {
    pub orbits: Vec<Orbit>,
    /// The acting group, when recorded in the file.
    pub group: Option<GroupData>,
}

impl OrbitStratification {
    pub fn new(orbits: Vec<Orbit>, group: Option<GroupData>) -> Result<Self, StrataError> {
        if !orbits.iter().any(|o| o.codim == 0) {
            return Err(StrataError::NoOpenOrbit);
        }
        for o in &orbits {
            if let Stabilizer::Series(s) = &o.stabilizer {
                if !s.is_pure() {
                    return Err(StrataError::ImpureStabilizer(o.label.clone()));
                }
            }
        }
        Ok(OrbitStratification { orbits, group })
    }

    /// Torus orbits of a toric variety: one per cone, of codimension its
    /// dimension, with stabilizer a torus of that rank.
    pub fn from_fan(fan: &Fan) -> Self {
        let orbits = fan
            .cones()
            .into_iter()
            .map(|c| Orbit {
                label: format!("O({})", c.iter().map(usize::to_string).collect::<Vec<_>>().join(",")),
                codim: c.len(),
                stabilizer: Stabilizer::Group(GroupData::torus(c.len())),
            })
            .collect();
        OrbitStratification { orbits, group: Some(GroupData::torus(fan.rank)) }
    }

    pub fn from_json(text: &str) -> Result<Self, StrataError> {
        let j: StratificationJson = serde_json::from_str(text).map_err(|e| StrataError::Json(e.to_string()))?;
        let group = j.group.as_deref().map(catalog_lookup).transpose()?;
        let orbits = j
            .orbits
            .into_iter()
            .map(|o| {
                let stabilizer = match o.stabilizer {
                    StabilizerJson::Spec(s) if s == "trivial" => Stabilizer::Group(GroupData::torus(0)),
                    StabilizerJson::Spec(s) => Stabilizer::Group(catalog_lookup(&s)?),
                    StabilizerJson::Series { series } => {
                        Stabilizer::Series(WeightedGradedVectorSpace::pure_from_series(&series))
                    }
                    StabilizerJson::Weighted(w) => Stabilizer::Series(WeightedGradedVectorSpace::from_json(&w)),
                };
                Ok(Orbit { label: o.label, codim: o.codim, stabilizer })
            })
            .collect::<Result<Vec<_>, StrataError>>()?;
        OrbitStratification::new(orbits, group)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct StratificationJson {
    #[serde(default)]
    group: Option<String>,
    orbits: Vec<OrbitJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct OrbitJson {
    label: String,
    codim: usize,
    stabilizer: StabilizerJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum StabilizerJson {
    Spec(String),
    Series { series: Vec<usize> },
    Weighted(WeightedJson),
}

/// `sum over orbits of H^{*-2c}(BH)`, up to degree `truncation`, with weight equal to degree.
pub fn equivariant_series(s: &OrbitStratification, truncation: usize) -> WeightedGradedVectorSpace {
    let mut out = WeightedGradedVectorSpace::new();
    for o in &s.orbits {
        let shift = 2 * o.codim;
        if shift > truncation {
            continue;
        }
        for e in o.stabilizer.series(truncation - shift).entries() {
            out.add(e.n + shift, e.weight + shift, e.dim);
        }
    }
    debug_assert!(out.is_pure());
    out
}

/// Product of two pure series with degrees and weights added, kept up to `truncation`.
pub fn fibration_series(
    base: &WeightedGradedVectorSpace,
    fiber: &WeightedGradedVectorSpace,
    truncation: usize,
) -> Result<WeightedGradedVectorSpace, StrataError> {
    if let Some((n, w)) = base.purity_violation() {
        return Err(StrataError::ImpureInput(format!("base has weight {w} in degree {n}")));
    }
    if let Some((n, w)) = fiber.purity_violation() {
        return Err(StrataError::ImpureInput(format!("fiber has weight {w} in degree {n}")));
    }
    let mut out = WeightedGradedVectorSpace::new();
    for a in base.entries() {
        for b in fiber.entries() {
            if a.n + b.n <= truncation {
                out.add(a.n + b.n, a.weight + b.weight, a.dim * b.dim);
            }
        }
    }
    Ok(out)
}

/// Cohomology recovered from the orbit data plus a module structure.
#[derive(Clone, Debug)]
pub struct Recovered {
    pub cohomology: WeightedGradedVectorSpace,
    pub tor: BigradedTor,
    /// Degeneration is justified by weights, not by computing pages.
    pub certificate: DegenerationCertificate,
    /// Inputs taken on trust rather than derived from the orbits.
    pub assumed: Vec<String>,
}

/// Runs the Koszul pipeline on `module`, a caller-supplied `H^*(BG)`-module
/// structure on the equivariant cohomology; the orbits only fix its series.
pub fn recover_from_strata(
    s: &OrbitStratification,
    group: &GroupData,
    module: &GradedModule,
    truncation: usize,
) -> Result<Recovered, StrataError> {
    if module.ring() != &group.classifying_ring() {
        return Err(StrataError::RingMismatch(group.name.clone()));
    }
    let series = equivariant_series(s, truncation);
    for degree in 0..=truncation {
        let (m, o) = (module.dim(degree), series.total(degree));
        if m != o {
            return Err(StrataError::SeriesModuleMismatch { degree, module: m, orbits: o });
        }
    }
    let tor = koszul_tor(module, truncation)?;
    let cohomology = assemble_cohomology(&tor);
    let certificate = degeneration_certificate(&tor, PurityFlags::PURE)?;
    Ok(Recovered {
        cohomology,
        tor,
        certificate,
        assumed: vec![
            "module structure over the classifying ring supplied by the caller".into(),
            "stabilizer series already invariant under component groups".into(),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::PolynomialRing;
    use crate::toric::{families, toric_cohomology};

    fn totals(w: &WeightedGradedVectorSpace, top: usize) -> Vec<usize> {
        (0..=top).map(|n| w.total(n)).collect()
    }

    #[test]
    fn free_orbit_is_a_point() {
        let s = OrbitStratification::from_json(r#"{"orbits": [{"label": "G", "codim": 0, "stabilizer": "trivial"}]}"#)
            .unwrap();
        assert_eq!(totals(&equivariant_series(&s, 6), 6), vec![1, 0, 0, 0, 0, 0, 0]);
    }

    #[test]
    fn line_under_cstar_is_contractible() {
        let s = OrbitStratification::from_json(
            r#"{"group": "torus:1", "orbits": [
                {"label": "C*", "codim": 0, "stabilizer": "trivial"},
                {"label": "0", "codim": 1, "stabilizer": "torus:1"}]}"#,
        )
        .unwrap();
        let bg = GroupData::torus(1).classifying_series(10);
        assert_eq!(equivariant_series(&s, 10), bg);
    }

    #[test]
    fn projective_line_matches_toric_pipeline() {
        let fan = families::projective_space(1);
        let s = OrbitStratification::from_fan(&fan);
        assert_eq!(totals(&equivariant_series(&s, 6), 6), vec![1, 0, 2, 0, 2, 0, 2]);
        let m = fan.stanley_reisner_module(8).unwrap();
        let r = recover_from_strata(&s, &GroupData::torus(1), &m, 8).unwrap();
        assert_eq!(r.cohomology, toric_cohomology(&fan, 8).unwrap());
        assert_eq!(r.cohomology.betti(2), vec![1, 0, 1]);
        assert!(r.cohomology.is_pure());
        assert!(r.certificate.verify(&r.tor));
    }

    #[test]
    fn free_orbit_recovers_group_cohomology() {
        let g = catalog_lookup("SL:3").unwrap();
        let s = OrbitStratification::new(
            vec![Orbit { label: "G".into(), codim: 0, stabilizer: Stabilizer::Group(GroupData::torus(0)) }],
            Some(g.clone()),
        )
        .unwrap();
        let m = GradedModule::trivial(&g.classifying_ring(), 20);
        let r = recover_from_strata(&s, &g, &m, 20).unwrap();
        assert_eq!(r.cohomology, g.group_cohomology().to_weighted());
    }

    #[test]
    fn point_recovers_classifying_space() {
        let g = GroupData::torus(2);
        let s = OrbitStratification::new(
            vec![Orbit { label: "pt".into(), codim: 0, stabilizer: Stabilizer::Group(g.clone()) }],
            None,
        )
        .unwrap();
        let m = GradedModule::free(&g.classifying_ring(), &[0], 8);
        let r = recover_from_strata(&s, &g, &m, 8).unwrap();
        assert_eq!(r.tor.entries().count(), 1);
        assert_eq!(r.cohomology.betti(0), vec![1]);
    }

    #[test]
    fn mismatched_module_is_rejected() {
        let g = GroupData::torus(1);
        let s = OrbitStratification::from_fan(&families::projective_space(1));
        let m = GradedModule::trivial(&PolynomialRing::torus(1), 6);
        assert!(matches!(
            recover_from_strata(&s, &g, &m, 6),
            Err(StrataError::SeriesModuleMismatch { degree: 2, module: 0, orbits: 2 })
        ));
    }

    #[test]
    fn fibration_products() {
        let pt = WeightedGradedVectorSpace::pure_from_series(&[1]);
        let bc = GroupData::torus(1).classifying_series(8);
        assert_eq!(fibration_series(&pt, &bc, 8).unwrap(), bc);
        let p1 = WeightedGradedVectorSpace::pure_from_series(&[1, 0, 1]);
        let prod = fibration_series(&p1, &bc, 8).unwrap();
        assert_eq!(totals(&prod, 8), vec![1, 0, 2, 0, 2, 0, 2, 0, 2]);
        let twice = fibration_series(&fibration_series(&p1, &p1, 8).unwrap(), &bc, 8).unwrap();
        let once = fibration_series(&p1, &fibration_series(&p1, &bc, 8).unwrap(), 8).unwrap();
        assert_eq!(twice, once);
        let mut impure = WeightedGradedVectorSpace::new();
        impure.add(1, 2, 1);
        assert!(matches!(fibration_series(&impure, &bc, 8), Err(StrataError::ImpureInput(_))));
    }

    #[test]
    fn needs_an_open_orbit() {
        let s = OrbitStratification::from_json(r#"{"orbits": [{"label": "x", "codim": 1, "stabilizer": "torus:1"}]}"#);
        assert_eq!(s, Err(StrataError::NoOpenOrbit));
    }
}
