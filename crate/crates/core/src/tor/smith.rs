use std::collections::HashMap;

use num_traits::{One, Zero};
use rayon::prelude::*;

use super::{trusted_bound, BigradedTor, ChainComplex, TorError};
use crate::graded::{GradedModule, MonomialActions, MonomialBasis, PolynomialRing};
use crate::linalg::{RatMatrix, Rational};

/// One step `M_p <- Q_p` of the resolution.
///
/// `Q_p` is free on the full basis of `M_p` (not a minimal generating set).
/// For `p >= 1`, `M_p` is the kernel of `Q_{p-1} -> M_{p-1}` and `inclusion[k]`
/// embeds its degree-`k` piece into `Q_{p-1}`.
#[derive(Clone, Debug)]
pub struct ResolutionLevel {
    pub module: GradedModule,
    pub inclusion: Vec<RatMatrix>,
    /// Degree of each generator of `Q_p`, grouped by degree.
    pub generator_degrees: Vec<usize>,
    /// `labels[k]`: (generator, monomial degree, monomial index) for each basis vector of `Q_p` in degree `k`.
    labels: Vec<Vec<(usize, usize, usize)>>,
    /// `first_generator[k]`: index of the first generator of degree `k`.
    first_generator: Vec<usize>,
}

impl ResolutionLevel {
    pub fn free_dim(&self, k: usize) -> usize {
        self.labels.get(k).map_or(0, Vec::len)
    }
}

/// The free resolution `... -> Q_1 -> Q_0 -> M` built by repeatedly
/// covering the current module by the free module on its basis and passing
/// to the kernel.
#[derive(Clone, Debug)]
pub struct SmithResolution {
    ring: PolynomialRing,
    truncation: usize,
    basis: MonomialBasis,
    pub levels: Vec<ResolutionLevel>,
    /// The kernel after the last step; must vanish for `Tor` of the top level to be exact.
    pub remainder: GradedModule,
}

impl SmithResolution {
    pub fn ring(&self) -> &PolynomialRing {
        &self.ring
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// Ranks of the free modules `Q_p` as (generator degree -> count) rows.
    pub fn generator_counts(&self) -> Vec<Vec<usize>> {
        self.levels.iter().map(|l| l.module.dims().to_vec()).collect()
    }
}

fn level_labels(
    basis: &MonomialBasis,
    module: &GradedModule,
    truncation: usize,
) -> (Vec<usize>, Vec<Vec<(usize, usize, usize)>>, Vec<usize>) {
    let mut generator_degrees = Vec::new();
    let mut first_generator = Vec::with_capacity(truncation + 1);
    for k in 0..=truncation {
        first_generator.push(generator_degrees.len());
        generator_degrees.extend(std::iter::repeat_n(k, module.dim(k)));
    }
    let mut labels = vec![Vec::new(); truncation + 1];
    for (g, &gd) in generator_degrees.iter().enumerate() {
        for (k, slot) in labels.iter_mut().enumerate().skip(gd) {
            for idx in 0..basis.in_degree(k - gd).len() {
                slot.push((g, k - gd, idx));
            }
        }
    }
    (generator_degrees, labels, first_generator)
}

/// Builds `Q_p` and the kernel `M_{p+1}` for one step.
///
/// The kernel of `Q_p -> M_p` has the basis `x^a (x) b - 1 (x) x^a b` for
/// `a != 0`, so no elimination is needed: `M_{p+1}` in degree `k` is indexed
/// by the labels of `Q_p` with positive monomial degree, and
/// `t_i (x^a (x) b - 1 (x) x^a b) = k(t_i x^a, b) - sum_c (x^a b)_c k(t_i, c)`.
#[allow(clippy::type_complexity)]
fn step(
    ring: &PolynomialRing,
    basis: &MonomialBasis,
    module: &GradedModule,
    truncation: usize,
) -> Result<(Vec<usize>, Vec<Vec<(usize, usize, usize)>>, Vec<usize>, GradedModule, Vec<RatMatrix>), TorError> {
    let (generator_degrees, labels, first_generator) = level_labels(basis, module, truncation);
    let table = MonomialActions::new(module, basis);
    let row_of: Vec<HashMap<(usize, usize, usize), usize>> =
        labels.iter().map(|ls| ls.iter().enumerate().map(|(i, &l)| (l, i)).collect()).collect();
    let kernel_labels: Vec<Vec<(usize, usize, usize)>> =
        labels.iter().map(|ls| ls.iter().copied().filter(|&(_, a, _)| a > 0).collect()).collect();
    let kernel_pos: Vec<HashMap<(usize, usize, usize), usize>> =
        kernel_labels.iter().map(|ls| ls.iter().enumerate().map(|(i, &l)| (l, i)).collect()).collect();
    let dims: Vec<usize> = kernel_labels.iter().map(Vec::len).collect();
    // x^a b_g as a vector in M_p
    let product = |g: usize, a: usize, idx: usize| -> Vec<Rational> {
        let gd = generator_degrees[g];
        table.get(a, gd, idx).column(g - first_generator[gd])
    };
    let inclusion: Vec<RatMatrix> = (0..=truncation)
        .map(|k| {
            let mut m = RatMatrix::zeros(labels[k].len(), dims[k]);
            for (c, &(g, a, idx)) in kernel_labels[k].iter().enumerate() {
                m.set(row_of[k][&(g, a, idx)], c, Rational::one());
                for (j, v) in product(g, a, idx).iter().enumerate() {
                    if !v.is_zero() {
                        m.set(row_of[k][&(first_generator[k] + j, 0, 0)], c, -v.clone());
                    }
                }
            }
            m
        })
        .collect();
    let actions = ring
        .generator_degrees()
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            if d > truncation {
                return Vec::new();
            }
            let mut unit = vec![0u32; ring.num_generators()];
            unit[i] = 1;
            let ti = basis.index_of(&unit).expect("variables lie in the basis");
            (0..=truncation - d)
                .map(|k| {
                    let mut m = RatMatrix::zeros(dims[k + d], dims[k]);
                    for (c, &(g, a, idx)) in kernel_labels[k].iter().enumerate() {
                        let mut e = basis.in_degree(a)[idx].clone();
                        e[i] += 1;
                        let moved = basis.index_of(&e).expect("products lie in the basis");
                        m.set(kernel_pos[k + d][&(g, a + d, moved)], c, Rational::one());
                        for (j, v) in product(g, a, idx).iter().enumerate() {
                            if !v.is_zero() {
                                m.add_to(kernel_pos[k + d][&(first_generator[k] + j, d, ti)], c, &-v.clone());
                            }
                        }
                    }
                    m
                })
                .collect()
        })
        .collect();
    let next = GradedModule::new_unchecked(ring.clone(), dims, actions)?;
    Ok((generator_degrees, labels, first_generator, next, inclusion))
}

/// Resolves `m` with `steps` free modules `Q_0, ..., Q_{steps-1}`.
///
/// Each step is trusted two degrees higher than the last, so at most
/// `truncation / 2 + 1` steps are meaningful; asking for more is an error.
/// The connectivity estimate `M_p = 0` below degree `2p` is checked.
pub fn smith_resolution(m: &GradedModule, steps: usize) -> Result<SmithResolution, TorError> {
    let truncation = m.truncation();
    if steps > 0 && 2 * (steps - 1) > truncation {
        return Err(TorError::TruncationExceeded { requested: 2 * (steps - 1), truncation });
    }
    let ring = m.ring().clone();
    let basis = ring.monomial_basis(truncation);
    let mut levels = Vec::with_capacity(steps);
    let mut current = m.clone();
    let mut inclusion = Vec::new();
    for p in 0..steps {
        if let Some(degree) = (0..(2 * p).min(truncation + 1)).find(|&k| current.dim(k) > 0) {
            return Err(TorError::ConnectivityViolated { p, degree });
        }
        let (generator_degrees, labels, first_generator, next, next_inclusion) =
            step(&ring, &basis, &current, truncation)?;
        levels.push(ResolutionLevel { module: current, inclusion, generator_degrees, labels, first_generator });
        current = next;
        inclusion = next_inclusion;
    }
    if let Some(degree) = (0..(2 * steps).min(truncation + 1)).find(|&k| current.dim(k) > 0) {
        return Err(TorError::ConnectivityViolated { p: steps, degree });
    }
    // keep the last inclusion with the remainder so the top differential can be formed
    let remainder = current;
    let mut res = SmithResolution { ring, truncation, basis, levels, remainder };
    res.levels.push(ResolutionLevel {
        module: res.remainder.clone(),
        inclusion,
        generator_degrees: Vec::new(),
        labels: Vec::new(),
        first_generator: Vec::new(),
    });
    Ok(res)
}

/// `H_p(Q_bullet (x)_H N)` in internal degrees `0..=bound`.
pub fn tor_from_resolution(res: &SmithResolution, n: &GradedModule, bound: usize) -> Result<BigradedTor, TorError> {
    if n.ring() != res.ring() {
        return Err(TorError::RingMismatch("resolution and coefficient module use different rings".into()));
    }
    let top = res.truncation().min(n.truncation());
    if bound > top {
        return Err(TorError::TruncationExceeded { requested: bound, truncation: top });
    }
    // the last entry of `levels` is the remainder kernel, not a free module
    let free_levels = res.levels.len() - 1;
    let remainder = &res.levels[free_levels].module;
    if let Some(degree) = (0..=bound).find(|&k| remainder.dim(k) > 0) {
        return Err(TorError::IncompleteResolution { steps: free_levels, degree });
    }
    let table = MonomialActions::new(&n.truncate(top)?, &res.basis);
    let slices: Vec<ChainComplex> = (0..=bound)
        .into_par_iter()
        .map(|q| resolution_slice(res, n, &table, free_levels, q))
        .collect();
    let by_q = slices.iter().map(ChainComplex::homology).collect::<Result<Vec<_>, _>>()?;
    BigradedTor::from_slices(by_q, bound.saturating_sub(res.ring().max_generator_degree()))
}

/// `Q_p (x)_H N` in internal degree `q` is `sum_k V_{p,k} (x) N_{q-k}`, where
/// `V_{p,k}` spans the generators of `Q_p` in degree `k`.
fn resolution_slice(
    res: &SmithResolution,
    n: &GradedModule,
    table: &MonomialActions,
    free_levels: usize,
    q: usize,
) -> ChainComplex {
    // offsets[p][k]: start of V_{p,k} (x) N_{q-k}
    let offsets: Vec<Vec<usize>> = (0..free_levels)
        .map(|p| {
            let mut acc = 0;
            (0..=q)
                .map(|k| {
                    let start = acc;
                    acc += res.levels[p].module.dim(k) * n.dim(q - k);
                    start
                })
                .collect()
        })
        .collect();
    let dims: Vec<usize> = (0..free_levels)
        .map(|p| (0..=q).map(|k| res.levels[p].module.dim(k) * n.dim(q - k)).sum())
        .collect();
    let mut diffs = Vec::new();
    for p in 1..free_levels {
        let level = &res.levels[p];
        let below = &res.levels[p - 1];
        let mut d = RatMatrix::zeros(dims[p - 1], dims[p]);
        for k in 0..=q {
            let nk = n.dim(q - k);
            if level.module.dim(k) == 0 || nk == 0 {
                continue;
            }
            let inc = &level.inclusion[k];
            for row in 0..inc.rows() {
                let (g, a, idx) = below.labels[k][row];
                let gd = below.generator_degrees[g];
                let j = g - below.first_generator[gd];
                let mono = table.get(a, q - k, idx);
                for (col, c) in inc.row_entries(row) {
                    // generator `col` of Q_p in degree k, tensored with each basis vector of N_{q-k}
                    for nb in 0..nk {
                        let src = offsets[p][k] + col * nk + nb;
                        for r in 0..mono.rows() {
                            let v = mono.get(r, nb);
                            if !num_traits::Zero::is_zero(&v) {
                                let dst = offsets[p - 1][gd] + j * n.dim(q - gd) + r;
                                d.add_to(dst, src, &(c * v));
                            }
                        }
                    }
                }
            }
        }
        diffs.push(d);
    }
    ChainComplex::new(dims, diffs)
}

/// `Tor^H(m, n)` via the resolution of `m`, with as many steps as `bound` needs.
pub fn smith_tor(m: &GradedModule, n: &GradedModule, bound: usize) -> Result<BigradedTor, TorError> {
    let top = m.truncation().min(n.truncation());
    if bound > top {
        return Err(TorError::TruncationExceeded { requested: bound, truncation: top });
    }
    let m = m.truncate(bound)?;
    let res = smith_resolution(&m, bound / 2 + 1)?;
    let t = tor_from_resolution(&res, n, bound)?;
    BigradedTor::from_slices(
        (0..=bound).map(|q| (0..=t.max_p()).map(|p| t.dim(p, q)).collect()).collect(),
        trusted_bound(&m, bound),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tor::koszul_tor;

    #[test]
    fn free_module_resolves_in_one_step() {
        let ring = PolynomialRing::torus(2);
        let m = GradedModule::free(&ring, &[0], 8);
        let res = smith_resolution(&m, 5).unwrap();
        // Q_0 is free on the whole basis of M, so M_1 is large, but Tor still
        // sees only the single generator.
        assert!(res.levels[1].module.dims().iter().any(|&d| d > 0));
        let t = tor_from_resolution(&res, &GradedModule::trivial(&ring, 8), 8).unwrap();
        assert_eq!(t.entries().map(|e| (e.p, e.q, e.dim)).collect::<Vec<_>>(), vec![(0, 0, 1)]);
    }

    #[test]
    fn kernels_are_submodules() {
        let ring = PolynomialRing::new(vec![2, 4]).unwrap();
        let m = GradedModule::trivial(&ring, 8).direct_sum(&GradedModule::free(&ring, &[2], 8)).unwrap();
        let res = smith_resolution(&m, 5).unwrap();
        for level in &res.levels {
            assert!(level.module.validate().is_valid());
        }
    }

    #[test]
    fn trivial_module_one_variable() {
        // Q over Q[t]: Tor_p is one-dimensional in degree 2p for p <= 1, and
        // the connectivity estimate puts M_p in degrees >= 2p.
        let ring = PolynomialRing::torus(1);
        let m = GradedModule::trivial(&ring, 8);
        let res = smith_resolution(&m, 5).unwrap();
        for (p, level) in res.levels.iter().enumerate() {
            assert!(level.module.dims().iter().take(2 * p).all(|&d| d == 0));
        }
        assert_eq!(res.levels[1].module.dims(), &[0, 0, 1, 0, 1, 0, 1, 0, 1]);
        let t = tor_from_resolution(&res, &m, 8).unwrap();
        assert_eq!(t, koszul_tor(&m, 8).unwrap());
    }

    #[test]
    fn too_many_steps_is_an_error() {
        let ring = PolynomialRing::torus(1);
        let m = GradedModule::trivial(&ring, 4);
        assert!(matches!(smith_resolution(&m, 4), Err(TorError::TruncationExceeded { .. })));
    }

    #[test]
    fn short_resolution_is_detected() {
        let ring = PolynomialRing::torus(1);
        let m = GradedModule::trivial(&ring, 8);
        let res = smith_resolution(&m, 1).unwrap();
        assert!(matches!(
            tor_from_resolution(&res, &m, 8),
            Err(TorError::IncompleteResolution { steps: 1, degree: 2 })
        ));
    }
}
