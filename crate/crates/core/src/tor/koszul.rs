use rayon::prelude::*;

use super::{trusted_bound, BigradedTor, ChainComplex, ChainComplexBundle, TorError};
use crate::graded::GradedModule;
use crate::linalg::{rat, RatMatrix};

/// Subsets of the ring generators with `p` elements, as sorted index lists.
fn subsets_of_size(r: usize, p: usize) -> Vec<Vec<usize>> {
    (0u64..1 << r)
        .filter(|mask| mask.count_ones() as usize == p)
        .map(|mask| (0..r).filter(|i| mask >> i & 1 == 1).collect())
        .collect()
}

/// The Koszul complex `M (x) Lambda(e_1..e_r)` in internal degree `q`, where
/// `e_i` has internal degree `deg f_i` and homological degree 1, and
/// `d(x (x) e_S) = sum_j (-1)^(j-1) f_{s_j} x (x) e_{S - s_j}`.
fn koszul_slice(m: &GradedModule, q: usize) -> ChainComplex {
    let degs = m.ring().generator_degrees();
    let r = degs.len();
    // blocks[p] = (subset, module degree, offset)
    let mut blocks: Vec<Vec<(Vec<usize>, usize, usize)>> = Vec::with_capacity(r + 1);
    let mut dims = Vec::with_capacity(r + 1);
    for p in 0..=r {
        let mut offset = 0;
        let mut level = Vec::new();
        for s in subsets_of_size(r, p) {
            let ds: usize = s.iter().map(|&i| degs[i]).sum();
            if ds > q {
                continue;
            }
            let k = q - ds;
            let dim = m.dim(k);
            if dim > 0 {
                level.push((s, k, offset));
                offset += dim;
            }
        }
        blocks.push(level);
        dims.push(offset);
    }
    let mut differentials = Vec::with_capacity(r);
    for p in 1..=r {
        let mut d = RatMatrix::zeros(dims[p - 1], dims[p]);
        for (s, k, src_off) in &blocks[p] {
            for (j, &gen) in s.iter().enumerate() {
                let t: Vec<usize> = s.iter().copied().filter(|&x| x != gen).collect();
                let Some((_, tk, dst_off)) = blocks[p - 1].iter().find(|(u, _, _)| *u == t) else {
                    continue;
                };
                debug_assert_eq!(*tk, k + degs[gen]);
                let action = m.action(gen, *k).expect("degree within truncation");
                let sign = if j % 2 == 0 { rat(1) } else { rat(-1) };
                for row in 0..action.rows() {
                    for (col, v) in action.row_entries(row) {
                        d.add_to(dst_off + row, src_off + col, &(&sign * v));
                    }
                }
            }
        }
        differentials.push(d);
    }
    ChainComplex::new(dims, differentials)
}

pub fn koszul_complex(m: &GradedModule, bound: usize) -> Result<ChainComplexBundle, TorError> {
    if bound > m.truncation() {
        return Err(TorError::TruncationExceeded { requested: bound, truncation: m.truncation() });
    }
    let slices = (0..=bound).into_par_iter().map(|q| koszul_slice(m, q)).collect();
    Ok(ChainComplexBundle { slices })
}

/// `Tor^{H}_p(M, Q)` in internal degrees `0..=bound` via the Koszul resolution of `Q`.
pub fn koszul_tor(m: &GradedModule, bound: usize) -> Result<BigradedTor, TorError> {
    let bundle = koszul_complex(m, bound)?;
    let by_q = bundle.homology()?;
    BigradedTor::from_slices(by_q, trusted_bound(m, bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::PolynomialRing;

    fn nonzero(t: &BigradedTor) -> Vec<(usize, usize, usize)> {
        t.entries().map(|e| (e.p, e.q, e.dim)).collect()
    }

    #[test]
    fn trivial_module_one_variable() {
        // oracle: Q (x) Lambda(e) has zero differential, so Tor_0^0 = Tor_1^2 = Q.
        let ring = PolynomialRing::torus(1);
        let t = koszul_tor(&GradedModule::trivial(&ring, 8), 8).unwrap();
        assert_eq!(nonzero(&t), vec![(0, 0, 1), (1, 2, 1)]);
    }

    #[test]
    fn free_module_is_acyclic() {
        let ring = PolynomialRing::new(vec![2, 4]).unwrap();
        let t = koszul_tor(&GradedModule::free(&ring, &[0], 12), 12).unwrap();
        assert_eq!(nonzero(&t), vec![(0, 0, 1)]);
    }

    #[test]
    fn punctured_plane_by_hand() {
        // Q[x1,x2]/(x1 x2) over Q[t1,t2] with t_i = x_i: dims 1,2,2,2,...
        let ring = PolynomialRing::torus(2);
        let top = 8;
        let mut dims = vec![0; top + 1];
        dims[0] = 1;
        for k in (2..=top).step_by(2) {
            dims[k] = 2;
        }
        // degree-0 basis {1}; degree 2k basis {x1^k, x2^k}
        let t1 = |k: usize| match k {
            0 => RatMatrix::from_i64(&[&[1], &[0]]),
            k if k % 2 == 0 => RatMatrix::from_i64(&[&[1, 0], &[0, 0]]),
            k => RatMatrix::zeros(dims[k + 2], dims[k]),
        };
        let t2 = |k: usize| match k {
            0 => RatMatrix::from_i64(&[&[0], &[1]]),
            k if k % 2 == 0 => RatMatrix::from_i64(&[&[0, 0], &[0, 1]]),
            k => RatMatrix::zeros(dims[k + 2], dims[k]),
        };
        let a1 = (0..=top - 2).map(t1).collect();
        let a2 = (0..=top - 2).map(t2).collect();
        let m = GradedModule::new(ring, dims, vec![a1, a2]).unwrap();
        // degree-4 piece of SR (x) Lambda^1 is 4-dimensional with 2-dim kernel,
        // and the image from Lambda^2 is 1-dimensional: Tor_1^4 = 1.
        let c = koszul_complex(&m, 8).unwrap();
        assert_eq!(c.slices[4].dims, vec![2, 4, 1]);
        let t = koszul_tor(&m, 8).unwrap();
        assert_eq!(nonzero(&t), vec![(0, 0, 1), (1, 4, 1)]);
    }

    #[test]
    fn euler_characteristic_bookkeeping() {
        let ring = PolynomialRing::new(vec![2, 2, 4]).unwrap();
        let m = GradedModule::free(&ring, &[0, 3], 10).direct_sum(&GradedModule::trivial(&ring, 10)).unwrap();
        let c = koszul_complex(&m, 10).unwrap();
        let h = c.homology().unwrap();
        for (slice, hs) in c.slices.iter().zip(&h) {
            let euler: i64 = hs.iter().enumerate().map(|(p, &d)| if p % 2 == 0 { d as i64 } else { -(d as i64) }).sum();
            assert_eq!(euler, slice.euler_characteristic());
        }
    }

    #[test]
    fn bound_above_truncation_is_rejected() {
        let ring = PolynomialRing::torus(1);
        let m = GradedModule::trivial(&ring, 4);
        assert_eq!(koszul_tor(&m, 5), Err(TorError::TruncationExceeded { requested: 5, truncation: 4 }));
    }
}
