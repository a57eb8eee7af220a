//! Seeded random inputs: small graded modules and filtered complexes.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graded::{GradedModule, PolynomialRing};
use crate::linalg::{self, rat, RatMatrix, Rational};
use crate::spectral::FilteredComplex;

/// Shape limits for [`random_module`].
#[derive(Clone, Copy, Debug)]
pub struct ModuleShape {
    pub variables: usize,
    pub truncation: usize,
    pub max_dim: usize,
}

fn small<R: Rng>(rng: &mut R) -> Rational {
    rat(rng.gen_range(-2..=2))
}

/// A unipotent lower-triangular matrix with small random entries below the diagonal.
fn unipotent<R: Rng>(rng: &mut R, n: usize) -> RatMatrix {
    let mut m = RatMatrix::identity(n);
    for i in 0..n {
        for j in 0..i {
            if rng.gen_bool(0.5) {
                m.set(i, j, small(rng));
            }
        }
    }
    m
}

/// A quotient of a free module on 1–3 generators by a few random homogeneous
/// relations, with every degree from the first one exceeding `max_dim`
/// onward set to zero, then written in a random basis.
pub fn random_module<R: Rng>(rng: &mut R, shape: ModuleShape) -> GradedModule {
    let ring = PolynomialRing::torus(shape.variables);
    let top = shape.truncation;
    let gens: Vec<usize> = (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(0..=top.min(4))).collect();
    let free = GradedModule::free(&ring, &gens, top);
    let mut relations = Vec::new();
    for _ in 0..rng.gen_range(0..=3) {
        let k = rng.gen_range(0..=top);
        if free.dim(k) > 0 {
            relations.push((k, (0..free.dim(k)).map(|_| small(rng)).collect::<Vec<_>>()));
        }
    }
    let mut m = free.quotient(&relations).expect("relations have the right shape");
    if let Some(cut) = (0..=top).find(|&k| m.dim(k) > shape.max_dim) {
        let kill: Vec<(usize, Vec<Rational>)> = (cut..=top)
            .flat_map(|k| (0..m.dim(k)).map(move |i| (k, i)))
            .map(|(k, i)| (k, (0..m.dim(k)).map(|j| rat(i64::from(i == j))).collect()))
            .collect();
        m = m.quotient(&kill).expect("unit vectors have the right shape");
    }
    let p: Vec<RatMatrix> = m.dims().iter().map(|&d| unipotent(rng, d)).collect();
    m.change_basis(&p).expect("unipotent matrices are invertible")
}

/// A random filtered complex together with the pairing it was built from.
#[derive(Clone, Debug)]
pub struct RandomFiltered {
    pub complex: FilteredComplex,
    /// `levels[n][i]`: filtration level of the `i`-th standard basis vector in degree `n`.
    pub levels: Vec<Vec<usize>>,
    /// `(n, i, j)`: the standard differential sends vector `i` of degree `n` to vector `j` of degree `n + 1`.
    pub pairs: Vec<(usize, usize, usize)>,
}

/// A filtered complex isomorphic (as a filtered complex) to a direct sum of
/// pieces `0 -> Q` and `Q -> Q` with prescribed filtration levels.
///
/// Starting from the standard pairing `d0`, a filtration-preserving
/// unipotent `T` gives `T d0 T^-1`, and an arbitrary unipotent `S` then
/// moves everything (filtration included) out of coordinate position.
pub fn random_filtered_complex<R: Rng>(rng: &mut R, max_total: usize, max_length: usize) -> RandomFiltered {
    let degrees = rng.gen_range(2..=4);
    let length = rng.gen_range(1..=max_length.max(1));
    let mut budget = max_total;
    let mut levels = Vec::with_capacity(degrees);
    for _ in 0..degrees {
        let c = rng.gen_range(0..=budget.min(8));
        budget -= c;
        levels.push((0..c).map(|_| rng.gen_range(0..length)).collect::<Vec<_>>());
    }
    let dims: Vec<usize> = levels.iter().map(Vec::len).collect();
    let mut used: Vec<Vec<bool>> = dims.iter().map(|&d| vec![false; d]).collect();
    let mut pairs = Vec::new();
    for n in 0..degrees - 1 {
        let mut order: Vec<usize> = (0..dims[n]).collect();
        order.shuffle(rng);
        for i in order {
            if used[n][i] || !rng.gen_bool(0.6) {
                continue;
            }
            let candidates: Vec<usize> =
                (0..dims[n + 1]).filter(|&j| !used[n + 1][j] && levels[n + 1][j] >= levels[n][i]).collect();
            if let Some(&j) = candidates.choose(rng) {
                used[n][i] = true;
                used[n + 1][j] = true;
                pairs.push((n, i, j));
            }
        }
    }
    // filtration-preserving T: entry (i, j) allowed when vector i sits at least as deep as j
    let t: Vec<RatMatrix> = levels
        .iter()
        .map(|lv| {
            let mut order: Vec<usize> = (0..lv.len()).collect();
            order.sort_by_key(|&i| (lv[i], i));
            let rank_of: Vec<usize> = {
                let mut r = vec![0; lv.len()];
                for (pos, &i) in order.iter().enumerate() {
                    r[i] = pos;
                }
                r
            };
            let mut m = RatMatrix::identity(lv.len());
            for i in 0..lv.len() {
                for j in 0..lv.len() {
                    if rank_of[i] > rank_of[j] && lv[i] >= lv[j] && rng.gen_bool(0.4) {
                        m.set(i, j, small(rng));
                    }
                }
            }
            m
        })
        .collect();
    let s: Vec<RatMatrix> = dims.iter().map(|&d| unipotent(rng, d).transpose()).collect();
    let conj: Vec<RatMatrix> = t.iter().zip(&s).map(|(t, s)| s.mul(t).expect("square")).collect();
    let inv: Vec<RatMatrix> = conj.iter().map(|m| linalg::inverse(m).expect("unipotent")).collect();
    let differentials: Vec<RatMatrix> = (0..degrees - 1)
        .map(|n| {
            let mut d0 = RatMatrix::zeros(dims[n + 1], dims[n]);
            for &(m, i, j) in &pairs {
                if m == n {
                    d0.set(j, i, rat(1));
                }
            }
            conj[n + 1].mul(&d0).and_then(|x| x.mul(&inv[n])).expect("shapes agree")
        })
        .collect();
    // T fixes the span of the e_i of level >= s, so F^s C^n is spanned by the
    // corresponding columns of S; each level also gets one redundant vector
    let filtration: Vec<Vec<Vec<Vec<Rational>>>> = (0..length)
        .map(|lvl| {
            (0..degrees)
                .map(|n| {
                    let mut vs: Vec<Vec<Rational>> =
                        (0..dims[n]).filter(|&i| levels[n][i] >= lvl).map(|i| s[n].column(i)).collect();
                    if vs.len() > 1 {
                        let combo = (0..dims[n])
                            .map(|r| vs.iter().fold(rat(0), |acc, v| acc + &v[r]))
                            .collect();
                        vs.push(combo);
                    }
                    vs
                })
                .collect()
        })
        .collect();
    let complex = FilteredComplex::new(dims, differentials, filtration).expect("construction is a valid filtered complex");
    RandomFiltered { complex, levels, pairs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_modules_respect_the_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for r in 1..=3 {
            let m = random_module(&mut rng, ModuleShape { variables: r, truncation: 8, max_dim: 4 });
            assert!(m.validate().is_valid());
            assert!(m.dims().iter().all(|&d| d <= 4));
        }
    }

    #[test]
    fn random_filtered_complexes_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let f = random_filtered_complex(&mut rng, 30, 4);
            let total: usize = (0..f.complex.degrees()).map(|n| f.complex.dim(n)).sum();
            assert!(total <= 30);
            assert!(f.complex.length() <= 4);
        }
    }
}
