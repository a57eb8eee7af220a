use std::collections::HashMap;

use rayon::prelude::*;

use super::{trusted_bound, BigradedTor, ChainComplex, ChainComplexBundle, TorError};
use crate::graded::{AlgebraModule, GradedAlgebra, GradedModule};
use crate::linalg::{rat, RatMatrix, Rational};

/// Degree pattern `(m, a_1, ..., a_p, n)` of one tensor block of `Bar_p`.
type Pattern = Vec<usize>;

struct Level {
    blocks: Vec<(Pattern, usize)>,
    index: HashMap<Pattern, usize>,
    dim: usize,
}

/// Column-major copies of the structure maps, so the image of one basis
/// tensor can be read off directly.
struct Columns {
    /// `alg[(a, b)][i * dim_b + j]`: sparse product of basis elements.
    alg: HashMap<(usize, usize), Vec<Vec<(usize, Rational)>>>,
    left: HashMap<(usize, usize), Vec<Vec<(usize, Rational)>>>,
    right: HashMap<(usize, usize), Vec<Vec<(usize, Rational)>>>,
}

fn columns(m: &RatMatrix) -> Vec<Vec<(usize, Rational)>> {
    let t = m.transpose();
    (0..t.rows()).map(|c| t.row_entries(c).to_vec()).collect()
}

struct BarData<'a> {
    left: &'a AlgebraModule,
    alg: &'a GradedAlgebra,
    right: &'a AlgebraModule,
    cols: Columns,
}

impl<'a> BarData<'a> {
    fn new(left: &'a AlgebraModule, alg: &'a GradedAlgebra, right: &'a AlgebraModule, bound: usize) -> Self {
        let mut cols = Columns { alg: HashMap::new(), left: HashMap::new(), right: HashMap::new() };
        for a in 2..=bound {
            if alg.dim(a) == 0 {
                continue;
            }
            for b in 2..=bound - a {
                if alg.dim(b) > 0 {
                    cols.alg.insert((a, b), columns(alg.mult(a, b).expect("within truncation")));
                }
            }
            for k in 0..=bound - a {
                if left.dim(k) > 0 {
                    cols.left.insert((a, k), columns(left.act(a, k).expect("within truncation")));
                }
                if right.dim(k) > 0 {
                    cols.right.insert((a, k), columns(right.act(a, k).expect("within truncation")));
                }
            }
        }
        BarData { left, alg, right, cols }
    }

    fn block_dim(&self, pat: &[usize]) -> usize {
        let p = pat.len() - 2;
        let mut d = self.left.dim(pat[0]) * self.right.dim(pat[p + 1]);
        for &a in &pat[1..=p] {
            d *= self.alg.dim(a);
        }
        d
    }

    fn factor_dims(&self, pat: &[usize]) -> Vec<usize> {
        let p = pat.len() - 2;
        let mut v = Vec::with_capacity(pat.len());
        v.push(self.left.dim(pat[0]));
        v.extend(pat[1..=p].iter().map(|&a| self.alg.dim(a)));
        v.push(self.right.dim(pat[p + 1]));
        v
    }

    /// All patterns with internal degree `q` and `p` bar factors, each factor
    /// in degree >= 2 and every tensor factor nonzero.
    fn level(&self, q: usize, p: usize) -> Level {
        let mut blocks = Vec::new();
        let mut index = HashMap::new();
        let mut dim = 0;
        let mut pat = vec![0; p + 2];
        self.enumerate(q, p, 0, &mut pat, &mut |pat| {
            let d = self.block_dim(pat);
            if d > 0 {
                index.insert(pat.to_vec(), blocks.len());
                blocks.push((pat.to_vec(), dim));
                dim += d;
            }
        });
        Level { blocks, index, dim }
    }

    fn enumerate(&self, remaining: usize, p: usize, pos: usize, pat: &mut Pattern, f: &mut dyn FnMut(&[usize])) {
        if pos == p + 1 {
            pat[pos] = remaining;
            f(pat);
            return;
        }
        let min = if pos == 0 { 0 } else { 2 };
        // every bar factor still to be placed needs degree >= 2
        let later_bars = if pos == 0 { p } else { p - pos };
        for d in min..=remaining {
            if remaining - d < 2 * later_bars {
                break;
            }
            pat[pos] = d;
            self.enumerate(remaining - d, p, pos + 1, pat, f);
        }
    }

    fn differential(&self, source: &Level, target: &Level, p: usize) -> RatMatrix {
        let mut d = RatMatrix::zeros(target.dim, source.dim);
        for (pat, offset) in &source.blocks {
            let fdims = self.factor_dims(pat);
            let size: usize = fdims.iter().product();
            let mut idx = vec![0usize; p + 2];
            for flat in 0..size {
                decode(flat, &fdims, &mut idx);
                let col = offset + flat;
                // face 0: m * a_1
                {
                    let mut tp = Vec::with_capacity(p + 1);
                    tp.push(pat[0] + pat[1]);
                    tp.extend_from_slice(&pat[2..]);
                    if let Some(&b) = target.index.get(&tp) {
                        let (_, toff) = &target.blocks[b];
                        let tdims = self.factor_dims(&tp);
                        let prod = &self.cols.left[&(pat[1], pat[0])][idx[1] * fdims[0] + idx[0]];
                        for (r, v) in prod {
                            let mut tidx = Vec::with_capacity(p + 1);
                            tidx.push(*r);
                            tidx.extend_from_slice(&idx[2..]);
                            d.add_to(toff + encode(&tidx, &tdims), col, v);
                        }
                    }
                }
                // inner faces: a_i * a_{i+1}, sign (-1)^i
                for i in 1..p {
                    let mut tp = Vec::with_capacity(p + 1);
                    tp.extend_from_slice(&pat[..i]);
                    tp.push(pat[i] + pat[i + 1]);
                    tp.extend_from_slice(&pat[i + 2..]);
                    let Some(&b) = target.index.get(&tp) else { continue };
                    let (_, toff) = &target.blocks[b];
                    let tdims = self.factor_dims(&tp);
                    let sign = if i % 2 == 0 { rat(1) } else { rat(-1) };
                    let prod = &self.cols.alg[&(pat[i], pat[i + 1])][idx[i] * fdims[i + 1] + idx[i + 1]];
                    for (r, v) in prod {
                        let mut tidx = Vec::with_capacity(p + 1);
                        tidx.extend_from_slice(&idx[..i]);
                        tidx.push(*r);
                        tidx.extend_from_slice(&idx[i + 2..]);
                        d.add_to(toff + encode(&tidx, &tdims), col, &(&sign * v));
                    }
                }
                // last face: a_p * n, sign (-1)^p
                {
                    let mut tp = Vec::with_capacity(p + 1);
                    tp.extend_from_slice(&pat[..p]);
                    tp.push(pat[p] + pat[p + 1]);
                    if let Some(&b) = target.index.get(&tp) {
                        let (_, toff) = &target.blocks[b];
                        let tdims = self.factor_dims(&tp);
                        let sign = if p.is_multiple_of(2) { rat(1) } else { rat(-1) };
                        let prod = &self.cols.right[&(pat[p], pat[p + 1])][idx[p] * fdims[p + 1] + idx[p + 1]];
                        for (r, v) in prod {
                            let mut tidx = Vec::with_capacity(p + 1);
                            tidx.extend_from_slice(&idx[..p]);
                            tidx.push(*r);
                            d.add_to(toff + encode(&tidx, &tdims), col, &(&sign * v));
                        }
                    }
                }
            }
        }
        d
    }

    fn slice(&self, q: usize) -> ChainComplex {
        let levels: Vec<Level> = (0..=q / 2).map(|p| self.level(q, p)).collect();
        let dims = levels.iter().map(|l| l.dim).collect();
        let diffs = (1..levels.len()).map(|p| self.differential(&levels[p], &levels[p - 1], p)).collect();
        ChainComplex::new(dims, diffs)
    }
}

/// Mixed-radix decoding, first factor most significant.
fn decode(mut flat: usize, dims: &[usize], out: &mut [usize]) {
    for i in (0..dims.len()).rev() {
        out[i] = flat % dims[i];
        flat /= dims[i];
    }
}

fn encode(idx: &[usize], dims: &[usize]) -> usize {
    idx.iter().zip(dims).fold(0, |acc, (i, d)| acc * d + i)
}

fn check_algebra(alg: &GradedAlgebra) -> Result<(), TorError> {
    if alg.dim(1) > 0 {
        return Err(TorError::NonSimplyConnectedBase);
    }
    if let Some(k) = (3..=alg.truncation()).step_by(2).find(|&k| alg.dim(k) > 0) {
        return Err(TorError::OddDegreeAlgebra(k));
    }
    Ok(())
}

/// The normalized two-sided bar complex `M (x) A-bar^{(x)p} (x) N`, one slice per
/// internal degree, with the alternating-sum differential.
pub fn bar_complex(
    left: &AlgebraModule,
    alg: &GradedAlgebra,
    right: &AlgebraModule,
    bound: usize,
) -> Result<ChainComplexBundle, TorError> {
    check_algebra(alg)?;
    let top = left.truncation().min(right.truncation()).min(alg.truncation());
    if bound > top {
        return Err(TorError::TruncationExceeded { requested: bound, truncation: top });
    }
    let data = BarData::new(left, alg, right, bound);
    let slices = (0..=bound).into_par_iter().map(|q| data.slice(q)).collect();
    Ok(ChainComplexBundle { slices })
}

/// `Tor^A_p(M, N)` in internal degrees `0..=bound` from the bar complex.
///
/// `trusted_slack` is subtracted from `bound` to give the reported trusted range.
pub fn bar_tor(
    left: &AlgebraModule,
    alg: &GradedAlgebra,
    right: &AlgebraModule,
    bound: usize,
    trusted_slack: usize,
) -> Result<BigradedTor, TorError> {
    let bundle = bar_complex(left, alg, right, bound)?;
    BigradedTor::from_slices(bundle.homology()?, bound.saturating_sub(trusted_slack))
}

/// Bar-complex `Tor^H(M, N)` for two modules over the same polynomial ring.
pub fn bar_tor_modules(m: &GradedModule, n: &GradedModule, bound: usize) -> Result<BigradedTor, TorError> {
    if m.ring() != n.ring() {
        return Err(TorError::RingMismatch("bar complex needs both modules over the same ring".into()));
    }
    let top = m.truncation().min(n.truncation());
    if bound > top {
        return Err(TorError::TruncationExceeded { requested: bound, truncation: top });
    }
    let alg = GradedAlgebra::polynomial(m.ring(), bound);
    let left = AlgebraModule::from_graded_module(&m.truncate(bound)?, &alg)?;
    let right = AlgebraModule::from_graded_module(&n.truncate(bound)?, &alg)?;
    let slack = bound - trusted_bound(m, bound);
    bar_tor(&left, &alg, &right, bound, slack)
}
