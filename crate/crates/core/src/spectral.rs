//! Spectral sequence of a finite decreasing filtration on a cochain complex,
//! computed from explicit subquotients, and the weight argument that forces
//! it to degenerate for pure input.
//!
//! Internally a spot is `(s, n)`: filtration index `s >= 0` and total degree
//! `n`; `d_r` maps `(s, n)` to `(s + r, n + 1)`. For the bar-degree filtration
//! of a two-sided bar complex, `s = P - p` where `p` is the bar degree and `P`
//! the largest bar degree present, so the spot `(s, n)` holds `E^{-p, q}` with
//! internal degree `q = n + p`.

use std::collections::BTreeMap;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graded::{AlgebraModule, GradedAlgebra, GradedModule};
use crate::linalg::{self, LinalgError, RatMatrix, Rational};
use crate::tor::{bar_complex, BigradedTor, TorError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpectralError {
    #[error("invalid filtration: {0}")]
    InvalidFiltration(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("spectral sequence inconsistency: {0}")]
    Inconsistent(String),
    #[error("input is not pure ({0}); the certificate does not apply, compute the pages instead")]
    ImpureInput(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Tor(#[from] TorError),
}

type Vector = Vec<Rational>;

/// One summand: a cochain complex `C^0 -> C^1 -> ...` with a decreasing
/// filtration `F^0 = C ⊇ F^1 ⊇ ... ⊇ F^L = 0`.
#[derive(Clone, Debug)]
struct Block {
    dims: Vec<usize>,
    /// `differentials[n]: C^n -> C^{n+1}`.
    differentials: Vec<RatMatrix>,
    filtration: Filtration,
    weight: Option<usize>,
}

#[derive(Clone, Debug)]
enum Filtration {
    /// `spans[s][n]`: a basis of `F^s C^n`, for `s = 0..L`.
    Spans(Vec<Vec<Vec<Vector>>>),
    /// `F^s C^n = C^n` for `s <= levels[n]` and `0` above.
    ByDegree { length: usize, levels: Vec<usize> },
}

/// A filtered cochain complex, possibly presented as a direct sum of
/// filtered summands (each optionally tagged with a single weight).
#[derive(Clone, Debug)]
pub struct FilteredComplex {
    blocks: Vec<Block>,
    max_bar_degree: Option<usize>,
}

fn unit(dim: usize, i: usize) -> Vector {
    let mut v = vec![Rational::zero(); dim];
    v[i] = Rational::from_integer(1.into());
    v
}

fn in_span(ambient: usize, basis: &[Vector], v: &[Rational]) -> bool {
    if v.iter().all(Zero::is_zero) {
        return true;
    }
    if basis.is_empty() {
        return false;
    }
    linalg::solve(&RatMatrix::from_columns(ambient, basis), v).is_some()
}

fn check_shapes(dims: &[usize], differentials: &[RatMatrix]) -> Result<(), SpectralError> {
    let degrees = dims.len();
    if differentials.len() + 1 != degrees.max(1) {
        return Err(SpectralError::Shape(format!(
            "{} degrees need {} differentials, got {}",
            degrees,
            degrees.saturating_sub(1),
            differentials.len()
        )));
    }
    for (n, d) in differentials.iter().enumerate() {
        if d.shape() != (dims[n + 1], dims[n]) {
            return Err(SpectralError::Shape(format!(
                "d^{n} has shape {:?}, expected {:?}",
                d.shape(),
                (dims[n + 1], dims[n])
            )));
        }
        if n + 1 < differentials.len() && !differentials[n + 1].mul(d)?.is_zero() {
            return Err(SpectralError::Shape(format!("d^{} d^{n} is not zero", n + 1)));
        }
    }
    Ok(())
}

fn check_spans(dims: &[usize], differentials: &[RatMatrix], spans: &[Vec<Vec<Vector>>]) -> Result<(), SpectralError> {
    let degrees = dims.len();
    for n in 0..degrees {
        if let Some(f0) = spans.first() {
            if f0[n].len() != dims[n] {
                return Err(SpectralError::InvalidFiltration(format!(
                    "F^0 C^{n} has dimension {} but C^{n} has dimension {}",
                    f0[n].len(),
                    dims[n]
                )));
            }
        } else if dims[n] > 0 {
            return Err(SpectralError::InvalidFiltration("empty filtration on a nonzero complex".into()));
        }
    }
    for s in 0..spans.len() {
        for n in 0..degrees {
            let here = &spans[s][n];
            if s + 1 < spans.len() {
                let next = &spans[s + 1][n];
                if next.iter().any(|v| !in_span(dims[n], here, v)) {
                    return Err(SpectralError::InvalidFiltration(format!("F^{} C^{n} is not inside F^{s}", s + 1)));
                }
            }
            if n + 1 < degrees {
                let target = &spans[s][n + 1];
                for v in here {
                    let dv = differentials[n].apply(v);
                    if !in_span(dims[n + 1], target, &dv) {
                        return Err(SpectralError::InvalidFiltration(format!(
                            "d does not preserve F^{s} in degree {n}"
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

impl Block {
    fn new(
        dims: Vec<usize>,
        differentials: Vec<RatMatrix>,
        filtration: Vec<Vec<Vec<Vector>>>,
        weight: Option<usize>,
    ) -> Result<Self, SpectralError> {
        let degrees = dims.len();
        check_shapes(&dims, &differentials)?;
        let mut reduced = Vec::with_capacity(filtration.len());
        for (s, level) in filtration.into_iter().enumerate() {
            if level.len() != degrees {
                return Err(SpectralError::InvalidFiltration(format!(
                    "F^{s} lists {} degrees, complex has {degrees}",
                    level.len()
                )));
            }
            let mut bases = Vec::with_capacity(degrees);
            for (n, vecs) in level.into_iter().enumerate() {
                if let Some(v) = vecs.iter().find(|v| v.len() != dims[n]) {
                    return Err(SpectralError::InvalidFiltration(format!(
                        "F^{s} C^{n}: vector of length {} in a space of dimension {}",
                        v.len(),
                        dims[n]
                    )));
                }
                bases.push(linalg::span_basis(dims[n], &vecs));
            }
            reduced.push(bases);
        }
        check_spans(&dims, &differentials, &reduced)?;
        // a filtration that never splits a degree is stored by its levels
        let length = reduced.len();
        let by_degree = (0..degrees).all(|n| reduced.iter().all(|l| l[n].is_empty() || l[n].len() == dims[n]));
        let filtration = if by_degree {
            let levels = (0..degrees)
                .map(|n| if dims[n] == 0 { length.saturating_sub(1) } else { reduced.iter().rposition(|l| !l[n].is_empty()).unwrap_or(0) })
                .collect();
            Filtration::ByDegree { length, levels }
        } else {
            Filtration::Spans(reduced)
        };
        Ok(Block { dims, differentials, filtration, weight })
    }

    /// A block whose degree-`n` part sits entirely in filtration level `levels[n]`.
    fn by_degree(
        dims: Vec<usize>,
        differentials: Vec<RatMatrix>,
        length: usize,
        levels: Vec<usize>,
        weight: Option<usize>,
    ) -> Result<Self, SpectralError> {
        check_shapes(&dims, &differentials)?;
        if levels.len() != dims.len() || levels.iter().any(|&l| l >= length.max(1)) {
            return Err(SpectralError::InvalidFiltration("filtration levels out of range".into()));
        }
        for (n, d) in differentials.iter().enumerate() {
            if levels[n + 1] < levels[n] && !d.is_zero() {
                return Err(SpectralError::InvalidFiltration(format!("d does not preserve F^{} in degree {n}", levels[n])));
            }
        }
        Ok(Block { dims, differentials, filtration: Filtration::ByDegree { length, levels }, weight })
    }

    fn length(&self) -> usize {
        match &self.filtration {
            Filtration::Spans(spans) => spans.len(),
            Filtration::ByDegree { length, .. } => *length,
        }
    }

    /// `F^s C^n`, with `F^s = C` for negative `s` and `0` beyond the length.
    fn level(&self, s: i64, n: usize) -> Vec<Vector> {
        if n >= self.dims.len() {
            return Vec::new();
        }
        if s < 0 {
            return (0..self.dims[n]).map(|i| unit(self.dims[n], i)).collect();
        }
        match &self.filtration {
            Filtration::Spans(spans) => spans.get(s as usize).map_or_else(Vec::new, |l| l[n].clone()),
            Filtration::ByDegree { levels, .. } if s as usize <= levels[n] => {
                (0..self.dims[n]).map(|i| unit(self.dims[n], i)).collect()
            }
            Filtration::ByDegree { .. } => Vec::new(),
        }
    }

    /// `Z_r^{s,n} = F^s ∩ d^{-1}(F^{s+r})`, with `Z_{-1}^s = F^s`.
    fn cycles(&self, r: i64, s: i64, n: usize) -> Vec<Vector> {
        let source = self.level(s, n);
        if r < 0 || source.is_empty() || n + 1 >= self.dims.len() {
            return source;
        }
        let target = self.level(s + r, n + 1);
        let d = &self.differentials[n];
        let mut cols: Vec<Vector> = source.iter().map(|v| d.apply(v)).collect();
        cols.extend(target.iter().map(|v| v.iter().map(|x| -x).collect()));
        let ker = linalg::kernel(&RatMatrix::from_columns(self.dims[n + 1], &cols));
        ker.basis
            .iter()
            .map(|k| {
                let mut x = vec![Rational::zero(); self.dims[n]];
                for (c, v) in k.iter().take(source.len()).zip(&source) {
                    if !c.is_zero() {
                        for (xi, vi) in x.iter_mut().zip(v) {
                            *xi += c * vi;
                        }
                    }
                }
                x
            })
            .collect()
    }

    /// Spans of `Z_r^{s,n}` for every spot, `r >= -1`.
    fn cycle_table(&self, r: i64) -> BTreeMap<(usize, usize), Vec<Vector>> {
        let spots: Vec<(usize, usize)> = (0..self.length())
            .flat_map(|s| (0..self.dims.len()).map(move |n| (s, n)))
            .collect();
        spots.into_par_iter().map(|(s, n)| ((s, n), self.cycles(r, s as i64, n))).collect()
    }
}

/// Incremental echelon basis, used to extend a basis of a subspace.
struct Reducer {
    rows: Vec<(usize, Vector)>,
}

impl Reducer {
    fn new() -> Self {
        Reducer { rows: Vec::new() }
    }

    fn insert(&mut self, v: &[Rational]) -> bool {
        let mut v = v.to_vec();
        for (p, row) in &self.rows {
            if !v[*p].is_zero() {
                let c = v[*p].clone();
                for (x, y) in v.iter_mut().zip(row) {
                    if !y.is_zero() {
                        *x -= &c * y;
                    }
                }
            }
        }
        match v.iter().position(|x| !x.is_zero()) {
            Some(p) => {
                let inv = v[p].recip();
                for x in v.iter_mut() {
                    *x *= &inv;
                }
                self.rows.push((p, v));
                true
            }
            None => false,
        }
    }
}

/// `E_r^{s,n}` as representatives modulo a denominator.
#[derive(Clone, Debug)]
struct Subquotient {
    reps: Vec<Vector>,
    denominator: Vec<Vector>,
    ambient: usize,
}

impl Subquotient {
    fn new(ambient: usize, numerator: &[Vector], denominator: Vec<Vector>) -> Self {
        let mut red = Reducer::new();
        for v in &denominator {
            red.insert(v);
        }
        let reps = numerator.iter().filter(|v| red.insert(v)).cloned().collect();
        Subquotient { reps, denominator, ambient }
    }

    /// Coordinates of `v` (which must lie in the numerator) on the representatives.
    fn coordinates(&self, v: &[Rational]) -> Option<Vector> {
        if self.reps.is_empty() {
            return Some(Vec::new());
        }
        let mut cols = self.reps.clone();
        cols.extend(self.denominator.iter().cloned());
        linalg::solve(&RatMatrix::from_columns(self.ambient, &cols), v).map(|mut x| {
            x.truncate(self.reps.len());
            x
        })
    }
}

/// One page `E_r`: dimensions at each spot and the matrices of `d_r`.
#[derive(Clone, Debug, PartialEq)]
pub struct Page {
    pub r: usize,
    /// `(s, n) -> dim E_r^{s,n}`, nonzero spots only.
    pub dims: BTreeMap<(usize, usize), usize>,
    /// `d_r` out of `(s, n)`, as a matrix `dim E_r^{s+r,n+1} x dim E_r^{s,n}`;
    /// present when both ends are nonzero.
    pub differentials: BTreeMap<(usize, usize), RatMatrix>,
    /// Weight of each summand contributing to a spot, in basis order.
    pub weights: BTreeMap<(usize, usize), Vec<(Option<usize>, usize)>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageEntry {
    pub p: usize,
    pub q: i64,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageJson {
    pub r: usize,
    pub entries: Vec<PageEntry>,
    pub differentials_nonzero: usize,
}

impl Page {
    pub fn dim(&self, s: usize, n: usize) -> usize {
        self.dims.get(&(s, n)).copied().unwrap_or(0)
    }

    pub fn differentials_nonzero(&self) -> usize {
        self.differentials.values().filter(|d| !d.is_zero()).count()
    }

    pub fn total(&self, n: usize) -> usize {
        self.dims.iter().filter(|((_, m), _)| *m == n).map(|(_, d)| d).sum()
    }

    /// Rank of `d_r` out of `(s, n)`.
    pub fn rank_out(&self, s: usize, n: usize) -> usize {
        self.differentials.get(&(s, n)).map_or(0, linalg::rank)
    }

    /// Entries in the usual `(p, q)` convention with `q = n - p`.
    pub fn to_json(&self) -> PageJson {
        PageJson {
            r: self.r,
            entries: self
                .dims
                .iter()
                .map(|(&(s, n), &dim)| PageEntry { p: s, q: n as i64 - s as i64, dim })
                .collect(),
            differentials_nonzero: self.differentials_nonzero(),
        }
    }

    /// For a bar-degree filtration with top bar degree `top`: `(p, q) -> dim`
    /// in bar degree and internal degree.
    pub fn bar_bigraded(&self, top: usize) -> BTreeMap<(usize, usize), usize> {
        self.dims
            .iter()
            .filter(|(&(s, _), _)| s <= top)
            .map(|(&(s, n), &d)| {
                let p = top - s;
                ((p, n + p), d)
            })
            .collect()
    }

    /// Checks that every `d_r` matrix is block diagonal for the weight tags:
    /// no entry connects summands of different weight.
    pub fn check_weight_transport(&self) -> Result<(), SpectralError> {
        for (&(s, n), d) in &self.differentials {
            let src = &self.weights[&(s, n)];
            let dst = &self.weights[&(s + self.r, n + 1)];
            let src_w = expand(src);
            let dst_w = expand(dst);
            for row in 0..d.rows() {
                for (col, v) in d.row_entries(row) {
                    if !v.is_zero() && dst_w[row] != src_w[*col] {
                        return Err(SpectralError::Inconsistent(format!(
                            "d_{} at ({s}, {n}) mixes weights {:?} and {:?}",
                            self.r, src_w[*col], dst_w[row]
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

fn expand(layout: &[(Option<usize>, usize)]) -> Vec<Option<usize>> {
    layout.iter().flat_map(|&(w, d)| std::iter::repeat_n(w, d)).collect()
}

/// Pages of one block, `r = 0..=top_r`.
struct BlockPages {
    dims: Vec<BTreeMap<(usize, usize), usize>>,
    differentials: Vec<BTreeMap<(usize, usize), RatMatrix>>,
}

fn block_pages(block: &Block, top_r: usize) -> Result<BlockPages, SpectralError> {
    match &block.filtration {
        Filtration::ByDegree { levels, .. } => Ok(by_degree_pages(block, levels, top_r)),
        Filtration::Spans(_) => span_pages(block, top_r),
    }
}

/// Pages when each `C^n` sits in the single level `l(n)`. With
/// `out(n) = l(n+1) - l(n)` and `in(n) = l(n) - l(n-1)`, the spot `(l(n), n)` of
/// `E_r` is `A / B` with `A = C^n` for `r <= out(n)` and `ker d` otherwise, and
/// `B = im d` for `r > in(n)` and `0` otherwise; `d_r` is `d` when `r = out(n)`.
fn by_degree_pages(block: &Block, levels: &[usize], top_r: usize) -> BlockPages {
    let degrees = block.dims.len();
    let lv = |n: usize| levels[n] as i64;
    let out = |n: usize| if n + 1 < degrees { lv(n + 1) - lv(n) } else { i64::MAX };
    let inn = |n: usize| if n > 0 { lv(n) - lv(n - 1) } else { i64::MAX };
    // pivots of d^n (kernel coordinates live on the other columns) and of the image of d^{n-1}
    let out_pivots: Vec<Vec<usize>> = (0..degrees)
        .into_par_iter()
        .map(|n| if n + 1 < degrees { linalg::pivot_columns(&block.differentials[n]) } else { Vec::new() })
        .collect();
    let image_pivots: Vec<Vec<usize>> = (0..degrees)
        .into_par_iter()
        .map(|n| if n > 0 { linalg::pivot_columns(&block.differentials[n - 1].transpose()) } else { Vec::new() })
        .collect();
    let complement = |pivots: &[usize], dim: usize| -> Vec<usize> {
        let mut is_pivot = vec![false; dim];
        for &p in pivots {
            is_pivot[p] = true;
        }
        (0..dim).filter(|&c| !is_pivot[c]).collect()
    };
    let mut all_dims = Vec::with_capacity(top_r + 1);
    let mut all_diffs = Vec::with_capacity(top_r + 1);
    for r in 0..=top_r as i64 {
        let mut dims = BTreeMap::new();
        let mut diffs = BTreeMap::new();
        for n in 0..degrees {
            let a = if r <= out(n) { block.dims[n] } else { block.dims[n] - out_pivots[n].len() };
            let b = if r > inn(n) { image_pivots[n].len() } else { 0 };
            if a > b {
                dims.insert((levels[n], n), a - b);
            }
        }
        for n in 0..degrees.saturating_sub(1) {
            if out(n) != r || !dims.contains_key(&(levels[n], n)) || !dims.contains_key(&(levels[n + 1], n + 1)) {
                continue;
            }
            let reps = if r > inn(n) { complement(&image_pivots[n], block.dims[n]) } else { (0..block.dims[n]).collect() };
            // the target has no boundary part on this page; its numerator is C^{n+1} or ker d
            let coords: Vec<usize> = if r <= out(n + 1) {
                (0..block.dims[n + 1]).collect()
            } else {
                complement(&out_pivots[n + 1], block.dims[n + 1])
            };
            let d = &block.differentials[n];
            let mut m = RatMatrix::zeros(coords.len(), reps.len());
            let row_of: BTreeMap<usize, usize> = coords.iter().enumerate().map(|(i, &c)| (c, i)).collect();
            let dt = d.transpose();
            for (j, &c) in reps.iter().enumerate() {
                for (row, v) in dt.row_entries(c) {
                    if let Some(&i) = row_of.get(row) {
                        m.set(i, j, v.clone());
                    }
                }
            }
            diffs.insert((levels[n], n), m);
        }
        all_dims.push(dims);
        all_diffs.push(diffs);
    }
    BlockPages { dims: all_dims, differentials: all_diffs }
}

fn span_pages(block: &Block, top_r: usize) -> Result<BlockPages, SpectralError> {
    let degrees = block.dims.len();
    let length = block.length();
    let mut prev = block.cycle_table(-1);
    let mut all_dims = Vec::with_capacity(top_r + 1);
    let mut all_diffs = Vec::with_capacity(top_r + 1);
    for r in 0..=top_r {
        let cur = block.cycle_table(r as i64);
        let spots: Vec<(usize, usize)> = cur.keys().copied().collect();
        let quotients: BTreeMap<(usize, usize), Subquotient> = spots
            .par_iter()
            .map(|&(s, n)| -> Result<_, SpectralError> {
                let mut den: Vec<Vector> = prev.get(&(s + 1, n)).cloned().unwrap_or_default();
                if n > 0 {
                    let from = s as i64 - r as i64 + 1;
                    let sources = if from < 0 {
                        block.cycles(r as i64 - 1, from, n - 1)
                    } else {
                        prev.get(&(from as usize, n - 1)).cloned().unwrap_or_default()
                    };
                    den.extend(sources.iter().map(|v| block.differentials[n - 1].apply(v)));
                }
                let den = linalg::span_basis(block.dims[n], &den);
                Ok(((s, n), Subquotient::new(block.dims[n], &cur[&(s, n)], den)))
            })
            .collect::<Result<_, _>>()?;
        let dims: BTreeMap<(usize, usize), usize> = quotients
            .iter()
            .filter(|(_, q)| !q.reps.is_empty())
            .map(|(&k, q)| (k, q.reps.len()))
            .collect();
        let mut diffs = BTreeMap::new();
        for (&(s, n), src) in &quotients {
            if src.reps.is_empty() || n + 1 >= degrees || s + r >= length {
                continue;
            }
            let Some(dst) = quotients.get(&(s + r, n + 1)) else { continue };
            if dst.reps.is_empty() {
                continue;
            }
            let cols = src
                .reps
                .iter()
                .map(|x| {
                    let y = block.differentials[n].apply(x);
                    dst.coordinates(&y).ok_or_else(|| {
                        SpectralError::Inconsistent(format!("d_{r} image at ({s}, {n}) leaves Z_{r}"))
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            diffs.insert((s, n), RatMatrix::from_columns(dst.reps.len(), &cols));
        }
        all_dims.push(dims);
        all_diffs.push(diffs);
        prev = cur;
    }
    Ok(BlockPages { dims: all_dims, differentials: all_diffs })
}

impl FilteredComplex {
    /// A single filtered complex. `filtration[s][n]` spans `F^s C^n`; `F^0` must be all of `C`.
    pub fn new(
        dims: Vec<usize>,
        differentials: Vec<RatMatrix>,
        filtration: Vec<Vec<Vec<Vec<Rational>>>>,
    ) -> Result<Self, SpectralError> {
        Ok(FilteredComplex { blocks: vec![Block::new(dims, differentials, filtration, None)?], max_bar_degree: None })
    }

    /// Tags every basis vector with a single weight.
    pub fn with_weight(mut self, weight: usize) -> Self {
        for b in &mut self.blocks {
            b.weight = Some(weight);
        }
        self
    }

    pub fn direct_sum(parts: Vec<FilteredComplex>) -> Self {
        FilteredComplex { blocks: parts.into_iter().flat_map(|p| p.blocks).collect(), max_bar_degree: None }
    }

    /// Top bar degree, for complexes built by [`em_filtered_complex`].
    pub fn max_bar_degree(&self) -> Option<usize> {
        self.max_bar_degree
    }

    pub fn degrees(&self) -> usize {
        self.blocks.iter().map(|b| b.dims.len()).max().unwrap_or(0)
    }

    /// Filtration length `L`: `F^L = 0`.
    pub fn length(&self) -> usize {
        self.blocks.iter().map(Block::length).max().unwrap_or(0)
    }

    pub fn dim(&self, n: usize) -> usize {
        self.blocks.iter().map(|b| b.dims.get(n).copied().unwrap_or(0)).sum()
    }

    /// `dim H^n` of the total complex.
    pub fn cohomology(&self) -> Result<Vec<usize>, SpectralError> {
        let degrees = self.degrees();
        let mut out = vec![0; degrees];
        for b in &self.blocks {
            for n in 0..b.dims.len() {
                let d_in = if n == 0 { RatMatrix::zeros(b.dims[0], 0) } else { b.differentials[n - 1].clone() };
                let d_out =
                    if n + 1 < b.dims.len() { b.differentials[n].clone() } else { RatMatrix::zeros(0, b.dims[n]) };
                out[n] += linalg::homology_dim(&d_in, &d_out)?;
            }
        }
        Ok(out)
    }

    /// Pages `E_0, ..., E_L`. With `F^L = 0`, every `d_r` with `r >= L` vanishes,
    /// so the last page is `E_infinity`.
    ///
    /// Each page is checked against the homology of the previous one, `d_r d_r = 0`
    /// is checked, and the last page is checked against the cohomology of the total complex.
    pub fn pages(&self) -> Result<Vec<Page>, SpectralError> {
        let top_r = self.length().max(1);
        let per_block = self.blocks.par_iter().map(|b| block_pages(b, top_r)).collect::<Result<Vec<_>, _>>()?;
        let mut pages = Vec::with_capacity(top_r + 1);
        for r in 0..=top_r {
            let mut dims: BTreeMap<(usize, usize), usize> = BTreeMap::new();
            let mut weights: BTreeMap<(usize, usize), Vec<(Option<usize>, usize)>> = BTreeMap::new();
            for bp in &per_block {
                for (&k, &d) in &bp.dims[r] {
                    *dims.entry(k).or_default() += d;
                }
            }
            // block layout of each spot, in block order
            for (b, bp) in self.blocks.iter().zip(&per_block) {
                for &k in dims.keys() {
                    let d = bp.dims[r].get(&k).copied().unwrap_or(0);
                    if d > 0 {
                        weights.entry(k).or_default().push((b.weight, d));
                    }
                }
            }
            let mut differentials = BTreeMap::new();
            for &(s, n) in dims.keys() {
                let Some(&target) = dims.get(&(s + r, n + 1)) else { continue };
                let mut m = RatMatrix::zeros(target, dims[&(s, n)]);
                let (mut row0, mut col0) = (0, 0);
                for bp in &per_block {
                    let src = bp.dims[r].get(&(s, n)).copied().unwrap_or(0);
                    let dst = bp.dims[r].get(&(s + r, n + 1)).copied().unwrap_or(0);
                    if let Some(d) = bp.differentials[r].get(&(s, n)) {
                        for i in 0..d.rows() {
                            for (j, v) in d.row_entries(i) {
                                m.set(row0 + i, col0 + j, v.clone());
                            }
                        }
                    }
                    row0 += dst;
                    col0 += src;
                }
                differentials.insert((s, n), m);
            }
            pages.push(Page { r, dims, differentials, weights });
        }
        check_pages(&pages)?;
        let h = self.cohomology()?;
        let last = pages.last().expect("at least one page");
        for (n, &hn) in h.iter().enumerate() {
            if last.total(n) != hn {
                return Err(SpectralError::Inconsistent(format!(
                    "E_infinity has total dimension {} in degree {n}, cohomology has {hn}",
                    last.total(n)
                )));
            }
        }
        Ok(pages)
    }
}

fn check_pages(pages: &[Page]) -> Result<(), SpectralError> {
    for pair in pages.windows(2) {
        let (page, next) = (&pair[0], &pair[1]);
        let r = page.r;
        for (&(s, n), d) in &page.differentials {
            if let Some(d2) = page.differentials.get(&(s + r, n + 1)) {
                if !d2.mul(d)?.is_zero() {
                    return Err(SpectralError::Inconsistent(format!("d_{r} d_{r} != 0 at ({s}, {n})")));
                }
            }
        }
        let spots: std::collections::BTreeSet<(usize, usize)> =
            page.dims.keys().chain(next.dims.keys()).copied().collect();
        for (s, n) in spots {
            let incoming = if s >= r && n >= 1 { page.rank_out(s - r, n - 1) } else { 0 };
            let expected = page.dim(s, n) - page.rank_out(s, n) - incoming;
            if next.dim(s, n) != expected {
                return Err(SpectralError::Inconsistent(format!(
                    "E_{} at ({s}, {n}) has dimension {} but the homology of E_{r} there is {expected}",
                    r + 1,
                    next.dim(s, n)
                )));
            }
        }
    }
    Ok(())
}

/// The total complex of the two-sided bar construction, with total degree
/// `n = q - p`, filtered by bar degree (`F^s` = bar degree `<= P - s`).
///
/// The complex splits over internal degree `q`; each slice is one weighted
/// summand of weight `q`.
pub fn em_filtered_complex(
    left: &AlgebraModule,
    alg: &GradedAlgebra,
    right: &AlgebraModule,
    bound: usize,
) -> Result<FilteredComplex, SpectralError> {
    let bundle = bar_complex(left, alg, right, bound)?;
    let top_p = bound / 2;
    let mut blocks = Vec::with_capacity(bundle.slices.len());
    for (q, slice) in bundle.slices.iter().enumerate() {
        let degrees = q + 1;
        let mut dims = vec![0; degrees];
        for (p, &d) in slice.dims.iter().enumerate() {
            dims[q - p] = d;
        }
        let differentials: Vec<RatMatrix> = (0..q)
            .map(|n| {
                let p = q - n;
                match slice.differentials.get(p) {
                    Some(d) if p < slice.dims.len() => d.clone(),
                    _ => RatMatrix::zeros(dims[n + 1], dims[n]),
                }
            })
            .collect();
        // bar degree p = q - n sits in level top_p - p
        let levels: Vec<usize> = (0..degrees).map(|n| top_p.saturating_sub(q - n)).collect();
        blocks.push(Block::by_degree(dims, differentials, top_p + 1, levels, Some(q))?);
    }
    Ok(FilteredComplex { blocks, max_bar_degree: Some(top_p) })
}

/// [`em_filtered_complex`] for `Tor^H(m, Q)` over the polynomial ring of `m`.
pub fn em_residue_field(m: &GradedModule, bound: usize) -> Result<FilteredComplex, SpectralError> {
    let alg = GradedAlgebra::polynomial(m.ring(), bound);
    let left = AlgebraModule::from_graded_module(&m.truncate(bound).map_err(TorError::from)?, &alg).map_err(TorError::from)?;
    let trivial = GradedModule::trivial(m.ring(), bound);
    let right = AlgebraModule::from_graded_module(&trivial, &alg).map_err(TorError::from)?;
    em_filtered_complex(&left, &alg, &right, bound)
}

/// Which of the inputs carry pure mixed Hodge structures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PurityFlags {
    pub cohomology_ring: bool,
    pub left: bool,
    pub right: bool,
}

impl PurityFlags {
    pub const PURE: PurityFlags = PurityFlags { cohomology_ring: true, left: true, right: true };
}

/// One potential `d_r : E_r^{-p,q} -> E_r^{-p+r,q-r+1}` with its weights.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Obligation {
    pub r: usize,
    pub source: (usize, usize),
    pub target: (usize, usize),
    pub source_dim: usize,
    pub target_dim: usize,
    pub source_weight: usize,
    pub target_weight: usize,
}

impl Obligation {
    pub fn discharged(&self) -> bool {
        self.source_weight != self.target_weight
    }
}

/// Every `d_r` (`r >= 2`) out of a nonzero `E_2` entry into the region allowed by
/// the vanishing bound, each closed by a weight mismatch.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegenerationCertificate {
    pub obligations: Vec<Obligation>,
}

impl DegenerationCertificate {
    /// Pairs with both ends nonzero: the only ones that could carry a nonzero map.
    pub fn live(&self) -> impl Iterator<Item = &Obligation> {
        self.obligations.iter().filter(|o| o.source_dim > 0 && o.target_dim > 0)
    }

    /// Re-checks every weight mismatch and that no live pair is missing.
    pub fn verify(&self, t: &BigradedTor) -> bool {
        let all_discharged = self.obligations.iter().all(|o| {
            o.discharged()
                && o.source_weight == o.source.1
                && o.target_weight == o.target.1
                && o.target.1 + o.r == o.source.1 + 1
                && o.target.0 + o.r == o.source.0
        });
        let expected = degeneration_pairs(t);
        all_discharged && expected.len() == self.obligations.len()
    }

    /// Agreement with a direct computation: a certificate claims `d_r = 0`
    /// for `r >= 2`, so the pages must show no nonzero `d_r` there.
    pub fn agrees_with(&self, pages: &[Page]) -> bool {
        pages.iter().filter(|p| p.r >= 2).all(|p| p.differentials_nonzero() == 0)
    }
}

fn degeneration_pairs(t: &BigradedTor) -> Vec<Obligation> {
    let t = t.trusted();
    let mut out = Vec::new();
    for e in t.entries() {
        for r in 2..=e.p {
            if e.q + 1 < r {
                break;
            }
            let (tp, tq) = (e.p - r, e.q + 1 - r);
            if tq < 2 * tp {
                continue;
            }
            out.push(Obligation {
                r,
                source: (e.p, e.q),
                target: (tp, tq),
                source_dim: e.dim,
                target_dim: t.dim(tp, tq),
                source_weight: e.q,
                target_weight: tq,
            });
        }
    }
    out
}

/// With pure input, `E_2^{-p,q}` is pure of weight `q`; `d_r` for `r >= 2` would
/// change the weight by `r - 1` and so vanishes. Lists each such `d_r`.
pub fn degeneration_certificate(
    t: &BigradedTor,
    purity: PurityFlags,
) -> Result<DegenerationCertificate, SpectralError> {
    let mut impure = Vec::new();
    if !purity.cohomology_ring {
        impure.push("cohomology ring");
    }
    if !purity.left {
        impure.push("left module");
    }
    if !purity.right {
        impure.push("right module");
    }
    if !impure.is_empty() {
        return Err(SpectralError::ImpureInput(impure.join(", ")));
    }
    Ok(DegenerationCertificate { obligations: degeneration_pairs(t) })
}
