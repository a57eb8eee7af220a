//! Exact rational linear algebra.
//!
//! Matrices are stored as sparse rows of [`BigRational`] entries. Rank and
//! kernel computations clear denominators row by row and run a fraction-free
//! elimination over [`BigInt`], choosing the sparsest available pivot row in
//! each column.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("composition of differentials is nonzero ({rows}x{cols} product has a nonzero entry)")]
    CompositionNotZero { rows: usize, cols: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
}

pub fn rat(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// A `rows x cols` matrix over the rationals. Either dimension may be zero.
#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    // each row sorted by column, no explicit zeros
    data: Vec<Vec<(usize, Rational)>>,
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RatMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![Vec::new(); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i].push((i, Rational::one()));
        }
        m
    }

    pub fn from_rows(rows: usize, cols: usize, entries: Vec<Vec<Rational>>) -> Result<Self, LinalgError> {
        if entries.len() != rows || entries.iter().any(|r| r.len() != cols) {
            return Err(LinalgError::Shape(format!("expected {rows}x{cols} entries")));
        }
        let data = entries
            .into_iter()
            .map(|r| r.into_iter().enumerate().filter(|(_, v)| !v.is_zero()).collect())
            .collect();
        Ok(RatMatrix { rows, cols, data })
    }

    /// Convenience constructor from small integers; panics on ragged input.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let entries = rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect();
        Self::from_rows(rows.len(), cols, entries).expect("ragged integer matrix")
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<Rational>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for (i, v) in col.iter().enumerate() {
                if !v.is_zero() {
                    m.data[i].push((j, v.clone()));
                }
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        let row = &self.data[i];
        match row.binary_search_by_key(&j, |(c, _)| *c) {
            Ok(k) => row[k].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    pub fn set(&mut self, i: usize, j: usize, value: Rational) {
        assert!(i < self.rows && j < self.cols, "index out of range");
        let row = &mut self.data[i];
        match row.binary_search_by_key(&j, |(c, _)| *c) {
            Ok(k) if value.is_zero() => {
                row.remove(k);
            }
            Ok(k) => row[k].1 = value,
            Err(_) if value.is_zero() => {}
            Err(k) => row.insert(k, (j, value)),
        }
    }

    /// Adds `value` to entry `(i, j)`.
    pub fn add_to(&mut self, i: usize, j: usize, value: &Rational) {
        if value.is_zero() {
            return;
        }
        let row = &mut self.data[i];
        match row.binary_search_by_key(&j, |(c, _)| *c) {
            Ok(k) => {
                row[k].1 += value;
                if row[k].1.is_zero() {
                    row.remove(k);
                }
            }
            Err(k) => row.insert(k, (j, value.clone())),
        }
    }

    pub fn row_entries(&self, i: usize) -> &[(usize, Rational)] {
        &self.data[i]
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Vec::is_empty)
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.dense_row(i)).collect()
    }

    pub fn dense_row(&self, i: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.cols];
        for (j, v) in &self.data[i] {
            out[*j] = v.clone();
        }
        out
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for (i, row) in self.data.iter().enumerate() {
            for (j, v) in row {
                t.data[*j].push((i, v.clone()));
            }
        }
        t
    }

    pub fn mul(&self, other: &RatMatrix) -> Result<RatMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for (i, row) in self.data.iter().enumerate() {
            let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
            for (k, a) in row {
                for (j, b) in &other.data[*k] {
                    *acc.entry(*j).or_insert_with(Rational::zero) += a * b;
                }
            }
            out.data[i] = acc.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        self.data
            .iter()
            .map(|row| row.iter().fold(Rational::zero(), |acc, (j, a)| acc + a * &v[*j]))
            .collect()
    }

    pub fn scale(&self, s: &Rational) -> RatMatrix {
        if s.is_zero() {
            return Self::zeros(self.rows, self.cols);
        }
        let data = self.data.iter().map(|r| r.iter().map(|(j, v)| (*j, v * s)).collect()).collect();
        RatMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn add(&self, other: &RatMatrix) -> Result<RatMatrix, LinalgError> {
        if self.shape() != other.shape() {
            return Err(LinalgError::Shape("cannot add matrices of different shapes".into()));
        }
        let mut out = self.clone();
        for (i, row) in other.data.iter().enumerate() {
            for (j, v) in row {
                out.add_to(i, *j, v);
            }
        }
        Ok(out)
    }

    /// Places `self` and `other` side by side.
    pub fn hstack(&self, other: &RatMatrix) -> Result<RatMatrix, LinalgError> {
        if self.rows != other.rows {
            return Err(LinalgError::Shape("hstack row mismatch".into()));
        }
        let mut out = self.clone();
        out.cols += other.cols;
        for (i, row) in other.data.iter().enumerate() {
            out.data[i].extend(row.iter().map(|(j, v)| (j + self.cols, v.clone())));
        }
        Ok(out)
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &RatMatrix) -> RatMatrix {
        let mut out = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for (i, row) in self.data.iter().enumerate() {
            out.data[i] = row.clone();
        }
        for (i, row) in other.data.iter().enumerate() {
            out.data[self.rows + i] = row.iter().map(|(j, v)| (j + self.cols, v.clone())).collect();
        }
        out
    }

    /// Rows `range` as a new matrix.
    pub fn row_block(&self, start: usize, len: usize) -> RatMatrix {
        RatMatrix { rows: len, cols: self.cols, data: self.data[start..start + len].to_vec() }
    }

    pub fn col_block(&self, start: usize, len: usize) -> RatMatrix {
        let data = self
            .data
            .iter()
            .map(|r| {
                r.iter()
                    .filter(|(j, _)| *j >= start && *j < start + len)
                    .map(|(j, v)| (j - start, v.clone()))
                    .collect()
            })
            .collect();
        RatMatrix { rows: self.rows, cols: len, data }
    }
}

// ---------------------------------------------------------------------------
// fraction-free sparse elimination

type IntRow = Vec<(usize, BigInt)>;

fn integer_row(row: &[(usize, Rational)]) -> IntRow {
    if row.is_empty() {
        return Vec::new();
    }
    let lcm = row.iter().fold(BigInt::one(), |acc, (_, v)| acc.lcm(v.denom()));
    let mut out: IntRow =
        row.iter().map(|(j, v)| (*j, v.numer() * (&lcm / v.denom()))).collect();
    normalize_content(&mut out);
    out
}

fn normalize_content(row: &mut IntRow) {
    let g = row.iter().fold(BigInt::zero(), |acc, (_, v)| acc.gcd(v));
    if !g.is_zero() && !g.is_one() {
        for (_, v) in row.iter_mut() {
            *v /= &g;
        }
    }
}

/// Returns `a * target - b * pivot` where `a`, `b` cancel the leading column.
fn eliminate(target: &IntRow, pivot: &IntRow, col: usize) -> IntRow {
    let tv = lookup(target, col).expect("target has no entry in elimination column");
    let pv = lookup(pivot, col).expect("pivot has no entry in elimination column");
    let g = tv.gcd(pv);
    let a = pv / &g;
    let b = tv / &g;
    let mut out = Vec::with_capacity(target.len() + pivot.len());
    let (mut i, mut k) = (0, 0);
    while i < target.len() || k < pivot.len() {
        let ci = target.get(i).map_or(usize::MAX, |e| e.0);
        let ck = pivot.get(k).map_or(usize::MAX, |e| e.0);
        let (c, v) = if ci < ck {
            i += 1;
            (ci, &a * &target[i - 1].1)
        } else if ck < ci {
            k += 1;
            (ck, -(&b * &pivot[k - 1].1))
        } else {
            i += 1;
            k += 1;
            (ci, &a * &target[i - 1].1 - &b * &pivot[k - 1].1)
        };
        if !v.is_zero() {
            out.push((c, v));
        }
    }
    normalize_content(&mut out);
    out
}

fn lookup(row: &IntRow, col: usize) -> Option<&BigInt> {
    row.binary_search_by_key(&col, |(c, _)| *c).ok().map(|k| &row[k].1)
}

/// Row echelon form: pivot rows in increasing pivot-column order.
struct Echelon {
    rows: Vec<IntRow>,
    pivots: Vec<usize>,
    cols: usize,
}

fn echelon(m: &RatMatrix) -> Echelon {
    let mut buckets: BTreeMap<usize, Vec<IntRow>> = BTreeMap::new();
    for row in &m.data {
        let r = integer_row(row);
        if let Some(&(lead, _)) = r.first() {
            buckets.entry(lead).or_default().push(r);
        }
    }
    let mut rows = Vec::new();
    let mut pivots = Vec::new();
    while let Some((col, mut bucket)) = buckets.pop_first() {
        let best = bucket
            .iter()
            .enumerate()
            .min_by_key(|(_, r)| (r.len(), r[0].1.bits()))
            .map(|(k, _)| k)
            .expect("nonempty bucket");
        let pivot = bucket.swap_remove(best);
        for r in bucket {
            let reduced = eliminate(&r, &pivot, col);
            if let Some(&(lead, _)) = reduced.first() {
                buckets.entry(lead).or_default().push(reduced);
            }
        }
        rows.push(pivot);
        pivots.push(col);
    }
    Echelon { rows, pivots, cols: m.cols }
}

impl Echelon {
    /// Clears every pivot column above its pivot, giving a reduced form over the integers.
    fn reduce_fully(&mut self) {
        for i in (0..self.rows.len()).rev() {
            let col = self.pivots[i];
            for k in 0..i {
                if lookup(&self.rows[k], col).is_some() {
                    let reduced = eliminate(&self.rows[k], &self.rows[i], col);
                    self.rows[k] = reduced;
                }
            }
        }
    }
}

/// Pivot columns of a row echelon form of `m`, in increasing order.
pub fn pivot_columns(m: &RatMatrix) -> Vec<usize> {
    let mut p = echelon(m).pivots;
    p.sort_unstable();
    p
}

pub fn rank(m: &RatMatrix) -> usize {
    echelon(m).pivots.len()
}

/// A null-space basis in reduced form: vector `k` has a 1 in `free_columns[k]`
/// and a 0 in every other free column, so the coordinates of any kernel
/// element are its entries at the free columns.
#[derive(Clone, Debug)]
pub struct Kernel {
    pub basis: Vec<Vec<Rational>>,
    pub free_columns: Vec<usize>,
}

impl Kernel {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of `v` in this basis; `v` must lie in the kernel.
    pub fn coordinates(&self, v: &[Rational]) -> Vec<Rational> {
        self.free_columns.iter().map(|&c| v[c].clone()).collect()
    }

    pub fn as_matrix(&self, ambient: usize) -> RatMatrix {
        RatMatrix::from_columns(ambient, &self.basis)
    }
}

pub fn kernel(m: &RatMatrix) -> Kernel {
    let mut ech = echelon(m);
    ech.reduce_fully();
    let pivot_set: Vec<bool> = {
        let mut s = vec![false; ech.cols];
        for &p in &ech.pivots {
            s[p] = true;
        }
        s
    };
    let free_columns: Vec<usize> = (0..ech.cols).filter(|&c| !pivot_set[c]).collect();
    let mut basis: Vec<Vec<Rational>> = free_columns
        .iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); ech.cols];
            v[f] = Rational::one();
            v
        })
        .collect();
    let free_index: BTreeMap<usize, usize> =
        free_columns.iter().enumerate().map(|(k, &c)| (c, k)).collect();
    for (row, &p) in ech.rows.iter().zip(&ech.pivots) {
        let pv = lookup(row, p).expect("pivot entry");
        for (c, v) in row {
            if let Some(&k) = free_index.get(c) {
                basis[k][p] = -BigRational::new(v.clone(), pv.clone());
            }
        }
    }
    Kernel { basis, free_columns }
}

pub fn kernel_basis(m: &RatMatrix) -> Vec<Vec<Rational>> {
    kernel(m).basis
}

/// `dim ker(d_out) - rank(d_in)`, after checking `d_out * d_in == 0` exactly.
///
/// `d_in` maps into the middle space (its row count), `d_out` maps out of it
/// (its column count).
pub fn homology_dim(d_in: &RatMatrix, d_out: &RatMatrix) -> Result<usize, LinalgError> {
    if d_in.rows() != d_out.cols() {
        return Err(LinalgError::Shape(format!(
            "incoming differential has {} rows but outgoing has {} columns",
            d_in.rows(),
            d_out.cols()
        )));
    }
    let comp = d_out.mul(d_in)?;
    if !comp.is_zero() {
        return Err(LinalgError::CompositionNotZero { rows: comp.rows(), cols: comp.cols() });
    }
    let middle = d_in.rows();
    Ok(middle - rank(d_out) - rank(d_in))
}

/// Reduced row echelon form over the rationals.
#[derive(Clone, Debug)]
pub struct Rref {
    pub rows: Vec<Vec<Rational>>,
    pub pivots: Vec<usize>,
    pub cols: usize,
}

impl Rref {
    pub fn new(m: &RatMatrix) -> Self {
        let mut ech = echelon(m);
        ech.reduce_fully();
        let rows = ech
            .rows
            .iter()
            .zip(&ech.pivots)
            .map(|(row, &p)| {
                let pv = lookup(row, p).expect("pivot entry").clone();
                let mut dense = vec![Rational::zero(); ech.cols];
                for (c, v) in row {
                    dense[*c] = BigRational::new(v.clone(), pv.clone());
                }
                dense
            })
            .collect();
        Rref { rows, pivots: ech.pivots, cols: ech.cols }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Subtracts the row-space component of `v`; the result vanishes on every pivot column.
    pub fn reduce(&self, v: &[Rational]) -> Vec<Rational> {
        let mut out = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if out[p].is_zero() {
                continue;
            }
            let c = out[p].clone();
            for (o, r) in out.iter_mut().zip(row) {
                if !r.is_zero() {
                    *o -= &c * r;
                }
            }
        }
        out
    }

    pub fn non_pivot_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.cols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.cols).filter(|&c| !is_pivot[c]).collect()
    }
}

/// Solves `a x = b`, returning one solution if the system is consistent.
pub fn solve(a: &RatMatrix, b: &[Rational]) -> Option<Vec<Rational>> {
    assert_eq!(a.rows(), b.len(), "right-hand side length mismatch");
    let rhs = RatMatrix::from_columns(a.rows(), &[b.to_vec()]);
    let aug = a.hstack(&rhs).expect("row counts agree");
    let r = Rref::new(&aug);
    let n = a.cols();
    if r.pivots.last() == Some(&n) {
        return None;
    }
    let mut x = vec![Rational::zero(); n];
    for (row, &p) in r.rows.iter().zip(&r.pivots) {
        x[p] = row[n].clone();
    }
    Some(x)
}

/// Inverse of a square matrix, `None` if singular.
pub fn inverse(m: &RatMatrix) -> Option<RatMatrix> {
    if m.rows() != m.cols() {
        return None;
    }
    let n = m.rows();
    if n == 0 {
        return Some(RatMatrix::zeros(0, 0));
    }
    let aug = m.hstack(&RatMatrix::identity(n)).expect("square");
    let r = Rref::new(&aug);
    if r.rank() < n || r.pivots[n - 1] >= n {
        return None;
    }
    let rows = r.rows.iter().map(|row| row[n..].to_vec()).collect();
    Some(RatMatrix::from_rows(n, n, rows).expect("square"))
}

/// Rank of the span of a list of vectors living in a space of dimension `ambient`.
pub fn span_dim(ambient: usize, vectors: &[Vec<Rational>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    rank(&RatMatrix::from_columns(ambient, vectors).transpose())
}

/// A basis (as columns) of the span of the given vectors.
pub fn span_basis(ambient: usize, vectors: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let r = Rref::new(&RatMatrix::from_columns(ambient, vectors).transpose());
    r.rows
}

/// Parses `"3"`, `"-2/5"` and similar.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

// ---------------------------------------------------------------------------
// JSON form: {"rows": r, "cols": c, "entries": [["1", "0"], ...]}

pub mod json {
    use super::*;
    use serde::{Deserialize, Serialize};

    #[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
    pub struct MatrixJson {
        pub rows: usize,
        pub cols: usize,
        pub entries: Vec<Vec<serde_json::Value>>,
    }

    impl From<&RatMatrix> for MatrixJson {
        fn from(m: &RatMatrix) -> Self {
            let entries = m
                .to_dense()
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|v| {
                            if v.denom().is_one() {
                                if let Ok(i) = i64::try_from(v.numer()) {
                                    return serde_json::Value::from(i);
                                }
                            }
                            serde_json::Value::from(format_rational(v))
                        })
                        .collect()
                })
                .collect();
            MatrixJson { rows: m.rows(), cols: m.cols(), entries }
        }
    }

    impl TryFrom<&MatrixJson> for RatMatrix {
        type Error = LinalgError;

        fn try_from(j: &MatrixJson) -> Result<Self, Self::Error> {
            let mut rows = Vec::with_capacity(j.rows);
            for row in &j.entries {
                let mut out = Vec::with_capacity(row.len());
                for v in row {
                    let r = match v {
                        serde_json::Value::Number(n) => n
                            .as_i64()
                            .map(rat)
                            .ok_or_else(|| LinalgError::Shape(format!("non-integer number {n}; use a \"p/q\" string")))?,
                        serde_json::Value::String(s) => parse_rational(s)
                            .ok_or_else(|| LinalgError::Shape(format!("cannot parse rational {s:?}")))?,
                        other => return Err(LinalgError::Shape(format!("bad matrix entry {other}"))),
                    };
                    out.push(r);
                }
                rows.push(out);
            }
            RatMatrix::from_rows(j.rows, j.cols, rows)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Plain Gauss-Jordan over the rationals, kept separate from the
    /// fraction-free routine above.
    fn naive_rank(m: &RatMatrix) -> usize {
        let mut a = m.to_dense();
        let (rows, cols) = m.shape();
        let mut r = 0;
        for c in 0..cols {
            let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
            a.swap(r, p);
            let inv = a[r][c].recip();
            for j in 0..cols {
                a[r][j] = &a[r][j] * &inv;
            }
            for i in 0..rows {
                if i != r && !a[i][c].is_zero() {
                    let f = a[i][c].clone();
                    for j in 0..cols {
                        let t = &f * &a[r][j];
                        a[i][j] -= t;
                    }
                }
            }
            r += 1;
        }
        r
    }

    fn matrix_strategy(max_r: usize, max_c: usize) -> impl Strategy<Value = RatMatrix> {
        (0..=max_r, 0..=max_c).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::collection::vec((-3i64..=3, 1i64..=3), c), r).prop_map(
                move |rows| {
                    let entries = rows
                        .into_iter()
                        .map(|row| row.into_iter().map(|(n, d)| BigRational::new(n.into(), d.into())).collect())
                        .collect();
                    RatMatrix::from_rows(r, c, entries).unwrap()
                },
            )
        })
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&RatMatrix::zeros(0, 0)), 0);
        assert_eq!(rank(&RatMatrix::identity(3)), 3);
        assert_eq!(rank(&RatMatrix::from_i64(&[&[1, 2], &[2, 4]])), 1);
    }

    #[test]
    fn kernel_examples() {
        assert!(kernel_basis(&RatMatrix::identity(4)).is_empty());
        assert_eq!(kernel_basis(&RatMatrix::zeros(2, 3)).len(), 3);
        let k = kernel_basis(&RatMatrix::from_i64(&[&[1, 1]]));
        assert_eq!(k.len(), 1);
        assert_eq!(&k[0][0] + &k[0][1], Rational::zero());
        assert!(!k[0][0].is_zero());
    }

    #[test]
    fn homology_examples() {
        let zero_in = RatMatrix::zeros(4, 3);
        let zero_out = RatMatrix::zeros(2, 4);
        assert_eq!(homology_dim(&zero_in, &zero_out).unwrap(), 4);
        assert_eq!(homology_dim(&RatMatrix::identity(3), &RatMatrix::zeros(0, 3)).unwrap(), 0);
        let bad = homology_dim(&RatMatrix::identity(2), &RatMatrix::identity(2));
        assert!(matches!(bad, Err(LinalgError::CompositionNotZero { .. })));
    }

    #[test]
    fn homology_of_six_dim_complex_matches_naive_elimination() {
        // C^0 (dim 2) -> C^1 (dim 6) -> C^2 (dim 3), d1 * d0 = 0 by construction:
        // d0 has image inside span{e0, e1}, which d1 annihilates.
        let d0 = RatMatrix::from_i64(&[&[1, 2], &[3, 6], &[0, 0], &[0, 0], &[0, 0], &[0, 0]]);
        let d1 = RatMatrix::from_i64(&[&[0, 0, 1, 0, 2, 1], &[0, 0, 0, 1, 1, 0], &[0, 0, 1, 1, 3, 1]]);
        let h = homology_dim(&d0, &d1).unwrap();
        let expected = 6 - naive_rank(&d1) - naive_rank(&d0);
        assert_eq!(expected, 3);
        assert_eq!(h, expected);
    }

    #[test]
    fn solve_and_rref() {
        let a = RatMatrix::from_i64(&[&[1, 1], &[1, -1]]);
        let x = solve(&a, &[rat(3), rat(1)]).unwrap();
        assert_eq!(x, vec![rat(2), rat(1)]);
        let singular = RatMatrix::from_i64(&[&[1, 1], &[2, 2]]);
        assert!(solve(&singular, &[rat(1), rat(3)]).is_none());
        let r = Rref::new(&singular);
        assert_eq!(r.reduce(&[rat(1), rat(5)]), vec![rat(0), rat(4)]);
    }

    #[test]
    fn inverse_roundtrip() {
        let a = RatMatrix::from_i64(&[&[2, 1], &[1, 1]]);
        let inv = inverse(&a).unwrap();
        assert_eq!(a.mul(&inv).unwrap(), RatMatrix::identity(2));
        assert!(inverse(&RatMatrix::from_i64(&[&[1, 2], &[2, 4]])).is_none());
        assert_eq!(inverse(&RatMatrix::zeros(0, 0)), Some(RatMatrix::zeros(0, 0)));
    }

    #[test]
    fn parse_roundtrip() {
        let r = BigRational::new((-6).into(), 4.into());
        assert_eq!(format_rational(&r), "-3/2");
        assert_eq!(parse_rational("-3/2"), Some(r));
        assert_eq!(parse_rational("1/0"), None);
    }

    proptest! {
        #[test]
        fn rank_agrees_with_naive_and_transpose(m in matrix_strategy(6, 6)) {
            let r = rank(&m);
            prop_assert_eq!(r, naive_rank(&m));
            prop_assert_eq!(r, rank(&m.transpose()));
            let k = kernel(&m);
            prop_assert_eq!(m.cols(), r + k.dim());
            for v in &k.basis {
                prop_assert!(m.apply(v).iter().all(Zero::is_zero));
            }
        }

        #[test]
        fn homology_invariant_under_change_of_basis(seed in 0u64..1000) {
            // a random complex 3 -> 4 -> 3 built as d1 = A*P, d0 = K*B with P*K = 0
            let mut s = seed;
            let mut next = || { s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407); ((s >> 33) % 5) as i64 - 2 };
            let inner = RatMatrix::from_rows(2, 4, (0..2).map(|_| (0..4).map(|_| rat(next())).collect()).collect()).unwrap();
            let ker = kernel(&inner).as_matrix(4);
            let d0 = ker.mul(&RatMatrix::from_rows(ker.cols(), 3, (0..ker.cols()).map(|_| (0..3).map(|_| rat(next())).collect()).collect()).unwrap()).unwrap();
            let d1 = RatMatrix::from_rows(3, 2, (0..3).map(|_| (0..2).map(|_| rat(next())).collect()).collect()).unwrap().mul(&inner).unwrap();
            let h = homology_dim(&d0, &d1).unwrap();
            // unipotent change of basis on the middle term
            let mut g = RatMatrix::identity(4);
            let mut g_inv = RatMatrix::identity(4);
            let c = rat(next());
            g.set(0, 3, c.clone());
            g_inv.set(0, 3, -c);
            let d0b = g.mul(&d0).unwrap();
            let d1b = d1.mul(&g_inv).unwrap();
            prop_assert_eq!(homology_dim(&d0b, &d1b).unwrap(), h);
        }
    }
}
