//! Sparse column-based linear algebra over prime fields.
//!
//! Provides the two primitives everything else is built on: persistence
//! reduction with full change-of-basis tracking, and affine solving of
//! sparse linear systems. GF(2) columns are bit-packed during reduction.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::field::FieldSpec;
use crate::{Error, Result};

/// A sparse vector: sorted `(row, coefficient)` pairs with no zeros.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SparseVec {
    entries: Vec<(usize, u64)>,
}

impl SparseVec {
    pub fn zero() -> Self {
        SparseVec::default()
    }

    pub fn unit(row: usize) -> Self {
        SparseVec { entries: vec![(row, 1)] }
    }

    /// Builds from arbitrary (possibly repeated, unsorted) entries,
    /// accumulating in the field and dropping zeros.
    pub fn from_entries(entries: impl IntoIterator<Item = (usize, u64)>, field: &FieldSpec) -> Self {
        let mut acc: BTreeMap<usize, u64> = BTreeMap::new();
        for (row, val) in entries {
            let v = field.reduce(val);
            let slot = acc.entry(row).or_insert(0);
            *slot = field.add(*slot, v);
        }
        SparseVec {
            entries: acc.into_iter().filter(|&(_, v)| v != 0).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.entries.iter().copied()
    }

    pub fn get(&self, row: usize) -> u64 {
        match self.entries.binary_search_by_key(&row, |e| e.0) {
            Ok(i) => self.entries[i].1,
            Err(_) => 0,
        }
    }

    /// Largest row index carrying a nonzero entry (the pivot position of
    /// persistence reduction).
    pub fn low(&self) -> Option<usize> {
        self.entries.last().map(|e| e.0)
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: u64, other: &SparseVec, field: &FieldSpec) -> SparseVec {
        if c == 0 {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut i, mut j) = (0, 0);
        while i < self.entries.len() || j < other.entries.len() {
            let next = match (self.entries.get(i), other.entries.get(j)) {
                (Some(&(ra, va)), Some(&(rb, vb))) => {
                    if ra < rb {
                        i += 1;
                        (ra, va)
                    } else if rb < ra {
                        j += 1;
                        (rb, field.mul(c, vb))
                    } else {
                        i += 1;
                        j += 1;
                        (ra, field.add(va, field.mul(c, vb)))
                    }
                }
                (Some(&(ra, va)), None) => {
                    i += 1;
                    (ra, va)
                }
                (None, Some(&(rb, vb))) => {
                    j += 1;
                    (rb, field.mul(c, vb))
                }
                (None, None) => unreachable!(),
            };
            if next.1 != 0 {
                out.push(next);
            }
        }
        SparseVec { entries: out }
    }

    pub fn scale(&self, c: u64, field: &FieldSpec) -> SparseVec {
        if c == 0 {
            return SparseVec::zero();
        }
        SparseVec {
            entries: self
                .entries
                .iter()
                .map(|&(r, v)| (r, field.mul(c, v)))
                .collect(),
        }
    }
}

/// A sparse matrix stored column-wise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    columns: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            columns: vec![SparseVec::zero(); cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            rows: n,
            columns: (0..n).map(SparseVec::unit).collect(),
        }
    }

    pub fn from_columns(rows: usize, columns: Vec<SparseVec>) -> Result<Self> {
        for (j, col) in columns.iter().enumerate() {
            if let Some(low) = col.low() {
                if low >= rows {
                    return Err(Error::InvalidInput(format!(
                        "column {j} has row index {low} >= row count {rows}"
                    )));
                }
            }
        }
        Ok(SparseMatrix { rows, columns })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn col(&self, j: usize) -> &SparseVec {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[SparseVec] {
        &self.columns
    }

    /// `self * v` where `v` is a sparse column of length `self.cols()`.
    pub fn mat_vec(&self, v: &SparseVec, field: &FieldSpec) -> SparseVec {
        let mut acc = SparseVec::zero();
        for (j, c) in v.iter() {
            acc = acc.axpy(c, &self.columns[j], field);
        }
        acc
    }

    /// `self * other`.
    pub fn mat_mul(&self, other: &SparseMatrix, field: &FieldSpec) -> SparseMatrix {
        SparseMatrix {
            rows: self.rows,
            columns: other
                .columns
                .iter()
                .map(|col| self.mat_vec(col, field))
                .collect(),
        }
    }
}

/// The full solution set of a consistent linear system: every solution is
/// `particular + span(kernel_basis)`.
#[derive(Debug, Clone)]
pub struct AffineSolutionSet {
    pub particular: SparseVec,
    pub kernel_basis: Vec<SparseVec>,
}

/// Bit-packed GF(2) column used internally during reduction.
#[derive(Clone)]
struct Bits {
    words: Vec<u64>,
}

impl Bits {
    fn zero(len: usize) -> Self {
        Bits {
            words: vec![0; (len + 63) / 64],
        }
    }

    fn from_sparse(v: &SparseVec, len: usize) -> Self {
        let mut b = Bits::zero(len);
        for (row, _) in v.iter() {
            b.words[row / 64] |= 1 << (row % 64);
        }
        b
    }

    fn to_sparse(&self) -> SparseVec {
        let mut entries = Vec::new();
        for (w, &word) in self.words.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let tz = bits.trailing_zeros() as usize;
                entries.push((w * 64 + tz, 1));
                bits &= bits - 1;
            }
        }
        SparseVec { entries }
    }

    fn low(&self) -> Option<usize> {
        for (w, &word) in self.words.iter().enumerate().rev() {
            if word != 0 {
                return Some(w * 64 + 63 - word.leading_zeros() as usize);
            }
        }
        None
    }

    fn xor_assign(&mut self, other: &Bits) {
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a ^= b;
        }
    }
}

/// Standard left-to-right persistence reduction with full change-of-basis
/// tracking: returns `(R, V)` with `R = D * V`, `V` unit upper-triangular,
/// and all nonzero columns of `R` having pairwise distinct low rows.
///
/// Columns of `D` must already be in filtration order; this routine does
/// not reorder them.
pub fn reduce_with_basis(d: &SparseMatrix, field: &FieldSpec) -> (SparseMatrix, SparseMatrix) {
    if field.is_gf2() {
        return reduce_gf2(d);
    }
    let n = d.cols();
    let mut r: Vec<SparseVec> = d.columns.clone();
    let mut v: Vec<SparseVec> = (0..n).map(SparseVec::unit).collect();
    let mut pivot_of_low: BTreeMap<usize, usize> = BTreeMap::new();
    for j in 0..n {
        while let Some(low) = r[j].low() {
            match pivot_of_low.get(&low) {
                Some(&pj) => {
                    let c = field.neg(field.div(r[j].get(low), r[pj].get(low)));
                    r[j] = r[j].axpy(c, &r[pj].clone(), field);
                    v[j] = v[j].axpy(c, &v[pj].clone(), field);
                }
                None => {
                    pivot_of_low.insert(low, j);
                    break;
                }
            }
        }
    }
    (
        SparseMatrix { rows: d.rows, columns: r },
        SparseMatrix { rows: n, columns: v },
    )
}

fn reduce_gf2(d: &SparseMatrix) -> (SparseMatrix, SparseMatrix) {
    let n = d.cols();
    let mut r: Vec<Bits> = d
        .columns
        .iter()
        .map(|c| Bits::from_sparse(c, d.rows))
        .collect();
    let mut v: Vec<Bits> = (0..n)
        .map(|j| Bits::from_sparse(&SparseVec::unit(j), n))
        .collect();
    let mut pivot_of_low: Vec<Option<usize>> = vec![None; d.rows];
    for j in 0..n {
        while let Some(low) = r[j].low() {
            match pivot_of_low[low] {
                Some(pj) => {
                    let (rp, vp) = (r[pj].clone(), v[pj].clone());
                    r[j].xor_assign(&rp);
                    v[j].xor_assign(&vp);
                }
                None => {
                    pivot_of_low[low] = Some(j);
                    break;
                }
            }
        }
    }
    (
        SparseMatrix {
            rows: d.rows,
            columns: r.iter().map(Bits::to_sparse).collect(),
        },
        SparseMatrix {
            rows: n,
            columns: v.iter().map(Bits::to_sparse).collect(),
        },
    )
}

/// Solves `A x = b`, returning the full affine solution set or `None` if
/// the system is inconsistent.
pub fn solve(a: &SparseMatrix, b: &SparseVec, field: &FieldSpec) -> Result<Option<AffineSolutionSet>> {
    if let Some(low) = b.low() {
        if low >= a.rows() {
            return Err(Error::InvalidInput(format!(
                "rhs has row index {low} >= matrix row count {}",
                a.rows()
            )));
        }
    }
    let (r, v) = reduce_with_basis(a, field);
    let mut pivot_of_low: BTreeMap<usize, usize> = BTreeMap::new();
    for j in 0..r.cols() {
        if let Some(low) = r.col(j).low() {
            pivot_of_low.insert(low, j);
        }
    }
    // Eliminate b against the reduced columns; record the combination.
    let mut residue = b.clone();
    let mut y = SparseVec::zero();
    while let Some(low) = residue.low() {
        let Some(&j) = pivot_of_low.get(&low) else {
            return Ok(None);
        };
        let c = field.div(residue.get(low), r.col(j).get(low));
        residue = residue.axpy(field.neg(c), r.col(j), field);
        y = y.axpy(c, &SparseVec::unit(j), field);
    }
    let particular = v.mat_vec(&y, field);
    let kernel_basis = (0..r.cols())
        .filter(|&j| r.col(j).is_zero())
        .map(|j| v.col(j).clone())
        .collect();
    Ok(Some(AffineSolutionSet {
        particular,
        kernel_basis,
    }))
}
