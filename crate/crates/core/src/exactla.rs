//! Exact linear algebra over F2 and over the integers.
//!
//! F2 vectors are bit-packed into `u64` words. Dense matrices are stored row
//! by row; large homology computations use the incremental [`Echelon`]
//! structure instead of materialising whole matrices. Integer work (Smith
//! normal form, integral homology) is exact: a sparse unit-pivot elimination
//! with checked `i64` arithmetic shrinks the problem, and the remainder is
//! diagonalised with arbitrary-precision integers.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::HashMap;
use std::fmt;

use crate::Error;

/// A bit-packed vector over F2.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct F2Vec {
    len: usize,
    words: Vec<u64>,
}

impl F2Vec {
    /// The zero vector of length `len`.
    pub fn zeros(len: usize) -> Self {
        F2Vec {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    /// The `i`-th standard basis vector.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    /// Builds a vector from booleans.
    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Builds a vector of length `len` with ones at `ones`.
    pub fn from_indices(len: usize, ones: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in ones {
            v.flip(i);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, b: bool) {
        debug_assert!(i < self.len);
        let m = 1u64 << (i & 63);
        if b {
            self.words[i >> 6] |= m;
        } else {
            self.words[i >> 6] &= !m;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i >> 6] ^= 1u64 << (i & 63);
    }

    /// `self += other`.
    #[inline]
    pub fn xor_assign(&mut self, other: &F2Vec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    /// `self += other`, touching only words from `from_bit` onwards.
    #[inline]
    fn xor_from(&mut self, other: &F2Vec, from_bit: usize) {
        let start = from_bit >> 6;
        for (a, b) in self.words[start..].iter_mut().zip(&other.words[start..]) {
            *a ^= *b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Index of the lowest set bit at or after `from`.
    pub fn next_one(&self, from: usize) -> Option<usize> {
        if from >= self.len {
            return None;
        }
        let mut wi = from >> 6;
        let mut w = self.words[wi] & (!0u64 << (from & 63));
        loop {
            if w != 0 {
                let i = (wi << 6) + w.trailing_zeros() as usize;
                return if i < self.len { Some(i) } else { None };
            }
            wi += 1;
            if wi >= self.words.len() {
                return None;
            }
            w = self.words[wi];
        }
    }

    pub fn first_one(&self) -> Option<usize> {
        self.next_one(0)
    }

    /// Iterator over the positions of set bits, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        let mut pos = 0usize;
        std::iter::from_fn(move || {
            let i = self.next_one(pos)?;
            pos = i + 1;
            Some(i)
        })
    }

    /// Inner product over F2.
    pub fn dot(&self, other: &F2Vec) -> bool {
        debug_assert_eq!(self.len, other.len);
        let mut acc = 0u32;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= (a & b).count_ones();
        }
        acc & 1 == 1
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }
}

impl fmt::Debug for F2Vec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len)
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect();
        write!(f, "F2Vec({s})")
    }
}

/// A dense matrix over F2, stored as bit-packed rows.
#[derive(Clone, PartialEq, Eq)]
pub struct F2Matrix {
    rows: usize,
    cols: usize,
    data: Vec<F2Vec>,
}

impl fmt::Debug for F2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "F2Matrix {}x{}", self.rows, self.cols)?;
        for r in &self.data {
            let s: String = (0..self.cols)
                .map(|i| if r.get(i) { '1' } else { '0' })
                .collect();
            writeln!(f, "  {s}")?;
        }
        Ok(())
    }
}

impl F2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        F2Matrix {
            rows,
            cols,
            data: vec![F2Vec::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from 0/1 rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<u8>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged rows");
            for (j, &x) in r.iter().enumerate() {
                if x & 1 == 1 {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(nrows: usize, cols: &[F2Vec]) -> Self {
        let mut m = Self::zeros(nrows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), nrows);
            for i in c.ones() {
                m.set(i, j, true);
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

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r].get(c)
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, b: bool) {
        self.data[r].set(c, b)
    }

    #[inline]
    pub fn flip(&mut self, r: usize, c: usize) {
        self.data[r].flip(c)
    }

    pub fn row(&self, r: usize) -> &F2Vec {
        &self.data[r]
    }

    pub fn column(&self, c: usize) -> F2Vec {
        let mut v = F2Vec::zeros(self.rows);
        for r in 0..self.rows {
            if self.get(r, c) {
                v.set(r, true);
            }
        }
        v
    }

    /// The set positions, row-major.
    pub fn entries(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (r, row) in self.data.iter().enumerate() {
            for c in row.ones() {
                out.push((r, c));
            }
        }
        out
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        self.data
            .iter()
            .map(|r| (0..self.cols).map(|c| r.get(c) as u8).collect())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.is_zero())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for (r, row) in self.data.iter().enumerate() {
            for c in row.ones() {
                t.set(c, r, true);
            }
        }
        t
    }

    /// Matrix-vector product `A·x`.
    pub fn mul_vec(&self, x: &F2Vec) -> F2Vec {
        assert_eq!(x.len(), self.cols, "dimension mismatch");
        let mut y = F2Vec::zeros(self.rows);
        for (r, row) in self.data.iter().enumerate() {
            if row.dot(x) {
                y.set(r, true);
            }
        }
        y
    }

    /// Matrix product `self·other`.
    pub fn mul(&self, other: &F2Matrix) -> F2Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = F2Matrix::zeros(self.rows, other.cols);
        for (r, row) in self.data.iter().enumerate() {
            for k in row.ones() {
                out.data[r].xor_assign(&other.data[k]);
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        rref(self).1.len()
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &F2Matrix) -> F2Matrix {
        assert_eq!(self.cols, other.cols, "dimension mismatch");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        F2Matrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    /// Places `other` to the right of `self`.
    pub fn hstack(&self, other: &F2Matrix) -> F2Matrix {
        self.transpose().vstack(&other.transpose()).transpose()
    }
}

/// Reduced row echelon form with leftmost-pivot, topmost-row tie-breaking.
pub fn rref(m: &F2Matrix) -> (F2Matrix, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        let Some(p) = (r..a.rows).find(|&i| a.get(i, c)) else {
            continue;
        };
        a.data.swap(r, p);
        let prow = a.data[r].clone();
        for i in 0..a.rows {
            if i != r && a.get(i, c) {
                a.data[i].xor_from(&prow, c);
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

/// Returns some `x` with `A·x = b`, or `None` when `b` is not in the image.
pub fn solve_f2(a: &F2Matrix, b: &F2Vec) -> Option<F2Vec> {
    assert_eq!(b.len(), a.rows, "dimension mismatch");
    // Row-reduce the augmented matrix [A | b].
    let mut aug = F2Matrix::zeros(a.rows, a.cols + 1);
    for r in 0..a.rows {
        for c in a.data[r].ones() {
            aug.set(r, c, true);
        }
        if b.get(r) {
            aug.set(r, a.cols, true);
        }
    }
    let (red, pivots) = rref(&aug);
    if pivots.last() == Some(&a.cols) {
        return None;
    }
    let mut x = F2Vec::zeros(a.cols);
    for (r, &c) in pivots.iter().enumerate() {
        if red.get(r, a.cols) {
            x.set(c, true);
        }
    }
    Some(x)
}

/// A linear subspace of F2^n with a basis in reduced echelon form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<F2Vec>,
}

impl Subspace {
    /// The span of arbitrary vectors of length `ambient`.
    pub fn span(ambient: usize, vectors: &[F2Vec]) -> Self {
        let m = if vectors.is_empty() {
            F2Matrix::zeros(0, ambient)
        } else {
            F2Matrix {
                rows: vectors.len(),
                cols: ambient,
                data: vectors.to_vec(),
            }
        };
        let (red, piv) = rref(&m);
        Subspace {
            ambient,
            basis: red.data.into_iter().take(piv.len()).collect(),
        }
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: (0..ambient).map(|i| F2Vec::unit(ambient, i)).collect(),
        }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Echelon basis, pivots strictly increasing.
    pub fn basis(&self) -> &[F2Vec] {
        &self.basis
    }

    /// Membership test.
    pub fn contains(&self, v: &F2Vec) -> bool {
        let mut w = v.clone();
        for b in &self.basis {
            let p = b.first_one().expect("basis vectors are nonzero");
            if w.get(p) {
                w.xor_assign(b);
            }
        }
        w.is_zero()
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }
}

/// Basis of `{x : A·x = 0}`.
pub fn kernel_basis(a: &F2Matrix) -> Subspace {
    let (red, pivots) = rref(a);
    let mut is_pivot = vec![false; a.cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut vecs = Vec::new();
    for free in (0..a.cols).filter(|&c| !is_pivot[c]) {
        let mut v = F2Vec::unit(a.cols, free);
        for (r, &p) in pivots.iter().enumerate() {
            if red.get(r, free) {
                v.set(p, true);
            }
        }
        vecs.push(v);
    }
    Subspace::span(a.cols, &vecs)
}

/// Basis of the column space of `A`.
pub fn image_basis(a: &F2Matrix) -> Subspace {
    let t = a.transpose();
    Subspace::span(a.rows, &t.data)
}

/// Vectors of `V` projecting to a basis of `V/W`.
pub fn quotient_reps(v: &Subspace, w: &Subspace) -> Result<Vec<F2Vec>, Error> {
    if v.ambient != w.ambient || !v.contains_subspace(w) {
        return Err(Error::Contract(
            "quotient_reps: W is not contained in V".into(),
        ));
    }
    let mut ech = Echelon::new(v.ambient, 0);
    for b in &w.basis {
        ech.insert(b.clone(), F2Vec::zeros(0));
    }
    let mut reps = Vec::new();
    for b in &v.basis {
        if ech.insert(b.clone(), F2Vec::zeros(0)) {
            reps.push(b.clone());
        }
    }
    Ok(reps)
}

/// An incrementally built echelon basis whose rows carry F2 tags.
///
/// Each stored row has a distinct leading (lowest) bit; reduction clears
/// those bits. Tags are carried along every row operation, which lets
/// callers express a reduced vector in terms of the inserted generators.
#[derive(Clone, Debug)]
pub struct Echelon {
    ncols: usize,
    tag_len: usize,
    rows: Vec<F2Vec>,
    tags: Vec<F2Vec>,
    pivot_row: HashMap<usize, usize>,
}

impl Echelon {
    pub fn new(ncols: usize, tag_len: usize) -> Self {
        Echelon {
            ncols,
            tag_len,
            rows: Vec::new(),
            tags: Vec::new(),
            pivot_row: HashMap::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Reduces `v` in place, accumulating the tags of the rows used into `tag`.
    pub fn reduce_tagged(&self, v: &mut F2Vec, tag: &mut F2Vec) {
        let mut pos = 0;
        while let Some(b) = v.next_one(pos) {
            if let Some(&r) = self.pivot_row.get(&b) {
                v.xor_from(&self.rows[r], b);
                if self.tag_len > 0 {
                    tag.xor_assign(&self.tags[r]);
                }
            }
            pos = b + 1;
        }
    }

    /// Reduces `v` in place (tags ignored).
    pub fn reduce(&self, v: &mut F2Vec) {
        let mut pos = 0;
        while let Some(b) = v.next_one(pos) {
            if let Some(&r) = self.pivot_row.get(&b) {
                v.xor_from(&self.rows[r], b);
            }
            pos = b + 1;
        }
    }

    /// Inserts `v` with tag `tag`; returns whether it was independent.
    pub fn insert(&mut self, mut v: F2Vec, mut tag: F2Vec) -> bool {
        assert_eq!(v.len(), self.ncols);
        self.reduce_tagged(&mut v, &mut tag);
        self.push_reduced(v, tag)
    }

    /// Stores an already-reduced vector; returns whether it was nonzero.
    pub fn push_reduced(&mut self, v: F2Vec, tag: F2Vec) -> bool {
        match v.first_one() {
            None => false,
            Some(p) => {
                self.pivot_row.insert(p, self.rows.len());
                self.rows.push(v);
                self.tags.push(tag);
                true
            }
        }
    }

    pub fn contains(&self, v: &F2Vec) -> bool {
        let mut w = v.clone();
        self.reduce(&mut w);
        w.is_zero()
    }
}

/// Column elimination of a linear map given column by column.
///
/// Returns a basis of the image (as an [`Echelon`]) and a basis of the kernel.
/// Columns are processed in the given order; the kernel vector created when
/// column `c` reduces to zero involves `c` and only earlier columns.
pub fn column_eliminate(nrows: usize, columns: &[F2Vec]) -> (Echelon, Vec<F2Vec>) {
    let n = columns.len();
    let mut ech = Echelon::new(nrows, n);
    let mut kernel = Vec::new();
    for (c, col) in columns.iter().enumerate() {
        let mut v = col.clone();
        let mut tag = F2Vec::unit(n, c);
        ech.reduce_tagged(&mut v, &mut tag);
        if v.is_zero() {
            kernel.push(tag);
        } else {
            ech.push_reduced(v, tag);
        }
    }
    (ech, kernel)
}

/// A sparse F2 matrix stored column-wise (`cols[j]` lists the set rows).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseF2 {
    pub nrows: usize,
    pub cols: Vec<Vec<u32>>,
}

impl SparseF2 {
    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn column_vec(&self, j: usize) -> F2Vec {
        let mut v = F2Vec::zeros(self.nrows);
        for &i in &self.cols[j] {
            v.flip(i as usize);
        }
        v
    }

    pub fn apply(&self, x: &F2Vec) -> F2Vec {
        let mut y = F2Vec::zeros(self.nrows);
        for j in x.ones() {
            for &i in &self.cols[j] {
                y.flip(i as usize);
            }
        }
        y
    }

    pub fn to_dense(&self) -> F2Matrix {
        let mut m = F2Matrix::zeros(self.nrows, self.cols.len());
        for (j, c) in self.cols.iter().enumerate() {
            for &i in c {
                m.flip(i as usize, j);
            }
        }
        m
    }
}

/// F2 cohomology of one degree, `ker d_out / im d_in`, with a canonical basis.
#[derive(Clone, Debug)]
pub struct F2Cohomology {
    ambient: usize,
    reps: Vec<F2Vec>,
    coboundaries: Echelon,
    classes: Echelon,
}

impl F2Cohomology {
    /// `d_in : C^{k-1} → C^k`, `d_out : C^k → C^{k+1}`, both column-wise.
    pub fn compute(dim: usize, d_in: &SparseF2, d_out: &SparseF2) -> Self {
        assert_eq!(d_in.nrows, dim);
        assert_eq!(d_out.ncols(), dim);
        let in_cols: Vec<F2Vec> = (0..d_in.ncols()).map(|j| d_in.column_vec(j)).collect();
        let mut coboundaries = Echelon::new(dim, 0);
        for c in in_cols {
            coboundaries.insert(c, F2Vec::zeros(0));
        }
        let out_cols: Vec<F2Vec> = (0..dim).map(|j| d_out.column_vec(j)).collect();
        let (_, cocycles) = column_eliminate(d_out.nrows, &out_cols);
        Self::from_parts(dim, coboundaries, cocycles)
    }

    /// Builds the quotient from an echelon of coboundaries and a cocycle basis.
    pub fn from_parts(dim: usize, coboundaries: Echelon, cocycles: Vec<F2Vec>) -> Self {
        let mut residues = Vec::new();
        for z in &cocycles {
            let mut r = z.clone();
            coboundaries.reduce(&mut r);
            if !r.is_zero() {
                residues.push((r, z.clone()));
            }
        }
        // Canonical basis: reduced echelon form of the residues.
        let ech_m = if residues.is_empty() {
            F2Matrix::zeros(0, dim)
        } else {
            F2Matrix {
                rows: residues.len(),
                cols: dim,
                data: residues.iter().map(|r| r.0.clone()).collect(),
            }
        };
        let (red, piv) = rref(&ech_m);
        let h = piv.len();
        let mut classes = Echelon::new(dim, h);
        let mut reps = Vec::with_capacity(h);
        for k in 0..h {
            let mut r = red.data[k].clone();
            coboundaries.reduce(&mut r);
            reps.push(r.clone());
            let mut tag = F2Vec::unit(h, k);
            classes.reduce_tagged(&mut r, &mut tag);
            let ok = classes.push_reduced(r, tag);
            debug_assert!(ok);
        }
        F2Cohomology {
            ambient: dim,
            reps,
            coboundaries,
            classes,
        }
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    /// Representative cocycles of the canonical basis classes.
    pub fn reps(&self) -> &[F2Vec] {
        &self.reps
    }

    pub fn is_coboundary(&self, v: &F2Vec) -> bool {
        self.coboundaries.contains(v)
    }

    /// Coordinates of the class of cocycle `z`; `None` if `z` is not a cocycle.
    pub fn coords(&self, z: &F2Vec) -> Option<F2Vec> {
        let mut r = z.clone();
        self.coboundaries.reduce(&mut r);
        let mut tag = F2Vec::zeros(self.dim());
        self.classes.reduce_tagged(&mut r, &mut tag);
        if r.is_zero() {
            Some(tag)
        } else {
            None
        }
    }
}

/// A sparse integer matrix.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: HashMap<(usize, usize), i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: HashMap::new(),
        }
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zeros(rows.len(), ncols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), ncols, "ragged rows");
            for (j, &x) in r.iter().enumerate() {
                m.set(i, j, x);
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

    pub fn get(&self, r: usize, c: usize) -> i64 {
        *self.entries.get(&(r, c)).unwrap_or(&0)
    }

    pub fn set(&mut self, r: usize, c: usize, x: i64) {
        assert!(r < self.rows && c < self.cols, "entry out of range");
        if x == 0 {
            self.entries.remove(&(r, c));
        } else {
            self.entries.insert((r, c), x);
        }
    }

    /// Adds `x` to entry `(r, c)`.
    pub fn add(&mut self, r: usize, c: usize, x: i64) {
        let v = self.get(r, c) + x;
        self.set(r, c, v);
    }

    /// Nonzero entries sorted by position.
    pub fn entries(&self) -> Vec<((usize, usize), i64)> {
        let mut e: Vec<_> = self.entries.iter().map(|(&k, &v)| (k, v)).collect();
        e.sort_unstable();
        e
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut d = vec![vec![0; self.cols]; self.rows];
        for (&(r, c), &x) in &self.entries {
            d[r][c] = x;
        }
        d
    }

    pub fn mod2(&self) -> F2Matrix {
        let mut m = F2Matrix::zeros(self.rows, self.cols);
        for (&(r, c), &x) in &self.entries {
            if x.rem_euclid(2) == 1 {
                m.set(r, c, true);
            }
        }
        m
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        let mut by_row: HashMap<usize, Vec<(usize, i64)>> = HashMap::new();
        for (&(r, c), &x) in &other.entries {
            by_row.entry(r).or_default().push((c, x));
        }
        for (&(r, k), &x) in &self.entries {
            if let Some(row) = by_row.get(&k) {
                for &(c, y) in row {
                    out.add(r, c, x * y);
                }
            }
        }
        out
    }
}

/// A dense matrix of arbitrary-precision integers.
pub type BigMatrix = Vec<Vec<BigInt>>;

/// Smith normal form: `diag` with `U·A·V = diag`.
#[derive(Clone, Debug)]
pub struct Snf {
    /// Diagonal entries `d_1 | d_2 | …`, all nonnegative, length `min(rows, cols)`.
    pub diag: Vec<BigInt>,
    pub u: BigMatrix,
    pub v: BigMatrix,
}

fn big_identity(n: usize) -> BigMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect()
}

/// Smith normal form with unimodular transforms, in exact arithmetic.
pub fn smith_normal_form(a: &IntMatrix) -> Snf {
    let (m, n) = (a.rows, a.cols);
    let mut d: BigMatrix = vec![vec![BigInt::zero(); n]; m];
    for (&(r, c), &x) in &a.entries {
        d[r][c] = BigInt::from(x);
    }
    let mut u = big_identity(m);
    let mut v = big_identity(n);
    snf_in_place(&mut d, Some((&mut u, &mut v)));
    let diag = (0..m.min(n)).map(|i| d[i][i].clone()).collect();
    Snf { diag, u, v }
}

/// Invariant factors only (no transforms).
pub fn invariant_factors(d: &mut BigMatrix) -> Vec<BigInt> {
    snf_in_place(d, None);
    let m = d.len();
    let n = if m == 0 { 0 } else { d[0].len() };
    (0..m.min(n)).map(|i| d[i][i].clone()).collect()
}

fn row_op(d: &mut [Vec<BigInt>], dst: usize, src: usize, q: &BigInt) {
    // row dst -= q * row src
    if q.is_zero() {
        return;
    }
    let (a, b) = if dst < src {
        let (lo, hi) = d.split_at_mut(src);
        (&mut lo[dst], &hi[0])
    } else {
        let (lo, hi) = d.split_at_mut(dst);
        (&mut hi[0], &lo[src])
    };
    for (x, y) in a.iter_mut().zip(b.iter()) {
        if !y.is_zero() {
            *x -= q * y;
        }
    }
}

fn col_op(d: &mut [Vec<BigInt>], dst: usize, src: usize, q: &BigInt) {
    // col dst -= q * col src
    if q.is_zero() {
        return;
    }
    for row in d.iter_mut() {
        if !row[src].is_zero() {
            let t = q * &row[src];
            row[dst] -= t;
        }
    }
}

fn swap_cols(d: &mut [Vec<BigInt>], a: usize, b: usize) {
    for row in d.iter_mut() {
        row.swap(a, b);
    }
}

fn snf_in_place(d: &mut BigMatrix, mut tr: Option<(&mut BigMatrix, &mut BigMatrix)>) {
    let m = d.len();
    let n = if m == 0 { 0 } else { d[0].len() };
    let mut t = 0;
    while t < m.min(n) {
        // Choose the nonzero entry of least magnitude in the remaining block.
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if !d[i][j].is_zero() && best.is_none_or(|(bi, bj)| d[i][j].abs() < d[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        d.swap(t, pi);
        swap_cols(d, t, pj);
        if let Some((u, v)) = tr.as_mut() {
            u.swap(t, pi);
            swap_cols(v, t, pj);
        }
        loop {
            let mut changed = false;
            // Clear column t below the pivot.
            for i in t + 1..m {
                if d[i][t].is_zero() {
                    continue;
                }
                let q = floor_div(&d[i][t], &d[t][t]);
                row_op(d, i, t, &q);
                if let Some((u, _)) = tr.as_mut() {
                    row_op(u, i, t, &q);
                }
                if !d[i][t].is_zero() {
                    d.swap(t, i);
                    if let Some((u, _)) = tr.as_mut() {
                        u.swap(t, i);
                    }
                    changed = true;
                }
            }
            // Clear row t right of the pivot.
            for j in t + 1..n {
                if d[t][j].is_zero() {
                    continue;
                }
                let q = floor_div(&d[t][j], &d[t][t]);
                col_op(d, j, t, &q);
                if let Some((_, v)) = tr.as_mut() {
                    col_op(v, j, t, &q);
                }
                if !d[t][j].is_zero() {
                    swap_cols(d, t, j);
                    if let Some((_, v)) = tr.as_mut() {
                        swap_cols(v, t, j);
                    }
                    changed = true;
                }
            }
            if changed {
                continue;
            }
            // Enforce divisibility of the remaining block by the pivot.
            let mut fix = None;
            'scan: for i in t + 1..m {
                for j in t + 1..n {
                    if !(&d[i][j] % &d[t][t]).is_zero() {
                        fix = Some(i);
                        break 'scan;
                    }
                }
            }
            match fix {
                None => break,
                Some(i) => {
                    // row t += row i, then continue reducing.
                    let q = -BigInt::one();
                    row_op(d, t, i, &q);
                    if let Some((u, _)) = tr.as_mut() {
                        row_op(u, t, i, &q);
                    }
                }
            }
        }
        if d[t][t].is_negative() {
            for x in d[t].iter_mut() {
                *x = -&*x;
            }
            if let Some((u, _)) = tr.as_mut() {
                for x in u[t].iter_mut() {
                    *x = -&*x;
                }
            }
        }
        t += 1;
    }
}

fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    use num_integer::Integer;
    a.div_floor(b)
}

/// Rank and invariant factors (> 1) of a large sparse integer matrix.
///
/// Unit pivots are eliminated first with checked `i64` arithmetic; the
/// remaining block is passed to the exact Smith normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankTorsion {
    pub rank: usize,
    /// Invariant factors greater than one, ascending.
    pub torsion: Vec<BigInt>,
}

/// Sparse integer matrix stored row-wise as sorted `(col, value)` lists.
#[derive(Clone, Debug, Default)]
pub struct SparseInt {
    pub nrows: usize,
    pub ncols: usize,
    pub rows: Vec<Vec<(u32, i64)>>,
}

impl SparseInt {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        SparseInt {
            nrows,
            ncols,
            rows: vec![Vec::new(); nrows],
        }
    }

    /// Adds `x` at `(r, c)`; rows are normalised by [`SparseInt::finish`].
    pub fn push(&mut self, r: usize, c: usize, x: i64) {
        self.rows[r].push((c as u32, x));
    }

    /// Sorts rows, merges duplicates and drops zeros.
    pub fn finish(&mut self) {
        for row in &mut self.rows {
            row.sort_unstable_by_key(|e| e.0);
            let mut out: Vec<(u32, i64)> = Vec::with_capacity(row.len());
            for &(c, x) in row.iter() {
                match out.last_mut() {
                    Some(last) if last.0 == c => last.1 += x,
                    _ => out.push((c, x)),
                }
            }
            out.retain(|e| e.1 != 0);
            *row = out;
        }
    }

    /// `y = A·x` over the integers.
    pub fn apply(&self, x: &[i64]) -> Vec<i64> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(c, v)| v * x[c as usize]).sum())
            .collect()
    }

    pub fn to_int_matrix(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.nrows, self.ncols);
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, x) in row {
                m.add(r, c as usize, x);
            }
        }
        m
    }

    pub fn mod2_columns(&self) -> SparseF2 {
        let mut cols = vec![Vec::new(); self.ncols];
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, x) in row {
                if x.rem_euclid(2) == 1 {
                    cols[c as usize].push(r as u32);
                }
            }
        }
        SparseF2 {
            nrows: self.nrows,
            cols,
        }
    }
}

/// Rank and torsion of a sparse integer matrix, exactly.
pub fn rank_torsion(a: &SparseInt) -> Result<RankTorsion, Error> {
    let mut rows: Vec<Option<HashMap<u32, i64>>> = a
        .rows
        .iter()
        .map(|r| {
            Some(
                r.iter()
                    .map(|&(c, x)| (c, x))
                    .filter(|e| e.1 != 0)
                    .collect(),
            )
        })
        .collect();
    let mut col_rows: HashMap<u32, std::collections::BTreeSet<usize>> = HashMap::new();
    for (r, row) in rows.iter().enumerate() {
        for &c in row.as_ref().unwrap().keys() {
            col_rows.entry(c).or_default().insert(r);
        }
    }
    let mut rank = 0usize;
    // Passes over the rows, shortest first, pivoting on unit entries (the
    // column with fewest entries wins) until no unit entry remains.
    loop {
        let mut order: Vec<(usize, usize)> = rows
            .iter()
            .enumerate()
            .filter_map(|(r, row)| row.as_ref().map(|x| (x.len(), r)))
            .collect();
        order.sort_unstable();
        let mut progress = false;
        for (_, pr) in order {
            let Some(row) = rows[pr].as_ref() else {
                continue;
            };
            let pc = row
                .iter()
                .filter(|(_, &x)| x == 1 || x == -1)
                .map(|(&c, _)| c)
                .min_by_key(|c| (col_rows[c].len(), *c));
            let Some(pc) = pc else { continue };
            progress = true;
            rank += 1;
            let prow = rows[pr].take().unwrap();
            for &c in prow.keys() {
                col_rows.get_mut(&c).unwrap().remove(&pr);
            }
            let pval = prow[&pc];
            let others: Vec<usize> = col_rows[&pc].iter().copied().collect();
            for r in others {
                let row = rows[r].as_mut().unwrap();
                // pval = ±1, so row[pc] / pval = row[pc] * pval.
                let f = row[&pc] * pval;
                for (&c, &x) in &prow {
                    let delta = f.checked_mul(x).ok_or(Error::Overflow)?;
                    let e = row.entry(c).or_insert(0);
                    let was_zero = *e == 0;
                    *e = e.checked_sub(delta).ok_or(Error::Overflow)?;
                    if *e == 0 {
                        row.remove(&c);
                        col_rows.get_mut(&c).unwrap().remove(&r);
                    } else if was_zero {
                        col_rows.entry(c).or_default().insert(r);
                    }
                }
            }
            col_rows.remove(&pc);
        }
        if !progress {
            break;
        }
    }
    // Remaining block: exact SNF.
    let live: Vec<usize> = (0..rows.len())
        .filter(|&r| rows[r].as_ref().is_some_and(|x| !x.is_empty()))
        .collect();
    let mut cols: Vec<u32> = col_rows
        .iter()
        .filter(|(_, s)| !s.is_empty())
        .map(|(&c, _)| c)
        .collect();
    cols.sort_unstable();
    let cidx: HashMap<u32, usize> = cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut dense: BigMatrix = vec![vec![BigInt::zero(); cols.len()]; live.len()];
    for (i, &r) in live.iter().enumerate() {
        for (&c, &x) in rows[r].as_ref().unwrap() {
            dense[i][cidx[&c]] = BigInt::from(x);
        }
    }
    let mut torsion = Vec::new();
    for dfac in invariant_factors(&mut dense) {
        if dfac.is_zero() {
            continue;
        }
        rank += 1;
        if dfac > BigInt::one() {
            torsion.push(dfac);
        }
    }
    torsion.sort();
    Ok(RankTorsion { rank, torsion })
}

/// A finitely generated abelian group `Z^free ⊕ ⊕ Z/t`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct AbelianGroup {
    pub free: usize,
    /// Torsion orders (> 1), ascending; prime powers when normalized.
    pub torsion: Vec<u64>,
}

impl AbelianGroup {
    /// Rewrites the torsion part as prime-power orders, ascending.
    pub fn normalized(mut self) -> Self {
        let mut out = Vec::new();
        for &t in &self.torsion {
            let mut m = t;
            let mut p = 2u64;
            while p * p <= m {
                if m % p == 0 {
                    let mut q = 1;
                    while m % p == 0 {
                        m /= p;
                        q *= p;
                    }
                    out.push(q);
                }
                p += 1;
            }
            if m > 1 {
                out.push(m);
            }
        }
        out.sort_unstable();
        self.torsion = out;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.free == 0 && self.torsion.is_empty()
    }

    /// Dimension of the group tensored with F2.
    pub fn f2_rank(&self) -> usize {
        self.free + self.torsion.iter().filter(|&&t| t % 2 == 0).count()
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free {
            0 => {}
            1 => parts.push("Z".to_string()),
            k => parts.push(format!("Z^{k}")),
        }
        for t in &self.torsion {
            parts.push(format!("Z/{t}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join("+"))
        }
    }
}

/// Cohomology `ker d_out / im d_in` over Z of one degree of a cochain complex.
pub fn integral_cohomology(
    dim: usize,
    d_in: &RankTorsion,
    d_out: &RankTorsion,
) -> Result<AbelianGroup, Error> {
    let free = dim
        .checked_sub(d_in.rank + d_out.rank)
        .ok_or_else(|| Error::Internal("ranks exceed chain group dimension".into()))?;
    let torsion = d_in
        .torsion
        .iter()
        .map(|t| t.to_u64().ok_or(Error::Overflow))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(AbelianGroup { free, torsion }.normalized())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rref_examples() {
        let (r, p) = rref(&F2Matrix::zeros(0, 0));
        assert_eq!((r.rows(), r.cols(), p.len()), (0, 0, 0));
        let id = F2Matrix::identity(3);
        assert_eq!(rref(&id), (id.clone(), vec![0, 1, 2]));
        let m = F2Matrix::from_rows(&[vec![1, 1], vec![1, 1]]);
        assert_eq!(
            rref(&m),
            (F2Matrix::from_rows(&[vec![1, 1], vec![0, 0]]), vec![0])
        );
    }

    #[test]
    fn solve_examples() {
        let b = F2Vec::from_bools(&[true, false, true]);
        assert_eq!(solve_f2(&F2Matrix::identity(3), &b), Some(b.clone()));
        assert_eq!(
            solve_f2(&F2Matrix::zeros(2, 2), &F2Vec::from_bools(&[true, false])),
            None
        );
        let a = F2Matrix::from_rows(&[vec![1, 1], vec![0, 1]]);
        assert_eq!(
            solve_f2(&a, &F2Vec::from_bools(&[false, true])),
            Some(F2Vec::from_bools(&[true, true]))
        );
    }

    #[test]
    fn kernel_image_examples() {
        let z = F2Matrix::zeros(3, 3);
        assert_eq!(kernel_basis(&z).dim(), 3);
        assert_eq!(image_basis(&z).dim(), 0);
        let id = F2Matrix::identity(3);
        assert_eq!(kernel_basis(&id).dim(), 0);
        assert_eq!(image_basis(&id).dim(), 3);
        let a = F2Matrix::from_rows(&[vec![1, 1]]);
        assert_eq!(
            kernel_basis(&a).basis(),
            &[F2Vec::from_bools(&[true, true])]
        );
        assert_eq!(image_basis(&a).dim(), 1);
    }

    #[test]
    fn quotient_examples() {
        let full = Subspace::full(2);
        assert!(quotient_reps(&full, &full).unwrap().is_empty());
        assert_eq!(quotient_reps(&full, &Subspace::zero(2)).unwrap().len(), 2);
        let w = Subspace::span(2, &[F2Vec::from_bools(&[true, true])]);
        let reps = quotient_reps(&full, &w).unwrap();
        assert_eq!(reps.len(), 1);
        assert!(!w.contains(&reps[0]));
        assert!(quotient_reps(&w, &full).is_err());
    }

    #[test]
    fn snf_examples() {
        let s = smith_normal_form(&IntMatrix::zeros(2, 3));
        assert!(s.diag.iter().all(|d| d.is_zero()));
        let s = smith_normal_form(&IntMatrix::from_dense(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(s.diag, vec![BigInt::from(1), BigInt::from(6)]);
        let s = smith_normal_form(&IntMatrix::from_dense(&[vec![2]]));
        assert_eq!(s.diag, vec![BigInt::from(2)]);
    }

    #[test]
    fn cohomology_of_interval() {
        // C^0 = F2^2 -> C^1 = F2, d = [1 1]: H^0 = F2 spanned by (1,1).
        let d_out = SparseF2 {
            nrows: 1,
            cols: vec![vec![0], vec![0]],
        };
        let d_in = SparseF2 {
            nrows: 2,
            cols: vec![],
        };
        let h = F2Cohomology::compute(2, &d_in, &d_out);
        assert_eq!(h.dim(), 1);
        assert_eq!(
            h.coords(&F2Vec::from_bools(&[true, true])),
            Some(F2Vec::from_bools(&[true]))
        );
        assert_eq!(h.coords(&F2Vec::from_bools(&[true, false])), None);
    }

    #[test]
    fn rank_torsion_examples() {
        let mut a = SparseInt::new(2, 2);
        a.push(0, 0, 2);
        a.push(1, 1, 3);
        a.finish();
        let rt = rank_torsion(&a).unwrap();
        assert_eq!(rt.rank, 2);
        assert_eq!(rt.torsion, vec![BigInt::from(6)]);
        let mut b = SparseInt::new(3, 3);
        for (r, c, x) in [
            (0, 0, 1),
            (0, 1, 1),
            (1, 1, 1),
            (1, 2, 1),
            (2, 0, 1),
            (2, 2, -1),
        ] {
            b.push(r, c, x);
        }
        b.finish();
        assert_eq!(
            rank_torsion(&b).unwrap(),
            RankTorsion {
                rank: 2,
                torsion: vec![]
            }
        );
    }
}
