//! Dense bit-packed linear algebra over the two-element field.
//!
//! Rows are packed into `u64` words so that row operations are word-parallel
//! XORs. Everything downstream (action matrices, quotient maps, the
//! decategorified operators) is expressed through [`GF2Matrix`].

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

const WORD: usize = 64;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

/// A vector over F₂ of fixed length.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GF2Vector {
    len: usize,
    words: Vec<u64>,
}

impl GF2Vector {
    pub fn zeros(len: usize) -> Self {
        Self { len, words: vec![0; words_for(len)] }
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b & 1 == 1);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "index {i} out of range for length {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "index {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Indices of the nonzero coordinates, increasing.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD + b)
            })
        })
    }

    pub fn first_one(&self) -> Option<usize> {
        self.support().next()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.len != other.len {
            return Err(Error::Shape(format!(
                "vector lengths {} and {} differ",
                self.len, other.len
            )));
        }
        let mut out = self.clone();
        out.add_assign(other);
        Ok(out)
    }

    pub(crate) fn add_assign(&mut self, other: &Self) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn dot(&self, other: &Self) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum::<u32>()
            % 2
            == 1
    }
}

impl fmt::Display for GF2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for GF2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF2Vector({self})")
    }
}

/// A dense `rows × cols` matrix over F₂.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GF2Matrix {
    rows: usize,
    cols: usize,
    data: Vec<GF2Vector>,
}

/// Projection onto a complement of a column space, see [`GF2Matrix::cokernel_basis`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cokernel {
    /// `dim × ambient` matrix whose kernel is exactly the column space.
    pub projection: GF2Matrix,
    /// Ambient coordinates spanning the chosen complement, increasing.
    pub complement: Vec<usize>,
}

impl Cokernel {
    pub fn dim(&self) -> usize {
        self.complement.len()
    }

    /// `ambient × dim` inclusion of the complement coordinates; `projection * section = id`.
    pub fn section(&self) -> GF2Matrix {
        let ambient = self.projection.cols();
        let mut s = GF2Matrix::zeros(ambient, self.dim());
        for (j, &c) in self.complement.iter().enumerate() {
            s.set(c, j, true);
        }
        s
    }
}

impl GF2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![GF2Vector::zeros(cols); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from rows of 0/1 entries.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len());
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::Shape(format!("ragged rows: {} vs {}", r.len(), cols)));
            }
            data.push(GF2Vector::from_bits(r));
        }
        Ok(Self { rows: rows.len(), cols, data })
    }

    /// Parses rows written as strings of `0`/`1` characters.
    pub fn from_row_strings<S: AsRef<str>>(rows: &[S]) -> Result<Self> {
        let bits: Vec<Vec<u8>> = rows
            .iter()
            .map(|r| {
                r.as_ref()
                    .chars()
                    .map(|c| match c {
                        '0' => Ok(0),
                        '1' => Ok(1),
                        other => Err(Error::Shape(format!("bad matrix character {other:?}"))),
                    })
                    .collect::<Result<Vec<u8>>>()
            })
            .collect::<Result<_>>()?;
        Self::from_rows(&bits)
    }

    pub fn from_row_vectors(cols: usize, rows: Vec<GF2Vector>) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::Shape(format!("row of length {} in {cols}-column matrix", bad.len())));
        }
        Ok(Self { rows: rows.len(), cols, data: rows })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, cols: &[GF2Vector]) -> Result<Self> {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::Shape(format!("column of length {} in {rows}-row matrix", c.len())));
            }
            for i in c.support() {
                m.set(i, j, true);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i].get(j)
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.data[i].set(j, value)
    }

    pub fn flip(&mut self, i: usize, j: usize) {
        self.data[i].flip(j)
    }

    pub fn row(&self, i: usize) -> &GF2Vector {
        &self.data[i]
    }

    pub fn column(&self, j: usize) -> GF2Vector {
        let mut v = GF2Vector::zeros(self.rows);
        for i in 0..self.rows {
            if self.get(i, j) {
                v.set(i, true);
            }
        }
        v
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(GF2Vector::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for (i, r) in self.data.iter().enumerate() {
            for j in r.support() {
                t.set(j, i, true);
            }
        }
        t
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Shape(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            a.add_assign(b);
        }
        Ok(out)
    }

    /// Matrix product over F₂; each output row is an XOR of rows of `other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self
            .data
            .iter()
            .map(|r| {
                let mut acc = GF2Vector::zeros(other.cols);
                for k in r.support() {
                    acc.add_assign(&other.data[k]);
                }
                acc
            })
            .collect();
        Ok(Self { rows: self.rows, cols: other.cols, data })
    }

    pub fn mul_vec(&self, v: &GF2Vector) -> Result<GF2Vector> {
        if self.cols != v.len() {
            return Err(Error::Shape(format!(
                "cannot apply {}x{} matrix to vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let mut out = GF2Vector::zeros(self.rows);
        for (i, r) in self.data.iter().enumerate() {
            if r.dot(v) {
                out.set(i, true);
            }
        }
        Ok(out)
    }

    /// Kronecker product; row index of the result is `i * other.rows + k`.
    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in self.data[i].support() {
                for k in 0..other.rows {
                    for l in other.data[k].support() {
                        out.set(i * other.rows + k, j * other.cols + l, true);
                    }
                }
            }
        }
        out
    }

    /// Reduced row-echelon form and the pivot column of each nonzero row.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| m.data[i].get(c)) else {
                continue;
            };
            m.data.swap(r, p);
            let pivot_row = m.data[r].clone();
            for i in 0..m.rows {
                if i != r && m.data[i].get(c) {
                    m.data[i].add_assign(&pivot_row);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in self.data[i].support() {
                aug.set(i, j, true);
            }
            aug.set(i, n + i, true);
        }
        let (red, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in red.data[i].support().filter(|&j| j >= n) {
                inv.set(i, j - n, true);
            }
        }
        Some(inv)
    }

    /// Basis of the right kernel `{v : self * v = 0}`.
    pub fn kernel_basis(&self) -> Vec<GF2Vector> {
        let (red, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = GF2Vector::unit(self.cols, f);
                for (row, &p) in pivots.iter().enumerate() {
                    if red.data[row].get(f) {
                        v.set(p, true);
                    }
                }
                v
            })
            .collect()
    }

    /// A projection onto a complement of the column space.
    ///
    /// The complement is spanned by the non-pivot coordinates of the reduced
    /// row-echelon form of the column space, so the choice is deterministic.
    /// `projection * self = 0` and `dim = rows - rank`.
    pub fn cokernel_basis(&self) -> Cokernel {
        let ambient = self.rows;
        let (red, pivots) = self.transpose().rref();
        let complement: Vec<usize> = (0..ambient).filter(|c| !pivots.contains(c)).collect();
        let slot: Vec<Option<usize>> = {
            let mut s = vec![None; ambient];
            for (k, &c) in complement.iter().enumerate() {
                s[c] = Some(k);
            }
            s
        };
        let mut projection = Self::zeros(complement.len(), ambient);
        for i in 0..ambient {
            // e_i reduced modulo the echelon basis: pivot coordinate i (if any)
            // is traded for the rest of its row.
            match pivots.iter().position(|&p| p == i) {
                Some(row) => {
                    for c in red.data[row].support().filter(|&c| c != i) {
                        if let Some(k) = slot[c] {
                            projection.flip(k, i);
                        }
                    }
                }
                None => {
                    let k = slot[i].expect("non-pivot coordinate has a slot");
                    projection.set(k, i, true);
                }
            }
        }
        Cokernel { projection, complement }
    }

    /// Rows rendered as strings of `0`/`1`.
    pub fn row_strings(&self) -> Vec<String> {
        self.data.iter().map(ToString::to_string).collect()
    }
}

impl fmt::Display for GF2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.data.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for GF2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF2Matrix({}x{}) {:?}", self.rows, self.cols, self.row_strings())
    }
}

impl Serialize for GF2Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.row_strings().serialize(s)
    }
}
