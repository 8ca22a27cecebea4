//! Bit-packed vectors and matrices over GF(2).
//!
//! Public coordinates are 1-indexed so that block arithmetic such as
//! `{kn+1, ..., kn+n}` can be written exactly as stated; storage is 0-indexed
//! and packed 64 bits per word, LSB first.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

/// A word in `{0,1}^len`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitWord {
    len: usize,
    bits: Vec<u64>,
}

impl BitWord {
    pub fn zeros(len: usize) -> Self {
        BitWord { len, bits: vec![0; words_for(len)] }
    }

    pub fn ones(len: usize) -> Self {
        let mut w = BitWord { len, bits: vec![u64::MAX; words_for(len)] };
        w.clear_tail();
        w
    }

    /// The standard basis vector with a single 1 at position `i` (1-indexed).
    pub fn unit(len: usize, i: usize) -> Self {
        let mut w = Self::zeros(len);
        w.set(i, true);
        w
    }

    /// Bit `j` of `value` becomes position `j + 1`. Used to enumerate `{0,1}^len`.
    pub fn from_index(len: usize, value: u64) -> Self {
        assert!(len >= 64 || value >> len == 0, "value has bits beyond len");
        let mut w = Self::zeros(len);
        if len > 0 {
            w.bits[0] = value;
        }
        w
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut w = Self::zeros(bits.len());
        for (j, &b) in bits.iter().enumerate() {
            if b {
                w.set_raw(j, true);
            }
        }
        w
    }

    /// Builds a word of length `len` with ones at the given 1-indexed positions.
    pub fn from_support(len: usize, support: &[usize]) -> Self {
        let mut w = Self::zeros(len);
        for &i in support {
            w.set(i, true);
        }
        w
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Reads position `i` (1-indexed). Panics when out of range.
    pub fn get(&self, i: usize) -> bool {
        assert!(i >= 1 && i <= self.len, "position {i} out of range 1..={}", self.len);
        self.get_raw(i - 1)
    }

    pub fn try_get(&self, i: usize) -> Result<bool> {
        if i == 0 || i > self.len {
            return Err(Error::IndexOutOfRange { index: i, len: self.len });
        }
        Ok(self.get_raw(i - 1))
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i >= 1 && i <= self.len, "position {i} out of range 1..={}", self.len);
        self.set_raw(i - 1, value);
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i >= 1 && i <= self.len, "position {i} out of range 1..={}", self.len);
        self.bits[(i - 1) / WORD_BITS] ^= 1 << ((i - 1) % WORD_BITS);
    }

    #[inline]
    pub(crate) fn get_raw(&self, j: usize) -> bool {
        (self.bits[j / WORD_BITS] >> (j % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub(crate) fn set_raw(&mut self, j: usize, value: bool) {
        let mask = 1u64 << (j % WORD_BITS);
        if value {
            self.bits[j / WORD_BITS] |= mask;
        } else {
            self.bits[j / WORD_BITS] &= !mask;
        }
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.bits.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn weight(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    /// Number of positions where `self` and `other` differ. Lengths must agree.
    pub fn hamming_distance(&self, other: &BitWord) -> Result<usize> {
        self.expect_len(other.len)?;
        Ok(self.bits.iter().zip(&other.bits).map(|(a, b)| (a ^ b).count_ones() as usize).sum())
    }

    pub fn xor_assign(&mut self, other: &BitWord) {
        assert_eq!(self.len, other.len, "xor of words with different lengths");
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitWord) -> BitWord {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitWord) -> bool {
        assert_eq!(self.len, other.len, "dot of words with different lengths");
        self.bits.iter().zip(&other.bits).fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones()) & 1 == 1
    }

    /// 1-indexed positions holding a 1, ascending.
    pub fn support(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.weight());
        for (wi, &word) in self.bits.iter().enumerate() {
            let mut w = word;
            while w != 0 {
                let tz = w.trailing_zeros() as usize;
                out.push(wi * WORD_BITS + tz + 1);
                w &= w - 1;
            }
        }
        out
    }

    /// Lowest 1-indexed position holding a 1.
    pub fn first_one(&self) -> Option<usize> {
        self.bits
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(wi, &w)| wi * WORD_BITS + w.trailing_zeros() as usize + 1)
    }

    /// `w|_{start..=end}` with 1-indexed inclusive bounds.
    pub fn restrict(&self, start: usize, end: usize) -> BitWord {
        assert!(start >= 1 && start <= end + 1 && end <= self.len, "bad interval {start}..={end}");
        let mut out = BitWord::zeros(end + 1 - start);
        for (dst, src) in (start - 1..end).enumerate() {
            if self.get_raw(src) {
                out.set_raw(dst, true);
            }
        }
        out
    }

    /// Values at the listed 1-indexed positions, in order.
    pub fn gather(&self, positions: &[usize]) -> Vec<bool> {
        positions.iter().map(|&i| self.get(i)).collect()
    }

    /// Copies `src` into positions `start..start+src.len()` (1-indexed).
    pub fn embed(&mut self, start: usize, src: &BitWord) {
        assert!(start >= 1 && start - 1 + src.len <= self.len, "embedding out of range");
        for j in 0..src.len {
            self.set_raw(start - 1 + j, src.get_raw(j));
        }
    }

    pub fn concat(&self, other: &BitWord) -> BitWord {
        let mut out = BitWord::zeros(self.len + other.len);
        out.embed(1, self);
        out.embed(self.len + 1, other);
        out
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|j| self.get_raw(j)).collect()
    }

    /// Packed storage, LSB-first, for hashing and fast comparisons.
    pub fn as_words(&self) -> &[u64] {
        &self.bits
    }

    fn expect_len(&self, len: usize) -> Result<()> {
        if self.len != len {
            Err(Error::DimensionMismatch { expected: self.len, got: len })
        } else {
            Ok(())
        }
    }
}

/// Lexicographic order reading position 1 first, with 0 < 1.
impl Ord for BitWord {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.bits.iter().zip(&other.bits) {
            let diff = a ^ b;
            if diff != 0 {
                let low = diff & diff.wrapping_neg();
                return if a & low == 0 { Ordering::Less } else { Ordering::Greater };
            }
        }
        self.len.cmp(&other.len)
    }
}

impl PartialOrd for BitWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.len {
            f.write_str(if self.get_raw(j) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitWord({self})")
    }
}

impl FromStr for BitWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut w = BitWord::zeros(s.len());
        for (j, c) in s.bytes().enumerate() {
            match c {
                b'0' => {}
                b'1' => w.set_raw(j, true),
                _ => return Err(Error::invalid(format!("not a binary word: {s:?}"))),
            }
        }
        Ok(w)
    }
}

/// A dense `rows x cols` matrix over GF(2), stored as rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitWord>,
}

/// Output of [`BitMatrix::row_reduce`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowReduction {
    /// Reduced row echelon form; zero rows are kept at the bottom.
    pub rref: BitMatrix,
    pub rank: usize,
    /// 1-indexed pivot columns, strictly increasing.
    pub pivots: Vec<usize>,
}

impl BitMatrix {
    /// A matrix with no rows; as a parity-check matrix it imposes no constraints.
    pub fn empty(cols: usize) -> Self {
        BitMatrix { cols, rows: Vec::new() }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix { cols, rows: vec![BitWord::zeros(cols); rows] }
    }

    pub fn identity(n: usize) -> Self {
        BitMatrix { cols: n, rows: (1..=n).map(|i| BitWord::unit(n, i)).collect() }
    }

    pub fn from_rows(cols: usize, rows: Vec<BitWord>) -> Result<Self> {
        for r in &rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, got: r.len() });
            }
        }
        Ok(BitMatrix { cols, rows })
    }

    /// Parses rows like `["111000", "000111"]`. All rows must share one length.
    pub fn from_strs(rows: &[&str]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows = rows.iter().map(|r| r.parse()).collect::<Result<Vec<BitWord>>>()?;
        Self::from_rows(cols, rows)
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &BitWord {
        &self.rows[r]
    }

    pub fn row_iter(&self) -> impl ExactSizeIterator<Item = &BitWord> {
        self.rows.iter()
    }

    pub fn push_row(&mut self, row: BitWord) -> Result<()> {
        if row.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, got: row.len() });
        }
        self.rows.push(row);
        Ok(())
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if other.cols != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, got: other.cols });
        }
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(BitMatrix { cols: self.cols, rows })
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r - 1].get(c)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.cols, self.rows.len());
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.support() {
                out.rows[c - 1].set_raw(r, true);
            }
        }
        out
    }

    /// `M·x` over GF(2).
    pub fn mat_vec(&self, x: &BitWord) -> Result<BitWord> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, got: x.len() });
        }
        let mut out = BitWord::zeros(self.rows.len());
        for (r, row) in self.rows.iter().enumerate() {
            if row.dot(x) {
                out.set_raw(r, true);
            }
        }
        Ok(out)
    }

    /// `x·M`: the GF(2) combination of rows selected by `x`.
    pub fn vec_mat(&self, x: &BitWord) -> Result<BitWord> {
        if x.len() != self.rows.len() {
            return Err(Error::DimensionMismatch { expected: self.rows.len(), got: x.len() });
        }
        let mut out = BitWord::zeros(self.cols);
        for r in x.support() {
            out.xor_assign(&self.rows[r - 1]);
        }
        Ok(out)
    }

    /// `self · otherᵀ`, the matrix of pairwise row inner products.
    pub fn mul_transpose(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if other.cols != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, got: other.cols });
        }
        let rows = self
            .rows
            .iter()
            .map(|a| BitWord::from_bools(&other.rows.iter().map(|b| a.dot(b)).collect::<Vec<_>>()))
            .collect();
        Ok(BitMatrix { cols: other.rows.len(), rows })
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(BitWord::is_zero)
    }

    /// Gauss-Jordan elimination. Row space is preserved.
    pub fn row_reduce(&self) -> RowReduction {
        let mut rows = self.rows.clone();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..self.cols {
            if rank == rows.len() {
                break;
            }
            let Some(found) = (rank..rows.len()).find(|&r| rows[r].get_raw(col)) else {
                continue;
            };
            rows.swap(rank, found);
            let pivot_row = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row.get_raw(col) {
                    row.xor_assign(&pivot_row);
                }
            }
            pivots.push(col + 1);
            rank += 1;
        }
        RowReduction { rref: BitMatrix { cols: self.cols, rows }, rank, pivots }
    }

    pub fn rank(&self) -> usize {
        self.row_reduce().rank
    }

    /// A basis of `{x : M·x = 0}` as the rows of a `(cols - rank) x cols` matrix.
    ///
    /// One basis vector per free column, in increasing column order.
    pub fn kernel_basis(&self) -> BitMatrix {
        let red = self.row_reduce();
        let mut is_pivot = vec![false; self.cols + 1];
        for &p in &red.pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::with_capacity(self.cols - red.rank);
        for free in (1..=self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = BitWord::unit(self.cols, free);
            for (r, &p) in red.pivots.iter().enumerate() {
                if red.rref.rows[r].get(free) {
                    v.set(p, true);
                }
            }
            basis.push(v);
        }
        BitMatrix { cols: self.cols, rows: basis }
    }

    /// The nonzero rows of the reduced form: a full-rank matrix with the same row space.
    pub fn row_basis(&self) -> BitMatrix {
        let red = self.row_reduce();
        BitMatrix { cols: self.cols, rows: red.rref.rows.into_iter().take(red.rank).collect() }
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitMatrix {}x{} [", self.rows.len(), self.cols)?;
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{row}")?;
        }
        f.write_str("]")
    }
}
