//! Bit-packed linear algebra over GF(2).
//!
//! Vectors and matrix rows are stored as `u64` words; bit `i` (0-based)
//! lives in word `i / 64` at position `i % 64`. The textual form writes
//! bit 0 first, so the leftmost character of `"0110"` is index 0. All
//! row operations are whole-word XORs.
//!
//! Elimination is plain forward Gaussian elimination, scanning columns
//! left to right and taking the first available row with a 1. This fixes
//! the pivot set deterministically; for a symmetric matrix it yields the
//! lexicographically first maximal independent set of columns.

use std::fmt;
use std::str::FromStr;

use crate::error::{HlfError, Result};

const WORD_BITS: usize = 64;

#[inline]
fn word_count(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

#[inline]
fn tail_mask(len: usize) -> u64 {
    match len % WORD_BITS {
        0 => u64::MAX,
        rem => (1u64 << rem) - 1,
    }
}

/// A packed bit string of fixed length.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; word_count(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self {
            len,
            words: vec![u64::MAX; word_count(len)],
        };
        v.clear_tail();
        v
    }

    /// Vector with only bit `index` set.
    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(index, true);
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Builds a vector from packed words; bits past `len` are discarded.
    pub fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        words.resize(word_count(len), 0);
        let mut v = Self { len, words };
        v.clear_tail();
        v
    }

    /// Low `len` bits of `value`, bit 0 of `value` at index 0.
    pub fn from_u64(len: usize, value: u64) -> Self {
        assert!(len <= WORD_BITS, "from_u64 needs len <= 64");
        Self::from_words(len, vec![value])
    }

    fn clear_tail(&mut self) {
        if let Some(last) = self.words.last_mut() {
            *last &= tail_mask(self.len);
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// First word as an integer; only meaningful for `len <= 64`.
    pub fn as_u64(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(
            i < self.len,
            "bit index {i} out of range (len={})",
            self.len
        );
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(
            i < self.len,
            "bit index {i} out of range (len={})",
            self.len
        );
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(
            i < self.len,
            "bit index {i} out of range (len={})",
            self.len
        );
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// `self ^= other`. Panics if the lengths differ.
    #[inline]
    pub fn xor_assign(&mut self, other: &Self) {
        assert_eq!(self.len, other.len, "xor of vectors with different lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// XOR restricted to the word range `[from, to)`.
    #[inline]
    fn xor_words(&mut self, other: &Self, from: usize, to: usize) {
        for (a, b) in self.words[from..to].iter_mut().zip(&other.words[from..to]) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn and(&self, other: &Self) -> Self {
        assert_eq!(self.len, other.len, "and of vectors with different lengths");
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a & b)
            .collect();
        Self {
            len: self.len,
            words,
        }
    }

    /// Number of positions where both vectors are 1.
    #[inline]
    pub fn and_count(&self, other: &Self) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// Inner product over GF(2).
    #[inline]
    pub fn dot(&self, other: &Self) -> bool {
        let acc = self
            .words
            .iter()
            .zip(&other.words)
            .fold(0u64, |acc, (a, b)| acc ^ (a & b));
        acc.count_ones() & 1 == 1
    }

    /// Indices of set bits in increasing order.
    pub fn ones_iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let tz = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD_BITS + tz)
            })
        })
    }

    fn last_nonzero_word(&self) -> Option<usize> {
        self.words.iter().rposition(|&w| w != 0)
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len)
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl FromStr for BitVector {
    type Err = HlfError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut v = Self::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                other => {
                    return Err(HlfError::Parse(format!(
                        "invalid bit character {other:?} at position {}",
                        i + 1
                    )))
                }
            }
        }
        Ok(v)
    }
}

impl serde::Serialize for BitVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for BitVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A square matrix over GF(2), stored by rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    n: usize,
    rows: Vec<BitVector>,
}

impl BitMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            rows: vec![BitVector::zeros(n); n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            rows: (0..n).map(|i| BitVector::unit(n, i)).collect(),
        }
    }

    /// Wraps `rows` after checking the result is square.
    pub fn from_rows(rows: Vec<BitVector>) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(HlfError::DimensionMismatch {
                expected: n,
                found: bad.len(),
            });
        }
        Ok(Self { n, rows })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &BitVector {
        &self.rows[i]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].get(j)
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.rows[i].set(j, value)
    }

    pub fn column(&self, j: usize) -> BitVector {
        let mut c = BitVector::zeros(self.n);
        for (i, row) in self.rows.iter().enumerate() {
            if row.get(j) {
                c.set(i, true);
            }
        }
        c
    }

    pub fn diagonal(&self) -> BitVector {
        let mut d = BitVector::zeros(self.n);
        for i in 0..self.n {
            d.set(i, self.get(i, i));
        }
        d
    }

    /// First asymmetric position `(i, j)` with `i < j`, if any.
    pub fn first_asymmetry(&self) -> Option<(usize, usize)> {
        (0..self.n)
            .flat_map(|i| (i + 1..self.n).map(move |j| (i, j)))
            .find(|&(i, j)| self.get(i, j) != self.get(j, i))
    }

    pub fn is_symmetric(&self) -> bool {
        self.first_asymmetry().is_none()
    }

    /// Parses `n` lines of `n` characters each.
    pub fn parse_text(text: &str) -> Result<Self> {
        let rows = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(BitVector::from_str)
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(rows)
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
        write!(f, "BitMatrix {{ n: {}, rows: [", self.n)?;
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{row}")?;
        }
        f.write_str("] }")
    }
}

/// Output of [`rank_and_pivots`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EliminationResult {
    pub rank: usize,
    /// Pivot columns, strictly increasing, 0-based.
    pub pivots: Vec<usize>,
    /// Reduced row-echelon form; rows `rank..` are zero.
    pub rref: BitMatrix,
    /// `transform · M == rref`, when requested.
    pub transform: Option<BitMatrix>,
}

/// In-place Gaussian elimination on `rows` (each `ncols` bits wide).
///
/// Returns the pivot columns; afterwards `rows[k]` is the pivot row for
/// `pivots[k]`. With `reduce` the result is in reduced echelon form.
/// `companion`, when given, receives the same row operations.
fn eliminate(
    rows: &mut [BitVector],
    ncols: usize,
    reduce: bool,
    mut companion: Option<&mut [BitVector]>,
) -> Vec<usize> {
    let m = rows.len();
    let mut pivots = Vec::new();
    // word span [lo, hi) of each pivot row, used to bound the XORs
    let mut spans = Vec::new();
    let mut rank = 0;
    for col in 0..ncols {
        if rank == m {
            break;
        }
        let Some(found) = (rank..m).find(|&i| rows[i].get(col)) else {
            continue;
        };
        rows.swap(rank, found);
        if let Some(c) = companion.as_deref_mut() {
            c.swap(rank, found);
        }
        let lo = col / WORD_BITS;
        let hi = rows[rank].last_nonzero_word().map_or(lo, |w| w + 1);
        let (head, tail) = rows.split_at_mut(rank + 1);
        let pivot_row = &head[rank];
        for (off, row) in tail.iter_mut().enumerate() {
            if row.get(col) {
                row.xor_words(pivot_row, lo, hi);
                if let Some(c) = companion.as_deref_mut() {
                    let (ch, ct) = c.split_at_mut(rank + 1);
                    ct[off].xor_assign(&ch[rank]);
                }
            }
        }
        pivots.push(col);
        spans.push((lo, hi));
        rank += 1;
    }
    if reduce {
        for k in (0..rank).rev() {
            let col = pivots[k];
            let (lo, _) = spans[k];
            let hi = rows[k].last_nonzero_word().map_or(lo, |w| w + 1);
            let (head, tail) = rows.split_at_mut(k);
            let pivot_row = &tail[0];
            for (i, row) in head.iter_mut().enumerate() {
                if row.get(col) {
                    row.xor_words(pivot_row, lo, hi);
                    if let Some(c) = companion.as_deref_mut() {
                        let (chead, ctail) = c.split_at_mut(k);
                        chead[i].xor_assign(&ctail[0]);
                    }
                }
            }
        }
    }
    pivots
}

/// Rank, pivot columns and reduced echelon form of `m`.
pub fn rank_and_pivots(m: &BitMatrix) -> EliminationResult {
    let mut rows = m.rows.clone();
    let pivots = eliminate(&mut rows, m.n, true, None);
    EliminationResult {
        rank: pivots.len(),
        pivots,
        rref: BitMatrix { n: m.n, rows },
        transform: None,
    }
}

/// Like [`rank_and_pivots`] but also records the row operations.
pub fn rank_and_pivots_with_transform(m: &BitMatrix) -> EliminationResult {
    let mut rows = m.rows.clone();
    let mut record = BitMatrix::identity(m.n).rows;
    let pivots = eliminate(&mut rows, m.n, true, Some(&mut record));
    EliminationResult {
        rank: pivots.len(),
        pivots,
        rref: BitMatrix { n: m.n, rows },
        transform: Some(BitMatrix {
            n: m.n,
            rows: record,
        }),
    }
}

/// Rank of an arbitrary list of equal-length rows.
pub fn rank_of_rows(rows: &[BitVector]) -> usize {
    let Some(first) = rows.first() else { return 0 };
    let ncols = first.len();
    let mut work = rows.to_vec();
    eliminate(&mut work, ncols, false, None).len()
}

/// Canonical null-space basis: one vector per non-pivot column, with that
/// coordinate set and the pivot coordinates back-substituted.
pub fn kernel_basis(m: &BitMatrix) -> Vec<BitVector> {
    kernel_from_rref(&rank_and_pivots(m))
}

pub(crate) fn kernel_from_rref(elim: &EliminationResult) -> Vec<BitVector> {
    let n = elim.rref.n;
    let mut is_pivot = vec![false; n];
    for &p in &elim.pivots {
        is_pivot[p] = true;
    }
    (0..n)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = BitVector::unit(n, f);
            for (k, &p) in elim.pivots.iter().enumerate() {
                if elim.rref.rows[k].get(f) {
                    v.set(p, true);
                }
            }
            v
        })
        .collect()
}

/// Solves `rows[j] · z = rhs[j]` for all `j`, free variables set to 0.
///
/// `Ok(None)` means the system is inconsistent.
pub fn solve_affine(rows: &[BitVector], rhs: &BitVector, n: usize) -> Result<Option<BitVector>> {
    if rhs.len() != rows.len() {
        return Err(HlfError::DimensionMismatch {
            expected: rows.len(),
            found: rhs.len(),
        });
    }
    if let Some(bad) = rows.iter().find(|r| r.len() != n) {
        return Err(HlfError::DimensionMismatch {
            expected: n,
            found: bad.len(),
        });
    }
    let mut augmented: Vec<BitVector> = rows
        .iter()
        .enumerate()
        .map(|(j, r)| {
            let mut a = BitVector::zeros(n + 1);
            for i in r.ones_iter() {
                a.set(i, true);
            }
            a.set(n, rhs.get(j));
            a
        })
        .collect();
    let pivots = eliminate(&mut augmented, n + 1, true, None);
    if pivots.last() == Some(&n) {
        return Ok(None);
    }
    let mut z = BitVector::zeros(n);
    for (k, &p) in pivots.iter().enumerate() {
        z.set(p, augmented[k].get(n));
    }
    Ok(Some(z))
}

/// `M · v` over GF(2).
pub fn mat_vec(m: &BitMatrix, v: &BitVector) -> Result<BitVector> {
    if v.len() != m.n {
        return Err(HlfError::DimensionMismatch {
            expected: m.n,
            found: v.len(),
        });
    }
    let mut out = BitVector::zeros(m.n);
    for (i, row) in m.rows.iter().enumerate() {
        if row.dot(v) {
            out.set(i, true);
        }
    }
    Ok(out)
}

/// `xᵀ M x mod 4` with the 0/1 entries lifted to integers.
///
/// Computed as `Σ_{i ∈ x} |row_i ∧ x|`, which counts each diagonal term
/// once and each off-diagonal pair twice.
pub fn quad_form_mod4(m: &BitMatrix, x: &BitVector) -> Result<u8> {
    if x.len() != m.n {
        return Err(HlfError::DimensionMismatch {
            expected: m.n,
            found: x.len(),
        });
    }
    let total: usize = x.ones_iter().map(|i| m.rows[i].and_count(x)).sum();
    Ok((total % 4) as u8)
}

/// XOR of the selected rows (0-based indices).
pub fn xor_rows(m: &BitMatrix, selected: &[usize]) -> Result<BitVector> {
    let mut acc = BitVector::zeros(m.n);
    for &i in selected {
        if i >= m.n {
            return Err(HlfError::IndexOutOfRange { index: i, len: m.n });
        }
        acc.xor_assign(&m.rows[i]);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    fn mat(rows: &[&str]) -> BitMatrix {
        BitMatrix::from_rows(rows.iter().map(|r| bv(r)).collect()).unwrap()
    }

    fn grid2() -> BitMatrix {
        mat(&["0110", "1001", "1001", "0110"])
    }

    fn arb_matrix(max_n: usize) -> impl Strategy<Value = BitMatrix> {
        (1..=max_n).prop_flat_map(|n| {
            proptest::collection::vec(proptest::collection::vec(any::<bool>(), n), n).prop_map(
                |rows| {
                    BitMatrix::from_rows(rows.iter().map(|r| BitVector::from_bools(r)).collect())
                        .unwrap()
                },
            )
        })
    }

    fn arb_symmetric(max_n: usize) -> impl Strategy<Value = BitMatrix> {
        arb_matrix(max_n).prop_map(|mut m| {
            for i in 0..m.n() {
                for j in 0..i {
                    let v = m.get(j, i);
                    m.set(i, j, v);
                }
            }
            m
        })
    }

    #[test]
    fn text_form_is_leftmost_first() {
        let v = bv("1000");
        assert!(v.get(0));
        assert_eq!(v.count_ones(), 1);
        assert_eq!(v.to_string(), "1000");
        assert!("10x1".parse::<BitVector>().is_err());
    }

    #[test]
    fn tail_bits_are_cleared() {
        let v = BitVector::from_words(3, vec![u64::MAX]);
        assert_eq!(v.words(), &[0b111]);
        assert_eq!(BitVector::ones(70).words()[1], 0b111111);
    }

    #[test]
    fn rank_of_2x2_grid() {
        let e = rank_and_pivots(&grid2());
        assert_eq!(e.rank, 2);
        assert_eq!(e.pivots, vec![0, 1]);
    }

    #[test]
    fn rank_of_zero_matrix() {
        let e = rank_and_pivots(&BitMatrix::zeros(4));
        assert_eq!(e.rank, 0);
        assert!(e.pivots.is_empty());
    }

    #[test]
    fn transform_reproduces_rref() {
        let m = mat(&["0110", "1011", "1101", "0110"]);
        let e = rank_and_pivots_with_transform(&m);
        let t = e.transform.unwrap();
        for i in 0..4 {
            let mut acc = BitVector::zeros(4);
            for k in t.row(i).ones_iter() {
                acc.xor_assign(m.row(k));
            }
            assert_eq!(&acc, e.rref.row(i));
        }
    }

    #[test]
    fn kernel_of_2x2_grid() {
        // brute force over all 16 vectors
        let m = grid2();
        let brute: Vec<BitVector> = (0..16u64)
            .map(|x| BitVector::from_u64(4, x))
            .filter(|x| mat_vec(&m, x).unwrap().is_zero())
            .collect();
        assert_eq!(brute.len(), 4);
        let mut basis = kernel_basis(&m);
        basis.sort();
        assert_eq!(basis, vec![bv("0110"), bv("1001")]);
    }

    #[test]
    fn kernel_edge_cases() {
        assert!(kernel_basis(&BitMatrix::identity(5)).is_empty());
        assert_eq!(
            kernel_basis(&BitMatrix::zeros(3)),
            vec![bv("100"), bv("010"), bv("001")]
        );
    }

    #[test]
    fn solve_affine_examples() {
        let z = solve_affine(&[bv("1001"), bv("0110")], &bv("00"), 4)
            .unwrap()
            .unwrap();
        assert_eq!(z, bv("0000"));
        assert!(!bv("1001").dot(&z) && !bv("0110").dot(&z));

        let z = solve_affine(&[], &BitVector::zeros(0), 4).unwrap().unwrap();
        assert_eq!(z, bv("0000"));

        assert_eq!(
            solve_affine(&[bv("10"), bv("10")], &bv("01"), 2).unwrap(),
            None
        );
        assert!(solve_affine(&[bv("10")], &bv("01"), 2).is_err());
    }

    #[test]
    fn mat_vec_examples() {
        assert_eq!(mat_vec(&grid2(), &bv("1000")).unwrap(), bv("0110"));
        assert!(mat_vec(&grid2(), &BitVector::zeros(4)).unwrap().is_zero());
        let v = bv("10110");
        assert_eq!(mat_vec(&BitMatrix::identity(5), &v).unwrap(), v);
        assert!(mat_vec(&grid2(), &bv("100")).is_err());
    }

    #[test]
    fn quad_form_examples() {
        assert_eq!(quad_form_mod4(&grid2(), &bv("1001")).unwrap(), 0);
        assert_eq!(quad_form_mod4(&grid2(), &bv("0000")).unwrap(), 0);
        let mut m = grid2();
        for i in 0..4 {
            m.set(i, i, true);
        }
        assert_eq!(quad_form_mod4(&m, &bv("1000")).unwrap(), 1);
        // 1100: diagonal 2 + 2 * edge(1,2) = 4
        assert_eq!(quad_form_mod4(&m, &bv("1100")).unwrap(), 0);
        assert!(quad_form_mod4(&m, &bv("1")).is_err());
    }

    #[test]
    fn xor_rows_examples() {
        let m = grid2();
        assert!(xor_rows(&m, &[0, 3]).unwrap().is_zero());
        assert!(xor_rows(&m, &[]).unwrap().is_zero());
        assert_eq!(xor_rows(&m, &[1]).unwrap(), bv("1001"));
        assert!(xor_rows(&m, &[4]).is_err());
    }

    #[test]
    fn large_banded_elimination() {
        // tridiagonal-with-ones matrix of size 300 has full rank when the
        // diagonal is all ones and n % 3 != 2
        let n = 300;
        let mut m = BitMatrix::zeros(n);
        for i in 0..n {
            m.set(i, i, true);
            if i + 1 < n {
                m.set(i, i + 1, true);
                m.set(i + 1, i, true);
            }
        }
        assert_eq!(rank_and_pivots(&m).rank, n);
        assert_eq!(rank_of_rows(m.rows()), n);
    }

    fn quad_form_direct(m: &BitMatrix, x: &BitVector) -> u8 {
        let n = m.n();
        let mut total = 0usize;
        for i in 0..n {
            for j in 0..n {
                if m.get(i, j) && x.get(i) && x.get(j) {
                    total += 1;
                }
            }
        }
        (total % 4) as u8
    }

    proptest! {
        #[test]
        fn pivots_select_a_column_basis(m in arb_matrix(64)) {
            let e = rank_and_pivots(&m);
            prop_assert_eq!(e.pivots.len(), e.rank);
            let cols: Vec<BitVector> = (0..m.n()).map(|j| m.column(j)).collect();
            let pivot_cols: Vec<BitVector> = e.pivots.iter().map(|&p| cols[p].clone()).collect();
            prop_assert_eq!(rank_of_rows(&pivot_cols), e.rank);
            for c in &cols {
                let mut extended = pivot_cols.clone();
                extended.push(c.clone());
                prop_assert_eq!(rank_of_rows(&extended), e.rank);
            }
            for (k, &p) in e.pivots.iter().enumerate() {
                for (kk, _) in e.pivots.iter().enumerate() {
                    prop_assert_eq!(e.rref.get(kk, p), k == kk);
                }
            }
        }

        #[test]
        fn kernel_basis_is_a_basis(m in arb_matrix(64)) {
            let e = rank_and_pivots(&m);
            let basis = kernel_basis(&m);
            prop_assert_eq!(basis.len(), m.n() - e.rank);
            for v in &basis {
                prop_assert!(mat_vec(&m, v).unwrap().is_zero());
            }
            prop_assert_eq!(rank_of_rows(&basis), basis.len());
        }

        #[test]
        fn solve_affine_is_sound(
            rows in (1usize..24, 1usize..24).prop_flat_map(|(m, n)| {
                proptest::collection::vec(proptest::collection::vec(any::<bool>(), n), m)
            }),
            seed in any::<u64>(),
        ) {
            let n = rows[0].len();
            let rows: Vec<BitVector> = rows.iter().map(|r| BitVector::from_bools(r)).collect();
            let rhs = BitVector::from_u64(rows.len(), seed);
            match solve_affine(&rows, &rhs, n).unwrap() {
                Some(z) => {
                    for (j, r) in rows.iter().enumerate() {
                        prop_assert_eq!(r.dot(&z), rhs.get(j));
                    }
                }
                None => {
                    // augmented system must contain a 0…0|1 row after elimination
                    let mut aug: Vec<BitVector> = rows.iter().enumerate().map(|(j, r)| {
                        let mut a = BitVector::zeros(n + 1);
                        for i in r.ones_iter() { a.set(i, true); }
                        a.set(n, rhs.get(j));
                        a
                    }).collect();
                    let pivots = eliminate(&mut aug, n + 1, false, None);
                    prop_assert_eq!(pivots.last(), Some(&n));
                    let k = pivots.len() - 1;
                    prop_assert_eq!(aug[k].count_ones(), 1);
                }
            }
        }

        #[test]
        fn quad_form_matches_definition(m in arb_symmetric(40), seed in any::<u64>()) {
            let x = BitVector::from_u64(m.n(), seed);
            let q = quad_form_mod4(&m, &x).unwrap();
            prop_assert_eq!(q, quad_form_direct(&m, &x));
            // diagonal parity identity
            let diag_parity = (m.diagonal().and_count(&x) % 2) as u8;
            prop_assert_eq!(q % 2, diag_parity);
        }

        #[test]
        fn xor_rows_zero_iff_even_column_counts(m in arb_matrix(40), seed in any::<u64>()) {
            let selected: Vec<usize> = (0..m.n()).filter(|i| (seed >> (i % 64)) & 1 == 1).collect();
            let x = xor_rows(&m, &selected).unwrap();
            let even = (0..m.n()).all(|l| selected.iter().filter(|&&v| m.get(v, l)).count() % 2 == 0);
            prop_assert_eq!(x.is_zero(), even);
        }

        #[test]
        fn text_round_trip(bits in proptest::collection::vec(any::<bool>(), 1..200)) {
            let v = BitVector::from_bools(&bits);
            prop_assert_eq!(v.to_string().parse::<BitVector>().unwrap(), v);
        }
    }
}
