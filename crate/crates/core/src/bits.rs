//! Word-packed bit storage shared by the Pauli and sampling code.

use alloc::vec;
use alloc::vec::Vec;

pub const WORD_BITS: usize = 64;

#[inline]
pub fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

#[inline]
pub fn get_bit(words: &[u64], i: usize) -> bool {
    (words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
}

#[inline]
pub fn set_bit(words: &mut [u64], i: usize, value: bool) {
    let mask = 1u64 << (i % WORD_BITS);
    if value {
        words[i / WORD_BITS] |= mask;
    } else {
        words[i / WORD_BITS] &= !mask;
    }
}

#[inline]
pub fn flip_bit(words: &mut [u64], i: usize) {
    words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
}

/// Mask selecting the valid bits of the last word of a `bits`-long vector.
#[inline]
pub fn tail_mask(bits: usize) -> u64 {
    match bits % WORD_BITS {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

pub fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

pub fn popcount(words: &[u64]) -> usize {
    words.iter().map(|w| w.count_ones() as usize).sum()
}

/// Dense row-major bit matrix. Rows are padded to whole words.
///
/// Sample batches use one row per detector (or observable) and one column
/// per shot, so whole-row operations act on 64 shots at a time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        BitMatrix { rows, cols, stride, data: vec![0; rows * stride] }
    }

    /// Builds a matrix from raw row words. Bits past `cols` are cleared.
    pub fn from_words(rows: usize, cols: usize, mut data: Vec<u64>) -> Option<Self> {
        let stride = words_for(cols);
        if data.len() != rows * stride {
            return None;
        }
        if stride > 0 {
            let mask = tail_mask(cols);
            for r in 0..rows {
                data[r * stride + stride - 1] &= mask;
            }
        }
        Some(BitMatrix { rows, cols, stride, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn words(&self) -> &[u64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        get_bit(self.row(r), c)
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        let s = self.stride;
        set_bit(&mut self.data[r * s..(r + 1) * s], c, v)
    }

    /// Column-wise OR over the selected rows.
    pub fn any_of_rows<I: IntoIterator<Item = usize>>(&self, rows: I) -> Vec<u64> {
        let mut acc = vec![0u64; self.stride];
        for r in rows {
            for (a, w) in acc.iter_mut().zip(self.row(r)) {
                *a |= w;
            }
        }
        acc
    }

    /// Keeps the columns whose bit in `mask` is set, preserving order.
    pub fn select_columns(&self, mask: &[u64]) -> BitMatrix {
        let kept: Vec<usize> = (0..self.cols).filter(|&c| get_bit(mask, c)).collect();
        let mut out = BitMatrix::zeros(self.rows, kept.len());
        for r in 0..self.rows {
            let src = self.row(r);
            let dst = out.row_mut(r);
            for (j, &c) in kept.iter().enumerate() {
                if get_bit(src, c) {
                    set_bit(dst, j, true);
                }
            }
        }
        out
    }

    pub fn select_rows(&self, rows: &[usize]) -> BitMatrix {
        let mut out = BitMatrix::zeros(rows.len(), self.cols);
        for (i, &r) in rows.iter().enumerate() {
            out.row_mut(i).copy_from_slice(self.row(r));
        }
        out
    }

    /// Copies `block` into this matrix starting at column `col_offset`,
    /// which must be word aligned.
    pub fn paste_columns(&mut self, block: &BitMatrix, col_offset: usize) {
        debug_assert_eq!(col_offset % WORD_BITS, 0);
        debug_assert_eq!(block.rows, self.rows);
        let w0 = col_offset / WORD_BITS;
        for r in 0..self.rows {
            let src = block.row(r);
            let s = self.stride;
            let dst = &mut self.data[r * s + w0..r * s + w0 + src.len()];
            dst.copy_from_slice(src);
        }
    }
}
