//! Packed batch files (`FSB1`).
//!
//! Layout, little endian:
//!
//! ```text
//! "FSB1" | shots u64 | detectors u32 | observables u32 | aux u32 | seed u64
//! block*  (one per 4096 shots; the last may be short)
//!   detector rows, observable rows, aux rows; each row ceil(len/64) u64 words
//! ```
//!
//! Blocks are written as they are produced, so a writer never holds a whole
//! batch in memory.

use std::io::{self, Read, Write};

use fermistab_core::bits::{words_for, BitMatrix};
use fermistab_core::frame::{FrameSampler, BLOCK_SHOTS};
use fermistab_core::SampleBatch;

pub const MAGIC: &[u8; 4] = b"FSB1";
const HEADER_LEN: usize = 4 + 8 + 4 + 4 + 4 + 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BatchHeader {
    pub shots: u64,
    pub detectors: u32,
    pub observables: u32,
    pub aux: u32,
    pub seed: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum BatchError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("not a batch file (bad magic)")]
    BadMagic,
    #[error("block shape mismatch: {0}")]
    Shape(String),
    #[error("batch is truncated: {written} of {expected} shots present")]
    Truncated { written: u64, expected: u64 },
}

impl BatchHeader {
    fn encode(&self) -> [u8; HEADER_LEN] {
        let mut b = [0u8; HEADER_LEN];
        b[..4].copy_from_slice(MAGIC);
        b[4..12].copy_from_slice(&self.shots.to_le_bytes());
        b[12..16].copy_from_slice(&self.detectors.to_le_bytes());
        b[16..20].copy_from_slice(&self.observables.to_le_bytes());
        b[20..24].copy_from_slice(&self.aux.to_le_bytes());
        b[24..32].copy_from_slice(&self.seed.to_le_bytes());
        b
    }

    fn decode(b: &[u8; HEADER_LEN]) -> Result<Self, BatchError> {
        if &b[..4] != MAGIC {
            return Err(BatchError::BadMagic);
        }
        let u32_at = |i: usize| u32::from_le_bytes(b[i..i + 4].try_into().unwrap());
        let u64_at = |i: usize| u64::from_le_bytes(b[i..i + 8].try_into().unwrap());
        Ok(BatchHeader { shots: u64_at(4), detectors: u32_at(12), observables: u32_at(16), aux: u32_at(20), seed: u64_at(24) })
    }
}

pub struct BatchWriter<W: Write> {
    out: W,
    header: BatchHeader,
    written: u64,
}

impl<W: Write> BatchWriter<W> {
    pub fn new(mut out: W, header: BatchHeader) -> io::Result<Self> {
        out.write_all(&header.encode())?;
        Ok(BatchWriter { out, header, written: 0 })
    }

    /// Appends the next block. All blocks but the last hold exactly
    /// [`BLOCK_SHOTS`] shots.
    pub fn write_block(&mut self, det: &BitMatrix, obs: &BitMatrix, aux: Option<&BitMatrix>) -> Result<(), BatchError> {
        let h = self.header;
        let shots = det.cols() as u64;
        let expected = (h.shots - self.written).min(BLOCK_SHOTS as u64);
        let aux_rows = aux.map_or(0, |a| a.rows());
        if shots != expected
            || det.rows() != h.detectors as usize
            || obs.rows() != h.observables as usize
            || aux_rows != h.aux as usize
            || obs.cols() as u64 != shots
            || aux.is_some_and(|a| a.cols() as u64 != shots)
        {
            return Err(BatchError::Shape(format!(
                "got {}x{} / {}x{} / {} aux rows, expected {} shots",
                det.rows(),
                det.cols(),
                obs.rows(),
                obs.cols(),
                aux_rows,
                expected
            )));
        }
        let mut buf = Vec::with_capacity(8 * (det.words().len() + obs.words().len()));
        for m in [Some(det), Some(obs), aux].into_iter().flatten() {
            for w in m.words() {
                buf.extend_from_slice(&w.to_le_bytes());
            }
        }
        self.out.write_all(&buf)?;
        self.written += shots;
        Ok(())
    }

    pub fn finish(mut self) -> Result<W, BatchError> {
        if self.written != self.header.shots {
            return Err(BatchError::Truncated { written: self.written, expected: self.header.shots });
        }
        self.out.flush()?;
        Ok(self.out)
    }
}

fn read_matrix<R: Read>(r: &mut R, rows: usize, cols: usize) -> Result<BitMatrix, BatchError> {
    let words = rows * words_for(cols);
    let mut bytes = vec![0u8; 8 * words];
    r.read_exact(&mut bytes)?;
    let data = bytes.chunks_exact(8).map(|c| u64::from_le_bytes(c.try_into().unwrap())).collect();
    BitMatrix::from_words(rows, cols, data).ok_or_else(|| BatchError::Shape("row words".into()))
}

/// Reads a whole batch file.
pub fn read_batch<R: Read>(mut r: R) -> Result<(BatchHeader, SampleBatch), BatchError> {
    let mut hb = [0u8; HEADER_LEN];
    r.read_exact(&mut hb).map_err(|e| if e.kind() == io::ErrorKind::UnexpectedEof { BatchError::BadMagic } else { e.into() })?;
    let h = BatchHeader::decode(&hb)?;
    let shots = h.shots as usize;
    let (nd, no, na) = (h.detectors as usize, h.observables as usize, h.aux as usize);
    let mut det = BitMatrix::zeros(nd, shots);
    let mut obs = BitMatrix::zeros(no, shots);
    let mut aux = BitMatrix::zeros(na, shots);
    for b in 0..FrameSampler::num_blocks(shots) {
        let len = FrameSampler::block_len(shots, b);
        let offset = b * BLOCK_SHOTS;
        let eof = |e: BatchError| match e {
            BatchError::Io(io) if io.kind() == io::ErrorKind::UnexpectedEof => {
                BatchError::Truncated { written: offset as u64, expected: h.shots }
            }
            e => e,
        };
        det.paste_columns(&read_matrix(&mut r, nd, len).map_err(eof)?, offset);
        obs.paste_columns(&read_matrix(&mut r, no, len).map_err(eof)?, offset);
        aux.paste_columns(&read_matrix(&mut r, na, len).map_err(eof)?, offset);
    }
    let batch = SampleBatch::new(det, obs, (na > 0).then_some(aux)).expect("consistent shapes");
    Ok((h, batch))
}

/// Writes an in-memory batch in block order.
pub fn write_batch<W: Write>(out: W, batch: &SampleBatch, seed: u64) -> Result<W, BatchError> {
    let header = BatchHeader {
        shots: batch.shots as u64,
        detectors: batch.num_detectors() as u32,
        observables: batch.num_observables() as u32,
        aux: batch.aux.as_ref().map_or(0, |a| a.rows()) as u32,
        seed,
    };
    let mut w = BatchWriter::new(out, header)?;
    for b in 0..FrameSampler::num_blocks(batch.shots) {
        let mask = block_mask(batch.shots, b);
        let aux = batch.aux.as_ref().map(|a| a.select_columns(&mask));
        w.write_block(&batch.detectors.select_columns(&mask), &batch.observables.select_columns(&mask), aux.as_ref())?;
    }
    w.finish()
}

fn block_mask(shots: usize, block: usize) -> Vec<u64> {
    let mut m = vec![0u64; words_for(shots)];
    let start = block * BLOCK_SHOTS;
    for c in start..start + FrameSampler::block_len(shots, block) {
        m[c / 64] |= 1 << (c % 64);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_matrix(rows: usize, cols: usize, salt: u64) -> BitMatrix {
        let mut m = BitMatrix::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                let h = (r as u64 * 7919 + c as u64 * 104_729 + salt).wrapping_mul(0x9E37_79B9_7F4A_7C15);
                m.set(r, c, h >> 63 == 1);
            }
        }
        m
    }

    #[test]
    fn round_trip_across_blocks() {
        let shots = 2 * BLOCK_SHOTS + 77;
        let b = SampleBatch::new(random_matrix(3, shots, 1), random_matrix(2, shots, 2), Some(random_matrix(1, shots, 3)))
            .unwrap();
        let bytes = write_batch(Vec::new(), &b, 42).unwrap();
        let (h, back) = read_batch(bytes.as_slice()).unwrap();
        assert_eq!(h, BatchHeader { shots: shots as u64, detectors: 3, observables: 2, aux: 1, seed: 42 });
        assert_eq!(back, b);
    }

    #[test]
    fn truncation_and_magic() {
        let b = SampleBatch::new(random_matrix(1, 100, 0), random_matrix(1, 100, 1), None).unwrap();
        let bytes = write_batch(Vec::new(), &b, 0).unwrap();
        assert!(matches!(read_batch(&bytes[..bytes.len() - 8]), Err(BatchError::Truncated { .. })));
        assert!(matches!(read_batch(&b"FSB2xxxxxxxxxxxxxxxxxxxxxxxxxxxx"[..]), Err(BatchError::BadMagic)));
        let h = BatchHeader { shots: 10, detectors: 0, observables: 0, aux: 0, seed: 0 };
        let w = BatchWriter::new(Vec::new(), h).unwrap();
        assert!(matches!(w.finish(), Err(BatchError::Truncated { written: 0, expected: 10 })));
    }
}
