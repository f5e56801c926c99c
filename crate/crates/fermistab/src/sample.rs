//! Parallel block sampling.
//!
//! Blocks are independent (each has its own RNG stream), so results do not
//! depend on the thread count.

use std::io::Write;

use rayon::prelude::*;

use fermistab_core::bits::BitMatrix;
use fermistab_core::frame::FrameSampler;
use fermistab_core::{CliffordCircuit, SampleBatch};

use crate::batch::{BatchError, BatchHeader, BatchWriter};

pub const THREADS_ENV: &str = "FERMISTAB_THREADS";

/// Sizes the global rayon pool from `FERMISTAB_THREADS` when it is set.
/// Calling it again, or after the pool exists, does nothing.
pub fn init_threads() {
    let n = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok());
    if let Some(n) = n.filter(|&n| n > 0) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn sample_range(s: &FrameSampler, shots: usize, seed: u64, blocks: std::ops::Range<usize>) -> Vec<(BitMatrix, BitMatrix)> {
    blocks
        .into_par_iter()
        .map(|b| s.sample_block(seed, b as u64, FrameSampler::block_len(shots, b)))
        .collect()
}

/// Samples a whole batch in memory; `aux_rows` are observable rows moved to
/// the aux matrix.
pub fn sample(c: &CliffordCircuit, shots: usize, seed: u64, aux_rows: &[usize]) -> SampleBatch {
    let s = FrameSampler::new(c);
    let blocks = sample_range(&s, shots, seed, 0..FrameSampler::num_blocks(shots));
    s.assemble(shots, &blocks).split_aux(aux_rows)
}

/// Samples straight into a batch file, a few blocks per thread at a time.
pub fn sample_to<W: Write>(
    c: &CliffordCircuit,
    shots: usize,
    seed: u64,
    aux_rows: &[usize],
    out: W,
) -> Result<W, BatchError> {
    let s = FrameSampler::new(c);
    let kept: Vec<usize> = (0..s.num_observables()).filter(|r| !aux_rows.contains(r)).collect();
    let header = BatchHeader {
        shots: shots as u64,
        detectors: s.num_detectors() as u32,
        observables: kept.len() as u32,
        aux: aux_rows.len() as u32,
        seed,
    };
    let mut w = BatchWriter::new(out, header)?;
    let total = FrameSampler::num_blocks(shots);
    let chunk = 4 * rayon::current_num_threads();
    let mut start = 0;
    while start < total {
        let end = (start + chunk).min(total);
        for (det, obs) in sample_range(&s, shots, seed, start..end) {
            let aux = (!aux_rows.is_empty()).then(|| obs.select_rows(aux_rows));
            w.write_block(&det, &obs.select_rows(&kept), aux.as_ref())?;
        }
        start = end;
    }
    w.finish()
}
