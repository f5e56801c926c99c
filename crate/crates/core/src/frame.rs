//! Bit-parallel Pauli-frame sampling.
//!
//! Each qubit holds an X plane and a Z plane with one bit per shot. Noise
//! channels flip bits in these planes, gates permute them, and a measurement
//! reports the X bit as a deviation from the noiseless reference record. Z
//! components are randomized after resets and measurements, which makes
//! non-deterministic measurement results come out uniformly random.
//!
//! Shots are processed in blocks of [`BLOCK_SHOTS`]. Block `b` draws its
//! randomness from `ChaCha8Rng::seed_from_u64(seed)` on stream `b`, so a batch
//! only depends on `(circuit, shots, seed)` and never on how blocks are
//! distributed over threads.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::{tail_mask, words_for, BitMatrix, WORD_BITS};
use crate::circuit::{CliffordCircuit, Gate, Instruction, NoiseChannel};
use crate::error::{Error, Result};

pub const BLOCK_SHOTS: usize = 4096;

/// Sampled detector (syndrome) and observable bits.
///
/// Matrices are stored transposed: one row per detector or observable, one
/// column per shot. `aux` holds VQED auxiliary parities (a set bit is a −1
/// outcome) when the experiment has them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleBatch {
    pub shots: usize,
    pub detectors: BitMatrix,
    pub observables: BitMatrix,
    pub aux: Option<BitMatrix>,
}

impl SampleBatch {
    pub fn new(detectors: BitMatrix, observables: BitMatrix, aux: Option<BitMatrix>) -> Result<Self> {
        let shots = detectors.cols();
        if observables.cols() != shots {
            return Err(Error::LengthMismatch { expected: shots, found: observables.cols() });
        }
        if let Some(a) = &aux {
            if a.cols() != shots {
                return Err(Error::LengthMismatch { expected: shots, found: a.cols() });
            }
        }
        Ok(SampleBatch { shots, detectors, observables, aux })
    }

    pub fn num_detectors(&self) -> usize {
        self.detectors.rows()
    }

    pub fn num_observables(&self) -> usize {
        self.observables.rows()
    }

    /// Moves the listed observable rows into `aux`, keeping the others in
    /// their original order.
    pub fn split_aux(mut self, aux_rows: &[usize]) -> SampleBatch {
        if aux_rows.is_empty() {
            return self;
        }
        let keep: Vec<usize> = (0..self.observables.rows()).filter(|r| !aux_rows.contains(r)).collect();
        self.aux = Some(self.observables.select_rows(aux_rows));
        self.observables = self.observables.select_rows(&keep);
        self
    }

    /// Keeps only the listed detector rows.
    pub fn with_detectors(&self, rows: &[usize]) -> SampleBatch {
        SampleBatch {
            shots: self.shots,
            detectors: self.detectors.select_rows(rows),
            observables: self.observables.clone(),
            aux: self.aux.clone(),
        }
    }
}

#[derive(Clone, Debug)]
enum Op {
    Gate(Gate, Vec<usize>),
    Noise(NoiseChannel, Vec<usize>),
    Measure(f64, Vec<usize>),
    Reset(Vec<usize>),
}

/// A circuit compiled for frame sampling.
#[derive(Clone, Debug)]
pub struct FrameSampler {
    num_qubits: usize,
    num_records: usize,
    ops: Vec<Op>,
    detectors: Vec<Vec<usize>>,
    observables: Vec<Vec<usize>>,
}

struct Block<'a> {
    words: usize,
    shots: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    records: Vec<u64>,
    next_record: usize,
    rng: &'a mut ChaCha8Rng,
}

impl Block<'_> {
    fn plane(&self, q: usize) -> core::ops::Range<usize> {
        q * self.words..(q + 1) * self.words
    }

    fn randomize_z(&mut self, q: usize) {
        let r = self.plane(q);
        let mask = tail_mask(self.shots);
        let last = r.end - 1;
        for w in r {
            self.z[w] = self.rng.next_u64();
        }
        self.z[last] &= mask;
    }

    fn flip(&mut self, x: bool, z: bool, q: usize, shot: usize) {
        let w = q * self.words + shot / WORD_BITS;
        let bit = 1u64 << (shot % WORD_BITS);
        if x {
            self.x[w] ^= bit;
        }
        if z {
            self.z[w] ^= bit;
        }
    }

    fn gate(&mut self, gate: Gate, a: usize, b: usize) {
        let w = self.words;
        let (a0, b0) = (a * w, b * w);
        match gate {
            Gate::X | Gate::Y | Gate::Z => {}
            Gate::H | Gate::SqrtY | Gate::SqrtYDag => {
                for i in 0..w {
                    core::mem::swap(&mut self.x[a0 + i], &mut self.z[a0 + i]);
                }
            }
            Gate::S | Gate::SDag => {
                for i in 0..w {
                    self.z[a0 + i] ^= self.x[a0 + i];
                }
            }
            Gate::SqrtX | Gate::SqrtXDag => {
                for i in 0..w {
                    self.x[a0 + i] ^= self.z[a0 + i];
                }
            }
            Gate::CX => {
                for i in 0..w {
                    self.x[b0 + i] ^= self.x[a0 + i];
                    self.z[a0 + i] ^= self.z[b0 + i];
                }
            }
            Gate::CZ => {
                for i in 0..w {
                    self.z[a0 + i] ^= self.x[b0 + i];
                    self.z[b0 + i] ^= self.x[a0 + i];
                }
            }
            Gate::CY => {
                for i in 0..w {
                    self.z[b0 + i] ^= self.x[b0 + i];
                    self.x[b0 + i] ^= self.x[a0 + i];
                    self.z[a0 + i] ^= self.z[b0 + i];
                    self.z[b0 + i] ^= self.x[b0 + i];
                }
            }
            Gate::Swap => {
                for i in 0..w {
                    self.x.swap(a0 + i, b0 + i);
                    self.z.swap(a0 + i, b0 + i);
                }
            }
        }
    }

    /// Visits every `(site, shot)` trial that fires with probability `p`.
    fn for_each_hit(&mut self, p: f64, sites: usize, mut f: impl FnMut(&mut Self, usize, usize)) {
        if p <= 0.0 || sites == 0 {
            return;
        }
        let trials = sites * self.shots;
        if p >= 1.0 {
            for t in 0..trials {
                f(self, t / self.shots, t % self.shots);
            }
            return;
        }
        let log_q = libm::log1p(-p);
        let mut pos = 0usize;
        loop {
            // Geometric gap: number of failures before the next success.
            let u = 1.0 - (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            let gap = libm::floor(libm::log(u) / log_q);
            if gap >= (trials - pos) as f64 {
                return;
            }
            pos += gap as usize;
            f(self, pos / self.shots, pos % self.shots);
            pos += 1;
            if pos >= trials {
                return;
            }
        }
    }

    fn noise(&mut self, channel: NoiseChannel, targets: &[usize]) {
        match channel {
            NoiseChannel::XError(p) => {
                self.for_each_hit(p, targets.len(), |b, site, shot| b.flip(true, false, targets[site], shot));
            }
            NoiseChannel::Depolarize1(p) => {
                self.for_each_hit(p, targets.len(), |b, site, shot| {
                    let k = b.rng.random_range(1..4u32);
                    b.flip(k & 1 == 1, k & 2 == 2, targets[site], shot);
                });
            }
            NoiseChannel::Depolarize2(p) => {
                self.for_each_hit(p, targets.len() / 2, |b, site, shot| {
                    let k = b.rng.random_range(1..16u32);
                    b.flip(k & 1 == 1, k & 2 == 2, targets[2 * site], shot);
                    b.flip(k & 4 == 4, k & 8 == 8, targets[2 * site + 1], shot);
                });
            }
        }
    }

    fn measure(&mut self, flip: f64, targets: &[usize]) {
        let first = self.next_record;
        let w = self.words;
        for (i, &q) in targets.iter().enumerate() {
            let r = (first + i) * w;
            let src = q * w;
            self.records[r..r + w].copy_from_slice(&self.x[src..src + w]);
        }
        self.for_each_hit(flip, targets.len(), |b, site, shot| {
            let w = (first + site) * b.words + shot / WORD_BITS;
            b.records[w] ^= 1u64 << (shot % WORD_BITS);
        });
        for &q in targets {
            self.randomize_z(q);
        }
        self.next_record += targets.len();
    }

    fn reset(&mut self, targets: &[usize]) {
        for &q in targets {
            let r = self.plane(q);
            self.x[r].fill(0);
            self.randomize_z(q);
        }
    }
}

impl FrameSampler {
    pub fn new(c: &CliffordCircuit) -> Self {
        let ops = c
            .instructions()
            .iter()
            .filter_map(|inst| match inst {
                Instruction::Gate { gate, targets } => Some(Op::Gate(*gate, targets.clone())),
                Instruction::Noise { channel, targets } => Some(Op::Noise(*channel, targets.clone())),
                Instruction::Measure { flip, targets } => Some(Op::Measure(*flip, targets.clone())),
                Instruction::Reset { targets } => Some(Op::Reset(targets.clone())),
                _ => None,
            })
            .collect();
        FrameSampler {
            num_qubits: c.num_qubits(),
            num_records: c.num_measurements(),
            ops,
            detectors: c.detector_records(),
            observables: c.observable_records(),
        }
    }

    pub fn num_detectors(&self) -> usize {
        self.detectors.len()
    }

    pub fn num_observables(&self) -> usize {
        self.observables.len()
    }

    /// Samples block `block` holding `shots` shots (at most [`BLOCK_SHOTS`]).
    /// Returns detector and observable matrices with `shots` columns.
    pub fn sample_block(&self, seed: u64, block: u64, shots: usize) -> (BitMatrix, BitMatrix) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(block);
        let words = words_for(shots);
        let mut b = Block {
            words,
            shots,
            x: vec![0; self.num_qubits * words],
            z: vec![0; self.num_qubits * words],
            records: vec![0; self.num_records * words],
            next_record: 0,
            rng: &mut rng,
        };
        for q in 0..self.num_qubits {
            b.randomize_z(q);
        }
        for op in &self.ops {
            match op {
                Op::Gate(g, targets) => {
                    if g.is_two_qubit() {
                        for pair in targets.chunks(2) {
                            b.gate(*g, pair[0], pair[1]);
                        }
                    } else {
                        for &q in targets {
                            b.gate(*g, q, q);
                        }
                    }
                }
                Op::Noise(ch, targets) => b.noise(*ch, targets),
                Op::Measure(flip, targets) => b.measure(*flip, targets),
                Op::Reset(targets) => b.reset(targets),
            }
        }
        let parities = |sets: &[Vec<usize>]| {
            let mut m = BitMatrix::zeros(sets.len(), shots);
            for (i, recs) in sets.iter().enumerate() {
                let row = m.row_mut(i);
                for &r in recs {
                    for (d, s) in row.iter_mut().zip(&b.records[r * words..(r + 1) * words]) {
                        *d ^= s;
                    }
                }
            }
            m
        };
        (parities(&self.detectors), parities(&self.observables))
    }

    /// Number of blocks needed for `shots` shots.
    pub fn num_blocks(shots: usize) -> usize {
        shots.div_ceil(BLOCK_SHOTS)
    }

    /// Shots held by block `block` of a batch of `shots`.
    pub fn block_len(shots: usize, block: usize) -> usize {
        BLOCK_SHOTS.min(shots - block * BLOCK_SHOTS)
    }

    /// Assembles per-block results (in block order) into one batch.
    pub fn assemble(&self, shots: usize, blocks: &[(BitMatrix, BitMatrix)]) -> SampleBatch {
        let mut det = BitMatrix::zeros(self.detectors.len(), shots);
        let mut obs = BitMatrix::zeros(self.observables.len(), shots);
        for (i, (d, o)) in blocks.iter().enumerate() {
            det.paste_columns(d, i * BLOCK_SHOTS);
            obs.paste_columns(o, i * BLOCK_SHOTS);
        }
        SampleBatch { shots, detectors: det, observables: obs, aux: None }
    }
}

/// Samples `shots` shots of `c` on the current thread.
pub fn sample_frames(c: &CliffordCircuit, shots: usize, seed: u64) -> SampleBatch {
    let sampler = FrameSampler::new(c);
    let blocks: Vec<_> = (0..FrameSampler::num_blocks(shots))
        .map(|b| sampler.sample_block(seed, b as u64, FrameSampler::block_len(shots, b)))
        .collect();
    sampler.assemble(shots, &blocks)
}
