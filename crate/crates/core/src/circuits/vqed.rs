//! Virtual error detection layers.
//!
//! A layer applies a random stabilizer `S_j` and then measures a random
//! `S_k` through an auxiliary qubit. Neither changes a codespace state, so
//! the auxiliary result compared with the prepared value of `S_k` is a
//! `+1` factor `b` without noise. The estimator weights each shot by the
//! product of its `b` factors.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::gadgets::{dk_coupling_order, emit_stab_measurement};
use super::logical::Fragment;
use super::prep::reference_values;
use super::{Builder, DetectorLabel, ObservableLabel, PreparedValue, VqedLayer};
use crate::circuit::Gate;
use crate::encodings::DkArtifacts;
use crate::error::Result;
use crate::pauli::Letter;

/// Instruction indices (cuts of `logical`) where the `m` layers go: layer
/// `i` (1-based) sits at the last cut not after `floor(i * len / m)`. For
/// `m = 2` this is the midpoint and the end.
pub fn layer_positions(logical: &Fragment, m: usize) -> Vec<usize> {
    let len = logical.circuit.len();
    (1..=m).map(|i| logical.cut_before(i * len / m)).collect()
}

fn emit_layer(
    b: &mut Builder,
    art: &DkArtifacts,
    values: &[PreparedValue],
    reference: &[bool],
    rng: &mut ChaCha8Rng,
    layer: usize,
    position: usize,
    flags: bool,
) -> VqedLayer {
    let count = art.stabilizers().len();
    let j = rng.random_range(0..count);
    let k = rng.random_range(0..count);
    let sj = &art.stabilizers()[j];
    for q in sj.support() {
        let g = match sj.letter(q) {
            Letter::X => Gate::X,
            Letter::Y => Gate::Y,
            _ => Gate::Z,
        };
        b.c.gate1(g, q);
    }
    let n = art.num_qubits();
    let sk = &art.stabilizers()[k];
    let recs = emit_stab_measurement(&mut b.c, &dk_coupling_order(art, k, sk), n, flags.then_some(n + 1), false);
    for &f in &recs.flags {
        b.detector(DetectorLabel::VqedFlag { layer }, &[f], false);
    }
    let mut records = Vec::with_capacity(1 + values[k].records.len());
    records.push(recs.results[0]);
    records.extend_from_slice(&values[k].records);
    let observable = b.observable(ObservableLabel::VqedAux { layer }, &records, values[k].constant);
    VqedLayer { layer, j, k, position, observable, records, sign_correction: reference[k] }
}

/// Appends the logical fragment with `m` VQED layers interleaved.
pub fn append_with_layers(
    b: &mut Builder,
    art: &DkArtifacts,
    logical: &Fragment,
    values: &[PreparedValue],
    m: usize,
    seed: u64,
    flags: bool,
) -> Result<Vec<VqedLayer>> {
    let reference = reference_values(&b.c, values);
    let positions = layer_positions(logical, m);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(m);
    let insts = logical.circuit.instructions();
    for idx in 0..=insts.len() {
        while out.len() < m && positions[out.len()] == idx {
            let layer = out.len();
            out.push(emit_layer(b, art, values, &reference, &mut rng, layer, idx, flags));
        }
        if let Some(inst) = insts.get(idx) {
            b.c.push(inst.clone())?;
        }
    }
    Ok(out)
}
