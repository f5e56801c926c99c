//! Syndrome extraction and final single-qubit readout.

use alloc::format;
use alloc::vec::Vec;

use super::gadgets::{dk_coupling_order, emit_stab_measurement};
use super::prep::{face_letter, t_fixed_by_product_state, HoppingTarget};
use super::{Builder, DetectorKind, DetectorLabel, ObservableLabel, PreparedValue};
use crate::circuit::Gate;
use crate::encodings::{DkArtifacts, FermionEncoding};
use crate::error::{Error, Result};
use crate::pauli::Letter;

/// Edges of one hopping colour class: the edge at boundary position `color`
/// of every red face, in red-face order. Their supports are disjoint.
pub fn hopping_edges(art: &DkArtifacts, color: u8) -> Vec<usize> {
    let lat = art.lattice();
    lat.red_faces()
        .iter()
        .map(|&f| lat.red_face_boundary(f).expect("red face").edges[color as usize])
        .collect()
}

/// One non-destructive measurement of every `S_k`, compared with its
/// prepared value.
pub fn build_sm_round(b: &mut Builder, art: &DkArtifacts, values: &[PreparedValue], flags: bool, repeat: bool) {
    let n = art.num_qubits();
    for (k, s) in art.stabilizers().iter().enumerate() {
        let recs = emit_stab_measurement(&mut b.c, &dk_coupling_order(art, k, s), n, flags.then_some(n + 1), repeat);
        let mut records = Vec::with_capacity(1 + values[k].records.len());
        records.push(recs.results[0]);
        records.extend_from_slice(&values[k].records);
        b.detector(DetectorLabel::SmRound { k }, &records, values[k].constant);
        for &f in &recs.flags {
            b.detector(DetectorLabel::SmFlag { k }, &[f], false);
        }
        if repeat {
            b.detector(DetectorLabel::SmRepeat { k }, &[recs.results[0], recs.results[1]], false);
        }
    }
}

/// Z readout of the qubits carrying the vertex operators, one occupation
/// observable per site and the global parity detector. Every `V_j` must be a
/// Z string. Returns the record of each measured qubit (indexed by qubit).
pub fn build_occupation_readout(b: &mut Builder, enc: &dyn FermionEncoding, v: &[bool]) -> Result<Vec<Option<usize>>> {
    let modes = enc.num_modes();
    if v.len() != modes {
        return Err(Error::LengthMismatch { expected: modes, found: v.len() });
    }
    let vs: Vec<_> = (0..modes).map(|j| enc.vertex_op(j)).collect::<Result<_>>()?;
    let mut measured = alloc::vec![false; enc.num_qubits()];
    for (j, op) in vs.iter().enumerate() {
        if !op.is_z_type() {
            return Err(Error::InvalidSpec(format!("vertex operator {j} is not a Z string")));
        }
        for q in op.support() {
            measured[q] = true;
        }
    }
    let qubits: Vec<usize> = (0..measured.len()).filter(|&q| measured[q]).collect();
    let first = b.c.measure(&qubits);
    let mut rec = alloc::vec![None; measured.len()];
    for (i, &q) in qubits.iter().enumerate() {
        rec[q] = Some(first + i);
    }
    let mut parity = alloc::vec![false; measured.len()];
    let mut expected_parity = false;
    for (j, op) in vs.iter().enumerate() {
        let records: Vec<usize> = op.support().iter().map(|&q| rec[q].expect("measured")).collect();
        let expected = v[j] ^ op.phase().is_negative();
        b.observable(ObservableLabel::Occupation { site: j }, &records, expected);
        for q in op.support() {
            parity[q] ^= true;
        }
        expected_parity ^= expected;
    }
    if b.enables(DetectorKind::GlobalParity) {
        let records: Vec<usize> = (0..parity.len()).filter(|&q| parity[q]).map(|q| rec[q].expect("measured")).collect();
        b.detector(DetectorLabel::GlobalParity, &records, expected_parity);
    }
    Ok(rec)
}

/// DK occupation readout. With `reconstruct`, face qubits are also measured
/// (even rows in X, odd rows in Y) and every stabilizer whose face part is
/// fixed by that basis choice is rebuilt and compared with its prepared
/// value.
pub fn build_occupation_readout_dk(
    b: &mut Builder,
    art: &DkArtifacts,
    v: &[bool],
    values: &[PreparedValue],
    reconstruct: bool,
) -> Result<()> {
    let mut rec = build_occupation_readout(b, art, v)?;
    if !reconstruct {
        return Ok(());
    }
    let lat = art.lattice();
    let mut faces = Vec::new();
    for &f in lat.blue_faces() {
        let q = lat.face_qubit(f)?;
        match face_letter(art, f) {
            Letter::X => b.c.gate1(Gate::H, q),
            _ => {
                b.c.gate1(Gate::SDag, q);
                b.c.gate1(Gate::H, q);
            }
        }
        faces.push(q);
    }
    let first = b.c.measure(&faces);
    for (i, &q) in faces.iter().enumerate() {
        rec[q] = Some(first + i);
    }
    for (k, s) in art.stabilizers().iter().enumerate() {
        if !t_fixed_by_product_state(art, k) {
            continue;
        }
        let mut records: Vec<usize> = s.support().iter().map(|&q| rec[q].expect("measured")).collect();
        records.extend_from_slice(&values[k].records);
        b.detector(DetectorLabel::Reconstruction { k }, &records, values[k].constant);
    }
    Ok(())
}

/// Measures the letters of each prepared hopping summand, one observable per
/// edge.
pub fn build_hopping_readout(b: &mut Builder, targets: &[HoppingTarget]) {
    for t in targets {
        let support = t.pauli.support();
        for &q in &support {
            match t.pauli.letter(q) {
                Letter::X => b.c.gate1(Gate::H, q),
                Letter::Y => {
                    b.c.gate1(Gate::SDag, q);
                    b.c.gate1(Gate::H, q);
                }
                _ => {}
            }
        }
        let first = b.c.measure(&support);
        let records: Vec<usize> = (first..first + support.len()).collect();
        b.observable(ObservableLabel::Hopping { edge: t.edge, xx: t.xx }, &records, false);
    }
}
