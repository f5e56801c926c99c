//! State preparation: computational basis states, DK Slater determinants and
//! DK hopping-term eigenstates.

use alloc::format;
use alloc::vec::Vec;

use super::gadgets::{dk_coupling_order, emit_stab_measurement};
use super::{Builder, DetectorLabel, PreparedValue};
use crate::circuit::{CliffordCircuit, Gate};
use crate::encodings::{is_xx_summand, DkArtifacts};
use crate::error::{Error, Result};
use crate::pauli::{Letter, PauliString};
use crate::tableau::Tableau;

/// A hopping summand prepared in (and later read out from) its `+1`
/// eigenstate. `pauli` has phase `+1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HoppingTarget {
    pub edge: usize,
    pub xx: bool,
    pub pauli: PauliString,
}

/// What DK preparation leaves behind.
#[derive(Clone, Debug, Default)]
pub struct DkPrep {
    /// Prepared eigenvalue of the letters of each `S_k`.
    pub values: Vec<PreparedValue>,
    pub hopping: Vec<HoppingTarget>,
    /// Stabilizer (or face part) indices measured during preparation.
    pub measured: Vec<usize>,
}

/// Resets qubits `0..n` of the builder and flips the listed ones.
pub fn build_basis_prep(b: &mut Builder, ones: &[usize]) {
    let n = b.c.num_qubits();
    b.c.reset(&(0..n).collect::<Vec<_>>());
    b.c.gate(Gate::X, ones);
}

/// Letter whose `+1` eigenstate a blue face qubit is prepared in: `X` in
/// even rows, `Y` in odd rows.
pub fn face_letter(art: &DkArtifacts, face: usize) -> Letter {
    let l = art.lattice().side();
    if (face / l) % 2 == 0 {
        Letter::X
    } else {
        Letter::Y
    }
}

/// True when the face part of `S_k` is fixed by the face product state
/// prepared by [`build_slater_prep_dk`].
pub fn t_fixed_by_product_state(art: &DkArtifacts, k: usize) -> bool {
    let lat = art.lattice();
    let t = &art.t_ops()[k];
    lat.blue_faces().iter().all(|&f| {
        let q = lat.face_qubit(f).expect("blue");
        let letter = t.letter(q);
        letter == Letter::I || letter == face_letter(art, f)
    })
}

/// Slater determinant `|v>`: vertex qubits in `|v>`, face qubits in `|+>`
/// (even rows) or `|+i>` (odd rows), then the face parts `T_k` that this
/// product state does not fix are measured. Those are the odd-row ones.
pub fn build_slater_prep_dk(b: &mut Builder, art: &DkArtifacts, v: &[bool], flagged: bool) -> Result<DkPrep> {
    let lat = art.lattice();
    let nv = lat.num_vertices();
    if v.len() != nv {
        return Err(Error::LengthMismatch { expected: nv, found: v.len() });
    }
    let n = art.num_qubits();
    b.c.reset(&(0..n).collect::<Vec<_>>());
    b.c.gate(Gate::X, &(0..nv).filter(|&j| v[j]).collect::<Vec<_>>());
    let mut even = Vec::new();
    let mut odd = Vec::new();
    for &f in lat.blue_faces() {
        let q = lat.face_qubit(f)?;
        match face_letter(art, f) {
            Letter::X => even.push(q),
            _ => odd.push(q),
        }
    }
    b.c.gate(Gate::H, &even);
    b.c.gate(Gate::H, &odd);
    b.c.gate(Gate::S, &odd);

    let mut out = DkPrep::default();
    for k in 0..art.stabilizers().len() {
        // Vertex part: Z letters on the corners.
        let r = art.r_ops()[k].support().iter().fold(false, |acc, &q| acc ^ v[q]);
        if t_fixed_by_product_state(art, k) {
            out.values.push(PreparedValue { records: Vec::new(), constant: r });
            continue;
        }
        let t = &art.t_ops()[k];
        let recs = emit_stab_measurement(&mut b.c, &dk_coupling_order(art, k, t), n, flagged.then_some(n + 1), false);
        for &f in &recs.flags {
            b.detector(DetectorLabel::PrepFlag { k }, &[f], false);
        }
        out.measured.push(k);
        out.values.push(PreparedValue { records: recs.results[..1].to_vec(), constant: r });
    }
    Ok(out)
}

/// Product eigenstate of the chosen hopping summand on each edge (all other
/// qubits in `|0>`), followed by measurement of every `S_k`.
pub fn build_edge_eigenstate_prep(
    b: &mut Builder,
    art: &DkArtifacts,
    edges: &[usize],
    xx: bool,
    flagged: bool,
) -> Result<DkPrep> {
    let n = art.num_qubits();
    let mut out = DkPrep::default();
    let mut used = alloc::vec![false; n];
    for &e in edges {
        let edge = *art.lattice().edge(e);
        let term = art.hopping_on_edge(e)?;
        let (_, p) = term
            .summands
            .iter()
            .find(|(_, p)| is_xx_summand(p, edge.tail) == xx)
            .ok_or_else(|| Error::InvalidSpec(format!("edge {e} has no summand of the requested type")))?;
        for q in p.support() {
            if used[q] {
                return Err(Error::InvalidSpec(format!("edge {e} overlaps another prepared edge on qubit {q}")));
            }
            used[q] = true;
        }
        out.hopping.push(HoppingTarget { edge: e, xx, pauli: p.clone() });
    }
    b.c.reset(&(0..n).collect::<Vec<_>>());
    for t in &out.hopping {
        for q in t.pauli.support() {
            match t.pauli.letter(q) {
                Letter::X => b.c.gate1(Gate::H, q),
                Letter::Y => {
                    b.c.gate1(Gate::H, q);
                    b.c.gate1(Gate::S, q);
                }
                _ => {}
            }
        }
    }
    for (k, s) in art.stabilizers().iter().enumerate() {
        let recs = emit_stab_measurement(&mut b.c, &dk_coupling_order(art, k, s), n, flagged.then_some(n + 1), false);
        for &f in &recs.flags {
            b.detector(DetectorLabel::PrepFlag { k }, &[f], false);
        }
        out.measured.push(k);
        out.values.push(PreparedValue { records: recs.results, constant: false });
    }
    Ok(out)
}

/// Prepared letter eigenvalues (`true` = `-1`) in the reference branch,
/// where every random measurement outcome is `+1`.
pub fn reference_values(c: &CliffordCircuit, values: &[PreparedValue]) -> Vec<bool> {
    let forms = Tableau::run_symbolic(c);
    values.iter().map(|v| v.records.iter().fold(v.constant, |acc, &r| acc ^ forms[r].constant)).collect()
}

/// The stabilizer syndrome (`true` = `S_k = -1`) of the reference branch,
/// used to update the edge signs after preparation.
pub fn reference_syndrome(c: &CliffordCircuit, art: &DkArtifacts, values: &[PreparedValue]) -> Vec<bool> {
    reference_values(c, values).iter().enumerate().map(|(k, &x)| x ^ art.stabilizer_sign(k)).collect()
}
