//! Clifford building blocks: Pauli rotations and stabilizer measurements.

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_4;

use crate::circuit::{CliffordCircuit, Gate};
use crate::encodings::DkArtifacts;
use crate::error::{Error, Result};
use crate::pauli::{Letter, PauliString};

/// A rotation angle `k * pi/4`, the only angles with Clifford rotations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CliffordAngle(pub u8);

impl CliffordAngle {
    /// `3 pi / 4`, which makes the central gate of a rotation a phase gate.
    pub const DEFAULT: CliffordAngle = CliffordAngle(3);

    pub fn from_radians(theta: f64) -> Result<Self> {
        let k = theta / FRAC_PI_4;
        let r = libm::round(k);
        if !theta.is_finite() || libm::fabs(k - r) > 1e-9 {
            return Err(Error::NonCliffordAngle(theta));
        }
        Ok(CliffordAngle((r as i64).rem_euclid(8) as u8))
    }

    pub fn radians(self) -> f64 {
        self.0 as f64 * FRAC_PI_4
    }

    pub fn eighths(self) -> i32 {
        self.0 as i32
    }
}

impl Default for CliffordAngle {
    fn default() -> Self {
        CliffordAngle::DEFAULT
    }
}

fn basis_gate(letter: Letter) -> Option<(Gate, Gate)> {
    match letter {
        Letter::X => Some((Gate::SqrtY, Gate::SqrtYDag)),
        Letter::Y => Some((Gate::SqrtX, Gate::SqrtXDag)),
        _ => None,
    }
}

/// Emits `exp(-i k (pi/4) P)` for a Hermitian Pauli `P` (phase `±1`).
///
/// Basis change to a Z string (`SQRT_Y` on X letters, `SQRT_X` on Y
/// letters), a CX ladder onto the lowest support qubit, a phase gate there,
/// then everything undone. Only the central gate depends on `k`; when the
/// rotation is trivial the central gate is omitted and the rest kept.
pub fn emit_rotation(c: &mut CliffordCircuit, p: &PauliString, k: i32) {
    let support = p.support();
    let Some(&target) = support.first() else {
        return;
    };
    let mut q = p.clone();
    let mut undo = Vec::new();
    for &s in &support {
        if let Some((g, inv)) = basis_gate(p.letter(s)) {
            c.gate1(g, s);
            g.conjugate(&mut q, s, s);
            undo.push((inv, s));
        }
    }
    debug_assert!(q.is_z_type());
    for &s in &support[1..] {
        c.gate2(Gate::CX, s, target);
    }
    let signed = if q.phase().is_negative() { -k } else { k };
    match signed.rem_euclid(4) {
        1 => c.gate1(Gate::S, target),
        2 => c.gate1(Gate::Z, target),
        3 => c.gate1(Gate::SDag, target),
        _ => {}
    }
    for &s in support[1..].iter().rev() {
        c.gate2(Gate::CX, s, target);
    }
    for &(g, s) in undo.iter().rev() {
        c.gate1(g, s);
    }
}

/// The circuit of `exp(-i angle P)` on `P`'s qubits.
pub fn build_logical_rotation(p: &PauliString, angle: CliffordAngle) -> Result<CliffordCircuit> {
    if !p.phase().is_real() {
        return Err(Error::InvalidInstruction(alloc::format!("rotation generator {p} is not Hermitian")));
    }
    if p.weight() == 0 {
        return Err(Error::InvalidInstruction(alloc::string::String::from("rotation about the identity")));
    }
    let mut c = CliffordCircuit::new(p.num_qubits());
    emit_rotation(&mut c, p, angle.eighths());
    Ok(c)
}

/// Record indices produced by one stabilizer measurement gadget.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GadgetRecords {
    /// One auxiliary result per repetition; `0` means eigenvalue `+1` of the
    /// measured letters (phase ignored).
    pub results: Vec<usize>,
    /// Flag results, one per repetition when flagged.
    pub flags: Vec<usize>,
}

fn controlled(letter: Letter) -> Gate {
    match letter {
        Letter::X => Gate::CX,
        Letter::Y => Gate::CY,
        _ => Gate::CZ,
    }
}

/// Hadamard-test measurement of the product of `couplings`, in the given
/// order. With `flag`, a second auxiliary is CZ-coupled to the first one
/// after the first and before the last data coupling.
pub fn emit_stab_measurement(
    c: &mut CliffordCircuit,
    couplings: &[(usize, Letter)],
    aux: usize,
    flag: Option<usize>,
    repeat: bool,
) -> GadgetRecords {
    let mut out = GadgetRecords::default();
    let rounds = if repeat { 2 } else { 1 };
    let w = couplings.len();
    c.ensure_qubits(aux.max(flag.unwrap_or(0)) + 1);
    for _ in 0..rounds {
        match flag {
            Some(f) => {
                c.reset(&[aux, f]);
                c.gate(Gate::H, &[aux, f]);
            }
            None => {
                c.reset(&[aux]);
                c.gate1(Gate::H, aux);
            }
        }
        for (i, &(q, letter)) in couplings.iter().enumerate() {
            if let (Some(f), true) = (flag, i + 1 == w && w > 1) {
                c.gate2(Gate::CZ, aux, f);
            }
            c.gate2(controlled(letter), aux, q);
            if let (Some(f), true) = (flag, i == 0 && w > 1) {
                c.gate2(Gate::CZ, aux, f);
            }
        }
        match flag {
            Some(f) => {
                c.gate(Gate::H, &[aux, f]);
                let r = c.measure(&[aux, f]);
                out.results.push(r);
                out.flags.push(r + 1);
            }
            None => {
                c.gate1(Gate::H, aux);
                out.results.push(c.measure(&[aux]));
            }
        }
    }
    out
}

/// Letters of `p` in ascending qubit order.
pub fn couplings_of(p: &PauliString) -> Vec<(usize, Letter)> {
    p.support().into_iter().map(|q| (q, p.letter(q))).collect()
}

/// Coupling order for stabilizer `k` (or its restriction `p`): the four
/// corners clockwise from the upper left, then the face qubits above, right,
/// left and below. Qubits outside `p`'s support are skipped.
pub fn dk_coupling_order(art: &DkArtifacts, k: usize, p: &PauliString) -> Vec<(usize, Letter)> {
    let lat = art.lattice();
    let b = lat.red_face_boundary(lat.red_faces()[k]).expect("red face");
    let fq = |face: usize| lat.face_qubit(face).expect("blue face");
    let order = [
        b.corners[0],
        b.corners[1],
        b.corners[2],
        b.corners[3],
        fq(b.vertical_neighbors[0]),
        fq(b.horizontal_neighbors[1]),
        fq(b.horizontal_neighbors[0]),
        fq(b.vertical_neighbors[1]),
    ];
    order.into_iter().filter(|&q| p.letter(q) != Letter::I).map(|q| (q, p.letter(q))).collect()
}

/// Standalone measurement of `stab`: data qubits `0..n`, auxiliary `n`,
/// flag `n + 1`. Flag results are detectors; with `repeat` a detector also
/// compares the two auxiliary results. Couplings follow ascending qubit order.
pub fn build_stab_measurement(stab: &PauliString, use_flag: bool, repeat: bool) -> Result<CliffordCircuit> {
    build_stab_measurement_ordered(stab.num_qubits(), &couplings_of(stab), use_flag, repeat)
}

/// As [`build_stab_measurement`] with an explicit coupling order.
pub fn build_stab_measurement_ordered(
    n: usize,
    couplings: &[(usize, Letter)],
    use_flag: bool,
    repeat: bool,
) -> Result<CliffordCircuit> {
    if couplings.is_empty() {
        return Err(Error::InvalidInstruction(alloc::string::String::from("measurement of the identity")));
    }
    let mut c = CliffordCircuit::new(n + 2);
    let recs = emit_stab_measurement(&mut c, couplings, n, use_flag.then_some(n + 1), repeat);
    for &f in &recs.flags {
        c.detector(&[f]);
    }
    if repeat {
        c.detector(&[recs.results[0], recs.results[1]]);
    }
    Ok(c)
}
