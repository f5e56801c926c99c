//! Clifford circuits with Pauli noise, measurements and detector annotations.
//!
//! Detector and observable annotations refer to measurement records by
//! absolute index (0 is the first measurement result of the circuit). The text
//! format converts to and from the relative `rec[-k]` form.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::pauli::{Letter, PauliString};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    H,
    S,
    SDag,
    SqrtX,
    SqrtXDag,
    SqrtY,
    SqrtYDag,
    X,
    Y,
    Z,
    CX,
    CZ,
    CY,
    Swap,
}

impl Gate {
    pub const ALL: [Gate; 14] = [
        Gate::H,
        Gate::S,
        Gate::SDag,
        Gate::SqrtX,
        Gate::SqrtXDag,
        Gate::SqrtY,
        Gate::SqrtYDag,
        Gate::X,
        Gate::Y,
        Gate::Z,
        Gate::CX,
        Gate::CZ,
        Gate::CY,
        Gate::Swap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Gate::H => "H",
            Gate::S => "S",
            Gate::SDag => "S_DAG",
            Gate::SqrtX => "SQRT_X",
            Gate::SqrtXDag => "SQRT_X_DAG",
            Gate::SqrtY => "SQRT_Y",
            Gate::SqrtYDag => "SQRT_Y_DAG",
            Gate::X => "X",
            Gate::Y => "Y",
            Gate::Z => "Z",
            Gate::CX => "CX",
            Gate::CZ => "CZ",
            Gate::CY => "CY",
            Gate::Swap => "SWAP",
        }
    }

    pub fn from_name(name: &str) -> Option<Gate> {
        let g = match name {
            "H" => Gate::H,
            "S" => Gate::S,
            "S_DAG" => Gate::SDag,
            "SQRT_X" => Gate::SqrtX,
            "SQRT_X_DAG" => Gate::SqrtXDag,
            "SQRT_Y" => Gate::SqrtY,
            "SQRT_Y_DAG" => Gate::SqrtYDag,
            "X" => Gate::X,
            "Y" => Gate::Y,
            "Z" => Gate::Z,
            "CX" | "CNOT" => Gate::CX,
            "CZ" => Gate::CZ,
            "CY" => Gate::CY,
            "SWAP" => Gate::Swap,
            _ => return None,
        };
        Some(g)
    }

    pub fn arity(self) -> usize {
        match self {
            Gate::CX | Gate::CZ | Gate::CY | Gate::Swap => 2,
            _ => 1,
        }
    }

    pub fn is_two_qubit(self) -> bool {
        self.arity() == 2
    }

    pub fn inverse(self) -> Gate {
        match self {
            Gate::S => Gate::SDag,
            Gate::SDag => Gate::S,
            Gate::SqrtX => Gate::SqrtXDag,
            Gate::SqrtXDag => Gate::SqrtX,
            Gate::SqrtY => Gate::SqrtYDag,
            Gate::SqrtYDag => Gate::SqrtY,
            g => g,
        }
    }

    /// Conjugates `p` by one application of the gate: `p <- U p U^dagger`.
    ///
    /// `b` is ignored for single-qubit gates. Every gate is decomposed into
    /// H, S, CX and Pauli conjugations applied in time order.
    pub fn conjugate(self, p: &mut PauliString, a: usize, b: usize) {
        match self {
            Gate::H => p.apply_h(a),
            Gate::S => p.apply_s(a),
            Gate::SDag => {
                p.apply_s(a);
                p.apply_s(a);
                p.apply_s(a);
            }
            Gate::SqrtX => {
                p.apply_h(a);
                p.apply_s(a);
                p.apply_h(a);
            }
            Gate::SqrtXDag => {
                p.apply_h(a);
                Gate::SDag.conjugate(p, a, b);
                p.apply_h(a);
            }
            Gate::SqrtY => {
                p.apply_pauli(a, Letter::Z);
                p.apply_h(a);
            }
            Gate::SqrtYDag => {
                p.apply_h(a);
                p.apply_pauli(a, Letter::Z);
            }
            Gate::X => p.apply_pauli(a, Letter::X),
            Gate::Y => p.apply_pauli(a, Letter::Y),
            Gate::Z => p.apply_pauli(a, Letter::Z),
            Gate::CX => p.apply_cx(a, b),
            Gate::CZ => {
                p.apply_h(b);
                p.apply_cx(a, b);
                p.apply_h(b);
            }
            Gate::CY => {
                Gate::SDag.conjugate(p, b, a);
                p.apply_cx(a, b);
                p.apply_s(b);
            }
            Gate::Swap => {
                p.apply_cx(a, b);
                p.apply_cx(b, a);
                p.apply_cx(a, b);
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NoiseChannel {
    /// X, Y or Z, each with probability `p/3`.
    Depolarize1(f64),
    /// One of the 15 non-identity two-qubit Paulis, each with probability `p/15`.
    Depolarize2(f64),
    XError(f64),
}

impl NoiseChannel {
    pub fn name(&self) -> &'static str {
        match self {
            NoiseChannel::Depolarize1(_) => "DEPOLARIZE1",
            NoiseChannel::Depolarize2(_) => "DEPOLARIZE2",
            NoiseChannel::XError(_) => "X_ERROR",
        }
    }

    pub fn probability(&self) -> f64 {
        match *self {
            NoiseChannel::Depolarize1(p) | NoiseChannel::Depolarize2(p) | NoiseChannel::XError(p) => p,
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            NoiseChannel::Depolarize2(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Instruction {
    Gate { gate: Gate, targets: Vec<usize> },
    Noise { channel: NoiseChannel, targets: Vec<usize> },
    /// Z-basis measurement; each result is flipped with probability `flip`.
    Measure { flip: f64, targets: Vec<usize> },
    /// Reset to |0>.
    Reset { targets: Vec<usize> },
    Detector { records: Vec<usize> },
    ObservableInclude { index: usize, records: Vec<usize> },
}

impl Instruction {
    pub fn is_noise(&self) -> bool {
        matches!(self, Instruction::Noise { .. })
    }

    pub fn measurement_count(&self) -> usize {
        match self {
            Instruction::Measure { targets, .. } => targets.len(),
            _ => 0,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GateCounts {
    pub one_qubit: usize,
    pub two_qubit: usize,
}

impl GateCounts {
    pub fn total(&self) -> usize {
        self.one_qubit + self.two_qubit
    }
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    Ok(())
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CliffordCircuit {
    num_qubits: usize,
    instructions: Vec<Instruction>,
    num_measurements: usize,
    num_detectors: usize,
    num_observables: usize,
}

impl CliffordCircuit {
    pub fn new(num_qubits: usize) -> Self {
        CliffordCircuit { num_qubits, ..Default::default() }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    pub fn num_measurements(&self) -> usize {
        self.num_measurements
    }

    pub fn num_detectors(&self) -> usize {
        self.num_detectors
    }

    pub fn num_observables(&self) -> usize {
        self.num_observables
    }

    /// Grows the qubit register; existing indices are unchanged.
    pub fn ensure_qubits(&mut self, n: usize) {
        self.num_qubits = self.num_qubits.max(n);
    }

    fn check_targets(&self, targets: &[usize]) -> Result<()> {
        for &q in targets {
            if q >= self.num_qubits {
                return Err(Error::IndexOutOfRange { index: q, len: self.num_qubits });
            }
        }
        Ok(())
    }

    fn check_pairs(&self, name: &str, targets: &[usize]) -> Result<()> {
        if targets.len() % 2 != 0 {
            return Err(Error::InvalidInstruction(format!("{name} needs an even number of targets")));
        }
        for pair in targets.chunks(2) {
            if pair[0] == pair[1] {
                return Err(Error::InvalidInstruction(format!("{name} applied to qubit {} twice", pair[0])));
            }
        }
        Ok(())
    }

    fn check_records(&self, records: &[usize]) -> Result<()> {
        for &r in records {
            if r >= self.num_measurements {
                return Err(Error::InvalidInstruction(format!(
                    "record {r} referenced before it is measured ({} records so far)",
                    self.num_measurements
                )));
            }
        }
        Ok(())
    }

    /// Validates and appends an instruction.
    pub fn push(&mut self, inst: Instruction) -> Result<()> {
        match &inst {
            Instruction::Gate { gate, targets } => {
                self.check_targets(targets)?;
                if gate.is_two_qubit() {
                    self.check_pairs(gate.name(), targets)?;
                }
            }
            Instruction::Noise { channel, targets } => {
                self.check_targets(targets)?;
                check_probability(channel.probability())?;
                if channel.arity() == 2 {
                    self.check_pairs(channel.name(), targets)?;
                }
            }
            Instruction::Measure { flip, targets } => {
                self.check_targets(targets)?;
                check_probability(*flip)?;
            }
            Instruction::Reset { targets } => self.check_targets(targets)?,
            Instruction::Detector { records } => self.check_records(records)?,
            Instruction::ObservableInclude { records, .. } => self.check_records(records)?,
        }
        self.push_unchecked(inst);
        Ok(())
    }

    fn push_unchecked(&mut self, inst: Instruction) {
        match &inst {
            Instruction::Measure { targets, .. } => self.num_measurements += targets.len(),
            Instruction::Detector { .. } => self.num_detectors += 1,
            Instruction::ObservableInclude { index, .. } => {
                self.num_observables = self.num_observables.max(index + 1)
            }
            _ => {}
        }
        self.instructions.push(inst);
    }

    // Builder helpers. They panic on invalid input, which is a programming
    // error inside circuit construction; external input goes through `push`.

    pub fn gate(&mut self, gate: Gate, targets: &[usize]) {
        if targets.is_empty() {
            return;
        }
        self.push(Instruction::Gate { gate, targets: targets.to_vec() }).expect("valid gate");
    }

    pub fn gate1(&mut self, gate: Gate, q: usize) {
        self.gate(gate, &[q]);
    }

    pub fn gate2(&mut self, gate: Gate, a: usize, b: usize) {
        self.gate(gate, &[a, b]);
    }

    pub fn reset(&mut self, targets: &[usize]) {
        if targets.is_empty() {
            return;
        }
        self.push(Instruction::Reset { targets: targets.to_vec() }).expect("valid reset");
    }

    /// Measures in the Z basis and returns the index of the first new record.
    pub fn measure(&mut self, targets: &[usize]) -> usize {
        let first = self.num_measurements;
        if !targets.is_empty() {
            self.push(Instruction::Measure { flip: 0.0, targets: targets.to_vec() })
                .expect("valid measurement");
        }
        first
    }

    /// Adds a detector and returns its index.
    pub fn detector(&mut self, records: &[usize]) -> usize {
        let idx = self.num_detectors;
        self.push(Instruction::Detector { records: records.to_vec() }).expect("valid detector");
        idx
    }

    pub fn observable(&mut self, index: usize, records: &[usize]) {
        self.push(Instruction::ObservableInclude { index, records: records.to_vec() })
            .expect("valid observable");
    }

    /// Appends another circuit. Its record references are shifted past the
    /// records of `self`; its observable indices are kept.
    pub fn append(&mut self, other: &CliffordCircuit) {
        self.ensure_qubits(other.num_qubits);
        let shift = self.num_measurements;
        for inst in &other.instructions {
            let inst = match inst {
                Instruction::Detector { records } => {
                    Instruction::Detector { records: records.iter().map(|r| r + shift).collect() }
                }
                Instruction::ObservableInclude { index, records } => Instruction::ObservableInclude {
                    index: *index,
                    records: records.iter().map(|r| r + shift).collect(),
                },
                other => other.clone(),
            };
            self.push_unchecked(inst);
        }
    }

    pub fn is_noisy(&self) -> bool {
        self.instructions.iter().any(|i| match i {
            Instruction::Noise { .. } => true,
            Instruction::Measure { flip, .. } => *flip > 0.0,
            _ => false,
        })
    }

    /// True when the circuit contains only unitary gates.
    pub fn is_unitary(&self) -> bool {
        self.instructions.iter().all(|i| matches!(i, Instruction::Gate { .. }))
    }

    /// The exact inverse of a gate-only circuit.
    pub fn inverse(&self) -> Result<CliffordCircuit> {
        let mut out = CliffordCircuit::new(self.num_qubits);
        for inst in self.instructions.iter().rev() {
            match inst {
                Instruction::Gate { gate, targets } => {
                    let k = gate.arity();
                    let mut rev = Vec::with_capacity(targets.len());
                    for chunk in targets.chunks(k).rev() {
                        rev.extend_from_slice(chunk);
                    }
                    out.push_unchecked(Instruction::Gate { gate: gate.inverse(), targets: rev });
                }
                _ => {
                    return Err(Error::InvalidInstruction(String::from(
                        "only gate-only circuits can be inverted",
                    )))
                }
            }
        }
        Ok(out)
    }

    /// Counts 1Q and 2Q gate applications (resets, measurements and noise
    /// excluded).
    pub fn count_gates(&self) -> GateCounts {
        let mut c = GateCounts::default();
        for inst in &self.instructions {
            if let Instruction::Gate { gate, targets } = inst {
                if gate.is_two_qubit() {
                    c.two_qubit += targets.len() / 2;
                } else {
                    c.one_qubit += targets.len();
                }
            }
        }
        c
    }

    /// Record indices of each detector, in order.
    pub fn detector_records(&self) -> Vec<Vec<usize>> {
        self.instructions
            .iter()
            .filter_map(|i| match i {
                Instruction::Detector { records } => Some(records.clone()),
                _ => None,
            })
            .collect()
    }

    /// Record indices of each observable (all includes merged).
    pub fn observable_records(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_observables];
        for inst in &self.instructions {
            if let Instruction::ObservableInclude { index, records } = inst {
                out[*index].extend_from_slice(records);
            }
        }
        out
    }

    /// Number of measurement records produced before instruction `pos`.
    pub fn records_before(&self, pos: usize) -> usize {
        self.instructions[..pos].iter().map(|i| i.measurement_count()).sum()
    }
}

/// Result of pushing a single Pauli fault through a circuit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaultEffect {
    /// Measurement records whose value is flipped.
    pub records: Vec<usize>,
    pub detectors: Vec<usize>,
    pub observables: Vec<usize>,
    /// The fault as it stands at the end of the circuit.
    pub frame: PauliString,
}

/// Injects `fault` just before instruction `position` and propagates it to the
/// end of the circuit, ignoring every noise channel. Signs are irrelevant for
/// frames and are not tracked meaningfully.
pub fn propagate_fault(c: &CliffordCircuit, position: usize, fault: &PauliString) -> Result<FaultEffect> {
    if fault.num_qubits() != c.num_qubits() {
        return Err(Error::DimensionMismatch { left: fault.num_qubits(), right: c.num_qubits() });
    }
    if position > c.len() {
        return Err(Error::IndexOutOfRange { index: position, len: c.len() + 1 });
    }
    let mut frame = fault.clone();
    let mut flipped = vec![false; c.num_measurements()];
    let mut rec = c.records_before(position);
    let mut detectors = Vec::new();
    let mut obs = vec![false; c.num_observables()];
    let mut det_index = c.instructions[..position]
        .iter()
        .filter(|i| matches!(i, Instruction::Detector { .. }))
        .count();
    for inst in &c.instructions[position..] {
        match inst {
            Instruction::Gate { gate, targets } => {
                let k = gate.arity();
                for t in targets.chunks(k) {
                    gate.conjugate(&mut frame, t[0], *t.get(1).unwrap_or(&t[0]));
                }
            }
            Instruction::Noise { .. } => {}
            Instruction::Measure { targets, .. } => {
                for &q in targets {
                    // The measured qubit keeps a bit flip; a phase flip no
                    // longer matters.
                    flipped[rec] = frame.x(q);
                    frame.set_letter(q, if frame.x(q) { Letter::X } else { Letter::I });
                    rec += 1;
                }
            }
            Instruction::Reset { targets } => {
                for &q in targets {
                    frame.set_letter(q, Letter::I);
                }
            }
            Instruction::Detector { records } => {
                if records.iter().filter(|&&r| flipped[r]).count() % 2 == 1 {
                    detectors.push(det_index);
                }
                det_index += 1;
            }
            Instruction::ObservableInclude { index, records } => {
                if records.iter().filter(|&&r| flipped[r]).count() % 2 == 1 {
                    obs[*index] ^= true;
                }
            }
        }
    }
    Ok(FaultEffect {
        records: (0..flipped.len()).filter(|&r| flipped[r]).collect(),
        detectors,
        observables: (0..obs.len()).filter(|&i| obs[i]).collect(),
        frame: frame.with_phase(crate::pauli::Phase::ONE),
    })
}
