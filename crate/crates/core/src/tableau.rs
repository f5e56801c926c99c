//! Stabilizer tableau with symbolic measurement signs.
//!
//! Rows `0..n` are destabilizers and rows `n..2n` stabilizers. Besides its
//! constant phase, every row carries an affine form over GF(2) in the outcomes
//! of earlier random measurements, so a single pass decides which parities of
//! the measurement record are fixed by the circuit. The reference record is
//! the one obtained by setting every random outcome to 0.

use alloc::vec;
use alloc::vec::Vec;

use rand::RngCore;

use crate::bits::{set_bit, words_for, xor_into};
use crate::circuit::{CliffordCircuit, Gate, Instruction};
use crate::error::{Error, Result};
use crate::pauli::{Letter, PauliString, Phase};

/// A measurement outcome as `constant XOR (sum of random outcome variables)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Form {
    pub constant: bool,
    pub vars: Vec<u64>,
}

impl Form {
    pub fn is_deterministic(&self) -> bool {
        self.vars.iter().all(|&w| w == 0)
    }

    pub fn xor_assign(&mut self, other: &Form) {
        self.constant ^= other.constant;
        if self.vars.len() < other.vars.len() {
            self.vars.resize(other.vars.len(), 0);
        }
        xor_into(&mut self.vars, &other.vars);
    }
}

#[derive(Clone, Debug)]
pub struct Tableau {
    n: usize,
    rows: Vec<PauliString>,
    forms: Vec<Vec<u64>>,
    num_vars: usize,
}

impl Tableau {
    /// The all-|0> state.
    pub fn new(n: usize) -> Self {
        let mut rows = Vec::with_capacity(2 * n);
        for q in 0..n {
            rows.push(PauliString::single(n, q, Letter::X));
        }
        for q in 0..n {
            rows.push(PauliString::single(n, q, Letter::Z));
        }
        Tableau { n, rows, forms: vec![Vec::new(); 2 * n], num_vars: 0 }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn destabilizer(&self, i: usize) -> &PauliString {
        &self.rows[i]
    }

    pub fn stabilizer(&self, i: usize) -> &PauliString {
        &self.rows[self.n + i]
    }

    /// Row `i + n` anticommutes with row `i`; every other pair commutes.
    pub fn is_valid(&self) -> bool {
        let n = self.n;
        for i in 0..2 * n {
            for j in i + 1..2 * n {
                let anti = self.rows[i].anticommutes_unchecked(&self.rows[j]);
                if anti != (j == i + n) {
                    return false;
                }
            }
        }
        true
    }

    pub fn apply_gate(&mut self, gate: Gate, a: usize, b: usize) {
        for row in &mut self.rows {
            gate.conjugate(row, a, b);
        }
    }

    fn xor_form(&mut self, dst: usize, src: usize) {
        if dst == src {
            return;
        }
        let (d, s) = if dst < src {
            let (lo, hi) = self.forms.split_at_mut(src);
            (&mut lo[dst], &hi[0])
        } else {
            let (lo, hi) = self.forms.split_at_mut(dst);
            (&mut hi[0], &lo[src])
        };
        if d.len() < s.len() {
            d.resize(s.len(), 0);
        }
        xor_into(d, s);
    }

    fn new_var(&mut self) -> usize {
        let v = self.num_vars;
        self.num_vars += 1;
        v
    }

    /// Z measurement. A random outcome becomes a fresh variable when `fixed`
    /// is `None`, otherwise it takes the given value.
    fn measure_inner(&mut self, q: usize, fixed: Option<bool>) -> Form {
        let n = self.n;
        if let Some(p) = (n..2 * n).find(|&i| self.rows[i].x(q)) {
            let pivot = self.rows[p].clone();
            for i in 0..2 * n {
                if i != p && self.rows[i].x(q) {
                    self.rows[i].mul_assign(&pivot);
                    self.xor_form(i, p);
                    if i < n {
                        self.rows[i].set_phase(Phase::ONE);
                    }
                }
            }
            self.rows[p - n] = pivot.with_phase(Phase::ONE);
            self.forms[p - n].clear();
            let mut z = PauliString::single(n, q, Letter::Z);
            let form = match fixed {
                Some(bit) => {
                    if bit {
                        z.set_phase(Phase::MINUS_ONE);
                    }
                    self.forms[p].clear();
                    Form { constant: bit, vars: Vec::new() }
                }
                None => {
                    let v = self.new_var();
                    let mut vars = vec![0u64; words_for(v + 1)];
                    set_bit(&mut vars, v, true);
                    self.forms[p] = vars.clone();
                    Form { constant: false, vars }
                }
            };
            self.rows[p] = z;
            form
        } else {
            let mut acc = PauliString::identity(n);
            let mut form = Form::default();
            for i in 0..n {
                if self.rows[i].x(q) {
                    acc.mul_assign(&self.rows[i + n]);
                    let f = &self.forms[i + n];
                    if form.vars.len() < f.len() {
                        form.vars.resize(f.len(), 0);
                    }
                    xor_into(&mut form.vars, f);
                }
            }
            debug_assert!(acc.is_z_type() && acc.phase().is_real());
            form.constant = acc.phase().is_negative();
            form
        }
    }

    /// Measures `q` symbolically.
    pub fn measure_symbolic(&mut self, q: usize) -> Form {
        self.measure_inner(q, None)
    }

    /// Measures `q`, drawing random outcomes from `rng`.
    ///
    /// Only meaningful on tableaux that have not taken symbolic measurements.
    pub fn measure_z<R: RngCore>(&mut self, q: usize, rng: &mut R) -> bool {
        let n = self.n;
        let random = (n..2 * n).any(|i| self.rows[i].x(q));
        let fixed = if random { Some(rng.next_u32() & 1 == 1) } else { None };
        self.measure_inner(q, fixed).constant
    }

    /// Resets `q` to |0> by measuring and conditionally flipping.
    pub fn reset_symbolic(&mut self, q: usize) {
        let f = self.measure_symbolic(q);
        self.conditional_x(q, &f);
    }

    fn conditional_x(&mut self, q: usize, f: &Form) {
        for i in 0..2 * self.n {
            if self.rows[i].z(q) {
                if f.constant {
                    let ph = self.rows[i].phase();
                    self.rows[i].set_phase(-ph);
                }
                let row = &mut self.forms[i];
                if row.len() < f.vars.len() {
                    row.resize(f.vars.len(), 0);
                }
                xor_into(row, &f.vars);
            }
        }
    }

    /// Runs `c` ignoring noise and returns the symbolic form of every record.
    pub fn run_symbolic(c: &CliffordCircuit) -> Vec<Form> {
        let mut t = Tableau::new(c.num_qubits());
        let mut record = Vec::with_capacity(c.num_measurements());
        for inst in c.instructions() {
            match inst {
                Instruction::Gate { gate, targets } => {
                    let k = gate.arity();
                    for pair in targets.chunks(k) {
                        t.apply_gate(*gate, pair[0], *pair.get(1).unwrap_or(&pair[0]));
                    }
                }
                Instruction::Measure { targets, .. } => {
                    for &q in targets {
                        record.push(t.measure_symbolic(q));
                    }
                }
                Instruction::Reset { targets } => {
                    for &q in targets {
                        t.reset_symbolic(q);
                    }
                }
                Instruction::Noise { .. }
                | Instruction::Detector { .. }
                | Instruction::ObservableInclude { .. } => {}
            }
            debug_assert!(t.n > 12 || t.is_valid());
        }
        record
    }
}

/// Noiseless outcome of a circuit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reference {
    /// Measurement record with every random outcome set to 0.
    pub record: Vec<bool>,
    /// Parity of each detector in that record.
    pub detectors: Vec<bool>,
    /// Parity of each observable in that record.
    pub observables: Vec<bool>,
}

fn parity_form(record: &[Form], records: &[usize]) -> Form {
    let mut f = Form::default();
    for &r in records {
        f.xor_assign(&record[r]);
    }
    f
}

/// Simulates `c` without noise and checks that every detector and observable
/// is a deterministic parity of the record.
pub fn reference(c: &CliffordCircuit) -> Result<Reference> {
    let record = Tableau::run_symbolic(c);
    let mut detectors = Vec::with_capacity(c.num_detectors());
    for (i, recs) in c.detector_records().iter().enumerate() {
        let f = parity_form(&record, recs);
        if !f.is_deterministic() {
            return Err(Error::NonDeterministic { kind: "detector", index: i });
        }
        detectors.push(f.constant);
    }
    let mut observables = Vec::with_capacity(c.num_observables());
    for (i, recs) in c.observable_records().iter().enumerate() {
        let f = parity_form(&record, recs);
        if !f.is_deterministic() {
            return Err(Error::NonDeterministic { kind: "observable", index: i });
        }
        observables.push(f.constant);
    }
    Ok(Reference { record: record.iter().map(|f| f.constant).collect(), detectors, observables })
}

/// The noiseless measurement record; fails on a non-deterministic detector or
/// observable.
pub fn reference_sample(c: &CliffordCircuit) -> Result<Vec<bool>> {
    reference(c).map(|r| r.record)
}

/// True when record `r` is a fixed bit (not merely a fixed parity).
pub fn record_is_deterministic(forms: &[Form], r: usize) -> bool {
    forms[r].is_deterministic()
}
