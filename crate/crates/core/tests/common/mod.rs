//! Dense matrix oracle for small qubit counts. Qubit `q` is bit `q` of the
//! basis-state index.

#![allow(dead_code)]

use fermistab_core::{CliffordCircuit, Gate, Instruction, Letter, PauliString};
use num_complex::Complex64 as C;

pub type Mat = Vec<C>;

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);
const I: C = C::new(0.0, 1.0);

pub fn identity(dim: usize) -> Mat {
    let mut m = vec![ZERO; dim * dim];
    for i in 0..dim {
        m[i * dim + i] = ONE;
    }
    m
}

pub fn dim_of(m: &Mat) -> usize {
    (m.len() as f64).sqrt().round() as usize
}

pub fn mul(a: &Mat, b: &Mat) -> Mat {
    let d = dim_of(a);
    let mut out = vec![ZERO; d * d];
    for i in 0..d {
        for k in 0..d {
            let x = a[i * d + k];
            if x == ZERO {
                continue;
            }
            for j in 0..d {
                out[i * d + j] += x * b[k * d + j];
            }
        }
    }
    out
}

pub fn adjoint(a: &Mat) -> Mat {
    let d = dim_of(a);
    let mut out = vec![ZERO; d * d];
    for i in 0..d {
        for j in 0..d {
            out[j * d + i] = a[i * d + j].conj();
        }
    }
    out
}

pub fn scale(a: &Mat, s: C) -> Mat {
    a.iter().map(|x| x * s).collect()
}

pub fn add(a: &Mat, b: &Mat) -> Mat {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn trace(a: &Mat) -> C {
    let d = dim_of(a);
    (0..d).map(|i| a[i * d + i]).sum()
}

pub fn close(a: &Mat, b: &Mat) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).norm() < 1e-9)
}

/// Equal up to a global phase.
pub fn close_up_to_phase(a: &Mat, b: &Mat) -> bool {
    let Some((i, _)) = b.iter().enumerate().max_by(|x, y| x.1.norm().total_cmp(&y.1.norm())) else {
        return true;
    };
    if a[i].norm() < 1e-9 {
        return false;
    }
    let ph = a[i] / b[i];
    (ph.norm() - 1.0).abs() < 1e-9 && close(a, &scale(b, ph))
}

fn letter_matrix(l: Letter) -> [C; 4] {
    match l {
        Letter::I => [ONE, ZERO, ZERO, ONE],
        Letter::X => [ZERO, ONE, ONE, ZERO],
        Letter::Y => [ZERO, -I, I, ZERO],
        Letter::Z => [ONE, ZERO, ZERO, -ONE],
    }
}

/// Applies a 2x2 matrix to qubit `q` of an `n`-qubit operator from the left.
pub fn embed1(u: [C; 4], q: usize, n: usize) -> Mat {
    let d = 1 << n;
    let mut m = vec![ZERO; d * d];
    for col in 0..d {
        let b = (col >> q) & 1;
        for a in 0..2 {
            let row = (col & !(1 << q)) | (a << q);
            m[row * d + col] += u[a * 2 + b];
        }
    }
    m
}

/// Embeds a 4x4 matrix on qubits `(a, b)`, with `a` the high bit of the
/// local index.
pub fn embed2(u: &[C; 16], a: usize, b: usize, n: usize) -> Mat {
    let d = 1 << n;
    let mut m = vec![ZERO; d * d];
    for col in 0..d {
        let lc = (((col >> a) & 1) << 1) | ((col >> b) & 1);
        for lr in 0..4 {
            let v = u[lr * 4 + lc];
            if v == ZERO {
                continue;
            }
            let row = (col & !(1 << a) & !(1 << b)) | ((lr >> 1) << a) | ((lr & 1) << b);
            m[row * d + col] += v;
        }
    }
    m
}

pub fn pauli_matrix(p: &PauliString) -> Mat {
    let n = p.num_qubits();
    let mut m = identity(1 << n);
    for q in 0..n {
        m = mul(&embed1(letter_matrix(p.letter(q)), q, n), &m);
    }
    let ph = [ONE, I, -ONE, -I][p.phase().exponent() as usize];
    scale(&m, ph)
}

fn controlled(u: [C; 4]) -> [C; 16] {
    let mut m = [ZERO; 16];
    m[0] = ONE;
    m[5] = ONE;
    m[10] = u[0];
    m[11] = u[1];
    m[14] = u[2];
    m[15] = u[3];
    m
}

/// Standard matrices of every gate, on qubits `a` (and `b`).
pub fn gate_matrix(g: Gate, a: usize, b: usize, n: usize) -> Mat {
    let h = 0.5f64.sqrt();
    let half = |x: C| x * 0.5;
    let one = match g {
        Gate::H => Some([C::new(h, 0.0), C::new(h, 0.0), C::new(h, 0.0), C::new(-h, 0.0)]),
        Gate::S => Some([ONE, ZERO, ZERO, I]),
        Gate::SDag => Some([ONE, ZERO, ZERO, -I]),
        Gate::SqrtX => Some([half(ONE + I), half(ONE - I), half(ONE - I), half(ONE + I)]),
        Gate::SqrtXDag => Some([half(ONE - I), half(ONE + I), half(ONE + I), half(ONE - I)]),
        Gate::SqrtY => Some([half(ONE + I), half(-ONE - I), half(ONE + I), half(ONE + I)]),
        Gate::SqrtYDag => Some([half(ONE - I), half(ONE - I), half(-ONE + I), half(ONE - I)]),
        Gate::X => Some(letter_matrix(Letter::X)),
        Gate::Y => Some(letter_matrix(Letter::Y)),
        Gate::Z => Some(letter_matrix(Letter::Z)),
        _ => None,
    };
    if let Some(u) = one {
        return embed1(u, a, n);
    }
    let two = match g {
        Gate::CX => controlled(letter_matrix(Letter::X)),
        Gate::CY => controlled(letter_matrix(Letter::Y)),
        Gate::CZ => controlled(letter_matrix(Letter::Z)),
        Gate::Swap => {
            let mut m = [ZERO; 16];
            m[0] = ONE;
            m[6] = ONE;
            m[9] = ONE;
            m[15] = ONE;
            m
        }
        _ => unreachable!(),
    };
    embed2(&two, a, b, n)
}

/// Unitary of a gate-only circuit.
pub fn circuit_unitary(c: &CliffordCircuit) -> Mat {
    let n = c.num_qubits();
    let mut u = identity(1 << n);
    for inst in c.instructions() {
        let Instruction::Gate { gate, targets } = inst else {
            panic!("not a gate-only circuit");
        };
        for t in targets.chunks(gate.arity()) {
            u = mul(&gate_matrix(*gate, t[0], *t.get(1).unwrap_or(&t[0]), n), &u);
        }
    }
    u
}
