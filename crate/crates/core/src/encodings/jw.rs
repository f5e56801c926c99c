//! Jordan-Wigner encoding.
//!
//! Mode `m` sits on qubit `q = order[m]` with Majoranas
//! `g_{2m} = Z_{<q} X_q` and `g_{2m+1} = Z_{<q} Y_q`, so `V_m = Z_q` and the
//! occupation `(I - Z_q)/2` counts `|1>` as occupied.

use alloc::vec::Vec;

use super::{minus_i_product, FermionEncoding};
use crate::error::{Error, Result};
use crate::lattice::SquareLattice;
use crate::pauli::{Letter, PauliString};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JordanWigner {
    order: Vec<usize>,
}

impl JordanWigner {
    /// Mode `m` on qubit `m`.
    pub fn new(n: usize) -> Self {
        JordanWigner { order: (0..n).collect() }
    }

    /// Row-major snake order on the lattice: even rows left to right, odd
    /// rows right to left.
    pub fn snake(lattice: &SquareLattice) -> Self {
        let l = lattice.side();
        let mut order = alloc::vec![0; l * l];
        for y in 0..l {
            for x in 0..l {
                let pos = if y % 2 == 0 { x } else { l - 1 - x };
                order[y * l + x] = y * l + pos;
            }
        }
        JordanWigner { order }
    }

    /// A custom mode-to-qubit assignment (a permutation).
    pub fn with_order(order: Vec<usize>) -> Result<Self> {
        let mut seen = alloc::vec![false; order.len()];
        for &q in &order {
            if q >= order.len() || seen[q] {
                return Err(Error::InvalidSpec(alloc::format!("mode order is not a permutation")));
            }
            seen[q] = true;
        }
        Ok(JordanWigner { order })
    }

    pub fn qubit_of(&self, mode: usize) -> usize {
        self.order[mode]
    }

    /// Inverse of the mode order.
    pub fn mode_at(&self, qubit: usize) -> usize {
        self.order.iter().position(|&q| q == qubit).expect("permutation")
    }

    /// `g_{2m + b}` for `b` in `{0, 1}`.
    pub fn majorana(&self, k: usize) -> PauliString {
        let n = self.order.len();
        let q = self.order[k / 2];
        let mut p = PauliString::identity(n);
        for r in 0..q {
            p.set_letter(r, Letter::Z);
        }
        p.set_letter(q, if k % 2 == 0 { Letter::X } else { Letter::Y });
        p
    }

    pub fn majoranas(&self) -> Vec<PauliString> {
        (0..2 * self.order.len()).map(|k| self.majorana(k)).collect()
    }
}

impl FermionEncoding for JordanWigner {
    fn num_modes(&self) -> usize {
        self.order.len()
    }

    fn num_qubits(&self) -> usize {
        self.order.len()
    }

    fn vertex_op(&self, j: usize) -> Result<PauliString> {
        self.check_mode(j)?;
        Ok(PauliString::single(self.order.len(), self.order[j], Letter::Z))
    }

    fn edge_op(&self, i: usize, j: usize) -> Result<PauliString> {
        self.check_mode(i)?;
        self.check_mode(j)?;
        if i == j {
            return Err(Error::InvalidSpec(alloc::format!("edge operator on a single mode {i}")));
        }
        minus_i_product(&self.majorana(2 * i), &self.majorana(2 * j))
    }
}
