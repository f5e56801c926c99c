//! Ternary-tree encoding on a balanced tree.
//!
//! Qubits label the internal nodes breadth first: node `k` has children
//! `3k+1`, `3k+2`, `3k+3` (reached through `X`, `Y`, `Z` on qubit `k`) when
//! those are below `q`. Every missing child slot is a leaf, giving `2q + 1`
//! root-to-leaf Pauli paths, listed in depth-first `X, Y, Z` order. The last
//! one (all `Z`) is dropped.
//!
//! Mode pairing: the mode of node `k` uses the path leaving `k` through `X`
//! and the path leaving through `Y`, each continued with `Z` letters down to a
//! leaf. The pair shares everything above `k`, so `V = -i g g` is a product of
//! `Z`s and computational basis states are Slater determinants. Modes are
//! numbered by the canonical position of their `X` path.

use alloc::vec;
use alloc::vec::Vec;

use super::{minus_i_product, FermionEncoding};
use crate::bits::{get_bit, set_bit, words_for};
use crate::error::{Error, Result};
use crate::pauli::{Letter, PauliString};

const LETTERS: [Letter; 3] = [Letter::X, Letter::Y, Letter::Z];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TernaryTree {
    q: usize,
    paths: Vec<PauliString>,
    /// `(node, letter index)` of the leaf slot ending each path.
    ends: Vec<(usize, usize)>,
    /// For each mode, indices into `paths` of `g_{2m}` and `g_{2m+1}`.
    pairs: Vec<(usize, usize)>,
    node_of_mode: Vec<usize>,
}

impl TernaryTree {
    pub fn new(n_modes: usize) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::InvalidSpec(alloc::string::String::from("tree needs at least one mode")));
        }
        let q = n_modes;
        let mut paths = Vec::with_capacity(2 * q + 1);
        let mut ends = Vec::with_capacity(2 * q + 1);
        let mut stack_prefix = PauliString::identity(q);
        Self::walk(q, 0, &mut stack_prefix, &mut paths, &mut ends);
        debug_assert_eq!(paths.len(), 2 * q + 1);

        let child = |k: usize, a: usize| {
            let c = 3 * k + 1 + a;
            (c < q).then_some(c)
        };
        let leaf_below = |k: usize, a: usize| {
            let (mut node, mut slot) = (k, a);
            while let Some(c) = child(node, slot) {
                node = c;
                slot = 2;
            }
            ends.iter().position(|&e| e == (node, slot)).expect("leaf exists")
        };
        let mut by_node: Vec<(usize, usize, usize)> =
            (0..q).map(|k| (leaf_below(k, 0), leaf_below(k, 1), k)).collect();
        by_node.sort_unstable();
        let pairs = by_node.iter().map(|&(a, b, _)| (a, b)).collect();
        let node_of_mode = by_node.iter().map(|&(_, _, k)| k).collect();

        // Drop the all-Z path, which is last in canonical order.
        paths.pop();
        ends.pop();
        Ok(TernaryTree { q, paths, ends, pairs, node_of_mode })
    }

    fn walk(q: usize, k: usize, prefix: &mut PauliString, paths: &mut Vec<PauliString>, ends: &mut Vec<(usize, usize)>) {
        for (a, &letter) in LETTERS.iter().enumerate() {
            prefix.set_letter(k, letter);
            let c = 3 * k + 1 + a;
            if c < q {
                Self::walk(q, c, prefix, paths, ends);
            } else {
                paths.push(prefix.clone());
                ends.push((k, a));
            }
        }
        prefix.set_letter(k, Letter::I);
    }

    pub fn num_qubits(&self) -> usize {
        self.q
    }

    /// Selected paths (the `2q` Majoranas) in canonical order.
    pub fn paths(&self) -> &[PauliString] {
        &self.paths
    }

    /// All `2q + 1` root-to-leaf paths, including the dropped one.
    pub fn all_paths(&self) -> Vec<PauliString> {
        let mut v = self.paths.clone();
        let mut z = PauliString::identity(self.q);
        let mut k = 0;
        loop {
            z.set_letter(k, Letter::Z);
            if 3 * k + 3 >= self.q {
                break;
            }
            k = 3 * k + 3;
        }
        v.push(z);
        v
    }

    pub fn node_of_mode(&self, m: usize) -> usize {
        self.node_of_mode[m]
    }

    /// `g_k` for `k` in `0..2q`.
    pub fn majorana(&self, k: usize) -> &PauliString {
        let (a, b) = self.pairs[k / 2];
        &self.paths[if k % 2 == 0 { a } else { b }]
    }

    pub fn majoranas(&self) -> Vec<PauliString> {
        (0..2 * self.q).map(|k| self.majorana(k).clone()).collect()
    }

    /// Average weight of the selected Majoranas.
    pub fn average_weight(&self) -> f64 {
        let total: usize = self.paths.iter().map(|p| p.weight()).sum();
        total as f64 / self.paths.len() as f64
    }

    /// Computational basis state `b` with `V_m b = (-1)^{v_m} b` for every
    /// mode, found by solving the linear system over GF(2).
    pub fn basis_state_for(&self, v: &[bool]) -> Result<Vec<bool>> {
        let q = self.q;
        if v.len() != q {
            return Err(Error::LengthMismatch { expected: q, found: v.len() });
        }
        // Row m: z-mask of V_m | rhs bit.
        let mut rows: Vec<Vec<u64>> = (0..q)
            .map(|m| {
                let vm = self.vertex_op(m).expect("mode in range");
                let mut r = vec![0u64; words_for(q + 1)];
                for j in 0..q {
                    set_bit(&mut r, j, vm.z(j));
                }
                set_bit(&mut r, q, v[m] ^ vm.phase().is_negative());
                r
            })
            .collect();
        for col in 0..q {
            let p = (col..q).find(|&r| get_bit(&rows[r], col)).expect("vertex operators are independent");
            rows.swap(col, p);
            let pivot = rows[col].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != col && get_bit(row, col) {
                    for (a, b) in row.iter_mut().zip(&pivot) {
                        *a ^= b;
                    }
                }
            }
        }
        Ok((0..q).map(|j| get_bit(&rows[j], q)).collect())
    }

    /// Leaf slot of each selected path, as `(node, letter)`.
    pub fn leaf_slots(&self) -> Vec<(usize, Letter)> {
        self.ends.iter().map(|&(k, a)| (k, LETTERS[a])).collect()
    }
}

impl FermionEncoding for TernaryTree {
    fn num_modes(&self) -> usize {
        self.q
    }

    fn num_qubits(&self) -> usize {
        self.q
    }

    fn vertex_op(&self, j: usize) -> Result<PauliString> {
        self.check_mode(j)?;
        minus_i_product(self.majorana(2 * j), self.majorana(2 * j + 1))
    }

    fn edge_op(&self, i: usize, j: usize) -> Result<PauliString> {
        self.check_mode(i)?;
        self.check_mode(j)?;
        if i == j {
            return Err(Error::InvalidSpec(alloc::format!("edge operator on a single mode {i}")));
        }
        minus_i_product(self.majorana(2 * i), self.majorana(2 * j))
    }
}

#[cfg(test)]
mod tests {
    use super::super::{FermiHubbardTerm, FermionEncoding};
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn four_mode_tree_matches_figure() {
        let t = TernaryTree::new(4).unwrap();
        let all: Vec<_> = t.all_paths().iter().map(|p| p.to_string()).collect();
        assert_eq!(
            all,
            vec!["+XXII", "+XYII", "+XZII", "+YIXI", "+YIYI", "+YIZI", "+ZIIX", "+ZIIY", "+ZIIZ"]
        );
        let ps = t.all_paths();
        for (a, x) in ps.iter().enumerate() {
            for (b, y) in ps.iter().enumerate() {
                assert_eq!(x.anticommutes_unchecked(y), a != b);
            }
        }
    }

    #[test]
    fn single_mode() {
        let t = TernaryTree::new(1).unwrap();
        assert_eq!(t.majoranas(), vec!["X".parse().unwrap(), "Y".parse::<PauliString>().unwrap()]);
    }

    #[test]
    fn number_operator_of_mode_zero() {
        let t = TernaryTree::new(4).unwrap();
        let e = t.encode(&FermiHubbardTerm::number(0)).unwrap();
        assert_eq!(e.summands, vec![(0.5, "IIII".parse().unwrap()), (-0.5, "IZII".parse().unwrap())]);
    }

    #[test]
    fn vertex_ops_are_z_type() {
        for n in [1, 2, 4, 5, 13, 16, 40] {
            let t = TernaryTree::new(n).unwrap();
            for m in 0..n {
                assert!(t.vertex_op(m).unwrap().is_z_type());
            }
        }
    }

    #[test]
    fn path_weights_are_logarithmic() {
        for n in [4, 13, 16, 40] {
            let t = TernaryTree::new(n).unwrap();
            let bound = libm::ceil(libm::log((2 * n + 1) as f64) / libm::log(3.0)) as usize;
            assert!(t.all_paths().iter().all(|p| p.weight() <= bound), "n={n}");
            assert!(t.average_weight() >= libm::log((2 * n) as f64) / libm::log(3.0) - 1e-9);
        }
    }

    #[test]
    fn basis_states_realize_occupations() {
        let t = TernaryTree::new(13).unwrap();
        let v: Vec<bool> = (0..13).map(|i| i % 3 == 1).collect();
        let b = t.basis_state_for(&v).unwrap();
        for (m, &vm) in v.iter().enumerate() {
            let op = t.vertex_op(m).unwrap();
            let parity = (0..13).filter(|&j| op.z(j) && b[j]).count() % 2 == 1;
            assert_eq!(parity ^ op.phase().is_negative(), vm);
        }
    }
}
