//! Derby-Klassen (compact) encoding on the periodic square lattice.
//!
//! `V_j = Z_j` on vertex qubits. For an edge pointing from `i` to `j` with
//! blue face qubit `f`:
//!
//! ```text
//! E_ij =  X_i Y_j Y_f   horizontal
//! E_ij =  X_i Y_j X_f   vertical, pointing down
//! E_ij = -X_i Y_j X_f   vertical, pointing up
//! E_ji = -E_ij
//! ```
//!
//! `S_k` is the product of the edge operators around red face `k`, taken
//! clockwise from the upper-left corner. It equals `c_k R_k T_k` where `R_k`
//! (vertex part) and `T_k` (face part) carry phase `+1` and `c_k = ±1`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use super::{real_summand, EncodedTerm, FermiHubbardTerm, FermionEncoding};
use crate::error::{Error, Result};
use crate::lattice::{Orientation, SquareLattice};
use crate::pauli::{compute_destabilizers, recovery_from_syndrome, GeneratorSet, Letter, PauliString, Phase};

#[derive(Clone, Debug)]
pub struct DkArtifacts {
    lattice: SquareLattice,
    vertex_ops: Vec<PauliString>,
    /// Per edge id, oriented tail to head, before sign updates.
    edge_ops: Vec<PauliString>,
    edge_flips: Vec<bool>,
    stabilizers: Vec<PauliString>,
    t_ops: Vec<PauliString>,
    r_ops: Vec<PauliString>,
    /// Indices of an independent subset of the stabilizers and one
    /// destabilizer for each of them.
    stab_basis: Vec<usize>,
    stab_destabilizers: Vec<PauliString>,
    t_basis: Vec<usize>,
    t_destabilizers: Vec<PauliString>,
}

/// Keeps the generators that are independent of earlier ones and computes
/// their destabilizers.
fn independent_destabilizers(ops: &[PauliString]) -> Result<(Vec<usize>, Vec<PauliString>)> {
    let mut basis = Vec::new();
    let mut kept: Vec<PauliString> = Vec::new();
    let mut rank = 0;
    for (k, op) in ops.iter().enumerate() {
        kept.push(op.clone());
        let r = GeneratorSet::new(kept.clone())?.rank();
        if r > rank {
            rank = r;
            basis.push(k);
        } else {
            kept.pop();
        }
    }
    let mut gens = GeneratorSet::new(kept)?;
    gens.verify_independent()?;
    Ok((basis, compute_destabilizers(&gens)?))
}

impl DkArtifacts {
    pub fn new(lattice: SquareLattice) -> Result<Self> {
        if lattice.side() < 4 {
            return Err(Error::InvalidSpec(format!(
                "the DK encoding needs L >= 4, got L = {}",
                lattice.side()
            )));
        }
        let n = lattice.num_qubits();
        let vertex_ops: Vec<_> = (0..lattice.num_vertices()).map(|v| PauliString::single(n, v, Letter::Z)).collect();
        let mut edge_ops = Vec::with_capacity(lattice.edges().len());
        for e in lattice.edges() {
            let f = lattice.face_qubit(lattice.face_of_edge(e.id))?;
            let (face_letter, phase) = match e.orientation {
                Orientation::Right | Orientation::Left => (Letter::Y, Phase::ONE),
                Orientation::Down => (Letter::X, Phase::ONE),
                Orientation::Up => (Letter::X, Phase::MINUS_ONE),
            };
            let op = PauliString::from_sparse(n, &[(e.tail, Letter::X), (e.head, Letter::Y), (f, face_letter)])?
                .with_phase(phase);
            edge_ops.push(op);
        }
        let mut art = DkArtifacts {
            edge_flips: alloc::vec![false; edge_ops.len()],
            lattice,
            vertex_ops,
            edge_ops,
            stabilizers: Vec::new(),
            t_ops: Vec::new(),
            r_ops: Vec::new(),
            stab_basis: Vec::new(),
            stab_destabilizers: Vec::new(),
            t_basis: Vec::new(),
            t_destabilizers: Vec::new(),
        };
        let faces: Vec<usize> = art.lattice.red_faces().to_vec();
        let vertex_set: Vec<usize> = (0..art.lattice.num_vertices()).collect();
        let face_set: Vec<usize> = (art.lattice.num_vertices()..n).collect();
        for &face in &faces {
            let s = art.loop_product(face)?;
            art.r_ops.push(s.restrict(&vertex_set)?);
            art.t_ops.push(s.restrict(&face_set)?);
            art.stabilizers.push(s);
        }
        (art.stab_basis, art.stab_destabilizers) = independent_destabilizers(&art.stabilizers)?;
        (art.t_basis, art.t_destabilizers) = independent_destabilizers(&art.t_ops)?;
        art.validate()?;
        Ok(art)
    }

    /// Checks the algebraic invariants of the encoding.
    pub fn validate(&self) -> Result<()> {
        let gens = GeneratorSet::new(self.stabilizers.clone())?;
        gens.check_commuting()?;
        for (k, s) in self.stabilizers.iter().enumerate() {
            if s.weight() != 8 || !s.phase().is_real() {
                return Err(Error::InvalidSpec(format!("stabilizer {k} is malformed: {s}")));
            }
            for (j, op) in self.vertex_ops.iter().chain(&self.edge_ops).enumerate() {
                if s.anticommutes_unchecked(op) {
                    return Err(Error::NonCommuting { first: k, second: j });
                }
            }
        }
        for (e, op) in self.edge_ops.iter().enumerate() {
            let edge = self.lattice.edge(e);
            for (v, vop) in self.vertex_ops.iter().enumerate() {
                let touches = v == edge.tail || v == edge.head;
                if op.anticommutes_unchecked(vop) != touches {
                    return Err(Error::NonCommuting { first: e, second: v });
                }
            }
        }
        Ok(())
    }

    pub fn lattice(&self) -> &SquareLattice {
        &self.lattice
    }

    pub fn num_qubits(&self) -> usize {
        self.lattice.num_qubits()
    }

    pub fn vertex_ops(&self) -> &[PauliString] {
        &self.vertex_ops
    }

    /// Edge operator of edge `e` in its own orientation, with the current sign.
    pub fn edge_op_by_id(&self, e: usize) -> PauliString {
        let op = self.edge_ops[e].clone();
        if self.edge_flips[e] {
            op.negated()
        } else {
            op
        }
    }

    pub fn edge_flips(&self) -> &[bool] {
        &self.edge_flips
    }

    pub fn stabilizers(&self) -> &[PauliString] {
        &self.stabilizers
    }

    /// Face-qubit part of each stabilizer.
    pub fn t_ops(&self) -> &[PauliString] {
        &self.t_ops
    }

    /// Vertex-qubit part of each stabilizer.
    pub fn r_ops(&self) -> &[PauliString] {
        &self.r_ops
    }

    /// `c_k` in `S_k = c_k R_k T_k`; `true` means `-1`.
    pub fn stabilizer_sign(&self, k: usize) -> bool {
        self.stabilizers[k].phase().is_negative()
    }

    /// Stabilizers with a destabilizer. On the torus the product of all
    /// `S_k` is the identity, so one generator is left out.
    pub fn stabilizer_basis(&self) -> &[usize] {
        &self.stab_basis
    }

    /// Destabilizers aligned with [`Self::stabilizer_basis`].
    pub fn stabilizer_destabilizers(&self) -> &[PauliString] {
        &self.stab_destabilizers
    }

    pub fn t_basis(&self) -> &[usize] {
        &self.t_basis
    }

    /// Destabilizers aligned with [`Self::t_basis`].
    pub fn t_destabilizers(&self) -> &[PauliString] {
        &self.t_destabilizers
    }

    /// Recovery operator for a full stabilizer syndrome (`true` = `-1`).
    ///
    /// The syndrome must respect the global constraint that the product of
    /// all stabilizers is `+I`, i.e. have an even number of `-1` entries.
    pub fn recovery(&self, syndrome: &[bool]) -> Result<PauliString> {
        let k = self.stabilizers.len();
        if syndrome.len() != k {
            return Err(Error::LengthMismatch { expected: k, found: syndrome.len() });
        }
        if syndrome.iter().filter(|&&b| b).count() % 2 != 0 {
            return Err(Error::InvalidSpec(String::from(
                "syndrome has an odd number of -1 entries but the product of all stabilizers is +I",
            )));
        }
        let reduced: Vec<bool> = self.stab_basis.iter().map(|&i| syndrome[i]).collect();
        recovery_from_syndrome(&self.stab_destabilizers, &reduced)
    }

    /// Face qubit of the blue face next to edge `e`.
    pub fn face_qubit_of_edge(&self, e: usize) -> usize {
        self.lattice.face_qubit(self.lattice.face_of_edge(e)).expect("blue face")
    }

    /// Red-face index and boundary position (0 top, 1 right, 2 bottom,
    /// 3 left) of an edge.
    pub fn edge_position(&self, e: usize) -> (usize, usize) {
        let face = self.lattice.red_face_of_edge(e);
        let b = self.lattice.red_face_boundary(face).expect("red face");
        let pos = b.edges.iter().position(|&x| x == e).expect("edge on boundary");
        (self.lattice.red_index(face).expect("red"), pos)
    }

    /// Product of the current edge operators around a red face, clockwise
    /// from the upper-left corner.
    pub fn loop_product(&self, face: usize) -> Result<PauliString> {
        let b = self.lattice.red_face_boundary(face)?;
        let mut acc = PauliString::identity(self.num_qubits());
        for k in 0..4 {
            let (from, to) = (b.corners[k], b.corners[(k + 1) % 4]);
            acc = acc.multiply(&self.edge_op(from, to)?)?;
        }
        Ok(acc)
    }

    /// Flips the sign of every edge operator anticommuting with the recovery
    /// operator of `syndrome` (`true` = `-1` outcome). See [`Self::recovery`].
    pub fn update_edge_signs(&mut self, syndrome: &[bool]) -> Result<()> {
        let rec = self.recovery(syndrome)?;
        for (e, op) in self.edge_ops.iter().enumerate() {
            if op.anticommutes_unchecked(&rec) {
                self.edge_flips[e] ^= true;
            }
        }
        Ok(())
    }

    /// Hopping term along edge `e` (tail to head), built from that edge's own
    /// operator. Unlike [`FermionEncoding::encode`] this stays unambiguous on
    /// `L = 2`, where two edges join the same pair of vertices.
    pub fn hopping_on_edge(&self, e: usize) -> Result<EncodedTerm> {
        let edge = *self.lattice.edge(e);
        let op = self.edge_op_by_id(e);
        let a = op.multiply(&self.vertex_ops[edge.tail])?;
        let b = op.multiply(&self.vertex_ops[edge.head])?;
        let a = a.clone().with_phase(a.phase() * Phase::I);
        let b = b.clone().with_phase(b.phase() * Phase::I);
        Ok(EncodedTerm {
            term: FermiHubbardTerm::hopping(edge.tail, edge.head),
            summands: alloc::vec![real_summand(0.5, a), real_summand(-0.5, b)],
        })
    }

    /// Text listing of vertex, edge and stabilizer operators.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# DK operators L={}", self.lattice.side());
        for (j, v) in self.vertex_ops.iter().enumerate() {
            let _ = writeln!(s, "V {j} {v}");
        }
        for e in self.lattice.edges() {
            let _ = writeln!(s, "E {} {}->{} {}", e.id, e.tail, e.head, self.edge_op_by_id(e.id));
        }
        for (k, st) in self.stabilizers.iter().enumerate() {
            let _ = writeln!(s, "S {k} face={} {st}", self.lattice.red_faces()[k]);
        }
        s
    }
}

impl FermionEncoding for DkArtifacts {
    fn num_modes(&self) -> usize {
        self.lattice.num_vertices()
    }

    fn num_qubits(&self) -> usize {
        self.lattice.num_qubits()
    }

    fn vertex_op(&self, j: usize) -> Result<PauliString> {
        self.check_mode(j)?;
        Ok(self.vertex_ops[j].clone())
    }

    fn edge_op(&self, i: usize, j: usize) -> Result<PauliString> {
        self.check_mode(i)?;
        self.check_mode(j)?;
        let e = self
            .lattice
            .edge_between(i, j)
            .ok_or_else(|| Error::InvalidSpec(format!("vertices {i} and {j} are not adjacent")))?;
        let op = self.edge_op_by_id(e.id);
        Ok(if e.tail == i { op } else { op.negated() })
    }
}

#[cfg(test)]
mod tests {
    use alloc::vec;

    use super::super::{FermiHubbardTerm, FermionEncoding};
    use super::*;

    fn art(l: usize) -> DkArtifacts {
        DkArtifacts::new(SquareLattice::new(l).unwrap()).unwrap()
    }

    #[test]
    fn counts_l4() {
        let a = art(4);
        assert_eq!(a.vertex_ops().len(), 16);
        assert_eq!(a.lattice().edges().len(), 32);
        assert_eq!(a.stabilizers().len(), 8);
        assert!(a.stabilizers().iter().all(|s| s.weight() == 8));
    }

    #[test]
    fn stabilizer_letters() {
        let a = art(4);
        let lat = a.lattice();
        for (k, &face) in lat.red_faces().iter().enumerate() {
            let b = lat.red_face_boundary(face).unwrap();
            let s = &a.stabilizers()[k];
            for c in b.corners {
                assert_eq!(s.letter(c), Letter::Z);
            }
            for f in b.horizontal_neighbors {
                assert_eq!(s.letter(lat.face_qubit(f).unwrap()), Letter::X);
            }
            for f in b.vertical_neighbors {
                assert_eq!(s.letter(lat.face_qubit(f).unwrap()), Letter::Y);
            }
            assert_eq!(a.r_ops()[k].weight(), 4);
            assert!(a.r_ops()[k].is_z_type());
        }
    }

    #[test]
    fn edge_operator_forms() {
        let a = art(4);
        let lat = a.lattice();
        for e in lat.edges() {
            let op = a.edge_op(e.tail, e.head).unwrap();
            let f = a.face_qubit_of_edge(e.id);
            assert_eq!(op.letter(e.tail), Letter::X);
            assert_eq!(op.letter(e.head), Letter::Y);
            let expect = if e.is_horizontal() { Letter::Y } else { Letter::X };
            assert_eq!(op.letter(f), expect);
            assert_eq!(a.edge_op(e.head, e.tail).unwrap(), op.clone().negated());
            assert_eq!(op.phase().is_negative(), e.orientation == Orientation::Up);
        }
    }

    #[test]
    fn edges_anticommute_iff_sharing_one_vertex() {
        let a = art(4);
        let edges = a.lattice().edges();
        for x in edges {
            for y in edges {
                let shared = [x.tail, x.head].iter().filter(|v| **v == y.tail || **v == y.head).count();
                let anti = a.edge_op_by_id(x.id).anticommutes_unchecked(&a.edge_op_by_id(y.id));
                assert_eq!(anti, shared == 1, "edges {} {}", x.id, y.id);
            }
        }
    }

    #[test]
    fn horizontal_hopping_form() {
        let a = art(4);
        // Edge 0 points right from vertex 0 to 1; its blue face is face 0.
        let t = a.encode(&FermiHubbardTerm::hopping(0, 1)).unwrap();
        let f = a.face_qubit_of_edge(0);
        let xx = PauliString::from_sparse(24, &[(0, Letter::X), (1, Letter::X), (f, Letter::Y)]).unwrap();
        let yy = PauliString::from_sparse(24, &[(0, Letter::Y), (1, Letter::Y), (f, Letter::Y)]).unwrap();
        assert_eq!(t.summands, vec![(0.5, yy), (0.5, xx)]);
        assert!(a.encode(&FermiHubbardTerm::hopping(0, 5)).is_err());
    }

    #[test]
    fn hopping_commutes_with_stabilizers() {
        let a = art(4);
        for (i, j) in a.lattice().neighbor_pairs() {
            let t = a.encode(&FermiHubbardTerm::hopping(i, j)).unwrap();
            for (_, p) in &t.summands {
                assert!(a.stabilizers().iter().all(|s| !s.anticommutes_unchecked(p)));
            }
        }
    }

    #[test]
    fn stabilizers_multiply_to_identity() {
        let a = art(4);
        let mut acc = PauliString::identity(24);
        for s in a.stabilizers() {
            acc.mul_assign(s);
        }
        assert_eq!(acc, PauliString::identity(24));
        assert_eq!(a.stabilizer_basis(), &[0, 1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn destabilizer_pattern() {
        let a = art(4);
        for (i, d) in a.stabilizer_destabilizers().iter().enumerate() {
            for (j, &k) in a.stabilizer_basis().iter().enumerate() {
                assert_eq!(d.anticommutes_unchecked(&a.stabilizers()[k]), i == j);
            }
        }
        for (i, d) in a.t_destabilizers().iter().enumerate() {
            for (j, &k) in a.t_basis().iter().enumerate() {
                assert_eq!(d.anticommutes_unchecked(&a.t_ops()[k]), i == j);
            }
        }
    }

    #[test]
    fn edge_sign_updates() {
        let mut a = art(4);
        a.update_edge_signs(&[false; 8]).unwrap();
        assert!(a.edge_flips().iter().all(|f| !f));
        let mut syn = [false; 8];
        syn[3] = true;
        assert!(a.update_edge_signs(&syn).is_err());
        syn[6] = true;
        a.update_edge_signs(&syn).unwrap();
        assert!(a.edge_flips().iter().any(|&f| f));
        for (k, &face) in a.lattice().red_faces().iter().enumerate() {
            let lp = a.loop_product(face).unwrap();
            let expect = if syn[k] { a.stabilizers()[k].clone().negated() } else { a.stabilizers()[k].clone() };
            assert_eq!(lp, expect);
        }
        a.update_edge_signs(&syn).unwrap();
        assert!(a.edge_flips().iter().all(|f| !f));
    }

    #[test]
    fn single_qubit_errors() {
        let a = art(4);
        let n = a.num_qubits();
        for q in 0..n {
            for l in [Letter::X, Letter::Y] {
                let e = PauliString::single(n, q, l);
                assert!(a.stabilizers().iter().any(|s| s.anticommutes_unchecked(&e)));
            }
        }
        for v in 0..16 {
            let e = PauliString::single(n, v, Letter::Z);
            assert!(a.stabilizers().iter().all(|s| !s.anticommutes_unchecked(&e)));
        }
    }

    #[test]
    fn flipped_colors_keep_the_algebra() {
        let a = DkArtifacts::new(SquareLattice::with_parity(4, true).unwrap()).unwrap();
        assert!(a.validate().is_ok());
        assert_eq!(a.stabilizers().len(), 8);
    }
}
