//! Fermion-to-qubit encodings of the spinless Fermi-Hubbard model.
//!
//! All three encodings are described through the even Majorana algebra:
//! vertex operators `V_j = -i g_{2j} g_{2j+1}` and edge operators
//! `E_ij = -i g_{2i} g_{2j}`. In these terms
//!
//! ```text
//! hopping(i, j)  = a_i^dag a_j + a_j^dag a_i = (i/2) E_ij (V_i - V_j)
//! number(j)      = (I - V_j) / 2
//! coulomb(i, j)  = number(i) number(j) = (I - V_i - V_j + V_i V_j) / 4
//! ```
//!
//! so an encoding only has to supply `V_j` and `E_ij` (see [`FermionEncoding`]).

pub mod dk;
pub mod jw;
pub mod ternary;

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lattice::SquareLattice;
use crate::pauli::{Letter, PauliString, Phase};

pub use dk::DkArtifacts;
pub use jw::JordanWigner;
pub use ternary::TernaryTree;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TermKind {
    Hopping,
    Coulomb,
    Number,
}

/// One term of the Hamiltonian, on vertex ids. `j` is unused for `Number`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FermiHubbardTerm {
    pub kind: TermKind,
    pub i: usize,
    pub j: usize,
}

impl FermiHubbardTerm {
    pub fn hopping(i: usize, j: usize) -> Self {
        FermiHubbardTerm { kind: TermKind::Hopping, i, j }
    }

    pub fn coulomb(i: usize, j: usize) -> Self {
        FermiHubbardTerm { kind: TermKind::Coulomb, i, j }
    }

    pub fn number(j: usize) -> Self {
        FermiHubbardTerm { kind: TermKind::Number, i: j, j }
    }
}

/// `H = -t sum hopping(i,j) + U sum coulomb(i,j)` over nearest neighbours of
/// the periodic lattice.
#[derive(Clone, Debug)]
pub struct FermiHubbardModel {
    pub lattice: SquareLattice,
    pub t_hop: f64,
    pub u_coulomb: f64,
    /// Coulomb terms for every edge (in edge order), then hopping terms for
    /// every edge.
    pub terms: Vec<FermiHubbardTerm>,
}

impl FermiHubbardModel {
    pub fn new(lattice: SquareLattice, t_hop: f64, u_coulomb: f64) -> Self {
        let pairs = lattice.neighbor_pairs();
        let mut terms: Vec<_> = pairs.iter().map(|&(a, b)| FermiHubbardTerm::coulomb(a, b)).collect();
        terms.extend(pairs.iter().map(|&(a, b)| FermiHubbardTerm::hopping(a, b)));
        FermiHubbardModel { lattice, t_hop, u_coulomb, terms }
    }

    pub fn num_modes(&self) -> usize {
        self.lattice.num_vertices()
    }

    /// Coefficient multiplying a term in `H`.
    pub fn coefficient(&self, term: &FermiHubbardTerm) -> f64 {
        match term.kind {
            TermKind::Hopping => -self.t_hop,
            TermKind::Coulomb => self.u_coulomb,
            TermKind::Number => 0.0,
        }
    }
}

/// A term written as a real combination of Hermitian Pauli strings.
///
/// Every Pauli carries phase `+1`; signs live in the coefficients. Summands of
/// one term mutually commute.
#[derive(Clone, Debug, PartialEq)]
pub struct EncodedTerm {
    pub term: FermiHubbardTerm,
    pub summands: Vec<(f64, PauliString)>,
}

impl EncodedTerm {
    /// Summands other than the identity.
    pub fn non_identity(&self) -> impl Iterator<Item = &(f64, PauliString)> {
        self.summands.iter().filter(|(_, p)| !p.is_identity_letters())
    }
}

/// Turns `coef * P` with a real phase on `P` into `(±coef, P with phase +1)`.
pub(crate) fn real_summand(coef: f64, p: PauliString) -> (f64, PauliString) {
    assert!(p.phase().is_real(), "summand {p} is not Hermitian");
    let c = if p.phase().is_negative() { -coef } else { coef };
    (c, p.with_phase(Phase::ONE))
}

fn times_i(p: &PauliString) -> PauliString {
    p.clone().with_phase(p.phase() * Phase::I)
}

pub trait FermionEncoding {
    fn num_modes(&self) -> usize;

    fn num_qubits(&self) -> usize;

    /// `V_j = -i g_{2j} g_{2j+1}`.
    fn vertex_op(&self, j: usize) -> Result<PauliString>;

    /// `E_ij = -i g_{2i} g_{2j}`, with `E_ji = -E_ij`.
    fn edge_op(&self, i: usize, j: usize) -> Result<PauliString>;

    fn check_mode(&self, j: usize) -> Result<()> {
        if j >= self.num_modes() {
            return Err(Error::IndexOutOfRange { index: j, len: self.num_modes() });
        }
        Ok(())
    }

    fn encode(&self, term: &FermiHubbardTerm) -> Result<EncodedTerm> {
        let n = self.num_qubits();
        let summands = match term.kind {
            TermKind::Number => {
                let v = self.vertex_op(term.i)?;
                vec_of([real_summand(0.5, PauliString::identity(n)), real_summand(-0.5, v)])
            }
            TermKind::Coulomb => {
                if term.i == term.j {
                    return Err(Error::InvalidSpec(format!("coulomb term on a single site {}", term.i)));
                }
                let vi = self.vertex_op(term.i)?;
                let vj = self.vertex_op(term.j)?;
                let vij = vi.multiply(&vj)?;
                vec_of([
                    real_summand(0.25, PauliString::identity(n)),
                    real_summand(0.25, vij),
                    real_summand(-0.25, vi),
                    real_summand(-0.25, vj),
                ])
            }
            TermKind::Hopping => {
                let e = self.edge_op(term.i, term.j)?;
                let vi = self.vertex_op(term.i)?;
                let vj = self.vertex_op(term.j)?;
                let a = times_i(&e.multiply(&vi)?);
                let b = times_i(&e.multiply(&vj)?);
                vec_of([real_summand(0.5, a), real_summand(-0.5, b)])
            }
        };
        Ok(EncodedTerm { term: *term, summands })
    }
}

fn vec_of<const N: usize>(items: [(f64, PauliString); N]) -> Vec<(f64, PauliString)> {
    items.into_iter().collect()
}

/// `-i * a * b` for two anticommuting Hermitian Paulis (a Hermitian result).
pub(crate) fn minus_i_product(a: &PauliString, b: &PauliString) -> Result<PauliString> {
    let p = a.multiply(b)?;
    Ok(p.clone().with_phase(p.phase() * Phase::MINUS_I))
}

/// Which pair of letters a hopping summand carries on its endpoints:
/// `true` for `X_i X_j` type, `false` for `Y_i Y_j` type.
pub fn is_xx_summand(p: &PauliString, i_qubit: usize) -> bool {
    p.letter(i_qubit) == Letter::X
}

/// Symplectic commutation matrix of a list of Paulis (`true` = anticommute).
pub fn anticommutation_matrix(ops: &[PauliString]) -> Vec<Vec<bool>> {
    ops.iter().map(|a| ops.iter().map(|b| a.anticommutes_unchecked(b)).collect()).collect()
}

/// The vertex operators followed by one edge operator per lattice edge
/// (oriented from lower to higher vertex id).
pub fn even_algebra_generators<E: FermionEncoding + ?Sized>(
    enc: &E,
    lattice: &SquareLattice,
) -> Result<Vec<PauliString>> {
    let mut ops = Vec::new();
    for j in 0..lattice.num_vertices() {
        ops.push(enc.vertex_op(j)?);
    }
    for (a, b) in lattice.neighbor_pairs() {
        ops.push(enc.edge_op(a, b)?);
    }
    Ok(ops)
}
