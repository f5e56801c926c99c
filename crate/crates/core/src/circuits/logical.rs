//! Logical circuits: Trotter steps for each encoding, random term sequences
//! and mirroring.

use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::gadgets::{emit_rotation, CliffordAngle};
use crate::circuit::{CliffordCircuit, Gate};
use crate::encodings::{DkArtifacts, EncodedTerm, FermiHubbardModel, FermiHubbardTerm, FermionEncoding, TermKind};
use crate::error::{Error, Result};
use crate::pauli::{Letter, PauliString};

/// A logical circuit together with the instruction indices between which
/// it may be cut without splitting a rotation or a swap.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Fragment {
    pub circuit: CliffordCircuit,
    /// Increasing, starts at 0 and ends at `circuit.len()`.
    pub cuts: Vec<usize>,
}

impl Fragment {
    pub fn new(num_qubits: usize) -> Self {
        Fragment { circuit: CliffordCircuit::new(num_qubits), cuts: vec![0] }
    }

    fn cut(&mut self) {
        let n = self.circuit.len();
        if self.cuts.last() != Some(&n) {
            self.cuts.push(n);
        }
    }

    pub fn rotation(&mut self, p: &PauliString, k: i32) {
        emit_rotation(&mut self.circuit, p, k);
        self.cut();
    }

    /// The largest cut not after instruction `target`.
    pub fn cut_before(&self, target: usize) -> usize {
        self.cuts.iter().copied().filter(|&c| c <= target).max().unwrap_or(0)
    }
}

/// Emits one rotation per non-identity summand of `term`, with angle sign
/// taken from `coef` times the summand coefficient.
pub fn emit_term(f: &mut Fragment, term: &EncodedTerm, coef: f64, angle: CliffordAngle) {
    for (s, p) in term.non_identity() {
        let w = s * coef;
        if w == 0.0 {
            continue;
        }
        let k = if w > 0.0 { angle.eighths() } else { -angle.eighths() };
        f.rotation(p, k);
    }
}

/// Encoded term `t` of the model (index into `model.terms`) under DK. Terms
/// are resolved by edge id so that `L = 2` (doubled edges) works.
fn dk_term(art: &DkArtifacts, model: &FermiHubbardModel, t: usize) -> Result<EncodedTerm> {
    let edges = model.lattice.edges().len();
    match model.terms[t].kind {
        TermKind::Hopping => art.hopping_on_edge(t - edges),
        _ => art.encode(&model.terms[t]),
    }
}

/// Hopping edges of the DK lattice grouped into layers of disjoint support,
/// by first-fit colouring in edge-id order.
pub fn dk_hopping_layers(art: &DkArtifacts) -> Vec<Vec<usize>> {
    let lat = art.lattice();
    let mut layers: Vec<(Vec<usize>, Vec<bool>)> = Vec::new();
    for e in lat.edges() {
        let support = [e.tail, e.head, art.face_qubit_of_edge(e.id)];
        let slot = layers.iter().position(|(_, used)| support.iter().all(|&q| !used[q]));
        let slot = slot.unwrap_or_else(|| {
            layers.push((Vec::new(), vec![false; art.num_qubits()]));
            layers.len() - 1
        });
        layers[slot].0.push(e.id);
        for q in support {
            layers[slot].1[q] = true;
        }
    }
    layers.into_iter().map(|(l, _)| l).collect()
}

/// `steps` DK Trotter steps: all Coulomb rotations (Z only, mutually
/// commuting), then hopping rotations layer by layer.
pub fn build_trotter_dk(
    art: &DkArtifacts,
    model: &FermiHubbardModel,
    steps: usize,
    angle: CliffordAngle,
) -> Result<Fragment> {
    let mut c = Fragment::new(art.num_qubits());
    let edges = model.lattice.edges().len();
    let layers = dk_hopping_layers(art);
    for _ in 0..steps {
        for t in 0..edges {
            let term = model.terms[t];
            emit_term(&mut c, &art.encode(&term)?, model.coefficient(&term), angle);
        }
        for layer in &layers {
            for &e in layer {
                let term = art.hopping_on_edge(e)?;
                emit_term(&mut c, &term, model.coefficient(&term.term), angle);
            }
        }
    }
    Ok(c)
}

/// Fermionic swap of neighbouring JW positions: SWAP followed by CZ.
pub fn emit_fswap(f: &mut Fragment, a: usize, b: usize) {
    f.circuit.gate2(Gate::Swap, a, b);
    f.circuit.gate2(Gate::CZ, a, b);
    f.cut();
}

/// Coulomb and hopping rotations between JW positions `q` and `q + 1`.
fn emit_adjacent_pair(c: &mut Fragment, n: usize, q: usize, model: &FermiHubbardModel, angle: CliffordAngle) {
    let u = model.u_coulomb;
    let t = -model.t_hop;
    let pair = |a: Letter, b: Letter| PauliString::from_sparse(n, &[(q, a), (q + 1, b)]).expect("in range");
    let coulomb = EncodedTerm {
        term: FermiHubbardTerm::coulomb(q, q + 1),
        summands: vec![
            (0.25, pair(Letter::Z, Letter::Z)),
            (-0.25, PauliString::single(n, q, Letter::Z)),
            (-0.25, PauliString::single(n, q + 1, Letter::Z)),
        ],
    };
    emit_term(c, &coulomb, u, angle);
    let hopping = EncodedTerm {
        term: FermiHubbardTerm::hopping(q, q + 1),
        summands: vec![(0.5, pair(Letter::X, Letter::X)), (0.5, pair(Letter::Y, Letter::Y))],
    };
    emit_term(c, &hopping, t, angle);
}

/// JW Trotter steps on a fermionic swap network.
///
/// Modes start in `order` (position to mode). Each step runs `n` brickwork
/// layers of fermionic swaps; whenever the two modes about to be swapped are
/// lattice neighbours and have not interacted in this step, their Coulomb and
/// hopping rotations are applied first (once per lattice edge joining them).
/// Every pair of modes meets exactly once per step, and the order is
/// reversed after each step.
pub fn build_swap_network_jw(
    model: &FermiHubbardModel,
    order: &[usize],
    steps: usize,
    angle: CliffordAngle,
) -> Result<Fragment> {
    let n = model.num_modes();
    if order.len() != n {
        return Err(Error::LengthMismatch { expected: n, found: order.len() });
    }
    let mut multiplicity = vec![0usize; n * n];
    for (a, b) in model.lattice.neighbor_pairs() {
        multiplicity[a * n + b] += 1;
        multiplicity[b * n + a] += 1;
    }
    let mut c = Fragment::new(n);
    let mut pos = order.to_vec();
    let mut layer_parity = 0;
    for _ in 0..steps {
        let mut done = vec![false; n * n];
        for _ in 0..n {
            let mut q = layer_parity;
            while q + 1 < n {
                let (a, b) = (pos[q], pos[q + 1]);
                if !done[a * n + b] {
                    for _ in 0..multiplicity[a * n + b] {
                        emit_adjacent_pair(&mut c, n, q, model, angle);
                    }
                    done[a * n + b] = true;
                    done[b * n + a] = true;
                }
                emit_fswap(&mut c, q, q + 1);
                pos.swap(q, q + 1);
                q += 2;
            }
            layer_parity ^= 1;
        }
        debug_assert!(model.lattice.neighbor_pairs().iter().all(|&(a, b)| done[a * n + b]));
    }
    Ok(c)
}

/// Sequential Trotter steps: every term of the model in order, each
/// summand rotated on its own.
pub fn build_trotter_sequential<E: FermionEncoding + ?Sized>(
    enc: &E,
    model: &FermiHubbardModel,
    steps: usize,
    angle: CliffordAngle,
) -> Result<Fragment> {
    let mut c = Fragment::new(enc.num_qubits());
    let encoded: Vec<EncodedTerm> = model.terms.iter().map(|t| enc.encode(t)).collect::<Result<_>>()?;
    for _ in 0..steps {
        for (t, e) in model.terms.iter().zip(&encoded) {
            emit_term(&mut c, e, model.coefficient(t), angle);
        }
    }
    Ok(c)
}

/// Number of terms drawn for a random logical circuit. `fraction` counts the
/// mirror half as well, so `2.0` is every term once before mirroring.
pub fn random_term_count(num_terms: usize, fraction: f64) -> Result<usize> {
    if !(fraction > 0.0 && fraction <= 2.0) {
        return Err(Error::InvalidSpec(alloc::format!("fraction {fraction} outside (0, 2]")));
    }
    let k = libm::floor(fraction / 2.0 * num_terms as f64 + 1e-9) as usize;
    Ok(k.clamp(1, num_terms))
}

/// Indices of the terms of a random logical circuit, drawn uniformly without
/// replacement, in drawing order.
pub fn random_terms(num_terms: usize, fraction: f64, seed: u64) -> Result<Vec<usize>> {
    let k = random_term_count(num_terms, fraction)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(rand::seq::index::sample(&mut rng, num_terms, k).into_vec())
}

/// Which encoding a random logical circuit is built for.
pub enum RandomTarget<'a> {
    Dk(&'a DkArtifacts),
    Generic(&'a dyn FermionEncoding),
}

pub fn build_random_logical(
    target: RandomTarget<'_>,
    model: &FermiHubbardModel,
    fraction: f64,
    seed: u64,
    angle: CliffordAngle,
) -> Result<Fragment> {
    let picks = random_terms(model.terms.len(), fraction, seed)?;
    let n = match &target {
        RandomTarget::Dk(a) => a.num_qubits(),
        RandomTarget::Generic(e) => e.num_qubits(),
    };
    let mut c = Fragment::new(n);
    for t in picks {
        let enc = match &target {
            RandomTarget::Dk(a) => dk_term(a, model, t)?,
            RandomTarget::Generic(e) => e.encode(&model.terms[t])?,
        };
        emit_term(&mut c, &enc, model.coefficient(&model.terms[t]), angle);
    }
    Ok(c)
}

/// `U` followed by its exact inverse.
pub fn mirror(u: &Fragment) -> Result<Fragment> {
    let inv = u.circuit.inverse()?;
    let len = u.circuit.len();
    debug_assert_eq!(inv.len(), len);
    let mut out = u.clone();
    out.circuit.append(&inv);
    out.cuts.extend(u.cuts.iter().rev().skip(1).map(|&c| 2 * len - c));
    Ok(out)
}
