//! Exact Pauli-group algebra on `n` qubits.
//!
//! A [`PauliString`] stores one X bit and one Z bit per qubit, packed into
//! `u64` words, plus a quarter phase `i^k`. The letter on a qubit is read from
//! its `(x, z)` pair: `(0,0)=I`, `(1,0)=X`, `(1,1)=Y`, `(0,1)=Z`, and the
//! operator is `i^k` times the tensor product of those letters (with `Y` the
//! Hermitian Pauli-Y, not `XZ`).
//!
//! For Gaussian elimination a Pauli is viewed as a `2n`-bit symplectic vector
//! with the X block in columns `0..n` and the Z block in columns `n..2n`.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::bits::{get_bit, popcount, set_bit, words_for, WORD_BITS};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub fn from_bits(x: bool, z: bool) -> Letter {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'I' | '_' => Some(Letter::I),
            'X' => Some(Letter::X),
            'Y' => Some(Letter::Y),
            'Z' => Some(Letter::Z),
            _ => None,
        }
    }
}

/// A power of `i`, stored modulo 4.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(k: i64) -> Phase {
        Phase(k.rem_euclid(4) as u8)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn is_real(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn is_negative(self) -> bool {
        self.0 == 2
    }
}

impl core::ops::Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

impl core::ops::Neg for Phase {
    type Output = Phase;
    fn neg(self) -> Phase {
        Phase((self.0 + 2) % 4)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    xs: Vec<u64>,
    zs: Vec<u64>,
    phase: Phase,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        let w = words_for(n);
        PauliString { n, xs: vec![0; w], zs: vec![0; w], phase: Phase::ONE }
    }

    /// A single letter on qubit `q`.
    pub fn single(n: usize, q: usize, letter: Letter) -> Self {
        let mut p = PauliString::identity(n);
        p.set_letter(q, letter);
        p
    }

    /// Builds a Pauli from `(qubit, letter)` pairs. Repeated qubits multiply.
    pub fn from_sparse(n: usize, terms: &[(usize, Letter)]) -> Result<Self> {
        let mut p = PauliString::identity(n);
        for &(q, l) in terms {
            if q >= n {
                return Err(Error::IndexOutOfRange { index: q, len: n });
            }
            p.mul_assign(&PauliString::single(n, q, l));
        }
        Ok(p)
    }

    pub fn from_letters(letters: &[Letter]) -> Self {
        let mut p = PauliString::identity(letters.len());
        for (q, &l) in letters.iter().enumerate() {
            p.set_letter(q, l);
        }
        p
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn set_phase(&mut self, phase: Phase) {
        self.phase = phase;
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    pub fn negated(mut self) -> Self {
        self.phase = -self.phase;
        self
    }

    pub fn x_words(&self) -> &[u64] {
        &self.xs
    }

    pub fn z_words(&self) -> &[u64] {
        &self.zs
    }

    pub fn x(&self, q: usize) -> bool {
        get_bit(&self.xs, q)
    }

    pub fn z(&self, q: usize) -> bool {
        get_bit(&self.zs, q)
    }

    pub fn letter(&self, q: usize) -> Letter {
        Letter::from_bits(self.x(q), self.z(q))
    }

    /// Overwrites the letter on `q`. The phase is left untouched.
    pub fn set_letter(&mut self, q: usize, letter: Letter) {
        let (x, z) = letter.bits();
        set_bit(&mut self.xs, q, x);
        set_bit(&mut self.zs, q, z);
    }

    pub fn weight(&self) -> usize {
        self.xs.iter().zip(&self.zs).map(|(x, z)| (x | z).count_ones() as usize).sum()
    }

    pub fn is_identity_letters(&self) -> bool {
        self.xs.iter().chain(&self.zs).all(|&w| w == 0)
    }

    /// True when every letter is `I` or `Z`.
    pub fn is_z_type(&self) -> bool {
        self.xs.iter().all(|&w| w == 0)
    }

    /// Qubits carrying a non-identity letter, ascending.
    pub fn support(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (wi, (x, z)) in self.xs.iter().zip(&self.zs).enumerate() {
            let mut bits = x | z;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                out.push(wi * WORD_BITS + b);
                bits &= bits - 1;
            }
        }
        out
    }

    /// Same letters, ignoring phase.
    pub fn same_letters(&self, other: &PauliString) -> bool {
        self.n == other.n && self.xs == other.xs && self.zs == other.zs
    }

    fn check_dims(&self, other: &PauliString) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { left: self.n, right: other.n });
        }
        Ok(())
    }

    /// Group product `self * other` with exact phase.
    pub fn multiply(&self, other: &PauliString) -> Result<PauliString> {
        self.check_dims(other)?;
        let mut out = self.clone();
        out.mul_assign(other);
        Ok(out)
    }

    /// `self <- self * other`. Panics on dimension mismatch.
    pub fn mul_assign(&mut self, other: &PauliString) {
        assert_eq!(self.n, other.n, "Pauli dimension mismatch");
        let mut plus = 0usize;
        let mut minus = 0usize;
        for i in 0..self.xs.len() {
            let (x1, z1) = (self.xs[i], self.zs[i]);
            let (x2, z2) = (other.xs[i], other.zs[i]);
            let (px, py, pz) = (x1 & !z1, x1 & z1, !x1 & z1);
            let (qx, qy, qz) = (x2 & !z2, x2 & z2, !x2 & z2);
            // XY = iZ, YZ = iX, ZX = iY; reversed orders pick up -i.
            plus += ((px & qy) | (py & qz) | (pz & qx)).count_ones() as usize;
            minus += ((py & qx) | (pz & qy) | (px & qz)).count_ones() as usize;
            self.xs[i] = x1 ^ x2;
            self.zs[i] = z1 ^ z2;
        }
        let k = self.phase.0 as i64 + other.phase.0 as i64 + plus as i64 - minus as i64;
        self.phase = Phase::from_exponent(k);
    }

    /// Symplectic product: `true` when the two strings anticommute.
    pub fn anticommutes_unchecked(&self, other: &PauliString) -> bool {
        let mut acc = 0u64;
        for i in 0..self.xs.len() {
            acc ^= (self.xs[i] & other.zs[i]) ^ (self.zs[i] & other.xs[i]);
        }
        acc.count_ones() % 2 == 1
    }

    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        self.check_dims(other)?;
        Ok(!self.anticommutes_unchecked(other))
    }

    /// The letters of `self` on `subset`, identity elsewhere, phase `+1`.
    pub fn restrict(&self, subset: &[usize]) -> Result<PauliString> {
        let mut out = PauliString::identity(self.n);
        for &q in subset {
            if q >= self.n {
                return Err(Error::IndexOutOfRange { index: q, len: self.n });
            }
            out.set_letter(q, self.letter(q));
        }
        Ok(out)
    }

    /// Symplectic vector with the X block first.
    pub fn symplectic_bits(&self) -> Vec<u64> {
        let mut v = vec![0u64; words_for(2 * self.n)];
        for q in 0..self.n {
            if self.x(q) {
                set_bit(&mut v, q, true);
            }
            if self.z(q) {
                set_bit(&mut v, self.n + q, true);
            }
        }
        v
    }

    fn from_symplectic(n: usize, v: &[u64]) -> PauliString {
        let mut p = PauliString::identity(n);
        for q in 0..n {
            set_bit(&mut p.xs, q, get_bit(v, q));
            set_bit(&mut p.zs, q, get_bit(v, n + q));
        }
        p
    }

    // Conjugation `P -> U P U^dagger` by the generating Cliffords. Every other
    // supported gate is a product of these, see `Gate::conjugate`.

    pub fn apply_h(&mut self, q: usize) {
        let (x, z) = (self.x(q), self.z(q));
        if x && z {
            self.phase = -self.phase;
        }
        set_bit(&mut self.xs, q, z);
        set_bit(&mut self.zs, q, x);
    }

    pub fn apply_s(&mut self, q: usize) {
        let (x, z) = (self.x(q), self.z(q));
        if x && z {
            self.phase = -self.phase;
        }
        set_bit(&mut self.zs, q, z ^ x);
    }

    pub fn apply_cx(&mut self, control: usize, target: usize) {
        let (xc, zc) = (self.x(control), self.z(control));
        let (xt, zt) = (self.x(target), self.z(target));
        if xc && zt && (xt == zc) {
            self.phase = -self.phase;
        }
        set_bit(&mut self.xs, target, xt ^ xc);
        set_bit(&mut self.zs, control, zc ^ zt);
    }

    /// Conjugation by a Pauli: flips the sign when anticommuting.
    pub fn apply_pauli(&mut self, q: usize, letter: Letter) {
        let (lx, lz) = letter.bits();
        if (self.x(q) && lz) ^ (self.z(q) && lx) {
            self.phase = -self.phase;
        }
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.phase.0 {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        f.write_str(sign)?;
        for q in 0..self.n {
            write!(f, "{}", self.letter(q).as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parses `[+|-|+i|-i]` followed by letters `IXYZ`, e.g. `-XIYZ`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let (phase, rest) = if let Some(r) = t.strip_prefix("+i") {
            (Phase::I, r)
        } else if let Some(r) = t.strip_prefix("-i") {
            (Phase::MINUS_I, r)
        } else if let Some(r) = t.strip_prefix('i') {
            (Phase::I, r)
        } else if let Some(r) = t.strip_prefix('+') {
            (Phase::ONE, r)
        } else if let Some(r) = t.strip_prefix('-') {
            (Phase::MINUS_ONE, r)
        } else {
            (Phase::ONE, t)
        };
        let letters = rest
            .chars()
            .map(|c| Letter::from_char(c).ok_or_else(|| Error::PauliSyntax(s.to_string())))
            .collect::<Result<Vec<_>>>()?;
        Ok(PauliString::from_letters(&letters).with_phase(phase))
    }
}

/// Row-reduces `rows` (each `cols` bits) in place and returns the pivot
/// columns, choosing the lowest available column at every step.
fn row_reduce(rows: &mut [Vec<u64>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows.len() {
            break;
        }
        let Some(p) = (rank..rows.len()).find(|&r| get_bit(&rows[r], c)) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && get_bit(row, c) {
                for (a, b) in row.iter_mut().zip(&pivot) {
                    *a ^= b;
                }
            }
        }
        pivots.push(c);
        rank += 1;
    }
    pivots
}

/// A list of stabilizer generators over the same qubits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSet {
    generators: Vec<PauliString>,
    independent: bool,
}

impl GeneratorSet {
    pub fn new(generators: Vec<PauliString>) -> Result<Self> {
        if let Some(first) = generators.first() {
            for g in &generators[1..] {
                first.check_dims(g)?;
            }
        }
        Ok(GeneratorSet { generators, independent: false })
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn is_independent(&self) -> bool {
        self.independent
    }

    pub fn num_qubits(&self) -> usize {
        self.generators.first().map_or(0, |g| g.num_qubits())
    }

    /// Rank of the generators as symplectic vectors.
    pub fn rank(&self) -> usize {
        let n = self.num_qubits();
        let mut rows: Vec<Vec<u64>> = self.generators.iter().map(|g| g.symplectic_bits()).collect();
        row_reduce(&mut rows, 2 * n).len()
    }

    /// Checks pairwise commutation.
    pub fn check_commuting(&self) -> Result<()> {
        for (i, a) in self.generators.iter().enumerate() {
            for (j, b) in self.generators.iter().enumerate().skip(i + 1) {
                if a.anticommutes_unchecked(b) {
                    return Err(Error::NonCommuting { first: i, second: j });
                }
            }
        }
        Ok(())
    }

    /// Drops generators that are products of earlier ones and marks the set
    /// independent. Returns the number of generators removed.
    pub fn reduce(&mut self) -> usize {
        let n = self.num_qubits();
        let mut basis: Vec<(usize, Vec<u64>)> = Vec::new();
        let mut keep = Vec::new();
        for g in &self.generators {
            let mut v = g.symplectic_bits();
            for (c, b) in &basis {
                if get_bit(&v, *c) {
                    for (a, w) in v.iter_mut().zip(b) {
                        *a ^= w;
                    }
                }
            }
            match (0..2 * n).find(|&c| get_bit(&v, c)) {
                Some(c) => {
                    // Keep the basis fully reduced in column c.
                    for (_, b) in basis.iter_mut() {
                        if get_bit(b, c) {
                            for (a, w) in b.iter_mut().zip(&v) {
                                *a ^= w;
                            }
                        }
                    }
                    basis.push((c, v));
                    keep.push(true);
                }
                None => keep.push(false),
            }
        }
        let before = self.generators.len();
        let mut it = keep.into_iter();
        self.generators.retain(|_| it.next().unwrap_or(false));
        self.independent = true;
        before - self.generators.len()
    }

    /// Marks the set independent after verifying full rank.
    pub fn verify_independent(&mut self) -> Result<()> {
        let rank = self.rank();
        if rank < self.generators.len() {
            return Err(Error::DependentGenerators { rank, count: self.generators.len() });
        }
        self.independent = true;
        Ok(())
    }
}

/// Returns one destabilizer per generator: `D[i]` anticommutes with
/// `gens[j]` exactly when `i == j`.
///
/// Each `D[i]` is supported on the pivot columns found by eliminating the
/// generators' symplectic duals `(z | x)`, lowest column first. If `A` is the
/// square pivot submatrix, the destabilizers are the rows of `(A^T)^-1`.
pub fn compute_destabilizers(gens: &GeneratorSet) -> Result<Vec<PauliString>> {
    let m = gens.len();
    if m == 0 {
        return Ok(Vec::new());
    }
    gens.check_commuting()?;
    let n = gens.num_qubits();
    let cols = 2 * n;
    // Symplectic duals: D.(x|z) dotted with (z_g|x_g) is the commutation bit.
    let duals: Vec<Vec<u64>> = gens
        .generators()
        .iter()
        .map(|g| {
            let mut v = vec![0u64; words_for(cols)];
            for q in 0..n {
                set_bit(&mut v, q, g.z(q));
                set_bit(&mut v, n + q, g.x(q));
            }
            v
        })
        .collect();
    let mut scratch = duals.clone();
    let pivots = row_reduce(&mut scratch, cols);
    if pivots.len() < m {
        return Err(Error::DependentGenerators { rank: pivots.len(), count: m });
    }
    // Augmented [A^T | I] with A[i][c] = duals[i][pivots[c]].
    let aug_cols = 2 * m;
    let mut aug: Vec<Vec<u64>> = (0..m)
        .map(|c| {
            let mut row = vec![0u64; words_for(aug_cols)];
            for (i, dual) in duals.iter().enumerate() {
                set_bit(&mut row, i, get_bit(dual, pivots[c]));
            }
            set_bit(&mut row, m + c, true);
            row
        })
        .collect();
    for col in 0..m {
        let p = (col..m).find(|&r| get_bit(&aug[r], col)).expect("pivot submatrix is invertible");
        aug.swap(col, p);
        let pivot = aug[col].clone();
        for (r, row) in aug.iter_mut().enumerate() {
            if r != col && get_bit(row, col) {
                for (a, b) in row.iter_mut().zip(&pivot) {
                    *a ^= b;
                }
            }
        }
    }
    Ok((0..m)
        .map(|i| {
            let mut v = vec![0u64; words_for(cols)];
            for (c, &pc) in pivots.iter().enumerate() {
                if get_bit(&aug[i], m + c) {
                    set_bit(&mut v, pc, true);
                }
            }
            PauliString::from_symplectic(n, &v)
        })
        .collect())
}

/// Product of `destabs[k]` over every `k` whose syndrome bit is set
/// (a set bit is a `-1` outcome).
pub fn recovery_from_syndrome(destabs: &[PauliString], syndrome: &[bool]) -> Result<PauliString> {
    if destabs.len() != syndrome.len() {
        return Err(Error::LengthMismatch { expected: destabs.len(), found: syndrome.len() });
    }
    let n = destabs.first().map_or(0, |d| d.num_qubits());
    let mut acc = PauliString::identity(n);
    for (d, &flip) in destabs.iter().zip(syndrome) {
        if flip {
            acc = acc.multiply(d)?;
        }
    }
    Ok(acc)
}

/// Number of set bits in `x | z`; exposed for word-level callers.
pub fn weight_of_words(xs: &[u64], zs: &[u64]) -> usize {
    let merged: Vec<u64> = xs.iter().zip(zs).map(|(a, b)| a | b).collect();
    popcount(&merged)
}

pub fn format_letters(p: &PauliString) -> String {
    let mut s = String::with_capacity(p.num_qubits());
    for q in 0..p.num_qubits() {
        s.push(p.letter(q).as_char());
    }
    s
}
