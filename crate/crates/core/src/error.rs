use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Everything that can go wrong in the core crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two operands act on different numbers of qubits.
    DimensionMismatch { left: usize, right: usize },
    /// A qubit or element index outside of its valid range.
    IndexOutOfRange { index: usize, len: usize },
    /// A generator set is not linearly independent.
    DependentGenerators { rank: usize, count: usize },
    /// Two generators that must commute do not.
    NonCommuting { first: usize, second: usize },
    /// Lengths of paired inputs differ.
    LengthMismatch { expected: usize, found: usize },
    /// Text could not be parsed as a Pauli string.
    PauliSyntax(String),
    /// A structurally invalid circuit instruction.
    InvalidInstruction(String),
    /// A detector or observable whose value is not fixed by the noiseless circuit.
    NonDeterministic { kind: &'static str, index: usize },
    /// A deterministic detector or observable whose noiseless value differs
    /// from the value predicted when the experiment was assembled.
    ReferenceMismatch { kind: &'static str, index: usize },
    /// Lattice side length violates the even-L requirement.
    InvalidLattice(usize),
    /// A rotation angle that is not a multiple of pi/4.
    NonCliffordAngle(f64),
    /// An experiment specification combining incompatible options.
    InvalidSpec(String),
    /// A probability outside [0, 1].
    InvalidProbability(f64),
    /// Noise applied to a circuit that already carries noise.
    AlreadyNoisy,
    /// A ratio estimate with a zero denominator.
    UndefinedEstimate,
    /// An operation that needs at least one sample received none.
    EmptyBatch,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { left, right } => {
                write!(f, "qubit count mismatch: {left} vs {right}")
            }
            Error::IndexOutOfRange { index, len } => {
                write!(f, "index {index} out of range for length {len}")
            }
            Error::DependentGenerators { rank, count } => {
                write!(f, "generators are dependent: rank {rank} < {count}")
            }
            Error::NonCommuting { first, second } => {
                write!(f, "generators {first} and {second} anticommute")
            }
            Error::LengthMismatch { expected, found } => {
                write!(f, "expected length {expected}, found {found}")
            }
            Error::PauliSyntax(s) => write!(f, "invalid Pauli string: {s}"),
            Error::InvalidInstruction(s) => write!(f, "invalid instruction: {s}"),
            Error::NonDeterministic { kind, index } => {
                write!(f, "{kind} {index} is not deterministic in the noiseless circuit")
            }
            Error::ReferenceMismatch { kind, index } => {
                write!(f, "{kind} {index} has a noiseless value different from the predicted one")
            }
            Error::InvalidLattice(l) => write!(
                f,
                "lattice side length {l} is invalid: L must be even and at least 2 \
                 (odd L admits undetectable Majorana errors)"
            ),
            Error::NonCliffordAngle(a) => write!(
                f,
                "rotation angle {a} is not a multiple of pi/4; only Clifford rotations can be simulated"
            ),
            Error::InvalidSpec(s) => write!(f, "invalid experiment: {s}"),
            Error::InvalidProbability(p) => write!(f, "probability {p} outside [0, 1]"),
            Error::AlreadyNoisy => write!(f, "circuit already contains noise"),
            Error::UndefinedEstimate => write!(f, "estimate undefined: zero denominator"),
            Error::EmptyBatch => write!(f, "no samples"),
        }
    }
}

impl core::error::Error for Error {}
