//! Experiment assembly.
//!
//! An experiment runs the stages
//!
//! ```text
//! eigenstate prep -> codespace prep -> U U^dag -> syndrome extraction -> readout
//! ```
//!
//! where the middle part may be interleaved with VQED layers. Every detector
//! and observable carries a semantic label and its predicted noiseless value;
//! assembly fails unless the tableau reference agrees with every prediction.

pub mod gadgets;
pub mod logical;
pub mod prep;
pub mod readout;
pub mod vqed;

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::circuit::{CliffordCircuit, GateCounts};
use crate::encodings::{DkArtifacts, FermiHubbardModel, FermionEncoding, JordanWigner, TernaryTree};
use crate::error::{Error, Result};
use crate::lattice::SquareLattice;
use crate::tableau::reference;

pub use gadgets::{build_logical_rotation, build_stab_measurement, CliffordAngle};
pub use logical::{mirror, Fragment};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "UPPERCASE"))]
pub enum Encoding {
    Jw,
    Tt,
    Dk,
}

impl Encoding {
    pub fn name(self) -> &'static str {
        match self {
            Encoding::Jw => "JW",
            Encoding::Tt => "TT",
            Encoding::Dk => "DK",
        }
    }
}

/// Shape of the forward logical circuit `U`; the mirror half is always added.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case", tag = "type"))]
pub enum CircuitKind {
    /// `steps` Trotter steps in `U`.
    Trotter { steps: usize },
    /// Random terms; `fraction` in `(0, 2]` counts both halves.
    Random { fraction: f64, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case", tag = "type"))]
pub enum Readout {
    /// Occupation of every site.
    Occupation,
    /// One hopping summand per red face: the edge at boundary position
    /// `color` (0 top, 1 right, 2 bottom, 3 left), the `X X` type summand when
    /// `xx` and the `Y Y` type otherwise. DK only.
    Hopping { color: u8, xx: bool },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case", tag = "type"))]
pub enum Mitigation {
    None,
    /// Global parity postselection.
    Gp,
    /// Stabilizer reconstruction from the final readout.
    Sr,
    /// One round of stabilizer measurement before readout.
    Sm,
    SmFlags,
    /// Virtual error detection with `layers` layers.
    Vqed { layers: usize },
}

impl Mitigation {
    pub fn name(self) -> String {
        match self {
            Mitigation::None => String::from("none"),
            Mitigation::Gp => String::from("GP"),
            Mitigation::Sr => String::from("SR"),
            Mitigation::Sm => String::from("SM"),
            Mitigation::SmFlags => String::from("SM+flags"),
            Mitigation::Vqed { layers } => format!("VQED({layers})"),
        }
    }

    /// Detector kinds this mitigation postselects on.
    pub fn postselected_kinds(self) -> &'static [DetectorKind] {
        use DetectorKind::*;
        match self {
            Mitigation::None => &[],
            Mitigation::Gp => &[GlobalParity],
            Mitigation::Sr => &[Reconstruction, PrepFlag],
            Mitigation::Sm => &[SmRound, SmRepeat, PrepFlag],
            Mitigation::SmFlags => &[SmRound, SmFlag, SmRepeat, PrepFlag],
            Mitigation::Vqed { .. } => &[VqedFlag, PrepFlag],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct ExperimentSpec {
    pub encoding: Encoding,
    pub l: usize,
    pub kind: CircuitKind,
    pub readout: Readout,
    pub mitigation: Mitigation,
    /// Occupation vector of the prepared Slater state; all zeros if absent.
    pub prep: Option<Vec<bool>>,
    pub angle: CliffordAngle,
    /// Flag the stabilizer measurements of state preparation. By default
    /// they are flagged exactly when the mitigation uses flags.
    pub prep_flags: Option<bool>,
    /// Measure each stabilizer twice in the SM round.
    pub sm_repeat: bool,
    pub vqed_flags: bool,
    pub vqed_seed: u64,
    /// Also emit detectors the mitigation does not postselect on (for
    /// comparing mitigations on one batch).
    pub extra_detectors: bool,
    pub t_hop: f64,
    pub u_coulomb: f64,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            encoding: Encoding::Dk,
            l: 4,
            kind: CircuitKind::Trotter { steps: 1 },
            readout: Readout::Occupation,
            mitigation: Mitigation::None,
            prep: None,
            angle: CliffordAngle::DEFAULT,
            prep_flags: None,
            sm_repeat: false,
            vqed_flags: false,
            vqed_seed: 0,
            extra_detectors: false,
            t_hop: 1.0,
            u_coulomb: 1.0,
        }
    }
}

impl ExperimentSpec {
    pub fn new(encoding: Encoding, l: usize, kind: CircuitKind, mitigation: Mitigation) -> Self {
        ExperimentSpec { encoding, l, kind, mitigation, ..Default::default() }
    }

    pub fn with_readout(mut self, readout: Readout) -> Self {
        self.readout = readout;
        self
    }

    /// Checks the combination rules. Errors name the violated rule.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        if self.l < 2 || self.l % 2 != 0 {
            return bad(format!("lattice size L={} must be even and at least 2", self.l));
        }
        let dk = self.encoding == Encoding::Dk;
        if dk && self.l < 4 {
            return bad(String::from("the DK encoding needs L >= 4; at L = 2 each red-face loop meets a face qubit twice"));
        }
        let occupation = self.readout == Readout::Occupation;
        match self.mitigation {
            Mitigation::Sr if !(dk && occupation) => {
                return bad(String::from("SR requires the DK encoding and occupation readout"))
            }
            Mitigation::Sm | Mitigation::SmFlags | Mitigation::Vqed { .. } if !dk => {
                return bad(format!("{} requires the DK encoding", self.mitigation.name()))
            }
            Mitigation::Gp if !occupation => return bad(String::from("GP requires occupation readout")),
            Mitigation::Vqed { layers: 0 } => return bad(String::from("VQED needs at least one layer")),
            _ => {}
        }
        if let Readout::Hopping { color, .. } = self.readout {
            if !dk {
                return bad(String::from("hopping readout is only implemented for the DK encoding"));
            }
            if color > 3 {
                return bad(format!("hopping colour {color} outside 0..4"));
            }
            if self.prep.is_some() {
                return bad(String::from("a prep vector only applies to occupation readout"));
            }
        }
        if let Some(v) = &self.prep {
            if v.len() != self.l * self.l {
                return Err(Error::LengthMismatch { expected: self.l * self.l, found: v.len() });
            }
        }
        if let CircuitKind::Random { fraction, .. } = self.kind {
            logical::random_term_count(1, fraction)?;
        }
        if !self.t_hop.is_finite() || !self.u_coulomb.is_finite() {
            return bad(String::from("model coefficients must be finite"));
        }
        Ok(())
    }

    pub fn prep_vector(&self) -> Vec<bool> {
        self.prep.clone().unwrap_or_else(|| vec![false; self.l * self.l])
    }

    fn prep_flagged(&self) -> bool {
        self.prep_flags.unwrap_or(match self.mitigation {
            Mitigation::SmFlags => true,
            Mitigation::Vqed { .. } => self.vqed_flags,
            _ => false,
        })
    }

    /// Short human-readable description.
    pub fn describe(&self) -> String {
        let kind = match self.kind {
            CircuitKind::Trotter { steps } => format!("trotter({steps})"),
            CircuitKind::Random { fraction, seed } => format!("random({fraction},seed={seed})"),
        };
        let readout = match self.readout {
            Readout::Occupation => String::from("occupation"),
            Readout::Hopping { color, xx } => format!("hopping({color},{})", if xx { "XX" } else { "YY" }),
        };
        format!("{} L={} {} {} {}", self.encoding.name(), self.l, kind, readout, self.mitigation.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum DetectorKind {
    PrepFlag,
    SmRound,
    SmFlag,
    SmRepeat,
    Reconstruction,
    GlobalParity,
    VqedFlag,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "type"))]
pub enum DetectorLabel {
    /// Flag of the preparation measurement of stabilizer (or face part) `k`.
    PrepFlag { k: usize },
    /// SM result for `S_k` compared with its prepared value.
    SmRound { k: usize },
    SmFlag { k: usize },
    /// The two repetitions of the SM measurement of `S_k` disagree.
    SmRepeat { k: usize },
    /// `S_k` rebuilt from single-qubit readout, compared with prep.
    Reconstruction { k: usize },
    GlobalParity,
    VqedFlag { layer: usize },
}

impl DetectorLabel {
    pub fn kind(&self) -> DetectorKind {
        match self {
            DetectorLabel::PrepFlag { .. } => DetectorKind::PrepFlag,
            DetectorLabel::SmRound { .. } => DetectorKind::SmRound,
            DetectorLabel::SmFlag { .. } => DetectorKind::SmFlag,
            DetectorLabel::SmRepeat { .. } => DetectorKind::SmRepeat,
            DetectorLabel::Reconstruction { .. } => DetectorKind::Reconstruction,
            DetectorLabel::GlobalParity => DetectorKind::GlobalParity,
            DetectorLabel::VqedFlag { .. } => DetectorKind::VqedFlag,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "type"))]
pub enum ObservableLabel {
    Occupation { site: usize },
    Hopping { edge: usize, xx: bool },
    /// Auxiliary result of a VQED layer (its `b` factor), already corrected
    /// by the prepared stabilizer value.
    VqedAux { layer: usize },
}

/// One VQED layer: `S_j` applied, `S_k` measured through the auxiliary.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VqedLayer {
    pub layer: usize,
    pub j: usize,
    pub k: usize,
    /// Instruction index inside the logical fragment where it is inserted.
    pub position: usize,
    /// Observable index (before aux rows are split off) holding `b`.
    pub observable: usize,
    /// Records forming the observable: the auxiliary result plus the
    /// prepared value of `S_k`.
    pub records: Vec<usize>,
    /// `true` when the prepared `S_k` value (the sign correction) is `-1` in
    /// the reference branch.
    pub sign_correction: bool,
}

/// Instruction indices separating the pipeline stages.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Stages {
    /// End of state preparation (and start of the logical circuit).
    pub prep_end: usize,
    pub logical_end: usize,
    /// Start of the final single-qubit readout.
    pub readout_start: usize,
}

/// Circuit under construction plus label bookkeeping.
#[derive(Clone, Debug)]
pub struct Builder {
    pub c: CliffordCircuit,
    enabled: Vec<DetectorKind>,
    all: bool,
    detectors: Vec<(DetectorLabel, bool)>,
    observables: Vec<(ObservableLabel, bool)>,
}

impl Builder {
    pub fn new(num_qubits: usize, enabled: &[DetectorKind], all: bool) -> Self {
        Builder {
            c: CliffordCircuit::new(num_qubits),
            enabled: enabled.to_vec(),
            all,
            detectors: Vec::new(),
            observables: Vec::new(),
        }
    }

    pub fn enables(&self, kind: DetectorKind) -> bool {
        self.all || self.enabled.contains(&kind)
    }

    /// Adds a detector with its predicted noiseless parity, unless its kind
    /// is disabled.
    pub fn detector(&mut self, label: DetectorLabel, records: &[usize], expected: bool) {
        if self.enables(label.kind()) {
            self.c.detector(records);
            self.detectors.push((label, expected));
        }
    }

    pub fn observable(&mut self, label: ObservableLabel, records: &[usize], expected: bool) -> usize {
        let idx = self.observables.len();
        self.c.observable(idx, records);
        self.observables.push((label, expected));
        idx
    }
}

/// Parity of some records plus a constant, equal to the eigenvalue bit
/// (`true` = `-1`) of the letters of a stabilizer right after preparation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PreparedValue {
    pub records: Vec<usize>,
    pub constant: bool,
}

#[derive(Clone, Debug)]
pub struct ExperimentCircuit {
    pub spec: ExperimentSpec,
    pub circuit: CliffordCircuit,
    /// Number of data qubits; auxiliary and flag qubits follow.
    pub data_qubits: usize,
    pub detector_labels: Vec<DetectorLabel>,
    pub detector_expected: Vec<bool>,
    pub observable_labels: Vec<ObservableLabel>,
    pub observable_expected: Vec<bool>,
    pub vqed: Vec<VqedLayer>,
    pub stages: Stages,
    /// Edge sign flips applied after preparation (DK only).
    pub edge_flips: Vec<bool>,
    /// Counts of the mirrored logical part alone.
    pub logical_counts: GateCounts,
    pub counts: GateCounts,
}

impl ExperimentCircuit {
    /// Detector rows whose kind is in `kinds`.
    pub fn detector_rows(&self, kinds: &[DetectorKind]) -> Vec<usize> {
        (0..self.detector_labels.len()).filter(|&i| kinds.contains(&self.detector_labels[i].kind())).collect()
    }

    /// Detector rows postselected on by the spec's own mitigation.
    pub fn postselection_rows(&self) -> Vec<usize> {
        self.detector_rows(self.spec.mitigation.postselected_kinds())
    }

    /// Observable rows holding VQED auxiliary parities.
    pub fn aux_rows(&self) -> Vec<usize> {
        (0..self.observable_labels.len())
            .filter(|&i| matches!(self.observable_labels[i], ObservableLabel::VqedAux { .. }))
            .collect()
    }

    /// Labels of the observables left after the aux rows are split off.
    pub fn logical_observables(&self) -> Vec<ObservableLabel> {
        self.observable_labels.iter().copied().filter(|l| !matches!(l, ObservableLabel::VqedAux { .. })).collect()
    }
}

/// Count of 1Q and 2Q gates in a circuit.
pub fn count_gates(c: &CliffordCircuit) -> GateCounts {
    c.count_gates()
}

enum Enc {
    Jw(JordanWigner),
    Tt(TernaryTree),
    Dk(DkArtifacts),
}

impl Enc {
    fn as_dyn(&self) -> &dyn FermionEncoding {
        match self {
            Enc::Jw(e) => e,
            Enc::Tt(e) => e,
            Enc::Dk(e) => e,
        }
    }
}

/// Builds the full experiment and verifies it against its predicted
/// noiseless values.
pub fn assemble_experiment(spec: &ExperimentSpec) -> Result<ExperimentCircuit> {
    spec.validate()?;
    let lattice = SquareLattice::new(spec.l)?;
    let model = FermiHubbardModel::new(lattice.clone(), spec.t_hop, spec.u_coulomb);
    let mut enc = match spec.encoding {
        Encoding::Jw => Enc::Jw(JordanWigner::snake(&lattice)),
        Encoding::Tt => Enc::Tt(TernaryTree::new(lattice.num_vertices())?),
        Encoding::Dk => Enc::Dk(DkArtifacts::new(lattice.clone())?),
    };
    let n = enc.as_dyn().num_qubits();
    let mut enabled: Vec<DetectorKind> = spec.mitigation.postselected_kinds().to_vec();
    if spec.extra_detectors {
        enabled.extend([
            DetectorKind::GlobalParity,
            DetectorKind::PrepFlag,
            DetectorKind::SmFlag,
            DetectorKind::SmRepeat,
            DetectorKind::VqedFlag,
        ]);
    }
    let mut b = Builder::new(n, &enabled, false);
    let v = spec.prep_vector();

    // Preparation.
    let prepared = match &mut enc {
        Enc::Dk(art) => {
            let flagged = spec.prep_flagged();
            let p = match spec.readout {
                Readout::Occupation => prep::build_slater_prep_dk(&mut b, art, &v, flagged)?,
                Readout::Hopping { color, xx } => {
                    let edges = readout::hopping_edges(art, color);
                    prep::build_edge_eigenstate_prep(&mut b, art, &edges, xx, flagged)?
                }
            };
            let syndrome = prep::reference_syndrome(&b.c, art, &p.values);
            art.update_edge_signs(&syndrome)?;
            Some(p)
        }
        Enc::Jw(e) => {
            prep::build_basis_prep(&mut b, &(0..lattice.num_vertices()).filter(|&j| v[j]).map(|j| e.qubit_of(j)).collect::<Vec<_>>());
            None
        }
        Enc::Tt(t) => {
            let bits = t.basis_state_for(&v)?;
            prep::build_basis_prep(&mut b, &(0..bits.len()).filter(|&q| bits[q]).collect::<Vec<_>>());
            None
        }
    };
    let prep_end = b.c.len();

    // Logical circuit.
    let forward = match (&enc, spec.kind) {
        (Enc::Dk(art), CircuitKind::Trotter { steps }) => logical::build_trotter_dk(art, &model, steps, spec.angle)?,
        (Enc::Jw(e), CircuitKind::Trotter { steps }) => {
            let order: Vec<usize> = (0..n).map(|q| e.mode_at(q)).collect();
            logical::build_swap_network_jw(&model, &order, steps, spec.angle)?
        }
        (Enc::Tt(t), CircuitKind::Trotter { steps }) => logical::build_trotter_sequential(t, &model, steps, spec.angle)?,
        (Enc::Dk(art), CircuitKind::Random { fraction, seed }) => {
            logical::build_random_logical(logical::RandomTarget::Dk(art), &model, fraction, seed, spec.angle)?
        }
        (e, CircuitKind::Random { fraction, seed }) => {
            logical::build_random_logical(logical::RandomTarget::Generic(e.as_dyn()), &model, fraction, seed, spec.angle)?
        }
    };
    let logical = mirror(&forward)?;
    let logical_counts = logical.circuit.count_gates();
    let mut vqed_layers = Vec::new();
    match (&enc, spec.mitigation) {
        (Enc::Dk(art), Mitigation::Vqed { layers }) => {
            let p = prepared.as_ref().expect("DK prep");
            vqed_layers = vqed::append_with_layers(&mut b, art, &logical, &p.values, layers, spec.vqed_seed, spec.vqed_flags)?;
        }
        _ => b.c.append(&logical.circuit),
    }
    let logical_end = b.c.len();

    // Syndrome extraction.
    if let (Enc::Dk(art), Mitigation::Sm | Mitigation::SmFlags) = (&enc, spec.mitigation) {
        let p = prepared.as_ref().expect("DK prep");
        readout::build_sm_round(&mut b, art, &p.values, spec.mitigation == Mitigation::SmFlags, spec.sm_repeat);
    }
    let readout_start = b.c.len();

    // Logical measurement.
    match (&enc, spec.readout) {
        (Enc::Dk(art), Readout::Occupation) => {
            let p = prepared.as_ref().expect("DK prep");
            readout::build_occupation_readout_dk(&mut b, art, &v, &p.values, spec.mitigation == Mitigation::Sr)?;
        }
        (Enc::Dk(_), Readout::Hopping { .. }) => {
            let p = prepared.as_ref().expect("DK prep");
            readout::build_hopping_readout(&mut b, &p.hopping);
        }
        (e, Readout::Occupation) => {
            readout::build_occupation_readout(&mut b, e.as_dyn(), &v)?;
        }
        _ => unreachable!("validated"),
    }

    let Builder { c, detectors, observables, .. } = b;
    let r = reference(&c)?;
    for (i, (&got, (_, want))) in r.detectors.iter().zip(&detectors).enumerate() {
        if got != *want {
            return Err(Error::ReferenceMismatch { kind: "detector", index: i });
        }
    }
    for (i, (&got, (_, want))) in r.observables.iter().zip(&observables).enumerate() {
        if got != *want {
            return Err(Error::ReferenceMismatch { kind: "observable", index: i });
        }
    }
    let edge_flips = match &enc {
        Enc::Dk(art) => art.edge_flips().to_vec(),
        _ => Vec::new(),
    };
    let counts = c.count_gates();
    Ok(ExperimentCircuit {
        spec: spec.clone(),
        data_qubits: n,
        detector_labels: detectors.iter().map(|d| d.0).collect(),
        detector_expected: detectors.iter().map(|d| d.1).collect(),
        observable_labels: observables.iter().map(|o| o.0).collect(),
        observable_expected: observables.iter().map(|o| o.1).collect(),
        vqed: vqed_layers,
        stages: Stages { prep_end, logical_end, readout_start },
        edge_flips,
        logical_counts,
        counts,
        circuit: c,
    })
}
