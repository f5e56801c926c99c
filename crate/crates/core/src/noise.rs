//! Circuit-level error models.

use alloc::string::String;
use alloc::vec::Vec;

use crate::circuit::{CliffordCircuit, Instruction, NoiseChannel};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ModelName {
    /// Standard depolarizing: every element fails with rate `p`.
    Sd,
    /// Superconducting-inspired: cheap 1Q gates, expensive prep and readout.
    Si,
    Custom,
}

/// Error probabilities per circuit element.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ErrorModel {
    pub name: ModelName,
    /// The scale parameter of named models (0 for custom ones).
    pub p: f64,
    /// Depolarizing rate after 1Q gates.
    pub p1: f64,
    /// Depolarizing rate after 2Q gates.
    pub p2: f64,
    /// Bit-flip rate after reset.
    pub ps: f64,
    /// Measurement flip rate.
    pub pm: f64,
}

fn check(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    Ok(())
}

impl ErrorModel {
    pub fn sd(p: f64) -> Result<Self> {
        ErrorModel { name: ModelName::Sd, p, p1: p, p2: p, ps: p, pm: p }.validated()
    }

    pub fn si(p: f64) -> Result<Self> {
        ErrorModel { name: ModelName::Si, p, p1: p / 10.0, p2: p, ps: 2.0 * p, pm: 5.0 * p }.validated()
    }

    pub fn custom(p1: f64, p2: f64, ps: f64, pm: f64) -> Result<Self> {
        ErrorModel { name: ModelName::Custom, p: 0.0, p1, p2, ps, pm }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        for p in [self.p1, self.p2, self.ps, self.pm] {
            check(p)?;
        }
        Ok(self)
    }

    pub fn label(&self) -> String {
        match self.name {
            ModelName::Sd => alloc::format!("SD({})", self.p),
            ModelName::Si => alloc::format!("SI({})", self.p),
            ModelName::Custom => {
                alloc::format!("custom(p1={},p2={},ps={},pm={})", self.p1, self.p2, self.ps, self.pm)
            }
        }
    }
}

/// Adds noise to a clean circuit: `DEPOLARIZE1(p1)` after every 1Q gate,
/// `DEPOLARIZE2(p2)` after every 2Q gate, `X_ERROR(ps)` after every reset and
/// flip probability `pm` on every measurement. Zero-probability channels are
/// left out. No idle noise.
pub fn apply_noise(c: &CliffordCircuit, m: &ErrorModel) -> Result<CliffordCircuit> {
    if c.is_noisy() {
        return Err(Error::AlreadyNoisy);
    }
    m.validated()?;
    let mut out = CliffordCircuit::new(c.num_qubits());
    let push = |out: &mut CliffordCircuit, channel: NoiseChannel, targets: &Vec<usize>| -> Result<()> {
        if channel.probability() > 0.0 {
            out.push(Instruction::Noise { channel, targets: targets.clone() })?;
        }
        Ok(())
    };
    for inst in c.instructions() {
        match inst {
            Instruction::Gate { gate, targets } => {
                out.push(inst.clone())?;
                let ch = if gate.is_two_qubit() { NoiseChannel::Depolarize2(m.p2) } else { NoiseChannel::Depolarize1(m.p1) };
                push(&mut out, ch, targets)?;
            }
            Instruction::Reset { targets } => {
                out.push(inst.clone())?;
                push(&mut out, NoiseChannel::XError(m.ps), targets)?;
            }
            Instruction::Measure { targets, .. } => {
                out.push(Instruction::Measure { flip: m.pm, targets: targets.clone() })?;
            }
            other => out.push(other.clone())?,
        }
    }
    Ok(out)
}
