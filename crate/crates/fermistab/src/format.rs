//! Line-oriented circuit text.
//!
//! One instruction per line, `NAME(args) targets...`. Records are referenced
//! relative to the measurements seen so far (`rec[-1]` is the latest), which
//! keeps the text a subset of the usual stabilizer-circuit grammar. The
//! qubit count is carried in a `# qubits: N` comment so idle qubits survive a
//! round trip; without it the count is inferred from the targets.

use std::fmt::Write as _;

use fermistab_core::{CliffordCircuit, Gate, Instruction, NoiseChannel};

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn write_targets(out: &mut String, targets: &[usize]) {
    for t in targets {
        write!(out, " {t}").unwrap();
    }
}

fn write_records(out: &mut String, records: &[usize], measured: usize) {
    for r in records {
        write!(out, " rec[-{}]", measured - r).unwrap();
    }
}

pub fn to_text(c: &CliffordCircuit) -> String {
    let mut out = String::new();
    writeln!(out, "# qubits: {}", c.num_qubits()).unwrap();
    let mut measured = 0;
    for inst in c.instructions() {
        match inst {
            Instruction::Gate { gate, targets } => {
                out.push_str(gate.name());
                write_targets(&mut out, targets);
            }
            Instruction::Noise { channel, targets } => {
                write!(out, "{}({})", channel.name(), channel.probability()).unwrap();
                write_targets(&mut out, targets);
            }
            Instruction::Measure { flip, targets } => {
                if *flip > 0.0 {
                    write!(out, "M({flip})").unwrap();
                } else {
                    out.push('M');
                }
                write_targets(&mut out, targets);
                measured += targets.len();
            }
            Instruction::Reset { targets } => {
                out.push('R');
                write_targets(&mut out, targets);
            }
            Instruction::Detector { records } => {
                out.push_str("DETECTOR");
                write_records(&mut out, records, measured);
            }
            Instruction::ObservableInclude { index, records } => {
                write!(out, "OBSERVABLE_INCLUDE({index})").unwrap();
                write_records(&mut out, records, measured);
            }
        }
        out.push('\n');
    }
    out
}

enum Parsed {
    Inst(Instruction),
    Skip,
}

struct Line<'a> {
    name: &'a str,
    args: Vec<f64>,
    tokens: Vec<&'a str>,
}

fn split_line(s: &str) -> Result<Line<'_>, String> {
    let mut parts = s.split_whitespace();
    let head = parts.next().ok_or("empty instruction")?;
    let (name, args) = match head.find('(') {
        Some(open) => {
            let close = head.rfind(')').filter(|&c| c == head.len() - 1).ok_or("unclosed argument list")?;
            let args = head[open + 1..close]
                .split(',')
                .filter(|a| !a.trim().is_empty())
                .map(|a| a.trim().parse::<f64>().map_err(|_| format!("bad argument `{a}`")))
                .collect::<Result<Vec<_>, _>>()?;
            (&head[..open], args)
        }
        None => (head, Vec::new()),
    };
    Ok(Line { name, args, tokens: parts.collect() })
}

fn qubits(tokens: &[&str]) -> Result<Vec<usize>, String> {
    tokens.iter().map(|t| t.parse::<usize>().map_err(|_| format!("bad qubit target `{t}`"))).collect()
}

fn records(tokens: &[&str], measured: usize) -> Result<Vec<usize>, String> {
    tokens
        .iter()
        .map(|t| {
            let k = t
                .strip_prefix("rec[-")
                .and_then(|r| r.strip_suffix(']'))
                .and_then(|k| k.parse::<usize>().ok())
                .ok_or_else(|| format!("bad record target `{t}`"))?;
            if k == 0 || k > measured {
                return Err(format!("{t} refers past the {measured} records measured so far"));
            }
            Ok(measured - k)
        })
        .collect()
}

fn one_arg(l: &Line, default: Option<f64>) -> Result<f64, String> {
    match (l.args.as_slice(), default) {
        ([p], _) => Ok(*p),
        ([], Some(d)) => Ok(d),
        _ => Err(format!("{} takes exactly one argument", l.name)),
    }
}

fn parse_line(l: &Line, measured: usize) -> Result<Parsed, String> {
    let no_args = || if l.args.is_empty() { Ok(()) } else { Err(format!("{} takes no arguments", l.name)) };
    let inst = match l.name {
        "TICK" | "QUBIT_COORDS" | "SHIFT_COORDS" => return Ok(Parsed::Skip),
        "M" | "MZ" => Instruction::Measure { flip: one_arg(l, Some(0.0))?, targets: qubits(&l.tokens)? },
        "R" | "RZ" => {
            no_args()?;
            Instruction::Reset { targets: qubits(&l.tokens)? }
        }
        // Detector coordinates are accepted and dropped.
        "DETECTOR" => Instruction::Detector { records: records(&l.tokens, measured)? },
        "OBSERVABLE_INCLUDE" => {
            let idx = one_arg(l, None)?;
            if idx < 0.0 || idx.fract() != 0.0 {
                return Err(format!("bad observable index {idx}"));
            }
            Instruction::ObservableInclude { index: idx as usize, records: records(&l.tokens, measured)? }
        }
        "DEPOLARIZE1" => Instruction::Noise {
            channel: NoiseChannel::Depolarize1(one_arg(l, None)?),
            targets: qubits(&l.tokens)?,
        },
        "DEPOLARIZE2" => Instruction::Noise {
            channel: NoiseChannel::Depolarize2(one_arg(l, None)?),
            targets: qubits(&l.tokens)?,
        },
        "X_ERROR" => {
            Instruction::Noise { channel: NoiseChannel::XError(one_arg(l, None)?), targets: qubits(&l.tokens)? }
        }
        name => {
            let gate = Gate::from_name(name).ok_or_else(|| format!("unknown instruction `{name}`"))?;
            no_args()?;
            Instruction::Gate { gate, targets: qubits(&l.tokens)? }
        }
    };
    Ok(Parsed::Inst(inst))
}

fn max_target(inst: &Instruction) -> Option<usize> {
    match inst {
        Instruction::Gate { targets, .. }
        | Instruction::Noise { targets, .. }
        | Instruction::Measure { targets, .. }
        | Instruction::Reset { targets } => targets.iter().copied().max(),
        _ => None,
    }
}

pub fn parse(text: &str) -> Result<CliffordCircuit, ParseError> {
    let mut declared = None;
    let mut insts = Vec::new();
    let mut measured = 0;
    for (i, raw) in text.lines().enumerate() {
        let err = |message: String| ParseError { line: i + 1, message };
        let (code, comment) = match raw.find('#') {
            Some(h) => (&raw[..h], Some(&raw[h + 1..])),
            None => (raw, None),
        };
        if let Some(n) = comment.and_then(|c| c.trim().strip_prefix("qubits:")) {
            declared = Some(n.trim().parse::<usize>().map_err(|_| err(format!("bad qubit count `{}`", n.trim())))?);
        }
        if code.trim().is_empty() {
            continue;
        }
        let line = split_line(code.trim()).map_err(err)?;
        if let Parsed::Inst(inst) = parse_line(&line, measured).map_err(err)? {
            measured += inst.measurement_count();
            insts.push((i + 1, inst));
        }
    }
    let inferred = insts.iter().filter_map(|(_, inst)| max_target(inst)).max().map_or(0, |m| m + 1);
    let n = declared.unwrap_or(inferred);
    let mut c = CliffordCircuit::new(n);
    for (line, inst) in insts {
        c.push(inst).map_err(|e| ParseError { line, message: e.to_string() })?;
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_records() {
        let c = parse("R 0 1\nH 0\nCX 0 1\nM(0.01) 0 1\nDETECTOR rec[-1] rec[-2]\nOBSERVABLE_INCLUDE(0) rec[-1]\n")
            .unwrap();
        assert_eq!(c.num_qubits(), 2);
        assert_eq!(c.detector_records(), vec![vec![1, 0]]);
        assert_eq!(c.observable_records(), vec![vec![1]]);
        assert_eq!(parse(&to_text(&c)).unwrap(), c);
    }

    #[test]
    fn declared_qubits_and_comments() {
        let c = parse("# qubits: 5\nH 0  # trailing\nTICK\n\nS_DAG 1\n").unwrap();
        assert_eq!(c.num_qubits(), 5);
        assert_eq!(c.len(), 2);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse("H 0\nFOO 1\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.message.contains("FOO"));
        assert_eq!(parse("M 0\nDETECTOR rec[-2]\n").unwrap_err().line, 2);
        assert_eq!(parse("CX 0 0\n").unwrap_err().line, 1);
        assert_eq!(parse("X_ERROR(1.5) 0\n").unwrap_err().line, 1);
        assert!(parse("H(0.1) 0\n").is_err());
        assert!(parse("DEPOLARIZE1 0\n").is_err());
    }
}
