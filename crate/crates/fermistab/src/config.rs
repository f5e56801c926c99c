//! Sweep configuration files (TOML).
//!
//! ```toml
//! seed = 7
//! out = "results"
//!
//! [[noise]]
//! model = "SD"
//! p = [0.0001, 0.0005, 0.001]
//!
//! [[sweep]]
//! encodings = ["DK", "JW"]
//! sizes = [4]
//! trotter_steps = [1, 2, 4]
//! mitigations = ["none", "GP", "SR"]
//! skip_invalid = true
//! ```
//!
//! Each `[[sweep]]` block is a cartesian product of its axes; every product
//! point is combined with every noise point.

use std::fmt::Write as _;
use std::path::PathBuf;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use fermistab_core::circuits::{CircuitKind, CliffordAngle, Encoding, ExperimentSpec, Mitigation, Readout};
use fermistab_core::noise::ErrorModel;

pub const DEFAULT_SHOTS: usize = 100_000;
pub const DEFAULT_VQED_SHOTS: usize = 10_000;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("config syntax: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("config: {0}")]
    Invalid(String),
    #[error("experiment {describe}: {source}")]
    Spec { describe: String, source: fermistab_core::Error },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

/// `{model = "SD"|"SI", p = ...}` or `{model = "custom", p1, p2, ps, pm}`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseBlock {
    pub model: String,
    pub p: Option<OneOrMany<f64>>,
    pub p1: Option<f64>,
    pub p2: Option<f64>,
    pub ps: Option<f64>,
    pub pm: Option<f64>,
}

impl NoiseBlock {
    pub fn models(&self) -> Result<Vec<ErrorModel>, ConfigError> {
        let bad = |m: String| ConfigError::Invalid(m);
        let custom = [self.p1, self.p2, self.ps, self.pm];
        let named = |f: fn(f64) -> fermistab_core::Result<ErrorModel>| {
            if custom.iter().any(Option::is_some) {
                return Err(bad(format!("model {} takes `p`, not p1/p2/ps/pm", self.model)));
            }
            let ps = self.p.as_ref().ok_or_else(|| bad(format!("model {} needs `p`", self.model)))?.to_vec();
            if ps.is_empty() {
                return Err(bad(format!("model {} has an empty `p` list", self.model)));
            }
            ps.into_iter().map(|p| f(p).map_err(|e| bad(e.to_string()))).collect()
        };
        match self.model.to_ascii_uppercase().as_str() {
            "SD" => named(ErrorModel::sd),
            "SI" => named(ErrorModel::si),
            "CUSTOM" => {
                if self.p.is_some() {
                    return Err(bad("a custom model takes p1/p2/ps/pm, not `p`".into()));
                }
                match custom {
                    [Some(p1), Some(p2), Some(ps), Some(pm)] => {
                        Ok(vec![ErrorModel::custom(p1, p2, ps, pm).map_err(|e| bad(e.to_string()))?])
                    }
                    _ => Err(bad("a custom model needs all of p1, p2, ps, pm".into())),
                }
            }
            other => Err(bad(format!("unknown error model `{other}` (expected SD, SI or custom)"))),
        }
    }
}

fn default_sizes() -> Vec<usize> {
    vec![4]
}

fn default_mitigations() -> Vec<String> {
    vec!["none".into()]
}

fn default_readouts() -> Vec<String> {
    vec!["occupation".into()]
}

fn default_hop() -> f64 {
    1.0
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    pub encodings: Vec<Encoding>,
    #[serde(default = "default_sizes")]
    pub sizes: Vec<usize>,
    #[serde(default)]
    pub trotter_steps: Vec<usize>,
    /// Fractions of Hamiltonian terms for random circuits (mirror included).
    #[serde(default)]
    pub fractions: Vec<f64>,
    pub random_seed: Option<u64>,
    #[serde(default = "default_mitigations")]
    pub mitigations: Vec<String>,
    /// `"occupation"` or `"hopping(C,XX)"` / `"hopping(C,YY)"` with C in 0..4.
    #[serde(default = "default_readouts")]
    pub readouts: Vec<String>,
    /// Occupied sites of the prepared Slater state.
    #[serde(default)]
    pub prep_sites: Vec<usize>,
    /// Rotation angle in units of pi/4.
    pub angle: Option<u8>,
    pub prep_flags: Option<bool>,
    #[serde(default)]
    pub sm_repeat: bool,
    #[serde(default)]
    pub vqed_flags: bool,
    pub vqed_seed: Option<u64>,
    #[serde(default)]
    pub extra_detectors: bool,
    #[serde(default = "default_hop")]
    pub t_hop: f64,
    #[serde(default = "default_hop")]
    pub u_coulomb: f64,
    pub shots: Option<usize>,
    /// Drop invalid combinations instead of failing.
    #[serde(default)]
    pub skip_invalid: bool,
}

fn default_out() -> PathBuf {
    PathBuf::from("fermistab-out")
}

fn default_resamples() -> usize {
    fermistab_core::analysis::DEFAULT_RESAMPLES
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default)]
    pub seed: u64,
    /// Overrides the per-experiment default.
    pub shots: Option<usize>,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default = "default_resamples")]
    pub resamples: usize,
    /// Noiseless when empty.
    #[serde(default)]
    pub noise: Vec<NoiseBlock>,
    pub sweep: Vec<SweepBlock>,
}

/// One fully resolved sweep point.
#[derive(Clone, Debug)]
pub struct Point {
    pub id: String,
    pub spec: ExperimentSpec,
    /// Index of the circuit (spec) shared by points that differ only in noise.
    pub circuit: usize,
    pub model: Option<ErrorModel>,
    pub shots: usize,
    pub seed: u64,
}

pub fn parse_mitigation(s: &str) -> Result<Mitigation, ConfigError> {
    let t = s.trim().to_ascii_lowercase();
    let m = match t.as_str() {
        "none" => Mitigation::None,
        "gp" => Mitigation::Gp,
        "sr" => Mitigation::Sr,
        "sm" => Mitigation::Sm,
        "sm+flags" | "sm_flags" => Mitigation::SmFlags,
        _ => {
            let layers = t
                .strip_prefix("vqed(")
                .and_then(|r| r.strip_suffix(')'))
                .and_then(|n| n.parse::<usize>().ok())
                .ok_or_else(|| {
                    ConfigError::Invalid(format!("unknown mitigation `{s}` (none, GP, SR, SM, SM+flags, VQED(m))"))
                })?;
            Mitigation::Vqed { layers }
        }
    };
    Ok(m)
}

pub fn parse_readout(s: &str) -> Result<Readout, ConfigError> {
    let t = s.trim().to_ascii_lowercase().replace(' ', "");
    if t == "occupation" {
        return Ok(Readout::Occupation);
    }
    let bad = || ConfigError::Invalid(format!("unknown readout `{s}` (occupation or hopping(C,XX|YY))"));
    let inner = t.strip_prefix("hopping(").and_then(|r| r.strip_suffix(')')).ok_or_else(bad)?;
    let (c, kind) = inner.split_once(',').ok_or_else(bad)?;
    let color = c.parse::<u8>().map_err(|_| bad())?;
    let xx = match kind {
        "xx" => true,
        "yy" => false,
        _ => return Err(bad()),
    };
    Ok(Readout::Hopping { color, xx })
}

/// Seed for stream `index` of kind `tag`, derived from the master seed.
pub fn derive_seed(master: u64, tag: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream((tag << 48) ^ index);
    rng.next_u64()
}

fn slug(s: &str) -> String {
    let mut out = String::new();
    for ch in s.chars() {
        match ch {
            'a'..='z' | 'A'..='Z' | '0'..='9' | '.' | '-' => out.push(ch),
            '+' => out.push('p'),
            _ if !out.ends_with('_') => out.push('_'),
            _ => {}
        }
    }
    out.trim_matches('_').to_string()
}

fn kind_label(k: &CircuitKind) -> String {
    match k {
        CircuitKind::Trotter { steps } => format!("trotter{steps}"),
        CircuitKind::Random { fraction, .. } => format!("random{fraction}"),
    }
}

fn readout_label(r: &Readout) -> String {
    match r {
        Readout::Occupation => "occupation".into(),
        Readout::Hopping { color, xx } => format!("hopping{color}{}", if *xx { "XX" } else { "YY" }),
    }
}

pub fn model_label(m: &Option<ErrorModel>) -> String {
    m.as_ref().map_or_else(|| "noiseless".into(), |m| m.label())
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    fn noise_points(&self) -> Result<Vec<Option<ErrorModel>>, ConfigError> {
        if self.noise.is_empty() {
            return Ok(vec![None]);
        }
        let mut out = Vec::new();
        for b in &self.noise {
            out.extend(b.models()?.into_iter().map(Some));
        }
        Ok(out)
    }

    /// Distinct experiment specs, in sweep order.
    pub fn specs(&self) -> Result<Vec<ExperimentSpec>, ConfigError> {
        if self.sweep.is_empty() {
            return Err(ConfigError::Invalid("no [[sweep]] block".into()));
        }
        let mut specs: Vec<ExperimentSpec> = Vec::new();
        for b in &self.sweep {
            let mut kinds: Vec<CircuitKind> = b.trotter_steps.iter().map(|&steps| CircuitKind::Trotter { steps }).collect();
            let random_seed = b.random_seed.unwrap_or_else(|| derive_seed(self.seed, 1, 0));
            kinds.extend(b.fractions.iter().map(|&fraction| CircuitKind::Random { fraction, seed: random_seed }));
            if kinds.is_empty() {
                return Err(ConfigError::Invalid("a sweep block needs trotter_steps or fractions".into()));
            }
            for axis in [("encodings", b.encodings.len()), ("sizes", b.sizes.len()), ("mitigations", b.mitigations.len()), ("readouts", b.readouts.len())] {
                if axis.1 == 0 {
                    return Err(ConfigError::Invalid(format!("axis `{}` is empty", axis.0)));
                }
            }
            let mitigations = b.mitigations.iter().map(|m| parse_mitigation(m)).collect::<Result<Vec<_>, _>>()?;
            let readouts = b.readouts.iter().map(|r| parse_readout(r)).collect::<Result<Vec<_>, _>>()?;
            let angle = CliffordAngle(b.angle.unwrap_or(CliffordAngle::DEFAULT.0) % 8);
            for &encoding in &b.encodings {
                for &l in &b.sizes {
                    for readout in &readouts {
                        for &mitigation in &mitigations {
                            for kind in &kinds {
                                let prep = (!b.prep_sites.is_empty()).then(|| {
                                    let mut v = vec![false; l * l];
                                    for &s in &b.prep_sites {
                                        if s < v.len() {
                                            v[s] = true;
                                        }
                                    }
                                    v
                                });
                                let spec = ExperimentSpec {
                                    encoding,
                                    l,
                                    kind: *kind,
                                    readout: *readout,
                                    mitigation,
                                    prep,
                                    angle,
                                    prep_flags: b.prep_flags,
                                    sm_repeat: b.sm_repeat,
                                    vqed_flags: b.vqed_flags,
                                    vqed_seed: b.vqed_seed.unwrap_or_else(|| derive_seed(self.seed, 3, 0)),
                                    extra_detectors: b.extra_detectors,
                                    t_hop: b.t_hop,
                                    u_coulomb: b.u_coulomb,
                                };
                                if let Some(&s) = b.prep_sites.iter().find(|&&s| s >= l * l) {
                                    return Err(ConfigError::Invalid(format!("prep site {s} outside an L={l} lattice")));
                                }
                                match spec.validate() {
                                    Ok(()) => {}
                                    Err(_) if b.skip_invalid => continue,
                                    Err(source) => return Err(ConfigError::Spec { describe: spec.describe(), source }),
                                }
                                if !specs.contains(&spec) {
                                    specs.push(spec);
                                }
                            }
                        }
                    }
                }
            }
        }
        if specs.is_empty() {
            return Err(ConfigError::Invalid("every combination was skipped as invalid".into()));
        }
        Ok(specs)
    }

    fn shots_for(&self, spec: &ExperimentSpec) -> usize {
        let block = self.sweep.iter().find_map(|b| b.shots);
        self.shots.or(block).unwrap_or(match spec.mitigation {
            Mitigation::Vqed { .. } => DEFAULT_VQED_SHOTS,
            _ => DEFAULT_SHOTS,
        })
    }

    /// The resolved experiment matrix. `shots` overrides every point.
    pub fn points(&self, shots: Option<usize>) -> Result<Vec<Point>, ConfigError> {
        let specs = self.specs()?;
        let noise = self.noise_points()?;
        let mut out = Vec::new();
        for (ci, spec) in specs.iter().enumerate() {
            for model in &noise {
                let index = out.len();
                let id = slug(&format!(
                    "{index:03}-{}-L{}-{}-{}-{}-{}",
                    spec.encoding.name(),
                    spec.l,
                    kind_label(&spec.kind),
                    readout_label(&spec.readout),
                    spec.mitigation.name(),
                    model_label(model)
                ));
                out.push(Point {
                    id,
                    spec: spec.clone(),
                    circuit: ci,
                    model: *model,
                    shots: shots.unwrap_or_else(|| self.shots_for(spec)),
                    seed: derive_seed(self.seed, 2, index as u64),
                });
            }
        }
        Ok(out)
    }

    /// Human-readable table of the resolved matrix.
    pub fn explain(&self, shots: Option<usize>) -> Result<String, ConfigError> {
        let points = self.points(shots)?;
        let mut s = String::new();
        writeln!(s, "{} points, master seed {}, output {}", points.len(), self.seed, self.out.display()).unwrap();
        for p in &points {
            writeln!(s, "{:<60} {:<30} shots={} seed={}", p.spec.describe(), model_label(&p.model), p.shots, p.seed).unwrap();
        }
        Ok(s)
    }
}
