//! Experiment metadata sidecars and result tables.

use serde::{Deserialize, Serialize};

use fermistab_core::analysis::MetricsReport;
use fermistab_core::circuit::GateCounts;
use fermistab_core::circuits::{
    CircuitKind, DetectorLabel, ExperimentCircuit, ExperimentSpec, ObservableLabel, Stages, VqedLayer,
};
use fermistab_core::noise::ErrorModel;

use crate::config::{model_label, Point};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub one_qubit: usize,
    pub two_qubit: usize,
}

impl From<GateCounts> for Counts {
    fn from(g: GateCounts) -> Self {
        Counts { one_qubit: g.one_qubit, two_qubit: g.two_qubit }
    }
}

/// JSON written next to each circuit file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub id: String,
    pub description: String,
    pub spec: ExperimentSpec,
    pub error_model: Option<ErrorModel>,
    pub shots: usize,
    pub seed: u64,
    pub num_qubits: usize,
    pub data_qubits: usize,
    pub num_measurements: usize,
    pub gate_counts: Counts,
    /// Counts of the mirrored logical circuit alone.
    pub logical_gate_counts: Counts,
    pub detectors: Vec<DetectorLabel>,
    /// Noiseless parity of each detector; sampled bits are deviations from it.
    pub detector_expected: Vec<bool>,
    pub observables: Vec<ObservableLabel>,
    pub observable_expected: Vec<bool>,
    /// Detector rows the mitigation postselects on.
    pub postselection_rows: Vec<usize>,
    /// Observable rows holding VQED auxiliary parities.
    pub aux_rows: Vec<usize>,
    pub vqed_layers: Vec<VqedLayer>,
    pub stages: Stages,
    pub edge_flips: Vec<bool>,
}

impl Sidecar {
    pub fn new(point: &Point, exp: &ExperimentCircuit) -> Self {
        Sidecar {
            id: point.id.clone(),
            description: exp.spec.describe(),
            spec: exp.spec.clone(),
            error_model: point.model,
            shots: point.shots,
            seed: point.seed,
            num_qubits: exp.circuit.num_qubits(),
            data_qubits: exp.data_qubits,
            num_measurements: exp.circuit.num_measurements(),
            gate_counts: exp.counts.into(),
            logical_gate_counts: exp.logical_counts.into(),
            detectors: exp.detector_labels.clone(),
            detector_expected: exp.detector_expected.clone(),
            observables: exp.observable_labels.clone(),
            observable_expected: exp.observable_expected.clone(),
            postselection_rows: exp.postselection_rows(),
            aux_rows: exp.aux_rows(),
            vqed_layers: exp.vqed.clone(),
            stages: exp.stages,
            edge_flips: exp.edge_flips.clone(),
        }
    }
}

/// One CSV row. The identifying columns come first, then the metric
/// columns in their fixed order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub id: String,
    pub encoding: String,
    #[serde(rename = "L")]
    pub l: usize,
    pub circuit: String,
    /// Trotter steps or fraction of terms.
    pub depth: f64,
    pub readout: String,
    pub mitigation: String,
    pub model: String,
    pub p: f64,
    pub n_samp: usize,
    pub n_discard: usize,
    #[serde(rename = "R_det")]
    pub r_det: f64,
    pub n_post: usize,
    #[serde(rename = "R_obs_any")]
    pub r_obs_any: Option<f64>,
    #[serde(rename = "R_obs_worst")]
    pub r_obs_worst: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub excluded: bool,
    pub vqed_est: Option<f64>,
    pub vqed_var: Option<f64>,
}

fn readout_name(spec: &ExperimentSpec) -> String {
    match spec.readout {
        fermistab_core::circuits::Readout::Occupation => "occupation".into(),
        fermistab_core::circuits::Readout::Hopping { color, xx } => {
            format!("hopping({color},{})", if xx { "XX" } else { "YY" })
        }
    }
}

impl ResultRow {
    pub fn new(id: &str, spec: &ExperimentSpec, model: &Option<ErrorModel>, r: &MetricsReport) -> Self {
        let (circuit, depth) = match spec.kind {
            CircuitKind::Trotter { steps } => ("trotter", steps as f64),
            CircuitKind::Random { fraction, .. } => ("random", fraction),
        };
        ResultRow {
            id: id.to_string(),
            encoding: spec.encoding.name().into(),
            l: spec.l,
            circuit: circuit.into(),
            depth,
            readout: readout_name(spec),
            mitigation: spec.mitigation.name(),
            model: model_label(model),
            p: model.map_or(0.0, |m| m.p),
            n_samp: r.n_samp,
            n_discard: r.n_discard,
            r_det: r.r_det,
            n_post: r.n_post,
            r_obs_any: r.r_obs_any,
            r_obs_worst: r.r_obs_worst,
            ci_low: r.ci_worst.map(|c| c.low),
            ci_high: r.ci_worst.map(|c| c.high),
            excluded: r.excluded.is_some(),
            vqed_est: r.vqed.as_ref().map(|v| v.estimate),
            vqed_var: r.vqed.as_ref().map(|v| v.variance),
        }
    }
}

pub fn write_csv<W: std::io::Write>(out: W, rows: &[ResultRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: std::io::Read>(input: R) -> csv::Result<Vec<ResultRow>> {
    csv::Reader::from_reader(input).deserialize().collect()
}

/// Full per-point record for the JSON results file.
#[derive(Clone, Debug, Serialize)]
pub struct PointResult {
    pub id: String,
    pub description: String,
    pub error_model: Option<ErrorModel>,
    pub seed: u64,
    pub gate_counts: Counts,
    pub metrics: MetricsReport,
    pub exclusion_reason: Option<&'static str>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BootstrapInfo {
    pub method: &'static str,
    pub level: f64,
    pub resamples: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResultsFile {
    pub bootstrap: BootstrapInfo,
    pub max_detection_rate: f64,
    pub min_postselected: usize,
    pub points: Vec<PointResult>,
}

impl ResultsFile {
    pub fn new(resamples: usize, points: Vec<PointResult>) -> Self {
        ResultsFile {
            bootstrap: BootstrapInfo { method: "percentile", level: 0.95, resamples },
            max_detection_rate: fermistab_core::analysis::MAX_DETECTION_RATE,
            min_postselected: fermistab_core::analysis::MIN_POSTSELECTED,
            points,
        }
    }
}
