//! Generate, sample and analyze sweep points.

use std::sync::atomic::{AtomicUsize, Ordering};

use anyhow::Context;
use rayon::prelude::*;

use fermistab_core::analysis::{analyze, AnalysisOptions, MetricsReport};
use fermistab_core::circuits::{assemble_experiment, ExperimentCircuit, ExperimentSpec};
use fermistab_core::noise::{apply_noise, ErrorModel};
use fermistab_core::{CliffordCircuit, SampleBatch};

use crate::config::{derive_seed, Point};
use crate::report::{Counts, PointResult, ResultRow};
use crate::sample::sample;

/// Assembles every spec, in parallel, keeping the order.
pub fn assemble_all(specs: &[ExperimentSpec]) -> anyhow::Result<Vec<ExperimentCircuit>> {
    specs
        .par_iter()
        .map(|s| assemble_experiment(s).with_context(|| format!("assembling {}", s.describe())))
        .collect()
}

pub fn noisy_circuit(exp: &ExperimentCircuit, model: &Option<ErrorModel>) -> anyhow::Result<CliffordCircuit> {
    Ok(match model {
        Some(m) => apply_noise(&exp.circuit, m)?,
        None => exp.circuit.clone(),
    })
}

/// Seed of the bootstrap for a point sampled with `seed`.
pub fn analysis_seed(seed: u64) -> u64 {
    derive_seed(seed, 4, 0)
}

/// Analyzes a batch holding every detector row, postselecting on `rows`.
pub fn analyze_rows(batch: &SampleBatch, rows: &[usize], resamples: usize, seed: u64) -> anyhow::Result<MetricsReport> {
    let b = batch.with_detectors(rows);
    Ok(analyze(&b, &AnalysisOptions { resamples, seed: analysis_seed(seed) })?)
}

pub fn run_point(point: &Point, exp: &ExperimentCircuit, resamples: usize) -> anyhow::Result<(ResultRow, PointResult)> {
    let c = noisy_circuit(exp, &point.model)?;
    let batch = sample(&c, point.shots, point.seed, &exp.aux_rows());
    let metrics = analyze_rows(&batch, &exp.postselection_rows(), resamples, point.seed)
        .with_context(|| format!("analyzing {}", point.id))?;
    Ok(results(point, exp.counts.into(), metrics))
}

pub fn results(point: &Point, gate_counts: Counts, metrics: MetricsReport) -> (ResultRow, PointResult) {
    let row = ResultRow::new(&point.id, &point.spec, &point.model, &metrics);
    let full = PointResult {
        id: point.id.clone(),
        description: point.spec.describe(),
        error_model: point.model,
        seed: point.seed,
        gate_counts,
        exclusion_reason: metrics.excluded.as_ref().map(|e| e.reason()),
        metrics,
    };
    (row, full)
}

/// Runs all points in a work pool. Results keep the point order.
pub fn sweep(points: &[Point], circuits: &[ExperimentCircuit], resamples: usize) -> anyhow::Result<Vec<(ResultRow, PointResult)>> {
    let done = AtomicUsize::new(0);
    points
        .par_iter()
        .map(|p| {
            let r = run_point(p, &circuits[p.circuit], resamples);
            let n = done.fetch_add(1, Ordering::Relaxed) + 1;
            log::info!("[{n}/{}] {}", points.len(), p.id);
            r
        })
        .collect()
}
