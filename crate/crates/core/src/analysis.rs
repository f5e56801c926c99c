//! Metrics of a sampled batch: detection rate, postselected observable
//! error rates, bootstrap intervals and the VQED quotient estimator.
//!
//! Detector and observable bits are deviations from the noiseless
//! reference, so a set observable bit is always an error.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::{get_bit, popcount, tail_mask, BitMatrix};
use crate::error::{Error, Result};
use crate::frame::SampleBatch;

/// Points with a detection rate at or above this are excluded.
pub const MAX_DETECTION_RATE: f64 = 0.995;
/// Points with fewer postselected shots than this are excluded.
pub const MIN_POSTSELECTED: usize = 500;
pub const DEFAULT_RESAMPLES: usize = 1000;

/// Result of discarding every shot with a nonzero detector.
#[derive(Clone, Debug, PartialEq)]
pub struct Postselected {
    pub kept: SampleBatch,
    pub n_samp: usize,
    pub n_discard: usize,
    pub r_det: f64,
    /// Set bits mark kept shots of the input batch.
    pub keep_mask: Vec<u64>,
}

fn rate(count: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        count as f64 / total as f64
    }
}

/// Keeps exactly the shots whose detector bits are all zero.
pub fn postselect(b: &SampleBatch) -> Postselected {
    let flagged = b.detectors.any_of_rows(0..b.num_detectors());
    let mut keep: Vec<u64> = flagged.iter().map(|w| !w).collect();
    if let Some(last) = keep.last_mut() {
        *last &= tail_mask(b.shots);
    }
    let kept_shots = popcount(&keep);
    let kept = SampleBatch {
        shots: kept_shots,
        detectors: b.detectors.select_columns(&keep),
        observables: b.observables.select_columns(&keep),
        aux: b.aux.as_ref().map(|a| a.select_columns(&keep)),
    };
    let n_discard = b.shots - kept_shots;
    Postselected { kept, n_samp: b.shots, n_discard, r_det: rate(n_discard, b.shots), keep_mask: keep }
}

/// [`postselect`] on a subset of the detector rows.
pub fn postselect_rows(b: &SampleBatch, rows: &[usize]) -> Postselected {
    postselect(&b.with_detectors(rows))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObservableRates {
    /// Fraction of shots with at least one observable error.
    pub any: f64,
    pub local: Vec<f64>,
    pub worst: f64,
}

pub fn observable_rates(kept: &SampleBatch) -> Result<ObservableRates> {
    if kept.shots == 0 {
        return Err(Error::EmptyBatch);
    }
    let n = kept.shots;
    let any = rate(popcount(&kept.observables.any_of_rows(0..kept.num_observables())), n);
    let local: Vec<f64> = (0..kept.num_observables()).map(|r| rate(popcount(kept.observables.row(r)), n)).collect();
    let worst = local.iter().copied().fold(0.0, f64::max);
    Ok(ObservableRates { any, local, worst })
}

/// A percentile bootstrap interval. It is widened if needed so that it
/// always contains the point estimate; for biased statistics such as a
/// maximum of rates the plain percentile interval can miss it.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Interval {
    pub estimate: f64,
    pub low: f64,
    pub high: f64,
    /// Variance of the statistic over resamples.
    pub variance: f64,
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let i = libm::floor(pos) as usize;
    let frac = pos - i as f64;
    if i + 1 < sorted.len() {
        sorted[i] * (1.0 - frac) + sorted[i + 1] * frac
    } else {
        sorted[i]
    }
}

/// Multiplicities of one resample with replacement of `n` items. Resample
/// `r` only depends on `(seed, r)`.
pub fn resample_counts(n: usize, seed: u64, r: u64, counts: &mut Vec<u32>) {
    counts.clear();
    counts.resize(n, 0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(r);
    for _ in 0..n {
        counts[rng.random_range(0..n)] += 1;
    }
}

/// 95% percentile interval of `stat` over `resamples` shot-level resamples.
/// `stat` receives the multiplicity of every shot (all ones for the point
/// estimate).
pub fn bootstrap<F: Fn(&[u32]) -> f64>(n: usize, stat: F, resamples: usize, seed: u64) -> Result<Interval> {
    if n == 0 {
        return Err(Error::EmptyBatch);
    }
    if resamples == 0 {
        return Err(Error::InvalidSpec(String::from("bootstrap needs at least one resample")));
    }
    let estimate = stat(&vec![1; n]);
    let mut counts = Vec::with_capacity(n);
    let mut values: Vec<f64> = (0..resamples)
        .map(|r| {
            resample_counts(n, seed, r as u64, &mut counts);
            stat(&counts)
        })
        .collect();
    Ok(interval_from(estimate, &mut values))
}

/// Interval from the statistic's values on every resample.
pub fn interval_from(estimate: f64, values: &mut [f64]) -> Interval {
    values.sort_by(|a, b| a.total_cmp(b));
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let variance = if values.len() > 1 {
        values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (values.len() - 1) as f64
    } else {
        0.0
    };
    Interval {
        estimate,
        low: quantile(values, 0.025).min(estimate),
        high: quantile(values, 0.975).max(estimate),
        variance,
    }
}

/// Shots with at least one observable error and the mask of their errors,
/// the only data the rate statistics depend on.
#[derive(Clone, Debug)]
pub struct ErrorShots {
    pub shots: usize,
    pub num_observables: usize,
    pub indices: Vec<usize>,
    pub masks: Vec<Vec<bool>>,
}

impl ErrorShots {
    pub fn new(kept: &SampleBatch) -> Self {
        let any = kept.observables.any_of_rows(0..kept.num_observables());
        let indices: Vec<usize> = (0..kept.shots).filter(|&s| get_bit(&any, s)).collect();
        let masks = indices
            .iter()
            .map(|&s| (0..kept.num_observables()).map(|r| kept.observables.get(r, s)).collect())
            .collect();
        ErrorShots { shots: kept.shots, num_observables: kept.num_observables(), indices, masks }
    }

    /// Worst local rate under the multiplicities `w`.
    pub fn worst(&self, w: &[u32]) -> f64 {
        let total: u64 = w.iter().map(|&c| c as u64).sum();
        let mut per = vec![0u64; self.num_observables];
        for (&s, m) in self.indices.iter().zip(&self.masks) {
            for (p, &bit) in per.iter_mut().zip(m) {
                if bit {
                    *p += w[s] as u64;
                }
            }
        }
        per.into_iter().max().map_or(0.0, |m| m as f64 / total as f64)
    }

    /// Rate of shots with any observable error under the multiplicities `w`.
    pub fn any(&self, w: &[u32]) -> f64 {
        let total: u64 = w.iter().map(|&c| c as u64).sum();
        self.indices.iter().map(|&s| w[s] as u64).sum::<u64>() as f64 / total as f64
    }
}

/// Detection rate of a raw batch under multiplicities `w` (bootstrap
/// statistic).
pub fn detection_rate_weighted(discarded: &[u64], w: &[u32]) -> f64 {
    let total: u64 = w.iter().map(|&c| c as u64).sum();
    let hit: u64 = w.iter().enumerate().filter(|(s, _)| get_bit(discarded, *s)).map(|(_, &c)| c as u64).sum();
    hit as f64 / total as f64
}

/// VQED quotient estimate for one observable.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VqedObservable {
    pub sum_b: i64,
    pub sum_o: i64,
    /// `sum_o / sum_b`, the estimated expectation of the (deviation) sign.
    pub estimate: f64,
    /// Delta-method variance of `estimate`.
    pub variance: f64,
}

impl VqedObservable {
    /// Error rate implied by the estimate, `(1 - O) / 2`.
    pub fn error_rate(&self) -> f64 {
        (1.0 - self.estimate) / 2.0
    }

    pub fn error_variance(&self) -> f64 {
        self.variance / 4.0
    }
}

/// VQED estimator. Per shot, `b = (-1)^(xor of all aux bits)` and for each
/// observable `o = (-1)^bit * b`; the estimate is `sum o / sum b`. The aux
/// rows already include the prepared stabilizer values, so no further sign
/// correction is applied here.
pub fn vqed_estimate(observables: &BitMatrix, aux: &BitMatrix) -> Result<Vec<VqedObservable>> {
    let n = observables.cols();
    if aux.cols() != n {
        return Err(Error::LengthMismatch { expected: n, found: aux.cols() });
    }
    let mut parity = vec![0u64; aux.stride()];
    for r in 0..aux.rows() {
        for (p, w) in parity.iter_mut().zip(aux.row(r)) {
            *p ^= w;
        }
    }
    let sum_b = n as i64 - 2 * popcount(&parity) as i64;
    if sum_b == 0 {
        return Err(Error::UndefinedEstimate);
    }
    let mut out = Vec::with_capacity(observables.rows());
    for r in 0..observables.rows() {
        let flips: usize = observables.row(r).iter().zip(&parity).map(|(a, b)| (a ^ b).count_ones() as usize).sum();
        let sum_o = n as i64 - 2 * flips as i64;
        let estimate = sum_o as f64 / sum_b as f64;
        let bbar = sum_b as f64 / n as f64;
        // Residuals o - O b have square (s - O)^2 with s = o b = +-1.
        let neg = popcount(observables.row(r));
        let pos = n - neg;
        let ss = pos as f64 * (1.0 - estimate) * (1.0 - estimate) + neg as f64 * (1.0 + estimate) * (1.0 + estimate);
        let variance = if n > 1 { ss / (n as f64 * (n - 1) as f64) / (bbar * bbar) } else { 0.0 };
        out.push(VqedObservable { sum_b, sum_o, estimate, variance });
    }
    Ok(out)
}

/// Why a point is left out of plots.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Exclusion {
    DetectionRate,
    TooFewShots,
}

impl Exclusion {
    pub fn reason(&self) -> &'static str {
        match self {
            Exclusion::DetectionRate => "detection rate at or above 0.995",
            Exclusion::TooFewShots => "fewer than 500 postselected shots",
        }
    }
}

pub fn exclusion(r_det: f64, n_post: usize) -> Option<Exclusion> {
    if r_det >= MAX_DETECTION_RATE {
        Some(Exclusion::DetectionRate)
    } else if n_post < MIN_POSTSELECTED {
        Some(Exclusion::TooFewShots)
    } else {
        None
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VqedSummary {
    /// Index of the observable with the largest estimated error.
    pub worst_observable: usize,
    /// Its error rate `(1 - O) / 2` and variance.
    pub estimate: f64,
    pub variance: f64,
    pub sum_b: i64,
    pub sum_o: i64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MetricsReport {
    pub n_samp: usize,
    pub n_discard: usize,
    pub r_det: f64,
    pub n_post: usize,
    /// Rates are absent when no shot survives postselection.
    pub r_obs_any: Option<f64>,
    pub r_obs_local: Vec<f64>,
    pub r_obs_worst: Option<f64>,
    pub ci_worst: Option<Interval>,
    pub ci_any: Option<Interval>,
    pub ci_det: Option<Interval>,
    pub excluded: Option<Exclusion>,
    pub vqed: Option<VqedSummary>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AnalysisOptions {
    /// 0 disables bootstrapping.
    pub resamples: usize,
    pub seed: u64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions { resamples: DEFAULT_RESAMPLES, seed: 0 }
    }
}

/// Full analysis of a batch whose detector rows are exactly the ones to
/// postselect on. A present `aux` matrix triggers the VQED estimator on the
/// postselected shots.
pub fn analyze(batch: &SampleBatch, opts: &AnalysisOptions) -> Result<MetricsReport> {
    let ps = postselect(batch);
    let n_post = ps.kept.shots;
    let mut report = MetricsReport {
        n_samp: ps.n_samp,
        n_discard: ps.n_discard,
        r_det: ps.r_det,
        n_post,
        r_obs_any: None,
        r_obs_local: Vec::new(),
        r_obs_worst: None,
        ci_worst: None,
        ci_any: None,
        ci_det: None,
        excluded: exclusion(ps.r_det, n_post),
        vqed: None,
    };
    if opts.resamples > 0 && ps.n_samp > 0 {
        let discarded: Vec<u64> = ps.keep_mask.iter().map(|w| !w).collect();
        report.ci_det =
            Some(bootstrap(ps.n_samp, |w| detection_rate_weighted(&discarded, w), opts.resamples, opts.seed)?);
    }
    if n_post == 0 {
        return Ok(report);
    }
    let rates = observable_rates(&ps.kept)?;
    report.r_obs_any = Some(rates.any);
    report.r_obs_worst = Some(rates.worst);
    report.r_obs_local = rates.local;
    if opts.resamples > 0 {
        let es = ErrorShots::new(&ps.kept);
        report.ci_worst = Some(bootstrap(n_post, |w| es.worst(w), opts.resamples, opts.seed ^ 1)?);
        report.ci_any = Some(bootstrap(n_post, |w| es.any(w), opts.resamples, opts.seed ^ 2)?);
    }
    if let Some(aux) = &ps.kept.aux {
        let est = vqed_estimate(&ps.kept.observables, aux)?;
        if let Some((i, o)) = est.iter().enumerate().max_by(|a, b| a.1.error_rate().total_cmp(&b.1.error_rate())) {
            report.vqed = Some(VqedSummary {
                worst_observable: i,
                estimate: o.error_rate(),
                variance: o.error_variance(),
                sum_b: o.sum_b,
                sum_o: o.sum_o,
            });
        }
    }
    Ok(report)
}
