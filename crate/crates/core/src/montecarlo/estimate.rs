//! Estimators over trial tables. All are order-independent reductions.

use serde::Serialize;

use super::TrialResult;
use crate::association::Tier;
use crate::units::{db_to_linear, linear_to_db};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EstimateError {
    #[error("no trial results")]
    Empty,
    #[error("target coverage {target} is outside the curve range")]
    OutOfRange { target: f64 },
    #[error("percentile must lie in (0, 100), got {0}")]
    BadPercentile(f64),
    #[error("v0 bins must be ordered and non-overlapping")]
    BadBins,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimateWithCI {
    pub value: f64,
    /// Standard error, ≥ 0.
    pub stderr: f64,
    pub n_trials: usize,
}

impl EstimateWithCI {
    /// Empirical fraction with binomial standard error.
    pub fn fraction(hits: usize, n: usize) -> Self {
        let p = if n == 0 { 0.0 } else { hits as f64 / n as f64 };
        let stderr = if n == 0 { 0.0 } else { (p * (1.0 - p) / n as f64).sqrt() };
        EstimateWithCI {
            value: p,
            stderr,
            n_trials: n,
        }
    }

    /// Sample mean with standard error s/√n.
    pub fn mean(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return EstimateWithCI {
                value: f64::NAN,
                stderr: 0.0,
                n_trials: 0,
            };
        }
        let m = values.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        EstimateWithCI {
            value: m,
            stderr: (var / n as f64).sqrt(),
            n_trials: n,
        }
    }
}

/// P(SINR > τ) on a grid of thresholds in dB.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageCurve {
    pub thresholds_db: Vec<f64>,
    pub probabilities: Vec<f64>,
    pub stderr: Vec<f64>,
    pub n_trials: usize,
}

impl CoverageCurve {
    pub fn len(&self) -> usize {
        self.thresholds_db.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thresholds_db.is_empty()
    }
}

/// Overall curve plus curves conditioned on the serving tier; a conditional
/// curve is `None` when no trial was served by that tier.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TieredCoverage {
    pub overall: CoverageCurve,
    pub sub6: Option<CoverageCurve>,
    pub mmwave: Option<CoverageCurve>,
}

/// Exceedance curve of an arbitrary linear-scale metric.
pub fn estimate_curve<F: Fn(&TrialResult) -> f64>(
    results: &[TrialResult],
    thresholds_db: &[f64],
    metric: F,
) -> Result<CoverageCurve, EstimateError> {
    if results.is_empty() {
        return Err(EstimateError::Empty);
    }
    let values: Vec<f64> = results.iter().map(metric).collect();
    let n = values.len();
    let (probabilities, stderr) = thresholds_db
        .iter()
        .map(|&t| {
            let lin = db_to_linear(t);
            let e = EstimateWithCI::fraction(values.iter().filter(|&&v| v > lin).count(), n);
            (e.value, e.stderr)
        })
        .unzip();
    Ok(CoverageCurve {
        thresholds_db: thresholds_db.to_vec(),
        probabilities,
        stderr,
        n_trials: n,
    })
}

pub fn estimate_coverage(results: &[TrialResult], thresholds_db: &[f64]) -> Result<TieredCoverage, EstimateError> {
    let overall = estimate_curve(results, thresholds_db, |t| t.sinr)?;
    let by_tier = |tier: Tier| {
        let sub: Vec<TrialResult> = results.iter().filter(|t| t.tier() == Some(tier)).copied().collect();
        estimate_curve(&sub, thresholds_db, |t| t.sinr).ok()
    };
    Ok(TieredCoverage {
        overall,
        sub6: by_tier(Tier::Sub6),
        mmwave: by_tier(Tier::MmWave),
    })
}

pub fn estimate_snr_coverage(results: &[TrialResult], thresholds_db: &[f64]) -> Result<CoverageCurve, EstimateError> {
    estimate_curve(results, thresholds_db, |t| t.snr)
}

/// P(rate > ρ) for thresholds in bit/s.
pub fn estimate_rate_coverage(results: &[TrialResult], thresholds_bps: &[f64]) -> Result<Vec<EstimateWithCI>, EstimateError> {
    if results.is_empty() {
        return Err(EstimateError::Empty);
    }
    Ok(thresholds_bps
        .iter()
        .map(|&r| EstimateWithCI::fraction(results.iter().filter(|t| t.rate > r).count(), results.len()))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TierShares {
    pub sub6: EstimateWithCI,
    pub mmwave: EstimateWithCI,
    pub outage: EstimateWithCI,
}

/// Shares of Sub-6GHz-served, mmWave-served and unserved trials; the three
/// values sum to 1 exactly.
pub fn tier_shares(results: &[TrialResult]) -> Result<TierShares, EstimateError> {
    if results.is_empty() {
        return Err(EstimateError::Empty);
    }
    let n = results.len();
    let s = results.iter().filter(|t| t.tier() == Some(Tier::Sub6)).count();
    let m = results.iter().filter(|t| t.tier() == Some(Tier::MmWave)).count();
    Ok(TierShares {
        sub6: EstimateWithCI::fraction(s, n),
        mmwave: EstimateWithCI::fraction(m, n),
        outage: EstimateWithCI::fraction(n - s - m, n),
    })
}

pub fn mean_rate(results: &[TrialResult]) -> Result<EstimateWithCI, EstimateError> {
    if results.is_empty() {
        return Err(EstimateError::Empty);
    }
    Ok(EstimateWithCI::mean(&results.iter().map(|t| t.rate).collect::<Vec<_>>()))
}

/// Threshold (dB) where the curve crosses 1 − percentile/100, linearly
/// interpolated between the first bracketing pair of grid points.
pub fn percentile_metric(curve: &CoverageCurve, percentile: f64) -> Result<f64, EstimateError> {
    if !(percentile > 0.0 && percentile < 100.0) {
        return Err(EstimateError::BadPercentile(percentile));
    }
    let target = 1.0 - percentile / 100.0;
    let (t, p) = (&curve.thresholds_db, &curve.probabilities);
    for i in 0..t.len() {
        if p[i] == target {
            return Ok(t[i]);
        }
        if i + 1 < t.len() && p[i] > target && p[i + 1] < target {
            let w = (p[i] - target) / (p[i] - p[i + 1]);
            return Ok(t[i] + w * (t[i + 1] - t[i]));
        }
    }
    Err(EstimateError::OutOfRange { target })
}

/// Sample quantile (linear interpolation between order statistics) with a
/// standard error from the binomial spread of the order-statistic rank.
pub fn sample_quantile(values: &[f64], q: f64) -> Result<EstimateWithCI, EstimateError> {
    if values.is_empty() {
        return Err(EstimateError::Empty);
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(EstimateError::BadPercentile(100.0 * q));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    let at = |h: f64| {
        let h = h.clamp(0.0, (n - 1) as f64);
        let lo = h.floor() as usize;
        let hi = (lo + 1).min(n - 1);
        let w = h - lo as f64;
        if w == 0.0 {
            v[lo]
        } else {
            v[lo] + w * (v[hi] - v[lo])
        }
    };
    let h = q * (n - 1) as f64;
    let spread = (n as f64 * q * (1.0 - q)).sqrt();
    let stderr = 0.5 * (at(h + spread) - at(h - spread));
    Ok(EstimateWithCI {
        value: at(h),
        stderr: if stderr.is_finite() { stderr.abs() } else { f64::INFINITY },
        n_trials: n,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinSummary {
    pub v0_lo: f64,
    pub v0_hi: f64,
    pub n_trials: usize,
    pub sub6_share: f64,
    pub mmwave_share: f64,
    pub outage_share: f64,
    /// Over served trials only.
    pub mean_serving_distance: Option<f64>,
    pub edge_sinr_db: Option<f64>,
    pub median_sinr_db: Option<f64>,
    pub edge_rate: Option<f64>,
    pub median_rate: Option<f64>,
}

/// Summaries of the trials whose v0 falls in each half-open bin [lo, hi).
pub fn conditional_metrics(results: &[TrialResult], v0_bins: &[(f64, f64)]) -> Result<Vec<BinSummary>, EstimateError> {
    for (i, &(lo, hi)) in v0_bins.iter().enumerate() {
        let prev_hi = if i == 0 { f64::NEG_INFINITY } else { v0_bins[i - 1].1 };
        if !(lo < hi) || lo < prev_hi {
            return Err(EstimateError::BadBins);
        }
    }
    Ok(v0_bins
        .iter()
        .map(|&(lo, hi)| {
            let sub: Vec<&TrialResult> = results.iter().filter(|t| t.v0 >= lo && t.v0 < hi).collect();
            let n = sub.len();
            let share = |tier: Option<Tier>| {
                if n == 0 {
                    0.0
                } else {
                    sub.iter().filter(|t| t.tier() == tier).count() as f64 / n as f64
                }
            };
            let served: Vec<f64> = sub.iter().filter_map(|t| t.outcome.map(|o| o.serving_distance)).collect();
            let sinr_db: Vec<f64> = sub.iter().map(|t| linear_to_db(t.sinr)).collect();
            let rate: Vec<f64> = sub.iter().map(|t| t.rate).collect();
            let q = |v: &[f64], p: f64| sample_quantile(v, p).ok().map(|e| e.value);
            BinSummary {
                v0_lo: lo,
                v0_hi: hi,
                n_trials: n,
                sub6_share: share(Some(Tier::Sub6)),
                mmwave_share: share(Some(Tier::MmWave)),
                outage_share: share(None),
                mean_serving_distance: (!served.is_empty()).then(|| served.iter().sum::<f64>() / served.len() as f64),
                edge_sinr_db: q(&sinr_db, 0.05),
                median_sinr_db: q(&sinr_db, 0.5),
                edge_rate: q(&rate, 0.05),
                median_rate: q(&rate, 0.5),
            }
        })
        .collect())
}
