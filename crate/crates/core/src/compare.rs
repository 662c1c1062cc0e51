//! Two-version comparison scorecard with bootstrap significance flags.
//!
//! Every registered metric is computed on a baseline and a candidate sample.
//! Significance comes from a percentile bootstrap on the metric difference:
//! in paired mode both samples are resampled with the same indices, so the
//! two archives must verify against the same observations in the same order.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bridge::{
    check_epsilon, climatology_vector, convert, decompose_grouped, group_ids, surprise_unchecked,
    ProbabilityVector, DEFAULT_EPSILON,
};
use crate::categorical::{
    binary_scores, confusion_from_outcomes, contingency_from_outcomes, hss_multicategory,
    peak_category,
};
use crate::error::{Error, Result};
use crate::exec::{map_range, Execution};
use crate::scorecard::{score_pair, VerificationPair};
use crate::universe::Universe;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Facet {
    Possibilistic,
    Probabilistic,
    Categorical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    HigherBetter,
    LowerBetter,
    ContextDependent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    AlphaStar,
    Eta,
    Delta,
    Ignorance,
    NcStar,
    MeanSurprise,
    InformationGain,
    Discrimination,
    Reliability,
    Pod,
    Far,
    Csi,
    Pss,
    Hss,
}

impl Metric {
    pub const ALL: [Metric; 14] = [
        Metric::AlphaStar,
        Metric::Eta,
        Metric::Delta,
        Metric::Ignorance,
        Metric::NcStar,
        Metric::MeanSurprise,
        Metric::InformationGain,
        Metric::Discrimination,
        Metric::Reliability,
        Metric::Pod,
        Metric::Far,
        Metric::Csi,
        Metric::Pss,
        Metric::Hss,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::AlphaStar => "alpha_star",
            Metric::Eta => "eta",
            Metric::Delta => "delta",
            Metric::Ignorance => "ignorance",
            Metric::NcStar => "nc_star",
            Metric::MeanSurprise => "mean_surprise",
            Metric::InformationGain => "ig",
            Metric::Discrimination => "dsc",
            Metric::Reliability => "rel",
            Metric::Pod => "pod",
            Metric::Far => "far",
            Metric::Csi => "csi",
            Metric::Pss => "pss",
            Metric::Hss => "hss",
        }
    }

    pub fn from_name(name: &str) -> Result<Metric> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::UnknownMetric(name.to_string()))
    }

    pub fn facet(self) -> Facet {
        use Metric::*;
        match self {
            AlphaStar | Eta | Delta | Ignorance | NcStar => Facet::Possibilistic,
            MeanSurprise | InformationGain | Discrimination | Reliability => Facet::Probabilistic,
            Pod | Far | Csi | Pss | Hss => Facet::Categorical,
        }
    }

    pub fn orientation(self) -> Orientation {
        use Metric::*;
        match self {
            AlphaStar | Delta | NcStar | InformationGain | Discrimination | Pod | Csi | Pss
            | Hss => Orientation::HigherBetter,
            Eta | Reliability | Far | MeanSurprise => Orientation::LowerBetter,
            Ignorance => Orientation::ContextDependent,
        }
    }

    /// Width of the metric's natural range, used to bucket change magnitude.
    /// Log-score metrics are unbounded and use `log2(K)` bits.
    pub fn range(self, k: usize) -> f64 {
        use Metric::*;
        let k = k as f64;
        match self {
            AlphaStar | Ignorance | NcStar | Pod | Far | Csi => 1.0,
            Eta => 1.0 - 1.0 / k,
            Delta => 2.0 * (1.0 - 1.0 / k),
            Pss | Hss => 2.0,
            MeanSurprise | InformationGain | Discrimination | Reliability => k.log2(),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Fixed metric-to-orientation mapping, in report order.
pub fn orientation_registry() -> Vec<(Metric, Orientation)> {
    Metric::ALL.iter().map(|m| (*m, m.orientation())).collect()
}

pub fn lookup_orientation(name: &str) -> Result<Orientation> {
    Metric::from_name(name).map(Metric::orientation)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Magnitude {
    Small,
    Medium,
    Large,
}

impl Magnitude {
    pub fn bucket(delta: f64, range: f64) -> Magnitude {
        let relative = delta.abs() / range;
        if relative < 0.02 {
            Magnitude::Small
        } else if relative < 0.05 {
            Magnitude::Medium
        } else {
            Magnitude::Large
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Improved,
    Degraded,
    Unchanged,
    /// A change in a metric whose desirable direction depends on context.
    Changed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricDelta {
    pub metric: Metric,
    pub facet: Facet,
    pub orientation: Orientation,
    pub baseline: Option<f64>,
    pub candidate: Option<f64>,
    pub delta: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub significant: bool,
    pub verdict: Option<Verdict>,
    pub magnitude: Option<Magnitude>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub rows: Vec<MetricDelta>,
    pub baseline_size: usize,
    pub candidate_size: usize,
    pub resamples: usize,
    pub confidence: f64,
    pub seed: u64,
    pub paired: bool,
    pub threshold: usize,
    pub epsilon: f64,
}

impl ComparisonReport {
    pub fn get(&self, metric: Metric) -> Option<&MetricDelta> {
        self.rows.iter().find(|r| r.metric == metric)
    }

    pub fn facet(&self, facet: Facet) -> impl Iterator<Item = &MetricDelta> {
        self.rows.iter().filter(move |r| r.facet == facet)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareSettings {
    pub resamples: usize,
    pub confidence: f64,
    pub seed: u64,
    pub paired: bool,
    /// Severity threshold for POD/FAR/CSI/PSS.
    pub threshold: usize,
    pub epsilon: f64,
    pub execution: Execution,
}

impl Default for CompareSettings {
    fn default() -> Self {
        CompareSettings {
            resamples: 1000,
            confidence: 0.95,
            seed: 0,
            paired: true,
            threshold: 1,
            epsilon: DEFAULT_EPSILON,
            execution: Execution::default(),
        }
    }
}

/// Per-pair quantities that every resample reuses.
struct Prepared {
    k: usize,
    threshold: usize,
    rows: Vec<[f64; 5]>,
    surprise: Vec<f64>,
    clim_surprise: Vec<f64>,
    group: Vec<usize>,
    outcome: Vec<(usize, usize)>,
}

type MetricValues = [Option<f64>; 14];

impl Prepared {
    fn new(
        pairs: &[VerificationPair],
        climatology: &ProbabilityVector,
        settings: &CompareSettings,
    ) -> Prepared {
        let converted: Vec<ProbabilityVector> =
            pairs.iter().map(|p| convert(&p.forecast)).collect();
        let eps = settings.epsilon;
        Prepared {
            k: climatology.k(),
            threshold: settings.threshold,
            rows: pairs
                .iter()
                .map(|p| {
                    let r = score_pair(p);
                    [r.alpha_star, r.eta, r.delta, r.ignorance, r.nc_star]
                })
                .collect(),
            surprise: pairs
                .iter()
                .zip(&converted)
                .map(|(p, v)| surprise_unchecked(v.as_slice()[p.observed], eps).bits)
                .collect(),
            clim_surprise: pairs
                .iter()
                .map(|p| surprise_unchecked(climatology.as_slice()[p.observed], eps).bits)
                .collect(),
            group: group_ids(converted.iter()),
            outcome: pairs
                .iter()
                .map(|p| (peak_category(&p.forecast), p.observed))
                .collect(),
        }
    }

    fn len(&self) -> usize {
        self.rows.len()
    }

    /// All metrics on the sample selected by `idx` (with repetition).
    fn metrics(&self, idx: &[usize]) -> MetricValues {
        let n = idx.len() as f64;
        let mut means = [0.0f64; 5];
        let mut ig = 0.0;
        for &i in idx {
            for (m, v) in means.iter_mut().zip(self.rows[i]) {
                *m += v;
            }
            ig += self.clim_surprise[i] - self.surprise[i];
        }
        let decomposition = decompose_grouped(
            idx.iter()
                .map(|&i| (self.group[i], self.outcome[i].1, self.surprise[i])),
            self.k + 1,
        )
        .ok();
        let outcomes: Vec<(usize, usize)> = idx.iter().map(|&i| self.outcome[i]).collect();
        let scores = contingency_from_outcomes(&outcomes, self.threshold, self.k)
            .ok()
            .map(|t| binary_scores(&t));
        let hss = confusion_from_outcomes(&outcomes, self.k)
            .ok()
            .and_then(|cm| hss_multicategory(&cm));
        [
            Some(means[0] / n),
            Some(means[1] / n),
            Some(means[2] / n),
            Some(means[3] / n),
            Some(means[4] / n),
            decomposition.map(|d| d.mean_surprise),
            Some(ig / n),
            decomposition.map(|d| d.dsc),
            decomposition.map(|d| d.rel),
            scores.and_then(|s| s.pod),
            scores.and_then(|s| s.far),
            scores.and_then(|s| s.csi),
            scores.and_then(|s| s.pss),
            hss,
        ]
    }
}

/// Linear-interpolated sample quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

fn resample_indices(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(0..n)).collect()
}

fn check_sample(pairs: &[VerificationPair], k: usize) -> Result<()> {
    if pairs.is_empty() {
        return Err(Error::EmptySample);
    }
    if let Some(p) = pairs.iter().find(|p| p.forecast.k() != k) {
        return Err(Error::UniverseMismatch {
            expected: k,
            got: p.forecast.k(),
        });
    }
    Ok(())
}

pub fn compare(
    baseline: &[VerificationPair],
    candidate: &[VerificationPair],
    universe: &Universe,
    settings: &CompareSettings,
) -> Result<ComparisonReport> {
    let k = universe.k();
    check_sample(baseline, k)?;
    check_sample(candidate, k)?;
    check_epsilon(settings.epsilon)?;
    if settings.threshold == 0 || settings.threshold >= k {
        return Err(Error::BadThreshold {
            threshold: settings.threshold,
            max: k - 1,
        });
    }
    if !(settings.confidence > 0.0 && settings.confidence < 1.0) {
        return Err(Error::InvalidConfig("confidence must lie in (0, 1)".into()));
    }
    if settings.paired {
        if baseline.len() != candidate.len() {
            return Err(Error::UnpairedSamples(format!(
                "{} baseline pairs vs {} candidate pairs",
                baseline.len(),
                candidate.len()
            )));
        }
        if let Some(i) =
            (0..baseline.len()).find(|&i| baseline[i].observed != candidate[i].observed)
        {
            return Err(Error::UnpairedSamples(format!(
                "observations differ at record {i}"
            )));
        }
    }
    let climatology = climatology_vector(universe)?;

    let base = Prepared::new(baseline, &climatology, settings);
    let cand = Prepared::new(candidate, &climatology, settings);
    let full_base = base.metrics(&(0..base.len()).collect::<Vec<_>>());
    let full_cand = cand.metrics(&(0..cand.len()).collect::<Vec<_>>());

    let boot: Vec<[Option<f64>; 14]> = map_range(settings.resamples, settings.execution, |r| {
        let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
        rng.set_stream(r as u64);
        let bi = resample_indices(&mut rng, base.len());
        let ci = if settings.paired {
            bi.clone()
        } else {
            resample_indices(&mut rng, cand.len())
        };
        let mb = base.metrics(&bi);
        let mc = cand.metrics(&ci);
        std::array::from_fn(|m| mb[m].zip(mc[m]).map(|(b, c)| c - b))
    });

    let alpha = 1.0 - settings.confidence;
    let rows = Metric::ALL
        .iter()
        .enumerate()
        .map(|(m, &metric)| {
            let delta = full_base[m].zip(full_cand[m]).map(|(b, c)| c - b);
            let mut draws: Vec<f64> = boot.iter().filter_map(|d| d[m]).collect();
            draws.sort_by(f64::total_cmp);
            let (ci_low, ci_high) = if draws.is_empty() {
                (None, None)
            } else {
                (
                    Some(quantile(&draws, alpha / 2.0)),
                    Some(quantile(&draws, 1.0 - alpha / 2.0)),
                )
            };
            let significant = delta.is_some()
                && matches!((ci_low, ci_high), (Some(lo), Some(hi)) if lo > 0.0 || hi < 0.0);
            let verdict = delta.map(|d| match metric.orientation() {
                _ if d == 0.0 => Verdict::Unchanged,
                Orientation::ContextDependent => Verdict::Changed,
                Orientation::HigherBetter if d > 0.0 => Verdict::Improved,
                Orientation::LowerBetter if d < 0.0 => Verdict::Improved,
                _ => Verdict::Degraded,
            });
            MetricDelta {
                metric,
                facet: metric.facet(),
                orientation: metric.orientation(),
                baseline: full_base[m],
                candidate: full_cand[m],
                delta,
                ci_low,
                ci_high,
                significant,
                verdict,
                magnitude: delta.map(|d| Magnitude::bucket(d, metric.range(k))),
            }
        })
        .collect();

    Ok(ComparisonReport {
        rows,
        baseline_size: baseline.len(),
        candidate_size: candidate.len(),
        resamples: settings.resamples,
        confidence: settings.confidence,
        seed: settings.seed,
        paired: settings.paired,
        threshold: settings.threshold,
        epsilon: settings.epsilon,
    })
}
