//! Possibility-to-probability conversion and log-score verification.
//!
//! [`convert`] reserves the forecast's ignorance `1 - m` as an explicit
//! extra outcome and spreads the committed mass `m` over the K categories in
//! proportion to `pi`. The ignorance outcome is never observed, so mass left
//! there inflates the surprise of every observation.
//!
//! Surprise is `-log2(max(p(c), eps))` in bits. The floor applies only at
//! scoring time; converted vectors are never modified.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::possibility::PossibilityForecast;
use crate::universe::Universe;

pub const DEFAULT_EPSILON: f64 = 0.01;

/// Forecast vectors are quantised to this many decimals when grouping for
/// the decomposition.
pub const GROUPING_DECIMALS: i32 = 6;

/// Probabilities over K categories plus a trailing ignorance outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbabilityVector {
    p: Vec<f64>,
}

impl ProbabilityVector {
    /// Wraps `p` (K+1 entries, last is ignorance) after checking it is a
    /// probability vector.
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.len() < 3 {
            return Err(Error::InvalidConfig(format!(
                "probability vector needs K + 1 >= 3 entries, got {}",
                p.len()
            )));
        }
        if p.iter().any(|v| v.is_nan() || *v < 0.0) {
            return Err(Error::InvalidConfig("negative or NaN probability".into()));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(ProbabilityVector { p })
    }

    /// Number of real categories K (excluding the ignorance outcome).
    pub fn k(&self) -> usize {
        self.p.len() - 1
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }

    pub fn categories(&self) -> &[f64] {
        &self.p[..self.k()]
    }

    pub fn ignorance(&self) -> f64 {
        self.p[self.k()]
    }

    pub fn get(&self, index: usize) -> Option<f64> {
        self.p.get(index).copied()
    }
}

/// Reserve-and-distribute conversion.
pub fn convert(forecast: &PossibilityForecast) -> ProbabilityVector {
    let m = forecast.commitment();
    let total: f64 = forecast.values().iter().sum();
    let mut p: Vec<f64> = forecast.values().iter().map(|&v| v * m / total).collect();
    p.push(forecast.ignorance());
    ProbabilityVector { p }
}

/// Plain proportional normalisation, with no ignorance reserved.
pub fn naive_normalise(forecast: &PossibilityForecast) -> ProbabilityVector {
    let total: f64 = forecast.values().iter().sum();
    let mut p: Vec<f64> = forecast.values().iter().map(|&v| v / total).collect();
    p.push(0.0);
    ProbabilityVector { p }
}

pub fn climatology_vector(universe: &Universe) -> Result<ProbabilityVector> {
    let clim = universe.climatology().ok_or(Error::MissingClimatology)?;
    let mut p = clim.to_vec();
    p.push(0.0);
    Ok(ProbabilityVector { p })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurpriseReport {
    pub bits: f64,
    /// True when `p(c) < eps` and the floor was used.
    pub floored: bool,
    pub epsilon: f64,
}

pub fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < 0.5 {
        Ok(())
    } else {
        Err(Error::InvalidEpsilon(epsilon))
    }
}

/// Floored log score of the observed category, in bits.
pub fn surprise(p: &ProbabilityVector, observed: usize, epsilon: f64) -> Result<SurpriseReport> {
    check_epsilon(epsilon)?;
    if observed >= p.k() {
        return Err(Error::BadCategory {
            index: observed,
            k: p.k(),
        });
    }
    Ok(surprise_unchecked(p.p[observed], epsilon))
}

pub(crate) fn surprise_unchecked(prob: f64, epsilon: f64) -> SurpriseReport {
    let floored = prob < epsilon;
    SurpriseReport {
        bits: -prob.max(epsilon).log2(),
        floored,
        epsilon,
    }
}

/// `S(baseline) - S(forecast)`; positive when the forecast is less surprised.
pub fn information_gain(
    baseline: &ProbabilityVector,
    forecast: &ProbabilityVector,
    observed: usize,
    epsilon: f64,
) -> Result<f64> {
    if baseline.k() != forecast.k() {
        return Err(Error::UniverseMismatch {
            expected: baseline.k(),
            got: forecast.k(),
        });
    }
    let sb = surprise(baseline, observed, epsilon)?;
    let sf = surprise(forecast, observed, epsilon)?;
    Ok(sb.bits - sf.bits)
}

/// Mean surprise split into uncertainty, discrimination and reliability, all
/// in bits: `mean_surprise = unc - dsc + rel`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Decomposition {
    pub mean_surprise: f64,
    pub unc: f64,
    pub dsc: f64,
    pub rel: f64,
    pub groups: usize,
    pub count: usize,
}

impl Decomposition {
    /// Information gain over the sample base rate, `dsc - rel`.
    pub fn information_gain(&self) -> f64 {
        self.dsc - self.rel
    }
}

fn grouping_key(p: &ProbabilityVector) -> Vec<i64> {
    let scale = 10f64.powi(GROUPING_DECIMALS);
    p.p.iter().map(|v| (v * scale).round() as i64).collect()
}

/// Assigns each vector a group id (first-seen order).
pub(crate) fn group_ids<'a>(vectors: impl Iterator<Item = &'a ProbabilityVector>) -> Vec<usize> {
    let mut seen: HashMap<Vec<i64>, usize> = HashMap::new();
    vectors
        .map(|p| {
            let next = seen.len();
            *seen.entry(grouping_key(p)).or_insert(next)
        })
        .collect()
}

fn entropy_bits(freq: impl Iterator<Item = f64>) -> f64 {
    -freq.filter(|&f| f > 0.0).map(|f| f * f.log2()).sum::<f64>()
}

/// Surprise tally for one (group, outcome) cell.
#[derive(Clone, Copy, Default)]
struct Cell {
    n: u64,
    sum: f64,
    first: f64,
    uniform: bool,
}

impl Cell {
    fn add(&mut self, s: f64) {
        if self.n == 0 {
            self.first = s;
            self.uniform = true;
        } else if s != self.first {
            self.uniform = false;
        }
        self.n += 1;
        self.sum += s;
    }

    /// Surprise in excess of `-log2(freq)` summed over the cell. With equal
    /// members it is `n * (s + log2 freq)`, exactly zero when the forecast
    /// matches the observed frequency.
    fn excess(&self, freq: f64) -> f64 {
        let n = self.n as f64;
        if self.uniform {
            n * (self.first + freq.log2())
        } else {
            self.sum + n * freq.log2()
        }
    }
}

/// Decomposition from pre-grouped records.
///
/// `records` yields `(group, observed, surprise_bits)`; `outcomes` is K+1.
/// Reliability for group `k` is its summed surprise minus `n_k * H(o_k)`,
/// which equals `n_k * KL(o_k || f_k)` when the members share one vector.
pub(crate) fn decompose_grouped(
    records: impl Iterator<Item = (usize, usize, f64)>,
    outcomes: usize,
) -> Result<Decomposition> {
    let mut cells: Vec<Vec<Cell>> = Vec::new();
    let mut base = vec![0u64; outcomes];
    let mut total_surprise = 0.0;
    let mut n = 0usize;
    for (g, obs, s) in records {
        if g >= cells.len() {
            cells.resize(g + 1, vec![Cell::default(); outcomes]);
        }
        cells[g][obs].add(s);
        base[obs] += 1;
        total_surprise += s;
        n += 1;
    }
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let nf = n as f64;
    let base_rate: Vec<f64> = base.iter().map(|&c| c as f64 / nf).collect();
    let unc = entropy_bits(base_rate.iter().copied());

    let mut dsc = 0.0;
    let mut rel = 0.0;
    let mut groups = 0;
    for group in &cells {
        let nk: u64 = group.iter().map(|c| c.n).sum();
        if nk == 0 {
            continue;
        }
        groups += 1;
        let nkf = nk as f64;
        for (cell, b) in group.iter().zip(&base_rate) {
            if cell.n == 0 {
                continue;
            }
            let freq = cell.n as f64 / nkf;
            dsc += cell.n as f64 * (freq / b).log2();
            rel += cell.excess(freq);
        }
    }
    Ok(Decomposition {
        mean_surprise: total_surprise / nf,
        unc,
        dsc: dsc / nf,
        rel: rel / nf,
        groups,
        count: n,
    })
}

/// Decomposes the mean floored surprise of a verification sample.
///
/// Forecast vectors are grouped after rounding to [`GROUPING_DECIMALS`]
/// places; the base rate is the sample's own observed frequency over the
/// K + 1 outcomes (the ignorance outcome always has frequency zero).
pub fn decompose(sample: &[(ProbabilityVector, usize)], epsilon: f64) -> Result<Decomposition> {
    check_epsilon(epsilon)?;
    let first = sample.first().ok_or(Error::EmptySample)?;
    let k = first.0.k();
    for (p, obs) in sample {
        if p.k() != k {
            return Err(Error::UniverseMismatch {
                expected: k,
                got: p.k(),
            });
        }
        if *obs >= k {
            return Err(Error::BadCategory { index: *obs, k });
        }
    }
    let ids = group_ids(sample.iter().map(|(p, _)| p));
    decompose_grouped(
        sample
            .iter()
            .zip(ids)
            .map(|((p, obs), g)| (g, *obs, surprise_unchecked(p.p[*obs], epsilon).bits)),
        k + 1,
    )
}
