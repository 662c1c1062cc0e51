//! Seeded synthetic possibilistic reforecast.
//!
//! Each record draws an observed category from climatology, picks a forecast
//! peak (the observation with probability `p_correct`, otherwise a near miss
//! one or two categories away), builds an exponential-decay shape around the
//! peak with a little uniform noise, and rescales it so the peak equals
//! `1 - h` for a drawn ignorance level `h`.
//!
//! Category-dependent parameters interpolate between a NONE-end and a
//! HIGH-end value over the category index. Every record owns a ChaCha stream
//! keyed by `(seed, index)`, so sequential and parallel generation produce
//! the same sample.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;
use serde::Serialize;

use crate::categorical::{confusion_from_outcomes, hss_multicategory, peak_category};
use crate::error::{Error, Result};
use crate::exec::{map_range, Execution};
use crate::possibility::PossibilityForecast;
use crate::scorecard::VerificationPair;
use crate::universe::{Universe, SPC_CLIMATOLOGY};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthConfig {
    pub n: usize,
    pub climatology: Vec<f64>,
    /// `p_correct` at the first and last category.
    pub p_correct: (f64, f64),
    /// Shape of the `p_correct` profile: `p(x) = first - (first - last) * x^e`
    /// for `x = c / (K - 1)`. `1.0` is linear.
    pub p_correct_exponent: f64,
    /// Probabilities of shifting the peak by one and by two categories, per
    /// direction.
    pub shift_one: f64,
    pub shift_two: f64,
    /// Mean decay rate at the first and last category.
    pub sigma_mean: (f64, f64),
    pub sigma_spread: f64,
    pub sigma_min: f64,
    /// Mean ignorance at the first and last category.
    pub ignorance_mean: (f64, f64),
    pub ignorance_spread: f64,
    pub ignorance_max: f64,
    pub noise: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n: 800,
            climatology: SPC_CLIMATOLOGY.to_vec(),
            p_correct: (0.82, 0.18),
            p_correct_exponent: 3.0,
            shift_one: 0.4,
            shift_two: 0.1,
            sigma_mean: (2.6, 0.7),
            sigma_spread: 0.3,
            sigma_min: 0.1,
            ignorance_mean: (0.06, 0.52),
            ignorance_spread: 0.10,
            ignorance_max: 0.95,
            noise: 0.03,
            seed: 0,
        }
    }
}

fn lerp(ends: (f64, f64), x: f64) -> f64 {
    ends.0 + (ends.1 - ends.0) * x
}

impl SynthConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn k(&self) -> usize {
        self.climatology.len()
    }

    fn position(&self, category: usize) -> f64 {
        category as f64 / (self.k() - 1) as f64
    }

    pub fn p_correct_at(&self, category: usize) -> f64 {
        let (first, last) = self.p_correct;
        first - (first - last) * self.position(category).powf(self.p_correct_exponent)
    }

    pub fn sigma_mean_at(&self, category: usize) -> f64 {
        lerp(self.sigma_mean, self.position(category))
    }

    pub fn ignorance_mean_at(&self, category: usize) -> f64 {
        lerp(self.ignorance_mean, self.position(category))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n == 0 {
            return bad("n must be positive".into());
        }
        if self.k() < 2 {
            return bad("climatology needs at least two categories".into());
        }
        if self.climatology.iter().any(|p| !(0.0..=1.0).contains(p))
            || (self.climatology.iter().sum::<f64>() - 1.0).abs() > 1e-9
        {
            return bad("climatology must be a probability vector".into());
        }
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        if !unit(self.p_correct.0) || !unit(self.p_correct.1) {
            return bad("p_correct endpoints must lie in [0, 1]".into());
        }
        if !(self.p_correct_exponent > 0.0 && self.p_correct_exponent.is_finite()) {
            return bad("p_correct_exponent must be positive".into());
        }
        if !unit(self.shift_one)
            || !unit(self.shift_two)
            || 2.0 * (self.shift_one + self.shift_two) > 1.0 + 1e-12
        {
            return bad("shift probabilities must sum to at most 1".into());
        }
        if self.shift_one + self.shift_two <= 0.0 {
            return bad("at least one shift probability must be positive".into());
        }
        if self.sigma_min.is_nan()
            || self.sigma_min <= 0.0
            || self.sigma_mean.0 <= 0.0
            || self.sigma_mean.1 <= 0.0
        {
            return bad("decay rates must be positive".into());
        }
        if !(self.sigma_spread >= 0.0 && self.ignorance_spread >= 0.0) {
            return bad("spreads must be nonnegative".into());
        }
        if !(0.0..1.0).contains(&self.ignorance_max)
            || !unit(self.ignorance_mean.0)
            || !unit(self.ignorance_mean.1)
        {
            return bad("ignorance parameters must lie in [0, 1) ".into());
        }
        if !(0.0..=1.0).contains(&self.noise) {
            return bad("noise must lie in [0, 1]".into());
        }
        Ok(())
    }
}

/// A generated pair with the latent draws that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthRecord {
    pub pair: VerificationPair,
    pub sigma: f64,
    pub ignorance: f64,
    pub peak: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSample {
    pub universe: Universe,
    pub records: Vec<SynthRecord>,
}

impl SynthSample {
    pub fn pairs(&self) -> Vec<VerificationPair> {
        self.records.iter().map(|r| r.pair.clone()).collect()
    }
}

pub fn generate(config: &SynthConfig) -> Result<SynthSample> {
    generate_with(config, Execution::default())
}

pub fn generate_with(config: &SynthConfig, exec: Execution) -> Result<SynthSample> {
    config.validate()?;
    let universe = if config.climatology == SPC_CLIMATOLOGY {
        Universe::spc()
    } else {
        let labels = (0..config.k()).map(|i| format!("C{i}")).collect();
        Universe::new(labels, Some(config.climatology.clone()))?
    };
    let climatology =
        WeightedIndex::new(&config.climatology).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let records = map_range(config.n, exec, |i| generate_record(config, &climatology, i))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(SynthSample { universe, records })
}

/// RNG for record `index`.
fn record_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn draw_peak(config: &SynthConfig, observed: usize, rng: &mut ChaCha8Rng) -> usize {
    if rng.random::<f64>() < config.p_correct_at(observed) {
        return observed;
    }
    let k = config.k() as i64;
    let obs = observed as i64;
    let options: Vec<(i64, f64)> = [
        (-2, config.shift_two),
        (-1, config.shift_one),
        (1, config.shift_one),
        (2, config.shift_two),
    ]
    .into_iter()
    .filter(|(d, w)| *w > 0.0 && (0..k).contains(&(obs + d)))
    .collect();
    let total: f64 = options.iter().map(|(_, w)| w).sum();
    let mut u = rng.random::<f64>() * total;
    for &(d, w) in &options {
        if u < w {
            return (obs + d) as usize;
        }
        u -= w;
    }
    // Rounding can leave u just above the last weight.
    (obs + options.last().map_or(0, |(d, _)| *d)) as usize
}

fn generate_record(
    config: &SynthConfig,
    climatology: &WeightedIndex<f64>,
    index: usize,
) -> Result<SynthRecord> {
    let mut rng = record_rng(config.seed, index);
    let observed = climatology.sample(&mut rng);
    let peak = draw_peak(config, observed, &mut rng);

    let sigma_dist = Normal::new(config.sigma_mean_at(observed), config.sigma_spread)
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let sigma = sigma_dist.sample(&mut rng).max(config.sigma_min);

    let mut pi: Vec<f64> = (0..config.k())
        .map(|c| {
            let distance = (c as f64 - peak as f64).abs();
            (-sigma * distance).exp() + rng.random::<f64>() * config.noise
        })
        .collect();

    let h_dist = Normal::new(config.ignorance_mean_at(observed), config.ignorance_spread)
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let h = h_dist.sample(&mut rng).clamp(0.0, config.ignorance_max);

    let max = pi.iter().copied().fold(0.0, f64::max);
    let target = 1.0 - h;
    for v in &mut pi {
        *v = (*v * target / max).clamp(0.0, 1.0);
    }

    let forecast = PossibilityForecast::from_values(pi)?;
    let pair = VerificationPair::new(forecast, observed)?.with_id(format!("synth-{index:05}"));
    Ok(SynthRecord {
        pair,
        sigma,
        ignorance: h,
        peak,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthStats {
    pub count: usize,
    pub category_counts: Vec<usize>,
    /// Fraction of records whose peak category equals the observation.
    pub peak_accuracy: f64,
    /// Mean forecast ignorance per observed category.
    pub mean_ignorance: Vec<Option<f64>>,
    pub hss: Option<f64>,
}

pub fn sample_stats(sample: &SynthSample) -> Result<SynthStats> {
    pair_stats(&sample.pairs(), sample.universe.k())
}

/// Summary statistics for any verification sample.
pub fn pair_stats(pairs: &[VerificationPair], k: usize) -> Result<SynthStats> {
    if pairs.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut counts = vec![0usize; k];
    let mut ignorance = vec![0.0f64; k];
    let mut outcomes = Vec::with_capacity(pairs.len());
    for p in pairs {
        counts[p.observed] += 1;
        ignorance[p.observed] += p.forecast.ignorance();
        outcomes.push((peak_category(&p.forecast), p.observed));
    }
    let hits = outcomes.iter().filter(|(f, o)| f == o).count();
    let cm = confusion_from_outcomes(&outcomes, k)?;
    Ok(SynthStats {
        count: pairs.len(),
        mean_ignorance: counts
            .iter()
            .zip(&ignorance)
            .map(|(&n, &s)| (n > 0).then(|| s / n as f64))
            .collect(),
        category_counts: counts,
        peak_accuracy: hits as f64 / pairs.len() as f64,
        hss: hss_multicategory(&cm),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_for_a_seed() {
        let cfg = SynthConfig::default().with_seed(7).with_n(50);
        assert_eq!(generate(&cfg).unwrap(), generate(&cfg).unwrap());
        let other = SynthConfig::default().with_seed(8).with_n(50);
        assert_ne!(generate(&cfg).unwrap(), generate(&other).unwrap());
    }

    #[test]
    fn parallel_matches_sequential() {
        let cfg = SynthConfig::default().with_seed(3).with_n(300);
        assert_eq!(
            generate_with(&cfg, Execution::Sequential).unwrap(),
            generate_with(&cfg, Execution::Parallel).unwrap()
        );
    }

    #[test]
    fn peak_equals_one_minus_ignorance() {
        let s = generate(&SynthConfig::default().with_seed(11)).unwrap();
        for r in &s.records {
            let m = r.pair.forecast.commitment();
            assert!((m - (1.0 - r.ignorance)).abs() < 1e-12);
            assert_eq!(peak_category(&r.pair.forecast), r.peak);
            assert!(r.sigma >= 0.1);
            assert!((0.0..=0.95).contains(&r.ignorance));
        }
    }

    #[test]
    fn profile_endpoints() {
        let cfg = SynthConfig::default();
        assert!((cfg.p_correct_at(0) - 0.82).abs() < 1e-12);
        assert!((cfg.p_correct_at(5) - 0.18).abs() < 1e-12);
        assert!((cfg.sigma_mean_at(0) - 2.6).abs() < 1e-12);
        assert!((cfg.sigma_mean_at(5) - 0.7).abs() < 1e-12);
        assert!((cfg.ignorance_mean_at(0) - 0.06).abs() < 1e-12);
        assert!((cfg.ignorance_mean_at(5) - 0.52).abs() < 1e-12);
        for c in 1..6 {
            assert!(cfg.p_correct_at(c) < cfg.p_correct_at(c - 1));
        }
    }

    #[test]
    fn boundary_shifts_stay_in_range() {
        let cfg = SynthConfig {
            p_correct: (0.0, 0.0),
            ..SynthConfig::default()
        };
        let mut rng = record_rng(1, 0);
        for obs in 0..6 {
            for _ in 0..200 {
                let peak = draw_peak(&cfg, obs, &mut rng);
                assert!(peak < 6);
                assert_ne!(peak, obs);
                assert!((peak as i64 - obs as i64).abs() <= 2);
            }
        }
    }

    #[test]
    fn stats_conserve_counts() {
        let s = generate(&SynthConfig::default().with_seed(5)).unwrap();
        let stats = sample_stats(&s).unwrap();
        assert_eq!(stats.category_counts.iter().sum::<usize>(), 800);
        let none = stats.mean_ignorance[0].unwrap();
        assert!((none - 0.06).abs() <= 0.03, "{none}");
        let empty = SynthSample {
            universe: Universe::spc(),
            records: vec![],
        };
        assert_eq!(sample_stats(&empty), Err(Error::EmptySample));
    }

    #[test]
    fn rejects_bad_configs() {
        let base = SynthConfig::default();
        for cfg in [
            SynthConfig {
                n: 0,
                ..base.clone()
            },
            SynthConfig {
                climatology: vec![0.5, 0.6],
                ..base.clone()
            },
            SynthConfig {
                shift_one: 0.5,
                shift_two: 0.2,
                ..base.clone()
            },
            SynthConfig {
                ignorance_max: 1.0,
                ..base.clone()
            },
            SynthConfig {
                sigma_min: 0.0,
                ..base.clone()
            },
            SynthConfig {
                p_correct_exponent: 0.0,
                ..base.clone()
            },
        ] {
            assert!(
                matches!(generate(&cfg), Err(Error::InvalidConfig(_))),
                "{cfg:?}"
            );
        }
    }
}
