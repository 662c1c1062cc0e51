//! Five-number possibilistic scorecard.
//!
//! For a forecast `pi` with commitment `m`, normalised shape `pi' = pi / m`
//! and observed category `c`:
//!
//! | metric      | definition                          |
//! |-------------|-------------------------------------|
//! | `alpha_star`| `pi'(c)`, support for the truth     |
//! | `eta`       | mean of `pi'` over all K categories |
//! | `delta`     | `alpha_star - eta`                  |
//! | `ignorance` | `1 - m`, the only raw-scale metric  |
//! | `nc_star`   | `1 - max_{w != c} pi'(w)`           |
//!
//! `nc_star` is zero unless the observed category is the unique peak.

use serde::Serialize;

use crate::categorical::peak_category;
use crate::error::{Error, Result};
use crate::exec::{map_slice, Execution};
use crate::possibility::PossibilityForecast;

/// A forecast with its verifying observation.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationPair {
    pub id: Option<String>,
    pub forecast: PossibilityForecast,
    /// Index of the observed category.
    pub observed: usize,
    pub model: Option<String>,
}

impl VerificationPair {
    pub fn new(forecast: PossibilityForecast, observed: usize) -> Result<Self> {
        if observed >= forecast.k() {
            return Err(Error::BadCategory {
                index: observed,
                k: forecast.k(),
            });
        }
        Ok(VerificationPair {
            id: None,
            forecast,
            observed,
            model: None,
        })
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = Some(id.into());
        self
    }

    pub fn with_model(mut self, model: impl Into<String>) -> Self {
        self.model = Some(model.into());
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScorecardRow {
    pub alpha_star: f64,
    pub eta: f64,
    pub delta: f64,
    pub ignorance: f64,
    pub nc_star: f64,
    pub commitment: f64,
    pub peak: usize,
    pub observed: usize,
    pub joint_skill: f64,
}

impl ScorecardRow {
    /// `alpha_star * (1 - eta)`.
    pub fn joint_skill(&self) -> f64 {
        joint_skill(self.alpha_star, self.eta)
    }

    pub fn specificity(&self) -> f64 {
        1.0 - self.eta
    }
}

pub fn joint_skill(alpha_star: f64, eta: f64) -> f64 {
    alpha_star * (1.0 - eta)
}

/// Scores a forecast against an observed category index.
pub fn score_forecast(forecast: &PossibilityForecast, observed: usize) -> Result<ScorecardRow> {
    let k = forecast.k();
    if observed >= k {
        return Err(Error::BadCategory { index: observed, k });
    }
    let shape = forecast.normalise();
    let shape = shape.values();
    let alpha_star = shape[observed];
    let eta = shape.iter().sum::<f64>() / k as f64;
    let runner_up = shape
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != observed)
        .map(|(_, &v)| v)
        .fold(0.0, f64::max);
    let delta = alpha_star - eta;
    Ok(ScorecardRow {
        alpha_star,
        eta,
        delta,
        ignorance: forecast.ignorance(),
        nc_star: (1.0 - runner_up).clamp(0.0, 1.0),
        commitment: forecast.commitment(),
        peak: peak_category(forecast),
        observed,
        joint_skill: joint_skill(alpha_star, eta),
    })
}

pub fn score_pair(pair: &VerificationPair) -> ScorecardRow {
    // VerificationPair::new already checked the observation.
    score_forecast(&pair.forecast, pair.observed).expect("validated pair")
}

pub fn score_all(pairs: &[VerificationPair]) -> Vec<ScorecardRow> {
    score_all_with(pairs, Execution::default())
}

pub fn score_all_with(pairs: &[VerificationPair], exec: Execution) -> Vec<ScorecardRow> {
    map_slice(pairs, exec, score_pair)
}

/// Means of the five scorecard metrics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricMeans {
    pub alpha_star: f64,
    pub eta: f64,
    pub delta: f64,
    pub ignorance: f64,
    pub nc_star: f64,
    pub joint_skill: f64,
}

impl MetricMeans {
    fn of<'a>(rows: impl Iterator<Item = &'a ScorecardRow>) -> Option<(usize, MetricMeans)> {
        let mut n = 0usize;
        let mut sums = [0.0f64; 6];
        for r in rows {
            n += 1;
            for (s, v) in sums.iter_mut().zip([
                r.alpha_star,
                r.eta,
                r.delta,
                r.ignorance,
                r.nc_star,
                r.joint_skill,
            ]) {
                *s += v;
            }
        }
        if n == 0 {
            return None;
        }
        let d = n as f64;
        Some((
            n,
            MetricMeans {
                alpha_star: sums[0] / d,
                eta: sums[1] / d,
                delta: sums[2] / d,
                ignorance: sums[3] / d,
                nc_star: sums[4] / d,
                joint_skill: sums[5] / d,
            },
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategoryMeans {
    pub category: usize,
    pub count: usize,
    /// `None` when the category was never observed.
    pub means: Option<MetricMeans>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScorecardAggregate {
    pub count: usize,
    pub means: MetricMeans,
    pub by_category: Vec<CategoryMeans>,
}

/// Unweighted means overall and stratified by observed category.
pub fn aggregate(rows: &[ScorecardRow], k: usize) -> Result<ScorecardAggregate> {
    let (count, means) = MetricMeans::of(rows.iter()).ok_or(Error::EmptySample)?;
    if let Some(r) = rows.iter().find(|r| r.observed >= k) {
        return Err(Error::BadCategory {
            index: r.observed,
            k,
        });
    }
    let by_category = (0..k)
        .map(|c| {
            let stratum = MetricMeans::of(rows.iter().filter(|r| r.observed == c));
            CategoryMeans {
                category: c,
                count: stratum.map_or(0, |(n, _)| n),
                means: stratum.map(|(_, m)| m),
            }
        })
        .collect();
    Ok(ScorecardAggregate {
        count,
        means,
        by_category,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::universe::Universe;
    use proptest::prelude::*;

    const A: [f64; 6] = [0.0, 0.0, 0.05, 0.15, 0.90, 0.10];
    const B: [f64; 6] = [0.10, 0.10, 0.40, 0.55, 0.30, 0.0];
    const C: [f64; 6] = [0.85, 0.10, 0.05, 0.0, 0.0, 0.0];

    fn row(pi: &[f64], obs: usize) -> ScorecardRow {
        let f = PossibilityForecast::validate(pi, &Universe::spc()).unwrap();
        score_pair(&VerificationPair::new(f, obs).unwrap())
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn scenario_rows() {
        let expect = [
            (row(&A, 4), [1.00, 0.222, 0.778, 0.10, 0.833]),
            (row(&B, 3), [1.00, 0.439, 0.561, 0.45, 0.273]),
            (row(&C, 4), [0.00, 0.196, -0.196, 0.15, 0.00]),
        ];
        for (r, e) in expect {
            let got = [r.alpha_star, r.eta, r.delta, r.ignorance, r.nc_star];
            for (g, e) in got.iter().zip(e) {
                assert!(close(*g, e, 1e-3), "{got:?} vs {e:?}");
            }
            assert_eq!(r.delta, r.alpha_star - r.eta);
        }
    }

    #[test]
    fn joint_skill_examples() {
        let a = row(&A, 4);
        assert!(close(a.joint_skill(), 0.778, 1e-3));
        assert_eq!(joint_skill(0.7, 1.0), 0.0);
        assert_eq!(joint_skill(0.0, 0.3), 0.0);
        assert_eq!(row(&C, 4).joint_skill, 0.0);
    }

    #[test]
    fn aggregate_examples() {
        let a = row(&A, 4);
        let single = aggregate(&[a], 6).unwrap();
        assert_eq!(single.count, 1);
        assert_eq!(single.means.delta, a.delta);
        assert_eq!(single.means.nc_star, a.nc_star);

        let both = aggregate(&[a, row(&B, 3)], 6).unwrap();
        assert_eq!(both.means.alpha_star, 1.0);
        assert!(close(both.means.delta, 0.6695, 1e-3));
        assert_eq!(both.by_category[4].count, 1);
        assert_eq!(both.by_category[3].count, 1);
        assert!(both.by_category[0].means.is_none());
        let total: usize = both.by_category.iter().map(|c| c.count).sum();
        assert_eq!(total, both.count);

        assert_eq!(aggregate(&[], 6), Err(Error::EmptySample));
    }

    #[test]
    fn tied_peak_gives_zero_dominance() {
        let r = row(&[0.3, 0.5, 0.5, 0.0, 0.0, 0.0], 1);
        assert_eq!(r.alpha_star, 1.0);
        assert_eq!(r.nc_star, 0.0);
    }

    #[test]
    fn observation_out_of_range() {
        let f = PossibilityForecast::validate(&A, &Universe::spc()).unwrap();
        assert!(VerificationPair::new(f.clone(), 6).is_err());
        assert!(score_forecast(&f, 9).is_err());
    }

    #[test]
    fn flooring_trades_off_across_scenarios() {
        let floor = |pi: &[f64]| pi.iter().map(|&p| p.max(0.01)).collect::<Vec<_>>();
        let dc = row(&floor(&C), 4).delta - row(&C, 4).delta;
        let da = row(&floor(&A), 4).delta - row(&A, 4).delta;
        assert!(close(dc, 0.006, 1e-3), "{dc}");
        assert!(close(da, -0.004, 1e-3), "{da}");
    }

    fn forecast_obs() -> impl Strategy<Value = (Vec<f64>, usize)> {
        (2usize..8).prop_flat_map(|k| {
            (
                proptest::collection::vec(0.0f64..=1.0, k)
                    .prop_filter("something possible", |v| v.iter().any(|&p| p > 1e-3)),
                0..k,
            )
        })
    }

    proptest! {
        #[test]
        fn shape_metrics_scale_invariant((pi, obs) in forecast_obs(), lambda in 0.01f64..=1.0) {
            let f = PossibilityForecast::from_values(pi.clone()).unwrap();
            let scaled: Vec<f64> = pi.iter().map(|p| p * lambda).collect();
            let g = PossibilityForecast::from_values(scaled).unwrap();
            let r = score_forecast(&f, obs).unwrap();
            let s = score_forecast(&g, obs).unwrap();
            prop_assert!(close(r.alpha_star, s.alpha_star, 1e-12));
            prop_assert!(close(r.eta, s.eta, 1e-12));
            prop_assert!(close(r.delta, s.delta, 1e-12));
            prop_assert!(close(r.nc_star, s.nc_star, 1e-12));
            prop_assert!(close(s.ignorance, 1.0 - lambda * f.commitment(), 1e-12));
        }

        #[test]
        fn row_invariants((pi, obs) in forecast_obs()) {
            let k = pi.len() as f64;
            let f = PossibilityForecast::from_values(pi.clone()).unwrap();
            let r = score_forecast(&f, obs).unwrap();
            prop_assert_eq!(r.delta, r.alpha_star - r.eta);
            prop_assert!(close(r.joint_skill, r.alpha_star * (1.0 - r.eta), 1e-12));
            prop_assert!(r.eta >= 1.0 / k - 1e-12 && r.eta <= 1.0 + 1e-12);
            let bound = 1.0 - 1.0 / k;
            prop_assert!(r.delta >= -bound - 1e-12 && r.delta <= bound + 1e-12);
            prop_assert!((0.0..=1.0).contains(&r.alpha_star));
            prop_assert!((0.0..=1.0).contains(&r.nc_star));
            if r.nc_star > 0.0 {
                prop_assert_eq!(r.alpha_star, 1.0);
            }
            let m = f.commitment();
            let unique_peak = pi.iter().filter(|&&p| p == m).count() == 1 && pi[obs] == m;
            if unique_peak {
                let runner_up = pi.iter().enumerate()
                    .filter(|&(i, _)| i != obs).map(|(_, &p)| p).fold(0.0, f64::max);
                prop_assert!(close(r.nc_star, 1.0 - runner_up / m, 1e-12));
            } else {
                prop_assert_eq!(r.nc_star, 0.0);
            }
        }
    }
}
