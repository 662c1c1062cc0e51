//! Peak-category reduction and threshold contingency verification.
//!
//! Each forecast collapses to its peak category (ties go to the more severe
//! category). For a severity threshold `t >= 1` the forecast says "yes" when
//! the peak is at or above `t`, and the observation is "yes" when the
//! observed category is at or above `t`.

use std::ops::{Add, AddAssign};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::possibility::PossibilityForecast;
use crate::scorecard::VerificationPair;

/// Argmax of `pi`; ties resolve to the highest index.
pub fn peak_category(forecast: &PossibilityForecast) -> usize {
    let pi = forecast.values();
    let m = forecast.commitment();
    pi.iter().rposition(|&p| p == m).unwrap_or(0)
}

/// 2x2 counts at one severity threshold.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ContingencyTable {
    pub threshold: usize,
    /// hits
    pub a: u64,
    /// false alarms
    pub b: u64,
    /// misses
    pub c: u64,
    /// correct negatives
    pub d: u64,
}

impl ContingencyTable {
    pub fn new(threshold: usize, a: u64, b: u64, c: u64, d: u64) -> Self {
        ContingencyTable {
            threshold,
            a,
            b,
            c,
            d,
        }
    }

    pub fn total(&self) -> u64 {
        self.a + self.b + self.c + self.d
    }

    /// Tallies one (peak, observed) outcome.
    pub fn record(&mut self, peak: usize, observed: usize) {
        let forecast_yes = peak >= self.threshold;
        let observed_yes = observed >= self.threshold;
        match (forecast_yes, observed_yes) {
            (true, true) => self.a += 1,
            (true, false) => self.b += 1,
            (false, true) => self.c += 1,
            (false, false) => self.d += 1,
        }
    }
}

impl Add for ContingencyTable {
    type Output = ContingencyTable;

    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl AddAssign for ContingencyTable {
    fn add_assign(&mut self, rhs: Self) {
        debug_assert_eq!(self.threshold, rhs.threshold);
        self.a += rhs.a;
        self.b += rhs.b;
        self.c += rhs.c;
        self.d += rhs.d;
    }
}

/// Binary scores. `None` marks a zero denominator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CategoricalScores {
    pub pod: Option<f64>,
    pub far: Option<f64>,
    pub csi: Option<f64>,
    pub pss: Option<f64>,
    pub hss: Option<f64>,
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    (den != 0.0).then(|| num / den)
}

fn check_threshold(threshold: usize, k: usize) -> Result<()> {
    if threshold == 0 || threshold >= k {
        return Err(Error::BadThreshold {
            threshold,
            max: k - 1,
        });
    }
    Ok(())
}

/// Tallies the 2x2 table at `threshold` over `(peak, observed)` outcomes.
pub fn contingency_from_outcomes(
    outcomes: &[(usize, usize)],
    threshold: usize,
    k: usize,
) -> Result<ContingencyTable> {
    check_threshold(threshold, k)?;
    let mut table = ContingencyTable {
        threshold,
        ..Default::default()
    };
    for &(peak, observed) in outcomes {
        table.record(peak, observed);
    }
    Ok(table)
}

/// Tallies the 2x2 table at `threshold` over verification pairs.
pub fn contingency(pairs: &[VerificationPair], threshold: usize) -> Result<ContingencyTable> {
    let k = pairs_k(pairs)?;
    contingency_from_outcomes(&outcomes(pairs), threshold, k)
}

/// One table per threshold `1..K`.
pub fn all_contingencies(pairs: &[VerificationPair]) -> Result<Vec<ContingencyTable>> {
    let k = pairs_k(pairs)?;
    let outcomes = outcomes(pairs);
    (1..k)
        .map(|t| contingency_from_outcomes(&outcomes, t, k))
        .collect()
}

pub(crate) fn outcomes(pairs: &[VerificationPair]) -> Vec<(usize, usize)> {
    pairs
        .iter()
        .map(|p| (peak_category(&p.forecast), p.observed))
        .collect()
}

fn pairs_k(pairs: &[VerificationPair]) -> Result<usize> {
    let first = pairs.first().ok_or(Error::EmptySample)?;
    let k = first.forecast.k();
    if let Some(bad) = pairs.iter().find(|p| p.forecast.k() != k) {
        return Err(Error::UniverseMismatch {
            expected: k,
            got: bad.forecast.k(),
        });
    }
    Ok(k)
}

pub fn binary_scores(table: &ContingencyTable) -> CategoricalScores {
    let (a, b, c, d) = (
        table.a as f64,
        table.b as f64,
        table.c as f64,
        table.d as f64,
    );
    let pod = ratio(a, a + c);
    let pofd = ratio(b, b + d);
    let hss_den = (a + c) * (c + d) + (a + b) * (b + d);
    CategoricalScores {
        pod,
        far: ratio(b, a + b),
        csi: ratio(a, a + b + c),
        pss: pod.zip(pofd).map(|(h, f)| h - f),
        hss: ratio(2.0 * (a * d - b * c), hss_den),
    }
}

/// K x K counts; rows are forecast peaks, columns observed categories.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfusionMatrix {
    k: usize,
    counts: Vec<u64>,
}

impl ConfusionMatrix {
    pub fn zeros(k: usize) -> Self {
        ConfusionMatrix {
            k,
            counts: vec![0; k * k],
        }
    }

    /// Builds a matrix from row-major rows.
    pub fn from_rows(rows: &[Vec<u64>]) -> Result<Self> {
        let k = rows.len();
        if k < 2 || rows.iter().any(|r| r.len() != k) {
            return Err(Error::InvalidConfig(format!(
                "confusion matrix must be square with K >= 2, got {k} rows"
            )));
        }
        Ok(ConfusionMatrix {
            k,
            counts: rows.concat(),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, forecast: usize, observed: usize) -> u64 {
        self.counts[forecast * self.k + observed]
    }

    pub fn record(&mut self, forecast: usize, observed: usize) {
        self.counts[forecast * self.k + observed] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn row(&self, forecast: usize) -> &[u64] {
        &self.counts[forecast * self.k..(forecast + 1) * self.k]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u64]> {
        self.counts.chunks(self.k)
    }

    pub fn trace(&self) -> u64 {
        (0..self.k).map(|i| self.get(i, i)).sum()
    }
}

pub fn confusion_from_outcomes(outcomes: &[(usize, usize)], k: usize) -> Result<ConfusionMatrix> {
    if outcomes.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut cm = ConfusionMatrix::zeros(k);
    for &(peak, observed) in outcomes {
        cm.record(peak, observed);
    }
    Ok(cm)
}

pub fn confusion(pairs: &[VerificationPair]) -> Result<ConfusionMatrix> {
    let k = pairs_k(pairs)?;
    confusion_from_outcomes(&outcomes(pairs), k)
}

/// Multi-category Heidke skill: `(correct - expected) / (n - expected)`,
/// with the chance expectation from the marginals.
pub fn hss_multicategory(cm: &ConfusionMatrix) -> Option<f64> {
    let n = cm.total() as f64;
    if n == 0.0 {
        return None;
    }
    let k = cm.k();
    let expected: f64 = (0..k)
        .map(|i| {
            let row: u64 = cm.row(i).iter().sum();
            let col: u64 = (0..k).map(|r| cm.get(r, i)).sum();
            row as f64 * col as f64
        })
        .sum::<f64>()
        / n;
    ratio(cm.trace() as f64 - expected, n - expected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::universe::Universe;
    use proptest::prelude::*;

    fn pair(pi: &[f64], observed: usize) -> VerificationPair {
        let f = PossibilityForecast::validate(pi, &Universe::spc()).unwrap();
        VerificationPair::new(f, observed).unwrap()
    }

    fn scenarios() -> Vec<VerificationPair> {
        vec![
            pair(&[0.0, 0.0, 0.05, 0.15, 0.90, 0.10], 4),
            pair(&[0.10, 0.10, 0.40, 0.55, 0.30, 0.0], 3),
            pair(&[0.85, 0.10, 0.05, 0.0, 0.0, 0.0], 4),
        ]
    }

    #[test]
    fn peak_examples() {
        let s = scenarios();
        assert_eq!(peak_category(&s[0].forecast), 4);
        let ex2 = pair(&[0.30, 0.50, 0.50, 0.0, 0.0, 0.0], 0);
        assert_eq!(peak_category(&ex2.forecast), 2);
        let uniform = pair(&[0.3; 6], 0);
        assert_eq!(peak_category(&uniform.forecast), 5);
    }

    #[test]
    fn scenario_contingencies() {
        let s = scenarios();
        let a_only = contingency(&s[..1], 4).unwrap();
        assert_eq!((a_only.a, a_only.b, a_only.c, a_only.d), (1, 0, 0, 0));
        for t in 1..6 {
            let c_only = contingency(&s[2..], t).unwrap();
            if t <= 4 {
                assert_eq!(c_only.c, 1, "threshold {t}");
            } else {
                assert_eq!(c_only.d, 1);
            }
        }
        let none: Vec<_> = (0..7)
            .map(|_| pair(&[1.0, 0.2, 0.0, 0.0, 0.0, 0.0], 0))
            .collect();
        assert_eq!(
            contingency(&none, 1).unwrap(),
            ContingencyTable::new(1, 0, 0, 0, 7)
        );
    }

    #[test]
    fn threshold_bounds() {
        let s = scenarios();
        assert!(matches!(
            contingency(&s, 0),
            Err(Error::BadThreshold { .. })
        ));
        assert!(matches!(
            contingency(&s, 6),
            Err(Error::BadThreshold { .. })
        ));
        assert_eq!(contingency(&[], 1), Err(Error::EmptySample));
    }

    #[test]
    fn binary_score_examples() {
        let perfect = binary_scores(&ContingencyTable::new(1, 9, 0, 0, 0));
        assert_eq!(perfect.pod, Some(1.0));
        assert_eq!(perfect.far, Some(0.0));
        assert_eq!(perfect.csi, Some(1.0));
        assert_eq!(perfect.pss, None);

        let flat = binary_scores(&ContingencyTable::new(1, 4, 4, 4, 4));
        assert_eq!(flat.pss, Some(0.0));

        // Reference values from a direct evaluation of the formulas.
        let s = binary_scores(&ContingencyTable::new(1, 3, 1, 2, 10));
        assert!((s.pod.unwrap() - 0.600).abs() < 1e-3);
        assert!((s.far.unwrap() - 0.250).abs() < 1e-3);
        assert!((s.csi.unwrap() - 0.500).abs() < 1e-3);
        assert!((s.pss.unwrap() - 0.509).abs() < 1e-3);
        assert!((s.hss.unwrap() - 0.5385).abs() < 1e-3);
    }

    #[test]
    fn undefined_scores_are_none() {
        let s = binary_scores(&ContingencyTable::new(1, 0, 0, 0, 5));
        assert_eq!(s.pod, None);
        assert_eq!(s.far, None);
        assert_eq!(s.csi, None);
        assert_eq!(s.pss, None);
        assert_eq!(s.hss, None);
    }

    #[test]
    fn confusion_examples() {
        let s = scenarios();
        let single = confusion(&s[..1]).unwrap();
        assert_eq!(single.get(4, 4), 1);
        assert_eq!(single.total(), 1);

        let cm = confusion(&s).unwrap();
        assert_eq!(cm.get(4, 4), 1);
        assert_eq!(cm.get(3, 3), 1);
        assert_eq!(cm.get(0, 4), 1);
        assert_eq!(cm.total(), 3);
        assert_eq!(confusion(&[]), Err(Error::EmptySample));
    }

    #[test]
    fn hss_examples() {
        let diag =
            ConfusionMatrix::from_rows(&[vec![4, 0, 0], vec![0, 2, 0], vec![0, 0, 0]]).unwrap();
        assert_eq!(hss_multicategory(&diag), Some(1.0));

        // Each cell equals row * col / n for marginals (12, 4) and (8, 8).
        let chance = ConfusionMatrix::from_rows(&[vec![6, 6], vec![2, 2]]).unwrap();
        assert!(hss_multicategory(&chance).unwrap().abs() < 1e-12);

        let m = ConfusionMatrix::from_rows(&[vec![5, 2, 0], vec![1, 6, 1], vec![0, 2, 3]]).unwrap();
        assert!((hss_multicategory(&m).unwrap() - 0.5349).abs() < 1e-3);

        let single_class = ConfusionMatrix::from_rows(&[vec![3, 0], vec![0, 0]]).unwrap();
        assert_eq!(hss_multicategory(&single_class), None);
    }

    proptest! {
        #[test]
        fn event_counts_monotone_in_threshold(
            outcomes in proptest::collection::vec((0usize..6, 0usize..6), 1..60)
        ) {
            let mut prev = u64::MAX;
            for t in 1..6 {
                let tbl = contingency_from_outcomes(&outcomes, t, 6).unwrap();
                prop_assert_eq!(tbl.total(), outcomes.len() as u64);
                prop_assert!(tbl.a + tbl.c <= prev);
                prev = tbl.a + tbl.c;
            }
            let cm = confusion_from_outcomes(&outcomes, 6).unwrap();
            prop_assert_eq!(cm.total(), outcomes.len() as u64);
        }

        #[test]
        fn merged_partial_tables_match(
            outcomes in proptest::collection::vec((0usize..6, 0usize..6), 2..60),
            split in 1usize..59,
        ) {
            let split = split.min(outcomes.len() - 1);
            let whole = contingency_from_outcomes(&outcomes, 2, 6).unwrap();
            let left = contingency_from_outcomes(&outcomes[..split], 2, 6).unwrap();
            let right = contingency_from_outcomes(&outcomes[split..], 2, 6).unwrap();
            prop_assert_eq!(whole, left + right);
        }
    }
}
