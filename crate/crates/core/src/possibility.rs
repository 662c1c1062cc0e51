//! Possibility distributions over a finite ordered universe.
//!
//! A forecast is a vector of possibility degrees `pi` in `[0, 1]`. It need
//! not be normal: the peak `m = max(pi)` is the forecast's *commitment* and
//! the gap `1 - m` its self-reported *ignorance*. Event possibility is
//! max-additive and necessity is its dual, `N(A) = 1 - Pi(not A)`.
//!
//! On a subnormal forecast the raw necessity can exceed the raw possibility,
//! so `N` is only coherent after normalisation. [`PossibilityForecast::necessity`]
//! is still exposed for completeness; verification code should prefer
//! [`PossibilityForecast::conditional_necessity`], which works on the
//! normalised shape.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::universe::Universe;

/// A validated (possibly subnormal) possibility distribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PossibilityForecast {
    pi: Vec<f64>,
    #[serde(skip)]
    commitment: f64,
}

/// A forecast rescaled so that its peak is exactly one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalisedForecast {
    pi: Vec<f64>,
}

/// A subset of category indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EventSet {
    members: Vec<bool>,
}

impl EventSet {
    /// Builds an event from category indices. Duplicates are ignored.
    pub fn new(indices: &[usize], k: usize) -> Result<Self> {
        let mut members = vec![false; k];
        for &i in indices {
            if i >= k {
                return Err(Error::BadCategory { index: i, k });
            }
            members[i] = true;
        }
        Ok(EventSet { members })
    }

    pub fn singleton(index: usize, k: usize) -> Result<Self> {
        Self::new(&[index], k)
    }

    /// Every category at or above `threshold` in severity.
    pub fn at_least(threshold: usize, k: usize) -> Result<Self> {
        if threshold >= k {
            return Err(Error::BadCategory {
                index: threshold,
                k,
            });
        }
        Ok(EventSet {
            members: (0..k).map(|i| i >= threshold).collect(),
        })
    }

    pub fn universe(k: usize) -> Self {
        EventSet {
            members: vec![true; k],
        }
    }

    pub fn empty(k: usize) -> Self {
        EventSet {
            members: vec![false; k],
        }
    }

    pub fn complement(&self) -> Self {
        EventSet {
            members: self.members.iter().map(|m| !m).collect(),
        }
    }

    pub fn union(&self, other: &EventSet) -> Self {
        EventSet {
            members: self
                .members
                .iter()
                .zip(&other.members)
                .map(|(a, b)| *a || *b)
                .collect(),
        }
    }

    pub fn contains(&self, index: usize) -> bool {
        self.members.get(index).copied().unwrap_or(false)
    }

    pub fn is_empty(&self) -> bool {
        !self.members.iter().any(|m| *m)
    }

    pub fn k(&self) -> usize {
        self.members.len()
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.members
            .iter()
            .enumerate()
            .filter_map(|(i, m)| m.then_some(i))
    }
}

/// Max of `values` over the members of `event`; zero on the empty set.
fn max_over(values: &[f64], event: &EventSet) -> f64 {
    event.indices().map(|i| values[i]).fold(0.0, f64::max)
}

fn check_event(event: &EventSet, k: usize) -> Result<()> {
    if event.k() != k {
        return Err(Error::UniverseMismatch {
            expected: k,
            got: event.k(),
        });
    }
    Ok(())
}

impl PossibilityForecast {
    /// Validates `pi` against `universe`.
    pub fn validate(pi: &[f64], universe: &Universe) -> Result<Self> {
        if pi.len() != universe.k() {
            return Err(Error::WrongArity {
                expected: universe.k(),
                got: pi.len(),
            });
        }
        Self::from_values(pi.to_vec())
    }

    /// Validates a raw vector without reference to a named universe.
    pub fn from_values(pi: Vec<f64>) -> Result<Self> {
        if pi.len() < 2 {
            return Err(Error::WrongArity {
                expected: 2,
                got: pi.len(),
            });
        }
        if let Some((index, &value)) = pi
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(Error::OutOfRange { index, value });
        }
        let commitment = pi.iter().copied().fold(0.0, f64::max);
        if commitment <= 0.0 {
            return Err(Error::AllZero);
        }
        Ok(PossibilityForecast { pi, commitment })
    }

    pub fn values(&self) -> &[f64] {
        &self.pi
    }

    pub fn k(&self) -> usize {
        self.pi.len()
    }

    /// Peak possibility `m`.
    pub fn commitment(&self) -> f64 {
        self.commitment
    }

    /// `1 - m`.
    pub fn ignorance(&self) -> f64 {
        1.0 - self.commitment
    }

    pub fn is_normal(&self) -> bool {
        self.commitment == 1.0
    }

    /// `Pi(A) = max over A of pi`.
    pub fn possibility(&self, event: &EventSet) -> Result<f64> {
        check_event(event, self.k())?;
        if event.is_empty() {
            return Err(Error::EmptyEvent);
        }
        Ok(max_over(&self.pi, event))
    }

    /// `N(A) = 1 - max over the complement of pi`, with `N(universe) = 1`.
    ///
    /// On a subnormal forecast this can exceed `Pi(A)`.
    pub fn necessity(&self, event: &EventSet) -> Result<f64> {
        check_event(event, self.k())?;
        Ok(1.0 - max_over(&self.pi, &event.complement()))
    }

    /// Necessity of `event` computed on the normalised shape, clamped to
    /// `[0, 1]`.
    pub fn conditional_necessity(&self, event: &EventSet) -> Result<f64> {
        check_event(event, self.k())?;
        if event.is_empty() {
            return Err(Error::EmptyEvent);
        }
        let rival = max_over(&self.pi, &event.complement());
        Ok((1.0 - rival / self.commitment).clamp(0.0, 1.0))
    }

    /// Rescales to peak one. Entries at the peak are set to exactly 1.
    pub fn normalise(&self) -> NormalisedForecast {
        let m = self.commitment;
        let pi = self
            .pi
            .iter()
            .map(|&p| if p == m { 1.0 } else { (p / m).min(1.0) })
            .collect();
        NormalisedForecast { pi }
    }
}

impl NormalisedForecast {
    pub fn values(&self) -> &[f64] {
        &self.pi
    }

    pub fn k(&self) -> usize {
        self.pi.len()
    }

    pub fn possibility(&self, event: &EventSet) -> Result<f64> {
        check_event(event, self.k())?;
        if event.is_empty() {
            return Err(Error::EmptyEvent);
        }
        Ok(max_over(&self.pi, event))
    }

    pub fn necessity(&self, event: &EventSet) -> Result<f64> {
        check_event(event, self.k())?;
        Ok(1.0 - max_over(&self.pi, &event.complement()))
    }

    /// The normalised shape viewed as a (normal) forecast.
    pub fn to_forecast(&self) -> PossibilityForecast {
        PossibilityForecast {
            pi: self.pi.clone(),
            commitment: 1.0,
        }
    }
}
