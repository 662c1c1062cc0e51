//! Ordered categorical universe of discourse.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Climatological frequencies must sum to one within this tolerance.
pub const CLIMATOLOGY_TOLERANCE: f64 = 1e-9;

pub const SPC_LABELS: [&str; 6] = ["NONE", "MRGL", "SLGT", "ENH", "MDT", "HIGH"];
pub const SPC_CLIMATOLOGY: [f64; 6] = [0.60, 0.18, 0.12, 0.06, 0.032, 0.008];

/// K mutually exclusive categories in ascending severity, with optional
/// climatological base rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "UniverseSpec", into = "UniverseSpec")]
pub struct Universe {
    categories: Vec<String>,
    climatology: Option<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct UniverseSpec {
    categories: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    climatology: Option<Vec<f64>>,
}

impl TryFrom<UniverseSpec> for Universe {
    type Error = Error;

    fn try_from(spec: UniverseSpec) -> Result<Self> {
        Universe::new(spec.categories, spec.climatology)
    }
}

impl From<Universe> for UniverseSpec {
    fn from(u: Universe) -> Self {
        UniverseSpec {
            categories: u.categories,
            climatology: u.climatology,
        }
    }
}

impl Universe {
    pub fn new(categories: Vec<String>, climatology: Option<Vec<f64>>) -> Result<Self> {
        if categories.len() < 2 {
            return Err(Error::InvalidUniverse(format!(
                "need at least 2 categories, got {}",
                categories.len()
            )));
        }
        for (i, label) in categories.iter().enumerate() {
            if label.is_empty() {
                return Err(Error::InvalidUniverse(format!(
                    "category {i} has an empty label"
                )));
            }
            if categories[..i].contains(label) {
                return Err(Error::InvalidUniverse(format!("duplicate label `{label}`")));
            }
        }
        if let Some(clim) = &climatology {
            if clim.len() != categories.len() {
                return Err(Error::InvalidUniverse(format!(
                    "climatology has {} entries for {} categories",
                    clim.len(),
                    categories.len()
                )));
            }
            if let Some((i, v)) = clim
                .iter()
                .enumerate()
                .find(|(_, v)| !(0.0..=1.0).contains(*v))
            {
                return Err(Error::InvalidUniverse(format!(
                    "climatology entry {i} = {v} outside [0, 1]"
                )));
            }
            let total: f64 = clim.iter().sum();
            if (total - 1.0).abs() > CLIMATOLOGY_TOLERANCE {
                return Err(Error::InvalidUniverse(format!(
                    "climatology sums to {total}, not 1"
                )));
            }
        }
        Ok(Universe {
            categories,
            climatology,
        })
    }

    /// The six SPC convective outlook categories with their climatological
    /// frequencies.
    pub fn spc() -> Self {
        Universe {
            categories: SPC_LABELS.iter().map(|s| s.to_string()).collect(),
            climatology: Some(SPC_CLIMATOLOGY.to_vec()),
        }
    }

    pub fn k(&self) -> usize {
        self.categories.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.categories
    }

    pub fn label(&self, index: usize) -> Option<&str> {
        self.categories.get(index).map(String::as_str)
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.categories.iter().position(|c| c == label)
    }

    pub fn climatology(&self) -> Option<&[f64]> {
        self.climatology.as_deref()
    }

    pub fn check_category(&self, index: usize) -> Result<usize> {
        if index < self.k() {
            Ok(index)
        } else {
            Err(Error::BadCategory { index, k: self.k() })
        }
    }
}

impl Default for Universe {
    fn default() -> Self {
        Universe::spc()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("c{i}")).collect()
    }

    #[test]
    fn spc_universe_is_valid() {
        let u = Universe::spc();
        assert_eq!(u.k(), 6);
        assert_eq!(u.index_of("MDT"), Some(4));
        assert_eq!(u.label(5), Some("HIGH"));
        let rebuilt = Universe::new(u.labels().to_vec(), u.climatology().map(<[f64]>::to_vec));
        assert_eq!(rebuilt.unwrap(), u);
    }

    #[test]
    fn rejects_bad_universes() {
        assert!(Universe::new(labels(1), None).is_err());
        assert!(Universe::new(vec!["a".into(), "a".into()], None).is_err());
        assert!(Universe::new(labels(2), Some(vec![0.5, 0.6])).is_err());
        assert!(Universe::new(labels(2), Some(vec![1.2, -0.2])).is_err());
        assert!(Universe::new(labels(2), Some(vec![0.5])).is_err());
        assert!(Universe::new(labels(2), Some(vec![0.25, 0.75])).is_ok());
    }

    #[test]
    fn deserialisation_path_validates() {
        let ok = Universe::try_from(UniverseSpec {
            categories: vec!["lo".into(), "hi".into()],
            climatology: Some(vec![0.9, 0.1]),
        });
        assert_eq!(ok.unwrap().k(), 2);
        let bad = Universe::try_from(UniverseSpec {
            categories: vec!["lo".into()],
            climatology: None,
        });
        assert!(bad.is_err());
    }
}
