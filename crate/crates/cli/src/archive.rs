//! Newline-delimited JSON forecast archives.
//!
//! One record per line: `{"id": "...", "pi": [...], "obs": "SLGT", "model": "v2"}`.
//! `obs` may be a category label or a zero-based index; `model` is optional.
//! Blank lines are skipped.

use std::io::{BufRead, Write};

use possverif::{PossibilityForecast, Universe, VerificationPair};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ObsRef {
    Index(usize),
    Label(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArchiveRecord {
    pub id: String,
    pub pi: Vec<f64>,
    pub obs: ObsRef,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
}

impl ArchiveRecord {
    pub fn from_pair(pair: &VerificationPair, index: usize, universe: &Universe) -> Self {
        ArchiveRecord {
            id: pair.id.clone().unwrap_or_else(|| index.to_string()),
            pi: pair.forecast.values().to_vec(),
            obs: match universe.label(pair.observed) {
                Some(label) => ObsRef::Label(label.to_string()),
                None => ObsRef::Index(pair.observed),
            },
            model: pair.model.clone(),
        }
    }

    fn into_pair(self, universe: &Universe, line: usize) -> Result<VerificationPair, CliError> {
        let invalid = |message: String| CliError::Validation { line, message };
        let observed = match &self.obs {
            ObsRef::Index(i) => universe
                .check_category(*i)
                .map_err(|e| invalid(e.to_string()))?,
            ObsRef::Label(label) => universe
                .index_of(label)
                .ok_or_else(|| invalid(format!("unknown category label {label:?}")))?,
        };
        let forecast = PossibilityForecast::validate(&self.pi, universe)
            .map_err(|e| invalid(e.to_string()))?;
        let mut pair = VerificationPair::new(forecast, observed)
            .map_err(|e| invalid(e.to_string()))?
            .with_id(self.id);
        pair.model = self.model;
        Ok(pair)
    }
}

/// Parses a whole archive, rejecting it at the first bad line.
pub fn read_archive<R: BufRead>(
    reader: R,
    universe: &Universe,
) -> Result<Vec<VerificationPair>, CliError> {
    let mut pairs = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let text = line.map_err(|e| CliError::Io(e.to_string()))?;
        if text.trim().is_empty() {
            continue;
        }
        let record: ArchiveRecord = serde_json::from_str(&text).map_err(|e| CliError::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        if record.pi.len() != universe.k() {
            return Err(CliError::Parse {
                line: line_no,
                message: format!(
                    "expected {} possibility values, found {}",
                    universe.k(),
                    record.pi.len()
                ),
            });
        }
        pairs.push(record.into_pair(universe, line_no)?);
    }
    if pairs.is_empty() {
        return Err(CliError::Core(possverif::Error::EmptySample));
    }
    Ok(pairs)
}

pub fn write_archive<W: Write>(
    mut out: W,
    pairs: &[VerificationPair],
    universe: &Universe,
) -> Result<(), CliError> {
    for (i, pair) in pairs.iter().enumerate() {
        let record = ArchiveRecord::from_pair(pair, i, universe);
        serde_json::to_writer(&mut out, &record).map_err(|e| CliError::Io(e.to_string()))?;
        out.write_all(b"\n")
            .map_err(|e| CliError::Io(e.to_string()))?;
    }
    Ok(())
}
