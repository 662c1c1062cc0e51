//! Plot-ready data for the performance diagram, the commitment diagram and
//! the conditional-necessity reliability curve.
//!
//! Nothing here renders; every function returns plain tables.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::categorical::peak_category;
use crate::error::{Error, Result};
use crate::exec::{map_slice, Execution};
use crate::possibility::EventSet;
use crate::scorecard::{ScorecardRow, VerificationPair};

pub const DEFAULT_GRIDSIZE: usize = 18;
pub const DEFAULT_TAU_STEP: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagramPoint {
    pub index: usize,
    pub id: Option<String>,
    pub x: f64,
    pub y: f64,
    pub ignorance: f64,
    pub observed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HexBinCell {
    pub col: i64,
    pub row: i64,
    pub x: f64,
    pub y: f64,
    pub count: usize,
    /// Mean ignorance of the points in the cell.
    pub mean_ignorance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategoryMean {
    pub category: usize,
    pub count: usize,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagram {
    pub points: Vec<DiagramPoint>,
    pub hexbins: Vec<HexBinCell>,
    pub category_means: Vec<CategoryMean>,
    pub extent: Extent,
}

/// Axis-aligned plotting extent `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Extent {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

/// Pointy-top hexagonal lattice laid over an extent.
///
/// The extent is mapped onto the unit square; `gridsize` hexagons span the
/// x-axis. Each point goes to the nearest lattice centre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HexGrid {
    extent: Extent,
    width: f64,
    height: f64,
}

impl HexGrid {
    pub fn new(extent: Extent, gridsize: usize) -> Result<Self> {
        if gridsize == 0 {
            return Err(Error::InvalidConfig(
                "hexbin gridsize must be positive".into(),
            ));
        }
        if !(extent.x1 > extent.x0 && extent.y1 > extent.y0) {
            return Err(Error::InvalidConfig("degenerate hexbin extent".into()));
        }
        let width = 1.0 / gridsize as f64;
        Ok(HexGrid {
            extent,
            width,
            height: width * 3f64.sqrt() / 2.0,
        })
    }

    fn unit_coords(&self, x: f64, y: f64) -> (f64, f64) {
        let e = &self.extent;
        ((x - e.x0) / (e.x1 - e.x0), (y - e.y0) / (e.y1 - e.y0))
    }

    fn extent_coords(&self, u: f64, v: f64) -> (f64, f64) {
        let e = &self.extent;
        (e.x0 + u * (e.x1 - e.x0), e.y0 + v * (e.y1 - e.y0))
    }

    /// `(col, row)` of the cell holding `(x, y)`. Odd rows are shifted right
    /// by half a cell.
    pub fn cell(&self, x: f64, y: f64) -> (i64, i64) {
        let (u, v) = self.unit_coords(x, y);
        // Even rows sit on one rectangular lattice, odd rows on another
        // offset by (w/2, h); the nearer of the two candidates wins.
        let (w, h) = (self.width, self.height);
        let even_col = (u / w).round();
        let even_row = 2.0 * (v / (2.0 * h)).round();
        let odd_col = ((u - w / 2.0) / w).round();
        let odd_row = 2.0 * ((v - h) / (2.0 * h)).round() + 1.0;
        let d_even = (u - even_col * w).powi(2) + (v - even_row * h).powi(2);
        let d_odd = (u - (odd_col + 0.5) * w).powi(2) + (v - odd_row * h).powi(2);
        if d_even <= d_odd {
            (even_col as i64, even_row as i64)
        } else {
            (odd_col as i64, odd_row as i64)
        }
    }

    pub fn centre(&self, col: i64, row: i64) -> (f64, f64) {
        let shift = if row.rem_euclid(2) == 1 { 0.5 } else { 0.0 };
        self.extent_coords((col as f64 + shift) * self.width, row as f64 * self.height)
    }

    /// Bins `(x, y, weight)` triples; each cell reports its count and the
    /// mean weight.
    pub fn bin(&self, points: impl Iterator<Item = (f64, f64, f64)>) -> Vec<HexBinCell> {
        let mut cells: BTreeMap<(i64, i64), (usize, f64)> = BTreeMap::new();
        for (x, y, w) in points {
            let entry = cells.entry(self.cell(x, y)).or_insert((0, 0.0));
            entry.0 += 1;
            entry.1 += w;
        }
        cells
            .into_iter()
            .map(|((col, row), (count, sum))| {
                let (x, y) = self.centre(col, row);
                HexBinCell {
                    col,
                    row,
                    x,
                    y,
                    count,
                    mean_ignorance: sum / count as f64,
                }
            })
            .collect()
    }
}

fn category_means(points: &[DiagramPoint], k: usize) -> Vec<CategoryMean> {
    let mut acc = vec![(0usize, 0.0f64, 0.0f64); k];
    for p in points {
        let a = &mut acc[p.observed];
        a.0 += 1;
        a.1 += p.x;
        a.2 += p.y;
    }
    acc.into_iter()
        .enumerate()
        .filter(|(_, (n, _, _))| *n > 0)
        .map(|(category, (n, sx, sy))| CategoryMean {
            category,
            count: n,
            x: sx / n as f64,
            y: sy / n as f64,
        })
        .collect()
}

fn build_diagram(
    rows: &[ScorecardRow],
    ids: Option<&[VerificationPair]>,
    k: usize,
    extent: Extent,
    gridsize: usize,
    axes: impl Fn(&ScorecardRow) -> (f64, f64),
) -> Result<Diagram> {
    if rows.is_empty() {
        return Err(Error::EmptySample);
    }
    let grid = HexGrid::new(extent, gridsize)?;
    let points: Vec<DiagramPoint> = rows
        .iter()
        .enumerate()
        .map(|(index, r)| {
            let (x, y) = axes(r);
            DiagramPoint {
                index,
                id: ids.and_then(|p| p.get(index)).and_then(|p| p.id.clone()),
                x,
                y,
                ignorance: r.ignorance,
                observed: r.observed,
            }
        })
        .collect();
    let hexbins = grid.bin(points.iter().map(|p| (p.x, p.y, p.ignorance)));
    Ok(Diagram {
        category_means: category_means(&points, k),
        points,
        hexbins,
        extent,
    })
}

/// Specificity `1 - eta` against depth-of-truth `alpha_star`, binned with
/// mean ignorance per cell. Joint-skill contours are `x * y`.
pub fn performance_points(
    rows: &[ScorecardRow],
    pairs: Option<&[VerificationPair]>,
    k: usize,
    gridsize: usize,
) -> Result<Diagram> {
    let extent = Extent {
        x0: 0.0,
        x1: 1.0,
        y0: 0.0,
        y1: 1.0,
    };
    build_diagram(rows, pairs, k, extent, gridsize, |r| {
        (r.specificity(), r.alpha_star)
    })
}

/// Commitment `m` against support margin `delta`, binned by count.
pub fn commitment_points(
    rows: &[ScorecardRow],
    pairs: Option<&[VerificationPair]>,
    k: usize,
    gridsize: usize,
) -> Result<Diagram> {
    let bound = 1.0 - 1.0 / k as f64;
    let extent = Extent {
        x0: 0.0,
        x1: 1.0,
        y0: -bound,
        y1: bound,
    };
    build_diagram(rows, pairs, k, extent, gridsize, |r| {
        (r.commitment, r.delta)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReliabilityPoint {
    pub tau: f64,
    /// `None` when no forecast reaches `tau`.
    pub hit_rate: Option<f64>,
    pub sample_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReliabilityCurve {
    pub points: Vec<ReliabilityPoint>,
    /// `1 / K`.
    pub chance: f64,
    /// Peak-category accuracy over the whole sample.
    pub accuracy: f64,
    pub count: usize,
}

/// `0, step, 2 step, ...` strictly below one, rounded to 1e-9.
pub fn tau_grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::InvalidTauGrid(format!(
            "step {step} must lie in (0, 1]"
        )));
    }
    let mut grid = Vec::new();
    let mut i = 0u32;
    loop {
        let tau = (f64::from(i) * step * 1e9).round() / 1e9;
        if tau >= 1.0 - 1e-9 {
            break;
        }
        grid.push(tau);
        i += 1;
    }
    Ok(grid)
}

/// Per-pair `(N_c(peak), hit)`.
pub fn peak_confidence(pairs: &[VerificationPair], exec: Execution) -> Vec<(f64, bool)> {
    map_slice(pairs, exec, |p| {
        let peak = peak_category(&p.forecast);
        let event = EventSet::singleton(peak, p.forecast.k()).expect("peak within universe");
        let nc = p
            .forecast
            .conditional_necessity(&event)
            .expect("singleton event is nonempty");
        (nc, peak == p.observed)
    })
}

/// Hit rate of forecasts whose peak has conditional necessity `>= tau`.
pub fn reliability_curve(pairs: &[VerificationPair], taus: &[f64]) -> Result<ReliabilityCurve> {
    reliability_curve_with(pairs, taus, Execution::default())
}

pub fn reliability_curve_with(
    pairs: &[VerificationPair],
    taus: &[f64],
    exec: Execution,
) -> Result<ReliabilityCurve> {
    let first = pairs.first().ok_or(Error::EmptySample)?;
    if taus.is_empty() {
        return Err(Error::InvalidTauGrid("empty grid".into()));
    }
    if taus.iter().any(|t| !(0.0..=1.0).contains(t)) || taus.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidTauGrid(
            "taus must be strictly ascending within [0, 1]".into(),
        ));
    }
    let confidence = peak_confidence(pairs, exec);
    let hits = confidence.iter().filter(|(_, hit)| *hit).count();
    let points = taus
        .iter()
        .map(|&tau| {
            let (n, h) = confidence
                .iter()
                .filter(|(nc, _)| *nc >= tau)
                .fold((0usize, 0usize), |(n, h), (_, hit)| {
                    (n + 1, h + usize::from(*hit))
                });
            ReliabilityPoint {
                tau,
                hit_rate: (n > 0).then(|| h as f64 / n as f64),
                sample_count: n,
            }
        })
        .collect();
    Ok(ReliabilityCurve {
        points,
        chance: 1.0 / first.forecast.k() as f64,
        accuracy: hits as f64 / pairs.len() as f64,
        count: pairs.len(),
    })
}
