use std::io::Write;

use possverif::bridge::{climatology_vector, convert, decompose, surprise, ProbabilityVector};
use possverif::categorical::{
    all_contingencies, binary_scores, confusion, contingency, hss_multicategory, ContingencyTable,
};
use possverif::compare::{compare, CompareSettings};
use possverif::diagnostics::{
    commitment_points, performance_points, reliability_curve, tau_grid, Diagram,
};
use possverif::scorecard::{aggregate, score_all, MetricMeans};
use possverif::synthgen::{generate, SynthConfig};
use possverif::{Error, Universe, VerificationPair};
use serde::Serialize;

use crate::table::{write_tables, Cell, Table};
use crate::{load_archive, write_archive, Cli, CliError, Command};

pub(crate) fn dispatch(
    cli: &Cli,
    universe: &Universe,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    if let Command::Gen { n } = cli.command {
        return gen(cli, universe, n, out);
    }
    let input = cli
        .input
        .as_deref()
        .ok_or_else(|| CliError::Usage("--input is required for this command".into()))?;
    let pairs = load_archive(input, universe)?;
    let tables = match &cli.command {
        Command::Score => score(&pairs, universe)?,
        Command::Bridge { baseline } => bridge(&pairs, baseline.as_deref(), universe, cli.epsilon)?,
        Command::Cat { threshold, .. } => cat(&pairs, threshold.as_deref(), universe)?,
        Command::Diag { tau_step, gridsize } => diag(&pairs, universe, *tau_step, *gridsize)?,
        Command::Compare {
            candidate,
            resamples,
            confidence,
            threshold,
            unpaired,
        } => {
            let cand = load_archive(candidate, universe)?;
            let settings = CompareSettings {
                resamples: *resamples,
                confidence: *confidence,
                seed: cli.seed,
                paired: !unpaired,
                threshold: match threshold {
                    Some(t) => parse_category(t, universe)?,
                    None => CompareSettings::default().threshold,
                },
                epsilon: cli.epsilon,
                ..CompareSettings::default()
            };
            compare_report(&pairs, &cand, universe, &settings)?
        }
        Command::Gen { .. } => unreachable!(),
    };
    write_tables(&tables, cli.format, out)
}

fn label(universe: &Universe, index: usize) -> Cell {
    universe.label(index).unwrap_or_default().into()
}

/// Accepts a category label or a zero-based index.
fn parse_category(text: &str, universe: &Universe) -> Result<usize, CliError> {
    if let Some(i) = universe.index_of(text) {
        return Ok(i);
    }
    text.parse::<usize>()
        .ok()
        .filter(|&i| i < universe.k())
        .ok_or_else(|| CliError::Usage(format!("unknown category {text:?}")))
}

/// Snake-case name of a serialisable enum value.
fn tag<T: Serialize>(value: &T) -> String {
    serde_json::to_value(value)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

fn gen(cli: &Cli, universe: &Universe, n: usize, out: &mut dyn Write) -> Result<(), CliError> {
    let climatology = universe.climatology().ok_or(Error::MissingClimatology)?;
    let config = SynthConfig {
        climatology: climatology.to_vec(),
        ..SynthConfig::default()
    }
    .with_n(n)
    .with_seed(cli.seed);
    let sample = generate(&config)?;
    write_archive(out, &sample.pairs(), universe)
}

const MEAN_COLUMNS: [&str; 6] = [
    "alpha_star",
    "eta",
    "delta",
    "ignorance",
    "nc_star",
    "joint_skill",
];

fn mean_cells(means: Option<&MetricMeans>) -> Vec<Cell> {
    match means {
        Some(m) => vec![
            m.alpha_star.into(),
            m.eta.into(),
            m.delta.into(),
            m.ignorance.into(),
            m.nc_star.into(),
            m.joint_skill.into(),
        ],
        None => vec![Cell::Num(None); MEAN_COLUMNS.len()],
    }
}

fn score(pairs: &[VerificationPair], universe: &Universe) -> Result<Vec<Table>, CliError> {
    let rows = score_all(pairs);
    let mut scores = Table::new(
        "scores",
        [
            "id",
            "alpha_star",
            "eta",
            "delta",
            "ignorance",
            "nc_star",
            "m",
            "peak",
            "joint_skill",
        ],
    );
    for (pair, r) in pairs.iter().zip(&rows) {
        scores.push(vec![
            pair.id.clone().into(),
            r.alpha_star.into(),
            r.eta.into(),
            r.delta.into(),
            r.ignorance.into(),
            r.nc_star.into(),
            r.commitment.into(),
            label(universe, r.peak),
            r.joint_skill.into(),
        ]);
    }

    let agg = aggregate(&rows, universe.k())?;
    let mut summary = Table::new(
        "aggregate",
        ["group", "count"].into_iter().chain(MEAN_COLUMNS),
    );
    let mut row = vec!["all".into(), agg.count.into()];
    row.extend(mean_cells(Some(&agg.means)));
    summary.push(row);
    for cat in &agg.by_category {
        let mut row = vec![label(universe, cat.category), cat.count.into()];
        row.extend(mean_cells(cat.means.as_ref()));
        summary.push(row);
    }
    Ok(vec![scores, summary])
}

fn bridge(
    pairs: &[VerificationPair],
    baseline_path: Option<&str>,
    universe: &Universe,
    epsilon: f64,
) -> Result<Vec<Table>, CliError> {
    let forecasts: Vec<ProbabilityVector> = pairs.iter().map(|p| convert(&p.forecast)).collect();
    let baselines: Vec<ProbabilityVector> = match baseline_path {
        Some(path) => {
            let base = load_archive(path, universe)?;
            if base.len() != pairs.len() {
                return Err(Error::UnpairedSamples(format!(
                    "{} forecast records vs {} baseline records",
                    pairs.len(),
                    base.len()
                ))
                .into());
            }
            if let Some(i) = (0..base.len()).find(|&i| base[i].observed != pairs[i].observed) {
                return Err(Error::UnpairedSamples(format!(
                    "observations differ at record {}",
                    i + 1
                ))
                .into());
            }
            base.iter().map(|p| convert(&p.forecast)).collect()
        }
        None => vec![climatology_vector(universe)?; pairs.len()],
    };

    let mut columns = vec!["id".to_string(), "observed".to_string()];
    columns.extend(universe.labels().iter().map(|l| format!("p_{l}")));
    columns.extend(
        [
            "p_ign",
            "p_obs",
            "surprise",
            "floored",
            "baseline_p_obs",
            "baseline_surprise",
            "ig",
        ]
        .map(String::from),
    );
    let mut conversion = Table::new("conversion", columns);
    let (mut total_s, mut total_b, mut floored) = (0.0, 0.0, 0usize);
    for ((pair, p), b) in pairs.iter().zip(&forecasts).zip(&baselines) {
        let obs = pair.observed;
        let s = surprise(p, obs, epsilon)?;
        let sb = surprise(b, obs, epsilon)?;
        total_s += s.bits;
        total_b += sb.bits;
        floored += usize::from(s.floored);
        let mut row = vec![pair.id.clone().into(), label(universe, obs)];
        row.extend(p.as_slice().iter().map(|&v| Cell::from(v)));
        row.extend([
            p.as_slice()[obs].into(),
            s.bits.into(),
            s.floored.into(),
            b.as_slice()[obs].into(),
            sb.bits.into(),
            (sb.bits - s.bits).into(),
        ]);
        conversion.push(row);
    }

    let mut decomposition = Table::new(
        "decomposition",
        [
            "source",
            "mean_surprise",
            "unc",
            "dsc",
            "rel",
            "groups",
            "count",
        ],
    );
    for (source, vectors) in [("forecast", &forecasts), ("baseline", &baselines)] {
        let sample: Vec<(ProbabilityVector, usize)> = vectors
            .iter()
            .cloned()
            .zip(pairs.iter().map(|p| p.observed))
            .collect();
        let d = decompose(&sample, epsilon)?;
        decomposition.push(vec![
            source.into(),
            d.mean_surprise.into(),
            d.unc.into(),
            d.dsc.into(),
            d.rel.into(),
            d.groups.into(),
            d.count.into(),
        ]);
    }

    let n = pairs.len() as f64;
    let mut summary = Table::new(
        "summary",
        [
            "count",
            "epsilon",
            "mean_surprise",
            "mean_baseline_surprise",
            "mean_ig",
            "floored",
        ],
    );
    summary.push(vec![
        pairs.len().into(),
        epsilon.into(),
        (total_s / n).into(),
        (total_b / n).into(),
        ((total_b - total_s) / n).into(),
        floored.into(),
    ]);
    Ok(vec![conversion, decomposition, summary])
}

fn cat(
    pairs: &[VerificationPair],
    threshold: Option<&str>,
    universe: &Universe,
) -> Result<Vec<Table>, CliError> {
    let tables: Vec<ContingencyTable> = match threshold {
        Some(t) => vec![contingency(pairs, parse_category(t, universe)?)?],
        None => all_contingencies(pairs)?,
    };
    let mut binary = Table::new(
        "contingency",
        [
            "threshold",
            "a",
            "b",
            "c",
            "d",
            "pod",
            "far",
            "csi",
            "pss",
            "hss",
        ],
    );
    for t in &tables {
        let s = binary_scores(t);
        binary.push(vec![
            label(universe, t.threshold),
            t.a.into(),
            t.b.into(),
            t.c.into(),
            t.d.into(),
            s.pod.into(),
            s.far.into(),
            s.csi.into(),
            s.pss.into(),
            s.hss.into(),
        ]);
    }

    let cm = confusion(pairs)?;
    let mut matrix = Table::new(
        "confusion",
        std::iter::once("forecast".to_string()).chain(universe.labels().iter().cloned()),
    );
    for (f, counts) in cm.rows().enumerate() {
        let mut row = vec![label(universe, f)];
        row.extend(counts.iter().map(|&c| Cell::from(c)));
        matrix.push(row);
    }

    let mut multi = Table::new("multicategory", ["count", "accuracy", "hss"]);
    multi.push(vec![
        cm.total().into(),
        (cm.trace() as f64 / cm.total() as f64).into(),
        hss_multicategory(&cm).into(),
    ]);
    Ok(vec![binary, matrix, multi])
}

fn diagram_tables(name: &str, diagram: &Diagram, universe: &Universe) -> Vec<Table> {
    let mut points = Table::new(
        &format!("{name}_points"),
        ["index", "id", "x", "y", "ignorance", "observed"],
    );
    for p in &diagram.points {
        points.push(vec![
            p.index.into(),
            p.id.clone().into(),
            p.x.into(),
            p.y.into(),
            p.ignorance.into(),
            label(universe, p.observed),
        ]);
    }
    let mut hexbins = Table::new(
        &format!("{name}_hexbins"),
        ["col", "row", "x", "y", "count", "mean_ignorance"],
    );
    for c in &diagram.hexbins {
        hexbins.push(vec![
            c.col.into(),
            c.row.into(),
            c.x.into(),
            c.y.into(),
            c.count.into(),
            c.mean_ignorance.into(),
        ]);
    }
    let mut means = Table::new(
        &format!("{name}_category_means"),
        ["category", "count", "x", "y"],
    );
    for m in &diagram.category_means {
        means.push(vec![
            label(universe, m.category),
            m.count.into(),
            m.x.into(),
            m.y.into(),
        ]);
    }
    let mut extent = Table::new(&format!("{name}_extent"), ["x0", "x1", "y0", "y1"]);
    let e = diagram.extent;
    extent.push(vec![e.x0.into(), e.x1.into(), e.y0.into(), e.y1.into()]);
    vec![points, hexbins, means, extent]
}

fn diag(
    pairs: &[VerificationPair],
    universe: &Universe,
    tau_step: f64,
    gridsize: usize,
) -> Result<Vec<Table>, CliError> {
    let rows = score_all(pairs);
    let k = universe.k();
    let mut tables = diagram_tables(
        "performance",
        &performance_points(&rows, Some(pairs), k, gridsize)?,
        universe,
    );
    tables.extend(diagram_tables(
        "commitment",
        &commitment_points(&rows, Some(pairs), k, gridsize)?,
        universe,
    ));

    let curve = reliability_curve(pairs, &tau_grid(tau_step)?)?;
    let mut reliability = Table::new("reliability", ["tau", "hit_rate", "sample_count"]);
    for p in &curve.points {
        reliability.push(vec![p.tau.into(), p.hit_rate.into(), p.sample_count.into()]);
    }
    let mut baselines = Table::new("reliability_baselines", ["chance", "accuracy", "count"]);
    baselines.push(vec![
        curve.chance.into(),
        curve.accuracy.into(),
        curve.count.into(),
    ]);
    tables.push(reliability);
    tables.push(baselines);
    Ok(tables)
}

fn compare_report(
    baseline: &[VerificationPair],
    candidate: &[VerificationPair],
    universe: &Universe,
    settings: &CompareSettings,
) -> Result<Vec<Table>, CliError> {
    let report = compare(baseline, candidate, universe, settings)?;
    let mut rows = Table::new(
        "comparison",
        [
            "metric",
            "facet",
            "orientation",
            "baseline",
            "candidate",
            "delta",
            "ci_low",
            "ci_high",
            "significant",
            "verdict",
            "magnitude",
        ],
    );
    for r in &report.rows {
        rows.push(vec![
            r.metric.name().into(),
            tag(&r.facet).into(),
            tag(&r.orientation).into(),
            r.baseline.into(),
            r.candidate.into(),
            r.delta.into(),
            r.ci_low.into(),
            r.ci_high.into(),
            r.significant.into(),
            r.verdict.as_ref().map(tag).into(),
            r.magnitude.as_ref().map(tag).into(),
        ]);
    }
    let mut meta = Table::new(
        "settings",
        [
            "baseline_size",
            "candidate_size",
            "resamples",
            "confidence",
            "seed",
            "paired",
            "threshold",
            "epsilon",
        ],
    );
    meta.push(vec![
        report.baseline_size.into(),
        report.candidate_size.into(),
        report.resamples.into(),
        report.confidence.into(),
        report.seed.into(),
        report.paired.into(),
        label(universe, report.threshold),
        report.epsilon.into(),
    ]);
    Ok(vec![rows, meta])
}
