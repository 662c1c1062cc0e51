use possverif::bridge::{climatology_vector, convert, decompose, surprise};
use possverif::categorical::{all_contingencies, binary_scores, peak_category};
use possverif::diagnostics::{performance_points, reliability_curve};
use possverif::scorecard::{aggregate, score_all};
use possverif::{PossibilityForecast, Universe, VerificationPair};

// Sharp-correct, hedged-correct and sharp-wrong outlooks.
const A: [f64; 6] = [0.0, 0.0, 0.05, 0.15, 0.90, 0.10];
const B: [f64; 6] = [0.10, 0.10, 0.40, 0.55, 0.30, 0.0];
const C: [f64; 6] = [0.85, 0.10, 0.05, 0.0, 0.0, 0.0];

fn archive() -> Vec<VerificationPair> {
    let u = Universe::spc();
    [(A, "MDT"), (B, "ENH"), (C, "MDT")]
        .iter()
        .zip(["A", "B", "C"])
        .map(|((pi, obs), id)| {
            let f = PossibilityForecast::validate(pi, &u).unwrap();
            VerificationPair::new(f, u.index_of(obs).unwrap())
                .unwrap()
                .with_id(id)
        })
        .collect()
}

#[test]
fn peaks() {
    let peaks: Vec<usize> = archive()
        .iter()
        .map(|p| peak_category(&p.forecast))
        .collect();
    assert_eq!(peaks, [4, 3, 0]);
}

#[test]
fn hits_and_misses_by_threshold() {
    let pairs = archive();
    let tables = all_contingencies(&pairs).unwrap();
    assert_eq!(tables.len(), 5);
    for t in &tables {
        // A and B are hits up to their observed category; C is always a miss
        // while MDT is still an event.
        let expect_a = if t.threshold <= 4 { 1 } else { 0 };
        let expect_b = if t.threshold <= 3 { 1 } else { 0 };
        assert_eq!(t.a, expect_a + expect_b, "threshold {}", t.threshold);
        assert_eq!(t.c, u64::from(t.threshold <= 4));
        assert_eq!(t.b, 0);
        assert_eq!(t.total(), 3);
    }
    let mdt_plus = binary_scores(&tables[3]);
    assert_eq!(mdt_plus.pod, Some(0.5));
    assert_eq!(mdt_plus.far, Some(0.0));
}

#[test]
fn aggregate_of_the_three() {
    let rows = score_all(&archive());
    let agg = aggregate(&rows, 6).unwrap();
    assert!((agg.means.alpha_star - 2.0 / 3.0).abs() < 1e-12);
    assert_eq!(agg.by_category[4].count, 2);
    assert_eq!(agg.by_category[3].count, 1);
    let mean_delta = rows.iter().map(|r| r.delta).sum::<f64>() / 3.0;
    assert!((agg.means.delta - mean_delta).abs() < 1e-15);
}

#[test]
fn information_gain_ordering() {
    let clim = climatology_vector(&Universe::spc()).unwrap();
    let ig: Vec<f64> = archive()
        .iter()
        .map(|p| {
            let f = convert(&p.forecast);
            surprise(&clim, p.observed, 0.01).unwrap().bits
                - surprise(&f, p.observed, 0.01).unwrap().bits
        })
        .collect();
    assert!(ig[0] > ig[1] && ig[1] > 0.0 && ig[2] < 0.0, "{ig:?}");

    let sample: Vec<_> = archive()
        .iter()
        .map(|p| (convert(&p.forecast), p.observed))
        .collect();
    let d = decompose(&sample, 0.01).unwrap();
    assert_eq!(d.groups, 3);
    assert!((d.mean_surprise - (d.unc - d.dsc + d.rel)).abs() < 1e-12);
}

#[test]
fn diagnostics_on_the_three() {
    let pairs = archive();
    let rows = score_all(&pairs);
    let diagram = performance_points(&rows, Some(&pairs), 6, 18).unwrap();
    assert_eq!(diagram.points[0].id.as_deref(), Some("A"));
    assert_eq!(diagram.points[2].y, 0.0);

    let curve = reliability_curve(&pairs, &[0.0, 0.5, 0.9]).unwrap();
    assert_eq!(curve.points[0].hit_rate, Some(2.0 / 3.0));
    assert_eq!(curve.accuracy, 2.0 / 3.0);
    // Peak necessities: A 0.833, B 0.273, C 0.882.
    assert_eq!(curve.points[1].sample_count, 2);
    assert_eq!(curve.points[1].hit_rate, Some(0.5));
    assert_eq!(curve.points[2].sample_count, 0);
    assert_eq!(curve.points[2].hit_rate, None);
}
