use emso_core::analytic::paley_zygmund;
use emso_core::experiments::{
    estimate_expectation, estimate_probability, oscillation_rows, oscillation_table, wilson_interval, write_csv,
    CsvRow, ProbabilityMode, RunManifest, CSV_HEADER,
};
use emso_core::graph::{sample_gnp, Seed};
use emso_core::oracle::{exact_union_probability, OracleTable};
use proptest::prelude::*;

#[test]
fn oracle_moment_invariants() {
    for n in 3..=6 {
        let t = OracleTable::build(n).unwrap();
        for p in [0.1, 0.5, 0.9] {
            let mut all = vec![t.moments_all(p).unwrap()];
            for &(k, l, m) in t.points() {
                all.push(t.moments(p, k, l, m).unwrap());
            }
            for mo in all {
                assert!(mo.e_x2 >= mo.e_x * mo.e_x * (1.0 - 1e-12));
                assert!(mo.p_positive >= 0.0);
                assert!(mo.p_positive <= mo.e_x.min(1.0) * (1.0 + 1e-12));
            }
        }
    }
}

#[test]
fn paley_zygmund_below_exact_probability_at_six_vertices() {
    let mo = OracleTable::build(6).unwrap().moments(0.5, 1, 1, 1).unwrap();
    let pz = paley_zygmund(mo.e_x, mo.e_x2, 0.0).unwrap();
    assert!(pz <= mo.p_positive + 1e-12);
}

#[test]
fn union_tends_to_one_as_p_tends_to_one() {
    let mut prev = 0.0;
    for p in [0.9, 0.99, 0.999, 0.9999] {
        let u = exact_union_probability(3, p).unwrap();
        assert!(u > prev);
        prev = u;
    }
    assert!(prev > 0.999);
}

#[test]
fn estimates_do_not_depend_on_the_thread_count() {
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let a = estimate_expectation(6, 0.5, 2, 1, 1, 3000, 17).unwrap();
            let b = estimate_probability(6, 0.5, 500, 17, ProbabilityMode::Union).unwrap();
            let c = estimate_probability(6, 0.5, 3000, 17, ProbabilityMode::Fixed { k: 1, l: 1, m: 1 }).unwrap();
            serde_json::to_string(&(a, b, c)).unwrap()
        })
    };
    let one = run(1);
    assert_eq!(one, run(3));
    assert_eq!(one, run(8));
}

#[test]
fn fixed_probability_matches_oracle_companion() {
    let r = estimate_probability(5, 0.5, 20_000, 5, ProbabilityMode::Fixed { k: 1, l: 1, m: 1 }).unwrap();
    let truth = OracleTable::build(5).unwrap().moments(0.5, 1, 1, 1).unwrap().p_positive;
    assert_eq!(r.analytic, Some(truth));
    let se = (truth * (1.0 - truth) / 20_000.0).sqrt();
    assert!((r.estimate - truth).abs() <= 4.0 * se);
}

#[test]
fn sampler_streams_are_reproducible_and_distinct() {
    let a = sample_gnp(30, 0.5, Seed::new(4).with_stream(2)).unwrap();
    let b = sample_gnp(30, 0.5, Seed::new(4).with_stream(2)).unwrap();
    let c = sample_gnp(30, 0.5, Seed::new(4).with_stream(3)).unwrap();
    assert_eq!(a.edges().collect::<Vec<_>>(), b.edges().collect::<Vec<_>>());
    assert_ne!(a.edges().collect::<Vec<_>>(), c.edges().collect::<Vec<_>>());
}

#[test]
fn oscillation_csv_layout() {
    let rows = oscillation_table(0.5, 5..=7).unwrap();
    assert_eq!(rows.len(), 3);
    let csv_rows = oscillation_rows(0.5, &rows);
    let mut buf = Vec::new();
    write_csv(&mut buf, &csv_rows).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().next(), Some(CSV_HEADER.join(",").as_str()));
    assert_eq!(text.lines().count(), 1 + 9);
    for r in &rows {
        assert!(r.n_small > r.n_large);
    }
}

#[test]
fn csv_row_echoes_the_manifest() {
    let r = estimate_expectation(4, 0.5, 1, 1, 1, 100, 9).unwrap();
    let mut m = RunManifest::new("x", "expectation", 4, 0.5, 100, 9);
    (m.k, m.l, m.m) = (Some(1), Some(1), Some(1));
    let row = CsvRow::from_result("expectation", &m, &r);
    let mut buf = Vec::new();
    write_csv(&mut buf, &[row]).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let line = text.lines().nth(1).unwrap();
    assert!(line.starts_with("expectation,,4,0.5,1,1,1,100,9,"), "{line}");
}

proptest! {
    #[test]
    fn wilson_interval_contains_the_estimate(t in 1u64..100_000, frac in 0.0f64..=1.0) {
        let s = ((t as f64) * frac).floor() as u64;
        let (lo, hi) = wilson_interval(s, t);
        let ph = s as f64 / t as f64;
        prop_assert!(0.0 <= lo && lo <= ph && ph <= hi && hi <= 1.0);
    }
}

#[test]
fn oscillation_columns_move_in_opposite_directions() {
    let rows = oscillation_table(0.5, 5..=20).unwrap();
    assert_eq!(rows.len(), 16);
    for w in rows.windows(2) {
        assert!(w[1].first_moment_sum < w[0].first_moment_sum, "i = {}", w[1].i);
        assert!(w[1].diag_expectation > w[0].diag_expectation, "i = {}", w[1].i);
    }
    let last = rows.last().unwrap();
    assert!((last.diag_expectation.to_f64() / last.diag_asymptotic - 1.0).abs() < 0.1);
}
