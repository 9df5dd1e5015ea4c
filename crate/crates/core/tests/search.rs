mod common;

use std::collections::HashSet;
use std::fs;

use abssep::measure::{measure, MeasureKind};
use abssep::search::{
    enumerate_space, load_records, run_search, save_records, RecordStore, SearchConfig, SearchMode, SearchRecord,
    SearchSpec,
};
use abssep::{canonicalize, Error, IntPolynomial};
use common::*;
use num_integer::Integer;
use rayon::prelude::*;

fn raw_tuples(d: usize, h: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for i in 0..=d {
        let range: Vec<i64> = if i == d { (-h..=h).filter(|&c| c != 0).collect() } else { (-h..=h).collect() };
        out = out.into_iter().flat_map(|t| range.iter().map(move |&c| [t.clone(), vec![c]].concat())).collect();
    }
    out
}

fn primitive(c: &[i64]) -> bool {
    c.iter().fold(0i64, |g, &x| g.gcd(&x)) == 1
}

fn cfg(jobs: usize) -> SearchConfig {
    SearchConfig { jobs: Some(jobs), ..Default::default() }
}

#[test]
fn orbit_count_matches_brute_force() {
    let raw = raw_tuples(3, 10);
    assert_eq!(raw.len(), 20 * 21 * 21 * 21);
    let orbits: HashSet<IntPolynomial> = raw
        .par_iter()
        .filter(|c| primitive(c))
        .map(|c| canonicalize(&IntPolynomial::from_i64s(c)).unwrap())
        .collect();
    let spec = SearchSpec::exhaustive(3, 10, &[MeasureKind::AbsSep]);
    let listed: Vec<IntPolynomial> = enumerate_space(&spec).collect();
    let unique: HashSet<&IntPolynomial> = listed.iter().collect();
    assert_eq!(unique.len(), listed.len());
    assert_eq!(listed.len(), orbits.len());
    assert!(listed.iter().all(|p| orbits.contains(p)));
    assert!(listed.len() < raw.len());
}

#[test]
fn small_spaces() {
    let spec = SearchSpec::exhaustive(1, 1, &[MeasureKind::Sep]);
    let reps: Vec<IntPolynomial> = enumerate_space(&spec).collect();
    assert_eq!(reps.len(), 2);
    let plus = canonicalize(&poly("X+1")).unwrap();
    assert_eq!(plus, canonicalize(&poly("X-1")).unwrap());
    assert!(reps.contains(&plus) && reps.contains(&poly("X")));

    let spec = SearchSpec::exhaustive(2, 2, &[MeasureKind::Sep]);
    for p in enumerate_space(&spec) {
        assert!(p.is_primitive() && p.leading() > 0.into(), "{p}");
    }
}

#[test]
fn records_for_cubics_height_ten() {
    let spec = SearchSpec::exhaustive(3, 10, &MeasureKind::TABLE);
    let s = run_search(&spec, None, &cfg(2)).unwrap();
    assert!(s.complete);
    for c in RECORDS.iter().filter(|c| c.degree == 3 && c.height == 10) {
        let r = s.records.iter().find(|r| r.measure == c.measure).unwrap();
        assert_eq!(sig4(&r.value), c.value, "{}", c.measure);
        assert!(same_orbit(&r.polynomial, c.poly), "{} vs {}", r.polynomial, c.poly);
    }
}

#[test]
fn spec_examples() {
    let spec = SearchSpec::exhaustive(4, 10, &[MeasureKind::ReGap]);
    let s = run_search(&spec, None, &cfg(2)).unwrap();
    assert_eq!(sig4(&s.records[0].value), "1.472e-6");
    assert!(same_orbit(&s.records[0].polynomial, "9X^4+5X^3-X^2+5X-1"));

    let spec = SearchSpec::exhaustive(3, 20, &[MeasureKind::Sep]);
    let s = run_search(&spec, None, &cfg(2)).unwrap();
    assert_eq!(sig4(&s.records[0].value), "4.938e-3");
    assert!(same_orbit(&s.records[0].polynomial, "14X^3+17X^2-13X+2"));
}

/// Naive oracle: every raw tuple, no symmetry reduction, no prefilter.
#[test]
fn abssep_record_is_minimal_over_raw_tuples() {
    let spec = SearchSpec::exhaustive(3, 10, &[MeasureKind::AbsSep]);
    let s = run_search(&spec, None, &cfg(2)).unwrap();
    let record = s.records[0].value.parse::<f64>().unwrap();
    let best = raw_tuples(3, 10)
        .par_iter()
        .filter_map(|c| measure(&IntPolynomial::from_i64s(c), MeasureKind::AbsSep).ok())
        .map(|r| r.value_f64())
        .reduce(|| f64::INFINITY, f64::min);
    assert_eq!(best, record);
}

#[test]
fn worker_count_does_not_change_records() {
    let mut spec = SearchSpec::exhaustive(3, 8, &MeasureKind::TABLE);
    spec.top_k = 3;
    spec.min_quality = Some(2.5);
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for jobs in [1, 8] {
        let path = dir.path().join(format!("r{jobs}.jsonl"));
        let store = RecordStore::open(&path).unwrap();
        run_search(&spec, Some(&store), &cfg(jobs)).unwrap();
        files.push(fs::read(&path).unwrap());
    }
    assert!(!files[0].is_empty());
    assert_eq!(files[0], files[1]);
}

#[test]
fn interrupted_run_resumes_to_the_same_records() {
    let spec = SearchSpec::exhaustive(3, 9, &MeasureKind::TABLE);
    let full = run_search(&spec, None, &cfg(2)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let cp = dir.path().join("cp.json");
    let mut c = cfg(2);
    c.checkpoint = Some(cp.clone());
    c.max_slices = Some(4);
    let part = run_search(&spec, None, &c).unwrap();
    assert!(!part.complete && part.slices_done == 4);
    c.max_slices = None;
    let rest = run_search(&spec, None, &c).unwrap();
    assert!(rest.complete);
    assert_eq!(rest.records, full.records);

    let other = SearchSpec::exhaustive(3, 8, &MeasureKind::TABLE);
    assert!(matches!(run_search(&other, None, &c), Err(Error::CheckpointMismatch)));
}

#[test]
fn quality_list_keeps_everything_above_threshold() {
    let mut spec = SearchSpec::exhaustive(3, 6, &[MeasureKind::AbsSep]);
    spec.min_quality = Some(3.0);
    let s = run_search(&spec, None, &cfg(2)).unwrap();
    let good: Vec<&SearchRecord> = s.records.iter().filter(|r| r.quality.as_deref().unwrap().parse::<f64>().unwrap() >= 3.0).collect();
    assert!(!good.is_empty());
    // the oracle: measure every orbit directly
    let want = enumerate_space(&spec)
        .filter_map(|p| measure(&p, MeasureKind::AbsSep).ok())
        .filter(|r| r.quality.is_some_and(|q| q >= 3.0))
        .count();
    assert_eq!(good.len(), want);
}

#[test]
fn random_mode_is_reproducible() {
    let mut spec = SearchSpec::exhaustive(4, 30, &[MeasureKind::AbsSep]);
    spec.mode = SearchMode::Random { seed: 7, count: 5000 };
    let a = run_search(&spec, None, &cfg(1)).unwrap();
    let b = run_search(&spec, None, &cfg(4)).unwrap();
    assert_eq!(a.records, b.records);
    assert_eq!(a.enumerated, 5000);
    let r = &a.records[0];
    let p = r.poly().unwrap();
    assert!(p.is_primitive() && p.height() <= 30.into());
    assert_eq!(canonicalize(&p).unwrap(), p);
}

fn sample_records() -> Vec<SearchRecord> {
    let spec = SearchSpec::exhaustive(3, 5, &[MeasureKind::Sep, MeasureKind::AbsSep, MeasureKind::ImGap]);
    run_search(&spec, None, &cfg(1)).unwrap().records
}

#[test]
fn store_round_trip() {
    let recs = sample_records();
    assert_eq!(recs.len(), 3);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.jsonl");
    save_records(&recs, &path).unwrap();
    let back = load_records(&path).unwrap();
    assert_eq!(back.records, recs);
    assert_eq!(back.warnings, 0);

    let empty = dir.path().join("empty.jsonl");
    fs::write(&empty, "").unwrap();
    assert!(load_records(&empty).unwrap().records.is_empty());
}

#[test]
fn malformed_final_line_is_dropped() {
    let recs = sample_records();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.jsonl");
    save_records(&recs, &path).unwrap();
    let mut text = fs::read_to_string(&path).unwrap();
    text.push_str("{\"v\":1,\"polynomial\":\"X^3-");
    fs::write(&path, &text).unwrap();
    let loaded = load_records(&path).unwrap();
    assert_eq!(loaded.records, recs);
    assert_eq!(loaded.warnings, 1);
    // opening the store repairs the file
    RecordStore::open(&path).unwrap();
    assert_eq!(load_records(&path).unwrap().warnings, 0);
}

#[test]
fn schema_version_is_checked() {
    let recs = sample_records();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.jsonl");
    let line = serde_json::to_string(&recs[0]).unwrap().replace("\"v\":1", "\"v\":9");
    fs::write(&path, format!("{line}\n{}\n", serde_json::to_string(&recs[1]).unwrap())).unwrap();
    assert!(matches!(load_records(&path), Err(Error::Schema { found: 9, expected: 1 })));
}
