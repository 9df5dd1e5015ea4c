mod common;

use abssep::measure::{measure, quality, MeasureKind, SeparationReport};
use abssep::Error;
use common::*;

#[test]
fn printed_record_polynomials_have_printed_values() {
    for c in &RECORDS {
        let r = measure(&poly(c.poly), c.measure).unwrap();
        assert_eq!(sig4(&r.report().value), c.value, "{} {}", c.poly, c.measure);
    }
}

#[test]
fn smaller_minima_are_genuine() {
    for c in &TRUE_MINIMA {
        let r = measure(&poly(c.poly), c.measure).unwrap();
        assert_eq!(sig4(&r.report().value), c.value, "{}", c.poly);
        assert!(r.polynomial.height() <= c.height.into());
    }
}

#[test]
fn quality_rows() {
    for (p, v, q) in QUALITY_ROWS {
        let r = measure(&poly(p), MeasureKind::AbsSep).unwrap();
        assert_eq!(sig4(&r.report().value), v, "{p}");
        let got = r.quality.unwrap();
        assert!((got - q).abs() <= 0.01, "{p}: quality {got} vs {q}");
    }
}

#[test]
fn quality_is_log_ratio() {
    let q = quality(&poly("10X^3-3X^2-2X+3"), MeasureKind::AbsSep).unwrap();
    let want = -(5.39355916890282e-4f64).ln() / 10f64.ln();
    assert!((q - want).abs() < 1e-12);
}

#[test]
fn no_qualifying_pair() {
    assert!(matches!(measure(&poly("X^2-1"), MeasureKind::AbsSep), Err(Error::NoQualifyingPair)));
    // a lone conjugate pair
    assert!(matches!(measure(&poly("X^2+1"), MeasureKind::AbsSep), Err(Error::NoQualifyingPair)));
}

#[test]
fn top_two_dominates_abssep() {
    for c in RECORDS.iter().filter(|c| c.measure == MeasureKind::AbsSep) {
        let p = poly(c.poly);
        let a = measure(&p, MeasureKind::AbsSep).unwrap().value_f64();
        let t = measure(&p, MeasureKind::TopTwoAbsGap).unwrap().value_f64();
        assert!(t >= a, "{}", c.poly);
    }
}

#[test]
fn bracket_is_tight_and_report_round_trips() {
    let r = measure(&poly("20X^4+X^3+20"), MeasureKind::ImGap).unwrap();
    assert!(r.decided_nonzero);
    let (lo, hi) = (r.value_lo.to_f64(), r.value_hi.to_f64());
    assert!(lo > 0.0 && (hi - lo) / lo < 1e-20);
    let rep = r.report();
    let json = serde_json::to_string(&rep).unwrap();
    let back: SeparationReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back, rep);
}
