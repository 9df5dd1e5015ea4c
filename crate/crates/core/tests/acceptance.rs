//! Prints one PASS/FAIL line per acceptance criterion.
//!
//! Some published numbers cannot be reproduced by any correct
//! implementation (misprints, or record cells that are not minima). Those
//! lines print FAIL with what was found; the target itself only fails when
//! a result differs from the pinned, independently checked value.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use abssep::families::*;
use abssep::measure::{measure, MeasureKind, MeasureOptions};
use abssep::perturb::{cancellation_order, common_factor_guard, invert_series, BaseRoot};
use abssep::search::{run_search, SearchConfig, SearchSpec};
use abssep::verify::{self, Check};
use common::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

struct Line {
    name: &'static str,
    pass: bool,
    notes: Vec<String>,
    /// The computed result matches what the tests pin, whatever the line says.
    expected: bool,
}

fn qual(s: &Option<String>) -> f64 {
    s.as_deref().and_then(|q| q.parse().ok()).unwrap_or(f64::NAN)
}

fn records() -> Line {
    let mut notes = Vec::new();
    let mut pass = true;
    let mut expected = true;
    for (d, h) in [(3, 10), (3, 20), (4, 10), (4, 20), (5, 10)] {
        let t = Instant::now();
        let spec = SearchSpec::exhaustive(d, h, &MeasureKind::TABLE);
        let s = run_search(&spec, None, &SearchConfig::default()).expect("search");
        for c in RECORDS.iter().filter(|c| c.degree == d && c.height == h) {
            let Some(r) = s.records.iter().find(|r| r.measure == c.measure) else {
                pass = false;
                expected = false;
                notes.push(format!("d={d} H={h} {}: no record", c.measure));
                continue;
            };
            let value = sig4(&r.value);
            let ok = value == c.value && same_orbit(&r.polynomial, c.poly);
            let cell = format!("d={d} H={h} {:<6}", c.measure.tag());
            if ok {
                notes.push(format!("{cell} ok   {value} {}", r.polynomial));
            } else {
                pass = false;
                let pinned = true_minimum(d, h, c.measure)
                    .is_some_and(|t| t.value == value && same_orbit(t.poly, &r.polynomial));
                expected &= pinned;
                notes.push(format!(
                    "{cell} diff printed {} {}, found {value} {}",
                    c.value, c.poly, r.polynomial
                ));
            }
        }
        notes.push(format!("d={d} H={h} searched in {:.1}s", t.elapsed().as_secs_f64()));
    }
    Line { name: "Record search", pass, notes, expected }
}

fn qualities() -> Line {
    let mut notes = Vec::new();
    let mut pass = true;
    for (p, v, q) in QUALITY_ROWS {
        let r = measure(&poly(p), MeasureKind::AbsSep).expect("measure");
        let value = r.value().to_sci(20);
        let got = r.quality.unwrap_or(f64::NAN);
        let ok = sig4(&value) == v && (got - q).abs() <= 0.01;
        pass &= ok;
        notes.push(format!("{p}: {} quality {got:.3} (want {v}, {q:.2})", sig4(&value)));
    }
    notes.push("4X^5+2X^4-4X^3+3X-2 is printed 1.463e-6; quality 8.03 requires e-5".into());
    Line { name: "Quality spot checks", pass, expected: pass, notes }
}

fn cubic_family() -> Line {
    let params: Vec<BigInt> = [2, 5, 10, 20, 50].iter().map(|&n| BigInt::from(n)).collect();
    let rows = family_quality_table(FamilyName::Deg3Sqrt3, &params, 0, MeasureOptions::default()).expect("rows");
    let heights = ["12", "123", "2340", "1694157", "642934702584732"];
    let values = ["5.093e-3", "2.447e-6", "4.643e-12", "1.690e-23", "8.146e-58"];
    let qualities = [2.12, 2.68, 3.36, 3.66, 3.86];
    let mut pass = true;
    let mut notes = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        let ok = r.height == heights[i] && sig4(&r.abssep) == values[i] && (qual(&r.quality) - qualities[i]).abs() <= 0.01;
        pass &= ok;
        notes.push(format!("n={} height {} abssep {} quality {:.3}", r.param, r.height, sig4(&r.abssep), qual(&r.quality)));
    }
    notes.push("n=10 is printed 4.643e-11; quality 3.36 at height 2340 requires e-12".into());
    Line { name: "Cubic family from sqrt(3)", pass, expected: pass, notes }
}

fn even_families() -> Line {
    let mut pass = true;
    let mut notes = Vec::new();
    let d4 = [10, 20, 50, 100, 500, 1000].map(BigInt::from);
    let d4_want = ["3.716e-5", "4.183e-7", "2.653e-9", "7.175e-11", "2.055e-14", "6.335e-16"];
    let d6 = [2u32, 3, 4, 5].map(|k| num_traits::pow(BigInt::from(10), k as usize));
    let d6_want = ["3.336e-7", "1.373e-14", "1.267e-21", "1.257e-28"];
    for (name, hs, want) in [(FamilyName::Deg4, &d4[..], &d4_want[..]), (FamilyName::Deg6, &d6[..], &d6_want[..])] {
        let rows = family_rows_by_height(name, hs, MeasureOptions::default()).expect("rows");
        for (r, w) in rows.iter().zip(want) {
            let v = sig4(&r.abssep);
            pass &= v == *w;
            notes.push(format!("d={} height {} abssep {v} quality {:.2}", name.degree(), r.param, qual(&r.quality)));
        }
    }
    Line { name: "Degree 4 and 6 families", pass, expected: pass, notes }
}

fn quintic_family() -> Line {
    let hs = [10usize, 20].map(|k| num_traits::pow(BigInt::from(10), k));
    let rows = family_rows_by_height(FamilyName::Deg5B, &hs, MeasureOptions::default()).expect("rows");
    let want = [("7.165", 3.81), ("7.164", 4.91)];
    let mut pass = true;
    let mut notes = Vec::new();
    for (r, (m, q)) in rows.iter().zip(want) {
        let v = sig4(&r.abssep);
        pass &= v.starts_with(m) && (qual(&r.quality) - q).abs() <= 0.01;
        notes.push(format!("height {} abssep {v} quality {:.3}", r.height, qual(&r.quality)));
    }
    notes.push("printed 7.165e-38 / 7.164e-98; the printed qualities 3.81 / 4.91 require e-39 / e-99".into());
    Line { name: "Degree 5 family", pass, expected: pass, notes }
}

fn series_oracle() -> Line {
    let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
    let mut notes = Vec::new();
    let mut pass = true;
    let mut expected = true;
    let (r4, q4) = family_parts(FamilyName::Deg4, 0).expect("deg4");
    let z1 = invert_series(&r4, &q4, &BaseRoot::rational(1), 4).expect("z1");
    let zi = invert_series(&r4, &q4, &BaseRoot::i(), 4).expect("zi");
    let want1 = [q(1, 1), q(-1, 1), q(-2, 1), q(-11, 2), q(-71, 4)];
    let wanti = [(0, 1, 1), (0, -1, 1), (-1, -4, 2), (-4, -11, 2), (-66, -143, 8)];
    let ok1 = (0..5).all(|k| z1.coeff(k) == (want1[k].clone(), BigRational::zero()));
    let oki = (0..5).all(|k| zi.coeff(k) == (q(wanti[k].0, wanti[k].2), q(wanti[k].1, wanti[k].2)));
    pass &= ok1 && oki;
    notes.push(format!("z_1 = {}", z1.render().join(", ")));
    notes.push(format!("z_i = {}", zi.render().join(", ")));

    let one = || BaseRoot::rational(1);
    pass &= order(&mut notes, "deg4", &r4, &q4, one(), BaseRoot::i(), 5);
    let (r6, q6) = family_parts(FamilyName::Deg6, 0).expect("deg6");
    pass &= order(&mut notes, "deg6", &r6, &q6, one(), BaseRoot::quadratic(1, 1), 7);
    pass &= check_other_roots_deg6_ok(&mut notes);
    for qq in [0, 1, -3, 5] {
        let (r, q5) = family_parts(FamilyName::Deg5B, qq).expect("deg5");
        pass &= order(&mut notes, &format!("deg5 q={qq}"), &r, &q5, BaseRoot::quadratic(-9, 36), BaseRoot::quadratic(-11, 36), 6);
    }
    let (ra, qa) = family_parts(FamilyName::Deg5A, 0).expect("deg5a");
    let guarded = common_factor_guard(&ra, &qa);
    pass &= guarded;
    notes.push(format!("deg5 first q-family: common factor with R_5 = {guarded}"));

    let extras = [
        (FamilyName::ExtraDeg4, one(), BaseRoot::quadratic(1, 1), 5),
        (FamilyName::ExtraDeg3A, one(), BaseRoot::i(), 3),
        (FamilyName::ExtraDeg3B, one(), BaseRoot::quadratic(-1, 1), 3),
        (FamilyName::ExtraDeg5A, BaseRoot::quadratic(1, 1), BaseRoot::quadratic(-1, 1), 5),
        (FamilyName::ExtraDeg5B, one(), BaseRoot::quadratic(-1, 1), 5),
    ];
    for (name, a, b, want) in extras {
        let (r, qq) = family_parts(name, 0).expect("extra");
        let ok = order(&mut notes, name.tag(), &r, &qq, a, b, want);
        pass &= ok;
        // the printed degree-3 constant −3 does not cancel; +3 does
        if name == FamilyName::ExtraDeg3B {
            expected &= !ok;
            let fixed = poly("-2X^2+4X-3");
            expected &= order(&mut notes, "extra_deg3b with +3", &r, &fixed, BaseRoot::rational(1), BaseRoot::quadratic(-1, 1), 3);
        } else {
            expected &= ok;
        }
    }
    Line { name: "Series oracle", pass, notes, expected: expected && ok1 && oki }
}

fn order(
    notes: &mut Vec<String>,
    label: &str,
    r: &abssep::IntPolynomial,
    q: &abssep::IntPolynomial,
    a: BaseRoot,
    b: BaseRoot,
    want: usize,
) -> bool {
    let got = cancellation_order(r, q, a, b, r.degree() + 2).expect("system");
    notes.push(format!("{label}: first mismatch at order {got:?}, stated {want}"));
    got == Some(want)
}

fn check_other_roots_deg6_ok(notes: &mut Vec<String>) -> bool {
    let ok = abssep::perturb::check_other_roots_deg6().unwrap_or(false);
    notes.push(format!("deg6 Q fails the system for the other root pair: {ok}"));
    ok
}

fn from_checks(name: &'static str, checks: Vec<Check>) -> Line {
    let pass = checks.iter().all(|c| c.passed);
    let notes = checks
        .iter()
        .map(|c| format!("{} {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail.trim()))
        .collect();
    Line { name, pass, expected: pass, notes }
}

fn properties() -> Line {
    let seed = 20260101;
    from_checks(
        "Property suites",
        vec![
            verify::auxpoly_integrality(200, seed),
            verify::cauchy_bound(1000, seed ^ 1),
            verify::threshold_soundness(3, 10),
            verify::mahler_consistency(3, 10),
            verify::invariance(100, seed ^ 2),
            verify::search_determinism(3, 10),
        ],
    )
}

fn certified_equality() -> Line {
    from_checks("Certified equality", vec![verify::certified_equality(50, 20260104)])
}

fn main() -> ExitCode {
    let criteria: [fn() -> Line; 8] =
        [records, qualities, cubic_family, even_families, quintic_family, series_oracle, properties, certified_equality];
    let mut unexpected = 0;
    for f in criteria {
        let t = Instant::now();
        let line = f();
        println!(
            "{} {} ({:.1}s)",
            if line.pass { "PASS" } else { "FAIL" },
            line.name,
            t.elapsed().as_secs_f64()
        );
        for n in &line.notes {
            println!("    {n}");
        }
        if !line.expected {
            unexpected += 1;
            println!("    ^ differs from the pinned result");
        }
    }
    if unexpected > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
