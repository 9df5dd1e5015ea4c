//! Invariant checks over random and exhaustive corpora. The CLI `verify`
//! command runs [`run_all`]; the test suite calls the pieces directly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::auxpoly::{build_aux, cauchy_lower_bound, certified_gap_threshold, AuxKind};
use crate::error::Error;
use crate::families::{family_parts, FamilyName};
use crate::fixed::Dyadic;
use crate::measure::{measure, measure_with, MeasureKind, MeasureOptions, SeparationResult};
use crate::perturb::{
    cancellation_order, check_other_roots_deg6, composition_residual, invert_series, modulus_sq, BaseRoot,
};
use crate::poly::{has_repeated_root, IntPolynomial};
use crate::rootfind::{certified_roots_with, RootOptions};
use crate::search::{enumerate_space, run_search, SearchConfig, SearchSpec};

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.to_string(), passed, detail: detail.into() }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Smaller corpora (seconds instead of minutes).
    pub quick: bool,
    pub jobs: Option<usize>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { seed: 20260101, quick: false, jobs: None }
    }
}

/// Random squarefree polynomials with nonzero constant term and `a_d > 0`.
pub fn random_polys(n: usize, max_degree: usize, max_height: i64, seed: u64) -> Vec<IntPolynomial> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let d = rng.gen_range(2..=max_degree);
        let mut c: Vec<i64> = (0..=d).map(|_| rng.gen_range(-max_height..=max_height)).collect();
        c[d] = rng.gen_range(1..=max_height);
        if c[0] == 0 {
            continue;
        }
        let p = IntPolynomial::from_i64s(&c);
        if !has_repeated_root(&p) {
            out.push(p);
        }
    }
    out
}

/// Every admissible auxiliary polynomial of 200 random inputs is built
/// with coefficients certified integral.
pub fn auxpoly_integrality(n: usize, seed: u64) -> Check {
    let polys = random_polys(n, 5, 30, seed);
    let failures: Vec<String> = polys
        .par_iter()
        .flat_map_iter(|p| {
            AuxKind::ALL
                .iter()
                .filter(|k| p.degree() >= k.min_degree())
                .filter_map(|&k| match build_aux(p, k) {
                    Ok(a) if a.poly.degree() == k.aux_degree(p.degree()) => None,
                    Ok(a) => Some(format!("{p} {k}: degree {}", a.poly.degree())),
                    Err(e) => Some(format!("{p} {k}: {e}")),
                })
                .collect::<Vec<_>>()
        })
        .collect();
    Check::new(
        "auxpoly integrality",
        failures.is_empty(),
        if failures.is_empty() { format!("{n} polynomials, all kinds") } else { failures.join("; ") },
    )
}

/// Every root has modulus at least `1/(1 + H)`.
pub fn cauchy_bound(n: usize, seed: u64) -> Check {
    let polys = random_polys(n, 6, 30, seed);
    let bad: Vec<String> = polys
        .par_iter()
        .filter_map(|p| {
            let bound = cauchy_lower_bound(p).ok()?;
            let roots = certified_roots_with(p, RootOptions { target_bits: 64, ..Default::default() }).ok()?;
            let scale = BigRational::from_integer(BigInt::one() << roots.precision_bits as usize);
            let ok = (0..roots.balls.len()).all(|i| {
                let (lo, _) = roots.modulus_bounds(i);
                BigRational::from_integer(lo) >= &bound * &scale
            });
            (!ok).then(|| p.to_string())
        })
        .collect();
    Check::new("cauchy lower bound", bad.is_empty(), format!("{n} polynomials, {} failures", bad.len()))
}

fn corpus(degree: usize, max_height: u64) -> Vec<IntPolynomial> {
    let spec = SearchSpec::exhaustive(degree, max_height, &[MeasureKind::AbsSep]);
    enumerate_space(&spec).filter(|p| !p.coeff(0).is_zero() && !has_repeated_root(p)).collect()
}

fn measured(p: &IntPolynomial, kind: MeasureKind) -> Option<SeparationResult> {
    match measure(p, kind) {
        Ok(r) => Some(r),
        Err(Error::NoQualifyingPair) => None,
        Err(e) => panic!("{p}: {e}"),
    }
}

/// Every certified minimum gap is at least the explicit threshold of its
/// pair class, over the full exhaustive corpus.
pub fn threshold_soundness(degree: usize, max_height: u64) -> Check {
    let polys = corpus(degree, max_height);
    let bad: Vec<String> = polys
        .par_iter()
        .flat_map_iter(|p| {
            MeasureKind::TABLE
                .iter()
                .filter_map(|&kind| {
                    let r = measured(p, kind)?;
                    let tau = certified_gap_threshold(p, kind, r.witness_class).ok()?;
                    (r.value_hi.to_rational() < tau).then(|| format!("{p} {kind}"))
                })
                .collect::<Vec<_>>()
        })
        .collect();
    Check::new(
        "threshold soundness",
        bad.is_empty(),
        format!("d={degree} H<={max_height}: {} polynomials, {} violations {}", polys.len(), bad.len(), bad.join("; ")),
    )
}

/// `sep(P)·H^{d−1}` over the exhaustive corpus; returns the minimum.
pub fn mahler_minimum(degree: usize, max_height: u64) -> (f64, String) {
    let polys = corpus(degree, max_height);
    polys
        .par_iter()
        .filter_map(|p| {
            let r = measured(p, MeasureKind::Sep)?;
            let h = p.height().to_f64()?;
            Some((r.value_f64() * h.powi(degree as i32 - 1), p.to_string()))
        })
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .unwrap_or((f64::INFINITY, String::new()))
}

pub fn mahler_consistency(degree: usize, max_height: u64) -> Check {
    let (m, p) = mahler_minimum(degree, max_height);
    Check::new("mahler consistency", m > 0.0 && m.is_finite(), format!("min sep*H^(d-1) = {m:.6e} at {p}"))
}

fn close(a: &Dyadic, b: &Dyadic) -> bool {
    let (a, b) = (a.to_rational(), b.to_rational());
    let tol = a.abs().max(b.abs()) / BigRational::from_integer(BigInt::one() << 60usize);
    (a - b).abs() <= tol
}

/// Values are unchanged under `P → cP` and `P(X) → ±P(±X)`.
pub fn invariance(n: usize, seed: u64) -> Check {
    let polys = random_polys(n, 5, 20, seed);
    let bad: Vec<String> = polys
        .par_iter()
        .flat_map_iter(|p| {
            let images = [p.scale(&BigInt::from(-7)), p.reflect(), -p];
            MeasureKind::ALL
                .iter()
                .filter_map(|&kind| {
                    let base = measure(p, kind).ok();
                    let differs = images.iter().any(|q| {
                        let other = measure(q, kind).ok();
                        match (&base, &other) {
                            (Some(a), Some(b)) => !close(&a.value(), &b.value()),
                            (None, None) => false,
                            _ => true,
                        }
                    });
                    differs.then(|| format!("{p} {kind}"))
                })
                .collect::<Vec<_>>()
        })
        .collect();
    Check::new("scale and reflection invariance", bad.is_empty(), format!("{n} polynomials {}", bad.join("; ")))
}

/// Record lists for one worker and for eight workers agree byte for byte.
pub fn search_determinism(degree: usize, max_height: u64) -> Check {
    let spec = SearchSpec::exhaustive(degree, max_height, &MeasureKind::TABLE);
    let run = |jobs| {
        let cfg = SearchConfig { jobs: Some(jobs), ..Default::default() };
        run_search(&spec, None, &cfg).map(|s| {
            s.records.iter().map(|r| serde_json::to_string(r).expect("record")).collect::<Vec<_>>().join("\n")
        })
    };
    match (run(1), run(8)) {
        (Ok(a), Ok(b)) => Check::new(
            "search determinism",
            a == b,
            format!("d={degree} H<={max_height}, {} record bytes", a.len()),
        ),
        (a, b) => Check::new("search determinism", false, format!("{:?} / {:?}", a.err(), b.err())),
    }
}

/// `(X² + aX + r²)(X² + bX + r²)(X + c)` with both quadratics complex and
/// `|c| ≠ r`: four roots of modulus `r`, abssep is `||c| − r|`.
pub fn equal_modulus_corpus(n: usize, seed: u64) -> Vec<(IntPolynomial, i64, i64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < n {
        let r: i64 = rng.gen_range(1..=6);
        let a = rng.gen_range(-2 * r + 1..2 * r);
        let b = rng.gen_range(-2 * r + 1..2 * r);
        let c: i64 = rng.gen_range(-9..=9);
        if a == b || c.abs() == r || c == 0 {
            continue;
        }
        let f = |s: i64| IntPolynomial::from_descending(&[1, s, r * r]);
        let p = &(&f(a) * &f(b)) * &IntPolynomial::from_descending(&[1, c]);
        out.push((p, r, c));
    }
    out
}

/// Equal moduli are certified and never show up as a tiny gap.
pub fn certified_equality(n: usize, seed: u64) -> Check {
    let corpus = equal_modulus_corpus(n, seed);
    let bad: Vec<String> = corpus
        .par_iter()
        .filter_map(|(p, r, c)| {
            let res = measure_with(p, MeasureKind::AbsSep, MeasureOptions::default()).ok()?;
            let want = (c.abs() - r).abs() as f64;
            let ok = res.equal_pairs.len() >= 4 && (res.value_f64() - want).abs() < 1e-12 * want;
            (!ok).then(|| format!("{p}: {} equal pairs, value {}", res.equal_pairs.len(), res.value_f64()))
        })
        .collect();
    Check::new(
        "certified equality",
        bad.is_empty() && corpus.len() == n,
        format!("{n} constructed polynomials {}", bad.join("; ")),
    )
}

/// Exact series identities for the degree-4 and degree-6 families.
pub fn series_identities() -> Check {
    let mut notes = Vec::new();
    let mut ok = true;
    let (r4, q4) = family_parts(FamilyName::Deg4, 0).expect("deg4");
    for base in [BaseRoot::rational(1), BaseRoot::i()] {
        match invert_series(&r4, &q4, &base, 5) {
            Ok(s) => {
                ok &= composition_residual(&r4, &q4, &s).is_none();
                ok &= modulus_sq(&s).is_ok();
            }
            Err(e) => {
                ok = false;
                notes.push(e.to_string());
            }
        }
    }
    let d4 = cancellation_order(&r4, &q4, BaseRoot::rational(1), BaseRoot::i(), 6);
    ok &= matches!(d4, Ok(Some(5)));
    let (r6, q6) = family_parts(FamilyName::Deg6, 0).expect("deg6");
    let d6 = cancellation_order(&r6, &q6, BaseRoot::rational(1), BaseRoot::quadratic(1, 1), 8);
    ok &= matches!(d6, Ok(Some(7)));
    ok &= matches!(check_other_roots_deg6(), Ok(true));
    notes.push(format!("deg4 order {d4:?}, deg6 order {d6:?}"));
    Check::new("series identities", ok, notes.join("; "))
}

/// All checks, in a fixed order.
pub fn run_all(opts: VerifyOptions) -> Vec<Check> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(opts.jobs.unwrap_or(0)).build();
    let body = || {
        let (n_aux, n_cauchy, n_inv, h) = if opts.quick { (40, 200, 20, 5) } else { (200, 1000, 100, 10) };
        vec![
            auxpoly_integrality(n_aux, opts.seed),
            cauchy_bound(n_cauchy, opts.seed ^ 1),
            threshold_soundness(3, h),
            mahler_consistency(3, h),
            invariance(n_inv, opts.seed ^ 2),
            search_determinism(3, if opts.quick { 4 } else { 8 }),
            certified_equality(50, opts.seed ^ 3),
            series_identities(),
        ]
    };
    match pool {
        Ok(p) => p.install(body),
        Err(_) => body(),
    }
}
