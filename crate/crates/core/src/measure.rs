//! The separation measures, with certified zero/nonzero decisions.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::auxpoly::{aux_height_bound, build_aux_from, threshold_with, Side};
use crate::error::{Error, Result};
use crate::fixed::{isqrt_ceil, isqrt_floor, pow2, Dyadic};
use crate::poly::{has_repeated_root, reciprocal, squarefree_part, IntPolynomial};
use crate::rootfind::{RootSet, RootSolver, DEFAULT_PRECISION_CEILING};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MeasureKind {
    #[serde(rename = "sep")]
    Sep,
    #[serde(rename = "abssep")]
    AbsSep,
    #[serde(rename = "re_gap")]
    ReGap,
    #[serde(rename = "im_gap")]
    ImGap,
    #[serde(rename = "top_two_abs_gap")]
    TopTwoAbsGap,
}

impl MeasureKind {
    pub const ALL: [MeasureKind; 5] = [
        MeasureKind::Sep,
        MeasureKind::AbsSep,
        MeasureKind::ReGap,
        MeasureKind::ImGap,
        MeasureKind::TopTwoAbsGap,
    ];

    /// The four measures of the record tables.
    pub const TABLE: [MeasureKind; 4] =
        [MeasureKind::Sep, MeasureKind::AbsSep, MeasureKind::ReGap, MeasureKind::ImGap];

    pub fn tag(self) -> &'static str {
        match self {
            MeasureKind::Sep => "sep",
            MeasureKind::AbsSep => "abssep",
            MeasureKind::ReGap => "re_gap",
            MeasureKind::ImGap => "im_gap",
            MeasureKind::TopTwoAbsGap => "top_two_abs_gap",
        }
    }

    /// Formula used in table headers.
    pub fn symbol(self) -> &'static str {
        match self {
            MeasureKind::Sep => "|a-b|",
            MeasureKind::AbsSep => "||a|-|b||",
            MeasureKind::ReGap => "|Re a-Re b|",
            MeasureKind::ImGap => "|Im a-Im b|",
            MeasureKind::TopTwoAbsGap => "top two |a|",
        }
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for MeasureKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        MeasureKind::ALL
            .into_iter()
            .find(|k| k.tag() == s)
            .ok_or_else(|| Error::Parse(format!("unknown measure {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PairClass {
    #[serde(rename = "real-real")]
    RealReal,
    #[serde(rename = "real-complex")]
    RealComplex,
    #[serde(rename = "complex-complex")]
    ComplexComplex,
}

impl PairClass {
    pub fn of(a_real: bool, b_real: bool) -> PairClass {
        match (a_real, b_real) {
            (true, true) => PairClass::RealReal,
            (false, false) => PairClass::ComplexComplex,
            _ => PairClass::RealComplex,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            PairClass::RealReal => "real-real",
            PairClass::RealComplex => "real-complex",
            PairClass::ComplexComplex => "complex-complex",
        }
    }
}

impl fmt::Display for PairClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for PairClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        [PairClass::RealReal, PairClass::RealComplex, PairClass::ComplexComplex]
            .into_iter()
            .find(|k| k.tag() == s)
            .ok_or_else(|| Error::Parse(format!("unknown pair class {s:?}")))
    }
}

/// Certified minimum of a measure over the roots of one polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparationResult {
    pub measure: MeasureKind,
    pub polynomial: IntPolynomial,
    pub height: BigInt,
    pub value_lo: Dyadic,
    pub value_hi: Dyadic,
    /// Indices into the certified root set.
    pub witness: (usize, usize),
    pub witness_class: PairClass,
    pub quality: Option<f64>,
    pub decided_nonzero: bool,
    pub precision_bits: u32,
    /// Pairs certified to have an exactly zero gap.
    pub equal_pairs: Vec<(usize, usize)>,
}

impl SeparationResult {
    pub fn value(&self) -> Dyadic {
        Dyadic::midpoint(&self.value_lo, &self.value_hi)
    }

    pub fn value_f64(&self) -> f64 {
        self.value().to_f64()
    }

    /// Serializable view with decimal strings.
    pub fn report(&self) -> SeparationReport {
        SeparationReport {
            polynomial: self.polynomial.to_string(),
            measure: self.measure,
            height: self.height.to_string(),
            value: self.value().to_sci(20),
            value_lo: self.value_lo.to_sci(20),
            value_hi: self.value_hi.to_sci(20),
            witness: [self.witness.0, self.witness.1],
            witness_class: self.witness_class,
            quality: self.quality.map(|q| format!("{q:.6}")),
            decided_nonzero: self.decided_nonzero,
            precision_bits: self.precision_bits,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub polynomial: String,
    pub measure: MeasureKind,
    pub height: String,
    pub value: String,
    pub value_lo: String,
    pub value_hi: String,
    pub witness: [usize; 2],
    pub witness_class: PairClass,
    pub quality: Option<String>,
    pub decided_nonzero: bool,
    pub precision_bits: u32,
}

#[derive(Clone, Copy, Debug)]
pub struct MeasureOptions {
    pub ceiling_bits: u32,
    /// Work on `P / gcd(P, P')` instead of refusing repeated roots.
    pub squarefree_part: bool,
    /// Relative width the final enclosure must reach.
    pub rel_bits: u32,
}

impl Default for MeasureOptions {
    fn default() -> Self {
        MeasureOptions { ceiling_bits: DEFAULT_PRECISION_CEILING, squarefree_part: false, rel_bits: 80 }
    }
}

pub fn measure(p: &IntPolynomial, kind: MeasureKind) -> Result<SeparationResult> {
    Measurer::new(p, MeasureOptions::default())?.measure(kind)
}

pub fn measure_with(p: &IntPolynomial, kind: MeasureKind, opts: MeasureOptions) -> Result<SeparationResult> {
    Measurer::new(p, opts)?.measure(kind)
}

/// `−ln(value)/ln(height)` for the measured value.
pub fn quality(p: &IntPolynomial, kind: MeasureKind) -> Result<f64> {
    measure(p, kind)?.quality.ok_or(Error::QualityUndefined)
}

pub fn quality_of(value: &Dyadic, height: &BigInt) -> Option<f64> {
    if height <= &BigInt::from(1) {
        return None;
    }
    let lh = height_ln(height);
    Some(-value.ln() / lh)
}

fn height_ln(h: &BigInt) -> f64 {
    crate::fixed::ln_scaled(h, 0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Status {
    Nonzero,
    Equal,
    Open,
}

/// Measures of one polynomial sharing a root solver and thresholds.
pub struct Measurer {
    poly: IntPolynomial,
    height: BigInt,
    solver: RootSolver,
    opts: MeasureOptions,
    tau: HashMap<(MeasureKind, PairClass), BigRational>,
    exact_tau: HashMap<(MeasureKind, PairClass), BigRational>,
}

struct Pair {
    i: usize,
    j: usize,
    class: PairClass,
    lo: BigInt,
    hi: BigInt,
    /// Sign of `|α_i| − |α_j|` when known (top-two only).
    sign: i8,
    status: Status,
}

impl Measurer {
    pub fn new(p: &IntPolynomial, opts: MeasureOptions) -> Result<Self> {
        if p.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if p.degree() < 2 {
            return Err(Error::DegreeTooSmall { degree: p.degree(), what: "separation".into() });
        }
        let work = if has_repeated_root(p) {
            if !opts.squarefree_part {
                return Err(Error::RepeatedRoot);
            }
            let s = squarefree_part(p);
            if s.degree() < 2 {
                return Err(Error::NoQualifyingPair);
            }
            s
        } else {
            p.clone()
        };
        Ok(Measurer {
            height: p.height(),
            solver: RootSolver::new_squarefree(&work, opts.ceiling_bits),
            poly: p.clone(),
            opts,
            tau: HashMap::new(),
            exact_tau: HashMap::new(),
        })
    }

    /// Certified roots at the current working precision.
    pub fn roots(&mut self) -> Result<RootSet> {
        self.solver.at_least(64)
    }

    pub fn measure(&mut self, kind: MeasureKind) -> Result<SeparationResult> {
        // the relative-width target needs about rel_bits + 32 bits anyway
        let mut prec = (self.opts.rel_bits + 32).next_power_of_two().clamp(64, self.opts.ceiling_bits.max(64));
        let mut used_exact = false;
        loop {
            let rs = self.solver.at_least(prec)?;
            let p = rs.precision_bits;
            let mut pairs = pair_enclosures(&rs, kind);
            if pairs.is_empty() {
                return Err(Error::NoQualifyingPair);
            }
            for pair in pairs.iter_mut().filter(|x| x.status == Status::Open) {
                let tau = self.bound_tau(kind, pair.class, &rs)?;
                if below_quarter(&pair.hi, p, &tau) {
                    pair.status = Status::Equal;
                } else if let Some(t) = self.exact_tau.get(&(kind, pair.class)) {
                    if below_quarter(&pair.hi, p, t) {
                        pair.status = Status::Equal;
                    }
                }
            }
            let open = pairs.iter().any(|x| x.status == Status::Open);
            let at_ceiling = p >= self.opts.ceiling_bits;
            if !open {
                if let Some(res) = self.finish(kind, &rs, &pairs, at_ceiling)? {
                    return Ok(res);
                }
            } else if at_ceiling {
                if used_exact {
                    return Err(Error::PrecisionCeiling(self.opts.ceiling_bits));
                }
                // last resort: thresholds from the exact auxiliary heights
                used_exact = true;
                let classes: Vec<PairClass> = pairs
                    .iter()
                    .filter(|x| x.status == Status::Open)
                    .map(|x| x.class)
                    .collect();
                for c in classes {
                    self.exact_threshold(kind, c)?;
                }
                continue;
            }
            prec = p * 2;
            if prec > self.opts.ceiling_bits {
                prec = self.opts.ceiling_bits;
            }
        }
    }

    fn finish(
        &self,
        kind: MeasureKind,
        rs: &RootSet,
        pairs: &[Pair],
        at_ceiling: bool,
    ) -> Result<Option<SeparationResult>> {
        let p = rs.precision_bits;
        let candidates: Vec<&Pair> = if kind == MeasureKind::TopTwoAbsGap {
            top_two_candidates(rs.balls.len(), pairs)
        } else {
            pairs.iter().filter(|x| x.status == Status::Nonzero).collect()
        };
        if candidates.is_empty() {
            return Err(Error::NoQualifyingPair);
        }
        let lo = candidates.iter().map(|x| x.lo.clone()).min().unwrap();
        let best = candidates.iter().min_by(|a, b| a.hi.cmp(&b.hi).then(a.lo.cmp(&b.lo))).unwrap();
        let hi = best.hi.clone();
        if !at_ceiling && ((&hi - &lo) << self.opts.rel_bits) > hi {
            return Ok(None);
        }
        let value_lo = Dyadic::new(lo, p);
        let value_hi = Dyadic::new(hi, p);
        let mid = Dyadic::midpoint(&value_lo, &value_hi);
        let quality = quality_of(&mid, &self.height);
        let equal_pairs = pairs
            .iter()
            .filter(|x| x.status == Status::Equal)
            .map(|x| (x.i, x.j))
            .collect();
        Ok(Some(SeparationResult {
            measure: kind,
            polynomial: self.poly.clone(),
            height: self.height.clone(),
            value_lo,
            value_hi,
            witness: (best.i, best.j),
            witness_class: best.class,
            quality,
            decided_nonzero: true,
            precision_bits: p,
            equal_pairs,
        }))
    }

    fn bound_tau(&mut self, kind: MeasureKind, class: PairClass, rs: &RootSet) -> Result<BigRational> {
        let key = (threshold_measure(kind), class);
        if let Some(t) = self.tau.get(&key) {
            return Ok(t.clone());
        }
        let t = bound_threshold(self.solver.poly(), key.0, class, rs)?;
        self.tau.insert(key, t.clone());
        Ok(t)
    }

    fn exact_threshold(&mut self, kind: MeasureKind, class: PairClass) -> Result<BigRational> {
        let key = (kind, class);
        if let Some(t) = self.exact_tau.get(&key) {
            return Ok(t.clone());
        }
        let poly = self.solver.poly().clone();
        let rec = reciprocal(&poly.strip_zero_roots())?;
        let ceiling = self.opts.ceiling_bits;
        let mut rec_solver: Option<RootSolver> = None;
        let solver = &mut self.solver;
        let t = threshold_with(threshold_measure(kind), class, poly.degree(), |k, side| match side {
            Side::Direct => Ok(Some(build_aux_from(solver, k)?.height)),
            Side::Reciprocal => {
                if rec.degree() < k.min_degree() {
                    return Ok(None);
                }
                let s = rec_solver.get_or_insert_with(|| RootSolver::new_squarefree(&rec, ceiling));
                Ok(Some(build_aux_from(s, k)?.height))
            }
        })?;
        self.exact_tau.insert(key, t.clone());
        Ok(t)
    }
}

fn threshold_measure(kind: MeasureKind) -> MeasureKind {
    if kind == MeasureKind::TopTwoAbsGap {
        MeasureKind::AbsSep
    } else {
        kind
    }
}

/// `hi < τ/4` with `hi` at scale `p`.
fn below_quarter(hi: &BigInt, p: u32, tau: &BigRational) -> bool {
    (hi * tau.denom()) * 4u32 < tau.numer() * pow2(p)
}

/// Threshold from height bounds computed out of the current root balls,
/// without building the auxiliary polynomials.
pub(crate) fn bound_threshold(
    poly: &IntPolynomial,
    measure: MeasureKind,
    class: PairClass,
    rs: &RootSet,
) -> Result<BigRational> {
    let d = poly.degree();
    let p = rs.precision_bits;
    let u: Vec<BigInt> = (0..d).map(|i| rs.modulus_bounds(i).1).collect();
    let z = poly.zero_root_multiplicity();
    let nonzero: Vec<usize> = if z == 0 {
        (0..d).collect()
    } else {
        // the ball with the smallest modulus holds the (simple) zero root
        let zi = (0..d).min_by_key(|&i| rs.modulus_bounds(i).1).unwrap();
        (0..d).filter(|&i| i != zi).collect()
    };
    let stripped = poly.strip_zero_roots();
    let rec_lead = stripped.coeff(0);
    let cauchy_rec = (&stripped.height() / rec_lead.abs() + 1u32) << p;
    let one2 = pow2(2 * p);
    let u_rec: Vec<BigInt> = nonzero
        .iter()
        .map(|&i| {
            let lo = rs.modulus_bounds(i).0;
            if lo.is_positive() {
                crate::fixed::div_ceil(&one2, &lo).min(cauchy_rec.clone())
            } else {
                cauchy_rec.clone()
            }
        })
        .collect();
    let lead = poly.leading();
    threshold_with(measure, class, d, |kind, side| match side {
        Side::Direct => Ok(Some(aux_height_bound(kind, &lead, &u, p))),
        Side::Reciprocal => {
            if u_rec.len() < kind.min_degree() {
                return Ok(None);
            }
            Ok(Some(aux_height_bound(kind, &rec_lead, &u_rec, p)))
        }
    })
}

fn interval(c: &BigInt, r: &BigInt) -> (BigInt, BigInt) {
    (c - r, c + r)
}

/// Enclosure of `|x − y|` for intervals `x`, `y`; returns `(lo, hi, sign)`.
fn abs_diff(x: &(BigInt, BigInt), y: &(BigInt, BigInt)) -> (BigInt, BigInt, i8) {
    let lo = &x.0 - &y.1;
    let hi = &x.1 - &y.0;
    if lo.is_positive() {
        (lo, hi, 1)
    } else if hi.is_negative() {
        (-hi, -lo, -1)
    } else {
        let m = (-lo).max(hi);
        (BigInt::zero(), m, 0)
    }
}

fn pair_enclosures(rs: &RootSet, kind: MeasureKind) -> Vec<Pair> {
    let d = rs.balls.len();
    let b = &rs.balls;
    let mut out = Vec::new();
    for i in 0..d {
        for j in i + 1..d {
            let conj = b[i].kind == crate::rootfind::RootKind::Conjugate(j);
            let (ri, rj) = (b[i].is_real(), b[j].is_real());
            let skip = match kind {
                MeasureKind::Sep => false,
                MeasureKind::AbsSep | MeasureKind::ReGap | MeasureKind::TopTwoAbsGap => conj,
                MeasureKind::ImGap => ri && rj,
            };
            if skip {
                continue;
            }
            let class = PairClass::of(ri, rj);
            let (lo, hi, sign) = match kind {
                MeasureKind::Sep => {
                    let n = b[i].center.sub(&b[j].center).norm_sq();
                    let r = &b[i].radius + &b[j].radius;
                    let lo = (isqrt_floor(&n) - &r).max(BigInt::zero());
                    (lo, isqrt_ceil(&n) + r, 0)
                }
                MeasureKind::AbsSep | MeasureKind::TopTwoAbsGap => {
                    abs_diff(&rs.modulus_bounds(i), &rs.modulus_bounds(j))
                }
                MeasureKind::ReGap => abs_diff(
                    &interval(&b[i].center.re, &b[i].radius),
                    &interval(&b[j].center.re, &b[j].radius),
                ),
                MeasureKind::ImGap => {
                    let im = |k: usize| {
                        if b[k].is_real() {
                            (BigInt::zero(), BigInt::zero())
                        } else {
                            interval(&b[k].center.im, &b[k].radius)
                        }
                    };
                    abs_diff(&im(i), &im(j))
                }
            };
            let status = if lo.is_positive() { Status::Nonzero } else { Status::Open };
            out.push(Pair { i, j, class, lo, hi, sign, status });
        }
    }
    out
}

/// Pairs `(top, β)` with `top` of maximal modulus and `|β|` certified smaller.
/// Requires every pair to be decided.
fn top_two_candidates(d: usize, pairs: &[Pair]) -> Vec<&Pair> {
    // larger[i][j]: |α_i| > |α_j| certified
    let mut larger = vec![vec![false; d]; d];
    for x in pairs.iter().filter(|x| x.status == Status::Nonzero) {
        if x.sign > 0 {
            larger[x.i][x.j] = true;
        } else if x.sign < 0 {
            larger[x.j][x.i] = true;
        }
    }
    let Some(top) = (0..d).find(|&m| (0..d).all(|k| !larger[k][m])) else {
        return Vec::new();
    };
    let smaller: Vec<usize> = (0..d).filter(|&k| larger[top][k]).collect();
    if smaller.is_empty() {
        return Vec::new();
    }
    // the next distinct modulus: roots not dominated by another smaller root
    let next: Vec<usize> = smaller
        .iter()
        .copied()
        .filter(|&k| smaller.iter().all(|&l| !larger[l][k]))
        .collect();
    pairs
        .iter()
        .filter(|x| {
            x.status == Status::Nonzero
                && ((x.i == top && next.contains(&x.j)) || (x.j == top && next.contains(&x.i)))
        })
        .collect()
}

/// Measured value as `f64` for quick comparisons.
pub fn value_f64(r: &SeparationResult) -> f64 {
    r.value().to_f64()
}

/// Convenience: value rounded to `digits` significant digits.
pub fn value_sci(r: &SeparationResult, digits: usize) -> String {
    r.value().to_sci(digits)
}

/// The quality as a rounded decimal string (two places), matching the tables.
pub fn quality_2dp(r: &SeparationResult) -> Option<String> {
    r.quality.map(|q| format!("{:.2}", q))
}

/// Numeric height of `P` as `f64` (may be infinite).
pub fn height_f64(p: &IntPolynomial) -> f64 {
    p.height().to_f64().unwrap_or(f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    fn m(s: &str, k: MeasureKind) -> SeparationResult {
        measure(&parse_poly(s).unwrap(), k).unwrap()
    }

    #[test]
    fn table_values() {
        assert_eq!(m("10X^3-3X^2-2X+3", MeasureKind::AbsSep).value().to_sci(4), "5.394e-4");
        assert_eq!(m("5X^3+8X^2-9X+2", MeasureKind::Sep).value().to_sci(4), "1.421e-2");
        assert_eq!(m("20X^4+X^3+20", MeasureKind::ImGap).value().to_sci(4), "7.813e-6");
        assert_eq!(m("9X^4+5X^3-X^2+5X-1", MeasureKind::ReGap).value().to_sci(4), "1.472e-6");
    }

    #[test]
    fn no_pair_for_opposite_roots() {
        assert!(matches!(
            measure(&parse_poly("X^2-1").unwrap(), MeasureKind::AbsSep),
            Err(Error::NoQualifyingPair)
        ));
    }

    #[test]
    fn qualities() {
        let q = quality(&parse_poly("2X^3+X^2-X-1").unwrap(), MeasureKind::AbsSep).unwrap();
        assert!((q - 4.24).abs() < 0.01, "{q}");
        let q = quality(&parse_poly("X^4-X^2-2X-3").unwrap(), MeasureKind::AbsSep).unwrap();
        assert!((q - 6.42).abs() < 0.01, "{q}");
    }

    #[test]
    fn equal_moduli_are_certified() {
        // (X^2+X+4)(X-2)(X+3): |roots of first factor| = 2 = |2|
        let r = m("X^4+2X^3-X^2-2X-24", MeasureKind::AbsSep);
        assert!(!r.equal_pairs.is_empty());
        assert!(r.value_f64() > 0.5);
    }

    #[test]
    fn top_two_at_least_abssep() {
        let p = "X^4-6X^3-7X^2+5X+6";
        let a = m(p, MeasureKind::AbsSep).value_f64();
        let t = m(p, MeasureKind::TopTwoAbsGap).value_f64();
        assert!(t >= a);
    }
}
