//! Auxiliary integer polynomials whose roots are symmetric functions of the
//! roots of `P`, and the gap thresholds they yield through the Cauchy bound.
//!
//! A polynomial `a_d^k ∏_t (X − v_t)` whose coefficients are symmetric in the
//! roots of degree at most `k` in each root has integer coefficients. So its
//! nonzero roots have modulus at least `1/(1 + height)`, which turns every
//! "is this gap zero?" question into a comparison with an explicit rational.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixed::{isqrt_ceil, pow2, shr_ceil, Cx};
use crate::measure::{MeasureKind, PairClass};
use crate::poly::{reciprocal, resultant, IntPolynomial};
use crate::rootfind::{RootSet, RootSolver, DEFAULT_PRECISION_CEILING};

/// The seven auxiliary constructions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuxKind {
    /// Roots `(α_i − α_j)²`, `i < j`.
    MDiff,
    /// Roots `(α_i + α_j)²`, `i < j`.
    MSum,
    /// Roots `α_k² − α_i α_j`, `i < j`, `k ∉ {i, j}`.
    RRealComplex,
    /// Roots `(α_i α_j − α_k α_ℓ)²` over unordered pairs of disjoint pairs.
    SComplexComplex,
    /// Roots `α_i + α_j − 2α_k`, `i < j`, `k ∉ {i, j}`.
    T1RePart,
    /// Roots `(α_i + α_j − α_k − α_ℓ)²` over unordered pairs of disjoint pairs.
    T2PartDiff,
    /// Roots `(α_i − α_j)² − 4α_k²`, `i < j`, `k ∉ {i, j}`.
    T3ImPart,
}

impl AuxKind {
    pub const ALL: [AuxKind; 7] = [
        AuxKind::MDiff,
        AuxKind::MSum,
        AuxKind::RRealComplex,
        AuxKind::SComplexComplex,
        AuxKind::T1RePart,
        AuxKind::T2PartDiff,
        AuxKind::T3ImPart,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            AuxKind::MDiff => "M_diff",
            AuxKind::MSum => "M_sum",
            AuxKind::RRealComplex => "R_realcomplex",
            AuxKind::SComplexComplex => "S_complexcomplex",
            AuxKind::T1RePart => "T1_repart",
            AuxKind::T2PartDiff => "T2_partdiff",
            AuxKind::T3ImPart => "T3_impart",
        }
    }

    pub fn from_tag(s: &str) -> Option<AuxKind> {
        let lower = s.to_ascii_lowercase();
        AuxKind::ALL.into_iter().find(|k| {
            let t = k.tag().to_ascii_lowercase();
            t == lower || t.split('_').next() == Some(lower.as_str())
        })
    }

    pub fn min_degree(self) -> usize {
        match self {
            AuxKind::MDiff | AuxKind::MSum => 2,
            AuxKind::RRealComplex | AuxKind::T1RePart | AuxKind::T3ImPart => 3,
            AuxKind::SComplexComplex | AuxKind::T2PartDiff => 4,
        }
    }

    /// Degree in each root of the coefficients, hence the power of `a_d`
    /// that makes them integral.
    pub fn per_root_degree(self, d: usize) -> usize {
        let (d1, d2, d3) = (d.saturating_sub(1), d.saturating_sub(2), d.saturating_sub(3));
        match self {
            AuxKind::MDiff | AuxKind::MSum => 2 * d1,
            AuxKind::RRealComplex => 2 * d1 * d2,
            AuxKind::SComplexComplex | AuxKind::T2PartDiff => d1 * d2 * d3,
            AuxKind::T1RePart => {
                assert!((d1 * d2) % 2 == 0);
                3 * d1 * d2 / 2
            }
            AuxKind::T3ImPart => 3 * d1 * d2,
        }
    }

    /// Degree in `X` of the auxiliary polynomial.
    pub fn aux_degree(self, d: usize) -> usize {
        let pairs = d * d.saturating_sub(1) / 2;
        match self {
            AuxKind::MDiff | AuxKind::MSum => pairs,
            AuxKind::RRealComplex | AuxKind::T1RePart | AuxKind::T3ImPart => {
                pairs * d.saturating_sub(2)
            }
            AuxKind::SComplexComplex | AuxKind::T2PartDiff => {
                let rest = d.saturating_sub(2) * d.saturating_sub(3) / 2;
                pairs * rest / 2
            }
        }
    }

    fn check_degree(self, d: usize) -> Result<()> {
        if d < self.min_degree() {
            return Err(Error::DegreeTooSmall { degree: d, what: self.tag().into() });
        }
        Ok(())
    }
}

impl fmt::Display for AuxKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuxPolynomial {
    pub kind: AuxKind,
    pub source: IntPolynomial,
    pub poly: IntPolynomial,
    pub height: BigInt,
}

/// `1/(1 + H)`: every nonzero root of `P` has at least this modulus.
pub fn cauchy_lower_bound(p: &IntPolynomial) -> Result<BigRational> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    Ok(BigRational::new(BigInt::one(), p.height() + 1u32))
}

/// Complex ball: center and radius at a common fixed-point scale.
#[derive(Clone, Debug)]
struct CBall {
    c: Cx,
    r: BigInt,
}

impl CBall {
    fn exact(c: Cx) -> Self {
        CBall { c, r: BigInt::zero() }
    }

    fn add(&self, o: &CBall) -> CBall {
        CBall { c: self.c.add(&o.c), r: &self.r + &o.r }
    }

    fn sub(&self, o: &CBall) -> CBall {
        CBall { c: self.c.sub(&o.c), r: &self.r + &o.r }
    }

    fn scale(&self, k: i64) -> CBall {
        let k = BigInt::from(k);
        CBall { c: self.c.scale_int(&k), r: &self.r * k.abs() }
    }

    fn mul(&self, o: &CBall, p: u32) -> CBall {
        let c = self.c.mul_fixed(&o.c, p);
        let spread = self.c.l1() * &o.r + o.c.l1() * &self.r + &self.r * &o.r;
        CBall { c, r: shr_ceil(&spread, p) + 2u32 }
    }

    fn sq(&self, p: u32) -> CBall {
        self.mul(self, p)
    }
}

/// Index tuples and the root function of each kind, evaluated on balls.
fn root_values(kind: AuxKind, a: &[CBall], p: u32) -> Vec<CBall> {
    let d = a.len();
    let mut out = Vec::with_capacity(kind.aux_degree(d));
    let pairs: Vec<(usize, usize)> =
        (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).collect();
    match kind {
        AuxKind::MDiff => {
            for &(i, j) in &pairs {
                out.push(a[i].sub(&a[j]).sq(p));
            }
        }
        AuxKind::MSum => {
            for &(i, j) in &pairs {
                out.push(a[i].add(&a[j]).sq(p));
            }
        }
        AuxKind::RRealComplex | AuxKind::T1RePart | AuxKind::T3ImPart => {
            for &(i, j) in &pairs {
                for k in (0..d).filter(|&k| k != i && k != j) {
                    out.push(match kind {
                        AuxKind::RRealComplex => a[k].sq(p).sub(&a[i].mul(&a[j], p)),
                        AuxKind::T1RePart => a[i].add(&a[j]).sub(&a[k].scale(2)),
                        _ => a[i].sub(&a[j]).sq(p).sub(&a[k].sq(p).scale(4)),
                    });
                }
            }
        }
        AuxKind::SComplexComplex | AuxKind::T2PartDiff => {
            for (x, &(i, j)) in pairs.iter().enumerate() {
                for &(k, l) in &pairs[x + 1..] {
                    if k == i || k == j || l == i || l == j {
                        continue;
                    }
                    out.push(if kind == AuxKind::SComplexComplex {
                        a[i].mul(&a[j], p).sub(&a[k].mul(&a[l], p)).sq(p)
                    } else {
                        a[i].add(&a[j]).sub(&a[k]).sub(&a[l]).sq(p)
                    });
                }
            }
        }
    }
    debug_assert_eq!(out.len(), kind.aux_degree(d));
    out
}

/// Upper bounds on `|v_t|` from upper bounds `u` on the root moduli, at scale `p`.
fn root_value_bounds(kind: AuxKind, u: &[BigInt], p: u32) -> Vec<BigInt> {
    let d = u.len();
    let m = |x: &BigInt, y: &BigInt| shr_ceil(&(x * y), p);
    let mut out = Vec::new();
    let pairs: Vec<(usize, usize)> =
        (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).collect();
    match kind {
        AuxKind::MDiff | AuxKind::MSum => {
            for &(i, j) in &pairs {
                let s = &u[i] + &u[j];
                out.push(m(&s, &s));
            }
        }
        AuxKind::RRealComplex | AuxKind::T1RePart | AuxKind::T3ImPart => {
            for &(i, j) in &pairs {
                for k in (0..d).filter(|&k| k != i && k != j) {
                    out.push(match kind {
                        AuxKind::RRealComplex => m(&u[k], &u[k]) + m(&u[i], &u[j]),
                        AuxKind::T1RePart => &u[i] + &u[j] + &u[k] * 2u32,
                        _ => {
                            let s = &u[i] + &u[j];
                            m(&s, &s) + m(&u[k], &u[k]) * 4u32
                        }
                    });
                }
            }
        }
        AuxKind::SComplexComplex | AuxKind::T2PartDiff => {
            for (x, &(i, j)) in pairs.iter().enumerate() {
                for &(k, l) in &pairs[x + 1..] {
                    if k == i || k == j || l == i || l == j {
                        continue;
                    }
                    let s = if kind == AuxKind::SComplexComplex {
                        m(&u[i], &u[j]) + m(&u[k], &u[l])
                    } else {
                        &u[i] + &u[j] + &u[k] + &u[l]
                    };
                    out.push(m(&s, &s));
                }
            }
        }
    }
    out
}

/// Upper bound on the height of the auxiliary polynomial of a degree-`d`
/// polynomial with leading coefficient `lead` whose roots have moduli at most
/// `u` (scale `p`): `|lead|^k ∏ (1 + |v_t|)` bounds every coefficient.
pub fn aux_height_bound(kind: AuxKind, lead: &BigInt, u: &[BigInt], p: u32) -> BigInt {
    let d = u.len();
    let one = pow2(p);
    let mut acc = one.clone();
    for v in root_value_bounds(kind, u, p) {
        acc = shr_ceil(&(acc * (v + &one)), p);
    }
    let lk = num_traits::pow(lead.abs(), kind.per_root_degree(d));
    shr_ceil(&(acc * lk), p)
}

/// Options for [`build_aux_with`].
#[derive(Clone, Copy, Debug)]
pub struct AuxOptions {
    pub ceiling_bits: u32,
}

impl Default for AuxOptions {
    fn default() -> Self {
        AuxOptions { ceiling_bits: DEFAULT_PRECISION_CEILING }
    }
}

pub fn build_aux(p: &IntPolynomial, kind: AuxKind) -> Result<AuxPolynomial> {
    build_aux_with(p, kind, AuxOptions::default())
}

/// Build the auxiliary polynomial numerically from certified roots, round
/// to integers, and accept only when every coefficient ball lies within 1/4
/// of its integer.
pub fn build_aux_with(p: &IntPolynomial, kind: AuxKind, opts: AuxOptions) -> Result<AuxPolynomial> {
    let mut solver = RootSolver::new(p, opts.ceiling_bits)?;
    build_aux_from(&mut solver, kind)
}

pub(crate) fn build_aux_from(solver: &mut RootSolver, kind: AuxKind) -> Result<AuxPolynomial> {
    let p = solver.poly().clone();
    let d = p.degree();
    kind.check_degree(d)?;
    let first = solver.at_least(64)?;
    let u: Vec<BigInt> = (0..d).map(|i| first.modulus_bounds(i).1).collect();
    let bound = aux_height_bound(kind, &p.leading(), &u, first.precision_bits);
    let m = kind.aux_degree(d) as u64;
    let mut prec = (bound.bits() + 2 * (64 - m.leading_zeros() as u64) + 40) as u32;
    prec = prec.max(64).next_power_of_two();
    let ceiling = solver.ceiling();
    loop {
        if prec > ceiling {
            return Err(Error::PrecisionCeiling(ceiling));
        }
        let rs = solver.at_least(prec)?;
        if let Some(poly) = try_build(&rs, kind) {
            let height = poly.height();
            return Ok(AuxPolynomial { kind, source: p, poly, height });
        }
        if rs.precision_bits >= ceiling {
            return Err(Error::PrecisionCeiling(ceiling));
        }
        prec = rs.precision_bits * 2;
    }
}

fn try_build(rs: &RootSet, kind: AuxKind) -> Option<IntPolynomial> {
    let p = rs.precision_bits;
    let d = rs.balls.len();
    let balls: Vec<CBall> = rs
        .balls
        .iter()
        .map(|b| CBall { c: b.center.clone(), r: b.radius.clone() })
        .collect();
    let one = pow2(p);
    let mut coeffs = vec![CBall::exact(Cx::real(one.clone()))];
    for v in root_values(kind, &balls, p) {
        let mut next = Vec::with_capacity(coeffs.len() + 1);
        next.push(CBall::exact(Cx::zero()).sub(&v.mul(&coeffs[0], p)));
        for j in 1..coeffs.len() {
            next.push(coeffs[j - 1].sub(&v.mul(&coeffs[j], p)));
        }
        next.push(coeffs[coeffs.len() - 1].clone());
        coeffs = next;
    }
    let lk = num_traits::pow(rs.source.leading(), kind.per_root_degree(d));
    let quarter = pow2(p - 2);
    let mut out = Vec::with_capacity(coeffs.len());
    for c in coeffs {
        let re = &c.c.re * &lk;
        let im = &c.c.im * &lk;
        let r = &c.r * lk.abs();
        let (q, rem) = re.div_mod_floor(&one);
        let (n, dist) = if &rem * 2u32 >= one { (q + 1, &one - &rem) } else { (q, rem) };
        if &dist + &r >= quarter || im.abs() + &r >= quarter {
            return None;
        }
        out.push(n);
    }
    Some(IntPolynomial::new(out))
}

/// Which polynomial a threshold height refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Side {
    Direct,
    /// The reciprocal of `P` with its zero roots removed.
    Reciprocal,
}

fn lin(h: &BigInt) -> BigRational {
    BigRational::new(BigInt::one(), h + 1u32)
}

fn sq(h: &BigInt) -> BigRational {
    BigRational::new(BigInt::one(), isqrt_ceil(&(h + 1u32)))
}

fn half(x: BigRational) -> BigRational {
    x / BigInt::from(2)
}

/// Whether a pair class can occur at all among the roots of a degree-`d`
/// polynomial for this measure (after the structural exclusions).
pub fn class_admissible(measure: MeasureKind, class: PairClass, d: usize) -> bool {
    use MeasureKind::*;
    use PairClass::*;
    match (measure, class) {
        (_, RealReal) => d >= 2 && measure != ImGap,
        (_, RealComplex) => d >= 3,
        (Sep | ImGap, ComplexComplex) => d >= 2,
        (_, ComplexComplex) => d >= 4,
    }
}

/// Shared threshold formulas. `height(kind, side)` returns the (bound on the)
/// height of the auxiliary polynomial, or `None` when the reciprocal side has
/// too few nonzero roots for the kind to matter.
pub(crate) fn threshold_with<F>(
    measure: MeasureKind,
    class: PairClass,
    d: usize,
    mut height: F,
) -> Result<BigRational>
where
    F: FnMut(AuxKind, Side) -> Result<Option<BigInt>>,
{
    use MeasureKind::*;
    use PairClass::*;
    if !class_admissible(measure, class, d) {
        return Err(Error::DegreeTooSmall {
            degree: d,
            what: format!("{measure} {class} pairs"),
        });
    }
    let mut direct = |k: AuxKind| -> Result<BigInt> {
        height(k, Side::Direct)?.ok_or_else(|| Error::Degenerate("missing auxiliary height".into()))
    };
    let tau = match (measure, class) {
        (Sep, _) | (ReGap, RealReal) => sq(&direct(AuxKind::MDiff)?),
        (AbsSep | TopTwoAbsGap, RealReal) => {
            let h = direct(AuxKind::MDiff)?.max(direct(AuxKind::MSum)?);
            sq(&h)
        }
        (AbsSep | TopTwoAbsGap, RealComplex | ComplexComplex) => {
            let (kind, f): (AuxKind, fn(&BigInt) -> BigRational) = if class == RealComplex {
                (AuxKind::RRealComplex, lin)
            } else {
                (AuxKind::SComplexComplex, sq)
            };
            let t = half(f(&direct(kind)?));
            match height(kind, Side::Reciprocal)? {
                Some(hr) => t.min(f(&hr) / BigInt::from(6)),
                None => t,
            }
        }
        (ReGap, RealComplex) => half(lin(&direct(AuxKind::T1RePart)?)),
        (ReGap, ComplexComplex) => half(sq(&direct(AuxKind::T2PartDiff)?)),
        (ImGap, RealComplex) => half(sq(&direct(AuxKind::MDiff)?)),
        (ImGap, ComplexComplex) => {
            let conj = sq(&direct(AuxKind::MDiff)?);
            if d >= 4 {
                conj.min(half(sq(&direct(AuxKind::T2PartDiff)?)))
            } else {
                conj
            }
        }
        (ImGap, RealReal) => unreachable!(),
    };
    Ok(tau)
}

/// Explicit `τ > 0` such that every gap of the given measure between two
/// roots in `class` is either 0 or at least `τ`.
pub fn certified_gap_threshold(
    p: &IntPolynomial,
    measure: MeasureKind,
    class: PairClass,
) -> Result<BigRational> {
    certified_gap_threshold_with(p, measure, class, AuxOptions::default())
}

pub fn certified_gap_threshold_with(
    p: &IntPolynomial,
    measure: MeasureKind,
    class: PairClass,
    opts: AuxOptions,
) -> Result<BigRational> {
    let d = p.degree();
    let rec = reciprocal(&p.strip_zero_roots())?;
    let mut direct_solver = RootSolver::new(p, opts.ceiling_bits)?;
    let mut rec_solver: Option<RootSolver> = None;
    threshold_with(measure, class, d, |kind, side| match side {
        Side::Direct => Ok(Some(build_aux_from(&mut direct_solver, kind)?.height)),
        Side::Reciprocal => {
            if rec.degree() < kind.min_degree() {
                return Ok(None);
            }
            let s = match &mut rec_solver {
                Some(s) => s,
                None => rec_solver.insert(RootSolver::new_squarefree(&rec, opts.ceiling_bits)),
            };
            Ok(Some(build_aux_from(s, kind)?.height))
        }
    })
}

/// Exponent `E` of the theoretical bound `gap ≫ H^-E` for the class.
pub fn exponent_of(measure: MeasureKind, class: PairClass, d: usize) -> Result<usize> {
    use MeasureKind::*;
    use PairClass::*;
    if !class_admissible(measure, class, d) || measure == TopTwoAbsGap {
        return Err(Error::DegreeTooSmall {
            degree: d,
            what: format!("{measure} {class} exponent"),
        });
    }
    let (d1, d2, d3) = (d - 1, d.saturating_sub(2), d.saturating_sub(3));
    Ok(match (measure, class) {
        (_, RealReal) => d1,
        (Sep, _) => d1,
        (AbsSep, RealComplex) => 2 * d1 * d2,
        (ImGap, RealComplex) => d1,
        (_, RealComplex) => 3 * d1 * d2 / 2,
        (ImGap, ComplexComplex) if d < 4 => d1,
        (_, ComplexComplex) => d1 * d2 * d3 / 2,
    })
}

/// `M_diff` computed exactly as `Res_Y(P(Y), P(X+Y)) / (a_d² X^d)` with
/// `X² → X`. Independent of the numeric construction; limited to `d ≤ 4`.
pub fn m_diff_by_resultant(p: &IntPolynomial) -> Result<IntPolynomial> {
    let d = p.degree();
    if !(2..=4).contains(&d) {
        return Err(Error::InvalidParameter(format!("resultant route supports 2 ≤ d ≤ 4, got {d}")));
    }
    let n = d * d;
    let xs: Vec<i64> = (0..=n as i64).collect();
    let ys: Vec<BigInt> = xs.iter().map(|&x| resultant(p, &taylor_shift(p, x))).collect();
    let full = interpolate(&xs, &ys)?;
    let c = full.coeffs();
    if c.iter().take(d).any(|x| !x.is_zero()) {
        return Err(Error::Degenerate("resultant not divisible by X^d".into()));
    }
    let lead2 = p.leading().pow(2);
    let mut out = Vec::new();
    for (i, x) in c.iter().enumerate().skip(d) {
        let k = i - d;
        if k % 2 == 1 {
            if !x.is_zero() {
                return Err(Error::Degenerate("odd coefficient in resultant".into()));
            }
            continue;
        }
        let (q, r) = x.div_rem(&lead2);
        if !r.is_zero() {
            return Err(Error::Degenerate("resultant not divisible by a_d^2".into()));
        }
        out.push(q);
    }
    Ok(IntPolynomial::new(out))
}

/// `P(X + x)` for an integer shift.
fn taylor_shift(p: &IntPolynomial, x: i64) -> IntPolynomial {
    let x = BigInt::from(x);
    let mut acc = IntPolynomial::zero();
    let lin = IntPolynomial::new(vec![x, BigInt::one()]);
    for c in p.coeffs().iter().rev() {
        acc = &(&acc * &lin) + &IntPolynomial::constant(c.clone());
    }
    acc
}

fn interpolate(xs: &[i64], ys: &[BigInt]) -> Result<IntPolynomial> {
    // Newton divided differences, then expand.
    let n = xs.len();
    let mut dd: Vec<BigRational> = ys.iter().map(|y| BigRational::from_integer(y.clone())).collect();
    for level in 1..n {
        for i in (level..n).rev() {
            let den = BigInt::from(xs[i] - xs[i - level]);
            dd[i] = (&dd[i] - &dd[i - 1]) / den;
        }
    }
    let mut poly: Vec<BigRational> = vec![BigRational::zero(); n];
    let mut basis: Vec<BigRational> = vec![BigRational::one()];
    for (k, c) in dd.iter().enumerate() {
        for (i, b) in basis.iter().enumerate() {
            poly[i] += c * b;
        }
        let xk = BigRational::from_integer(BigInt::from(xs[k]));
        let mut next = vec![BigRational::zero(); basis.len() + 1];
        for (i, b) in basis.iter().enumerate() {
            next[i + 1] += b;
            next[i] -= b * &xk;
        }
        basis = next;
    }
    let ints = poly
        .into_iter()
        .map(|c| {
            if c.is_integer() {
                Ok(c.to_integer())
            } else {
                Err(Error::Degenerate("non-integral interpolant".into()))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IntPolynomial::new(ints))
}

/// Log2 of an integer height, for reports.
pub fn height_bits(h: &BigInt) -> f64 {
    h.to_f64().map(|x| x.log2()).unwrap_or(h.bits() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    fn p(s: &str) -> IntPolynomial {
        parse_poly(s).unwrap()
    }

    #[test]
    fn small_examples() {
        assert_eq!(build_aux(&p("X^2-1"), AuxKind::MDiff).unwrap().poly, p("X-4"));
        assert_eq!(build_aux(&p("X^2-1"), AuxKind::MSum).unwrap().poly, p("X"));
        let m = build_aux(&p("X^3-2"), AuxKind::MDiff).unwrap();
        assert_eq!(m.poly.degree(), 3);
        // (α_i − α_j)² = 2^{2/3}(ω^a − ω^b)² ; product of the three is −27·4 = −108
        assert_eq!(m.poly.coeff(0), BigInt::from(108));
    }

    #[test]
    fn degrees_and_exponents() {
        for d in 4..=6 {
            let s = AuxKind::SComplexComplex.aux_degree(d);
            let c2 = |n: usize| n * (n - 1) / 2;
            assert_eq!(s, c2(d) * c2(d - 2) / 2);
        }
        assert_eq!(AuxKind::T1RePart.per_root_degree(5), 18);
        assert!(build_aux(&p("X^3-2"), AuxKind::SComplexComplex).is_err());
    }

    #[test]
    fn resultant_route_agrees() {
        for s in ["X^2-1", "X^3-2", "5X^3+8X^2-9X+2", "3X^4-9X^3-10X^2+7X-1", "10X^4+X^3+10"] {
            let q = p(s);
            assert_eq!(m_diff_by_resultant(&q).unwrap(), build_aux(&q, AuxKind::MDiff).unwrap().poly, "{s}");
        }
    }

    #[test]
    fn cauchy() {
        assert_eq!(cauchy_lower_bound(&p("X-2")).unwrap(), BigRational::new(1.into(), 3.into()));
        assert_eq!(cauchy_lower_bound(&p("10X^3-3X^2-2X+3")).unwrap(), BigRational::new(1.into(), 11.into()));
    }

    #[test]
    fn exponents() {
        use MeasureKind::*;
        use PairClass::*;
        assert_eq!(exponent_of(AbsSep, RealReal, 3).unwrap(), 2);
        assert_eq!(exponent_of(AbsSep, RealComplex, 4).unwrap(), 12);
        assert_eq!(exponent_of(AbsSep, ComplexComplex, 4).unwrap(), 3);
        assert_eq!(exponent_of(ReGap, RealComplex, 4).unwrap(), 9);
        assert!(exponent_of(AbsSep, ComplexComplex, 3).is_err());
    }
}
