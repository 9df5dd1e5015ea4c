//! Explicit families with small absolute separation.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixed::{isqrt_floor, Cx, Dyadic};
use crate::measure::{measure_with, MeasureKind, MeasureOptions, SeparationResult};
use crate::poly::IntPolynomial;
use crate::rootfind::{approx_roots_fixed, certified_roots};

/// A convergent `p/q` of the continued fraction of √3.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Convergent {
    pub n: u32,
    pub p: BigInt,
    pub q: BigInt,
}

/// The `n`-th convergent of √3 = [1; 1, 2, 1, 2, …], counted from `n = 1`
/// (1/1), so that `n = 2` gives 2/1.
pub fn sqrt3_convergent(n: u32) -> Result<Convergent> {
    if n == 0 {
        return Err(Error::InvalidParameter("convergent index starts at 1".into()));
    }
    let (mut p0, mut q0) = (BigInt::one(), BigInt::zero());
    let (mut p1, mut q1) = (BigInt::one(), BigInt::one());
    for k in 1..n {
        let a = if k % 2 == 1 { 1u32 } else { 2 };
        let p2 = &p1 * a + &p0;
        let q2 = &q1 * a + &q0;
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
    }
    Ok(Convergent { n, p: p1, q: q1 })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyName {
    Deg3Sqrt3,
    Deg4,
    /// First q-family of degree 5.
    Deg5A,
    /// Second q-family; `q = 0` is the published degree-5 polynomial.
    Deg5B,
    Deg6,
    ExtraDeg4,
    ExtraDeg3A,
    ExtraDeg3B,
    ExtraDeg5A,
    ExtraDeg5B,
}

impl FamilyName {
    pub const ALL: [FamilyName; 10] = [
        FamilyName::Deg3Sqrt3,
        FamilyName::Deg4,
        FamilyName::Deg5A,
        FamilyName::Deg5B,
        FamilyName::Deg6,
        FamilyName::ExtraDeg4,
        FamilyName::ExtraDeg3A,
        FamilyName::ExtraDeg3B,
        FamilyName::ExtraDeg5A,
        FamilyName::ExtraDeg5B,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            FamilyName::Deg3Sqrt3 => "deg3_sqrt3",
            FamilyName::Deg4 => "deg4",
            FamilyName::Deg5A => "deg5a",
            FamilyName::Deg5B => "deg5",
            FamilyName::Deg6 => "deg6",
            FamilyName::ExtraDeg4 => "extra_deg4",
            FamilyName::ExtraDeg3A => "extra_deg3a",
            FamilyName::ExtraDeg3B => "extra_deg3b",
            FamilyName::ExtraDeg5A => "extra_deg5a",
            FamilyName::ExtraDeg5B => "extra_deg5b",
        }
    }

    pub fn degree(self) -> usize {
        match self {
            FamilyName::Deg3Sqrt3 | FamilyName::ExtraDeg3A | FamilyName::ExtraDeg3B => 3,
            FamilyName::Deg4 | FamilyName::ExtraDeg4 => 4,
            FamilyName::Deg5A | FamilyName::Deg5B | FamilyName::ExtraDeg5A | FamilyName::ExtraDeg5B => 5,
            FamilyName::Deg6 => 6,
        }
    }

    /// Exponent the family is expected to approach.
    pub fn expected_exponent(self) -> u32 {
        match self {
            FamilyName::Deg3Sqrt3 => 4,
            FamilyName::Deg4 | FamilyName::ExtraDeg4 => 5,
            FamilyName::Deg5A | FamilyName::Deg5B => 6,
            FamilyName::Deg6 => 7,
            FamilyName::ExtraDeg3A | FamilyName::ExtraDeg3B => 3,
            FamilyName::ExtraDeg5A | FamilyName::ExtraDeg5B => 5,
        }
    }
}

impl fmt::Display for FamilyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for FamilyName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = if s == "deg5b" { "deg5" } else { s };
        FamilyName::ALL
            .into_iter()
            .find(|n| n.tag() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown family {s:?}")))
    }
}

/// One member: `param` is `n` for the cubic family and `M` otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilySpec {
    pub name: FamilyName,
    pub param: BigInt,
    /// Only used by the degree-5 families.
    pub q: i64,
}

impl FamilySpec {
    pub fn new(name: FamilyName, param: impl Into<BigInt>) -> Self {
        FamilySpec { name, param: param.into(), q: 0 }
    }

    pub fn with_q(mut self, q: i64) -> Self {
        self.q = q;
        self
    }

    /// The member whose height is (about) `h`, as used by the tables.
    /// Degree 4 uses `M = 5 − h`, degree 6 `M = h`, degree 5 `M = round(h/1296)`.
    pub fn for_height(name: FamilyName, h: &BigInt) -> Result<Self> {
        let m = match name {
            FamilyName::Deg4 => BigInt::from(5) - h,
            FamilyName::Deg6 | FamilyName::ExtraDeg4 => h.clone(),
            FamilyName::Deg5A | FamilyName::Deg5B => (h * 2 + 1296) / 2592,
            _ => {
                return Err(Error::InvalidParameter(format!("{name} is not keyed by height")));
            }
        };
        Ok(FamilySpec::new(name, m))
    }

    pub fn expected_exponent(&self) -> u32 {
        self.name.expected_exponent()
    }
}

fn p_desc(c: &[i64]) -> IntPolynomial {
    IntPolynomial::from_descending(c)
}

pub fn q4() -> IntPolynomial {
    p_desc(&[1, -1, 1, -5])
}

pub fn q6() -> IntPolynomial {
    p_desc(&[9, -9, -26, -9, 9, -28])
}

/// `(X² − 9X + 36)(X² − 11X + 36)`.
pub fn r5() -> IntPolynomial {
    &p_desc(&[1, -9, 36]) * &p_desc(&[1, -11, 36])
}

/// The two one-parameter `Q₅` families.
pub fn q5(variant_b: bool, q: i64) -> IntPolynomial {
    if variant_b {
        p_desc(&[1, q, -(20 * q + 213), 2404 + 171 * q, -(11088 + 720 * q), 20736 + 1296 * q])
    } else {
        p_desc(&[1, q, -(20 * q + 229), 2700 + 171 * q, -(13104 + 720 * q), 25920 + 1296 * q])
    }
}

fn cyclo(d: &[i64]) -> IntPolynomial {
    p_desc(d)
}

/// `M·R − Q` for the extra families written as `M·R + S`.
fn extra_parts(name: FamilyName) -> (IntPolynomial, IntPolynomial) {
    let x2m1 = cyclo(&[1, 0, -1]);
    let x2p1 = cyclo(&[1, 0, 1]);
    let xm1 = cyclo(&[1, -1]);
    let phi3 = cyclo(&[1, 1, 1]);
    let phi6 = cyclo(&[1, -1, 1]);
    match name {
        FamilyName::ExtraDeg4 => (&x2m1 * &phi3, p_desc(&[-1, 0, 3, 4])),
        FamilyName::ExtraDeg3A => (&x2p1 * &xm1, p_desc(&[1, -2, 3])),
        FamilyName::ExtraDeg3B => (&phi6 * &xm1, p_desc(&[2, -4, -3])),
        FamilyName::ExtraDeg5A => (&(&xm1 * &phi3) * &phi6, p_desc(&[3, -2, 5, -4, 7])),
        FamilyName::ExtraDeg5B => (&(&xm1 * &x2p1) * &phi6, p_desc(&[2, -8, 13, -12, 7])),
        _ => unreachable!("not an extra family"),
    }
}

/// The base polynomial `R` and perturbation `Q` with member `M·R − Q`
/// (for the families of that shape).
pub fn family_parts(name: FamilyName, q: i64) -> Option<(IntPolynomial, IntPolynomial)> {
    match name {
        FamilyName::Deg3Sqrt3 => None,
        FamilyName::Deg4 => Some((p_desc(&[1, 0, 0, 0, -1]), q4())),
        FamilyName::Deg6 => Some((p_desc(&[1, 0, 0, 0, 0, 0, -1]), q6())),
        FamilyName::Deg5A => Some((r5(), q5(false, q))),
        FamilyName::Deg5B => Some((r5(), q5(true, q))),
        _ => {
            let (r, s) = extra_parts(name);
            Some((r, -&s))
        }
    }
}

pub fn family_member(spec: &FamilySpec) -> Result<IntPolynomial> {
    if spec.name == FamilyName::Deg3Sqrt3 {
        let n = spec
            .param
            .to_u32()
            .filter(|&n| n >= 1)
            .ok_or_else(|| Error::InvalidParameter("n must be a positive integer".into()))?;
        let c = sqrt3_convergent(n)?;
        let a = p_desc(&[3, -2, 4, -6]).scale(&c.p);
        let b = p_desc(&[1, -1, 0, 1]).scale(&(c.q * 6));
        return Ok(&a + &b);
    }
    if spec.param.is_zero() {
        return Err(Error::InvalidParameter("M must be nonzero".into()));
    }
    let (r, q) = family_parts(spec.name, spec.q).expect("shaped family");
    Ok(&r.scale(&spec.param) - &q)
}

/// One row of a family table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyRow {
    pub family: FamilyName,
    pub param: String,
    pub polynomial: String,
    pub height: String,
    pub abssep: String,
    pub quality: Option<String>,
}

impl FamilyRow {
    fn from_result(name: FamilyName, param: &BigInt, r: &SeparationResult) -> Self {
        FamilyRow {
            family: name,
            param: param.to_string(),
            polynomial: r.polynomial.to_string(),
            height: r.height.to_string(),
            abssep: r.value().to_sci(20),
            quality: r.quality.map(|q| format!("{q:.6}")),
        }
    }
}

/// Measures each member (in parallel) and returns rows in parameter order.
pub fn family_quality_table(
    name: FamilyName,
    params: &[BigInt],
    q: i64,
    opts: MeasureOptions,
) -> Result<Vec<FamilyRow>> {
    params
        .par_iter()
        .map(|m| {
            let spec = FamilySpec::new(name, m.clone()).with_q(q);
            let p = family_member(&spec)?;
            let r = measure_with(&p, MeasureKind::AbsSep, opts)?;
            Ok(FamilyRow::from_result(name, m, &r))
        })
        .collect()
}

/// Rows keyed by target height (Tables for degrees 4, 5 and 6).
pub fn family_rows_by_height(name: FamilyName, heights: &[BigInt], opts: MeasureOptions) -> Result<Vec<FamilyRow>> {
    heights
        .par_iter()
        .map(|h| {
            let spec = FamilySpec::for_height(name, h)?;
            let p = family_member(&spec)?;
            let r = measure_with(&p, MeasureKind::AbsSep, opts)?;
            let mut row = FamilyRow::from_result(name, h, &r);
            row.param = h.to_string();
            Ok(row)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// real quadratic field

/// `a + b√D` with rational `a`, `b` and a fixed squarefree `D > 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealQuad {
    pub a: BigRational,
    pub b: BigRational,
    pub d: i64,
}

impl RealQuad {
    pub fn new(a: BigRational, b: BigRational, d: i64) -> Self {
        RealQuad { a, b, d }
    }

    pub fn int(a: i64, b: i64, d: i64) -> Self {
        RealQuad::new(BigRational::from_integer(a.into()), BigRational::from_integer(b.into()), d)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Exact sign via `a² ⋚ b²D`.
    pub fn signum(&self) -> i32 {
        let sa = sign_of(&self.a);
        let sb = sign_of(&self.b);
        if sa == sb || sb == 0 {
            return sa;
        }
        if sa == 0 {
            return sb;
        }
        let a2 = &self.a * &self.a;
        let b2d = &self.b * &self.b * BigInt::from(self.d);
        if a2 > b2d {
            sa
        } else if a2 < b2d {
            sb
        } else {
            0
        }
    }

    /// Galois conjugate `a − b√D`.
    pub fn conj(&self) -> Self {
        RealQuad::new(self.a.clone(), -&self.b, self.d)
    }

    pub fn inv(&self) -> Option<Self> {
        let n = &self.a * &self.a - &self.b * &self.b * BigInt::from(self.d);
        if n.is_zero() {
            return None;
        }
        Some(RealQuad::new(&self.a / &n, -&self.b / &n, self.d))
    }

    /// Fixed-point value at scale `p`.
    pub fn to_fixed(&self, p: u32) -> BigInt {
        let root = isqrt_floor(&(BigInt::from(self.d) << (2 * p)));
        let a = (self.a.numer() << p) / self.a.denom();
        let b = (self.b.numer() * root) / self.b.denom();
        a + b
    }

    pub fn to_f64(&self) -> f64 {
        self.a.to_f64().unwrap_or(f64::NAN) + self.b.to_f64().unwrap_or(f64::NAN) * (self.d as f64).sqrt()
    }
}

fn sign_of(x: &BigRational) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

impl Add for &RealQuad {
    type Output = RealQuad;
    fn add(self, o: &RealQuad) -> RealQuad {
        RealQuad::new(&self.a + &o.a, &self.b + &o.b, self.d)
    }
}

impl Sub for &RealQuad {
    type Output = RealQuad;
    fn sub(self, o: &RealQuad) -> RealQuad {
        RealQuad::new(&self.a - &o.a, &self.b - &o.b, self.d)
    }
}

impl Mul for &RealQuad {
    type Output = RealQuad;
    fn mul(self, o: &RealQuad) -> RealQuad {
        let d = BigInt::from(self.d);
        RealQuad::new(
            &self.a * &o.a + &self.b * &o.b * d,
            &self.a * &o.b + &self.b * &o.a,
            self.d,
        )
    }
}

impl Neg for &RealQuad {
    type Output = RealQuad;
    fn neg(self) -> RealQuad {
        RealQuad::new(-&self.a, -&self.b, self.d)
    }
}

impl fmt::Display for RealQuad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}*sqrt({})", self.a, self.b, self.d)
    }
}

fn pow(x: &RealQuad, k: u32) -> RealQuad {
    let mut r = RealQuad::int(1, 0, x.d);
    for _ in 0..k {
        r = &r * x;
    }
    r
}

// ---------------------------------------------------------------------------
// equal-modulus cubics

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EqualModulusReport {
    /// `a₁³a₃ − a₀a₂³`, exact.
    pub residual: String,
    pub residual_zero: bool,
    /// `a₁a₂ < 0 ≤ a₁a₃ ≤ a₂² ≤ 3a₁a₃`, evaluated verbatim.
    pub chain_holds: bool,
    /// `a₁a₃ > 0`.
    pub sign_condition: bool,
    /// `(a₂² − a₁a₃)² < 4a₁²a₃²`: the quadratic cofactor has complex roots.
    pub cofactor_complex: bool,
    /// Exact criterion: residual zero and complex cofactor.
    pub equal_moduli: bool,
    /// The stricter variant that also asks for `a₁a₃ > 0`.
    pub strict_criterion: bool,
    pub moduli: Vec<f64>,
    /// Largest relative spread of the numerically computed moduli.
    pub spread: f64,
    pub numeric_confirms: bool,
}

/// Checks a cubic `a₃X³ + a₂X² + a₁X + a₀` with coefficients in `Q(√D)`
/// (ascending order) for three roots of one modulus.
pub fn equal_modulus_cubic_check_quad(c: &[RealQuad; 4]) -> Result<EqualModulusReport> {
    let [a0, a1, a2, a3] = c;
    if a3.is_zero() {
        return Err(Error::Degenerate("not a cubic".into()));
    }
    if a2.is_zero() || a1.is_zero() {
        return Err(Error::Degenerate("a₂ and a₁ must be nonzero".into()));
    }
    let residual = &(&pow(a1, 3) * a3) - &(a0 * &pow(a2, 3));
    let a1a2 = a1 * a2;
    let a1a3 = a1 * a3;
    let a2sq = a2 * a2;
    let three = RealQuad::int(3, 0, a1.d);
    let chain = a1a2.signum() < 0
        && a1a3.signum() >= 0
        && (&a2sq - &a1a3).signum() >= 0
        && (&(&three * &a1a3) - &a2sq).signum() >= 0;
    let lhs = pow(&(&a2sq - &a1a3), 2);
    let four = RealQuad::int(4, 0, a1.d);
    let rhs = &four * &(&(a1 * a1) * &(a3 * a3));
    let cofactor_complex = (&rhs - &lhs).signum() > 0;
    let residual_zero = residual.is_zero();
    let sign_condition = a1a3.signum() > 0;

    let p = 256;
    let fixed: Vec<BigInt> = c.iter().map(|x| x.to_fixed(p)).collect();
    let roots = approx_roots_fixed(&fixed, p);
    let (moduli, spread) = moduli_spread(&roots, p);
    Ok(EqualModulusReport {
        residual: residual.to_string(),
        residual_zero,
        chain_holds: chain,
        sign_condition,
        cofactor_complex,
        equal_moduli: residual_zero && cofactor_complex,
        strict_criterion: residual_zero && cofactor_complex && sign_condition,
        moduli,
        spread,
        numeric_confirms: spread < 1e-12,
    })
}

pub fn equal_modulus_cubic_check(p: &IntPolynomial) -> Result<EqualModulusReport> {
    if p.degree() != 3 {
        return Err(Error::Degenerate("not a cubic".into()));
    }
    let q = |i: usize| RealQuad::new(BigRational::from_integer(p.coeff(i)), BigRational::zero(), 3);
    let mut report = equal_modulus_cubic_check_quad(&[q(0), q(1), q(2), q(3)])?;
    // integer input: use certified roots for the numeric part
    if let Ok(rs) = certified_roots(p, 1e-30) {
        let z: Vec<Cx> = rs.balls.iter().map(|b| b.center.clone()).collect();
        let (m, s) = moduli_spread(&z, rs.precision_bits);
        report.moduli = m;
        report.spread = s;
        report.numeric_confirms = s < 1e-12;
    }
    Ok(report)
}

/// Moduli as `f64` and the relative spread `(max − min)/max`, computed on
/// the squared moduli in fixed point.
fn moduli_spread(z: &[Cx], p: u32) -> (Vec<f64>, f64) {
    let sq: Vec<BigInt> = z.iter().map(|w| w.norm_sq()).collect();
    let hi = sq.iter().max().cloned().unwrap_or_default();
    let lo = sq.iter().min().cloned().unwrap_or_default();
    let moduli = sq.iter().map(|s| Dyadic::new(s.clone(), 2 * p).to_f64().sqrt()).collect();
    if hi.is_zero() {
        return (moduli, 0.0);
    }
    let diff = Dyadic::new(&hi - &lo, 2 * p).to_f64();
    let top = Dyadic::new(hi, 2 * p).to_f64();
    // |z|² spread over 2·|z|² approximates the spread of |z|
    (moduli, diff / (2.0 * top))
}

/// Cubic of the three-parameter surface at `√3`:
/// `a(X³+10c³) + b(3X²+6cX) − ((X²+4cX)b + 6ac³)√3`, ascending.
pub fn sqrt3_surface_cubic(a: i64, b: i64, c: i64) -> [RealQuad; 4] {
    let c3 = c * c * c;
    [
        RealQuad::int(10 * a * c3, -6 * a * c3, 3),
        RealQuad::int(6 * b * c, -4 * b * c, 3),
        RealQuad::int(3 * b, -b, 3),
        RealQuad::int(a, 0, 3),
    ]
}

/// Denominator-cleared `6·P(X, √3)` for the bivariate cubic
/// `(X³/2 − X²/3 + 2X/3 − 1)Y + X³ − X² + 1`.
pub fn bivariate_cubic_at_sqrt3() -> [RealQuad; 4] {
    [
        RealQuad::int(6, -6, 3),
        RealQuad::int(0, 4, 3),
        RealQuad::int(-6, -2, 3),
        RealQuad::int(6, 3, 3),
    ]
}

/// Does the surface cubic at `(a, b, c)` have three roots of one modulus
/// (to 1e−20, numerically at 256 bits)?
pub fn verify_sqrt3_surface(a: i64, b: i64, c: i64) -> Result<bool> {
    let cubic = sqrt3_surface_cubic(a, b, c);
    if cubic[3].is_zero() {
        return Err(Error::Degenerate("leading coefficient vanishes".into()));
    }
    if cubic[0].is_zero() {
        return Err(Error::Degenerate("zero root: moduli trivially unequal or zero".into()));
    }
    let p = 256;
    let fixed: Vec<BigInt> = cubic.iter().map(|x| x.to_fixed(p)).collect();
    let roots = approx_roots_fixed(&fixed, p);
    let (_, spread) = moduli_spread(&roots, p);
    Ok(spread < 1e-20)
}

/// Integer cubic obtained from the surface by replacing √3 with `p/q` and
/// multiplying through by `q`.
pub fn sqrt3_surface_member(a: i64, b: i64, c: i64, conv: &Convergent) -> IntPolynomial {
    let cubic = sqrt3_surface_cubic(a, b, c);
    let coeffs = cubic
        .iter()
        .map(|x| {
            let v = x.a.numer() * &conv.q + x.b.numer() * &conv.p;
            debug_assert!(x.a.is_integer() && x.b.is_integer());
            v
        })
        .collect();
    IntPolynomial::new(coeffs)
}

/// `Some(λ)` when `u = λ·v` coefficientwise in `Q(√D)`.
pub fn proportional(u: &[RealQuad], v: &[RealQuad]) -> Option<RealQuad> {
    if u.len() != v.len() {
        return None;
    }
    let k = v.iter().position(|x| !x.is_zero())?;
    let lambda = &u[k] * &v[k].inv()?;
    u.iter().zip(v).all(|(x, y)| (&(&lambda * y) - x).is_zero()).then_some(lambda)
}
