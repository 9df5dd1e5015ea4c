//! Certified isolation of all complex roots of an integer polynomial.
//!
//! Approximations come from Aberth iterations (first in `f64`, then in big
//! fixed point). Each candidate set is certified with the Weierstrass
//! inclusion: with `W_j = P(z_j) / (a_d ∏_{k≠j} (z_j − z_k))` every root lies
//! in the union of the discs `D(z_j, d|W_j|)`, and a disc disjoint from the
//! others holds exactly one root. The test runs in exact integer arithmetic.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::fixed::{bigint_from_f64_scaled, div_ceil, isqrt_ceil, isqrt_floor, pow2, Cx, Dyadic};
use crate::poly::{has_repeated_root, IntPolynomial};

/// Default ceiling on working precision, in bits.
pub const DEFAULT_PRECISION_CEILING: u32 = 4096;

const START_PRECISION: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RootKind {
    Real,
    /// Index of the conjugate partner.
    Conjugate(usize),
}

/// A disc `D(center, radius)` known to contain exactly one root.
///
/// Center and radius are fixed-point numbers at the scale of the owning
/// [`RootSet`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootBall {
    pub center: Cx,
    pub radius: BigInt,
    pub kind: RootKind,
}

impl RootBall {
    pub fn is_real(&self) -> bool {
        self.kind == RootKind::Real
    }
}

#[derive(Clone, Debug)]
pub struct RootSet {
    pub source: IntPolynomial,
    pub balls: Vec<RootBall>,
    pub precision_bits: u32,
}

impl RootSet {
    pub fn center_f64(&self, i: usize) -> Complex64 {
        let (re, im) = self.balls[i].center.to_f64(self.precision_bits);
        Complex64::new(re, im)
    }

    pub fn radius(&self, i: usize) -> Dyadic {
        Dyadic::new(self.balls[i].radius.clone(), self.precision_bits)
    }

    pub fn max_radius(&self) -> Dyadic {
        let m = self.balls.iter().map(|b| b.radius.clone()).max().unwrap_or_default();
        Dyadic::new(m, self.precision_bits)
    }

    pub fn real_count(&self) -> usize {
        self.balls.iter().filter(|b| b.is_real()).count()
    }

    /// Certified bounds `[lo, hi]` on `|α_i|`, at the set's scale.
    pub fn modulus_bounds(&self, i: usize) -> (BigInt, BigInt) {
        let b = &self.balls[i];
        if b.is_real() {
            let a = b.center.re.abs();
            let lo = (&a - &b.radius).max(BigInt::zero());
            return (lo, a + &b.radius);
        }
        let n = b.center.norm_sq();
        let lo = (isqrt_floor(&n) - &b.radius).max(BigInt::zero());
        (lo, isqrt_ceil(&n) + &b.radius)
    }
}

/// Tuning for [`certified_roots_with`].
#[derive(Clone, Copy, Debug)]
pub struct RootOptions {
    /// Every radius must end up `≤ 2^-target_bits`.
    pub target_bits: i64,
    pub ceiling_bits: u32,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions { target_bits: 53, ceiling_bits: DEFAULT_PRECISION_CEILING }
    }
}

/// Isolate all roots with radii at most `target_radius`.
pub fn certified_roots(p: &IntPolynomial, target_radius: f64) -> Result<RootSet> {
    if !(target_radius > 0.0) {
        return Err(Error::InvalidParameter("target radius must be positive".into()));
    }
    let target_bits = (-target_radius.log2()).ceil() as i64;
    certified_roots_with(p, RootOptions { target_bits, ..Default::default() })
}

pub fn certified_roots_with(p: &IntPolynomial, opts: RootOptions) -> Result<RootSet> {
    let mut solver = RootSolver::new(p, opts.ceiling_bits)?;
    let mut prec = START_PRECISION.max((opts.target_bits + 16).max(0) as u32);
    loop {
        if let Some(set) = solver.try_precision(prec) {
            let bound = if opts.target_bits <= prec as i64 {
                pow2((prec as i64 - opts.target_bits) as u32)
            } else {
                BigInt::zero()
            };
            if set.balls.iter().all(|b| b.radius <= bound) {
                return Ok(set);
            }
        }
        if prec >= opts.ceiling_bits {
            return Err(Error::PrecisionCeiling(opts.ceiling_bits));
        }
        prec = (prec * 2).min(opts.ceiling_bits);
    }
}

/// Incremental solver: keeps its approximations between precision levels.
#[derive(Clone, Debug)]
pub struct RootSolver {
    poly: IntPolynomial,
    approx: Vec<Cx>,
    approx_prec: u32,
    ceiling: u32,
    last: Option<RootSet>,
}

impl RootSolver {
    pub fn new(p: &IntPolynomial, ceiling: u32) -> Result<Self> {
        if p.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if p.degree() < 1 {
            return Err(Error::DegreeTooSmall { degree: 0, what: "root isolation".into() });
        }
        if has_repeated_root(p) {
            return Err(Error::RepeatedRoot);
        }
        Ok(Self::new_squarefree(p, ceiling))
    }

    /// Skip the repeated-root check (the caller has done it).
    pub fn new_squarefree(p: &IntPolynomial, ceiling: u32) -> Self {
        RootSolver {
            poly: p.clone(),
            approx: Vec::new(),
            approx_prec: 0,
            ceiling,
            last: None,
        }
    }

    pub fn poly(&self) -> &IntPolynomial {
        &self.poly
    }

    pub fn ceiling(&self) -> u32 {
        self.ceiling
    }

    /// Certified roots at working precision `≥ prec`, escalating past failed levels.
    pub fn at_least(&mut self, prec: u32) -> Result<RootSet> {
        if let Some(s) = &self.last {
            if s.precision_bits >= prec {
                return Ok(s.clone());
            }
        }
        let mut p = prec.max(START_PRECISION);
        loop {
            if let Some(set) = self.try_precision(p) {
                return Ok(set);
            }
            if p >= self.ceiling {
                return Err(Error::PrecisionCeiling(self.ceiling));
            }
            p = (p * 2).min(self.ceiling);
        }
    }

    /// One attempt at a fixed precision. `None` means certification failed.
    pub fn try_precision(&mut self, prec: u32) -> Option<RootSet> {
        let d = self.poly.degree();
        if self.approx.is_empty() {
            self.seed(prec);
        } else if prec != self.approx_prec {
            let old = self.approx_prec;
            self.approx = self
                .approx
                .iter()
                .map(|z| if prec > old { z.shl(prec - old) } else { z.shr(old - prec) })
                .collect();
            self.approx_prec = prec;
        }
        let coeffs: Vec<BigInt> = self.poly.coeffs().iter().map(|c| c << prec).collect();
        let cap = if self.approx_prec == prec && self.last.is_none() { 400 } else { 80 };
        aberth_fixed(&coeffs, &mut self.approx, prec, cap);
        let centers = symmetrize(&self.approx, prec)?;
        let radii = certify(&self.poly, &centers, prec)?;
        let balls = (0..d)
            .map(|i| RootBall {
                center: centers[i].0.clone(),
                radius: radii[i].clone(),
                kind: centers[i].1,
            })
            .collect();
        let set = RootSet { source: self.poly.clone(), balls, precision_bits: prec };
        self.approx = centers.into_iter().map(|c| c.0).collect();
        self.last = Some(set.clone());
        Some(set)
    }

    fn seed(&mut self, prec: u32) {
        let d = self.poly.degree();
        let f: Option<Vec<f64>> = self
            .poly
            .coeffs()
            .iter()
            .map(|c| c.to_f64().filter(|x| x.is_finite() && x.abs() < 1e250))
            .collect();
        self.approx_prec = prec;
        if let Some(f) = f {
            let (roots, _) = aberth_f64(&f);
            if roots.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
                self.approx = roots
                    .iter()
                    .map(|z| Cx::new(bigint_from_f64_scaled(z.re, prec), bigint_from_f64_scaled(z.im, prec)))
                    .collect();
                return;
            }
        }
        // Circle of radius given by the coefficient bound, in fixed point.
        let h = self.poly.height();
        let lead = self.poly.leading().abs();
        let r = (h / lead + 1u32).to_f64().unwrap_or(1e300).min(1e300);
        self.approx = (0..d)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / d as f64 + 0.4;
                Cx::new(
                    bigint_from_f64_scaled(r.sqrt() * t.cos(), prec),
                    bigint_from_f64_scaled(r.sqrt() * t.sin(), prec),
                )
            })
            .collect();
    }
}

/// Uncertified roots of a polynomial whose coefficients are given in fixed
/// point at scale `p` (ascending order), refined to about `p` bits.
pub fn approx_roots_fixed(coeffs: &[BigInt], p: u32) -> Vec<Cx> {
    let f: Vec<f64> = coeffs.iter().map(|c| Dyadic::new(c.clone(), p).to_f64()).collect();
    let (roots, _) = aberth_f64(&f);
    let mut z: Vec<Cx> = roots
        .iter()
        .map(|z| Cx::new(bigint_from_f64_scaled(z.re, p), bigint_from_f64_scaled(z.im, p)))
        .collect();
    aberth_fixed(coeffs, &mut z, p, 400);
    z
}

fn horner_fixed(coeffs: &[BigInt], z: &Cx, p: u32) -> (Cx, Cx) {
    // value and derivative, both at scale p; coeffs already at scale p
    let d = coeffs.len() - 1;
    let mut v = Cx::real(coeffs[d].clone());
    let mut dv = Cx::zero();
    for k in (0..d).rev() {
        dv = dv.mul_fixed(z, p).add(&v);
        v = v.mul_fixed(z, p);
        v.re += &coeffs[k];
    }
    (v, dv)
}

/// Aberth–Ehrlich iteration in fixed point (Gauss–Seidel sweep order).
fn aberth_fixed(coeffs: &[BigInt], z: &mut [Cx], p: u32, cap: usize) {
    let d = z.len();
    let one = pow2(p);
    let tol = BigInt::from(4);
    let noise = pow2(p / 2);
    let mut prev: Option<BigInt> = None;
    for _ in 0..cap {
        let mut biggest = BigInt::zero();
        for i in 0..d {
            let (v, dv) = horner_fixed(coeffs, &z[i], p);
            let Some(n) = v.div_fixed(&dv, p) else {
                z[i].re += 1 + (&z[i].re.abs() >> 20u32);
                biggest = biggest.max(tol.clone() + 1);
                continue;
            };
            let mut s = Cx::zero();
            for j in 0..d {
                if j != i {
                    let diff = z[i].sub(&z[j]);
                    if let Some(inv) = Cx::real(one.clone()).div_fixed(&diff, p) {
                        s = s.add(&inv);
                    }
                }
            }
            let mut den = n.mul_fixed(&s, p).neg();
            den.re += &one;
            let w = n.div_fixed(&den, p).unwrap_or(n);
            biggest = biggest.max(w.l1());
            z[i] = z[i].sub(&w);
        }
        if biggest <= tol {
            break;
        }
        // rounding noise floor: corrections stopped shrinking
        if biggest < noise && prev.as_ref().is_some_and(|q| &biggest * 2u32 > *q) {
            break;
        }
        prev = Some(biggest);
    }
}

/// Force exact conjugate symmetry: near-real approximations become real,
/// the rest are paired with their mirror image.
fn symmetrize(z: &[Cx], p: u32) -> Option<Vec<(Cx, RootKind)>> {
    let d = z.len();
    let tol = pow2(p / 2);
    let mut out: Vec<Option<(Cx, RootKind)>> = vec![None; d];
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for (i, zi) in z.iter().enumerate() {
        if zi.im.abs() <= tol {
            out[i] = Some((Cx::real(zi.re.clone()), RootKind::Real));
        } else if zi.im.is_positive() {
            upper.push(i);
        } else {
            lower.push(i);
        }
    }
    if upper.len() != lower.len() {
        return None;
    }
    let mut used = vec![false; lower.len()];
    for &i in &upper {
        let target = z[i].conj();
        let (k, _) = lower
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, &j)| (k, z[j].sub(&target).norm_sq()))
            .min_by(|a, b| a.1.cmp(&b.1))?;
        used[k] = true;
        let j = lower[k];
        let c = Cx::new((&z[i].re + &z[j].re) >> 1u32, (&z[i].im - &z[j].im) >> 1u32);
        out[j] = Some((c.conj(), RootKind::Conjugate(i)));
        out[i] = Some((c, RootKind::Conjugate(j)));
    }
    out.into_iter().collect()
}

/// Weierstrass radii (at scale `p`, rounded up) when the discs are pairwise
/// disjoint, `None` otherwise.
fn certify(poly: &IntPolynomial, centers: &[(Cx, RootKind)], p: u32) -> Option<Vec<BigInt>> {
    let d = poly.degree();
    let c = poly.coeffs();
    let lead2 = c[d].pow(2);
    let d2 = BigInt::from(d * d);
    let mut radii = Vec::with_capacity(d);
    for j in 0..d {
        let zj = &centers[j].0;
        // E = sum a_i Z^i 2^{p(d-i)} = 2^{pd} P(z)
        let mut e = Cx::real(c[d].clone());
        for i in (0..d).rev() {
            e = e.mul(zj);
            e.re += &c[i] << (p * (d - i) as u32);
        }
        let mut f = Cx::real(BigInt::from(1));
        for (k, zk) in centers.iter().enumerate() {
            if k != j {
                f = f.mul(&zj.sub(&zk.0));
            }
        }
        let fn2 = f.norm_sq();
        if fn2.is_zero() {
            return None;
        }
        let q = div_ceil(&(&d2 * e.norm_sq()), &(&lead2 * fn2));
        radii.push(isqrt_ceil(&q));
    }
    for i in 0..d {
        for j in i + 1..d {
            let dist = centers[i].0.sub(&centers[j].0).norm_sq();
            let r = &radii[i] + &radii[j];
            if dist <= &r * &r {
                return None;
            }
        }
    }
    Some(radii)
}

/// Plain double-precision Aberth iteration. Returns the approximations and
/// whether the iteration met its stopping rule.
pub fn aberth_f64(coeffs: &[f64]) -> (Vec<Complex64>, bool) {
    let d = coeffs.len() - 1;
    let mut z = vec![Complex64::new(0.0, 0.0); d];
    let converged = aberth_f64_into(coeffs, &mut z);
    (z, converged)
}

/// Allocation-free variant for the search fast path; `z.len()` must be the degree.
pub fn aberth_f64_into(coeffs: &[f64], z: &mut [Complex64]) -> bool {
    let d = coeffs.len() - 1;
    debug_assert_eq!(z.len(), d);
    let lead = coeffs[d];
    let a0 = coeffs[0].abs();
    let mut radius = if a0 > 0.0 { (a0 / lead.abs()).powf(1.0 / d as f64) } else { 1.0 };
    if !(radius.is_finite() && radius > 0.0) {
        radius = 1.0;
    }
    let shift = -coeffs[d - 1] / (d as f64 * lead);
    for (k, zk) in z.iter_mut().enumerate() {
        let t = 2.0 * std::f64::consts::PI * k as f64 / d as f64 + 0.4;
        *zk = Complex64::new(shift + radius * t.cos(), radius * t.sin());
    }
    aberth_f64_polish(coeffs, z, 500)
}

/// Aberth sweeps starting from the approximations already in `z`.
pub fn aberth_f64_polish(coeffs: &[f64], z: &mut [Complex64], max_sweeps: usize) -> bool {
    let d = coeffs.len() - 1;
    let lead = coeffs[d];
    for _ in 0..max_sweeps {
        let mut done = true;
        for i in 0..d {
            let zi = z[i];
            let mut v = Complex64::new(lead, 0.0);
            let mut dv = Complex64::new(0.0, 0.0);
            for k in (0..d).rev() {
                dv = dv * zi + v;
                v = v * zi + coeffs[k];
            }
            if v.norm_sqr() == 0.0 {
                continue;
            }
            let n = v / dv;
            let mut s = Complex64::new(0.0, 0.0);
            for (j, zj) in z.iter().enumerate() {
                if j != i {
                    s += (zi - zj).inv();
                }
            }
            let w = n / (Complex64::new(1.0, 0.0) - n * s);
            if !(w.re.is_finite() && w.im.is_finite()) {
                continue;
            }
            z[i] = zi - w;
            if w.norm() > 1e-15 * z[i].norm().max(1e-300) {
                done = false;
            }
        }
        if done {
            return true;
        }
    }
    false
}
