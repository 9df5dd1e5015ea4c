//! Perturbed roots of `R(X) − εQ(X)` as power series in `ε`, their squared
//! moduli, and the systems forcing two moduli to agree to high order.
//!
//! Coefficients live in `A[ω]`, where `A` is a ring of sparse multivariate
//! polynomials over `Q` and `ω` is a root of a factor `X² + sX + p` (or a
//! linear factor) of `R`. Writing `t = D·u` with `D = R'(ω)` and
//! `η = ε/D²` turns the root equation into
//!
//! `u = η Σ_j Q_j D^j u^j − Σ_{j≥2} r_j D^{j−2} u^j`,
//!
//! which can be solved order by order without dividing, so the same code
//! serves symbolic and concrete coefficients. The root is then
//! `ω + Σ_k u_k ε^k / D^{2k−1}`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::fixed::{isqrt_ceil, isqrt_floor, Cx, Dyadic};
use crate::rootfind::{certified_roots_with, RootOptions};
use crate::poly::{IntPolynomial, RatPolynomial};

/// Sparse exponent vector: `(variable, exponent)` sorted by variable.
type Monomial = Vec<(u32, u32)>;

/// Sparse polynomial over `Q` in numbered indeterminates.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    terms: BTreeMap<Monomial, BigRational>,
}

fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push((a[i].0, a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

impl MultiPoly {
    pub fn zero() -> Self {
        MultiPoly::default()
    }

    pub fn constant(c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        MultiPoly { terms }
    }

    pub fn int(c: i64) -> Self {
        MultiPoly::constant(BigRational::from_integer(c.into()))
    }

    pub fn one() -> Self {
        MultiPoly::int(1)
    }

    pub fn var(i: u32) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![(i, 1)], BigRational::one());
        MultiPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value when no indeterminate occurs.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        if k.is_zero() {
            return MultiPoly::zero();
        }
        MultiPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect() }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut r = MultiPoly::one();
        for _ in 0..k {
            r = &r * self;
        }
        r
    }

    /// Replace the listed indeterminates by rational values.
    pub fn substitute(&self, values: &[(u32, BigRational)]) -> Self {
        let mut out = MultiPoly::zero();
        for (m, c) in &self.terms {
            let mut coef = c.clone();
            let mut rest = Vec::new();
            for &(v, e) in m {
                match values.iter().find(|(x, _)| *x == v) {
                    Some((_, val)) => coef *= num_traits::pow(val.clone(), e as usize),
                    None => rest.push((v, e)),
                }
            }
            out.add_term(rest, coef);
        }
        out
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn display(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if k > 0 {
                s.push_str(if neg { " - " } else { " + " });
            } else if neg {
                s.push('-');
            }
            let a = c.abs();
            let unit = a.is_one();
            if !unit || m.is_empty() {
                s.push_str(&rational_str(&a));
            }
            for (j, &(v, e)) in m.iter().enumerate() {
                if !unit || j > 0 {
                    s.push('*');
                }
                let name = names.get(v as usize).cloned().unwrap_or_else(|| format!("x{v}"));
                s.push_str(&name);
                if e > 1 {
                    s.push_str(&format!("^{e}"));
                }
            }
        }
        s
    }
}

pub fn rational_str(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, o: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, o: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, o: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                out.add_term(mono_mul(ma, mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl From<&IntPolynomial> for Vec<MultiPoly> {
    fn from(p: &IntPolynomial) -> Self {
        p.coeffs().iter().map(|c| MultiPoly::constant(BigRational::from_integer(c.clone()))).collect()
    }
}

// ---------------------------------------------------------------------------
// the extension A[ω]

/// Element `u + vω`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Ext {
    pub u: MultiPoly,
    pub v: MultiPoly,
}

impl Ext {
    pub fn zero() -> Self {
        Ext::default()
    }

    pub fn scalar(u: MultiPoly) -> Self {
        Ext { u, v: MultiPoly::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }

    pub fn add(&self, o: &Ext) -> Ext {
        Ext { u: &self.u + &o.u, v: &self.v + &o.v }
    }

    pub fn sub(&self, o: &Ext) -> Ext {
        Ext { u: &self.u - &o.u, v: &self.v - &o.v }
    }

    pub fn neg(&self) -> Ext {
        Ext { u: -&self.u, v: -&self.v }
    }

    fn terms(&self) -> usize {
        self.u.len() + self.v.len()
    }

    /// Rational components when no indeterminate occurs.
    pub fn as_rationals(&self) -> Option<(BigRational, BigRational)> {
        Some((self.u.as_constant()?, self.v.as_constant()?))
    }
}

/// Base point of an expansion: a rational (or symbolic) root of a linear
/// factor, or a root `ω` of `X² + sX + p` with `ω̄ = −s − ω`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BaseRoot {
    Linear(MultiPoly),
    Quadratic { s: MultiPoly, p: MultiPoly },
}

impl BaseRoot {
    pub fn rational(x: i64) -> Self {
        BaseRoot::Linear(MultiPoly::int(x))
    }

    /// Root of `X² + sX + p` with integer `s`, `p`.
    pub fn quadratic(s: i64, p: i64) -> Self {
        BaseRoot::Quadratic { s: MultiPoly::int(s), p: MultiPoly::int(p) }
    }

    /// `i`, a root of `X² + 1`.
    pub fn i() -> Self {
        BaseRoot::quadratic(0, 1)
    }

    pub fn omega(&self) -> Ext {
        match self {
            BaseRoot::Linear(w) => Ext::scalar(w.clone()),
            BaseRoot::Quadratic { .. } => Ext { u: MultiPoly::zero(), v: MultiPoly::one() },
        }
    }

    pub fn mul(&self, a: &Ext, b: &Ext) -> Ext {
        match self {
            BaseRoot::Linear(_) => Ext::scalar(&a.u * &b.u),
            BaseRoot::Quadratic { s, p } => {
                let vv = &a.v * &b.v;
                Ext {
                    u: &(&a.u * &b.u) - &(p * &vv),
                    v: &(&(&a.u * &b.v) + &(&a.v * &b.u)) - &(s * &vv),
                }
            }
        }
    }

    pub fn conj(&self, a: &Ext) -> Ext {
        match self {
            BaseRoot::Linear(_) => a.clone(),
            BaseRoot::Quadratic { s, .. } => Ext { u: &a.u - &(s * &a.v), v: -&a.v },
        }
    }

    fn pow(&self, a: &Ext, k: usize) -> Ext {
        let mut r = Ext::scalar(MultiPoly::one());
        for _ in 0..k {
            r = self.mul(&r, a);
        }
        r
    }

    /// Inverse in `Q(ω)`; concrete coefficients only.
    pub fn inv(&self, a: &Ext) -> Result<Ext> {
        let c = self.conj(a);
        let n = self.mul(a, &c);
        let n = n
            .u
            .as_constant()
            .filter(|x| !x.is_zero() && n.v.is_zero())
            .ok_or_else(|| Error::Series("cannot invert a symbolic or zero element".into()))?;
        let k = BigRational::one() / n;
        Ok(Ext { u: c.u.scale(&k), v: c.v.scale(&k) })
    }

    /// Renders a concrete element; `ω` is written `w`, or `i` for `X² + 1`.
    pub fn render(&self, a: &Ext) -> String {
        let sym = match self {
            BaseRoot::Quadratic { s, p } if s.is_zero() && p == &MultiPoly::one() => "i",
            _ => "w",
        };
        let times = |v: &BigRational| {
            if v.is_one() {
                sym.to_string()
            } else {
                format!("{}*{sym}", rational_str(v))
            }
        };
        match a.as_rationals() {
            Some((u, v)) if v.is_zero() => rational_str(&u),
            Some((u, v)) if u.is_zero() && v.is_negative() => format!("-{}", times(&-v)),
            Some((u, v)) if u.is_zero() => times(&v),
            Some((u, v)) => {
                let sign = if v.is_negative() { '-' } else { '+' };
                format!("{} {sign} {}", rational_str(&u), times(&v.abs()))
            }
            None => format!("({}) + ({})*{sym}", a.u.display(&[]), a.v.display(&[])),
        }
    }
}

/// Coefficients of `F(ω + t)` in powers of `t`.
fn taylor_at(f: &[MultiPoly], base: &BaseRoot) -> Vec<Ext> {
    let n = f.len();
    let w = base.omega();
    let mut wp = vec![Ext::scalar(MultiPoly::one())];
    for k in 1..n {
        wp.push(base.mul(&wp[k - 1], &w));
    }
    (0..n)
        .map(|j| {
            let mut acc = Ext::zero();
            for (i, fi) in f.iter().enumerate().skip(j) {
                if fi.is_zero() {
                    continue;
                }
                let c = BigRational::from_integer(binomial(BigInt::from(i), BigInt::from(j)));
                let t = wp[i - j].clone();
                acc = acc.add(&Ext { u: &t.u * &fi.scale(&c), v: &t.v * &fi.scale(&c) });
            }
            acc
        })
        .collect()
}

fn series_mul(base: &BaseRoot, a: &[Ext], b: &[Ext], n: usize) -> Vec<Ext> {
    let mut out = vec![Ext::zero(); n + 1];
    for (i, ai) in a.iter().enumerate().take(n + 1) {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(n + 1 - i) {
            if bj.is_zero() {
                continue;
            }
            out[i + j] = out[i + j].add(&base.mul(ai, bj));
        }
    }
    out
}

/// Terms allowed in any single coefficient before giving up.
pub const TERM_LIMIT: usize = 400_000;

/// `(u_0..u_n, D)` for the scaled root series at `base`.
fn scaled_root_series(r: &[MultiPoly], q: &[MultiPoly], base: &BaseRoot, n: usize) -> Result<(Vec<Ext>, Ext)> {
    let rt = taylor_at(r, base);
    if !rt[0].is_zero() {
        return Err(Error::Series("base point is not a root of R".into()));
    }
    let d = rt.get(1).cloned().unwrap_or_default();
    if d.is_zero() {
        return Err(Error::Series("base point is a multiple root of R".into()));
    }
    let qt = taylor_at(q, base);
    let max_j = rt.len().max(qt.len());
    let dpow: Vec<Ext> = (0..=max_j).map(|j| base.pow(&d, j)).collect();
    // fixed coefficients: a_j = Q_j D^j, b_j = r_j D^{j−2}
    let a: Vec<Ext> = qt.iter().enumerate().map(|(j, c)| base.mul(c, &dpow[j])).collect();
    let b: Vec<Ext> = rt
        .iter()
        .enumerate()
        .map(|(j, c)| if j >= 2 { base.mul(c, &dpow[j - 2]) } else { Ext::zero() })
        .collect();

    let mut u = vec![Ext::zero(); n + 1];
    for k in 1..=n {
        // powers of u truncated at order k; u_k is still zero here, which
        // only affects u^1 at order k (not used) and higher powers (not reached)
        let mut pows: Vec<Vec<Ext>> = vec![{
            let mut one = vec![Ext::zero(); k + 1];
            one[0] = Ext::scalar(MultiPoly::one());
            one
        }];
        for j in 1..max_j.min(k + 1) {
            let next = series_mul(base, &pows[j - 1], &u[..=k], k);
            pows.push(next);
        }
        let mut uk = Ext::zero();
        for (j, aj) in a.iter().enumerate() {
            if j < pows.len() && !aj.is_zero() {
                uk = uk.add(&base.mul(aj, &pows[j][k - 1]));
            }
        }
        for (j, bj) in b.iter().enumerate().skip(2) {
            if j < pows.len() && !bj.is_zero() {
                uk = uk.sub(&base.mul(bj, &pows[j][k]));
            }
        }
        if uk.terms() > TERM_LIMIT {
            return Err(Error::Series(format!("expression blow-up at order {k}")));
        }
        u[k] = uk;
    }
    Ok((u, d))
}

/// Truncated expansion `X_ω(ε) = Σ x_k ε^k` with concrete coefficients in `Q(ω)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesExpansion {
    pub base: BaseRoot,
    pub coeffs: Vec<Ext>,
    /// Coefficients are exact through this power of `ε`.
    pub order: usize,
}

impl SeriesExpansion {
    pub fn render(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| self.base.render(c)).collect()
    }

    /// Coefficient `k` as `(re-part u, ω-part v)` rationals.
    pub fn coeff(&self, k: usize) -> (BigRational, BigRational) {
        self.coeffs[k].as_rationals().expect("concrete series")
    }
}

/// Root of `R(X) − εQ(X)` near `ω`, through `ε^order`. With `ε = 1/M`
/// this is the root of `M·R − Q`.
pub fn invert_series(r: &IntPolynomial, q: &IntPolynomial, base: &BaseRoot, order: usize) -> Result<SeriesExpansion> {
    if order > 12 {
        return Err(Error::Series("order above 12 is not supported".into()));
    }
    expand(r, q, base, order)
}

fn expand(r: &IntPolynomial, q: &IntPolynomial, base: &BaseRoot, order: usize) -> Result<SeriesExpansion> {
    let rc: Vec<MultiPoly> = r.into();
    let qc: Vec<MultiPoly> = q.into();
    let (u, d) = scaled_root_series(&rc, &qc, base, order)?;
    let dinv = base.inv(&d)?;
    let mut coeffs = vec![base.omega()];
    // x_k = u_k D^{−(2k−1)}: start with D, then divide by D² each step
    let mut scale = d.clone();
    let dinv2 = base.mul(&dinv, &dinv);
    for uk in u.iter().skip(1) {
        scale = base.mul(&scale, &dinv2);
        coeffs.push(base.mul(uk, &scale));
    }
    Ok(SeriesExpansion { base: base.clone(), coeffs, order })
}

/// `|X|²` from the expansion `x` and the expansion `y` of the conjugate
/// root. Every coefficient must come out real.
pub fn modulus_sq_series(x: &SeriesExpansion, y: &SeriesExpansion) -> Result<Vec<BigRational>> {
    if x.order != y.order {
        return Err(Error::Series("truncation orders differ".into()));
    }
    let n = x.order;
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut acc = Ext::zero();
        for i in 0..=k {
            acc = acc.add(&x.base.mul(&x.coeffs[i], &y.coeffs[k - i]));
        }
        let (u, v) = acc.as_rationals().expect("concrete");
        if !v.is_zero() {
            return Err(Error::Series(format!("nonzero imaginary part at order {k}")));
        }
        out.push(u);
    }
    Ok(out)
}

/// The expansion at the conjugate base point (coefficientwise conjugate).
pub fn conjugate_expansion(x: &SeriesExpansion) -> SeriesExpansion {
    SeriesExpansion {
        base: x.base.clone(),
        coeffs: x.coeffs.iter().map(|c| x.base.conj(c)).collect(),
        order: x.order,
    }
}

/// `|X|²` of a single expansion.
pub fn modulus_sq(x: &SeriesExpansion) -> Result<Vec<BigRational>> {
    modulus_sq_series(x, &conjugate_expansion(x))
}

/// `N^{2k} c_k` for `k = 0..=n` together with `N = D·D̄`; polynomial in the
/// indeterminates.
fn scaled_modulus_coeffs(
    r: &[MultiPoly],
    q: &[MultiPoly],
    base: &BaseRoot,
    n: usize,
) -> Result<(Vec<MultiPoly>, MultiPoly)> {
    let (u, d) = scaled_root_series(r, q, base, n)?;
    let w = base.omega();
    let wc = base.conj(&w);
    let dc = base.conj(&d);
    let uc: Vec<Ext> = u.iter().map(|x| base.conj(x)).collect();
    let dp: Vec<Ext> = (0..=2 * n + 1).map(|j| base.pow(&d, j)).collect();
    let dcp: Vec<Ext> = (0..=2 * n + 1).map(|j| base.pow(&dc, j)).collect();
    let real = |e: Ext, what: &str| -> Result<MultiPoly> {
        if !e.v.is_zero() {
            return Err(Error::Series(format!("{what} is not real")));
        }
        Ok(e.u)
    };
    let norm = real(base.mul(&d, &dc), "N(D)")?;
    let mut out = vec![real(base.mul(&w, &wc), "|ω|²")?];
    for k in 1..=n {
        let mut acc = base.mul(&base.mul(&w, &uc[k]), &base.mul(&dp[2 * k], &dc));
        acc = acc.add(&base.mul(&base.mul(&u[k], &wc), &base.mul(&d, &dcp[2 * k])));
        for i in 1..k {
            let t = base.mul(&u[i], &uc[k - i]);
            acc = acc.add(&base.mul(&t, &base.mul(&dp[2 * (k - i) + 1], &dcp[2 * i + 1])));
        }
        if acc.terms() > TERM_LIMIT {
            return Err(Error::Series(format!("expression blow-up at order {k}")));
        }
        out.push(real(acc, &format!("c_{k}"))?);
    }
    Ok((out, norm))
}

/// `R`, `Q` (ascending coefficients in `A`) and two base roots of `R`.
#[derive(Clone, Debug)]
pub struct PerturbSetup {
    pub names: Vec<String>,
    pub r: Vec<MultiPoly>,
    pub q: Vec<MultiPoly>,
    pub roots: [BaseRoot; 2],
}

impl PerturbSetup {
    pub fn concrete(r: &IntPolynomial, q: &IntPolynomial, a: BaseRoot, b: BaseRoot) -> Self {
        PerturbSetup { names: Vec::new(), r: r.into(), q: q.into(), roots: [a, b] }
    }

    /// `Q` replaced by a generic polynomial of degree `deg` with
    /// coefficients `q0..q{deg}` (or monic when `monic`).
    pub fn with_symbolic_q(mut self, deg: usize, monic: bool) -> Self {
        let first = self.names.len() as u32;
        let top = if monic { deg } else { deg + 1 };
        self.q = (0..top).map(|i| MultiPoly::var(first + i as u32)).collect();
        if monic {
            self.q.push(MultiPoly::one());
        }
        for i in 0..top {
            self.names.push(format!("q{i}"));
        }
        self
    }

    pub fn degree(&self) -> usize {
        self.r.len().max(self.q.len()) - 1
    }

    /// Index of a named indeterminate.
    pub fn var(&self, name: &str) -> Option<u32> {
        self.names.iter().position(|n| n == name).map(|i| i as u32)
    }

    /// Values for the `q` indeterminates from a concrete `Q`.
    pub fn q_values(&self, q: &IntPolynomial) -> Vec<(u32, BigRational)> {
        (0..=q.degree())
            .filter_map(|i| self.var(&format!("q{i}")).map(|v| (v, BigRational::from_integer(q.coeff(i)))))
            .collect()
    }
}

/// `R₅ = (X² + aX + r²)(X² + bX + r²)`; symbolic in `r, a, b` when `params`
/// is `None`. The base roots are one root of each quadratic factor.
pub fn r5_setup(params: Option<(i64, i64, i64)>) -> PerturbSetup {
    let (r, a, b, names) = match params {
        Some((r, a, b)) => (MultiPoly::int(r), MultiPoly::int(a), MultiPoly::int(b), Vec::new()),
        None => (
            MultiPoly::var(0),
            MultiPoly::var(1),
            MultiPoly::var(2),
            vec!["r".to_string(), "a".to_string(), "b".to_string()],
        ),
    };
    let r2 = &r * &r;
    let f1 = [r2.clone(), a.clone(), MultiPoly::one()];
    let f2 = [r2.clone(), b.clone(), MultiPoly::one()];
    let mut prod = vec![MultiPoly::zero(); 5];
    for (i, x) in f1.iter().enumerate() {
        for (j, y) in f2.iter().enumerate() {
            prod[i + j] = &prod[i + j] + &(x * y);
        }
    }
    PerturbSetup {
        names,
        r: prod,
        q: vec![MultiPoly::zero()],
        roots: [BaseRoot::Quadratic { s: a, p: r2.clone() }, BaseRoot::Quadratic { s: b, p: r2 }],
    }
}

/// The polynomials `N₁^{2k}N₂^{2k}(c_{1,k} − c_{2,k})` for `k = 1..=depth`.
/// They vanish exactly when the two squared moduli agree at order `k`.
pub fn cancellation_system(setup: &PerturbSetup, depth: usize) -> Result<Vec<MultiPoly>> {
    if depth > setup.degree() + 2 {
        return Err(Error::Series(format!(
            "depth {depth} exceeds degree + 2 = {}",
            setup.degree() + 2
        )));
    }
    let (c1, n1) = scaled_modulus_coeffs(&setup.r, &setup.q, &setup.roots[0], depth)?;
    let (c2, n2) = scaled_modulus_coeffs(&setup.r, &setup.q, &setup.roots[1], depth)?;
    let mut out = Vec::with_capacity(depth);
    let (mut p1, mut p2) = (MultiPoly::one(), MultiPoly::one());
    let (n1sq, n2sq) = (&n1 * &n1, &n2 * &n2);
    for k in 1..=depth {
        p1 = &p1 * &n1sq;
        p2 = &p2 * &n2sq;
        out.push(&(&c1[k] * &p2) - &(&c2[k] * &p1));
    }
    Ok(out)
}

/// First order `k` whose equation fails after substitution, `None` when all
/// vanish. Every polynomial must have become a constant.
pub fn first_mismatch(system: &[MultiPoly], values: &[(u32, BigRational)]) -> Result<Option<usize>> {
    for (i, e) in system.iter().enumerate() {
        let c = e
            .substitute(values)
            .as_constant()
            .ok_or_else(|| Error::Series("indeterminates left after substitution".into()))?;
        if !c.is_zero() {
            return Ok(Some(i + 1));
        }
    }
    Ok(None)
}

/// Order at which the squared moduli of the two perturbed roots first differ
/// (concrete `R`, `Q`), searched up to `depth`.
pub fn cancellation_order(
    r: &IntPolynomial,
    q: &IntPolynomial,
    a: BaseRoot,
    b: BaseRoot,
    depth: usize,
) -> Result<Option<usize>> {
    let setup = PerturbSetup::concrete(r, q, a, b);
    let sys = cancellation_system(&setup, depth)?;
    first_mismatch(&sys, &[])
}

/// True when `Q` is zero or shares a factor with `R`; such perturbations are
/// excluded because the common roots do not move at all.
pub fn common_factor_guard(r: &IntPolynomial, q: &IntPolynomial) -> bool {
    if q.is_zero() {
        return true;
    }
    let g = RatPolynomial::from(r).gcd(&RatPolynomial::from(q));
    g.degree() > 0
}

/// Confirms that the published degree-6 `Q` fails the system for the base
/// pair `(1, (1+i√3)/2)` at some order up to 6.
pub fn check_other_roots_deg6() -> Result<bool> {
    let r = IntPolynomial::from_descending(&[1, 0, 0, 0, 0, 0, -1]);
    let q = crate::families::q6();
    let order = cancellation_order(&r, &q, BaseRoot::rational(1), BaseRoot::quadratic(-1, 1), 6)?;
    Ok(matches!(order, Some(k) if k <= 6))
}

/// Substitutes the expansion back into `R(X) − εQ(X)`; returns the first
/// order `≤ order` with a nonzero coefficient (`None` for an exact root series).
pub fn composition_residual(r: &IntPolynomial, q: &IntPolynomial, x: &SeriesExpansion) -> Option<usize> {
    let n = x.order;
    let base = &x.base;
    let eval = |f: &IntPolynomial| -> Vec<Ext> {
        // Horner over truncated series
        let mut acc = vec![Ext::zero(); n + 1];
        for c in f.coeffs().iter().rev() {
            acc = series_mul(base, &acc, &x.coeffs, n);
            acc[0] = acc[0].add(&Ext::scalar(MultiPoly::constant(BigRational::from_integer(c.clone()))));
        }
        acc
    };
    let rv = eval(r);
    let qv = eval(q);
    (0..=n).find(|&k| {
        let t = if k == 0 { rv[0].clone() } else { rv[k].sub(&qv[k - 1]) };
        !t.is_zero()
    })
}

/// Outcome of comparing a truncated series with the roots of `M·R − Q`.
#[derive(Clone, Debug)]
pub struct CrossCheck {
    /// Upper bound on the distance from the series value to the nearest root.
    pub distance: f64,
    /// `10·max(1, |x_{order+1}|)·M^{−(order+1)}`, with the next coefficient
    /// computed exactly.
    pub allowed: f64,
}

impl CrossCheck {
    pub fn holds(&self) -> bool {
        self.distance <= self.allowed
    }
}

fn rational_fixed(x: &BigRational, p: u32) -> BigInt {
    (x.numer() << p as usize) / x.denom()
}

/// Numeric embeddings of `ω` at scale `p` (both roots of a real quadratic,
/// one of a complex pair since the other gives the conjugate).
fn omega_embeddings(base: &BaseRoot, p: u32) -> Result<Vec<Cx>> {
    let concrete = |m: &MultiPoly| {
        m.as_constant().ok_or_else(|| Error::Series("symbolic base point".into()))
    };
    match base {
        BaseRoot::Linear(w) => Ok(vec![Cx::real(rational_fixed(&concrete(w)?, p))]),
        BaseRoot::Quadratic { s, p: pp } => {
            let (s, pp) = (concrete(s)?, concrete(pp)?);
            let disc = &s * &s - &pp * BigRational::from_integer(4.into());
            let half_s = rational_fixed(&(-s / BigRational::from_integer(2.into())), p);
            let root = |d: &BigRational| {
                let scaled = (d.numer() << (2 * p) as usize) / d.denom();
                isqrt_floor(&scaled) / 2
            };
            if disc.is_negative() {
                Ok(vec![Cx::new(half_s, root(&-disc))])
            } else {
                let r = root(&disc);
                Ok(vec![Cx::real(&half_s + &r), Cx::real(half_s - r)])
            }
        }
    }
}

/// Compares the series at `ε = 1/m` with certified roots of `m·R − Q`.
pub fn numeric_cross_check(r: &IntPolynomial, q: &IntPolynomial, x: &SeriesExpansion, m: i64) -> Result<CrossCheck> {
    let big_m = BigInt::from(m);
    let p_int = &r.scale(&big_m) - q;
    let roots = certified_roots_with(&p_int, RootOptions { target_bits: 200, ..Default::default() })?;
    let prec = roots.precision_bits;
    let inv_m = BigRational::new(BigInt::one(), big_m.clone());
    let (mut su, mut sv) = (BigRational::zero(), BigRational::zero());
    let mut pw = BigRational::one();
    for c in &x.coeffs {
        let (u, v) = c.as_rationals().ok_or_else(|| Error::Series("symbolic series".into()))?;
        su += &u * &pw;
        sv += &v * &pw;
        pw *= &inv_m;
    }
    let (u, v) = (rational_fixed(&su, prec), rational_fixed(&sv, prec));
    let mut best: Option<BigInt> = None;
    for w in omega_embeddings(&x.base, prec)? {
        let val = Cx::real(u.clone()).add(&Cx::new(v.clone(), BigInt::zero()).mul_fixed(&w, prec));
        for b in &roots.balls {
            let d = isqrt_ceil(&val.sub(&b.center).norm_sq()) + &b.radius + 2;
            if best.as_ref().map_or(true, |x| &d < x) {
                best = Some(d);
            }
        }
    }
    let distance = Dyadic::new(best.unwrap_or_default(), prec).to_f64();
    let next = expand(r, q, &x.base, x.order + 1)?;
    let mut lead = 1.0f64;
    for w in omega_embeddings(&x.base, 64)? {
        let (u, v) = next.coeff(x.order + 1);
        let (wr, wi) = w.to_f64(64);
        let (u, v) = (u.to_f64().unwrap_or(0.0), v.to_f64().unwrap_or(0.0));
        lead = lead.max((u + v * wr).hypot(v * wi));
    }
    let allowed = 10.0 * lead * (m as f64).powi(-(x.order as i32 + 1));
    Ok(CrossCheck { distance, allowed })
}

impl fmt::Display for SeriesExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .render()
            .into_iter()
            .enumerate()
            .map(|(k, c)| if k == 0 { c } else { format!("({c})/M^{k}") })
            .collect();
        write!(f, "{} + O(1/M^{})", parts.join(" + "), self.order + 1)
    }
}
