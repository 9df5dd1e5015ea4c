//! Dyadic fixed-point numbers: a big integer mantissa read at scale `2^-p`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

pub fn isqrt_floor(n: &BigInt) -> BigInt {
    if n.sign() != Sign::Plus {
        return BigInt::zero();
    }
    n.sqrt()
}

pub fn isqrt_ceil(n: &BigInt) -> BigInt {
    let s = isqrt_floor(n);
    if &(&s * &s) < n {
        s + 1
    } else {
        s
    }
}

/// `ceil(a / b)` for `b > 0`.
pub fn div_ceil(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_mod_floor(b);
    if r.is_zero() {
        q
    } else {
        q + 1
    }
}

/// `ceil(a / 2^k)`.
pub fn shr_ceil(a: &BigInt, k: u32) -> BigInt {
    -((-a) >> k)
}

pub fn pow2(k: u32) -> BigInt {
    BigInt::one() << k
}

pub fn bigint_from_f64_scaled(x: f64, p: u32) -> BigInt {
    if p >= 60 {
        BigInt::from_f64((x * 2f64.powi(60)).round()).unwrap_or_default() << (p - 60)
    } else {
        BigInt::from_f64((x * 2f64.powi(p as i32)).round()).unwrap_or_default()
    }
}

/// Natural log of `m / 2^p` for positive `m`, in double precision.
pub fn ln_scaled(m: &BigInt, p: u32) -> f64 {
    let bits = m.bits();
    let (top, shift) = if bits > 60 {
        ((m >> (bits - 60)).to_f64().unwrap_or(1.0), bits - 60)
    } else {
        (m.to_f64().unwrap_or(1.0), 0)
    };
    top.ln() + (shift as f64 - p as f64) * std::f64::consts::LN_2
}

fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

fn round_div(num: &BigInt, den: &BigInt) -> BigInt {
    let (q, r) = num.div_mod_floor(den);
    if &(r * 2u32) >= den {
        q + 1
    } else {
        q
    }
}

/// `m / 2^p` in scientific notation with `digits` significant digits,
/// rounded half up, in the style `5.394e-4`.
pub fn format_sci(m: &BigInt, p: u32, digits: usize) -> String {
    if m.is_zero() {
        return format!("{}e0", zero_mantissa(digits));
    }
    let neg = m.is_negative();
    let a = m.abs();
    let digits = digits.max(1);
    let approx = (a.bits() as f64 - p as f64) * std::f64::consts::LOG10_2;
    let mut e = approx.floor() as i64;
    let ten = BigInt::from(10);
    let lower = num_traits::pow(ten.clone(), digits - 1);
    let upper = &lower * 10;
    let mut n;
    for _ in 0..4 {
        let k = digits as i64 - 1 - e;
        n = if k >= 0 {
            round_div(&(&a * num_traits::pow(ten.clone(), k as usize)), &pow2(p))
        } else {
            round_div(&a, &(pow2(p) * num_traits::pow(ten.clone(), (-k) as usize)))
        };
        if n >= upper {
            e += 1;
            continue;
        }
        if n < lower {
            e -= 1;
            continue;
        }
        let s = n.to_string();
        let mant = if digits == 1 {
            s
        } else {
            format!("{}.{}", &s[..1], &s[1..])
        };
        return format!("{}{}e{}", if neg { "-" } else { "" }, mant, e);
    }
    // rounding carried us across a power of ten twice; settle on the upper one
    let s = lower.to_string();
    let mant = if digits == 1 {
        s
    } else {
        format!("{}.{}", &s[..1], &s[1..])
    };
    format!("{}{}e{}", if neg { "-" } else { "" }, mant, e)
}

fn zero_mantissa(digits: usize) -> String {
    if digits <= 1 {
        "0".into()
    } else {
        format!("0.{}", "0".repeat(digits - 1))
    }
}

/// A nonnegative-scale dyadic number `m · 2^-p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    pub mantissa: BigInt,
    pub scale: u32,
}

impl Dyadic {
    pub fn new(mantissa: BigInt, scale: u32) -> Self {
        Dyadic { mantissa, scale }
    }

    pub fn zero() -> Self {
        Dyadic::new(BigInt::zero(), 0)
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.mantissa.is_positive()
    }

    pub fn to_f64(&self) -> f64 {
        if self.mantissa.is_zero() {
            return 0.0;
        }
        let bits = self.mantissa.bits();
        let shift = bits.saturating_sub(64);
        let top = (&self.mantissa >> shift).to_f64().unwrap_or(0.0);
        ldexp(top, shift as i64 - self.scale as i64)
    }

    pub fn ln(&self) -> f64 {
        ln_scaled(&self.mantissa, self.scale)
    }

    pub fn to_sci(&self, digits: usize) -> String {
        format_sci(&self.mantissa, self.scale, digits)
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.mantissa.clone(), pow2(self.scale))
    }

    /// Midpoint of two dyadics (exact, one extra bit of scale).
    pub fn midpoint(a: &Dyadic, b: &Dyadic) -> Dyadic {
        let s = a.scale.max(b.scale);
        let am = &a.mantissa << (s - a.scale);
        let bm = &b.mantissa << (s - b.scale);
        Dyadic::new(am + bm, s + 1)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let s = self.scale.max(other.scale);
        (&self.mantissa << (s - self.scale)).cmp(&(&other.mantissa << (s - other.scale)))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sci(20))
    }
}

/// Gaussian integer, read as a complex fixed-point number at some scale.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Cx {
    pub re: BigInt,
    pub im: BigInt,
}

impl Cx {
    pub fn new(re: BigInt, im: BigInt) -> Self {
        Cx { re, im }
    }

    pub fn real(re: BigInt) -> Self {
        Cx { re, im: BigInt::zero() }
    }

    pub fn zero() -> Self {
        Cx::default()
    }

    pub fn conj(&self) -> Cx {
        Cx::new(self.re.clone(), -&self.im)
    }

    pub fn norm_sq(&self) -> BigInt {
        &self.re * &self.re + &self.im * &self.im
    }

    /// `|re| + |im|`, an upper bound for the modulus.
    pub fn l1(&self) -> BigInt {
        self.re.abs() + self.im.abs()
    }

    pub fn add(&self, o: &Cx) -> Cx {
        Cx::new(&self.re + &o.re, &self.im + &o.im)
    }

    pub fn sub(&self, o: &Cx) -> Cx {
        Cx::new(&self.re - &o.re, &self.im - &o.im)
    }

    pub fn neg(&self) -> Cx {
        Cx::new(-&self.re, -&self.im)
    }

    /// Exact product (scales add).
    pub fn mul(&self, o: &Cx) -> Cx {
        Cx::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }

    pub fn scale_int(&self, k: &BigInt) -> Cx {
        Cx::new(&self.re * k, &self.im * k)
    }

    pub fn shl(&self, k: u32) -> Cx {
        Cx::new(&self.re << k, &self.im << k)
    }

    /// Floor shift of both components.
    pub fn shr(&self, k: u32) -> Cx {
        Cx::new(&self.re >> k, &self.im >> k)
    }

    /// Product at scale `p` of two numbers at scale `p`.
    pub fn mul_fixed(&self, o: &Cx, p: u32) -> Cx {
        self.mul(o).shr(p)
    }

    /// Quotient at scale `p`; `None` when the divisor is zero.
    pub fn div_fixed(&self, o: &Cx, p: u32) -> Option<Cx> {
        let den = o.norm_sq();
        if den.is_zero() {
            return None;
        }
        let num = self.mul(&o.conj());
        Some(Cx::new((num.re << p) / &den, (num.im << p) / &den))
    }

    pub fn to_f64(&self, p: u32) -> (f64, f64) {
        let f = |m: &BigInt| Dyadic::new(m.clone(), p).to_f64();
        (f(&self.re), f(&self.im))
    }
}
