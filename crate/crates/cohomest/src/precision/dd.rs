//! Double-double real numbers.
//!
//! A value is the unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`, giving
//! roughly 106 bits (about 32 decimal digits) of significand with the
//! exponent range of `f64`.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, Sub, SubAssign};
use std::str::FromStr;
use std::sync::OnceLock;

use num_traits::{Num, One, Zero};

/// Unit roundoff of the double-double format, 2^-104.
pub const DD_EPS: f64 = 4.930380657631324e-32;

#[derive(Clone, Copy, Default)]
pub struct XReal {
    hi: f64,
    lo: f64,
}

#[inline(always)]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline(always)]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[cfg(target_feature = "fma")]
#[inline(always)]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

#[cfg(not(target_feature = "fma"))]
#[inline(always)]
fn split(a: f64) -> (f64, f64) {
    let c = 134_217_729.0 * a;
    let hi = c - (c - a);
    (hi, a - hi)
}

#[cfg(not(target_feature = "fma"))]
#[inline(always)]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
}

/// Exact power of two as an `f64`, saturating to 0 / inf outside the range.
#[inline]
fn pow2(e: i32) -> f64 {
    if (-1022..=1023).contains(&e) {
        f64::from_bits(((e + 1023) as u64) << 52)
    } else if e < -1022 {
        if e < -1074 {
            0.0
        } else {
            f64::from_bits(1u64 << (e + 1074))
        }
    } else {
        f64::INFINITY
    }
}

impl XReal {
    pub const ZERO: XReal = XReal { hi: 0.0, lo: 0.0 };
    pub const ONE: XReal = XReal { hi: 1.0, lo: 0.0 };
    pub const PI: XReal = XReal {
        hi: std::f64::consts::PI,
        lo: 1.224646799147353207e-16,
    };
    pub const TWO_PI: XReal = XReal {
        hi: std::f64::consts::TAU,
        lo: 2.449293598294706414e-16,
    };
    pub const LN2: XReal = XReal {
        hi: std::f64::consts::LN_2,
        lo: 2.319046813846299558e-17,
    };
    pub const E: XReal = XReal {
        hi: std::f64::consts::E,
        lo: 1.445646891729250158e-16,
    };

    #[inline]
    pub const fn from_f64(x: f64) -> XReal {
        XReal { hi: x, lo: 0.0 }
    }

    /// Builds a value from two components, renormalising them.
    #[inline]
    pub fn from_parts(hi: f64, lo: f64) -> XReal {
        let (h, l) = two_sum(hi, lo);
        XReal { hi: h, lo: l }
    }

    #[inline]
    pub fn hi(self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn lo(self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.hi == 0.0
    }

    #[inline]
    pub fn is_negative(self) -> bool {
        self.hi < 0.0
    }

    #[inline]
    pub fn abs(self) -> XReal {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    #[inline]
    pub fn max(self, o: XReal) -> XReal {
        if o > self {
            o
        } else {
            self
        }
    }

    #[inline]
    pub fn min(self, o: XReal) -> XReal {
        if o < self {
            o
        } else {
            self
        }
    }

    #[inline]
    pub fn mul_pwr2(self, p: f64) -> XReal {
        XReal {
            hi: self.hi * p,
            lo: self.lo * p,
        }
    }

    pub fn ldexp(self, e: i32) -> XReal {
        if (-1000..=1000).contains(&e) {
            let p = pow2(e);
            return self.mul_pwr2(p);
        }
        let h = e / 2;
        self.mul_pwr2(pow2(h)).mul_pwr2(pow2(e - h))
    }

    #[inline]
    pub fn sqr(self) -> XReal {
        let (p1, mut p2) = two_prod(self.hi, self.hi);
        p2 += 2.0 * self.hi * self.lo;
        p2 += self.lo * self.lo;
        let (s, e) = quick_two_sum(p1, p2);
        XReal { hi: s, lo: e }
    }

    #[inline]
    pub fn recip(self) -> XReal {
        XReal::ONE / self
    }

    pub fn floor(self) -> XReal {
        let hi = self.hi.floor();
        if hi == self.hi {
            let (h, l) = quick_two_sum(hi, self.lo.floor());
            XReal { hi: h, lo: l }
        } else {
            XReal { hi, lo: 0.0 }
        }
    }

    pub fn ceil(self) -> XReal {
        -(-self).floor()
    }

    /// Nearest integer, ties away from zero resolved upward.
    pub fn round(self) -> XReal {
        (self + 0.5).floor()
    }

    pub fn trunc(self) -> XReal {
        if self.hi < 0.0 {
            self.ceil()
        } else {
            self.floor()
        }
    }

    pub fn sqrt(self) -> XReal {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 { XReal::ZERO } else { XReal::from_f64(f64::NAN) };
        }
        let x = 1.0 / self.hi.sqrt();
        let ax = self.hi * x;
        let corr = (self - XReal::from_f64(ax).sqr()).hi * (x * 0.5);
        let (h, l) = two_sum(ax, corr);
        XReal { hi: h, lo: l }
    }

    pub fn exp(self) -> XReal {
        const INV_K: f64 = 1.0 / 512.0;
        if self.hi > 709.78 {
            return XReal::from_f64(f64::INFINITY);
        }
        if self.hi < -745.2 {
            return XReal::ZERO;
        }
        if self.is_zero() {
            return XReal::ONE;
        }
        let m = (self.hi / XReal::LN2.hi + 0.5).floor();
        let r = (self - XReal::LN2 * m).mul_pwr2(INV_K);
        let inv_fact = inv_factorials();
        let mut p = r.sqr();
        let mut s = r + p.mul_pwr2(0.5);
        p *= r;
        let mut i = 3;
        loop {
            let t = p * inv_fact[i];
            s += t;
            if t.hi.abs() <= INV_K * DD_EPS * 1e-2 || i >= 14 {
                break;
            }
            p *= r;
            i += 1;
        }
        for _ in 0..9 {
            s = s.mul_pwr2(2.0) + s.sqr();
        }
        s += 1.0;
        s.ldexp(m as i32)
    }

    /// `exp(x) - 1`, accurate near zero.
    pub fn exp_m1(self) -> XReal {
        if self.hi.abs() > 0.5 {
            return self.exp() - 1.0;
        }
        let inv_fact = inv_factorials();
        let mut p = self;
        let mut s = self;
        let mut i = 2;
        loop {
            p *= self;
            let t = p * inv_fact[i];
            s += t;
            if t.hi.abs() <= s.hi.abs() * DD_EPS * 1e-2 || i >= 40 {
                break;
            }
            i += 1;
        }
        s
    }

    pub fn ln(self) -> XReal {
        if self.hi <= 0.0 {
            return XReal::from_f64(if self.hi == 0.0 { f64::NEG_INFINITY } else { f64::NAN });
        }
        if self == XReal::ONE {
            return XReal::ZERO;
        }
        let d = self - 1.0;
        if d.hi.abs() < 0.25 {
            // 2·atanh(u) with u = (x−1)/(x+1) keeps relative accuracy near 1
            let u = d / (self + 1.0);
            let u2 = u.sqr();
            let mut p = u;
            let mut s = u;
            let mut k = 3.0;
            loop {
                p *= u2;
                let t = p / k;
                s += t;
                if t.hi.abs() <= s.hi.abs() * DD_EPS * 1e-2 || k > 200.0 {
                    break;
                }
                k += 2.0;
            }
            return s.mul_pwr2(2.0);
        }
        let x = XReal::from_f64(self.hi.ln());
        let x = x + self * (-x).exp() - 1.0;
        if x.hi.abs() > 1.0 {
            // the starting guess carries an absolute error ~|x|·2^-53
            x + self * (-x).exp() - 1.0
        } else {
            x
        }
    }

    /// Real power for a positive base.
    pub fn powf(self, y: XReal) -> XReal {
        if y.is_zero() {
            return XReal::ONE;
        }
        if self.is_zero() {
            return XReal::ZERO;
        }
        (y * self.ln()).exp()
    }

    pub fn powi(self, n: i64) -> XReal {
        if n == 0 {
            return XReal::ONE;
        }
        let mut base = self;
        let mut e = n.unsigned_abs();
        let mut acc = XReal::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            e >>= 1;
            if e > 0 {
                base = base.sqr();
            }
        }
        if n < 0 {
            acc.recip()
        } else {
            acc
        }
    }

    /// `(sin 2πt, cos 2πt)` with exact reduction of `t` modulo 1.
    pub fn sincos_2pi(self) -> (XReal, XReal) {
        let t = self - self.round();
        let q = (t.hi * 4.0).round();
        let r = t - q * 0.25;
        let x = r * XReal::TWO_PI;
        let s = sin_taylor(x);
        let c = (XReal::ONE - s.sqr()).sqrt();
        match q as i64 {
            0 => (s, c),
            1 => (c, -s),
            -1 => (-c, s),
            _ => (-s, -c),
        }
    }

    pub fn sin_cos(self) -> (XReal, XReal) {
        (self / XReal::TWO_PI).sincos_2pi()
    }

    pub fn sin(self) -> XReal {
        self.sin_cos().0
    }

    pub fn cos(self) -> XReal {
        self.sin_cos().1
    }

    pub fn cosh(self) -> XReal {
        let e = self.exp();
        (e + e.recip()).mul_pwr2(0.5)
    }

    pub fn sinh(self) -> XReal {
        if self.hi.abs() < 0.5 {
            let a = self.exp_m1();
            let b = (-self).exp_m1();
            return (a - b).mul_pwr2(0.5);
        }
        let e = self.exp();
        (e - e.recip()).mul_pwr2(0.5)
    }

    /// Hyperbolic cotangent for `x > 0`, accurate for small `x`.
    pub fn coth(self) -> XReal {
        let m = (self.mul_pwr2(2.0)).exp_m1();
        (m + 2.0) / m
    }

    /// `(k·x) mod 1` reduced to `[-1/2, 1/2]`, exact up to the final rounding.
    ///
    /// The product is expanded into four doubles before reduction, so the
    /// result keeps full relative precision even for large `|k|`.
    pub fn frac_mul(self, k: i64) -> XReal {
        debug_assert!(k.unsigned_abs() < (1u64 << 53));
        let kf = k as f64;
        let (p0, p1) = two_prod(kf, self.hi);
        let (q0, q1) = two_prod(kf, self.lo);
        let n0 = p0.round();
        let head = XReal::from_f64(p0 - n0);
        let s = head + XReal::from_parts(p1, 0.0) + XReal::from_parts(q0, q1);
        s - s.round()
    }

    pub fn signum(self) -> f64 {
        if self.hi > 0.0 {
            1.0
        } else if self.hi < 0.0 {
            -1.0
        } else {
            0.0
        }
    }

    fn pow10(e: i32) -> XReal {
        XReal::from_f64(10.0).powi(e as i64)
    }

    /// Scientific notation with `digits` significant figures, C style
    /// exponent (`1.2340e-05`).
    pub fn to_sci_string(self, digits: usize) -> String {
        let digits = digits.max(1);
        if !self.is_finite() {
            return format!("{}", self.hi);
        }
        if self.is_zero() {
            return format!("{:.*}e+00", digits - 1, 0.0);
        }
        let neg = self.hi < 0.0;
        let x = self.abs();
        let mut e = x.hi.log10().floor() as i32;
        let mut r = x / XReal::pow10(e);
        while r >= XReal::from_f64(10.0) {
            r = r / 10.0;
            e += 1;
        }
        while r < XReal::ONE {
            r = r * 10.0;
            e -= 1;
        }
        let mut ds: Vec<u8> = Vec::with_capacity(digits + 1);
        for _ in 0..=digits {
            let d = r.floor().hi.clamp(0.0, 9.0);
            ds.push(d as u8);
            r = (r - d) * 10.0;
        }
        let last = ds.pop().unwrap_or(0);
        if last >= 5 {
            let mut i = ds.len();
            loop {
                if i == 0 {
                    ds.insert(0, 1);
                    ds.pop();
                    e += 1;
                    break;
                }
                i -= 1;
                if ds[i] == 9 {
                    ds[i] = 0;
                } else {
                    ds[i] += 1;
                    break;
                }
            }
        }
        let mut s = String::with_capacity(digits + 8);
        if neg {
            s.push('-');
        }
        s.push((b'0' + ds[0]) as char);
        if digits > 1 {
            s.push('.');
            for d in &ds[1..] {
                s.push((b'0' + d) as char);
            }
        }
        s.push('e');
        s.push(if e < 0 { '-' } else { '+' });
        s.push_str(&format!("{:02}", e.abs()));
        s
    }
}

fn sin_taylor(x: XReal) -> XReal {
    if x.is_zero() {
        return x;
    }
    let inv_fact = inv_factorials();
    let x2 = -x.sqr();
    let mut p = x;
    let mut s = x;
    let thresh = x.hi.abs() * DD_EPS * 1e-2;
    let mut i = 3;
    while i < inv_fact.len() {
        p *= x2;
        let t = p * inv_fact[i];
        s += t;
        if t.hi.abs() <= thresh {
            break;
        }
        i += 2;
    }
    s
}

/// `1/n!` for `n = 0..48`.
pub(crate) fn inv_factorials() -> &'static [XReal] {
    static TABLE: OnceLock<Vec<XReal>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut v = Vec::with_capacity(48);
        let mut f = XReal::ONE;
        v.push(XReal::ONE);
        for n in 1..48 {
            f = f * (n as f64);
            v.push(f.recip());
        }
        v
    })
}

// ---------------------------------------------------------------------------
// arithmetic

impl Add for XReal {
    type Output = XReal;
    #[inline]
    fn add(self, b: XReal) -> XReal {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let s2 = s2 + t1;
        let (s1, s2) = quick_two_sum(s1, s2);
        let s2 = s2 + t2;
        let (h, l) = quick_two_sum(s1, s2);
        XReal { hi: h, lo: l }
    }
}

impl Add<f64> for XReal {
    type Output = XReal;
    #[inline]
    fn add(self, b: f64) -> XReal {
        let (s1, s2) = two_sum(self.hi, b);
        let s2 = s2 + self.lo;
        let (h, l) = quick_two_sum(s1, s2);
        XReal { hi: h, lo: l }
    }
}

impl Neg for XReal {
    type Output = XReal;
    #[inline]
    fn neg(self) -> XReal {
        XReal {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for XReal {
    type Output = XReal;
    #[inline]
    fn sub(self, b: XReal) -> XReal {
        self + (-b)
    }
}

impl Sub<f64> for XReal {
    type Output = XReal;
    #[inline]
    fn sub(self, b: f64) -> XReal {
        self + (-b)
    }
}

impl Mul for XReal {
    type Output = XReal;
    #[inline]
    fn mul(self, b: XReal) -> XReal {
        let (p1, mut p2) = two_prod(self.hi, b.hi);
        p2 += self.hi * b.lo + self.lo * b.hi;
        let (h, l) = quick_two_sum(p1, p2);
        XReal { hi: h, lo: l }
    }
}

impl Mul<f64> for XReal {
    type Output = XReal;
    #[inline]
    fn mul(self, b: f64) -> XReal {
        let (p1, mut p2) = two_prod(self.hi, b);
        p2 += self.lo * b;
        let (h, l) = quick_two_sum(p1, p2);
        XReal { hi: h, lo: l }
    }
}

impl Div for XReal {
    type Output = XReal;
    #[inline]
    fn div(self, b: XReal) -> XReal {
        let q1 = self.hi / b.hi;
        let mut r = self - b * q1;
        let q2 = r.hi / b.hi;
        r = r - b * q2;
        let q3 = r.hi / b.hi;
        let (q1, q2) = quick_two_sum(q1, q2);
        XReal { hi: q1, lo: q2 } + q3
    }
}

impl Div<f64> for XReal {
    type Output = XReal;
    #[inline]
    fn div(self, b: f64) -> XReal {
        self / XReal::from_f64(b)
    }
}

impl Rem for XReal {
    type Output = XReal;
    fn rem(self, b: XReal) -> XReal {
        self - (self / b).trunc() * b
    }
}

macro_rules! assign_ops {
    ($($tr:ident $m:ident $op:tt $rhs:ty),*) => {$(
        impl $tr<$rhs> for XReal {
            #[inline]
            fn $m(&mut self, b: $rhs) { *self = *self $op b; }
        }
    )*};
}
assign_ops!(
    AddAssign add_assign + XReal, SubAssign sub_assign - XReal,
    MulAssign mul_assign * XReal, DivAssign div_assign / XReal,
    AddAssign add_assign + f64, SubAssign sub_assign - f64,
    MulAssign mul_assign * f64, DivAssign div_assign / f64
);

impl Sum for XReal {
    fn sum<I: Iterator<Item = XReal>>(iter: I) -> XReal {
        iter.fold(XReal::ZERO, |a, b| a + b)
    }
}

impl<'a> Sum<&'a XReal> for XReal {
    fn sum<I: Iterator<Item = &'a XReal>>(iter: I) -> XReal {
        iter.fold(XReal::ZERO, |a, b| a + *b)
    }
}

impl PartialEq for XReal {
    fn eq(&self, o: &XReal) -> bool {
        self.hi == o.hi && self.lo == o.lo
    }
}

impl PartialOrd for XReal {
    fn partial_cmp(&self, o: &XReal) -> Option<Ordering> {
        match self.hi.partial_cmp(&o.hi)? {
            Ordering::Equal => self.lo.partial_cmp(&o.lo),
            ord => Some(ord),
        }
    }
}

impl From<f64> for XReal {
    fn from(x: f64) -> XReal {
        XReal::from_f64(x)
    }
}

impl From<i64> for XReal {
    fn from(x: i64) -> XReal {
        let hi = x as f64;
        let lo = (x as i128 - hi as i128) as f64;
        XReal::from_parts(hi, lo)
    }
}

impl From<i32> for XReal {
    fn from(x: i32) -> XReal {
        XReal::from_f64(x as f64)
    }
}

impl From<u32> for XReal {
    fn from(x: u32) -> XReal {
        XReal::from_f64(x as f64)
    }
}

impl From<usize> for XReal {
    fn from(x: usize) -> XReal {
        XReal::from(x as i64)
    }
}

impl Zero for XReal {
    fn zero() -> XReal {
        XReal::ZERO
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0
    }
}

impl One for XReal {
    fn one() -> XReal {
        XReal::ONE
    }
}

impl Num for XReal {
    type FromStrRadixErr = ParseXRealError;
    fn from_str_radix(s: &str, radix: u32) -> Result<XReal, ParseXRealError> {
        if radix != 10 {
            return Err(ParseXRealError(format!("unsupported radix {radix}")));
        }
        s.parse()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseXRealError(pub String);

impl fmt::Display for ParseXRealError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid decimal literal: {}", self.0)
    }
}

impl std::error::Error for ParseXRealError {}

impl FromStr for XReal {
    type Err = ParseXRealError;

    /// Decimal literal with optional sign, fraction and exponent.
    fn from_str(s: &str) -> Result<XReal, ParseXRealError> {
        let err = || ParseXRealError(s.to_string());
        let t = s.trim();
        let (neg, body) = match t.as_bytes().first() {
            Some(b'-') => (true, &t[1..]),
            Some(b'+') => (false, &t[1..]),
            _ => (false, t),
        };
        let (mant, exp) = match body.find(['e', 'E']) {
            Some(i) => {
                let e: i32 = body[i + 1..].parse().map_err(|_| err())?;
                (&body[..i], e)
            }
            None => (body, 0),
        };
        let mut acc = XReal::ZERO;
        let mut scale = 0i32;
        let mut seen_dot = false;
        let mut any = false;
        for c in mant.chars() {
            match c {
                '0'..='9' => {
                    acc = acc * 10.0 + (c as u8 - b'0') as f64;
                    if seen_dot {
                        scale -= 1;
                    }
                    any = true;
                }
                '.' if !seen_dot => seen_dot = true,
                '_' => {}
                _ => return Err(err()),
            }
        }
        if !any {
            return Err(err());
        }
        let e = exp + scale;
        let v = match e.cmp(&0) {
            Ordering::Equal => acc,
            Ordering::Greater => acc * XReal::pow10(e),
            Ordering::Less => acc / XReal::pow10(-e),
        };
        Ok(if neg { -v } else { v })
    }
}

impl fmt::Debug for XReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "XReal({})", self.to_sci_string(32))
    }
}

impl fmt::Display for XReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = f.precision().map(|p| p + 1).unwrap_or(32);
        f.write_str(&self.to_sci_string(d))
    }
}
