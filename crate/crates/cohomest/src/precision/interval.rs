//! Outward-rounded intervals over [`XReal`].
//!
//! Double-double operations are not correctly rounded, so directed rounding
//! is emulated: every computed endpoint is pushed outward by a relative
//! margin that dominates the operation's error bound, plus the smallest
//! normal double to cover underflow.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::dd::XReal;
use crate::error::{Error, Result};

/// Outward margin for `+ - * /` (2^-100).
const REL_ARITH: f64 = 7.888609052210118e-31;
/// Outward margin for `sqrt`, `exp`, `ln`, `sin`, `pow` (2^-96).
const REL_TRANS: f64 = 1.262177448353619e-29;

#[inline]
fn down(x: XReal, rel: f64) -> XReal {
    x - (x.abs().hi() * rel + f64::MIN_POSITIVE)
}

#[inline]
fn up(x: XReal, rel: f64) -> XReal {
    x + (x.abs().hi() * rel + f64::MIN_POSITIVE)
}

#[derive(Clone, Copy, PartialEq)]
pub struct XInterval {
    pub lo: XReal,
    pub hi: XReal,
}

impl XInterval {
    /// Degenerate interval holding an exactly representable value.
    pub fn point(x: XReal) -> XInterval {
        XInterval { lo: x, hi: x }
    }

    /// Interval around a computed value with a given relative uncertainty.
    pub fn around(x: XReal, rel: f64) -> XInterval {
        XInterval {
            lo: down(x, rel),
            hi: up(x, rel),
        }
    }

    pub fn new(lo: XReal, hi: XReal) -> Result<XInterval> {
        if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Domain(format!("invalid interval [{lo}, {hi}]")));
        }
        Ok(XInterval { lo, hi })
    }

    pub fn zero() -> XInterval {
        XInterval::point(XReal::ZERO)
    }

    pub fn mid(&self) -> XReal {
        (self.lo + self.hi).mul_pwr2(0.5)
    }

    pub fn width(&self) -> XReal {
        self.hi - self.lo
    }

    /// Half-width.
    pub fn rad(&self) -> XReal {
        self.width().mul_pwr2(0.5)
    }

    pub fn contains(&self, x: XReal) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(XReal::ZERO)
    }

    pub fn overlaps(&self, o: &XInterval) -> bool {
        self.lo <= o.hi && o.lo <= self.hi
    }

    pub fn hull(&self, o: &XInterval) -> XInterval {
        XInterval {
            lo: self.lo.min(o.lo),
            hi: self.hi.max(o.hi),
        }
    }

    pub fn abs(&self) -> XInterval {
        if self.lo >= XReal::ZERO {
            *self
        } else if self.hi <= XReal::ZERO {
            -*self
        } else {
            XInterval {
                lo: XReal::ZERO,
                hi: (-self.lo).max(self.hi),
            }
        }
    }

    pub fn sqr(&self) -> XInterval {
        let a = self.abs();
        XInterval {
            lo: down(a.lo.sqr(), REL_ARITH).max(XReal::ZERO),
            hi: up(a.hi.sqr(), REL_ARITH),
        }
    }

    pub fn recip(&self) -> Result<XInterval> {
        if self.contains_zero() {
            return Err(Error::Domain("reciprocal of an interval containing 0".into()));
        }
        Ok(XInterval {
            lo: down(self.hi.recip(), REL_ARITH),
            hi: up(self.lo.recip(), REL_ARITH),
        })
    }

    pub fn div(&self, o: &XInterval) -> Result<XInterval> {
        if o.contains_zero() {
            return Err(Error::Domain("division by an interval containing 0".into()));
        }
        let c = [self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi];
        Ok(hull4(c, REL_ARITH))
    }

    pub fn scale(&self, k: f64) -> XInterval {
        *self * XInterval::point(XReal::from_f64(k))
    }

    pub fn sqrt(&self) -> Result<XInterval> {
        if self.lo < XReal::ZERO {
            return Err(Error::Domain("sqrt of a negative interval".into()));
        }
        Ok(XInterval {
            lo: down(self.lo.sqrt(), REL_TRANS).max(XReal::ZERO),
            hi: up(self.hi.sqrt(), REL_TRANS),
        })
    }

    pub fn exp(&self) -> XInterval {
        XInterval {
            lo: down(self.lo.exp(), REL_TRANS).max(XReal::ZERO),
            hi: up(self.hi.exp(), REL_TRANS),
        }
    }

    pub fn ln(&self) -> Result<XInterval> {
        if self.lo <= XReal::ZERO {
            return Err(Error::Domain("log of a nonpositive interval".into()));
        }
        Ok(XInterval {
            lo: down(self.lo.ln(), REL_TRANS),
            hi: up(self.hi.ln(), REL_TRANS),
        })
    }

    /// `x^y` for a positive interval `x` and a real exponent `y ≥ 0`.
    pub fn powf(&self, y: XReal) -> Result<XInterval> {
        if self.lo < XReal::ZERO || y < XReal::ZERO {
            return Err(Error::Domain("powf needs a nonnegative base and exponent".into()));
        }
        Ok(XInterval {
            lo: down(self.lo.powf(y), REL_TRANS).max(XReal::ZERO),
            hi: up(self.hi.powf(y), REL_TRANS),
        })
    }

    /// `k·x` for an integer `k`.
    pub fn mul_int(&self, k: i64) -> XInterval {
        let kx = XReal::from(k);
        let (a, b) = (self.lo * kx, self.hi * kx);
        let (a, b) = if k >= 0 { (a, b) } else { (b, a) };
        XInterval {
            lo: down(a, REL_ARITH),
            hi: up(b, REL_ARITH),
        }
    }

    /// Enclosure of `min_{m∈Z} |x − m|` over the interval.
    pub fn dist_to_int(&self) -> XInterval {
        if self.width() >= XReal::ONE {
            return XInterval {
                lo: XReal::ZERO,
                hi: XReal::from_f64(0.5),
            };
        }
        let m = self.mid().round();
        let a = self.lo - m;
        let b = self.hi - m;
        let dist = |t: XReal| {
            let t = t.abs();
            if t > XReal::from_f64(0.5) {
                (XReal::ONE - t).abs()
            } else {
                t
            }
        };
        let (da, db) = (dist(a), dist(b));
        let straddles = |c: f64| a <= XReal::from_f64(c) && XReal::from_f64(c) <= b;
        let lo = if straddles(0.0) || straddles(1.0) || straddles(-1.0) {
            XReal::ZERO
        } else {
            da.min(db)
        };
        let hi = if straddles(0.5) || straddles(-0.5) {
            XReal::from_f64(0.5)
        } else {
            da.max(db)
        };
        XInterval {
            lo: down(lo, REL_ARITH).max(XReal::ZERO),
            hi: up(hi, REL_ARITH).min(XReal::from_f64(0.5)),
        }
    }

    /// Enclosure of `|sin(π x)|`; `None` if the interval reaches an integer.
    pub fn abs_sin_pi(&self) -> Option<XInterval> {
        let d = self.dist_to_int();
        if d.lo <= XReal::ZERO {
            return None;
        }
        // sin(πd) = sin(2π·d/2) is increasing for d ∈ [0, 1/2]
        let s_lo = d.lo.mul_pwr2(0.5).sincos_2pi().0;
        let s_hi = d.hi.mul_pwr2(0.5).sincos_2pi().0;
        Some(XInterval {
            lo: down(s_lo, REL_TRANS).max(XReal::ZERO),
            hi: up(s_hi, REL_TRANS).min(XReal::ONE),
        })
    }
}

fn hull4(c: [XReal; 4], rel: f64) -> XInterval {
    let mut lo = c[0];
    let mut hi = c[0];
    for v in &c[1..] {
        lo = lo.min(*v);
        hi = hi.max(*v);
    }
    XInterval {
        lo: down(lo, rel),
        hi: up(hi, rel),
    }
}

impl Add for XInterval {
    type Output = XInterval;
    fn add(self, o: XInterval) -> XInterval {
        XInterval {
            lo: down(self.lo + o.lo, REL_ARITH),
            hi: up(self.hi + o.hi, REL_ARITH),
        }
    }
}

impl Sub for XInterval {
    type Output = XInterval;
    fn sub(self, o: XInterval) -> XInterval {
        XInterval {
            lo: down(self.lo - o.hi, REL_ARITH),
            hi: up(self.hi - o.lo, REL_ARITH),
        }
    }
}

impl Neg for XInterval {
    type Output = XInterval;
    fn neg(self) -> XInterval {
        XInterval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl Mul for XInterval {
    type Output = XInterval;
    fn mul(self, o: XInterval) -> XInterval {
        if self.lo >= XReal::ZERO && o.lo >= XReal::ZERO {
            return XInterval {
                lo: down(self.lo * o.lo, REL_ARITH).max(XReal::ZERO),
                hi: up(self.hi * o.hi, REL_ARITH),
            };
        }
        hull4(
            [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi],
            REL_ARITH,
        )
    }
}

impl fmt::Debug for XInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo.to_sci_string(20), self.hi.to_sci_string(20))
    }
}

impl fmt::Display for XInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = f.precision().map(|p| p + 1).unwrap_or(17);
        write!(f, "[{}, {}]", self.lo.to_sci_string(d), self.hi.to_sci_string(d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(s: &str) -> XReal {
        s.parse().unwrap()
    }

    #[test]
    fn dist_handles_wraparound() {
        let i = XInterval::new(x("2.9"), x("3.05")).unwrap();
        let d = i.dist_to_int();
        assert_eq!(d.lo, XReal::ZERO);
        assert!(d.contains(x("0.1")));
        let i = XInterval::new(x("0.45"), x("0.55")).unwrap();
        let d = i.dist_to_int();
        assert!(d.contains(x("0.5")) && d.contains(x("0.45")));
        assert!(d.lo > x("0.4499999"));
    }

    #[test]
    fn sin_enclosure_brackets_point_value() {
        let g = (XReal::from_f64(5.0).sqrt() - 1.0) / 2.0;
        let i = XInterval::around(g, 1e-25);
        let s = i.abs_sin_pi().unwrap();
        let p = (g.mul_pwr2(0.5)).sincos_2pi().0;
        assert!(s.contains(p));
        assert!(s.width().to_f64() < 1e-23);
        assert!(XInterval::around(XReal::from_f64(4.0), 1e-20).abs_sin_pi().is_none());
    }

    #[test]
    fn division_rejects_zero() {
        let a = XInterval::point(XReal::ONE);
        let z = XInterval::new(x("-1"), x("1")).unwrap();
        assert!(a.div(&z).is_err());
    }
}
