//! Extended-precision reals, intervals and special functions.

mod dd;
mod interval;
mod special;

pub use dd::{ParseXRealError, XReal, DD_EPS};
pub use interval::XInterval;
pub use special::{gamma, hurwitz_zeta2, polylog, tail_gamma_bound};

use num_complex::Complex;

use crate::error::{Error, Result};

pub type XComplex = Complex<XReal>;

/// Largest decimal precision the double-double substrate can honour.
pub const MAX_DIGITS: u32 = 31;
pub const MIN_DIGITS: u32 = 15;

/// Working-precision policy: tolerances, stopping rules and output width.
///
/// Arithmetic always runs at double-double precision; `digits` only sets
/// how much of it is demanded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrecisionContext {
    digits: u32,
}

impl Default for PrecisionContext {
    fn default() -> Self {
        PrecisionContext { digits: 30 }
    }
}

impl PrecisionContext {
    pub fn new(digits: u32) -> Result<Self> {
        if !(MIN_DIGITS..=MAX_DIGITS).contains(&digits) {
            return Err(Error::Domain(format!(
                "digits must lie in {MIN_DIGITS}..={MAX_DIGITS}, got {digits}"
            )));
        }
        Ok(PrecisionContext { digits })
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    /// `10^{-digits+k}`.
    pub fn tol(&self, k: i32) -> f64 {
        10f64.powi(-(self.digits as i32) + k)
    }

    pub fn eps(&self) -> f64 {
        self.tol(0)
    }
}

#[inline]
pub fn cabs(z: &XComplex) -> XReal {
    (z.re.sqr() + z.im.sqr()).sqrt()
}

#[inline]
pub fn cnorm_sqr(z: &XComplex) -> XReal {
    z.re.sqr() + z.im.sqr()
}

/// `e^{2πi t}`.
#[inline]
pub fn cis_2pi(t: XReal) -> XComplex {
    let (s, c) = t.sincos_2pi();
    Complex::new(c, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn digits_range() {
        assert!(PrecisionContext::new(14).is_err());
        assert!(PrecisionContext::new(32).is_err());
        assert_eq!(PrecisionContext::new(20).unwrap().tol(2), 1e-18);
    }

    #[test]
    fn complex_arithmetic_through_num_complex() {
        let a = Complex::new(XReal::from_f64(1.0), XReal::from_f64(2.0));
        let b = Complex::new(XReal::from_f64(3.0), XReal::from_f64(-1.0));
        let p = a * b;
        assert_eq!(p.re, XReal::from_f64(5.0));
        assert_eq!(p.im, XReal::from_f64(5.0));
        assert_eq!(cabs(&Complex::new(XReal::from_f64(3.0), XReal::from_f64(4.0))), XReal::from_f64(5.0));
    }

    fn iv(a: f64, b: f64) -> XInterval {
        XInterval::new(XReal::from_f64(a.min(b)), XReal::from_f64(a.max(b))).unwrap()
    }

    proptest! {
        #[test]
        fn interval_ops_are_inclusion_isotonic(
            a in -50.0f64..50.0, b in -50.0f64..50.0,
            c in -50.0f64..50.0, d in -50.0f64..50.0,
            s in 0.0f64..1.0, t in 0.0f64..1.0,
        ) {
            let x = iv(a, b);
            let y = iv(c, d);
            // sample points inside each interval, including the third digit word
            let px = x.lo + (x.hi - x.lo) * s;
            let py = y.lo + (y.hi - y.lo) * t;
            prop_assert!((x + y).contains(px + py));
            prop_assert!((x - y).contains(px - py));
            prop_assert!((x * y).contains(px * py));
            prop_assert!(x.sqr().contains(px.sqr()));
            if !y.contains_zero() {
                prop_assert!(x.div(&y).unwrap().contains(px / py));
            }
            let e = iv(a / 10.0, b / 10.0);
            let pe = e.lo + (e.hi - e.lo) * s;
            prop_assert!(e.exp().contains(pe.exp()));
            let ax = x.abs();
            if ax.lo > XReal::ZERO {
                let pa = px.abs();
                prop_assert!(ax.sqrt().unwrap().contains(pa.sqrt()));
                prop_assert!(ax.ln().unwrap().contains(pa.ln()));
            }
        }

        #[test]
        fn tail_bound_nonincreasing_in_y(x in 0.5f64..4.0, y0 in 0.1f64..5.0) {
            let xr = XReal::from_f64(x);
            let mut prev = None;
            for i in 0..10 {
                let y = XReal::from_f64(x + y0 + 2.0 * i as f64 + x);
                let h = tail_gamma_bound(xr, y).unwrap().hi;
                if let Some(p) = prev {
                    prop_assert!(h <= p);
                }
                prev = Some(h);
            }
        }

        #[test]
        fn polylog_monotone_in_z(s in -1.0f64..6.0, z0 in 0.0f64..0.9) {
            let ctx = PrecisionContext::default();
            let sx = XReal::from_f64(s);
            let mut prev = XReal::from_f64(-1.0);
            for i in 0..5 {
                let z = XReal::from_f64(z0 + 0.02 * i as f64);
                let v = polylog(sx, z, &ctx).unwrap();
                prop_assert!(v >= prev);
                prev = v;
            }
        }
    }
}
