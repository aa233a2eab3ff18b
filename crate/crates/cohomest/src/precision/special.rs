//! Special functions needed by the bounds.

use super::dd::XReal;
use super::interval::XInterval;
use super::PrecisionContext;
use crate::error::{Error, Result};

/// Bernoulli numbers B_2, B_4, …, B_30 as exact rationals.
const BERNOULLI: [(f64, f64); 15] = [
    (1.0, 6.0),
    (-1.0, 30.0),
    (1.0, 42.0),
    (-1.0, 30.0),
    (5.0, 66.0),
    (-691.0, 2730.0),
    (7.0, 6.0),
    (-3617.0, 510.0),
    (43867.0, 798.0),
    (-174611.0, 330.0),
    (854513.0, 138.0),
    (-236364091.0, 2730.0),
    (8553103.0, 6.0),
    (-23749461029.0, 870.0),
    (8615841276005.0, 14322.0),
];

fn bernoulli(m: usize) -> XReal {
    let (n, d) = BERNOULLI[m - 1];
    XReal::from_f64(n) / XReal::from_f64(d)
}

fn bernoulli_iv(m: usize) -> XInterval {
    let (n, d) = BERNOULLI[m - 1];
    XInterval::point(XReal::from_f64(n))
        .div(&XInterval::point(XReal::from_f64(d)))
        .expect("nonzero denominator")
}

/// Number of explicit terms before the Euler–Maclaurin tail.
const HURWITZ_TERMS: i64 = 40;
/// Bernoulli corrections used in the tail.
const HURWITZ_CORR: usize = 10;

/// Enclosure of ζ(2, b) = Σ_{j≥0} (b+j)^{-2} for `b ≥ 1`.
///
/// Explicit terms up to `a = b + J`, then
/// `Σ_{j≥0} (a+j)^{-2} = 1/a + 1/(2a²) + Σ_m B_{2m} a^{-2m-1} + R`,
/// where `|R|` is at most the first omitted correction (the derivatives of
/// `x^{-2}` alternate in sign and decrease in magnitude).
pub fn hurwitz_zeta2(b: XReal) -> Result<XInterval> {
    if !b.is_finite() || b < XReal::ONE {
        return Err(Error::Domain(format!("hurwitz_zeta2 needs b >= 1, got {b}")));
    }
    let one = XInterval::point(XReal::ONE);
    let bi = XInterval::point(b);
    let mut sum = XInterval::zero();
    for j in (0..HURWITZ_TERMS).rev() {
        let t = bi + XInterval::point(XReal::from(j));
        sum = sum + t.sqr().recip()?;
    }
    let a = bi + XInterval::point(XReal::from(HURWITZ_TERMS));
    let inv_a = one.div(&a)?;
    let inv_a2 = inv_a.sqr();
    let mut tail = inv_a + inv_a2.scale(0.5);
    let mut pw = inv_a2 * inv_a; // a^{-3}
    for m in 1..=HURWITZ_CORR {
        tail = tail + bernoulli_iv(m) * pw;
        pw = pw * inv_a2;
    }
    let r = (bernoulli_iv(HURWITZ_CORR + 1) * pw).abs().hi;
    let rem = XInterval { lo: -r, hi: r };
    Ok(sum + tail + rem)
}

/// ζ(s) for real `s > 1` by Euler–Maclaurin summation (point value).
fn zeta(s: XReal) -> XReal {
    const J: i64 = 40;
    let mut sum = XReal::ZERO;
    for k in (1..J).rev() {
        sum += pow_int_base(k, -s);
    }
    let jx = XReal::from(J);
    let j_ms = pow_int_base(J, -s);
    sum += jx * j_ms / (s - 1.0);
    sum += j_ms.mul_pwr2(0.5);
    // Σ B_{2m}/(2m)! · s(s+1)…(s+2m−2) · J^{-s-2m+1}
    let inv_fact = super::dd::inv_factorials();
    let inv_j = jx.recip();
    let inv_j2 = inv_j.sqr();
    let mut rising = s; // s(s+1)…(s+2m−2)
    let mut pw = j_ms * inv_j; // J^{-s-1}
    for m in 1..=14usize {
        sum += bernoulli(m) * inv_fact[2 * m] * rising * pw;
        rising = rising * (s + (2 * m - 1) as f64) * (s + (2 * m) as f64);
        pw *= inv_j2;
    }
    sum
}

/// `k^e` for a positive integer base, exact path for integral exponents.
fn pow_int_base(k: i64, e: XReal) -> XReal {
    let kx = XReal::from(k);
    let r = e.round();
    if r == e && r.abs().hi() <= 64.0 {
        kx.powi(r.hi() as i64)
    } else {
        (e * kx.ln()).exp()
    }
}

/// Polylogarithm Li_s(z) for real `s` and `0 ≤ z ≤ 1`.
///
/// Direct summation for `z < 1`, stopped once a geometric bound on the
/// remaining tail drops below `10^{-digits-2}` of the partial sum.
pub fn polylog(s: XReal, z: XReal, ctx: &PrecisionContext) -> Result<XReal> {
    if !z.is_finite() || !s.is_finite() || z < XReal::ZERO {
        return Err(Error::Domain(format!("polylog needs 0 <= z <= 1, got z = {z}")));
    }
    if z > XReal::ONE {
        return Err(Error::Domain(format!("polylog needs z <= 1, got z = {z}")));
    }
    if z.is_zero() {
        return Ok(XReal::ZERO);
    }
    if z == XReal::ONE {
        if s <= XReal::ONE {
            return Err(Error::Divergence(format!("Li_s(1) diverges for s = {s} <= 1")));
        }
        return Ok(zeta(s));
    }
    if s.is_zero() {
        return Ok(z / (XReal::ONE - z));
    }
    if s == XReal::from_f64(-1.0) {
        return Ok(z / (XReal::ONE - z).sqr());
    }
    let tol = ctx.tol(-2);
    let mut sum = XReal::ZERO;
    let mut zk = XReal::ONE;
    let mut k: i64 = 1;
    loop {
        zk *= z;
        let t = zk * pow_int_base(k, -s);
        sum += t;
        // ratio of consecutive terms from k+1 on is at most z·((k+2)/(k+1))^{-s}
        let growth = if s < XReal::ZERO {
            XReal::from(k + 2) / XReal::from(k + 1)
        } else {
            XReal::ONE
        };
        let r = z * growth.powf(-s);
        if r < XReal::ONE {
            let next = t * z * (XReal::from(k) / XReal::from(k + 1)).powf(s);
            let tail = next / (XReal::ONE - r);
            if tail.abs().hi() <= tol * sum.abs().hi() {
                break;
            }
        }
        k += 1;
        if k > 200_000_000 {
            return Err(Error::Resource(format!("polylog series at z = {z} needs more than 2e8 terms")));
        }
    }
    Ok(sum)
}

/// Γ(x) for `x > 0` (point value, non-rigorous).
///
/// Shifts the argument above 40 and applies Stirling's series.
pub fn gamma(x: XReal) -> Result<XReal> {
    if !x.is_finite() || x <= XReal::ZERO {
        return Err(Error::Domain(format!("gamma needs x > 0, got {x}")));
    }
    let mut y = x;
    let mut prod = XReal::ONE;
    while y < XReal::from_f64(40.0) {
        prod *= y;
        y += 1.0;
    }
    let half_ln_2pi = XReal::TWO_PI.ln().mul_pwr2(0.5);
    let mut lg = (y - 0.5) * y.ln() - y + half_ln_2pi;
    let inv_y = y.recip();
    let inv_y2 = inv_y.sqr();
    let mut pw = inv_y;
    for m in 1..=15usize {
        let d = (2 * m * (2 * m - 1)) as f64;
        lg += bernoulli(m) * pw / d;
        pw *= inv_y2;
    }
    Ok(lg.exp() / prod)
}

/// Rigorous upper enclosure `[0, (y/(y−x))·y^x·e^{−y}]` of `∫_y^∞ u^x e^{−u} du`.
pub fn tail_gamma_bound(x: XReal, y: XReal) -> Result<XInterval> {
    if !(y > x) {
        return Err(Error::Precondition(format!(
            "tail bound needs y > x (got x = {x}, y = {y}); enlarge L"
        )));
    }
    if x < XReal::ZERO {
        return Err(Error::Domain(format!("tail bound needs x >= 0, got {x}")));
    }
    let yi = XInterval::point(y);
    let ratio = yi.div(&(yi - XInterval::point(x)))?;
    let b = ratio * yi.powf(x)? * XInterval::point(-y).exp();
    Ok(XInterval {
        lo: XReal::ZERO,
        hi: b.hi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(s: &str) -> XReal {
        s.parse().unwrap()
    }

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    #[test]
    fn hurwitz_trivial_cases() {
        let pi2_6 = XReal::PI.sqr() / 6.0;
        let z1 = hurwitz_zeta2(XReal::ONE).unwrap();
        assert!(z1.contains(pi2_6), "{z1:?}");
        let z2 = hurwitz_zeta2(XReal::from_f64(2.0)).unwrap();
        assert!(z2.contains(pi2_6 - 1.0));
        assert!((z2.width() / z2.lo).to_f64() < 1e-28);
        assert!(hurwitz_zeta2(x("0.5")).is_err());
    }

    #[test]
    fn hurwitz_at_two_to_the_1_2() {
        // 50-digit reference value
        let want = x("0.543288564046038201665419599002762");
        let b = XReal::from_f64(2.0).powf(x("1.2"));
        let z = hurwitz_zeta2(b).unwrap();
        assert!(((z.mid() - want) / want).abs().to_f64() < 1e-28, "{z:?}");
    }

    #[test]
    fn polylog_closed_forms() {
        let c = ctx();
        assert_eq!(polylog(x("3.7"), XReal::ZERO, &c).unwrap(), XReal::ZERO);
        let l = polylog(XReal::ONE, x("0.5"), &c).unwrap();
        assert!((l - XReal::LN2).abs().to_f64() < 1e-30);
        let l = polylog(x("-2"), x("0.4"), &c).unwrap();
        // z(1+z)/(1−z)³ = 70/27
        assert!((l - XReal::from_f64(70.0) / 27.0).abs().to_f64() < 1e-29);
        let l = polylog(x("2.5"), x("0.3"), &c).unwrap();
        assert!((l - x("0.317948969478329633952141048824602")).abs().to_f64() < 1e-30);
    }

    #[test]
    fn polylog_at_one_is_zeta() {
        let c = ctx();
        let z15 = polylog(x("15"), XReal::ONE, &c).unwrap();
        assert!((z15 - x("1.00003058823630702049355172851064506")).abs().to_f64() < 1e-30);
        let s = polylog(x("14"), XReal::ONE, &c).unwrap() + z15;
        assert!((s - x("2.0000918364")).abs().to_f64() < 1e-10);
        assert!(matches!(polylog(XReal::ONE, XReal::ONE, &c), Err(Error::Divergence(_))));
        assert!(matches!(polylog(XReal::ONE, x("1.1"), &c), Err(Error::Domain(_))));
    }

    #[test]
    fn polylog_near_one() {
        let z = (x("-0.002") * XReal::PI).exp();
        let l = polylog(x("3"), z, &ctx()).unwrap();
        let want = x("1.19185118246277670910959087410431");
        assert!(((l - want) / want).abs().to_f64() < 1e-29, "{l:?}");
    }

    #[test]
    fn gamma_values() {
        let g3 = gamma(x("3")).unwrap();
        assert!((g3 - 2.0).abs().to_f64() < 1e-29);
        let g1 = gamma(XReal::ONE).unwrap();
        assert!((g1 - 1.0).abs().to_f64() < 1e-29);
        let g = gamma(x("3.4")).unwrap();
        let want = x("2.98120642681033297179136860544392");
        assert!(((g - want) / want).abs().to_f64() < 1e-28, "{g:?}");
        assert!(gamma(XReal::ZERO).is_err());
    }

    #[test]
    fn tail_bound_examples() {
        let b = tail_gamma_bound(x("2"), x("4")).unwrap();
        let e4 = x("-4").exp();
        assert!((b.hi - e4 * 32.0).abs().to_f64() < 1e-28);
        assert!(b.hi >= e4 * 26.0);
        // ∫_20^∞ u^2.4 e^{-u} du, 50-digit quadrature
        let q = x("3.08395677204160097239397464814195e-6");
        assert!(tail_gamma_bound(x("2.4"), x("20")).unwrap().hi >= q);
        assert!(matches!(tail_gamma_bound(x("2"), x("2")), Err(Error::Precondition(_))));
    }
}
