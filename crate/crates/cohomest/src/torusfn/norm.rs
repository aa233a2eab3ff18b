//! Analytic sup-norm `‖f‖_ρ = max over the boundary sheets of |f|`.
//!
//! Each sheet is sampled on the grid by an inverse FFT; the best grid point
//! is then polished by a safeguarded Newton iteration on `|f|²` whose
//! derivatives come from direct summation of the Fourier series.

use num_complex::Complex;

use super::fft::{fft_nd, Direction};
use super::{czero, dft_error_log_constant, phase_table, BoundaryComponent, GridSpec, TorusFourier};
use crate::error::{Error, Result};
use crate::precision::{cnorm_sqr, PrecisionContext, XComplex, XInterval, XReal};

/// Largest grid accepted by default: `2^22` points in 1-D, `2048²` in 2-D.
pub const DEFAULT_MAX_POINTS_1D: usize = 1 << 22;
pub const DEFAULT_MAX_POINTS_2D: usize = 2048 * 2048;

const MAX_NEWTON: usize = 50;
const MAX_HALVINGS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupNorm {
    pub value: XReal,
    /// Real part of the maximiser.
    pub theta: [XReal; 2],
    pub sheet: BoundaryComponent,
    /// Largest `|f|` seen on the sampling grid.
    pub grid_max: XReal,
    /// False when the Newton polish stopped without converging; `value` is
    /// then still a lower bound of the true maximum.
    pub refined: bool,
}

/// Value and derivatives of `f` at one point of a sheet.
struct Jet {
    f: XComplex,
    /// `∂_ℓ f`
    d1: [XComplex; 2],
    /// `∂_ℓ∂_m f` as `[11, 12, 22]`
    d2: [XComplex; 3],
}

fn cz() -> XComplex {
    czero()
}

fn scale_c(z: XComplex, k: i64) -> XComplex {
    let t = XReal::from(k);
    Complex::new(z.re * t, z.im * t)
}

/// Direct evaluation of the sheet series and its first two derivatives.
fn jet(c: &[XComplex], grid: &GridSpec, theta: [XReal; 2]) -> Jet {
    let (a0, b0) = grid.axis_range(0);
    let (a1, b1) = grid.axis_range(1);
    let mut s = [cz(); 6]; // S00 S10 S20 S01 S11 S02
    if grid.dim() == 1 {
        // split k = 64a + b so that only O(N/64) phases need a sincos each
        const B: i64 = 64;
        let pb = phase_table(theta[0], 0, B - 1);
        let amin = a0.div_euclid(B);
        let amax = b0.div_euclid(B);
        for a in amin..=amax {
            let (mut t0, mut t1, mut t2) = (cz(), cz(), cz());
            for b in 0..B {
                let k = a * B + b;
                if k < a0 || k > b0 {
                    continue;
                }
                let ck = c[grid.slot([k, 0])];
                if ck.re.is_zero() && ck.im.is_zero() {
                    continue;
                }
                let w = ck * pb[b as usize];
                let kw = scale_c(w, k);
                t0 = t0 + w;
                t1 = t1 + kw;
                t2 = t2 + scale_c(kw, k);
            }
            let pa = phase_table(theta[0], a * B, a * B)[0];
            s[0] = s[0] + t0 * pa;
            s[1] = s[1] + t1 * pa;
            s[2] = s[2] + t2 * pa;
        }
    } else {
        let p0 = phase_table(theta[0], a0, b0);
        let p1 = phase_table(theta[1], a1, b1);
        for k0 in a0..=b0 {
            let (mut t0, mut t1, mut t2) = (cz(), cz(), cz());
            for k1 in a1..=b1 {
                let ck = c[grid.slot([k0, k1])];
                if ck.re.is_zero() && ck.im.is_zero() {
                    continue;
                }
                let w = ck * p1[(k1 - a1) as usize];
                let kw = scale_c(w, k1);
                t0 = t0 + w;
                t1 = t1 + kw;
                t2 = t2 + scale_c(kw, k1);
            }
            let p = p0[(k0 - a0) as usize];
            let u0 = t0 * p;
            let u1 = t1 * p;
            let k0u0 = scale_c(u0, k0);
            s[0] = s[0] + u0;
            s[1] = s[1] + k0u0;
            s[2] = s[2] + scale_c(k0u0, k0);
            s[3] = s[3] + u1;
            s[4] = s[4] + scale_c(u1, k0);
            s[5] = s[5] + t2 * p;
        }
    }
    let tp = XReal::TWO_PI;
    let i_tp = Complex::new(XReal::ZERO, tp);
    let m_tp2 = -(tp * tp);
    Jet {
        f: s[0],
        d1: [s[1] * i_tp, s[3] * i_tp],
        d2: [s[2] * m_tp2, s[4] * m_tp2, s[5] * m_tp2],
    }
}

fn re_conj_mul(a: &XComplex, b: &XComplex) -> XReal {
    a.re * b.re + a.im * b.im
}

/// `g = |f|²`, gradient and Hessian (`[11, 12, 22]`).
fn g_derivs(j: &Jet) -> (XReal, [XReal; 2], [XReal; 3]) {
    let g = cnorm_sqr(&j.f);
    let g1 = [
        re_conj_mul(&j.f, &j.d1[0]).mul_pwr2(2.0),
        re_conj_mul(&j.f, &j.d1[1]).mul_pwr2(2.0),
    ];
    let h = |a: usize, b: usize, ab: usize| {
        (re_conj_mul(&j.d1[a], &j.d1[b]) + re_conj_mul(&j.f, &j.d2[ab])).mul_pwr2(2.0)
    };
    (g, g1, [h(0, 0, 0), h(0, 1, 1), h(1, 1, 2)])
}

fn wrap_unit(t: XReal) -> XReal {
    t - t.floor()
}

/// Safeguarded Newton ascent of `|f|²` from a grid point.
fn refine(c: &[XComplex], grid: &GridSpec, start: [XReal; 2], ctx: &PrecisionContext) -> (XReal, [XReal; 2], bool) {
    let n = grid.dim();
    let step_tol = ctx.tol(2);
    let mut theta = start;
    let mut cur = jet(c, grid, theta);
    let (mut g, _, _) = g_derivs(&cur);
    for _ in 0..MAX_NEWTON {
        let (_, grad, h) = g_derivs(&cur);
        let mut delta = [XReal::ZERO; 2];
        let det = h[0] * h[2] - h[1] * h[1];
        let radius: Vec<f64> = (0..n).map(|l| 1.0 / grid.size(l) as f64).collect();
        if n == 2 && h[0] < XReal::ZERO && det > XReal::ZERO {
            delta[0] = -(h[2] * grad[0] - h[1] * grad[1]) / det;
            delta[1] = -(h[0] * grad[1] - h[1] * grad[0]) / det;
        } else {
            for l in 0..n {
                let hl = if l == 0 { h[0] } else { h[2] };
                delta[l] = if hl < XReal::ZERO {
                    -grad[l] / hl
                } else if grad[l].is_zero() {
                    XReal::ZERO
                } else {
                    XReal::from_f64(0.25 * radius[l] * grad[l].signum())
                };
            }
        }
        for l in 0..n {
            let r = XReal::from_f64(radius[l]);
            delta[l] = delta[l].max(-r).min(r);
        }
        let size = (0..n).map(|l| delta[l].abs().to_f64()).fold(0.0, f64::max);
        if size < step_tol {
            return (g, theta, true);
        }
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let mut trial = theta;
            for l in 0..n {
                trial[l] = wrap_unit(theta[l] + delta[l]);
            }
            let tj = jet(c, grid, trial);
            let tg = cnorm_sqr(&tj.f);
            if tg >= g {
                theta = trial;
                cur = tj;
                g = tg;
                accepted = true;
                break;
            }
            for d in delta.iter_mut().take(n) {
                *d = d.mul_pwr2(0.5);
            }
            let size = (0..n).map(|l| delta[l].abs().to_f64()).fold(0.0, f64::max);
            if size < step_tol {
                // no ascent direction above the rounding floor
                return (g, theta, true);
            }
        }
        if !accepted {
            return (g, theta, false);
        }
    }
    (g, theta, false)
}

/// `‖f‖_ρ` for `0 ≤ ρ ≤ base_width`.
pub fn sup_norm(f: &TorusFourier, rho: XReal, ctx: &PrecisionContext) -> Result<SupNorm> {
    if rho < XReal::ZERO {
        return Err(Error::Domain(format!("rho must be >= 0, got {rho}")));
    }
    if rho > f.base_width() {
        return Err(Error::Domain(format!(
            "rho = {rho} exceeds the base width {} of the stored coefficients",
            f.base_width()
        )));
    }
    let grid = *f.grid();
    let mut best: Option<SupNorm> = None;
    if f.is_zero() {
        return Ok(SupNorm {
            value: XReal::ZERO,
            theta: [XReal::ZERO; 2],
            sheet: BoundaryComponent { sigma: [1, 1] },
            grid_max: XReal::ZERO,
            refined: true,
        });
    }
    let sheets = if rho.is_zero() {
        vec![BoundaryComponent { sigma: [1, 1] }]
    } else {
        BoundaryComponent::all(grid.dim())
    };
    for sheet in sheets {
        let c = f.sheet_coefficients(rho, sheet)?;
        let mut vals = c.clone();
        fft_nd(&mut vals, grid.sizes(), Direction::Inverse);
        let (arg, gmax) = vals
            .iter()
            .enumerate()
            .map(|(i, v)| (i, cnorm_sqr(v)))
            .fold((0, XReal::from_f64(-1.0)), |acc, x| if x.1 > acc.1 { x } else { acc });
        let n1 = grid.size(1);
        let start = [
            XReal::from((arg / n1) as f64) / (grid.size(0) as f64),
            if grid.dim() == 2 {
                XReal::from((arg % n1) as f64) / (n1 as f64)
            } else {
                XReal::ZERO
            },
        ];
        let (g, theta, ok) = refine(&c, &grid, start, ctx);
        let value = g.max(gmax).sqrt();
        let cand = SupNorm {
            value,
            theta,
            sheet,
            grid_max: gmax.sqrt(),
            refined: ok,
        };
        if best.as_ref().is_none_or(|b| cand.value > b.value) {
            best = Some(cand);
        }
    }
    Ok(best.expect("at least one sheet"))
}

/// Smallest `M = 2^q ≥ 8` with `e^{−π(ρ̂−ρ)M/2}/(M/4)^s < ε`, as a uniform grid.
pub fn grid_size_for(
    n: usize,
    rho_hat: f64,
    rho: f64,
    s: f64,
    eps: f64,
    max_points: usize,
) -> Result<GridSpec> {
    if !(n == 1 || n == 2) {
        return Err(Error::Domain(format!("dimension must be 1 or 2, got {n}")));
    }
    if !(eps > 0.0) || rho < 0.0 || rho > rho_hat || (rho == rho_hat && s <= 0.0) {
        return Err(Error::Domain(format!(
            "grid size needs eps > 0 and rho < rho_hat (or s > 0 when equal); got rho={rho}, rho_hat={rho_hat}, s={s}, eps={eps}"
        )));
    }
    let target = eps.ln();
    let mut m: usize = 8;
    loop {
        let mf = m as f64;
        let lhs = -std::f64::consts::PI * (rho_hat - rho) * mf / 2.0 - s * (mf / 4.0).ln();
        if lhs < target {
            break;
        }
        m *= 2;
        if m.checked_pow(n as u32).is_none_or(|p| p > max_points) {
            return Err(Error::Resource(format!(
                "grid of side {m} in dimension {n} exceeds the cap of {max_points} points"
            )));
        }
    }
    if m.pow(n as u32) > max_points {
        return Err(Error::Resource(format!("grid of side {m} exceeds the cap of {max_points} points")));
    }
    GridSpec::uniform(n, m)
}

/// A function known through an exact coefficient law and an analytic bound.
pub trait AnalyticSource {
    fn dim(&self) -> usize;
    /// `ρ̂`: the coefficients decay like `e^{−2π|k|ρ̂}` up to polynomial factors.
    fn base_width(&self) -> XReal;
    /// Polynomial decay exponent `s` used to size grids.
    fn decay_exponent(&self) -> f64;
    /// Exact coefficients on `I_N` with scaled storage at `base_width`.
    fn on_grid(&self, grid: &GridSpec, ctx: &PrecisionContext) -> Result<TorusFourier>;
    /// Upper bound of `‖v‖_ρ` for `ρ < ρ̂`.
    fn norm_upper(&self, rho: XReal, ctx: &PrecisionContext) -> Result<XReal>;
}

#[derive(Debug, Clone)]
pub struct NormEnclosure {
    pub interval: XInterval,
    pub approx: SupNorm,
    pub grid: GridSpec,
    pub rho_tilde: XReal,
    /// `C_N(ρ, ρ̃)·‖v‖_ρ̃`.
    pub error_bound: XReal,
    pub log_cn: XReal,
}

/// Minimises `ln C_N(ρ, ρ̃) + ln ‖v‖_ρ̃` over `ρ̃ ∈ (ρ, ρ̂)`.
pub(crate) fn best_rho_tilde<S: AnalyticSource + ?Sized>(
    src: &S,
    grid: &GridSpec,
    rho: XReal,
    ctx: &PrecisionContext,
) -> Result<(XReal, XReal, XReal)> {
    let rh = src.base_width();
    let lo = rho + 1e-6;
    let hi = rh - 1e-6;
    if !(lo < hi) {
        return Err(Error::Domain(format!("rho = {rho} too close to rho_hat = {rh}")));
    }
    let obj = |t: XReal| -> Result<(XReal, XReal)> {
        let lc = dft_error_log_constant(grid, rho, t)?;
        let nv = src.norm_upper(t, ctx)?;
        if !(nv > XReal::ZERO) {
            return Ok((lc, XReal::from_f64(-1e300)));
        }
        Ok((lc, lc + nv.ln()))
    };
    let phi = (XReal::from_f64(5.0).sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - (b - a) * phi;
    let mut x2 = a + (b - a) * phi;
    let mut f1 = obj(x1)?.1;
    let mut f2 = obj(x2)?.1;
    for _ in 0..80 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - (b - a) * phi;
            f1 = obj(x1)?.1;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + (b - a) * phi;
            f2 = obj(x2)?.1;
        }
    }
    // the ends of the bracket are admissible too
    let mut best = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    for t in [lo, hi] {
        let v = obj(t)?.1;
        if v < best.1 {
            best = (t, v);
        }
    }
    let (lc, total) = obj(best.0)?;
    Ok((best.0, lc, total))
}

/// Enclosure of `‖v‖_ρ` from the sampled series: `‖ṽ‖_ρ ± C_N(ρ,ρ̃)‖v‖_ρ̃`.
///
/// `ṽ` is formed from exact coefficients truncated to `I_N`, which obeys the
/// same bound as sampled coefficients with a strictly smaller constant.
pub fn norm_enclosure<S: AnalyticSource + ?Sized>(
    src: &S,
    rho: XReal,
    eps: f64,
    max_points: usize,
    ctx: &PrecisionContext,
) -> Result<NormEnclosure> {
    let rh = src.base_width();
    if rho < XReal::ZERO || rho >= rh {
        return Err(Error::Domain(format!("need 0 <= rho < rho_hat, got rho={rho}, rho_hat={rh}")));
    }
    let grid = grid_size_for(src.dim(), rh.to_f64(), rho.to_f64(), src.decay_exponent(), eps, max_points)?;
    enclosure_on_grid(src, rho, grid, ctx)
}

/// [`norm_enclosure`] on a caller-chosen grid.
pub fn enclosure_on_grid<S: AnalyticSource + ?Sized>(
    src: &S,
    rho: XReal,
    grid: GridSpec,
    ctx: &PrecisionContext,
) -> Result<NormEnclosure> {
    let f = src.on_grid(&grid, ctx)?;
    let approx = sup_norm(&f, rho, ctx)?;
    if f.is_zero() {
        return Ok(NormEnclosure {
            interval: XInterval::zero(),
            approx,
            grid,
            rho_tilde: src.base_width(),
            error_bound: XReal::ZERO,
            log_cn: XReal::from_f64(f64::NEG_INFINITY),
        });
    }
    let (rho_tilde, log_cn, log_total) = best_rho_tilde(src, &grid, rho, ctx)?;
    let err = log_total.exp().max(XReal::from_f64(1e-300));
    let lo = (approx.value - err).max(XReal::ZERO);
    let hi = approx.value + err;
    Ok(NormEnclosure {
        interval: XInterval::new(lo, hi)?,
        approx,
        grid,
        rho_tilde,
        error_bound: err,
        log_cn,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(v: f64) -> XReal {
        XReal::from_f64(v)
    }

    #[test]
    fn grid_sizes() {
        let m = |rho: f64, s: f64| grid_size_for(1, 1.0, rho, s, 1e-30, DEFAULT_MAX_POINTS_1D).unwrap().size(0);
        assert_eq!(m(0.0, 0.0), 64);
        assert_eq!(m(0.5, 0.0), 128);
        assert_eq!(m(0.9, 0.0), 512);
        assert_eq!(m(0.999, 0.0), 65536);
        assert_eq!(m(1.0, 15.0), 512);
        assert_eq!(m(1.0, 14.0), 1024);
        assert_eq!(m(1.0, 10.0), 4096);
        assert!(matches!(
            grid_size_for(2, 1.0, 0.9999, 0.0, 1e-30, DEFAULT_MAX_POINTS_2D),
            Err(Error::Resource(_))
        ));
        assert!(grid_size_for(1, 1.0, 1.0, 0.0, 1e-30, DEFAULT_MAX_POINTS_1D).is_err());
    }

    #[test]
    fn single_harmonic_norm() {
        let g = GridSpec::uniform(1, 16).unwrap();
        let one = Complex::new(XReal::ONE, XReal::ZERO);
        let f = TorusFourier::harmonic(g, [1, 0], one).unwrap();
        let ctx = PrecisionContext::default();
        let r = sup_norm(&f, XReal::ZERO, &ctx).unwrap();
        assert_eq!(r.value, XReal::ONE);
        // sheet σ = −1 of a base-width-ρ copy gives e^{2πρ}
        let f = TorusFourier::new(g, x(0.25), f.mantissas().iter().map(|c| *c * (XReal::PI * 0.5).exp()).collect())
            .unwrap();
        let r = sup_norm(&f, x(0.25), &ctx).unwrap();
        assert_eq!(r.sheet.sigma[0], -1);
        assert!((r.value - (XReal::PI * 0.5).exp()).abs().to_f64() < 1e-30);
        assert!(sup_norm(&f, x(0.3), &ctx).is_err());
    }

    #[test]
    fn newton_finds_off_grid_maximum() {
        // f = 1 + e^{2πi(θ − 0.1)}/2 peaks at θ = 0.1, which is off the 8-point grid
        let g = GridSpec::uniform(1, 8).unwrap();
        let ph = crate::precision::cis_2pi(x(-0.1));
        let mut f = TorusFourier::harmonic(g, [0, 0], Complex::new(XReal::ONE, XReal::ZERO)).unwrap();
        f.mantissas_mut()[1] = ph * x(0.5);
        let r = sup_norm(&f, XReal::ZERO, &PrecisionContext::default()).unwrap();
        assert!(r.refined);
        assert!((r.value - x(1.5)).abs().to_f64() < 1e-30);
        assert!((r.theta[0] - x(0.1)).abs().to_f64() < 1e-14);
        assert!(r.value >= r.grid_max);
    }

    #[test]
    fn newton_in_two_dimensions() {
        let g = GridSpec::uniform(2, 8).unwrap();
        let mut f = TorusFourier::zeros(g, XReal::ZERO);
        f.mantissas_mut()[0] = Complex::new(XReal::ONE, XReal::ZERO);
        f.mantissas_mut()[g.slot([1, 0])] = crate::precision::cis_2pi(x(-0.07)) * x(0.25);
        f.mantissas_mut()[g.slot([0, 1])] = crate::precision::cis_2pi(x(-0.33)) * x(0.25);
        let r = sup_norm(&f, XReal::ZERO, &PrecisionContext::default()).unwrap();
        assert!(r.refined);
        assert!((r.value - x(1.5)).abs().to_f64() < 1e-30, "{}", r.value);
    }
}
