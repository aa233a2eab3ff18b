//! Rüssmann constants and the validated enclosure of `F_{ρ,δ,ω}`.
//!
//! Classic: `c_R⁰ = (2^{n−3} ζ(2, 2^τ) (2π)^{−2τ} Γ(2τ+1))^{1/2}`.
//!
//! Ad hoc: the first `L` shells of the divisor sum are evaluated explicitly
//! and only the remainder is bounded through the Diophantine condition,
//!
//! ```text
//! c_R(δ)² = γ²δ^{2τ} 2^n Σ_{0<|k|₁≤L} e^{−4π|k|₁δ} / (4 sin²(πk·ω))
//!         + 2^{n−3} ζ(2, 2^τ) (2π)^{−2τ} ∫_{4πδ(L+1)}^∞ u^{2τ} e^{−u} du.
//! ```

use crate::cohomology::f_parts;
use crate::diophantine::{half_lattice, half_shell, DiophantinePair, Frequency, FrequencyEnclosure};
use crate::error::{Error, Result};
use crate::precision::{gamma, hurwitz_zeta2, tail_gamma_bound, PrecisionContext, XInterval, XReal};
use crate::torusfn::{best_rho_tilde, dft_error_log_constant, l1, AnalyticSource, GridSpec};

pub const MAX_CUTOFF_1D: i64 = 100_000;
pub const MAX_CUTOFF_2D: i64 = 317;

/// Relative size of the neglected tail that the default cutoff aims for.
const TAIL_FRACTION: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct RussmannParams {
    pub omega: FrequencyEnclosure,
    pub pair: DiophantinePair,
    pub delta: XReal,
    /// `L`, the last `|k|₁` summed explicitly.
    pub cutoff: i64,
}

impl RussmannParams {
    pub fn new(omega: FrequencyEnclosure, pair: DiophantinePair, delta: XReal, cutoff: i64) -> Result<RussmannParams> {
        pair.check_dim(omega.dim())?;
        if !(delta > XReal::ZERO) {
            return Err(Error::Domain(format!("delta must be positive, got {delta}")));
        }
        if cutoff < 1 {
            return Err(Error::Domain(format!("L must be >= 1, got {cutoff}")));
        }
        if !(XReal::TWO_PI * delta * ((cutoff + 1) as f64) > pair.tau) {
            return Err(Error::Precondition(format!(
                "need 2πδ(L+1) > τ; L = {cutoff} is too small for δ = {delta}, τ = {}",
                pair.tau
            )));
        }
        Ok(RussmannParams {
            omega,
            pair,
            delta,
            cutoff,
        })
    }

    /// Uses [`default_cutoff`] and a point enclosure of `ω`.
    pub fn with_default_cutoff(omega: &Frequency, pair: DiophantinePair, delta: XReal) -> Result<RussmannParams> {
        let l = default_cutoff(omega, &pair, delta)?;
        RussmannParams::new(FrequencyEnclosure::tight(omega), pair, delta, l)
    }

    pub fn dim(&self) -> usize {
        self.omega.dim()
    }

    /// `γδ^τ`.
    pub fn scale(&self) -> XReal {
        self.pair.gamma * self.delta.powf(self.pair.tau)
    }
}

fn four_pi() -> XInterval {
    XInterval::around(XReal::PI.mul_pwr2(4.0), 1e-31)
}

/// `2^{n−3} ζ(2, 2^τ) (2π)^{−2τ}`.
fn tail_prefactor(n: usize, tau: XReal) -> Result<XInterval> {
    let b = XReal::from_f64(2.0).powf(tau);
    let z = hurwitz_zeta2(b)?;
    let two_pi = XInterval::around(XReal::TWO_PI, 1e-31);
    let p = two_pi.powf(tau.mul_pwr2(2.0))?.recip()?;
    Ok((z * p).scale(2f64.powi(n as i32 - 3)))
}

fn check_tau(n: usize, tau: XReal) -> Result<()> {
    if !(n == 1 || n == 2) {
        return Err(Error::Domain(format!("dimension must be 1 or 2, got {n}")));
    }
    if tau < XReal::from(n) {
        return Err(Error::Domain(format!("need tau >= n, got tau = {tau}, n = {n}")));
    }
    Ok(())
}

/// `c_R⁰`, the classic δ-independent constant.
pub fn classic_constant(n: usize, tau: XReal) -> Result<XReal> {
    check_tau(n, tau)?;
    let g = gamma(tau.mul_pwr2(2.0) + 1.0)?;
    Ok((tail_prefactor(n, tau)?.mid() * g).sqrt())
}

/// Tail term `2^{n−3}ζ(2,2^τ)(2π)^{−2τ}∫_{4πδ(L+1)}^∞ u^{2τ}e^{−u}du`.
fn tail_term(n: usize, pair: &DiophantinePair, delta: XReal, l: i64) -> Result<XInterval> {
    let y = XReal::PI.mul_pwr2(4.0) * delta * ((l + 1) as f64);
    Ok(tail_prefactor(n, pair.tau)? * tail_gamma_bound(pair.tau.mul_pwr2(2.0), y)?)
}

/// Smallest `L` with `2πδ(L+1) > τ` whose tail term is at most `10^{−6}` of
/// the finite sum, capped at [`MAX_CUTOFF_1D`] / [`MAX_CUTOFF_2D`].
pub fn default_cutoff(omega: &Frequency, pair: &DiophantinePair, delta: XReal) -> Result<i64> {
    let n = omega.dim();
    pair.check_dim(n)?;
    if !(delta > XReal::ZERO) {
        return Err(Error::Domain(format!("delta must be positive, got {delta}")));
    }
    let cap = if n == 1 { MAX_CUTOFF_1D } else { MAX_CUTOFF_2D };
    let l0 = (pair.tau / (XReal::TWO_PI * delta)).floor().to_f64().max(1.0);
    if l0 > cap as f64 {
        return Err(Error::Precondition(format!(
            "delta = {delta} needs L > {l0}, beyond the cap {cap}"
        )));
    }
    let l0 = l0 as i64;
    let front = pair.gamma.sqr() * delta.powf(pair.tau.mul_pwr2(2.0)) * 2f64.powi(n as i32);
    let pref = tail_prefactor(n, pair.tau)?.hi;
    let four_pi_delta = XReal::PI.mul_pwr2(4.0) * delta;
    let q = (-four_pi_delta).exp();
    let mut qm = XReal::ONE;
    let mut sum = XReal::ZERO;
    for m in 1..=cap {
        qm = qm * q;
        sum = sum + qm * point_shell(omega, m);
        if m >= l0 {
            let y = four_pi_delta * ((m + 1) as f64);
            let t = pref * tail_gamma_bound(pair.tau.mul_pwr2(2.0), y)?.hi;
            if t <= front * sum * TAIL_FRACTION {
                return Ok(m);
            }
        }
    }
    Ok(cap)
}

/// `Σ_{|k|₁=m} 1/(4 sin²(πk·ω))` at the point `ω`.
fn point_shell(omega: &Frequency, m: i64) -> XReal {
    let mut acc = XReal::ZERO;
    half_shell(omega.dim(), m, |k| {
        let s = omega.phase(k).mul_pwr2(0.5).sincos_2pi().0;
        // ±k both contribute
        acc = acc + (s.sqr().mul_pwr2(2.0)).recip();
    });
    acc
}

/// The two parts of `c_R(δ)²` and the resulting enclosure of `c_R(δ)`.
#[derive(Debug, Clone, Copy)]
pub struct AdhocConstant {
    pub value: XInterval,
    pub finite: XInterval,
    pub tail: XInterval,
    pub cutoff: i64,
}

pub fn adhoc_parts(p: &RussmannParams) -> Result<AdhocConstant> {
    let n = p.dim();
    let d = XInterval::point(p.delta);
    let q = (four_pi() * d).scale(-1.0).exp();
    let l = p.cutoff;
    let mut qp = Vec::with_capacity(l as usize + 1);
    qp.push(XInterval::point(XReal::ONE));
    for m in 1..=l as usize {
        let next = qp[m - 1] * q;
        qp.push(next);
    }
    let mut shells = vec![XInterval::zero(); l as usize + 1];
    let mut bad: Option<Error> = None;
    half_lattice(n, l, |k| {
        if bad.is_some() {
            return;
        }
        match p.omega.abs_sin(k) {
            Some(s) => {
                let m = l1(k) as usize;
                // 2·e^{−4πmδ}/(4 s²), both signs of k
                match qp[m].div(&s.sqr().scale(2.0)) {
                    Ok(t) => shells[m] = shells[m] + t,
                    Err(e) => bad = Some(e),
                }
            }
            None => {
                bad = Some(Error::NearResonance {
                    k: k[..n].to_vec(),
                    magnitude: 0.0,
                })
            }
        }
    });
    if let Some(e) = bad {
        return Err(e);
    }
    let mut sum = XInterval::zero();
    for s in shells.iter().skip(1) {
        sum = sum + *s;
    }
    let g = XInterval::point(p.pair.gamma);
    let front = g.sqr() * d.powf(p.pair.tau.mul_pwr2(2.0))?.scale(2f64.powi(n as i32));
    let finite = front * sum;
    let tail = tail_term(n, &p.pair, p.delta, l)?;
    let value = (finite + tail).sqrt()?;
    Ok(AdhocConstant {
        value,
        finite,
        tail,
        cutoff: l,
    })
}

/// Enclosure of `c_R(δ)`.
pub fn adhoc_constant(p: &RussmannParams) -> Result<XInterval> {
    Ok(adhoc_parts(p)?.value)
}

/// `c_R(δ)/(γδ^τ)·‖v‖_ρ`, the bound on `‖u‖_{ρ−δ}`.
pub fn solution_bound(p: &RussmannParams, norm_v: XReal) -> Result<XReal> {
    if norm_v < XReal::ZERO {
        return Err(Error::Domain(format!("norm must be >= 0, got {norm_v}")));
    }
    Ok(adhoc_constant(p)?.hi / p.scale() * norm_v)
}

#[derive(Debug, Clone)]
pub struct FEnclosure {
    pub interval: XInterval,
    /// `‖ℛṽ‖_{ρ−δ}/‖ṽ‖_ρ` on the grid.
    pub point: XReal,
    pub rho_tilde: XReal,
    /// `C_N(ρ, ρ̃)·‖v‖_ρ̃`.
    pub error_bound: XReal,
    pub log_cn: XReal,
}

/// Validated interval for `F_{ρ,δ,ω}v` from the grid approximation `ṽ`:
///
/// ```text
/// [‖ℛṽ‖ − K·E] / [‖ṽ‖ + E]  ≤  F  ≤  [‖ℛṽ‖ + K·E] / [‖ṽ‖ − E],
/// E = C_N(ρ,ρ̃)‖v‖_ρ̃,  K = c_R(δ)/(γδ^τ).
/// ```
///
/// `ρ̃` defaults to the minimiser of `E`.
pub fn f_enclosure<S: AnalyticSource + ?Sized>(
    src: &S,
    p: &RussmannParams,
    rho: XReal,
    grid: GridSpec,
    rho_tilde: Option<XReal>,
    ctx: &PrecisionContext,
) -> Result<FEnclosure> {
    let rh = src.base_width();
    let delta = p.delta;
    if !(delta > XReal::ZERO && delta <= rho && rho < rh) {
        return Err(Error::Domain(format!(
            "need 0 < delta <= rho < rho_hat, got delta={delta}, rho={rho}, rho_hat={rh}"
        )));
    }
    if src.dim() != p.dim() {
        return Err(Error::Domain("frequency and function dimensions differ".into()));
    }
    let v = src.on_grid(&grid, ctx)?;
    let parts = f_parts(&v, rho, delta, &p.omega.center(), ctx)?;
    let (rt, log_cn, log_e) = match rho_tilde {
        Some(t) => {
            if !(t > rho && t < rh) {
                return Err(Error::Domain(format!("need rho < rho_tilde < rho_hat, got {t}")));
            }
            let lc = dft_error_log_constant(&grid, rho, t)?;
            (t, lc, lc + src.norm_upper(t, ctx)?.ln())
        }
        None => best_rho_tilde(src, &grid, rho, ctx)?,
    };
    let e = XInterval::point(log_e.exp().max(XReal::from_f64(1e-300)));
    let k = XInterval::point(adhoc_constant(p)?.hi).div(&XInterval::point(p.scale()))?;
    let nu = XInterval::point(parts.norm_u.value);
    let nv = XInterval::point(parts.norm_v.value);
    let ke = k * e;
    let lo_num = nu - ke;
    let hi_den = nv - e;
    if !(hi_den.lo > XReal::ZERO) {
        return Err(Error::GridTooCoarse(format!(
            "‖ṽ‖ = {} does not dominate the aliasing bound {}; refine the grid",
            parts.norm_v.value, e.hi
        )));
    }
    let lo = if lo_num.lo > XReal::ZERO {
        lo_num.div(&(nv + e))?.lo
    } else {
        XReal::ZERO
    };
    let hi = (nu + ke).div(&hi_den)?.hi;
    Ok(FEnclosure {
        interval: XInterval::new(lo, hi)?,
        point: parts.value(),
        rho_tilde: rt,
        error_bound: e.hi,
        log_cn,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::f_functional;
    use crate::testfam::{FamilySpec, Scheme};
    use crate::torusfn::grid_size_for;

    fn x(v: f64) -> XReal {
        XReal::from_f64(v)
    }

    fn golden_params(delta: f64, l: i64) -> RussmannParams {
        RussmannParams::new(
            FrequencyEnclosure::tight(&Frequency::golden()),
            DiophantinePair::golden(),
            x(delta),
            l,
        )
        .unwrap()
    }

    #[test]
    fn classic_values() {
        // sqrt(2^{-2}(π²/6 − 1)(2π)^{-2}·2)
        let pi = XReal::PI;
        let want = ((pi.sqr() / 6.0 - 1.0) / (XReal::TWO_PI.sqr()) * 0.5).sqrt();
        let c = classic_constant(1, XReal::ONE).unwrap();
        assert!(((c - want) / want).abs().to_f64() < 1e-29);
        assert!((c.to_f64() - 0.090378).abs() < 1e-6);
        let c2 = classic_constant(2, x(2.2)).unwrap();
        let c1 = classic_constant(1, x(2.2)).unwrap();
        assert!((c2 / c1 - XReal::from_f64(2.0).sqrt()).abs().to_f64() < 1e-29);
        // 2^{-2}·ζ(2, 2^{1.2})·(2π)^{-2.4}·Γ(3.4), 50-digit reference
        let c = classic_constant(1, "1.2".parse().unwrap()).unwrap();
        let want: XReal = "0.070123804199194340758091167431872".parse().unwrap();
        assert!(((c - want) / want).abs().to_f64() < 1e-25, "{c}");
        assert!(classic_constant(2, XReal::ONE).is_err());
    }

    #[test]
    fn cutoff_precondition() {
        let enc = FrequencyEnclosure::tight(&Frequency::golden());
        let r = RussmannParams::new(enc, DiophantinePair::golden(), x(0.01), 5);
        assert!(matches!(r, Err(Error::Precondition(_))));
        let l = default_cutoff(&Frequency::golden(), &DiophantinePair::golden(), x(0.1)).unwrap();
        assert!(XReal::TWO_PI * 0.1 * ((l + 1) as f64) > XReal::ONE);
        let p = golden_params(0.1, l);
        let a = adhoc_parts(&p).unwrap();
        assert!(a.tail.hi <= a.finite.lo * 1e-6);
    }

    #[test]
    fn adhoc_below_classic_and_monotone() {
        let c0 = classic_constant(1, XReal::ONE).unwrap();
        let mut prev_delta = XReal::from_f64(f64::INFINITY);
        for j in 1..=10 {
            let d = j as f64 / 10.0;
            let mut prev = XReal::from_f64(f64::INFINITY);
            for l in [100, 1000] {
                let c = adhoc_constant(&golden_params(d, l)).unwrap();
                assert!(c.hi <= c0, "delta {d} L {l}: {c} > {c0}");
                // nonincreasing up to the enclosure width
                assert!(c.lo <= prev, "delta {d} L {l}: {c} vs {prev}");
                prev = c.hi;
            }
            assert!(prev <= prev_delta);
            prev_delta = prev;
        }
        // stabilises in L
        let a = adhoc_constant(&golden_params(0.1, 1000)).unwrap().mid();
        let b = adhoc_constant(&golden_params(0.1, 2000)).unwrap().mid();
        assert!(((a - b) / a).abs().to_f64() < 1e-10);
    }

    #[test]
    fn two_dimensional_constant() {
        let w = Frequency::parse("golden,0.41421356237309504880168872420969808").unwrap();
        let pair = DiophantinePair::new(x(1e-3), x(2.2)).unwrap();
        let p = RussmannParams::with_default_cutoff(&w, pair, x(0.18)).unwrap();
        let c = adhoc_constant(&p).unwrap();
        // the tail enters as [0, bound], at most 1e-6 of the finite part
        assert!(c.lo > XReal::ZERO && c.width() < c.hi * 1e-6, "{c} L={}", p.cutoff);
    }

    #[test]
    fn bound_is_linear() {
        let p = golden_params(0.5, 100);
        assert_eq!(solution_bound(&p, XReal::ZERO).unwrap(), XReal::ZERO);
        let a = solution_bound(&p, x(1.5)).unwrap();
        let b = solution_bound(&p, x(3.0)).unwrap();
        assert!((b - a.mul_pwr2(2.0)).abs().to_f64() < 1e-28 * b.to_f64());
    }

    #[test]
    fn enclosure_contains_point_value() {
        let ctx = PrecisionContext::default();
        let rho = x(0.5);
        let delta = x(0.1);
        let l = default_cutoff(&Frequency::golden(), &DiophantinePair::golden(), delta).unwrap();
        let p = golden_params(0.1, l);
        let grid = grid_size_for(1, 1.0, 0.5, 0.0, ctx.eps(), 1 << 20).unwrap();
        for spec in [
            FamilySpec::v0(XReal::ONE),
            FamilySpec::fam1(1, XReal::ZERO, XReal::ONE, Scheme::RandomDisk(4)).unwrap(),
        ] {
            let e = f_enclosure(&spec, &p, rho, grid, None, &ctx).unwrap();
            let v = spec.coefficients_on_grid(&grid, &ctx).unwrap();
            let f = f_functional(&v, rho, delta, &Frequency::golden(), &ctx).unwrap();
            assert!(e.interval.contains(f));
            assert!((e.interval.width() / f).to_f64() < 1e-20, "{}", e.interval);
        }
        // a grid far too coarse for ρ̃ close to ρ
        let coarse = GridSpec::uniform(1, 8).unwrap();
        let r = f_enclosure(&FamilySpec::v0(XReal::ONE), &p, x(0.9), coarse, Some(x(0.9001)), &ctx);
        assert!(matches!(r, Err(Error::GridTooCoarse(_))));
    }
}
