//! Where the ad hoc estimate loses sharpness.
//!
//! With `A = Σ|v̂_k|²e^{4π|k|ρ}`, `B = Σ e^{−4π|k|δ}/(4 sin²(πk·ω))` and
//! `C = Σ|v̂_k|e^{2π|k|(ρ−δ)}/(2|sin(πk·ω)|)`:
//!
//! * `I₁ = C/‖ℛv‖_{ρ−δ}` — triangle inequality,
//! * `I₂ = √(AB)/C` — Cauchy–Schwarz,
//! * `I₃ = 2^{n/2}‖v‖_ρ/√A` — coefficients against the sup-norm,
//!
//! and `I_R = I₁I₂I₃ = √(2^n B)·‖v‖_ρ/‖ℛv‖_{ρ−δ}`.

use crate::cohomology::solve;
use crate::diophantine::{half_shell, DiophantinePair, Frequency};
use crate::error::{Error, Result};
use crate::precision::{cabs, cnorm_sqr, PrecisionContext, XReal};
use crate::torusfn::{l1, sup_norm, TorusFourier};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Breakdown {
    pub i_r: XReal,
    pub i1: XReal,
    pub i2: XReal,
    pub i3: XReal,
    /// `log I_j / log I_R`; zero when `I_R = 1`.
    pub fractions: [XReal; 3],
    /// `F = ‖ℛv‖_{ρ−δ}/‖v‖_ρ`.
    pub f: XReal,
    pub norm_v: XReal,
    pub norm_u: XReal,
    pub a: XReal,
    pub b: XReal,
    pub c: XReal,
}

/// `B = Σ_{0<|k|₁≤M} e^{−4π|k|₁δ}/(4 sin²(πk·ω))` together with `M`.
///
/// `M ≥ min_cutoff`; beyond it shells are added until the Diophantine
/// remainder `Σ_{|k|₁>M} e^{−4π|k|₁δ}|k|₁^{2τ}/(16γ²)` drops below
/// `10^{−digits+10}·B`.
pub fn divisor_sum(
    omega: &Frequency,
    pair: &DiophantinePair,
    delta: XReal,
    min_cutoff: i64,
    ctx: &PrecisionContext,
) -> Result<(XReal, i64)> {
    if !(delta > XReal::ZERO) {
        return Err(Error::Domain(format!("delta must be positive, got {delta}")));
    }
    let n = omega.dim();
    let q = (-(XReal::PI.mul_pwr2(4.0) * delta)).exp();
    let (p, count) = if n == 1 {
        (pair.tau.mul_pwr2(2.0), 2.0)
    } else {
        (pair.tau.mul_pwr2(2.0) + 1.0, 4.0)
    };
    let factor = pair.gamma.sqr().mul_pwr2(16.0).recip() * count;
    let tol = ctx.tol(10);
    let hard_cap: i64 = if n == 1 { 10_000_000 } else { 20_000 };
    let mut sum = XReal::ZERO;
    let mut qm = XReal::ONE;
    let mut m: i64 = 0;
    loop {
        m += 1;
        qm = qm * q;
        let mut shell = XReal::ZERO;
        half_shell(n, m, |k| {
            let s = omega.phase(k).mul_pwr2(0.5).sincos_2pi().0;
            shell = shell + (s.sqr().mul_pwr2(2.0)).recip();
        });
        sum = sum + qm * shell;
        if m >= min_cutoff.max(1) {
            let m1 = XReal::from(m + 1);
            let ratio = q * ((m1 + 1.0) / m1).powf(p);
            if ratio < XReal::ONE {
                let tail = factor * qm * q * m1.powf(p) / (XReal::ONE - ratio);
                if tail <= sum * tol {
                    return Ok((sum, m));
                }
            }
        }
        if m >= hard_cap {
            return Err(Error::Resource(format!(
                "divisor sum for delta = {delta} did not settle within |k| <= {hard_cap}"
            )));
        }
    }
}

/// Breakdown from precomputed pieces: `u = ℛv`, `‖v‖_ρ` and `B`.
pub fn breakdown_with(
    v: &TorusFourier,
    u: &TorusFourier,
    norm_v: XReal,
    rho: XReal,
    delta: XReal,
    b: XReal,
    ctx: &PrecisionContext,
) -> Result<Breakdown> {
    if v.grid() != u.grid() || v.base_width() != u.base_width() {
        return Err(Error::Domain("v and u must share grid and base width".into()));
    }
    if !(delta > XReal::ZERO && delta <= rho && rho <= v.base_width()) {
        return Err(Error::Domain(format!(
            "need 0 < delta <= rho <= base width, got delta={delta}, rho={rho}"
        )));
    }
    if v.is_zero() || !(norm_v > XReal::ZERO) {
        return Err(Error::Undefined("breakdown of v = 0".into()));
    }
    let n = v.dim();
    let bw = v.base_width();
    let grid = *v.grid();
    let kmax = (0..n).map(|a| grid.size(a) as i64 / 2).sum::<i64>();
    // e^{−2πm(bw−ρ)} and e^{−2πm(bw−ρ+δ)}
    let ea = (-(XReal::TWO_PI * (bw - rho))).exp();
    let ec = (-(XReal::TWO_PI * (bw - rho + delta))).exp();
    let mut pa = vec![XReal::ONE; kmax as usize + 1];
    let mut pc = vec![XReal::ONE; kmax as usize + 1];
    for m in 1..=kmax as usize {
        pa[m] = pa[m - 1] * ea;
        pc[m] = pc[m - 1] * ec;
    }
    let mut a = XReal::ZERO;
    let mut c = XReal::ZERO;
    for (slot, (mv, mu)) in v.mantissas().iter().zip(u.mantissas()).enumerate() {
        if mv.re.is_zero() && mv.im.is_zero() {
            continue;
        }
        let m = l1(grid.index(slot)) as usize;
        a = a + cnorm_sqr(mv) * pa[m].sqr();
        c = c + cabs(mu) * pc[m];
    }
    let norm_u = sup_norm(u, rho - delta, ctx)?.value;
    if !(norm_u > XReal::ZERO) || !(c > XReal::ZERO) {
        return Err(Error::Undefined("ℛv vanishes".into()));
    }
    let i1 = c / norm_u;
    let i2 = (a * b).sqrt() / c;
    let i3 = norm_v * XReal::from_f64(2f64.powf(n as f64 / 2.0)) / a.sqrt();
    let i_r = i1 * i2 * i3;
    let lr = i_r.ln();
    let fractions = if lr.is_zero() {
        [XReal::ZERO; 3]
    } else {
        [i1.ln() / lr, i2.ln() / lr, i3.ln() / lr]
    };
    Ok(Breakdown {
        i_r,
        i1,
        i2,
        i3,
        fractions,
        f: norm_u / norm_v,
        norm_v,
        norm_u,
        a,
        b,
        c,
    })
}

/// Full breakdown of the ad hoc estimate for `v`.
pub fn breakdown(
    v: &TorusFourier,
    rho: XReal,
    delta: XReal,
    omega: &Frequency,
    pair: &DiophantinePair,
    ctx: &PrecisionContext,
) -> Result<Breakdown> {
    if v.is_zero() {
        return Err(Error::Undefined("breakdown of v = 0".into()));
    }
    let u = solve(v, omega, ctx)?;
    let norm_v = sup_norm(v, rho, ctx)?.value;
    let kmax = (0..v.dim()).map(|a| v.grid().size(a) as i64 / 2).sum::<i64>();
    let (b, _) = divisor_sum(omega, pair, delta, kmax, ctx)?;
    breakdown_with(v, &u, norm_v, rho, delta, b, ctx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testfam::{FamilySpec, Scheme};
    use crate::torusfn::{grid_size_for, GridSpec};
    use num_complex::Complex;

    fn golden_v0(rho: f64, delta: f64) -> Breakdown {
        let ctx = PrecisionContext::default();
        let g = grid_size_for(1, 1.0, rho, 0.0, ctx.eps(), 1 << 20).unwrap();
        let v = FamilySpec::v0(XReal::ONE).coefficients_on_grid(&g, &ctx).unwrap();
        breakdown(
            &v,
            XReal::from_f64(rho),
            XReal::from_f64(delta),
            &Frequency::golden(),
            &DiophantinePair::golden(),
            &ctx,
        )
        .unwrap()
    }

    #[test]
    fn reference_columns() {
        let b = golden_v0(0.5, 0.1);
        let got = [b.i1, b.i2, b.i3, b.i_r].map(|x| x.to_f64());
        for (g, w) in got.iter().zip([2.02, 1.37, 1.05, 2.9]) {
            assert!((g - w).abs() < 0.051, "{got:?}");
        }
        let b = golden_v0(0.9, 0.9);
        let got = [b.i1, b.i2, b.i3, b.i_r].map(|x| x.to_f64());
        for (g, w) in got.iter().zip([1.00, 1.18, 1.81, 2.1]) {
            assert!((g - w).abs() < 0.051, "{got:?}");
        }
    }

    #[test]
    fn identities() {
        let ctx = PrecisionContext::default();
        for (rho, delta) in [(0.3, 0.06), (0.7, 0.7), (0.5, 0.01)] {
            let b = golden_v0(rho, delta);
            let prod = b.i1 * b.i2 * b.i3;
            assert!(((prod - b.i_r) / b.i_r).abs().to_f64() < ctx.tol(8));
            let s = b.fractions[0] + b.fractions[1] + b.fractions[2];
            assert!((s - 1.0).abs().to_f64() < ctx.tol(8));
            assert!(b.i1 >= XReal::ONE && b.i2 >= XReal::ONE && b.i3 >= XReal::ONE);
        }
    }

    #[test]
    fn single_harmonic_saturates() {
        let ctx = PrecisionContext::default();
        let g = GridSpec::uniform(1, 16).unwrap();
        let e = XReal::TWO_PI.exp();
        let v = TorusFourier::from_fn(g, XReal::ONE, |k| {
            if k == [1, 0] {
                Complex::new(e, XReal::ZERO)
            } else {
                Complex::new(XReal::ZERO, XReal::ZERO)
            }
        });
        let u = solve(&v, &Frequency::golden(), &ctx).unwrap();
        let rho = XReal::from_f64(0.4);
        let delta = XReal::from_f64(0.2);
        let nv = sup_norm(&v, rho, &ctx).unwrap().value;
        // one-term divisor sum
        let s = (XReal::PI * crate::diophantine::golden_mean()).sin();
        let b1 = (-(XReal::PI.mul_pwr2(4.0) * delta)).exp() / (s.sqr().mul_pwr2(4.0));
        let b = breakdown_with(&v, &u, nv, rho, delta, b1, &ctx).unwrap();
        assert!((b.i1 - 1.0).abs().to_f64() < 1e-28);
        assert!((b.i2 - 1.0).abs().to_f64() < 1e-28);
    }

    #[test]
    fn fam3_cauchy_schwarz_is_sharp_at_matching_width() {
        // ρ̂ = ρ + δ
        let ctx = PrecisionContext::default();
        let spec = FamilySpec::fam3(XReal::ONE, Scheme::Ones, Frequency::golden(), None).unwrap();
        let rho = XReal::from_f64(0.7);
        let delta = XReal::from_f64(0.3);
        let g = grid_size_for(1, 1.0, 0.7, 0.0, ctx.eps(), 1 << 20).unwrap();
        let v = spec.coefficients_on_grid(&g, &ctx).unwrap();
        let b = breakdown(&v, rho, delta, &Frequency::golden(), &DiophantinePair::golden(), &ctx).unwrap();
        assert!((b.i2 - 1.0).abs().to_f64() < ctx.tol(8), "{}", b.i2);
    }

    #[test]
    fn divisor_sum_settles() {
        let ctx = PrecisionContext::default();
        let (b1, m1) = divisor_sum(&Frequency::golden(), &DiophantinePair::golden(), XReal::from_f64(0.1), 1, &ctx).unwrap();
        let (b2, m2) =
            divisor_sum(&Frequency::golden(), &DiophantinePair::golden(), XReal::from_f64(0.1), 2 * m1, &ctx).unwrap();
        assert!(m2 >= 2 * m1);
        assert!(((b1 - b2) / b2).abs().to_f64() < ctx.tol(10));
    }
}
