//! Coefficient-wise solution of `u(θ) − u(θ+ω) = v(θ)`.
//!
//! `û_k = v̂_k / (1 − e^{2πik·ω})`, `û₀ = 0`. The divisor is evaluated from
//! the reduced phase `x = k·ω mod 1` as
//! `1/(1 − e^{2πix}) = (1 + i·cot(πx))/2`, which keeps full relative accuracy
//! for large `|k|`.

use num_complex::Complex;

use crate::diophantine::Frequency;
use crate::error::{Error, Result};
use crate::precision::{cabs, PrecisionContext, XComplex, XReal};
use crate::torusfn::{fft_nd, l1, sup_norm, Direction, GridSpec, Index, SupNorm, TorusFourier};

/// `d_k = 2|sin(π k·ω)|` on a grid.
#[derive(Debug, Clone)]
pub struct SmallDivisorTable {
    omega: Frequency,
    grid: GridSpec,
    // (sin πx, cos πx) per slot, x the reduced phase; slot of k = 0 unused
    sc: Vec<(XReal, XReal)>,
}

impl SmallDivisorTable {
    pub fn new(omega: &Frequency, grid: GridSpec) -> Result<SmallDivisorTable> {
        if omega.dim() != grid.dim() {
            return Err(Error::Domain(format!(
                "frequency has {} components but the grid is {}-dimensional",
                omega.dim(),
                grid.dim()
            )));
        }
        let sc = (0..grid.len())
            .map(|s| {
                let k = grid.index(s);
                if k == [0, 0] {
                    (XReal::ZERO, XReal::ONE)
                } else {
                    omega.phase(k).mul_pwr2(0.5).sincos_2pi()
                }
            })
            .collect();
        Ok(SmallDivisorTable {
            omega: omega.clone(),
            grid,
            sc,
        })
    }

    pub fn omega(&self) -> &Frequency {
        &self.omega
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// `d_k`, or `None` for `k = 0` or off-grid `k`.
    pub fn get(&self, k: Index) -> Option<XReal> {
        if k == [0, 0] || !self.grid.contains(k) {
            return None;
        }
        Some(self.sc[self.grid.slot(k)].0.abs().mul_pwr2(2.0))
    }

    /// `1 − e^{2πik·ω} = 2 sin²(πx) − 2i sin(πx) cos(πx)`.
    pub fn factor(&self, slot: usize) -> XComplex {
        let (s, c) = self.sc[slot];
        Complex::new((s * s).mul_pwr2(2.0), -(s * c).mul_pwr2(2.0))
    }

    /// `1/(1 − e^{2πik·ω}) = 1/2 + i cot(πx)/2`.
    pub fn inverse_factor(&self, slot: usize) -> XComplex {
        let (s, c) = self.sc[slot];
        Complex::new(XReal::from_f64(0.5), (c / s).mul_pwr2(0.5))
    }
}

fn max_abs(c: &[XComplex]) -> XReal {
    c.iter().map(cabs).fold(XReal::ZERO, XReal::max)
}

/// `u = ℛv`, the zero-average solution on the grid of `v`.
pub fn solve(v: &TorusFourier, omega: &Frequency, ctx: &PrecisionContext) -> Result<TorusFourier> {
    let table = SmallDivisorTable::new(omega, *v.grid())?;
    solve_with(v, &table, ctx)
}

/// [`solve`] with a precomputed divisor table.
pub fn solve_with(v: &TorusFourier, table: &SmallDivisorTable, ctx: &PrecisionContext) -> Result<TorusFourier> {
    let grid = *v.grid();
    if table.grid() != &grid {
        return Err(Error::Domain("divisor table grid differs from the series grid".into()));
    }
    let plain = v.plain_coefficients()?;
    let vmax = max_abs(&plain);
    let v0 = cabs(&v.mantissa([0, 0]));
    if v0 > vmax * ctx.tol(6) && !v0.is_zero() {
        return Err(Error::Precondition(format!(
            "v has nonzero average |v_0| = {:.3e}; project it out first",
            v0.to_f64()
        )));
    }
    let thresh = ctx.tol(4);
    let mut out = Vec::with_capacity(grid.len());
    for (slot, m) in v.mantissas().iter().enumerate() {
        let k = grid.index(slot);
        if k == [0, 0] || (m.re.is_zero() && m.im.is_zero()) {
            out.push(Complex::new(XReal::ZERO, XReal::ZERO));
            continue;
        }
        let d = table.sc[slot].0.abs().mul_pwr2(2.0);
        if d.to_f64() < thresh {
            return Err(Error::NearResonance {
                k: k[..grid.dim()].to_vec(),
                magnitude: d.to_f64(),
            });
        }
        out.push(*m * table.inverse_factor(slot));
    }
    TorusFourier::new(grid, v.base_width(), out)
}

/// Coefficient residual `max_k |û_k(1 − e^{2πik·ω}) − v̂_k|` and the scale
/// `max_k |v̂_k|` it should be compared with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub max_abs: XReal,
    pub scale: XReal,
}

impl Residual {
    pub fn relative(&self) -> XReal {
        if self.scale.is_zero() {
            self.max_abs
        } else {
            self.max_abs / self.scale
        }
    }
}

pub fn coefficient_residual(u: &TorusFourier, v: &TorusFourier, omega: &Frequency) -> Result<Residual> {
    if u.grid() != v.grid() {
        return Err(Error::Domain("u and v live on different grids".into()));
    }
    let table = SmallDivisorTable::new(omega, *v.grid())?;
    let pu = u.plain_coefficients()?;
    let pv = v.plain_coefficients()?;
    let mut worst = XReal::ZERO;
    for slot in 0..pu.len() {
        let r = if slot == 0 {
            pu[0]
        } else {
            pu[slot] * table.factor(slot) - pv[slot]
        };
        worst = worst.max(cabs(&r));
    }
    Ok(Residual {
        max_abs: worst,
        scale: max_abs(&pv),
    })
}

/// `max_j |u(θ_j) − u(θ_j+ω) − v(θ_j)|` on the real grid, with `u(·+ω)`
/// formed by phase-shifting coefficients; returned with `max_j |v(θ_j)|`.
pub fn grid_residual(u: &TorusFourier, v: &TorusFourier, omega: &Frequency) -> Result<Residual> {
    if u.grid() != v.grid() {
        return Err(Error::Domain("u and v live on different grids".into()));
    }
    let grid = *v.grid();
    let pu = u.plain_coefficients()?;
    let pv = v.plain_coefficients()?;
    let mut shifted = Vec::with_capacity(pu.len());
    for (slot, c) in pu.iter().enumerate() {
        let x = omega.phase(grid.index(slot));
        let (s, co) = x.sincos_2pi();
        shifted.push(*c * Complex::new(co, s));
    }
    let mut a = pu;
    let mut b = shifted;
    let mut c = pv;
    for d in [&mut a, &mut b, &mut c] {
        fft_nd(d, grid.sizes(), Direction::Inverse);
    }
    let mut worst = XReal::ZERO;
    let mut scale = XReal::ZERO;
    for j in 0..a.len() {
        worst = worst.max(cabs(&(a[j] - b[j] - c[j])));
        scale = scale.max(cabs(&c[j]));
    }
    Ok(Residual { max_abs: worst, scale })
}

/// The pieces of `F_{ρ,δ,ω}v = ‖ℛv‖_{ρ−δ}/‖v‖_ρ`.
#[derive(Debug, Clone)]
pub struct FParts {
    pub u: TorusFourier,
    pub norm_u: SupNorm,
    pub norm_v: SupNorm,
}

impl FParts {
    pub fn value(&self) -> XReal {
        self.norm_u.value / self.norm_v.value
    }
}

fn check_strip(v: &TorusFourier, rho: XReal, delta: XReal) -> Result<()> {
    if !(delta > XReal::ZERO) {
        return Err(Error::Domain(format!("delta must be positive, got {delta}")));
    }
    if delta > rho {
        return Err(Error::Domain(format!("delta = {delta} exceeds rho = {rho}")));
    }
    if rho > v.base_width() {
        return Err(Error::Domain(format!(
            "rho = {rho} exceeds the base width {} of v",
            v.base_width()
        )));
    }
    Ok(())
}

pub fn f_parts(
    v: &TorusFourier,
    rho: XReal,
    delta: XReal,
    omega: &Frequency,
    ctx: &PrecisionContext,
) -> Result<FParts> {
    check_strip(v, rho, delta)?;
    if v.is_zero() {
        return Err(Error::Undefined("F is undefined for v = 0".into()));
    }
    let norm_v = sup_norm(v, rho, ctx)?;
    if norm_v.value.is_zero() {
        return Err(Error::Undefined("‖v‖ vanishes".into()));
    }
    let u = solve(v, omega, ctx)?;
    let norm_u = sup_norm(&u, rho - delta, ctx)?;
    Ok(FParts { u, norm_u, norm_v })
}

/// `F_{ρ,δ,ω}v = ‖ℛv‖_{ρ−δ}/‖v‖_ρ`.
pub fn f_functional(
    v: &TorusFourier,
    rho: XReal,
    delta: XReal,
    omega: &Frequency,
    ctx: &PrecisionContext,
) -> Result<XReal> {
    Ok(f_parts(v, rho, delta, omega, ctx)?.value())
}

/// Largest `|k|₁` carrying a nonzero coefficient.
pub fn support_radius(v: &TorusFourier) -> i64 {
    v.iter()
        .filter(|(_, c)| !(c.re.is_zero() && c.im.is_zero()))
        .map(|(k, _)| l1(k))
        .max()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diophantine::golden_mean;
    use crate::testfam::{FamilySpec, Scheme};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> XComplex {
        Complex::new(XReal::from_f64(re), XReal::from_f64(im))
    }

    #[test]
    fn single_harmonic() {
        let ctx = PrecisionContext::default();
        let g = GridSpec::uniform(1, 16).unwrap();
        let v = TorusFourier::harmonic(g, [1, 0], c(1.0, 0.0)).unwrap();
        let w = Frequency::golden();
        let u = solve(&v, &w, &ctx).unwrap();
        // direct complex evaluation of 1/(1 − e^{2πiω})
        let e = crate::precision::cis_2pi(golden_mean());
        let want = Complex::new(XReal::ONE, XReal::ZERO) / (Complex::new(XReal::ONE, XReal::ZERO) - e);
        assert!(cabs(&(u.mantissa([1, 0]) - want)).to_f64() < 1e-30);
        let m = cabs(&u.mantissa([1, 0]));
        assert!((m.to_f64() - 0.5364620234501587).abs() < 1e-14);
        assert!(u.mantissa([0, 0]).re.is_zero());

        let delta = XReal::from_f64(0.1);
        // same harmonic stored with base width 1
        let e = XReal::TWO_PI.exp();
        let v = TorusFourier::from_fn(g, XReal::ONE, |k| if k == [1, 0] { c(1.0, 0.0) * e } else { c(0.0, 0.0) });
        let f = f_functional(&v, delta, delta, &w, &ctx).unwrap();
        let want = (-(XReal::TWO_PI * delta)).exp() * m;
        assert!(((f - want) / want).abs().to_f64() < 1e-28);
        assert!((f.to_f64() - 0.28619).abs() < 1e-5);
    }

    #[test]
    fn right_inverse_and_zero() {
        let ctx = PrecisionContext::default();
        let g = GridSpec::uniform(2, 16).unwrap();
        let w = Frequency::parse("golden,0.3819660112501051").unwrap();
        let t = SmallDivisorTable::new(&w, g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cs: Vec<XComplex> = (0..g.len())
            .map(|s| if s == 0 { c(0.0, 0.0) } else { c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) })
            .collect();
        let vm: Vec<XComplex> = cs.iter().enumerate().map(|(s, x)| *x * t.factor(s)).collect();
        let v = TorusFourier::new(g, XReal::ZERO, vm).unwrap();
        let u = solve_with(&v, &t, &ctx).unwrap();
        for (a, b) in u.mantissas().iter().zip(&cs) {
            assert!(cabs(&(*a - *b)).to_f64() < 1e-26);
        }
        let z = TorusFourier::zeros(g, XReal::ONE);
        assert!(solve(&z, &w, &ctx).unwrap().is_zero());
        assert!(matches!(f_functional(&z, XReal::ONE, XReal::ONE, &w, &ctx), Err(Error::Undefined(_))));
    }

    #[test]
    fn rejects_average_and_resonance() {
        let ctx = PrecisionContext::default();
        let g = GridSpec::uniform(1, 16).unwrap();
        let v = TorusFourier::harmonic(g, [0, 0], c(1.0, 0.0)).unwrap();
        assert!(matches!(solve(&v, &Frequency::golden(), &ctx), Err(Error::Precondition(_))));
        let v = TorusFourier::harmonic(g, [4, 0], c(1.0, 0.0)).unwrap();
        let w = Frequency::scalar(XReal::from_f64(0.25)).unwrap();
        match solve(&v, &w, &ctx) {
            Err(Error::NearResonance { k, .. }) => assert_eq!(k, vec![4]),
            other => panic!("{other:?}"),
        }
        let v = TorusFourier::harmonic(g, [1, 0], c(1.0, 0.0)).unwrap();
        assert!(matches!(
            f_functional(&v, XReal::from_f64(0.1), XReal::from_f64(0.2), &w, &ctx),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn residuals_and_linearity() {
        let ctx = PrecisionContext::default();
        let g = GridSpec::uniform(1, 128).unwrap();
        let w = Frequency::golden();
        for spec in [
            FamilySpec::v0(XReal::ONE),
            FamilySpec::fam1(1, XReal::ZERO, XReal::ONE, Scheme::RandomDisk(11)).unwrap(),
            FamilySpec::fam3(XReal::ONE, Scheme::RandomDisk(12), w.clone(), None).unwrap(),
        ] {
            let v = spec.coefficients_on_grid(&g, &ctx).unwrap();
            let u = solve(&v, &w, &ctx).unwrap();
            assert!(coefficient_residual(&u, &v, &w).unwrap().relative().to_f64() < 1e-25);
            assert!(grid_residual(&u, &v, &w).unwrap().relative().to_f64() < ctx.tol(6));
            let a = c(0.3, -1.7);
            let ua = solve(&v.scale(a), &w, &ctx).unwrap();
            for (x, y) in ua.mantissas().iter().zip(u.mantissas()) {
                assert!(cabs(&(*x - *y * a)).to_f64() <= 1e-29 * (1.0 + cabs(x).to_f64()));
            }
        }
    }

    #[test]
    fn f_decreases_in_delta() {
        let ctx = PrecisionContext::default();
        let g = GridSpec::uniform(1, 128).unwrap();
        let v = FamilySpec::v0(XReal::ONE).coefficients_on_grid(&g, &ctx).unwrap();
        let rho = XReal::from_f64(0.5);
        let mut prev = XReal::from_f64(f64::INFINITY);
        for j in 1..=10 {
            let f = f_functional(&v, rho, rho * (j as f64 / 10.0), &Frequency::golden(), &ctx).unwrap();
            assert!(f <= prev);
            prev = f;
        }
    }
}
