//! Test-function families with exact coefficient laws and norm oracles.
//!
//! * FAM1: `v̂_k = a_k e^{−2π|k|₁ρ̂}/|k|₁^s`
//! * FAM3: `v̂_k = b_k e^{−2π|k|₁ρ̂}/sin(π k·ω)`
//! * FAM1 with a spike: FAM1 plus unscaled `ŵ_k` on a small sub-grid.

use std::sync::{Arc, OnceLock};

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diophantine::{golden_mean, half_lattice, kpow, DiophantinePair, Frequency, FrequencyEnclosure};
use crate::error::{Error, Result};
use crate::precision::{cabs, polylog, PrecisionContext, XComplex, XReal};
use crate::torusfn::{l1, AnalyticSource, GridSpec, Index, TorusFourier};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    Fam1,
    Fam3,
    Fam1Spike,
}

/// How the unit-disk coefficients `a_k` / `b_k` are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Ones,
    /// 1 when every `k_ℓ ≥ 0`, else 0.
    PositiveOrthant,
    RandomDisk(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Spike {
    pub support: GridSpec,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub n: usize,
    pub s: XReal,
    pub rho_hat: XReal,
    pub scheme: Scheme,
    pub omega: Option<Frequency>,
    /// Diophantine constants of `omega`, used to bound FAM3 tails.
    pub pair: Option<DiophantinePair>,
    pub spike: Option<Spike>,
    fam3_weights: Arc<OnceLock<Vec<XReal>>>,
}

impl PartialEq for FamilySpec {
    fn eq(&self, o: &Self) -> bool {
        self.kind == o.kind
            && self.n == o.n
            && self.s == o.s
            && self.rho_hat == o.rho_hat
            && self.scheme == o.scheme
            && self.omega == o.omega
            && self.pair == o.pair
            && self.spike == o.spike
    }
}

/// Exact terms of the FAM3 norm bound are kept up to this `|k|₁`.
fn fam3_cutoff(n: usize) -> i64 {
    if n == 1 {
        4096
    } else {
        256
    }
}

impl FamilySpec {
    fn base(kind: FamilyKind, n: usize, s: XReal, rho_hat: XReal, scheme: Scheme) -> Result<FamilySpec> {
        if !(n == 1 || n == 2) {
            return Err(Error::Domain(format!("dimension must be 1 or 2, got {n}")));
        }
        if !(rho_hat > XReal::ZERO) {
            return Err(Error::Domain(format!("rho_hat must be positive, got {rho_hat}")));
        }
        if s < XReal::ZERO {
            return Err(Error::Domain(format!("s must be >= 0, got {s}")));
        }
        Ok(FamilySpec {
            kind,
            n,
            s,
            rho_hat,
            scheme,
            omega: None,
            pair: None,
            spike: None,
            fam3_weights: Arc::new(OnceLock::new()),
        })
    }

    pub fn fam1(n: usize, s: XReal, rho_hat: XReal, scheme: Scheme) -> Result<FamilySpec> {
        FamilySpec::base(FamilyKind::Fam1, n, s, rho_hat, scheme)
    }

    /// `v₀`: n = 1, `a_k = 1`, `s = 0`.
    pub fn v0(rho_hat: XReal) -> FamilySpec {
        FamilySpec::fam1(1, XReal::ZERO, rho_hat, Scheme::Ones).expect("valid")
    }

    /// `v_s` in dimension one.
    pub fn vs(s: XReal, rho_hat: XReal) -> Result<FamilySpec> {
        FamilySpec::fam1(1, s, rho_hat, Scheme::Ones)
    }

    /// `v_{s,+}` in dimension two.
    pub fn vsplus(s: XReal, rho_hat: XReal) -> Result<FamilySpec> {
        FamilySpec::fam1(2, s, rho_hat, Scheme::PositiveOrthant)
    }

    pub fn fam3(
        rho_hat: XReal,
        scheme: Scheme,
        omega: Frequency,
        pair: Option<DiophantinePair>,
    ) -> Result<FamilySpec> {
        let mut f = FamilySpec::base(FamilyKind::Fam3, omega.dim(), XReal::ZERO, rho_hat, scheme)?;
        f.omega = Some(omega);
        f.pair = pair;
        Ok(f)
    }

    /// Adds random unscaled `ŵ_k ∈ D̄` on `support` to a FAM1 spec.
    pub fn with_spike(mut self, support: GridSpec, seed: u64) -> Result<FamilySpec> {
        if self.kind != FamilyKind::Fam1 {
            return Err(Error::Domain("a spike can only be added to a FAM1 spec".into()));
        }
        if support.dim() != self.n {
            return Err(Error::Domain("spike support dimension mismatch".into()));
        }
        self.kind = FamilyKind::Fam1Spike;
        self.spike = Some(Spike { support, seed });
        Ok(self)
    }

    fn unit_coeff(&self, k: Index) -> XComplex {
        match self.scheme {
            Scheme::Ones => one(),
            Scheme::PositiveOrthant => {
                if k[0] >= 0 && k[1] >= 0 {
                    one()
                } else {
                    zero()
                }
            }
            Scheme::RandomDisk(seed) => disk_sample(seed, k),
        }
    }

    /// Scaled mantissa of coefficient `k` (storage at `base_width = ρ̂`).
    pub fn mantissa(&self, k: Index, ctx: &PrecisionContext) -> Result<XComplex> {
        if k == [0, 0] {
            return Ok(zero());
        }
        let a = self.unit_coeff(k);
        let mut m = match self.kind {
            FamilyKind::Fam1 | FamilyKind::Fam1Spike => {
                if self.s.is_zero() {
                    a
                } else {
                    a / kpow(l1(k), self.s)
                }
            }
            FamilyKind::Fam3 => {
                if a.re.is_zero() && a.im.is_zero() {
                    a
                } else {
                    a / self.signed_sin(k, ctx)?
                }
            }
        };
        if let Some(sp) = &self.spike {
            if sp.support.contains(k) {
                let w = disk_sample(sp.seed ^ SPIKE_TWEAK, k);
                m = m + w * (XReal::TWO_PI * self.rho_hat * (l1(k) as f64)).exp();
            }
        }
        Ok(m)
    }

    /// `sin(π k·ω)` with the sign of the unreduced argument.
    fn signed_sin(&self, k: Index, ctx: &PrecisionContext) -> Result<XReal> {
        let w = self.omega.as_ref().ok_or_else(|| Error::Domain("FAM3 needs a frequency".into()))?;
        let x = w.phase(k);
        let s = x.mul_pwr2(0.5).sincos_2pi().0;
        if s.abs().to_f64() < ctx.tol(4) {
            return Err(Error::NearResonance {
                k: k[..self.n].to_vec(),
                magnitude: s.abs().to_f64(),
            });
        }
        let mut full = XReal::ZERO;
        for (l, c) in w.comps().iter().enumerate() {
            full = full + *c * (k[l] as f64);
        }
        let m = (full - x).round();
        let odd = (m.to_f64() as i64).rem_euclid(2) == 1;
        Ok(if odd { -s } else { s })
    }

    pub fn coefficients_on_grid(&self, grid: &GridSpec, ctx: &PrecisionContext) -> Result<TorusFourier> {
        if grid.dim() != self.n {
            return Err(Error::Domain(format!(
                "grid dimension {} does not match family dimension {}",
                grid.dim(),
                self.n
            )));
        }
        let mut coeffs = Vec::with_capacity(grid.len());
        for slot in 0..grid.len() {
            coeffs.push(self.mantissa(grid.index(slot), ctx)?);
        }
        TorusFourier::new(*grid, self.rho_hat, coeffs)
    }

    /// Upper bounds `|1/sin(π k·ω)|` summed over each shell `|k|₁ = m`
    /// (both signs), `m = 1..=K`.
    fn fam3_shell_weights(&self) -> Result<&Vec<XReal>> {
        if let Some(w) = self.fam3_weights.get() {
            return Ok(w);
        }
        let omega = self.omega.as_ref().ok_or_else(|| Error::Domain("FAM3 needs a frequency".into()))?;
        let enc = FrequencyEnclosure::tight(omega);
        let kmax = fam3_cutoff(self.n);
        let mut shells = vec![XReal::ZERO; kmax as usize + 1];
        let mut err = None;
        half_lattice(self.n, kmax, |k| {
            if err.is_some() {
                return;
            }
            match enc.abs_sin(k) {
                Some(s) => shells[l1(k) as usize] = shells[l1(k) as usize] + s.lo.recip().mul_pwr2(2.0),
                None => {
                    err = Some(Error::NearResonance {
                        k: k[..self.n].to_vec(),
                        magnitude: 0.0,
                    })
                }
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        let _ = self.fam3_weights.set(shells);
        Ok(self.fam3_weights.get().expect("just set"))
    }

    fn fam3_pair(&self) -> Result<DiophantinePair> {
        if let Some(p) = self.pair {
            return Ok(p);
        }
        match &self.omega {
            Some(w) if w.dim() == 1 && w.comps()[0] == golden_mean() => Ok(DiophantinePair::golden()),
            _ => Err(Error::Precondition(
                "bounding a FAM3 norm needs Diophantine constants for omega".into(),
            )),
        }
    }

    /// Upper bound of `‖v‖_ρ` for `ρ < ρ̂` (or `ρ = ρ̂` where it converges).
    pub fn norm_upper_bound(&self, rho: XReal, ctx: &PrecisionContext) -> Result<XReal> {
        if rho < XReal::ZERO || rho > self.rho_hat {
            return Err(Error::Domain(format!("need 0 <= rho <= rho_hat, got {rho}")));
        }
        let zm = (-(XReal::TWO_PI * (self.rho_hat - rho))).exp();
        let base = match self.kind {
            FamilyKind::Fam1 | FamilyKind::Fam1Spike => match (self.n, self.scheme) {
                (1, Scheme::Ones) => exact_norm_vs(self.s, rho, self.rho_hat, ctx)?,
                (1, Scheme::PositiveOrthant) => polylog(self.s, zm, ctx)?,
                (1, Scheme::RandomDisk(_)) => polylog(self.s, zm, ctx)?.mul_pwr2(2.0),
                (_, Scheme::PositiveOrthant) => exact_norm_vsplus(self.s, rho, self.rho_hat, ctx)?,
                _ => polylog(self.s - 1.0, zm, ctx)?.mul_pwr2(4.0),
            },
            FamilyKind::Fam3 => self.fam3_bound(zm)?,
        };
        let mut extra = XReal::ZERO;
        if let Some(sp) = &self.spike {
            for slot in 0..sp.support.len() {
                let k = sp.support.index(slot);
                if k == [0, 0] {
                    continue;
                }
                let w = disk_sample(sp.seed ^ SPIKE_TWEAK, k);
                extra = extra + cabs(&w) * (XReal::TWO_PI * rho * (l1(k) as f64)).exp();
            }
        }
        // absorb the rounding of the closed forms
        Ok((base + extra) * (1.0 + 1e-28))
    }

    fn fam3_bound(&self, z: XReal) -> Result<XReal> {
        let pair = self.fam3_pair()?;
        let shells = self.fam3_shell_weights()?;
        let kmax = fam3_cutoff(self.n);
        let mut sum = XReal::ZERO;
        let mut zp = XReal::ONE;
        for w in shells.iter().skip(1) {
            zp = zp * z;
            sum = sum + *w * zp;
        }
        // beyond K: 1/|sin(πx)| ≤ 1/(2 dist(x)) ≤ |k|₁^τ/(2γ), shells of size 2 or 4m
        let (p, factor) = if self.n == 1 {
            (pair.tau, pair.gamma.recip())
        } else {
            (pair.tau + 1.0, pair.gamma.recip().mul_pwr2(2.0))
        };
        let k1 = XReal::from(kmax + 1);
        let ratio = z * ((k1 + 1.0) / k1).powf(p);
        if ratio >= XReal::ONE {
            return Ok(XReal::from_f64(1e300));
        }
        let tail = zp * z * k1.powf(p) / (XReal::ONE - ratio);
        Ok(sum + factor * tail)
    }
}

impl AnalyticSource for FamilySpec {
    fn dim(&self) -> usize {
        self.n
    }

    fn base_width(&self) -> XReal {
        self.rho_hat
    }

    fn decay_exponent(&self) -> f64 {
        self.s.to_f64()
    }

    fn on_grid(&self, grid: &GridSpec, ctx: &PrecisionContext) -> Result<TorusFourier> {
        self.coefficients_on_grid(grid, ctx)
    }

    fn norm_upper(&self, rho: XReal, ctx: &PrecisionContext) -> Result<XReal> {
        self.norm_upper_bound(rho, ctx)
    }
}

/// Separates the spike stream from the family stream.
const SPIKE_TWEAK: u64 = 0x9e37_79b9_7f4a_7c15;

fn one() -> XComplex {
    Complex::new(XReal::ONE, XReal::ZERO)
}

fn zero() -> XComplex {
    Complex::new(XReal::ZERO, XReal::ZERO)
}

fn zigzag(k: i64) -> u64 {
    ((k << 1) ^ (k >> 63)) as u64
}

/// Uniform point of the closed unit disk for index `k`, by rejection from the
/// square. Every `k` owns its own stream, so values do not depend on the grid.
pub fn disk_sample(seed: u64, k: Index) -> XComplex {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((zigzag(k[0]) << 32) | zigzag(k[1]));
    loop {
        let x: f64 = rng.random_range(-1.0..=1.0);
        let y: f64 = rng.random_range(-1.0..=1.0);
        if x * x + y * y <= 1.0 {
            return Complex::new(XReal::from_f64(x), XReal::from_f64(y));
        }
    }
}

/// `‖v₀‖_ρ = (cosh 2πρ − e^{−2πρ̂})/(cosh 2πρ̂ − cosh 2πρ)`.
pub fn exact_norm_v0(rho: XReal, rho_hat: XReal) -> Result<XReal> {
    if rho < XReal::ZERO || rho >= rho_hat {
        return Err(Error::Domain(format!("need 0 <= rho < rho_hat, got rho={rho}, rho_hat={rho_hat}")));
    }
    let a = XReal::TWO_PI * rho_hat;
    let b = XReal::TWO_PI * rho;
    // cosh a − cosh b = 2 sinh((a+b)/2) sinh((a−b)/2), free of cancellation
    let den = ((a + b).mul_pwr2(0.5)).sinh() * ((a - b).mul_pwr2(0.5)).sinh() * 2.0;
    Ok((b.cosh() - (-a).exp()) / den)
}

fn strip_args(rho: XReal, rho_hat: XReal) -> Result<(XReal, XReal)> {
    if rho < XReal::ZERO || rho > rho_hat {
        return Err(Error::Domain(format!("need 0 <= rho <= rho_hat, got rho={rho}, rho_hat={rho_hat}")));
    }
    let zm = if rho == rho_hat {
        XReal::ONE
    } else {
        (-(XReal::TWO_PI * (rho_hat - rho))).exp()
    };
    let zp = (-(XReal::TWO_PI * (rho_hat + rho))).exp();
    Ok((zm, zp))
}

/// `‖v_s‖_ρ = Li_s(e^{−2π(ρ̂−ρ)}) + Li_s(e^{−2π(ρ̂+ρ)})`.
pub fn exact_norm_vs(s: XReal, rho: XReal, rho_hat: XReal, ctx: &PrecisionContext) -> Result<XReal> {
    let (zm, zp) = strip_args(rho, rho_hat)?;
    if zm == XReal::ONE && s <= XReal::ONE {
        return Err(Error::Divergence(format!("v_s diverges on the boundary for s = {s} <= 1")));
    }
    Ok(polylog(s, zm, ctx)? + polylog(s, zp, ctx)?)
}

/// `‖v_{s,+}‖_ρ = Li_{s−1}(z) + Li_s(z)`, `z = e^{−2π(ρ̂−ρ)}`.
pub fn exact_norm_vsplus(s: XReal, rho: XReal, rho_hat: XReal, ctx: &PrecisionContext) -> Result<XReal> {
    let (zm, _) = strip_args(rho, rho_hat)?;
    if zm == XReal::ONE && s <= XReal::from_f64(2.0) {
        return Err(Error::Divergence(format!("v_s,+ diverges on the boundary for s = {s} <= 2")));
    }
    Ok(polylog(s - 1.0, zm, ctx)? + polylog(s, zm, ctx)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torusfn::sup_norm;

    fn x(s: &str) -> XReal {
        s.parse().unwrap()
    }

    #[test]
    fn fam1_mantissas() {
        let ctx = PrecisionContext::default();
        let g = GridSpec::uniform(1, 16).unwrap();
        let f = FamilySpec::v0(XReal::ONE).coefficients_on_grid(&g, &ctx).unwrap();
        for (k, m) in f.iter() {
            let want = if k == [0, 0] { zero() } else { one() };
            assert_eq!(*m, want);
        }
        let g2 = GridSpec::uniform(2, 8).unwrap();
        let f = FamilySpec::vsplus(XReal::ZERO, XReal::ONE)
            .unwrap()
            .coefficients_on_grid(&g2, &ctx)
            .unwrap();
        for (k, m) in f.iter() {
            let on = k != [0, 0] && k[0] >= 0 && k[1] >= 0;
            assert_eq!(*m, if on { one() } else { zero() });
        }
    }

    #[test]
    fn fam3_golden_first_mantissa() {
        let ctx = PrecisionContext::default();
        let spec = FamilySpec::fam3(XReal::ONE, Scheme::Ones, Frequency::golden(), None).unwrap();
        let m = spec.mantissa([1, 0], &ctx).unwrap();
        let want = (XReal::PI * golden_mean()).sin().recip();
        assert!((m.re - want).abs().to_f64() < 1e-30);
        assert!((m.re.to_f64() - 1.0729240469003174).abs() < 1e-13);
        // odd in k
        assert_eq!(spec.mantissa([-1, 0], &ctx).unwrap().re, -m.re);
        let w = Frequency::new(vec![golden_mean(), golden_mean()]).unwrap();
        let bad = FamilySpec::fam3(XReal::ONE, Scheme::Ones, w, None).unwrap();
        let g = GridSpec::uniform(2, 8).unwrap();
        assert!(matches!(
            bad.coefficients_on_grid(&g, &ctx),
            Err(Error::NearResonance { .. })
        ));
    }

    #[test]
    fn random_disk_is_deterministic_and_bounded() {
        let ctx = PrecisionContext::default();
        let spec = FamilySpec::fam1(2, XReal::ZERO, XReal::ONE, Scheme::RandomDisk(42)).unwrap();
        let g = GridSpec::uniform(2, 16).unwrap();
        let a = spec.coefficients_on_grid(&g, &ctx).unwrap();
        let b = spec.coefficients_on_grid(&g, &ctx).unwrap();
        assert_eq!(a, b);
        assert!(a.mantissas().iter().all(|c| cabs(c) <= XReal::ONE));
        // same a_k on a larger grid
        let big = spec.coefficients_on_grid(&GridSpec::uniform(2, 32).unwrap(), &ctx).unwrap();
        assert_eq!(big.mantissa([3, -5]), a.mantissa([3, -5]));
        let other = FamilySpec::fam1(2, XReal::ZERO, XReal::ONE, Scheme::RandomDisk(43)).unwrap();
        assert_ne!(other.coefficients_on_grid(&g, &ctx).unwrap(), a);
    }

    #[test]
    fn closed_forms() {
        let ctx = PrecisionContext::default();
        let v = exact_norm_v0(XReal::ZERO, XReal::ONE).unwrap();
        let want = (XReal::ONE - (-XReal::TWO_PI).exp()) / (XReal::TWO_PI.cosh() - 1.0);
        assert!(((v - want) / want).abs().to_f64() < 1e-30);
        assert!((v.to_f64() / 3.7418731973e-03 - 1.0).abs() < 1e-10);
        let v = exact_norm_v0(x("0.9"), XReal::ONE).unwrap();
        assert!((v.to_f64() / 1.1435745379e+00 - 1.0).abs() < 1e-10);
        let mut prev = XReal::ZERO;
        for r in ["0.99", "0.999", "0.9999", "0.99999"] {
            let v = exact_norm_v0(x(r), XReal::ONE).unwrap();
            assert!(v > prev);
            prev = v;
        }
        assert!(exact_norm_v0(XReal::ONE, XReal::ONE).is_err());

        let v = exact_norm_vs(x("15"), XReal::ONE, XReal::ONE, &ctx).unwrap();
        assert!((v.to_f64() / 1.0000340756 - 1.0).abs() < 1e-10);
        let v = exact_norm_vs(x("6"), XReal::ONE, XReal::ONE, &ctx).unwrap();
        assert!((v.to_f64() / 1.0173465493 - 1.0).abs() < 1e-10);
        assert!(matches!(
            exact_norm_vs(XReal::ONE, XReal::ONE, XReal::ONE, &ctx),
            Err(Error::Divergence(_))
        ));
        for r in ["0", "0.3", "0.77"] {
            let a = exact_norm_vs(XReal::ZERO, x(r), XReal::ONE, &ctx).unwrap();
            let b = exact_norm_v0(x(r), XReal::ONE).unwrap();
            assert!(((a - b) / b).abs().to_f64() < 1e-29);
        }

        let v = exact_norm_vsplus(x("15"), XReal::ONE, XReal::ONE, &ctx).unwrap();
        assert!((v.to_f64() / 2.0000918364 - 1.0).abs() < 1e-10);
        let v = exact_norm_vsplus(XReal::ZERO, x("0.5"), XReal::ONE, &ctx).unwrap();
        assert!((v.to_f64() / 9.2371351668e-02 - 1.0).abs() < 1e-10);
        let z = (-XReal::TWO_PI).exp();
        let want = z / (XReal::ONE - z).sqr() + z / (XReal::ONE - z);
        let v = exact_norm_vsplus(XReal::ZERO, XReal::ZERO, XReal::ONE, &ctx).unwrap();
        assert!(((v - want) / want).abs().to_f64() < 1e-29);
        assert!((v.to_f64() / 3.7453736011e-03 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn overestimates_dominate_computed_norms() {
        let ctx = PrecisionContext::default();
        let g = GridSpec::uniform(1, 256).unwrap();
        let specs = vec![
            FamilySpec::fam1(1, XReal::ZERO, XReal::ONE, Scheme::RandomDisk(5)).unwrap(),
            FamilySpec::fam3(XReal::ONE, Scheme::RandomDisk(6), Frequency::golden(), None).unwrap(),
            FamilySpec::fam3(XReal::ONE, Scheme::Ones, Frequency::golden(), None).unwrap(),
            FamilySpec::v0(XReal::ONE)
                .with_spike(GridSpec::uniform(1, 8).unwrap(), 9)
                .unwrap(),
        ];
        for spec in specs {
            let f = spec.coefficients_on_grid(&g, &ctx).unwrap();
            for r in ["0.1", "0.5", "0.8"] {
                let n = sup_norm(&f, x(r), &ctx).unwrap().value;
                let ub = spec.norm_upper_bound(x(r), &ctx).unwrap();
                assert!(n <= ub, "{:?} rho={r}: {n} > {ub}", spec.kind);
            }
        }
    }

    #[test]
    fn spike_adds_unscaled_coefficients() {
        let ctx = PrecisionContext::default();
        let spec = FamilySpec::v0(XReal::ONE)
            .with_spike(GridSpec::uniform(1, 8).unwrap(), 1)
            .unwrap();
        let f = spec.coefficients_on_grid(&GridSpec::uniform(1, 64).unwrap(), &ctx).unwrap();
        let c = f.coefficient([2, 0]);
        let w = disk_sample(1 ^ SPIKE_TWEAK, [2, 0]);
        let want = w + one() * (-(XReal::TWO_PI * 2.0)).exp();
        assert!(cabs(&(c - want)).to_f64() < 1e-30);
        assert_eq!(f.mantissa([10, 0]), one());
    }
}
