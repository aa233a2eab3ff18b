//! Frequencies, Diophantine constants and the two ways of assigning `(γ, τ)`.

use std::fmt;

use crate::error::{Error, Result};
use crate::precision::{PrecisionContext, XInterval, XReal, DD_EPS};
use crate::torusfn::{l1, Index};

/// Rotation vector with components in `(0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Frequency {
    comps: Vec<XReal>,
}

impl Frequency {
    pub fn new(comps: Vec<XReal>) -> Result<Frequency> {
        if comps.is_empty() || comps.len() > 2 {
            return Err(Error::Domain(format!("frequency must have 1 or 2 components, got {}", comps.len())));
        }
        for w in &comps {
            if !(*w > XReal::ZERO && *w < XReal::ONE) {
                return Err(Error::Domain(format!("frequency component {w} not in (0, 1)")));
            }
        }
        Ok(Frequency { comps })
    }

    pub fn scalar(w: XReal) -> Result<Frequency> {
        Frequency::new(vec![w])
    }

    /// `(√5 − 1)/2`.
    pub fn golden() -> Frequency {
        Frequency {
            comps: vec![golden_mean()],
        }
    }

    /// `sin((0.02 + 0.5 j)/10000)`.
    pub fn singrid(j: u32) -> Frequency {
        Frequency {
            comps: vec![singrid_value(j)],
        }
    }

    /// Parses `golden`, `singrid:<j>`, a decimal, or `<w1>,<w2>` (each part
    /// itself one of the scalar forms).
    pub fn parse(s: &str) -> Result<Frequency> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() > 2 {
            return Err(Error::Parse(format!("frequency {s:?} has more than two components")));
        }
        let comps = parts.iter().map(|p| parse_scalar(p)).collect::<Result<Vec<_>>>()?;
        Frequency::new(comps)
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn comps(&self) -> &[XReal] {
        &self.comps
    }

    /// `k·ω` reduced to `[−1/2, 1/2]` with exact per-component reduction.
    pub fn phase(&self, k: Index) -> XReal {
        let mut s = self.comps[0].frac_mul(k[0]);
        if self.comps.len() == 2 {
            s = s + self.comps[1].frac_mul(k[1]);
            s = s - s.round();
        }
        s
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.comps.iter().map(|c| c.to_sci_string(20)).collect();
        write!(f, "({})", parts.join(", "))
    }
}

fn parse_scalar(p: &str) -> Result<XReal> {
    if p.eq_ignore_ascii_case("golden") {
        return Ok(golden_mean());
    }
    if let Some(j) = p.strip_prefix("singrid:") {
        let j: u32 = j.parse().map_err(|e| Error::Parse(format!("bad singrid index {j:?}: {e}")))?;
        return Ok(singrid_value(j));
    }
    p.parse::<XReal>()
        .map_err(|e| Error::Parse(format!("bad frequency {p:?}: {e}")))
}

pub fn golden_mean() -> XReal {
    (XReal::from_f64(5.0).sqrt() - 1.0).mul_pwr2(0.5)
}

pub fn singrid_value(j: u32) -> XReal {
    ((XReal::from_f64(0.02) + XReal::from_f64(0.5) * (j as f64)) / 10000.0).sin()
}

/// Interval vector enclosing a frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyEnclosure {
    comps: Vec<XInterval>,
}

impl FrequencyEnclosure {
    pub fn new(comps: Vec<XInterval>) -> Result<FrequencyEnclosure> {
        if comps.is_empty() || comps.len() > 2 {
            return Err(Error::Domain("enclosure must have 1 or 2 components".into()));
        }
        Ok(FrequencyEnclosure { comps })
    }

    /// `[ω_ℓ − r, ω_ℓ + r]` componentwise.
    pub fn around(w: &Frequency, r: XReal) -> FrequencyEnclosure {
        let comps = w
            .comps
            .iter()
            .map(|c| XInterval {
                lo: *c - r,
                hi: *c + r,
            })
            .collect();
        FrequencyEnclosure { comps }
    }

    /// Point frequency widened by two units in the last place.
    pub fn tight(w: &Frequency) -> FrequencyEnclosure {
        let r = w
            .comps
            .iter()
            .map(|c| c.abs().to_f64() * 2.0 * DD_EPS)
            .fold(0.0, f64::max);
        FrequencyEnclosure::around(w, XReal::from_f64(r))
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn comps(&self) -> &[XInterval] {
        &self.comps
    }

    pub fn center(&self) -> Frequency {
        Frequency {
            comps: self.comps.iter().map(|c| c.mid()).collect(),
        }
    }

    /// Largest component half-width.
    pub fn radius(&self) -> XReal {
        self.comps.iter().map(|c| c.rad()).fold(XReal::ZERO, XReal::max)
    }

    /// Enclosure of `k·ϖ` reduced near `[−1/2, 1/2]`.
    pub fn phase(&self, k: Index) -> XInterval {
        let c = self.center().phase(k);
        let mut w = XReal::from_f64(4.0 * DD_EPS);
        for (l, comp) in self.comps.iter().enumerate() {
            w = w + comp.rad() * (k[l].abs() as f64) + XReal::from_f64(2.0 * DD_EPS * k[l].abs() as f64);
        }
        XInterval { lo: c - w, hi: c + w }
    }

    /// Enclosure of `|sin(π k·ω)|` over `ϖ`; `None` if it can vanish.
    pub fn abs_sin(&self, k: Index) -> Option<XInterval> {
        self.phase(k).abs_sin_pi()
    }
}

/// `(γ, τ)` with `γ > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiophantinePair {
    pub gamma: XReal,
    pub tau: XReal,
}

impl DiophantinePair {
    pub fn new(gamma: XReal, tau: XReal) -> Result<DiophantinePair> {
        if !(gamma > XReal::ZERO) || !gamma.is_finite() {
            return Err(Error::Domain(format!("gamma must be positive, got {gamma}")));
        }
        if !(tau >= XReal::ONE) {
            return Err(Error::Domain(format!("tau must be >= 1, got {tau}")));
        }
        Ok(DiophantinePair { gamma, tau })
    }

    /// `((3 − √5)/2, 1)`, the constants of the golden mean.
    pub fn golden() -> DiophantinePair {
        DiophantinePair {
            gamma: XReal::ONE - golden_mean(),
            tau: XReal::ONE,
        }
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        if self.tau < XReal::from(n) {
            return Err(Error::Domain(format!("tau = {} must be >= n = {n}", self.tau)));
        }
        Ok(())
    }
}

/// `|k|^τ`, exact for integer `τ`.
pub(crate) fn kpow(k: i64, tau: XReal) -> XReal {
    if tau == tau.floor() && tau.abs().hi() < 64.0 {
        XReal::from(k).powi(tau.to_f64() as i64)
    } else {
        XReal::from(k).powf(tau)
    }
}

/// `min_m |x − m|`.
pub fn dist_to_int(x: XReal) -> XReal {
    (x - x.round()).abs()
}

/// Calls `f` for one representative of every `±k` pair with `|k|₁ = m ≥ 1`.
pub fn half_shell(n: usize, m: i64, mut f: impl FnMut(Index)) {
    if n == 1 {
        f([m, 0]);
        return;
    }
    // k₀ > 0, or k₀ = 0 and k₁ > 0
    for k0 in 1..=m {
        let r = m - k0;
        f([k0, r]);
        if r != 0 {
            f([k0, -r]);
        }
    }
    f([0, m]);
}

/// Calls `f` for one representative of every `±k` pair with `0 < |k|₁ ≤ l`.
pub fn half_lattice(n: usize, l: i64, mut f: impl FnMut(Index)) {
    for m in 1..=l {
        half_shell(n, m, &mut f);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verification {
    pub holds: bool,
    pub worst_k: Index,
    /// `dist(k·ω)·|k|₁^τ/γ` at `worst_k`; `≥ 1` iff the condition holds there.
    pub ratio: XReal,
}

/// Checks `dist(k·ω) ≥ γ|k|₁^{−τ}` for all `0 < |k|₁ ≤ L`.
pub fn verify(w: &Frequency, pair: &DiophantinePair, l: i64) -> Result<Verification> {
    if l < 1 {
        return Err(Error::Domain(format!("L must be >= 1, got {l}")));
    }
    let mut worst = ([0i64; 2], XReal::from_f64(f64::INFINITY));
    half_lattice(w.dim(), l, |k| {
        let r = w.phase(k).abs() * kpow(l1(k), pair.tau) / pair.gamma;
        if r < worst.1 {
            worst = (k, r);
        }
    });
    Ok(Verification {
        holds: worst.1 >= XReal::ONE,
        worst_k: worst.0,
        ratio: worst.1,
    })
}

/// Partial quotients `[a₀, …, a_Q]` of `ω`.
pub fn continued_fraction(w: XReal, q: usize, ctx: &PrecisionContext) -> Result<Vec<i64>> {
    if q < 1 {
        return Err(Error::Domain("Q must be >= 1".into()));
    }
    let tiny = XReal::from_f64(ctx.tol(6));
    let qmax = 10f64.powf((ctx.digits() as f64 - 6.0) / 2.0);
    let mut x = w;
    let mut out = Vec::with_capacity(q + 1);
    let (mut q_prev, mut q_cur) = (0f64, 1f64);
    for j in 0..=q {
        let a = x.floor();
        if a.abs().hi() > 9.0e15 {
            return Err(Error::PrecisionExhausted { depth: j });
        }
        let ai = a.to_f64() as i64;
        out.push(ai);
        if j >= 1 {
            let next = ai as f64 * q_cur + q_prev;
            q_prev = q_cur;
            q_cur = next;
            if q_cur > qmax {
                return Err(Error::PrecisionExhausted { depth: j });
            }
        }
        if j == q {
            break;
        }
        let rem = x - a;
        if rem < tiny {
            return Err(Error::PrecisionExhausted { depth: j + 1 });
        }
        x = rem.recip();
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Method1 {
    pub pair: DiophantinePair,
    /// `[a₀, …, a_Q, 1^∞]` evaluated at working precision.
    pub omega_q: XReal,
    pub quotients: Vec<i64>,
    /// The `k` realising the minimum (stabilisation depth).
    pub argmin_k: i64,
}

/// `τ = 1` and `γ = min_{k ≤ K} k·dist(k·ω_Q)` for the noble approximant `ω_Q`.
pub fn method1(w: XReal, q: usize, k_max: i64, ctx: &PrecisionContext) -> Result<Method1> {
    if k_max < 1 {
        return Err(Error::Domain("K must be >= 1".into()));
    }
    let a = continued_fraction(w, q, ctx)?;
    let mut t = golden_mean();
    for aj in a[1..].iter().rev() {
        t = (XReal::from(*aj) + t).recip();
    }
    let omega_q = XReal::from(a[0]) + t;
    let mut best = (1i64, XReal::from_f64(f64::INFINITY));
    for k in 1..=k_max {
        let v = omega_q.frac_mul(k).abs() * (k as f64);
        if v < best.1 {
            best = (k, v);
        }
    }
    Ok(Method1 {
        pair: DiophantinePair::new(best.1, XReal::ONE)?,
        omega_q,
        quotients: a,
        argmin_k: best.0,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Method2 {
    pub pair: DiophantinePair,
    /// Finite-check bound `min_{|k|₁ ≤ K} dist(k·ϖ)|k|₁^τ`.
    pub gamma_k: XReal,
    /// Largest `γ` whose excluded measure beyond `K` stays below `r`.
    pub gamma_meas: XReal,
    pub radius: XReal,
    pub k_max: i64,
    pub argmin_k: Index,
    pub measure_dominates: bool,
}

/// `Σ_{ℓ>K} ℓ^{−p} ≤ K^{1−p}/(p−1)`.
fn power_tail(k: i64, p: XReal) -> XReal {
    XReal::from(k).powf(XReal::ONE - p) / (p - 1.0)
}

fn gamma_meas(n: usize, tau: XReal, k: i64, r: XReal) -> XReal {
    // Σ_{|k|₁>K} (2r|k|₁ + 2)·2γ|k|₁^{−τ−1} with #{|k|₁ = ℓ} = 2 (n=1), 4ℓ (n=2)
    let s = if n == 1 {
        r * power_tail(k, tau) * 8.0 + power_tail(k, tau + 1.0) * 8.0
    } else {
        r * power_tail(k, tau - 1.0) * 16.0 + power_tail(k, tau) * 16.0
    };
    r / s
}

/// Centre distances `dist(k·ω)` on the half lattice, for repeated radii.
struct LatticeDistances {
    tau: XReal,
    items: Vec<(Index, XReal, XReal)>, // k, dist of centre phase, |k|₁^τ
}

impl LatticeDistances {
    fn new(w: &Frequency, tau: XReal, k_max: i64) -> LatticeDistances {
        let mut items = Vec::new();
        half_lattice(w.dim(), k_max, |k| {
            items.push((k, w.phase(k).abs(), kpow(l1(k), tau)));
        });
        LatticeDistances { tau, items }
    }

    /// Rigorous lower bound of `min dist(k·ϖ)|k|₁^τ` for radius `r`.
    fn gamma_k(&self, r: XReal) -> Result<(XReal, Index)> {
        let mut best = (XReal::from_f64(f64::INFINITY), [0i64; 2]);
        for (k, d, kt) in &self.items {
            let slack = r * (l1(*k) as f64) + XReal::from_f64(DD_EPS * (8 + 4 * l1(*k)) as f64);
            let lo = *d - slack;
            if lo <= XReal::ZERO {
                return Err(Error::NearResonance {
                    k: k.to_vec(),
                    magnitude: d.to_f64(),
                });
            }
            let v = lo * *kt * (1.0 - 4.0 * DD_EPS);
            if v < best.0 {
                best = (v, *k);
            }
        }
        let _ = self.tau;
        Ok(best)
    }
}

/// Method 2 for the enclosure `ϖ` (its half-width is the radius `r`).
pub fn method2(enc: &FrequencyEnclosure, tau: XReal, k_max: i64) -> Result<Method2> {
    let n = enc.dim();
    if !(tau > XReal::from(n)) {
        return Err(Error::Precondition(format!("method 2 needs tau > n, got tau = {tau}")));
    }
    let r = enc.radius();
    if !(r > XReal::ZERO) {
        return Err(Error::Precondition("method 2 needs an enclosure of positive width".into()));
    }
    let dists = LatticeDistances::new(&enc.center(), tau, k_max.max(1));
    method2_from(&dists, n, tau, k_max.max(1), r)
}

fn method2_from(d: &LatticeDistances, n: usize, tau: XReal, k_max: i64, r: XReal) -> Result<Method2> {
    let (gk, argmin) = d.gamma_k(r)?;
    let gm = gamma_meas(n, tau, k_max, r);
    let gamma = gk.min(gm);
    Ok(Method2 {
        pair: DiophantinePair::new(gamma, tau)?,
        gamma_k: gk,
        gamma_meas: gm,
        radius: r,
        k_max,
        argmin_k: argmin,
        measure_dominates: gm < gk,
    })
}

/// Method 2 with the radius chosen from `{10^-3, …, 10^-20}` to maximise `γ`.
pub fn method2_auto(w: &Frequency, tau: XReal, k_max: i64) -> Result<Method2> {
    let n = w.dim();
    if !(tau > XReal::from(n)) {
        return Err(Error::Precondition(format!("method 2 needs tau > n, got tau = {tau}")));
    }
    let k_max = k_max.max(1);
    let dists = LatticeDistances::new(w, tau, k_max);
    let mut best: Option<Method2> = None;
    let mut last_err = None;
    for e in 3..=20 {
        let r = XReal::from_f64(10f64.powi(-e));
        match method2_from(&dists, n, tau, k_max, r) {
            Ok(m) => {
                if best.as_ref().is_none_or(|b| m.pair.gamma > b.pair.gamma) {
                    best = Some(m);
                }
            }
            Err(err) => last_err = Some(err),
        }
    }
    best.ok_or_else(|| last_err.expect("some radius was tried"))
}

/// Default `τ` for Method 2.
pub fn default_tau(n: usize) -> XReal {
    let t = if n == 1 { "1.2" } else { "2.2" };
    t.parse().expect("literal")
}
