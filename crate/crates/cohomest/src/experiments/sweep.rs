//! δ- and ω-sweeps of the Rüssmann overestimation.

use rayon::prelude::*;

use super::breakdown::{breakdown_with, divisor_sum, Breakdown};
use crate::cohomology::solve;
use crate::diophantine::{
    default_tau, golden_mean, method1, method2_auto, singrid_value, DiophantinePair, Frequency,
};
use crate::error::{Error, Result};
use crate::precision::{PrecisionContext, XReal};
use crate::russmann::{adhoc_parts, classic_constant, RussmannParams};
use crate::testfam::{FamilyKind, FamilySpec};
use crate::torusfn::{grid_size_for, sup_norm, DEFAULT_MAX_POINTS_1D, DEFAULT_MAX_POINTS_2D};

/// Default number of partial quotients tried first by Method 1.
pub const METHOD1_QUOTIENTS: usize = 10;
/// Default lattice radius checked by Methods 1 and 2.
pub const METHOD1_K: i64 = 100_000;
pub const METHOD2_K: i64 = 1000;

#[derive(Debug, Clone, PartialEq)]
pub enum DeltaRule {
    /// `δ = (j/100)ρ` for `j` in the range.
    Fractions { first: u32, last: u32 },
    Explicit(Vec<XReal>),
}

impl DeltaRule {
    pub fn all_fractions() -> DeltaRule {
        DeltaRule::Fractions { first: 1, last: 100 }
    }

    pub fn deltas(&self, rho: XReal) -> Vec<XReal> {
        match self {
            DeltaRule::Fractions { first, last } => (*first..=*last).map(|j| rho * (j as f64) / 100.0).collect(),
            DeltaRule::Explicit(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OmegaSource {
    Single(Frequency),
    /// `ω = singrid(j)` (n = 1) or `(golden, singrid(j))` (n = 2) for
    /// `j = first, first+stride, …` (`count` values).
    Singrid { first: u32, count: u32, stride: u32 },
}

impl OmegaSource {
    pub fn frequencies(&self, n: usize) -> Result<Vec<(Option<u32>, Frequency)>> {
        match self {
            OmegaSource::Single(w) => Ok(vec![(None, w.clone())]),
            OmegaSource::Singrid { first, count, stride } => (0..*count)
                .map(|i| {
                    let j = first + i * stride;
                    let w = if n == 1 {
                        Frequency::singrid(j)
                    } else {
                        Frequency::new(vec![golden_mean(), singrid_value(j)])?
                    };
                    Ok((Some(j), w))
                })
                .collect(),
        }
    }
}

/// How `(γ, τ)` is assigned to a frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PairMethod {
    Given(DiophantinePair),
    /// Continued fractions with a noble tail (n = 1, τ = 1).
    Method1,
    /// Interval exclusion with the given `τ` (default 1.2 / 2.2).
    Method2(Option<XReal>),
}

/// `(γ, τ)` for `ω` by the chosen method. `k_min` is a lower bound on the
/// lattice radius checked (use the Rüssmann cutoff `L`).
pub fn assign_pair(w: &Frequency, method: PairMethod, k_min: i64, ctx: &PrecisionContext) -> Result<DiophantinePair> {
    match method {
        PairMethod::Given(p) => Ok(p),
        PairMethod::Method1 => {
            if w.dim() != 1 {
                return Err(Error::Domain("method 1 applies to n = 1 only".into()));
            }
            let mut last = None;
            for q in (1..=METHOD1_QUOTIENTS).rev() {
                match method1(w.comps()[0], q, METHOD1_K.max(k_min), ctx) {
                    Ok(m) => return Ok(m.pair),
                    Err(e @ Error::PrecisionExhausted { .. }) => last = Some(e),
                    Err(e) => return Err(e),
                }
            }
            Err(last.expect("tried at least once"))
        }
        PairMethod::Method2(tau) => {
            let tau = tau.unwrap_or_else(|| default_tau(w.dim()));
            Ok(method2_auto(w, tau, METHOD2_K.max(k_min))?.pair)
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub family: FamilySpec,
    pub rhos: Vec<XReal>,
    pub deltas: DeltaRule,
    pub omega: OmegaSource,
    pub method: PairMethod,
    /// Grid tolerance for the choice of `N`.
    pub eps: f64,
    pub max_points: usize,
    /// Rüssmann cutoff `L`; default per [`crate::russmann::default_cutoff`].
    pub cutoff: Option<i64>,
}

impl SweepSpec {
    pub fn new(family: FamilySpec, rhos: Vec<XReal>, deltas: DeltaRule, omega: OmegaSource, method: PairMethod) -> SweepSpec {
        let max_points = if family.n == 1 {
            DEFAULT_MAX_POINTS_1D
        } else {
            SWEEP_MAX_POINTS_2D
        };
        SweepSpec {
            family,
            rhos,
            deltas,
            omega,
            method,
            eps: 1e-30,
            max_points,
            cutoff: None,
        }
    }
}

/// One `(ρ, δ)` point of a δ-sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaRow {
    pub rho: XReal,
    pub delta: XReal,
    pub grid_side: usize,
    pub gamma: XReal,
    pub tau: XReal,
    pub cutoff: i64,
    pub c_r: XReal,
    pub c_r0: XReal,
    /// `c_R(δ)/(γδ^τ)/F`.
    pub adhoc_ratio: XReal,
    /// `c_R⁰/(γδ^τ)/F`.
    pub classic_ratio: XReal,
    pub breakdown: Breakdown,
}

fn rho_checks(spec: &SweepSpec, rho: XReal) -> Result<()> {
    if !(rho > XReal::ZERO && rho < spec.family.rho_hat) {
        return Err(Error::Domain(format!(
            "need 0 < rho < rho_hat = {}, got {rho}",
            spec.family.rho_hat
        )));
    }
    Ok(())
}

fn family_for(spec: &FamilySpec, w: &Frequency) -> FamilySpec {
    let mut f = spec.clone();
    if f.kind == FamilyKind::Fam3 {
        if f.omega.as_ref() != Some(w) {
            f.pair = None;
        }
        f.omega = Some(w.clone());
    }
    f
}

fn cutoff_for(spec_cutoff: Option<i64>, w: &Frequency, pair: &DiophantinePair, delta: XReal) -> Result<RussmannParams> {
    match spec_cutoff {
        Some(l) => RussmannParams::new(crate::diophantine::FrequencyEnclosure::tight(w), *pair, delta, l),
        None => RussmannParams::with_default_cutoff(w, *pair, delta),
    }
}

/// Pair whose lattice check radius covers the Rüssmann cutoff used at every
/// `δ`, so that `c_R(δ) ≤ c_R⁰` stays provable.
fn pair_covering(w: &Frequency, spec: &SweepSpec, deltas: &[XReal], ctx: &PrecisionContext) -> Result<DiophantinePair> {
    let mut k_min = spec.cutoff.unwrap_or(1);
    let mut pair = assign_pair(w, spec.method, k_min, ctx)?;
    // L grows as γ shrinks, so a couple of rounds settle it
    for _ in 0..3 {
        let radius = match spec.method {
            PairMethod::Given(_) => return Ok(pair),
            PairMethod::Method1 => METHOD1_K.max(k_min),
            PairMethod::Method2(_) => METHOD2_K.max(k_min),
        };
        let mut need = 0;
        for &d in deltas {
            need = need.max(cutoff_for(spec.cutoff, w, &pair, d)?.cutoff);
        }
        if need <= radius {
            break;
        }
        k_min = need;
        pair = assign_pair(w, spec.method, k_min, ctx)?;
    }
    Ok(pair)
}

/// Rows for every `ρ` and every `δ` of the rule at a single frequency.
pub fn sweep_delta(spec: &SweepSpec, ctx: &PrecisionContext) -> Result<Vec<DeltaRow>> {
    let freqs = spec.omega.frequencies(spec.family.n)?;
    if freqs.len() != 1 {
        return Err(Error::Domain("a delta sweep needs a single frequency".into()));
    }
    let w = &freqs[0].1;
    if w.dim() != spec.family.n {
        return Err(Error::Domain("frequency and family dimensions differ".into()));
    }
    let all: Vec<XReal> = spec.rhos.iter().flat_map(|&r| spec.deltas.deltas(r)).collect();
    let pair = pair_covering(w, spec, &all, ctx)?;
    let family = family_for(&spec.family, w);
    let c_r0 = classic_constant(w.dim(), pair.tau)?;
    let mut rows = Vec::new();
    for &rho in &spec.rhos {
        rho_checks(spec, rho)?;
        let grid = grid_size_for(
            family.n,
            family.rho_hat.to_f64(),
            rho.to_f64(),
            family.s.to_f64(),
            spec.eps,
            spec.max_points,
        )?;
        let v = family.coefficients_on_grid(&grid, ctx)?;
        let u = solve(&v, w, ctx)?;
        let norm_v = sup_norm(&v, rho, ctx)?.value;
        let kmax = (0..grid.dim()).map(|a| grid.size(a) as i64 / 2).sum::<i64>();
        let deltas = spec.deltas.deltas(rho);
        let part: Vec<DeltaRow> = deltas
            .par_iter()
            .map(|&delta| -> Result<DeltaRow> {
                let (b, _) = divisor_sum(w, &pair, delta, kmax, ctx)?;
                let bd = breakdown_with(&v, &u, norm_v, rho, delta, b, ctx)?;
                let p = cutoff_for(spec.cutoff, w, &pair, delta)?;
                let c_r = adhoc_parts(&p)?.value.hi;
                let scale = p.scale() * bd.f;
                Ok(DeltaRow {
                    rho,
                    delta,
                    grid_side: grid.size(0),
                    gamma: pair.gamma,
                    tau: pair.tau,
                    cutoff: p.cutoff,
                    c_r,
                    c_r0,
                    adhoc_ratio: c_r / scale,
                    classic_ratio: c_r0 / scale,
                    breakdown: bd,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.extend(part);
    }
    Ok(rows)
}

/// One frequency of an ω-sweep; failures are kept as rows.
#[derive(Debug, Clone)]
pub struct OmegaRow {
    pub index: Option<u32>,
    pub omega: Frequency,
    pub outcome: std::result::Result<OmegaPoint, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OmegaPoint {
    pub gamma: XReal,
    pub tau: XReal,
    pub cutoff: i64,
    pub c_r: XReal,
    pub c_r0: XReal,
    pub adhoc_ratio: XReal,
    pub classic_ratio: XReal,
    pub breakdown: Breakdown,
}

impl OmegaPoint {
    /// How much worse the classic estimate is than the ad hoc one,
    /// `(c_R⁰/(γδ^τ)/F) / I_R`.
    pub fn classic_over_adhoc(&self) -> XReal {
        self.classic_ratio / self.breakdown.i_r
    }
}

/// Rows for every frequency of the source at the first `ρ` and `δ`.
pub fn sweep_omega(spec: &SweepSpec, ctx: &PrecisionContext) -> Result<Vec<OmegaRow>> {
    let n = spec.family.n;
    let rho = *spec.rhos.first().ok_or_else(|| Error::Domain("no rho given".into()))?;
    rho_checks(spec, rho)?;
    let delta = *spec
        .deltas
        .deltas(rho)
        .first()
        .ok_or_else(|| Error::Domain("no delta given".into()))?;
    if !(delta > XReal::ZERO && delta <= rho) {
        return Err(Error::Domain(format!("need 0 < delta <= rho, got {delta}")));
    }
    let grid = grid_size_for(
        n,
        spec.family.rho_hat.to_f64(),
        rho.to_f64(),
        spec.family.s.to_f64(),
        spec.eps,
        spec.max_points,
    )?;
    let fixed_v = if spec.family.kind == FamilyKind::Fam3 {
        None
    } else {
        let v = spec.family.coefficients_on_grid(&grid, ctx)?;
        let nv = sup_norm(&v, rho, ctx)?.value;
        Some((v, nv))
    };
    let kmax = (0..n).map(|a| grid.size(a) as i64 / 2).sum::<i64>();
    let freqs = spec.omega.frequencies(n)?;
    let rows = freqs
        .into_par_iter()
        .map(|(index, w)| {
            let point = || -> Result<OmegaPoint> {
                let pair = pair_covering(&w, spec, &[delta], ctx)?;
                let (v, nv) = match &fixed_v {
                    Some((v, nv)) => (v.clone(), *nv),
                    None => {
                        let v = family_for(&spec.family, &w).coefficients_on_grid(&grid, ctx)?;
                        let nv = sup_norm(&v, rho, ctx)?.value;
                        (v, nv)
                    }
                };
                let u = solve(&v, &w, ctx)?;
                let (b, _) = divisor_sum(&w, &pair, delta, kmax, ctx)?;
                let bd = breakdown_with(&v, &u, nv, rho, delta, b, ctx)?;
                let p = cutoff_for(spec.cutoff, &w, &pair, delta)?;
                let c_r = adhoc_parts(&p)?.value.hi;
                let c_r0 = classic_constant(n, pair.tau)?;
                let scale = p.scale() * bd.f;
                Ok(OmegaPoint {
                    gamma: pair.gamma,
                    tau: pair.tau,
                    cutoff: p.cutoff,
                    c_r,
                    c_r0,
                    adhoc_ratio: c_r / scale,
                    classic_ratio: c_r0 / scale,
                    breakdown: bd,
                })
            };
            OmegaRow {
                index,
                omega: w.clone(),
                outcome: point().map_err(|e| e.to_string()),
            }
        })
        .collect();
    Ok(rows)
}

/// Default grid cap for two-dimensional sweeps.
pub const SWEEP_MAX_POINTS_2D: usize = 512 * 512;
const _: () = assert!(SWEEP_MAX_POINTS_2D <= DEFAULT_MAX_POINTS_2D);

#[cfg(test)]
mod tests {
    use super::*;

    fn x(v: f64) -> XReal {
        XReal::from_f64(v)
    }

    #[test]
    fn golden_delta_rows() {
        let ctx = PrecisionContext::default();
        let spec = SweepSpec::new(
            FamilySpec::v0(XReal::ONE),
            vec![x(0.5)],
            DeltaRule::Explicit(vec![x(0.1)]),
            OmegaSource::Single(Frequency::golden()),
            PairMethod::Given(DiophantinePair::golden()),
        );
        let rows = sweep_delta(&spec, &ctx).unwrap();
        assert_eq!(rows.len(), 1);
        let r = &rows[0];
        assert!((r.adhoc_ratio.to_f64() - 2.9).abs() < 0.05, "{}", r.adhoc_ratio);
        assert!((r.classic_ratio.to_f64() - 8.5).abs() < 0.1, "{}", r.classic_ratio);
        assert!(((r.adhoc_ratio - r.breakdown.i_r) / r.adhoc_ratio).abs().to_f64() < 1e-5);
    }

    #[test]
    fn method1_on_golden_matches_given_pair() {
        let ctx = PrecisionContext::default();
        let p = assign_pair(&Frequency::golden(), PairMethod::Method1, 1, &ctx).unwrap();
        assert!((p.gamma - DiophantinePair::golden().gamma).abs().to_f64() < 1e-24);
        let mut spec = SweepSpec::new(
            FamilySpec::v0(XReal::ONE),
            vec![x(0.3)],
            DeltaRule::Fractions { first: 50, last: 52 },
            OmegaSource::Single(Frequency::golden()),
            PairMethod::Method1,
        );
        let a = sweep_delta(&spec, &ctx).unwrap();
        spec.method = PairMethod::Given(DiophantinePair::golden());
        let b = sweep_delta(&spec, &ctx).unwrap();
        assert_eq!(a.len(), 3);
        for (ra, rb) in a.iter().zip(&b) {
            assert!(((ra.adhoc_ratio - rb.adhoc_ratio) / rb.adhoc_ratio).abs().to_f64() < 1e-20);
        }
    }

    #[test]
    fn omega_rows_keep_failures() {
        let ctx = PrecisionContext::default();
        let spec = SweepSpec::new(
            FamilySpec::v0(XReal::ONE),
            vec![x(0.5)],
            DeltaRule::Explicit(vec![x(0.1)]),
            OmegaSource::Singrid { first: 0, count: 5, stride: 2000 },
            PairMethod::Method2(None),
        );
        let rows = sweep_omega(&spec, &ctx).unwrap();
        assert_eq!(rows.len(), 5);
        assert_eq!(rows.iter().map(|r| r.index.unwrap()).collect::<Vec<_>>(), vec![0, 2000, 4000, 6000, 8000]);
        for r in &rows {
            if let Ok(p) = &r.outcome {
                assert!(p.classic_over_adhoc() >= XReal::ONE);
            }
        }
        // Method 1 on a two-component frequency is reported, not dropped
        let mut spec2 = spec.clone();
        spec2.family = FamilySpec::fam1(2, XReal::ZERO, XReal::ONE, crate::testfam::Scheme::Ones).unwrap();
        spec2.rhos = vec![x(0.3)];
        spec2.deltas = DeltaRule::Explicit(vec![x(0.1)]);
        spec2.omega = OmegaSource::Singrid { first: 10, count: 1, stride: 1 };
        spec2.method = PairMethod::Method1;
        let rows = sweep_omega(&spec2, &ctx).unwrap();
        assert!(rows[0].outcome.is_err());
    }
}
