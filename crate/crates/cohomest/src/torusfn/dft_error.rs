//! Bound on the aliasing error of the discrete Fourier transform.
//!
//! For `v` analytic on `T^n_ρ̂` and `ρ < ρ̃ < ρ̂`, the sampled coefficients
//! satisfy `‖ṽ − v‖_ρ ≤ C_N(ρ, ρ̃)·‖v‖_ρ̃`. `C_N` decays like
//! `e^{−π(ρ̃−ρ)N_min}`, which underflows doubles for the grids of interest,
//! so it is assembled with that factor pulled out and returned as a log.

use super::GridSpec;
use crate::error::{Error, Result};
use crate::precision::XReal;

/// `ln C_N(ρ, ρ̃)` for the given grid.
pub fn dft_error_log_constant(grid: &GridSpec, rho: XReal, rho_t: XReal) -> Result<XReal> {
    if rho < XReal::ZERO || rho_t <= rho {
        return Err(Error::Domain(format!("need 0 <= rho < rho_tilde, got rho={rho}, rho_tilde={rho_t}")));
    }
    let n = grid.dim();
    let d = rho_t - rho;
    let pi = XReal::PI;
    let nmin = XReal::from(grid.min_size());
    let sizes: Vec<XReal> = grid.sizes().iter().map(|&m| XReal::from(m)).collect();

    // e_ℓ = e^{−πd N_ℓ}, scaled by E = e^{πd N_min}.
    let e: Vec<XReal> = sizes.iter().map(|m| (-(pi * d * *m)).exp()).collect();
    let e_s: Vec<XReal> = sizes.iter().map(|m| (-(pi * d * (*m - nmin))).exp()).collect();
    // q_ℓ = e^{−2πρ̃N_ℓ}, and q_ℓ·E.
    let q: Vec<XReal> = sizes.iter().map(|m| (-(XReal::TWO_PI * rho_t * *m)).exp()).collect();
    let q_s: Vec<XReal> = sizes
        .iter()
        .map(|m| (pi * d * nmin - XReal::TWO_PI * rho_t * *m).exp())
        .collect();

    let coth_d = (pi * d).coth();
    let coth_s = (pi * (rho_t + rho)).coth();
    // Per-axis aliasing weights: ν(ρ̃−ρ) for σ=+1, and for σ=−1 the factor
    // e^{−2πρ̃N}ν(−ρ̃−ρ) = e^{−πdN}·coth(π(ρ̃+ρ))(1 − e^{−π(ρ̃+ρ)N}).
    let nu_plus: Vec<XReal> = e.iter().map(|ei| coth_d * (XReal::ONE - *ei)).collect();
    let g_minus: Vec<XReal> = sizes
        .iter()
        .map(|m| coth_s * (-(-(pi * (rho_t + rho) * *m)).exp_m1()))
        .collect();

    let p: XReal = q.iter().fold(XReal::ONE, |acc, qi| acc / (XReal::ONE - *qi));

    // S1·E: sheets with at least one σ_ℓ = −1.
    let mut s1 = XReal::ZERO;
    for mask in 1u32..(1 << n) {
        let mut term = XReal::ONE;
        let mut shift = -nmin;
        for l in 0..n {
            if mask & (1 << l) != 0 {
                term = term * g_minus[l];
                shift = shift + sizes[l];
            } else {
                term = term * nu_plus[l];
            }
        }
        s1 = s1 + term * (-(pi * d * shift)).exp();
    }
    s1 = s1 * p;

    // S2·E = P·(1 − ∏(1−q_ℓ))·E·∏ν_ℓ.
    let one_minus_prod_q = if n == 1 { q_s[0] } else { q_s[0] + q_s[1] - q_s[0] * q[1] };
    let s2 = p * one_minus_prod_q * nu_plus.iter().fold(XReal::ONE, |a, b| a * *b);

    // T·E = coth(πd)^n (1 − ∏(1 − e_ℓ))·E.
    let one_minus_prod_e = if n == 1 { e_s[0] } else { e_s[0] + e_s[1] - e_s[0] * e[1] };
    let t = coth_d.powi(n as i64) * one_minus_prod_e;

    let scaled = s1 + s2 + t;
    if !(scaled > XReal::ZERO) || !scaled.is_finite() {
        return Err(Error::Domain(format!("C_N evaluation failed for rho={rho}, rho_tilde={rho_t}")));
    }
    Ok(scaled.ln() - pi * d * nmin)
}

/// `C_N(ρ, ρ̃)`; values below the double range are returned as `1e-300`,
/// which keeps the result an upper bound.
pub fn dft_error_constant(grid: &GridSpec, rho: XReal, rho_t: XReal) -> Result<XReal> {
    let l = dft_error_log_constant(grid, rho, rho_t)?;
    let floor = XReal::from_f64(1e-300);
    Ok(l.exp().max(floor))
}
