//! Finite Fourier models of analytic functions on the 1- and 2-torus.
//!
//! Coefficients are stored as mantissas relative to the analytic decay
//! `e^{-2π|k|₁·base_width}`; the decay exponent is only merged with the
//! strip factor `e^{-2π σ·k ρ}` right before exponentiation, so evaluating
//! close to the edge of analyticity does not lose the small coefficients.

mod dft_error;
mod fft;
mod io;
mod norm;

pub use dft_error::{dft_error_constant, dft_error_log_constant};
pub use fft::{fft_nd, Direction};
pub(crate) use norm::best_rho_tilde;
pub use io::{dump_coefficients, load_coefficients, read_coefficients, write_coefficients};
pub use norm::{
    enclosure_on_grid, grid_size_for, norm_enclosure, sup_norm, AnalyticSource, NormEnclosure, SupNorm,
    DEFAULT_MAX_POINTS_1D, DEFAULT_MAX_POINTS_2D,
};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::precision::{cis_2pi, XComplex, XReal};

/// Multi-index; the second component is 0 in dimension one.
pub type Index = [i64; 2];

#[inline]
pub fn l1(k: Index) -> i64 {
    k[0].abs() + k[1].abs()
}

/// Regular sampling grid `θ_j = j/N` (per axis, powers of two, at least 8).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridSpec {
    n: usize,
    sizes: [usize; 2],
}

impl GridSpec {
    pub fn new(sizes: &[usize]) -> Result<GridSpec> {
        if sizes.is_empty() || sizes.len() > 2 {
            return Err(Error::Domain(format!("dimension must be 1 or 2, got {}", sizes.len())));
        }
        for &m in sizes {
            if m < 8 || !m.is_power_of_two() {
                return Err(Error::Domain(format!("grid size {m} is not a power of two >= 8")));
            }
        }
        let mut s = [1usize; 2];
        s[..sizes.len()].copy_from_slice(sizes);
        Ok(GridSpec {
            n: sizes.len(),
            sizes: s,
        })
    }

    pub fn uniform(n: usize, m: usize) -> Result<GridSpec> {
        GridSpec::new(&vec![m; n])
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn size(&self, axis: usize) -> usize {
        self.sizes[axis]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes[..self.n]
    }

    pub fn min_size(&self) -> usize {
        *self.sizes().iter().min().expect("nonempty")
    }

    /// Number of grid points (and of coefficients).
    pub fn len(&self) -> usize {
        self.sizes[0] * self.sizes[1]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Whether `k` lies in `I_N = {−N_ℓ/2 ≤ k_ℓ < N_ℓ/2}`.
    pub fn contains(&self, k: Index) -> bool {
        (0..2).all(|l| {
            let h = (self.sizes[l] / 2) as i64;
            if l >= self.n {
                k[l] == 0
            } else {
                -h <= k[l] && k[l] < h
            }
        })
    }

    /// Storage position of `k` (FFT order, row-major over axes).
    #[inline]
    pub fn slot(&self, k: Index) -> usize {
        let a = k[0].rem_euclid(self.sizes[0] as i64) as usize;
        let b = k[1].rem_euclid(self.sizes[1] as i64) as usize;
        a * self.sizes[1] + b
    }

    /// Multi-index stored at position `slot`.
    #[inline]
    pub fn index(&self, slot: usize) -> Index {
        let a = slot / self.sizes[1];
        let b = slot % self.sizes[1];
        [wrap(a, self.sizes[0]), wrap(b, self.sizes[1])]
    }

    /// Axis range of `I_N` as `(kmin, kmax)` inclusive.
    pub fn axis_range(&self, axis: usize) -> (i64, i64) {
        if axis >= self.n {
            return (0, 0);
        }
        let h = (self.sizes[axis] / 2) as i64;
        (-h, h - 1)
    }
}

#[inline]
fn wrap(j: usize, n: usize) -> i64 {
    if n == 1 {
        0
    } else if j < n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

/// Boundary sheet `Im θ_ℓ = σ_ℓ ρ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BoundaryComponent {
    pub sigma: [i8; 2],
}

impl BoundaryComponent {
    /// All `2^n` sheets of the boundary of `T^n_ρ`.
    pub fn all(n: usize) -> Vec<BoundaryComponent> {
        match n {
            1 => vec![
                BoundaryComponent { sigma: [1, 1] },
                BoundaryComponent { sigma: [-1, 1] },
            ],
            _ => {
                let mut v = Vec::with_capacity(4);
                for a in [1i8, -1] {
                    for b in [1i8, -1] {
                        v.push(BoundaryComponent { sigma: [a, b] });
                    }
                }
                v
            }
        }
    }
}

/// Truncated Fourier series with scaled coefficient storage.
#[derive(Clone, PartialEq)]
pub struct TorusFourier {
    grid: GridSpec,
    base_width: XReal,
    coeffs: Vec<XComplex>,
}

impl std::fmt::Debug for TorusFourier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TorusFourier")
            .field("grid", &self.grid)
            .field("base_width", &self.base_width)
            .field("len", &self.coeffs.len())
            .finish()
    }
}

impl TorusFourier {
    /// Wraps mantissas stored in FFT order.
    pub fn new(grid: GridSpec, base_width: XReal, coeffs: Vec<XComplex>) -> Result<TorusFourier> {
        if coeffs.len() != grid.len() {
            return Err(Error::SizeMismatch {
                expected: grid.len(),
                got: coeffs.len(),
            });
        }
        if !base_width.is_finite() || base_width < XReal::ZERO {
            return Err(Error::Domain(format!("base width must be finite and >= 0, got {base_width}")));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Domain("non-finite coefficient".into()));
        }
        Ok(TorusFourier {
            grid,
            base_width,
            coeffs,
        })
    }

    pub fn zeros(grid: GridSpec, base_width: XReal) -> TorusFourier {
        TorusFourier {
            grid,
            base_width,
            coeffs: vec![czero(); grid.len()],
        }
    }

    /// Builds the series from a mantissa law `k ↦ m_k` on `I_N`.
    pub fn from_fn(grid: GridSpec, base_width: XReal, mut f: impl FnMut(Index) -> XComplex) -> TorusFourier {
        let coeffs = (0..grid.len()).map(|s| f(grid.index(s))).collect();
        TorusFourier {
            grid,
            base_width,
            coeffs,
        }
    }

    /// Single harmonic `c·e^{2πi k·θ}` with unscaled storage.
    pub fn harmonic(grid: GridSpec, k: Index, c: XComplex) -> Result<TorusFourier> {
        if !grid.contains(k) {
            return Err(Error::Domain(format!("index {k:?} outside the grid")));
        }
        let mut f = TorusFourier::zeros(grid, XReal::ZERO);
        f.coeffs[grid.slot(k)] = c;
        Ok(f)
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn base_width(&self) -> XReal {
        self.base_width
    }

    /// Scaled mantissas in FFT order.
    pub fn mantissas(&self) -> &[XComplex] {
        &self.coeffs
    }

    pub fn mantissas_mut(&mut self) -> &mut [XComplex] {
        &mut self.coeffs
    }

    pub fn mantissa(&self, k: Index) -> XComplex {
        if self.grid.contains(k) {
            self.coeffs[self.grid.slot(k)]
        } else {
            czero()
        }
    }

    /// Decay factor `e^{-2π|k|₁·base_width}` attached to mantissa `k`.
    pub fn decay(&self, k: Index) -> XReal {
        (XReal::TWO_PI * self.base_width * (-(l1(k) as f64))).exp()
    }

    /// Unscaled Fourier coefficient `v̂_k`.
    pub fn coefficient(&self, k: Index) -> XComplex {
        self.mantissa(k) * self.decay(k)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Index, &XComplex)> + '_ {
        self.coeffs.iter().enumerate().map(|(s, c)| (self.grid.index(s), c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_zero() && c.im.is_zero())
    }

    pub fn scale(&self, a: XComplex) -> TorusFourier {
        let mut g = self.clone();
        for c in g.coeffs.iter_mut() {
            *c = *c * a;
        }
        g
    }

    /// Same function truncated (or zero-padded) to another grid.
    pub fn regrid(&self, grid: GridSpec) -> Result<TorusFourier> {
        if grid.dim() != self.dim() {
            return Err(Error::Domain("regrid across dimensions".into()));
        }
        Ok(TorusFourier::from_fn(grid, self.base_width, |k| self.mantissa(k)))
    }

    /// Per-axis factor tables `exp(−2π(|k_ℓ|·bw + σ_ℓ k_ℓ ρ))` over the grid.
    fn axis_factors(&self, rho: XReal, sheet: BoundaryComponent) -> Result<[Vec<XReal>; 2]> {
        let mut out: [Vec<XReal>; 2] = [Vec::new(), Vec::new()];
        for axis in 0..2 {
            let m = self.grid.size(axis);
            let mut t = Vec::with_capacity(m);
            for j in 0..m {
                let k = wrap(j, m);
                let e = -(XReal::TWO_PI
                    * (self.base_width * (k.abs() as f64) + rho * ((sheet.sigma[axis] as i64 * k) as f64)));
                if e.hi() > 700.0 {
                    return Err(Error::Overflow(format!(
                        "coefficient exponent {:.3e} at k_{} = {k}; is rho > base_width?",
                        e.hi(),
                        axis + 1
                    )));
                }
                t.push(e.exp());
            }
            out[axis] = t;
        }
        Ok(out)
    }

    /// Coefficients of `θ ↦ f(θ + iσρ)` in FFT order, exponents merged before
    /// exponentiation.
    pub fn sheet_coefficients(&self, rho: XReal, sheet: BoundaryComponent) -> Result<Vec<XComplex>> {
        let [f0, f1] = self.axis_factors(rho, sheet)?;
        let n1 = self.grid.size(1);
        Ok(self
            .coeffs
            .iter()
            .enumerate()
            .map(|(s, c)| {
                if c.re.is_zero() && c.im.is_zero() {
                    return czero();
                }
                *c * (f0[s / n1] * f1[s % n1])
            })
            .collect())
    }

    /// Unscaled coefficients `v̂_k` in FFT order.
    pub fn plain_coefficients(&self) -> Result<Vec<XComplex>> {
        self.sheet_coefficients(XReal::ZERO, BoundaryComponent { sigma: [1, 1] })
    }
}

#[inline]
pub(crate) fn czero() -> XComplex {
    Complex::new(XReal::ZERO, XReal::ZERO)
}

/// Forward DFT `ũ_k = (1/∏N_ℓ) Σ_j u_j e^{−2πik·θ_j}` of grid samples.
///
/// Samples are row-major over `(j₁, j₂)`. The result has `base_width = 0`.
pub fn dft_forward(grid: GridSpec, samples: &[XComplex]) -> Result<TorusFourier> {
    if samples.len() != grid.len() {
        return Err(Error::SizeMismatch {
            expected: grid.len(),
            got: samples.len(),
        });
    }
    let mut data = samples.to_vec();
    fft_nd(&mut data, grid.sizes(), Direction::Forward);
    let inv = XReal::ONE / XReal::from(grid.len());
    for c in data.iter_mut() {
        *c = *c * inv;
    }
    TorusFourier::new(grid, XReal::ZERO, data)
}

/// Values of the truncated series at every grid point `θ_j = j/N`.
pub fn dft_inverse(f: &TorusFourier) -> Result<Vec<XComplex>> {
    let mut data = f.plain_coefficients()?;
    fft_nd(&mut data, f.grid.sizes(), Direction::Inverse);
    Ok(data)
}

/// Per-axis phase table `e^{2πi k θ}` for `k` in `[kmin, kmax]`.
pub(crate) fn phase_table(theta: XReal, kmin: i64, kmax: i64) -> Vec<XComplex> {
    (kmin..=kmax).map(|k| cis_2pi(theta.frac_mul(k))).collect()
}

/// `f(θ + iσρ) = Σ_k v̂_k e^{2πi k·(θ + iσρ)}` by direct summation.
pub fn eval_on_boundary(
    f: &TorusFourier,
    rho: XReal,
    sheet: BoundaryComponent,
    theta: &[XReal],
) -> Result<XComplex> {
    if rho < XReal::ZERO {
        return Err(Error::Domain(format!("rho must be >= 0, got {rho}")));
    }
    if theta.len() != f.dim() {
        return Err(Error::SizeMismatch {
            expected: f.dim(),
            got: theta.len(),
        });
    }
    let c = f.sheet_coefficients(rho, sheet)?;
    let (a0, b0) = f.grid.axis_range(0);
    let (a1, b1) = f.grid.axis_range(1);
    let p0 = phase_table(theta[0], a0, b0);
    let p1 = if f.dim() == 2 {
        phase_table(theta[1], a1, b1)
    } else {
        vec![Complex::new(XReal::ONE, XReal::ZERO)]
    };
    let mut acc = czero();
    for k0 in a0..=b0 {
        let mut inner = czero();
        for k1 in a1..=b1 {
            let ck = c[f.grid.slot([k0, k1])];
            inner = inner + ck * p1[(k1 - a1) as usize];
        }
        acc = acc + inner * p0[(k0 - a0) as usize];
    }
    Ok(acc)
}
