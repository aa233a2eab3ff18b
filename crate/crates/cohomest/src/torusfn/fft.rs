//! Radix-2 FFT over double-double complex numbers.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex;

use crate::precision::{cis_2pi, XComplex, XReal};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `Σ_j x_j e^{−2πijk/N}` (no normalisation).
    Forward,
    /// `Σ_k x_k e^{+2πijk/N}`.
    Inverse,
}

type Twiddles = Arc<Vec<XComplex>>;

/// `e^{−2πij/N}` for `j < N/2`, computed directly (no recurrences) and cached.
fn twiddles(n: usize) -> Twiddles {
    static CACHE: OnceLock<Mutex<HashMap<usize, Twiddles>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().expect("twiddle cache").get(&n) {
        return t.clone();
    }
    let inv = XReal::ONE / XReal::from(n);
    let t: Vec<XComplex> = (0..n / 2)
        .map(|j| {
            let w = cis_2pi(inv * (j as f64));
            Complex::new(w.re, -w.im)
        })
        .collect();
    let t = Arc::new(t);
    cache.lock().expect("twiddle cache").insert(n, t.clone());
    t
}

fn bit_reverse<T>(data: &mut [T]) {
    let n = data.len();
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            data.swap(i, j);
        }
    }
}

/// In-place 1-D transform; `data.len()` must be a power of two.
pub fn fft_1d(data: &mut [XComplex], dir: Direction) {
    let n = data.len();
    assert!(n.is_power_of_two(), "fft length {n} is not a power of two");
    if n <= 1 {
        return;
    }
    bit_reverse(data);
    let tw = twiddles(n);
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let step = n / len;
        for start in (0..n).step_by(len) {
            for j in 0..half {
                let mut w = tw[j * step];
                if dir == Direction::Inverse {
                    w.im = -w.im;
                }
                let u = data[start + j];
                let v = data[start + j + half] * w;
                data[start + j] = u + v;
                data[start + j + half] = u - v;
            }
        }
        len <<= 1;
    }
}

/// In-place transform of a row-major array with the given axis sizes.
pub fn fft_nd(data: &mut [XComplex], sizes: &[usize], dir: Direction) {
    match sizes {
        [_] => fft_1d(data, dir),
        [n0, n1] => {
            assert_eq!(data.len(), n0 * n1);
            for row in data.chunks_mut(*n1) {
                fft_1d(row, dir);
            }
            let mut col = vec![Complex::new(XReal::ZERO, XReal::ZERO); *n0];
            for c in 0..*n1 {
                for r in 0..*n0 {
                    col[r] = data[r * n1 + c];
                }
                fft_1d(&mut col, dir);
                for r in 0..*n0 {
                    data[r * n1 + c] = col[r];
                }
            }
        }
        _ => panic!("fft_nd supports one or two axes"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::cabs;

    fn naive(x: &[XComplex], dir: Direction) -> Vec<XComplex> {
        let n = x.len();
        let sign = if dir == Direction::Forward { -1i64 } else { 1 };
        (0..n)
            .map(|k| {
                let mut acc = Complex::new(XReal::ZERO, XReal::ZERO);
                for (j, xj) in x.iter().enumerate() {
                    let t = XReal::from(((sign * (j * k) as i64).rem_euclid(n as i64)) as f64) / (n as f64);
                    acc = acc + *xj * cis_2pi(t);
                }
                acc
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft() {
        let x: Vec<XComplex> = (0..32)
            .map(|j| {
                Complex::new(
                    XReal::from_f64((j as f64 * 0.37).sin()),
                    XReal::from_f64((j as f64 * 1.3).cos()) / 3.0,
                )
            })
            .collect();
        for dir in [Direction::Forward, Direction::Inverse] {
            let mut y = x.clone();
            fft_1d(&mut y, dir);
            let z = naive(&x, dir);
            for (a, b) in y.iter().zip(&z) {
                assert!(cabs(&(*a - *b)).to_f64() < 1e-29);
            }
        }
    }

    #[test]
    fn two_dimensional_roundtrip() {
        let x: Vec<XComplex> = (0..8 * 16)
            .map(|j| Complex::new(XReal::from_f64(j as f64).sqrt(), XReal::from_f64(1.0 / (j as f64 + 1.0))))
            .collect();
        let mut y = x.clone();
        fft_nd(&mut y, &[8, 16], Direction::Forward);
        fft_nd(&mut y, &[8, 16], Direction::Inverse);
        for (a, b) in y.iter().zip(&x) {
            assert!(cabs(&(*a / XReal::from_f64(128.0) - *b)).to_f64() < 1e-29);
        }
    }
}
