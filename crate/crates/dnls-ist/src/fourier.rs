//! Shared FFT helpers.
//!
//! Thin wrappers over `rustfft` providing: plan caching, normalized inverse
//! transforms, spectral differentiation, and the spectral antiderivative used
//! by the asymptotic-phase computations. Conventions:
//!
//! * all transforms act on values sampled on an open uniform grid
//!   `x_j = −L + j·dx`, `j = 0..N−1`, `dx = 2L/N`, treated as one period of a
//!   `2L`-periodic function (callers guarantee edge decay, so periodization
//!   artifacts sit at the configured floors);
//! * wavenumbers are `k_m = π·m/L` with `m = 0, 1, …, N/2−1, −N/2, …, −1`;
//! * the Nyquist mode is annihilated by differentiation (its derivative is
//!   not representable with a real symmetric multiplier).

use crate::C64;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

type PlanPair = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

fn plan_cache() -> &'static Mutex<HashMap<usize, PlanPair>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, PlanPair>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Fetch (and memoize) forward/inverse plans for length `n`.
pub fn plans(n: usize) -> PlanPair {
    let mut cache = plan_cache().lock().expect("fft plan cache poisoned");
    cache
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            (planner.plan_fft_forward(n), planner.plan_fft_inverse(n))
        })
        .clone()
}

/// In-place forward DFT (unnormalized, matching the usual analysis sum).
pub fn fft_in_place(buf: &mut [C64]) {
    let (fwd, _) = plans(buf.len());
    fwd.process(buf);
}

/// In-place inverse DFT, normalized by `1/N` so that `ifft(fft(x)) = x`.
pub fn ifft_in_place(buf: &mut [C64]) {
    let n = buf.len();
    let (_, inv) = plans(n);
    inv.process(buf);
    let scale = 1.0 / n as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
}

/// Signed integer mode index for bin `i` of an `n`-point DFT:
/// `0, 1, …, n/2−1, −n/2, …, −1`.
#[inline]
pub fn mode_index(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// Spectral derivative of one period of a `2L`-periodic sampled function.
///
/// The Nyquist bin is zeroed (odd-order derivative of the sawtooth mode).
pub fn spectral_derivative(values: &[C64], half_width: f64) -> Vec<C64> {
    let n = values.len();
    let mut buf = values.to_vec();
    fft_in_place(&mut buf);
    let k0 = std::f64::consts::PI / half_width;
    for (i, v) in buf.iter_mut().enumerate() {
        if n % 2 == 0 && i == n / 2 {
            *v = C64::new(0.0, 0.0);
        } else {
            let k = k0 * mode_index(i, n) as f64;
            *v *= C64::new(0.0, k);
        }
    }
    ifft_in_place(&mut buf);
    buf
}

/// Spectral antiderivative pinned at the left edge:
/// returns `F` with `F_j ≈ ∫_{−L}^{x_j} f` for decaying `f`.
///
/// The mean of `f` is integrated exactly as a linear ramp; the zero-mean
/// remainder is integrated spectrally (`f̂_k / (ik)`), with the Nyquist bin
/// dropped. Accuracy is spectral for smooth decayed data.
pub fn cumulative_integral_left(values: &[C64], half_width: f64) -> Vec<C64> {
    let n = values.len();
    let dx = 2.0 * half_width / n as f64;
    let mut buf = values.to_vec();
    fft_in_place(&mut buf);
    let mean = buf[0] / n as f64;
    let k0 = std::f64::consts::PI / half_width;
    for (i, v) in buf.iter_mut().enumerate() {
        if i == 0 || (n % 2 == 0 && i == n / 2) {
            *v = C64::new(0.0, 0.0);
        } else {
            let k = k0 * mode_index(i, n) as f64;
            *v /= C64::new(0.0, k);
        }
    }
    ifft_in_place(&mut buf);
    let g_left = buf[0];
    for (j, v) in buf.iter_mut().enumerate() {
        let x_offset = dx * j as f64; // x_j + L
        *v = *v - g_left + mean * x_offset;
    }
    buf
}

/// Plain trapezoid cumulative integral from the right edge:
/// returns `T` with `T_j ≈ ∫_{x_j}^{x_{N−1}} f` (so `T_{N−1} = 0`).
pub fn cumulative_trapezoid_from_right(values: &[f64], dx: f64) -> Vec<f64> {
    let n = values.len();
    let mut out = vec![0.0; n];
    for j in (0..n.saturating_sub(1)).rev() {
        out[j] = out[j + 1] + 0.5 * dx * (values[j] + values[j + 1]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, l: f64) -> Vec<f64> {
        (0..n).map(|j| -l + 2.0 * l * j as f64 / n as f64).collect()
    }

    #[test]
    fn derivative_of_gaussian_is_spectrally_accurate() {
        let l = 20.0;
        let n = 512;
        let xs = grid(n, l);
        let vals: Vec<C64> = xs.iter().map(|&x| C64::new((-x * x).exp(), 0.0)).collect();
        let d = spectral_derivative(&vals, l);
        let mut worst: f64 = 0.0;
        for (j, &x) in xs.iter().enumerate() {
            let exact = -2.0 * x * (-x * x).exp();
            worst = worst.max((d[j].re - exact).abs().max(d[j].im.abs()));
        }
        assert!(worst < 1e-11, "spectral derivative defect {worst:.3e}");
    }

    #[test]
    fn antiderivative_matches_error_function_shape() {
        // f = exp(−x²): ∫_{−L}^{x} f = (√π/2)(erf(x) − erf(−L)); compare at 0
        // and at the right edge where erf ≈ ±1 to 1e-16 for L = 20.
        let l = 20.0;
        let n = 1024;
        let xs = grid(n, l);
        let vals: Vec<C64> = xs.iter().map(|&x| C64::new((-x * x).exp(), 0.0)).collect();
        let f = cumulative_integral_left(&vals, l);
        let sqrt_pi = std::f64::consts::PI.sqrt();
        let mid = f[n / 2].re; // x = 0: half the total mass
        assert!((mid - 0.5 * sqrt_pi).abs() < 1e-12, "mid {mid}");
        let right = f[n - 1].re;
        assert!((right - sqrt_pi).abs() < 1e-10, "right {right}");
        assert!(f[0].norm() < 1e-12);
    }

    #[test]
    fn right_trapezoid_cumulative_is_consistent() {
        let l = 10.0;
        let n = 2048;
        let xs = grid(n, l);
        let dx = 2.0 * l / n as f64;
        let vals: Vec<f64> = xs.iter().map(|&x| (-x * x).exp()).collect();
        let t = cumulative_trapezoid_from_right(&vals, dx);
        let sqrt_pi = std::f64::consts::PI.sqrt();
        assert!((t[0] - sqrt_pi).abs() < 1e-7, "total {}", t[0]);
        assert_eq!(t[n - 1], 0.0);
        // ∫_0^{∞} = √π/2.
        assert!((t[n / 2] - 0.5 * sqrt_pi).abs() < 1e-7);
    }

    #[test]
    fn roundtrip_fft_identity() {
        let n = 256;
        let vals: Vec<C64> = (0..n)
            .map(|j| C64::new((j as f64 * 0.1).sin(), (j as f64 * 0.07).cos()))
            .collect();
        let mut buf = vals.clone();
        fft_in_place(&mut buf);
        ifft_in_place(&mut buf);
        let worst = buf
            .iter()
            .zip(&vals)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max);
        assert!(worst < 1e-13);
    }
}
