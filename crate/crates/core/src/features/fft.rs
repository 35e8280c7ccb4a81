//! Discrete Fourier transform.
//!
//! Power-of-two lengths use an iterative radix-2 transform. Other lengths go
//! through the chirp-z (Bluestein) identity, which zero-pads two chirp
//! sequences to a power of two internally; the coefficients returned are
//! always the exact `N`-point DFT of the input.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl Complex {
    pub const ZERO: Complex = Complex { re: 0.0, im: 0.0 };

    pub fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub fn from_polar_unit(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self { re: c, im: s }
    }

    pub fn conj(self) -> Self {
        Self { re: self.re, im: -self.im }
    }

    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn arg(self) -> f64 {
        self.im.atan2(self.re)
    }

    fn scale(self, s: f64) -> Self {
        Self { re: self.re * s, im: self.im * s }
    }
}

impl Add for Complex {
    type Output = Complex;
    fn add(self, o: Complex) -> Complex {
        Complex::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for Complex {
    type Output = Complex;
    fn sub(self, o: Complex) -> Complex {
        Complex::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for Complex {
    type Output = Complex;
    fn mul(self, o: Complex) -> Complex {
        Complex::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }
}

pub fn next_pow2(n: usize) -> usize {
    n.max(1).next_power_of_two()
}

/// In-place radix-2 transform; `buf.len()` must be a power of two.
/// The inverse is unnormalised.
pub fn radix2_in_place(buf: &mut [Complex], inverse: bool) {
    let n = buf.len();
    debug_assert!(n.is_power_of_two());
    if n <= 1 {
        return;
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            buf.swap(i, j);
        }
    }
    let sign = if inverse { 1.0 } else { -1.0 };
    // Twiddles for the largest stage; smaller stages stride through them.
    let twiddles: Vec<Complex> = (0..n / 2).map(|k| Complex::from_polar_unit(sign * 2.0 * PI * k as f64 / n as f64)).collect();
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let w = twiddles[k * stride];
                let a = buf[start + k];
                let b = buf[start + k + half] * w;
                buf[start + k] = a + b;
                buf[start + k + half] = a - b;
            }
        }
        len <<= 1;
    }
}

fn bluestein(x: &[Complex]) -> Vec<Complex> {
    let n = x.len();
    let m = next_pow2(2 * n - 1);
    // chirp[k] = exp(-iπk²/n); reduce k² mod 2n so the angle stays small.
    let chirp: Vec<Complex> = (0..n)
        .map(|k| {
            let q = (k as u128 * k as u128 % (2 * n as u128)) as f64;
            Complex::from_polar_unit(-PI * q / n as f64)
        })
        .collect();
    let mut a = vec![Complex::ZERO; m];
    for k in 0..n {
        a[k] = x[k] * chirp[k];
    }
    let mut b = vec![Complex::ZERO; m];
    b[0] = chirp[0].conj();
    for k in 1..n {
        b[k] = chirp[k].conj();
        b[m - k] = chirp[k].conj();
    }
    radix2_in_place(&mut a, false);
    radix2_in_place(&mut b, false);
    for (ai, bi) in a.iter_mut().zip(&b) {
        *ai = *ai * *bi;
    }
    radix2_in_place(&mut a, true);
    let inv_m = 1.0 / m as f64;
    (0..n).map(|k| a[k].scale(inv_m) * chirp[k]).collect()
}

/// `X_k = Σ_n x_n e^{-2πikn/N}` for `k = 0..N`.
pub fn fft(series: &[f64]) -> Result<Vec<Complex>> {
    if series.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let x: Vec<Complex> = series.iter().map(|&v| Complex::new(v, 0.0)).collect();
    Ok(fft_complex(x))
}

pub fn fft_complex(mut x: Vec<Complex>) -> Vec<Complex> {
    if x.len().is_power_of_two() {
        radix2_in_place(&mut x, false);
        x
    } else {
        bluestein(&x)
    }
}

/// Biased autocorrelation `r_k = Σ (x_t-μ)(x_{t+k}-μ) / Σ (x_t-μ)²` for
/// `k = 0..n`, computed through a zero-padded power spectrum.
pub fn autocorrelation(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n == 0 {
        return Vec::new();
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    let m = next_pow2(2 * n);
    let mut buf = vec![Complex::ZERO; m];
    for (b, v) in buf.iter_mut().zip(x) {
        b.re = v - mean;
    }
    radix2_in_place(&mut buf, false);
    for b in buf.iter_mut() {
        *b = Complex::new(b.norm_sqr(), 0.0);
    }
    radix2_in_place(&mut buf, true);
    let c0 = buf[0].re;
    buf.iter().take(n).map(|c| c.re / c0).collect()
}

/// Raw lagged products `S_k = Σ_{t<n-k} x_t x_{t+k}` for `k = 0..n`.
pub fn lagged_products(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let m = next_pow2(2 * n);
    let mut buf = vec![Complex::ZERO; m];
    for (b, v) in buf.iter_mut().zip(x) {
        b.re = *v;
    }
    radix2_in_place(&mut buf, false);
    for b in buf.iter_mut() {
        *b = Complex::new(b.norm_sqr(), 0.0);
    }
    radix2_in_place(&mut buf, true);
    let inv = 1.0 / m as f64;
    buf.iter().take(n).map(|c| c.re * inv).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use socialsig_oracles::{acf_biased, naive_dft};

    fn max_err(got: &[Complex], want: &[(f64, f64)]) -> f64 {
        got.iter().zip(want).map(|(g, w)| (g.re - w.0).abs().max((g.im - w.1).abs())).fold(0.0, f64::max)
    }

    #[test]
    fn constant_series_is_dc_only() {
        for n in [1usize, 7, 16, 100] {
            let x = vec![1.75; n];
            let spec = fft(&x).unwrap();
            assert!((spec[0].re - 1.75 * n as f64).abs() < 1e-9);
            for c in &spec[1..] {
                assert!(c.abs() < 1e-9, "n={n} leak {c:?}");
            }
        }
    }

    #[test]
    fn cosine_bin_magnitude() {
        let n = 64;
        let x: Vec<f64> = (0..n).map(|i| (2.0 * PI * 2.0 * i as f64 / n as f64).cos()).collect();
        let spec = fft(&x).unwrap();
        assert!((spec[2].abs() - 32.0).abs() < 1e-9);
        assert!(max_err(&spec, &naive_dft(&x)) < 1e-9);
    }

    #[test]
    fn random_512_matches_naive() {
        let x: Vec<f64> = (0..512).map(|i| ((i * 7919) % 1013) as f64 / 1013.0 - 0.5).collect();
        assert!(max_err(&fft(&x).unwrap(), &naive_dft(&x)) < 1e-9);
    }

    #[test]
    fn empty_input_rejected() {
        assert!(fft(&[]).is_err());
    }

    #[test]
    fn autocorrelation_matches_direct() {
        let x: Vec<f64> = (0..300).map(|i| (i as f64 * 0.3).sin() + ((i * 31) % 17) as f64 / 17.0).collect();
        let got = autocorrelation(&x);
        let want = acf_biased(&x, 299);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-10);
        }
    }

    proptest! {
        #[test]
        fn matches_naive_dft(x in prop::collection::vec(-1.0f64..1.0, 1..=512)) {
            prop_assert!(max_err(&fft(&x).unwrap(), &naive_dft(&x)) <= 1e-9);
        }
    }
}
