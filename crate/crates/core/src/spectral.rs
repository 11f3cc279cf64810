//! Small FFT helpers over row-major N-d arrays, backed by `rustfft`.

use num_complex::Complex;
use rustfft::FftPlanner;

use crate::scalar::{Real, lit};

/// Angular wavenumbers of an `n`-point periodic grid of length `l`, in FFT order.
/// The Nyquist mode (even `n`) is reported with negative sign.
pub fn wavenumbers<T: Real>(n: usize, l: T) -> Vec<T> {
    let base = T::TAU() / l;
    (0..n)
        .map(|i| {
            let k = if 2 * i < n { i as f64 } else { i as f64 - n as f64 };
            base * lit(k)
        })
        .collect()
}

/// In-place unnormalized FFT along every axis of a row-major array with shape `dims`.
/// The inverse is unnormalized too; divide by the total size to invert.
pub fn fft_nd<T: Real>(data: &mut [Complex<T>], dims: &[usize], inverse: bool) {
    let total: usize = dims.iter().product();
    assert_eq!(data.len(), total, "array size does not match shape");
    let mut planner = FftPlanner::<T>::new();
    let mut stride = total;
    for &n in dims {
        stride /= n;
        if n == 1 {
            continue;
        }
        let fft = if inverse {
            planner.plan_fft_inverse(n)
        } else {
            planner.plan_fft_forward(n)
        };
        let mut line = vec![Complex::new(T::zero(), T::zero()); n];
        let block = n * stride;
        for outer in 0..total / block {
            for inner in 0..stride {
                let start = outer * block + inner;
                for (k, v) in line.iter_mut().enumerate() {
                    *v = data[start + k * stride];
                }
                fft.process(&mut line);
                for (k, v) in line.iter().enumerate() {
                    data[start + k * stride] = *v;
                }
            }
        }
    }
}

pub fn to_complex<T: Real>(x: &[T]) -> Vec<Complex<T>> {
    x.iter().map(|&v| Complex::new(v, T::zero())).collect()
}

/// Real part of an inverse transform, including the `1/N` normalization.
pub fn real_normalized<T: Real>(x: &[Complex<T>]) -> Vec<T> {
    let s = T::from_usize_lossy(x.len()).recip();
    x.iter().map(|c| c.re * s).collect()
}

/// Spectral derivative of a real periodic 2-d field along axis 0 (`x₂`) or 1 (`x₃`).
pub fn spectral_derivative_2d<T: Real>(f: &[T], n2: usize, n3: usize, l2: T, l3: T, axis: usize) -> Vec<T> {
    let mut c = to_complex(f);
    fft_nd(&mut c, &[n2, n3], false);
    let (n, k) = if axis == 0 { (n2, wavenumbers(n2, l2)) } else { (n3, wavenumbers(n3, l3)) };
    for i2 in 0..n2 {
        for i3 in 0..n3 {
            let i = if axis == 0 { i2 } else { i3 };
            // Odd derivative: drop the unpaired Nyquist mode.
            let kk = if n % 2 == 0 && i == n / 2 { T::zero() } else { k[i] };
            let v = c[i2 * n3 + i3];
            c[i2 * n3 + i3] = Complex::new(-v.im * kk, v.re * kk);
        }
    }
    fft_nd(&mut c, &[n2, n3], true);
    real_normalized(&c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_3d() {
        let dims = [4, 6, 8];
        let x: Vec<f64> = (0..192).map(|i| ((i * 37) % 11) as f64 - 5.0).collect();
        let mut c = to_complex(&x);
        fft_nd(&mut c, &dims, false);
        fft_nd(&mut c, &dims, true);
        let back = real_normalized(&c);
        for (a, b) in x.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn derivative_of_sine() {
        let (n2, n3) = (16, 8);
        let tau = std::f64::consts::TAU;
        let f: Vec<f64> = (0..n2 * n3)
            .map(|i| (2.0 * tau * (i / n3) as f64 / n2 as f64).sin())
            .collect();
        let d = spectral_derivative_2d(&f, n2, n3, tau, tau, 0);
        for i in 0..n2 * n3 {
            let x = tau * (i / n3) as f64 / n2 as f64;
            assert!((d[i] - 2.0 * (2.0 * x).cos()).abs() < 1e-12);
        }
    }
}
