//! Internal angular FFT helpers.
//!
//! Fields are periodic in the angle with a power-of-two point count, so all
//! angular analysis is done through the discrete Fourier transform. The
//! convention is `u(x_i) = sum_k hat(u)_k exp(i k x_i)` with coefficients
//! `hat(u)_k = (1/n) sum_i u(x_i) exp(-i k x_i)`; index `i` of a spectrum row
//! carries wavenumber `k = i` for `i <= n/2` and `k = i - n` above.

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::FftPlanner;

/// Wavenumber carried by spectrum index `i` of an `n`-point transform.
pub fn k_of(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// Spectrum index carrying wavenumber `k` (`-n/2 < k <= n/2`).
pub fn index_of(k: i64, n: usize) -> usize {
    let half = (n / 2) as i64;
    debug_assert!(
        -half < k && k <= half,
        "wavenumber {k} out of range for n = {n}"
    );
    if k >= 0 {
        k as usize
    } else {
        (k + n as i64) as usize
    }
}

/// Forward transform along the angle (axis 0) of every latitude row,
/// normalized so coefficients are the Fourier coefficients of the field.
pub fn spectrum(values: &Array2<f64>) -> Array2<Complex64> {
    let (n_x, n_s) = values.dim();
    let fft = FftPlanner::new().plan_fft_forward(n_x);
    let mut out = Array2::from_elem((n_x, n_s), Complex64::default());
    let mut buf = vec![Complex64::default(); n_x];
    let scale = 1.0 / n_x as f64;
    for j in 0..n_s {
        for i in 0..n_x {
            buf[i] = Complex64::new(values[[i, j]], 0.0);
        }
        fft.process(&mut buf);
        for i in 0..n_x {
            out[[i, j]] = buf[i] * scale;
        }
    }
    out
}

/// Inverse of [`spectrum`]; the imaginary parts (roundoff for conjugate-symmetric
/// input) are discarded.
pub fn synthesis(spec: &Array2<Complex64>) -> Array2<f64> {
    let (n_x, n_s) = spec.dim();
    let fft = FftPlanner::new().plan_fft_inverse(n_x);
    let mut out = Array2::zeros((n_x, n_s));
    let mut buf = vec![Complex64::default(); n_x];
    for j in 0..n_s {
        for i in 0..n_x {
            buf[i] = spec[[i, j]];
        }
        fft.process(&mut buf);
        for i in 0..n_x {
            out[[i, j]] = buf[i].re;
        }
    }
    out
}

/// Spectral angular derivative of the given order. Odd orders zero the Nyquist
/// mode (its derivative has no real representation on the grid).
pub fn x_derivative(values: &Array2<f64>, order: u32) -> Array2<f64> {
    let (n_x, _) = values.dim();
    let mut spec = spectrum(values);
    for i in 0..n_x {
        let k = k_of(i, n_x) as f64;
        let m = Complex64::new(0.0, k).powu(order);
        let m = if order % 2 == 1 && i == n_x / 2 {
            Complex64::default()
        } else {
            m
        };
        for j in 0..spec.dim().1 {
            spec[[i, j]] *= m;
        }
    }
    synthesis(&spec)
}

/// Zero all modes with `|k| > k_max` (the 2/3-rule truncation used by the
/// nonlinear evaluations uses `k_max = n_x / 3`).
pub fn truncate_above(values: &Array2<f64>, k_max: i64) -> Array2<f64> {
    let (n_x, _) = values.dim();
    let mut spec = spectrum(values);
    for i in 0..n_x {
        if k_of(i, n_x).abs() > k_max {
            for j in 0..spec.dim().1 {
                spec[[i, j]] = Complex64::default();
            }
        }
    }
    synthesis(&spec)
}
