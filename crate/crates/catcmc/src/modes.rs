//! Angular Fourier analysis, lower modes, waist signature, and the
//! six-dimensional geometric Jacobi-field basis.
//!
//! The *lower* part of a field is its angular content on wavenumbers
//! `k in {0, +1, -1}`; everything else is the *higher* part. Lower modes are
//! exactly the angular frequencies carried by the kernel of the stability
//! operator with controlled growth, so the solvers prescribe boundary data on
//! higher modes only and pin the lower-mode degrees of freedom through the
//! *signature*: the six lower-mode Cauchy data (value and latitude derivative)
//! on the waist circle `s = 0`. A field is *normalized* when its signature
//! vanishes; each field has a unique Jacobi-basis correction that normalizes it.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;
use crate::geometry::{CylinderField, NeckParams};

/// Angular Fourier coefficients of a field, per latitude.
///
/// Row `i` carries wavenumber `k = i` for `i <= n_x/2` and `k = i - n_x`
/// above; real fields have conjugate-symmetric rows.
#[derive(Debug, Clone)]
pub struct ModeSpectrum {
    pub params: NeckParams,
    /// Coefficients indexed `[mode index i, latitude j]`.
    pub coeffs: Array2<Complex64>,
}

impl ModeSpectrum {
    /// Wavenumber of spectrum row `i`.
    pub fn k_of(&self, i: usize) -> i64 {
        fft::k_of(i, self.params.n_x)
    }

    /// Row index of wavenumber `k`.
    pub fn index_of(&self, k: i64) -> usize {
        fft::index_of(k, self.params.n_x)
    }

    /// The complex profile of one wavenumber over the latitudes.
    pub fn profile(&self, k: i64) -> Vec<Complex64> {
        let i = self.index_of(k);
        (0..self.params.n_s).map(|j| self.coeffs[[i, j]]).collect()
    }
}

/// Forward angular transform of every latitude circle.
pub fn to_spectrum(u: &CylinderField) -> ModeSpectrum {
    ModeSpectrum {
        params: u.params,
        coeffs: fft::spectrum(&u.values),
    }
}

/// Inverse of [`to_spectrum`].
pub fn from_spectrum(spec: &ModeSpectrum) -> CylinderField {
    CylinderField {
        params: spec.params,
        values: fft::synthesis(&spec.coeffs),
    }
}

/// The lower part of `u`: angular modes `k in {0, +1, -1}` only.
pub fn project_lower(u: &CylinderField) -> CylinderField {
    let mut spec = to_spectrum(u);
    let n_x = u.params.n_x;
    for i in 0..n_x {
        if fft::k_of(i, n_x).abs() > 1 {
            for j in 0..u.params.n_s {
                spec.coeffs[[i, j]] = Complex64::default();
            }
        }
    }
    from_spectrum(&spec)
}

/// The higher part of `u`: everything but modes `{0, +1, -1}`.
pub fn project_higher(u: &CylinderField) -> CylinderField {
    let mut spec = to_spectrum(u);
    let n_x = u.params.n_x;
    for i in 0..n_x {
        if fft::k_of(i, n_x).abs() <= 1 {
            for j in 0..u.params.n_s {
                spec.coeffs[[i, j]] = Complex64::default();
            }
        }
    }
    from_spectrum(&spec)
}

/// The six lower-mode Cauchy data of a field on the waist circle, ordered
/// `[value_0, value_cos, value_sin, slope_0, slope_cos, slope_sin]`:
/// the mean / cos(x) / sin(x) components of `u(., 0)` and of the centered
/// difference of `u` in `s` across the waist row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Signature(pub [f64; 6]);

impl Signature {
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Lower-mode components (mean, cos amplitude, sin amplitude) of one grid circle.
fn lower_components(params: &NeckParams, row: impl Fn(usize) -> f64) -> [f64; 3] {
    let n = params.n_x;
    let (mut c0, mut re1, mut im1) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let v = row(i);
        let x = params.x(i);
        c0 += v;
        re1 += v * x.cos();
        im1 += v * x.sin();
    }
    // u ~ c0/n + (2 re1/n) cos x + (2 im1/n) sin x
    let n = n as f64;
    [c0 / n, 2.0 * re1 / n, 2.0 * im1 / n]
}

/// Waist signature of `u`. The latitude derivative is the centered difference
/// across the waist row, which the grid always contains (`n_s` odd).
pub fn signature(u: &CylinderField) -> Signature {
    let p = u.params;
    let j0 = p.waist();
    let vals = lower_components(&p, |i| u.values[[i, j0]]);
    let inv2h = 1.0 / (2.0 * p.h_s());
    let slopes = lower_components(&p, |i| {
        (u.values[[i, j0 + 1]] - u.values[[i, j0 - 1]]) * inv2h
    });
    Signature([vals[0], vals[1], vals[2], slopes[0], slopes[1], slopes[2]])
}

/// The six geometric Jacobi fields on the grid, in the order
/// `tanh(s)`,
/// `cos(x) sech(s)`, `sin(x) sech(s)`,
/// `s tanh(s) - 1`,
/// `cos(x)(sinh(s) + s sech(s))`, `sin(x)(sinh(s) + s sech(s))`.
///
/// These span the kernel of the conjugated stability operator
/// `Delta + 2 sech^2(s)` among fields of lower angular mode; they are the
/// variations of the catenoid generated by vertical translation, the two
/// horizontal translations, dilation, and the two tilts.
pub fn jacobi_basis(params: NeckParams) -> [CylinderField; 6] {
    let f = |g: fn(f64, f64) -> f64| CylinderField::from_fn(params, g);
    [
        f(|_, s| s.tanh()),
        f(|x, s| x.cos() / s.cosh()),
        f(|x, s| x.sin() / s.cosh()),
        f(|_, s| s * s.tanh() - 1.0),
        f(|x, s| x.cos() * (s.sinh() + s / s.cosh())),
        f(|x, s| x.sin() * (s.sinh() + s / s.cosh())),
    ]
}

/// Result of [`normalize`]: the corrected field and the Jacobi-basis
/// coefficients that were added.
pub struct Normalized {
    pub field: CylinderField,
    pub coefficients: [f64; 6],
}

/// Add the unique Jacobi-basis combination that makes the signature vanish.
///
/// Solves the 6x6 system `S c = -signature(u)` where column `i` of `S` is the
/// signature of basis field `i`; errors if that system's condition number
/// exceeds 1e12 (it is well-conditioned on any valid grid).
pub fn normalize(u: &CylinderField) -> Result<Normalized> {
    let basis = jacobi_basis(u.params);
    let mut s = nalgebra::SMatrix::<f64, 6, 6>::zeros();
    for (col, b) in basis.iter().enumerate() {
        let sig = signature(b);
        for row in 0..6 {
            s[(row, col)] = sig.0[row];
        }
    }
    let sig_u = signature(u);
    let rhs = -nalgebra::SVector::<f64, 6>::from_row_slice(&sig_u.0);

    let svd = s.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > 0.0) || smax / smin > 1e12 {
        return Err(Error::SingularSystem {
            cond: if smin > 0.0 {
                smax / smin
            } else {
                f64::INFINITY
            },
        });
    }
    let c = svd
        .solve(&rhs, 0.0)
        .expect("svd solve after condition check");

    let mut field = u.clone();
    for (ci, b) in c.iter().zip(basis.iter()) {
        field.values.scaled_add(*ci, &b.values);
    }
    let mut coefficients = [0.0; 6];
    coefficients.copy_from_slice(c.as_slice());
    Ok(Normalized {
        field,
        coefficients,
    })
}
