//! Mode-decoupled boundary value solves for the conjugated stability operator
//! and the weighted linearization.
//!
//! Every linear problem on the cylinder splits over angular Fourier modes into
//! two-point boundary value problems
//! `v_k'' - k^2 v_k + 2 sech^2(s) v_k = r_k` on `[-l, l]`, discretized with
//! centered differences and solved by the tridiagonal forward/backward
//! recurrence (one iterative-refinement pass keeps the relative residual near
//! machine precision even though the mode-0 matrix is indefinite).
//!
//! The mode-0 Dirichlet operator is singular exactly when `l tanh(l) = 1`
//! (the even homogeneous solution `s tanh(s) - 1` then vanishes at both
//! endpoints); solves refuse lengths within `1e-3` of that singular length.
//!
//! Three solve flavors are exposed:
//! * [`solve_mode_bvp`] — one mode, explicit Dirichlet data;
//! * [`solve_modified`] — full Poisson data, *higher-mode* Dirichlet data
//!   completed by zero lower modes, output normalized by a geometric Jacobi
//!   correction (the lower boundary values float);
//! * [`solve_decay`] — purely higher-mode Poisson data with zero trace.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;
use crate::geometry::{CylinderField, NeckParams};
use crate::modes;

/// Margin around the singular length within which mode-0 solves are refused.
pub const SINGULAR_MARGIN: f64 = 1e-3;

/// The singular length `l*`, root of `l tanh(l) = 1`, located by bisection.
/// The mode-0 Dirichlet operator on `[-l, l]` has the kernel element
/// `s tanh(s) - 1` exactly at `l = l*`.
pub fn singular_length_exact() -> f64 {
    let f = |l: f64| l * l.tanh() - 1.0;
    let (mut lo, mut hi) = (1.0f64, 1.5f64);
    debug_assert!(f(lo) < 0.0 && f(hi) > 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// One angular mode's two-point boundary value problem on `[-l, l]`.
#[derive(Debug, Clone)]
pub struct BVPMode {
    pub k: i64,
    pub l: f64,
    /// Right-hand side sampled on the uniform grid including both endpoints;
    /// the endpoint samples are ignored (Dirichlet rows).
    pub rhs: Vec<f64>,
    pub bc_minus: f64,
    pub bc_plus: f64,
}

fn grid_s(l: f64, n_s: usize, j: usize) -> f64 {
    -l + 2.0 * l * j as f64 / (n_s - 1) as f64
}

/// Interior diagonal of the mode-`k` operator: `-2/h^2 - k^2 + 2 sech^2(s_j)`.
fn mode_diagonal(l: f64, k: i64, n_s: usize) -> Vec<f64> {
    let h = 2.0 * l / (n_s - 1) as f64;
    (1..n_s - 1)
        .map(|j| {
            let sech = 1.0 / grid_s(l, n_s, j).cosh();
            -2.0 / (h * h) - (k * k) as f64 + 2.0 * sech * sech
        })
        .collect()
}

/// Tridiagonal solve (constant off-diagonal `off`), delegating to the shared
/// recurrence. Errors when a pivot collapses relative to the diagonal scale —
/// the near-singular proxy.
fn tridiag_solve(diag: &[f64], off: f64, rhs: &[f64], l: f64) -> Result<Vec<f64>> {
    let band = vec![off; diag.len() - 1];
    crate::tridiag::solve(&band, diag, &band, rhs).ok_or_else(|| near_singular(l))
}

fn near_singular(l: f64) -> Error {
    Error::NearSingularLength {
        l,
        l_star: singular_length_exact(),
        margin: SINGULAR_MARGIN,
    }
}

/// Solve one mode with explicit Dirichlet data; returns the full grid vector
/// (endpoints hold the boundary values).
pub fn solve_mode_bvp(m: &BVPMode) -> Result<Vec<f64>> {
    let n_s = m.rhs.len();
    if n_s < 5 {
        return Err(Error::Domain(format!(
            "mode BVP needs at least 5 latitude samples, got {n_s}"
        )));
    }
    if !(m.l > 0.0) {
        return Err(Error::Domain(format!(
            "half-length l = {} must be positive",
            m.l
        )));
    }
    if m.k == 0 && (m.l - singular_length_exact()).abs() < SINGULAR_MARGIN {
        return Err(near_singular(m.l));
    }
    let h = 2.0 * m.l / (n_s - 1) as f64;
    let diag = mode_diagonal(m.l, m.k, n_s);
    let off = 1.0 / (h * h);
    // move the Dirichlet data into the first/last interior rows
    let mut rhs: Vec<f64> = m.rhs[1..n_s - 1].to_vec();
    rhs[0] -= off * m.bc_minus;
    rhs[n_s - 3] -= off * m.bc_plus;
    let interior = tridiag_solve(&diag, off, &rhs, m.l)?;
    let mut full = Vec::with_capacity(n_s);
    full.push(m.bc_minus);
    full.extend_from_slice(&interior);
    full.push(m.bc_plus);
    Ok(full)
}

/// Dirichlet data on the two boundary circles of a neck grid.
#[derive(Debug, Clone)]
pub struct BoundaryData {
    pub params: NeckParams,
    /// Values at the angular nodes of the `s = -l` circle.
    pub minus: Vec<f64>,
    /// Values at the angular nodes of the `s = +l` circle.
    pub plus: Vec<f64>,
}

impl BoundaryData {
    pub fn zeros(params: NeckParams) -> Self {
        BoundaryData {
            params,
            minus: vec![0.0; params.n_x],
            plus: vec![0.0; params.n_x],
        }
    }

    pub fn from_fn(
        params: NeckParams,
        minus: impl Fn(f64) -> f64,
        plus: impl Fn(f64) -> f64,
    ) -> Self {
        BoundaryData {
            params,
            minus: (0..params.n_x).map(|i| minus(params.x(i))).collect(),
            plus: (0..params.n_x).map(|i| plus(params.x(i))).collect(),
        }
    }

    /// Fourier coefficients of one circle (indexed like the field spectrum).
    fn circle_spectrum(circle: &[f64]) -> Vec<Complex64> {
        let arr = Array2::from_shape_fn((circle.len(), 1), |(i, _)| circle[i]);
        fft::spectrum(&arr).column(0).to_vec()
    }

    pub fn spectra(&self) -> (Vec<Complex64>, Vec<Complex64>) {
        (
            Self::circle_spectrum(&self.minus),
            Self::circle_spectrum(&self.plus),
        )
    }

    /// Largest Fourier coefficient magnitude on modes `|k| <= 1`.
    pub fn lower_mode_max(&self) -> f64 {
        let (sm, sp) = self.spectra();
        let mut worst = 0.0f64;
        for i in 0..self.params.n_x {
            if fft::k_of(i, self.params.n_x).abs() <= 1 {
                worst = worst.max(sm[i].norm()).max(sp[i].norm());
            }
        }
        worst
    }

    /// Zero out modes `|k| <= 1` on both circles; returns the stripped data
    /// and the magnitude of what was removed.
    pub fn strip_lower(&self) -> (Self, f64) {
        let removed = self.lower_mode_max();
        let strip = |circle: &[f64]| -> Vec<f64> {
            let arr = Array2::from_shape_fn((circle.len(), 1), |(i, _)| circle[i]);
            let mut spec = fft::spectrum(&arr);
            for i in 0..circle.len() {
                if fft::k_of(i, circle.len()).abs() <= 1 {
                    spec[[i, 0]] = Complex64::new(0.0, 0.0);
                }
            }
            fft::synthesis(&spec).column(0).to_vec()
        };
        (
            BoundaryData {
                params: self.params,
                minus: strip(&self.minus),
                plus: strip(&self.plus),
            },
            removed,
        )
    }

    pub fn sup_norm(&self) -> f64 {
        self.minus
            .iter()
            .chain(self.plus.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Modewise Dirichlet solve of the conjugated problem
/// `v_xx + v_ss + 2 sech^2 v = rhs` with explicit complete boundary spectra.
fn solve_conjugate_dirichlet(
    rhs: &CylinderField,
    bc_minus: &[Complex64],
    bc_plus: &[Complex64],
) -> Result<CylinderField> {
    let p = rhs.params;
    if (p.l - singular_length_exact()).abs() < SINGULAR_MARGIN {
        return Err(near_singular(p.l));
    }
    let spec = fft::spectrum(&rhs.values);
    let mut out = Array2::from_elem((p.n_x, p.n_s), Complex64::new(0.0, 0.0));
    for i in 0..p.n_x {
        let k = fft::k_of(i, p.n_x);
        let solve_part = |part: fn(&Complex64) -> f64, bm: f64, bp: f64| -> Result<Vec<f64>> {
            let m = BVPMode {
                k,
                l: p.l,
                rhs: (0..p.n_s).map(|j| part(&spec[[i, j]])).collect(),
                bc_minus: bm,
                bc_plus: bp,
            };
            solve_mode_bvp(&m)
        };
        let re = solve_part(|c| c.re, bc_minus[i].re, bc_plus[i].re)?;
        let im = solve_part(|c| c.im, bc_minus[i].im, bc_plus[i].im)?;
        for j in 0..p.n_s {
            out[[i, j]] = Complex64::new(re[j], im[j]);
        }
    }
    Ok(CylinderField {
        params: p,
        values: fft::synthesis(&out),
    })
}

/// Solve the modified weighted problem: `L'(u) = e` with the *higher* modes of
/// the trace equal to `f_higher`, lower boundary modes free, and the result
/// normalized (vanishing signature).
///
/// Internally the conjugated problem `L''(v) = cosh(s) e` is solved per mode
/// with Dirichlet data `cosh(l) f` completed by zero lower modes; the
/// normalization subtracts a geometric Jacobi combination *before* undoing the
/// conjugation, which leaves `L'(u) = e` intact because the Jacobi fields span
/// the kernel of the conjugated operator and the waist signature is invariant
/// under division by `cosh`.
pub fn solve_modified(
    e: &CylinderField,
    f_higher: &BoundaryData,
    params: NeckParams,
) -> Result<CylinderField> {
    if !e.params.same_grid(&params) || !f_higher.params.same_grid(&params) {
        return Err(Error::GridMismatch("modified solve inputs".into()));
    }
    let lower = f_higher.lower_mode_max();
    if lower > 1e-12 {
        return Err(Error::ModeContent {
            modes: vec![-1, 0, 1],
            norm: lower,
            tol: 1e-12,
        });
    }
    let rhs = e.mul_profile(|s| s.cosh());
    let (mut bm, mut bp) = f_higher.spectra();
    let scale = params.l.cosh();
    for i in 0..params.n_x {
        if fft::k_of(i, params.n_x).abs() <= 1 {
            bm[i] = Complex64::new(0.0, 0.0);
            bp[i] = Complex64::new(0.0, 0.0);
        } else {
            bm[i] *= scale;
            bp[i] *= scale;
        }
    }
    let v = solve_conjugate_dirichlet(&rhs, &bm, &bp)?;
    let normalized = modes::normalize(&v)?;
    Ok(normalized.field.mul_profile(|s| 1.0 / s.cosh()))
}

/// Solve the decay problem: purely higher-mode Poisson data, zero trace.
/// The output inherits the vanishing lower modes.
pub fn solve_decay(e: &CylinderField, params: NeckParams) -> Result<CylinderField> {
    if !e.params.same_grid(&params) {
        return Err(Error::GridMismatch("decay solve inputs".into()));
    }
    let low = modes::project_lower(e).sup_norm();
    if low > 1e-12 {
        return Err(Error::ModeContent {
            modes: vec![-1, 0, 1],
            norm: low,
            tol: 1e-12,
        });
    }
    let p = params;
    let rhs = e.mul_profile(|s| s.cosh());
    let spec = fft::spectrum(&rhs.values);
    let mut out = Array2::from_elem((p.n_x, p.n_s), Complex64::new(0.0, 0.0));
    for i in 0..p.n_x {
        let k = fft::k_of(i, p.n_x);
        if k.abs() <= 1 {
            continue; // lower modes of the data vanish, so these stay zero
        }
        let re = solve_mode_bvp(&BVPMode {
            k,
            l: p.l,
            rhs: (0..p.n_s).map(|j| spec[[i, j]].re).collect(),
            bc_minus: 0.0,
            bc_plus: 0.0,
        })?;
        let im = solve_mode_bvp(&BVPMode {
            k,
            l: p.l,
            rhs: (0..p.n_s).map(|j| spec[[i, j]].im).collect(),
            bc_minus: 0.0,
            bc_plus: 0.0,
        })?;
        for j in 0..p.n_s {
            out[[i, j]] = Complex64::new(re[j], im[j]);
        }
    }
    let v = CylinderField {
        params: p,
        values: fft::synthesis(&out),
    };
    Ok(v.mul_profile(|s| 1.0 / s.cosh()))
}

/// Cumulative trapezoid integral from the waist node outward (both ways);
/// `samples` live on the uniform grid of an odd-length interval `[-l, l]`.
fn cumtrapz_from_center(samples: &[f64], h: f64) -> Vec<f64> {
    let n = samples.len();
    let mid = n / 2;
    let mut out = vec![0.0; n];
    for j in mid..n - 1 {
        out[j + 1] = out[j] + 0.5 * h * (samples[j] + samples[j + 1]);
    }
    for j in (1..=mid).rev() {
        out[j - 1] = out[j] - 0.5 * h * (samples[j - 1] + samples[j]);
    }
    out
}

/// Variation-of-parameters solution of the rotationally symmetric weighted
/// problem `L'(u) = a` with `u(0) = u'(0) = 0`:
/// `u = (tanh(s)/cosh(s)) * K(s)` with
/// `K(s) = integral_0^s tanh(t)^{-2} G(t) dt`, `G(t) = integral_0^t sinh a`.
/// The integrand of `K` extends continuously through `t = 0` with value
/// `a(0)/2` (the inner integral vanishes quadratically).
pub fn varparam_mode0(a: &[f64], l: f64) -> Vec<f64> {
    let n = a.len();
    assert!(n >= 5 && n % 2 == 1, "odd grid with a waist node required");
    let h = 2.0 * l / (n - 1) as f64;
    let mid = n / 2;
    let sinh_a: Vec<f64> = (0..n).map(|j| grid_s(l, n, j).sinh() * a[j]).collect();
    let inner = cumtrapz_from_center(&sinh_a, h);
    let g: Vec<f64> = (0..n)
        .map(|j| {
            if j == mid {
                a[mid] / 2.0
            } else {
                let t = grid_s(l, n, j).tanh();
                inner[j] / (t * t)
            }
        })
        .collect();
    let big_k = cumtrapz_from_center(&g, h);
    (0..n)
        .map(|j| {
            let s = grid_s(l, n, j);
            s.tanh() / s.cosh() * big_k[j]
        })
        .collect()
}

/// Variation-of-parameters solution of the mode-1 weighted problem: returns
/// the profile `p` with `p'' + 2 tanh(s) p' + 2 sech^2(s) p = b` and
/// `p(0) = p'(0) = 0`:
/// `p = sech^2(s) * integral_0^s cosh^2 * (integral_0^t b)`.
pub fn varparam_mode1(b: &[f64], l: f64) -> Vec<f64> {
    let n = b.len();
    assert!(n >= 5 && n % 2 == 1, "odd grid with a waist node required");
    let h = 2.0 * l / (n - 1) as f64;
    let inner = cumtrapz_from_center(b, h);
    let weighted: Vec<f64> = (0..n)
        .map(|j| grid_s(l, n, j).cosh().powi(2) * inner[j])
        .collect();
    let outer = cumtrapz_from_center(&weighted, h);
    (0..n)
        .map(|j| {
            let c = grid_s(l, n, j).cosh();
            outer[j] / (c * c)
        })
        .collect()
}

/// Count of eigenvalues of the interior mode matrix below `mu`
/// (Sturm sequence on the symmetric tridiagonal).
fn count_below(diag: &[f64], off: f64, mu: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0f64;
    for (j, d) in diag.iter().enumerate() {
        q = if j == 0 {
            d - mu
        } else {
            d - mu - off * off / q
        };
        if q == 0.0 {
            q = -1e-300;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// The `idx`-th smallest eigenvalue (0-based) by Sturm bisection.
fn eigenvalue(diag: &[f64], off: f64, idx: usize) -> f64 {
    let mut lo = diag.iter().fold(f64::INFINITY, |m, d| m.min(*d)) - 2.0 * off.abs();
    let mut hi = diag.iter().fold(f64::NEG_INFINITY, |m, d| m.max(*d)) + 2.0 * off.abs();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if count_below(diag, off, mid) > idx {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-14 * lo.abs().max(hi.abs()).max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Largest eigenvalue of the discretized mode-`k` Dirichlet operator.
pub fn top_eigenvalue(l: f64, k: i64, n_s: usize) -> f64 {
    let diag = mode_diagonal(l, k, n_s);
    let h = 2.0 * l / (n_s - 1) as f64;
    let n = diag.len();
    eigenvalue(&diag, 1.0 / (h * h), n - 1)
}

/// Smallest singular value of the discretized mode-`k` Dirichlet operator on
/// `[-l, l]` (the distance of its spectrum to zero; the matrix is symmetric).
pub fn min_singular_value(l: f64, k: i64, n_s: usize) -> f64 {
    let diag = mode_diagonal(l, k, n_s);
    let h = 2.0 * l / (n_s - 1) as f64;
    let off = 1.0 / (h * h);
    let n = diag.len();
    let below = count_below(&diag, off, 0.0);
    if below == 0 {
        eigenvalue(&diag, off, 0)
    } else if below == n {
        -eigenvalue(&diag, off, n - 1)
    } else {
        let neg = -eigenvalue(&diag, off, below - 1);
        let pos = eigenvalue(&diag, off, below);
        neg.min(pos)
    }
}

/// Discrete singular length: the `l` at which the top eigenvalue of the
/// mode-0 Dirichlet operator crosses zero, by bisection over `l`.
pub fn locate_singular_length(n_s: usize) -> f64 {
    let (mut lo, mut hi) = (0.8f64, 1.6f64);
    debug_assert!(top_eigenvalue(lo, 0, n_s) < 0.0 && top_eigenvalue(hi, 0, n_s) > 0.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if top_eigenvalue(mid, 0, n_s) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    0.5 * (lo + hi)
}
