//! Discrete weighted norms on neck fields and log-log decay fits.
//!
//! The weighted norm of order `k` and exponent `gamma` is
//! `sup over window centers s0 of omega(s0)^{-gamma} * (window grid norm)`,
//! where the windows have width 1, centers range over grid latitudes in
//! `[-l + 1/2, l - 1/2]`, and the window grid norm sums, for each derivative
//! order `d <= k`, the window sup of the largest `d`-th derivative component.
//! Derivatives are centered differences (one-sided at the two boundary rows);
//! Hölder seminorms are deliberately absent — every estimate consumed
//! downstream has a sup-norm consequence.

use crate::geometry::CylinderField;

/// Result of a weighted norm evaluation.
#[derive(Debug, Clone, Copy)]
pub struct WeightedNormResult {
    pub gamma: f64,
    pub value: f64,
    /// Window center latitude achieving the sup.
    pub argmax_latitude: f64,
}

/// Result of an ordinary-least-squares fit of `log y` against `log x`.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct FitResult {
    pub exponent: f64,
    pub r_squared: f64,
    /// The `x`-range the fit consumed.
    pub window: (f64, f64),
    pub points: usize,
}

/// Centered periodic angular derivative arrays up to second order.
fn x_derivatives(u: &CylinderField) -> (Vec<f64>, Vec<f64>) {
    let p = u.params;
    let hx = p.h_x();
    let (mut ux, mut uxx) = (vec![0.0; p.n_x * p.n_s], vec![0.0; p.n_x * p.n_s]);
    for i in 0..p.n_x {
        let (im, ip) = ((i + p.n_x - 1) % p.n_x, (i + 1) % p.n_x);
        for j in 0..p.n_s {
            let idx = i * p.n_s + j;
            ux[idx] = (u.values[[ip, j]] - u.values[[im, j]]) / (2.0 * hx);
            uxx[idx] = (u.values[[ip, j]] - 2.0 * u.values[[i, j]] + u.values[[im, j]]) / (hx * hx);
        }
    }
    (ux, uxx)
}

/// Latitude derivative of a flat row-major buffer, centered with one-sided
/// second-order stencils at the boundary rows.
fn s_derivative(buf: &[f64], n_x: usize, n_s: usize, hs: f64) -> Vec<f64> {
    let mut out = vec![0.0; n_x * n_s];
    for i in 0..n_x {
        let row = |j: usize| buf[i * n_s + j];
        out[i * n_s] = (-3.0 * row(0) + 4.0 * row(1) - row(2)) / (2.0 * hs);
        for j in 1..n_s - 1 {
            out[i * n_s + j] = (row(j + 1) - row(j - 1)) / (2.0 * hs);
        }
        out[i * n_s + n_s - 1] =
            (3.0 * row(n_s - 1) - 4.0 * row(n_s - 2) + row(n_s - 3)) / (2.0 * hs);
    }
    out
}

fn s_second_derivative(buf: &[f64], n_x: usize, n_s: usize, hs: f64) -> Vec<f64> {
    let mut out = vec![0.0; n_x * n_s];
    let h2 = hs * hs;
    for i in 0..n_x {
        let row = |j: usize| buf[i * n_s + j];
        out[i * n_s] = (2.0 * row(0) - 5.0 * row(1) + 4.0 * row(2) - row(3)) / h2;
        for j in 1..n_s - 1 {
            out[i * n_s + j] = (row(j + 1) - 2.0 * row(j) + row(j - 1)) / h2;
        }
        out[i * n_s + n_s - 1] =
            (2.0 * row(n_s - 1) - 5.0 * row(n_s - 2) + 4.0 * row(n_s - 3) - row(n_s - 4)) / h2;
    }
    out
}

/// Weighted window norm of `u`; `order` in `{0, 1, 2}` selects how many
/// derivative levels enter the window norm.
pub fn weighted_norm(u: &CylinderField, gamma: f64, order: u8) -> WeightedNormResult {
    assert!(order <= 2, "order must be 0, 1 or 2");
    let p = u.params;
    let flat: Vec<f64> = (0..p.n_x)
        .flat_map(|i| (0..p.n_s).map(move |j| u.values[[i, j]]))
        .collect();

    // per-latitude sup of each derivative level
    let mut level_sups: Vec<Vec<f64>> = Vec::new();
    let per_latitude = |bufs: &[&[f64]]| -> Vec<f64> {
        let mut sup = vec![0.0f64; p.n_s];
        for buf in bufs {
            for i in 0..p.n_x {
                for j in 0..p.n_s {
                    sup[j] = sup[j].max(buf[i * p.n_s + j].abs());
                }
            }
        }
        sup
    };
    level_sups.push(per_latitude(&[&flat]));
    if order >= 1 {
        let (ux, uxx) = x_derivatives(u);
        let us = s_derivative(&flat, p.n_x, p.n_s, p.h_s());
        level_sups.push(per_latitude(&[&ux, &us]));
        if order == 2 {
            let uxs = s_derivative(&ux, p.n_x, p.n_s, p.h_s());
            let uss = s_second_derivative(&flat, p.n_x, p.n_s, p.h_s());
            level_sups.push(per_latitude(&[&uxx, &uxs, &uss]));
        }
    }

    // sliding windows of width 1 centered at latitudes in [-l + 1/2, l - 1/2];
    // on short domains (l < 1/2 + h) fall back to one window centered at 0
    let half = 0.5f64;
    let mut centers: Vec<usize> = (0..p.n_s)
        .filter(|&j| p.s(j).abs() <= p.l - half + 1e-12)
        .collect();
    if centers.is_empty() {
        centers.push(p.waist());
    }
    let mut best = f64::NEG_INFINITY;
    let mut best_s = 0.0;
    for &c in &centers {
        let s0 = p.s(c);
        let mut window_norm = 0.0;
        for sups in &level_sups {
            let mut m = 0.0f64;
            for (j, v) in sups.iter().enumerate() {
                if (p.s(j) - s0).abs() <= half + 1e-12 {
                    m = m.max(*v);
                }
            }
            window_norm += m;
        }
        let value = p.omega(s0).powf(-gamma) * window_norm;
        if value > best {
            best = value;
            best_s = s0;
        }
    }
    WeightedNormResult {
        gamma,
        value: best,
        argmax_latitude: best_s,
    }
}

/// Per-latitude sup of `|u|`, used for radial decay fits.
pub fn latitude_sup_profile(u: &CylinderField) -> Vec<f64> {
    let p = u.params;
    (0..p.n_s)
        .map(|j| (0..p.n_x).fold(0.0f64, |m, i| m.max(u.values[[i, j]].abs())))
        .collect()
}

/// Least-squares slope of `log y` against `log x`. Inputs must be positive;
/// non-positive samples are skipped.
pub fn fit_log_log(xs: &[f64], ys: &[f64]) -> FitResult {
    assert_eq!(xs.len(), ys.len());
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys.iter())
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    assert!(pts.len() >= 2, "need at least two positive samples to fit");
    let n = pts.len() as f64;
    let xbar = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let ybar = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - xbar).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - xbar) * (p.1 - ybar)).sum();
    let slope = sxy / sxx;
    let ss_res: f64 = pts
        .iter()
        .map(|p| (p.1 - ybar - slope * (p.0 - xbar)).powi(2))
        .sum();
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - ybar).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else {
        1.0
    };
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (x, _) in xs
        .iter()
        .zip(ys.iter())
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
    {
        lo = lo.min(*x);
        hi = hi.max(*x);
    }
    FitResult {
        exponent: slope,
        r_squared,
        window: (lo, hi),
        points: pts.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{neck_params, CylinderField};
    use approx::assert_abs_diff_eq;

    #[test]
    fn constant_field_norm_is_one() {
        let p = neck_params(0.1, 0.5, 16, 201).unwrap();
        let u = CylinderField::from_fn(p, |_, _| 1.0);
        for order in 0..=2 {
            let r = weighted_norm(&u, 0.0, order);
            assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn weight_field_normalizes_to_edge_factor() {
        // u = omega(s), gamma = 1: each window contributes
        // cosh(1/2) + tanh|s0| sinh(1/2), maximized at the outermost center;
        // the sharp bound over all centers is e^{1/2}
        let p = neck_params(0.1, 0.5, 8, 401).unwrap();
        let u = CylinderField::from_fn(p, |_, s| p.tau * s.cosh());
        let r = weighted_norm(&u, 1.0, 0);
        let predicted = 0.5f64.cosh() + (p.l - 0.5).tanh() * 0.5f64.sinh();
        assert!(
            r.value >= 1.0 && r.value <= 0.5f64.exp() + 1e-9,
            "value {}",
            r.value
        );
        assert_abs_diff_eq!(r.value, predicted, epsilon = 0.05);
        assert!(
            r.argmax_latitude.abs() > p.l - 0.5 - 0.1,
            "argmax {} should sit at the outermost window",
            r.argmax_latitude
        );
    }

    #[test]
    fn gamma_one_dominates_smaller_gamma() {
        // omega <= 1 on the neck, so omega^{-1} >= omega^{-gamma}
        let p = neck_params(0.1, 0.5, 16, 201).unwrap();
        let u = CylinderField::from_fn(p, |x, s| (2.0 * x).cos() * (0.3 * s).sin() + 0.2);
        let v1 = weighted_norm(&u, 1.0, 0).value;
        let vg = weighted_norm(&u, 0.5, 0).value;
        assert!(v1 >= vg);
    }

    #[test]
    fn derivative_orders_increase_the_norm() {
        let p = neck_params(0.1, 0.5, 32, 201).unwrap();
        let u = CylinderField::from_fn(p, |x, s| (3.0 * s).sin() * (2.0 * x).cos());
        let v0 = weighted_norm(&u, 0.0, 0).value;
        let v1 = weighted_norm(&u, 0.0, 1).value;
        let v2 = weighted_norm(&u, 0.0, 2).value;
        assert!(v0 < v1 && v1 < v2, "{v0} {v1} {v2}");
        // second derivatives dominate: components reach 9 + 4 - ish scale
        assert!(v2 > 10.0);
    }

    #[test]
    fn fit_recovers_exact_power_law() {
        let xs: Vec<f64> = (1..20).map(|i| 0.01 * i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.7 * x.powf(2.25)).collect();
        let fit = fit_log_log(&xs, &ys);
        assert_abs_diff_eq!(fit.exponent, 2.25, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.r_squared, 1.0, epsilon = 1e-12);
        assert_eq!(fit.points, 19);
        assert_abs_diff_eq!(fit.window.0, 0.01, epsilon = 1e-15);
    }

    #[test]
    fn fit_flags_imperfect_data() {
        let xs = [0.1, 0.2, 0.4, 0.8];
        let ys = [1.0, 3.5, 4.5, 17.0];
        let fit = fit_log_log(&xs, &ys);
        assert!(fit.r_squared < 1.0 - 1e-6);
        assert!(fit.exponent > 0.0);
    }

    #[test]
    fn latitude_profile_picks_row_sups() {
        let p = neck_params(0.2, 0.5, 8, 33).unwrap();
        let u = CylinderField::from_fn(p, |x, s| s * x.cos());
        let prof = latitude_sup_profile(&u);
        for j in 0..p.n_s {
            assert_abs_diff_eq!(prof[j], p.s(j).abs() * 1.0, epsilon = 1e-12);
        }
    }
}
