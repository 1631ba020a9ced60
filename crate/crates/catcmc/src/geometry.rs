//! Catenoid parametrization, neck parameters, and fields on the cylinder.
//!
//! The unit catenoid is parametrized conformally over `S^1 x R` by
//! `F(x, s) = cosh(s) e_r(x) + s e_z`, where `e_r(x) = (cos x, sin x, 0)`.
//! A neck of scale `tau in (0, 1)` is `tau F` restricted to `|s| <= l` with
//! `l = arccosh(1/tau)`, which places the two boundary circles on the unit
//! cylinder: the weight `omega(s) = tau cosh(s)` (the distance to the axis)
//! equals exactly 1 at `s = +-l`.

use ndarray::Array2;
use serde::Serialize;

use crate::error::{Error, Result};

/// A point or vector in R^3.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }

    pub fn dot(self, o: Point3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Point3) -> Point3 {
        Point3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn normalized(self) -> Point3 {
        self * (1.0 / self.norm())
    }
}

impl std::ops::Add for Point3 {
    type Output = Point3;
    fn add(self, o: Point3) -> Point3 {
        Point3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl std::ops::Sub for Point3 {
    type Output = Point3;
    fn sub(self, o: Point3) -> Point3 {
        Point3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl std::ops::Mul<f64> for Point3 {
    type Output = Point3;
    fn mul(self, c: f64) -> Point3 {
        Point3::new(self.x * c, self.y * c, self.z * c)
    }
}

/// The point of the unit catenoid at angle `x` and latitude `s`.
pub fn catenoid_point(x: f64, s: f64) -> Point3 {
    let c = s.cosh();
    Point3::new(c * x.cos(), c * x.sin(), s)
}

/// Unit normal of the catenoid at `(x, s)`:
/// `sech(s) e_r(x) - tanh(s) e_z`, the orientation produced by
/// `F_x x F_s`. On the top sheet (`s -> +l`) it points downward.
pub fn catenoid_normal(x: f64, s: f64) -> Point3 {
    let sech = 1.0 / s.cosh();
    Point3::new(sech * x.cos(), sech * x.sin(), -s.tanh())
}

/// Discretization parameters of one neck.
///
/// The grid is uniform: `n_x` equispaced angles (a power of two, for the angular
/// transforms) and `n_s` latitudes on `[-l, l]` with `n_s` odd so that `s = 0`
/// is a grid latitude (the waist row carries the signature data).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NeckParams {
    /// Neck scale, in (0, 1).
    pub tau: f64,
    /// Truncation half-length `arccosh(1/tau)`.
    pub l: f64,
    /// Decay-weight exponent used by the weighted norms, in (0, 1).
    pub gamma: f64,
    /// Number of angular grid points (power of two, >= 8).
    pub n_x: usize,
    /// Number of latitude grid points (odd, >= 17).
    pub n_s: usize,
}

/// Validated constructor for [`NeckParams`]; computes `l = arccosh(1/tau)`.
pub fn neck_params(tau: f64, gamma: f64, n_x: usize, n_s: usize) -> Result<NeckParams> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::Domain(format!("tau = {tau} must lie in (0, 1)")));
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::Domain(format!("gamma = {gamma} must lie in (0, 1)")));
    }
    if n_x < 8 || !n_x.is_power_of_two() {
        return Err(Error::Domain(format!(
            "n_x = {n_x} must be a power of two, at least 8"
        )));
    }
    if n_s < 17 || n_s % 2 == 0 {
        return Err(Error::Domain(format!(
            "n_s = {n_s} must be odd, at least 17"
        )));
    }
    let inv = 1.0 / tau;
    // arccosh(1/tau) = ln(1/tau + sqrt(1/tau^2 - 1))
    let l = (inv + (inv * inv - 1.0).sqrt()).ln();
    Ok(NeckParams {
        tau,
        l,
        gamma,
        n_x,
        n_s,
    })
}

impl NeckParams {
    /// Angular spacing `2 pi / n_x`.
    pub fn h_x(&self) -> f64 {
        std::f64::consts::TAU / self.n_x as f64
    }

    /// Latitude spacing `2 l / (n_s - 1)`.
    pub fn h_s(&self) -> f64 {
        2.0 * self.l / (self.n_s - 1) as f64
    }

    /// Angle of grid column `i`.
    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.h_x()
    }

    /// Latitude of grid row `j`.
    pub fn s(&self, j: usize) -> f64 {
        -self.l + j as f64 * self.h_s()
    }

    /// Index of the waist latitude `s = 0`.
    pub fn waist(&self) -> usize {
        (self.n_s - 1) / 2
    }

    /// The weight `omega(s) = tau cosh(s)`, the distance of the neck to its axis.
    pub fn omega(&self, s: f64) -> f64 {
        self.tau * s.cosh()
    }

    /// True when the two fields share a grid (same `tau`, `l`, and counts).
    pub fn same_grid(&self, other: &NeckParams) -> bool {
        self.tau == other.tau && self.n_x == other.n_x && self.n_s == other.n_s
    }
}

/// A real scalar field sampled on the cylinder grid of one neck.
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderField {
    pub params: NeckParams,
    /// Values indexed `[angle i, latitude j]`.
    pub values: Array2<f64>,
}

impl CylinderField {
    pub fn zeros(params: NeckParams) -> Self {
        CylinderField {
            params,
            values: Array2::zeros((params.n_x, params.n_s)),
        }
    }

    /// Sample `f(x, s)` on the grid.
    pub fn from_fn(params: NeckParams, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Array2::zeros((params.n_x, params.n_s));
        for i in 0..params.n_x {
            for j in 0..params.n_s {
                values[[i, j]] = f(params.x(i), params.s(j));
            }
        }
        CylinderField { params, values }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Sup norm over interior latitudes only (the two boundary rows are
    /// Dirichlet rows and carry one-sided stencils).
    pub fn sup_norm_interior(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..self.params.n_x {
            for j in 1..self.params.n_s - 1 {
                m = m.max(self.values[[i, j]].abs());
            }
        }
        m
    }

    pub fn scaled(&self, c: f64) -> Self {
        CylinderField {
            params: self.params,
            values: &self.values * c,
        }
    }

    pub fn add(&self, other: &CylinderField) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(CylinderField {
            params: self.params,
            values: &self.values + &other.values,
        })
    }

    pub fn sub(&self, other: &CylinderField) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(CylinderField {
            params: self.params,
            values: &self.values - &other.values,
        })
    }

    /// Pointwise map.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        CylinderField {
            params: self.params,
            values: self.values.mapv(f),
        }
    }

    /// Multiply every latitude row by a profile of `s`.
    pub fn mul_profile(&self, profile: impl Fn(f64) -> f64) -> Self {
        let mut out = self.clone();
        for j in 0..self.params.n_s {
            let w = profile(self.params.s(j));
            for i in 0..self.params.n_x {
                out.values[[i, j]] *= w;
            }
        }
        out
    }

    fn check_same_grid(&self, other: &CylinderField) -> Result<()> {
        if !self.params.same_grid(&other.params) {
            return Err(Error::GridMismatch(format!(
                "({}, {}) vs ({}, {})",
                self.params.n_x, self.params.n_s, other.params.n_x, other.params.n_s
            )));
        }
        Ok(())
    }
}

/// The localized weight profile `c_{s0}(s) = cosh(s + s0) / cosh(s0)`,
/// expanded so it is numerically stable for large `s0`:
/// `cosh(s) + tanh(s0) sinh(s)`.
pub fn localization_profile(s0: f64, s: f64) -> f64 {
    s.cosh() + s0.tanh() * s.sinh()
}

/// The boundary-matching dilation factor `lambda(tau0, tau)`: the scale at
/// which the dilated neck `lambda N_tau` is a normal graph over `N_tau0` with
/// exactly corresponding boundary circles,
/// `lambda = (tau0^2 l0 + sqrt(1 - tau0^2)) / (sqrt(1 - tau0^2) + tau0 tau l)`.
/// Satisfies `lambda(tau0, tau0) = 1`.
pub fn matching_scale(tau0: f64, tau: f64) -> Result<f64> {
    for t in [tau0, tau] {
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::Domain(format!("scale {t} must lie in (0, 1)")));
        }
    }
    let l0 = (1.0 / tau0 + (1.0 / (tau0 * tau0) - 1.0).sqrt()).ln();
    let l = (1.0 / tau + (1.0 / (tau * tau) - 1.0).sqrt()).ln();
    let root = (1.0 - tau0 * tau0).sqrt();
    Ok((tau0 * tau0 * l0 + root) / (root + tau0 * tau * l))
}

/// The dilation Jacobi profile `xi(s) = s tanh(s) - 1`, the rotationally
/// symmetric variation generated by dilating the catenoid. Vanishes exactly at
/// the singular half-length (the positive root of `s tanh(s) = 1`).
pub fn dilation_jacobi_profile(s: f64) -> f64 {
    s * s.tanh() - 1.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn truncation_length_matches_closed_form() {
        // arccosh(1/tau) for tau = 0.1, 0.5 against independently computed values.
        let p = neck_params(0.1, 0.5, 64, 201).unwrap();
        assert_relative_eq!(p.l, 2.99322284612638, max_relative = 1e-14);
        let p = neck_params(0.5, 0.5, 64, 201).unwrap();
        assert_relative_eq!(p.l, 1.3169578969248166, max_relative = 1e-14);
    }

    #[test]
    fn weight_is_one_at_the_boundary() {
        for tau in [0.3, 0.1, 0.05, 0.012] {
            let p = neck_params(tau, 0.5, 64, 201).unwrap();
            // omega(l) = tau cosh(arccosh(1/tau)) = 1 exactly.
            assert_abs_diff_eq!(p.omega(p.l), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(p.omega(-p.l), 1.0, epsilon = 1e-12);
            // and the waist row sits at s = 0 on the grid.
            assert_abs_diff_eq!(p.s(p.waist()), 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(neck_params(0.0, 0.5, 64, 201).is_err());
        assert!(neck_params(1.0, 0.5, 64, 201).is_err());
        assert!(neck_params(0.1, 0.0, 64, 201).is_err());
        assert!(neck_params(0.1, 0.5, 48, 201).is_err()); // not a power of two
        assert!(neck_params(0.1, 0.5, 64, 200).is_err()); // even latitude count
        assert!(neck_params(0.1, 0.5, 4, 201).is_err()); // too few angles
    }

    #[test]
    fn normal_is_unit_and_orthogonal_to_tangents() {
        for (x, s) in [(0.3, -1.7), (2.0, 0.0), (5.1, 2.4)] {
            let n = catenoid_normal(x, s);
            assert_abs_diff_eq!(n.norm(), 1.0, epsilon = 1e-14);
            // analytic tangents F_x, F_s
            let fx = Point3::new(-s.cosh() * x.sin(), s.cosh() * x.cos(), 0.0);
            let fs = Point3::new(s.sinh() * x.cos(), s.sinh() * x.sin(), 1.0);
            assert_abs_diff_eq!(n.dot(fx), 0.0, epsilon = 1e-13);
            assert_abs_diff_eq!(n.dot(fs), 0.0, epsilon = 1e-13);
            // and F_x x F_s points along the normal with length cosh^2(s)
            let c = fx.cross(fs);
            assert_relative_eq!(c.norm(), s.cosh() * s.cosh(), max_relative = 1e-13);
            assert_relative_eq!(c.normalized().dot(n), 1.0, max_relative = 1e-13);
        }
    }

    #[test]
    fn conformal_factor_on_the_nose() {
        // E = G = cosh^2(s), F = 0 for the analytic tangents.
        for s in [-2.0f64, -0.3, 0.0, 1.1] {
            let x = 0.77f64;
            let fx = Point3::new(-s.cosh() * x.sin(), s.cosh() * x.cos(), 0.0);
            let fs = Point3::new(s.sinh() * x.cos(), s.sinh() * x.sin(), 1.0);
            let c2 = s.cosh() * s.cosh();
            assert_relative_eq!(fx.dot(fx), c2, max_relative = 1e-14);
            assert_relative_eq!(fs.dot(fs), c2, max_relative = 1e-14);
            assert_abs_diff_eq!(fx.dot(fs), 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn localization_profile_equals_shifted_cosh_ratio() {
        // Two closed forms of the same profile, plus a frozen spot value.
        for (s0, s) in [(1.0, 0.25), (3.0, -0.8), (-2.0, 1.3)] {
            assert_relative_eq!(
                localization_profile(s0, s),
                (s + s0).cosh() / s0.cosh(),
                max_relative = 1e-13
            );
        }
        assert_relative_eq!(
            localization_profile(1.0, 0.25),
            1.2238011640831204,
            max_relative = 1e-14
        );
    }

    #[test]
    fn matching_scale_identity_and_frozen_value() {
        for tau0 in [0.3, 0.1, 0.02] {
            assert_relative_eq!(
                matching_scale(tau0, tau0).unwrap(),
                1.0,
                max_relative = 1e-14
            );
        }
        assert_relative_eq!(
            matching_scale(0.2, 0.25).unwrap(),
            0.9894044982813033,
            max_relative = 1e-13
        );
    }

    #[test]
    fn matching_scale_derivative_vanishes_as_tau0_shrinks() {
        // d lambda / d tau at tau = tau0, by central difference; frozen values
        // -0.23739..., -0.19398..., -0.13329... decrease toward 0 with tau0.
        let lambda_dot = |tau0: f64| {
            let d = 1e-6 * tau0;
            (matching_scale(tau0, tau0 + d).unwrap() - matching_scale(tau0, tau0 - d).unwrap())
                / (2.0 * d)
        };
        assert_relative_eq!(lambda_dot(0.2), -0.23739039804556, max_relative = 1e-7);
        assert_relative_eq!(lambda_dot(0.1), -0.19398447484814, max_relative = 1e-7);
        assert_relative_eq!(lambda_dot(0.05), -0.13328779190233, max_relative = 1e-7);
        let mags: Vec<f64> = [0.2, 0.1, 0.05, 0.025, 0.0125]
            .iter()
            .map(|&t| lambda_dot(t).abs())
            .collect();
        for w in mags.windows(2) {
            assert!(w[1] < w[0], "lambda-dot magnitude must decrease: {mags:?}");
        }
    }

    #[test]
    fn dilation_profile_values() {
        assert_abs_diff_eq!(dilation_jacobi_profile(0.0), -1.0, epsilon = 1e-15);
        // vanishes at the root of s tanh s = 1 (independently computed)
        assert_abs_diff_eq!(
            dilation_jacobi_profile(1.1996786402577338),
            0.0,
            epsilon = 1e-14
        );
        assert_relative_eq!(
            dilation_jacobi_profile(1.0),
            -0.23840584404423511,
            max_relative = 1e-14
        );
    }

    #[test]
    fn field_construction_and_norms() {
        let p = neck_params(0.1, 0.5, 8, 17).unwrap();
        let f = CylinderField::from_fn(p, |x, s| x.cos() * s);
        assert_relative_eq!(f.sup_norm(), p.l, max_relative = 1e-14);
        assert!(f.sup_norm_interior() < f.sup_norm());
        let g = f.scaled(-2.0).add(&f).unwrap();
        assert_relative_eq!(g.sup_norm(), f.sup_norm(), max_relative = 1e-14);
        let h = f.sub(&f).unwrap();
        assert_eq!(h.sup_norm(), 0.0);
    }
}
