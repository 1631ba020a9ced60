//! Discrete immersions and curvature operators on the cylinder grid.
//!
//! Mean curvature is assembled from the first and second fundamental forms of
//! a discrete immersion: angular derivatives are spectral (the coordinates are
//! smooth periodic functions of the angle), latitude derivatives are centered
//! second-order differences with one-sided second-order stencils on the two
//! boundary rows. The sign convention is the sum of the principal curvatures
//! with respect to the normal `F_x x F_s / |F_x x F_s|`; a round sphere has
//! `|H| = 2/R`, the catenoid has `H = 0`, and on the top sheet of a neck the
//! normal points downward.
//!
//! The weighted operator is `H'(u) = cosh(s) H(graph of cosh(s) u)` over the
//! unit catenoid; its linearization at `0` is
//! `L'(u) = sech(s) L''(cosh(s) u)` with the conjugated stability operator
//! `L''(v) = v_xx + v_ss + 2 sech^2(s) v`, whose kernel among lower modes is
//! spanned by the six geometric Jacobi fields.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::fft;
use crate::geometry::{catenoid_normal, catenoid_point, CylinderField, NeckParams, Point3};

/// A surface sampled on the cylinder grid of one neck.
#[derive(Debug, Clone)]
pub struct DiscreteImmersion {
    pub params: NeckParams,
    /// Points indexed `[angle i, latitude j]`.
    pub points: Array2<Point3>,
}

/// The unit catenoid sampled on the grid, together with its exact unit normal
/// field (the pair used by every graph construction over the catenoid).
pub fn catenoid_base(params: NeckParams) -> (DiscreteImmersion, Array2<Point3>) {
    let mut points = Array2::from_elem((params.n_x, params.n_s), Point3::default());
    let mut normals = points.clone();
    for i in 0..params.n_x {
        for j in 0..params.n_s {
            let (x, s) = (params.x(i), params.s(j));
            points[[i, j]] = catenoid_point(x, s);
            normals[[i, j]] = catenoid_normal(x, s);
        }
    }
    (DiscreteImmersion { params, points }, normals)
}

/// The graph `base + u * normal`, pointwise over the grid. Errors if the
/// graph's first fundamental form degenerates at any interior node.
pub fn graph_immersion(
    base: &DiscreteImmersion,
    normal: &Array2<Point3>,
    u: &CylinderField,
) -> Result<DiscreteImmersion> {
    if !base.params.same_grid(&u.params) {
        return Err(Error::GridMismatch("graph field vs base immersion".into()));
    }
    let mut points = base.points.clone();
    for i in 0..base.params.n_x {
        for j in 0..base.params.n_s {
            points[[i, j]] = points[[i, j]] + normal[[i, j]] * u.values[[i, j]];
        }
    }
    let imm = DiscreteImmersion {
        params: base.params,
        points,
    };
    // cheap positivity check of the metric at interior nodes
    let d = immersion_derivatives(&imm);
    for i in 0..base.params.n_x {
        for j in 1..base.params.n_s - 1 {
            let (fx, fs) = (d.fx[[i, j]], d.fs[[i, j]]);
            let det = fx.dot(fx) * fs.dot(fs) - fx.dot(fs).powi(2);
            if !(det > 0.0) {
                return Err(Error::DegenerateImmersion { i, j, det });
            }
        }
    }
    Ok(imm)
}

/// Centered second-order latitude derivative with one-sided second-order
/// stencils on the two boundary rows.
fn d_s_point(points: &Array2<Point3>, h: f64) -> Array2<Point3> {
    let (n_x, n_s) = points.dim();
    let mut out = Array2::from_elem((n_x, n_s), Point3::default());
    let inv2h = 1.0 / (2.0 * h);
    for i in 0..n_x {
        out[[i, 0]] = (points[[i, 0]] * -3.0 + points[[i, 1]] * 4.0 - points[[i, 2]]) * inv2h;
        for j in 1..n_s - 1 {
            out[[i, j]] = (points[[i, j + 1]] - points[[i, j - 1]]) * inv2h;
        }
        out[[i, n_s - 1]] = (points[[i, n_s - 1]] * 3.0 - points[[i, n_s - 2]] * 4.0
            + points[[i, n_s - 3]])
            * inv2h;
    }
    out
}

fn d_ss_point(points: &Array2<Point3>, h: f64) -> Array2<Point3> {
    let (n_x, n_s) = points.dim();
    let mut out = Array2::from_elem((n_x, n_s), Point3::default());
    let invh2 = 1.0 / (h * h);
    for i in 0..n_x {
        out[[i, 0]] = (points[[i, 0]] * 2.0 - points[[i, 1]] * 5.0 + points[[i, 2]] * 4.0
            - points[[i, 3]])
            * invh2;
        for j in 1..n_s - 1 {
            out[[i, j]] = (points[[i, j + 1]] - points[[i, j]] * 2.0 + points[[i, j - 1]]) * invh2;
        }
        out[[i, n_s - 1]] = (points[[i, n_s - 1]] * 2.0 - points[[i, n_s - 2]] * 5.0
            + points[[i, n_s - 3]] * 4.0
            - points[[i, n_s - 4]])
            * invh2;
    }
    out
}

/// Spectral angular derivative of a point array, componentwise.
fn d_x_point(points: &Array2<Point3>, order: u32) -> Array2<Point3> {
    let (n_x, n_s) = points.dim();
    let mut comp = Array2::zeros((n_x, n_s));
    let mut out = Array2::from_elem((n_x, n_s), Point3::default());
    for axis in 0..3 {
        for i in 0..n_x {
            for j in 0..n_s {
                let p = points[[i, j]];
                comp[[i, j]] = [p.x, p.y, p.z][axis];
            }
        }
        let d = fft::x_derivative(&comp, order);
        for i in 0..n_x {
            for j in 0..n_s {
                let v = d[[i, j]];
                let o = &mut out[[i, j]];
                match axis {
                    0 => o.x = v,
                    1 => o.y = v,
                    _ => o.z = v,
                }
            }
        }
    }
    out
}

struct ImmersionDerivs {
    fx: Array2<Point3>,
    fs: Array2<Point3>,
    fxx: Array2<Point3>,
    fxs: Array2<Point3>,
    fss: Array2<Point3>,
}

fn point_derivatives(points: &Array2<Point3>, h_col: f64) -> ImmersionDerivs {
    let fx = d_x_point(points, 1);
    let fxs = d_s_point(&fx, h_col);
    ImmersionDerivs {
        fs: d_s_point(points, h_col),
        fxx: d_x_point(points, 2),
        fss: d_ss_point(points, h_col),
        fx,
        fxs,
    }
}

fn immersion_derivatives(imm: &DiscreteImmersion) -> ImmersionDerivs {
    point_derivatives(&imm.points, imm.params.h_s())
}

/// Mean curvature of an arbitrary surface sampled on a grid that is periodic
/// in axis 0 (spectral derivatives) and uniformly spaced with step `h_col`
/// along axis 1 (centered differences, one-sided on the first and last
/// columns): `H = (e G - 2 f F + g E) / (E G - F^2)` with respect to the
/// normal along `F_x x F_s`. Errors if the metric determinant is not strictly
/// positive somewhere.
pub(crate) fn mean_curvature_points(points: &Array2<Point3>, h_col: f64) -> Result<Array2<f64>> {
    let (n_a, n_c) = points.dim();
    let d = point_derivatives(points, h_col);
    let mut out = Array2::zeros((n_a, n_c));
    for i in 0..n_a {
        for j in 0..n_c {
            let (fx, fs) = (d.fx[[i, j]], d.fs[[i, j]]);
            let (ee, ff, gg) = (fx.dot(fx), fx.dot(fs), fs.dot(fs));
            let det = ee * gg - ff * ff;
            if !(det > 0.0) {
                return Err(Error::DegenerateImmersion { i, j, det });
            }
            let n = fx.cross(fs) * (1.0 / det.sqrt());
            let e2 = d.fxx[[i, j]].dot(n);
            let f2 = d.fxs[[i, j]].dot(n);
            let g2 = d.fss[[i, j]].dot(n);
            out[[i, j]] = (e2 * gg - 2.0 * f2 * ff + g2 * ee) / det;
        }
    }
    Ok(out)
}

/// Mean curvature of a discrete immersion at every grid node.
///
/// Boundary-row values come from one-sided stencils; solvers treat those rows
/// as Dirichlet rows and exclude them from residual norms.
pub fn mean_curvature(imm: &DiscreteImmersion) -> Result<CylinderField> {
    Ok(CylinderField {
        params: imm.params,
        values: mean_curvature_points(&imm.points, imm.params.h_s())?,
    })
}

/// The catenoid graph machinery for one grid, cached so that repeated
/// evaluations (Picard iterations, finite differences) share the base.
pub struct NeckOperator {
    pub params: NeckParams,
    base: DiscreteImmersion,
    normal: Array2<Point3>,
    cosh_s: Vec<f64>,
}

impl NeckOperator {
    pub fn new(params: NeckParams) -> Self {
        let (base, normal) = catenoid_base(params);
        let cosh_s = (0..params.n_s).map(|j| params.s(j).cosh()).collect();
        NeckOperator {
            params,
            base,
            normal,
            cosh_s,
        }
    }

    pub fn base(&self) -> &DiscreteImmersion {
        &self.base
    }

    pub fn normal(&self) -> &Array2<Point3> {
        &self.normal
    }

    /// The weighted mean curvature `H'(u) = cosh(s) H(graph of cosh(s) u)`.
    pub fn weighted_mc(&self, u: &CylinderField) -> Result<CylinderField> {
        let v = u.mul_profile(|s| s.cosh());
        let graph = graph_immersion(&self.base, &self.normal, &v)?;
        let mut h = mean_curvature(&graph)?;
        for i in 0..self.params.n_x {
            for j in 0..self.params.n_s {
                h.values[[i, j]] *= self.cosh_s[j];
            }
        }
        Ok(h)
    }

    /// [`Self::weighted_mc`] with the 2/3-rule angular truncation applied to
    /// the output, as used inside nonlinear iterations.
    pub fn weighted_mc_dealiased(&self, u: &CylinderField) -> Result<CylinderField> {
        let h = self.weighted_mc(u)?;
        Ok(CylinderField {
            params: h.params,
            values: fft::truncate_above(&h.values, (self.params.n_x / 3) as i64),
        })
    }
}

/// One-off evaluation of the weighted mean curvature on the unit catenoid.
pub fn weighted_mc(u: &CylinderField) -> Result<CylinderField> {
    NeckOperator::new(u.params).weighted_mc(u)
}

/// The conjugated stability operator `L''(v) = v_xx + v_ss + 2 sech^2(s) v`
/// (spectral in the angle, centered in the latitude). Annihilates the six
/// geometric Jacobi fields up to the latitude truncation error.
pub fn apply_jacobi_conjugate(v: &CylinderField) -> CylinderField {
    let p = v.params;
    let h = p.h_s();
    let vxx = fft::x_derivative(&v.values, 2);
    // reuse the latitude stencils via a single-component wrapper
    let as_points = v.values.mapv(|val| Point3::new(val, 0.0, 0.0));
    let vss = d_ss_point(&as_points, h);
    let mut out = CylinderField::zeros(p);
    for i in 0..p.n_x {
        for j in 0..p.n_s {
            let sech = 1.0 / p.s(j).cosh();
            out.values[[i, j]] = vxx[[i, j]] + vss[[i, j]].x + 2.0 * sech * sech * v.values[[i, j]];
        }
    }
    out
}

/// The linearization of the weighted operator at `0`:
/// `L'(u) = sech(s) L''(cosh(s) u)`.
pub fn apply_weighted_lin(u: &CylinderField) -> CylinderField {
    let v = u.mul_profile(|s| s.cosh());
    apply_jacobi_conjugate(&v).mul_profile(|s| 1.0 / s.cosh())
}

/// Central-difference directional derivative of the mean curvature of graphs
/// over `base`: `[H(u0 + eps w) - H(u0 - eps w)] / (2 eps)`.
pub fn directional_dh(
    base: &DiscreteImmersion,
    normal: &Array2<Point3>,
    u0: &CylinderField,
    w: &CylinderField,
    eps: f64,
) -> Result<CylinderField> {
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("step eps = {eps} must be positive")));
    }
    let plus = graph_immersion(base, normal, &u0.add(&w.scaled(eps))?)?;
    let minus = graph_immersion(base, normal, &u0.sub(&w.scaled(eps))?)?;
    let hp = mean_curvature(&plus)?;
    let hm = mean_curvature(&minus)?;
    Ok(hp.sub(&hm)?.scaled(1.0 / (2.0 * eps)))
}

/// Central-difference directional derivative of the *weighted* operator at
/// `u0` on the unit catenoid: `[H'(u0 + eps w) - H'(u0 - eps w)] / (2 eps)`.
pub fn directional_dh_weighted(
    op: &NeckOperator,
    u0: &CylinderField,
    w: &CylinderField,
    eps: f64,
) -> Result<CylinderField> {
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("step eps = {eps} must be positive")));
    }
    let hp = op.weighted_mc(&u0.add(&w.scaled(eps))?)?;
    let hm = op.weighted_mc(&u0.sub(&w.scaled(eps))?)?;
    Ok(hp.sub(&hm)?.scaled(1.0 / (2.0 * eps)))
}

/// Mixed second difference of the mean curvature of graphs over `base` at `u0`:
/// the four-point stencil approximation of `D^2 H (a, b)`.
pub fn directional_d2h(
    base: &DiscreteImmersion,
    normal: &Array2<Point3>,
    u0: &CylinderField,
    a: &CylinderField,
    b: &CylinderField,
    eps: f64,
) -> Result<CylinderField> {
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("step eps = {eps} must be positive")));
    }
    let h = |u: CylinderField| -> Result<CylinderField> {
        mean_curvature(&graph_immersion(base, normal, &u)?)
    };
    let app = h(u0.add(&a.add(b)?.scaled(eps))?)?;
    let apm = h(u0.add(&a.sub(b)?.scaled(eps))?)?;
    let amp = h(u0.sub(&a.sub(b)?.scaled(eps))?)?;
    let amm = h(u0.sub(&a.add(b)?.scaled(eps))?)?;
    let num = app.sub(&apm)?.sub(&amp.sub(&amm)?)?;
    Ok(num.scaled(1.0 / (4.0 * eps * eps)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::neck_params;
    use crate::modes::{jacobi_basis, to_spectrum};
    use approx::assert_abs_diff_eq;

    /// A sphere of radius `r` sampled over the cylinder grid, polar angle
    /// `phi = 0.4 pi s / l` (away from the poles).
    fn sphere(params: NeckParams, r: f64) -> DiscreteImmersion {
        let c = 0.4 * std::f64::consts::PI / params.l;
        let mut points = Array2::from_elem((params.n_x, params.n_s), Point3::default());
        for i in 0..params.n_x {
            for j in 0..params.n_s {
                let (x, s) = (params.x(i), params.s(j));
                let phi = c * s;
                points[[i, j]] = Point3::new(
                    r * phi.cos() * x.cos(),
                    r * phi.cos() * x.sin(),
                    r * phi.sin(),
                );
            }
        }
        DiscreteImmersion { params, points }
    }

    #[test]
    fn sphere_mean_curvature_is_two_over_radius() {
        // |H| = 2/R to O(h^2), interior rows; error drops at second order.
        let mut sups = Vec::new();
        for n_s in [101, 201] {
            let p = neck_params(0.1, 0.5, 16, n_s).unwrap();
            let h = mean_curvature(&sphere(p, 2.0)).unwrap();
            let mut worst = 0.0f64;
            for i in 0..p.n_x {
                for j in 1..p.n_s - 1 {
                    worst = worst.max((h.values[[i, j]].abs() - 1.0).abs());
                }
            }
            sups.push(worst);
        }
        assert!(sups[0] < 1e-3, "coarse sphere error {}", sups[0]);
        let order = (sups[0] / sups[1]).log2();
        assert!(order > 1.8, "refinement order {order}, sups {sups:?}");
    }

    #[test]
    fn sphere_orientation_sign() {
        // with the (x, s) ordering the sampled sphere's normal is outward,
        // so H is negative: -2/R.
        let p = neck_params(0.1, 0.5, 16, 101).unwrap();
        let h = mean_curvature(&sphere(p, 2.0)).unwrap();
        assert!(h.values[[3, 50]] < 0.0);
    }

    #[test]
    fn catenoid_is_discretely_minimal() {
        let p = neck_params(0.1, 0.5, 16, 201).unwrap();
        let (base, _) = catenoid_base(p);
        let h = mean_curvature(&base).unwrap();
        assert!(
            h.sup_norm_interior() < 1e-3,
            "catenoid |H| = {}",
            h.sup_norm_interior()
        );
    }

    #[test]
    fn graph_at_zero_is_the_base() {
        let p = neck_params(0.2, 0.5, 16, 33).unwrap();
        let (base, normal) = catenoid_base(p);
        let g = graph_immersion(&base, &normal, &CylinderField::zeros(p)).unwrap();
        for (a, b) in g.points.iter().zip(base.points.iter()) {
            assert_abs_diff_eq!((*a - *b).norm(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn collapsed_graph_is_degenerate() {
        // pulling the waist circle onto the axis kills the metric
        let p = neck_params(0.2, 0.5, 16, 33).unwrap();
        let (base, normal) = catenoid_base(p);
        let u = CylinderField::from_fn(p, |_, s| -s.cosh());
        match graph_immersion(&base, &normal, &u) {
            Err(Error::DegenerateImmersion { .. }) => {}
            other => panic!("expected degenerate immersion, got {other:?}"),
        }
    }

    #[test]
    fn weighted_linearization_of_constants() {
        // L'(c) = c (1 + 2 sech^2) up to O(h^2); equals 3c on the waist.
        let p = neck_params(0.1, 0.5, 16, 201).unwrap();
        let u = CylinderField::from_fn(p, |_, _| 1.0);
        let lu = apply_weighted_lin(&u);
        let h2 = p.h_s() * p.h_s();
        for j in 1..p.n_s - 1 {
            let sech2 = 1.0 / p.s(j).cosh().powi(2);
            assert_abs_diff_eq!(lu.values[[0, j]], 1.0 + 2.0 * sech2, epsilon = 10.0 * h2);
        }
        assert_abs_diff_eq!(lu.values[[5, p.waist()]], 3.0, epsilon = 10.0 * h2);
    }

    #[test]
    fn jacobi_fields_are_annihilated() {
        let p = neck_params(0.1, 0.5, 16, 201).unwrap();
        for (idx, j) in jacobi_basis(p).iter().enumerate() {
            let lj = apply_jacobi_conjugate(j);
            assert!(
                lj.sup_norm_interior() < 1e-3,
                "basis field {idx}: |L'' j| = {}",
                lj.sup_norm_interior()
            );
        }
    }

    #[test]
    fn weighted_mc_vanishes_quadratically_on_jacobi_directions() {
        // H'(eps j / cosh) differs from H'(0) only at O(eps h^2) + O(eps^2).
        let p = neck_params(0.1, 0.5, 16, 201).unwrap();
        let op = NeckOperator::new(p);
        let base_residual = op.weighted_mc(&CylinderField::zeros(p)).unwrap();
        let eps = 1e-6;
        let j = jacobi_basis(p)[0]
            .mul_profile(|s| 1.0 / s.cosh())
            .scaled(eps);
        let pert = op.weighted_mc(&j).unwrap();
        let diff = pert.sub(&base_residual).unwrap();
        assert!(
            diff.sup_norm_interior() < 1e-8,
            "quadratic remainder {}",
            diff.sup_norm_interior()
        );
    }

    #[test]
    fn directional_derivative_matches_assembled_linearization() {
        // finite-difference DH' at 0 vs apply_weighted_lin on a smooth field
        let p = neck_params(0.1, 0.5, 64, 401).unwrap();
        let op = NeckOperator::new(p);
        let w = CylinderField::from_fn(p, |x, s| (2.0 * x).cos() * (0.7 * s).sin() + 0.3);
        let zero = CylinderField::zeros(p);
        let fd = directional_dh_weighted(&op, &zero, &w, 1e-4).unwrap();
        let lin = apply_weighted_lin(&w);
        // the two sides discretize the same operator with different (both
        // second-order) truncations, so they agree to O(h^2), not exactly
        let err = fd.sub(&lin).unwrap().sup_norm_interior() / lin.sup_norm_interior();
        assert!(err < 5e-3, "relative mismatch {err}");
    }

    #[test]
    fn directional_derivative_preserves_modes() {
        // at a rotationally symmetric base, DH in a single-mode direction stays
        // on that mode (and its conjugate)
        let p = neck_params(0.1, 0.5, 32, 101).unwrap();
        let (base, normal) = catenoid_base(p);
        let zero = CylinderField::zeros(p);
        let k = 3;
        let w = CylinderField::from_fn(p, |x, s| (k as f64 * x).cos() / (0.5 * s).cosh());
        let dh = directional_dh(&base, &normal, &zero, &w, 1e-5).unwrap();
        let spec = to_spectrum(&dh);
        let on_mode: f64 = spec.profile(k).iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mut off_mode = 0.0f64;
        for i in 0..p.n_x {
            if spec.k_of(i).abs() != k {
                for j in 0..p.n_s {
                    off_mode = off_mode.max(spec.coeffs[[i, j]].norm());
                }
            }
        }
        assert!(
            off_mode < 1e-6 * on_mode,
            "off-mode leakage {off_mode} vs on-mode {on_mode}"
        );
    }
}
