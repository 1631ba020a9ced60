//! The library's verification suite: eleven numbered checks covering the
//! discrete geometry (minimality, Jacobi kernel, linearization, mode
//! preservation), the linear theory (singular length, uniform invertibility),
//! the nonlinear solves (neck and disk), and the limit experiments (decay,
//! continuity, derivative convergence). Each check returns a structured
//! pass/fail result with the measured numbers formatted deterministically.
//!
//! A twelfth property — byte-identical reports across repeated runs — lives
//! at the binary level and is exercised by running the command-line `verify`
//! twice and comparing outputs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::disk::{solve_cmc_disk, spherical_cap, CutoffBand, DiskBoundary};
use crate::error::Result;
use crate::experiments::{
    derivative_comparison, improved_decay_experiment, stability_ratio, tau_continuity_experiment,
    DerivativeComparisonOptions, SweepGrid,
};
use crate::fft;
use crate::geometry::{neck_params, CylinderField};
use crate::linear::{locate_singular_length, singular_length_exact, BoundaryData};
use crate::modes::{jacobi_basis, to_spectrum};
use crate::nonlinear::solve_cmc_neck;
use crate::operators::{
    apply_jacobi_conjugate, apply_weighted_lin, catenoid_base, directional_d2h,
    directional_dh_weighted, mean_curvature, NeckOperator,
};

/// Outcome of one verification check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub index: usize,
    pub name: &'static str,
    pub passed: bool,
    /// The measured quantities, formatted for the report.
    pub detail: String,
}

impl CheckResult {
    fn new(index: usize, name: &'static str, passed: bool, detail: String) -> Self {
        CheckResult {
            index,
            name,
            passed,
            detail,
        }
    }
}

/// Shared tau-sweep for the uniformity checks.
const TAU_SWEEP: [f64; 4] = [0.2, 0.1, 0.05, 0.025];

/// Refinement orders of a decreasing error sequence under grid doubling.
fn refinement_orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

/// Check 1 — the base immersion is discretely minimal: the computed mean
/// curvature of the catenoid vanishes to truncation order, and refining the
/// latitude grid shrinks it at second order.
pub fn check_minimality() -> Result<CheckResult> {
    let mut sups = Vec::new();
    for n_s in [51, 101, 201] {
        let params = neck_params(0.2, 0.5, 16, n_s)?;
        let (base, _) = catenoid_base(params);
        let h = mean_curvature(&base)?;
        sups.push(h.sup_norm_interior());
    }
    let orders = refinement_orders(&sups);
    let passed = sups[2] <= 1e-3 && orders.iter().all(|o| *o >= 1.8);
    Ok(CheckResult::new(
        1,
        "minimality",
        passed,
        format!(
            "sup|H| = [{:.3e}, {:.3e}, {:.3e}] at n_s = [51, 101, 201], orders = [{:.2}, {:.2}]",
            sups[0], sups[1], sups[2], orders[0], orders[1]
        ),
    ))
}

/// Check 2 — the six geometric Jacobi fields lie in the kernel of the
/// conjugated stability operator to truncation order, with second-order
/// refinement decay.
pub fn check_jacobi_kernel() -> Result<CheckResult> {
    let mut worst_per_grid = Vec::new();
    for n_s in [51, 101, 201] {
        let params = neck_params(0.2, 0.5, 16, n_s)?;
        let mut worst = 0.0f64;
        for j in jacobi_basis(params) {
            worst = worst.max(apply_jacobi_conjugate(&j).sup_norm_interior());
        }
        worst_per_grid.push(worst);
    }
    let orders = refinement_orders(&worst_per_grid);
    let passed = worst_per_grid[2] <= 1e-3 && orders.iter().all(|o| *o >= 1.8);
    Ok(CheckResult::new(
        2,
        "jacobi-kernel",
        passed,
        format!(
            "max sup|L(j)| = [{:.3e}, {:.3e}, {:.3e}] at n_s = [51, 101, 201], orders = [{:.2}, {:.2}]",
            worst_per_grid[0], worst_per_grid[1], worst_per_grid[2], orders[0], orders[1]
        ),
    ))
}

/// Check 3 — the closed-form linearization at zero matches a central
/// difference of the weighted operator on random de-aliased fields.
pub fn check_linearization() -> Result<CheckResult> {
    // the closed form and the difference quotient discretize the same
    // operator but are not the same discrete operator; their O(h^2) gap is
    // what the threshold budgets for, so the default sweep spacing is used
    let params = SweepGrid::default().neck(0.2, 0.5)?;
    let op = NeckOperator::new(params);
    let zero = CylinderField::zeros(params);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let k_max = (params.n_x / 3) as i64;
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let mut w = CylinderField::zeros(params);
        for v in w.values.iter_mut() {
            *v = rng.gen_range(-1.0..1.0);
        }
        w.values = fft::truncate_above(&w.values, k_max);
        let fd = directional_dh_weighted(&op, &zero, &w, 1e-4)?;
        let lin = apply_weighted_lin(&w);
        let scale = lin.sup_norm_interior();
        let err = fd.sub(&lin)?.sup_norm_interior() / scale;
        worst = worst.max(err);
    }
    let passed = worst <= 1e-3;
    Ok(CheckResult::new(
        3,
        "linearization",
        passed,
        format!("max relative error over 10 random fields = {worst:.3e}"),
    ))
}

/// Off-target mode mass of a field relative to its mass on modes `{-k, k}`.
fn off_mode_ratio(u: &CylinderField, k: i64) -> f64 {
    let spec = to_spectrum(u);
    let mut on = 0.0f64;
    let mut off = 0.0f64;
    for i in 0..u.params.n_x {
        let mode = fft::k_of(i, u.params.n_x);
        for j in 0..u.params.n_s {
            let m = spec.coeffs[[i, j]].norm();
            if mode.abs() == k.abs() {
                on = on.max(m);
            } else {
                off = off.max(m);
            }
        }
    }
    off / on
}

/// Check 4 — linearization and second variation against a rotationally
/// symmetric direction commute with angular Fourier projection: single-mode
/// inputs produce single-mode outputs.
pub fn check_mode_preservation() -> Result<CheckResult> {
    let params = neck_params(0.2, 0.5, 16, 101)?;
    let op = NeckOperator::new(params);
    let (base, normal) = catenoid_base(params);
    let zero = CylinderField::zeros(params);
    let xi = CylinderField::from_fn(params, |_, s| (s * s.tanh() - 1.0) / s.cosh());
    let mut worst_lin = 0.0f64;
    let mut worst_second = 0.0f64;
    for k in 0..=3i64 {
        let w = CylinderField::from_fn(params, |x, s| {
            (k as f64 * x).cos() * (1.0 + 0.5 * s) / s.cosh()
        });
        let lin = directional_dh_weighted(&op, &zero, &w, 1e-4)?;
        worst_lin = worst_lin.max(off_mode_ratio(&lin, k));
        // eps balances the two floors of the mixed second difference: its
        // eps^2 truncation carries fourth-variation terms at mode 3k (real
        // off-mode content of the stencil, not of the operator), while
        // machine epsilon / eps^2 rises as eps shrinks
        let second = directional_d2h(&base, &normal, &zero, &xi, &w, 1.5e-4)?;
        worst_second = worst_second.max(off_mode_ratio(&second, k));
    }
    let passed = worst_lin <= 1e-6 && worst_second <= 1e-6;
    Ok(CheckResult::new(
        4,
        "mode-preservation",
        passed,
        format!(
            "off-mode ratio: linearization {worst_lin:.3e}, second variation {worst_second:.3e}"
        ),
    ))
}

/// Check 5 — the rotationally symmetric Dirichlet problem has its unique
/// singular half-length at the root of l tanh(l) = 1. The value sometimes
/// quoted as sqrt(2) differs from that root; the discrepancy is reported, not
/// asserted.
pub fn check_singular_length() -> Result<CheckResult> {
    let exact = singular_length_exact();
    let located = locate_singular_length(801);
    let err = (located - exact).abs();
    let sqrt2_gap = (exact - 2.0f64.sqrt()).abs();
    let passed = err <= 1e-3;
    Ok(CheckResult::new(
        5,
        "singular-length",
        passed,
        format!(
            "located {located:.6} vs root {exact:.6} (err {err:.2e}); gap to sqrt(2) = {sqrt2_gap:.4} (reported only)"
        ),
    ))
}

/// Check 6 — the probed stability ratio of the modified linear solve is
/// uniform across the tau-sweep: max/min under a factor 3.
pub fn check_uniform_invertibility() -> Result<CheckResult> {
    let grid = SweepGrid::default();
    let mut ratios = Vec::new();
    for &tau in TAU_SWEEP.iter() {
        let params = grid.neck(tau, 0.5)?;
        ratios.push(stability_ratio(params, 5, 42)?.ratio);
    }
    let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
    let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
    let passed = max / min < 3.0;
    Ok(CheckResult::new(
        6,
        "uniform-invertibility",
        passed,
        format!(
            "ratios = [{:.3}, {:.3}, {:.3}, {:.3}] over tau = {TAU_SWEEP:?}, spread {:.2}",
            ratios[0],
            ratios[1],
            ratios[2],
            ratios[3],
            max / min
        ),
    ))
}

/// Check 7 — the nonlinear neck solve converges with tight residual and
/// signature at the reference parameters, and its data-to-solution ratio is
/// uniform across the tau-sweep.
pub fn check_nonlinear_solve() -> Result<CheckResult> {
    let grid = SweepGrid::default();
    let delta = 1e-3;
    let mut ratios = Vec::new();
    let mut reference_ok = false;
    let mut reference_note = String::new();
    for &tau in TAU_SWEEP.iter() {
        let params = grid.neck(tau, 0.5)?;
        let f = BoundaryData::zeros(params);
        let (_, report) = solve_cmc_neck(params, delta, &f)?;
        ratios.push(report.weighted_norm_gamma / delta);
        if tau == 0.1 {
            reference_ok =
                report.converged && report.residual <= 1e-9 && report.signature_norm <= 1e-9;
            reference_note = format!(
                "residual {:.2e}, signature {:.2e}, converged {}",
                report.residual, report.signature_norm, report.converged
            );
        }
    }
    let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
    let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
    let passed = reference_ok && max / min < 3.0;
    Ok(CheckResult::new(
        7,
        "nonlinear-solve",
        passed,
        format!(
            "{reference_note}; norm/data = [{:.3}, {:.3}, {:.3}, {:.3}], spread {:.2}",
            ratios[0],
            ratios[1],
            ratios[2],
            ratios[3],
            max / min
        ),
    ))
}

/// Check 8 — the disk solve reproduces the spherical-cap closed form.
pub fn check_disk_oracle() -> Result<CheckResult> {
    let delta = 0.1;
    let (h, report) = solve_cmc_disk(delta, &DiskBoundary::zeros(16), 200, 16)?;
    let params = h.params;
    let mut sup = 0.0f64;
    for i in 0..params.n_theta {
        for j in 0..params.n_r {
            let want = spherical_cap(delta, params.r(j))?;
            sup = sup.max((h.values[[i, j]] - want).abs());
        }
    }
    let rim = h.values[[0, params.n_r - 1]];
    let rim_exact = spherical_cap(delta, 1.0)?;
    let rim_err = (rim - rim_exact).abs();
    let passed = report.converged && sup <= 1e-5 && rim_err <= 1e-5;
    Ok(CheckResult::new(
        8,
        "disk-oracle",
        passed,
        format!("sup|h - cap| = {sup:.3e}; h(1) = {rim:.7} vs {rim_exact:.7} (err {rim_err:.2e})"),
    ))
}

/// Check 9 — improved decay of the nonlinear solutions: radial exponent of
/// the physical graph near 2 at every tau, gamma = 1 norm uniform across the
/// sweep, and the lower-mode norm of the pullback remainder scaling like tau
/// within a factor 3.
pub fn check_improved_decay() -> Result<CheckResult> {
    let grid = SweepGrid::default();
    let dp = grid.disk()?;
    let band = CutoffBand::default();
    let delta = 1e-3;
    let mut exponents = Vec::new();
    let mut norms_one = Vec::new();
    let mut lower_over_tau = Vec::new();
    for tau in [0.2, 0.1, 0.05] {
        let params = grid.neck(tau, 0.5)?;
        let f = BoundaryData::zeros(params);
        let report = improved_decay_experiment(params, delta, &f, dp, &band)?;
        exponents.push(report.fit.exponent);
        norms_one.push(report.norm_gamma_one);
        lower_over_tau.push(report.lower_norm_over_tau);
    }
    let exp_ok = exponents.iter().all(|e| (1.8..=2.2).contains(e));
    let spread = |v: &[f64]| {
        let max = v.iter().cloned().fold(f64::MIN, f64::max);
        let min = v.iter().cloned().fold(f64::MAX, f64::min);
        max / min
    };
    let norm_spread = spread(&norms_one);
    let lower_spread = spread(&lower_over_tau);
    let passed = exp_ok && norm_spread < 3.0 && lower_spread < 3.0;
    Ok(CheckResult::new(
        9,
        "improved-decay",
        passed,
        format!(
            "exponents = [{:.3}, {:.3}, {:.3}]; gamma-1 norm spread {:.2}; lower/tau spread {:.2}",
            exponents[0], exponents[1], exponents[2], norm_spread, lower_spread
        ),
    ))
}

/// Check 10 — the neck solutions approach the cutoff pullback of the disk
/// solutions at a rate linear in tau (log-log slope in [0.8, 1.2]).
pub fn check_continuity() -> Result<CheckResult> {
    let grid = SweepGrid::default();
    let report = tau_continuity_experiment(
        1e-3,
        |_| 0.0,
        |_| 0.0,
        &[0.1, 0.05, 0.025],
        0.5,
        &grid,
        &CutoffBand::default(),
    )?;
    let slope = report.fit.exponent;
    let passed = (0.8..=1.2).contains(&slope);
    let distances: Vec<String> = report
        .rows
        .iter()
        .map(|r| format!("{:.3e}", r.distance))
        .collect();
    Ok(CheckResult::new(
        10,
        "tau-continuity",
        passed,
        format!(
            "slope = {slope:.3} (r^2 {:.4}); distances = [{}]",
            report.fit.r_squared,
            distances.join(", ")
        ),
    ))
}

/// Check 11 — the finite-difference tau-derivative approaches the disk-side
/// derivative on the annulus: the sup distance decreases monotonically over
/// the tau0-sweep, and at the smallest tau0 it sits within 10x the sweep's
/// own extrapolation error estimate |d2 - d3| / 3. (The difference-quotient
/// truncation is orders of magnitude smaller than the sweep terms — each
/// row's Richardson column confirms it — so the sweep estimate is the
/// meaningful one.)
pub fn check_derivative_limit() -> Result<CheckResult> {
    let grid = SweepGrid::default();
    let rows = derivative_comparison(
        5e-3,
        |_| 0.0,
        |_| 0.0,
        &[0.1, 0.05, 0.025],
        0.5,
        &grid,
        &DerivativeComparisonOptions::default(),
    )?;
    let d: Vec<f64> = rows.iter().map(|r| r.annulus_sup).collect();
    let monotone = d[0] > d[1] && d[1] > d[2];
    let sweep_estimate = (d[1] - d[2]).abs() / 3.0;
    let within = d[2] <= 10.0 * sweep_estimate;
    let passed = monotone && within;
    Ok(CheckResult::new(
        11,
        "derivative-limit",
        passed,
        format!(
            "annulus sup = [{:.3e}, {:.3e}, {:.3e}], sweep estimate {:.3e} (ratio {:.2}), quotient truncation [{:.1e}, {:.1e}, {:.1e}]",
            d[0],
            d[1],
            d[2],
            sweep_estimate,
            d[2] / sweep_estimate,
            rows[0].richardson,
            rows[1].richardson,
            rows[2].richardson
        ),
    ))
}

/// Run the whole suite in order. A check that errors internally is reported
/// as failed with the error text; the remaining checks still run.
pub fn run_all() -> Vec<CheckResult> {
    type Check = fn() -> Result<CheckResult>;
    let checks: [(usize, &'static str, Check); 11] = [
        (1, "minimality", check_minimality),
        (2, "jacobi-kernel", check_jacobi_kernel),
        (3, "linearization", check_linearization),
        (4, "mode-preservation", check_mode_preservation),
        (5, "singular-length", check_singular_length),
        (6, "uniform-invertibility", check_uniform_invertibility),
        (7, "nonlinear-solve", check_nonlinear_solve),
        (8, "disk-oracle", check_disk_oracle),
        (9, "improved-decay", check_improved_decay),
        (10, "tau-continuity", check_continuity),
        (11, "derivative-limit", check_derivative_limit),
    ];
    checks
        .iter()
        .map(|(index, name, f)| match f() {
            Ok(result) => result,
            Err(e) => CheckResult::new(*index, name, false, format!("errored: {e}")),
        })
        .collect()
}
