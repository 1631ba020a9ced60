//! Browser bindings for the neck/disk solvers and the spectral-gap sweep.
//!
//! Every export takes a JSON configuration string and returns a JSON result
//! string, so the JavaScript side needs nothing beyond `JSON.parse`. Failures
//! of any kind (malformed input, validation, solver errors) come back as
//! `{"error": "..."}` instead of an exception.
//!
//! The functions are plain Rust underneath and compile for native targets
//! too, which is how the crate's tests exercise them without a wasm runtime.

use serde::Deserialize;
use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

use catcmc::disk::{solve_cmc_disk, DiskBoundary};
use catcmc::experiments::SweepGrid;
use catcmc::linear::{
    locate_singular_length, min_singular_value, singular_length_exact, BoundaryData,
};
use catcmc::modes::to_spectrum;
use catcmc::nonlinear::solve_cmc_neck;

/// One angular mode of boundary data: wavenumber and cosine/sine amplitudes,
/// contributing `a cos(k x) + b sin(k x)`.
type Mode = (i64, f64, f64);

fn synthesize(modes: &[Mode], x: f64) -> f64 {
    modes
        .iter()
        .map(|&(k, a, b)| a * (k as f64 * x).cos() + b * (k as f64 * x).sin())
        .sum()
}

/// Reject wavenumbers the solvers do not accept: the lower modes (`k <= 1`)
/// are normalized away rather than prescribed, and anything at or above the
/// angular Nyquist limit cannot be represented.
fn check_modes(modes: &[Mode], n_angles: usize, label: &str) -> Result<(), String> {
    for &(k, _, _) in modes {
        if k <= 1 {
            return Err(format!(
                "{label}: mode k = {k} cannot be prescribed; the solver pins modes 0 and 1 \
                 through its waist normalization, so boundary data starts at k = 2"
            ));
        }
        if k as usize >= n_angles / 2 {
            return Err(format!(
                "{label}: mode k = {k} is not resolved by {n_angles} angular points \
                 (need k < {})",
                n_angles / 2
            ));
        }
    }
    Ok(())
}

fn wrap(out: Result<Value, String>) -> String {
    match out {
        Ok(v) => v.to_string(),
        Err(message) => json!({ "error": message }).to_string(),
    }
}

// ---------------------------------------------------------------------------
// Neck solve
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NeckConfig {
    tau: f64,
    delta: f64,
    #[serde(default = "default_n_x")]
    n_x: usize,
    #[serde(default)]
    modes_minus: Vec<Mode>,
    #[serde(default)]
    modes_plus: Vec<Mode>,
}

fn default_n_x() -> usize {
    16
}

fn run_solve_neck(config: &str) -> Result<Value, String> {
    let c: NeckConfig = serde_json::from_str(config).map_err(|e| format!("bad config: {e}"))?;
    if !(0.01..=0.9).contains(&c.tau) {
        return Err(format!("tau = {} must lie in [0.01, 0.9]", c.tau));
    }
    check_modes(&c.modes_minus, c.n_x, "modes_minus")?;
    check_modes(&c.modes_plus, c.n_x, "modes_plus")?;

    let grid = SweepGrid {
        n_x: c.n_x,
        ..SweepGrid::default()
    };
    let params = grid.neck(c.tau, 0.5).map_err(|e| e.to_string())?;
    let f = BoundaryData::from_fn(
        params,
        |x| synthesize(&c.modes_minus, x),
        |x| synthesize(&c.modes_plus, x),
    );
    let (u, report) = solve_cmc_neck(params, c.delta, &f).map_err(|e| e.to_string())?;

    let spec = to_spectrum(&u);
    let k_show: Vec<usize> = (1..=4.min(params.n_x / 2 - 1)).collect();
    let mut rows = Vec::with_capacity(params.n_s);
    for j in 0..params.n_s {
        let s = params.s(j);
        let mut sup = 0.0_f64;
        for i in 0..params.n_x {
            sup = sup.max(u.values[[i, j]].abs());
        }
        // signed axisymmetric part, then cosine-convention amplitudes k >= 1
        let u0 = spec.coeffs[[0, j]].re;
        let amps: Vec<f64> = k_show
            .iter()
            .map(|&k| 2.0 * spec.coeffs[[k, j]].norm())
            .collect();
        rows.push(json!({
            "s": s,
            "omega": c.tau * s.cosh(),
            "sup": sup,
            "u0": u0,
            "amps": amps,
        }));
    }

    Ok(json!({
        "tau": c.tau,
        "delta": c.delta,
        "half_length": params.l,
        "n_x": params.n_x,
        "n_s": params.n_s,
        "amp_wavenumbers": k_show,
        "report": {
            "iterations": report.iterations,
            "residual": report.residual,
            "spectral_tail": report.spectral_tail,
        },
        "rows": rows,
    }))
}

/// Solve the prescribed-curvature problem on one neck and return the latitude
/// profile of the solution (axisymmetric part, angular amplitudes, sup).
#[wasm_bindgen]
pub fn solve_neck(config: &str) -> String {
    wrap(run_solve_neck(config))
}

// ---------------------------------------------------------------------------
// Spectral-gap sweep
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GapConfig {
    #[serde(default = "default_lmin")]
    lmin: f64,
    #[serde(default = "default_lmax")]
    lmax: f64,
    #[serde(default = "default_steps")]
    steps: usize,
    #[serde(default = "default_gap_n_s")]
    n_s: usize,
}

fn default_lmin() -> f64 {
    0.5
}
fn default_lmax() -> f64 {
    3.0
}
fn default_steps() -> usize {
    160
}
fn default_gap_n_s() -> usize {
    401
}

fn run_gap_sweep(config: &str) -> Result<Value, String> {
    let c: GapConfig = serde_json::from_str(config).map_err(|e| format!("bad config: {e}"))?;
    if !(0.0 < c.lmin && c.lmin < c.lmax && c.lmax <= 6.0) {
        return Err(format!(
            "need 0 < lmin < lmax <= 6, got lmin = {}, lmax = {}",
            c.lmin, c.lmax
        ));
    }
    if !(2..=2000).contains(&c.steps) {
        return Err(format!("steps = {} must lie in [2, 2000]", c.steps));
    }
    if c.n_s < 9 || c.n_s.is_multiple_of(2) || c.n_s > 4001 {
        return Err(format!("n_s = {} must be odd, in [9, 4001]", c.n_s));
    }

    let mut rows = Vec::with_capacity(c.steps);
    let mut argmin = (f64::NAN, f64::INFINITY);
    for i in 0..c.steps {
        let l = c.lmin + (c.lmax - c.lmin) * i as f64 / (c.steps - 1) as f64;
        let s0 = min_singular_value(l, 0, c.n_s);
        let s1 = min_singular_value(l, 1, c.n_s);
        if s0 < argmin.1 {
            argmin = (l, s0);
        }
        rows.push(json!({ "l": l, "sigma0": s0, "sigma1": s1 }));
    }

    Ok(json!({
        "rows": rows,
        "argmin_l": argmin.0,
        "min_sigma0": argmin.1,
        "singular_length": locate_singular_length(c.n_s),
        "singular_length_exact": singular_length_exact(),
    }))
}

/// Sweep the truncation half-length and report the smallest singular values
/// of the axisymmetric and first-harmonic latitude operators, together with
/// the located root where the axisymmetric one degenerates.
#[wasm_bindgen]
pub fn gap_sweep(config: &str) -> String {
    wrap(run_gap_sweep(config))
}

// ---------------------------------------------------------------------------
// Disk solve
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DiskConfig {
    delta: f64,
    #[serde(default = "default_n_r")]
    n_r: usize,
    #[serde(default = "default_n_theta")]
    n_theta: usize,
    #[serde(default)]
    modes: Vec<Mode>,
}

fn default_n_r() -> usize {
    128
}
fn default_n_theta() -> usize {
    16
}

/// Cosine-convention angular amplitudes of one ring of samples: `|c_0|` would
/// be the mean; for `k >= 1` the amplitude of `a cos(k t) + b sin(k t)` is
/// recovered as `2 |c_k|` with `c_k = (1/n) sum v e^{-i k t}`.
fn ring_amplitudes(ring: &[f64], ks: &[usize]) -> Vec<f64> {
    let n = ring.len() as f64;
    ks.iter()
        .map(|&k| {
            let (mut re, mut im) = (0.0_f64, 0.0_f64);
            for (i, v) in ring.iter().enumerate() {
                let t = 2.0 * std::f64::consts::PI * (k as f64) * (i as f64) / n;
                re += v * t.cos();
                im -= v * t.sin();
            }
            2.0 * (re * re + im * im).sqrt() / n
        })
        .collect()
}

fn run_solve_disk(config: &str) -> Result<Value, String> {
    let c: DiskConfig = serde_json::from_str(config).map_err(|e| format!("bad config: {e}"))?;
    if c.n_r > 2048 {
        return Err(format!("n_r = {} exceeds the demo cap of 2048", c.n_r));
    }
    check_modes(&c.modes, c.n_theta, "modes")?;

    let f = DiskBoundary::from_fn(c.n_theta, |t| synthesize(&c.modes, t));
    let (h, report) = solve_cmc_disk(c.delta, &f, c.n_r, c.n_theta).map_err(|e| e.to_string())?;

    let k_show: Vec<usize> = (1..=4.min(c.n_theta / 2 - 1)).collect();
    let mut rows = Vec::with_capacity(c.n_r);
    for j in 0..c.n_r {
        let ring: Vec<f64> = (0..c.n_theta).map(|i| h.values[[i, j]]).collect();
        let sup = ring.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        let mean = ring.iter().sum::<f64>() / c.n_theta as f64;
        rows.push(json!({
            "r": h.params.r(j),
            "sup": sup,
            "h0": mean,
            "amps": ring_amplitudes(&ring, &k_show),
        }));
    }

    Ok(json!({
        "delta": c.delta,
        "n_r": c.n_r,
        "n_theta": c.n_theta,
        "amp_wavenumbers": k_show,
        "origin": h.origin,
        "report": {
            "iterations": report.iterations,
            "residual": report.residual,
            "converged": report.converged,
        },
        "rows": rows,
    }))
}

/// Solve the prescribed-curvature graph problem on the unit disk and return
/// the radial profile (ring means, angular amplitudes, sup per ring).
#[wasm_bindgen]
pub fn solve_disk(config: &str) -> String {
    wrap(run_solve_disk(config))
}
