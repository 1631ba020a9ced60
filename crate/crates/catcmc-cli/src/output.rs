//! Report and table writers.
//!
//! Reports are versioned JSON (`schema = 1`), written pretty-printed with a
//! trailing newline; key order is fixed by construction order, and nothing
//! time- or machine-dependent is ever included, so identical configs produce
//! byte-identical reports. Tables are comma-separated with one header row
//! and LF line endings; floats are written with Rust's shortest-roundtrip
//! formatting.

use std::io;
use std::path::{Path, PathBuf};

/// Assemble the versioned report document.
pub fn report_document(
    command: &str,
    config: serde_json::Value,
    warnings: &[String],
    results: serde_json::Value,
) -> serde_json::Value {
    serde_json::json!({
        "schema": 1,
        "command": command,
        "config": config,
        "warnings": warnings,
        "results": results,
    })
}

/// Write `report.json` into the output directory.
pub fn write_report(out_dir: &Path, report: &serde_json::Value) -> io::Result<PathBuf> {
    std::fs::create_dir_all(out_dir)?;
    let path = out_dir.join("report.json");
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    std::fs::write(&path, text)?;
    Ok(path)
}

/// Write a comma-separated table with one header row and LF endings.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> io::Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut text = String::new();
    text.push_str(&header.join(","));
    text.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        text.push_str(&row.join(","));
        text.push('\n');
    }
    std::fs::write(path, text)
}

/// Shortest-roundtrip decimal form of a float (deterministic).
pub fn fmt(x: f64) -> String {
    format!("{x}")
}

/// Magnitudes of the angular Fourier coefficients `k = 0 ..= n/2` of one
/// ring of samples: `|c_k|` with `c_k = (1/n) sum_i v_i e^{-i k theta_i}`.
pub fn ring_mode_magnitudes(ring: &[f64], k_max: usize) -> Vec<f64> {
    let n = ring.len();
    (0..=k_max)
        .map(|k| {
            let mut re = 0.0f64;
            let mut im = 0.0f64;
            for (i, v) in ring.iter().enumerate() {
                let phase = std::f64::consts::TAU * (k * i) as f64 / n as f64;
                re += v * phase.cos();
                im -= v * phase.sin();
            }
            (re * re + im * im).sqrt() / n as f64
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_modes_recover_a_pure_cosine() {
        let n = 16;
        let ring: Vec<f64> = (0..n)
            .map(|i| 0.5 * (3.0 * std::f64::consts::TAU * i as f64 / n as f64).cos())
            .collect();
        let mags = ring_mode_magnitudes(&ring, n / 2);
        // a real cosine of amplitude A puts A/2 at +k (and A/2 at -k).
        assert!((mags[3] - 0.25).abs() < 1e-12);
        for (k, m) in mags.iter().enumerate() {
            if k != 3 {
                assert!(*m < 1e-12, "mode {k} magnitude {m}");
            }
        }
    }

    #[test]
    fn csv_is_lf_and_comma() {
        let dir = std::env::temp_dir().join("catcmc-csv-test");
        let path = dir.join("t.csv");
        write_csv(&path, &["a", "b"], &[vec!["1".into(), "2".into()]]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "a,b\n1,2\n");
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn float_formatting_roundtrips() {
        for &x in &[0.1, 1e-9, 2.549e-4, -3.0, 1.1996786402577337] {
            let s = fmt(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
    }
}
