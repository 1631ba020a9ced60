//! Shared tridiagonal solver: forward elimination / back substitution with a
//! pivot-collapse signal and one iterative-refinement pass.
//!
//! The systems solved here are small (hundreds of rows) and either diagonally
//! dominant or mildly indefinite; the refinement pass keeps the relative
//! residual near machine precision in the indefinite case without pivoting.

/// Solve a tridiagonal system with sub/super diagonals `sub`/`sup` (length
/// `n - 1`) and diagonal `diag` (length `n`). Returns `None` when a pivot
/// falls below `1e-12` of the diagonal scale.
pub(crate) fn solve(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Option<Vec<f64>> {
    let first = pass(sub, diag, sup, rhs)?;
    // one refinement pass against the exact stencil
    let n = diag.len();
    let mut residual = vec![0.0; n];
    for j in 0..n {
        let mut ax = diag[j] * first[j];
        if j > 0 {
            ax += sub[j - 1] * first[j - 1];
        }
        if j + 1 < n {
            ax += sup[j] * first[j + 1];
        }
        residual[j] = rhs[j] - ax;
    }
    let correction = pass(sub, diag, sup, &residual)?;
    Some((0..n).map(|j| first[j] + correction[j]).collect())
}

fn pass(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = diag.len();
    debug_assert!(sub.len() == n - 1 && sup.len() == n - 1 && rhs.len() == n);
    let scale = diag.iter().fold(0.0f64, |m, d| m.max(d.abs()))
        + sub
            .iter()
            .chain(sup.iter())
            .fold(0.0f64, |m, d| m.max(d.abs()));
    let mut piv = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut p = diag[0];
    if p.abs() < 1e-12 * scale {
        return None;
    }
    piv[0] = p;
    y[0] = rhs[0];
    for j in 1..n {
        let m = sub[j - 1] / piv[j - 1];
        p = diag[j] - m * sup[j - 1];
        if p.abs() < 1e-12 * scale {
            return None;
        }
        piv[j] = p;
        y[j] = rhs[j] - m * y[j - 1];
    }
    let mut u = vec![0.0; n];
    u[n - 1] = y[n - 1] / piv[n - 1];
    for j in (0..n - 1).rev() {
        u[j] = (y[j] - sup[j] * u[j + 1]) / piv[j];
    }
    Some(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_diagonally_dominant_system() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 200;
        let sub: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let sup: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let diag: Vec<f64> = (0..n).map(|_| rng.gen_range(3.0..4.0)).collect();
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut rhs = vec![0.0; n];
        for j in 0..n {
            rhs[j] = diag[j] * x[j]
                + if j > 0 { sub[j - 1] * x[j - 1] } else { 0.0 }
                + if j + 1 < n { sup[j] * x[j + 1] } else { 0.0 };
        }
        let got = solve(&sub, &diag, &sup, &rhs).unwrap();
        for j in 0..n {
            assert_abs_diff_eq!(got[j], x[j], epsilon = 1e-12);
        }
    }

    #[test]
    fn singular_system_is_signalled() {
        // 2x2 with zero determinant
        let sub = [1.0];
        let sup = [1.0];
        let diag = [1.0, 1.0];
        let rhs = [1.0, 1.0];
        assert!(solve(&sub, &diag, &sup, &rhs).is_none());
    }
}
