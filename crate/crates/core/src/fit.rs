//! Small dense least-squares fits used by the probes.

/// Least-squares coefficients for `y ≈ Σ_k c_k cols[k]`, plus the RMS residual.
/// Returns `None` for a singular system.
pub fn least_squares(cols: &[Vec<f64>], y: &[f64]) -> Option<(Vec<f64>, f64)> {
    let m = cols.len();
    let mut a = vec![vec![0.0; m + 1]; m];
    for i in 0..m {
        for j in 0..m {
            a[i][j] = cols[i].iter().zip(&cols[j]).map(|(x, z)| x * z).sum();
        }
        a[i][m] = cols[i].iter().zip(y).map(|(x, z)| x * z).sum();
    }
    for c in 0..m {
        let piv = (c..m).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[piv][c].abs() < 1e-300 {
            return None;
        }
        a.swap(c, piv);
        for r in 0..m {
            if r != c {
                let f = a[r][c] / a[c][c];
                for k in c..=m {
                    a[r][k] -= f * a[c][k];
                }
            }
        }
    }
    let coef: Vec<f64> = (0..m).map(|i| a[i][m] / a[i][i]).collect();
    let rss: f64 = y
        .iter()
        .enumerate()
        .map(|(r, yr)| {
            let pred: f64 = (0..m).map(|k| coef[k] * cols[k][r]).sum();
            (yr - pred).powi(2)
        })
        .sum();
    Some((coef, (rss / y.len() as f64).sqrt()))
}

/// Slope and intercept of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let ones = vec![1.0; x.len()];
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let (c, _) = least_squares(&[ones, lx], &ly)?;
    Some((c[1], c[0]))
}
