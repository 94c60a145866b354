//! Independent reference computations used by the self-test.

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col];
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
        }
    }
    det
}

fn char_poly(m: &[Vec<f64>], lambda: f64) -> f64 {
    let shifted = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, v)| if i == j { v - lambda } else { *v })
                .collect()
        })
        .collect();
    determinant(shifted)
}

/// Largest real root of `det(M − λI)`, found by scanning down from an upper
/// bound on the spectral radius and bisecting the first sign change.
pub fn largest_real_eigenvalue(m: &[Vec<f64>]) -> f64 {
    let bound = m
        .iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
        + 1.0;
    let sign_above = char_poly(m, bound).signum();
    let steps = 20_000;
    let h = 2.0 * bound / steps as f64;
    let mut hi = bound;
    let mut lo = bound;
    for k in 1..=steps {
        lo = bound - h * k as f64;
        let v = char_poly(m, lo);
        if v == 0.0 {
            return lo;
        }
        if v.signum() != sign_above {
            break;
        }
        hi = lo;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if char_poly(m, mid).signum() == sign_above {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}
