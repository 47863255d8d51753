#![allow(dead_code)]

//! Test-only oracles, independent of the library's solvers.

/// Gaussian elimination with partial pivoting on a dense row-major system.
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        let p = a[col][col];
        assert!(p.abs() > 1e-300, "singular oracle system");
        for row in col + 1..n {
            let f = a[row][col] / p;
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

/// Solve `(AᵀA + GᵀG) x = Aᵀy` by forming the normal equations explicitly.
pub fn normal_equations(a: &[Vec<f64>], y: &[f64], g: &[Vec<f64>]) -> Vec<f64> {
    let n = a[0].len();
    let mut m = vec![vec![0.0; n]; n];
    let mut rhs = vec![0.0; n];
    for (row, yi) in a.iter().zip(y) {
        for i in 0..n {
            rhs[i] += row[i] * yi;
            for j in 0..n {
                m[i][j] += row[i] * row[j];
            }
        }
    }
    for row in g {
        for i in 0..n {
            for j in 0..n {
                m[i][j] += row[i] * row[j];
            }
        }
    }
    solve_dense(m, rhs)
}

pub fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

pub fn to_rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}
