//! Small dense linear algebra: Gaussian elimination and the matrix
//! exponential. Row-major square matrices held in flat slices; only the
//! sizes this crate needs (up to 6x6) are exercised.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LinalgError {
    #[error("singular matrix (pivot {pivot:.3e} at column {col})")]
    Singular { col: usize, pivot: f64 },
}

/// Solves `a x = b` in place by Gaussian elimination with partial pivoting.
/// `a` is n*n row-major and is destroyed; `b` becomes the solution.
pub fn solve_in_place(a: &mut [f64], b: &mut [f64], n: usize) -> Result<(), LinalgError> {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n);
    for col in 0..n {
        let mut piv = col;
        let mut best = a[col * n + col].abs();
        for r in col + 1..n {
            let v = a[r * n + col].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best < 1e-300 {
            return Err(LinalgError::Singular { col, pivot: best });
        }
        if piv != col {
            for c in 0..n {
                a.swap(col * n + c, piv * n + c);
            }
            b.swap(col, piv);
        }
        let d = a[col * n + col];
        for r in col + 1..n {
            let f = a[r * n + col] / d;
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                a[r * n + c] -= f * a[col * n + c];
            }
            b[r] -= f * b[col];
        }
    }
    for col in (0..n).rev() {
        let mut s = b[col];
        for c in col + 1..n {
            s -= a[col * n + c] * b[c];
        }
        b[col] = s / a[col * n + col];
    }
    Ok(())
}

fn mat_mul(n: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    out
}

fn identity(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}

fn one_norm(n: usize, a: &[f64]) -> f64 {
    (0..n)
        .map(|j| (0..n).map(|i| a[i * n + j].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling-and-squaring with a Taylor series summed
/// to machine precision at the scaled-down norm.
pub fn expm(a: &[f64], n: usize) -> Vec<f64> {
    debug_assert_eq!(a.len(), n * n);
    let norm = one_norm(n, a);
    let mut s = 0u32;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        s += 1;
        scale *= 0.5;
    }
    let x: Vec<f64> = a.iter().map(|v| v * scale).collect();
    // Taylor: I + X + X^2/2! + ... ; at ||X|| <= 0.5 this converges fast
    let mut result = identity(n);
    let mut term = identity(n);
    for k in 1..=30 {
        term = mat_mul(n, &term, &x);
        let f = 1.0 / (k as f64);
        for v in term.iter_mut() {
            *v *= f;
        }
        for (r, t) in result.iter_mut().zip(term.iter()) {
            *r += t;
        }
        if one_norm(n, &term) < 1e-300 {
            break;
        }
    }
    for _ in 0..s {
        result = mat_mul(n, &result, &result);
    }
    result
}
