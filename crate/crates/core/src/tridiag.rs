//! Symmetric tridiagonal kernels with a constant off-diagonal: the linear
//! solve used by every Crank–Nicolson step and the top eigenpair used by the
//! ground-state functional.

/// Solves `T y = rhs` in place, where `T` has diagonal `diag` and constant
/// off-diagonal `off`. Returns the index of a vanishing pivot on failure.
pub fn solve_in_place(diag: &[f64], off: f64, rhs: &mut [f64], scratch: &mut Vec<f64>) -> Result<(), usize> {
    let m = diag.len();
    debug_assert_eq!(rhs.len(), m);
    if m == 0 {
        return Ok(());
    }
    scratch.clear();
    scratch.resize(m, 0.0);
    let mut pivot = diag[0];
    if pivot == 0.0 || !pivot.is_finite() {
        return Err(0);
    }
    rhs[0] /= pivot;
    for i in 1..m {
        let c = off / pivot;
        scratch[i] = c;
        pivot = diag[i] - off * c;
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(i);
        }
        rhs[i] = (rhs[i] - off * rhs[i - 1]) / pivot;
    }
    for i in (0..m - 1).rev() {
        rhs[i] -= scratch[i + 1] * rhs[i + 1];
    }
    Ok(())
}

/// `y = T x` for the same matrix layout.
pub fn mul(diag: &[f64], off: f64, x: &[f64], y: &mut [f64]) {
    let m = diag.len();
    for i in 0..m {
        let mut s = diag[i] * x[i];
        if i > 0 {
            s += off * x[i - 1];
        }
        if i + 1 < m {
            s += off * x[i + 1];
        }
        y[i] = s;
    }
}

/// Number of eigenvalues strictly below `x` (Sturm sequence count).
pub fn count_below(diag: &[f64], off: f64, x: f64) -> usize {
    let off2 = off * off;
    let tiny = f64::MIN_POSITIVE.sqrt();
    let mut count = 0;
    let mut q = 1.0;
    for (i, &d) in diag.iter().enumerate() {
        q = if i == 0 { d - x } else { d - x - off2 / q };
        if q == 0.0 {
            q = -tiny;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Largest eigenvalue by Sturm bisection, to roughly machine precision.
pub fn largest_eigenvalue(diag: &[f64], off: f64) -> f64 {
    let m = diag.len();
    let r = 2.0 * off.abs();
    let mut lo = diag.iter().fold(f64::INFINITY, |a, &d| a.min(d - r));
    let mut hi = diag.iter().fold(f64::NEG_INFINITY, |a, &d| a.max(d + r));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count_below(diag, off, mid) == m {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Eigenvector for an eigenvalue `lambda` known to high accuracy, by inverse
/// iteration shifted just above it. Returns the vector (unit Euclidean norm,
/// nonnegative sum) and the final residual `||T v - lambda v||`.
pub fn eigenvector(diag: &[f64], off: f64, lambda: f64, max_iter: usize) -> (Vec<f64>, f64) {
    let m = diag.len();
    let scale = diag.iter().fold(off.abs(), |a, d| a.max(d.abs())).max(1.0);
    let mut shift = lambda + 1e-11 * scale;
    let mut v = vec![1.0 / (m as f64).sqrt(); m];
    let mut scratch = Vec::with_capacity(m);
    let mut shifted: Vec<f64> = diag.iter().map(|d| d - shift).collect();
    let mut tv = vec![0.0; m];
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter {
        let mut y = v.clone();
        if solve_in_place(&shifted, off, &mut y, &mut scratch).is_err() {
            shift += 1e-9 * scale;
            shifted = diag.iter().map(|d| d - shift).collect();
            continue;
        }
        let norm = y.iter().map(|a| a * a).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            break;
        }
        let sign = if y.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
        for (vi, yi) in v.iter_mut().zip(&y) {
            *vi = sign * yi / norm;
        }
        mul(diag, off, &v, &mut tv);
        residual = tv.iter().zip(&v).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt();
        if residual < 1e-12 * scale {
            break;
        }
    }
    (v, residual)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_matches_dense() {
        let diag = vec![4.0, 5.0, 6.0, 7.0];
        let off = -1.5;
        let x = vec![1.0, -2.0, 0.5, 3.0];
        let mut b = vec![0.0; 4];
        mul(&diag, off, &x, &mut b);
        let mut s = Vec::new();
        solve_in_place(&diag, off, &mut b, &mut s).unwrap();
        for (a, e) in b.iter().zip(&x) {
            assert!((a - e).abs() < 1e-13);
        }
    }

    #[test]
    fn laplacian_spectrum() {
        // Dirichlet second difference with m interior nodes: eigenvalues
        // -2 + 2 cos(k pi / (m + 1)).
        let m = 50;
        let diag = vec![-2.0; m];
        let top = largest_eigenvalue(&diag, 1.0);
        let exact = -2.0 + 2.0 * (std::f64::consts::PI / (m as f64 + 1.0)).cos();
        assert!((top - exact).abs() < 1e-13);
        let (v, res) = eigenvector(&diag, 1.0, top, 20);
        assert!(res < 1e-10);
        assert!(v.iter().all(|&a| a > 0.0));
        assert_eq!(count_below(&diag, 1.0, 0.0), m);
        assert_eq!(count_below(&diag, 1.0, -4.0), 0);
    }
}
