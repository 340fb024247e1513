//! Symmetric tridiagonal eigenvalue tools for the finite-difference
//! Hamiltonians used throughout the crate.
//!
//! All matrices arising here have a constant off-diagonal (`-1/h²`), so the
//! routines take the off-diagonal as a scalar. The bottom eigenvalue is
//! found by bisection on the Sturm sequence (deterministic, no iteration
//! randomness); the eigenvector follows from inverse iteration with a
//! Thomas solve.

/// Number of eigenvalues strictly below `x`, by counting negative pivots of
/// the LDLᵀ factorization of `T - x I`.
pub fn sturm_count(diag: &[f64], off: f64, x: f64) -> usize {
    let n = diag.len();
    if n == 0 {
        return 0;
    }
    // Guard tiny pivots so off²/q cannot overflow; the perturbation is far
    // below bisection resolution.
    let scale = diag.iter().fold(0.0f64, |m, d| m.max(d.abs())) + 2.0 * off.abs() + x.abs() + 1.0;
    let guard = 1e-20 * scale;
    let off2 = off * off;

    let mut count = 0usize;
    let mut q = diag[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for &d in &diag[1..] {
        let q_safe = if q.abs() < guard {
            if q >= 0.0 {
                guard
            } else {
                -guard
            }
        } else {
            q
        };
        q = (d - x) - off2 / q_safe;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Smallest eigenvalue of the symmetric tridiagonal matrix with diagonal
/// `diag` and constant off-diagonal `off`, by Sturm bisection to machine
/// precision.
pub fn bottom_eigenvalue(diag: &[f64], off: f64) -> f64 {
    assert!(!diag.is_empty());
    let mut lo = f64::MAX;
    let mut hi = f64::MIN;
    let n = diag.len();
    for (i, &d) in diag.iter().enumerate() {
        let r = if i == 0 || i == n - 1 {
            off.abs() * if n == 1 { 0.0 } else { 1.0 }
        } else {
            2.0 * off.abs()
        };
        lo = lo.min(d - r);
        hi = hi.max(d + r);
    }
    lo -= 1.0;
    hi += 1.0;

    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo) < 2.0 * f64::EPSILON * mid.abs().max(1.0) {
            break;
        }
        if sturm_count(diag, off, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Solve `(T - shift) x = b` in place by the Thomas algorithm, with a pivot
/// guard for the near-singular systems of inverse iteration.
pub fn shifted_solve(diag: &[f64], off: f64, shift: f64, b: &mut [f64]) {
    let n = diag.len();
    assert_eq!(b.len(), n);
    let scale = diag.iter().fold(0.0f64, |m, d| m.max(d.abs())) + 2.0 * off.abs() + shift.abs() + 1.0;
    let guard = 1e-300f64.max(1e-18 * scale * f64::EPSILON);

    let mut c_prime = vec![0.0; n];
    let mut piv = diag[0] - shift;
    if piv.abs() < guard {
        piv = if piv >= 0.0 { guard } else { -guard };
    }
    c_prime[0] = off / piv;
    b[0] /= piv;
    for i in 1..n {
        let mut denom = (diag[i] - shift) - off * c_prime[i - 1];
        if denom.abs() < guard {
            denom = if denom >= 0.0 { guard } else { -guard };
        }
        c_prime[i] = off / denom;
        b[i] = (b[i] - off * b[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        b[i] -= c_prime[i] * b[i + 1];
    }
}

/// Apply `y = (T - shift) x`.
pub fn apply_shifted(diag: &[f64], off: f64, shift: f64, x: &[f64], y: &mut [f64]) {
    let n = diag.len();
    for i in 0..n {
        let mut v = (diag[i] - shift) * x[i];
        if i > 0 {
            v += off * x[i - 1];
        }
        if i + 1 < n {
            v += off * x[i + 1];
        }
        y[i] = v;
    }
}

/// Eigenvector for the (already computed) eigenvalue `eig` by inverse
/// iteration from the all-ones vector. Returns the vector with unit
/// Euclidean norm and its residual `‖(T - eig) x‖₂`.
pub fn inverse_iteration(diag: &[f64], off: f64, eig: f64) -> (Vec<f64>, f64) {
    let n = diag.len();
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut work = vec![0.0; n];
    let mut best_res = f64::MAX;
    let mut best = x.clone();

    for _ in 0..25 {
        shifted_solve(diag, off, eig, &mut x);
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            break;
        }
        for v in x.iter_mut() {
            *v /= norm;
        }
        apply_shifted(diag, off, eig, &x, &mut work);
        let res = work.iter().map(|v| v * v).sum::<f64>().sqrt();
        if res < best_res {
            best_res = res;
            best.copy_from_slice(&x);
        }
        if res <= 1e-13 {
            break;
        }
    }
    (best, best_res)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sturm_count_2x2() {
        // [[1, -1], [-1, 3]] has eigenvalues 2 ± √2.
        let d = [1.0, 3.0];
        assert_eq!(sturm_count(&d, -1.0, 0.0), 0);
        assert_eq!(sturm_count(&d, -1.0, 1.0), 1);
        assert_eq!(sturm_count(&d, -1.0, 4.0), 2);
    }

    #[test]
    fn free_laplacian_bottom() {
        // -D² on n interior points: eigenvalues (2 - 2 cos(kπ/(n+1)))/h².
        let n = 200;
        let h = 0.1;
        let d = vec![2.0 / (h * h); n];
        let e = bottom_eigenvalue(&d, -1.0 / (h * h));
        let exact = (2.0 - 2.0 * (std::f64::consts::PI / (n as f64 + 1.0)).cos()) / (h * h);
        assert!((e - exact).abs() < 1e-10 * exact.max(1.0));
    }

    #[test]
    fn inverse_iteration_recovers_sine_mode() {
        let n = 101;
        let h = 1.0 / (n as f64 + 1.0);
        let d = vec![2.0 / (h * h); n];
        let off = -1.0 / (h * h);
        let e = bottom_eigenvalue(&d, off);
        let (x, res) = inverse_iteration(&d, off, e);
        assert!(res < 1e-8, "residual {res}");
        // Ground mode of the discrete Dirichlet Laplacian is sin(π x).
        let mut max_err = 0.0f64;
        let amp = (2.0 * h).sqrt(); // unit ℓ² norm
        let sign = x[n / 2].signum();
        for (i, &xi) in x.iter().enumerate() {
            let s = (i as f64 + 1.0) * h;
            let exact = amp * (std::f64::consts::PI * s).sin();
            max_err = max_err.max((sign * xi - exact).abs());
        }
        assert!(max_err < 1e-6, "max pointwise error {max_err}");
    }

    #[test]
    fn shift_identity_to_machine_precision() {
        let n = 400;
        let h = 0.05;
        let mut d = vec![0.0; n];
        for (i, di) in d.iter_mut().enumerate() {
            let s = -10.0 + (i as f64 + 1.0) * h;
            *di = 2.0 / (h * h) - 2.0 / s.cosh().powi(2);
        }
        let off = -1.0 / (h * h);
        let e0 = bottom_eigenvalue(&d, off);
        let shift = 7.25;
        let shifted: Vec<f64> = d.iter().map(|&v| v + shift).collect();
        let e1 = bottom_eigenvalue(&shifted, off);
        assert!((e1 - (e0 + shift)).abs() < 1e-12);
    }
}
