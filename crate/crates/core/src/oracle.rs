//! Reference eigenvalues independent of the Jacobi solver: Householder
//! reduction to tridiagonal form, then bisection on Sturm sequence counts.

/// Householder reduction of a symmetric matrix. Returns the diagonal and
/// the sub-diagonal (`off[k]` couples rows k and k + 1).
pub fn tridiagonalize(a: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    for k in 0..n.saturating_sub(2) {
        let alpha_sq: f64 = (k + 1..n).map(|i| m[i][k] * m[i][k]).sum();
        if alpha_sq == 0.0 {
            continue;
        }
        let alpha = -m[k + 1][k].signum() * alpha_sq.sqrt();
        let mut v = vec![0.0; n];
        v[k + 1] = m[k + 1][k] - alpha;
        for i in k + 2..n {
            v[i] = m[i][k];
        }
        let v_sq: f64 = v.iter().map(|x| x * x).sum();
        if v_sq == 0.0 {
            continue;
        }
        // M ← P M P with P = I − 2vvᵀ/(vᵀv)
        let p: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| m[i][j] * v[j]).sum::<f64>() * 2.0 / v_sq)
            .collect();
        let kappa: f64 = (0..n).map(|i| v[i] * p[i]).sum::<f64>() / v_sq;
        let q: Vec<f64> = (0..n).map(|i| p[i] - kappa * v[i]).collect();
        for i in 0..n {
            for j in 0..n {
                m[i][j] -= v[i] * q[j] + q[i] * v[j];
            }
        }
    }
    let diag = (0..n).map(|i| m[i][i]).collect();
    let off = (0..n.saturating_sub(1))
        .map(|i| 0.5 * (m[i + 1][i] + m[i][i + 1]))
        .collect();
    (diag, off)
}

/// Number of eigenvalues of the tridiagonal matrix strictly below `x`,
/// from the signs of the ratios of successive leading principal minors of
/// T − xI.
pub fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let tiny = f64::MIN_POSITIVE / f64::EPSILON;
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..diag.len() {
        let coupling = if i == 0 {
            0.0
        } else {
            off[i - 1] * off[i - 1] / q
        };
        q = diag[i] - x - coupling;
        if q == 0.0 {
            q = -tiny;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// All eigenvalues in ascending order, each bisected to adjacent floats.
pub fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        let r =
            if i > 0 { off[i - 1].abs() } else { 0.0 } + if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    let pad = 1e-12
        * (hi - lo)
            .abs()
            .max(lo.abs())
            .max(hi.abs())
            .max(f64::MIN_POSITIVE);
    let (lo, hi) = (lo - pad, hi + pad);
    (0..n)
        .map(|k| {
            // smallest x with more than k eigenvalues at or below x
            let (mut a, mut b) = (lo, hi);
            loop {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break b;
                }
                if sturm_count(diag, off, mid) > k {
                    b = mid;
                } else {
                    a = mid;
                }
            }
        })
        .collect()
}

/// Ascending eigenvalues of a symmetric matrix.
pub fn symmetric_eigenvalues<const N: usize>(h: &[[f64; N]; N]) -> [f64; N] {
    let rows: Vec<Vec<f64>> = h.iter().map(|r| r.to_vec()).collect();
    let (d, e) = tridiagonalize(&rows);
    let vals = tridiagonal_eigenvalues(&d, &e);
    std::array::from_fn(|k| vals[k])
}

/// Eigenvalues of [[a, b], [b, c]], lower first.
pub fn two_by_two(a: f64, b: f64, c: f64) -> (f64, f64) {
    let mean = 0.5 * (a + c);
    let r = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    (mean - r, mean + r)
}
