//! Cyclic Jacobi eigensolver for small real symmetric matrices.

use crate::error::{Error, Result};

/// Sweeps allowed before giving up. Small symmetric matrices converge in
/// well under ten.
pub const MAX_SWEEPS: usize = 100;

/// Off-diagonal Frobenius norm, relative to ‖H‖_F, accepted as diagonal.
pub const CONVERGENCE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenDecomposition<const N: usize> {
    /// Ascending.
    pub eigenvalues: [f64; N],
    /// `eigenvectors[k]` is the unit eigenvector of `eigenvalues[k]`.
    pub eigenvectors: [[f64; N]; N],
}

impl<const N: usize> EigenDecomposition<N> {
    /// V Λ Vᵀ.
    pub fn reconstruct(&self) -> [[f64; N]; N] {
        let mut out = [[0.0; N]; N];
        for (lambda, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            for i in 0..N {
                for j in 0..N {
                    out[i][j] += lambda * v[i] * v[j];
                }
            }
        }
        out
    }
}

pub fn frobenius<const N: usize>(m: &[[f64; N]; N]) -> f64 {
    m.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn off_diagonal_norm<const N: usize>(m: &[[f64; N]; N]) -> f64 {
    let mut s = 0.0;
    for (i, row) in m.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            if i != j {
                s += x * x;
            }
        }
    }
    s.sqrt()
}

/// Diagonalizes a real symmetric matrix by cyclic Jacobi rotations in
/// row-major (p, q) order.
///
/// Off-diagonal entries too small to change either adjacent diagonal entry
/// are set to zero instead of rotated, so iteration continues to an exactly
/// diagonal matrix.
pub fn eigensolve_symmetric<const N: usize>(h: &[[f64; N]; N]) -> Result<EigenDecomposition<N>> {
    let norm = frobenius(h);
    if !norm.is_finite() {
        return Err(Error::domain("matrix has non-finite entries"));
    }
    for i in 0..N {
        for j in (i + 1)..N {
            if (h[i][j] - h[j][i]).abs() > 1e-12 * norm {
                return Err(Error::domain(format!(
                    "matrix is not symmetric at ({i}, {j}): {} vs {}",
                    h[i][j], h[j][i]
                )));
            }
        }
    }

    // work on the exactly symmetrized copy
    let mut a = *h;
    for i in 0..N {
        for j in (i + 1)..N {
            let m = 0.5 * (h[i][j] + h[j][i]);
            a[i][j] = m;
            a[j][i] = m;
        }
    }
    let mut v = [[0.0; N]; N];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }

    let mut sweeps = 0;
    while off_diagonal_norm(&a) != 0.0 {
        if sweeps == MAX_SWEEPS {
            let off_norm = off_diagonal_norm(&a);
            if off_norm <= CONVERGENCE * norm {
                break;
            }
            return Err(Error::EigenNonConvergence { sweeps, off_norm });
        }
        sweeps += 1;
        for p in 0..N {
            for q in (p + 1)..N {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: [usize; N] = std::array::from_fn(|i| i);
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    Ok(EigenDecomposition {
        eigenvalues: std::array::from_fn(|k| a[order[k]][order[k]]),
        eigenvectors: std::array::from_fn(|k| std::array::from_fn(|i| v[i][order[k]])),
    })
}

fn rotate<const N: usize>(a: &mut [[f64; N]; N], v: &mut [[f64; N]; N], p: usize, q: usize) {
    let apq = a[p][q];
    if apq == 0.0 {
        return;
    }
    let (app, aqq) = (a[p][p], a[q][q]);
    let g = 100.0 * apq.abs();
    if app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
        a[p][q] = 0.0;
        a[q][p] = 0.0;
        return;
    }

    let theta = (aqq - app) / (2.0 * apq);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        let t = 1.0 / (theta.abs() + (theta * theta + 1.0).sqrt());
        if theta < 0.0 {
            -t
        } else {
            t
        }
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let tau = s / (1.0 + c);

    a[p][p] = app - t * apq;
    a[q][q] = aqq + t * apq;
    a[p][q] = 0.0;
    a[q][p] = 0.0;
    for r in 0..N {
        if r == p || r == q {
            continue;
        }
        let (arp, arq) = (a[r][p], a[r][q]);
        let new_rp = arp - s * (arq + tau * arp);
        let new_rq = arq + s * (arp - tau * arq);
        a[r][p] = new_rp;
        a[p][r] = new_rp;
        a[r][q] = new_rq;
        a[q][r] = new_rq;
    }
    for row in v.iter_mut() {
        let (vp, vq) = (row[p], row[q]);
        row[p] = vp - s * (vq + tau * vp);
        row[q] = vq + s * (vp - tau * vq);
    }
}
