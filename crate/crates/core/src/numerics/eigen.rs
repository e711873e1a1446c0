//! Symmetric eigendecomposition by cyclic Jacobi rotations.
//!
//! Sized for the small covariance matrices produced by the per-band PCA
//! (one row/column per first-layer wavelet, 20x20 at the default geometry).

use std::cmp::Ordering;

use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;
const RELATIVE_OFF_DIAGONAL_TOL: f64 = 1e-12;

/// Eigenpairs of a real symmetric matrix.
///
/// `eigenvalues` are non-increasing and column `i` of `eigenvectors` belongs
/// to `eigenvalues[i]`. Each eigenvector has its largest-magnitude component
/// positive (lowest index wins ties). Exactly equal eigenvalues are ordered by
/// their eigenvectors, lexicographically descending.
#[derive(Clone, Debug)]
pub struct SymmetricEigen {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Array2<f64>,
    pub sweeps: usize,
}

impl SymmetricEigen {
    /// `V Λ Vᵀ`.
    pub fn reconstruct(&self) -> Array2<f64> {
        let scaled = &self.eigenvectors * &ndarray::Array1::from(self.eigenvalues.clone());
        scaled.dot(&self.eigenvectors.t())
    }
}

/// Eigendecomposition of a symmetric matrix. The input is symmetrized as
/// `(C + Cᵀ) / 2` first.
pub fn eigh(c: ArrayView2<f64>) -> Result<SymmetricEigen> {
    let (rows, cols) = c.dim();
    if rows != cols {
        return Err(Error::NotSquare);
    }
    let n = rows;
    let mut a = Array2::from_shape_fn((n, n), |(i, j)| 0.5 * (c[[i, j]] + c[[j, i]]));
    let mut v = Array2::<f64>::eye(n);

    let frobenius = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let tol = RELATIVE_OFF_DIAGONAL_TOL * frobenius;

    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS && off_diagonal_norm(&a) > tol {
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut pairs: Vec<(f64, Vec<f64>)> = (0..n)
        .map(|i| {
            let mut col: Vec<f64> = v.column(i).to_vec();
            fix_sign(&mut col);
            (a[[i, i]], col)
        })
        .collect();
    pairs.sort_by(|x, y| match y.0.total_cmp(&x.0) {
        Ordering::Equal => lexicographic(&y.1, &x.1),
        other => other,
    });

    let eigenvalues = pairs.iter().map(|p| p.0).collect();
    let eigenvectors = Array2::from_shape_fn((n, n), |(r, col)| pairs[col].1[r]);
    Ok(SymmetricEigen {
        eigenvalues,
        eigenvectors,
        sweeps,
    })
}

fn off_diagonal_norm(a: &Array2<f64>) -> f64 {
    let mut sum = 0.0;
    for ((i, j), x) in a.indexed_iter() {
        if i != j {
            sum += x * x;
        }
    }
    sum.sqrt()
}

/// Applies the rotation in the (p, q) plane that annihilates `a[p, q]`.
fn rotate(a: &mut Array2<f64>, v: &mut Array2<f64>, p: usize, q: usize) {
    let apq = a[[p, q]];
    if apq == 0.0 {
        return;
    }
    let tau = (a[[q, q]] - a[[p, p]]) / (2.0 * apq);
    let t = if tau.abs() > 1e150 {
        0.5 / tau
    } else {
        let sign = if tau >= 0.0 { 1.0 } else { -1.0 };
        sign / (tau.abs() + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let n = a.nrows();

    for k in 0..n {
        let akp = a[[k, p]];
        let akq = a[[k, q]];
        a[[k, p]] = c * akp - s * akq;
        a[[k, q]] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = a[[p, k]];
        let aqk = a[[q, k]];
        a[[p, k]] = c * apk - s * aqk;
        a[[q, k]] = s * apk + c * aqk;
    }
    a[[p, q]] = 0.0;
    a[[q, p]] = 0.0;
    for k in 0..n {
        let vkp = v[[k, p]];
        let vkq = v[[k, q]];
        v[[k, p]] = c * vkp - s * vkq;
        v[[k, q]] = s * vkp + c * vkq;
    }
}

fn fix_sign(col: &mut [f64]) {
    let mut best = 0;
    for (i, x) in col.iter().enumerate() {
        if x.abs() > col[best].abs() {
            best = i;
        }
    }
    if col.get(best).is_some_and(|&x| x < 0.0) {
        col.iter_mut().for_each(|x| *x = -*x);
    }
}

fn lexicographic(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| *o != Ordering::Equal)
        .unwrap_or(Ordering::Equal)
}

/// Induced infinity norm (max absolute row sum).
pub fn inf_norm(m: ArrayView2<f64>) -> f64 {
    m.rows()
        .into_iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}
