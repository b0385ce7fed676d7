//! Dense symmetric eigensolver (Householder tridiagonalization followed by
//! implicit-shift QL) and small helpers: deterministic parallel vector ops
//! and a pivoted solve for tiny normal-equation systems.
//!
//! No external linear-algebra dependency; sizes here top out at 2^12.

use crate::error::{Error, Result};
use rayon::prelude::*;

/// Chunk length for deterministic parallel reductions. Partial sums are
/// formed per fixed chunk and combined in index order, so results do not
/// depend on the number of worker threads.
const CHUNK: usize = 1 << 13;

pub fn par_dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    if a.len() < 4 * CHUNK {
        return a.iter().zip(b).map(|(x, y)| x * y).sum();
    }
    let partials: Vec<f64> = a
        .par_chunks(CHUNK)
        .zip(b.par_chunks(CHUNK))
        .map(|(ca, cb)| ca.iter().zip(cb).map(|(x, y)| x * y).sum())
        .collect();
    partials.iter().sum()
}

pub fn par_norm(a: &[f64]) -> f64 {
    par_dot(a, a).sqrt()
}

/// y += alpha * x
pub fn par_axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    if x.len() < 4 * CHUNK {
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi += alpha * xi;
        }
        return;
    }
    y.par_chunks_mut(CHUNK)
        .zip(x.par_chunks(CHUNK))
        .for_each(|(cy, cx)| {
            for (yi, xi) in cy.iter_mut().zip(cx) {
                *yi += alpha * xi;
            }
        });
}

pub fn par_scale(alpha: f64, y: &mut [f64]) {
    if y.len() < 4 * CHUNK {
        for yi in y.iter_mut() {
            *yi *= alpha;
        }
        return;
    }
    y.par_chunks_mut(CHUNK).for_each(|cy| {
        for yi in cy.iter_mut() {
            *yi *= alpha;
        }
    });
}

/// Eigendecomposition of a real symmetric matrix, values ascending.
pub struct SymEigen {
    pub values: Vec<f64>,
    /// Eigenvectors matching `values`, unit norm; `None` when not requested.
    pub vectors: Option<Vec<Vec<f64>>>,
}

/// Full eigendecomposition of the row-major symmetric matrix `a` (n x n).
/// Only the lower triangle is read.
pub fn sym_eigen(a: &[f64], n: usize, want_vectors: bool) -> Result<SymEigen> {
    if a.len() != n * n {
        return Err(Error::invalid(format!(
            "matrix length {} does not match n={n}",
            a.len()
        )));
    }
    if n == 0 {
        return Ok(SymEigen {
            values: Vec::new(),
            vectors: want_vectors.then(Vec::new),
        });
    }
    let mut work = a.to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(&mut work, n, &mut d, &mut e, want_vectors);
    if want_vectors {
        ql_implicit(&mut d, &mut e, n, Some(&mut work))?;
    } else {
        ql_implicit(&mut d, &mut e, n, None)?;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let values: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let vectors = want_vectors.then(|| {
        order
            .iter()
            .map(|&j| (0..n).map(|k| work[k * n + j]).collect())
            .collect()
    });
    Ok(SymEigen { values, vectors })
}

/// Eigenvalues (and optional vectors) of a symmetric tridiagonal matrix.
pub fn tridiag_eigen(diag: &[f64], offdiag: &[f64], want_vectors: bool) -> Result<SymEigen> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[1..n].copy_from_slice(&offdiag[..n - 1]);
    let mut z = if want_vectors {
        let mut id = vec![0.0; n * n];
        for i in 0..n {
            id[i * n + i] = 1.0;
        }
        Some(id)
    } else {
        None
    };
    ql_implicit(&mut d, &mut e, n, z.as_deref_mut())?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let values: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let vectors = z.map(|z| {
        order
            .iter()
            .map(|&j| (0..n).map(|k| z[k * n + j]).collect())
            .collect()
    });
    Ok(SymEigen { values, vectors })
}

/// Householder reduction to tridiagonal form. On exit `d` holds the
/// diagonal, `e[1..]` the subdiagonal; with `vectors` the matrix is
/// overwritten by the accumulated orthogonal transform.
fn tridiagonalize(a: &mut [f64], n: usize, d: &mut [f64], e: &mut [f64], vectors: bool) {
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let scale: f64 = (0..=l).map(|k| a[i * n + k].abs()).sum();
            if scale == 0.0 {
                e[i] = a[i * n + l];
            } else {
                for k in 0..=l {
                    a[i * n + k] /= scale;
                    h += a[i * n + k] * a[i * n + k];
                }
                let f = a[i * n + l];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[i * n + l] = f - g;
                let mut fsum = 0.0;
                for j in 0..=l {
                    if vectors {
                        a[j * n + i] = a[i * n + j] / h;
                    }
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += a[j * n + k] * a[i * n + k];
                    }
                    for k in (j + 1)..=l {
                        g += a[k * n + j] * a[i * n + k];
                    }
                    e[j] = g / h;
                    fsum += e[j] * a[i * n + j];
                }
                let hh = fsum / (h + h);
                for j in 0..=l {
                    let f = a[i * n + j];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        a[j * n + k] -= f * e[k] + g * a[i * n + k];
                    }
                }
            }
        } else {
            e[i] = a[i * n + l];
        }
        d[i] = h;
    }
    if vectors {
        d[0] = 0.0;
    }
    e[0] = 0.0;
    if vectors {
        for i in 0..n {
            if d[i] != 0.0 {
                for j in 0..i {
                    let mut g = 0.0;
                    for k in 0..i {
                        g += a[i * n + k] * a[k * n + j];
                    }
                    for k in 0..i {
                        a[k * n + j] -= g * a[k * n + i];
                    }
                }
            }
            d[i] = a[i * n + i];
            a[i * n + i] = 1.0;
            for j in 0..i {
                a[j * n + i] = 0.0;
                a[i * n + j] = 0.0;
            }
        }
    } else {
        for i in 0..n {
            d[i] = a[i * n + i];
        }
    }
}

/// QL iteration with implicit shifts. `e[0]` is unused on entry; `z`, when
/// present, is an n x n row-major matrix whose columns get rotated.
fn ql_implicit(d: &mut [f64], e: &mut [f64], n: usize, mut z: Option<&mut [f64]>) -> Result<()> {
    if n == 1 {
        return Ok(());
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NumericalValidity(
                    "QL iteration failed to converge".into(),
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    for k in 0..n {
                        f = z[k * n + i + 1];
                        z[k * n + i + 1] = s * z[k * n + i] + c * f;
                        z[k * n + i] = c * z[k * n + i] - s * f;
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Solve `a x = b` for a small dense system by Gaussian elimination with
/// partial pivoting. `a` is row-major n x n and consumed.
pub fn solve_dense(mut a: Vec<f64>, mut b: Vec<f64>, n: usize) -> Result<Vec<f64>> {
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
            .unwrap();
        if a[pivot * n + col].abs() < 1e-14 {
            return Err(Error::NumericalValidity("singular system".into()));
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            b.swap(col, pivot);
        }
        for row in (col + 1)..n {
            let f = a[row * n + col] / a[col * n + col];
            if f != 0.0 {
                for k in col..n {
                    a[row * n + k] -= f * a[col * n + k];
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for k in (row + 1)..n {
            s -= a[row * n + k] * x[k];
        }
        x[row] = s / a[row * n + row];
    }
    Ok(x)
}

/// Least-squares polynomial fit of degree `deg` through `(x, y)` points via
/// the normal equations.
pub fn polyfit(points: &[(f64, f64)], deg: usize) -> Result<Vec<f64>> {
    let k = deg + 1;
    if points.len() < k {
        return Err(Error::UnderdeterminedFit {
            points: points.len(),
        });
    }
    let mut ata = vec![0.0; k * k];
    let mut atb = vec![0.0; k];
    for &(x, y) in points {
        let mut pow = vec![1.0; k];
        for i in 1..k {
            pow[i] = pow[i - 1] * x;
        }
        for i in 0..k {
            atb[i] += pow[i] * y;
            for j in 0..k {
                ata[i * k + j] += pow[i] * pow[j];
            }
        }
    }
    solve_dense(ata, atb, k)
}
