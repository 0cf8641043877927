//! Small dense and iterative linear algebra used across the crate.

use alloc::vec;
use alloc::vec::Vec;

use crate::real::sqrt;
use crate::{Error, Result};

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    sqrt(dot(a, a))
}

#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| f64::max(m, x.abs()))
}

/// Outcome of an iterative linear solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveInfo {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Conjugate gradients for a symmetric positive semidefinite system.
///
/// If `null_space` is true the operator is assumed to annihilate constants;
/// the right-hand side and iterates are kept mean-free.
pub fn conjugate_gradient<F>(
    apply: F,
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    max_iter: usize,
    null_space: bool,
) -> Result<SolveInfo>
where
    F: Fn(&[f64], &mut [f64]),
{
    let n = b.len();
    let mut rhs = b.to_vec();
    if null_space {
        remove_mean(&mut rhs);
        remove_mean(x);
    }
    let bnorm = norm(&rhs);
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(SolveInfo { iterations: 0, relative_residual: 0.0 });
    }
    let mut ax = vec![0.0; n];
    apply(x, &mut ax);
    let mut r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
    if null_space {
        remove_mean(&mut r);
    }
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    let mut ap = vec![0.0; n];
    let mut it = 0;
    while it < max_iter {
        if sqrt(rr) <= tol * bnorm {
            break;
        }
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            break;
        }
        let alpha = rr / pap;
        axpy(alpha, &p, x);
        axpy(-alpha, &ap, &mut r);
        if null_space {
            remove_mean(&mut r);
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        for (pi, ri) in p.iter_mut().zip(&r) {
            *pi = ri + beta * *pi;
        }
        rr = rr_new;
        it += 1;
    }
    // true residual
    apply(x, &mut ax);
    let mut res: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
    if null_space {
        remove_mean(&mut res);
        remove_mean(x);
    }
    let rel = norm(&res) / bnorm;
    if rel > tol * 10.0 {
        return Err(Error::NoConvergence { iterations: it, residual: rel });
    }
    Ok(SolveInfo { iterations: it, relative_residual: rel })
}

pub fn remove_mean(v: &mut [f64]) {
    if v.is_empty() {
        return;
    }
    let m = v.iter().sum::<f64>() / v.len() as f64;
    v.iter_mut().for_each(|x| *x -= m);
}

/// Row-major dense symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    pub n: usize,
    pub data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        DenseMatrix { n, data: vec![0.0; n * n] }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    /// Assemble the matrix of a linear map column by column.
    pub fn assemble<F: Fn(&[f64], &mut [f64])>(n: usize, apply: F) -> Self {
        let mut m = Self::zeros(n);
        let mut e = vec![0.0; n];
        let mut col = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            apply(&e, &mut col);
            for i in 0..n {
                m.data[i * n + j] = col[i];
            }
            e[j] = 0.0;
        }
        m
    }

    pub fn symmetrize(&mut self) {
        let n = self.n;
        for i in 0..n {
            for j in i + 1..n {
                let v = 0.5 * (self.data[i * n + j] + self.data[j * n + i]);
                self.data[i * n + j] = v;
                self.data[j * n + i] = v;
            }
        }
    }
}

/// Eigenvector of a symmetric matrix for a known eigenvalue, by inverse
/// iteration with a Cholesky factor of `A - (λ - δ)I`.
///
/// Much cheaper than accumulating all eigenvectors when only one is needed.
pub fn eigenvector_for(a: &DenseMatrix, lambda: f64, scale: f64) -> Result<Vec<f64>> {
    let n = a.n;
    let mut delta = 1e-10 * scale.max(1.0);
    let l = loop {
        if let Some(l) = cholesky_shifted(a, lambda - delta) {
            break l;
        }
        delta *= 10.0;
        if delta > 1e-2 * scale.max(1.0) {
            return Err(Error::NoConvergence { iterations: 0, residual: delta });
        }
    };
    // deterministic start with no special alignment to the eigenbasis
    let mut x: Vec<f64> = (0..n).map(|i| ((i as u64).wrapping_mul(2654435761) % 1000) as f64 / 1000.0 - 0.4).collect();
    for _ in 0..3 {
        forward_back(&l, n, &mut x);
        let nx = norm(&x);
        x.iter_mut().for_each(|v| *v /= nx);
    }
    Ok(x)
}

// lower factor, row-major, or None if a pivot is not positive
fn cholesky_shifted(a: &DenseMatrix, sigma: f64) -> Option<Vec<f64>> {
    let n = a.n;
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let (ri, rj) = (&l[i * n..i * n + j], &l[j * n..j * n + j]);
            let mut v = a.data[i * n + j] - dot(ri, rj);
            if i == j {
                v -= sigma;
                if v.is_nan() || v <= 0.0 {
                    return None;
                }
                l[i * n + i] = sqrt(v);
            } else {
                l[i * n + j] = v / l[j * n + j];
            }
        }
    }
    Some(l)
}

fn forward_back(l: &[f64], n: usize, x: &mut [f64]) {
    for i in 0..n {
        let v = x[i] - dot(&l[i * n..i * n + i], &x[..i]);
        x[i] = v / l[i * n + i];
    }
    for i in (0..n).rev() {
        x[i] /= l[i * n + i];
        let xi = x[i];
        for k in 0..i {
            x[k] -= l[i * n + k] * xi;
        }
    }
}

/// Eigen-decomposition of a real symmetric matrix by Householder
/// tridiagonalization followed by the implicit QL algorithm.
///
/// Returns ascending eigenvalues and, if requested, the eigenvectors as
/// columns of a row-major matrix.
pub fn symmetric_eigen(a: &DenseMatrix, vectors: bool) -> Result<(Vec<f64>, Option<DenseMatrix>)> {
    let n = a.n;
    let mut z = a.clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut z, &mut d, &mut e, vectors);
    tql2(&mut z, &mut d, &mut e, vectors)?;
    // sort ascending
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap_or(core::cmp::Ordering::Equal));
    let vals: Vec<f64> = idx.iter().map(|&i| d[i]).collect();
    let vecs = if vectors {
        let mut v = DenseMatrix::zeros(n);
        for (new, &old) in idx.iter().enumerate() {
            for r in 0..n {
                v.data[r * n + new] = z.data[r * n + old];
            }
        }
        Some(v)
    } else {
        None
    };
    Ok((vals, vecs))
}

// Householder reduction to tridiagonal form (EISPACK tred2 ordering).
fn tred2(z: &mut DenseMatrix, d: &mut [f64], e: &mut [f64], vectors: bool) {
    let n = z.n;
    if n == 0 {
        return;
    }
    let idx = |i: usize, j: usize| i * n + j;
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let scale: f64 = (0..=l).map(|k| z.data[idx(i, k)].abs()).sum();
            if scale == 0.0 {
                e[i] = z.data[idx(i, l)];
            } else {
                for k in 0..=l {
                    z.data[idx(i, k)] /= scale;
                    h += z.data[idx(i, k)] * z.data[idx(i, k)];
                }
                let f = z.data[idx(i, l)];
                let g = if f >= 0.0 { -sqrt(h) } else { sqrt(h) };
                e[i] = scale * g;
                h -= f * g;
                z.data[idx(i, l)] = f - g;
                // p = A u from the lower triangle, row by row
                let u: Vec<f64> = z.data[idx(i, 0)..=idx(i, l)].to_vec();
                if vectors {
                    for j in 0..=l {
                        z.data[idx(j, i)] = u[j] / h;
                    }
                }
                e[..=l].iter_mut().for_each(|x| *x = 0.0);
                for j in 0..=l {
                    let row = &z.data[idx(j, 0)..=idx(j, j)];
                    let uj = u[j];
                    let mut g = row[j] * uj;
                    for k in 0..j {
                        g += row[k] * u[k];
                        e[k] += row[k] * uj;
                    }
                    e[j] += g;
                }
                let mut f = 0.0;
                for j in 0..=l {
                    e[j] /= h;
                    f += e[j] * u[j];
                }
                let hh = f / (h + h);
                for j in 0..=l {
                    e[j] -= hh * u[j];
                }
                for j in 0..=l {
                    let (fj, gj) = (u[j], e[j]);
                    let row = &mut z.data[idx(j, 0)..=idx(j, j)];
                    for k in 0..=j {
                        row[k] -= fj * e[k] + gj * u[k];
                    }
                }
            }
        } else {
            e[i] = z.data[idx(i, l)];
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for i in 0..n {
        if vectors {
            if d[i] != 0.0 {
                let mut g = vec![0.0; i];
                for k in 0..i {
                    let c = z.data[idx(i, k)];
                    let row = &z.data[idx(k, 0)..idx(k, i)];
                    for j in 0..i {
                        g[j] += c * row[j];
                    }
                }
                for k in 0..i {
                    let c = z.data[idx(k, i)];
                    let row = &mut z.data[idx(k, 0)..idx(k, i)];
                    for j in 0..i {
                        row[j] -= g[j] * c;
                    }
                }
            }
            d[i] = z.data[idx(i, i)];
            z.data[idx(i, i)] = 1.0;
            for j in 0..i {
                z.data[idx(j, i)] = 0.0;
                z.data[idx(i, j)] = 0.0;
            }
        } else {
            d[i] = z.data[idx(i, i)];
        }
    }
}

// Implicit QL with Wilkinson-style shifts on the tridiagonal (d, e).
fn tql2(z: &mut DenseMatrix, d: &mut [f64], e: &mut [f64], vectors: bool) -> Result<()> {
    let n = z.n;
    if n == 0 {
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
                return Err(Error::NoConvergence { iterations: iter, residual: e[l].abs() });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = libm::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + if g >= 0.0 { r.abs() } else { -r.abs() });
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut early = false;
            while i > l {
                i -= 1;
                let mut f = s * e[i];
                let b = c * e[i];
                r = libm::hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if vectors {
                    for k in 0..n {
                        f = z.data[k * n + i + 1];
                        z.data[k * n + i + 1] = s * z.data[k * n + i] + c * f;
                        z.data[k * n + i] = c * z.data[k * n + i] - s * f;
                    }
                }
            }
            if early {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Modified Gram-Schmidt, twice, over column vectors. Columns whose norm
/// drops below `drop_tol` relative to their original norm are removed.
pub fn orthonormalize(cols: &mut Vec<Vec<f64>>, drop_tol: f64) {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(cols.len());
    for mut v in cols.drain(..) {
        let n0 = norm(&v);
        if n0 == 0.0 {
            continue;
        }
        for _ in 0..2 {
            for q in out.iter() {
                let c = dot(q, &v);
                axpy(-c, q, &mut v);
            }
        }
        let n1 = norm(&v);
        if n1 > drop_tol * n0 && n1 > 0.0 {
            v.iter_mut().for_each(|x| *x /= n1);
            out.push(v);
        }
    }
    *cols = out;
}
