//! Dense kernels behind the spectral module: Householder reduction of a
//! complex Hermitian matrix to tridiagonal form, a diagonal phase gauge that
//! makes a Hermitian tridiagonal real, and the implicit-shift QL iteration
//! for real symmetric tridiagonals (after EISPACK `tql2`).

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// QL sweeps allowed per eigenvalue.
pub(crate) const MAX_QL_SWEEPS: usize = 64;

/// Eigenvalues (ascending) and orthonormal eigenvectors of the real symmetric
/// tridiagonal matrix with diagonal `diag` and off-diagonal `off`
/// (`off[i]` couples `i` and `i + 1`). `vectors[j]` is the eigenvector of
/// `values[j]`.
pub(crate) fn tridiagonal_eigh(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = diag.len();
    assert!(off.len() + 1 == n || (n == 0 && off.is_empty()));
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n.saturating_sub(1)].copy_from_slice(off);
    let mut z: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut col = vec![0.0; n];
            col[j] = 1.0;
            col
        })
        .collect();

    tql2(&mut d, &mut e, &mut z)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = order.into_iter().map(|i| std::mem::take(&mut z[i])).collect();
    Ok((values, vectors))
}

fn tql2(d: &mut [f64], e: &mut [f64], z: &mut [Vec<f64>]) -> Result<()> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut sweeps = 0;
            loop {
                sweeps += 1;
                if sweeps > MAX_QL_SWEEPS {
                    return Err(Error::NonConvergence { index: l });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    let (lo, hi) = z.split_at_mut(i + 1);
                    let zi = &mut lo[i];
                    let zi1 = &mut hi[0];
                    for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                        let t = *b;
                        *b = s * *a + c * t;
                        *a = c * *a - s * t;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// Unit-modulus gauge `g` such that `conj(g_k) t_k g_{k+1} = |t_k|` for a
/// Hermitian tridiagonal with superdiagonal `t`.
pub(crate) fn real_gauge(sup: &[C64]) -> (Vec<C64>, Vec<f64>) {
    let mut g = Vec::with_capacity(sup.len() + 1);
    g.push(C64::new(1.0, 0.0));
    let mut mags = Vec::with_capacity(sup.len());
    for (k, t) in sup.iter().enumerate() {
        let m = t.norm();
        let next = if m > 0.0 { g[k] * t.conj() / m } else { g[k] };
        g.push(next);
        mags.push(m);
    }
    (g, mags)
}

/// Eigen-decomposition of a Hermitian tridiagonal (`sup[k]` is entry
/// `(k, k+1)`). Vectors are returned as complex columns.
pub(crate) fn hermitian_tridiagonal_eigh(
    diag: &[f64],
    sup: &[C64],
) -> Result<(Vec<f64>, Vec<Vec<C64>>)> {
    let (gauge, mags) = real_gauge(sup);
    let (values, real_vecs) = tridiagonal_eigh(diag, &mags)?;
    let vectors = real_vecs
        .into_iter()
        .map(|v| v.iter().zip(&gauge).map(|(x, g)| g * *x).collect())
        .collect();
    Ok((values, vectors))
}

/// Eigen-decomposition of a dense Hermitian matrix (row-major `n × n`) by
/// Householder reduction to tridiagonal form followed by the QL iteration.
pub(crate) fn dense_hermitian_eigh(a: &[C64], n: usize) -> Result<(Vec<f64>, Vec<Vec<C64>>)> {
    assert_eq!(a.len(), n * n);
    let mut a = a.to_vec();
    let mut q = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        q[i * n + i] = C64::new(1.0, 0.0);
    }
    let mut v = vec![C64::new(0.0, 0.0); n];
    let mut p = vec![C64::new(0.0, 0.0); n];

    for k in 0..n.saturating_sub(2) {
        let lo = k + 1;
        let tail: f64 = (lo + 1..n).map(|i| a[i * n + k].norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let x0 = a[lo * n + k];
        let xnorm = (tail + x0.norm_sqr()).sqrt();
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { C64::new(1.0, 0.0) };
        let alpha = -phase * xnorm;

        for i in lo..n {
            v[i] = a[i * n + k];
        }
        v[lo] = x0 - alpha;
        let vnorm2: f64 = (lo..n).map(|i| v[i].norm_sqr()).sum();
        let tau = 2.0 / vnorm2;

        // p = τ A v on the trailing block
        for i in lo..n {
            let row = &a[i * n..(i + 1) * n];
            let s: C64 = (lo..n).map(|j| row[j] * v[j]).sum();
            p[i] = s * tau;
        }
        let kappa = 0.5 * tau * (lo..n).map(|i| (v[i].conj() * p[i]).re).sum::<f64>();
        for i in lo..n {
            p[i] -= v[i] * kappa;
        }
        // A ← A − v p† − p v†
        for i in lo..n {
            let (vi, pi) = (v[i], p[i]);
            let row = &mut a[i * n..(i + 1) * n];
            for j in lo..n {
                row[j] -= vi * p[j].conj() + pi * v[j].conj();
            }
        }
        a[lo * n + k] = alpha;
        a[k * n + lo] = alpha.conj();
        for i in lo + 1..n {
            a[i * n + k] = C64::new(0.0, 0.0);
            a[k * n + i] = C64::new(0.0, 0.0);
        }
        // Q ← Q (I − τ v v†)
        for r in 0..n {
            let row = &mut q[r * n..(r + 1) * n];
            let s: C64 = (lo..n).map(|j| row[j] * v[j]).sum::<C64>() * tau;
            for j in lo..n {
                row[j] -= s * v[j].conj();
            }
        }
    }

    let diag: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    let sup: Vec<C64> = (0..n.saturating_sub(1)).map(|i| a[i * n + i + 1]).collect();
    let (values, tri_vecs) = hermitian_tridiagonal_eigh(&diag, &sup)?;
    let vectors = tri_vecs
        .into_iter()
        .map(|y| {
            (0..n)
                .map(|r| {
                    let row = &q[r * n..(r + 1) * n];
                    row.iter().zip(&y).map(|(a, b)| a * b).sum()
                })
                .collect()
        })
        .collect();
    Ok((values, vectors))
}
