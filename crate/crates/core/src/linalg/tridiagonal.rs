use super::fix_sign;
use crate::{Error, Result};

const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;

/// Implicit-shift QL iteration (EISPACK `tql2` scheme).
///
/// On return `d` holds the eigenvalues in no particular order. When `z` is
/// given, `z[j]` is transformed along with the iteration, so starting from
/// the identity yields `z[j]` as the eigenvector of `d[j]`. `e[i]` is the
/// coupling between `i` and `i + 1`; it is overwritten.
fn ql_implicit(d: &mut [f64], e: &mut [f64], mut z: Option<&mut [Vec<f64>]>) -> Result<()> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    debug_assert_eq!(e.len(), n);
    let eps = f64::EPSILON;
    let mut shift_total = 0.0;
    let mut tst1: f64 = 0.0;

    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_SWEEPS_PER_EIGENVALUE {
                    return Err(Error::Numeric(format!(
                        "QL iteration did not converge for eigenvalue {l}"
                    )));
                }
                // Wilkinson-type shift from the leading 2×2 block.
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                shift_total += h;

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
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = z.as_deref_mut() {
                        let (lo, hi) = z.split_at_mut(i + 1);
                        let (zi, zi1) = (&mut lo[i], &mut hi[0]);
                        for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                            let t = *b;
                            *b = s * *a + c * t;
                            *a = c * *a - s * t;
                        }
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
        d[l] += shift_total;
        e[l] = 0.0;
    }
    Ok(())
}

fn check_input(diag: &[f64], off: &[f64]) -> Result<()> {
    if diag.is_empty() || off.len() + 1 != diag.len() {
        return Err(Error::InvalidDimension(format!(
            "tridiagonal matrix with {} diagonal and {} off-diagonal entries",
            diag.len(),
            off.len()
        )));
    }
    if diag.iter().chain(off).any(|x| !x.is_finite()) {
        return Err(Error::Numeric("non-finite matrix entry".into()));
    }
    Ok(())
}

fn padded(off: &[f64]) -> Vec<f64> {
    let mut e = off.to_vec();
    e.push(0.0);
    e
}

/// Ascending eigenvalues of the symmetric tridiagonal matrix.
pub fn tridiagonal_eigvals(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    check_input(diag, off)?;
    let mut d = diag.to_vec();
    let mut e = padded(off);
    ql_implicit(&mut d, &mut e, None)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Full eigendecomposition. Returns ascending eigenvalues and the matching
/// unit eigenvectors (`vectors[j]` pairs with `values[j]`), each with its
/// dominant component positive.
pub fn tridiagonal_eigh(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    check_input(diag, off)?;
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = padded(off);
    let mut z: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row = vec![0.0; n];
            row[i] = 1.0;
            row
        })
        .collect();
    ql_implicit(&mut d, &mut e, Some(&mut z))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = order
        .iter()
        .map(|&i| {
            let mut v = std::mem::take(&mut z[i]);
            fix_sign(&mut v);
            v
        })
        .collect();
    Ok((values, vectors))
}

/// Solves `(T − shift·I)·x = rhs` by Gaussian elimination with partial
/// pivoting; zero pivots are replaced by `tiny`.
fn shifted_solve(diag: &[f64], off: &[f64], shift: f64, tiny: f64, rhs: &mut [f64]) {
    let n = diag.len();
    // Upper factor bands after pivoting: main, first and second super-diagonal.
    let mut u0: Vec<f64> = diag.iter().map(|d| d - shift).collect();
    let mut u1: Vec<f64> = off.to_vec();
    u1.push(0.0);
    let mut u2 = vec![0.0; n];
    let mut sub: Vec<f64> = off.to_vec();
    for k in 0..n.saturating_sub(1) {
        if sub[k].abs() > u0[k].abs() {
            // Swap rows k and k + 1.
            std::mem::swap(&mut u0[k], &mut sub[k]);
            let next_u1 = u1[k + 1];
            let (a, b) = (u1[k], u0[k + 1]);
            u1[k] = b;
            u0[k + 1] = a;
            u2[k] = next_u1;
            u1[k + 1] = 0.0;
            rhs.swap(k, k + 1);
        }
        if u0[k] == 0.0 {
            u0[k] = tiny;
        }
        let m = sub[k] / u0[k];
        u0[k + 1] -= m * u1[k];
        u1[k + 1] -= m * u2[k];
        rhs[k + 1] -= m * rhs[k];
    }
    if u0[n - 1] == 0.0 {
        u0[n - 1] = tiny;
    }
    for k in (0..n).rev() {
        let mut acc = rhs[k];
        if k + 1 < n {
            acc -= u1[k] * rhs[k + 1];
        }
        if k + 2 < n {
            acc -= u2[k] * rhs[k + 2];
        }
        rhs[k] = acc / u0[k];
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

/// Eigenvectors for selected (ascending, previously computed) eigenvalues
/// by inverse iteration. Vectors of eigenvalues closer than `1e-3·‖T‖` are
/// re-orthogonalized against each other, so degenerate clusters come out
/// orthonormal.
pub fn tridiagonal_eigvecs(diag: &[f64], off: &[f64], values: &[f64]) -> Result<Vec<Vec<f64>>> {
    check_input(diag, off)?;
    let n = diag.len();
    let norm = (0..n)
        .map(|i| {
            diag[i].abs()
                + if i > 0 { off[i - 1].abs() } else { 0.0 }
                + off.get(i).map_or(0.0, |x| x.abs())
        })
        .fold(f64::MIN_POSITIVE, f64::max);
    let eps = f64::EPSILON;
    let cluster_tol = 1e-3 * norm;
    let tiny = eps * norm;

    let mut out: Vec<Vec<f64>> = Vec::with_capacity(values.len());
    let mut cluster_start = 0;
    let mut prev_shift = f64::NEG_INFINITY;
    for (j, &lambda) in values.iter().enumerate() {
        if j > 0 && (lambda - values[j - 1]).abs() > cluster_tol {
            cluster_start = j;
        }
        // Separate coincident shifts so the solves differ.
        let mut shift = lambda;
        if j > cluster_start && shift <= prev_shift + 10.0 * eps * shift.abs().max(norm) {
            shift = prev_shift + 10.0 * eps * shift.abs().max(norm);
        }
        prev_shift = shift;

        let mut v: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.5 * ((i as f64 + 1.0) * 0.618_033_988_749_895 * 7.0).sin())
            .collect();
        normalize(&mut v);
        for _ in 0..5 {
            shifted_solve(diag, off, shift, tiny, &mut v);
            for prev in &out[cluster_start..j] {
                let dot: f64 = prev.iter().zip(&v).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(prev).for_each(|(x, p)| *x -= dot * p);
            }
            if normalize(&mut v) == 0.0 {
                return Err(Error::Numeric("inverse iteration collapsed".into()));
            }
        }
        fix_sign(&mut v);
        out.push(v);
    }
    Ok(out)
}
