//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use topochain::{ChainHamiltonian, C64};

/// Cyclic Jacobi diagonalization of a dense real symmetric matrix.
/// Returns ascending eigenvalues and the matching eigenvectors.
pub fn jacobi_eigh(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        let scale: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum::<f64>() + off;
        if off <= 1e-30 * scale.max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = order.iter().map(|&i| v.iter().map(|row| row[i]).collect()).collect();
    (values, vectors)
}

pub fn dense(h: &ChainHamiltonian) -> Vec<Vec<f64>> {
    let n = h.n_sites();
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        m[i][i] = h.diagonal()[i];
        if i + 1 < n {
            m[i][i + 1] = h.offdiagonal()[i];
            m[i + 1][i] = h.offdiagonal()[i];
        }
    }
    m
}

/// `[[Re A, −Im A], [Im A, Re A]]`: each eigenvalue of `A` appears twice.
pub fn realify(a: &[Vec<C64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut m = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            m[i][j] = a[i][j].re;
            m[i + n][j + n] = a[i][j].re;
            m[i][j + n] = -a[i][j].im;
            m[i + n][j] = a[i][j].im;
        }
    }
    m
}

/// `e^{−iHt}ψ₀` for a static chain, through the Jacobi eigenbasis.
pub fn static_propagate(h: &ChainHamiltonian, psi0: &[C64], t: f64) -> Vec<C64> {
    let (e, v) = jacobi_eigh(dense(h));
    let n = psi0.len();
    let mut out = vec![C64::new(0.0, 0.0); n];
    for (ek, vk) in e.iter().zip(&v) {
        let c: C64 = vk.iter().zip(psi0).map(|(x, z)| z * *x).sum();
        let c = c * C64::from_polar(1.0, -ek * t);
        for (o, x) in out.iter_mut().zip(vk) {
            *o += c * *x;
        }
    }
    out
}

/// `J_n(x)` from its power series, summed until terms vanish.
pub fn bessel_series(n: i32, x: f64) -> f64 {
    let m = n.unsigned_abs();
    let half = 0.5 * x;
    let mut term = (1..=m).fold(1.0, |acc, k| acc * half / f64::from(k));
    let mut sum = term;
    for k in 1..200 {
        term *= -half * half / (f64::from(k) * f64::from(k + m));
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    if n < 0 && m % 2 == 1 {
        -sum
    } else {
        sum
    }
}

/// Resonant Rabi populations for `H = [[0, g], [g, 0]]` from site 0.
pub fn rabi_populations(g: f64, t: f64) -> (f64, f64) {
    let s = (g * t).sin().powi(2);
    (1.0 - s, s)
}

pub fn overlap_sq(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<C64>().norm_sqr()
}
