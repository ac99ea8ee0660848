//! Variable-order (1–5), quasi-constant step backward differentiation
//! formulas in the backward-difference representation, with the step-size
//! and order heuristics of Shampine & Reichelt's `ode15s` family.
//!
//! For `y' = −i·H(t)·y` the implicit stage is linear, so each step solves
//! `(I + i·c·H(t_new))·d = c·(−i·H·y_pred) − ψ` exactly with one
//! tridiagonal factorization instead of Newton iterations.

use super::renormalization;
use super::rk4::{rhs, Outcome};
use super::IntegratorConfig;
use crate::models::ChainHamiltonian;
use crate::{Error, Result, C64};

const MAX_ORDER: usize = 5;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;
const SAFETY: f64 = 0.9;

/// RMS norm of `|x_i| / scale_i`.
fn scaled_norm(x: &[C64], scale: &[f64]) -> f64 {
    let s: f64 = x.iter().zip(scale).map(|(x, s)| (x.norm() / s).powi(2)).sum();
    (s / x.len() as f64).sqrt()
}

fn scale_of(y: &[C64], cfg: &IntegratorConfig) -> Vec<f64> {
    y.iter().map(|z| cfg.abs_tol + cfg.rel_tol * z.norm()).collect()
}

/// Matrix that maps backward differences for step `h` to those for
/// `factor·h`.
fn compute_r(order: usize, factor: f64) -> Vec<Vec<f64>> {
    let k = order + 1;
    let mut m = vec![vec![0.0; k]; k];
    m[0].iter_mut().for_each(|x| *x = 1.0);
    for i in 1..k {
        for j in 1..k {
            m[i][j] = (i as f64 - 1.0 - factor * j as f64) / i as f64;
        }
    }
    for i in 1..k {
        for j in 0..k {
            m[i][j] *= m[i - 1][j];
        }
    }
    m
}

fn change_d(d: &mut [Vec<C64>], order: usize, factor: f64) {
    let r = compute_r(order, factor);
    let u = compute_r(order, 1.0);
    let k = order + 1;
    let mut ru = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..k {
            ru[i][j] = (0..k).map(|l| r[i][l] * u[l][j]).sum();
        }
    }
    let n = d[0].len();
    let old: Vec<Vec<C64>> = d[..k].to_vec();
    for i in 0..k {
        for c in 0..n {
            d[i][c] = (0..k).map(|j| old[j][c] * ru[j][i]).sum();
        }
    }
}

/// Solves `(I + i·c·H)·x = rhs` in place. The Hermitian part of the matrix
/// is the identity, so elimination without pivoting is stable.
fn solve_shifted(h: &ChainHamiltonian, c: f64, rhs: &mut [C64]) {
    let n = rhs.len();
    let diag = h.diagonal();
    let off = h.offdiagonal();
    let mut sup = vec![C64::new(0.0, 0.0); n];
    let mut piv = C64::new(1.0, c * diag[0]);
    rhs[0] /= piv;
    for i in 1..n {
        let o = C64::new(0.0, c * off[i - 1]);
        sup[i - 1] = o / piv;
        piv = C64::new(1.0, c * diag[i]) - o * sup[i - 1];
        rhs[i] = (rhs[i] - o * rhs[i - 1]) / piv;
    }
    for i in (0..n - 1).rev() {
        let next = rhs[i + 1];
        rhs[i] -= sup[i] * next;
    }
}

/// Initial step size by the Hairer–Wanner heuristic.
fn initial_step<F>(
    provider: &F,
    t0: f64,
    y0: &[C64],
    f0: &[C64],
    t_bound: f64,
    cfg: &IntegratorConfig,
) -> Result<f64>
where
    F: Fn(f64) -> Result<ChainHamiltonian>,
{
    let interval = t_bound - t0;
    let scale = scale_of(y0, cfg);
    let d0 = scaled_norm(y0, &scale);
    let d1 = scaled_norm(f0, &scale);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(interval);
    let y1: Vec<C64> = y0.iter().zip(f0).map(|(y, f)| y + f * h0).collect();
    let mut f1 = vec![C64::new(0.0, 0.0); y0.len()];
    rhs(&provider(t0 + h0)?, &y1, &mut f1);
    let diff: Vec<C64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = scaled_norm(&diff, &scale) / h0;
    let h1 = if d1 <= 1e-15 && d2 <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).sqrt()
    };
    Ok((100.0 * h0).min(h1).min(interval).min(cfg.max_step))
}

pub(super) fn integrate<F>(
    provider: &F,
    y0: &[C64],
    records: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Outcome>
where
    F: Fn(f64) -> Result<ChainHamiltonian>,
{
    let n = y0.len();
    let zero = C64::new(0.0, 0.0);
    let t0 = records[0];
    let t_bound = *records.last().expect("at least two records");

    let mut gamma = [0.0; MAX_ORDER + 1];
    for k in 1..=MAX_ORDER {
        gamma[k] = gamma[k - 1] + 1.0 / k as f64;
    }
    let alpha = gamma;
    let error_const: Vec<f64> = (0..=MAX_ORDER).map(|k| 1.0 / (k + 1) as f64).collect();

    let mut f0 = vec![zero; n];
    rhs(&provider(t0)?, y0, &mut f0);
    let mut h_abs = initial_step(provider, t0, y0, &f0, t_bound, cfg)?;

    let mut d = vec![vec![zero; n]; MAX_ORDER + 3];
    d[0] = y0.to_vec();
    for (x, f) in d[1].iter_mut().zip(&f0) {
        *x = f * h_abs;
    }
    let mut order = 1;
    let mut n_equal_steps = 0;
    let mut t = t0;

    let mut states = Vec::with_capacity(records.len());
    states.push(y0.to_vec());
    let mut next_record = 1;
    let mut steps = 0;
    let mut max_drift: f64 = 0.0;
    let mut y_predict = vec![zero; n];
    let mut corr = vec![zero; n];

    while t < t_bound {
        let min_step = 10.0 * (t.abs() * f64::EPSILON).max(f64::MIN_POSITIVE);
        if h_abs > cfg.max_step {
            change_d(&mut d, order, cfg.max_step / h_abs);
            h_abs = cfg.max_step;
            n_equal_steps = 0;
        } else if h_abs < min_step {
            change_d(&mut d, order, min_step / h_abs);
            h_abs = min_step;
            n_equal_steps = 0;
        }

        // Attempt steps until the local error estimate is acceptable.
        let (t_new, error_norm) = loop {
            if h_abs < min_step {
                return Err(Error::Integration { t, reason: format!("step size {h_abs:e} underflow") });
            }
            let mut t_new = t + h_abs;
            if t_new > t_bound {
                t_new = t_bound;
                change_d(&mut d, order, (t_new - t) / h_abs);
                n_equal_steps = 0;
            }
            h_abs = t_new - t;

            for c in 0..n {
                y_predict[c] = (0..=order).map(|i| d[i][c]).sum();
            }
            let c = h_abs / alpha[order];
            let h_new = provider(t_new)?;
            rhs(&h_new, &y_predict, &mut corr);
            for col in 0..n {
                let psi: C64 =
                    (1..=order).map(|i| d[i][col] * gamma[i]).sum::<C64>() / alpha[order];
                corr[col] = corr[col] * c - psi;
            }
            solve_shifted(&h_new, c, &mut corr);
            if corr.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::Integration { t: t_new, reason: "non-finite stage solution".into() });
            }

            let y_new: Vec<C64> = y_predict.iter().zip(&corr).map(|(p, x)| p + x).collect();
            let scale = scale_of(&y_new, cfg);
            let err: Vec<C64> = corr.iter().map(|x| x * error_const[order]).collect();
            let error_norm = scaled_norm(&err, &scale);
            if error_norm > 1.0 {
                let factor = MIN_FACTOR.max(SAFETY * error_norm.powf(-1.0 / (order + 1) as f64));
                h_abs *= factor;
                change_d(&mut d, order, factor);
                n_equal_steps = 0;
            } else {
                break (t_new, error_norm);
            }
        };

        let t_old = t;
        t = t_new;
        steps += 1;
        n_equal_steps += 1;

        // Update the difference array; `corr` is the (order+1)-th difference.
        for c in 0..n {
            d[order + 2][c] = corr[c] - d[order + 1][c];
            d[order + 1][c] = corr[c];
        }
        for i in (0..=order).rev() {
            for c in 0..n {
                let next = d[i + 1][c];
                d[i][c] += next;
            }
        }

        if n_equal_steps > order {
            let scale = scale_of(&d[0], cfg);
            let error_m_norm = if order > 1 {
                let e: Vec<C64> = d[order].iter().map(|x| x * error_const[order - 1]).collect();
                scaled_norm(&e, &scale)
            } else {
                f64::INFINITY
            };
            let error_p_norm = if order < MAX_ORDER {
                let e: Vec<C64> = d[order + 2].iter().map(|x| x * error_const[order + 1]).collect();
                scaled_norm(&e, &scale)
            } else {
                f64::INFINITY
            };
            let norms = [error_m_norm, error_norm, error_p_norm];
            let factors: Vec<f64> = norms
                .iter()
                .enumerate()
                .map(|(i, e)| e.powf(-1.0 / (order + i) as f64))
                .collect();
            let mut best = 0;
            for i in 1..3 {
                if factors[i] > factors[best] {
                    best = i;
                }
            }
            order = order + best - 1;
            let factor = MAX_FACTOR.min(SAFETY * factors[best]);
            h_abs *= factor;
            change_d(&mut d, order, factor);
            n_equal_steps = 0;
        }

        // Dense output on the interpolating polynomial of this step.
        while next_record < records.len() && records[next_record] <= t {
            let tr = records[next_record];
            states.push(dense(&d, order, t, h_abs, tr));
            next_record += 1;
        }
        // The equation is linear and homogeneous, so rescaling the whole
        // difference array projects the history back onto unit norm.
        let (scale, drift) = renormalization(&d[0], t)?;
        max_drift = max_drift.max(drift);
        d.iter_mut().flatten().for_each(|z| *z *= scale);
        debug_assert!(t > t_old);
    }
    Ok(Outcome { states, steps, max_drift })
}

fn dense(d: &[Vec<C64>], order: usize, t: f64, h: f64, at: f64) -> Vec<C64> {
    let mut y = d[0].clone();
    let mut p = 1.0;
    for j in 0..order {
        let shift = t - h * j as f64;
        let denom = h * (j + 1) as f64;
        p *= (at - shift) / denom;
        for (y, x) in y.iter_mut().zip(&d[j + 1]) {
            *y += x * p;
        }
    }
    y
}
