use super::renormalization;
use super::IntegratorConfig;
use crate::models::ChainHamiltonian;
use crate::{Result, C64};

pub(super) struct Outcome {
    pub states: Vec<Vec<C64>>,
    pub steps: usize,
    pub max_drift: f64,
}

/// `out = −i·H·y`.
pub(super) fn rhs(h: &ChainHamiltonian, y: &[C64], out: &mut [C64]) {
    h.apply(y, out);
    out.iter_mut().for_each(|z| *z = C64::new(z.im, -z.re));
}

/// Classical fourth-order Runge–Kutta. Each record interval is split into
/// equal substeps no longer than `min(rk4_step, max_step)`.
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
    let target = cfg.rk4_step.min(cfg.max_step);
    let mut y = y0.to_vec();
    let mut states = Vec::with_capacity(records.len());
    states.push(y.clone());
    let zero = C64::new(0.0, 0.0);
    let (mut k1, mut k2, mut k3, mut k4) = (vec![zero; n], vec![zero; n], vec![zero; n], vec![zero; n]);
    let mut tmp = vec![zero; n];
    let mut steps = 0;
    let mut max_drift: f64 = 0.0;

    for w in records.windows(2) {
        let (start, end) = (w[0], w[1]);
        let m = ((end - start) / target).ceil().max(1.0) as usize;
        let h = (end - start) / m as f64;
        let mut h_start = provider(start)?;
        for s in 0..m {
            let t = start + s as f64 * h;
            let t_end = if s + 1 == m { end } else { start + (s + 1) as f64 * h };
            let h_mid = provider(t + 0.5 * h)?;
            let h_end = provider(t_end)?;

            rhs(&h_start, &y, &mut k1);
            for i in 0..n {
                tmp[i] = y[i] + k1[i] * (0.5 * h);
            }
            rhs(&h_mid, &tmp, &mut k2);
            for i in 0..n {
                tmp[i] = y[i] + k2[i] * (0.5 * h);
            }
            rhs(&h_mid, &tmp, &mut k3);
            for i in 0..n {
                tmp[i] = y[i] + k3[i] * h;
            }
            rhs(&h_end, &tmp, &mut k4);
            for i in 0..n {
                y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
            }
            h_start = h_end;
            steps += 1;
        }
        let (scale, drift) = renormalization(&y, end)?;
        max_drift = max_drift.max(drift);
        y.iter_mut().for_each(|z| *z *= scale);
        states.push(y.clone());
    }
    Ok(Outcome { states, steps, max_drift })
}
