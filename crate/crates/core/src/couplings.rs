//! Effective qubit–qubit couplings under longitudinal frequency modulation.
//!
//! Modulating qubit `j` as `ω_j + λ_j·cos(ω_0j·t)` dresses a static coupling
//! by Bessel functions of the drive ratios `α_j = λ_j/ω_0j`:
//!
//! * identical modulation frequencies: `P = a·Σ_n (−1)^n J_n(α₁)J_n(α₂)`,
//!   and `Q` alike with `b`;
//! * frequency matching (detuning equal to one drive frequency):
//!   `P = i·a·J_0(α₁)J_1(α₂)` and `Q = i·b·J_1(α₁)J_0(α₂)`.

use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

/// Largest `|x|` accepted by [`bessel_j`].
pub const MAX_ARGUMENT: f64 = 50.0;
/// Default truncation of the identical-frequency sum.
pub const DEFAULT_N_MAX: usize = 40;

const SERIES_LIMIT: f64 = 0.1;

fn check_argument(x: f64) -> Result<()> {
    if !x.is_finite() || x.abs() >= MAX_ARGUMENT {
        return Err(Error::OutOfRange(format!("Bessel argument {x} outside |x| < {MAX_ARGUMENT}")));
    }
    Ok(())
}

/// `J_n(x)` for `0 ≤ x ≤ 0.1` from the power series.
fn series(n: usize, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for k in 1..=n {
        term *= half / k as f64;
    }
    let q = -half * half;
    let mut sum = term;
    for k in 1..40 {
        term *= q / (k * (k + n)) as f64;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// `J_0(x), …, J_{n_max}(x)` for `x ≥ 0`.
///
/// Above `x = 0.1` the values come from Miller's downward recurrence,
/// normalized with `J_0² + 2·Σ_{k≥1} J_k² = 1`; below it from the power
/// series.
fn sequence_nonneg(n_max: usize, x: f64) -> Vec<f64> {
    if x <= SERIES_LIMIT {
        return (0..=n_max).map(|n| series(n, x)).collect();
    }
    let top = n_max.max(x.ceil() as usize);
    let mut start = top + 20 + (40.0 * top as f64).sqrt() as usize;
    start += start % 2;
    let mut out = vec![0.0; n_max + 1];
    let (mut next, mut cur) = (0.0, 1e-30);
    // J_start itself (start ≥ 2) enters the normalization sum.
    let mut norm_sq = 2.0 * cur * cur;
    for k in (1..=start).rev() {
        let prev = 2.0 * k as f64 / x * cur - next;
        next = cur;
        cur = prev;
        // `cur` now holds the unnormalized J_{k−1}.
        if k - 1 <= n_max {
            out[k - 1] = cur;
        }
        norm_sq += if k - 1 == 0 { cur * cur } else { 2.0 * cur * cur };
        if cur.abs() > 1e150 {
            cur *= 1e-150;
            next *= 1e-150;
            norm_sq *= 1e-300;
            out.iter_mut().for_each(|v| *v *= 1e-150);
        }
    }
    let scale = 1.0 / norm_sq.sqrt();
    out.iter_mut().for_each(|v| *v *= scale);
    out
}

/// `J_0(x), …, J_{n_max}(x)`.
pub fn bessel_sequence(n_max: usize, x: f64) -> Result<Vec<f64>> {
    check_argument(x)?;
    let mut v = sequence_nonneg(n_max, x.abs());
    if x < 0.0 {
        for (n, val) in v.iter_mut().enumerate() {
            if n % 2 == 1 {
                *val = -*val;
            }
        }
    }
    Ok(v)
}

/// Bessel function of the first kind `J_n(x)` for any integer `n` and
/// `|x| < 50`, accurate to about `1e-13` absolute.
pub fn bessel_j(n: i32, x: f64) -> Result<f64> {
    let m = n.unsigned_abs() as usize;
    let v = bessel_sequence(m, x)?[m];
    Ok(if n < 0 && m % 2 == 1 { -v } else { v })
}

/// How the two qubits of a bond are modulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    IdenticalFrequencies,
    FrequencyMatched,
}

/// Which bond of the dimer the matched coupling refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BondParity {
    /// Intracell bond: `i·a·J_0(α₁)·J_1(α₂)`.
    P,
    /// Intercell bond: `i·b·J_1(α₁)·J_0(α₂)`.
    Q,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveCoupling {
    pub value: C64,
    pub scheme: Scheme,
}

/// Bond modulation parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModulationSpec {
    pub alpha_1: f64,
    pub alpha_2: f64,
    pub bare_coupling: f64,
    pub scheme: Scheme,
}

impl ModulationSpec {
    pub fn evaluate(&self, parity: BondParity) -> Result<EffectiveCoupling> {
        match self.scheme {
            Scheme::IdenticalFrequencies => effective_coupling_identical(
                self.bare_coupling,
                self.alpha_1,
                self.alpha_2,
                DEFAULT_N_MAX,
            ),
            Scheme::FrequencyMatched => {
                effective_coupling_matched(self.bare_coupling, self.alpha_1, self.alpha_2, parity)
            }
        }
    }
}

/// `bare·Σ_{n=−n_max}^{n_max} (−1)^n J_n(α₁)·J_n(α₂)`.
///
/// The full series sums to `bare·J_0(α₁ + α₂)`; terms beyond `n_max = 40`
/// are below `1e-30` for `|α| ≤ 2`.
pub fn effective_coupling_identical(
    bare: f64,
    alpha_1: f64,
    alpha_2: f64,
    n_max: usize,
) -> Result<EffectiveCoupling> {
    let j1 = bessel_sequence(n_max, alpha_1)?;
    let j2 = bessel_sequence(n_max, alpha_2)?;
    // J_{−n}(x)·J_{−n}(y) = J_n(x)·J_n(y), so negative orders double up.
    let tail: f64 = (1..=n_max)
        .map(|n| if n % 2 == 0 { 1.0 } else { -1.0 } * j1[n] * j2[n])
        .sum();
    let sum = j1[0] * j2[0] + 2.0 * tail;
    Ok(EffectiveCoupling { value: C64::new(bare * sum, 0.0), scheme: Scheme::IdenticalFrequencies })
}

/// Purely imaginary coupling under frequency matching.
pub fn effective_coupling_matched(
    bare: f64,
    alpha_1: f64,
    alpha_2: f64,
    parity: BondParity,
) -> Result<EffectiveCoupling> {
    let product = match parity {
        BondParity::P => bessel_j(0, alpha_1)? * bessel_j(1, alpha_2)?,
        BondParity::Q => bessel_j(1, alpha_1)? * bessel_j(0, alpha_2)?,
    };
    Ok(EffectiveCoupling { value: C64::new(0.0, bare * product), scheme: Scheme::FrequencyMatched })
}
