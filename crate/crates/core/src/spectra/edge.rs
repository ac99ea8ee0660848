use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;

/// Closed-form SSH edge states `|L⟩` (odd sites) and `|R⟩` (even sites).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeStatePair {
    pub left: Vec<f64>,
    pub right: Vec<f64>,
    /// `λ = −a/b`.
    pub lambda: f64,
    /// Normalization `Ξ = √((1 − λ²)/(1 − λ^{2L}))`.
    pub xi_norm: f64,
}

/// Normalization factor `Ξ` for ratio `λ` over `cells` cells.
pub(crate) fn xi_norm(lambda: f64, cells: usize) -> f64 {
    if lambda == 0.0 {
        return 1.0;
    }
    ((1.0 - lambda * lambda) / (1.0 - lambda.powi(2 * cells as i32))).sqrt()
}

fn check_phase(a: f64, b: f64, outer: &str) -> Result<()> {
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidParameter("couplings must be finite".into()));
    }
    if a.abs() >= b.abs() {
        return Err(Error::PhaseDomain(format!(
            "edge states need |a| < |{outer}|, got a = {a}, {outer} = {b}"
        )));
    }
    Ok(())
}

fn check_cells(cells: usize) -> Result<()> {
    if cells == 0 {
        Err(Error::InvalidDimension("chain needs at least one cell".into()))
    } else {
        Ok(())
    }
}

/// Left and right edge states of an SSH chain in its topological phase.
pub fn analytic_edge_states(a: f64, b: f64, cells: usize) -> Result<EdgeStatePair> {
    check_phase(a, b, "b")?;
    check_cells(cells)?;
    let lambda = -a / b;
    let xi = xi_norm(lambda, cells);
    let mut left = vec![0.0; 2 * cells];
    let mut right = vec![0.0; 2 * cells];
    for n in 0..cells {
        left[2 * n] = xi * lambda.powi(n as i32);
        right[2 * n + 1] = xi * lambda.powi((cells - 1 - n) as i32);
    }
    Ok(EdgeStatePair { left, right, lambda, xi_norm: xi })
}

/// The four closed-form edge states of a mirror-symmetric (`a = b`)
/// trimer chain.
///
/// Left states live on the A and B sites of each cell, right states on B
/// and C. `L±` is not orthogonal to `R±`: both touch the B sites, giving
/// an overlap of order `L·Ξ²·λ^{L−1}/2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrimerEdgeStates {
    pub left_plus: Vec<f64>,
    pub left_minus: Vec<f64>,
    pub right_plus: Vec<f64>,
    pub right_minus: Vec<f64>,
    /// `λ = a/c`.
    pub lambda: f64,
    pub xi_norm: f64,
}

/// Edge states of the trimer chain with `a = b` intracell and `c`
/// intercell couplings.
pub fn trimer_edge_states(a: f64, c: f64, cells: usize) -> Result<TrimerEdgeStates> {
    check_phase(a, c, "c")?;
    check_cells(cells)?;
    let lambda = a / c;
    let xi = xi_norm(lambda, cells);
    let n_sites = 3 * cells;
    let build = |sign: f64, right: bool| {
        // `sign` is +1 for the "+" state, whose ratio is −λ.
        let ratio = -sign * lambda;
        let mut v = vec![0.0; n_sites];
        for n in 0..cells {
            let power = if right { cells - 1 - n } else { n };
            let amp = xi * ratio.powi(power as i32) * FRAC_1_SQRT_2;
            let first = 3 * n + usize::from(right);
            v[first] = amp;
            v[first + 1] = sign * amp;
        }
        v
    };
    Ok(TrimerEdgeStates {
        left_plus: build(1.0, false),
        left_minus: build(-1.0, false),
        right_plus: build(1.0, true),
        right_minus: build(-1.0, true),
        lambda,
        xi_norm: xi,
    })
}

/// Localization length `ξ = 1/(ln|b| − ln|a|)`; `ξ = 0` at `a = 0`.
pub fn localization_length(a: f64, b: f64) -> Result<f64> {
    check_phase(a, b, "b")?;
    if a == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 / (b.abs().ln() - a.abs().ln()))
}

/// Probability weight on the first and last `n_edge_sites` sites (counted
/// once if the two ends overlap).
pub fn edge_weight(v: &[f64], n_edge_sites: usize) -> f64 {
    let n = v.len();
    let k = n_edge_sites.min(n);
    v.iter()
        .enumerate()
        .filter(|&(i, _)| i < k || i >= n - k)
        .map(|(_, x)| x * x)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn norm2(v: &[f64]) -> f64 {
        v.iter().map(|x| x * x).sum()
    }

    fn dot(u: &[f64], v: &[f64]) -> f64 {
        u.iter().zip(v).map(|(a, b)| a * b).sum()
    }

    #[test]
    fn decoupled_limit() {
        let e = analytic_edge_states(0.0, 1.0, 4).unwrap();
        assert_eq!(e.xi_norm, 1.0);
        assert_eq!(e.left, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(e.right, vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn ssh_states_are_normalized_and_chiral() {
        let e = analytic_edge_states(0.1, 1.0, 7).unwrap();
        assert!((e.xi_norm.powi(2) - 0.99).abs() < 1e-12);
        assert!((norm2(&e.left) - 1.0).abs() < 1e-14);
        assert!((norm2(&e.right) - 1.0).abs() < 1e-14);
        for j in 0..14 {
            if j % 2 == 1 {
                assert_eq!(e.left[j], 0.0);
            } else {
                assert_eq!(e.right[j], 0.0);
            }
        }
        assert!((e.left[2] / e.left[0] + 0.1).abs() < 1e-15);
    }

    #[test]
    fn phase_errors() {
        assert!(matches!(analytic_edge_states(1.0, 1.0, 3), Err(Error::PhaseDomain(_))));
        assert!(matches!(trimer_edge_states(2.0, 1.0, 3), Err(Error::PhaseDomain(_))));
        assert!(matches!(localization_length(-1.5, 1.0), Err(Error::PhaseDomain(_))));
        assert!(analytic_edge_states(0.1, 1.0, 0).is_err());
    }

    #[test]
    fn localization_length_values() {
        let xi = localization_length(0.1, 1.0).unwrap();
        assert!((xi - 1.0 / 10f64.ln()).abs() < 1e-15);
        assert!(localization_length(0.99, 1.0).unwrap() > 99.0);
        assert_eq!(localization_length(0.0, 1.0).unwrap(), 0.0);
        // Amplitude decay per cell is exp(−1/ξ) in magnitude.
        let e = analytic_edge_states(0.1, 1.0, 7).unwrap();
        for n in 1..7 {
            let expect = e.left[0].abs() * (-(n as f64) / xi).exp();
            assert!((e.left[2 * n].abs() - expect).abs() <= 1e-12 * expect.max(1e-300));
        }
    }

    #[test]
    fn edge_weight_cases() {
        let mut e1 = vec![0.0; 14];
        e1[0] = 1.0;
        assert_eq!(edge_weight(&e1, 1), 1.0);
        let uniform = vec![(1.0f64 / 14.0).sqrt(); 14];
        assert!((edge_weight(&uniform, 1) - 2.0 / 14.0).abs() < 1e-15);
        let e = analytic_edge_states(0.1, 1.0, 7).unwrap();
        assert!((edge_weight(&e.left, 2) - 0.99).abs() < 1e-10);
        assert!((edge_weight(&[0.6, 0.8], 5) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn trimer_states_structure() {
        let s = trimer_edge_states(0.0, 1.0, 3).unwrap();
        let h = FRAC_1_SQRT_2;
        assert_eq!(&s.left_plus[..3], &[h, h, 0.0]);
        assert_eq!(&s.left_minus[..3], &[h, -h, 0.0]);
        assert_eq!(&s.right_minus[6..], &[0.0, h, -h]);

        let s = trimer_edge_states(1.0, 2.0, 8).unwrap();
        for v in [&s.left_plus, &s.left_minus, &s.right_plus, &s.right_minus] {
            assert!((norm2(v) - 1.0).abs() < 1e-14);
        }
        for n in 0..8 {
            assert_eq!(s.left_plus[3 * n + 2], 0.0);
            assert_eq!(s.left_minus[3 * n + 2], 0.0);
            assert_eq!(s.right_plus[3 * n], 0.0);
            assert_eq!(s.right_minus[3 * n], 0.0);
        }
        assert!(dot(&s.left_plus, &s.left_minus).abs() < 1e-15);
        assert!(dot(&s.right_plus, &s.right_minus).abs() < 1e-15);
    }

    #[test]
    fn trimer_left_right_overlap_closed_form() {
        let (a, c, cells) = (0.4, 1.0, 6);
        let s = trimer_edge_states(a, c, cells).unwrap();
        let lambda = a / c;
        let xi2 = s.xi_norm.powi(2);
        for (sign, l, r) in [(1.0, &s.left_plus, &s.right_plus), (-1.0, &s.left_minus, &s.right_minus)] {
            let expect = 0.5 * cells as f64 * xi2 * (-sign * lambda).powi(cells as i32 - 1) * sign;
            assert!((dot(l, r) - expect).abs() < 1e-14, "{} vs {expect}", dot(l, r));
        }
        // Cross-family overlaps alternate along the shared B sites and
        // cancel only for an even number of cells.
        assert!(dot(&s.left_plus, &s.right_minus).abs() < 1e-15);
        let odd = trimer_edge_states(a, c, 5).unwrap();
        let alt = 0.5 * odd.xi_norm.powi(2) * lambda.powi(4);
        assert!((dot(&odd.left_plus, &odd.right_minus) - alt).abs() < 1e-14);
    }
}
