mod common;

use common::{dense, jacobi_eigh};
use proptest::prelude::*;
use topochain::effective::reduce_rm;
use topochain::linalg::tridiagonal_eigvals;
use topochain::*;

/// Roots of E⁴ − (2a² + b²)E² + a⁴ = 0, the 4-site SSH characteristic
/// polynomial, via the quadratic formula in E².
fn quartic_roots(a: f64, b: f64) -> Vec<f64> {
    let p = 2.0 * a * a + b * b;
    let disc = (p * p - 4.0 * a.powi(4)).sqrt();
    let (lo, hi) = (((p - disc) / 2.0).sqrt(), ((p + disc) / 2.0).sqrt());
    vec![-hi, -lo, lo, hi]
}

#[test]
fn four_site_ssh() {
    let s = eigendecompose(&build_ssh(2, 0.1, 1.0, 0.0).unwrap()).unwrap();
    let expect = [-1.0099019, -0.0099015, 0.0099015, 1.0099019];
    for ((e, q), x) in s.eigenvalues.iter().zip(quartic_roots(0.1, 1.0)).zip(expect) {
        assert!((e - q).abs() < 1e-12);
        assert!((e - x).abs() < 1e-6);
    }
}

#[test]
fn zero_mode_splitting_matches_coupling() {
    let cells = 7;
    for a in [0.05, 0.1, 0.2] {
        let lambda: f64 = a;
        assert!(lambda.powi(cells as i32) <= 1e-4);
        let s = eigendecompose(&build_ssh(cells, a, 1.0, 0.0).unwrap()).unwrap();
        let idx = s.nearest(0.0, 2);
        let half = 0.5 * (s.eigenvalues[idx[1]] - s.eigenvalues[idx[0]]).abs();
        let g = reduce_rm(a, 1.0, 0.0, cells).unwrap().g.abs();
        assert!((g - half).abs() / half <= 0.05, "a = {a}: g {g} vs {half}");
    }
}

#[test]
fn analytic_pair_spans_zero_modes() {
    let (a, b, cells) = (0.1, 1.0, 7);
    let pair = analytic_edge_states(a, b, cells).unwrap();
    assert!((pair.xi_norm.powi(2) - 0.99).abs() < 1e-3);
    for n in 1..cells {
        let ratio = pair.left[2 * n] / pair.left[2 * (n - 1)];
        assert!((ratio + 0.1).abs() < 1e-14);
    }
    let s = eigendecompose(&build_ssh(cells, a, b, 0.0).unwrap()).unwrap();
    for v in s.nearest(0.0, 2).into_iter().map(|i| &s.eigenvectors[i]) {
        let w: f64 = [&pair.left, &pair.right].iter().map(|e| e.iter().zip(v).map(|(x, y)| x * y).sum::<f64>().powi(2)).sum();
        assert!(w >= 1.0 - 1e-6, "{w}");
    }
}

#[test]
fn localization_examples() {
    assert!((localization_length(0.1, 1.0).unwrap() - 0.43429448190325176).abs() < 1e-12);
    assert!(localization_length(0.99, 1.0).unwrap() > 99.0);
    assert_eq!(localization_length(0.0, 1.0).unwrap(), 0.0);
    assert!(localization_length(1.0, 1.0).is_err());

    let pair = analytic_edge_states(0.3, 1.0, 6).unwrap();
    let xi = localization_length(0.3, 1.0).unwrap();
    for n in 0..6 {
        let j = 2 * n;
        let predicted = pair.left[0].abs() * (-(j as f64) / (2.0 * xi)).exp();
        assert!((pair.left[j].abs() - predicted).abs() < 1e-12);
    }
}

#[test]
fn edge_weight_examples() {
    let mut e1 = vec![0.0; 14];
    e1[0] = 1.0;
    assert_eq!(edge_weight(&e1, 1), 1.0);
    let uniform = vec![1.0 / 14f64.sqrt(); 14];
    assert!((edge_weight(&uniform, 1) - 2.0 / 14.0).abs() < 1e-15);
    let pair = analytic_edge_states(0.1, 1.0, 7).unwrap();
    assert!((edge_weight(&pair.left, 2) - pair.xi_norm.powi(2)).abs() < 1e-12);
}

#[test]
fn trimer_hybrids_match_lower_gap() {
    let (a, c, cells) = (1.0, 2.0, 8);
    let edges = trimer_edge_states(a, c, cells).unwrap();
    let s = eigendecompose(&build_trimer(cells, [a, a, c], [0.0; 3]).unwrap()).unwrap();
    let idx = s.nearest(-a, 2);
    for sign in [1.0, -1.0] {
        let h: Vec<f64> = edges.left_minus.iter().zip(&edges.right_minus).map(|(l, r)| l + sign * r).collect();
        let n2: f64 = h.iter().map(|x| x * x).sum();
        let w: f64 = idx.iter().map(|&i| s.eigenvectors[i].iter().zip(&h).map(|(x, y)| x * y).sum::<f64>().powi(2)).sum::<f64>() / n2;
        assert!(w >= 0.999, "{w}");
    }
}

#[test]
fn pump_trace_flags_edges_and_optimized_gap_stays_open() {
    let trace = instantaneous_spectrum(&Schedule::optimized_pump(100.0, 1), ModelKind::RiceMele, 7, 101).unwrap();
    // The in-gap pair stays separated from the bulk bands all cycle.
    let mut min_gap = f64::INFINITY;
    for s in &trace.spectra {
        let e = &s.eigenvalues;
        let pair = s.nearest(0.0, 2);
        let (lo, hi) = (pair[0], pair[1]);
        min_gap = min_gap.min(e[hi + 1] - e[hi]).min(e[lo] - e[lo - 1]);
    }
    assert!(min_gap > 0.05, "{min_gap}");
    assert!(trace.edge_flags[0][6] && trace.edge_flags[0][7]);
}

fn chain() -> impl Strategy<Value = ChainHamiltonian> {
    (1usize..=24).prop_flat_map(|n| {
        (prop::collection::vec(-3.0f64..3.0, n), prop::collection::vec(-3.0f64..3.0, n - 1))
            .prop_map(|(d, o)| ChainHamiltonian::new(d, o).unwrap())
    })
}

proptest! {
    #[test]
    fn residuals_and_orthonormality(h in chain()) {
        let s = eigendecompose(&h).unwrap();
        prop_assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        for j in 0..s.len() {
            prop_assert!(s.residual(&h, j) <= 1e-10 * s.eigenvalues[j].abs().max(1.0));
            for k in 0..s.len() {
                let dot: f64 = s.eigenvectors[j].iter().zip(&s.eigenvectors[k]).map(|(x, y)| x * y).sum();
                prop_assert!((dot - f64::from(u8::from(j == k))).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn sign_convention(h in chain()) {
        for v in eigendecompose(&h).unwrap().eigenvectors {
            let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let first = v.iter().position(|x| x.abs() >= max * (1.0 - 1e-10)).unwrap();
            prop_assert!(v[first] > 0.0);
        }
    }

    #[test]
    fn agrees_with_jacobi(h in chain()) {
        let ours = tridiagonal_eigvals(h.diagonal(), h.offdiagonal()).unwrap();
        let (oracle, _) = jacobi_eigh(dense(&h));
        for (x, y) in ours.iter().zip(&oracle) {
            prop_assert!((x - y).abs() <= 1e-10 * h.norm_inf().max(1.0));
        }
    }

    #[test]
    fn chiral_spectrum(n in 1usize..30, off in prop::collection::vec(-2.0f64..2.0, 29)) {
        let h = ChainHamiltonian::new(vec![0.0; n], off[..n - 1].to_vec()).unwrap();
        let e = eigendecompose(&h).unwrap().eigenvalues;
        for (x, y) in e.iter().zip(e.iter().rev()) {
            prop_assert!((x + y).abs() <= 1e-10);
        }
    }

    #[test]
    fn edge_pair_structure(a in -0.95f64..0.95, cells in 1usize..12) {
        let p = analytic_edge_states(a, 1.0, cells).unwrap();
        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
        prop_assert!((norm(&p.left) - 1.0).abs() < 1e-12);
        prop_assert!((norm(&p.right) - 1.0).abs() < 1e-12);
        for j in 0..2 * cells {
            if j % 2 == 1 { prop_assert_eq!(p.left[j], 0.0); } else { prop_assert_eq!(p.right[j], 0.0); }
        }
    }

    #[test]
    fn trimer_edge_support(a in -0.95f64..0.95, cells in 1usize..10) {
        let t = trimer_edge_states(a, 1.0, cells).unwrap();
        for n in 0..cells {
            prop_assert_eq!(t.left_plus[3 * n + 2], 0.0);
            prop_assert_eq!(t.left_minus[3 * n + 2], 0.0);
            prop_assert_eq!(t.right_plus[3 * n], 0.0);
            prop_assert_eq!(t.right_minus[3 * n], 0.0);
        }
        let dot: f64 = t.left_plus.iter().zip(&t.left_minus).map(|(x, y)| x * y).sum();
        prop_assert!(dot.abs() < 1e-12);
    }
}
