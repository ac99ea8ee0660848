mod common;

use common::{jacobi_eigh, rabi_populations};
use proptest::prelude::*;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use topochain::effective::*;
use topochain::*;

fn rm_schedule(a: f64, u_amp: f64, period: f64) -> Schedule {
    let params = BTreeMap::from([
        (Param::A, Term::constant(a)),
        (Param::B, Term::constant(1.0)),
        (Param::U, Term::sin(u_amp, 0.0, 1.0)),
    ]);
    Schedule::new(period, 1, params).unwrap()
}

#[test]
fn reduce_rm_examples() {
    assert_eq!(reduce_rm(0.0, 1.0, 0.3, 7).unwrap().g, 0.0);
    let g = reduce_rm(0.1, 1.0, 0.0, 7).unwrap().g;
    assert!((g.abs() - 9.9e-8).abs() < 1e-9, "{g}");
    let r = reduction_report(0.5, 1.0, 0.0, 7).unwrap();
    assert!(r.rel_err <= 0.05, "{}", r.rel_err);
    assert!(reduce_rm(1.0, 1.0, 0.0, 7).is_err());
}

#[test]
fn lz_energies_match_midgap_levels() {
    let (a, u, cells) = (0.2, 0.05, 7);
    let lambda: f64 = a;
    assert!(lambda.powi(cells) <= 1e-4);
    let (lo, hi) = lz_eigen(&reduce_rm(a, 1.0, u, cells as usize).unwrap());
    let s = eigendecompose(&build_rice_mele(cells as usize, a, 1.0, u).unwrap()).unwrap();
    let pair = s.nearest(0.0, 2);
    let (elo, ehi) = (s.eigenvalues[pair[0]], s.eigenvalues[pair[1]]);
    assert!((lo - elo).abs() / elo.abs() <= 0.05 && (hi - ehi).abs() / ehi.abs() <= 0.05);
}

#[test]
fn path_classes() {
    let n = 401;
    let a = LZPath::arc(1.0, 200.0).sample(n);
    let b = LZPath::line(1.0, 0.0, 200.0).sample(n);
    let c = LZPath::constant(1.0, 0.1, 200.0).sample(n);
    assert_eq!(classify_path(&a, default_tolerance(&a)).unwrap(), PathClass::AroundCritical);
    assert_eq!(classify_path(&b, default_tolerance(&b)).unwrap(), PathClass::ThroughCritical);
    assert_eq!(classify_path(&c, default_tolerance(&c)).unwrap(), PathClass::NoCrossing);
    assert!(classify_path(&a, 0.0).is_err());
    assert!(classify_path(&a[..2], 1e-6).is_err());
}

#[test]
fn path_c_frame_limits() {
    assert_eq!(path_c_frame(0.0).unwrap(), [[1.0, 0.0], [-0.0, 1.0]]);
    let f = path_c_frame(PI / 2.0 - 1e-9).unwrap();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    assert!((f[0][0] - s).abs() < 1e-9 && (f[0][1] - s).abs() < 1e-9);
    assert!(path_c_frame(PI / 2.0).is_err());
    // Diagonal entries are ±u/cos θ.
    let (theta, u) = (PI / 6.0, 0.8);
    let f = path_c_frame(theta).unwrap();
    let h = [[u, theta.tan() * u], [theta.tan() * u, -u]];
    let d00: f64 = (0..2).flat_map(|k| (0..2).map(move |l| (k, l))).map(|(k, l)| f[0][k] * h[k][l] * f[0][l]).sum();
    assert!((d00 - u / theta.cos()).abs() < 1e-12);
}

#[test]
fn lz_rabi_and_persistence() {
    let cfg = IntegratorConfig::default();
    let start = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    let g = 0.3;
    let traj = lz_evolve(&LZPath::constant(0.0, g, 20.0), start, &cfg, 41).unwrap();
    for (t, s) in traj.times.iter().zip(&traj.states) {
        assert!((s.populations()[1] - rabi_populations(g, *t).1).abs() < 1e-6);
    }
    let traj = lz_evolve(&LZPath::line(1.0, 0.0, 200.0), start, &cfg, 11).unwrap();
    assert!((traj.final_state().populations()[0] - 1.0).abs() < 1e-9);
}

#[test]
fn reduction_windows() {
    let cfg = IntegratorConfig::default();
    let period = 100.0;
    let opt = compare_reduction(&Schedule::optimized_pump(period, 1), 7, (0.0, 0.1 * period), &cfg, 101).unwrap();
    assert!(opt.max_deviation <= 0.05, "{}", opt.max_deviation);

    let off = compare_reduction(&rm_schedule(0.0, 0.25, period), 7, (0.0, period), &cfg, 51).unwrap();
    assert!(off.max_deviation <= 1e-9, "{}", off.max_deviation);

    // The plain pump passes through a ≥ b mid-cycle, where the edge basis is undefined.
    let s = Schedule::standard_pump(period, 1);
    assert!(compare_reduction(&s, 7, (0.4 * period, 0.6 * period), &cfg, 51).is_err());
}

#[test]
fn reduction_improves_as_edges_separate() {
    let cells = 7;
    let cfg = IntegratorConfig::default();
    let mut deviations = Vec::new();
    for target in [1e-2, 1e-4, 1e-6] {
        let a = f64::powf(target, 1.0 / cells as f64);
        let cmp = compare_reduction(&rm_schedule(a, 0.25, 100.0), cells, (0.0, 100.0), &cfg, 201).unwrap();
        deviations.push(cmp.max_deviation);
    }
    assert!(deviations.windows(2).all(|w| w[1] < w[0]), "{deviations:?}");
}

#[test]
fn trimer_reduction() {
    let (hp, hm) = reduce_trimer(0.0, 1.0, [0.5, 2.0, 0.1], 4).unwrap();
    assert_eq!((hp.g, hm.g), (0.0, 0.0));
    let (hp, _) = reduce_trimer(0.1, 1.0, [2.0, 2.0, 0.0], 7).unwrap();
    assert!((hp.g - 7.33e-6).abs() < 1e-8);
    // u = w gives a degenerate diagonal and splitting 2|g|.
    let (hp, hm) = reduce_trimer(0.3, 1.0, [0.4, 1.0, 0.4], 5).unwrap();
    for sys in [hp, hm] {
        let (lo, hi) = lz_eigen(&sys);
        assert!((hi - lo - 2.0 * sys.g.abs()).abs() < 1e-15);
    }
    assert!(reduce_trimer_checked([0.3, 0.4, 1.0], [0.0; 3], 5).is_err());
    assert!(reduce_trimer_checked([0.3, 0.3, 1.0], [0.0; 3], 5).is_ok());
}

proptest! {
    #[test]
    fn lz_eigen_matches_brute_force(u in -5.0f64..5.0, g in -5.0f64..5.0, offset in -3.0f64..3.0) {
        let sys = TwoLevelSystem { u, g, offset };
        let m = sys.matrix();
        let (e, _) = jacobi_eigh(vec![m[0].to_vec(), m[1].to_vec()]);
        let (lo, hi) = lz_eigen(&sys);
        prop_assert!((lo - e[0]).abs() <= 1e-12 * (1.0 + u.abs() + g.abs() + offset.abs()));
        prop_assert!((hi - e[1]).abs() <= 1e-12 * (1.0 + u.abs() + g.abs() + offset.abs()));
    }

    #[test]
    fn coupling_parity_under_a_flip(a in -0.9f64..0.9, cells in 1usize..12) {
        let g = reduce_rm(a, 1.0, 0.0, cells).unwrap().g;
        let gm = reduce_rm(-a, 1.0, 0.0, cells).unwrap().g;
        // g = Ξ²·a·λ^(L−1) with λ = −a/b: both the prefactor and λ flip.
        let sign = if cells % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((g * gm - sign * g * g).abs() <= 1e-15 * (1.0 + g * g));
    }

    #[test]
    fn classification_ignores_time_reparameterization(scale in 0.1f64..10.0, n in 5usize..200, which in 0usize..3) {
        let path = match which {
            0 => LZPath::arc(1.0, 50.0),
            1 => LZPath::line(1.0, 0.0, 50.0),
            _ => LZPath::line(1.0, 0.4, 50.0),
        };
        let samples = path.sample(n);
        let stretched: Vec<PathSample> = samples.iter().map(|s| PathSample { t: s.t * scale + 3.0, ..*s }).collect();
        let tol = default_tolerance(&samples);
        prop_assert_eq!(classify_path(&samples, tol).unwrap(), classify_path(&stretched, tol).unwrap());
    }

    #[test]
    fn frame_is_orthogonal_and_diagonalizes(theta in -1.5f64..1.5, u in -2.0f64..2.0) {
        let f = path_c_frame(theta).unwrap();
        let dot = f[0][0] * f[1][0] + f[0][1] * f[1][1];
        prop_assert!(dot.abs() < 1e-15);
        let h = [[u, theta.tan() * u], [theta.tan() * u, -u]];
        let d01: f64 = (0..2).flat_map(|k| (0..2).map(move |l| (k, l))).map(|(k, l)| f[0][k] * h[k][l] * f[1][l]).sum();
        prop_assert!(d01.abs() <= 1e-12 * (1.0 + h[0][1].abs()));
    }
}
