mod common;

use common::{jacobi_eigh, realify};
use topochain::fluxcircuit::*;
use topochain::linalg::eigh;
use topochain::C64;

fn circuit() -> FluxQubitSpec {
    FluxQubitSpec::default()
}

#[test]
fn spec_json_names() {
    let json = serde_json::to_value(circuit()).unwrap();
    for key in ["EJ", "EJ_over_EC", "alpha", "beta", "kappa", "N", "n", "charge_cutoff"] {
        assert!(json.get(key).is_some(), "{key}");
    }
    assert!(json.get("EC").is_none());
    let back: FluxQubitSpec = serde_json::from_value(json).unwrap();
    assert_eq!(back, circuit());
    assert!(serde_json::from_str::<FluxQubitSpec>(r#"{"EJ":1,"bogus":2}"#).is_err());
}

#[test]
fn realified_oracle_at_small_cutoff() {
    let spec = circuit().with_cutoff(4);
    for (fa, fe) in [(0.2, 0.0), (0.1, 0.07), (0.33, -0.4)] {
        let h = build_charge_hamiltonian(&spec, fa, fe).unwrap();
        assert_eq!(h.dim(), 81);
        let dense: Vec<Vec<C64>> = (0..81).map(|i| h.matrix().row(i).to_vec()).collect();
        let (oracle, _) = jacobi_eigh(realify(&dense));
        let ours = eigh(h.matrix()).unwrap().values;
        for (k, e) in ours.iter().enumerate() {
            assert!((e - oracle[2 * k]).abs() < 1e-10 && (e - oracle[2 * k + 1]).abs() < 1e-10);
        }
    }
}

#[test]
fn hermitian_for_all_fluxes() {
    let spec = circuit().with_cutoff(6);
    for fa in [0.0, 0.13, 0.3] {
        for fe in [-0.5, 0.0, 0.01, 0.77] {
            let h = build_charge_hamiltonian(&spec, fa, fe).unwrap();
            assert!(h.matrix().hermiticity_residual() <= 1e-15);
            assert!(flux_derivative(&spec, fa, fe).unwrap().matrix().hermiticity_residual() <= 1e-15);
        }
    }
}

#[test]
fn derivative_matches_finite_difference() {
    let spec = circuit();
    let h = 1e-6;
    for (fa, fe) in [(0.2, 0.0), (0.1, 0.3)] {
        let d = flux_derivative(&spec, fa, fe).unwrap();
        let plus = build_charge_hamiltonian(&spec, fa, fe + h).unwrap();
        let minus = build_charge_hamiltonian(&spec, fa, fe - h).unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..d.dim() {
            for j in 0..d.dim() {
                let fd = (plus.matrix().get(i, j) - minus.matrix().get(i, j)) / (2.0 * h);
                worst = worst.max((fd - d.matrix().get(i, j)).norm());
            }
        }
        assert!(worst <= 1e-6, "{worst}");
    }
}

#[test]
fn optimal_point_symmetry() {
    let spec = circuit();
    let h = build_charge_hamiltonian(&spec, 0.2, 0.0).unwrap();
    assert!(h.parity_commutator_norm() <= 1e-12);
    let ch = coupling_elements(&spec, 0.2, 0.0).unwrap();
    assert!(ch.g_par <= 1e-8, "{}", ch.g_par);
    let (i0, i1) = persistent_currents(&spec, 0.2, 0.0).unwrap();
    assert!(i0.abs() <= 1e-8 && i1.abs() <= 1e-8);
}

#[test]
fn transverse_coupling_peaks_at_optimal_point() {
    let spec = circuit();
    let centre = coupling_elements(&spec, 0.2, 0.0).unwrap().g_perp;
    for fe in [-0.01, -0.005, 0.005, 0.01] {
        assert!(coupling_elements(&spec, 0.2, fe).unwrap().g_perp <= centre);
    }
}

#[test]
fn ground_current_is_odd() {
    let spec = circuit().with_cutoff(10);
    for fe in [0.003, 0.02, 0.1] {
        let (p, _) = persistent_currents(&spec, 0.2, fe).unwrap();
        let (m, _) = persistent_currents(&spec, 0.2, -fe).unwrap();
        assert!((p + m).abs() <= 1e-8, "{p} {m}");
    }
}

#[test]
fn cutoff_convergence_of_gap() {
    let fine = qubit_gap(&circuit(), 0.2).unwrap();
    let coarse = qubit_gap(&circuit().with_cutoff(10), 0.2).unwrap();
    assert!((fine - coarse).abs() / fine <= 1e-6);
}

#[test]
fn lowest_pair_is_isolated() {
    let e = qubit_levels(&circuit(), 0.2, 0.0, 3).unwrap();
    assert!(e[2] - e[1] > 2.0 * (e[1] - e[0]), "{e:?}");
}

#[test]
fn gap_is_tunable_and_smooth() {
    let spec = circuit().with_cutoff(10);
    let grid: Vec<f64> = (0..=6).map(|i| 0.05 * f64::from(i)).collect();
    let gaps: Vec<f64> = grid.iter().map(|&fa| qubit_gap(&spec, fa).unwrap()).collect();
    assert!(gaps.iter().all(|&g| g >= 0.0));
    let (lo, hi) = gaps.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &g| (l.min(g), h.max(g)));
    assert!((hi - lo) / hi > 0.01, "{gaps:?}");
    for &fa in &grid[..6] {
        let g0 = qubit_gap(&spec, fa).unwrap();
        let slope = (qubit_gap(&spec, fa + 0.01).unwrap() - g0).abs() / 0.01;
        let step = (qubit_gap(&spec, fa + 1e-3).unwrap() - g0).abs();
        assert!(step <= 10.0 * slope.max(1e-9) * 1e-3, "f_alpha = {fa}");
    }
}

#[test]
fn sweep_rows() {
    let spec = circuit().with_cutoff(8);
    let rows = flux_sweep(&spec, 0.2, &[-0.02, 0.0, 0.02], 4).unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.levels.len() == 4));
    assert!(rows[1].g_par <= 1e-8);
    assert!((rows[0].levels[0] - rows[2].levels[0]).abs() < 1e-10);
    assert!(flux_sweep(&spec, 0.2, &[0.0], 0).is_err());
    assert_eq!(flux_sweep(&spec, 0.2, &[0.0], 1).unwrap()[0].levels.len(), 1);
}

#[test]
fn charging_spectrum_without_junction_coupling() {
    let ec = 0.02;
    let spec = FluxQubitSpec { ej: 0.0, ec: Some(ec), ..circuit().with_cutoff(4) };
    let e = qubit_levels(&spec, 0.1, 0.3, 7).unwrap();
    assert_eq!(e[0], 0.0);
    assert!(e[1..7].iter().all(|x| (x - 8.0 / 3.0 * ec).abs() < 1e-15));
    assert_eq!(persistent_currents(&spec, 0.1, 0.3).unwrap(), (0.0, 0.0));
}
