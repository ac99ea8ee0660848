//! Two-level Landau–Zener reduction of edge-state dynamics.
//!
//! In its topological phase an SSH or Rice–Mele chain has two edge states
//! `|L⟩`, `|R⟩` that are nearly decoupled from the bulk. Restricted to that
//! pair the chain is `H = offset·I + [[u, g], [g, −u]]` with `g` exponentially
//! small in the chain length.

mod path;

pub use path::{classify_path, default_tolerance, path_c_frame, LZPath, PathClass, PathSample, PathShape};

use crate::dynamics::{evolve, IntegratorConfig, StateVector, Trajectory};
use crate::models::{sample_schedule, ChainHamiltonian, ModelKind, Param, Schedule};
use crate::spectra::{analytic_edge_states, eigendecompose, xi_norm};
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

/// `H = offset·I + [[u, g], [g, −u]]` in the basis `{|L⟩, |R⟩}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoLevelSystem {
    pub u: f64,
    pub g: f64,
    pub offset: f64,
}

impl TwoLevelSystem {
    /// System with diagonal `(d_l, d_r)` and coupling `g`.
    pub fn from_diagonal(d_l: f64, d_r: f64, g: f64) -> Self {
        Self { u: 0.5 * (d_l - d_r), g, offset: 0.5 * (d_l + d_r) }
    }

    pub fn matrix(&self) -> [[f64; 2]; 2] {
        [[self.offset + self.u, self.g], [self.g, self.offset - self.u]]
    }

    /// The same system as a two-site chain, for time evolution.
    pub fn as_chain(&self) -> Result<ChainHamiltonian> {
        ChainHamiltonian::new(vec![self.offset + self.u, self.offset - self.u], vec![self.g])
    }
}

/// `(offset − √(u²+g²), offset + √(u²+g²))`.
pub fn lz_eigen(sys: &TwoLevelSystem) -> (f64, f64) {
    let r = sys.u.hypot(sys.g);
    (sys.offset - r, sys.offset + r)
}

/// Edge-subspace Hamiltonian of a Rice–Mele chain: `g = Ξ²·a·λ^{L−1}` with
/// `λ = −a/b`. The sign of `g` follows `λ^{L−1}`.
pub fn reduce_rm(a: f64, b: f64, u: f64, cells: usize) -> Result<TwoLevelSystem> {
    let edge = analytic_edge_states(a, b, cells)?;
    let g = edge.xi_norm.powi(2) * a * edge.lambda.powi(cells as i32 - 1);
    Ok(TwoLevelSystem { u, g, offset: 0.0 })
}

/// Upper (`{L₊, R₊}`) and lower (`{L₋, R₋}`) edge blocks of the
/// mirror-symmetric trimer chain with `a = b` intracell and `c` intercell
/// coupling:
///
/// `H± = [[u/2, g±], [g±, w/2]] ± (a ± v/2)·I`,
/// `g± = [L(a+v) + a]/2 · Ξ² · (∓λ)^{L−1}`, `λ = a/c`.
pub fn reduce_trimer(
    a: f64,
    c: f64,
    potentials: [f64; 3],
    cells: usize,
) -> Result<(TwoLevelSystem, TwoLevelSystem)> {
    let [u, v, w] = potentials;
    if potentials.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter("potentials must be finite".into()));
    }
    if !a.is_finite() || !c.is_finite() {
        return Err(Error::InvalidParameter("couplings must be finite".into()));
    }
    if a.abs() >= c.abs() {
        return Err(Error::PhaseDomain(format!("trimer edge states need |a| < |c|, got a = {a}, c = {c}")));
    }
    if cells == 0 {
        return Err(Error::InvalidDimension("chain needs at least one cell".into()));
    }
    let lambda = a / c;
    let xi2 = xi_norm(lambda, cells).powi(2);
    let prefactor = 0.5 * (cells as f64 * (a + v) + a) * xi2;
    let power = cells as i32 - 1;
    let g_plus = prefactor * (-lambda).powi(power);
    let g_minus = prefactor * lambda.powi(power);
    let block = |g: f64, shift: f64| {
        let mut s = TwoLevelSystem::from_diagonal(0.5 * u, 0.5 * w, g);
        s.offset += shift;
        s
    };
    Ok((block(g_plus, a + 0.5 * v), block(g_minus, -(a - 0.5 * v))))
}

/// Trimer reduction of a general SSH3 point; rejects `a ≠ b`.
pub fn reduce_trimer_checked(
    couplings: [f64; 3],
    potentials: [f64; 3],
    cells: usize,
) -> Result<(TwoLevelSystem, TwoLevelSystem)> {
    let [a, b, c] = couplings;
    if a != b {
        return Err(Error::InvalidParameter(format!(
            "trimer reduction needs the mirror-symmetric case a = b, got a = {a}, b = {b}"
        )));
    }
    reduce_trimer(a, c, potentials, cells)
}

/// Closed-form reduction next to the exact in-gap splitting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub u: f64,
    pub g: f64,
    pub offset: f64,
    pub lambda: f64,
    pub xi_norm_sq: f64,
    /// Gap between the two eigenvalues closest to the reduced pair's centre.
    pub exact_splitting: f64,
    /// `|2√(u²+g²) − exact_splitting| / (2√(u²+g²))`.
    pub rel_err: f64,
}

/// Compares [`reduce_rm`] with a full diagonalization of the chain.
pub fn reduction_report(a: f64, b: f64, u: f64, cells: usize) -> Result<ReductionReport> {
    let sys = reduce_rm(a, b, u, cells)?;
    let h = crate::models::build_rice_mele(cells, a, b, u)?;
    let spec = eigendecompose(&h)?;
    let pair = spec.nearest(sys.offset, 2);
    let exact_splitting = if pair.len() == 2 {
        (spec.eigenvalues[pair[1]] - spec.eigenvalues[pair[0]]).abs()
    } else {
        0.0
    };
    let predicted = 2.0 * sys.u.hypot(sys.g);
    let lambda = -a / b;
    Ok(ReductionReport {
        u: sys.u,
        g: sys.g,
        offset: sys.offset,
        lambda,
        xi_norm_sq: xi_norm(lambda, cells).powi(2),
        exact_splitting,
        rel_err: (predicted - exact_splitting).abs() / predicted,
    })
}

/// Evolves a two-level state `(c_L, c_R)` along a path.
pub fn lz_evolve(
    path: &LZPath,
    psi0: [C64; 2],
    cfg: &IntegratorConfig,
    n_records: usize,
) -> Result<Trajectory> {
    let psi = StateVector::new(psi0.to_vec())?;
    evolve(
        |t| {
            let (u, g) = path.at(t);
            TwoLevelSystem { u, g, offset: 0.0 }.as_chain()
        },
        &psi,
        0.0,
        path.period,
        cfg,
        n_records,
    )
}

/// Full-chain versus reduced dynamics over a time window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionComparison {
    pub times: Vec<f64>,
    /// `(|⟨L|ψ⟩|², |⟨R|ψ⟩|²)` of the full chain, with the instantaneous
    /// analytic edge states.
    pub full: Vec<(f64, f64)>,
    /// `(|c_L|², |c_R|²)` of the two-level model.
    pub reduced: Vec<(f64, f64)>,
    pub max_deviation: f64,
}

/// Runs a Rice–Mele (or SSH, `u = 0`) schedule over `[t0, t1]` from the
/// left edge state, once on the full chain and once on the reduced model,
/// and reports the largest difference in edge populations.
///
/// Fails with a phase-domain error if `|a(t)| ≥ |b(t)|` anywhere the
/// reduction is evaluated.
pub fn compare_reduction(
    s: &Schedule,
    cells: usize,
    window: (f64, f64),
    cfg: &IntegratorConfig,
    n_records: usize,
) -> Result<ReductionComparison> {
    let (t0, t1) = window;
    let kind = if s.params.contains_key(&Param::U) { ModelKind::RiceMele } else { ModelKind::Ssh };
    s.check_kind(kind)?;
    let params = |t: f64| -> Result<(f64, f64, f64)> {
        let get = |p| s.value(p, t).unwrap_or(0.0);
        Ok((get(Param::A), get(Param::B), get(Param::U)))
    };
    let edges = |t: f64| {
        let (a, b, _) = params(t)?;
        analytic_edge_states(a, b, cells)
    };

    let start = edges(t0)?;
    let psi0 = StateVector::from_real(&start.left)?;
    let full = evolve(|t| sample_schedule(s, kind, cells, t), &psi0, t0, t1, cfg, n_records)?;
    let reduced = evolve(
        |t| {
            let (a, b, u) = params(t)?;
            reduce_rm(a, b, u, cells)?.as_chain()
        },
        &StateVector::basis(2, 0)?,
        t0,
        t1,
        cfg,
        n_records,
    )?;

    let mut full_pops = Vec::with_capacity(n_records);
    let mut red_pops = Vec::with_capacity(n_records);
    let mut max_deviation: f64 = 0.0;
    for (i, &t) in full.times.iter().enumerate() {
        let e = edges(t)?;
        let amp = full.states[i].amplitudes();
        let project = |v: &[f64]| v.iter().zip(amp).map(|(x, z)| z * *x).sum::<C64>().norm_sqr();
        let f = (project(&e.left), project(&e.right));
        let p = reduced.states[i].populations();
        let r = (p[0], p[1]);
        max_deviation = max_deviation.max((f.0 - r.0).abs()).max((f.1 - r.1).abs());
        full_pops.push(f);
        red_pops.push(r);
    }
    Ok(ReductionComparison { times: full.times, full: full_pops, reduced: red_pops, max_deviation })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_examples() {
        assert_eq!(lz_eigen(&TwoLevelSystem { u: 0.0, g: 0.0, offset: 0.0 }), (0.0, 0.0));
        assert_eq!(lz_eigen(&TwoLevelSystem { u: 3.0, g: 4.0, offset: 0.0 }), (-5.0, 5.0));
        assert_eq!(lz_eigen(&TwoLevelSystem { u: 3.0, g: -4.0, offset: 1.0 }), (-4.0, 6.0));
    }

    #[test]
    fn rm_reduction_values() {
        assert_eq!(reduce_rm(0.0, 1.0, 0.3, 7).unwrap().g, 0.0);
        let s = reduce_rm(0.1, 1.0, 0.0, 7).unwrap();
        assert!((s.g - 0.99 * 0.1 * 1e-6).abs() < 1e-15);
        assert!(matches!(reduce_rm(1.0, 1.0, 0.0, 7), Err(Error::PhaseDomain(_))));
    }

    #[test]
    fn report_tracks_exact_splitting() {
        let r = reduction_report(0.5, 1.0, 0.0, 7).unwrap();
        assert!(r.rel_err <= 0.05, "{r:?}");
        assert!((r.xi_norm_sq - 0.75 / (1.0 - 0.5f64.powi(14))).abs() < 1e-15);
        let json = serde_json::to_value(&r).unwrap();
        for key in ["u", "g", "offset", "lambda", "xi_norm_sq", "exact_splitting", "rel_err"] {
            assert!(json.get(key).is_some(), "{key}");
        }
    }

    #[test]
    fn trimer_blocks() {
        let (hp, hm) = reduce_trimer(0.0, 1.0, [0.3, 2.0, 0.1], 4).unwrap();
        assert_eq!((hp.g, hm.g), (0.0, 0.0));
        for m in [hp.matrix(), hm.matrix()] {
            assert!((m[0][0] - 1.15).abs() < 1e-15 && (m[1][1] - 1.05).abs() < 1e-15);
            assert_eq!((m[0][1], m[1][0]), (0.0, 0.0));
        }

        let (hp, hm) = reduce_trimer(0.1, 1.0, [2.0, 2.0, 0.0], 7).unwrap();
        assert!((hp.g - 7.326e-6).abs() < 1e-9, "{}", hp.g);
        assert_eq!(hp.g, hm.g);
        let m = hp.matrix();
        assert!((m[0][0] - (1.0 + 1.1)).abs() < 1e-15 && (m[1][1] - 1.1).abs() < 1e-15);
        let m = hm.matrix();
        assert!((m[0][0] - (1.0 + 0.9)).abs() < 1e-15 && (m[1][1] - 0.9).abs() < 1e-15);

        // Equal edge potentials: symmetric crossing split by 2|g|.
        let (hp, _) = reduce_trimer(0.3, 1.0, [0.5, 1.0, 0.5], 3).unwrap();
        let (lo, hi) = lz_eigen(&hp);
        assert!((hi - lo - 2.0 * hp.g.abs()).abs() < 1e-15);

        assert!(reduce_trimer_checked([0.1, 0.2, 1.0], [0.0; 3], 3).is_err());
        assert!(matches!(reduce_trimer(1.0, 1.0, [0.0; 3], 3), Err(Error::PhaseDomain(_))));
    }
}
