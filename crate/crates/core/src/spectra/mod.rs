//! Diagonalization of chain Hamiltonians, spectra along schedules and the
//! closed-form edge states of the SSH and trimer chains.

mod edge;

pub(crate) use edge::xi_norm;

pub use edge::{
    analytic_edge_states, edge_weight, localization_length, trimer_edge_states, EdgeStatePair,
    TrimerEdgeStates,
};

use crate::linalg::tridiagonal_eigh;
use crate::models::{sample_schedule, ChainHamiltonian, ModelKind, Schedule};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Sites counted at each end when flagging a level as edge-localized.
pub const EDGE_FLAG_SITES: usize = 2;
/// Minimum edge weight for a level to be flagged.
pub const EDGE_FLAG_THRESHOLD: f64 = 0.5;

/// Eigenvalues in ascending order with `eigenvectors[j]` the unit
/// eigenvector of `eigenvalues[j]`.
///
/// Each eigenvector has its largest-magnitude component positive (lowest
/// index on ties), so the output is reproducible bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `‖H·v_j − E_j·v_j‖₂`.
    pub fn residual(&self, h: &ChainHamiltonian, j: usize) -> f64 {
        let v = &self.eigenvectors[j];
        let e = self.eigenvalues[j];
        (0..v.len())
            .map(|i| {
                let hv: f64 = (i.saturating_sub(1)..(i + 2).min(v.len()))
                    .map(|k| h.get(i, k) * v[k])
                    .sum();
                (hv - e * v[i]).powi(2)
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Indices of the `count` eigenvalues closest to `energy`, ascending.
    pub fn nearest(&self, energy: f64, count: usize) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&i, &j| {
            (self.eigenvalues[i] - energy).abs().total_cmp(&(self.eigenvalues[j] - energy).abs())
        });
        idx.truncate(count);
        idx.sort_unstable();
        idx
    }
}

/// Full eigendecomposition of a chain Hamiltonian.
pub fn eigendecompose(h: &ChainHamiltonian) -> Result<Spectrum> {
    let (eigenvalues, eigenvectors) = tridiagonal_eigh(h.diagonal(), h.offdiagonal())?;
    Ok(Spectrum { eigenvalues, eigenvectors })
}

/// Spectra sampled on a uniform grid over one period of a schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumTrace {
    pub times: Vec<f64>,
    pub spectra: Vec<Spectrum>,
    /// `edge_flags[i][j]`: level `j` at `times[i]` is edge-localized.
    pub edge_flags: Vec<Vec<bool>>,
}

impl SpectrumTrace {
    pub fn n_levels(&self) -> usize {
        self.spectra.first().map_or(0, Spectrum::len)
    }

    /// Eigenvalue `level` at every sampled time.
    pub fn branch(&self, level: usize) -> Vec<f64> {
        self.spectra.iter().map(|s| s.eigenvalues[level]).collect()
    }
}

fn flags_for(s: &Spectrum) -> Vec<bool> {
    s.eigenvectors
        .iter()
        .map(|v| edge_weight(v, EDGE_FLAG_SITES) >= EDGE_FLAG_THRESHOLD)
        .collect()
}

/// Eigendecomposes the schedule's Hamiltonian at `n_times` evenly spaced
/// times covering `[0, T]`, both ends included.
pub fn instantaneous_spectrum(
    s: &Schedule,
    kind: ModelKind,
    cells: usize,
    n_times: usize,
) -> Result<SpectrumTrace> {
    if n_times < 2 {
        return Err(Error::InvalidParameter(format!("n_times must be >= 2, got {n_times}")));
    }
    s.check_kind(kind)?;
    let times: Vec<f64> =
        (0..n_times).map(|i| s.period * i as f64 / (n_times - 1) as f64).collect();
    let spectra = times
        .par_iter()
        .map(|&t| eigendecompose(&sample_schedule(s, kind, cells, t)?))
        .collect::<Result<Vec<_>>>()?;
    let edge_flags = spectra.iter().map(flags_for).collect();
    Ok(SpectrumTrace { times, spectra, edge_flags })
}

/// Spectra of an arbitrary family of chains, e.g. a coupling sweep. The
/// `times` field then holds the sweep parameter.
pub fn spectrum_sweep(
    params: &[f64],
    build: impl Fn(f64) -> Result<ChainHamiltonian> + Sync,
) -> Result<SpectrumTrace> {
    if params.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("sweep values must be strictly increasing".into()));
    }
    let spectra = params
        .par_iter()
        .map(|&p| eigendecompose(&build(p)?))
        .collect::<Result<Vec<_>>>()?;
    if spectra.windows(2).any(|w| w[0].len() != w[1].len()) {
        return Err(Error::InvalidDimension("sweep changes the chain length".into()));
    }
    let edge_flags = spectra.iter().map(flags_for).collect();
    Ok(SpectrumTrace { times: params.to_vec(), spectra, edge_flags })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_ssh, Param};

    #[test]
    fn two_site_chain() {
        let h = ChainHamiltonian::new(vec![0.0, 0.0], vec![0.5]).unwrap();
        let s = eigendecompose(&h).unwrap();
        assert!((s.eigenvalues[0] + 0.5).abs() < 1e-15 && (s.eigenvalues[1] - 0.5).abs() < 1e-15);
        for j in 0..2 {
            assert!(s.residual(&h, j) < 1e-15);
        }
    }

    #[test]
    fn ssh_zero_modes() {
        let h = build_ssh(7, 0.1, 1.0, 0.0).unwrap();
        let s = eigendecompose(&h).unwrap();
        let zero: Vec<_> = s.eigenvalues.iter().filter(|e| e.abs() < 1e-6).collect();
        assert_eq!(zero.len(), 2);
        assert_eq!(s.nearest(0.0, 2), vec![6, 7]);
        for j in 0..14 {
            assert!(s.residual(&h, j) <= 1e-10 * s.eigenvalues[j].abs().max(1.0));
        }
    }

    #[test]
    fn static_schedule_gives_identical_spectra() {
        let sched = Schedule::constant(10.0, &[(Param::A, 0.3), (Param::B, 1.0)]);
        let trace = instantaneous_spectrum(&sched, ModelKind::Ssh, 4, 5).unwrap();
        assert_eq!(trace.times, vec![0.0, 2.5, 5.0, 7.5, 10.0]);
        assert!(trace.spectra.windows(2).all(|w| w[0] == w[1]));
        assert!(instantaneous_spectrum(&sched, ModelKind::Ssh, 4, 1).is_err());
    }

    #[test]
    fn pump_start_has_two_flagged_edge_levels() {
        let sched = Schedule::standard_pump(100.0, 1);
        let trace = instantaneous_spectrum(&sched, ModelKind::RiceMele, 7, 9).unwrap();
        let s = &trace.spectra[0];
        assert!(s.eigenvalues[6].abs() < 1e-12 && s.eigenvalues[7].abs() < 1e-12);
        let flagged: Vec<usize> = (0..14).filter(|&j| trace.edge_flags[0][j]).collect();
        assert_eq!(flagged, vec![6, 7]);
        assert_eq!(trace.n_levels(), 14);
    }

    #[test]
    fn sweep_rejects_unsorted_grid() {
        let build = |a: f64| build_ssh(3, a, 1.0, 0.0);
        assert!(spectrum_sweep(&[0.2, 0.1], build).is_err());
        let trace = spectrum_sweep(&[0.0, 0.5, 1.0], build).unwrap();
        assert_eq!(trace.branch(0).len(), 3);
    }
}
