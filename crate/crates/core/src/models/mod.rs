//! Single-excitation chain Hamiltonians and the time-dependent schedules
//! that drive them.
//!
//! In the single-excitation basis `{|e_j⟩}` every nearest-neighbour chain
//! is a real symmetric tridiagonal matrix, which is all [`ChainHamiltonian`]
//! stores.

mod disorder;
mod schedule;

pub use disorder::{apply_disorder, gaussian_draw, DisorderSpec, DisorderTarget};
pub use schedule::{sample_schedule, ModelKind, Param, Schedule, ScheduleConfig, Term, TermForm};

use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

/// Real symmetric tridiagonal matrix in the single-excitation basis.
///
/// Only the diagonal and the first super-diagonal are stored, so the
/// matrix is symmetric by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainHamiltonian {
    diagonal: Vec<f64>,
    offdiagonal: Vec<f64>,
}

impl ChainHamiltonian {
    pub fn new(diagonal: Vec<f64>, offdiagonal: Vec<f64>) -> Result<Self> {
        if diagonal.is_empty() {
            return Err(Error::InvalidDimension("chain needs at least one site".into()));
        }
        if offdiagonal.len() + 1 != diagonal.len() {
            return Err(Error::InvalidDimension(format!(
                "{} sites need {} couplings, got {}",
                diagonal.len(),
                diagonal.len() - 1,
                offdiagonal.len()
            )));
        }
        if diagonal.iter().chain(&offdiagonal).any(|x| !x.is_finite()) {
            return Err(Error::Numeric("non-finite Hamiltonian entry".into()));
        }
        Ok(Self { diagonal, offdiagonal })
    }

    pub fn n_sites(&self) -> usize {
        self.diagonal.len()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn offdiagonal(&self) -> &[f64] {
        &self.offdiagonal
    }

    /// Entry `(i, j)` of the dense matrix.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.abs_diff(j) {
            0 => self.diagonal[i],
            1 => self.offdiagonal[i.min(j)],
            _ => 0.0,
        }
    }

    /// Row-major dense reconstruction.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.n_sites();
        (0..n).map(|i| (0..n).map(|j| self.get(i, j)).collect()).collect()
    }

    /// `out = H·psi`.
    pub fn apply(&self, psi: &[C64], out: &mut [C64]) {
        let n = self.n_sites();
        debug_assert_eq!(psi.len(), n);
        debug_assert_eq!(out.len(), n);
        for i in 0..n {
            let mut acc = psi[i] * self.diagonal[i];
            if i > 0 {
                acc += psi[i - 1] * self.offdiagonal[i - 1];
            }
            if i + 1 < n {
                acc += psi[i + 1] * self.offdiagonal[i];
            }
            out[i] = acc;
        }
    }

    /// Real expectation value `⟨v|H|v⟩` for a real vector.
    pub fn expectation_real(&self, v: &[f64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.n_sites() {
            acc += v[i] * v[i] * self.diagonal[i];
            if i + 1 < self.n_sites() {
                acc += 2.0 * v[i] * v[i + 1] * self.offdiagonal[i];
            }
        }
        acc
    }

    /// `⟨u|H|v⟩` for real vectors.
    pub fn matrix_element_real(&self, u: &[f64], v: &[f64]) -> f64 {
        let n = self.n_sites();
        let mut acc = 0.0;
        for i in 0..n {
            let mut hv = self.diagonal[i] * v[i];
            if i > 0 {
                hv += self.offdiagonal[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                hv += self.offdiagonal[i] * v[i + 1];
            }
            acc += u[i] * hv;
        }
        acc
    }

    /// Same chain with every entry multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            diagonal: self.diagonal.iter().map(|x| x * factor).collect(),
            offdiagonal: self.offdiagonal.iter().map(|x| x * factor).collect(),
        }
    }

    /// Largest absolute row sum, an upper bound on the spectral radius.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n_sites())
            .map(|i| {
                let left = if i > 0 { self.offdiagonal[i - 1].abs() } else { 0.0 };
                let right = self.offdiagonal.get(i).map_or(0.0, |x| x.abs());
                self.diagonal[i].abs() + left + right
            })
            .fold(0.0, f64::max)
    }
}

fn check_cells(cells: usize) -> Result<()> {
    if cells == 0 {
        return Err(Error::InvalidDimension("cell count must be at least 1".into()));
    }
    Ok(())
}

fn check_finite(values: &[f64]) -> Result<()> {
    if values.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter("model parameters must be finite".into()));
    }
    Ok(())
}

/// SSH chain of `cells` dimers: `2·cells` sites at frequency `omega`,
/// intra-cell coupling `a`, inter-cell coupling `b`. The chain ends on an
/// `a` bond.
pub fn build_ssh(cells: usize, a: f64, b: f64, omega: f64) -> Result<ChainHamiltonian> {
    check_cells(cells)?;
    check_finite(&[a, b, omega])?;
    let n = 2 * cells;
    let offdiagonal = (0..n - 1).map(|j| if j % 2 == 0 { a } else { b }).collect();
    ChainHamiltonian::new(vec![omega; n], offdiagonal)
}

/// Rice–Mele chain: SSH couplings plus staggered potential `+u` on A
/// (odd, 1-based) sites and `-u` on B sites.
pub fn build_rice_mele(cells: usize, a: f64, b: f64, u: f64) -> Result<ChainHamiltonian> {
    check_cells(cells)?;
    check_finite(&[a, b, u])?;
    let n = 2 * cells;
    let diagonal = (0..n).map(|j| if j % 2 == 0 { u } else { -u }).collect();
    let offdiagonal = (0..n - 1).map(|j| if j % 2 == 0 { a } else { b }).collect();
    ChainHamiltonian::new(diagonal, offdiagonal)
}

/// Trimer Rice–Mele chain with couplings `[a, b, c]` (A–B, B–C, C–A′) and
/// on-site potentials `[u, v, w]` repeated over `cells` unit cells.
pub fn build_trimer(
    cells: usize,
    couplings: [f64; 3],
    potentials: [f64; 3],
) -> Result<ChainHamiltonian> {
    check_cells(cells)?;
    check_finite(&couplings)?;
    check_finite(&potentials)?;
    let n = 3 * cells;
    let diagonal = (0..n).map(|j| potentials[j % 3]).collect();
    let offdiagonal = (0..n - 1).map(|j| couplings[j % 3]).collect();
    ChainHamiltonian::new(diagonal, offdiagonal)
}

/// Aubry–André–Harper chain: uniform hopping `hop` and on-site energies
/// `omega·cos(2π·j·alpha + phase)` with `j` counted from 1.
pub fn build_aah(
    n_sites: usize,
    omega: f64,
    alpha: f64,
    phase: f64,
    hop: f64,
) -> Result<ChainHamiltonian> {
    if n_sites < 2 {
        return Err(Error::InvalidDimension("AAH chain needs at least 2 sites".into()));
    }
    check_finite(&[omega, alpha, phase, hop])?;
    let diagonal = (1..=n_sites)
        .map(|j| omega * (std::f64::consts::TAU * j as f64 * alpha + phase).cos())
        .collect();
    ChainHamiltonian::new(diagonal, vec![hop; n_sites - 1])
}
