//! Time evolution in the single-excitation subspace, `i·dψ/dt = H(t)·ψ`.
//!
//! Two integrators are available: an adaptive variable-order backward
//! differentiation scheme ([`Method::Bdf`]) and fixed-step classical
//! Runge–Kutta with substeps ([`Method::Rk4`]), used as a cross-check.

mod bdf;
mod rk4;

use crate::models::{sample_schedule, ChainHamiltonian, ModelKind, Schedule};
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

/// Largest norm drift tolerated within one integration segment.
pub const MAX_SEGMENT_DRIFT: f64 = 1e-6;

/// Normalized single-excitation state `Σ ψ_j |e_j⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    amplitudes: Vec<C64>,
}

impl StateVector {
    /// Wraps amplitudes that are already normalized to within `1e-9`.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidDimension("state needs at least one site".into()));
        }
        let norm = norm(&amplitudes);
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!("state norm {norm} is not 1")));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        let n = norm(&amplitudes);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidParameter("cannot normalize a zero or non-finite state".into()));
        }
        amplitudes.iter_mut().for_each(|z| *z /= n);
        Self::new(amplitudes)
    }

    /// Normalized real superposition.
    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::normalized(amplitudes.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// `|e_site⟩` (0-based) on `n_sites` sites.
    pub fn basis(n_sites: usize, site: usize) -> Result<Self> {
        if site >= n_sites {
            return Err(Error::SiteOutOfRange { site, n_sites });
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); n_sites];
        amplitudes[site] = C64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn n_sites(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    /// Site occupations `|ψ_j|²`.
    pub fn populations(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.norm_sqr()).collect()
    }
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Integration scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Bdf,
    Rk4,
}

/// Integrator settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Upper bound on any single step; omitted from JSON when unbounded.
    #[serde(skip_serializing_if = "is_unbounded")]
    pub max_step: f64,
    pub method: Method,
    /// Target substep of the fixed-step scheme.
    pub rk4_step: f64,
}

fn is_unbounded(x: &f64) -> bool {
    *x == f64::INFINITY
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-8, abs_tol: 1e-10, max_step: f64::INFINITY, method: Method::Bdf, rk4_step: 0.005 }
    }
}

impl IntegratorConfig {
    pub fn rk4() -> Self {
        Self { method: Method::Rk4, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, x: f64| {
            if x > 0.0 && !x.is_nan() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} must be > 0, got {x}")))
            }
        };
        positive("rel_tol", self.rel_tol)?;
        positive("abs_tol", self.abs_tol)?;
        positive("max_step", self.max_step)?;
        positive("rk4_step", self.rk4_step)?;
        if !self.rk4_step.is_finite() {
            return Err(Error::InvalidParameter("rk4_step must be finite".into()));
        }
        Ok(())
    }
}

/// Recorded evolution: states and `⟨σ_j^z⟩` on a uniform time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    /// `sz[i][j] = ⟨σ_j^z⟩` at `times[i]`.
    pub sz: Vec<Vec<f64>>,
    /// Largest norm drift seen in any record interval before it was
    /// renormalized away.
    pub max_norm_drift: f64,
    /// Accepted integrator steps.
    pub steps: usize,
}

impl Trajectory {
    pub fn final_state(&self) -> &StateVector {
        self.states.last().expect("trajectory has at least two records")
    }

    /// Index of the record closest to `t`.
    pub fn index_near(&self, t: f64) -> usize {
        let mut best = 0;
        for (i, &ti) in self.times.iter().enumerate() {
            if (ti - t).abs() < (self.times[best] - t).abs() {
                best = i;
            }
        }
        best
    }
}

/// Uniform grid of `n` points from `t0` to `t1` inclusive.
fn record_grid(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| if i + 1 == n { t1 } else { t0 + (t1 - t0) * i as f64 / (n - 1) as f64 })
        .collect()
}

/// Scales `y` back to unit norm, failing if it drifted by more than
/// [`MAX_SEGMENT_DRIFT`]. Returns the scale factor and the drift.
fn renormalization(y: &[C64], t: f64) -> Result<(f64, f64)> {
    let n = norm(y);
    let drift = (n - 1.0).abs();
    if !(drift <= MAX_SEGMENT_DRIFT) {
        return Err(Error::Integration {
            t,
            reason: format!("norm drifted to {n} within one integration segment"),
        });
    }
    Ok((1.0 / n, drift))
}

/// Integrates `i·dψ/dt = H(t)·ψ` from `t0` to `t1` and records `n_records`
/// evenly spaced states (both ends included).
///
/// `H(t)` is rebuilt from `provider` at every time the integrator asks for.
/// The norm is restored after every BDF step and every RK4 record
/// interval; drift beyond [`MAX_SEGMENT_DRIFT`] within one such segment is
/// an error.
pub fn evolve<F>(
    provider: F,
    psi0: &StateVector,
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
    n_records: usize,
) -> Result<Trajectory>
where
    F: Fn(f64) -> Result<ChainHamiltonian>,
{
    cfg.validate()?;
    if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
        return Err(Error::InvalidParameter(format!("need finite t1 > t0, got [{t0}, {t1}]")));
    }
    if n_records < 2 {
        return Err(Error::InvalidParameter(format!("n_records must be >= 2, got {n_records}")));
    }
    let n = psi0.n_sites();
    let checked = |t: f64| -> Result<ChainHamiltonian> {
        let h = provider(t)?;
        if h.n_sites() != n {
            return Err(Error::InvalidDimension(format!(
                "Hamiltonian at t = {t} has {} sites, state has {n}",
                h.n_sites()
            )));
        }
        Ok(h)
    };
    let times = record_grid(t0, t1, n_records);
    let outcome = match cfg.method {
        Method::Bdf => bdf::integrate(&checked, psi0.amplitudes(), &times, cfg)?,
        Method::Rk4 => rk4::integrate(&checked, psi0.amplitudes(), &times, cfg)?,
    };
    let states = outcome
        .states
        .into_iter()
        .map(StateVector::normalized)
        .collect::<Result<Vec<_>>>()?;
    let sz = states.iter().map(sigma_z).collect();
    Ok(Trajectory { times, states, sz, max_norm_drift: outcome.max_drift, steps: outcome.steps })
}

/// Flips `flip_site` (0-based) and evolves under the static `h` up to `t1`.
pub fn quench(
    h: &ChainHamiltonian,
    flip_site: usize,
    t1: f64,
    cfg: &IntegratorConfig,
    n_records: usize,
) -> Result<Trajectory> {
    let psi0 = StateVector::basis(h.n_sites(), flip_site)?;
    evolve(|_| Ok(h.clone()), &psi0, 0.0, t1, cfg, n_records)
}

/// Evolves `psi0` under the schedule for all of its cycles.
pub fn pump(
    s: &Schedule,
    kind: ModelKind,
    cells: usize,
    psi0: &StateVector,
    cfg: &IntegratorConfig,
    n_records: usize,
) -> Result<Trajectory> {
    s.check_kind(kind)?;
    let n = cells * kind.sites_per_cell();
    if psi0.n_sites() != n {
        return Err(Error::InvalidDimension(format!(
            "state has {} sites, a {}-cell {} chain has {n}",
            psi0.n_sites(),
            cells,
            kind.name()
        )));
    }
    let end = s.duration();
    evolve(|t| sample_schedule(s, kind, cells, t.min(end)), psi0, 0.0, end, cfg, n_records)
}

/// `⟨σ_j^z⟩ = 2|ψ_j|² − 1` for every site.
pub fn sigma_z(psi: &StateVector) -> Vec<f64> {
    psi.amplitudes.iter().map(|z| 2.0 * z.norm_sqr() - 1.0).collect()
}

/// `|⟨target|ψ⟩|²`, clamped to `[0, 1]`.
pub fn transfer_fidelity(psi: &StateVector, target: &StateVector) -> f64 {
    target.inner(psi).norm_sqr().clamp(0.0, 1.0)
}
