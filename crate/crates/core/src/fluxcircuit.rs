//! Charge-basis model of a gap-tunable flux qubit: two junction phases
//! `φ₁`, `φ₂` with conjugate Cooper-pair numbers `k`, `l` and
//!
//! `H = 4E_C/(1+4α)·[(1+2α)k² − 4αkl + (1+2α)l²]
//!    + E_J·[2(1+α) − cos φ₁ − cos φ₂ − 2α·C_α·cos(φ₁ + φ₂ + χ)]`
//!
//! with `C_α = cos(π[β(N − f_Σ) + f_α])`, `χ = π(n − f_ε)` and `f_Σ = κ·f_α`.
//! The phase convention is `e^{iφ}|k⟩ = |k+1⟩` for each junction.

use crate::linalg::{eigh_lowest, HermitianEigen, HermitianMatrix};
use crate::{Error, Result, C64};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Circuit parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluxQubitSpec {
    /// Josephson energy of the large junctions (energy unit).
    #[serde(rename = "EJ")]
    pub ej: f64,
    #[serde(rename = "EJ_over_EC")]
    pub ej_over_ec: f64,
    /// Explicit charging energy; takes the place of `EJ/EJ_over_EC`, which
    /// is undefined at `EJ = 0`. Must agree with the ratio when `EJ > 0`.
    #[serde(rename = "EC", default, skip_serializing_if = "Option::is_none")]
    pub ec: Option<f64>,
    /// Small-junction ratio.
    pub alpha: f64,
    /// α-loop to main-loop circumference ratio.
    pub beta: f64,
    /// `f_Σ = kappa·f_α`.
    pub kappa: f64,
    #[serde(rename = "N")]
    pub n_total: i64,
    #[serde(rename = "n")]
    pub n_diff: i64,
    /// Cooper-pair numbers run over `−charge_cutoff..=charge_cutoff`.
    pub charge_cutoff: usize,
}

impl Default for FluxQubitSpec {
    fn default() -> Self {
        Self {
            ej: 1.0,
            ej_over_ec: 50.0,
            ec: None,
            alpha: 0.5,
            beta: 0.05,
            kappa: 50.0,
            n_total: 1,
            n_diff: 1,
            charge_cutoff: 15,
        }
    }
}

impl FluxQubitSpec {
    pub fn with_cutoff(&self, charge_cutoff: usize) -> Self {
        Self { charge_cutoff, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.ej >= 0.0) || !self.ej.is_finite() {
            return bad(format!("EJ must be >= 0, got {}", self.ej));
        }
        if !(self.ej_over_ec > 0.0) || !self.ej_over_ec.is_finite() {
            return bad(format!("EJ_over_EC must be > 0, got {}", self.ej_over_ec));
        }
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return bad(format!("alpha must be > 0, got {}", self.alpha));
        }
        if !self.beta.is_finite() || !self.kappa.is_finite() {
            return bad("beta and kappa must be finite".into());
        }
        if self.charge_cutoff < 1 {
            return Err(Error::InvalidDimension("charge_cutoff must be >= 1".into()));
        }
        match self.ec {
            Some(ec) if !(ec > 0.0) || !ec.is_finite() => bad(format!("EC must be > 0, got {ec}")),
            Some(ec) if self.ej > 0.0 && ((self.ej / ec) / self.ej_over_ec - 1.0).abs() > 1e-12 => bad(
                format!("EC = {ec} disagrees with EJ/EJ_over_EC = {}", self.ej / self.ej_over_ec),
            ),
            None if self.ej == 0.0 => bad("EJ = 0 needs an explicit EC".into()),
            _ => Ok(()),
        }
    }

    /// Charging energy `E_C`.
    pub fn charging_energy(&self) -> f64 {
        self.ec.unwrap_or(self.ej / self.ej_over_ec)
    }

    /// `C_α = cos(π[β(N − κ·f_α) + f_α])`.
    pub fn c_alpha(&self, f_alpha: f64) -> f64 {
        (PI * (self.beta * (self.n_total as f64 - self.kappa * f_alpha) + f_alpha)).cos()
    }

    /// `χ = π(n − f_ε)`.
    pub fn chi(&self, f_eps: f64) -> f64 {
        PI * (self.n_diff as f64 - f_eps)
    }

    /// Matrix dimension `(2N_c + 1)²`.
    pub fn dim(&self) -> usize {
        (2 * self.charge_cutoff + 1).pow(2)
    }
}

/// Hermitian operator on the charge states `|k, l⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChargeBasisOperator {
    cutoff: usize,
    matrix: HermitianMatrix,
}

impl ChargeBasisOperator {
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    /// Row/column of `|k, l⟩`, or `None` outside the cutoff.
    pub fn index(&self, k: i64, l: i64) -> Option<usize> {
        index(self.cutoff, k, l)
    }

    /// `⟨k, l|A|k2, l2⟩`.
    pub fn element(&self, bra: (i64, i64), ket: (i64, i64)) -> Option<C64> {
        Some(self.matrix.get(self.index(bra.0, bra.1)?, self.index(ket.0, ket.1)?))
    }

    /// `max |A_{P(i),P(j)} − A_{ij}|` for the charge parity `P: (k,l) → (−k,−l)`,
    /// which is zero exactly when `A` commutes with `P`.
    pub fn parity_commutator_norm(&self) -> f64 {
        let d = self.dim();
        let p = |i: usize| d - 1 - i;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                worst = worst.max((self.matrix.get(p(i), p(j)) - self.matrix.get(i, j)).norm());
            }
        }
        worst
    }
}

fn index(cutoff: usize, k: i64, l: i64) -> Option<usize> {
    let c = cutoff as i64;
    if k.abs() > c || l.abs() > c {
        return None;
    }
    let m = 2 * c + 1;
    Some(((k + c) * m + (l + c)) as usize)
}

/// Fills an operator from its diagonal and its `(k, l) → (k+1, l+1)` element,
/// plus optional single-junction hopping `(k, l) → (k±1, l)`, `(k, l±1)`.
fn assemble(
    cutoff: usize,
    diagonal: impl Fn(i64, i64) -> f64,
    single_hop: f64,
    double_hop: C64,
) -> ChargeBasisOperator {
    let c = cutoff as i64;
    let m = (2 * c + 1) as usize;
    let mut a = HermitianMatrix::zeros(m * m);
    for k in -c..=c {
        for l in -c..=c {
            let i = index(cutoff, k, l).expect("in range");
            a.set_pair(i, i, C64::new(diagonal(k, l), 0.0));
            if single_hop != 0.0 {
                if let Some(j) = index(cutoff, k + 1, l) {
                    a.set_pair(j, i, C64::new(single_hop, 0.0));
                }
                if let Some(j) = index(cutoff, k, l + 1) {
                    a.set_pair(j, i, C64::new(single_hop, 0.0));
                }
            }
            if let Some(j) = index(cutoff, k + 1, l + 1) {
                a.set_pair(j, i, double_hop);
            }
        }
    }
    ChargeBasisOperator { cutoff, matrix: a }
}

/// Charge-basis Hamiltonian at fluxes `(f_α, f_ε)`.
pub fn build_charge_hamiltonian(
    spec: &FluxQubitSpec,
    f_alpha: f64,
    f_eps: f64,
) -> Result<ChargeBasisOperator> {
    spec.validate()?;
    let (ej, ec, al) = (spec.ej, spec.charging_energy(), spec.alpha);
    let pref = 4.0 * ec / (1.0 + 4.0 * al);
    let kinetic = move |k: i64, l: i64| {
        let (k, l) = (k as f64, l as f64);
        pref * ((1.0 + 2.0 * al) * (k * k + l * l) - 4.0 * al * k * l) + 2.0 * ej * (1.0 + al)
    };
    // −2α·E_J·C_α·cos(φ₁+φ₂+χ) = −α·E_J·C_α·(e^{iχ}·e^{i(φ₁+φ₂)} + h.c.)
    let double_hop = C64::from_polar(-ej * al * spec.c_alpha(f_alpha), spec.chi(f_eps));
    Ok(assemble(spec.charge_cutoff, kinetic, -0.5 * ej, double_hop))
}

/// `∂H/∂f_ε = −2π·α·E_J·C_α·sin(φ₁ + φ₂ + χ)` in the charge basis.
pub fn flux_derivative(spec: &FluxQubitSpec, f_alpha: f64, f_eps: f64) -> Result<ChargeBasisOperator> {
    spec.validate()?;
    // d/df_ε of −α·E_J·C_α·e^{iχ}, with dχ/df_ε = −π.
    let element = C64::from_polar(-spec.ej * spec.alpha * spec.c_alpha(f_alpha), spec.chi(f_eps))
        * C64::new(0.0, -PI);
    Ok(assemble(spec.charge_cutoff, |_, _| 0.0, 0.0, element))
}

fn lowest(spec: &FluxQubitSpec, f_alpha: f64, f_eps: f64, n: usize) -> Result<HermitianEigen> {
    let h = build_charge_hamiltonian(spec, f_alpha, f_eps)?;
    if n == 0 || n > h.dim() {
        return Err(Error::InvalidParameter(format!(
            "n_levels must be in 1..={}, got {n}",
            h.dim()
        )));
    }
    eigh_lowest(h.matrix(), n)
}

/// The `n_levels` lowest eigenvalues, ascending.
pub fn qubit_levels(spec: &FluxQubitSpec, f_alpha: f64, f_eps: f64, n_levels: usize) -> Result<Vec<f64>> {
    Ok(lowest(spec, f_alpha, f_eps, n_levels)?.values)
}

/// Qubit frequency `E₁ − E₀` at the optimal point `f_ε = 0`.
pub fn qubit_gap(spec: &FluxQubitSpec, f_alpha: f64) -> Result<f64> {
    let e = qubit_levels(spec, f_alpha, 0.0, 2)?;
    Ok((e[1] - e[0]).max(0.0))
}

/// Gap and coupling matrix elements of `∂H/∂f_ε` at one flux point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitCharacter {
    pub f_alpha: f64,
    pub f_eps: f64,
    pub gap: f64,
    /// `|⟨e|∂H/∂f_ε|g⟩|`.
    pub g_perp: f64,
    /// `|⟨+|∂H/∂f_ε|−⟩|` with `|±⟩ = (|e⟩ ± |g⟩)/√2`.
    pub g_par: f64,
}

struct QubitPair {
    levels: Vec<f64>,
    gap: f64,
    ground: Vec<C64>,
    excited: Vec<C64>,
    derivative: ChargeBasisOperator,
}

/// Lowest `n_levels ≥ 2` eigenpairs with the phase of `|e⟩` chosen so that
/// `⟨e|∂H/∂f_ε|g⟩` is real and non-negative.
fn qubit_pair(spec: &FluxQubitSpec, f_alpha: f64, f_eps: f64, n_levels: usize) -> Result<QubitPair> {
    if n_levels == 0 {
        return Err(Error::InvalidParameter("n_levels must be >= 1".into()));
    }
    let eig = lowest(spec, f_alpha, f_eps, n_levels.max(2))?;
    let derivative = flux_derivative(spec, f_alpha, f_eps)?;
    let ground = eig.vectors[0].clone();
    let mut excited = eig.vectors[1].clone();
    let x = derivative.matrix().element(&excited, &ground);
    if x.norm() > 0.0 {
        let phase = x / x.norm();
        excited.iter_mut().for_each(|z| *z *= phase);
    }
    let gap = (eig.values[1] - eig.values[0]).max(0.0);
    let mut levels = eig.values;
    levels.truncate(n_levels);
    Ok(QubitPair { levels, gap, ground, excited, derivative })
}

impl QubitPair {
    fn character(&self, f_alpha: f64, f_eps: f64) -> QubitCharacter {
        let d = self.derivative.matrix();
        let g_perp = d.element(&self.excited, &self.ground).norm();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus: Vec<C64> = self.excited.iter().zip(&self.ground).map(|(e, g)| (e + g) * s).collect();
        let minus: Vec<C64> = self.excited.iter().zip(&self.ground).map(|(e, g)| (e - g) * s).collect();
        let g_par = d.element(&plus, &minus).norm();
        QubitCharacter {
            f_alpha,
            f_eps,
            gap: self.gap,
            g_perp,
            g_par,
        }
    }

    fn currents(&self) -> (f64, f64) {
        let d = self.derivative.matrix();
        (d.element(&self.ground, &self.ground).re, d.element(&self.excited, &self.excited).re)
    }
}

/// Gap and coupling elements at `(f_α, f_ε)`.
///
/// The sign of `g_par` depends on the relative phase of `|g⟩` and `|e⟩`;
/// that phase is fixed by making `⟨e|∂H/∂f_ε|g⟩` real and non-negative.
pub fn coupling_elements(spec: &FluxQubitSpec, f_alpha: f64, f_eps: f64) -> Result<QubitCharacter> {
    Ok(qubit_pair(spec, f_alpha, f_eps, 2)?.character(f_alpha, f_eps))
}

/// Loop currents `(I₀, I₁) = (⟨g|∂H/∂f_ε|g⟩, ⟨e|∂H/∂f_ε|e⟩)`.
pub fn persistent_currents(spec: &FluxQubitSpec, f_alpha: f64, f_eps: f64) -> Result<(f64, f64)> {
    if spec.ej == 0.0 {
        spec.validate()?;
        return Ok((0.0, 0.0));
    }
    Ok(qubit_pair(spec, f_alpha, f_eps, 2)?.currents())
}

/// One row of an `f_ε` sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluxSweepPoint {
    pub f_eps: f64,
    pub levels: Vec<f64>,
    pub g_perp: f64,
    pub g_par: f64,
}

/// Levels and couplings over a list of `f_ε` values, computed in parallel.
pub fn flux_sweep(
    spec: &FluxQubitSpec,
    f_alpha: f64,
    f_eps: &[f64],
    n_levels: usize,
) -> Result<Vec<FluxSweepPoint>> {
    f_eps
        .par_iter()
        .map(|&fe| {
            let pair = qubit_pair(spec, f_alpha, fe, n_levels)?;
            let ch = pair.character(f_alpha, fe);
            Ok(FluxSweepPoint { f_eps: fe, levels: pair.levels, g_perp: ch.g_perp, g_par: ch.g_par })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> FluxQubitSpec {
        FluxQubitSpec::default().with_cutoff(3)
    }

    #[test]
    fn default_dimension() {
        let h = build_charge_hamiltonian(&FluxQubitSpec::default(), 0.2, 0.0).unwrap();
        assert_eq!(h.dim(), 961);
        assert_eq!(h.matrix().hermiticity_residual(), 0.0);
    }

    #[test]
    fn index_layout() {
        let h = build_charge_hamiltonian(&small(), 0.1, 0.05).unwrap();
        assert_eq!(h.index(-3, -3), Some(0));
        assert_eq!(h.index(3, 3), Some(48));
        assert_eq!(h.index(0, 0), Some(24));
        assert_eq!(h.index(4, 0), None);
        let spec = small();
        let expect = C64::from_polar(-spec.alpha * spec.c_alpha(0.1), spec.chi(0.05));
        assert_eq!(h.element((1, 1), (0, 0)), Some(expect));
        assert_eq!(h.element((0, 0), (1, 1)), Some(expect.conj()));
        assert_eq!(h.element((1, 0), (0, 0)), Some(C64::new(-0.5, 0.0)));
        assert_eq!(h.element((1, -1), (0, 0)), Some(C64::new(0.0, 0.0)));
    }

    #[test]
    fn validation() {
        assert!(FluxQubitSpec::default().validate().is_ok());
        let s = FluxQubitSpec { charge_cutoff: 0, ..Default::default() };
        assert!(matches!(s.validate(), Err(Error::InvalidDimension(_))));
        let s = FluxQubitSpec { ej: 0.0, ..Default::default() };
        assert!(s.validate().is_err());
        let s = FluxQubitSpec { ej: 0.0, ec: Some(0.02), ..Default::default() };
        assert!(s.validate().is_ok());
        let s = FluxQubitSpec { ec: Some(0.5), ..Default::default() };
        assert!(s.validate().is_err());
        let s = FluxQubitSpec { alpha: 0.0, ..Default::default() };
        assert!(s.validate().is_err());
    }

    #[test]
    fn zero_josephson_energy() {
        let ec = 0.02;
        let spec = FluxQubitSpec { ej: 0.0, ec: Some(ec), ..small() };
        let h = build_charge_hamiltonian(&spec, 0.2, 0.1).unwrap();
        let d = h.dim();
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    assert_eq!(h.matrix().get(i, j), C64::new(0.0, 0.0));
                }
            }
        }
        let e = qubit_levels(&spec, 0.2, 0.1, 8).unwrap();
        assert_eq!(e[0], 0.0);
        let first = 4.0 * ec * (1.0 + 2.0 * spec.alpha) / (1.0 + 4.0 * spec.alpha);
        // (±1, 0), (0, ±1), (1, 1), (−1, −1) share the first charging level.
        for level in &e[1..7] {
            assert!((level - first).abs() < 1e-15);
        }
        assert!(e[7] > first + 1e-6);
        assert_eq!(persistent_currents(&spec, 0.2, 0.1).unwrap(), (0.0, 0.0));
        let dh = flux_derivative(&spec, 0.2, 0.1).unwrap();
        assert!(dh.matrix().max_abs_diff(&HermitianMatrix::zeros(dh.dim())) == 0.0);
    }

    #[test]
    fn parity_symmetry_at_optimal_point() {
        let h = build_charge_hamiltonian(&small(), 0.2, 0.0).unwrap();
        assert!(h.parity_commutator_norm() <= 1e-12);
        let h = build_charge_hamiltonian(&small(), 0.2, 0.1).unwrap();
        assert!(h.parity_commutator_norm() > 1e-3);
    }
}
