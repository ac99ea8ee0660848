//! Time-dependent model parameters built from a closed set of periodic
//! terms, so schedules serialize exactly and evaluate bit-stably.

use super::{build_rice_mele, build_ssh, build_trimer, ChainHamiltonian};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::TAU;

/// Chain family a schedule drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Ssh,
    #[serde(rename = "rm")]
    RiceMele,
    Trimer,
}

impl ModelKind {
    /// Parameters a schedule for this kind must define, no more and no less.
    pub fn required_params(self) -> &'static [Param] {
        use Param::*;
        match self {
            ModelKind::Ssh => &[A, B],
            ModelKind::RiceMele => &[A, B, U],
            ModelKind::Trimer => &[A, B, C, U, V, W],
        }
    }

    pub fn sites_per_cell(self) -> usize {
        match self {
            ModelKind::Ssh | ModelKind::RiceMele => 2,
            ModelKind::Trimer => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Ssh => "ssh",
            ModelKind::RiceMele => "rm",
            ModelKind::Trimer => "trimer",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Param {
    A,
    B,
    C,
    U,
    V,
    W,
}

impl Param {
    pub fn name(self) -> &'static str {
        match self {
            Param::A => "a",
            Param::B => "b",
            Param::C => "c",
            Param::U => "u",
            Param::V => "v",
            Param::W => "w",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TermForm {
    Constant,
    Sin,
    Cos,
}

/// `offset + amplitude·f(2π·frequency_multiple·t/T + phase)` with
/// `f ∈ {1, sin, cos}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub form: TermForm,
    #[serde(default)]
    pub amplitude: f64,
    #[serde(default)]
    pub offset: f64,
    #[serde(default = "one")]
    pub frequency_multiple: f64,
    #[serde(default)]
    pub phase: f64,
}

fn one() -> f64 {
    1.0
}

impl Term {
    pub fn constant(value: f64) -> Self {
        Self { form: TermForm::Constant, amplitude: 0.0, offset: value, frequency_multiple: 1.0, phase: 0.0 }
    }

    pub fn sin(amplitude: f64, offset: f64, frequency_multiple: f64) -> Self {
        Self { form: TermForm::Sin, amplitude, offset, frequency_multiple, phase: 0.0 }
    }

    pub fn cos(amplitude: f64, offset: f64, frequency_multiple: f64) -> Self {
        Self { form: TermForm::Cos, amplitude, offset, frequency_multiple, phase: 0.0 }
    }

    pub fn eval(&self, t: f64, period: f64) -> f64 {
        let arg = TAU * self.frequency_multiple * t / period + self.phase;
        match self.form {
            TermForm::Constant => self.offset + self.amplitude,
            TermForm::Sin => self.offset + self.amplitude * arg.sin(),
            TermForm::Cos => self.offset + self.amplitude * arg.cos(),
        }
    }

    fn is_finite(&self) -> bool {
        [self.amplitude, self.offset, self.frequency_multiple, self.phase]
            .iter()
            .all(|x| x.is_finite())
    }

    /// True when the term repeats after one period.
    fn has_integer_frequency(&self) -> bool {
        self.form == TermForm::Constant || self.frequency_multiple.fract() == 0.0
    }
}

/// Named parameter functions over `cycles` periods of length `period`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub period: f64,
    pub cycles: u32,
    pub params: BTreeMap<Param, Term>,
}

impl Schedule {
    pub fn new(period: f64, cycles: u32, params: BTreeMap<Param, Term>) -> Result<Self> {
        let s = Self { period, cycles, params };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        if !(self.period.is_finite() && self.period > 0.0) {
            return Err(Error::Schema(format!("period must be > 0, got {}", self.period)));
        }
        if self.cycles == 0 {
            return Err(Error::Schema("cycles must be >= 1".into()));
        }
        if let Some((p, _)) = self.params.iter().find(|(_, t)| !t.is_finite()) {
            return Err(Error::Schema(format!("parameter {} has a non-finite field", p.name())));
        }
        Ok(())
    }

    /// Checks the parameter set against a model kind. Every violation is
    /// listed in the error.
    pub fn check_kind(&self, kind: ModelKind) -> Result<()> {
        let required = kind.required_params();
        let mut problems = Vec::new();
        for p in required {
            if !self.params.contains_key(p) {
                problems.push(format!("missing parameter \"{}\"", p.name()));
            }
        }
        for p in self.params.keys() {
            if !required.contains(p) {
                problems.push(format!(
                    "parameter \"{}\" is not used by kind {}",
                    p.name(),
                    kind.name()
                ));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Schema(problems.join("; ")))
        }
    }

    pub fn duration(&self) -> f64 {
        self.period * f64::from(self.cycles)
    }

    /// True when every term repeats with the schedule period.
    pub fn is_periodic(&self) -> bool {
        self.params.values().all(Term::has_integer_frequency)
    }

    pub fn value(&self, p: Param, t: f64) -> Option<f64> {
        self.params.get(&p).map(|term| term.eval(t, self.period))
    }

    /// `a = 1 − cos(2πt/T)`, `b = 1`, `u = sin(2πt/T)`.
    pub fn standard_pump(period: f64, cycles: u32) -> Self {
        let params = BTreeMap::from([
            (Param::A, Term::cos(-1.0, 1.0, 1.0)),
            (Param::B, Term::constant(1.0)),
            (Param::U, Term::sin(1.0, 0.0, 1.0)),
        ]);
        Self { period, cycles, params }
    }

    /// `a = 0.5·(1 − cos(2πt/T))`, `b = 1`, `u = 0.25·sin(2πt/T)`: stays
    /// in the topological phase `a < b` for the whole cycle.
    pub fn optimized_pump(period: f64, cycles: u32) -> Self {
        let params = BTreeMap::from([
            (Param::A, Term::cos(-0.5, 0.5, 1.0)),
            (Param::B, Term::constant(1.0)),
            (Param::U, Term::sin(0.25, 0.0, 1.0)),
        ]);
        Self { period, cycles, params }
    }

    /// Trimer Bell-state transfer: `a = b = 1 − 0.9·cos(2πt/T)`, `c = 1`,
    /// `v = 2`, `u = 1 + cos(πt/T)`, `w = 1 − cos(πt/T)`.
    ///
    /// `u` and `w` have period `2T`: odd cycles move the state right, even
    /// cycles move it back.
    pub fn trimer_transfer(period: f64, cycles: u32) -> Self {
        let params = BTreeMap::from([
            (Param::A, Term::cos(-0.9, 1.0, 1.0)),
            (Param::B, Term::cos(-0.9, 1.0, 1.0)),
            (Param::C, Term::constant(1.0)),
            (Param::U, Term::cos(1.0, 1.0, 0.5)),
            (Param::V, Term::constant(2.0)),
            (Param::W, Term::cos(-1.0, 1.0, 0.5)),
        ]);
        Self { period, cycles, params }
    }

    /// Time-independent schedule holding the given constants.
    pub fn constant(period: f64, values: &[(Param, f64)]) -> Self {
        let params = values.iter().map(|&(p, v)| (p, Term::constant(v))).collect();
        Self { period, cycles: 1, params }
    }
}

/// File form of a schedule: `{kind, L, T, cycles, params}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    pub kind: ModelKind,
    #[serde(rename = "L")]
    pub cells: usize,
    #[serde(rename = "T")]
    pub period: f64,
    #[serde(default = "one_cycle")]
    pub cycles: u32,
    pub params: BTreeMap<Param, Term>,
}

fn one_cycle() -> u32 {
    1
}

impl ScheduleConfig {
    pub fn new(kind: ModelKind, cells: usize, schedule: &Schedule) -> Self {
        Self {
            kind,
            cells,
            period: schedule.period,
            cycles: schedule.cycles,
            params: schedule.params.clone(),
        }
    }

    /// Validated schedule for this config's kind.
    pub fn schedule(&self) -> Result<Schedule> {
        if self.cells == 0 {
            return Err(Error::Schema("L must be >= 1".into()));
        }
        let s = Schedule::new(self.period, self.cycles, self.params.clone())?;
        s.check_kind(self.kind)?;
        Ok(s)
    }

    pub fn n_sites(&self) -> usize {
        self.cells * self.kind.sites_per_cell()
    }
}

/// Chain Hamiltonian of the given kind at time `t`.
pub fn sample_schedule(
    s: &Schedule,
    kind: ModelKind,
    cells: usize,
    t: f64,
) -> Result<ChainHamiltonian> {
    let slack = 1e-9 * s.period;
    if !(t >= -slack && t <= s.duration() + slack) {
        return Err(Error::OutOfRange(format!(
            "t = {t} outside [0, {}]",
            s.duration()
        )));
    }
    let get = |p: Param| {
        s.value(p, t).ok_or_else(|| {
            Error::Schema(format!("kind {} needs parameter \"{}\"", kind.name(), p.name()))
        })
    };
    match kind {
        ModelKind::Ssh => build_ssh(cells, get(Param::A)?, get(Param::B)?, 0.0),
        ModelKind::RiceMele => build_rice_mele(cells, get(Param::A)?, get(Param::B)?, get(Param::U)?),
        ModelKind::Trimer => build_trimer(
            cells,
            [get(Param::A)?, get(Param::B)?, get(Param::C)?],
            [get(Param::U)?, get(Param::V)?, get(Param::W)?],
        ),
    }
}
