//! Experiment configuration files: versioned JSON, one object per run.
//!
//! Validation collects every violation before giving up, so a config with
//! several mistakes reports all of them at once.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize, Serializer};
use serde_json::{Map, Value};
use std::collections::BTreeMap;
use std::fmt;
use topochain::couplings::MAX_ARGUMENT;
use topochain::effective::{LZPath, PathShape};
use topochain::fluxcircuit::FluxQubitSpec;
use topochain::{
    sample_schedule, ChainHamiltonian, DisorderSpec, IntegratorConfig, ModelKind, Param, Schedule,
    Term, TermForm,
};

pub const SCHEMA_VERSION: u32 = 1;

const PARAMS: [Param; 6] = [Param::A, Param::B, Param::C, Param::U, Param::V, Param::W];
const CHAIN_KEYS: [&str; 10] = ["kind", "L", "T", "cycles", "a", "b", "c", "u", "v", "w"];
const ENVELOPE_KEYS: [&str; 4] = ["schema_version", "command", "seed", "output"];

/// A chain parameter: a plain number or a time-dependent term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Constant(f64),
    Varying(Term),
}

impl ParamValue {
    pub fn term(self) -> Term {
        match self {
            ParamValue::Constant(v) => Term::constant(v),
            ParamValue::Varying(t) => t,
        }
    }

    fn is_constant(self) -> bool {
        match self {
            ParamValue::Constant(_) => true,
            ParamValue::Varying(t) => t.form == TermForm::Constant || t.amplitude == 0.0,
        }
    }
}

/// Chain family, size and parameters, written inline in the command object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chain {
    pub kind: ModelKind,
    #[serde(rename = "L")]
    pub cells: usize,
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    pub period: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycles: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<ParamValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<ParamValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<ParamValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<ParamValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<ParamValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<ParamValue>,
}

impl Chain {
    pub fn new(kind: ModelKind, cells: usize) -> Self {
        Self { kind, cells, period: None, cycles: None, a: None, b: None, c: None, u: None, v: None, w: None }
    }

    /// Constant parameters given as `(param, value)` pairs.
    pub fn constant(kind: ModelKind, cells: usize, values: &[(Param, f64)]) -> Self {
        let mut chain = Self::new(kind, cells);
        for &(p, v) in values {
            *chain.slot_mut(p) = Some(ParamValue::Constant(v));
        }
        chain
    }

    /// Inline form of a schedule; constant terms become plain numbers.
    pub fn from_schedule(kind: ModelKind, cells: usize, s: &Schedule) -> Self {
        let mut chain = Self::new(kind, cells);
        chain.period = Some(s.period);
        chain.cycles = Some(s.cycles);
        for (&p, term) in &s.params {
            let value = if term.form == TermForm::Constant {
                ParamValue::Constant(term.eval(0.0, s.period))
            } else {
                ParamValue::Varying(*term)
            };
            *chain.slot_mut(p) = Some(value);
        }
        chain
    }

    pub fn get(&self, p: Param) -> Option<ParamValue> {
        match p {
            Param::A => self.a,
            Param::B => self.b,
            Param::C => self.c,
            Param::U => self.u,
            Param::V => self.v,
            Param::W => self.w,
        }
    }

    fn slot_mut(&mut self, p: Param) -> &mut Option<ParamValue> {
        match p {
            Param::A => &mut self.a,
            Param::B => &mut self.b,
            Param::C => &mut self.c,
            Param::U => &mut self.u,
            Param::V => &mut self.v,
            Param::W => &mut self.w,
        }
    }

    /// Copy with `p` replaced by a constant.
    pub fn with_constant(&self, p: Param, value: f64) -> Self {
        let mut chain = self.clone();
        *chain.slot_mut(p) = Some(ParamValue::Constant(value));
        chain
    }

    pub fn is_static(&self) -> bool {
        PARAMS.iter().filter_map(|&p| self.get(p)).all(ParamValue::is_constant)
    }

    pub fn n_sites(&self) -> usize {
        self.cells * self.kind.sites_per_cell()
    }

    /// Validated schedule; static chains get a unit period.
    pub fn schedule(&self) -> topochain::Result<Schedule> {
        let params: BTreeMap<Param, Term> =
            PARAMS.iter().filter_map(|&p| self.get(p).map(|v| (p, v.term()))).collect();
        let s = Schedule::new(self.period.unwrap_or(1.0), self.cycles.unwrap_or(1), params)?;
        s.check_kind(self.kind)?;
        Ok(s)
    }

    /// Hamiltonian at `t = 0`.
    pub fn hamiltonian(&self) -> topochain::Result<ChainHamiltonian> {
        sample_schedule(&self.schedule()?, self.kind, self.cells, 0.0)
    }

    fn varying_params(&self) -> Vec<Param> {
        PARAMS.iter().copied().filter(|&p| self.get(p).is_some_and(|v| !v.is_constant())).collect()
    }
}

/// `points` evenly spaced values from `start` to `stop`, both included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Grid {
    pub fn new(start: f64, stop: f64, points: usize) -> Self {
        Self { start, stop, points }
    }

    pub fn values(&self) -> Vec<f64> {
        linspace(self.start, self.stop, self.points)
    }

    fn violations(&self, key: &str, out: &mut Vec<Violation>) {
        if self.points == 0 {
            out.push(Violation::new(format!("{key}.points"), "must be >= 1"));
        } else if self.points > 1 && self.stop <= self.start {
            out.push(Violation::new(format!("{key}.stop"), "must exceed start when points > 1"));
        }
    }
}

pub fn linspace(start: f64, stop: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        n => (0..n)
            .map(|i| if i + 1 == n { stop } else { start + (stop - start) * i as f64 / (n - 1) as f64 })
            .collect(),
    }
}

/// A single value or a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    Fixed(f64),
    Grid(Grid),
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Axis::Fixed(x) => vec![*x],
            Axis::Grid(g) => g.values(),
        }
    }
}

/// Sweep of one chain parameter with the others held at their `t = 0`
/// values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub param: Param,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        linspace(self.start, self.stop, self.points)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumConfig {
    #[serde(flatten)]
    pub chain: Chain,
    /// Samples over one period for time-dependent chains.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_times: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
}

/// Initial state: equal (or given real) amplitudes on 1-based sites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Initial {
    pub sites: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PumpConfig {
    #[serde(flatten)]
    pub chain: Chain,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Initial>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub records_per_cycle: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integrator: Option<IntegratorConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuenchConfig {
    #[serde(flatten)]
    pub chain: Chain,
    /// 1-based site holding the excitation at `t = 0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flip_site: Option<usize>,
    pub t1: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_records: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disorder: Option<DisorderSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integrator: Option<IntegratorConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BellSign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl BellSign {
    pub fn value(self) -> f64 {
        match self {
            BellSign::Plus => 1.0,
            BellSign::Minus => -1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            BellSign::Plus => "plus",
            BellSign::Minus => "minus",
        }
    }
}

/// Bell-state transfer along the trimer pumping schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrimerConfig {
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub cells: Option<usize>,
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    pub period: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycles: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signs: Option<Vec<BellSign>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub records_per_cycle: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integrator: Option<IntegratorConfig>,
}

impl TrimerConfig {
    pub fn cells(&self) -> usize {
        self.cells.unwrap_or(7)
    }

    pub fn period(&self) -> f64 {
        self.period.unwrap_or(1000.0)
    }

    pub fn cycles(&self) -> u32 {
        self.cycles.unwrap_or(1)
    }

    pub fn signs(&self) -> Vec<BellSign> {
        self.signs.clone().unwrap_or_else(|| vec![BellSign::Plus, BellSign::Minus])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Edge {
    L,
    R,
}

/// Full chain against the two-level model over a window of a schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareConfig {
    #[serde(flatten)]
    pub chain: Chain,
    pub window: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LzConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<LZPath>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Edge>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compare: Option<CompareConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_records: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integrator: Option<IntegratorConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingsConfig {
    pub bare: f64,
    pub alpha_1: Axis,
    pub alpha_2: Axis,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluxQubitConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circuit: Option<FluxQubitSpec>,
    pub f_alpha: f64,
    pub f_eps_range: [f64; 2],
    pub sweep_points: usize,
    pub levels: usize,
    /// Optional gap-versus-`f_α` sweep at `f_ε = 0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap_sweep: Option<Grid>,
}

impl FluxQubitConfig {
    pub fn circuit(&self) -> FluxQubitSpec {
        self.circuit.clone().unwrap_or_default()
    }

    pub fn f_eps_values(&self) -> Vec<f64> {
        linspace(self.f_eps_range[0], self.f_eps_range[1], self.sweep_points)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Spectrum,
    Pump,
    Quench,
    Lz,
    Trimer,
    Couplings,
    FluxQubit,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Spectrum,
        Command::Pump,
        Command::Quench,
        Command::Lz,
        Command::Trimer,
        Command::Couplings,
        Command::FluxQubit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Pump => "pump",
            Command::Quench => "quench",
            Command::Lz => "lz",
            Command::Trimer => "trimer",
            Command::Couplings => "couplings",
            Command::FluxQubit => "fluxqubit",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Experiment {
    Spectrum(SpectrumConfig),
    Pump(PumpConfig),
    Quench(QuenchConfig),
    Lz(LzConfig),
    Trimer(TrimerConfig),
    Couplings(CouplingsConfig),
    FluxQubit(FluxQubitConfig),
}

impl Experiment {
    pub fn command(&self) -> Command {
        match self {
            Experiment::Spectrum(_) => Command::Spectrum,
            Experiment::Pump(_) => Command::Pump,
            Experiment::Quench(_) => Command::Quench,
            Experiment::Lz(_) => Command::Lz,
            Experiment::Trimer(_) => Command::Trimer,
            Experiment::Couplings(_) => Command::Couplings,
            Experiment::FluxQubit(_) => Command::FluxQubit,
        }
    }

    fn body(&self) -> Value {
        let v = match self {
            Experiment::Spectrum(c) => serde_json::to_value(c),
            Experiment::Pump(c) => serde_json::to_value(c),
            Experiment::Quench(c) => serde_json::to_value(c),
            Experiment::Lz(c) => serde_json::to_value(c),
            Experiment::Trimer(c) => serde_json::to_value(c),
            Experiment::Couplings(c) => serde_json::to_value(c),
            Experiment::FluxQubit(c) => serde_json::to_value(c),
        };
        v.expect("config types serialize to JSON objects")
    }
}

/// One validated run description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    /// Seed for disorder draws; overrides the seed inside `disorder`.
    pub seed: Option<u64>,
    /// Output directory.
    pub output: Option<String>,
    pub experiment: Experiment,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self { schema_version: SCHEMA_VERSION, seed: None, output: None, experiment }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn command(&self) -> Command {
        self.experiment.command()
    }

    pub fn to_value(&self) -> Value {
        let mut obj = match self.experiment.body() {
            Value::Object(m) => m,
            _ => unreachable!("config bodies are objects"),
        };
        obj.insert("schema_version".into(), self.schema_version.into());
        obj.insert("command".into(), self.command().name().into());
        if let Some(seed) = self.seed {
            obj.insert("seed".into(), seed.into());
        }
        if let Some(out) = &self.output {
            obj.insert("output".into(), out.clone().into());
        }
        Value::Object(obj)
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("JSON values serialize");
        s.push('\n');
        s
    }
}

impl Serialize for ExperimentConfig {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_value().serialize(serializer)
    }
}

/// A problem with one key; nested keys are dotted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub key: String,
    pub message: String,
}

impl Violation {
    pub fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        Self { key: key.into(), message: message.into() }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.key, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConfigError {
    Syntax(String),
    UnknownCommand(String),
    Invalid(Vec<Violation>),
}

impl ConfigError {
    pub fn violations(&self) -> &[Violation] {
        match self {
            ConfigError::Invalid(v) => v,
            _ => &[],
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Syntax(e) => write!(f, "malformed config: {e}"),
            ConfigError::UnknownCommand(c) => {
                let known: Vec<_> = Command::ALL.iter().map(|c| c.name()).collect();
                write!(f, "unknown command \"{c}\"; expected one of {}", known.join(", "))
            }
            ConfigError::Invalid(v) => {
                write!(f, "invalid config ({} problem{}):", v.len(), if v.len() == 1 { "" } else { "s" })?;
                for item in v {
                    write!(f, "\n  {item}")?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for ConfigError {}

type Check = fn(&Value, &str, &mut Vec<Violation>);

struct Rule {
    key: &'static str,
    required: bool,
    check: Check,
}

const fn req(key: &'static str, check: Check) -> Rule {
    Rule { key, required: true, check }
}

const fn opt(key: &'static str, check: Check) -> Rule {
    Rule { key, required: false, check }
}

fn typed<T: DeserializeOwned>(v: &Value, key: &str, out: &mut Vec<Violation>) {
    if let Err(e) = serde_json::from_value::<T>(v.clone()) {
        out.push(Violation::new(key, e.to_string()));
    }
}

fn compare_object(v: &Value, key: &str, out: &mut Vec<Violation>) {
    match v.as_object() {
        Some(obj) => check_fields(obj, &[req("window", typed::<[f64; 2]>)], true, &format!("{key}."), out),
        None => out.push(Violation::new(key, "expected an object")),
    }
}

fn rules(cmd: Command) -> (Vec<Rule>, bool) {
    let integrator = opt("integrator", typed::<IntegratorConfig>);
    match cmd {
        Command::Spectrum => (vec![opt("n_times", typed::<usize>), opt("sweep", typed::<Sweep>)], true),
        Command::Pump => (
            vec![opt("initial", typed::<Initial>), opt("records_per_cycle", typed::<usize>), integrator],
            true,
        ),
        Command::Quench => (
            vec![
                opt("flip_site", typed::<usize>),
                req("t1", typed::<f64>),
                opt("n_records", typed::<usize>),
                opt("disorder", typed::<DisorderSpec>),
                integrator,
            ],
            true,
        ),
        Command::Lz => (
            vec![
                opt("path", typed::<LZPath>),
                opt("initial", typed::<Edge>),
                opt("compare", compare_object),
                opt("n_records", typed::<usize>),
                integrator,
            ],
            false,
        ),
        Command::Trimer => (
            vec![
                opt("L", typed::<usize>),
                opt("T", typed::<f64>),
                opt("cycles", typed::<u32>),
                opt("signs", typed::<Vec<BellSign>>),
                opt("records_per_cycle", typed::<usize>),
                integrator,
            ],
            false,
        ),
        Command::Couplings => (
            vec![req("bare", typed::<f64>), req("alpha_1", typed::<Axis>), req("alpha_2", typed::<Axis>)],
            false,
        ),
        Command::FluxQubit => (
            vec![
                opt("circuit", typed::<FluxQubitSpec>),
                req("f_alpha", typed::<f64>),
                req("f_eps_range", typed::<[f64; 2]>),
                req("sweep_points", typed::<usize>),
                req("levels", typed::<usize>),
                opt("gap_sweep", typed::<Grid>),
            ],
            false,
        ),
    }
}

fn check_fields(obj: &Map<String, Value>, rules: &[Rule], chain: bool, prefix: &str, out: &mut Vec<Violation>) {
    for (key, value) in obj {
        let path = format!("{prefix}{key}");
        if let Some(rule) = rules.iter().find(|r| r.key == key) {
            (rule.check)(value, &path, out);
        } else if !(chain && CHAIN_KEYS.contains(&key.as_str())) {
            out.push(Violation::new(path, "unknown key"));
        }
    }
    for rule in rules.iter().filter(|r| r.required && !obj.contains_key(r.key)) {
        out.push(Violation::new(format!("{prefix}{}", rule.key), "missing required key"));
    }
    if chain {
        check_chain(obj, prefix, out);
    }
}

fn check_chain(obj: &Map<String, Value>, prefix: &str, out: &mut Vec<Violation>) {
    let key = |k: &str| format!("{prefix}{k}");
    let kind = match obj.get("kind") {
        None => {
            out.push(Violation::new(key("kind"), "missing required key"));
            None
        }
        Some(v) => match serde_json::from_value::<ModelKind>(v.clone()) {
            Ok(k) => Some(k),
            Err(_) => {
                out.push(Violation::new(key("kind"), format!("expected one of ssh, rm, trimer, got {v}")));
                None
            }
        },
    };
    match obj.get("L") {
        None => out.push(Violation::new(key("L"), "missing required key")),
        Some(v) => match v.as_u64() {
            Some(l) if l >= 1 => {}
            _ => out.push(Violation::new(key("L"), format!("expected an integer >= 1, got {v}"))),
        },
    }
    if let Some(v) = obj.get("T") {
        if !v.as_f64().is_some_and(|t| t > 0.0) {
            out.push(Violation::new(key("T"), format!("expected a number > 0, got {v}")));
        }
    }
    if let Some(v) = obj.get("cycles") {
        if !v.as_u64().is_some_and(|c| (1..=u32::MAX as u64).contains(&c)) {
            out.push(Violation::new(key("cycles"), format!("expected an integer >= 1, got {v}")));
        }
    }
    for p in PARAMS {
        let name = p.name();
        let given = obj.get(name);
        if let Some(v) = given {
            typed::<ParamValue>(v, &key(name), out);
        }
        if let Some(kind) = kind {
            let used = kind.required_params().contains(&p);
            if given.is_some() && !used {
                out.push(Violation::new(key(name), format!("not a parameter of kind {}", kind.name())));
            } else if given.is_none() && used {
                out.push(Violation::new(key(name), format!("missing required key for kind {}", kind.name())));
            }
        }
    }
}

/// Parses and validates a JSON config.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let value: Value = serde_json::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    let Value::Object(mut obj) = value else {
        return Err(ConfigError::Invalid(vec![Violation::new("$", "top level must be a JSON object")]));
    };
    let mut violations = Vec::new();

    let command = match obj.get("command") {
        None => {
            violations.push(Violation::new("command", "missing required key"));
            None
        }
        Some(Value::String(name)) => match Command::from_name(name) {
            Some(c) => Some(c),
            None => return Err(ConfigError::UnknownCommand(name.clone())),
        },
        Some(v) => {
            violations.push(Violation::new("command", format!("expected a string, got {v}")));
            None
        }
    };
    let schema_version = match obj.get("schema_version") {
        None => {
            violations.push(Violation::new("schema_version", "missing required key"));
            SCHEMA_VERSION
        }
        Some(v) => match v.as_u64() {
            Some(n) if n == SCHEMA_VERSION as u64 => SCHEMA_VERSION,
            _ => {
                violations.push(Violation::new(
                    "schema_version",
                    format!("unsupported version {v}, expected {SCHEMA_VERSION}"),
                ));
                SCHEMA_VERSION
            }
        },
    };
    let seed = obj.get("seed").and_then(|v| {
        let s = v.as_u64();
        if s.is_none() {
            violations.push(Violation::new("seed", format!("expected a non-negative integer, got {v}")));
        }
        s
    });
    let output = obj.get("output").and_then(|v| {
        let s = v.as_str().map(str::to_owned);
        if s.is_none() {
            violations.push(Violation::new("output", format!("expected a string, got {v}")));
        }
        s
    });
    for k in ENVELOPE_KEYS {
        obj.remove(k);
    }

    let Some(command) = command else {
        return Err(ConfigError::Invalid(violations));
    };
    let (rules, chain) = rules(command);
    check_fields(&obj, &rules, chain, "", &mut violations);
    if !violations.is_empty() {
        return Err(ConfigError::Invalid(violations));
    }

    let body = Value::Object(obj);
    let decode = |e: serde_json::Error| ConfigError::Invalid(vec![Violation::new("$", e.to_string())]);
    let experiment = match command {
        Command::Spectrum => Experiment::Spectrum(serde_json::from_value(body).map_err(decode)?),
        Command::Pump => Experiment::Pump(serde_json::from_value(body).map_err(decode)?),
        Command::Quench => Experiment::Quench(serde_json::from_value(body).map_err(decode)?),
        Command::Lz => Experiment::Lz(serde_json::from_value(body).map_err(decode)?),
        Command::Trimer => Experiment::Trimer(serde_json::from_value(body).map_err(decode)?),
        Command::Couplings => Experiment::Couplings(serde_json::from_value(body).map_err(decode)?),
        Command::FluxQubit => Experiment::FluxQubit(serde_json::from_value(body).map_err(decode)?),
    };
    let config = ExperimentConfig { schema_version, seed, output, experiment };
    let problems = semantic_violations(&config.experiment);
    if problems.is_empty() {
        Ok(config)
    } else {
        Err(ConfigError::Invalid(problems))
    }
}

fn check_integrator(cfg: &Option<IntegratorConfig>, out: &mut Vec<Violation>) {
    if let Some(Err(e)) = cfg.as_ref().map(IntegratorConfig::validate) {
        out.push(Violation::new("integrator", e.to_string()));
    }
}

fn check_positive(key: &str, value: Option<usize>, min: usize, out: &mut Vec<Violation>) {
    if let Some(n) = value.filter(|&n| n < min) {
        out.push(Violation::new(key, format!("must be >= {min}, got {n}")));
    }
}

fn require_period(chain: &Chain, prefix: &str, out: &mut Vec<Violation>) {
    if chain.period.is_none() {
        out.push(Violation::new(format!("{prefix}T"), "missing required key for a time-dependent run"));
    }
}

fn require_static(chain: &Chain, prefix: &str, out: &mut Vec<Violation>) {
    for p in chain.varying_params() {
        out.push(Violation::new(format!("{prefix}{}", p.name()), "must be a constant for this command"));
    }
}

fn check_sites(key: &str, sites: &[usize], n_sites: usize, out: &mut Vec<Violation>) {
    if let Some(&s) = sites.iter().find(|&&s| s == 0 || s > n_sites) {
        out.push(Violation::new(key, format!("site {s} outside 1..={n_sites}")));
    }
}

fn semantic_violations(e: &Experiment) -> Vec<Violation> {
    let mut out = Vec::new();
    match e {
        Experiment::Spectrum(c) => {
            check_positive("n_times", c.n_times, 2, &mut out);
            if !c.chain.is_static() {
                require_period(&c.chain, "", &mut out);
            }
            if let Some(s) = &c.sweep {
                if !c.chain.kind.required_params().contains(&s.param) {
                    out.push(Violation::new(
                        "sweep.param",
                        format!("{} is not a parameter of kind {}", s.param.name(), c.chain.kind.name()),
                    ));
                }
                require_static(&c.chain, "", &mut out);
                check_positive("sweep.points", Some(s.points), 2, &mut out);
                if s.stop <= s.start {
                    out.push(Violation::new("sweep.stop", "must exceed start"));
                }
            }
        }
        Experiment::Pump(c) => {
            require_period(&c.chain, "", &mut out);
            check_positive("records_per_cycle", c.records_per_cycle, 1, &mut out);
            if let Some(init) = &c.initial {
                if init.sites.is_empty() {
                    out.push(Violation::new("initial.sites", "must list at least one site"));
                }
                check_sites("initial.sites", &init.sites, c.chain.n_sites(), &mut out);
                if let Some(amps) = &init.amplitudes {
                    if amps.len() != init.sites.len() {
                        out.push(Violation::new("initial.amplitudes", "must have one entry per site"));
                    } else if amps.iter().all(|&a| a == 0.0) {
                        out.push(Violation::new("initial.amplitudes", "must not all be zero"));
                    }
                }
            }
            check_integrator(&c.integrator, &mut out);
        }
        Experiment::Quench(c) => {
            require_static(&c.chain, "", &mut out);
            if !(c.t1 > 0.0) {
                out.push(Violation::new("t1", format!("must be > 0, got {}", c.t1)));
            }
            check_sites("flip_site", &[c.flip_site.unwrap_or(1)], c.chain.n_sites(), &mut out);
            check_positive("n_records", c.n_records, 2, &mut out);
            if let Some(d) = &c.disorder {
                if !(d.sigma >= 0.0) {
                    out.push(Violation::new("disorder.sigma", format!("must be >= 0, got {}", d.sigma)));
                }
            }
            check_integrator(&c.integrator, &mut out);
        }
        Experiment::Lz(c) => {
            match (&c.path, &c.compare) {
                (None, None) => out.push(Violation::new("path", "one of path or compare is required")),
                (Some(_), Some(_)) => out.push(Violation::new("compare", "path and compare are mutually exclusive")),
                _ => {}
            }
            if let Some(p) = &c.path {
                if !(p.period > 0.0) {
                    out.push(Violation::new("path.period", format!("must be > 0, got {}", p.period)));
                }
                if let PathShape::Line { theta } = p.shape {
                    if theta.cos().abs() < 1e-12 {
                        out.push(Violation::new("path.shape.theta", "a vertical line has no parameterization in u"));
                    }
                }
            }
            if let Some(cmp) = &c.compare {
                if cmp.chain.kind == ModelKind::Trimer {
                    out.push(Violation::new("compare.kind", "must be ssh or rm"));
                }
                require_period(&cmp.chain, "compare.", &mut out);
                let [t0, t1] = cmp.window;
                let end = cmp.chain.period.unwrap_or(1.0) * f64::from(cmp.chain.cycles.unwrap_or(1));
                if !(0.0 <= t0 && t0 < t1 && t1 <= end) {
                    out.push(Violation::new("compare.window", format!("need 0 <= t0 < t1 <= {end}")));
                }
            }
            check_positive("n_records", c.n_records, 2, &mut out);
            check_integrator(&c.integrator, &mut out);
        }
        Experiment::Trimer(c) => {
            check_positive("L", c.cells, 1, &mut out);
            if !(c.period() > 0.0) {
                out.push(Violation::new("T", "must be > 0"));
            }
            if c.cycles == Some(0) {
                out.push(Violation::new("cycles", "must be >= 1"));
            }
            if c.signs.as_ref().is_some_and(Vec::is_empty) {
                out.push(Violation::new("signs", "must list at least one sign"));
            }
            check_positive("records_per_cycle", c.records_per_cycle, 1, &mut out);
            check_integrator(&c.integrator, &mut out);
        }
        Experiment::Couplings(c) => {
            for (key, axis) in [("alpha_1", &c.alpha_1), ("alpha_2", &c.alpha_2)] {
                if let Axis::Grid(g) = axis {
                    g.violations(key, &mut out);
                }
                if axis.values().iter().any(|x| x.abs() > MAX_ARGUMENT) {
                    out.push(Violation::new(key, format!("|alpha| must be <= {MAX_ARGUMENT}")));
                }
            }
        }
        Experiment::FluxQubit(c) => {
            if let Err(e) = c.circuit().validate() {
                out.push(Violation::new("circuit", e.to_string()));
            }
            check_positive("levels", Some(c.levels), 1, &mut out);
            check_positive("sweep_points", Some(c.sweep_points), 1, &mut out);
            let [lo, hi] = c.f_eps_range;
            if c.sweep_points > 1 && hi <= lo {
                out.push(Violation::new("f_eps_range", "upper end must exceed lower end"));
            }
            if let Some(g) = &c.gap_sweep {
                g.violations("gap_sweep", &mut out);
            }
        }
    }
    if let Experiment::Spectrum(SpectrumConfig { chain, .. })
    | Experiment::Pump(PumpConfig { chain, .. })
    | Experiment::Quench(QuenchConfig { chain, .. }) = e
    {
        if let Err(err) = chain.schedule() {
            out.push(Violation::new("kind", err.to_string()));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_hits_both_ends() {
        assert_eq!(linspace(-1.0, 1.0, 5), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(linspace(3.0, 4.0, 1), vec![3.0]);
        assert!(linspace(0.0, 1.0, 0).is_empty());
    }

    #[test]
    fn schedule_form_keeps_constants_plain() {
        let chain = Chain::from_schedule(ModelKind::RiceMele, 7, &Schedule::standard_pump(100.0, 1));
        assert_eq!(chain.b, Some(ParamValue::Constant(1.0)));
        assert!(matches!(chain.a, Some(ParamValue::Varying(_))));
        assert!(!chain.is_static());
        assert_eq!(chain.schedule().unwrap(), Schedule::standard_pump(100.0, 1));
    }

    #[test]
    fn envelope_keys_are_checked() {
        let err = parse_config(r#"{"command": "spectrum", "kind": "ssh", "L": 3, "a": 0.1, "b": 1}"#).unwrap_err();
        assert_eq!(err.violations()[0].key, "schema_version");
        let err = parse_config(r#"{"schema_version": 1, "command": "nope"}"#).unwrap_err();
        assert_eq!(err, ConfigError::UnknownCommand("nope".into()));
        assert!(matches!(parse_config("{"), Err(ConfigError::Syntax(_))));
    }
}
